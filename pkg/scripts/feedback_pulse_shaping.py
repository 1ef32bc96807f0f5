#!/usr/bin/env python3
"""Pulse shaping of a single photon by a cavity closed through a beamsplitter.

Generates the two standard curve families:
  * decaying exponential input (beta = 2) into a kappa = 2 cavity loop
  * Gaussian input (bandwidth 2.92) into a kappa = 1 cavity loop
each for reflectivities gamma in {0, 0.5, 0.9}. gamma = 0 is the bare
cavity; as gamma -> 1 the output approaches the input pulse.

Writes one CSV per family and prints the peak detection probabilities.
Pass --plot to render PNGs next to the CSVs (requires matplotlib).
"""

import argparse
from pathlib import Path

import numpy as np

from photonflow import (
    apply_spectral_filter,
    decaying_exp,
    default_grid,
    fft_spectrum,
    gaussian_pulse,
    ifft_pulse,
    loop_response,
    sample_pulse,
)

GAMMAS = (0.0, 0.5, 0.9)


def family(pulse, kappa, omega_c=0.0):
    grid = default_grid(pulse, rates=(kappa,))
    spectrum = fft_spectrum(pulse, grid)
    xi_sq = np.abs(sample_pulse(pulse, grid)) ** 2
    curves = {"t": grid.times, "abs_xi_sq": xi_sq}
    for gamma in GAMMAS:
        h = loop_response(omega_c, kappa, gamma, spectrum.omegas)
        out = ifft_pulse(apply_spectral_filter(spectrum, h))
        curves[f"abs_eta3_sq_gamma_{gamma:g}"] = np.abs(out.values) ** 2
    return curves


def write_csv(path, curves):
    keys = list(curves)
    data = np.column_stack([curves[k] for k in keys])
    header = ",".join(keys)
    np.savetxt(path, data, delimiter=",", header=header, comments="", fmt="%.17g")
    print(f"wrote {path}")


def maybe_plot(path, curves, title, t_range):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4))
    t = curves["t"]
    mask = (t >= t_range[0]) & (t <= t_range[1])
    for key in curves:
        if key == "t":
            continue
        ax.plot(t[mask], curves[key][mask], label=key)
    ax.set_xlabel("t")
    ax.set_ylabel("detection probability density")
    ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    print(f"wrote {path}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="out", help="output directory")
    ap.add_argument("--plot", action="store_true", help="also render PNGs")
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    cases = [
        ("shaping_decaying_exp", decaying_exp(2.0), 2.0, (-1.0, 6.0)),
        ("shaping_gaussian", gaussian_pulse(2.92, 0.0), 1.0, (-3.0, 6.0)),
    ]
    for name, pulse, kappa, t_range in cases:
        curves = family(pulse, kappa)
        write_csv(out / f"{name}.csv", curves)
        peaks = {k: float(v.max()) for k, v in curves.items() if k != "t"}
        print(f"{name}: peaks {peaks}")
        if args.plot:
            maybe_plot(out / f"{name}.png", curves, name, t_range)


if __name__ == "__main__":
    main()
