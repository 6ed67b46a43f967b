#!/usr/bin/env python3
"""Regenerate the bundled mid-infrared optical-constant tables.

Writes ge.csv, sio2.csv and w.csv next to this script, 3.5-7.5 um at
0.025 um spacing. See README.md in this directory for the dispersion
models and their sources.
"""

import cmath
import os

LAMBDA_MIN = 3.5
LAMBDA_MAX = 7.5
STEP = 0.025


def grid():
    count = int(round((LAMBDA_MAX - LAMBDA_MIN) / STEP)) + 1
    return [round(LAMBDA_MIN + i * STEP, 6) for i in range(count)]


def germanium(lam):
    # Three-term Sellmeier fit for crystalline Ge at room temperature.
    l2 = lam * lam
    eps = 9.28156 + 6.72880 * l2 / (l2 - 0.44105) + 0.21307 * l2 / (l2 - 3870.1)
    return cmath.sqrt(eps)


def fused_silica(lam):
    # Malitson Sellmeier terms written as Lorentz oscillators; the 9.9 um
    # Si-O stretch resonance carries a small damping so the tail of the
    # absorption band reaches into the working band.
    omega = 1.0 / lam
    terms = [
        (0.6961663, 0.0684043, 0.0),
        (0.4079426, 0.1162414, 0.0),
        (0.8974794, 9.896161, 0.00175),
    ]
    eps = 1.0 + 0j
    for strength, lam_res, gamma in terms:
        w0 = 1.0 / lam_res
        eps += strength * w0 * w0 / (w0 * w0 - omega * omega - 1j * gamma * omega)
    return cmath.sqrt(eps)


def tungsten(lam):
    # Drude model, plasma frequency 4.83e4 cm^-1, damping 4.87e2 cm^-1.
    wp = 4.83e4
    wt = 4.87e2
    w = 1.0e4 / lam
    eps = 1.0 - wp * wp / (w * (w + 1j * wt))
    return cmath.sqrt(eps)


def write(name, label, model):
    path = os.path.join(os.path.dirname(os.path.abspath(__file__)), name)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# {label}\n")
        fh.write("# wavelength_um,n,k\n")
        for lam in grid():
            idx = model(lam)
            fh.write(f"{lam:.3f},{idx.real:.6f},{max(idx.imag, 0.0):.6e}\n")


if __name__ == "__main__":
    write("ge.csv", "Ge, crystalline, Sellmeier dispersion", germanium)
    write("sio2.csv", "SiO2, fused silica, damped Sellmeier dispersion", fused_silica)
    write("w.csv", "W, Drude free-electron model", tungsten)
