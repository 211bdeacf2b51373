"""Regenerate src/serf/_erf_table.py.

Fits erf piecewise with Chebyshev series in 50-digit arithmetic:
  [0, 1):   erf(a) = a * G(u),  u = a**2 mapped to [-1, 1]
  [k, k+1): erf(a) directly, k = 1..5
Coefficients are truncated once they fall below 1e-20.
"""
from __future__ import annotations

import sys
from pathlib import Path

import mpmath as mp

mp.mp.dps = 50
N_NODES = 64
CUTOFF = mp.mpf("1e-20")


def cheb_coeffs(f, lo, hi):
    lo, hi = mp.mpf(lo), mp.mpf(hi)
    thetas = [mp.pi * (k + mp.mpf(1) / 2) / N_NODES for k in range(N_NODES)]
    vals = [f((hi - lo) / 2 * mp.cos(t) + (hi + lo) / 2) for t in thetas]
    coeffs = []
    for j in range(N_NODES):
        c = 2 * mp.fsum(v * mp.cos(j * t) for v, t in zip(vals, thetas)) / N_NODES
        coeffs.append(c)
    coeffs[0] /= 2
    while abs(coeffs[-1]) < CUTOFF:
        coeffs.pop()
    return coeffs


def small_gate(u):
    if u == 0:
        return 2 / mp.sqrt(mp.pi)
    a = mp.sqrt(u)
    return mp.erf(a) / a


def main(out: Path) -> None:
    pieces = [cheb_coeffs(small_gate, 0, 1)]
    pieces += [cheb_coeffs(mp.erf, k, k + 1) for k in range(1, 6)]
    lines = [
        "# Generated by scripts/gen_erf_table.py; do not edit by hand.",
        "# Chebyshev coefficients, one tuple per unit interval of |x| on [0, 6).",
        "# Piece 0 approximates erf(a)/a in u = a**2; pieces 1..5 approximate erf(a).",
        "ERF_PIECES = (",
    ]
    for coeffs in pieces:
        lines.append("    (")
        lines += [f"        {float(c)!r}," for c in coeffs]
        lines.append("    ),")
    lines.append(")")
    out.write_text("\n".join(lines) + "\n")
    print(f"wrote {out}: degrees {[len(p) - 1 for p in pieces]}", file=sys.stderr)


if __name__ == "__main__":
    root = Path(__file__).resolve().parents[1]
    main(root / "src" / "serf" / "_erf_table.py")
