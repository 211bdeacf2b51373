"""Independent numerical references used to check the fast kernels.

Nothing here calls into ``serf.scalar_math`` or ``serf.activations``: the
erf references integrate the Gaussian directly, derivatives come from
function values only.
"""
from __future__ import annotations

import math
from typing import Callable

import numpy as np

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)
_ERF_PANELS = 64
# erfc(8) ~ 1e-29, so integrating past 8 cannot change a double.
_ERF_UPPER = 8.0


def erf_quadrature(x):
    """erf by composite 16-point Gauss-Legendre over [0, min(|x|, 8)].

    Vectorised; accurate to a few ulps, which is ample as a 1e-9 oracle.
    """
    x = np.asarray(x, dtype=np.float64)
    a = np.minimum(np.abs(x), _ERF_UPPER)
    width = a / _ERF_PANELS
    total = np.zeros_like(a)
    for k in range(_ERF_PANELS):
        mid = (k + 0.5) * width
        t = mid[..., None] + 0.5 * width[..., None] * _GL_NODES
        total = total + 0.5 * width * (np.exp(-t * t) @ _GL_WEIGHTS)
    out = np.copysign(2.0 / math.sqrt(math.pi) * total, x)
    return float(out) if out.ndim == 0 else out


def adaptive_simpson(f: Callable[[float], float], a: float, b: float, tol: float = 1e-14,
                     max_depth: int = 60) -> float:
    def simpson(lo, hi, flo, fmid, fhi):
        return (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)

    def recurse(lo, hi, flo, fmid, fhi, whole, eps, depth):
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        left = simpson(lo, mid, flo, flm, fmid)
        right = simpson(mid, hi, fmid, frm, fhi)
        if depth <= 0 or abs(left + right - whole) <= 15.0 * eps:
            return left + right + (left + right - whole) / 15.0
        return (recurse(lo, mid, flo, flm, fmid, left, eps / 2, depth - 1)
                + recurse(mid, hi, fmid, frm, fhi, right, eps / 2, depth - 1))

    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    return recurse(a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol, max_depth)


def erf_simpson(x: float, tol: float = 1e-14) -> float:
    """Scalar erf by adaptive Simpson quadrature of the Gaussian."""
    a = min(abs(x), _ERF_UPPER)
    val = 2.0 / math.sqrt(math.pi) * adaptive_simpson(lambda t: math.exp(-t * t), 0.0, a, tol)
    return math.copysign(val, x)


def softplus_reference(x):
    """ln(1+e^x) via numpy's logaddexp."""
    return np.logaddexp(0.0, x)


def central_difference(f, x, h):
    return (f(x + h) - f(x - h)) / (2.0 * h)


def richardson_derivative(f, x, h=1e-5):
    """Central difference with one Richardson step, O(h^4) truncation."""
    coarse = central_difference(f, x, h)
    fine = central_difference(f, x, h / 2.0)
    return (4.0 * fine - coarse) / 3.0


def second_difference(f, x, h):
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)


def richardson_second_derivative(f, x, h=1e-3):
    coarse = second_difference(f, x, h)
    fine = second_difference(f, x, h / 2.0)
    return (4.0 * fine - coarse) / 3.0


def golden_section_minimize(f: Callable[[float], float], lo: float, hi: float,
                            tol: float = 1e-10) -> tuple[float, float]:
    """Minimise a unimodal scalar function on [lo, hi]; returns (x, f(x))."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)
