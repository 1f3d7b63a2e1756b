"""Exact and asymptotic one-dimensional exit probabilities.

On an interval (z1, z2) with a single interior minimum, the probability
of exiting through the right endpoint starting from x has the closed
form

    w_h(x) = integral_{z1}^{x} e^{2 f / h} / integral_{z1}^{z2} e^{2 f / h},

which this module evaluates with max-shift-stabilized adaptive
quadrature.  The Laplace-method asymptotics of w_h come in three regimes
depending on the sign of f(x) - f(z1).  Together these serve as the
cross-validation oracle for the full simulation stack.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np
from scipy.integrate import quad

from .errors import WellexitError


class QuadratureFailure(WellexitError):
    pass


class InvalidInterval(WellexitError):
    pass


@dataclasses.dataclass(frozen=True)
class Interval1D:
    """Interval with one interior minimum and outward-sloping endpoints."""

    f: object                    # scalar -> scalar, vectorized
    fprime: object
    z1: float
    z2: float
    x0: float = dataclasses.field(init=False, default=0.0)

    def __post_init__(self):
        if not self.z1 < self.z2:
            raise InvalidInterval("need z1 < z2")
        if not self.fprime(self.z1) < 0:
            raise InvalidInterval(f"need f'(z1) < 0, got {self.fprime(self.z1)}")
        if not self.fprime(self.z2) > 0:
            raise InvalidInterval(f"need f'(z2) > 0, got {self.fprime(self.z2)}")
        if not self.f(self.z1) < self.f(self.z2):
            raise InvalidInterval("need f(z1) < f(z2)")
        xs = np.linspace(self.z1, self.z2, 20001)
        signs = np.sign(self.fprime(xs))
        flips = np.nonzero(np.diff(signs) != 0)[0]
        if flips.size != 1:
            raise InvalidInterval(
                f"need exactly one interior critical point, found {flips.size}")
        lo, hi = xs[flips[0]], xs[flips[0] + 1]
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self.fprime(lo) * self.fprime(mid) <= 0:
                hi = mid
            else:
                lo = mid
        x0 = 0.5 * (lo + hi)
        eps = 1e-5 * (self.z2 - self.z1)
        curv = (self.fprime(x0 + eps) - self.fprime(x0 - eps)) / (2 * eps)
        if not curv > 0:
            raise InvalidInterval(f"interior critical point must be a minimum "
                                  f"(f'' = {curv})")
        object.__setattr__(self, "x0", float(x0))


def from_poly(coeffs, z1, z2):
    """Interval1D from polynomial coefficients in increasing degree."""
    c = np.asarray(coeffs, dtype=float)
    d1 = np.polynomial.polynomial.polyder(c)
    return Interval1D(
        f=lambda x: np.polynomial.polynomial.polyval(x, c),
        fprime=lambda x: np.polynomial.polynomial.polyval(x, d1),
        z1=float(z1), z2=float(z2))


def exact_exit_prob(interval, x, h, rel_tol=1e-10):
    """w_h(x): probability of exiting right starting from x (exact quadrature).

    The integrand e^{2f/h} is shifted by max f before exponentiating, so
    the two integrals stay in range even when 2(f_max - f_min)/h reaches
    hundreds.
    """
    if not interval.z1 <= x <= interval.z2:
        raise ValueError(f"x={x} outside [{interval.z1}, {interval.z2}]")
    if h <= 0:
        raise ValueError("h must be positive")
    if x == interval.z1:
        return 0.0
    if x == interval.z2:
        return 1.0
    xs = np.linspace(interval.z1, interval.z2, 4097)
    f_max = float(np.max(interval.f(xs)))

    def integrand(t):
        return math.exp(2.0 * (float(interval.f(t)) - f_max) / h)

    pts = sorted({interval.z1, interval.x0, x, interval.z2})
    try:
        num, num_err = quad(integrand, interval.z1, x, limit=400,
                            points=[p for p in pts if interval.z1 < p < x],
                            epsabs=0.0, epsrel=rel_tol)
        den, den_err = quad(integrand, interval.z1, interval.z2, limit=400,
                            points=[p for p in pts
                                    if interval.z1 < p < interval.z2],
                            epsabs=0.0, epsrel=rel_tol)
    except Exception as err:  # scipy signals hopeless integrands by raising
        raise QuadratureFailure(str(err)) from err
    if den <= 0 or not np.isfinite(num) or not np.isfinite(den):
        raise QuadratureFailure("stabilized integrals degenerate")
    if den_err > 1e-6 * den or (num > 0 and num_err > 1e-6 * num):
        raise QuadratureFailure(
            f"quadrature error too large: num {num_err:.2e}/{num:.2e}, "
            f"den {den_err:.2e}/{den:.2e}")
    return num / den


@dataclasses.dataclass(frozen=True)
class LaplaceValue:
    value: float
    regime: str                  # "below" | "equal" | "above"


def laplace_asymptotic(interval, x, h):
    """Leading-order w_h(x) by Laplace's method, with its regime tag.

    below  (f(x) < f(z1)):  -f'(z2)/f'(z1) e^{-2(f(z2)-f(z1))/h}
    equal  (f(x) = f(z1)):  f'(z2) (1/f'(x) - 1/f'(z1)) e^{-2(f(z2)-f(z1))/h}
    above  (f(x) > f(z1)):  f'(z2)/f'(x) e^{-2(f(z2)-f(x))/h}
    """
    if h <= 0:
        raise ValueError("h must be positive")
    if x == interval.z1:
        raise ValueError("asymptotics are not defined at x = z1")
    fx = float(interval.f(x))
    f1 = float(interval.f(interval.z1))
    f2 = float(interval.f(interval.z2))
    d1 = float(interval.fprime(interval.z1))
    d2 = float(interval.fprime(interval.z2))
    if abs(fx - f1) < 1e-12:
        dx = float(interval.fprime(x))
        value = d2 * (1.0 / dx - 1.0 / d1) * math.exp(-2.0 * (f2 - f1) / h)
        return LaplaceValue(value=value, regime="equal")
    if fx < f1:
        value = -d2 / d1 * math.exp(-2.0 * (f2 - f1) / h)
        return LaplaceValue(value=value, regime="below")
    dx = float(interval.fprime(x))
    value = d2 / dx * math.exp(-2.0 * (f2 - fx) / h)
    return LaplaceValue(value=value, regime="above")
