"""Closed-form rate and exit-probability asymptotics with prefactors.

All formulas are leading order in the temperature h; the (1 + O(h))
factor is dropped, and comparisons against Monte Carlo carry explicit
h-dependent margins in the test suite.  Inputs come from a
:class:`~wellexit.landscape.CriticalInventory`: the interior minimum with
its Hessian determinant, and each boundary minimum z_i with its outward
normal derivative and boundary-restricted Hessian determinant.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .errors import WellexitError


class InvalidTemperature(WellexitError):
    pass


class InvalidWindow(WellexitError):
    pass


@dataclasses.dataclass(frozen=True)
class TheoryContext:
    """Inventory plus temperature; the argument pack of every formula here."""

    inventory: object
    h: float

    def __post_init__(self):
        if not self.h > 0:
            raise InvalidTemperature(f"temperature h must be positive, got {self.h}")


@dataclasses.dataclass(frozen=True)
class WindowSpec:
    """A boundary window for exit-probability asymptotics.

    ``saddle`` windows contain exactly one boundary minimum (index i);
    ``generic`` windows avoid all of them, with f attaining its infimum
    f_star at the single point z_star on the window edge, where the
    derivative along the inward window direction is positive (i.e. the
    derivative along the outward window normal, dn_window_f, is negative).
    det_hess_window is the Hessian determinant of f restricted to the
    window edge (1 by convention in dimension 2, where the edge is a
    point pair).
    """

    label: str
    kind: str                      # "saddle" | "generic"
    index: int = 0                 # saddle windows: 1-based minimum index
    f_star: float = math.nan
    z_star: np.ndarray = None
    dn_f_zstar: float = math.nan   # outward normal derivative of f at z_star
    dn_window_f: float = math.nan  # derivative along the window-edge outward normal
    det_hess_window: float = 1.0

    def __post_init__(self):
        if self.kind not in ("saddle", "generic"):
            raise InvalidWindow(f"unknown window kind {self.kind!r}")
        if self.kind == "generic":
            if not np.isfinite(self.f_star):
                raise InvalidWindow("generic window needs f_star")
            if not self.dn_window_f < 0:
                raise InvalidWindow(
                    "generic window needs a negative edge-normal derivative "
                    f"(got {self.dn_window_f})")
            if not self.det_hess_window > 0:
                raise InvalidWindow("window-edge Hessian determinant must be positive")


def _minimum(ctx, i):
    mins = ctx.inventory.boundary_minima
    if not 1 <= i <= len(mins):
        raise IndexError(f"boundary minimum index {i} out of range 1..{len(mins)}")
    return mins[i - 1]


def _global_min_sum(inventory):
    """sum over the lowest boundary minima of dn_f / sqrt(det boundary Hessian)."""
    return sum(m.dn_f / math.sqrt(m.det_hess_boundary)
               for m in inventory.boundary_minima[:inventory.n0])


def rate(ctx, i):
    """Transition rate through the i-th boundary minimum.

    k = (pi h)^{-1/2} dn_f(z_i) sqrt(det Hess f(x0) / det Hess f|bd(z_i))
        exp(-2 (f(z_i) - f(x0)) / h)
    """
    m = _minimum(ctx, i)
    inv = ctx.inventory
    pref = (m.dn_f / math.sqrt(math.pi * ctx.h)
            * math.sqrt(inv.det_hess_x0) / math.sqrt(m.det_hess_boundary))
    return pref * math.exp(-2.0 * (m.f_z - inv.f_x0) / ctx.h)


def principal_eigenvalue(ctx):
    """Smallest Dirichlet eigenvalue: the total exit rate from the well."""
    inv = ctx.inventory
    f1 = inv.boundary_minima[0].f_z
    return (math.sqrt(inv.det_hess_x0) / math.sqrt(math.pi * ctx.h)
            * _global_min_sum(inv)
            * math.exp(-2.0 * (f1 - inv.f_x0) / ctx.h))


def exit_probability(ctx, i):
    """Probability of exiting near the i-th boundary minimum (leading order)."""
    m = _minimum(ctx, i)
    inv = ctx.inventory
    f1 = inv.boundary_minima[0].f_z
    rel = (m.dn_f / math.sqrt(m.det_hess_boundary)) / _global_min_sum(inv)
    return rel * math.exp(-2.0 * (m.f_z - f1) / ctx.h)


@dataclasses.dataclass(frozen=True)
class LogProbabilityLine:
    """Affine theory curve for ln P(exit near z_i) as a function of x = 2/h."""

    intercept: float
    slope: float

    def __call__(self, x):
        return self.intercept + self.slope * np.asarray(x, dtype=float)


def exit_log_probability_line(inventory, i_target):
    """Theory line: intercept from the prefactor ratio, slope from the energy gap.

    ln P = ln[dn_f(z_i) sqrt(det_1) / (dn_f(z_1) sqrt(det_i))]
           - x (f(z_i) - f(z_1)),   x = 2/h.
    """
    m1 = inventory.boundary_minima[0]
    mi = inventory.boundary_minima[i_target - 1]
    intercept = math.log(mi.dn_f * math.sqrt(m1.det_hess_boundary)
                         / (m1.dn_f * math.sqrt(mi.det_hess_boundary)))
    slope = -(mi.f_z - m1.f_z)
    return LogProbabilityLine(intercept=float(intercept), slope=float(slope))


def exit_probability_window(ctx, window):
    """Exit probability through a generic window (no boundary minimum inside).

    Scales like sqrt(h) relative to a saddle window at the same energy:
    the missing quadratic minimum along the boundary costs half a Gaussian
    factor.
    """
    if window.kind != "generic":
        raise InvalidWindow("saddle windows are handled by exit_probability")
    inv = ctx.inventory
    h = ctx.h
    f1 = inv.boundary_minima[0].f_z
    value = (-math.sqrt(h) / (2.0 * math.sqrt(math.pi))
             * window.dn_f_zstar
             / (window.dn_window_f * math.sqrt(window.det_hess_window))
             / _global_min_sum(inv)
             * math.exp(-2.0 * (window.f_star - f1) / h))
    return value


def approx_exit_density(ctx, landscape, z=None, s=None, panels=10_000):
    """Leading-order exit-point density on the boundary.

    density(z) = dn_f(z) exp(-2 f(z)/h) / integral of the same over the
    boundary; the normalizer uses composite trapezoid quadrature on the
    arclength parametrization with panel edges at the corner knots.
    """
    if s is None:
        if z is None:
            raise ValueError("give either a boundary point z or an arclength s")
        s = landscape.domain.boundary_coordinate(np.asarray(z, dtype=float))
    s = np.asarray(s, dtype=float)
    norm = boundary_density_normalizer(ctx, landscape, panels)
    dn = landscape.normal_derivative(s=s)
    f = landscape.boundary_value(s)
    f_ref = _boundary_f_min(landscape)
    return dn * np.exp(-2.0 * (f - f_ref) / ctx.h) / norm


def _boundary_f_min(landscape, n=4096):
    s = np.linspace(0.0, landscape.domain.boundary_length, n, endpoint=False)
    return float(np.min(landscape.boundary_value(s)))


def boundary_density_normalizer(ctx, landscape, panels=10_000):
    """Trapezoid quadrature of dn_f exp(-2 (f - f_min)/h) over the boundary."""
    dom = landscape.domain
    L = dom.boundary_length
    knots = np.sort(np.mod(dom.boundary_knots(), L))
    if knots.size == 0:
        knots = np.array([0.0])
    pieces = np.column_stack([knots, np.roll(knots, -1)])
    pieces[-1, 1] += L
    f_ref = _boundary_f_min(landscape)
    total = 0.0
    for lo, hi in pieces:
        n = max(8, int(round(panels * (hi - lo) / L)))
        s = np.linspace(lo, hi, n + 1)
        sm = np.mod(s, L)
        vals = (landscape.normal_derivative(s=sm)
                * np.exp(-2.0 * (landscape.boundary_value(sm) - f_ref) / ctx.h))
        total += np.trapezoid(vals, s)
    return float(total)


def qsd_normalizing_mass(ctx):
    """Leading-order normalizing integral of the principal eigenfunction
    against the Gibbs weight: pi^{d/4} det^{-1/4} h^{d/4} e^{-f(x0)/h}."""
    inv = ctx.inventory
    d = inv.dimension
    return (math.pi ** (d / 4.0) * inv.det_hess_x0 ** (-0.25)
            * ctx.h ** (d / 4.0) * math.exp(-inv.f_x0 / ctx.h))
