"""Estimates and statistical checks on exit-event samples.

Turns event logs into per-window proportions with binomial errors, tests
the structural consequences of starting from the quasi-stationary
distribution (exponential exit times, independence of time and location),
estimates transition rates, and fits the measured log exit probabilities
against the closed-form theory line.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .errors import WellexitError
from .kramers import exit_log_probability_line


class AllCensored(WellexitError):
    pass


class TooFewSamples(WellexitError):
    pass


class DegenerateWindow(WellexitError):
    pass


class ZeroMeanTau(WellexitError):
    pass


class ZeroCount(WellexitError):
    pass


@dataclasses.dataclass(frozen=True)
class WindowStat:
    label: str
    count: int
    p_hat: float
    se: float                   # binomial sqrt(p (1-p) / n)
    ci_lo: float = 0.0          # Wilson interval when count < 30
    ci_hi: float = 1.0


@dataclasses.dataclass(frozen=True)
class ExitSummary:
    n: int                      # uncensored events
    censored: int
    tau_mean: float
    tau_se: float
    windows: tuple              # WindowStat per labeled window
    unlabeled: float            # proportion that hit no window

    def window(self, label):
        for w in self.windows:
            if w.label == label:
                return w
        raise KeyError(f"no window labeled {label!r}")

    def log_proportion(self, label):
        """ln of a window proportion (the target-window F value)."""
        p = self.window(label).p_hat
        if p <= 0:
            raise ZeroCount(f"window {label!r} has no events")
        return math.log(p)


def wilson_interval(count, n, z=1.96):
    """Wilson score interval; robust for small counts."""
    z2 = z * z
    center = (count + z2 / 2.0) / (n + z2)
    half = (z / (n + z2)) * math.sqrt(count * (n - count) / n + z2 / 4.0)
    return max(0.0, center - half), min(1.0, center + half)


def summarize(log):
    """Per-window proportions, mean exit time, and their standard errors.

    Censored events are excluded from every estimate but reported.
    Standard errors are the binomial sqrt(p (1-p) / n); confidence bounds
    switch to the Wilson interval when a window holds fewer than 30
    events, where the normal approximation degenerates.
    """
    ok = ~log.censored
    n = int(np.count_nonzero(ok))
    if n == 0:
        raise AllCensored("no uncensored exit events to summarize")
    taus = log.tau[ok]
    tau_mean = float(np.mean(taus))
    tau_se = float(np.std(taus, ddof=1) / math.sqrt(n)) if n > 1 else float("inf")
    wins = []
    for k, label in enumerate(log.window_labels):
        count = int(np.count_nonzero(log.window[ok] == k))
        p = count / n
        se = math.sqrt(p * (1.0 - p) / n)
        if count < 30 or n - count < 30:
            lo, hi = wilson_interval(count, n)
        else:
            lo, hi = p - 1.96 * se, p + 1.96 * se
        wins.append(WindowStat(label=label, count=count, p_hat=p, se=se,
                               ci_lo=lo, ci_hi=hi))
    unlabeled = float(np.count_nonzero(log.window[ok] < 0)) / n
    return ExitSummary(n=n, censored=int(np.count_nonzero(~ok)),
                       tau_mean=tau_mean, tau_se=tau_se,
                       windows=tuple(wins), unlabeled=unlabeled)


@dataclasses.dataclass(frozen=True)
class KsResult:
    statistic: float
    critical: float
    alpha: float
    passed: bool
    rate: float
    n: int


def kolmogorov_critical(alpha):
    """Asymptotic Kolmogorov critical value c with P(D_n > c/sqrt(n)) = alpha."""
    return math.sqrt(-0.5 * math.log(alpha / 2.0))


def exponentiality_test(taus, alpha=0.01):
    """One-sample KS test of the exit times against Exp(1/mean).

    The rate is estimated from the same sample, which makes the test
    conservative; it is a sanity check for the exponential exit law, not
    a calibrated goodness-of-fit test.
    """
    taus = np.asarray(taus, dtype=float)
    n = taus.size
    if n < 100:
        raise TooFewSamples(f"need at least 100 exit times, got {n}")
    mean = float(np.mean(taus))
    if mean <= 0:
        raise ZeroMeanTau("mean exit time is not positive")
    x = np.sort(taus)
    cdf = 1.0 - np.exp(-x / mean)
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - cdf)
    d_minus = np.max(cdf - (i - 1) / n)
    d = float(max(d_plus, d_minus))
    crit = kolmogorov_critical(alpha) / math.sqrt(n)
    return KsResult(statistic=d, critical=crit, alpha=alpha, passed=d < crit,
                    rate=1.0 / mean, n=n)


@dataclasses.dataclass(frozen=True)
class IndependenceResult:
    correlation: float
    z: float
    passed: bool
    n: int


def independence_test(log, label):
    """Point-biserial correlation between exit time and window membership.

    Starting from the quasi-stationary distribution, the exit time and
    exit location are independent; |z| = |corr| sqrt(n) should stay below
    3 at that null.
    """
    ok = ~log.censored
    taus = log.tau[ok]
    k = log.window_labels.index(label)
    indicator = (log.window[ok] == k).astype(float)
    n = taus.size
    if indicator.min() == indicator.max():
        raise DegenerateWindow(f"window {label!r} indicator is constant")
    corr = float(np.corrcoef(taus, indicator)[0, 1])
    z = corr * math.sqrt(n)
    return IndependenceResult(correlation=corr, z=z, passed=abs(z) < 3.0, n=n)


@dataclasses.dataclass(frozen=True)
class RateEstimate:
    k_hat: float
    se: float
    log_se: float
    label: str


def empirical_rate(summary, label):
    """k = p_hat / tau_mean with a delta-method standard error.

    Under the quasi-stationary start the window indicator and the exit
    time are independent, so the variance contributions add.
    """
    w = summary.window(label)
    if summary.tau_mean <= 0:
        raise ZeroMeanTau("mean exit time is not positive")
    k = w.p_hat / summary.tau_mean
    rel_var = 0.0
    if w.p_hat > 0:
        rel_var += (w.se / w.p_hat) ** 2
    rel_var += (summary.tau_se / summary.tau_mean) ** 2
    log_se = math.sqrt(rel_var)
    return RateEstimate(k_hat=k, se=k * log_se, log_se=log_se, label=label)


@dataclasses.dataclass(frozen=True)
class TrendPoint:
    h: float
    x: float
    log_p: float
    ci_lo: float
    ci_hi: float
    theory: float
    p_hat: float
    count: int


@dataclasses.dataclass(frozen=True)
class TrendFit:
    points: tuple
    slope: float
    intercept: float
    se_slope: float
    se_intercept: float
    theory_slope: float
    theory_intercept: float
    dropped: tuple              # h values dropped for zero counts
    normalized: bool


def weighted_line_fit(x, y, w=None):
    """Least-squares line fit; returns (slope, intercept, se_slope, se_int).

    With w = 1/sigma^2 the parameter errors come from the exact weighted
    covariance; without weights they use the residual variance estimate.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    exact_weights = w is not None
    w = np.ones_like(x) if w is None else np.asarray(w, dtype=float)
    sw = np.sum(w)
    xb = np.sum(w * x) / sw
    yb = np.sum(w * y) / sw
    sxx = np.sum(w * (x - xb) ** 2)
    slope = np.sum(w * (x - xb) * (y - yb)) / sxx
    intercept = yb - slope * xb
    if exact_weights:
        scale = 1.0
    else:
        resid = y - (intercept + slope * x)
        dof = max(1, x.size - 2)
        scale = float(np.sum(resid ** 2) / dof)
    se_slope = math.sqrt(scale / sxx)
    se_intercept = math.sqrt(scale * (1.0 / sw + xb ** 2 / sxx))
    return float(slope), float(intercept), se_slope, se_intercept


def fit_exit_probability_trend(h_grid, summaries, inventory, target_label,
                               i_target=None, reference_label=None,
                               normalized=True, weights="auto"):
    """Fit measured log exit probabilities over an h-grid against theory.

    For each h the point is x = 2/h and F = ln of the target-window
    proportion.  With ``normalized=True`` (the default) the proportion is
    taken relative to the reference window around the lowest boundary
    minimum: the theory formula's denominator only counts the lowest
    minima, so at moderate temperature the measured proportion must be
    normalized the same way for the comparison to be meaningful; the raw
    mode reproduces exactly ln p_hat.

    Grid points with zero target counts are dropped and reported.
    """
    if len(h_grid) != len(summaries):
        raise ValueError("h_grid and summaries length mismatch")
    if i_target is None:
        i_target = int(target_label[-1]) if target_label[-1].isdigit() else 2
    if reference_label is None:
        reference_label = "sigma1"
    line = exit_log_probability_line(inventory, i_target)
    pts, dropped = [], []
    for h, summary in zip(h_grid, summaries):
        w = summary.window(target_label)
        if w.count == 0:
            dropped.append(h)
            continue
        x = 2.0 / h
        if normalized:
            ref = summary.window(reference_label)
            if ref.count == 0:
                dropped.append(h)
                continue
            log_p = math.log(w.p_hat / ref.p_hat)
            se = math.sqrt((w.se / w.p_hat) ** 2 + (ref.se / ref.p_hat) ** 2)
        else:
            log_p = math.log(w.p_hat)
            se = w.se / w.p_hat
        pts.append(TrendPoint(h=h, x=x, log_p=log_p, ci_lo=log_p - 1.96 * se,
                              ci_hi=log_p + 1.96 * se, theory=float(line(x)),
                              p_hat=w.p_hat, count=w.count))
    if len(pts) < 3:
        raise TooFewSamples("need at least 3 usable grid points for the fit")
    xs = np.array([p.x for p in pts])
    ys = np.array([p.log_p for p in pts])
    if weights == "equal":
        wts = None
    else:
        ses = np.array([(p.ci_hi - p.log_p) / 1.96 for p in pts])
        wts = 1.0 / np.maximum(ses, 1e-12) ** 2
    slope, intercept, se_s, se_i = weighted_line_fit(xs, ys, wts)
    return TrendFit(points=tuple(pts), slope=slope, intercept=intercept,
                    se_slope=se_s, se_intercept=se_i,
                    theory_slope=line.slope, theory_intercept=line.intercept,
                    dropped=tuple(dropped), normalized=normalized)
