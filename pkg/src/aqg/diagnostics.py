"""
Norm tracking along trajectories: the H^s energy ledger, decay summaries,
the regularity-region classifier and the anisotropic frequency split.
"""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass
from typing import List, Optional

import numpy as np

from .spectral import (
    SpectralField,
    anisotropic_symbol,
    fractional_partial,
    sobolev_norm,
)

__all__ = [
    "Region",
    "critical_exponent",
    "classify_region",
    "theorem_hypothesis_holds",
    "DiagnosticsRecord",
    "LedgerReport",
    "LedgerAccumulator",
    "UnsupportedSamplingError",
    "energy_ledger",
    "FrequencySplit",
    "frequency_split",
    "DecayReport",
    "decay_report",
]


class Region(str, enum.Enum):
    GLOBAL_REGULARITY = "global-regularity"
    OUTSIDE_REGION = "outside-region"


def critical_exponent(p):
    """``s = max(2 - 2 alpha, 2 - 2 beta)``."""
    return max(2.0 - 2.0 * p.alpha, 2.0 - 2.0 * p.beta)


def _check_unit(alpha, beta):
    if not (0 < alpha < 1 and 0 < beta < 1):
        raise ValueError(f"alpha and beta must lie in (0, 1), got ({alpha}, {beta})")


def classify_region(alpha, beta):
    """Which side of the known global-regularity threshold ``(alpha, beta)`` lies on.

    The threshold on beta is ``1/(2 alpha + 1)`` for ``alpha <= 1/2`` and
    ``(1 - alpha)/(2 alpha)`` above; the inequality is strict.
    """
    _check_unit(alpha, beta)
    if alpha <= 0.5:
        threshold = 1.0 / (2.0 * alpha + 1.0)
    else:
        threshold = (1.0 - alpha) / (2.0 * alpha)
    return Region.GLOBAL_REGULARITY if beta > threshold else Region.OUTSIDE_REGION


def theorem_hypothesis_holds(alpha, beta):
    """Local well-posedness at the critical index needs ``min(alpha, beta) < 1/2``."""
    _check_unit(alpha, beta)
    return min(alpha, beta) < 0.5


class UnsupportedSamplingError(ValueError):
    pass


@dataclass
class DiagnosticsRecord:
    """One sample of every tracked quantity; field order is the NDJSON key order.

    ``cum_d1``/``cum_d2`` integrate the unweighted squared dissipation norms,
    so ``ledger`` is the left-hand side of the H^s energy inequality.
    ``balance`` adds the dissipation with its true weight ``2 mu``/``2 nu``
    and is conserved exactly by the linear flow.
    """

    t: float
    l2: float
    hs_inhom: float
    hs_hom: float
    d1: float
    d2: float
    cum_d1: float
    cum_d2: float
    ledger: float
    balance: float

    def to_dict(self):
        return {k: float(v) for k, v in asdict(self).items()}


@dataclass
class LedgerReport:
    records: List[DiagnosticsRecord]
    s: float
    initial: float
    max_excess: float
    tolerance: float

    @property
    def violated(self):
        return self.max_excess > self.tolerance

    @property
    def passed(self):
        return not self.violated


def _norms(theta, p, s):
    d1 = sobolev_norm(fractional_partial(theta, 1, p.alpha), s)
    d2 = sobolev_norm(fractional_partial(theta, 2, p.beta), s)
    return (
        sobolev_norm(theta, 0.0),
        sobolev_norm(theta, s),
        sobolev_norm(theta, s, homogeneous=True),
        d1,
        d2,
    )


def _uniform_times(samples):
    t = np.array([st.t for st in samples], dtype=float)
    if len(t) > 2:
        dt = np.diff(t)
        if not np.allclose(dt, dt[0], rtol=1e-9, atol=0.0):
            raise UnsupportedSamplingError("energy ledger needs equally spaced samples")
    return t


class LedgerAccumulator:
    """Streaming trapezoid-rule ledger; one ``add`` per equally spaced sample."""

    def __init__(self, p, s):
        self.p = p
        self.s = s
        self.cum1 = 0.0
        self.cum2 = 0.0
        self.prev = None
        self.dt = None

    def add(self, state):
        l2, hs, hsh, d1, d2 = _norms(state.theta, self.p, self.s)
        if self.prev is not None:
            t0, a1, a2 = self.prev
            h = state.t - t0
            if self.dt is None:
                self.dt = h
            elif not np.isclose(h, self.dt, rtol=1e-9, atol=0.0):
                raise UnsupportedSamplingError("energy ledger needs equally spaced samples")
            self.cum1 += 0.5 * h * (a1 + d1 ** 2)
            self.cum2 += 0.5 * h * (a2 + d2 ** 2)
        self.prev = (state.t, d1 ** 2, d2 ** 2)
        ledger = hs ** 2 + self.cum1 + self.cum2
        balance = hs ** 2 + 2 * self.p.mu * self.cum1 + 2 * self.p.nu * self.cum2
        return DiagnosticsRecord(state.t, l2, hs, hsh, d1, d2, self.cum1, self.cum2, ledger, balance)


def energy_ledger(samples, p, s=None, rtol=1e-6, drift=0.0):
    """Track ``||theta||^2_{H^s} + int ||d1^a theta||^2_{H^s} + int ||d2^b theta||^2_{H^s}``.

    Cumulative integrals use the trapezoid rule on the sample times, which must
    be equally spaced.  The report flags a violation when the ledger exceeds
    ``||theta_0||^2_{H^s}`` by more than ``rtol * ||theta_0||^2 + drift``.
    """
    samples = list(samples)
    if not samples:
        raise ValueError("no samples")
    _uniform_times(samples)
    if s is None:
        s = critical_exponent(p)
    acc = LedgerAccumulator(p, s)
    records = [acc.add(st) for st in samples]
    initial = records[0].hs_inhom ** 2
    excess = max(r.ledger - initial for r in records)
    return LedgerReport(records, s, initial, float(excess), rtol * initial + drift)


@dataclass(frozen=True, eq=False)
class FrequencySplit:
    """``low`` keeps modes with ``A(xi) <= delta``; ``high`` the rest."""

    delta: float
    low: SpectralField
    high: SpectralField


def frequency_split(theta, p, delta):
    """Partition modes by the unweighted symbol ``A = |xi1|^{2a} + |xi2|^{2b}``."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    g = theta.grid
    inside = anisotropic_symbol(g.xi1, g.xi2, p.alpha, p.beta) <= delta
    low = np.where(inside, theta.coeffs, 0.0)
    return FrequencySplit(delta, SpectralField(g, low), SpectralField(g, theta.coeffs - low))


@dataclass
class DecayReport:
    times: tuple
    hs: tuple
    hs_hom: tuple
    l2: tuple
    rate_l2: Optional[float]
    rate_hs: Optional[float]
    terminal_fraction: float
    threshold: float
    monotone: bool
    sojourn: float
    passed: bool

    def to_dict(self):
        return asdict(self)


def _fit_rate(t, y):
    ok = y > 0
    if ok.sum() < 2:
        return None
    slope = np.polyfit(t[ok], np.log(y[ok]), 1)[0]
    return float(-slope)


def _decay_series(samples, s):
    t, hs, hh, l2 = [], [], [], []
    for item in samples:
        if isinstance(item, DiagnosticsRecord):
            t.append(item.t)
            hs.append(item.hs_inhom)
            hh.append(item.hs_hom)
            l2.append(item.l2)
        else:
            t.append(item.t)
            hs.append(sobolev_norm(item.theta, s))
            hh.append(sobolev_norm(item.theta, s, homogeneous=True))
            l2.append(sobolev_norm(item.theta, 0.0))
    return np.array(t), np.array(hs), np.array(hh), np.array(l2)


def decay_report(samples, p, s=None, threshold=0.1, slack=1e-8):
    """Summarise decay of the tracked norms over a finished run.

    ``samples`` are trajectory states or ``DiagnosticsRecord`` rows (the
    latter avoids keeping every field in memory).  ``rate_*`` are exponential
    rates fitted over the final half of the run; ``sojourn`` is the time spent
    with ``||theta||_{Hdot^s}`` above ``threshold`` times its initial value.
    The run passes when the final ``H^s`` norm is below ``threshold`` times the
    initial one; ``monotone`` allows increments up to ``slack``.
    """
    if s is None:
        s = critical_exponent(p)
    t, hs, hh, l2 = _decay_series(samples, s)
    if t.size == 0:
        raise ValueError("no samples")
    pick = (0, len(t) // 2, len(t) - 1)
    late = t >= t[0] + 0.5 * (t[-1] - t[0])
    fraction = 0.0 if hs[0] == 0 else float(hs[-1] / hs[0])
    if len(t) > 1:
        above = hh > threshold * hh[0]
        sojourn = float(np.sum(np.diff(t)[above[:-1]]))
    else:
        sojourn = 0.0
    return DecayReport(
        times=tuple(float(t[i]) for i in pick),
        hs=tuple(float(hs[i]) for i in pick),
        hs_hom=tuple(float(hh[i]) for i in pick),
        l2=tuple(float(l2[i]) for i in pick),
        rate_l2=_fit_rate(t[late], l2[late]),
        rate_hs=_fit_rate(t[late], hs[late]),
        terminal_fraction=fraction,
        threshold=threshold,
        monotone=bool(np.all(np.diff(hs) <= slack)),
        sojourn=sojourn,
        passed=bool(hs[0] == 0 or fraction < threshold),
    )
