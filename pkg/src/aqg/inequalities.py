"""
Numerical checks of functional inequalities on discrete periodic fields.

Inequalities with explicit constants (the symbol bound, the constant-one
anisotropic bound, interpolation) are checked sample for sample and any
excess is a violation.  Inequalities whose constant is not known are
summarised by ratio statistics; their verdict is ``bounded`` whenever every
ratio is finite.

Products are evaluated on a grid padded by 3/2, which is exact for inputs
inside the two-thirds band.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, List, Optional

import numpy as np

from .spectral import (
    GridSpec,
    SpectralField,
    forward_transform,
    fractional_laplacian,
    fractional_partial,
    inverse_transform,
    random_bandlimited,
    resample,
    riesz_velocity,
    sobolev_norm,
    two_thirds_mask,
)

__all__ = [
    "PreconditionError",
    "AliasingError",
    "RatioReport",
    "symbol_constant",
    "lattice_sweep",
    "sample_fields",
    "check_symbol_bound",
    "check_anisotropic_bound",
    "check_interpolation",
    "check_commutator",
    "check_product_estimate",
    "check_embedding",
    "check_riesz_bound",
    "lp_norm",
    "exact_product",
    "two_thirds_mask",
]

EXPLICIT_RTOL = 1e-12
EQUALITY_RTOL = 1e-13
BAND_RTOL = 1e-14


class PreconditionError(ValueError):
    """Arguments fall outside the hypotheses of the inequality."""


class AliasingError(ValueError):
    """Inputs are not band-limited to the two-thirds band."""


@dataclass
class RatioReport:
    lemma: str
    samples: int
    max_ratio: float
    quantiles: tuple
    parameters: dict
    verdict: str
    constant: Optional[float] = None
    extra: dict = field(default_factory=dict)
    ratios: np.ndarray = field(default=None, repr=False)

    @property
    def violated(self):
        return self.verdict == "violated"

    def to_dict(self):
        return {
            "lemma": self.lemma,
            "samples": self.samples,
            "max_ratio": self.max_ratio,
            "quantiles": {"p50": self.quantiles[0], "p95": self.quantiles[1], "max": self.quantiles[2]},
            "parameters": self.parameters,
            "verdict": self.verdict,
            "constant": self.constant,
            **self.extra,
        }


def _report(lemma, ratios, parameters, limit=None, **extra):
    """``limit`` is the explicit bound on the ratio, or None for implicit constants."""
    r = np.asarray(ratios, dtype=float)
    if r.size == 0:
        q = (0.0, 0.0, 0.0)
    else:
        q = tuple(float(v) for v in np.quantile(r, [0.5, 0.95, 1.0]))
    if limit is not None:
        verdict = "violated" if np.any(r > limit * (1 + EXPLICIT_RTOL)) else "bounded"
    else:
        verdict = "bounded" if np.all(np.isfinite(r)) else "violated"
    return RatioReport(lemma, int(r.size), q[2], q, dict(parameters), verdict,
                       constant=limit, extra=extra, ratios=r)


def _ratio(lhs, rhs):
    if rhs == 0:
        # 0 <= 0 holds with equality; a positive lhs against 0 is unbounded
        return 0.0 if lhs == 0 else np.inf
    return lhs / rhs


def _as_list(fields):
    if isinstance(fields, SpectralField):
        return [fields]
    return list(fields)


def _as_pairs(pairs):
    if isinstance(pairs, tuple) and len(pairs) == 2 and isinstance(pairs[0], SpectralField):
        return [pairs]
    return list(pairs)


def symbol_constant(p):
    """``max(2^{1/(2 alpha)}, 2^{1/(2 beta)})``."""
    return max(2.0 ** (1 / (2 * p.alpha)), 2.0 ** (1 / (2 * p.beta)))


def lattice_sweep(kmax):
    """All integer wavevectors with ``|k1|, |k2| <= kmax``, flattened."""
    k = np.arange(-kmax, kmax + 1, dtype=float)
    k1, k2 = np.meshgrid(k, k, indexing="ij")
    return k1.ravel(), k2.ravel()


def check_symbol_bound(p, xi1, xi2):
    """``|xi| <= C (A^{1/(2a)} + A^{1/(2b)})`` with ``C = symbol_constant(p)``.

    The ratio is ``|xi| / (C (A^{1/(2a)} + A^{1/(2b)}))``; ``xi = 0`` counts as
    equality.  ``extra['empirical_constant']`` is the sup of
    ``|xi| / (A^{1/(2a)} + A^{1/(2b)})`` over the samples.
    """
    xi1 = np.asarray(xi1, dtype=float).ravel()
    xi2 = np.asarray(xi2, dtype=float).ravel()
    # log space keeps tiny and huge frequencies from under/overflowing
    with np.errstate(divide="ignore"):
        l1, l2 = np.log(np.abs(xi1)), np.log(np.abs(xi2))
    log_a = np.logaddexp(2 * p.alpha * l1, 2 * p.beta * l2)
    log_rhs = np.logaddexp(log_a / (2 * p.alpha), log_a / (2 * p.beta))
    log_mag = 0.5 * np.logaddexp(2 * l1, 2 * l2)
    nz = (xi1 != 0) | (xi2 != 0)
    sharp = np.zeros_like(xi1)
    sharp[nz] = np.exp(log_mag[nz] - log_rhs[nz])
    c = symbol_constant(p)
    return _report("symbol", sharp / c, {"alpha": p.alpha, "beta": p.beta}, limit=1.0,
                   empirical_constant=float(sharp.max()) if sharp.size else 0.0)


def check_anisotropic_bound(fields, p, s, s_prime):
    """``|| |nabla|^a f ||_{Hdot^s} <= ||f||_{Hdot^s'} + || |d1|^a f ||_{Hdot^s} + || |d2|^b f ||_{Hdot^s}``.

    Requires ``alpha <= beta`` and ``s' < s + alpha``; the constant is one.
    """
    if p.alpha > p.beta:
        raise PreconditionError("the anisotropic bound needs alpha <= beta")
    if not s_prime < s + p.alpha:
        raise PreconditionError("the anisotropic bound needs s' < s + alpha")
    ratios = []
    for f in _as_list(fields):
        lhs = sobolev_norm(fractional_laplacian(f, p.alpha), s, homogeneous=True)
        rhs = (sobolev_norm(f, s_prime, homogeneous=True)
               + sobolev_norm(fractional_partial(f, 1, p.alpha), s, homogeneous=True)
               + sobolev_norm(fractional_partial(f, 2, p.beta), s, homogeneous=True))
        ratios.append(_ratio(lhs, rhs))
    return _report("anisotropic", ratios,
                   {"alpha": p.alpha, "beta": p.beta, "s": s, "s_prime": s_prime}, limit=1.0)


def check_interpolation(fields, s1, s2, t, homogeneous=True):
    """``||f||_{s_t} <= ||f||_{s1}^t ||f||_{s2}^{1-t}`` with ``s_t = t s1 + (1-t) s2``.

    ``extra['equalities']`` counts samples tight to 1e-13 (single-shell spectra).
    """
    if not 0.0 <= t <= 1.0:
        raise PreconditionError("t must lie in [0, 1]")
    ratios = []
    for f in _as_list(fields):
        lhs = sobolev_norm(f, t * s1 + (1 - t) * s2, homogeneous)
        rhs = sobolev_norm(f, s1, homogeneous) ** t * sobolev_norm(f, s2, homogeneous) ** (1 - t)
        ratios.append(_ratio(lhs, rhs))
    r = np.asarray(ratios)
    tight = int(np.sum(np.abs(r - 1.0) <= EQUALITY_RTOL))
    return _report("interpolation", ratios,
                   {"s1": s1, "s2": s2, "t": t, "homogeneous": homogeneous}, limit=1.0,
                   equalities=tight)


def _require_band(f):
    # roundoff-level content (e.g. from a forward transform) is tolerated
    mask = two_thirds_mask(f.grid)
    scale = np.max(np.abs(f.coeffs), initial=0.0)
    if np.any(np.abs(f.coeffs[~mask]) > BAND_RTOL * scale):
        raise AliasingError("inputs must be band-limited to |k_i| < n_i/3")


def _padded_grid(grid):
    m1 = 2 * -(-3 * grid.n1 // 4)
    m2 = 2 * -(-3 * grid.n2 // 4)
    return GridSpec(m1, m2, grid.l1, grid.l2)


def exact_product(f, g):
    """Pointwise product on the 3/2-padded grid (alias-free for band-limited inputs)."""
    _require_band(f)
    _require_band(g)
    big = _padded_grid(f.grid)
    a = inverse_transform(resample(f, big))
    b = inverse_transform(resample(g, big))
    return forward_transform(a * b, big)


def check_commutator(pairs, s, alpha):
    """Ratio ``||[|nabla|^s, f] g||_{L2} / (s 2^s B)`` with
    ``B = || |nabla|^{s+a} f || || |nabla|^{1-a} g || + || |nabla|^{s-1+a} g || || |nabla|^{2-a} f ||``.
    """
    if not s > 1:
        raise PreconditionError("the commutator estimate needs s > 1")
    if not 0 < alpha < 1:
        raise PreconditionError("alpha must lie in (0, 1)")
    ratios = []
    for f, g in _as_pairs(pairs):
        fg = exact_product(f, g)
        f_dg = exact_product(f, fractional_laplacian(g, s))
        lhs = sobolev_norm(fractional_laplacian(fg, s) - f_dg, 0.0)
        bracket = (sobolev_norm(f, s + alpha, True) * sobolev_norm(g, 1 - alpha, True)
                   + sobolev_norm(g, s - 1 + alpha, True) * sobolev_norm(f, 2 - alpha, True))
        ratios.append(_ratio(lhs, s * 2 ** s * bracket))
    return _report("commutator", ratios, {"s": s, "alpha": alpha})


def check_product_estimate(pairs, s1, s2):
    """Ratio ``||fg||_{Hdot^{s1+s2-1}} / (||f||_{Hdot^s1} ||g||_{Hdot^s2})`` for ``s1, s2 < 1 < s1+s2+1``."""
    if not (s1 < 1 and s2 < 1 and s1 + s2 > 0):
        raise PreconditionError("the product estimate needs s1 < 1, s2 < 1 and s1 + s2 > 0")
    ratios = []
    for f, g in _as_pairs(pairs):
        lhs = sobolev_norm(exact_product(f, g), s1 + s2 - 1, homogeneous=True)
        rhs = sobolev_norm(f, s1, True) * sobolev_norm(g, s2, True)
        ratios.append(_ratio(lhs, rhs))
    return _report("product", ratios, {"s1": s1, "s2": s2})


def lp_norm(values, grid, p):
    """``(int |v|^p)^{1/p}`` by grid-point quadrature; ``values`` may carry a leading
    vector axis, in which case ``|v|`` is the Euclidean length."""
    v = np.asarray(values, dtype=float)
    mag2 = np.sum(v ** 2, axis=0) if v.ndim == 3 else v ** 2
    return float((grid.area / grid.size * np.sum(mag2 ** (p / 2))) ** (1 / p))


def check_embedding(fields, sigma):
    """Ratio ``||f||_{L^p} / || |nabla|^sigma f ||_{L2}`` with ``1/p + sigma/2 = 1/2``."""
    if not 0 <= sigma < 1:
        raise PreconditionError("sigma must lie in [0, 1)")
    p = 2.0 / (1.0 - sigma)
    ratios = []
    for f in _as_list(fields):
        if abs(f.coeffs[0, 0]) > 0:
            raise PreconditionError("the embedding check needs mean-zero fields")
        lhs = lp_norm(inverse_transform(f), f.grid, p)
        rhs = sobolev_norm(fractional_laplacian(f, sigma), 0.0)
        ratios.append(_ratio(lhs, rhs))
    return _report("embedding", ratios, {"sigma": sigma, "p": p})


def check_riesz_bound(fields, p):
    """Ratio ``||R^perp theta||_{L^p} / ||theta||_{L^p}`` for even ``p``."""
    if int(p) != p or p < 2 or p % 2:
        raise PreconditionError("p must be an even integer >= 2")
    ratios = []
    for th in _as_list(fields):
        if abs(th.coeffs[0, 0]) > 0:
            raise PreconditionError("the Riesz check needs mean-zero fields")
        u1, u2 = riesz_velocity(th).physical()
        lhs = lp_norm(np.stack([u1, u2]), th.grid, p)
        rhs = lp_norm(inverse_transform(th), th.grid, p)
        ratios.append(_ratio(lhs, rhs))
    return _report("riesz", ratios, {"p": int(p)}, limit=1.0 if p == 2 else None)


def sample_fields(grid, count, seed=0, kmax=None, slopes=(0.0, 3.0)) -> List[SpectralField]:
    """``count`` random band-limited mean-zero fields with varied spectra.

    Field ``i`` uses seed ``seed + i``, a random upper shell in
    ``[1, kmax]`` and a random spectral slope in ``slopes``.
    """
    if kmax is None:
        kmax = (min(grid.n1, grid.n2) - 1) // 3
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        top = int(rng.integers(1, kmax + 1))
        slope = float(rng.uniform(*slopes))
        out.append(random_bandlimited(grid, seed + i, 1, top, amplitude=1.0, slope=slope))
    return out
