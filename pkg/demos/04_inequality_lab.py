"""
Checking functional inequalities on random fields
=================================================

The lab evaluates both sides of an inequality on many random band-limited
fields and reports the ratio.  Inequalities with explicit constants are
checked sample by sample; for the others the largest ratio is an empirical
lower bound on the unknown constant.
"""

from aqg.inequalities import (
    check_anisotropic_bound,
    check_commutator,
    check_embedding,
    check_interpolation,
    check_product_estimate,
    check_riesz_bound,
    check_symbol_bound,
    lattice_sweep,
    sample_fields,
    symbol_constant,
)
from aqg.spectral import DissipationParams, GridSpec

grid = GridSpec(48, 48)
fields = sample_fields(grid, 200, seed=1)
partners = sample_fields(grid, 200, seed=10_000)
p = DissipationParams(0.3, 0.7)

rep = check_symbol_bound(p, *lattice_sweep(64))
print(f"symbol bound: C = {symbol_constant(p):.4f}, empirical sup {rep.extra['empirical_constant']:.4f}, {rep.verdict}")

for name, rep in [
    ("anisotropic (constant 1)", check_anisotropic_bound(fields, p, 1.4, 0.0)),
    ("interpolation", check_interpolation(fields, 0.0, 2.0, 0.3)),
    ("commutator", check_commutator(list(zip(fields, partners)), 1.4, 0.3)),
    ("product", check_product_estimate(list(zip(fields, partners)), 0.3, 0.7)),
    ("embedding L4", check_embedding(fields, 0.5)),
    ("Riesz L2", check_riesz_bound(fields, 2)),
    ("Riesz L6", check_riesz_bound(fields, 6)),
]:
    q50, q95, qmax = rep.quantiles
    print(f"{name:26s} median {q50:.4f}  p95 {q95:.4f}  max {qmax:.4f}  -> {rep.verdict}")
