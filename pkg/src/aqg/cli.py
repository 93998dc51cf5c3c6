"""
Command-line entry point: ``aqg simulate | verify | classify | plot``.

Exit codes: 0 success, 1 explicit-constant violation (verify only),
2 usage or configuration error, 3 blow-up detected.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import inequalities as lab
from .diagnostics import (
    LedgerAccumulator,
    classify_region,
    critical_exponent,
    decay_report,
    theorem_hypothesis_holds,
)
from .dynamics import BlowUpError, trajectory
from .io import (
    ConfigError,
    NDJSONWriter,
    default_output_root,
    dump_config,
    load_config,
    read_ndjson,
    read_snapshot,
    write_snapshot,
)
from .spectral import DissipationParams, GridSpec, SpectralField, inverse_transform

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_BLOWUP = 3

LEDGER_RTOL = 1e-6
DOMAIN_NOTE = "periodic box (torus surrogate of the whole plane)"


def _err(msg):
    print(f"aqg: {msg}", file=sys.stderr)


# -- simulate -----------------------------------------------------------------

def cmd_simulate(config_path, output_dir=None):
    try:
        cfg = load_config(config_path)
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_USAGE
    if output_dir is None:
        output_dir = cfg.output_dir or default_output_root() / Path(config_path).stem
    run_dir = Path(output_dir)
    snap_dir = run_dir / "snapshots"
    snap_dir.mkdir(parents=True, exist_ok=True)
    (run_dir / "config.ini").write_text(dump_config(cfg))

    p = cfg.params
    s = critical_exponent(p)
    theta0 = cfg.initial_field(s)
    acc = LedgerAccumulator(p, s)
    records = []
    blowup = None
    last = None
    with NDJSONWriter(run_dir / "diagnostics.ndjson") as out:
        try:
            run = trajectory(theta0, p, cfg.stepper, cfg.t_end, cfg.sample_every,
                             cfg.galerkin, cfg.ceiling_factor, s)
            for i, state in enumerate(run):
                rec = acc.add(state)
                records.append(rec)
                out.write(rec.to_dict())
                if i == 0 or (cfg.snapshot_every and i % cfg.snapshot_every == 0):
                    write_snapshot(snap_dir / f"snap_{i:06d}.bin", state.theta, state.t)
                last = (i, state)
        except BlowUpError as exc:
            blowup = exc
    if last is not None and not (snap_dir / f"snap_{last[0]:06d}.bin").exists():
        write_snapshot(snap_dir / f"snap_{last[0]:06d}.bin", last[1].theta, last[1].t)

    initial = records[0].hs_inhom ** 2
    excess = max(r.ledger - initial for r in records)
    summary = {
        "domain": {"kind": DOMAIN_NOTE, "l1": cfg.grid.l1, "l2": cfg.grid.l2,
                   "n1": cfg.grid.n1, "n2": cfg.grid.n2},
        "params": {"alpha": p.alpha, "beta": p.beta, "mu": p.mu, "nu": p.nu},
        "region": classify_region(p.alpha, p.beta).value,
        "critical_exponent": s,
        "hypothesis_min_below_half": theorem_hypothesis_holds(p.alpha, p.beta),
        "initial": {"hs": records[0].hs_inhom, "hs_hom": records[0].hs_hom, "l2": records[0].l2},
        "energy_ledger": {"passed": bool(excess <= LEDGER_RTOL * initial), "max_excess": excess,
                          "tolerance": LEDGER_RTOL * initial},
        "decay": decay_report(records, p, s).to_dict(),
        "status": "ok" if blowup is None else "blow-up",
        "blowup_time": None if blowup is None else blowup.t,
        "blowup_reason": None if blowup is None else blowup.reason,
        "samples": len(records),
    }
    (run_dir / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    if blowup is not None:
        _err(str(blowup))
        return EXIT_BLOWUP
    return EXIT_OK


# -- verify -------------------------------------------------------------------

SUITES = ("symbols", "interpolation", "commutator", "product", "embedding", "riesz", "anisotropic")


def _single_shell_fields(grid, count, seed):
    """Fields whose spectrum sits on one lattice circle |k| = r."""
    rng = np.random.default_rng(seed)
    kk = grid.k1[:, None] ** 2 + grid.k2[None, :] ** 2
    band = lab.two_thirds_mask(grid) & (kk > 0)
    radii = np.unique(kk[band])
    out = []
    for i in range(count):
        r2 = radii[rng.integers(len(radii))]
        c = np.where(band & (kk == r2), rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape), 0)
        out.append(SpectralField(grid, c).symmetrized())
    return out


def _suite_reports(suite, opts):
    """Yield ``(parameters, thunk)``; each thunk returns a RatioReport."""
    grid = GridSpec(opts.n, opts.n)
    fields = lambda seed=opts.seed: lab.sample_fields(grid, opts.samples, seed)
    if suite == "symbols":
        k1, k2 = lab.lattice_sweep(opts.kmax)
        for a in opts.alpha or (0.25, 0.5, 0.75):
            for b in opts.beta or (0.25, 0.5, 0.75):
                yield {"alpha": a, "beta": b}, lambda a=a, b=b: lab.check_symbol_bound(DissipationParams(a, b), k1, k2)
    elif suite == "anisotropic":
        for a in opts.alpha or (0.3,):
            for b in opts.beta or (0.7,):
                yield ({"alpha": a, "beta": b, "s": opts.s, "s_prime": opts.s_prime},
                       lambda a=a, b=b: lab.check_anisotropic_bound(fields(), DissipationParams(a, b), opts.s, opts.s_prime))
    elif suite == "interpolation":
        yield ({"s1": opts.s1, "s2": opts.s2, "t": opts.t, "family": "random"},
               lambda: lab.check_interpolation(fields(), opts.s1, opts.s2, opts.t))
        yield ({"s1": opts.s1, "s2": opts.s2, "t": opts.t, "family": "single-shell"},
               lambda: lab.check_interpolation(_single_shell_fields(grid, opts.samples, opts.seed),
                                               opts.s1, opts.s2, opts.t))
    elif suite == "commutator":
        for a in opts.alpha or (0.3,):
            yield ({"s": opts.s, "alpha": a},
                   lambda a=a: lab.check_commutator(list(zip(fields(), fields(opts.seed + 10 ** 6))), opts.s, a))
    elif suite == "product":
        yield ({"s1": opts.s1, "s2": opts.s2},
               lambda: lab.check_product_estimate(list(zip(fields(), fields(opts.seed + 10 ** 6))), opts.s1, opts.s2))
    elif suite == "embedding":
        yield {"sigma": opts.sigma}, lambda: lab.check_embedding(fields(), opts.sigma)
    elif suite == "riesz":
        for pp in opts.p or (2, 4):
            yield {"p": pp}, lambda pp=pp: lab.check_riesz_bound(fields(), pp)


def cmd_verify(suite, opts, output_dir=None):
    if suite not in SUITES:
        _err(f"unknown suite {suite!r}")
        return EXIT_USAGE
    run_dir = Path(output_dir) if output_dir is not None else default_output_root() / f"verify-{suite}"
    run_dir.mkdir(parents=True, exist_ok=True)
    violated = False
    domain = {"kind": DOMAIN_NOTE, "l1": 2 * np.pi, "l2": 2 * np.pi, "n1": opts.n, "n2": opts.n}
    with NDJSONWriter(run_dir / "reports.ndjson") as out:
        for params, thunk in _suite_reports(suite, opts):
            try:
                rep = thunk()
            except (lab.PreconditionError, lab.AliasingError) as exc:
                out.write({"lemma": suite, "parameters": params, "verdict": "skipped", "error": str(exc),
                           "domain": domain})
                print(f"{suite} {params}: skipped ({exc})")
                continue
            out.write({**rep.to_dict(), "domain": domain})
            violated |= rep.violated
            print(f"{suite} {params}: {rep.verdict} max_ratio={rep.max_ratio:.6g} samples={rep.samples}")
    return EXIT_VIOLATION if violated else EXIT_OK


# -- classify -----------------------------------------------------------------

def cmd_classify(alpha, beta):
    try:
        region = classify_region(alpha, beta)
    except ValueError as exc:
        _err(str(exc))
        return EXIT_USAGE
    p = DissipationParams(alpha, beta)
    print(f"region: {region.value}")
    print(f"critical_exponent: {critical_exponent(p):.12g}")
    print(f"hypothesis_min_below_half: {str(theorem_hypothesis_holds(alpha, beta)).lower()}")
    return EXIT_OK


# -- plot ---------------------------------------------------------------------

def _shell_spectrum(theta):
    g = theta.grid
    kk = np.rint(np.sqrt(g.k1[:, None] ** 2 + g.k2[None, :] ** 2)).astype(int)
    e = g.area * np.abs(theta.coeffs) ** 2
    return np.bincount(kk.ravel(), weights=e.ravel())


def cmd_plot(run_dir, kind):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    run_dir = Path(run_dir)
    out_dir = run_dir / "plots"
    snaps = sorted((run_dir / "snapshots").glob("snap_*.bin"))
    if kind == "norms":
        path = run_dir / "diagnostics.ndjson"
        if not path.exists():
            _err(f"{path} not found")
            return EXIT_USAGE
        rows = read_ndjson(path)
        out_dir.mkdir(exist_ok=True)
        t = [r["t"] for r in rows]
        fig, ax = plt.subplots(figsize=(6, 4))
        for key, label in (("l2", "L2"), ("hs_inhom", "H^s"), ("hs_hom", "Hdot^s")):
            y = np.array([r[key] for r in rows])
            if np.any(y > 0):
                ax.semilogy(t, np.where(y > 0, y, np.nan), label=label)
        ax.set_xlabel("t")
        ax.set_ylabel("norm")
        ax.legend()
        target = out_dir / "norms.png"
    elif kind in ("spectrum", "heatmap"):
        if not snaps:
            _err(f"no snapshots under {run_dir / 'snapshots'}")
            return EXIT_USAGE
        out_dir.mkdir(exist_ok=True)
        fig, ax = plt.subplots(figsize=(6, 4))
        if kind == "spectrum":
            for snap in (snaps[0], snaps[-1]):
                theta, t = read_snapshot(snap)
                e = _shell_spectrum(theta)
                k = np.arange(len(e))
                ok = (k > 0) & (e > 0)
                ax.loglog(k[ok], e[ok], label=f"t={t:g}")
            ax.set_xlabel("|k|")
            ax.set_ylabel("shell energy")
            ax.legend()
            target = out_dir / "spectrum.png"
        else:
            theta, t = read_snapshot(snaps[0])
            g = theta.grid
            im = ax.imshow(inverse_transform(theta).T, origin="lower", extent=(0, g.l1, 0, g.l2),
                           cmap="RdBu_r", aspect="auto")
            fig.colorbar(im, ax=ax)
            ax.set_xlabel("x1")
            ax.set_ylabel("x2")
            ax.set_title(f"theta at t={t:g}")
            target = out_dir / "heatmap.png"
    else:
        _err(f"unknown plot kind {kind!r}")
        return EXIT_USAGE
    fig.tight_layout()
    fig.savefig(target, dpi=100)
    plt.close(fig)
    print(target)
    return EXIT_OK


# -- argument parsing ---------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="aqg", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a configured simulation")
    sim.add_argument("config")
    sim.add_argument("--output-dir")

    ver = sub.add_parser("verify", help="check functional inequalities on random fields")
    ver.add_argument("suite", choices=SUITES)
    ver.add_argument("--output-dir")
    ver.add_argument("--alpha", type=float, nargs="*")
    ver.add_argument("--beta", type=float, nargs="*")
    ver.add_argument("--p", type=int, nargs="*")
    ver.add_argument("--n", type=int, default=64, help="grid points per axis")
    ver.add_argument("--samples", type=int, default=50)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--kmax", type=int, default=64, help="lattice radius for the symbols suite")
    ver.add_argument("--s", type=float, default=1.4)
    ver.add_argument("--s-prime", type=float, default=0.0)
    ver.add_argument("--s1", type=float, default=None)
    ver.add_argument("--s2", type=float, default=None)
    ver.add_argument("--t", type=float, default=0.5)
    ver.add_argument("--sigma", type=float, default=0.5)

    cls = sub.add_parser("classify", help="report the regularity region of (alpha, beta)")
    cls.add_argument("alpha", type=float)
    cls.add_argument("beta", type=float)

    plot = sub.add_parser("plot", help="render norms, spectra or heatmaps of a run")
    plot.add_argument("run_dir")
    plot.add_argument("--kind", choices=("norms", "spectrum", "heatmap"), default="norms")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.command == "simulate":
        return cmd_simulate(args.config, args.output_dir)
    if args.command == "verify":
        if args.s1 is None:
            args.s1 = 0.0 if args.suite == "interpolation" else 0.3
        if args.s2 is None:
            args.s2 = 2.0 if args.suite == "interpolation" else 0.7
        return cmd_verify(args.suite, args, args.output_dir)
    if args.command == "classify":
        return cmd_classify(args.alpha, args.beta)
    return cmd_plot(args.run_dir, args.kind)


if __name__ == "__main__":
    sys.exit(main())
