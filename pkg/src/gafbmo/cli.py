"""Command-line experiment runner.

Every run writes ``manifest.json`` (full config, seeds, schema version),
``results.csv`` and ``summary.csv`` into ``--out`` and prints the summary.
Exit status: 0 ok, 1 failed verification, 2 bad configuration,
3 numerical non-convergence (partial outputs are written and flagged).
"""
import argparse
from concurrent.futures import ThreadPoolExecutor
import math
import sys

import numpy as np

from . import __version__, chaining, exceptional, gaf, hankel, io, rng, seminorms
from .kernels import CircleGrid, eval_grid

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NONCONV = 0, 1, 2, 3


def _ints(text):
    return [int(x) for x in str(text).split(",") if x.strip()]


def _pmap(fn, items, threads):
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _grid_for(degree, override):
    return CircleGrid(override).size if override else CircleGrid.for_degree(degree).size


# -- subcommands -------------------------------------------------------------
# each returns (rows, summary_rows, extra_manifest)

def cmd_sample(a):
    p = gaf.load_profile(a.profile, a.degree)
    s = gaf.sample(p, a.seed)
    rows = [{"n": n, "a": float(p.values[n]), "re": float(c.real), "im": float(c.imag)}
            for n, c in enumerate(s.coeffs)]
    N = _grid_for(p.degree_cap, a.grid)
    vals = eval_grid(s.coeffs, N)
    b = gaf.block_stats(p)
    summary = [{"l2": float(np.sqrt(np.sum(np.abs(s.coeffs) ** 2))),
                "sup_grid": float(np.abs(vals).max()), "grid_size": N}]
    cond = gaf.check_conditions(b)
    return rows, summary, {"conditions": cond.sums, "converged": cond.converged,
                           "dyadic_regular": cond.dyadic_regular}


def cmd_seminorm(a):
    p = gaf.load_profile(a.profile, a.degree)
    N = _grid_for(p.degree_cap, a.grid)

    def one(t):
        seed = rng.derive_seed(a.seed, t)
        c = gaf.sample(p, seed).coeffs
        v = eval_grid(c, N)
        ests = [seminorms.star_norm_grid(v), seminorms.bloch_norm(c, None, N),
                seminorms.sledd_T(c, N), seminorms.sledd_R(c, N)]
        return [e.to_record(trial=t, seed=seed) for e in ests]

    rows = [r for rs in _pmap(one, range(a.trials), a.threads) for r in rs]
    cols = ["trial", "seed", "name", "value", "grid_size", "family", "is_lower_bound"]
    rows = [{c: r[c] for c in cols} for r in rows]
    return rows, io.summarize(rows, "name", ["value"]), {}


def cmd_chaining(a):
    p = gaf.load_profile(a.profile, a.degree)
    b = gaf.block_stats(p)
    N = _grid_for(p.degree_cap, a.grid)
    g = chaining.gamma_bounds(p, a.nets)
    sb = chaining.sledd_sufficient_bound(b)

    def one(t):
        seed = rng.derive_seed(a.seed, t)
        return seminorms.sledd_R(gaf.sample(p, seed).coeffs, N).value ** 2

    mc = _pmap(one, range(a.trials), a.threads)
    rows = [{"trial": t, "seed": rng.derive_seed(a.seed, t), "rsledd2": v} for t, v in enumerate(mc)]
    mean = math.fsum(mc) / len(mc) if mc else math.nan
    summary = [{"profile": a.profile, "tau_sum": sb.tau_sum, "gamma1": g.gamma1, "gamma2": g.gamma2,
                "formula_gamma1": g.formula_gamma1, "formula_gamma2": g.formula_gamma2,
                "l2": sb.l2, "mc_rsledd2": mean,
                "ratio_mc_tau": mean / sb.tau_sum if sb.tau_sum else math.nan}]
    return rows, summary, {"nets": g.nets}


def cmd_hankel(a):
    p = gaf.load_profile(a.profile, max(2 * max(a.dims) - 1, 1))
    exp = hankel.run_experiment(a.dims, a.trials, p, a.seed, threads=a.threads, tol=a.tol,
                                 max_iter=a.max_iter)
    cols = ["dim", "trial", "norm", "bound", "lower_bound", "seed"]
    return exp.records, exp.summary(), {"columns": cols}


def cmd_gady(a):
    params, prof = exceptional.gady_construct(a.r, a.seed, certify=a.certify)
    N = CircleGrid.for_degree(prof.degree_cap).size
    star, bloch = exceptional.measure_profile(prof, a.trials, a.seed,
                                              exceptional.gady_family(params, N),
                                              exceptional.gady_radii(params), N)
    rows = [{"trial": t, "seed": rng.derive_seed(a.seed, t), "star": s, "bloch": b}
            for t, (s, b) in enumerate(zip(star.values, bloch.values))]
    summary = [{"r": a.r, "n": params.n, "certified": params.certified,
                "star_mean": star.mean, "star_se": star.stderr,
                "bloch_mean": bloch.mean, "bloch_se": bloch.stderr}]
    return rows, summary, {"params": params.to_dict()}


def cmd_bmovmo(a):
    rows = []
    for label in ("one", "inv-sqrt"):
        prof = exceptional.bmo_not_vmo(a.schedule, label, a.depth, a.seed, c=a.ratio)
        N = CircleGrid.for_degree(prof.degree_cap).size
        K = prof.params["exponents"][-1]
        for t in range(a.trials):
            seed = rng.derive_seed(a.seed, t)
            tail = seminorms.vmoa_profile(gaf.sample(prof, seed).coeffs, N, K)
            for k in prof.params["exponents"]:
                rows.append({"a": label, "trial": t, "seed": seed, "k": k, "tail": float(tail[k])})
    summary = []
    for label in ("one", "inv-sqrt"):
        for k in sorted({r["k"] for r in rows}):
            vals = [r["tail"] for r in rows if r["a"] == label and r["k"] == k]
            summary.append({"a": label, "k": k, "median_tail": float(np.median(vals))})
    return rows, summary, {"exponents": exceptional.schedule_exponents(a.schedule, a.depth, a.ratio)}


def cmd_vmosledd(a):
    rows = []
    for t in range(a.trials):
        seed = rng.derive_seed(a.seed, t)
        _, nest = exceptional.vmoa_not_sledd(a.depth, a.c, seed)
        for lvl, f in enumerate(nest.flags, 1):
            rows.append({"run": t, "seed": seed, "level": lvl, "success": f,
                         "value_at_x": nest.values[lvl - 1]})
    summary = []
    for lvl in range(1, a.depth + 1):
        fl = [r["success"] for r in rows if r["level"] == lvl]
        summary.append({"level": lvl, "runs": len(fl), "success_freq": sum(fl) / max(len(fl), 1)})
    return rows, summary, {"exponents": exceptional.nesting_exponents(a.depth, a.c)}


def cmd_nonsep(a):
    coeffs, pairs = exceptional.sledd_nonsep_family(a.j)
    rows = [{"A": "+".join(map(str, np.atleast_1d(k[0]))), "B": "+".join(map(str, np.atleast_1d(k[1]))),
             "tsledd_distance": v} for k, v in pairs.items()]
    summary = [{"pairs": len(rows), "min_distance": min(r["tsledd_distance"] for r in rows)}]
    return rows, summary, {}


# -- verification suites -------------------------------------------------------

def _suite_kernels():
    from fractions import Fraction as F
    from .kernels import fejer_coeffs, l1_norm, trapezoid_value
    out = []
    out.append(("fejer_l1", all(abs(l1_norm(fejer_coeffs(n), CircleGrid.for_degree(n, 8)) - 1) < 1e-6
                                for n in range(0, 33))))
    out.append(("partition_of_unity", all(sum(trapezoid_value(n, K) for n in range(14)) == F(1)
                                          for K in range(1, 4097))))
    return out


def _suite_gaf():
    p = gaf.CoeffProfile.from_spec("geometric")
    b = gaf.block_stats(p)
    return [("sigma_sum", math.isclose(float(np.sum(b.sigma2)), float(np.sum(p.values ** 2)),
                                        rel_tol=1e-12)),
            ("determinism", np.array_equal(gaf.sample(p, 3).coeffs, gaf.sample(p, 3).coeffs))]


def _suite_chaining():
    r = chaining.mgf_check(0.5, 0.5, 200_000, 1)
    return [("mgf", abs(r.empirical - r.closed_form) < 4 * r.stderr)]


def _suite_hankel():
    A = hankel.build_hankel(np.array([1.0, 2.0, 3.0]))
    return [("norm_2x2", abs(hankel.op_norm(A) - (2 + math.sqrt(5))) < 1e-6)]


SUITES = {"kernels": _suite_kernels, "gaf": _suite_gaf,
          "chaining": _suite_chaining, "hankel": _suite_hankel}


def cmd_verify(a):
    names = list(SUITES) if a.suite == "all" else [a.suite]
    rows = []
    for s in names:
        for name, ok in SUITES[s]():
            rows.append({"suite": s, "check": name, "passed": bool(ok)})
    passed = all(r["passed"] for r in rows)
    return rows, [{"checks": len(rows), "passed": sum(r["passed"] for r in rows)}], {"ok": passed}


# -- plumbing ------------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(prog="gafbmo", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, trials=20):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default="gafbmo-out")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--trials", type=int, default=trials)
        p.add_argument("--grid", type=int, default=None, help="circle grid size (power of two)")
        p.add_argument("--tol", type=float, default=1e-8)

    p = sub.add_parser("sample", help="sample one truncated GAF")
    common(p, 1)
    p.add_argument("--profile", default="geometric")
    p.add_argument("--degree", type=int, default=1 << 12)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("seminorm", help="seminorm estimates over Monte Carlo samples")
    common(p)
    p.add_argument("--profile", default="geometric")
    p.add_argument("--degree", type=int, default=1 << 10)
    p.set_defaults(func=cmd_seminorm)

    p = sub.add_parser("chaining", help="chaining bounds against Monte Carlo RSledd^2")
    common(p, 200)
    p.add_argument("--profile", default="geometric")
    p.add_argument("--degree", type=int, default=1 << 12)
    p.add_argument("--nets", type=int, default=4)
    p.set_defaults(func=cmd_chaining)

    p = sub.add_parser("hankel", help="random Hankel operator norms")
    common(p, 10)
    p.add_argument("--profile", default="kac")
    p.add_argument("--dims", type=_ints, default=[64, 128])
    p.add_argument("--max-iter", type=int, default=10_000)
    p.set_defaults(func=cmd_hankel)

    p = sub.add_parser("exceptional", help="exceptional constructions")
    ex = p.add_subparsers(dest="which", required=True)
    q = ex.add_parser("gady")
    common(q, 50)
    q.add_argument("--r", type=int, default=2)
    q.add_argument("--certify", action=argparse.BooleanOptionalAction, default=None)
    q.set_defaults(func=cmd_gady)
    q = ex.add_parser("bmovmo")
    common(q, 50)
    q.add_argument("--depth", type=int, default=6)
    q.add_argument("--schedule", choices=["geometric", "tower"], default="geometric")
    q.add_argument("--ratio", type=float, default=1.5)
    q.set_defaults(func=cmd_bmovmo)
    q = ex.add_parser("vmosledd")
    common(q, 200)
    q.add_argument("--depth", type=int, default=6)
    q.add_argument("--c", type=float, default=0.1)
    q.set_defaults(func=cmd_vmosledd)
    q = ex.add_parser("nonsep")
    common(q, 0)
    q.add_argument("--j", type=_ints, default=[5, 10])
    q.set_defaults(func=cmd_nonsep)

    p = sub.add_parser("verify", help="run a built-in identity suite")
    common(p, 0)
    p.add_argument("--suite", choices=list(SUITES) + ["all"], default="all")
    p.set_defaults(func=cmd_verify)
    return ap


def _config(a):
    return {k: v for k, v in sorted(vars(a).items()) if k != "func"}


def _print_table(rows, stream=None):
    stream = stream or sys.stdout
    if not rows:
        return
    cols = list(rows[0])
    cells = [[io._cell(r.get(c, "")) for c in cols] for r in rows]
    width = [max(len(c), *(len(x[i]) for x in cells)) for i, c in enumerate(cols)]
    print("  ".join(c.ljust(w) for c, w in zip(cols, width)), file=stream)
    for x in cells:
        print("  ".join(v.ljust(w) for v, w in zip(x, width)), file=stream)


def run(argv=None):
    ap = build_parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    config = _config(a)
    manifest = {"schema": io.SCHEMA_VERSION, "version": __version__, "config": config,
                "status": "ok"}
    status = EXIT_OK
    try:
        rows, summary, extra = a.func(a)
    except (gaf.ProfileSpecError, exceptional.ConstructionError, ValueError) as exc:
        print(f"gafbmo: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except hankel.NonConvergenceError as exc:
        print(f"gafbmo: {exc} (best estimate {exc.estimate!r})", file=sys.stderr)
        rows, summary, extra = [], [], {"best_estimate": exc.estimate}
        manifest["status"] = "nonconvergence"
        status = EXIT_NONCONV
    manifest.update(extra)
    if a.command == "verify" and not extra.get("ok", True):
        status = EXIT_FAIL
    io.ensure_dir(a.out)
    cols = extra.get("columns")
    manifest["results_columns"] = io.write_csv(f"{a.out}/results.csv", rows, cols)
    manifest["summary_columns"] = io.write_csv(f"{a.out}/summary.csv", summary)
    io.write_json(f"{a.out}/manifest.json", manifest)
    _print_table(summary)
    return status


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
