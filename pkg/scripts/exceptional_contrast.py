"""Finite-size views of the exceptional constructions.

Prints Gady star/Bloch means by r, BMO-vs-VMO tail medians, and nesting
success rates.  ``--quick`` shrinks every run to a few seconds.
"""
import argparse

import numpy as np

from gafbmo import io, rng
from gafbmo.exceptional import bmo_not_vmo, gady_construct, gady_measure, vmoa_not_sledd
from gafbmo.gaf import sample
from gafbmo.kernels import CircleGrid
from gafbmo.seminorms import vmoa_profile


def gady_table(rs, trials, seed):
    out = []
    for r in rs:
        params, prof = gady_construct(r, seed)
        star, bloch = gady_measure(params, prof, trials)
        out.append({"r": r, "n": params.n, "certified": params.certified,
                    "star_mean": star.mean, "star_se": star.stderr,
                    "bloch_mean": bloch.mean, "bloch_se": bloch.stderr})
    return out


def tail_table(depth, trials, seed):
    out = []
    for label in ("one", "inv-sqrt"):
        prof = bmo_not_vmo("geometric", label, depth)
        N = CircleGrid.for_degree(prof.degree_cap).size
        ex = prof.params["exponents"]
        tails = np.array([vmoa_profile(sample(prof, rng.derive_seed(seed, t)).coeffs, N, ex[-1])
                          for t in range(trials)])
        for k in ex:
            out.append({"a": label, "k": k, "median_tail": float(np.median(tails[:, k]))})
    return out


def nest_table(depth, runs, seed):
    flags = np.array([vmoa_not_sledd(depth, seed=rng.derive_seed(seed, s))[1].flags
                      for s in range(runs)], dtype=float)
    return [{"level": l + 1, "runs": runs, "success_freq": float(f)}
            for l, f in enumerate(flags.mean(axis=0))]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="runs/exceptional")
    ap.add_argument("--seed", type=int, default=9)
    ap.add_argument("--quick", action="store_true")
    a = ap.parse_args()
    q = a.quick
    io.ensure_dir(a.out)
    tables = {
        "gady": gady_table((3, 4) if q else (2, 4, 6), 3 if q else 50, a.seed),
        "tails": tail_table(4 if q else 6, 5 if q else 50, a.seed),
        "nesting": nest_table(6, 40 if q else 200, a.seed),
    }
    for name, rows in tables.items():
        io.write_csv(f"{a.out}/{name}.csv", rows)
        print(f"-- {name}")
        for r in rows:
            print("  " + "  ".join(f"{k}={v:.4g}" if isinstance(v, float) else f"{k}={v}"
                                   for k, v in r.items()))


if __name__ == "__main__":
    main()
