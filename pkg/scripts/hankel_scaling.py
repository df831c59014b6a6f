"""Operator norms of random Hankel matrices against sqrt(n log n) and the block bound.

    python3 scripts/hankel_scaling.py --out runs/hankel [--quick]
"""
import argparse

from gafbmo import io
from gafbmo.gaf import CoeffProfile
from gafbmo.hankel import run_experiment


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="runs/hankel")
    ap.add_argument("--seed", type=int, default=6)
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--quick", action="store_true", help="dims up to 256, 10 trials")
    a = ap.parse_args()
    dims = [64, 128, 256] if a.quick else [64, 128, 256, 512, 1024]
    trials = 10 if a.quick else a.trials
    io.ensure_dir(a.out)
    summary = []
    for alpha in (0.0, 0.25, 0.5, 1.0):
        p = CoeffProfile.power_law(alpha, 2 * dims[-1] - 1)
        exp = run_experiment(dims, trials, p, a.seed, threads=a.threads)
        io.write_csv(f"{a.out}/norms_alpha{alpha}.csv", exp.records)
        for row in exp.summary():
            summary.append({"alpha": alpha, **row})
    io.write_csv(f"{a.out}/summary.csv", summary)
    print(f"{'alpha':>6} {'dim':>5} {'mean |A|':>10} {'/sqrt(nlogn)':>13} {'E|A|^2/bound':>13}")
    for r in summary:
        print(f"{r['alpha']:6.2f} {r['dim']:5d} {r['mean_norm']:10.3f} "
              f"{r['ratio_sqrt_nlogn']:13.4f} {r['ratio_norm2_bound']:13.4f}")


if __name__ == "__main__":
    main()
