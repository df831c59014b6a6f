"""Exit criteria, each at its stated size and tolerance.

Every test prints one PASS/FAIL line; the lines are repeated in the terminal
summary.  Runtime budgets are measured and reported next to the result.
"""
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from gafbmo import rng
from gafbmo.chaining import delta_exact, delta_monte_carlo, mgf_check
from gafbmo.cli import run
from gafbmo.exceptional import bmo_not_vmo, gady_construct, gady_measure, vmoa_not_sledd
from gafbmo.gaf import CoeffProfile, block_stats, sample
from gafbmo.hankel import HankelOperator, op_norm, run_experiment
from gafbmo.kernels import (CircleGrid, eval_grid, fejer_coeffs, l1_norm, trapezoid_coeffs,
                            trapezoid_value)
from gafbmo.seminorms import block_star_norm, sledd_R, sledd_T, star_norm_grid, vmoa_profile

pytestmark = [pytest.mark.acceptance, pytest.mark.slow]


def test_c01_kernel_identities(record):
    t0 = time.perf_counter()
    fejer = max(abs(l1_norm(fejer_coeffs(n), CircleGrid(1 << (n + 5))) - 1) for n in range(11))
    trap = max(l1_norm(trapezoid_coeffs(n).symmetrized(), CircleGrid(1 << (n + 5)))
               for n in range(11))
    unity = all(sum(trapezoid_value(n, K) for n in range(15)) == Fraction(1)
                for K in range(1, (1 << 12) + 1))
    envelope = True
    for n in range(11):
        g = CircleGrid(1 << (n + 5))
        vals = eval_grid(trapezoid_coeffs(n).symmetrized(), g)[1:]
        env = 20 * 2.0 ** -n / np.abs(1 - np.exp(2j * np.pi * g.theta[1:])) ** 2
        envelope &= bool(np.all(np.abs(vals) <= env))
    dt = time.perf_counter() - t0
    ok = fejer < 1e-6 and trap <= 6.001 and unity and envelope and dt < 10
    assert record(1, ok, f"|K|_1 err {fejer:.1e}, max |T|_1 {trap:.3f}, unity {unity}, "
                         f"envelope {envelope}, {dt:.1f}s")


def test_c02_mgf(record):
    # pairs with lam^2 (1 - rho^2) <= 0.2, where exp(lam X) has finite variance
    t0 = time.perf_counter()
    g = rng.generator(2, 0)
    worst = 0.0
    for i in range(20):
        r = float(g.uniform(0, 1))
        lam = float(g.uniform(-1, 1)) * math.sqrt(0.2 / (1 - r * r))
        res = mgf_check(r, lam, 10 ** 6, rng.derive_seed(2, i))
        worst = max(worst, abs(res.empirical - res.closed_form) / res.stderr)
    dt = time.perf_counter() - t0
    assert record(2, worst <= 3 and dt < 60, f"worst |z| = {worst:.2f} (<= 3), {dt:.1f}s")


def test_c03_delta_closed_form(record):
    g = rng.generator(3, 0)
    p = CoeffProfile.power_law(0.5, 1023)
    worst = 0.0
    for i in range(20):
        s2, r = float(g.uniform(0.1, 4)), float(g.uniform(0, 0.99))
        mean, _ = delta_monte_carlo(s2, r, 10 ** 6, rng.derive_seed(3, i))
        worst = max(worst, abs(mean / (s2 * math.sqrt(1 - r * r)) - 1))
    # delta_exact evaluates the same law from a profile: sigma_n^2 sqrt(1 - rho_n^2)
    th = np.linspace(0, 1, 9)
    from gafbmo.chaining import rho
    same = np.allclose(delta_exact(p, 6, th), block_stats(p).sigma2[6] * np.sqrt(1 - rho(p, 6, th) ** 2),
                       atol=1e-7)
    assert record(3, worst < 0.01 and same, f"worst relative error {worst:.2e} (< 1e-2)")


def test_c04_chaining_vs_reality(record):
    deg = 1 << 12
    N = CircleGrid.for_degree(deg).size
    ratios = []
    for law in ("geometric", "inverse-square"):
        p = CoeffProfile.from_spec({"kind": "block", "sigma2": law, "degree_cap": deg})
        tau = float(block_stats(p).tau2.sum())
        mc = np.mean([sledd_R(sample(p, rng.derive_seed(4, s)).coeffs, N).value ** 2
                      for s in range(200)])
        ratios.append(mc / tau)
    C = ratios[0]
    assert record(4, ratios[1] <= 2 * C,
                  f"C fit {C:.3f} on 2^-k, (k+1)^-2 needs {ratios[1]:.3f} <= 2C")


def _random_poly(g, i, lo=8, hi=512):
    d = int(g.integers(lo, hi + 1))
    p = CoeffProfile.power_law(float(g.uniform(0, 1.5)), d)
    return sample(p, rng.derive_seed(g.integers(2 ** 62), i)).coeffs


def test_c05_sledd_coupling(record):
    # C_cal is the largest ratio on the first 100 polynomials, checked on the other 100
    g = rng.generator(5, 0)
    ratios = []
    for i in range(200):
        c = _random_poly(g, i)
        N = CircleGrid.for_degree(len(c) - 1, 4).size
        ratios.append(star_norm_grid(eval_grid(c, N)).value / sledd_T(c, N).value)
    ratios = np.array(ratios)
    C = ratios[:100].max()
    bad = int(np.sum(ratios[100:] > 1.05 * C))
    assert record(5, bad == 0, f"C_cal {C:.3f}, held-out max {ratios[100:].max():.3f}, "
                               f"{bad} violations beyond 5%")


def test_c06_hankel_scaling(record):
    t0 = time.perf_counter()
    dims = [64, 128, 256, 512, 1024]
    kac = run_experiment(dims, 50, CoeffProfile.kac(2047), 6)
    rows = kac.summary()
    scaled = [r["ratio_sqrt_nlogn"] for r in rows]
    spread = max(scaled) / min(scaled)
    meckes = all(r["lower_bound"] <= r["norm"] * (1 + 1e-9) for r in kac.records)
    # one C_cal for all four profiles, fit on dims 64 and 128, held out on the rest
    table = {0.0: rows}
    for alpha in (0.25, 0.5, 1.0):
        table[alpha] = run_experiment(dims, 50, CoeffProfile.power_law(alpha, 2047), 6).summary()
    fit = [r["ratio_norm2_bound"] for rs in table.values() for r in rs if r["dim"] <= 128]
    held = [r["ratio_norm2_bound"] for rs in table.values() for r in rs if r["dim"] > 128]
    C = max(fit)
    kac_only = max(held + fit) / max(r["ratio_norm2_bound"] for r in rows)
    dt = time.perf_counter() - t0
    ok = spread < 1.25 and meckes and max(held) <= 1.05 * C and dt < 600
    assert record(6, ok, f"spread {spread:.3f} (< 1.25), meckes {meckes}, "
                         f"C_cal {C:.3f}, held-out max {max(held):.3f} (<= 1.05 C_cal), "
                         f"profile spread over Kac {kac_only:.2f}x, {dt:.0f}s")


def test_c07_holland_walsh(record):
    g = rng.generator(7, 0)
    ratios = []
    for i in range(100):
        c = sample(CoeffProfile.power_law(float(g.uniform(0, 1.5)), 128), rng.derive_seed(7, i)).coeffs
        ratios.append(op_norm(HankelOperator(c[:129])) / star_norm_grid(eval_grid(c, 1024)).value)
    width = max(ratios) / min(ratios)
    assert record(7, width < 50, f"op_norm / star in [{min(ratios):.3f}, {max(ratios):.3f}], "
                                 f"width {width:.2f} (< 50)")


def test_c08_block_polynomials(record):
    g = rng.generator(8, 0)
    bad, worst = 0, 0.0
    for n in range(6, 11):
        for t in range(50):
            c = np.zeros(2 << n, dtype=complex)
            c[1 << n:] = rng.complex_normals(rng.derive_seed(8, n, t), 0, 1 << n)
            N = CircleGrid.for_degree(len(c) - 1, 8).size
            vals = eval_grid(c, N)
            r = np.abs(vals).max() / block_star_norm(vals, n - 6).value
            worst = max(worst, r)
            bad += r > 2 ** 10
    del g
    assert record(8, bad == 0, f"worst sup/star {worst:.2f} (<= 1024), {bad} violations")


def test_c09_gady(record):
    t0 = time.perf_counter()
    stars, blochs = [], []
    for r in (2, 4, 6):
        params, prof = gady_construct(r, 9)
        s, b = gady_measure(params, prof, 50)
        stars.append(s.mean)
        blochs.append(b.mean)
    dt = time.perf_counter() - t0
    inc = stars[0] < stars[1] < stars[2]
    ratio = max(blochs) / min(blochs)
    ok = inc and ratio < 2 and dt < 300
    assert record(9, ok, f"star means {', '.join(f'{x:.3f}' for x in stars)} increasing {inc}, "
                         f"bloch max/min {ratio:.3f} (< 2), {dt:.0f}s (< 300)")


def test_c10_bmo_vs_vmo(record):
    tails = {}
    for label in ("one", "inv-sqrt"):
        prof = bmo_not_vmo("geometric", label, 6)
        N = CircleGrid.for_degree(prof.degree_cap).size
        K = prof.params["exponents"][-1]
        vals = [vmoa_profile(sample(prof, rng.derive_seed(10, t)).coeffs, N, K)[K]
                for t in range(50)]
        tails[label] = float(np.median(vals))
    ratio = tails["one"] / tails["inv-sqrt"]
    assert record(10, ratio >= 2, f"median deepest tail ratio {ratio:.3f} (>= 2)")


def test_c11_nesting(record):
    runs = [vmoa_not_sledd(6, seed=rng.derive_seed(11, s))[1] for s in range(200)]
    flags = np.array([r.flags for r in runs], dtype=float)
    freq = flags.mean(axis=0)
    se = np.sqrt(freq * (1 - freq) / len(runs))
    level_ok = bool(np.all(freq >= 1 / 3 - 3 * se))
    gap = min(r.rsledd_lower - r.flag_sum for r in runs)
    ok = level_ok and gap >= -1e-6
    assert record(11, ok, f"success freq {np.round(freq, 2).tolist()}, "
                          f"min(lower - flag sum) {gap:.3f} (>= -1e-6)")


EXPERIMENTS = [
    ["sample", "--degree", "1024"],
    ["seminorm", "--degree", "256", "--trials", "8"],
    ["chaining", "--degree", "1024", "--trials", "16"],
    ["hankel", "--dims", "64,128", "--trials", "8"],
    ["exceptional", "gady", "--r", "3", "--trials", "4"],
    ["exceptional", "bmovmo", "--depth", "4", "--trials", "4"],
    ["exceptional", "vmosledd", "--depth", "6", "--trials", "20"],
    ["exceptional", "nonsep", "--j", "5,10"],
    ["verify", "--suite", "kernels"],
]


def test_c12_determinism(record, tmp_path):
    bad = []
    for i, argv in enumerate(EXPERIMENTS):
        outs = []
        for rep, threads in enumerate((1, 1, 8, 8)):
            out = tmp_path / f"{i}-{rep}"
            assert run(argv + ["--seed", "12", "--threads", str(threads), "--out", str(out)]) == 0
            outs.append(tuple((out / f).read_bytes() for f in ("results.csv", "summary.csv")))
        if len(set(outs)) != 1:
            bad.append(" ".join(argv[:2]))
    assert record(12, not bad, f"{len(EXPERIMENTS)} experiments x (1, 8 threads) x 2 runs, "
                               f"differing: {bad or 'none'}")
