import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gafbmo.gaf import BlockProfile, CoeffProfile
from gafbmo.hankel import (HankelOperator, HankelSpec, NonConvergenceError, build_hankel,
                           meckes_lower, op_norm, op_norm_info, run_experiment,
                           symbol_from_sample, theorem_bound)


def rand_symbol(n, seed):
    g = np.random.default_rng(seed)
    return g.standard_normal(2 * n - 1) + 1j * g.standard_normal(2 * n - 1)


def test_build_hankel_example():
    A = build_hankel(np.array([1, 2, 3, 4, 5]))
    assert np.array_equal(A, [[1, 2, 3], [2, 3, 4], [3, 4, 5]])
    with pytest.raises(ValueError):
        build_hankel(np.array([1.0]), 0)


def test_two_by_two_closed_form():
    # [[a, b], [b, c]] real symmetric: norm = largest |eigenvalue|
    a, b, c = 1.0, 2.0, -0.5
    A = build_hankel(np.array([a, b, c]))
    tr, det = a + c, a * c - b * b
    eig = [(tr + s * math.sqrt(tr * tr - 4 * det)) / 2 for s in (1, -1)]
    assert np.isclose(op_norm(A, tol=1e-14), max(abs(e) for e in eig))


def test_spec_symbol_shifts_index():
    p = CoeffProfile.kac(64)
    spec = HankelSpec(8, p, 3)
    c = spec.symbol()
    assert len(c) == 15
    A = build_hankel(spec)
    assert A[0, 0] == c[0] and A[7, 7] == c[14]
    with pytest.raises(ValueError):
        symbol_from_sample(np.zeros(10), 8)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 40), st.integers(0, 2 ** 32))
def test_fft_matvec_matches_dense(n, seed):
    c = rand_symbol(n, seed)
    op = HankelOperator(c)
    A = build_hankel(c)
    x = rand_symbol(n, seed + 1)[:n]
    assert np.allclose(op.matvec(x), A @ x)
    assert np.allclose(op.rmatvec(x), A.conj().T @ x)
    assert np.array_equal(op.to_dense(), A)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 30), st.integers(0, 2 ** 32))
def test_transpose_invariance_and_dense_norm(n, seed):
    c = rand_symbol(n, seed)
    A = build_hankel(c)
    assert np.array_equal(A, A.T)
    ref = np.linalg.norm(A, 2)
    assert np.isclose(op_norm(HankelOperator(c), tol=1e-12), ref, rtol=1e-5)


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 30), st.integers(0, 2 ** 32))
def test_leading_submatrix_monotone(n, seed):
    c = rand_symbol(n, seed)
    big = np.linalg.norm(build_hankel(c), 2)
    small = np.linalg.norm(build_hankel(c[:2 * n - 3], n - 1), 2)
    assert small <= big * (1 + 1e-12)


def test_zero_and_nonconvergence():
    assert op_norm(np.zeros((3, 3))) == 0
    c = rand_symbol(50, 1)
    with pytest.raises(NonConvergenceError) as exc:
        op_norm_info(HankelOperator(c), tol=1e-15, max_iter=3)
    assert exc.value.estimate > 0
    with pytest.raises(ValueError):
        op_norm(np.eye(2), tol=0)


def test_theorem_bound_example():
    b = BlockProfile.from_sigma2([1.0, 3.0, 2.0, 0.5])
    # n = 4: L = 3, suffix maxima 3, 3, 2, 0.5
    assert theorem_bound(b, 4) == 8.5
    # missing blocks count as zero
    assert theorem_bound(b, 64) == 8.5


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 60), st.integers(0, 2 ** 32))
def test_meckes_lower_below_norm(n, seed):
    c = rand_symbol(n, seed)
    assert meckes_lower(c, n) <= np.linalg.norm(build_hankel(c), 2) * (1 + 1e-9)


def test_run_experiment_reproducible_and_threaded():
    p = CoeffProfile.kac(256)
    a = run_experiment([8, 32], 3, p, 5)
    b = run_experiment([8, 32], 3, p, 5, threads=3)
    assert a.records == b.records
    assert len(a.norms(8)) == 3
    rows = a.summary()
    assert [r["dim"] for r in rows] == [8, 32]
    assert all(r["bound"] > 0 for r in rows)
    with pytest.raises(ValueError):
        run_experiment([200], 1, p, 5)
    assert run_experiment([8], 0, p, 5).records == []
