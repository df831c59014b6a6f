"""Random Gaussian Hankel matrices and their operator norms.

The ``n x n`` matrix has entries ``A[i, j] = c[i + j]`` (0-based) with symbol
coefficients ``c_m = a_{m+1} xi_{m+1}``.  Products with ``A`` are correlations
of ``c`` with the input and run through one FFT pair.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import math

import numpy as np
import scipy.linalg

from . import rng
from .gaf import block_stats, sample
from .kernels import CircleGrid, eval_grid


class NonConvergenceError(RuntimeError):
    def __init__(self, msg, estimate):
        super().__init__(msg)
        self.estimate = estimate


@dataclass(frozen=True)
class HankelSpec:
    n: int
    profile: object
    seed: int

    def symbol(self):
        return symbol_from_sample(sample(self.profile.truncate(2 * self.n - 1), self.seed), self.n)


def symbol_from_sample(s, n):
    """``c_m = a_{m+1} xi_{m+1}`` for ``m = 0..2n-2``."""
    coeffs = s.coeffs if hasattr(s, "coeffs") else np.asarray(s)
    if len(coeffs) < 2 * n:
        raise ValueError(f"sample has {len(coeffs)} coefficients, need {2 * n}")
    return np.asarray(coeffs[1:2 * n], dtype=complex)


def build_hankel(spec_or_symbol, n=None):
    """Dense ``n x n`` Hankel matrix from a ``HankelSpec`` or a symbol of length ``2n - 1``."""
    if isinstance(spec_or_symbol, HankelSpec):
        n = spec_or_symbol.n
        c = spec_or_symbol.symbol()
    else:
        c = np.asarray(spec_or_symbol)
        n = (len(c) + 1) // 2 if n is None else n
    if n < 1:
        raise ValueError("n must be positive")
    return scipy.linalg.hankel(c[:n], c[n - 1:2 * n - 1])


class HankelOperator:
    """Matrix-free ``A`` with ``A x`` in ``O(n log n)``."""

    def __init__(self, symbol, n=None):
        c = np.asarray(symbol, dtype=complex)
        self.n = (len(c) + 1) // 2 if n is None else int(n)
        self.c = c[:2 * self.n - 1]
        size = 1 << (3 * self.n - 2).bit_length()
        self._size = size
        self._fc = np.fft.fft(self.c, size)

    def matvec(self, x):
        y = np.fft.ifft(self._fc * np.fft.fft(x[::-1], self._size))
        return y[self.n - 1:2 * self.n - 1]

    def rmatvec(self, x):
        # A is complex symmetric, so A^H x = conj(A conj(x))
        return np.conj(self.matvec(np.conj(x)))

    def to_dense(self):
        return build_hankel(self.c, self.n)


@dataclass(frozen=True)
class NormResult:
    value: float
    iterations: int
    residual: float


def op_norm_info(A, tol=1e-8, max_iter=10_000, seed=0):
    """Power iteration on ``A^H A``; stops when the Rayleigh quotient settles."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if isinstance(A, HankelOperator):
        n, mv, rmv = A.n, A.matvec, A.rmatvec
    else:
        A = np.asarray(A)
        n, mv, rmv = A.shape[1], A.__matmul__, lambda x: A.conj().T @ x
    gen = rng.generator(seed, 7)
    v = gen.standard_normal(n) + 1j * gen.standard_normal(n)
    v /= np.linalg.norm(v)
    prev = -1.0
    for it in range(1, max_iter + 1):
        w = rmv(mv(v))
        mu = float(np.real(np.vdot(v, w)))
        nw = np.linalg.norm(w)
        if nw == 0:
            return NormResult(0.0, it, 0.0)
        if prev > 0 and abs(mu - prev) <= tol * mu:
            res = float(np.linalg.norm(w - mu * v))
            return NormResult(math.sqrt(mu), it, res)
        prev = mu
        v = w / nw
    raise NonConvergenceError(f"power iteration did not settle in {max_iter} steps",
                              math.sqrt(max(prev, 0.0)))


def op_norm(A, tol=1e-8, max_iter=10_000, seed=0):
    return op_norm_info(A, tol, max_iter, seed).value


def theorem_bound(b, n):
    """``sum_{k=0}^{L} max_{k <= m <= L} sigma_m^2`` with ``L = ceil(log2(2n))``."""
    L = math.ceil(math.log2(2 * n))
    s2 = np.zeros(L + 1)
    m = min(len(b.sigma2), L + 1)
    s2[:m] = b.sigma2[:m]
    return float(np.maximum.accumulate(s2[::-1]).sum())


def meckes_lower(symbol, n, g=None):
    """``sup_z |sum_d (1 - |n-1-d|/n) c_d z^d|`` over the grid; never exceeds ``||A||``."""
    c = symbol_from_sample(symbol, n) if hasattr(symbol, "coeffs") else np.asarray(symbol)[:2 * n - 1]
    d = np.arange(2 * n - 1)
    w = 1.0 - np.abs(n - 1 - d) / n
    N = g if g is not None else CircleGrid.for_degree(2 * n - 2, 4)
    return float(np.abs(eval_grid(w * c, N)).max())


@dataclass
class NormExperiment:
    dims: list
    trials: int
    master_seed: int
    profile_kind: str
    records: list = field(default_factory=list)

    def norms(self, dim):
        return np.array([r["norm"] for r in self.records if r["dim"] == dim])

    def summary(self):
        rows = []
        for dim in self.dims:
            recs = [r for r in self.records if r["dim"] == dim]
            if not recs:
                continue
            x = np.array([r["norm"] for r in recs])
            bound = recs[0]["bound"]
            rows.append({
                "dim": dim,
                "trials": len(x),
                "mean_norm": float(np.mean(x)),
                "var_norm": float(np.var(x)),
                "mean_norm2": float(np.mean(x * x)),
                "var_norm2": float(np.var(x * x)),
                "bound": bound,
                "ratio_norm2_bound": float(np.mean(x * x)) / bound if bound > 0 else math.nan,
                "ratio_sqrt_nlogn": float(np.mean(x)) / math.sqrt(dim * math.log(dim)) if dim > 1 else math.nan,
            })
        return rows


def _one_trial(task):
    profile, n, trial, master, tol, max_iter, bound = task
    seed = rng.derive_seed(master, n, trial)
    c = HankelSpec(n, profile, seed).symbol()
    info = op_norm_info(HankelOperator(c), tol=tol, max_iter=max_iter, seed=seed)
    return {"dim": n, "trial": trial, "norm": info.value, "bound": bound,
            "lower_bound": meckes_lower(c, n), "seed": seed}


def run_experiment(dims, trials, profile, master_seed, threads=1, tol=1e-8, max_iter=10_000):
    """Operator norms for every ``(dim, trial)``; each trial seeded from ``(master, dim, trial)``."""
    dims = [int(d) for d in dims]
    exp = NormExperiment(dims, int(trials), int(master_seed), profile.kind)
    if trials <= 0:
        return exp
    for n in dims:
        if profile.degree_cap < 2 * n - 1:
            raise ValueError(f"profile degree {profile.degree_cap} too small for dim {n}")
    tasks = []
    for n in dims:
        bound = theorem_bound(block_stats(profile.truncate(2 * n - 1)), n)
        tasks += [(profile, n, t, master_seed, tol, max_iter, bound) for t in range(trials)]
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            exp.records = list(pool.map(_one_trial, tasks))
    else:
        exp.records = [_one_trial(t) for t in tasks]
    return exp
