"""Correlations of dyadic blocks, their pseudometrics, and chaining bounds.

``Q_n(theta) = R_n * G(e(theta))`` is a stationary complex Gaussian process
with variance ``sigma_n^2``.  For two angles the pair ``(Q_n(t1), Q_n(t2))``
has correlation modulus ``rho_n(t1 - t2)`` and the difference of squared
moduli is Laplace distributed with scale ``sigma_n^2 sqrt(1 - rho_n^2)``.
"""
from dataclasses import dataclass
from itertools import combinations
import math

import numpy as np

from . import rng
from .gaf import block_stats

TOOSMALL_C = 8 * math.pi ** 2


@dataclass(frozen=True)
class CorrelationProfile:
    n: int
    sigma2: float
    theta: np.ndarray
    rho: np.ndarray


@dataclass(frozen=True)
class PseudometricTable:
    theta: np.ndarray
    delta: np.ndarray       # (blocks, len(theta))
    d_inf: np.ndarray
    d_2: np.ndarray

    def dist(self, i, j, which="inf"):
        """Distance between grid angles ``i`` and ``j`` (full dyadic grid only)."""
        row = self.d_inf if which == "inf" else self.d_2
        return float(row[(i - j) % len(self.theta)])


@dataclass(frozen=True)
class GammaEstimate:
    gamma1: float
    gamma2: float
    nets: str
    formula_gamma1: float
    formula_gamma2: float


@dataclass(frozen=True)
class MgfResult:
    empirical: float
    closed_form: float
    stderr: float


def _block_weights(p, n):
    a2 = p.values ** 2
    lo, hi = 1 << n, min(1 << (n + 1), len(a2))
    if lo >= len(a2):
        return lo, np.zeros(0)
    return lo, a2[lo:hi]


def _block_char(p, n, theta):
    """``sum_k a_k^2 e(k theta)`` over block ``n`` and ``sigma_n^2``."""
    lo, w = _block_weights(p, n)
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    s2 = math.fsum(w)
    if s2 == 0:
        return np.zeros(theta.shape, dtype=complex), 0.0
    M = _dyadic_size(theta)
    if M is not None and len(w) > 64:
        # fold onto the grid, one FFT gives every theta = j/M
        buf = np.zeros(M, dtype=complex)
        np.add.at(buf, (lo + np.arange(len(w))) % M, w)
        return np.fft.ifft(buf) * M, s2
    k = lo + np.arange(len(w))
    out = np.empty(theta.shape, dtype=complex)
    for s in range(0, len(theta), 256):
        t = theta[s:s + 256]
        out[s:s + 256] = np.exp(2j * np.pi * np.outer(t, k)) @ w
    return out, s2


def _dyadic_size(theta):
    M = len(theta)
    if M >= 2 and M & (M - 1) == 0 and np.array_equal(theta, np.arange(M) / M):
        return M
    return None


def rho(p, n, theta):
    """``sigma_n^-2 |sum a_k^2 e(k theta)|``; 1 for an empty block."""
    ch, s2 = _block_char(p, n, theta)
    scalar = np.ndim(theta) == 0
    if s2 == 0:
        r = np.ones(ch.shape)
    else:
        r = np.clip(np.abs(ch) / s2, 0.0, 1.0)
    return float(r[0]) if scalar else r


def correlation_profile(p, n, theta):
    theta = np.asarray(theta, dtype=float)
    _, s2 = _block_char(p, n, theta[:1])
    return CorrelationProfile(n, s2, theta, rho(p, n, theta))


def delta_exact(p, n, theta):
    """``E| |Q_n(theta)|^2 - |Q_n(0)|^2 | = sigma_n^2 sqrt(1 - rho_n^2)``."""
    ch, s2 = _block_char(p, n, theta)
    if s2 == 0:
        d = np.zeros(ch.shape)
    else:
        # s2^2 - |ch|^2 loses less precision than 1 - rho^2 near theta = 0
        d = np.sqrt(np.maximum(s2 * s2 - np.abs(ch) ** 2, 0.0))
    return float(d[0]) if np.ndim(theta) == 0 else d


def correlated_pair(gen, rho_val, size):
    """Standard complex Gaussian pairs with ``|E H1 conj(H2)| = rho``.

    Uses the lower-triangular factor ``[[1, 0], [rho, sqrt(1 - rho^2)]]``.
    """
    z = gen.standard_normal((4, size)) * math.sqrt(0.5)
    x1 = z[0] + 1j * z[1]
    x2 = z[2] + 1j * z[3]
    return x1, rho_val * x1 + math.sqrt(max(1.0 - rho_val * rho_val, 0.0)) * x2


def mgf_closed_form(rho_val, lam):
    return 1.0 / (1.0 - lam * lam * (1.0 - rho_val * rho_val))


def mgf_check(rho_val, lam, trials, seed, chunk=1 << 18):
    """Monte Carlo of ``E exp(lam (|H1|^2 - |H2|^2))`` against the closed form."""
    if not 0 <= rho_val <= 1:
        raise ValueError("rho must lie in [0, 1]")
    if lam * lam * (1 - rho_val * rho_val) >= 1:
        raise ValueError("lambda outside the admissible region lam^2 (1 - rho^2) < 1")
    tot, tot2 = 0.0, 0.0
    for c, s in enumerate(range(0, trials, chunk)):
        m = min(chunk, trials - s)
        h1, h2 = correlated_pair(rng.generator(seed, 1, c), rho_val, m)
        v = np.exp(lam * (np.abs(h1) ** 2 - np.abs(h2) ** 2))
        tot += math.fsum(v)
        tot2 += math.fsum(v * v)
    mean = tot / trials
    var = max(tot2 / trials - mean * mean, 0.0)
    return MgfResult(mean, mgf_closed_form(rho_val, lam), math.sqrt(var / trials))


def delta_monte_carlo(sigma2, rho_val, trials, seed, chunk=1 << 18):
    """Monte Carlo ``E| sigma^2 (|H1|^2 - |H2|^2) |`` and its standard error."""
    tot, tot2 = 0.0, 0.0
    for c, s in enumerate(range(0, trials, chunk)):
        m = min(chunk, trials - s)
        h1, h2 = correlated_pair(rng.generator(seed, 2, c), rho_val, m)
        v = sigma2 * np.abs(np.abs(h1) ** 2 - np.abs(h2) ** 2)
        tot += math.fsum(v)
        tot2 += math.fsum(v * v)
    mean = tot / trials
    return mean, math.sqrt(max(tot2 / trials - mean * mean, 0.0) / trials)


def metrics_table(p, theta_grid):
    """``Delta_n`` for every block plus ``d_inf = sup_n`` and ``d_2 = l2 over n``.

    ``theta_grid`` is an array of angles or an integer ``M`` meaning ``j/M``.
    """
    if np.isscalar(theta_grid):
        theta = np.arange(int(theta_grid)) / int(theta_grid)
    else:
        theta = np.asarray(theta_grid, dtype=float)
    K = block_stats(p).K
    delta = np.array([delta_exact(p, n, theta) for n in range(K + 1)])
    if delta.size == 0:
        delta = np.zeros((1, len(theta)))
    return PseudometricTable(theta, delta, delta.max(axis=0),
                             np.sqrt(np.sum(delta ** 2, axis=0)))


# -- generic chaining ---------------------------------------------------------

def _neg_part(x):
    return -min(x, 0)


def _levels_until_negligible(K):
    # once 2^k exceeds the top block every term decays like 2^(K - 2^k)
    return max(int(math.ceil(math.log2(K + 70))) + 1, 1)


def gamma_formula(sigma2):
    """Closed-form net estimates (constants dropped), summed over all levels."""
    s2 = np.asarray(sigma2, dtype=float)
    n = np.arange(len(s2))
    g1 = g2 = 0.0
    for k in range(_levels_until_negligible(len(s2) - 1) + 1):
        w = 2.0 ** -np.maximum(2 ** k - n, 0)
        g1 += float(np.max(w * s2, initial=0.0)) * 2.0 ** k
        g2 += math.sqrt(math.fsum(w * w * s2 * s2)) * 2.0 ** (k / 2)
    return g1, g2


def _level_bound(s2, k):
    # sup_{|h| <= 2^(-2^k - 1)} Delta_n(h) via 1 - rho_n^2 <= 8 pi^2 4^n h^2
    n = np.arange(len(s2))
    f = np.minimum(1.0, math.pi * math.sqrt(2) * 2.0 ** (n - 2.0 ** k - 1))
    d = f * s2
    return float(d.max(initial=0.0)), math.sqrt(math.fsum(d * d))


def _level_measured(p, k, K, samples=257):
    h = np.linspace(0.0, 2.0 ** (-(2 ** k) - 1), samples)
    delta = np.array([delta_exact(p, n, h) for n in range(K + 1)])
    return float(delta.max(axis=0).max()), float(np.sqrt((delta ** 2).sum(axis=0)).max())


def gamma_bounds(p, K_nets):
    """Upper estimates of ``gamma_1(d_inf)`` and ``gamma_2(d_2)`` with dyadic nets.

    The net ``C_k`` holds the ``2^(2^k)`` points ``j 2^-(2^k)``, so
    ``sup_t d(t, C_k) <= sup_{|h| <= 2^(-2^k - 1)} d(h)``.  Levels ``k <= K_nets``
    use sampled values of ``d`` on that range (capped by the analytic bound);
    deeper levels use the analytic bound from ``1 - rho_n^2 <= 8 pi^2 4^n h^2``.
    """
    if K_nets > 16:
        raise ValueError("K_nets must be at most 16")
    b = block_stats(p)
    s2 = b.sigma2
    g1 = g2 = 0.0
    last = max(_levels_until_negligible(b.K), K_nets)
    for k in range(last + 1):
        u1, u2 = _level_bound(s2, k)
        if k <= K_nets and k <= 4:
            m1, m2 = _level_measured(p, k, b.K)
            u1, u2 = min(u1, m1), min(u2, m2)
        g1 += 2.0 ** k * u1
        g2 += 2.0 ** (k / 2) * u2
    f1, f2 = gamma_formula(s2)
    nets = f"dyadic C_k, |C_k| = 2^(2^k), sampled k <= {min(K_nets, 4)}"
    return GammaEstimate(g1, g2, nets, f1, f2)


def gamma_bruteforce(dist, alpha, levels):
    """Exact ``inf sup_t sum_k 2^(k/alpha) d(t, C_k)`` on a small finite set.

    ``dist`` is a symmetric matrix; ``levels`` is the number of levels
    searched exhaustively, deeper levels take ``C_k`` = the whole set.
    """
    dist = np.asarray(dist, dtype=float)
    T = len(dist)
    best = math.inf
    sizes = [min(2 ** (2 ** k) if k else 1, T) for k in range(levels)]

    def search(k, acc):
        nonlocal best
        if k == levels:
            best = min(best, float(acc.max()))
            return
        if sizes[k] >= T:
            search(k + 1, acc)
            return
        for net in combinations(range(T), sizes[k]):
            cand = acc + 2.0 ** (k / alpha) * dist[:, list(net)].min(axis=1)
            if cand.max() < best:
                search(k + 1, cand)

    search(0, np.zeros(T))
    return best


@dataclass(frozen=True)
class SufficientBound:
    gamma1: float
    gamma2: float
    l2: float
    bound: float
    tau_sum: float


def sledd_sufficient_bound(b):
    """``gamma_1 + gamma_2 + sqrt(sum a_n^2)`` (closed-form nets) and ``sum tau_k^2``."""
    g1, g2 = gamma_formula(b.sigma2)
    l2 = math.sqrt(math.fsum(b.sigma2))
    return SufficientBound(g1, g2, l2, g1 + g2 + l2, float(math.fsum(b.tau2)))


def tail_bound(d_inf_val, d_2_val, t, C=0.5):
    """``exp(-C min(t / d_inf, t^2 / d_2^2))``."""
    if t < 0 or d_inf_val < 0 or d_2_val < 0:
        raise ValueError("t and metrics must be non-negative")
    if t == 0:
        return 1.0
    a = t / d_inf_val if d_inf_val > 0 else math.inf
    q = t * t / (d_2_val * d_2_val) if d_2_val > 0 else math.inf
    return math.exp(-C * min(a, q))


def block_pair_difference(sigma2, rhos, trials, seed):
    """Samples of ``F(t1) - F(t2)`` with ``F = sum_n |Q_n|^2`` for given block data."""
    out = np.zeros(trials)
    for i, (s2, r) in enumerate(zip(sigma2, rhos)):
        h1, h2 = correlated_pair(rng.generator(seed, 3, i), r, trials)
        out += s2 * (np.abs(h1) ** 2 - np.abs(h2) ** 2)
    return out


def product_mgf(sigma2, rhos, lam):
    """``prod_n 1 / (1 - lam^2 (1 - rho_n^2) sigma_n^4)``."""
    val = 1.0
    for s2, r in zip(sigma2, rhos):
        x = lam * lam * (1 - r * r) * s2 * s2
        if x >= 1:
            raise ValueError("lambda outside the admissible region")
        val /= 1 - x
    return val


def admissible_lambda(sigma2, rhos):
    """``lambda_star``: the largest ``lam`` with every factor finite."""
    scales = [s2 * math.sqrt(max(1 - r * r, 0.0)) for s2, r in zip(sigma2, rhos)]
    top = max(scales, default=0.0)
    return math.inf if top == 0 else 1.0 / top
