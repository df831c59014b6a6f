"""Exceptional GAF constructions: Bloch but not BMOA, BMOA but not VMOA,
VMOA but not Sledd, and a non-separable Sledd family.

Almost-sure statements cannot be observed at finite size; every routine here
builds a finite truncation and reports measured seminorms.
"""
from dataclasses import dataclass, field
from fractions import Fraction
import math

import numpy as np

from . import rng
from .gaf import CoeffProfile, GafSample, sample
from .kernels import CircleGrid, eval_grid, fejer_coeffs
from .seminorms import IntervalFamily, bloch_norm, star_norm_grid, sledd_T

DEGREE_CAP = 1 << 24


class ConstructionError(ValueError):
    pass


class GadyInfeasibleError(ConstructionError):
    pass


# -- Bloch, not BMOA -----------------------------------------------------------

@dataclass(frozen=True)
class GadyParams:
    r: int
    n: int
    seed: int
    lam: np.ndarray                      # (r, r); row i-1 holds lambda_{i, j}
    m_table: dict = field(default_factory=dict)
    certified: bool = True

    @property
    def tol(self):
        return 4.0 ** -self.r

    @property
    def modes(self):
        return np.floor(self.n * self.lam).astype(np.int64)

    def check(self):
        """Re-verify the construction; returns a list of violated invariants."""
        bad = []
        base = 2.0 ** np.arange(1, self.r + 1)[:, None]
        if np.any(self.lam < base) or np.any(self.lam > base + self.tol):
            bad.append("lambda range")
        for omega, m in self.m_table.items():
            fr = np.mod(m * (self.lam - base), 1.0)
            if np.any(np.abs(fr - np.reshape(omega, fr.shape)) > self.tol):
                bad.append(f"m({omega})")
        if self.certified:
            n0 = 4 ** self.r * (max(self.m_table.values(), default=0) + 1)
            if self.n <= n0:
                bad.append("n <= n0")
        lo = self.n * base
        if np.any(self.modes < lo) or np.any(self.modes > lo + self.n * self.tol):
            bad.append("mode range")
        if len(np.unique(self.modes)) != self.r ** 2:
            bad.append("distinct modes")
        return bad

    def to_dict(self):
        return {"r": self.r, "n": self.n, "seed": self.seed, "certified": self.certified,
                "lambda": self.lam.tolist(),
                "m_table": {"".join("1" if w else "0" for w in k): v for k, v in self.m_table.items()}}


def _search_m(delta, tol, cap):
    """First ``m <= cap`` realising each pattern ``omega in {0, 1/2}^(r*r)``."""
    found = {}
    bits = 1 << np.arange(delta.size)
    for s in range(0, cap + 1, 1 << 16):
        m = np.arange(s, min(s + (1 << 16), cap + 1), dtype=np.float64)
        fr = np.mod(np.outer(m, delta.ravel()), 1.0)
        zero, half = fr <= tol, np.abs(fr - 0.5) <= tol
        ok = np.all(zero | half, axis=1)
        ids = half[ok] @ bits
        uniq, first = np.unique(ids, return_index=True)
        for pid, i in zip(uniq, first):
            found.setdefault(int(pid), int(m[ok][i]))
        if len(found) == 1 << delta.size:
            break
    return found


def _pattern(pid, r):
    return tuple(0.5 if (pid >> b) & 1 else 0.0 for b in range(r * r))


def gady_construct(r, seed, n=None, certify=None, draws=30, cap=None):
    """Sparse polynomial with ``r^2`` coefficients ``1/r`` at ``floor(n lambda_{i,j})``.

    With ``certify`` (default for ``r <= 2``) every pattern gets a searched
    ``m(omega)`` and ``n = n0 + 1``; among ``draws`` valid lambda draws the one
    with the smallest ``n0`` is kept.  The uncertified surrogate skips the
    search and takes ``n = 4^r r`` (or the given ``n``), drawing lambda
    conditionally on distinct modes.
    """
    if r < 2:
        raise ValueError("r must be at least 2")
    certify = (r <= 2) if certify is None else certify
    tol = 4.0 ** -r
    base = 2.0 ** np.arange(1, r + 1)[:, None]
    gen = rng.generator(seed, 21)
    if certify:
        cap = 4 ** (2 * r * r) if cap is None else cap
        if cap > 1 << 26:
            raise GadyInfeasibleError(
                f"exhaustive m-search for r={r} needs m up to ~{cap:.3g}; use certify=False")
        best = None
        for _ in range(draws * 4):
            delta = gen.uniform(0.0, tol, (r, r))
            table = _search_m(delta, tol, cap)
            if len(table) < 1 << (r * r):
                continue
            n0 = 4 ** r * (max(table.values()) + 1)
            if best is None or n0 < best[0]:
                best = (n0, delta, table)
            draws -= 1
            if draws <= 0:
                break
        if best is None:
            raise ConstructionError("no lambda draw admitted every pattern within the search cap")
        n0, delta, table = best
        n = n0 + 1 if n is None else n
        if n <= n0:
            raise ConstructionError(f"n={n} must exceed n0={n0}")
        m_table = {_pattern(pid, r): m for pid, m in sorted(table.items())}
        params = GadyParams(r, int(n), int(seed), base + delta, m_table, True)
        if params.check():
            raise ConstructionError(f"construction failed checks: {params.check()}")
    else:
        n = 4 ** r * r if n is None else int(n)
        slots = int(math.floor(n * tol))
        if slots < r:
            raise ConstructionError(f"n={n} leaves {slots} mode slots per row, need {r}")
        # uniform lambda conditioned on distinct floor(n lambda) within each row
        rows = [np.sort(gen.choice(slots, r, replace=False)) for _ in range(r)]
        delta = (np.array(rows) + gen.uniform(0.0, 1.0, (r, r))) / n
        delta = np.minimum(delta, tol)
        params = GadyParams(r, n, int(seed), base + delta, {}, False)
    vals = np.zeros(int(params.modes.max()) + 1)
    vals[params.modes.ravel()] = 1.0 / r
    profile = CoeffProfile.explicit(vals, kind="gady", r=r, n=params.n)
    return params, profile


def gady_radii(params):
    """Radii ``1 - 2^-j`` around the scales ``1/(n 2^i)`` where ``f'`` peaks."""
    lo = int(math.floor(math.log2(params.n)))
    return 1.0 - 2.0 ** -np.arange(lo + 1, lo + params.r + 3)


def gady_family(params, grid):
    """Interval lengths ``2^-j`` around ``1/n``."""
    c = int(round(math.log2(params.n)))
    return IntervalFamily.dyadic(grid, c - 1, c + 1)


@dataclass(frozen=True)
class MeasureStats:
    mean: float
    stderr: float
    values: tuple

    @classmethod
    def of(cls, values):
        v = np.asarray(values, dtype=float)
        se = float(v.std(ddof=1) / math.sqrt(len(v))) if len(v) > 1 else 0.0
        return cls(float(v.mean()) if len(v) else 0.0, se, tuple(float(x) for x in v))


def measure_profile(profile, trials, seed, family=None, radii=None, grid=None):
    """Monte Carlo star and Bloch estimates of ``sample(profile)``."""
    N = grid or CircleGrid.for_degree(profile.degree_cap).size
    stars, blochs = [], []
    for t in range(trials):
        s = sample(profile, rng.derive_seed(seed, t))
        stars.append(star_norm_grid(eval_grid(s.coeffs, N), family).value)
        blochs.append(bloch_norm(s.coeffs, radii, N).value)
    return MeasureStats.of(stars), MeasureStats.of(blochs)


def gady_measure(params, profile, trials, seed=None):
    seed = params.seed if seed is None else seed
    N = CircleGrid.for_degree(profile.degree_cap).size
    return measure_profile(profile, trials, seed, gady_family(params, N), gady_radii(params), N)


def bloch_not_bmoa(beta_seq, r_seq, seed, certify=False):
    """Profile of ``sum_i beta_i f_i`` with gady polynomials on disjoint mode ranges.

    ``r_seq`` gives the size parameter of each ``f_i``; later ``f_i`` use base
    frequencies large enough to start above the previous range.
    """
    beta = [float(b) for b in beta_seq]
    if len(beta) != len(r_seq):
        raise ValueError("beta_seq and r_seq must have equal length")
    parts, top = [], 0
    for i, (b, r) in enumerate(zip(beta, r_seq)):
        n = max(4 ** r * r, top // 2 + 1)
        params, prof = gady_construct(r, rng.derive_seed(seed, i), n=None if certify else n,
                                      certify=certify)
        lo = int(params.modes.min())
        if lo <= top:
            raise ConstructionError(f"frequency range {i} starts at {lo}, overlapping {top}")
        parts.append((b, params, prof))
        top = prof.degree_cap
    vals = np.zeros(top + 1)
    for b, _, prof in parts:
        vals[:len(prof.values)] += b * prof.values
    return CoeffProfile.explicit(vals, kind="bloch_not_bmoa",
                                 beta=beta, r=[int(r) for r in r_seq]), [p for _, p, _ in parts]


# -- block polynomials, BMOA but not VMOA --------------------------------------

def block_poly_profile(n_exp):
    if n_exp < 1:
        raise ValueError("n_exp must be at least 1")
    n = 1 << n_exp
    vals = np.zeros(2 * n)
    vals[n:] = 1.0 / math.sqrt(n * math.log(n))
    return CoeffProfile.explicit(vals, kind="block_poly", n_exp=n_exp)


def block_poly(n_exp, seed):
    """``(n log n)^(-1/2) sum_{k=n}^{2n-1} xi_k z^k`` with ``n = 2^n_exp``."""
    return sample(block_poly_profile(n_exp), seed)


def schedule_exponents(schedule, depth, c=1.5):
    """Block exponents ``n_1 < n_2 < ...``: ``"tower"`` (1, 3, 27, ..., each 3 to the previous) or ``"geometric"``."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    if schedule == "tower":
        ex = [1]
        while len(ex) < depth:
            if ex[-1] > 64:
                raise ConstructionError("tower schedule exponent overflows")
            ex.append(3 ** ex[-1])
    elif schedule == "geometric":
        if c <= 1:
            raise ValueError("ratio c must exceed 1")
        ex = [2]
        while len(ex) < depth:
            ex.append(max(ex[-1] + 1, math.ceil(c * ex[-1])))
    else:
        raise ValueError(f"unknown schedule {schedule!r}")
    return ex


def bmo_not_vmo(schedule, a_seq, depth, seed=0, c=1.5, degree_cap=DEGREE_CAP):
    """Profile of ``g = sum_k a_k f_k`` with ``f_k`` the block polynomial at ``2^(n_k)``.

    Sampling the profile gives independent ``f_k`` since their modes are
    disjoint.  ``a_seq`` is a sequence or ``"one"`` / ``"inv-sqrt"``.
    """
    ex = schedule_exponents(schedule, depth, c)
    if (2 << ex[-1]) - 1 > degree_cap:
        raise ConstructionError(f"depth {depth} needs degree 2^{ex[-1] + 1} > cap {degree_cap}")
    if a_seq == "one":
        a = [1.0] * depth
    elif a_seq == "inv-sqrt":
        a = [1.0 / math.sqrt(k) for k in range(1, depth + 1)]
    else:
        a = [float(x) for x in a_seq][:depth]
    vals = np.zeros(2 << ex[-1])
    for ak, e in zip(a, ex):
        n = 1 << e
        vals[n:2 * n] = ak / math.sqrt(n * math.log(n))
    return CoeffProfile.explicit(vals, kind="bmo_not_vmo", schedule=schedule,
                                 exponents=ex, a=a, seed=seed)


# -- Sledd non-separability -----------------------------------------------------

def nonsep_coeffs(j):
    """``G_j(z) = z^(2^(j+1)) K_(2^j)(z e(1/j)) / (2^j + 1)``."""
    M = 1 << j
    K = fejer_coeffs(M)
    k = np.arange(-M, M + 1)
    c = np.zeros(3 * M + 1, dtype=complex)
    c[2 * M + k] = K.coeffs * np.exp(2j * np.pi * k / j) / (M + 1)
    return c


def nonsep_sum(A):
    top = max(A)
    out = np.zeros(3 * (1 << top) + 1, dtype=complex)
    for j in A:
        g = nonsep_coeffs(j)
        out[:len(g)] += g
    return out


def sledd_nonsep_family(j_list, grid=None):
    """``G_j`` profiles and TSledd distances between ``H_A = sum_{j in A} G_j``.

    Distances are computed for all pairs of singletons and for the pair
    ``(A, B)`` of the two alternating halves of ``j_list``.
    """
    for j in j_list:
        if j % 5 or j <= 0 or j > 20:
            raise ValueError("j must be a positive multiple of 5, at most 20")
    N = grid or CircleGrid.for_degree(3 * (1 << max(j_list))).size
    coeffs = {j: nonsep_coeffs(j) for j in j_list}

    def dist(A, B):
        a, b = nonsep_sum(A) if A else np.zeros(1), nonsep_sum(B) if B else np.zeros(1)
        m = max(len(a), len(b))
        diff = np.pad(a, (0, m - len(a))) - np.pad(b, (0, m - len(b)))
        return sledd_T(diff, N).value

    pairs = {}
    for i, j in enumerate(j_list):
        for k in j_list[i + 1:]:
            pairs[(j, k)] = dist([j], [k])
    halves = (tuple(j_list[0::2]), tuple(j_list[1::2]))
    if halves[1]:
        pairs[halves] = dist(list(halves[0]), list(halves[1]))
    return coeffs, pairs


# -- VMOA, not Sledd: nested intervals -----------------------------------------

@dataclass(frozen=True)
class BlockSchedule:
    """Sparse block profile: the block polynomial at ``2^e`` scaled by ``weights``.

    Degrees reach ``2^100`` and beyond, so the coefficients are never stored.
    """

    exponents: tuple
    weights: tuple
    kind: str = "vmoa_not_sledd"

    def to_coeff_profile(self, degree_cap=DEGREE_CAP):
        top = (2 << self.exponents[-1]) - 1
        if top > degree_cap:
            raise ConstructionError(f"degree 2^{self.exponents[-1] + 1} exceeds cap {degree_cap}")
        vals = np.zeros(top + 1)
        for e, w in zip(self.exponents, self.weights):
            n = 1 << e
            vals[n:2 * n] = w / math.sqrt(n * math.log(n))
        return CoeffProfile.explicit(vals, kind=self.kind, exponents=list(self.exponents))


@dataclass
class NestedExperiment:
    depth: int
    exponents: list
    c: float
    intervals: list                 # (left, length) as Fractions, J_1 .. J_{depth+1}
    flags: list
    values: list = field(default_factory=list)     # |f_l(x)|^2 at the nest point
    x: Fraction = Fraction(0)

    @property
    def flag_sum(self):
        return math.fsum(1.0 / (16 * l) for l, f in enumerate(self.flags, 1) if f)

    @property
    def rsledd_lower(self):
        """``sum_l |f_l(x)|^2 / l``, a lower bound for RSledd^2 at the nest point."""
        return math.fsum(v / l for l, v in enumerate(self.values, 1))

    def to_dict(self):
        return {"depth": self.depth, "exponents": self.exponents, "c": self.c,
                "flags": [bool(f) for f in self.flags], "values": self.values,
                "x": str(self.x), "flag_sum": self.flag_sum, "rsledd_lower": self.rsledd_lower,
                "intervals": [[str(a), str(b)] for a, b in self.intervals]}


def nesting_exponents(depth, c=0.1):
    """``N_l = 2^e_l``: the least power of two above ``n0(eps)``, ``n0^(3/4) eps = 4 log 3``,
    with ``eps_1 = c`` and ``eps_l = c / N_(l-1)``."""
    ex = []
    log_eps = math.log2(c)
    for _ in range(depth):
        x = 4.0 / 3.0 * (math.log2(4 * math.log(3)) - log_eps)
        e = int(math.floor(x)) + 1
        ex.append(e)
        log_eps = math.log2(c) - e
    return ex


def block_corr(s):
    """Normalised covariance of ``f_n`` at angular offset ``s / n`` in the limit of large ``n``.

    ``E f(x + s/n) conj(f(x)) log n = e(s) (1 - e(s)) / (n (1 - e(s/n)))``; for the
    huge ``n`` used here ``n (1 - e(s/n))`` equals ``-2 pi i s`` to double precision.
    """
    s = np.asarray(s, dtype=float)
    out = np.ones(s.shape, dtype=complex)
    nz = s != 0
    es = np.exp(2j * np.pi * s[nz])
    out[nz] = es * (1 - es) / (-2j * np.pi * s[nz])
    return out


def _cov(points):
    return block_corr(points[:, None] - points[None, :])


def _cond_sample(gen, obs_pts, obs_vals, new_pts, scale):
    """Sample the process at ``new_pts`` given exact values at ``obs_pts``."""
    Koo = _cov(obs_pts)
    Kno = block_corr(new_pts[:, None] - obs_pts[None, :])
    Knn = _cov(new_pts)
    W = Kno @ np.linalg.pinv(Koo, rcond=1e-12, hermitian=True)
    mean = W @ obs_vals
    C = Knn - W @ Kno.conj().T
    C = (C + C.conj().T) / 2
    w, V = np.linalg.eigh(C)
    root = V * np.sqrt(np.clip(w, 0.0, None))
    z = (gen.standard_normal(len(new_pts)) + 1j * gen.standard_normal(len(new_pts))) * math.sqrt(0.5)
    return mean + math.sqrt(scale) * (root @ z)


def vmoa_not_sledd(depth, c_param=0.1, seed=0, mesh=17):
    """One run of the nested-interval experiment.

    Level ``l`` uses ``f_l`` at frequency ``N = 2^e_l`` on ``J_l`` (length
    ``eps_l``).  Values at the lattice ``k/N`` are i.i.d. ``CN(0, 1/log N)``, so
    the first ``k`` in the middle third with ``|f_l(k/N)| > 1/2`` is a geometric
    index and ``|f_l(k/N)|^2 - 1/4`` is exponential.  ``J'`` is the interval of
    length ``c/N`` centred there; the level succeeds if ``|f_l| > 1/4`` on a
    ``mesh``-point grid of ``J'`` sampled conditionally on the centre value.
    The next interval is ``J'`` on success and the left-aligned interval of
    length ``c/N`` otherwise.  Values at the final point ``x`` (left end of the
    deepest interval) are drawn conditionally on everything observed nearby.
    """
    c = Fraction(c_param).limit_denominator(1 << 20)
    ex = nesting_exponents(depth, float(c))
    u, length = Fraction(0), c
    intervals, flags, states = [(u, length)], [], []
    for lvl, e in enumerate(ex, 1):
        gen = rng.generator(seed, 31, lvl)
        N = 1 << e
        logN = e * math.log(2)
        k_lo = math.ceil((u + length / 3) * N)
        k_hi = math.floor((u + 2 * length / 3) * N)
        count = max(k_hi - k_lo + 1, 0)
        p = math.exp(-logN / 4)                       # P(|f(k/N)| > 1/2)
        g = int(gen.geometric(p))
        state = None
        ok = False
        if g <= count:
            k = k_lo + g - 1
            mod2 = 0.25 + gen.exponential(1.0 / logN)
            z0 = math.sqrt(mod2) * np.exp(2j * np.pi * gen.uniform())
            s_mesh = np.linspace(-float(c) / 2, float(c) / 2, mesh)
            vals = _cond_sample(gen, np.zeros(1), np.array([z0 * math.sqrt(logN)]), s_mesh, 1.0)
            vals = vals / math.sqrt(logN)
            ok = bool(np.min(np.abs(vals)) > 0.25)
            state = (k, N, np.concatenate([[0.0], s_mesh]), np.concatenate([[z0], vals]))
        flags.append(ok)
        states.append(state if ok else None)
        new_len = c / N
        if ok:
            k = state[0]
            u = Fraction(k, N) - new_len / 2
        length = new_len
        intervals.append((u, length))
    x = intervals[-1][0]
    values = []
    for lvl, (e, st) in enumerate(zip(ex, states), 1):
        gen = rng.generator(seed, 32, lvl)
        logN = e * math.log(2)
        if st is None:
            # far from any simulated point: the marginal law CN(0, 1/log N)
            z = (gen.standard_normal() + 1j * gen.standard_normal()) * math.sqrt(0.5 / logN)
        else:
            k, N, pts, obs = st
            s_x = float((x - Fraction(k, N)) * N)
            z = _cond_sample(gen, pts, obs * math.sqrt(logN), np.array([s_x]), 1.0)[0] / math.sqrt(logN)
        values.append(float(abs(z) ** 2))
    sched = BlockSchedule(tuple(ex), tuple(1.0 / math.sqrt(l) for l in range(1, depth + 1)))
    return sched, NestedExperiment(depth, ex, float(c), intervals, flags, values, x)
