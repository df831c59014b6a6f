"""Grid estimates of the BMOA, Bloch and Sledd seminorms of polynomials.

Interval searches run over a discrete family, so every BMO-type estimate is a
lower estimate of the true supremum.  Interval means use the trapezoidal rule
on the grid points that fall in the closed interval.
"""
from dataclasses import dataclass, asdict

import numpy as np

from .kernels import (CircleGrid, GridTooSmallError, analytic_fejer_coeffs,
                      block_coeffs, convolve, eval_grid, trapezoid_coeffs, _size)

MIN_POINTS = 8


class IntervalTooSmallError(ValueError):
    pass


@dataclass(frozen=True)
class SeminormEstimate:
    value: float
    grid_size: int
    family: str
    is_lower_bound: bool
    name: str = ""

    def to_record(self, **extra):
        rec = asdict(self)
        rec.update(extra)
        return rec


@dataclass(frozen=True)
class IntervalFamily:
    """Intervals ``(center, length)``: lengths ``2^-j`` with centers every ``2^-j-2``."""

    lengths_exp: tuple

    @classmethod
    def dyadic(cls, grid, j_min=0, j_max=None):
        N = _size(grid)
        top = N.bit_length() - 1 - 3   # keeps >= 8 points per interval
        j_max = top if j_max is None else min(j_max, top)
        return cls(tuple(range(max(j_min, 0), j_max + 1)))

    def restrict(self, lo_len, hi_len):
        """Keep lengths in ``[lo_len, hi_len]``."""
        keep = tuple(j for j in self.lengths_exp if lo_len <= 2.0 ** -j <= hi_len)
        return IntervalFamily(keep)

    def union(self, other):
        return IntervalFamily(tuple(sorted(set(self.lengths_exp) | set(other.lengths_exp))))

    def intervals(self):
        for j in self.lengths_exp:
            L = 2.0 ** -j
            step = L / 4
            for i in range(1 << (j + 2)):
                yield (i * step, L)

    def describe(self):
        if not self.lengths_exp:
            return "dyadic[]"
        return f"dyadic[j={min(self.lengths_exp)}..{max(self.lengths_exp)},centers=L/4]"


def _trap_weights(P):
    w = np.ones(P + 1)
    w[0] = w[-1] = 0.5
    return w / P


def mean_oscillation(fvals, interval, p=1):
    """Trapezoidal estimate of the mean of ``|f - mean_I f|^p`` over ``I``.

    ``interval`` is ``(center, length)`` in turns; endpoints snap to the grid.
    """
    fvals = np.asarray(fvals)
    N = len(fvals)
    center, length = interval
    P = int(round(length * N))
    if P < MIN_POINTS:
        raise IntervalTooSmallError(f"interval holds {P} grid steps, need {MIN_POINTS}")
    start = int(round((center - length / 2) * N))
    idx = (start + np.arange(P + 1)) % N
    w = _trap_weights(P)
    seg = fvals[idx]
    avg = np.dot(w, seg)
    return float(np.dot(w, np.abs(seg - avg) ** p))


def _scale_oscillations(fvals, j, p=1):
    """M_I^p for every interval of length 2^-j in the dyadic family.

    Interval ``s`` starts at ``(s - 2) * step`` with ``step = P / 4``; viewing the
    grid as ``4 * 2^j`` blocks of ``step`` points, it is blocks ``s-2 .. s+1``
    plus the first point of block ``s+2``.
    """
    N = len(fvals)
    P = N >> j
    if P < MIN_POINTS:
        raise IntervalTooSmallError(f"length 2^-{j} holds {P} grid steps")
    step = P // 4
    B = np.asarray(fvals).reshape(-1, step)
    head = B[:, 0]
    sums = B.sum(axis=1)
    win = sum(np.roll(sums, 2 - o) for o in range(4))
    first, last = np.roll(head, 2), np.roll(head, -2)
    avg = (win - 0.5 * first + 0.5 * last) / P
    out = np.zeros(len(B))
    for o in (-2, -1, 0, 1):
        out += (np.abs(np.roll(B, -o, axis=0) - avg[:, None]) ** p).sum(axis=1)
    out += 0.5 * (np.abs(last - avg) ** p - np.abs(first - avg) ** p)
    return out / P


def star_norm_grid(fvals, fam=None, p=1):
    fvals = np.asarray(fvals)
    N = len(fvals)
    fam = fam or IntervalFamily.dyadic(N)
    best = 0.0
    for j in fam.lengths_exp:
        if (N >> j) < MIN_POINTS:
            continue
        best = max(best, float(_scale_oscillations(fvals, j, p).max()))
    return SeminormEstimate(best, N, fam.describe(), True, "star")


def block_star_norm(fvals, n, fam=None):
    """sup of M_I^1 over intervals with ``2^-n <= |I| <= 2^-(n-1)``."""
    fvals = np.asarray(fvals)
    fam = (fam or IntervalFamily.dyadic(len(fvals))).restrict(2.0 ** -n, 2.0 ** -(n - 1))
    est = star_norm_grid(fvals, fam)
    return SeminormEstimate(est.value, est.grid_size, est.family, True, f"star_{n}")


def star_norm_fejer(fcoeffs, n_max, g, fam=None, ns=None):
    """Largest grid star-norm of ``K^A_n * f`` over ``n <= n_max``."""
    fcoeffs = np.asarray(fcoeffs, dtype=complex)
    N = _size(g)
    fam = fam or IntervalFamily.dyadic(N)
    ns = range(n_max + 1) if ns is None else ns
    best = 0.0
    for n in ns:
        vals = eval_grid(convolve(fcoeffs, analytic_fejer_coeffs(n)), N)
        best = max(best, star_norm_grid(vals, fam).value)
    return SeminormEstimate(best, N, f"{fam.describe()},fejer<= {n_max}", True, "star_fejer")


def default_radii(degree):
    J = max(int(np.ceil(np.log2(max(degree, 1)))) + 3, 1)
    return np.concatenate([[0.0], 1.0 - 2.0 ** -np.arange(1, J + 1)])


def bloch_norm(fcoeffs, radii=None, g=None):
    """max over radii and grid angles of ``(1 - r^2)|f'(r e(theta))|``."""
    c = np.asarray(fcoeffs, dtype=complex)
    deg = len(c) - 1
    if deg < 1:
        return SeminormEstimate(0.0, _size(g) if g is not None else 0, "radii[]", True, "bloch")
    d = np.arange(1, deg + 1) * c[1:]              # f' coefficients, modes 0..deg-1
    N = _size(g) if g is not None else CircleGrid.for_degree(deg).size
    radii = default_radii(deg) if radii is None else np.asarray(radii, dtype=float)
    k = np.arange(deg)
    best = 0.0
    for r in radii:
        if not 0 <= r < 1:
            raise ValueError("radii must lie in [0, 1)")
        scaled = d * (r ** k if r > 0 else (k == 0))
        mag = np.abs(scaled)
        top = mag.max()
        if top == 0:
            continue
        # modes damped below 1e-18 of the peak cannot move the max; a smaller
        # grid still oversamples the rest by 2
        eff = int(np.flatnonzero(mag > 1e-18 * top)[-1])
        M = min(N, CircleGrid.for_degree(eff).size)
        best = max(best, (1 - r * r) * float(np.abs(eval_grid(scaled[:eff + 1], M)).max()))
    return SeminormEstimate(float(best), N, f"radii[{len(radii)}]", True, "bloch")


def _analytic(fcoeffs, include_constant):
    f = np.array(fcoeffs, dtype=complex)
    if not include_constant and len(f):
        f[0] = 0
    return f


def _check_grid(f, N):
    nz = np.flatnonzero(f)
    top = int(nz[-1]) if len(nz) else 0
    if N <= 2 * top:
        raise GridTooSmallError(f"grid {N} must exceed twice the top mode {top}")
    return top


def _kernel_part(f, k):
    """``k * f`` restricted to the kernel support, as ``(segment, first_mode)``."""
    lo, hi = max(k.lo, 0), min(k.hi, len(f) - 1)
    if hi < lo:
        return np.zeros(0, dtype=complex), lo
    return f[lo:hi + 1] * k.coeffs[lo - k.lo:hi + 1 - k.lo], lo


def _block_squares(f, N, kernel, first, last):
    for n in range(first, last + 1):
        seg, lo = _kernel_part(f, kernel(n))
        if np.any(seg):
            yield n, np.abs(eval_grid(seg, N, lo)) ** 2


def _top_index(top, kind):
    if top == 0:
        return 0
    if kind == "R":
        return top.bit_length() - 1
    # T_n has modes > 3*2^(n-2); the last kernel touching ``top``
    n = 0
    while 3 * 2.0 ** (n - 1) < top:
        n += 1
    return n


def sledd_T(fcoeffs, g, k_start=0, include_constant=False):
    f = _analytic(fcoeffs, include_constant)
    N = _size(g)
    top = _check_grid(f, N)
    acc = np.zeros(N)
    for _, sq in _block_squares(f, N, trapezoid_coeffs, max(k_start, 0), _top_index(top, "T")):
        acc += sq
    return SeminormEstimate(float(np.sqrt(acc.max())), N, f"T_n,n>={k_start}", True, "TSledd")


def sledd_R(fcoeffs, g, k_start=0, include_constant=False):
    f = _analytic(fcoeffs, include_constant)
    N = _size(g)
    top = _check_grid(f, N)
    acc = np.zeros(N)
    for _, sq in _block_squares(f, N, block_coeffs, max(k_start, 0), _top_index(top, "R")):
        acc += sq
    return SeminormEstimate(float(np.sqrt(acc.max())), N, f"R_n,n>={k_start}", True, "RSledd")


def vmoa_profile(fcoeffs, g, K):
    """Tail values ``sledd_R(f, k)`` for ``k = 0..K`` in one downward sweep."""
    f = _analytic(fcoeffs, False)
    N = _size(g)
    top = _check_grid(f, N)
    top_block = _top_index(top, "R")
    out = np.zeros(K + 1)
    acc = np.zeros(N)
    for n in range(max(top_block, K), -1, -1):
        if n <= top_block:
            seg, lo = _kernel_part(f, block_coeffs(n))
            if np.any(seg):
                acc += np.abs(eval_grid(seg, N, lo)) ** 2
        if n <= K:
            out[n] = np.sqrt(acc.max())
    return out
