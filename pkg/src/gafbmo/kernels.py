"""Fejer, trapezoidal, block and analytic-Fejer kernels.

Kernels are stored by their Fourier coefficients.  Polynomials are plain
complex arrays ``c`` with ``c[k]`` the coefficient of ``z**k``; convolution of
such a polynomial with a kernel is the coefficient-wise product and is exact.
Point values on the circle come from an inverse FFT on a power-of-two grid.
"""
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


class GridTooSmallError(ValueError):
    pass


@dataclass(frozen=True)
class KernelCoeffs:
    """Fourier coefficients ``coeffs[k - lo]`` for modes ``lo..hi``; zero elsewhere."""

    lo: int
    hi: int
    coeffs: np.ndarray
    name: str = ""

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        if len(c) != self.hi - self.lo + 1:
            raise ValueError("coefficient table does not match [lo, hi]")

    def __getitem__(self, k):
        k = int(k)
        if self.lo <= k <= self.hi:
            return float(self.coeffs[k - self.lo])
        return 0.0

    def at(self, modes):
        """Vectorised lookup of the coefficients at integer ``modes``."""
        modes = np.asarray(modes, dtype=np.int64)
        out = np.zeros(modes.shape)
        inside = (modes >= self.lo) & (modes <= self.hi)
        out[inside] = self.coeffs[modes[inside] - self.lo]
        return out

    def to_dict(self):
        return {k: float(v) for k, v in zip(range(self.lo, self.hi + 1), self.coeffs) if v != 0}

    def symmetrized(self):
        """Mirror the nonnegative modes to negative ones (real even kernel)."""
        if self.lo < 0:
            return self
        hi = self.hi
        full = np.zeros(2 * hi + 1)
        full[hi:] = self.at(np.arange(0, hi + 1))
        full[:hi] = full[:hi:-1]
        return KernelCoeffs(-hi, hi, full, self.name)


@dataclass(frozen=True)
class CircleGrid:
    """The points ``e(j/N)``, ``j = 0..N-1``, with ``N`` a power of two."""

    size: int

    def __post_init__(self):
        n = int(self.size)
        if n < 1 or n & (n - 1):
            raise ValueError(f"grid size must be a power of two, got {self.size}")

    @property
    def theta(self):
        return np.arange(self.size) / self.size

    @classmethod
    def for_degree(cls, degree, oversample=2):
        """Smallest power-of-two grid with more than ``oversample * degree`` points."""
        need = max(int(oversample * degree) + 1, 8)
        return cls(1 << (need - 1).bit_length())


def _size(g):
    return g.size if isinstance(g, CircleGrid) else int(g)


# -- kernels -------------------------------------------------------------

def fejer_coeffs(n):
    k = np.arange(-n, n + 1)
    return KernelCoeffs(-n, n, 1.0 - np.abs(k) / (n + 1), f"K_{n}")


def fejer_eval(n, theta):
    """Closed-form ``K_n(e(theta))``; the removable singularity gives ``n + 1``."""
    theta = np.asarray(theta, dtype=float)
    s = np.sin(np.pi * theta)
    num = np.sin(np.pi * (n + 1) * theta)
    tiny = np.abs(s) < 1e-12
    safe = np.where(tiny, 1.0, s)
    val = num * num / ((n + 1) * safe * safe)
    val = np.where(tiny, float(n + 1), val)
    return float(val) if val.ndim == 0 else val


def _trapezoid_breaks(n):
    # ramp up on [a, b], plateau [b, c], ramp down on [c, d]; for n = 0 the
    # plateau starts at mode 0
    q = Fraction(2) ** (n - 2)
    return 3 * q, 5 * q, 6 * q, 10 * q


def trapezoid_value(n, K):
    """Exact rational coefficient of the ``n``-th trapezoidal kernel at mode ``K``."""
    K = abs(int(K))
    a, b, c, d = _trapezoid_breaks(n)
    if n == 0 and K <= c:
        return Fraction(1)
    if K <= a or K >= d:
        return Fraction(0)
    if K < b:
        return (K - a) / (b - a)
    if K <= c:
        return Fraction(1)
    return (d - K) / (d - c)


def trapezoid_coeffs(n):
    """Nonnegative-mode coefficients of the dyadic trapezoidal kernel ``T_n``.

    The coefficients rise linearly on ``[3*2**(n-2), 5*2**(n-2)]``, equal 1 up to
    ``3*2**(n-1)`` and fall to 0 at ``5*2**(n-1)``.  Adjacent kernels overlap
    only on their ramps, so ``sum_n T_n(K) == 1`` for every ``K >= 0``.
    """
    _, _, _, d = _trapezoid_breaks(n)
    hi = int(np.ceil(d)) - 1
    lo = 0 if n == 0 else int(_trapezoid_breaks(n)[0]) + 1
    vals = [float(trapezoid_value(n, k)) for k in range(lo, hi + 1)]
    return KernelCoeffs(lo, hi, np.array(vals), f"T_{n}")


def block_coeffs(n):
    lo, hi = 1 << n, (1 << (n + 1)) - 1
    return KernelCoeffs(lo, hi, np.ones(hi - lo + 1), f"R_{n}")


def analytic_fejer_coeffs(n):
    k = np.arange(0, n + 1)
    return KernelCoeffs(0, n, 1.0 - k / (n + 1), f"KA_{n}")


# -- operations ----------------------------------------------------------

def convolve(f, k):
    """Coefficient-wise product of polynomial ``f`` with kernel ``k``."""
    f = np.asarray(f)
    return f * k.at(np.arange(len(f)))


def eval_grid(f, g, lo=0):
    """Values ``f(e(j/N))`` for all ``j``.

    ``f`` is either a coefficient array whose first entry is mode ``lo`` or
    a ``KernelCoeffs``.  The grid must be larger than the mode span.
    """
    n = _size(g)
    if isinstance(f, KernelCoeffs):
        lo, f = f.lo, f.coeffs
    f = np.asarray(f)
    nz = np.flatnonzero(f)
    if len(nz) and nz[-1] - nz[0] >= n:
        raise GridTooSmallError(f"grid of size {n} cannot resolve mode span {nz[-1] - nz[0]}")
    buf = np.zeros(n, dtype=complex)
    if 0 <= lo and lo + len(f) <= n:
        buf[lo:lo + len(f)] = f
    else:
        if len(nz):
            lo, f = lo + nz[0], f[nz[0]:nz[-1] + 1]
        np.add.at(buf, (np.arange(len(f)) + lo) % n, f)
    return np.fft.ifft(buf) * n


def l1_norm(k, g):
    """Riemann estimate of ``||k||_1`` on the grid (normalised circle measure)."""
    return float(np.mean(np.abs(eval_grid(k, g))))
