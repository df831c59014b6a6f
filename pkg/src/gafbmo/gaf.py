"""Coefficient profiles, dyadic block statistics and GAF samples."""
from dataclasses import dataclass, field
import math

import numpy as np

from . import rng

DEFAULT_DEGREE = 1 << 16


class ProfileSpecError(ValueError):
    pass


@dataclass(frozen=True)
class CoeffProfile:
    """Deterministic coefficients ``a_n >= 0``, ``n = 0..degree_cap``, with ``a_0 = 0``."""

    kind: str
    values: np.ndarray
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 1 or len(v) < 1:
            raise ValueError("profile values must be a non-empty 1-d array")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise ValueError("profile values must be finite and non-negative")
        v[0] = 0.0
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def degree_cap(self):
        return len(self.values) - 1

    def l2(self):
        return float(np.sqrt(np.sum(self.values ** 2)))

    def truncate(self, degree):
        return CoeffProfile(self.kind, self.values[:degree + 1], dict(self.params))

    # -- generators ------------------------------------------------------
    @classmethod
    def power_law(cls, alpha, degree_cap=DEFAULT_DEGREE):
        n = np.arange(degree_cap + 1, dtype=float)
        n[0] = 1.0
        return cls("power", n ** (-float(alpha)), {"alpha": float(alpha), "degree_cap": degree_cap})

    @classmethod
    def kac(cls, degree_cap=DEFAULT_DEGREE):
        return cls.power_law(0.0, degree_cap)

    @classmethod
    def lacunary(cls, weights, degree_cap=None):
        """``a_{2^k} = weights[k]``; zero off the powers of two."""
        weights = np.asarray(weights, dtype=float)
        cap = degree_cap if degree_cap is not None else 1 << (len(weights) - 1)
        v = np.zeros(cap + 1)
        for k, w in enumerate(weights):
            if (1 << k) <= cap:
                v[1 << k] = w
        return cls("lacunary", v, {"degree_cap": cap})

    @classmethod
    def block_constant(cls, sigma2, degree_cap=None):
        """Spread ``sigma2[k]`` evenly over the ``2^k`` coefficients of block ``k``."""
        sigma2 = np.asarray(sigma2, dtype=float)
        K = len(sigma2)
        cap = degree_cap if degree_cap is not None else (1 << K) - 1
        v = np.zeros(cap + 1)
        for k, s in enumerate(sigma2):
            lo, hi = 1 << k, min(1 << (k + 1), cap + 1)
            if lo > cap:
                break
            v[lo:hi] = math.sqrt(s / (1 << k))
        return cls("block", v, {"degree_cap": cap})

    @classmethod
    def explicit(cls, values, kind="explicit", **params):
        return cls(kind, np.asarray(values, dtype=float), params)

    @classmethod
    def from_spec(cls, spec):
        """Build a profile from a key/value mapping or a shorthand string.

        Shorthands: ``kac``, ``power:ALPHA``, ``lacunary``, ``geometric``
        (sigma_k^2 = 2^-k), ``inverse-square`` (sigma_k^2 = (k+1)^-2).
        """
        if isinstance(spec, str):
            spec = parse_shorthand(spec)
        spec = dict(spec)
        kind = spec.pop("kind", None)
        cap = int(spec.pop("degree_cap", DEFAULT_DEGREE))
        try:
            if kind == "kac":
                return cls.kac(cap)
            if kind == "power":
                return cls.power_law(float(spec.pop("alpha")), cap)
            if kind == "lacunary":
                decay = float(spec.pop("decay", 0.5))
                K = cap.bit_length()
                return cls.lacunary([2.0 ** (-decay * k) for k in range(K)], cap)
            if kind == "block":
                law = spec.pop("sigma2", "geometric")
                K = cap.bit_length()
                k = np.arange(K, dtype=float)
                if law == "geometric":
                    s = 2.0 ** -k
                elif law == "inverse-square":
                    s = (k + 1) ** -2.0
                elif law == "harmonic":
                    s = 1.0 / (k + 1)
                else:
                    s = np.array([float(x) for x in law.split(",")])
                return cls.block_constant(s, cap)
            if kind == "explicit":
                vals = [float(x) for x in str(spec.pop("values")).split(",")]
                return cls.explicit(vals)
        except KeyError as exc:
            raise ProfileSpecError(f"profile kind {kind!r} needs parameter {exc}") from None
        raise ProfileSpecError(f"unknown profile kind {kind!r}")


def parse_shorthand(text):
    text = text.strip()
    if text == "kac":
        return {"kind": "kac"}
    if text.startswith("power:"):
        return {"kind": "power", "alpha": text.split(":", 1)[1]}
    if text in ("geometric", "inverse-square", "harmonic"):
        return {"kind": "block", "sigma2": text}
    if text == "lacunary":
        return {"kind": "lacunary"}
    raise ProfileSpecError(f"unknown profile shorthand {text!r}")


def parse_profile_file(text):
    """Parse the ``key = value`` profile format (``#`` starts a comment)."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ProfileSpecError(f"line {lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        out[key] = val
    if "kind" not in out:
        raise ProfileSpecError("profile file has no 'kind'")
    return out


def load_profile(arg, degree_cap=None):
    """Profile from a shorthand string or a path to a profile file."""
    import os
    if os.path.exists(arg):
        with open(arg) as fh:
            spec = parse_profile_file(fh.read())
    else:
        spec = parse_shorthand(arg)
    if degree_cap is not None:
        spec.setdefault("degree_cap", degree_cap)
    return CoeffProfile.from_spec(spec)


# -- block statistics -------------------------------------------------------

@dataclass(frozen=True)
class BlockProfile:
    sigma2: np.ndarray
    tau2: np.ndarray
    b2: np.ndarray

    @classmethod
    def from_sigma2(cls, sigma2):
        s = np.asarray(sigma2, dtype=float)
        tau2 = np.maximum.accumulate(s[::-1])[::-1]
        k = np.arange(len(s))
        w = np.where(k >= 1, 4.0 ** k, 0.0) * s
        return cls(s, tau2, np.cumsum(w))

    @property
    def K(self):
        return len(self.sigma2) - 1


def block_stats(p):
    """sigma_k^2, tau_k^2 = sup_{n >= k} sigma_n^2 and B_k^2 = sum_{n=1}^k 4^n sigma_n^2."""
    a2 = p.values ** 2
    cap = p.degree_cap
    K = max(cap.bit_length() - 1, 0)
    sigma2 = np.array([math.fsum(a2[1 << k:min(1 << (k + 1), cap + 1)]) for k in range(K + 1)])
    return BlockProfile.from_sigma2(sigma2)


@dataclass
class ConditionReport:
    sums: dict
    converged: dict
    dyadic_regular: bool
    K: int


def _tail_flag(terms, rel=1e-2):
    # heuristic only: the last quarter of the terms adds < 1% to the partial sum
    terms = np.asarray(terms, dtype=float)
    total = terms.sum()
    if total == 0:
        return True
    q = max(len(terms) // 4, 1)
    return bool(terms[-q:].sum() <= rel * total)


def check_conditions(b, p=2.0):
    """Partial sums of the classical membership conditions at the truncation."""
    s2 = b.sigma2
    k = np.arange(len(s2), dtype=float)
    B = np.sqrt(b.b2)
    inner = np.cumsum(np.where(k >= 1, 2.0 ** k * np.sqrt(k) * B, 0.0))
    hasi = np.where(k >= 1, 2.0 ** (-2 * p * k) * inner ** p, 0.0)
    terms = {
        "l1": np.sqrt(s2),
        "paley_zygmund": s2,
        "sledd": k * s2,
        "tau": b.tau2,
        "hasi": hasi,
    }
    sums = {name: float(math.fsum(t)) for name, t in terms.items()}
    conv = {name: _tail_flag(t) for name, t in terms.items()}
    regular = bool(np.all(np.diff(np.sqrt(s2)) <= 0))
    return ConditionReport(sums, conv, regular, len(s2) - 1)


# -- samples -----------------------------------------------------------------

@dataclass(frozen=True)
class GafSample:
    profile: CoeffProfile
    seed: int
    coeffs: np.ndarray


def sample(p, seed, stream=0):
    """Coefficients ``a_n xi_n``; ``xi_n`` depends only on ``(seed, stream, n)``."""
    xi = rng.complex_normals(seed, 0, p.degree_cap + 1, stream)
    return GafSample(p, int(seed), p.values * xi)


def lacunary_extract(b, C):
    """Lacunary block indices ``j_k`` (``j_{k+1}/j_k > C``) carrying large ``sigma^2 j``.

    Follows the constructive argument: condense onto powers of ``m = ceil(C)+1``,
    keep the powers where tau drops strictly, take the sigma-maximising index
    in ``[m^j, m^{j+1})`` and return the parity subsequence with the larger
    sum of ``sigma_j^2 * j``.
    """
    if C <= 1:
        raise ValueError("C must exceed 1")
    s2, tau2 = b.sigma2, b.tau2
    K = len(s2) - 1
    if np.count_nonzero(s2) < 2:
        return []
    m = math.ceil(C) + 1

    def tau(i):
        return tau2[i] if i <= K else 0.0

    picks = []
    q = 1
    while q <= K:
        if tau(q) > tau(q * m):
            window = s2[q:min(q * m, K + 1)]
            picks.append(q + int(np.argmax(window)))
        q *= m
    even, odd = picks[0::2], picks[1::2]

    def weight(js):
        return sum(s2[j] * j for j in js)

    return even if weight(even) >= weight(odd) else odd
