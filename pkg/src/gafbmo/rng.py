"""Counter-based random streams.

Every random quantity in the package is addressed by a tuple of integers
(master seed, stream key..., index).  Standard complex Gaussians for a
coefficient range are produced chunk by chunk, each chunk drawn from its own
Philox generator, so coefficient ``n`` does not depend on how many
coefficients were requested or in which order the chunks were generated.
"""
import numpy as np

CHUNK = 4096
MASK64 = (1 << 64) - 1


def _seed_sequence(seed, keys):
    return np.random.SeedSequence(entropy=int(seed) & MASK64,
                                  spawn_key=tuple(int(k) for k in keys))


def derive_seed(seed, *keys):
    """Deterministic 64-bit child seed for ``(seed, *keys)``."""
    lo, hi = _seed_sequence(seed, keys).generate_state(2, dtype=np.uint32)
    return int(lo) | (int(hi) << 32)


def generator(seed, *keys):
    """A Philox-backed ``numpy.random.Generator`` keyed by ``(seed, *keys)``."""
    return np.random.Generator(np.random.Philox(_seed_sequence(seed, keys)))


def complex_normals(seed, start, stop, stream=0):
    """Standard complex Gaussians ``xi[start:stop]`` of stream ``stream``.

    Real and imaginary parts are independent centred normals of variance
    1/2, so ``E|xi|^2 = 1``.
    """
    start, stop = int(start), int(stop)
    if stop <= start:
        return np.zeros(0, dtype=complex)
    out = np.empty(stop - start, dtype=complex)
    first, last = start // CHUNK, (stop - 1) // CHUNK
    for chunk in range(first, last + 1):
        g = generator(seed, stream, chunk)
        z = g.standard_normal((CHUNK, 2))
        vals = (z[:, 0] + 1j * z[:, 1]) * np.sqrt(0.5)
        c0 = chunk * CHUNK
        lo, hi = max(start, c0), min(stop, c0 + CHUNK)
        out[lo - start:hi - start] = vals[lo - c0:hi - c0]
    return out
