"""Haar sampling on SO(n), the determinant-average identity, and V_n.

The sampler is QR of a standard Gaussian matrix with the sign convention
that makes R's diagonal positive (realized as modified Gram-Schmidt, which
produces exactly that Q); draws landing in the det = -1 component of O(n)
are rejected and resampled, giving exact Haar on SO(n) at a rejection rate
of one half.

Monte Carlo work is split into fixed-size chunks with per-chunk substreams
derived from (seed, chunk index), and chunk results are reduced in chunk
order, so estimates are bit-reproducible regardless of how many worker
threads execute the chunks.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Rotation",
    "McEstimate",
    "haar_sample",
    "haar_batch",
    "det_integral_mc",
    "det_batch",
    "sphere_volume",
    "vn",
]

ROTATION_TOL = 1e-12
_CHUNK = 50_000


class Rotation:
    """An element of SO(n): orthogonal with determinant +1."""

    __slots__ = ("u", "n")

    def __init__(self, u: np.ndarray):
        u = np.asarray(u, dtype=float)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise ValueError("Rotation needs a square matrix")
        if np.max(np.abs(u.T @ u - np.eye(u.shape[0]))) > ROTATION_TOL:
            raise ValueError("matrix is not orthogonal within tolerance")
        if abs(np.linalg.det(u) - 1.0) > ROTATION_TOL * u.shape[0] * 10:
            raise ValueError("matrix is not in the determinant +1 component")
        self.u = u
        self.n = u.shape[0]

    def __repr__(self):
        return f"Rotation(n={self.n})"


@dataclass(frozen=True)
class McEstimate:
    """A Monte-Carlo value with its standard error and provenance."""

    value: float
    stderr: float
    samples: int
    seed: int

    def __post_init__(self):
        if self.samples <= 0:
            raise ValueError("samples must be positive")
        if self.stderr < 0:
            raise ValueError("stderr must be nonnegative")

    def consistent_with(self, target: float, sigmas: float = 3.0) -> bool:
        return abs(self.value - target) <= sigmas * self.stderr


def det_batch(m: np.ndarray) -> np.ndarray:
    """Determinants of a stack of k x k matrices, closed-form for k <= 4."""
    k = m.shape[-1]
    if k == 1:
        return m[..., 0, 0]
    if k == 2:
        return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]
    if k == 3:
        return (
            m[..., 0, 0] * (m[..., 1, 1] * m[..., 2, 2] - m[..., 1, 2] * m[..., 2, 1])
            - m[..., 0, 1] * (m[..., 1, 0] * m[..., 2, 2] - m[..., 1, 2] * m[..., 2, 0])
            + m[..., 0, 2] * (m[..., 1, 0] * m[..., 2, 1] - m[..., 1, 1] * m[..., 2, 0])
        )
    if k == 4:
        # Cayley expansion in 2x2 minors of rows (0,1) against rows (2,3)
        a, b, c, d = (m[..., 0, i] for i in range(4))
        e, f, g, h = (m[..., 1, i] for i in range(4))
        i_, j, kk, l = (m[..., 2, i] for i in range(4))
        mm, n_, o, p = (m[..., 3, i] for i in range(4))
        p01, p02, p03 = a * f - b * e, a * g - c * e, a * h - d * e
        p12, p13, p23 = b * g - c * f, b * h - d * f, c * h - d * g
        q01, q02, q03 = i_ * n_ - j * mm, i_ * o - kk * mm, i_ * p - l * mm
        q12, q13, q23 = j * o - kk * n_, j * p - l * n_, kk * p - l * o
        return p01 * q23 - p02 * q13 + p03 * q12 + p12 * q03 - p13 * q02 + p23 * q01
    return np.linalg.det(m)


def _orthonormalize(g: np.ndarray) -> np.ndarray:
    """Batched modified Gram-Schmidt on columns, with a reorthogonalization
    pass for the rare ill-conditioned draws; R's diagonal is positive by
    construction."""
    n = g.shape[-1]
    q = np.empty_like(g)
    for k in range(n):
        v = g[:, :, k].copy()
        for l in range(k):
            v -= np.sum(v * q[:, :, l], axis=1)[:, None] * q[:, :, l]
        for l in range(k):
            v -= np.sum(v * q[:, :, l], axis=1)[:, None] * q[:, :, l]
        v /= np.linalg.norm(v, axis=1)[:, None]
        q[:, :, k] = v
    return q


def haar_batch(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """`count` Haar-distributed SO(n) matrices as a (count, n, n) array.

    The determinant sign of the Gaussian input equals the determinant of
    its Q factor, so rejection is applied before orthonormalization.
    """
    if not 2 <= n <= 6:
        raise ValueError("supported rotation sizes are 2..6")
    if count < 0:
        raise ValueError("count must be nonnegative")
    parts = []
    have = 0
    while have < count:
        raw = max(int(np.ceil((count - have) * 2.2)), 16)
        g = rng.standard_normal((raw, n, n))
        g = g[det_batch(g) > 0]
        take = min(g.shape[0], count - have)
        parts.append(_orthonormalize(g[:take]))
        have += take
    return np.concatenate(parts) if parts else np.empty((0, n, n))


def haar_sample(n: int, rng: np.random.Generator) -> Rotation:
    """One Haar-distributed rotation; rejection loop on det = -1."""
    if not 2 <= n <= 6:
        raise ValueError("supported rotation sizes are 2..6")
    while True:
        g = rng.standard_normal((n, n))
        if det_batch(g[None])[0] > 0:
            return Rotation(_orthonormalize(g[None])[0])


def _mc_chunks(samples: int, chunk: int) -> list[int]:
    sizes = [chunk] * (samples // chunk)
    if samples % chunk:
        sizes.append(samples % chunk)
    return sizes


def det_integral_mc(
    a: np.ndarray,
    samples: int,
    seed: int,
    chunk: int = _CHUNK,
    workers: int | None = None,
) -> McEstimate:
    """Monte-Carlo estimate of E_U[det(I - U a)] over Haar on SO(n).

    The exact value is 1 + (-1)^n det(a); the total-mass normalization V_n
    is deliberately kept out of the estimator and supplied by `vn`.
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    if samples < 1000:
        raise ValueError("need at least 10^3 samples")
    eye = np.eye(n)

    def run_chunk(args):
        idx, size = args
        sub = np.random.default_rng([seed, idx])
        u = haar_batch(n, size, sub)
        vals = det_batch(eye - u @ a)
        s = float(np.sum(vals))
        return size, s, float(np.sum((vals - s / size) ** 2))

    sizes = _mc_chunks(samples, chunk)
    jobs = list(enumerate(sizes))
    if workers is None:
        workers = min(4, os.cpu_count() or 1)
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(run_chunk, jobs))
    else:
        results = [run_chunk(j) for j in jobs]

    # combine (count, sum, centered sumsq) in fixed chunk order
    cnt, tot, m2 = 0, 0.0, 0.0
    for c, s, q in results:
        if cnt == 0:
            cnt, tot, m2 = c, s, q
            continue
        delta = s / c - tot / cnt
        m2 = m2 + q + delta * delta * cnt * c / (cnt + c)
        tot += s
        cnt += c
    mean = tot / cnt
    var = max(m2, 0.0) / (cnt - 1) if cnt > 1 else 0.0
    return McEstimate(value=mean, stderr=math.sqrt(var / cnt), samples=cnt, seed=seed)


def sphere_volume(n: int) -> float:
    """Volume of the unit n-sphere: 2 pi^{(n+1)/2} / Gamma((n+1)/2)."""
    if n < 1:
        raise ValueError("sphere dimension must be >= 1")
    return 2.0 * math.pi ** ((n + 1) / 2.0) / math.gamma((n + 1) / 2.0)


def vn(n: int) -> float:
    """Volume of SO(n) for the Tr(AB)/2 normalization of its metric.

    V_1 = 1 (SO(1) is trivial) and V_{k+1} = V_k * Vol(S^k), giving
    V_2 = 2*pi and V_3 = 8*pi^2.
    """
    if not 1 <= n <= 6:
        raise ValueError("supported range is 1..6")
    v = 1.0
    for k in range(1, n):
        v *= sphere_volume(k)
    return v
