"""Equicorrelated covariance algebra, sampling, and the TV-distance bound.

The covariance matrix A has unit diagonal and a single off-diagonal value
rho.  Its inverse shares the same structure; the (alpha, beta) pair solving

    alpha + (n-1) rho beta = 1
    rho alpha + ((n-2) rho + 1) beta = 0

is returned in closed form.  Sampling uses the common-factor representation
X_i = sqrt(rho) Z0 + sqrt(1-rho) Z_i, which is exact for this covariance and
O(n) per draw.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


@dataclass(frozen=True)
class EquicorrelatedSpec:
    """Dimension n and common correlation rho; validated on construction."""

    n: int
    rho: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("dimension n must be a positive integer")
        lo = -1.0 / (self.n - 1) if self.n > 1 else -math.inf
        if not (lo < self.rho < 1.0):
            raise ValueError(
                f"rho={self.rho} outside ({lo}, 1) for n={self.n}; "
                "A would not be positive definite"
            )


@dataclass(frozen=True)
class InverseDiagonalPair:
    """Diagonal and off-diagonal entries of the inverse covariance."""

    alpha: float
    beta: float


@dataclass(frozen=True)
class CrossBlockBound:
    """Uniform entrywise bound on the cross-vertex covariance block."""

    epsilon: float

    def __post_init__(self):
        if self.epsilon < 0.0:
            raise ValueError("epsilon must be nonnegative")


class TvBound(NamedTuple):
    """Both readings of the Devroye-Mehrabian-Reddad Frobenius bound."""

    paper_literal: float
    corrected: float


def covariance_matrix(spec: EquicorrelatedSpec) -> np.ndarray:
    """Dense n x n matrix with ones on the diagonal and rho elsewhere."""
    n = spec.n
    a = np.full((n, n), spec.rho)
    np.fill_diagonal(a, 1.0)
    return a


def inverse_diag_offdiag(spec: EquicorrelatedSpec) -> InverseDiagonalPair:
    """Closed-form (alpha, beta) with A^{-1} = beta * J + (alpha - beta) * I."""
    n, rho = spec.n, spec.rho
    if n == 1:
        return InverseDiagonalPair(alpha=1.0, beta=0.0)
    den = (n - 2) * rho + 1.0 - rho * rho * (n - 1)
    if den == 0.0:
        raise ValueError("singular covariance: denominator vanished")
    return InverseDiagonalPair(alpha=((n - 2) * rho + 1.0) / den, beta=-rho / den)


def inverse_matrix(spec: EquicorrelatedSpec) -> np.ndarray:
    """Dense inverse built from the closed-form pair."""
    pair = inverse_diag_offdiag(spec)
    b = np.full((spec.n, spec.n), pair.beta)
    np.fill_diagonal(b, pair.alpha)
    return b


def chunk_generator(seed: int, chunk: int) -> np.random.Generator:
    """Deterministic RNG for one chunk of a run.

    Chunks are non-overlapping streams of a single Philox sequence keyed by
    seed, so a run is a pure function of (seed, chunk index) and chunks may
    be produced concurrently and concatenated in chunk order.
    """
    return np.random.Generator(np.random.Philox(key=seed).jumped(chunk))


def sample_equicorrelated(
    spec: EquicorrelatedSpec,
    count: int,
    seed: int,
    chunk_size: int = 100_000,
) -> np.ndarray:
    """count x n draws with N(0,1) marginals and pairwise correlation rho.

    Requires rho >= 0: the common-factor construction has no real square
    root otherwise.
    """
    if spec.rho < 0.0:
        raise ValueError(
            "sample_equicorrelated supports rho >= 0 only "
            "(common-factor construction)"
        )
    if count < 1:
        raise ValueError("count must be positive")
    chunks = [
        sample_chunk(spec, chunk, min(chunk_size, count - chunk * chunk_size), seed)
        for chunk in range((count + chunk_size - 1) // chunk_size)
    ]
    return np.concatenate(chunks, axis=0)


def sample_chunk(
    spec: EquicorrelatedSpec, chunk: int, size: int, seed: int
) -> np.ndarray:
    """One deterministic chunk of sample_equicorrelated."""
    rng = chunk_generator(seed, chunk)
    z0 = rng.standard_normal((size, 1))
    z = rng.standard_normal((size, spec.n))
    return math.sqrt(spec.rho) * z0 + math.sqrt(1.0 - spec.rho) * z


def tv_bound_frobenius(
    n: int, m: int, entry_bound: CrossBlockBound, inv: InverseDiagonalPair
) -> TvBound:
    """Bound on TV(G_eps, G_0) from the entrywise cross-block bound.

    Each entry of a nonzero block of Sigma_eps Sigma_0^{-1} - I is bounded by
    epsilon * (|alpha| + (n-1)|beta|).  ``paper_literal`` is the displayed
    chain (3/2)(m^2-m) n^2 eps^2 (|alpha|+(n-1)|beta|)^2 read verbatim;
    ``corrected`` reads that display as the squared Frobenius norm and takes
    the square root before applying the 3/2 factor.
    """
    if n < 1 or m < 2:
        raise ValueError("need block dimension n >= 1 and m >= 2 blocks")
    eps = entry_bound.epsilon
    row_l1 = abs(inv.alpha) + (n - 1) * abs(inv.beta)
    literal = 1.5 * (m * m - m) * n * n * eps * eps * row_l1 * row_l1
    corrected = 1.5 * math.sqrt(m * m - m) * n * eps * row_l1
    return TvBound(paper_literal=literal, corrected=corrected)


def assemble_block_operator(
    n: int, m: int, cross_block: np.ndarray, spec: EquicorrelatedSpec
) -> np.ndarray:
    """Exact Sigma_eps Sigma_0^{-1} - I for a given cross block M.

    Used to validate tv_bound_frobenius against the exactly assembled
    (m*n) x (m*n) matrix at desk scale.
    """
    if cross_block.shape != (n, n):
        raise ValueError("cross block must be n x n")
    mb = cross_block @ inverse_matrix(spec)
    out = np.zeros((m * n, m * n))
    for i in range(m):
        for j in range(m):
            if i != j:
                out[i * n : (i + 1) * n, j * n : (j + 1) * n] = mb
    return out
