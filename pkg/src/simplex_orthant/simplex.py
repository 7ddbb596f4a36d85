"""Zero-centered simplex geometry and random homogeneous polynomials.

A k-homogeneous polynomial P(x) = sum_a c_a x^a in n variables carries the
coefficient-weighted norm ||P|| = (sum_a c_a^2 a!/k!)^(1/2) and the centered
Gaussian measure matching it: independent c_a ~ N(0, k!/a!).  Under that
measure every linear functional of P is centered normal with variance equal
to its squared dual norm, and the dual inner product of two directional
derivative functionals has the closed form

    <d/dv(a), d/dw(b)> = k <v,w><a,b>^(k-1) + (k^2-k) <v,b><a,w><a,b>^(k-2).

The simplex is the convex hull of e_1, ..., e_{n+1} in R^{n+1} translated by
its barycenter, identified with R^n through a fixed Helmert-style orthonormal
basis of the hyperplane sum(x) = 0.  A polynomial has a relative maximum at a
vertex iff all n edge directional derivatives there are strictly positive,
which turns vertex-maximum frequencies into orthant probabilities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Optional

import numpy as np

from . import orthant
from .equicorrelated import (
    CrossBlockBound,
    EquicorrelatedSpec,
    TvBound,
    chunk_generator,
    inverse_diag_offdiag,
    tv_bound_frobenius,
)

MEMORY_BUDGET_BYTES = 256 * 2**20


class ResourceBudgetError(Exception):
    """Raised when a coefficient table would exceed the memory budget."""


@dataclass(frozen=True)
class SimplexGeometry:
    """Vertices of the zero-centered n-simplex and their R^n embedding.

    vertices: (n+1) x (n+1) rows e_i - z in the ambient hyperplane.
    embedding: n x (n+1) orthonormal rows spanning sum(x) = 0.
    embedded: (n+1) x n vertex coordinates in R^n.
    """

    n: int
    vertices: np.ndarray
    embedding: np.ndarray
    embedded: np.ndarray


@dataclass(frozen=True)
class EdgeFrame:
    """Unit directions from one vertex toward the n others, in R^n."""

    vertex: int
    directions: np.ndarray


@dataclass(frozen=True)
class BombieriPolynomial:
    """Dense coefficient table over the graded-lex multi-index order."""

    n: int
    k: int
    coefficients: np.ndarray

    def norm(self) -> float:
        weights = coefficient_variances(self.n, self.k)
        return math.sqrt(float(np.sum(self.coefficients**2 / weights)))

    def __call__(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ValueError(f"point must have dimension {self.n}")
        exponents = multi_index_table(self.n, self.k)
        with np.errstate(divide="ignore", invalid="ignore"):
            monomials = np.prod(
                np.where(exponents > 0, x[None, :] ** exponents, 1.0), axis=1
            )
        return float(self.coefficients @ monomials)


@dataclass(frozen=True)
class ExperimentReport:
    """A Monte Carlo estimate with its analytic comparison values."""

    estimate: float
    std_error: float
    trials: int
    seed: int
    analytic_f: float
    independence_approx: Optional[float] = None
    tv_paper_literal: Optional[float] = None
    tv_corrected: Optional[float] = None
    envelope: Optional[float] = None


@dataclass(frozen=True)
class TvReport:
    """Output of the cross-vertex total-variation pipeline."""

    n: int
    k: int
    epsilon: float
    alpha: float
    beta: float
    paper_literal: float
    corrected: float
    envelope: float


def helmert_basis(n: int) -> np.ndarray:
    """Orthonormal rows spanning the hyperplane sum(x) = 0 in R^{n+1}."""
    basis = np.zeros((n, n + 1))
    for i in range(1, n + 1):
        basis[i - 1, :i] = 1.0
        basis[i - 1, i] = -float(i)
        basis[i - 1] /= math.sqrt(i * (i + 1))
    return basis


def build_geometry(n: int, rotation: np.ndarray | None = None) -> SimplexGeometry:
    """Vertices e_i - z of the zero-centered simplex, embedded into R^n.

    An optional n x n orthogonal ``rotation`` is applied to the embedded
    coordinates; the vertex-maximum law is invariant under it.
    """
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive integer")
    center = np.full(n + 1, 1.0 / (n + 1))
    vertices = np.eye(n + 1) - center
    embedding = helmert_basis(n)
    if rotation is not None:
        rotation = np.asarray(rotation, dtype=float)
        if rotation.shape != (n, n):
            raise ValueError("rotation must be n x n")
        if not np.allclose(rotation @ rotation.T, np.eye(n), atol=1e-10):
            raise ValueError("rotation must be orthogonal")
        embedding = rotation @ embedding
    embedded = vertices @ embedding.T
    return SimplexGeometry(n=n, vertices=vertices, embedding=embedding, embedded=embedded)


def edge_frame(geom: SimplexGeometry, vertex: int) -> EdgeFrame:
    """Unit edge directions v_i = (a - a_i)/||a - a_i|| at one vertex."""
    if not 0 <= vertex <= geom.n:
        raise ValueError(f"vertex index {vertex} out of range 0..{geom.n}")
    a = geom.embedded[vertex]
    others = np.delete(geom.embedded, vertex, axis=0)
    diffs = a[None, :] - others
    directions = diffs / np.linalg.norm(diffs, axis=1, keepdims=True)
    return EdgeFrame(vertex=vertex, directions=directions)


def derivative_inner_product(v, a, w, b, k: int) -> float:
    """Dual inner product of the functionals P -> dP/dv(a) and P -> dP/dw(b)."""
    if k < 2:
        raise ValueError("k must be >= 2")
    v, a, w, b = (np.asarray(u, dtype=float) for u in (v, a, w, b))
    ab = float(a @ b)
    return k * float(v @ w) * ab ** (k - 1) + (k * k - k) * float(v @ b) * float(
        a @ w
    ) * ab ** (k - 2)


def rho_n(n: int, k: int) -> float:
    """Correlation (nk + k - 1)/(n(k+1) + k - 1) of same-vertex edge derivatives."""
    if n < 1 or k < 2:
        raise ValueError("need n >= 1 and k >= 2")
    return (n * k + (k - 1)) / (n * (k + 1) + (k - 1))


def epsilon_n(n: int, k: int) -> float:
    """Uniform bound (1/n^(k-2)) (1/(2k-1)) (1/n + k - 1) on cross-vertex correlations."""
    if n < 1 or k < 2:
        raise ValueError("need n >= 1 and k >= 2")
    return (1.0 / n ** (k - 2)) * (1.0 / (2 * k - 1)) * (1.0 / n + (k - 1))


@lru_cache(maxsize=64)
def multi_index_table(n: int, k: int) -> np.ndarray:
    """All exponent vectors with |alpha| = k over n variables, graded lex, descending."""
    rows = []
    for combo in combinations_with_replacement(range(n), k):
        alpha = [0] * n
        for i in combo:
            alpha[i] += 1
        rows.append(tuple(alpha))
    rows.sort(reverse=True)
    table = np.array(rows, dtype=np.int64)
    table.setflags(write=False)
    return table


@lru_cache(maxsize=64)
def coefficient_variances(n: int, k: int) -> np.ndarray:
    """Variance k!/alpha! of each coefficient under the polynomial measure."""
    from scipy.special import gammaln

    exponents = multi_index_table(n, k)
    var = np.exp(math.lgamma(k + 1) - np.sum(gammaln(exponents + 1.0), axis=1))
    var.setflags(write=False)
    return var


def coefficient_count(n: int, k: int) -> int:
    return math.comb(n + k - 1, k)


def _check_budget(n: int, k: int) -> int:
    d = coefficient_count(n, k)
    if d * 8 > MEMORY_BUDGET_BYTES:
        raise ResourceBudgetError(
            f"coefficient table for (n={n}, k={k}) has d={d} entries "
            f"({d * 8} bytes), exceeding the {MEMORY_BUDGET_BYTES}-byte budget"
        )
    return d


def sample_polynomial(n: int, k: int, seed: int) -> BombieriPolynomial:
    """One draw from the Gaussian polynomial ensemble, c_a ~ N(0, k!/a!)."""
    if n < 1 or k < 2:
        raise ValueError("need n >= 1 and k >= 2")
    _check_budget(n, k)
    rng = chunk_generator(seed, 0)
    sigma = np.sqrt(coefficient_variances(n, k))
    return BombieriPolynomial(
        n=n, k=k, coefficients=rng.standard_normal(len(sigma)) * sigma
    )


def directional_derivative(P: BombieriPolynomial, point, direction) -> float:
    """grad P(point) . direction from the monomial expansion."""
    point = np.asarray(point, dtype=float)
    direction = np.asarray(direction, dtype=float)
    if point.shape != (P.n,) or direction.shape != (P.n,):
        raise ValueError(f"point and direction must have dimension {P.n}")
    row = _derivative_row(multi_index_table(P.n, P.k), point, direction)
    return float(P.coefficients @ row)


def _derivative_row(exponents: np.ndarray, point: np.ndarray, direction: np.ndarray):
    """Per-multi-index values of sum_j alpha_j point^(alpha - e_j) direction_j."""
    d, n = exponents.shape
    out = np.zeros(d)
    for j in range(n):
        alpha_j = exponents[:, j]
        mask = alpha_j > 0
        if not np.any(mask):
            continue
        reduced = exponents[mask].copy()
        reduced[:, j] -= 1
        with np.errstate(divide="ignore", invalid="ignore"):
            powers = np.prod(
                np.where(reduced > 0, point[None, :] ** reduced, 1.0), axis=1
            )
        out[mask] += alpha_j[mask] * powers * direction[j]
    return out


@lru_cache(maxsize=16)
def _design_matrix(n: int, k: int) -> np.ndarray:
    """Rows of derivative functionals for every (vertex, edge direction) pair.

    Row order: vertex 0 edges 0..n-1, vertex 1 edges 0..n-1, ...  Multiplying
    a coefficient vector by this matrix evaluates all (n+1)*n unnormalized
    edge derivatives at once.
    """
    geom = build_geometry(n)
    exponents = multi_index_table(n, k)
    rows = []
    for vertex in range(n + 1):
        frame = edge_frame(geom, vertex)
        point = geom.embedded[vertex]
        for direction in frame.directions:
            rows.append(_derivative_row(exponents, point, direction))
    out = np.array(rows)
    out.setflags(write=False)
    return out


def derivative_norm_squared(n: int, k: int) -> float:
    """Analytic ||d/dv_i(a)||^2 = k ||a||^(2k-4) (||a||^2 + (k-1)/2)."""
    a_sq = n / (n + 1)
    return k * a_sq ** (k - 2) * (a_sq + (k - 1) / 2.0)


def is_vertex_max(P: BombieriPolynomial, geom: SimplexGeometry, vertex: int) -> bool:
    """True iff all edge directional derivatives at the vertex are > 0.

    A derivative exactly at zero counts as not outward-pointing; the event
    has probability zero under the ensemble.
    """
    if P.n != geom.n:
        raise ValueError("polynomial and geometry dimensions differ")
    frame = edge_frame(geom, vertex)
    point = geom.embedded[vertex]
    return all(
        directional_derivative(P, point, direction) > 0.0
        for direction in frame.directions
    )


def _chunk_sizes(total: int, chunk_size: int) -> list[int]:
    n_chunks = (total + chunk_size - 1) // chunk_size
    return [min(chunk_size, total - c * chunk_size) for c in range(n_chunks)]


def _map_ordered(fn, n_chunks: int, threads: int) -> list:
    if threads <= 1 or n_chunks <= 1:
        return [fn(c) for c in range(n_chunks)]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(n_chunks)))


def _derivative_chunks(
    n: int,
    k: int,
    seed: int,
    design: np.ndarray | None = None,
):
    """Chunk sampler mapping (chunk, size) to a size x rows derivative matrix."""
    design = _design_matrix(n, k) if design is None else design
    sigma = np.sqrt(coefficient_variances(n, k))

    def sample(chunk: int, size: int) -> np.ndarray:
        rng = chunk_generator(seed, chunk)
        coeffs = rng.standard_normal((size, len(sigma))) * sigma
        return coeffs @ design.T

    return sample


def analytic_vertex_probability(n: int, k: int) -> float:
    """f(n, rho_n) by closed form when available, else Steck quadrature."""
    return orthant.best_estimate(n, rho_n(n, k)).value


def estimate_vertex_probability(
    n: int,
    k: int,
    trials: int,
    seed: int,
    chunk_size: int = 50_000,
    threads: int = 1,
    rotation: np.ndarray | None = None,
) -> ExperimentReport:
    """Empirical frequency of a relative maximum at vertex 0."""
    if trials < 1:
        raise ValueError("trials must be positive")
    _check_budget(n, k)
    design = None
    if rotation is not None:
        geom = build_geometry(n, rotation=rotation)
        exponents = multi_index_table(n, k)
        frame = edge_frame(geom, 0)
        design = np.array(
            [
                _derivative_row(exponents, geom.embedded[0], direction)
                for direction in frame.directions
            ]
        )
    sample = _derivative_chunks(n, k, seed, design=design)
    sizes = _chunk_sizes(trials, chunk_size)

    def count_hits(chunk: int) -> int:
        derivs = sample(chunk, sizes[chunk])
        return int(np.count_nonzero(np.all(derivs[:, :n] > 0.0, axis=1)))

    hits = sum(_map_ordered(count_hits, len(sizes), threads))
    p_hat = hits / trials
    return ExperimentReport(
        estimate=p_hat,
        std_error=math.sqrt(p_hat * (1.0 - p_hat) / trials),
        trials=trials,
        seed=seed,
        analytic_f=analytic_vertex_probability(n, k),
    )


def estimate_union_probability(
    n: int,
    k: int,
    trials: int,
    seed: int,
    chunk_size: int = 50_000,
    threads: int = 1,
) -> ExperimentReport:
    """Empirical probability of a relative maximum at some vertex."""
    if trials < 1:
        raise ValueError("trials must be positive")
    _check_budget(n, k)
    sample = _derivative_chunks(n, k, seed)
    sizes = _chunk_sizes(trials, chunk_size)

    def count_hits(chunk: int) -> int:
        derivs = sample(chunk, sizes[chunk]).reshape(sizes[chunk], n + 1, n)
        vertex_max = np.all(derivs > 0.0, axis=2)
        return int(np.count_nonzero(np.any(vertex_max, axis=1)))

    hits = sum(_map_ordered(count_hits, len(sizes), threads))
    p_hat = hits / trials
    f = analytic_vertex_probability(n, k)
    # the cross-vertex dependence pipeline needs at least two off-diagonal
    # blocks; for the segment (n = 1) only the independence numbers apply
    tv = tv_pipeline(n, k) if n >= 2 else None
    return ExperimentReport(
        estimate=p_hat,
        std_error=math.sqrt(p_hat * (1.0 - p_hat) / trials),
        trials=trials,
        seed=seed,
        analytic_f=f,
        independence_approx=independent_union_approx(n, k, f),
        tv_paper_literal=tv.paper_literal if tv else None,
        tv_corrected=tv.corrected if tv else None,
        envelope=tv.envelope if tv else None,
    )


def gradient_correlations(
    n: int,
    k: int,
    trials: int,
    seed: int,
    chunk_size: int = 50_000,
    threads: int = 1,
) -> np.ndarray:
    """Empirical correlation matrix of all (n+1)*n edge derivatives."""
    if trials < 1:
        raise ValueError("trials must be positive")
    _check_budget(n, k)
    sample = _derivative_chunks(n, k, seed)
    sizes = _chunk_sizes(trials, chunk_size)

    def moments(chunk: int):
        derivs = sample(chunk, sizes[chunk])
        return derivs.sum(axis=0), derivs.T @ derivs

    parts = _map_ordered(moments, len(sizes), threads)
    total = sum(p[0] for p in parts)
    cross = sum(p[1] for p in parts)
    mean = total / trials
    cov = cross / trials - np.outer(mean, mean)
    scale = np.sqrt(np.diag(cov))
    return cov / np.outer(scale, scale)


def independent_union_approx(n: int, k: int, f: float) -> float:
    """1 - (1 - f)^(n+1), evaluated via log1p/expm1 for stability."""
    if not (0.0 <= f <= 1.0):
        raise ValueError("f must lie in [0, 1]")
    if f == 1.0:
        return 1.0
    return -math.expm1((n + 1) * math.log1p(-f))


def beta_n_sequence(n: int, k: int, c: float) -> float:
    """c * n^(-n/(nk+k-1)) / sqrt(log n) * (n+1); diverges, but o(n+1)."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if k < 2 or c <= 0.0:
        raise ValueError("need k >= 2 and c > 0")
    return c * n ** (-n / (n * k + (k - 1))) / math.sqrt(math.log(n)) * (n + 1)


def tv_pipeline(n: int, k: int) -> TvReport:
    """Cross-vertex dependence bound: epsilon, Lemma inverse, Frobenius chain."""
    if n < 2 or k < 2:
        raise ValueError("need n >= 2 and k >= 2")
    eps = epsilon_n(n, k)
    pair = inverse_diag_offdiag(EquicorrelatedSpec(n=n, rho=rho_n(n, k)))
    tv: TvBound = tv_bound_frobenius(n, n + 1, CrossBlockBound(epsilon=eps), pair)
    envelope = (k + 1) ** 2 / n ** (2 * k - 8)
    return TvReport(
        n=n,
        k=k,
        epsilon=eps,
        alpha=pair.alpha,
        beta=pair.beta,
        paper_literal=tv.paper_literal,
        corrected=tv.corrected,
        envelope=envelope,
    )
