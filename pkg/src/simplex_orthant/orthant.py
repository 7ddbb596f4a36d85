"""Orthant probabilities f(n, rho) for equicorrelated normal vectors.

Four routes to f(n, rho) = P(X_1 > 0, ..., X_n > 0):

* closed forms for n <= 3 and for rho in {0, 1/2};
* the one-dimensional identity f(n, rho) = E[Phi^n(Z sqrt(s))],
  s = rho/(1-rho), evaluated by recentred Gauss-Hermite quadrature;
* the density-transform integral
  f(n, rho) = (sqrt(2 pi))^(1/s - 1) / sqrt(s) *
              int_0^1 x^n [phi(Phi^{-1}(x))]^(1/s - 1) dx,
  evaluated by endpoint-aware adaptive quadrature;
* Monte Carlo over common-factor draws.

Plus the four two-sided rate bounds with fully explicit proof-level
constants, all of the form  f(n, rho) ~ n^(1 - 1/rho) x constant(rho)
up to log(n) factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy import integrate
from scipy.special import log_ndtr, logsumexp, ndtri, roots_hermite

from . import normal
from .equicorrelated import EquicorrelatedSpec, sample_chunk

LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class QuadratureSpec:
    """Node count / tolerance configuration for the deterministic methods."""

    method: str = "gauss_hermite"
    nodes: int = 200
    rel_tol: float = 1e-10

    def __post_init__(self):
        if self.method not in ("gauss_hermite", "transformed_adaptive"):
            raise ValueError(f"unknown quadrature method {self.method!r}")
        if self.nodes < 2:
            raise ValueError("nodes must be >= 2")
        if self.rel_tol < 1e-14:
            raise ValueError("rel_tol must be >= 1e-14")


@dataclass(frozen=True)
class OrthantEstimate:
    """A value of f(n, rho) with its provenance.

    std_error is zero exactly for the deterministic methods; count is the
    node count or trial count actually used.
    """

    value: float
    std_error: float
    method: str
    count: int

    def __post_init__(self):
        if not (0.0 <= self.value <= 1.0):
            raise ValueError("orthant probability must lie in [0, 1]")
        if self.std_error < 0.0:
            raise ValueError("std_error must be nonnegative")


@dataclass(frozen=True)
class BoundReport:
    """All four rate bounds at one (n, rho), with applicability flags.

    scale is n^(1 - 1/rho), the common normalization of the bounds.  The
    low-rho upper bound only holds past an unspecified threshold n0(rho) and
    is therefore flagged asymptotic: it is reported but never asserted.
    """

    n: int
    rho: float
    scale: float
    lower: Optional[float]
    upper: Optional[float]
    lower_applicable: bool
    upper_applicable: bool
    upper_asymptotic: bool


def _validate(n: int, rho: float) -> None:
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive integer")
    lo = -1.0 / (n - 1) if n > 1 else -math.inf
    if not (lo < rho < 1.0):
        raise ValueError(f"rho={rho} outside ({lo}, 1) for n={n}")


def closed_form(n: int, rho: float) -> Optional[OrthantEstimate]:
    """Exact f(n, rho) where a closed form exists, else None.

    Covered: n = 1; independence rho = 0; rho = 1/2 (f = 1/(n+1));
    Sheppard's n = 2 arcsine formula; David's n = 3 formula at equal rho.
    """
    _validate(n, rho)
    if n == 1:
        value = 0.5
    elif rho == 0.0:
        value = 0.5**n
    elif rho == 0.5:
        value = 1.0 / (n + 1)
    elif n == 2:
        value = 0.25 + math.asin(rho) / (2.0 * math.pi)
    elif n == 3:
        value = trivariate_closed_form(rho, rho, rho)
    else:
        return None
    return OrthantEstimate(value=value, std_error=0.0, method="closed_form", count=0)


def trivariate_closed_form(rho12: float, rho13: float, rho23: float) -> float:
    """David's formula 1/8 + (arcsin r12 + arcsin r13 + arcsin r23)/(4 pi)."""
    corr = np.array(
        [[1.0, rho12, rho13], [rho12, 1.0, rho23], [rho13, rho23, 1.0]]
    )
    if np.linalg.eigvalsh(corr)[0] < -1e-12:
        raise ValueError("correlation matrix is not positive semidefinite")
    return 0.125 + (
        math.asin(rho12) + math.asin(rho13) + math.asin(rho23)
    ) / (4.0 * math.pi)


@lru_cache(maxsize=16)
def _hermite_rule(nodes: int):
    t, w = roots_hermite(nodes)
    with np.errstate(divide="ignore"):
        # far-tail weights underflow to 0; -inf log-weights drop out cleanly
        return t, np.log(w)


def _steck_log_peak(n: int, sqrt_s: float):
    """Maximizer and curvature of L(z) = n log Phi(z sqrt(s)) - z^2/2."""
    s = sqrt_s * sqrt_s
    z = 0.0
    h = -1.0
    for _ in range(200):
        # r = phi/Phi at z*sqrt(s); L' = n sqrt(s) r - z
        r = math.exp(-0.5 * (z * sqrt_s) ** 2 - LOG_SQRT_2PI - log_ndtr(z * sqrt_s))
        grad = n * sqrt_s * r - z
        h = n * s * (-z * sqrt_s * r - r * r) - 1.0
        step = grad / h
        z_new = z - step
        if abs(z_new - z) <= 1e-13 * max(1.0, abs(z)):
            z = z_new
            break
        z = z_new
    return z, 1.0 / math.sqrt(-h)


def _steck_fixed_nodes(n: int, rho: float, nodes: int) -> float:
    s = rho / (1.0 - rho)
    sqrt_s = math.sqrt(s)
    center, sigma = _steck_log_peak(n, sqrt_s)
    t, log_w = _hermite_rule(nodes)
    z = center + math.sqrt(2.0) * sigma * t
    log_terms = n * log_ndtr(z * sqrt_s) - 0.5 * z * z + t * t + log_w
    return math.sqrt(2.0) * sigma * math.exp(logsumexp(log_terms) - LOG_SQRT_2PI)


def steck_quadrature(
    n: int, rho: float, quad: QuadratureSpec | None = None
) -> OrthantEstimate:
    """E[Phi^n(Z sqrt(s))] by Gauss-Hermite quadrature recentred at the peak.

    For large n the integrand mass leaves the span of fixed nodes, so the
    rule is centred at the maximizer of n log Phi(z sqrt(s)) - z^2/2 and
    scaled by the local curvature.  Nodes are doubled until two successive
    values agree to rel_tol.
    """
    _validate(n, rho)
    if not (0.0 < rho < 1.0):
        raise ValueError("steck identity requires 0 < rho < 1")
    quad = quad or QuadratureSpec()
    nodes = quad.nodes
    value = _steck_fixed_nodes(n, rho, nodes)
    for _ in range(4):
        nodes *= 2
        refined = _steck_fixed_nodes(n, rho, nodes)
        if abs(refined - value) <= quad.rel_tol * max(abs(refined), 1e-300):
            return OrthantEstimate(
                value=refined, std_error=0.0, method="steck_quadrature", count=nodes
            )
        value = refined
    raise ArithmeticError(
        f"steck quadrature failed to converge to rel_tol={quad.rel_tol} "
        f"at (n={n}, rho={rho})"
    )


def density_integral(
    n: int, rho: float, quad: QuadratureSpec | None = None
) -> OrthantEstimate:
    """The [0,1] density-transform integral, split at 1/2.

    For rho > 1/2 the exponent 1/s - 1 lies in (-1, 0) and the integrand has
    an integrable algebraic singularity at x = 1; the substitution
    1 - x = tau^s absorbs it exactly, leaving a bounded integrand.
    """
    _validate(n, rho)
    if not (0.0 < rho < 1.0):
        raise ValueError("density integral requires 0 < rho < 1")
    quad = quad or QuadratureSpec(method="transformed_adaptive")
    s = rho / (1.0 - rho)
    e = 1.0 / s - 1.0
    # (sqrt(2 pi))^(1/s - 1) / sqrt(s)
    log_pref = e * LOG_SQRT_2PI - 0.5 * math.log(s)
    eps = max(quad.rel_tol * 1e-2, 1e-14)

    def integrand_plain(x):
        if x <= 0.0 or x >= 1.0:
            return 0.0
        q = ndtri(x)
        return math.exp(n * math.log(x) + e * (-0.5 * q * q - LOG_SQRT_2PI))

    lower, _ = integrate.quad(
        integrand_plain, 0.0, 0.5, epsabs=1e-300, epsrel=eps, limit=500
    )
    if s > 1.0:

        def integrand_upper(tau):
            if tau <= 0.0:
                return 0.0
            one_minus_x = tau**s
            q = -ndtri(one_minus_x)
            # log of phi(Phi^{-1}(x)) / (1-x); the (1-x)^e factor cancels
            # against the Jacobian s * tau^(s-1)
            log_ratio = -0.5 * q * q - LOG_SQRT_2PI - s * math.log(tau)
            return math.exp(n * math.log1p(-one_minus_x) + e * log_ratio + math.log(s))

        upper, _ = integrate.quad(
            integrand_upper, 0.0, 0.5 ** (1.0 / s), epsabs=1e-300, epsrel=eps, limit=500
        )
    else:
        upper, _ = integrate.quad(
            integrand_plain, 0.5, 1.0, epsabs=1e-300, epsrel=eps, limit=500
        )
    value = math.exp(log_pref) * (lower + upper)
    return OrthantEstimate(
        value=value, std_error=0.0, method="density_integral", count=quad.nodes
    )


def monte_carlo(
    n: int,
    rho: float,
    trials: int,
    seed: int,
    chunk_size: int = 100_000,
    threads: int = 1,
) -> OrthantEstimate:
    """Fraction of common-factor draws with all coordinates positive.

    Chunked and deterministic per (seed, chunk index); the thread count never
    changes the result, only how chunks are scheduled.
    """
    _validate(n, rho)
    if rho < 0.0:
        raise ValueError("monte_carlo requires rho >= 0 (sampler constraint)")
    if trials < 1:
        raise ValueError("trials must be positive")
    spec = EquicorrelatedSpec(n=n, rho=rho)
    sizes = _chunk_sizes(trials, chunk_size)

    def count_hits(chunk):
        draws = sample_chunk(spec, chunk, sizes[chunk], seed)
        return int(np.count_nonzero(np.all(draws > 0.0, axis=1)))

    hits = sum(_map_ordered(count_hits, len(sizes), threads))
    p_hat = hits / trials
    se = math.sqrt(p_hat * (1.0 - p_hat) / trials)
    return OrthantEstimate(value=p_hat, std_error=se, method="monte_carlo", count=trials)


def _chunk_sizes(total: int, chunk_size: int) -> list[int]:
    n_chunks = (total + chunk_size - 1) // chunk_size
    return [min(chunk_size, total - c * chunk_size) for c in range(n_chunks)]


def _map_ordered(fn, n_chunks: int, threads: int) -> list:
    if threads <= 1 or n_chunks <= 1:
        return [fn(c) for c in range(n_chunks)]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(n_chunks)))


def bound_high_rho_lower(n: int, rho: float) -> Optional[float]:
    """Explicit lower bound for f(n, rho), rho > 1/2, n >= 2.

    The Markov/Birnbaum/Gordon chain with every constant kept:
    n^(1-1/rho) * 2/sqrt(2 pi) * (1 - 1/(2 sqrt(4 pi log 2)))^2
    / (sqrt(4 + 2(1/rho-1) log n) + sqrt(2(1/rho-1) log n)).
    """
    _validate(n, rho)
    if rho <= 0.5 or n < 2:
        return None
    ell = (1.0 / rho - 1.0) * math.log(n)
    const = (1.0 - 1.0 / (2.0 * math.sqrt(4.0 * math.pi * math.log(2.0)))) ** 2
    return (
        n ** (1.0 - 1.0 / rho)
        * (2.0 / math.sqrt(2.0 * math.pi))
        * const
        / (math.sqrt(4.0 + 2.0 * ell) + math.sqrt(2.0 * ell))
    )


def bound_high_rho_upper(n: int, rho: float) -> Optional[float]:
    """Upper bound n^(1-1/rho) 2^(1/rho-2) sqrt((1-rho)/rho) (1 + B(2, 1/rho-1))."""
    _validate(n, rho)
    if rho <= 0.5 or n < 2:
        return None
    log_b = normal.log_beta(2.0, 1.0 / rho - 1.0)
    return (
        n ** (1.0 - 1.0 / rho)
        * 2.0 ** (1.0 / rho - 2.0)
        * math.sqrt((1.0 - rho) / rho)
        * (1.0 + math.exp(log_b))
    )


def low_rho_gate(n: int, rho: float) -> bool:
    """The growth condition n >= (1/rho - 1) log(n) / log(2)."""
    return n >= (1.0 / rho - 1.0) * math.log(n) / math.log(2.0)


def bound_low_rho_lower(n: int, rho: float) -> Optional[float]:
    """Lower bound n^(1-1/rho) 2^(1/rho-2) sqrt((1-rho)/rho) (Gamma(1/rho-1) - 1).

    Valid only under low_rho_gate; returns None otherwise.  May be negative
    for rho close to 1/2 (Gamma(1/rho-1) < 1), which is still a valid bound.
    """
    _validate(n, rho)
    if rho >= 0.5 or rho <= 0.0 or not low_rho_gate(n, rho):
        return None
    gamma = math.exp(normal.log_gamma(1.0 / rho - 1.0))
    return (
        n ** (1.0 - 1.0 / rho)
        * 2.0 ** (1.0 / rho - 2.0)
        * math.sqrt((1.0 - rho) / rho)
        * (gamma - 1.0)
    )


def bound_low_rho_upper(n: int, rho: float) -> Optional[float]:
    """Asymptotic upper bound n^(1-1/rho) sqrt((1-rho)/rho) [(1/rho-1) log(n)^2]^(1/rho-2).

    Holds only past an unspecified n0(rho); callers must treat the value as
    a trend envelope, not a certified bound.  Computed in the log domain:
    the bracket raised to 1/rho - 2 overflows quickly for small rho.
    """
    _validate(n, rho)
    if rho >= 0.5 or rho <= 0.0 or n < 2:
        return None
    log_val = (
        (1.0 - 1.0 / rho) * math.log(n)
        + 0.5 * math.log((1.0 - rho) / rho)
        + (1.0 / rho - 2.0) * math.log((1.0 / rho - 1.0) * math.log(n) ** 2)
    )
    return math.exp(log_val)


def scaled_ratio(n: int, rho: float, f: float) -> float:
    """f / n^(1 - 1/rho), evaluated in the log domain."""
    if not (0.0 < f < 1.0):
        raise ValueError("f must lie in (0, 1)")
    return math.exp(math.log(f) - (1.0 - 1.0 / rho) * math.log(n))


def theorem_bounds(n: int, rho: float) -> BoundReport:
    """All applicable rate bounds at (n, rho) in one report."""
    _validate(n, rho)
    scale = n ** (1.0 - 1.0 / rho) if rho > 0 else math.nan
    if rho > 0.5:
        lower = bound_high_rho_lower(n, rho)
        upper = bound_high_rho_upper(n, rho)
        return BoundReport(
            n=n, rho=rho, scale=scale,
            lower=lower, upper=upper,
            lower_applicable=lower is not None,
            upper_applicable=upper is not None,
            upper_asymptotic=False,
        )
    if 0.0 < rho < 0.5:
        lower = bound_low_rho_lower(n, rho)
        upper = bound_low_rho_upper(n, rho)
        return BoundReport(
            n=n, rho=rho, scale=scale,
            lower=lower, upper=upper,
            lower_applicable=lower is not None,
            upper_applicable=False,
            upper_asymptotic=upper is not None,
        )
    return BoundReport(
        n=n, rho=rho, scale=scale,
        lower=None, upper=None,
        lower_applicable=False, upper_applicable=False, upper_asymptotic=False,
    )


def best_estimate(
    n: int, rho: float, quad: QuadratureSpec | None = None
) -> OrthantEstimate:
    """Closed form when one exists, otherwise Steck quadrature."""
    exact = closed_form(n, rho)
    if exact is not None:
        return exact
    if rho <= 0.0:
        raise ValueError(
            f"no closed form and no integral identity for rho={rho} <= 0"
        )
    return steck_quadrature(n, rho, quad)
