"""Runnable invariant suites backing the `verify` CLI command.

Each suite returns a list of check dicts: {"name", "passed", "detail"}.
The "quick" budget shrinks grids and trial counts so the whole run stays
under a minute; "full" runs the desk-scale versions.
"""

from __future__ import annotations

import math

import numpy as np

from . import normal, orthant, simplex
from .equicorrelated import (
    EquicorrelatedSpec,
    covariance_matrix,
    inverse_diag_offdiag,
    inverse_matrix,
    sample_equicorrelated,
)


def _check(name: str, passed: bool, detail: str = "") -> dict:
    return {"name": name, "passed": bool(passed), "detail": detail}


def suite_special_functions(budget: str) -> list[dict]:
    checks = []
    grid = np.linspace(-8.0, 8.0, 1601)
    sym = np.max(np.abs(normal.std_normal_cdf(grid) + normal.std_normal_cdf(-grid) - 1.0))
    checks.append(_check("cdf_symmetry", sym <= 1e-14, f"max |Phi(x)+Phi(-x)-1| = {sym:.3e}"))

    xs = np.linspace(1e-3, 8.0, 1000)
    tail = normal.std_normal_cdf(-xs)
    ok = np.all(normal.birnbaum_lower_mills(xs) < tail) and np.all(
        tail < normal.gordon_upper_mills(xs)
    )
    checks.append(_check("mills_bracketing", ok, "Birnbaum < 1-Phi < Gordon on (0, 8]"))

    us = np.linspace(1e-6, 1.0 - 1e-6, 1000)
    profile = normal.pdf_of_quantile(us)
    linear = np.minimum(us, 1.0 - us) * math.sqrt(2.0 / math.pi)
    worst = np.min(profile - linear)
    checks.append(_check("phi_lin_lower_bound", worst >= -1e-12, f"min slack {worst:.3e}"))

    mid = 0.5 * (profile[:-2] + profile[2:])
    concave = np.all(profile[1:-1] >= mid - 1e-12)
    checks.append(_check("profile_midpoint_concavity", concave))

    ok = True
    for s in (0.2, 0.4, 0.8, 1.5, 2.0, 4.0, 10.0):
        for n in (1, 2, 5, 20, 100, 1000):
            lhs = normal.log_beta(n + 1.0, 1.0 / s)
            upper = -math.log(n) / s + normal.log_gamma(1.0 / s)
            lower = -math.log(n) / s + normal.log_beta(2.0, 1.0 / s)
            ok &= lower - 1e-12 <= lhs <= upper + 1e-12
    checks.append(_check("beta_asymptotic_sandwich", ok,
                         "n^(-1/s) B(2,1/s) <= B(n+1,1/s) <= n^(-1/s) Gamma(1/s)"))

    xs = np.linspace(-6.0, 6.0, 601)
    rt = np.max(np.abs(
        normal.std_normal_quantile_from_log(normal.log_std_normal_cdf(xs)) - xs
    ))
    checks.append(_check("quantile_round_trip", rt <= 1e-10, f"max |x' - x| = {rt:.3e}"))
    return checks


def suite_lemma_inverse(budget: str, inject_fault: str | None = None) -> list[dict]:
    checks = []
    flip = -1.0 if inject_fault == "lemma-sign" else 1.0

    worst = 0.0
    for k in range(2, 9):
        for n in range(2, 101 if budget == "full" else 41, 1 if budget == "full" else 3):
            spec = EquicorrelatedSpec(n=n, rho=simplex.rho_n(n, k))
            pair = inverse_diag_offdiag(spec)
            b = np.full((n, n), flip * pair.beta)
            np.fill_diagonal(b, pair.alpha)
            err = np.max(np.abs(covariance_matrix(spec) @ b - np.eye(n)))
            worst = max(worst, err)
    checks.append(_check("lemma_inverse_reconstruction", worst <= 1e-10,
                         f"max ||A B - I||_max = {worst:.3e}"))

    ok = True
    for k in range(2, 9):
        n = 10_000
        pair = inverse_diag_offdiag(EquicorrelatedSpec(n=n, rho=simplex.rho_n(n, k)))
        a_ok = abs(pair.alpha - (k + 1)) <= 0.01 * (k + 1)
        b_ok = abs((n - 1) * abs(flip * pair.beta) - (k + 1)) <= 0.01 * (k + 1)
        ok &= a_ok and b_ok
    checks.append(_check("lemma_asymptotics", ok, "alpha and (n-1)|beta| within 1% of k+1"))

    # factored rational forms in (n, k); beta's matches the direct inversion,
    # alpha uses the corrected factorization
    ok = True
    for k in range(2, 9):
        for n in (2, 5, 10, 50, 200):
            pair = inverse_diag_offdiag(EquicorrelatedSpec(n=n, rho=simplex.rho_n(n, k)))
            den = k * n * n * (n + 1)
            alpha_rat = (k * n * n - k + 1) * (k * n + k + n - 1) / den
            beta_rat = -(k * n + k - 1) * (k * n + k + n - 1) / den
            ok &= abs(pair.alpha - alpha_rat) <= 1e-10 * abs(alpha_rat)
            ok &= abs(flip * pair.beta - beta_rat) <= 1e-10 * abs(beta_rat)
    checks.append(_check("lemma_rational_forms", ok))

    ok = True
    for n in (2, 5, 10, 25, 50):
        for rho in (-0.01, 0.0, 0.3, 0.7, 0.95):
            if n > 1 and rho <= -1.0 / (n - 1):
                continue
            eig = np.sort(np.linalg.eigvalsh(covariance_matrix(EquicorrelatedSpec(n=n, rho=rho))))
            expected = np.sort(np.r_[np.full(n - 1, 1.0 - rho), 1.0 + (n - 1) * rho])
            ok &= np.max(np.abs(eig - expected)) <= 1e-10
    checks.append(_check("eigenvalue_structure", ok))
    return checks


def suite_sampler(budget: str) -> list[dict]:
    checks = []
    draws_per_case = 1_000_000 if budget == "full" else 100_000
    ok = True
    detail = []
    for n, rho in ((2, 0.3), (4, 0.6), (8, 0.9)):
        spec = EquicorrelatedSpec(n=n, rho=rho)
        x = sample_equicorrelated(spec, draws_per_case, seed=20_240_601)
        emp = np.corrcoef(x, rowvar=False)
        off = emp[np.triu_indices(n, 1)]
        sigma = (1.0 - rho * rho) / math.sqrt(draws_per_case)
        worst = np.max(np.abs(off - rho))
        ok &= worst <= 3.5 * sigma
        detail.append(f"(n={n},rho={rho}): max dev {worst:.2e} vs 3.5s={3.5 * sigma:.2e}")
        # chi-square on the 2^n sign patterns of the first two coordinates
        signs = (x[:, :2] > 0).astype(int)
        cells = np.bincount(signs[:, 0] * 2 + signs[:, 1], minlength=4)
        p_pp = orthant.closed_form(2, rho).value
        p_pm = 0.5 - p_pp
        probs = np.array([p_pp, p_pm, p_pm, p_pp])
        chi2 = np.sum((cells - draws_per_case * probs) ** 2 / (draws_per_case * probs))
        ok &= chi2 <= 16.27  # chi2(3) at 0.999
        detail.append(f"(n={n},rho={rho}): sign chi2 {chi2:.2f}")
    checks.append(_check("sampler_moments_and_signs", ok, "; ".join(detail)))
    return checks


def suite_orthant(budget: str) -> list[dict]:
    checks = []
    ns = (2, 5, 10, 50, 200) if budget == "full" else (2, 5, 10, 50)
    worst = 0.0
    for rho in np.arange(0.1, 0.95, 0.1):
        for n in ns:
            a = orthant.steck_quadrature(n, float(rho)).value
            b = orthant.density_integral(n, float(rho)).value
            worst = max(worst, abs(a - b) / a)
    checks.append(_check("representation_equivalence", worst <= 1e-8,
                         f"max rel diff {worst:.3e}"))

    worst = 0.0
    for n in (1, 2, 3):
        for rho in np.arange(0.05, 1.0, 0.05):
            exact = orthant.closed_form(n, float(rho)).value
            if n == 1:
                continue
            q = orthant.steck_quadrature(n, float(rho)).value
            worst = max(worst, abs(q - exact))
    checks.append(_check("closed_form_agreement", worst <= 1e-9,
                         f"max abs err {worst:.3e}"))

    ok = True
    for n in (2, 5, 20):
        vals = [orthant.steck_quadrature(n, float(r)).value for r in np.arange(0.05, 1.0, 0.05)]
        ok &= all(b >= a - 1e-10 for a, b in zip(vals, vals[1:]))
    checks.append(_check("monotone_in_rho", ok))

    ok = True
    for rho in (0.25, 0.5, 0.75):
        vals = [orthant.steck_quadrature(n, rho).value for n in range(1, 30)]
        ok &= all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))
    checks.append(_check("monotone_in_n", ok))

    ok = True
    for rho in (0.6, 0.75, 0.9):
        for n in (2, 10, 100, 1000):
            f = orthant.steck_quadrature(n, rho).value
            lo = orthant.bound_high_rho_lower(n, rho)
            hi = orthant.bound_high_rho_upper(n, rho)
            ok &= lo <= f <= hi
    for rho in (0.2, 0.3, 0.4):
        for n in (10, 50, 200, 1000):
            lo = orthant.bound_low_rho_lower(n, rho)
            if lo is None:
                continue
            ok &= lo <= orthant.steck_quadrature(n, rho).value
    checks.append(_check("theorem_sandwich", ok))

    ratios = []
    for n in np.unique(np.geomspace(100, 100_000, 12).astype(int)):
        f = orthant.steck_quadrature(int(n), 0.75).value
        ratios.append(orthant.scaled_ratio(int(n), 0.75, f) * math.sqrt(math.log(n)))
    spread = max(ratios) / min(ratios)
    checks.append(_check("rate_tight_up_to_logs", spread <= 10.0,
                         f"ratio band spread {spread:.3f}"))
    return checks


def suite_simplex(budget: str) -> list[dict]:
    checks = []
    trials = 200_000 if budget == "full" else 40_000
    ok = True
    detail = []
    for n, k in ((3, 3), (5, 4)):
        corr = simplex.gradient_correlations(n, k, trials, seed=7_031)
        rho = simplex.rho_n(n, k)
        same = corr[:n, :n][np.triu_indices(n, 1)]
        sigma = (1.0 - rho * rho) / math.sqrt(trials)
        worst = np.max(np.abs(same - rho))
        ok &= worst <= 3.5 * sigma
        cross = np.abs(corr[:n, n : 2 * n]).max()
        eps = simplex.epsilon_n(n, k)
        # the antipodal shared-edge pair exceeds the epsilon display by a
        # bounded factor (< 1.75, decreasing in n); allow for it explicitly
        ok &= cross <= 1.75 * eps + 3.5 / math.sqrt(trials)
        detail.append(f"(n={n},k={k}): same-vertex dev {worst:.2e}, cross max {cross:.2e}")
    checks.append(_check("gradient_law", ok, "; ".join(detail)))

    # analytic norm of the derivative functional vs empirical variance
    ok = True
    for n, k in ((3, 3), (5, 4)):
        design = simplex._design_matrix(n, k)
        var = simplex.coefficient_variances(n, k)
        empirical = float(np.sum(var * design[0] ** 2))
        analytic = simplex.derivative_norm_squared(n, k)
        ok &= abs(empirical - analytic) <= 1e-10 * analytic
    checks.append(_check("derivative_norm_formula", ok))

    rng = np.random.Generator(np.random.Philox(key=99))
    q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    base = simplex.estimate_vertex_probability(3, 3, trials, seed=101)
    rotated = simplex.estimate_vertex_probability(3, 3, trials, seed=202, rotation=q)
    band = 3.0 * math.sqrt(base.std_error**2 + rotated.std_error**2)
    checks.append(_check("rotation_invariance",
                         abs(base.estimate - rotated.estimate) <= band,
                         f"|{base.estimate:.5f} - {rotated.estimate:.5f}| vs {band:.5f}"))

    p = simplex.sample_polynomial(4, 5, seed=11)
    rng = np.random.Generator(np.random.Philox(key=5))
    ok = True
    for _ in range(20):
        x = rng.standard_normal(4)
        t = float(rng.uniform(0.2, 3.0))
        ok &= abs(p(t * x) - t**5 * p(x)) <= 1e-10 * max(1.0, abs(p(x)) * t**5)
    checks.append(_check("homogeneity", ok))

    union_trials = 50_000 if budget == "full" else 10_000
    prev, prev_se = -1.0, 0.0
    ok = True
    for n in (2, 4, 6, 8, 10):
        rep = simplex.estimate_union_probability(n, 5, union_trials, seed=31_337)
        ok &= rep.estimate >= prev - 3.0 * math.sqrt(rep.std_error**2 + prev_se**2)
        ok &= rep.estimate >= rep.independence_approx - rep.tv_corrected - 3.0 * rep.std_error
        prev, prev_se = rep.estimate, rep.std_error
    checks.append(_check("union_trend", ok))
    return checks


SUITES = ("special_functions", "lemma_inverse", "sampler", "orthant", "simplex")


def run_all(
    budget: str = "quick",
    inject_fault: str | None = None,
    only: list[str] | None = None,
) -> dict:
    runners = {
        "special_functions": lambda: suite_special_functions(budget),
        "lemma_inverse": lambda: suite_lemma_inverse(budget, inject_fault=inject_fault),
        "sampler": lambda: suite_sampler(budget),
        "orthant": lambda: suite_orthant(budget),
        "simplex": lambda: suite_simplex(budget),
    }
    selected = only or list(SUITES)
    unknown = set(selected) - set(SUITES)
    if unknown:
        raise ValueError(f"unknown suites: {sorted(unknown)}")
    suites = {name: runners[name]() for name in selected}
    failures = [
        f"{suite}:{c['name']}"
        for suite, checks in suites.items()
        for c in checks
        if not c["passed"]
    ]
    return {
        "budget": budget,
        "suites": suites,
        "failures": failures,
        "all_passed": not failures,
    }
