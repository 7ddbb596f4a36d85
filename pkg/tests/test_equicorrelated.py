import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from simplex_orthant.equicorrelated import (
    CrossBlockBound,
    EquicorrelatedSpec,
    assemble_block_operator,
    chunk_generator,
    covariance_matrix,
    inverse_diag_offdiag,
    inverse_matrix,
    sample_chunk,
    sample_equicorrelated,
    tv_bound_frobenius,
)
from simplex_orthant.simplex import rho_n


class TestSpecValidation:
    def test_accepts_valid(self):
        EquicorrelatedSpec(n=3, rho=-0.45)
        EquicorrelatedSpec(n=2, rho=0.99)
        EquicorrelatedSpec(n=1, rho=-5.0)  # 1x1 matrix is always [1]

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            EquicorrelatedSpec(n=3, rho=-0.6)
        with pytest.raises(ValueError):
            EquicorrelatedSpec(n=2, rho=1.0)
        with pytest.raises(ValueError):
            EquicorrelatedSpec(n=0, rho=0.5)


class TestCovariance:
    def test_small_examples(self):
        a = covariance_matrix(EquicorrelatedSpec(n=2, rho=0.5))
        assert np.array_equal(a, [[1.0, 0.5], [0.5, 1.0]])
        assert np.array_equal(covariance_matrix(EquicorrelatedSpec(n=3, rho=0.0)), np.eye(3))

    def test_positive_definite(self):
        for n, rho in ((5, -0.2), (10, 0.95), (3, -0.49)):
            eig = np.linalg.eigvalsh(covariance_matrix(EquicorrelatedSpec(n=n, rho=rho)))
            assert eig[0] > 0

    @pytest.mark.parametrize("n", [2, 5, 25, 50])
    @pytest.mark.parametrize("rho", [-0.01, 0.0, 0.3, 0.7, 0.95])
    def test_eigenvalue_structure(self, n, rho):
        eig = np.sort(np.linalg.eigvalsh(covariance_matrix(EquicorrelatedSpec(n=n, rho=rho))))
        expected = np.sort(np.r_[np.full(n - 1, 1.0 - rho), 1.0 + (n - 1) * rho])
        assert np.allclose(eig, expected, atol=1e-10)


class TestInverse:
    def test_two_by_two(self):
        pair = inverse_diag_offdiag(EquicorrelatedSpec(n=2, rho=0.5))
        assert pair.alpha == pytest.approx(4.0 / 3.0, rel=1e-14)
        assert pair.beta == pytest.approx(-2.0 / 3.0, rel=1e-14)

    def test_identity_when_uncorrelated(self):
        pair = inverse_diag_offdiag(EquicorrelatedSpec(n=7, rho=0.0))
        assert (pair.alpha, pair.beta) == (1.0, 0.0)

    def test_three_by_three(self):
        pair = inverse_diag_offdiag(EquicorrelatedSpec(n=3, rho=0.5))
        assert pair.alpha == pytest.approx(1.5, rel=1e-13)
        assert pair.beta == pytest.approx(-0.5, rel=1e-13)

    @given(
        st.integers(min_value=2, max_value=60),
        st.floats(min_value=-0.4, max_value=0.98),
    )
    @settings(max_examples=100, deadline=None)
    def test_reconstruction(self, n, rho):
        if rho <= -1.0 / (n - 1):
            return
        spec = EquicorrelatedSpec(n=n, rho=rho)
        product = covariance_matrix(spec) @ inverse_matrix(spec)
        assert np.max(np.abs(product - np.eye(n))) <= 1e-10

    def test_defining_equations(self):
        for n, k in ((5, 2), (20, 4), (100, 7)):
            rho = rho_n(n, k)
            pair = inverse_diag_offdiag(EquicorrelatedSpec(n=n, rho=rho))
            assert pair.alpha + (n - 1) * rho * pair.beta == pytest.approx(1.0, abs=1e-12)
            assert rho * pair.alpha + ((n - 2) * rho + 1) * pair.beta == pytest.approx(
                0.0, abs=1e-12
            )

    @pytest.mark.parametrize("k", range(2, 9))
    def test_asymptotics_at_rho_n(self, k):
        n = 10_000
        pair = inverse_diag_offdiag(EquicorrelatedSpec(n=n, rho=rho_n(n, k)))
        assert pair.alpha == pytest.approx(k + 1, rel=0.01)
        assert (n - 1) * abs(pair.beta) == pytest.approx(k + 1, rel=0.01)

    @pytest.mark.parametrize("k", range(2, 9))
    @pytest.mark.parametrize("n", [2, 5, 10, 50, 200])
    def test_rational_forms_at_rho_n(self, n, k):
        # factored closed forms in (n, k); beta's numerator expands to the
        # quadratic n^2(k^2+k) + n(2k^2-k-1) + (k-1)^2 over -kn^2(n+1)
        pair = inverse_diag_offdiag(EquicorrelatedSpec(n=n, rho=rho_n(n, k)))
        den = k * n * n * (n + 1)
        alpha_rat = (k * n * n - k + 1) * (k * n + k + n - 1) / den
        beta_rat = -(k * n + k - 1) * (k * n + k + n - 1) / den
        beta_quadratic = (n * n * (k * k + k) + n * (2 * k * k - k - 1) + (k - 1) ** 2) / (
            -(k * n**3 + k * n * n)
        )
        assert pair.alpha == pytest.approx(alpha_rat, rel=1e-10)
        assert pair.beta == pytest.approx(beta_rat, rel=1e-10)
        assert pair.beta == pytest.approx(beta_quadratic, rel=1e-10)


class TestSampler:
    def test_rejects_negative_rho(self):
        with pytest.raises(ValueError):
            sample_equicorrelated(EquicorrelatedSpec(n=3, rho=-0.1), 10, seed=0)

    def test_independent_case(self):
        x = sample_equicorrelated(EquicorrelatedSpec(n=2, rho=0.0), 1_000_000, seed=42)
        corr = np.corrcoef(x, rowvar=False)[0, 1]
        assert abs(corr) <= 0.004  # 3 sigma (plus slack) around 0

    def test_strong_correlation(self):
        x = sample_equicorrelated(EquicorrelatedSpec(n=5, rho=0.8), 1_000_000, seed=42)
        emp = np.corrcoef(x, rowvar=False)
        off = emp[np.triu_indices(5, 1)]
        assert np.max(np.abs(off - 0.8)) <= 0.002

    def test_orthant_frequency_rho_half(self):
        # f(3, 1/2) = 1/4
        x = sample_equicorrelated(EquicorrelatedSpec(n=3, rho=0.5), 1_000_000, seed=42)
        freq = np.mean(np.all(x > 0, axis=1))
        assert abs(freq - 0.25) <= 0.0013

    def test_marginals_standard_normal(self):
        x = sample_equicorrelated(EquicorrelatedSpec(n=4, rho=0.6), 500_000, seed=9)
        assert np.max(np.abs(x.mean(axis=0))) <= 0.005
        assert np.max(np.abs(x.std(axis=0) - 1.0)) <= 0.005

    def test_chunked_determinism(self):
        spec = EquicorrelatedSpec(n=3, rho=0.4)
        a = sample_equicorrelated(spec, 250_000, seed=7, chunk_size=100_000)
        b = sample_equicorrelated(spec, 250_000, seed=7, chunk_size=100_000)
        assert np.array_equal(a, b)
        # chunks are independent of how many trials follow them
        first = sample_chunk(spec, 0, 100_000, seed=7)
        assert np.array_equal(a[:100_000], first)

    def test_distinct_chunks_differ(self):
        g0 = chunk_generator(3, 0).standard_normal(4)
        g1 = chunk_generator(3, 1).standard_normal(4)
        assert not np.array_equal(g0, g1)


class TestTvBound:
    def test_zero_epsilon(self):
        pair = inverse_diag_offdiag(EquicorrelatedSpec(n=4, rho=0.6))
        tv = tv_bound_frobenius(4, 5, CrossBlockBound(epsilon=0.0), pair)
        assert tv.paper_literal == 0.0 and tv.corrected == 0.0

    def test_homogeneity_in_epsilon(self):
        pair = inverse_diag_offdiag(EquicorrelatedSpec(n=4, rho=0.6))
        one = tv_bound_frobenius(4, 5, CrossBlockBound(epsilon=1e-3), pair)
        two = tv_bound_frobenius(4, 5, CrossBlockBound(epsilon=2e-3), pair)
        assert two.corrected == pytest.approx(2.0 * one.corrected, rel=1e-14)
        assert two.paper_literal == pytest.approx(4.0 * one.paper_literal, rel=1e-14)

    def test_dominates_exact_frobenius(self):
        # worst-case cross block: all entries at +epsilon
        n, m = 10, 11
        eps = 4.1 / 9000.0
        spec = EquicorrelatedSpec(n=n, rho=rho_n(10, 5))
        pair = inverse_diag_offdiag(spec)
        tv = tv_bound_frobenius(n, m, CrossBlockBound(epsilon=eps), pair)
        block = np.full((n, n), eps)
        exact = 1.5 * np.linalg.norm(assemble_block_operator(n, m, block, spec))
        assert exact <= tv.corrected + 1e-12
        # and the corrected reading is the sqrt of the literal chain / (3/2)
        assert tv.corrected == pytest.approx(
            1.5 * math.sqrt(tv.paper_literal / 1.5), rel=1e-12
        )

    def test_entry_bound_row_sum(self):
        # every entry of M B is bounded by eps * (|alpha| + (n-1)|beta|)
        rng = np.random.Generator(np.random.Philox(key=1))
        n, eps = 6, 0.01
        spec = EquicorrelatedSpec(n=n, rho=0.7)
        pair = inverse_diag_offdiag(spec)
        bound = eps * (abs(pair.alpha) + (n - 1) * abs(pair.beta))
        for _ in range(20):
            block = rng.uniform(-eps, eps, size=(n, n))
            entries = np.abs(block @ inverse_matrix(spec))
            assert entries.max() <= bound + 1e-15

    def test_domain(self):
        pair = inverse_diag_offdiag(EquicorrelatedSpec(n=2, rho=0.5))
        with pytest.raises(ValueError):
            tv_bound_frobenius(2, 1, CrossBlockBound(epsilon=0.1), pair)
        with pytest.raises(ValueError):
            CrossBlockBound(epsilon=-1.0)
