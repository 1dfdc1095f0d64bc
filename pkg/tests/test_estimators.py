import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sephill.distributions import (
    EllipticalModel,
    GeneratingVariateSpec,
    RngStream,
    sample_elliptical,
)
from sephill.errors import (
    ConfigError,
    DegenerateSample,
    DimensionMismatch,
    DomainError,
    KOutOfRange,
    NonFinite,
    NonPositivePivot,
    NotConverged,
)
from sephill.estimators import (
    SAMPLE_MEAN_COV,
    SPATIAL_MEDIAN_TYLER,
    TRUE_PARAMS,
    estimate_location_scatter,
    hill_plot,
    mahalanobis,
    mahalanobis_distances,
    order_desc,
    sample_covariance,
    sample_mean,
    separating_hill,
    spatial_median,
    tyler_shape,
    univariate_hill,
)

LOG2 = np.log(2.0)


class TestUnivariateHill:
    def test_powers_of_two(self):
        est = univariate_hill([8.0, 4.0, 2.0, 1.0], k=2)
        assert est.gamma_hat == pytest.approx(1.5 * LOG2, rel=1e-12)
        assert est.k == 2 and est.n == 4

    def test_longer_ladder(self):
        ordered = [16.0, 8.0, 4.0, 2.0, 1.0]
        assert univariate_hill(ordered, k=3).gamma_hat == pytest.approx(
            2.0 * LOG2, rel=1e-12
        )
        assert univariate_hill(ordered, k=1).gamma_hat == pytest.approx(
            LOG2, rel=1e-12
        )

    def test_constant_distances_give_zero(self):
        assert univariate_hill([3.0, 3.0, 3.0, 3.0], k=2).gamma_hat == 0.0

    @pytest.mark.parametrize("k", [0, 4, 5, -1])
    def test_k_out_of_range(self, k):
        with pytest.raises(KOutOfRange):
            univariate_hill([8.0, 4.0, 2.0, 1.0], k=k)

    def test_zero_pivot(self):
        with pytest.raises(NonPositivePivot):
            univariate_hill([2.0, 1.0, 0.0, 0.0], k=2)

    def test_unsorted_rejected(self):
        with pytest.raises(DomainError):
            univariate_hill([1.0, 2.0, 4.0], k=1)

    def test_nonfinite_rejected(self):
        with pytest.raises(NonFinite):
            univariate_hill([np.inf, 2.0, 1.0], k=1)

    def test_source_label(self):
        est = univariate_hill([4.0, 2.0, 1.0], k=1, source="direct")
        assert est.location_scatter_source == "direct"


@settings(max_examples=60, deadline=None)
@given(
    scale=st.floats(min_value=1e-6, max_value=1e6),
    seed=st.integers(min_value=0, max_value=2**32 - 1),
)
def test_hill_is_scale_invariant(scale, seed):
    gen = np.random.default_rng(seed)
    ordered = order_desc(gen.pareto(2.0, size=40) + 1.0)
    k = 10
    base = univariate_hill(ordered, k).gamma_hat
    scaled = univariate_hill(order_desc(ordered * scale), k).gamma_hat
    assert scaled == pytest.approx(base, rel=1e-12, abs=1e-12)


class TestOrderDesc:
    def test_sorts_descending(self):
        np.testing.assert_array_equal(
            order_desc([1.0, 3.0, 2.0, 3.0]), [3.0, 3.0, 2.0, 1.0]
        )

    def test_rejects_2d(self):
        with pytest.raises(DimensionMismatch):
            order_desc(np.ones((2, 2)))

    def test_rejects_nan(self):
        with pytest.raises(NonFinite):
            order_desc([1.0, np.nan])


class TestMahalanobis:
    def test_diagonal_oracle(self):
        d = mahalanobis([2.0, 3.0], [0.0, 0.0], np.diag([0.25, 1.0 / 9.0]))
        assert d == pytest.approx(np.sqrt(2.0), rel=1e-14)

    def test_identity_is_euclidean(self):
        x = np.array([3.0, 4.0])
        assert mahalanobis(x, np.zeros(2), np.eye(2)) == pytest.approx(5.0)

    def test_batch_matches_single(self):
        rng = np.random.default_rng(5)
        sample = rng.normal(size=(20, 3))
        mu = rng.normal(size=3)
        a = rng.normal(size=(3, 3))
        sigma_inv = a @ a.T + np.eye(3)
        batch = mahalanobis_distances(sample, mu, sigma_inv)
        singles = [mahalanobis(row, mu, sigma_inv) for row in sample]
        np.testing.assert_allclose(batch, singles, rtol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            mahalanobis([1.0, 2.0, 3.0], [0.0, 0.0], np.eye(2))
        with pytest.raises(DimensionMismatch):
            mahalanobis_distances(np.ones((4, 2)), np.zeros(3), np.eye(3))


class TestSeparatingHill:
    def test_matches_ordered_distances(self):
        # points on the first axis make the scatter distances explicit
        sample = np.array([[8.0, 0.0], [4.0, 0.0], [2.0, 0.0], [1.0, 0.0]])
        est = separating_hill(sample, np.zeros(2), np.eye(2), k=2)
        assert est.gamma_hat == pytest.approx(1.5 * LOG2, rel=1e-12)
        assert est.location_scatter_source == TRUE_PARAMS

    def test_affine_invariance(self):
        rng = np.random.default_rng(11)
        model = EllipticalModel(
            mu=np.array([1.0, -1.0]),
            sigma=np.array([[2.0, 0.3], [0.3, 0.5]]),
            variate=GeneratingVariateSpec.pareto(2.0),
        )
        sample, _ = sample_elliptical(model, 300, RngStream(2, 0))
        base = separating_hill(sample, model.mu, model.sigma, k=17).gamma_hat

        a = rng.normal(size=(2, 2)) + 2.0 * np.eye(2)
        b = rng.normal(size=2)
        mapped = sample @ a.T + b
        mapped_est = separating_hill(
            mapped, a @ model.mu + b, a @ model.sigma @ a.T, k=17
        ).gamma_hat
        assert mapped_est == pytest.approx(base, rel=1e-9)


class TestMoments:
    def test_mean_oracle(self):
        np.testing.assert_allclose(
            sample_mean([[0.0, 0.0], [2.0, 0.0], [0.0, 2.0], [2.0, 2.0]]), [1.0, 1.0]
        )

    def test_covariance_oracle(self):
        cov = sample_covariance([[0.0, 0.0], [2.0, 0.0], [0.0, 2.0], [2.0, 2.0]])
        np.testing.assert_allclose(cov, np.diag([4.0 / 3.0, 4.0 / 3.0]), atol=1e-15)

    def test_covariance_univariate(self):
        np.testing.assert_allclose(sample_covariance([[1.0], [3.0]]), [[2.0]])

    def test_too_few_rows(self):
        with pytest.raises(DegenerateSample):
            sample_covariance(np.ones((2, 2)))

    def test_collinear_rows(self):
        rows = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [3.0, 3.0]])
        with pytest.raises(DegenerateSample):
            sample_covariance(rows)


class TestSpatialMedian:
    def test_two_points_midpoint(self):
        m = spatial_median([[0.0, 0.0], [2.0, 0.0]])
        np.testing.assert_allclose(m, [1.0, 0.0], atol=1e-9)

    def test_square_center(self):
        pts = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]
        np.testing.assert_allclose(spatial_median(pts), [0.5, 0.5], atol=1e-9)

    def test_majority_point_wins(self):
        pts = [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [5.0, 0.0]]
        np.testing.assert_allclose(spatial_median(pts), [0.0, 0.0], atol=1e-8)

    def test_gradient_small_at_solution(self):
        rng = np.random.default_rng(3)
        x = rng.standard_t(df=2.0, size=(200, 3))
        m = spatial_median(x, tol=1e-12)
        diff = x - m
        unit = diff / np.linalg.norm(diff, axis=1)[:, None]
        assert np.linalg.norm(unit.sum(axis=0)) < 1e-6

    def test_translation_equivariance(self):
        rng = np.random.default_rng(4)
        x = rng.normal(size=(50, 2))
        shift = np.array([10.0, -3.0])
        np.testing.assert_allclose(
            spatial_median(x + shift), spatial_median(x) + shift, atol=1e-8
        )

    def test_not_converged_carries_last_iterate(self):
        rng = np.random.default_rng(9)
        x = rng.standard_t(df=1.5, size=(60, 2))
        with pytest.raises(NotConverged) as info:
            spatial_median(x, tol=1e-15, max_iter=1)
        err = info.value
        assert err.iterations == 1
        assert isinstance(err.last_iterate, np.ndarray)
        assert err.last_iterate.shape == (2,)


class TestTylerShape:
    def _heavy_sample(self, sigma, n, seed):
        d = sigma.shape[0]
        model = EllipticalModel(
            mu=np.zeros(d),
            sigma=sigma,
            variate=GeneratingVariateSpec.t_radial(1.0, d),
        )
        sample, _ = sample_elliptical(model, n, RngStream(seed, 0))
        return sample

    def test_trace_is_dimension(self):
        sample = self._heavy_sample(np.eye(3), 400, seed=21)
        v = tyler_shape(sample, np.zeros(3))
        assert np.trace(v) == pytest.approx(3.0, abs=1e-12)
        np.testing.assert_allclose(v, v.T)

    def test_fixed_point_residual(self):
        sample = self._heavy_sample(np.array([[2.0, 0.7], [0.7, 1.0]]), 500, seed=5)
        tol = 1e-9
        v = tyler_shape(sample, np.zeros(2), tol=tol)
        diff = sample
        q = np.einsum("ni,ij,nj->n", diff, np.linalg.inv(v), diff)
        mapped = (2.0 / diff.shape[0]) * np.einsum(
            "ni,nj->ij", diff / q[:, None], diff
        )
        mapped *= 2.0 / np.trace(mapped)
        assert np.max(np.abs(mapped - v)) < 10 * tol

    def test_recovers_shape_matrix(self):
        sigma = np.array([[3.0, 1.0], [1.0, 2.0]])
        sample = self._heavy_sample(sigma, 4000, seed=13)
        v = tyler_shape(sample, np.zeros(2))
        target = 2.0 * sigma / np.trace(sigma)
        assert np.max(np.abs(v - target)) < 0.12

    def test_rows_at_location_dropped_with_warning(self):
        rng = np.random.default_rng(2)
        x = np.vstack([rng.normal(size=(50, 2)), np.zeros((3, 2))])
        with pytest.warns(UserWarning, match="dropping 3 rows"):
            v = tyler_shape(x, np.zeros(2))
        assert np.trace(v) == pytest.approx(2.0, abs=1e-12)

    def test_too_few_rows(self):
        with pytest.raises(DegenerateSample):
            tyler_shape(np.eye(2), np.zeros(2))

    def test_location_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            tyler_shape(np.ones((10, 2)), np.zeros(3))


class TestEstimateLocationScatter:
    def test_mean_cov_method(self):
        rng = np.random.default_rng(1)
        x = rng.normal(size=(100, 2))
        est = estimate_location_scatter(x, SAMPLE_MEAN_COV)
        np.testing.assert_allclose(est.mu_hat, sample_mean(x))
        np.testing.assert_allclose(est.sigma_hat, sample_covariance(x))
        np.testing.assert_allclose(
            est.sigma_hat_inv @ est.sigma_hat, np.eye(2), atol=1e-10
        )
        assert est.method == SAMPLE_MEAN_COV
        assert est.converged

    def test_median_tyler_method(self):
        rng = np.random.default_rng(7)
        x = rng.standard_t(df=2.0, size=(300, 2))
        est = estimate_location_scatter(x, SPATIAL_MEDIAN_TYLER)
        assert np.trace(est.sigma_hat) == pytest.approx(2.0, abs=1e-12)
        assert est.iterations > 0

    def test_unknown_method(self):
        with pytest.raises(ConfigError):
            estimate_location_scatter(np.ones((10, 2)), "mle")


class TestHillPlot:
    def test_ladder_oracle(self):
        sample = np.array(
            [[16.0, 0.0], [8.0, 0.0], [4.0, 0.0], [2.0, 0.0], [1.0, 0.0]]
        )
        from sephill.estimators import LocationScatterEstimate

        ls = LocationScatterEstimate(
            mu_hat=np.zeros(2),
            sigma_hat=np.eye(2),
            sigma_hat_inv=np.eye(2),
            method=TRUE_PARAMS,
        )
        rows = hill_plot(sample, ls, [1, 3])
        assert rows[0][0] == 1 and rows[0][1] == pytest.approx(LOG2, rel=1e-12)
        assert rows[1][0] == 3 and rows[1][1] == pytest.approx(2 * LOG2, rel=1e-12)

    def test_agrees_with_separating_hill(self):
        model = EllipticalModel(
            mu=np.array([0.5, 0.5]),
            sigma=np.array([[1.0, 0.2], [0.2, 1.0]]),
            variate=GeneratingVariateSpec.pareto(2.0),
        )
        sample, _ = sample_elliptical(model, 200, RngStream(3, 1))
        from sephill.estimators import LocationScatterEstimate
        from sephill.linalg import spd_inverse

        ls = LocationScatterEstimate(
            mu_hat=model.mu,
            sigma_hat=model.sigma,
            sigma_hat_inv=spd_inverse(model.sigma),
            method=TRUE_PARAMS,
        )
        rows = hill_plot(sample, ls, range(5, 50, 5))
        for k, gamma in rows:
            direct = separating_hill(sample, model.mu, model.sigma, k=k).gamma_hat
            assert gamma == pytest.approx(direct, rel=1e-12, abs=1e-13)
