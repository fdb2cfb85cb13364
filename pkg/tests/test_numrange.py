"""Tests for the numrange module."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from numrad.errors import NotPSDError, NotUnitError, OutOfRangeError, WrongDimensionError
from numrad.gauges import ExpM1Gauge, FactorPair, PowerGauge
from numrad.matrix import BlockMatrix2x2, adjoint, operator_norm
from numrad.numrange import (
    RadiusMethod,
    check_block_identities,
    check_gauge_mean,
    check_jensen,
    check_mixed_cs,
    nr_ellipse_2x2,
    nr_rayleigh,
    numerical_radius,
    radius_by_method,
    re_norm_at_theta,
    spectral_radius_psd_product,
)

SQUARE_ZERO = np.array([[0, 1], [0, 0]], dtype=np.complex128)

finite = st.floats(min_value=-3, max_value=3, allow_nan=False, allow_infinity=False)


def random_matrix(n, seed=0):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def unit(v):
    v = np.asarray(v, dtype=np.complex128)
    return v / np.linalg.norm(v)


class TestNumericalRadius:
    def test_square_zero(self):
        """Test w([[0, 1], [0, 0]]) = 1/2."""
        result = numerical_radius(SQUARE_ZERO)
        assert result.value == pytest.approx(0.5, abs=1e-10)
        assert result.method is RadiusMethod.THETA_SWEEP

    def test_hermitian_reflection(self):
        """Test w(diag(1, -1)) = 1."""
        assert numerical_radius(np.diag([1.0, -1.0])).value == pytest.approx(1.0, abs=1e-10)

    def test_identity(self):
        """Test the identity has radius 1."""
        assert numerical_radius(np.eye(3)).value == pytest.approx(1.0, abs=1e-10)

    def test_jordan_block(self):
        """Test w([[1, 2], [0, 1]]) = 2, a disk of radius 1 around 1."""
        assert numerical_radius(np.array([[1, 2], [0, 1]])).value == pytest.approx(2.0, abs=1e-9)

    def test_zero_matrix(self):
        """Test the zero matrix has radius exactly 0."""
        result = numerical_radius(np.zeros((3, 3)))
        assert result.value == 0.0 and result.certified_tolerance == 0.0

    def test_one_by_one(self):
        """Test a scalar's radius is its modulus."""
        assert numerical_radius(np.array([[3 - 4j]])).value == pytest.approx(5.0, abs=1e-12)

    def test_certificate(self):
        """Test the certified gap meets the requested tolerance."""
        m = random_matrix(6, seed=2)
        result = numerical_radius(m, tol=1e-10)
        assert result.certified_tolerance <= 2e-10 * max(1.0, operator_norm(m))
        assert result.lower <= result.value <= result.upper

    def test_tolerance_floor(self):
        """Test a tolerance below 1e-12 is rejected."""
        with pytest.raises(OutOfRangeError):
            numerical_radius(np.eye(2), tol=1e-13)

    def test_grid_floor(self):
        """Test a grid below 8 points is rejected."""
        with pytest.raises(OutOfRangeError):
            numerical_radius(np.eye(2), grid=4)

    def test_to_dict(self):
        """Test the result serializes its method by name."""
        data = numerical_radius(np.eye(2)).to_dict()
        assert data["method"] == "theta_sweep"
        assert set(data) == {"value", "certified_tolerance", "argmax_theta", "method"}

    @settings(max_examples=40, deadline=None)
    @given(arrays(np.float64, (3, 3), elements=finite), arrays(np.float64, (3, 3), elements=finite))
    def test_norm_sandwich(self, re, im):
        """Test 1/2 ||M|| <= w(M) <= ||M|| on arbitrary inputs."""
        m = re + 1j * im
        w = numerical_radius(m).value
        norm = operator_norm(m)
        slack = 1e-9 * max(1.0, norm)
        assert 0.5 * norm <= w + slack
        assert w <= norm + slack

    @settings(max_examples=30, deadline=None)
    @given(arrays(np.float64, (3, 3), elements=finite), st.floats(min_value=0, max_value=2 * math.pi))
    def test_rotation_invariance(self, re, phi):
        """Test w(e^{i phi} M) = w(M)."""
        m = re + 0.5j * re.T
        scale = max(1.0, operator_norm(m))
        assert numerical_radius(np.exp(1j * phi) * m).value == pytest.approx(
            numerical_radius(m).value, abs=1e-9 * scale)

    def test_unitary_invariance(self):
        """Test w(U* M U) = w(M)."""
        m = random_matrix(4, seed=6)
        u, _ = np.linalg.qr(random_matrix(4, seed=7))
        assert numerical_radius(adjoint(u) @ m @ u).value == pytest.approx(numerical_radius(m).value, abs=1e-9)

    def test_spectral_radius_below(self):
        """Test rho(M) <= w(M)."""
        m = random_matrix(5, seed=8)
        rho = np.max(np.abs(np.linalg.eigvals(m)))
        assert rho <= numerical_radius(m).value + 1e-9

    @pytest.mark.parametrize("seed", range(3))
    def test_abs_cap_only_tightens_certificate(self, seed):
        """Test the sweep without the absolute-value cap agrees within both certificates."""
        m = random_matrix(4, seed=seed + 20)
        capped = numerical_radius(m)
        uncapped = numerical_radius(m, abs_cap=False)
        assert abs(capped.value - uncapped.value) <= capped.certified_tolerance + uncapped.certified_tolerance + 1e-12
        assert uncapped.upper >= capped.value - 1e-12

    def test_square_zero_without_abs_cap(self):
        """Test the wedge bounds alone certify the disk of radius 1/2."""
        result = numerical_radius(SQUARE_ZERO, abs_cap=False)
        assert result.value == pytest.approx(0.5, abs=1e-10)
        assert result.certified_tolerance <= 1e-8

    def test_budget_exhaustion_warns(self, caplog):
        """Test an unreachable target within a tiny point budget is logged, not raised."""
        m = random_matrix(4, seed=1)
        with caplog.at_level("WARNING", logger="numrad"):
            result = numerical_radius(m, tol=1e-12, grid=8, max_points=9)
        assert any("point budget" in record.getMessage() for record in caplog.records)
        assert result.certified_tolerance > 0
        assert result.value <= numerical_radius(m).upper + 1e-12


class TestEllipse:
    def test_square_zero(self):
        """Test the ellipse oracle on the square-zero matrix (a disk of radius 1/2)."""
        assert nr_ellipse_2x2(SQUARE_ZERO).value == pytest.approx(0.5, abs=1e-12)

    def test_diagonal(self):
        """Test a degenerate ellipse (a segment) between the eigenvalues."""
        assert nr_ellipse_2x2(np.diag([1.0, -3.0])).value == pytest.approx(3.0, abs=1e-12)

    def test_wrong_dimension(self):
        """Test 3x3 inputs are rejected."""
        with pytest.raises(WrongDimensionError):
            nr_ellipse_2x2(np.eye(3))

    @pytest.mark.parametrize("seed", range(20))
    def test_matches_sweep(self, seed):
        """Test the ellipse oracle agrees with the sweep within 1e-9."""
        m = random_matrix(2, seed=seed)
        assert abs(nr_ellipse_2x2(m).value - numerical_radius(m, tol=1e-12).value) <= 1e-9


class TestRayleigh:
    @pytest.mark.parametrize("seed", range(5))
    def test_below_and_close_to_sweep(self, seed):
        """Test the ascent never exceeds the sweep and lands within 1e-6 of it."""
        m = random_matrix(5, seed=seed)
        sweep = numerical_radius(m, tol=1e-12).value
        ascent = nr_rayleigh(m, restarts=64, seed=seed).value
        assert ascent <= sweep + 1e-9
        assert sweep - ascent <= 1e-6 * max(1.0, operator_norm(m))

    def test_deterministic_across_jobs(self):
        """Test the result does not depend on the number of worker threads."""
        m = random_matrix(4, seed=3)
        serial = nr_rayleigh(m, restarts=8, seed=42, jobs=1)
        threaded = nr_rayleigh(m, restarts=8, seed=42, jobs=4)
        assert serial == threaded

    def test_uncertified(self):
        """Test the ascent reports an infinite certificate."""
        result = nr_rayleigh(np.eye(2), restarts=2)
        assert math.isinf(result.certified_tolerance)
        assert result.to_dict()["certified_tolerance"] is None

    def test_needs_restart(self):
        """Test zero restarts are rejected."""
        with pytest.raises(OutOfRangeError):
            nr_rayleigh(np.eye(2), restarts=0)


class TestRadiusByMethod:
    @pytest.mark.parametrize("method", ["sweep", "ellipse", "rayleigh"])
    def test_square_zero(self, method):
        """Test every method finds w = 1/2 on the square-zero matrix."""
        assert radius_by_method(SQUARE_ZERO, method=method).value == pytest.approx(0.5, abs=1e-6)

    def test_unknown_method(self):
        """Test an unknown method names the valid ones."""
        with pytest.raises(ValueError, match="Must be one of"):
            radius_by_method(np.eye(2), method="power")


class TestReNormAtTheta:
    def test_real_part(self):
        """Test theta = 0 gives the top eigenvalue of Re M."""
        assert re_norm_at_theta(np.diag([2.0, -5.0]), 0.0) == pytest.approx(2.0)

    def test_rotated(self):
        """Test theta = pi flips the sign of the spectrum."""
        assert re_norm_at_theta(np.diag([2.0, -5.0]), math.pi) == pytest.approx(5.0)


class TestSpectralRadiusPsdProduct:
    def test_diagonal(self):
        """Test rho(diag(1, 2) diag(3, 1)) = 3."""
        assert spectral_radius_psd_product(np.diag([1.0, 2.0]), np.diag([3.0, 1.0])) == pytest.approx(3.0)

    def test_matches_eigvals(self):
        """Test agreement with the eigenvalues of BC."""
        g, h = random_matrix(4, seed=1), random_matrix(4, seed=2)
        b, c = g @ adjoint(g), h @ adjoint(h)
        expected = np.max(np.abs(np.linalg.eigvals(b @ c)))
        assert spectral_radius_psd_product(b, c) == pytest.approx(expected, rel=1e-9)

    def test_not_psd(self):
        """Test an indefinite factor is rejected."""
        with pytest.raises(NotPSDError):
            spectral_radius_psd_product(np.diag([1.0, -1.0]), np.eye(2))


class TestBlockIdentities:
    @pytest.mark.parametrize("seed", range(3))
    def test_random_blocks(self, seed):
        """Test all three block identities on random blocks."""
        a, b, d = (random_matrix(3, seed=seed * 3 + k) for k in range(3))
        report = check_block_identities(BlockMatrix2x2(a, b, np.zeros_like(a), d))
        assert report.all_ok, report.to_dict()


class TestLemmaChecks:
    def test_jensen(self):
        """Test phi(<Hx, x>) <= <phi(H)x, x> for phi = t^2."""
        result = check_jensen(np.diag([1.0, 3.0]), unit([1, 1]), lambda t: np.power(t, 2))
        assert result.lhs == pytest.approx(4.0)
        assert result.rhs == pytest.approx(5.0)
        assert result.holds and result.slack == pytest.approx(1.0)

    def test_jensen_with_gauge(self):
        """Test Jensen with an exponential gauge on a random PSD matrix."""
        g = random_matrix(4, seed=5)
        h = g @ adjoint(g) / 10
        assert check_jensen(h, unit(np.arange(1, 5)), ExpM1Gauge(1.0)).holds

    def test_jensen_requires_unit_vector(self):
        """Test a non-unit vector is rejected."""
        with pytest.raises(NotUnitError):
            check_jensen(np.eye(2), np.array([1.0, 1.0]), np.sqrt)

    def test_jensen_requires_psd(self):
        """Test an indefinite matrix is rejected."""
        with pytest.raises(NotPSDError):
            check_jensen(np.diag([1.0, -1.0]), unit([1, 0]), np.sqrt)

    @pytest.mark.parametrize("alpha", [0.0, 0.3, 0.5, 1.0])
    def test_mixed_cauchy_schwarz(self, alpha):
        """Test the mixed Cauchy-Schwarz inequality for several factor pairs."""
        rng = np.random.default_rng(4)
        m = random_matrix(4, seed=9)
        x = unit(rng.standard_normal(4) + 1j * rng.standard_normal(4))
        y = unit(rng.standard_normal(4) + 1j * rng.standard_normal(4))
        assert check_mixed_cs(m, x, y, FactorPair(alpha)).holds

    def test_gauge_mean(self):
        """Test h(||(A+B)/2||) <= ||(h(A)+h(B))/2|| for h = t^2."""
        result = check_gauge_mean(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]), PowerGauge(2.0))
        assert result.lhs == pytest.approx(0.25)
        assert result.rhs == pytest.approx(0.5)
        assert result.holds
