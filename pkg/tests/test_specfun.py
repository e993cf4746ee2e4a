import math

import mpmath as mp
import numpy as np
import pytest

from abscatter.errors import DomainError
from abscatter.specfun import bessel_j, bessel_j_ladder, gamma, log_gamma


def series_oracle(nu: float, x: float, terms: int = 60) -> float:
    """Ascending power series summed in 50-digit arithmetic.

    Float64 summation of the same series would carry up to ~1e-8 roundoff at
    x = 20 (the alternating terms reach ~1e7), which would swamp the 1e-10
    comparison below; high-precision evaluation keeps the oracle itself exact
    to far below the tolerance while staying the same 60-term series.
    """
    with mp.workdps(50):
        nu_ = mp.mpf(nu)
        half = mp.mpf(x) / 2
        total = mp.mpf(0)
        for k in range(terms):
            total += (-1) ** k * half ** (nu_ + 2 * k) / (mp.factorial(k) * mp.gamma(nu_ + k + 1))
        return float(total)


class TestGamma:
    def test_matches_stdlib_to_1e12(self):
        zs = np.linspace(0.05, 170.0, 2000)
        rel = [abs(gamma(z) - math.gamma(z)) / math.gamma(z) for z in zs]
        assert max(rel) <= 1e-12

    def test_log_gamma_large_arguments(self):
        for z in (250.0, 400.0, 1000.0):
            assert abs(log_gamma(z) - math.lgamma(z)) <= 1e-12 * abs(math.lgamma(z))

    def test_rejects_nonpositive(self):
        with pytest.raises(DomainError):
            log_gamma(0.0)


class TestBesselValues:
    def test_j0_at_zero(self):
        assert bessel_j(0.0, 0.0) == 1.0

    def test_fractional_order_at_zero(self):
        assert bessel_j(2.3, 0.0) == 0.0

    def test_half_order_closed_form(self):
        # J_{1/2}(x) = sqrt(2/(pi*x)) * sin(x); at x = pi/2 this is 2/pi
        x = math.pi / 2
        assert abs(bessel_j(0.5, x) - 2.0 / math.pi) <= 1e-10
        assert abs(bessel_j(0.5, x) - series_oracle(0.5, x)) <= 1e-10

    def test_j1_at_one(self):
        expected = 0.4400505857449335  # frozen from the 60-term series oracle
        assert abs(series_oracle(1.0, 1.0) - expected) <= 1e-15
        assert abs(bessel_j(1.0, 1.0) - expected) <= 1e-10

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            bessel_j(-0.1, 1.0)
        with pytest.raises(DomainError):
            bessel_j(1.0, -1.0)
        with pytest.raises(DomainError):
            bessel_j(1.0, 2.0e4)


class TestBesselProperties:
    def test_series_oracle_equivalence(self, rng):
        pts = rng.uniform([0.0, 0.0], [10.0, 20.0], size=(200, 2))
        for nu, x in pts:
            assert abs(bessel_j(nu, x) - series_oracle(nu, x)) <= 1e-10

    def test_recurrence_residual(self, rng):
        for _ in range(300):
            nu = rng.uniform(1.0, 20.0)
            x = rng.uniform(0.5, 50.0)
            res = bessel_j(nu - 1, x) + bessel_j(nu + 1, x) - (2 * nu / x) * bessel_j(nu, x)
            assert abs(res) <= 1e-8

    def test_magnitude_bound(self, rng):
        for _ in range(400):
            nu = rng.uniform(0.0, 200.0)
            x = rng.uniform(0.0, 500.0)
            assert abs(bessel_j(nu, x)) <= 1.0

    def test_accuracy_over_declared_window(self, rng):
        # spot-check the large-order/large-argument corner against the oracle
        for nu, x in [(150.0, 300.0), (200.0, 500.0), (80.0, 100.0), (40.0, 450.0)]:
            with mp.workdps(60):
                ref = float(mp.besselj(mp.mpf(nu), mp.mpf(x)))
            assert abs(bessel_j(nu, x) - ref) <= 1e-10


class TestLadder:
    def test_matches_scalar_calls(self):
        for x in (0.3, 7.0, 25.0, 300.0):
            lad = bessel_j_ladder(0.25, 40, x)
            for k in (0, 1, 7, 39):
                assert abs(lad[k] - bessel_j(0.25 + k, x)) <= 1e-12

    def test_vector_arguments(self):
        xs = np.array([0.0, 1.0, 15.0, 120.0])
        lad = bessel_j_ladder(0.0, 5, xs)
        assert lad.shape == (5, 4)
        assert lad[0, 0] == 1.0 and lad[3, 0] == 0.0
        for j, x in enumerate(xs[1:], start=1):
            assert abs(lad[2, j] - bessel_j(2.0, x)) <= 1e-12

    def test_rejects_bad_input(self):
        with pytest.raises(DomainError):
            bessel_j_ladder(-0.5, 3, 1.0)
        with pytest.raises(DomainError):
            bessel_j_ladder(0.5, 0, 1.0)
