import math

import numpy as np
import pytest

from abscatter.abwave import (
    ABWaveSpec,
    ab_wave_window,
    asymptotic_decay_check,
    azimuth,
    eval_ab_wave,
    eval_ab_wave_grid,
    load_wave_csv,
    pde_residual,
    save_wave_csv,
)
from abscatter.errors import DomainError, PrecisionError


class TestAzimuth:
    def test_zero_angle_to_itself(self):
        assert azimuth((1.0, 0.0), (1.0, 0.0)) == 0.0

    def test_quarter_turn(self):
        assert abs(azimuth((0.0, 1.0), (1.0, 0.0)) - math.pi / 2) < 1e-15

    def test_antipodal(self):
        assert abs(azimuth((-1.0, 0.0), (1.0, 0.0)) - math.pi) < 1e-15

    def test_range_and_orientation(self, rng):
        for _ in range(100):
            ang = rng.uniform(0, 2 * math.pi, 2)
            x = np.array([math.cos(ang[0]), math.sin(ang[0])]) * rng.uniform(0.1, 5.0)
            w = np.array([math.cos(ang[1]), math.sin(ang[1])])
            g = azimuth(x, w)
            assert 0.0 <= g < 2 * math.pi
            assert abs((ang[0] - ang[1]) % (2 * math.pi) - g) < 1e-12

    def test_origin_rejected(self):
        with pytest.raises(DomainError):
            azimuth((0.0, 0.0), (1.0, 0.0))


class TestSpec:
    def test_invariants(self):
        with pytest.raises(DomainError):
            ABWaveSpec(alpha=0.0, lam=0.0, omega=(1, 0))
        with pytest.raises(DomainError):
            ABWaveSpec(alpha=0.0, lam=1.0, omega=(1.0, 0.1))
        with pytest.raises(DomainError):
            ABWaveSpec(alpha=0.0, lam=1.0, omega=(1, 0), sign=2)

    def test_truncation_policy(self):
        spec = ABWaveSpec.for_radius(0.3, 4.0, (1.0, 0.0), 1, 10.0)
        assert spec.truncation == math.ceil(2.0 * 10.0) + 40
        with pytest.raises(PrecisionError):
            eval_ab_wave(spec, (11.0, 0.0))


class TestWaveValues:
    def test_plane_wave_reduction(self):
        # at zero flux the series is the Jacobi-Anger expansion of exp(i*w.x)
        spec = ABWaveSpec(alpha=0.0, lam=1.0, omega=(1.0, 0.0), sign=1, truncation=60)
        v = eval_ab_wave(spec, (2.0, 0.0))
        assert abs(v - np.exp(2.0j)) <= 1e-8

    def test_plane_wave_reduction_both_signs(self, rng):
        pts = rng.uniform(-7, 7, size=(100, 2))
        for sign in (1, -1):
            spec = ABWaveSpec(alpha=0.0, lam=1.0, omega=(0.6, 0.8), sign=sign, truncation=60)
            vals = eval_ab_wave_grid(spec, pts)
            plane = np.exp(1j * (pts @ np.array([0.6, 0.8])))
            assert np.max(np.abs(vals - plane)) <= 1e-8

    def test_vanishes_at_origin_for_fractional_flux(self):
        spec = ABWaveSpec(alpha=0.5, lam=3.0, omega=(0.0, 1.0), sign=1, truncation=50)
        assert eval_ab_wave(spec, (0.0, 0.0)) == 0.0

    def test_truncation_self_consistency(self):
        s1 = ABWaveSpec(alpha=0.3, lam=1.0, omega=(1, 0), sign=1, truncation=44)
        s2 = ABWaveSpec(alpha=0.3, lam=1.0, omega=(1, 0), sign=1, truncation=176)
        a = eval_ab_wave(s1, (3.0, 1.0))
        b = eval_ab_wave(s2, (3.0, 1.0))
        assert abs(a - b) <= 1e-8

    def test_doubling_changes_little_inside_policy_radius(self, rng):
        spec = ABWaveSpec.for_radius(1.2, 2.0, (1.0, 0.0), -1, 4.0)
        spec2 = ABWaveSpec(alpha=1.2, lam=2.0, omega=(1.0, 0.0), sign=-1,
                           truncation=2 * spec.truncation)
        pts = rng.uniform(-2.8, 2.8, size=(50, 2))
        d = np.abs(eval_ab_wave_grid(spec, pts) - eval_ab_wave_grid(spec2, pts))
        assert np.max(d) < 1e-8

    def test_flux_shift_reindexes_modes(self, rng):
        # the series at alpha+2 equals exp(2i*gamma) times the series at
        # alpha with the mode window shifted by 2
        for _ in range(20):
            alpha = rng.uniform(-1.5, 1.5)
            x = rng.uniform(-4, 4, 2)
            if np.hypot(*x) < 0.2:
                continue
            sa = ABWaveSpec(alpha=alpha, lam=1.5, omega=(1.0, 0.0), sign=1, truncation=60)
            sa2 = ABWaveSpec(alpha=alpha + 2.0, lam=1.5, omega=(1.0, 0.0), sign=1, truncation=60)
            g = azimuth(x, (1.0, 0.0))
            lhs = ab_wave_window(sa2, x, -40, 44)
            rhs = np.exp(2j * g) * ab_wave_window(sa, x, -42, 42)
            assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


class TestBoundedness:
    @pytest.mark.parametrize("alpha,lam", [(-2.0, 1.0), (-0.5, 0.5), (0.7, 1.0),
                                           (1.5, 4.0), (2.0, 0.5)])
    def test_bounded_on_grid(self, alpha, lam):
        axis = np.linspace(-5.0, 5.0, 200)
        xx, yy = np.meshgrid(axis, axis, indexing="ij")
        pts = np.stack([xx.ravel(), yy.ravel()], axis=1)
        pts = pts[np.hypot(pts[:, 0], pts[:, 1]) > 1e-9]
        spec = ABWaveSpec.for_radius(alpha, lam, (1.0, 0.0), 1, 5.0 * math.sqrt(2.0) + 0.1)
        vals = eval_ab_wave_grid(spec, pts)
        assert float(np.max(np.abs(vals))) <= 10.0


class TestPdeResidual:
    def test_residual_shrinks_on_mesh_halving(self, rng):
        spec = ABWaveSpec.for_radius(0.5, 1.0, (1.0, 0.0), 1, 5.3)
        th = rng.uniform(0, 2 * math.pi, 60)
        rr = rng.uniform(1.0, 5.0, 60)
        pts = np.stack([rr * np.cos(th), rr * np.sin(th)], axis=1)
        r_coarse = pde_residual(spec, pts, 0.02)
        r_fine = pde_residual(spec, pts, 0.01)
        ratio = r_coarse / r_fine
        assert float(np.min(ratio)) >= 3.5


class TestDecay:
    def test_zero_flux_is_exact(self):
        spec = ABWaveSpec.for_radius(0.0, 1.0, (1.0, 0.0), 1, 210.0)
        out = asymptotic_decay_check(spec, (0.0, 1.0), np.linspace(20, 200, 10))
        assert out.exact and out.slope is None
        assert float(np.max(out.residuals)) < 1e-8

    def test_fractional_flux_decay_rate(self):
        spec = ABWaveSpec.for_radius(0.5, 1.0, (1.0, 0.0), 1, 210.0)
        out = asymptotic_decay_check(spec, (0.0, 1.0), np.linspace(20, 200, 13))
        assert not out.exact
        assert out.slope is not None and out.slope <= -1.2

    def test_forward_cone_rejected(self):
        spec = ABWaveSpec.for_radius(0.5, 1.0, (1.0, 0.0), 1, 210.0)
        with pytest.raises(DomainError):
            asymptotic_decay_check(spec, (-1.0, 0.0), np.linspace(20, 200, 5))


def test_wave_csv_round_trip(tmp_path, rng):
    spec = ABWaveSpec(alpha=0.4, lam=1.0, omega=(1.0, 0.0), sign=1, truncation=50)
    pts = rng.uniform(-3, 3, size=(17, 2))
    vals = eval_ab_wave_grid(spec, pts)
    path = tmp_path / "wave.csv"
    save_wave_csv(path, pts, vals)
    pts2, vals2 = load_wave_csv(path)
    assert np.array_equal(pts, pts2)
    assert np.array_equal(vals, vals2)
