import math

import pytest
from hypothesis import given, strategies as st

from gmisim.core import (
    C_LIGHT,
    CarrierParams,
    FrequencySweep,
    MirrorParams,
    ValidationError,
    degrees_to_roundtrip_phase,
    mirror_from_loss,
    normalize_phase,
    validate_mirror,
)


class TestNormalizePhase:
    def test_identity(self):
        assert normalize_phase(0.0) == 0.0

    def test_three_pi(self):
        assert normalize_phase(3 * math.pi) == pytest.approx(math.pi, abs=1e-12)

    def test_negative_three_half_pi(self):
        assert normalize_phase(-1.5 * math.pi) == pytest.approx(0.5 * math.pi, abs=1e-12)

    def test_half_open_interval(self):
        assert normalize_phase(-math.pi) == pytest.approx(math.pi)
        assert normalize_phase(math.pi) == pytest.approx(math.pi)

    def test_non_finite_rejected(self):
        with pytest.raises(ValidationError):
            normalize_phase(float("nan"))
        with pytest.raises(ValidationError):
            normalize_phase(float("inf"))

    @given(st.floats(-50.0, 50.0), st.integers(-5, 5))
    def test_periodic_and_idempotent(self, x, n):
        base = normalize_phase(x)
        assert normalize_phase(x + 2 * math.pi * n) == pytest.approx(base, abs=1e-12)
        assert normalize_phase(base) == pytest.approx(base, abs=1e-15)
        assert -math.pi < base <= math.pi


class TestDegrees:
    def test_bias_quote(self):
        assert degrees_to_roundtrip_phase(0.06) == pytest.approx(1.0471975512e-3, abs=1e-12)

    def test_half_turn(self):
        assert degrees_to_roundtrip_phase(180.0) == math.pi

    def test_zero(self):
        assert degrees_to_roundtrip_phase(0.0) == 0.0

    def test_roundtrip_with_radians_exactness(self):
        for deg in (0.001, 0.02, 0.06, 12.0, 359.0):
            rad = degrees_to_roundtrip_phase(deg)
            assert rad / deg == pytest.approx(math.pi / 180.0, rel=1e-15)


class TestMirror:
    def test_perfect(self):
        m = validate_mirror(1.0, 0.0, 0.0)
        assert m.r == 1.0

    def test_aligo_coating(self):
        m = validate_mirror(0.99998, 15e-6, 5e-6)
        assert m.t == pytest.approx(math.sqrt(15e-6))

    def test_budget_violation(self):
        with pytest.raises(ValidationError, match="residual"):
            validate_mirror(0.5, 0.5, 0.1)

    def test_from_loss(self):
        m = mirror_from_loss(transmittance=0.014, loss=1e-8)
        assert m.reflectance + m.transmittance + m.loss == pytest.approx(1.0, abs=1e-15)

    @given(st.floats(0.0, 1.0), st.floats(0.0, 0.5))
    def test_amplitude_budget(self, reflectance, loss):
        t = 1.0 - reflectance - loss
        if t < 0.0:
            return
        m = MirrorParams(reflectance, t, loss)
        assert m.r**2 + m.transmittance + m.loss == pytest.approx(1.0, abs=1e-12)


class TestCarrier:
    def test_dispersion_identity(self):
        c = CarrierParams(wavelength=1.064e-6, power=125.0)
        assert c.omega0 * c.wavelength == pytest.approx(2 * math.pi * C_LIGHT, rel=1e-12)
        # round-trip phase construction: phi/(2 L) = k0 exactly
        length = 4000.0
        assert (2 * c.k0 * length) / (2 * length) == c.k0

    def test_rejects_nonpositive_wavelength(self):
        with pytest.raises(ValidationError):
            CarrierParams(wavelength=0.0)


class TestSweep:
    def test_grid_monotone(self):
        for spacing in ("log", "linear"):
            g = FrequencySweep(1.0, 1e4, 50, spacing).grid()
            assert len(g) == 50
            assert (g[1:] > g[:-1]).all()

    def test_extra_frequencies_merged(self):
        g = FrequencySweep(1.0, 1e5, 10, "log", extra=(37474.05725,)).grid()
        assert 37474.05725 in g

    def test_invalid(self):
        with pytest.raises(ValidationError):
            FrequencySweep(0.0, 10.0, 10)
        with pytest.raises(ValidationError):
            FrequencySweep(10.0, 1.0, 10)
        with pytest.raises(ValidationError):
            FrequencySweep(1.0, 10.0, 1)
