import logging

import numpy as np
import pytest

import config
from config import Settings, get_settings, setup_logging
from errors import (
    AccuracyError,
    ConfigurationError,
    DegenerateWidthError,
    FamilyPoleError,
    ModelError,
    ProfileDomainError,
    ProfileError,
    RepresentationMismatchError,
    ScenarioError,
    WidthCollapseError,
    exit_code_for,
)
from models import (
    ClassicalState,
    ErmakovState,
    FrequencyProfile,
    Model,
    ModelFamily,
    PhysicalConstants,
    RepresentationTag,
    RiccatiVar,
    TimeSeries,
)


class TestFrequencyProfile:
    def test_piecewise_is_right_continuous(self):
        omega = FrequencyProfile.piecewise([5.0], [1.0, 2.0])
        assert omega(4.999) == 1.0
        assert omega(5.0) == 2.0
        assert omega.discontinuities == (5.0,)

    def test_piecewise_shape_is_checked(self):
        with pytest.raises(ProfileError):
            FrequencyProfile.piecewise([5.0], [1.0])
        with pytest.raises(ProfileError):
            FrequencyProfile.piecewise([5.0, 4.0], [1.0, 2.0, 3.0])

    def test_sampled_interpolates_inside_grid(self):
        omega = FrequencyProfile.sampled([0.0, 1.0, 2.0], [1.0, 3.0, 3.0])
        assert omega(0.5) == pytest.approx(2.0)
        assert omega(2.0) == pytest.approx(3.0)

    def test_sampled_outside_grid_raises(self):
        omega = FrequencyProfile.sampled([0.0, 1.0], [1.0, 1.0])
        with pytest.raises(ProfileDomainError) as info:
            omega(1.5)
        assert info.value.time == 1.5

    def test_dict_round_trip(self):
        omega = FrequencyProfile.piecewise([1.0, 2.0], [1.0, 0.5, 2.0])
        assert FrequencyProfile.from_dict(omega.to_dict()) == omega


class TestModel:
    def test_conservative_rejects_damping(self):
        with pytest.raises(ModelError):
            Model(ModelFamily.CONSERVATIVE, gamma=0.1)

    def test_negative_gamma_rejected(self):
        with pytest.raises(ModelError):
            Model(ModelFamily.LOG_NLSE, gamma=-1.0)

    def test_constants_must_be_positive(self):
        with pytest.raises(ModelError):
            PhysicalConstants(mass=0.0)
        with pytest.raises(ModelError):
            PhysicalConstants(hbar=float('nan'))

    def test_shifted_frequency(self, make_model):
        model = make_model(ModelFamily.EXPANDING, omega=1.0, gamma=1.0)
        assert model.big_omega_squared(0.0) == pytest.approx(0.75)

    def test_tag_follows_family(self, make_model):
        assert make_model(ModelFamily.LOG_NLSE, gamma=0.5).tag is RepresentationTag.PHYSICAL_NL
        assert make_model(ModelFamily.CALDIROLA_KANAI, gamma=0.5).tag is RepresentationTag.CANONICAL_CK
        assert make_model(ModelFamily.EXPANDING, gamma=0.5).tag is RepresentationTag.CANONICAL_EXPANDING

    def test_dict_round_trip(self, make_model):
        model = make_model(ModelFamily.LOG_NLSE, omega=2.0, gamma=0.3, constants=PhysicalConstants(2.0, 0.5))
        assert Model.from_dict(model.to_dict()) == model


class TestStates:
    def test_degenerate_width(self):
        with pytest.raises(DegenerateWidthError):
            ErmakovState(0.0, 1.0)

    def test_tags_do_not_mix(self):
        physical = RiccatiVar(1j)
        canonical = RiccatiVar(1j, RepresentationTag.CANONICAL_CK)
        assert physical - RiccatiVar(0.5j) == 0.5j
        with pytest.raises(RepresentationMismatchError):
            physical - canonical
        with pytest.raises(RepresentationMismatchError):
            ClassicalState(0, 0) - ClassicalState(0, 0, RepresentationTag.CANONICAL_EXPANDING)

    def test_timeseries_views(self, make_model):
        model = make_model(ModelFamily.CONSERVATIVE)
        run = TimeSeries(model, np.array([0.0, 1.0]), np.zeros(2), np.zeros(2),
                         np.array([4j, 1j]), np.zeros(2), dt=1.0)
        assert len(run) == 2
        assert run.final.alpha == pytest.approx(1.0)
        assert run.alpha[0] == pytest.approx(0.5)

    def test_timeseries_requires_increasing_times(self, make_model):
        model = make_model(ModelFamily.CONSERVATIVE)
        with pytest.raises(ValueError):
            TimeSeries(model, np.array([1.0, 0.0]), np.zeros(2), np.zeros(2), np.ones(2) * 1j, np.zeros(2), dt=1.0)


class TestSettings:
    def test_defaults(self, monkeypatch):
        for name in ("WAVEPACKET_LOG_LEVEL", "WAVEPACKET_WIDTH_EPSILON", "WAVEPACKET_OUTPUT_STRIDE"):
            monkeypatch.delenv(name, raising=False)
        settings = Settings.from_env()
        assert settings.width_epsilon == 1e-12
        assert settings.step_tolerance == 1e-6
        assert settings.output_stride == 10

    def test_values_from_environment(self, monkeypatch):
        monkeypatch.setenv("WAVEPACKET_LOG_LEVEL", "debug")
        monkeypatch.setenv("WAVEPACKET_SCAN_WORKERS", "2")
        settings = Settings.from_env()
        assert settings.log_level == "DEBUG"
        assert settings.scan_workers == 2

    @pytest.mark.parametrize("name,value", [
        ("WAVEPACKET_WIDTH_EPSILON", "tiny"),
        ("WAVEPACKET_STEP_TOLERANCE", "-1"),
        ("WAVEPACKET_OUTPUT_STRIDE", "0"),
        ("WAVEPACKET_LOG_LEVEL", "LOUD"),
    ])
    def test_malformed_values(self, monkeypatch, name, value):
        monkeypatch.setenv(name, value)
        with pytest.raises(ConfigurationError) as info:
            Settings.from_env()
        assert info.value.variable == name

    def test_get_settings_is_cached(self):
        get_settings.cache_clear()
        assert get_settings() is get_settings()
        get_settings.cache_clear()

    def test_setup_logging_with_file(self, tmp_path):
        log_file = tmp_path / "run.log"
        setup_logging(Settings(log_level="WARNING", log_file=str(log_file)))
        logging.getLogger("wavepacket.test").warning("[TEST] written")
        root = logging.getLogger()
        for handler in list(root.handlers):
            handler.flush()
            if isinstance(handler, logging.FileHandler):
                root.removeHandler(handler)
                handler.close()
        assert "[TEST] written" in log_file.read_text()
        assert config.LOG_FORMAT.startswith('%(asctime)s')


@pytest.mark.parametrize("exc,code", [
    (ScenarioError("model.omega", "bad"), 2),
    (ProfileError("misaligned"), 2),
    (ModelError("bad"), 2),
    (ConfigurationError("X", "y", "bad"), 2),
    (WidthCollapseError(1.0, 1e-13j, 1e-12), 3),
    (AccuracyError(1.0, 1e-3, 1e-6, 0.01), 3),
    (FileNotFoundError("missing.json"), 4),
    (FamilyPoleError(1.0), 1),
])
def test_exit_codes(exc, code):
    assert exit_code_for(exc) == code


def test_scenario_error_starts_with_field_path():
    error = ScenarioError("model.omega.values", "too short", "golden.json")
    assert str(error).startswith("model.omega.values: ")
