import json
from pathlib import Path

import pytest

from errors import ScenarioError
from models import ModelFamily, ProfileKind
from scenario import CSV_COLUMNS, load_scan, load_scenario, parse_scan, parse_scenario, schema_document

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def _scenario(**overrides):
    data = {
        'name': "unit",
        'model': {'family': "log_nlse", 'gamma': 0.5, 'omega': {'kind': "constant", 'value': 1.0}},
        'initial': {'eta': 1.0, 'c': {'re': 0.0, 'im': 1.0}},
        'run': {'t_end': 1.0, 'dt': 0.1},
    }
    data.update(overrides)
    return data


def _path_of(data) -> str:
    with pytest.raises(ScenarioError) as info:
        parse_scenario(data)
    return info.value.field_path


class TestScenario:
    def test_defaults(self):
        scenario = parse_scenario(_scenario())
        assert scenario.output.columns == CSV_COLUMNS
        assert scenario.run.error_control is True
        assert scenario.coherent_state is None
        model = scenario.to_model()
        assert model.family is ModelFamily.LOG_NLSE
        assert model.constants.mass == 1.0

    def test_initial_width_from_alpha(self):
        scenario = parse_scenario(_scenario(
            model={'family': "log_nlse", 'gamma': 1.0, 'omega': {'kind': "constant", 'value': 1.0}},
            initial={'alpha': 1.0, 'alpha_dot': 0.0},
        ))
        state = scenario.initial_state()
        assert state.riccati.c == pytest.approx(-0.5 + 1j)

    def test_columns_keep_fixed_order(self):
        scenario = parse_scenario(_scenario(output={'columns': ["I", "eta"]}))
        assert scenario.output.columns == ['t', 'eta', 'I']

    def test_unknown_column(self):
        assert _path_of(_scenario(output={'columns': ["entropy"]})) == "output.columns"

    def test_malformed_piecewise_table(self):
        bad = {'family': "conservative", 'omega': {'kind': "piecewise", 'breakpoints': [1.0, 2.0], 'values': [1.0]}}
        assert _path_of(_scenario(model=bad)).startswith("model.omega")

    def test_omega_kind_required(self):
        assert _path_of(_scenario(model={'family': "conservative", 'omega': {'value': 1.0}})).startswith("model.omega")

    def test_unknown_field(self):
        run = {'t_end': 1.0, 'dt': 0.1, 'method': "euler"}
        assert _path_of(_scenario(run=run)) == "run.method"

    def test_nonpositive_dt(self):
        assert _path_of(_scenario(run={'t_end': 1.0, 'dt': 0.0})) == "run.dt"

    def test_conservative_needs_zero_gamma(self):
        model = {'family': "conservative", 'gamma': 0.2, 'omega': {'kind': "constant", 'value': 1.0}}
        assert _path_of(_scenario(model=model)) == "model"

    @pytest.mark.parametrize("initial", [
        {'c': {'re': 0.0, 'im': 1.0}, 'alpha': 1.0, 'alpha_dot': 0.0},
        {'alpha': 1.0},
        {'c': {'re': 0.0, 'im': -1.0}},
        {'eta': 1.0},
    ])
    def test_width_specification(self, initial):
        assert _path_of(_scenario(initial=initial)) == "initial"

    def test_run_must_end_after_start(self):
        data = _scenario(initial={'t0': 2.0, 'c': {'re': 0.0, 'im': 1.0}})
        assert _path_of(data) == "<root>"

    def test_shipped_scenarios_load(self):
        golden = load_scenario(SCENARIOS / "conservative_golden.json")
        assert golden.coherent_state.n_max == 40
        piecewise = load_scenario(SCENARIOS / "piecewise_frequency.json")
        assert piecewise.to_model().omega.kind is ProfileKind.PIECEWISE
        assert load_scenario(SCENARIOS / "lognlse_damped.json").model.gamma == 0.5

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{\"name\": ")
        with pytest.raises(ScenarioError) as info:
            load_scenario(path)
        assert info.value.field_path == "<root>"
        assert info.value.source == str(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_scenario(tmp_path / "absent.json")


class TestScanSpec:
    def test_w0_values(self):
        spec = parse_scan({'omega': [1.0], 'gamma': [0.5], 'w0': ["inf", {'re': 1.0, 'im': -1.0}]})
        values = spec.w0_values()
        assert values[0].real == float('inf')
        assert values[1] == 1 - 1j
        assert spec.family == "log_nlse"

    def test_conservative_scan_needs_zero_gamma(self):
        with pytest.raises(ScenarioError) as info:
            parse_scan({'family': "conservative", 'omega': [1.0], 'gamma': [0.5]})
        assert info.value.field_path == "<root>"

    def test_negative_grid_value(self):
        with pytest.raises(ScenarioError) as info:
            parse_scan({'omega': [1.0, -1.0], 'gamma': [0.5]})
        assert info.value.field_path == "omega"

    def test_ck_scans_rejected(self):
        with pytest.raises(ScenarioError) as info:
            parse_scan({'family': "caldirola_kanai", 'omega': [1.0], 'gamma': [0.5]})
        assert info.value.field_path == "family"

    def test_shipped_scan_loads(self):
        spec = load_scan(SCENARIOS / "branch_scan.json")
        assert len(spec.omega) * len(spec.gamma) * len(spec.w0) == 18


def test_schema_document_is_json():
    document = schema_document()
    assert set(document) == {'scenario', 'scan'}
    json.dumps(document)
