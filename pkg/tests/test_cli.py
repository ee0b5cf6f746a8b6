import csv
import json
from pathlib import Path

import pytest

import main
from config import Settings
from scan import SCAN_COLUMNS
from scenario import CSV_COLUMNS

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


@pytest.fixture(autouse=True)
def quiet_logging(monkeypatch):
    # setup_logging forces a fresh root configuration, which would drop caplog's handler
    monkeypatch.setattr(main, 'setup_logging', lambda settings=None: None)


def _write(tmp_path, name, data):
    path = tmp_path / f"{name}.json"
    path.write_text(json.dumps(data))
    return path


def _lognlse(name, gamma=0.5, t_end=5.0, dt=1e-3):
    return {
        'name': name,
        'model': {'family': "log_nlse", 'gamma': gamma, 'omega': {'kind': "constant", 'value': 1.0}},
        'initial': {'eta': 1.0, 'eta_dot': 0.5, 'c': {'re': 0.4, 'im': 1.3}},
        'run': {'t_end': t_end, 'dt': dt, 'stride': 10, 'error_control': False},
    }


class TestRun:
    def test_golden_scenario(self, tmp_path):
        assert main.main(['run', str(SCENARIOS / "conservative_golden.json"), '--out', str(tmp_path)]) == 0
        raw = (tmp_path / "conservative_golden.csv").read_bytes().decode('utf-8')
        lines = raw.split('\r\n')
        assert lines[0].split(',') == CSV_COLUMNS
        assert lines[-1] == ""
        assert len(lines) - 2 == 101
        report = json.loads((tmp_path / "conservative_golden_report.json").read_text())
        assert report['invariant_drift'] < 1e-9
        assert report['coherent_state']['norm_quadrature'] == pytest.approx(1.0, abs=1e-10)
        assert report['coherent_state']['series_max_error'] < 1e-8

    def test_golden_csv_is_reproducible(self, tmp_path):
        first, second = tmp_path / "first", tmp_path / "second"
        for out in (first, second):
            assert main.main(['run', str(SCENARIOS / "conservative_golden.json"), '--out', str(out)]) == 0
        assert (first / "conservative_golden.csv").read_bytes() == (second / "conservative_golden.csv").read_bytes()

    def test_eigenvalue_fields_follow_report_z(self, tmp_path):
        data = json.loads((SCENARIOS / "conservative_golden.json").read_text())
        data['name'] = "quiet"
        data['coherent_state']['report_z'] = False
        assert main.main(['run', str(_write(tmp_path, "quiet", data)), '--out', str(tmp_path)]) == 0
        quiet = json.loads((tmp_path / "quiet_report.json").read_text())['coherent_state']
        assert 'z' not in quiet and 'abs_z_squared' not in quiet
        assert quiet['norm_quadrature'] == pytest.approx(1.0, abs=1e-10)

        assert main.main(['run', str(SCENARIOS / "conservative_golden.json"), '--out', str(tmp_path)]) == 0
        full = json.loads((tmp_path / "conservative_golden_report.json").read_text())['coherent_state']
        # |z|^2 = (m/hbar) I = 1/2 on the unit orbit
        assert full['abs_z_squared'] == pytest.approx(0.5, abs=1e-8)

    def test_damped_scenario(self, tmp_path):
        assert main.main(['run', str(SCENARIOS / "lognlse_damped.json"), '--out', str(tmp_path)]) == 0
        report = json.loads((tmp_path / "lognlse_damped_report.json").read_text())
        assert report['family'] == "log_nlse"
        assert report['invariant_drift'] < 1e-6
        assert report['sr_residual_max'] < 1e-12

    def test_ck_report_has_canonical_product(self, tmp_path):
        data = _lognlse("ck", t_end=2.0, dt=1e-2)
        data['model']['family'] = "caldirola_kanai"
        assert main.main(['run', str(_write(tmp_path, "ck", data)), '--out', str(tmp_path)]) == 0
        assert 'u_ck_min' in json.loads((tmp_path / "ck_report.json").read_text())

    def test_custom_columns(self, tmp_path):
        data = _lognlse("narrow", t_end=1.0, dt=1e-2)
        data['output'] = {'columns': ["I", "eta"]}
        assert main.main(['run', str(_write(tmp_path, "narrow", data)), '--out', str(tmp_path)]) == 0
        with (tmp_path / "narrow.csv").open(newline='') as handle:
            header = next(csv.reader(handle))
        assert header == ['t', 'eta', 'I']

    def test_malformed_scenario(self, tmp_path, caplog):
        data = _lognlse("bad")
        data['model']['omega'] = {'kind': "piecewise", 'breakpoints': [1.0], 'values': [1.0]}
        assert main.main(['run', str(_write(tmp_path, "bad", data)), '--out', str(tmp_path)]) == 2
        assert "model.omega" in caplog.text
        assert not (tmp_path / "bad.csv").exists()

    def test_missing_file(self, tmp_path):
        assert main.main(['run', str(tmp_path / "absent.json")]) == 4

    def test_integration_failure(self, tmp_path):
        data = {
            'name': "coarse",
            'model': {'family': "conservative", 'omega': {'kind': "constant", 'value': 1.0}},
            'initial': {'eta': 1.0, 'c': {'re': 0.0, 'im': 4.0}},
            'run': {'t_end': 5.0, 'dt': 0.5},
        }
        assert main.main(['run', str(_write(tmp_path, "coarse", data)), '--out', str(tmp_path)]) == 3


class TestScan:
    def test_shipped_scan(self, tmp_path):
        assert main.main(['scan', str(SCENARIOS / "branch_scan.json"), '--out', str(tmp_path)]) == 0
        with (tmp_path / "branch_scan_branches.csv").open(newline='') as handle:
            rows = list(csv.DictReader(handle))
        assert list(rows[0]) == SCAN_COLUMNS
        assert [int(row['index']) for row in rows] == list(range(18))
        summary = json.loads((tmp_path / "branch_scan_scan.json").read_text())
        assert summary['statistics']['completed'] == 18
        assert summary['failed_points'] == []

    def test_row_order_does_not_depend_on_workers(self, tmp_path):
        serial, pooled = tmp_path / "serial", tmp_path / "pooled"
        main.SimulationController(Settings(scan_workers=1), serial).scan(SCENARIOS / "branch_scan.json")
        main.SimulationController(Settings(scan_workers=4), pooled).scan(SCENARIOS / "branch_scan.json")
        assert (serial / "branch_scan_branches.csv").read_bytes() == (pooled / "branch_scan_branches.csv").read_bytes()

    def test_long_horizon_scan(self, tmp_path):
        data = {'name': "far", 'omega': [0.0], 'gamma': [1.0, 100.0], 'w0': [{'re': 0.0, 'im': -1.0}],
                'horizon': 1000.0}
        assert main.main(['scan', str(_write(tmp_path, "far", data)), '--out', str(tmp_path)]) == 0
        summary = json.loads((tmp_path / "far_scan.json").read_text())
        assert summary['statistics']['completed'] == 2


class TestCompare:
    def test_representations_agree(self, tmp_path):
        path = _write(tmp_path, "agree", _lognlse("agree"))
        assert main.main(['compare', str(path), '--out', str(tmp_path)]) == 0
        report = json.loads((tmp_path / "agree_compare.json").read_text())
        assert report['invariant_discrepancy_max'] < 1e-7
        assert (tmp_path / "agree_compare.csv").exists()

    @pytest.mark.slow
    def test_canonical_product_violates_bound(self, tmp_path):
        data = _lognlse("long", t_end=20.0, dt=1e-2)
        data['initial'] = {'eta': 1.0, 'eta_dot': 0.0, 'c': {'re': 0.0, 'im': 1.0}}
        assert main.main(['compare', str(_write(tmp_path, "long", data)), '--out', str(tmp_path)]) == 0
        report = json.loads((tmp_path / "long_compare.json").read_text())
        assert report['u_ck_below_bound'] is True
        assert report['u_product_below_bound'] is False

    def test_needs_lognlse_scenario(self, tmp_path):
        assert main.main(['compare', str(SCENARIOS / "conservative_golden.json"), '--out', str(tmp_path)]) == 2


class TestParser:
    def test_schema(self, capsys):
        assert main.main(['--schema']) == 0
        assert set(json.loads(capsys.readouterr().out)) == {'scenario', 'scan'}

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as info:
            main.main(['--version'])
        assert info.value.code == 0
        assert main.__version__ in capsys.readouterr().out

    def test_no_command(self):
        assert main.main([]) == 2
