#!/usr/bin/env python3
"""
Wave-packet simulator - command-line entry point

Runs single scenarios, branch scans over (omega, gamma, w0), and
cross-representation comparisons (LogNLSE vs Caldirola-Kanai vs expanding
coordinates), writing CSV time series and JSON verification reports.

Exit codes: 0 success, 2 parse/validation error, 3 integration error, 4 I/O error.
"""

import argparse
import asyncio
import json
import logging
import os
import sys
from pathlib import Path
from typing import Dict, List, Optional

# Add package directory to path for imports
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from config import Settings, get_settings, setup_logging
from dynamics import integrate
from errors import ScenarioError, exit_code_for
from models import Model, ModelFamily, SystemState, TimeSeries
from report import (
    COMPARE_COLUMNS,
    comparison_report,
    comparison_rows,
    timeseries_rows,
    verification_report,
    write_csv,
    write_json,
)
from scan import SCAN_COLUMNS, run_scan_async
from scenario import Scenario, load_scan, load_scenario, schema_document
from transforms import nl_to_ck_riccati, nl_to_expanding_riccati

__version__ = "0.1.0"

logger = logging.getLogger(__name__)


class SimulationController:
    """Serves the run, scan and compare subcommands"""

    def __init__(self, settings: Optional[Settings] = None, out_dir: Path = Path(".")):
        self.settings = settings or get_settings()
        self.out_dir = Path(out_dir)

    def _integrate(self, scenario: Scenario, model: Model, init: SystemState) -> TimeSeries:
        return integrate(
            model, init, scenario.run.t_end, scenario.run.dt,
            stride=scenario.run.stride, settings=self.settings,
            error_control=scenario.run.error_control,
        )

    def run(self, path: Path) -> Dict[str, Path]:
        """Integrate one scenario; write <name>.csv and <name>_report.json"""
        scenario = load_scenario(path)
        model = scenario.to_model()
        logger.info(f"[RUN] 🚀 '{scenario.name}' ({model.family.value})")
        run = self._integrate(scenario, model, scenario.initial_state(model))
        rows = timeseries_rows(run)
        report = verification_report(run, scenario.coherent_state, rows)
        report['scenario'] = scenario.name
        outputs = {
            'csv': write_csv(self.out_dir / f"{scenario.name}.csv", rows, scenario.output.columns),
            'report': write_json(self.out_dir / f"{scenario.name}_report.json", report),
        }
        logger.info(f"[RUN] ✅ invariant drift {report['invariant_drift']:.3e}, "
                    f"SR residual {report['sr_residual_max']:.3e}")
        for warning in report['warnings']:
            logger.warning(f"[RUN] {warning}")
        return outputs

    def scan(self, path: Path) -> Dict[str, Path]:
        """Classify every grid point; write <name>_branches.csv and <name>_scan.json"""
        spec = load_scan(path)
        queue = asyncio.run(run_scan_async(spec, self.settings))
        rows = queue.rows()
        outputs = {
            'csv': write_csv(self.out_dir / f"{spec.name}_branches.csv", rows, SCAN_COLUMNS),
            'report': write_json(self.out_dir / f"{spec.name}_scan.json", {
                'scan': spec.name,
                'family': spec.family,
                'horizon': spec.horizon,
                'statistics': queue.get_statistics(),
                'failed_points': [p.to_dict() for p in queue.get_failed_points()],
                'rows': rows,
            }),
        }
        failed = queue.get_failed_points()
        if failed:
            raise failed[0].exception
        return outputs

    async def _compare_runs(self, scenario: Scenario) -> List[TimeSeries]:
        nl_model = scenario.to_model()
        gamma = nl_model.gamma
        nl_init = scenario.initial_state(nl_model)
        t0 = nl_init.t
        ck_model = Model(ModelFamily.CALDIROLA_KANAI, nl_model.constants, gamma, nl_model.omega)
        exp_model = Model(ModelFamily.EXPANDING, nl_model.constants, gamma, nl_model.omega)
        ck_init = SystemState(t0, nl_init.classical, nl_to_ck_riccati(nl_init.riccati, t0, gamma), 0.0)
        exp_init = SystemState(t0, nl_init.classical, nl_to_expanding_riccati(nl_init.riccati, gamma), 0.0)
        runs = await asyncio.gather(
            asyncio.to_thread(self._integrate, scenario, nl_model, nl_init),
            asyncio.to_thread(self._integrate, scenario, ck_model, ck_init),
            asyncio.to_thread(self._integrate, scenario, exp_model, exp_init),
        )
        return list(runs)

    def compare(self, path: Path) -> Dict[str, Path]:
        """LogNLSE scenario integrated in all three representations"""
        scenario = load_scenario(path)
        if scenario.model.family is not ModelFamily.LOG_NLSE:
            raise ScenarioError("model.family", f"compare needs a log_nlse scenario, got {scenario.model.family.value}",
                                str(path))
        logger.info(f"[COMPARE] 🚀 '{scenario.name}': log_nlse vs caldirola_kanai vs expanding")
        nl_run, ck_run, exp_run = asyncio.run(self._compare_runs(scenario))
        rows = comparison_rows(nl_run, ck_run, exp_run)
        constants = nl_run.model.constants
        report = comparison_report(rows, nl_run.model.gamma, constants.hbar)
        report['scenario'] = scenario.name
        outputs = {
            'csv': write_csv(self.out_dir / f"{scenario.name}_compare.csv", rows, COMPARE_COLUMNS),
            'report': write_json(self.out_dir / f"{scenario.name}_compare.json", report),
        }
        logger.info(f"[COMPARE] ✅ invariant discrepancy {report['invariant_discrepancy_max']:.3e}, "
                    f"map residual {report['riccati_map_residual_max']:.3e}")
        return outputs


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wavepacket",
        description="Gaussian wave-packet dynamics via complex Riccati equations",
    )
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    parser.add_argument('--schema', action='store_true', help="print the scenario and scan JSON schemas")
    subcommands = parser.add_subparsers(dest='command')
    for name, help_text in (
        ('run', "integrate one scenario"),
        ('scan', "classify width branches over an (omega, gamma, w0) grid"),
        ('compare', "integrate a log_nlse scenario in all three representations"),
    ):
        sub = subcommands.add_parser(name, help=help_text)
        sub.add_argument('file', type=Path)
        sub.add_argument('--out', type=Path, default=Path("."), help="output directory")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        settings = get_settings()
        setup_logging(settings)
        if args.schema:
            print(json.dumps(schema_document(), indent=2))
            return 0
        if args.command is None:
            parser.print_help()
            return 2
        controller = SimulationController(settings, args.out)
        getattr(controller, args.command)(args.file)
        return 0
    except Exception as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        return exit_code_for(e)


if __name__ == "__main__":
    sys.exit(main())
