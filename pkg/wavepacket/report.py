"""
Time-series rows, verification reports and file writers.
"""

import csv
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np

from errors import WavepacketError
from ladder import (
    coherent_closed_form,
    coherent_state,
    displacement_series,
    phase_adjusted_constancy,
    quadrature_norm,
    series_tail_bound,
    z_eigenvalue,
)
from models import ModelFamily, TimeSeries
from observables import ck_uncertainty_product, energy_contribution, invariant_drift, invariant_series, uncertainties
from scenario import CSV_COLUMNS, CoherentStateSpec

logger = logging.getLogger(__name__)

COMPARE_COLUMNS = [
    't', 'I_nl', 'I_ck', 'I_exp',
    're_c_nl', 'im_c_nl', 're_c_ck', 'im_c_ck', 're_c_exp', 'im_c_exp',
    'u_product', 'u_ck',
]


def format_value(value: Any) -> str:
    """17 significant digits for floats; blanks for missing values"""
    if value is None:
        return ''
    if isinstance(value, (float, np.floating)):
        return format(float(value), '.17g')
    return str(value)


def timeseries_rows(run: TimeSeries) -> List[Dict[str, float]]:
    """All CSV columns for every stored state of a run"""
    model = run.model
    invariants = invariant_series(run)
    rows = []
    for i, state in enumerate(run.states):
        c = state.riccati.c
        record = uncertainties(model, state.riccati)
        z = z_eigenvalue(model, state.classical, state.riccati, state.t).z
        rows.append({
            't': state.t,
            'eta': state.classical.eta,
            'eta_dot': state.classical.eta_dot,
            're_c': c.real,
            'im_c': c.imag,
            'alpha': state.alpha,
            'phase': state.phase,
            'I': float(invariants[i]),
            'var_x': record.var_x,
            'var_p': record.var_p,
            'corr': record.corr,
            'u_product': record.u_product,
            'energy': energy_contribution(model, c, model.omega(state.t)),
            're_z': z.real,
            'im_z': z.imag,
        })
    return rows


def write_csv(path: Path, rows: Iterable[Dict[str, Any]], columns: Sequence[str]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open('w', newline='', encoding='utf-8') as handle:
        writer = csv.writer(handle, lineterminator='\r\n')
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(row.get(name)) for name in columns])
    return path


def _json_safe(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, complex):
        return [_json_safe(value.real), _json_safe(value.imag)]
    return value


def write_json(path: Path, document: Dict[str, Any]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open('w', encoding='utf-8') as handle:
        json.dump(_json_safe(document), handle, indent=2)
        handle.write('\n')
    return path


def coherent_state_report(run: TimeSeries, spec: CoherentStateSpec) -> Dict[str, Any]:
    """Eigenvalue, norm and series-vs-closed-form check at the final state of a physical run"""
    model = run.model
    if model.family not in (ModelFamily.CONSERVATIVE, ModelFamily.LOG_NLSE):
        raise WavepacketError(f"coherent-state report needs physical variables, got {model.family.value}")
    state = run.final
    consts = model.constants
    c = state.riccati.c
    z = z_eigenvalue(model, state.classical, state.riccati, state.t, invariant_level=False).z
    sigma = math.sqrt(consts.hbar / (2 * consts.mass * c.imag))
    half = spec.grid_half_width * sigma
    grid = np.linspace(state.classical.eta - half, state.classical.eta + half, spec.grid_points)
    closed = coherent_closed_form(consts, z, c, grid, phase=state.phase)
    series = displacement_series(consts, z, c, spec.n_max, phase=state.phase).evaluate(grid)
    norm = quadrature_norm(coherent_state(consts, c, state.classical, state.phase))
    report = {
        't': state.t,
        'norm_quadrature': norm,
        'series_n_max': spec.n_max,
        'series_tail_bound': series_tail_bound(z, spec.n_max),
        'series_max_error': float(np.max(np.abs(closed - series))),
    }
    if spec.report_z:
        report['z'] = [z.real, z.imag]
        report['abs_z_squared'] = abs(z) ** 2
    return report


def verification_report(run: TimeSeries, coherent: Optional[CoherentStateSpec] = None,
                        rows: Optional[List[Dict[str, float]]] = None) -> Dict[str, Any]:
    """Invariant drift, SR residual, phase-adjusted z drift and warnings for one run"""
    model = run.model
    rows = rows if rows is not None else timeseries_rows(run)
    hbar_sq_quarter = model.constants.hbar ** 2 / 4
    invariants = np.array([row['I'] for row in rows])
    sr = np.array([uncertainties(model, complex(row['re_c'], row['im_c'])).sr_lhs for row in rows])
    warnings: List[str] = []

    z_drift = None
    try:
        z_drift = phase_adjusted_constancy(run).max_drift
    except WavepacketError as e:
        warnings.append(f"z_phase_drift not computed: {e}")

    report: Dict[str, Any] = {
        'family': model.family.value,
        'invariant_drift': invariant_drift(invariants),
        'sr_residual_max': float(np.max(np.abs(sr - hbar_sq_quarter)) / hbar_sq_quarter),
        'z_phase_drift': z_drift,
        'warnings': warnings,
        'steps': run.step_count,
        'max_step_error': run.max_step_error,
        'u_product_min': float(min(row['u_product'] for row in rows)),
    }
    if invariants[0] == 0:
        warnings.append("invariant is zero at t0 (packet at rest at the origin); drift is absolute")
    if model.family is ModelFamily.CALDIROLA_KANAI:
        u_ck = ck_uncertainty_product(run)
        report['u_ck_min'] = float(np.min(u_ck))
        if np.min(u_ck) < hbar_sq_quarter:
            warnings.append("U_CK drops below hbar^2/4: canonical product, not a physical uncertainty")
    if coherent is not None:
        try:
            report['coherent_state'] = coherent_state_report(run, coherent)
        except WavepacketError as e:
            warnings.append(f"coherent_state not computed: {e}")
    return report


def comparison_rows(nl_run: TimeSeries, ck_run: TimeSeries, exp_run: TimeSeries) -> List[Dict[str, float]]:
    """Side-by-side columns of the three representations on a shared time grid"""
    if not (np.array_equal(nl_run.times, ck_run.times) and np.array_equal(nl_run.times, exp_run.times)):
        raise ValueError("comparison runs must share their time grid")
    i_nl, i_ck, i_exp = invariant_series(nl_run), invariant_series(ck_run), invariant_series(exp_run)
    u_ck = ck_uncertainty_product(ck_run)
    rows = []
    for i, t in enumerate(nl_run.times):
        c_nl, c_ck, c_exp = complex(nl_run.c[i]), complex(ck_run.c[i]), complex(exp_run.c[i])
        rows.append({
            't': float(t),
            'I_nl': float(i_nl[i]),
            'I_ck': float(i_ck[i]),
            'I_exp': float(i_exp[i]),
            're_c_nl': c_nl.real, 'im_c_nl': c_nl.imag,
            're_c_ck': c_ck.real, 'im_c_ck': c_ck.imag,
            're_c_exp': c_exp.real, 'im_c_exp': c_exp.imag,
            'u_product': uncertainties(nl_run.model, c_nl).u_product,
            'u_ck': float(u_ck[i]),
        })
    return rows


def comparison_report(rows: List[Dict[str, float]], gamma: float, hbar: float) -> Dict[str, Any]:
    """Max invariant discrepancy, max Riccati-map residual and the U_CK diagnostic"""
    quarter = hbar * hbar / 4
    invariant_gap = 0.0
    map_residual = 0.0
    for row in rows:
        scale = max(abs(row['I_nl']), 1.0)
        invariant_gap = max(invariant_gap,
                            abs(row['I_ck'] - row['I_nl']) / scale,
                            abs(row['I_exp'] - row['I_nl']) / scale)
        c_nl = complex(row['re_c_nl'], row['im_c_nl'])
        mapped_ck = math.exp(gamma * row['t']) * c_nl
        c_ck = complex(row['re_c_ck'], row['im_c_ck'])
        c_exp = complex(row['re_c_exp'], row['im_c_exp'])
        map_residual = max(map_residual,
                           abs(mapped_ck - c_ck) / max(1.0, abs(c_ck)),
                           abs(c_nl + gamma / 2 - c_exp) / max(1.0, abs(c_exp)))
    u_ck_min = min(row['u_ck'] for row in rows)
    u_min = min(row['u_product'] for row in rows)
    warnings = []
    if u_ck_min < quarter:
        warnings.append("U_CK drops below hbar^2/4 while the physical product stays above it")
    return {
        'invariant_discrepancy_max': invariant_gap,
        'riccati_map_residual_max': map_residual,
        'u_ck_min': u_ck_min,
        'u_product_min': u_min,
        'u_ck_below_bound': u_ck_min < quarter,
        'u_product_below_bound': u_min < quarter - 1e-12,
        'warnings': warnings,
    }
