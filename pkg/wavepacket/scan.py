"""
Branch scan over (omega, gamma, w0).

Each grid point is classified and both branches of the one-parameter family
are evaluated at the scan horizon. Points are independent and run concurrently
in worker threads; rows are always returned sorted by grid index.
"""

import asyncio
import itertools
import logging
import math
from enum import Enum
from typing import Any, Dict, List, Optional

from closed_form import BranchLabel, FamilyParameter, classify_branch, general_solution
from config import Settings, get_settings
from errors import FamilyPoleError
from models import FrequencyProfile, Model, ModelFamily, PhysicalConstants
from observables import energy_contribution
from scenario import ScanSpec

logger = logging.getLogger(__name__)

SCAN_COLUMNS = [
    'index', 'omega', 'gamma', 'w0_re', 'w0_im', 'regime', 'admissible_branches',
    'a_plus_re', 'a_plus_im', 'a_minus_re', 'a_minus_im',
    'c_tilde_plus_re', 'c_tilde_plus_im', 'c_tilde_minus_re', 'c_tilde_minus_im',
    'alpha_eq_plus', 'alpha_eq_minus',
    'c_plus_re', 'c_plus_im', 'c_minus_re', 'c_minus_im',
    'alpha_plus', 'alpha_minus', 'energy_plus', 'energy_minus',
    'status', 'message',
]


class PointStatus(Enum):
    """Status of a scan point"""
    PENDING = "pending"
    IN_PROGRESS = "in_progress"
    COMPLETED = "completed"
    FAILED = "failed"


class ScanPoint:
    """One (omega, gamma, w0) grid point"""

    def __init__(self, index: int, omega: float, gamma: float, w0: complex):
        self.index = index
        self.omega = omega
        self.gamma = gamma
        self.w0 = w0
        self.status = PointStatus.PENDING
        self.row: Dict[str, Any] = {}
        self.error_message: Optional[str] = None
        self.exception: Optional[BaseException] = None

    def start(self):
        self.status = PointStatus.IN_PROGRESS

    def complete(self, row: Dict[str, Any]):
        self.status = PointStatus.COMPLETED
        self.row = row

    def fail(self, exception: BaseException):
        self.status = PointStatus.FAILED
        self.error_message = str(exception)
        self.exception = exception

    def to_dict(self) -> Dict[str, Any]:
        return {
            'index': self.index,
            'omega': self.omega,
            'gamma': self.gamma,
            'w0': _complex_or_inf(self.w0),
            'status': self.status.value,
            'error_message': self.error_message,
        }


def _complex_or_inf(value: complex) -> Any:
    if math.isinf(value.real) or math.isinf(value.imag):
        return 'inf'
    return [value.real, value.imag]


class ScanQueue:
    """Grid points of a scan in grid-index order"""

    def __init__(self, spec: ScanSpec):
        self.spec = spec
        grid = itertools.product(spec.omega, spec.gamma, spec.w0_values())
        self.points: List[ScanPoint] = [
            ScanPoint(i, omega, gamma, w0) for i, (omega, gamma, w0) in enumerate(grid)
        ]

    def __len__(self) -> int:
        return len(self.points)

    def get_pending_points(self) -> List[ScanPoint]:
        return [p for p in self.points if p.status is PointStatus.PENDING]

    def get_failed_points(self) -> List[ScanPoint]:
        return [p for p in self.points if p.status is PointStatus.FAILED]

    def get_statistics(self) -> Dict[str, int]:
        stats = {status.value: 0 for status in PointStatus}
        for p in self.points:
            stats[p.status.value] += 1
        stats['total'] = len(self.points)
        return stats

    def rows(self) -> List[Dict[str, Any]]:
        """Completed and failed rows sorted by grid index"""
        rows = []
        for p in sorted(self.points, key=lambda point: point.index):
            if p.status is PointStatus.COMPLETED:
                rows.append(p.row)
            elif p.status is PointStatus.FAILED:
                rows.append(_failed_row(p))
        return rows


def _blank_row(point: ScanPoint) -> Dict[str, Any]:
    row = {name: None for name in SCAN_COLUMNS}
    w0 = _complex_or_inf(point.w0)
    row.update({
        'index': point.index,
        'omega': point.omega,
        'gamma': point.gamma,
        'w0_re': 'inf' if w0 == 'inf' else w0[0],
        'w0_im': 'inf' if w0 == 'inf' else w0[1],
    })
    return row


def _failed_row(point: ScanPoint) -> Dict[str, Any]:
    row = _blank_row(point)
    row.update({'status': point.status.value, 'message': point.error_message})
    return row


def evaluate_point(family: ModelFamily, constants: PhysicalConstants, point: ScanPoint,
                   horizon: float) -> Dict[str, Any]:
    """Classification plus per-branch c, alpha and energy contribution at the horizon"""
    model = Model(family, constants, point.gamma, FrequencyProfile.constant(point.omega))
    report = classify_branch(model, point.omega, point.gamma)
    row = _blank_row(point)
    row.update({
        'regime': report.regime.value,
        'admissible_branches': report.admissible_branches,
        'status': PointStatus.COMPLETED.value,
        'message': '',
    })
    notes = []
    for p in report.particular:
        suffix = 'plus' if p.branch_label is BranchLabel.PLUS else 'minus'
        a = report.a_values[p.branch_label]
        row[f'a_{suffix}_re'], row[f'a_{suffix}_im'] = a.real, a.imag
        row[f'c_tilde_{suffix}_re'], row[f'c_tilde_{suffix}_im'] = p.c_tilde.real, p.c_tilde.imag
        row[f'alpha_eq_{suffix}'] = report.equilibrium_alpha[p.branch_label]
        try:
            c = general_solution(p, FamilyParameter(point.w0), horizon).c
        except FamilyPoleError as e:
            notes.append(f"{suffix}: {e}")
            continue
        row[f'c_{suffix}_re'], row[f'c_{suffix}_im'] = c.real, c.imag
        if c.imag > 0 and math.isfinite(c.imag):
            row[f'alpha_{suffix}'] = c.imag ** -0.5
            row[f'energy_{suffix}'] = energy_contribution(model, c, point.omega)
        else:
            notes.append(f"{suffix}: unphysical width at horizon")
    row['message'] = "; ".join(notes)
    return row


async def _run_point(queue: ScanQueue, point: ScanPoint, semaphore: asyncio.Semaphore) -> None:
    spec = queue.spec
    async with semaphore:
        point.start()
        try:
            row = await asyncio.to_thread(
                evaluate_point, ModelFamily(spec.family), PhysicalConstants(spec.mass, spec.hbar),
                point, spec.horizon,
            )
            point.complete(row)
        except Exception as e:
            logger.error(f"[SCAN] ❌ point {point.index} (omega={point.omega}, gamma={point.gamma}) failed: {e}")
            point.fail(e)


async def run_scan_async(spec: ScanSpec, settings: Optional[Settings] = None) -> ScanQueue:
    """Evaluate every grid point concurrently; the returned queue holds rows and statuses"""
    settings = settings or get_settings()
    queue = ScanQueue(spec)
    logger.info(f"[SCAN] 🚀 {len(queue)} points, {settings.scan_workers} workers")
    semaphore = asyncio.Semaphore(settings.scan_workers)
    await asyncio.gather(*(_run_point(queue, p, semaphore) for p in queue.get_pending_points()))
    stats = queue.get_statistics()
    logger.info(f"[SCAN] ✅ completed {stats['completed']}/{stats['total']} points")
    return queue


def run_scan(spec: ScanSpec, settings: Optional[Settings] = None) -> ScanQueue:
    return asyncio.run(run_scan_async(spec, settings))
