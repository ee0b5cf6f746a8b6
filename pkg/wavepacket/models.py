"""
Domain value types for Gaussian wave-packet dynamics.

All types are immutable after construction. The Riccati variable c is the
complex quantity (2*hbar/m)*y(t) from the Gaussian exponent; its imaginary
part is 1/alpha^2 and its real part the logarithmic width derivative (with the
family-specific shifts documented in dynamics.py).
"""

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from errors import (
    DegenerateWidthError,
    ModelError,
    ProfileDomainError,
    ProfileError,
    RepresentationMismatchError,
)

# Relative slack when checking that t lies on a sampled grid
_GRID_SLACK = 1e-12


class ModelFamily(Enum):
    """The four supported model families"""
    CONSERVATIVE = "conservative"
    CALDIROLA_KANAI = "caldirola_kanai"
    EXPANDING = "expanding"
    LOG_NLSE = "log_nlse"


class RepresentationTag(Enum):
    """Which picture a mapped quantity lives in"""
    PHYSICAL_NL = "physical_nl"                  # physical variables (Conservative, LogNLSE)
    CANONICAL_CK = "canonical_ck"                # Caldirola-Kanai canonical variables
    CANONICAL_EXPANDING = "canonical_expanding"  # expanding coordinate Q = e^{gamma t/2} x

    @classmethod
    def for_family(cls, family: ModelFamily) -> 'RepresentationTag':
        if family is ModelFamily.CALDIROLA_KANAI:
            return cls.CANONICAL_CK
        if family is ModelFamily.EXPANDING:
            return cls.CANONICAL_EXPANDING
        return cls.PHYSICAL_NL


def _require_same_tag(left: RepresentationTag, right: RepresentationTag) -> None:
    if left is not right:
        raise RepresentationMismatchError(f"cannot combine {left.value} with {right.value} quantities")


@dataclass(frozen=True)
class PhysicalConstants:
    """Mass and reduced Planck constant"""
    mass: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if not (self.mass > 0 and math.isfinite(self.mass)):
            raise ModelError(f"mass must be a positive finite number, got {self.mass!r}")
        if not (self.hbar > 0 and math.isfinite(self.hbar)):
            raise ModelError(f"hbar must be a positive finite number, got {self.hbar!r}")

    def to_dict(self) -> Dict[str, float]:
        return {'mass': self.mass, 'hbar': self.hbar}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'PhysicalConstants':
        return cls(mass=float(data.get('mass', 1.0)), hbar=float(data.get('hbar', 1.0)))


class ProfileKind(Enum):
    CONSTANT = "constant"
    PIECEWISE = "piecewise"
    SAMPLED = "sampled"


@dataclass(frozen=True)
class FrequencyProfile:
    """
    Frequency omega(t) in one of three shapes.

    piecewise: `breakpoints` b_1 < ... < b_k split time into k+1 segments with
    `values` v_0..v_k; omega = v_i on [b_i, b_{i+1}) (right-continuous).
    sampled: linear interpolation of `values` on the strictly increasing
    `times`; evaluation outside the grid raises ProfileDomainError.
    """
    kind: ProfileKind
    values: Tuple[float, ...]
    breakpoints: Tuple[float, ...] = ()
    times: Tuple[float, ...] = ()

    def __post_init__(self):
        if not self.values:
            raise ProfileError("frequency profile needs at least one value")
        if not all(math.isfinite(v) for v in self.values):
            raise ProfileError("frequency values must be finite")
        if self.kind is ProfileKind.CONSTANT and len(self.values) != 1:
            raise ProfileError("constant profile takes exactly one value")
        if self.kind is ProfileKind.PIECEWISE:
            if len(self.values) != len(self.breakpoints) + 1:
                raise ProfileError(
                    f"piecewise profile needs len(values) = len(breakpoints) + 1, "
                    f"got {len(self.values)} values and {len(self.breakpoints)} breakpoints"
                )
            _check_increasing(self.breakpoints, "breakpoints")
        if self.kind is ProfileKind.SAMPLED:
            if len(self.times) != len(self.values) or len(self.times) < 2:
                raise ProfileError("sampled profile needs matching times/values with at least two samples")
            _check_increasing(self.times, "times")

    @classmethod
    def constant(cls, omega: float) -> 'FrequencyProfile':
        return cls(ProfileKind.CONSTANT, (float(omega),))

    @classmethod
    def piecewise(cls, breakpoints: Sequence[float], values: Sequence[float]) -> 'FrequencyProfile':
        return cls(ProfileKind.PIECEWISE, tuple(float(v) for v in values),
                   breakpoints=tuple(float(b) for b in breakpoints))

    @classmethod
    def sampled(cls, times: Sequence[float], values: Sequence[float]) -> 'FrequencyProfile':
        return cls(ProfileKind.SAMPLED, tuple(float(v) for v in values),
                   times=tuple(float(t) for t in times))

    @property
    def is_constant(self) -> bool:
        return self.kind is ProfileKind.CONSTANT

    @property
    def discontinuities(self) -> Tuple[float, ...]:
        return self.breakpoints if self.kind is ProfileKind.PIECEWISE else ()

    def __call__(self, t: float) -> float:
        if self.kind is ProfileKind.CONSTANT:
            return self.values[0]
        if self.kind is ProfileKind.PIECEWISE:
            return self.values[bisect_right(self.breakpoints, t)]
        start, end = self.times[0], self.times[-1]
        slack = _GRID_SLACK * max(1.0, abs(start), abs(end))
        if t < start - slack or t > end + slack:
            raise ProfileDomainError(t, start, end)
        return float(np.interp(t, self.times, self.values))

    def check_domain(self, t0: float, t_end: float) -> None:
        """Raise ProfileDomainError unless omega is defined on all of [t0, t_end]"""
        if self.kind is ProfileKind.SAMPLED:
            self(t0)
            self(t_end)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {'kind': self.kind.value, 'values': list(self.values)}
        if self.kind is ProfileKind.PIECEWISE:
            data['breakpoints'] = list(self.breakpoints)
        if self.kind is ProfileKind.SAMPLED:
            data['times'] = list(self.times)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'FrequencyProfile':
        kind = ProfileKind(data['kind'])
        if kind is ProfileKind.CONSTANT:
            return cls.constant(data['values'][0])
        if kind is ProfileKind.PIECEWISE:
            return cls.piecewise(data['breakpoints'], data['values'])
        return cls.sampled(data['times'], data['values'])


def _check_increasing(grid: Sequence[float], name: str) -> None:
    if not all(math.isfinite(g) for g in grid):
        raise ProfileError(f"{name} must be finite")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ProfileError(f"{name} must be strictly increasing")


@dataclass(frozen=True)
class Model:
    """Model family with constants, damping gamma and frequency profile"""
    family: ModelFamily
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)
    gamma: float = 0.0
    omega: FrequencyProfile = field(default_factory=lambda: FrequencyProfile.constant(1.0))

    def __post_init__(self):
        if not (self.gamma >= 0 and math.isfinite(self.gamma)):
            raise ModelError(f"gamma must be a nonnegative finite number, got {self.gamma!r}")
        if self.family is ModelFamily.CONSERVATIVE and self.gamma != 0:
            raise ModelError(f"conservative model requires gamma = 0, got {self.gamma!r}")

    @property
    def tag(self) -> RepresentationTag:
        return RepresentationTag.for_family(self.family)

    def omega_squared(self, t: float) -> float:
        w = self.omega(t)
        return w * w

    def big_omega_squared(self, t: float) -> float:
        """Shifted frequency Omega^2 = omega^2 - gamma^2/4"""
        w = self.omega(t)
        return w * w - self.gamma * self.gamma / 4

    def to_dict(self) -> Dict[str, Any]:
        return {
            'family': self.family.value,
            'constants': self.constants.to_dict(),
            'gamma': self.gamma,
            'omega': self.omega.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Model':
        return cls(
            family=ModelFamily(data['family']),
            constants=PhysicalConstants.from_dict(data.get('constants', {})),
            gamma=float(data.get('gamma', 0.0)),
            omega=FrequencyProfile.from_dict(data['omega']),
        )


@dataclass(frozen=True)
class RiccatiVar:
    """Complex Riccati variable c = (2*hbar/m)*y"""
    c: complex
    tag: RepresentationTag = RepresentationTag.PHYSICAL_NL

    @property
    def real(self) -> float:
        return self.c.real

    @property
    def imag(self) -> float:
        return self.c.imag

    @property
    def is_physical(self) -> bool:
        return self.c.imag > 0

    def __sub__(self, other: 'RiccatiVar') -> complex:
        _require_same_tag(self.tag, other.tag)
        return self.c - other.c

    def to_dict(self) -> Dict[str, Any]:
        return {'re': self.c.real, 'im': self.c.imag, 'tag': self.tag.value}


@dataclass(frozen=True)
class ErmakovState:
    """Width variable alpha > 0 and its time derivative"""
    alpha: float
    alpha_dot: float
    tag: RepresentationTag = RepresentationTag.PHYSICAL_NL

    def __post_init__(self):
        if not self.alpha > 0:
            raise DegenerateWidthError(self.alpha)

    def __sub__(self, other: 'ErmakovState') -> Tuple[float, float]:
        _require_same_tag(self.tag, other.tag)
        return self.alpha - other.alpha, self.alpha_dot - other.alpha_dot


@dataclass(frozen=True)
class ClassicalState:
    """Packet maximum eta and its velocity"""
    eta: float
    eta_dot: float
    tag: RepresentationTag = RepresentationTag.PHYSICAL_NL

    def __sub__(self, other: 'ClassicalState') -> Tuple[float, float]:
        _require_same_tag(self.tag, other.tag)
        return self.eta - other.eta, self.eta_dot - other.eta_dot


@dataclass(frozen=True)
class SystemState:
    """Snapshot at time t; phase is the accumulated integral of 1/alpha^2"""
    t: float
    classical: ClassicalState
    riccati: RiccatiVar
    phase: float = 0.0

    @property
    def alpha(self) -> float:
        return self.riccati.imag ** -0.5

    def to_dict(self) -> Dict[str, Any]:
        return {
            't': self.t,
            'eta': self.classical.eta,
            'eta_dot': self.classical.eta_dot,
            'c': self.riccati.to_dict(),
            'phase': self.phase,
        }


class TimeSeries:
    """
    Stored output of an integration run.

    Columns are kept as numpy arrays; SystemState views are built on access.
    `classical` columns are always physical eta, eta_dot (Expanding runs
    convert back from Q); `c` is the family's own Riccati variable.
    """

    def __init__(self, model: Model, times: np.ndarray, eta: np.ndarray, eta_dot: np.ndarray,
                 c: np.ndarray, phase: np.ndarray, dt: float, max_step_error: float = 0.0,
                 step_count: int = 0):
        self.model = model
        self.times = np.asarray(times, dtype=float)
        self.eta = np.asarray(eta, dtype=float)
        self.eta_dot = np.asarray(eta_dot, dtype=float)
        self.c = np.asarray(c, dtype=complex)
        self.phase = np.asarray(phase, dtype=float)
        self.dt = dt
        self.max_step_error = max_step_error
        self.step_count = step_count

        n = len(self.times)
        if not (len(self.eta) == len(self.eta_dot) == len(self.c) == len(self.phase) == n):
            raise ValueError("time series columns must have equal length")
        if n > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("time series times must be strictly increasing")

    def __len__(self) -> int:
        return len(self.times)

    def __getitem__(self, index: int) -> SystemState:
        tag = self.model.tag
        return SystemState(
            t=float(self.times[index]),
            classical=ClassicalState(float(self.eta[index]), float(self.eta_dot[index])),
            riccati=RiccatiVar(complex(self.c[index]), tag),
            phase=float(self.phase[index]),
        )

    @property
    def states(self) -> List[SystemState]:
        return [self[i] for i in range(len(self))]

    @property
    def final(self) -> SystemState:
        return self[len(self) - 1]

    @property
    def alpha(self) -> np.ndarray:
        return self.c.imag ** -0.5


@dataclass
class ErmakovSeries:
    """Output of a direct Ermakov-equation run"""
    model: Model
    times: np.ndarray
    alpha: np.ndarray
    alpha_dot: np.ndarray
    eta: Optional[np.ndarray] = None
    eta_dot: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return len(self.times)
