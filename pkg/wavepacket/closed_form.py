"""
Analytic solutions of the constant-coefficient Riccati equations.

With a particular solution c_tilde known, c = c_tilde + 1/w turns the Riccati
equation into the linear equation dw/dt = A*w + 1 with
A = gamma_lin + 2*c_tilde (gamma_lin = gamma for LogNLSE, 0 otherwise).
For constant A, w(t) = (e^{At} - 1)/A + w0*e^{At}; t is measured from the
time at which w0 is given.
"""

import cmath
import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid

from dynamics import riccati_rhs
from errors import FamilyPoleError, UnsupportedModelError
from models import FrequencyProfile, Model, ModelFamily, RepresentationTag, RiccatiVar

logger = logging.getLogger(__name__)

# Below this |A t| the expm1-type quotient uses its Taylor series
_SERIES_CUTOFF = 1e-3

# cmath.exp overflows just above 709
_EXP_LIMIT = 700.0


class BranchLabel(Enum):
    PLUS = "plus"
    MINUS = "minus"


class BranchRegime(Enum):
    """Width-dynamics regime for constant omega and gamma"""
    UNDERDAMPED_WIDTH = "underdamped-width"   # omega^2 > gamma^2/4, A imaginary pair
    OVERDAMPED_WIDTH = "overdamped-width"     # 0 < omega^2 < gamma^2/4, two real A
    FREE_DAMPED = "free-damped"               # omega = 0, A = +-gamma
    DEGENERATE = "degenerate"                 # gamma = 0 or omega^2 = gamma^2/4


@dataclass(frozen=True)
class ParticularSolution:
    """Stationary root c_tilde of a constant-coefficient Riccati equation"""
    c_tilde: complex
    branch_label: BranchLabel
    gamma_linear: float = 0.0
    tag: RepresentationTag = RepresentationTag.PHYSICAL_NL

    @property
    def is_physical(self) -> bool:
        return self.c_tilde.imag > 0

    def to_dict(self) -> Dict[str, object]:
        return {
            'branch': self.branch_label.value,
            're': self.c_tilde.real,
            'im': self.c_tilde.imag,
            'physical': self.is_physical,
        }


@dataclass(frozen=True)
class BranchParameter:
    """Linear-term coefficient A of the Bernoulli-linearized equation"""
    a: complex


@dataclass(frozen=True)
class FamilyParameter:
    """Initial value w0 of w = 1/(c - c_tilde); infinite w0 encodes c == c_tilde"""
    w0: complex

    @classmethod
    def infinite(cls) -> 'FamilyParameter':
        return cls(complex(math.inf, 0.0))

    @classmethod
    def from_initial(cls, c0: complex, particular: ParticularSolution) -> 'FamilyParameter':
        """w0 selecting the family member through c0"""
        deviation = complex(c0) - particular.c_tilde
        if deviation == 0:
            return cls.infinite()
        return cls(1.0 / deviation)

    @property
    def is_infinite(self) -> bool:
        return cmath.isinf(self.w0)


def _require_constant(model: Model) -> float:
    if model.family is ModelFamily.CALDIROLA_KANAI:
        raise UnsupportedModelError(
            "Caldirola-Kanai Riccati coefficients are time dependent; map from log_nlse with transforms"
        )
    if not model.omega.is_constant:
        raise UnsupportedModelError("particular solutions need a constant frequency profile")
    return model.omega(0.0)


def particular_solutions(model: Model) -> List[ParticularSolution]:
    """Both stationary roots, plus branch first; the plus root carries the physical +i*omega"""
    omega = _require_constant(model)
    gamma = model.gamma
    root = cmath.sqrt(complex(gamma * gamma / 4 - omega * omega, 0.0))
    if model.family is ModelFamily.LOG_NLSE:
        shift, gamma_linear = -gamma / 2, gamma
    else:
        shift, gamma_linear = 0.0, 0.0
    return [
        ParticularSolution(shift + root, BranchLabel.PLUS, gamma_linear, model.tag),
        ParticularSolution(shift - root, BranchLabel.MINUS, gamma_linear, model.tag),
    ]


def branch_parameter(model: Model, p: ParticularSolution) -> BranchParameter:
    """A = gamma_lin + 2*c_tilde"""
    gamma_linear = model.gamma if model.family is ModelFamily.LOG_NLSE else 0.0
    return BranchParameter(gamma_linear + 2 * p.c_tilde)


def bernoulli_w(a: BranchParameter, w0: FamilyParameter, t: float) -> complex:
    """Closed form w(t) for constant A; exact limit w0 + t at A = 0, infinite once e^{At} overflows"""
    if w0.is_infinite:
        return w0.w0
    a_value = complex(a.a)
    if a_value == 0:
        return w0.w0 + t
    at = a_value * t
    if abs(at) < _SERIES_CUTOFF:
        return t * (1 + at / 2 + at * at / 6 + at * at * at / 24) + w0.w0 * cmath.exp(at)
    if at.real > _EXP_LIMIT:
        # w = ((1 + A w0) e^{At} - 1)/A stays at -1/A only when 1 + A w0 = 0
        if 1 + a_value * w0.w0 == 0:
            return -1 / a_value
        return complex(math.inf, 0.0)
    growth = cmath.exp(at)
    return (growth - 1) / a_value + w0.w0 * growth


def _inverse_w(a_value: complex, w0: complex, t: float) -> complex:
    """1/w(t) without forming e^{At} on growing branches"""
    at = a_value * t
    if at.real > 1:
        decay = cmath.exp(-at)
        denominator = 1 + a_value * w0 - decay
        if denominator == 0:
            raise FamilyPoleError(t)
        return a_value * decay / denominator
    w = bernoulli_w(BranchParameter(a_value), FamilyParameter(w0), t)
    if w == 0:
        raise FamilyPoleError(t)
    return 1.0 / w


def general_solution(p: ParticularSolution, w0: FamilyParameter, t: float) -> RiccatiVar:
    """c(t) = c_tilde + 1/w(t) for the family member w0"""
    if w0.is_infinite:
        return RiccatiVar(p.c_tilde, p.tag)
    return RiccatiVar(p.c_tilde + _inverse_w(p.gamma_linear + 2 * p.c_tilde, w0.w0, t), p.tag)


def bernoulli_w_quadrature(times: Sequence[float], a_values: Sequence[complex], w0: complex) -> np.ndarray:
    """
    w(t) for sampled, time-dependent A by trapezoid quadrature on the given grid.

    Both lower limits sit at times[0]:
        w(t) = e^{F(t)} * (w0 + int_{t0}^{t} e^{-F(s)} ds),  F(t) = int_{t0}^{t} A
    """
    times = np.asarray(times, dtype=float)
    a_values = np.asarray(a_values, dtype=complex)
    if times.shape != a_values.shape or times.ndim != 1 or len(times) < 2:
        raise ValueError("times and a_values must be matching 1-d arrays with at least two samples")
    if not np.all(np.diff(times) > 0):
        raise ValueError("times must be strictly increasing")
    exponent = cumulative_trapezoid(a_values, times, initial=0)
    inner = cumulative_trapezoid(np.exp(-exponent), times, initial=0)
    return np.exp(exponent) * (complex(w0) + inner)


@dataclass
class BranchReport:
    """Classification of the width dynamics at fixed (omega, gamma)"""
    family: ModelFamily
    omega: float
    gamma: float
    regime: BranchRegime
    particular: List[ParticularSolution]
    a_values: Dict[BranchLabel, complex]
    equilibrium_alpha: Dict[BranchLabel, Optional[float]] = field(default_factory=dict)

    @property
    def admissible_branches(self) -> int:
        """Distinct particular solutions with imag(c_tilde) >= 0"""
        roots = {p.c_tilde for p in self.particular if p.c_tilde.imag >= 0}
        return len(roots)

    def to_dict(self) -> Dict[str, object]:
        return {
            'family': self.family.value,
            'omega': self.omega,
            'gamma': self.gamma,
            'regime': self.regime.value,
            'particular': [p.to_dict() for p in self.particular],
            'a': {label.value: [a.real, a.imag] for label, a in self.a_values.items()},
            'equilibrium_alpha': {label.value: v for label, v in self.equilibrium_alpha.items()},
            'admissible_branches': self.admissible_branches,
        }


def _regime(omega: float, gamma: float) -> BranchRegime:
    quarter = gamma * gamma / 4
    omega_squared = omega * omega
    if gamma == 0 or math.isclose(omega_squared, quarter, rel_tol=1e-12, abs_tol=0.0):
        return BranchRegime.DEGENERATE
    if omega == 0:
        return BranchRegime.FREE_DAMPED
    if omega_squared > quarter:
        return BranchRegime.UNDERDAMPED_WIDTH
    return BranchRegime.OVERDAMPED_WIDTH


def classify_branch(model: Model, omega: float, gamma: float) -> BranchReport:
    """Regime, both particular solutions, A pair and equilibrium widths at (omega, gamma)"""
    constant_model = replace(model, gamma=float(gamma), omega=FrequencyProfile.constant(omega))
    particular = particular_solutions(constant_model)
    for p in particular:
        residual = abs(riccati_rhs(constant_model, 0.0, p.c_tilde))
        if residual > 1e-9 * max(1.0, abs(p.c_tilde) ** 2):
            logger.warning(f"[BRANCH] particular solution residual {residual:.2e} at omega={omega}, gamma={gamma}")
    a_values = {p.branch_label: branch_parameter(constant_model, p).a for p in particular}
    equilibrium = {
        p.branch_label: (p.c_tilde.imag ** -0.5 if p.c_tilde.imag > 0 else None)
        for p in particular
    }
    return BranchReport(
        family=constant_model.family,
        omega=float(omega),
        gamma=float(gamma),
        regime=_regime(float(omega), float(gamma)),
        particular=particular,
        a_values=a_values,
        equilibrium_alpha=equilibrium,
    )
