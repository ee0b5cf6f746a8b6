"""
Ladder operators and coherent states on polynomial-times-Gaussian states.

A PolyGaussianState represents

    psi(x) = exp(log_norm) * P(xt) * exp(i*(m/2hbar)*c*xt^2 + i*p_center*xt/hbar),  xt = x - x_center

with P given by ascending complex coefficients. The generalized operators

    a(t)  = kappa * ( (hbar/m) d/dx - i*c*x )
    a+(t) = kappa * (-(hbar/m) d/dx + i*conj(c)*x ),   kappa = sqrt(m/2hbar) * alpha

map such states to states with the same Gaussian factor, so every operation
below is exact polynomial algebra.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import hermite
from numpy.polynomial import polynomial as poly
from scipy.special import erfc

from errors import (
    CoverageError,
    DivergentIntegralError,
    ModelError,
    OperatorStateMismatchError,
    UnphysicalWidthError,
    UnsupportedModelError,
)
from models import ClassicalState, Model, ModelFamily, PhysicalConstants, RiccatiVar, TimeSeries
from observables import canonical_pair

logger = logging.getLogger(__name__)

WIDTH_MATCH_TOLERANCE = 1e-10
COVERAGE_LIMIT = 1e-10


def _riccati_value(c: Union[RiccatiVar, complex]) -> complex:
    value = c.c if isinstance(c, RiccatiVar) else complex(c)
    if not value.imag > 0:
        raise UnphysicalWidthError(value)
    return value


@dataclass(frozen=True, eq=False)
class PolyGaussianState:
    coeffs: np.ndarray
    x_center: float
    p_center: float
    width: RiccatiVar
    log_norm: complex
    constants: PhysicalConstants

    def __post_init__(self):
        coeffs = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        if coeffs.size == 0:
            raise ValueError("state needs at least one polynomial coefficient")
        object.__setattr__(self, 'coeffs', coeffs)
        _riccati_value(self.width)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def c(self) -> complex:
        return self.width.c

    def evaluate(self, x: Union[float, np.ndarray]) -> np.ndarray:
        """Pointwise values psi(x)"""
        xt = np.asarray(x, dtype=float) - self.x_center
        k = self.constants.mass / (2 * self.constants.hbar)
        exponent = self.log_norm + 1j * k * self.c * xt ** 2 + 1j * self.p_center * xt / self.constants.hbar
        return poly.polyval(xt, self.coeffs) * np.exp(exponent)

    def with_coeffs(self, coeffs: np.ndarray) -> 'PolyGaussianState':
        return PolyGaussianState(coeffs, self.x_center, self.p_center, self.width, self.log_norm, self.constants)

    def scale(self, factor: complex) -> 'PolyGaussianState':
        return self.with_coeffs(self.coeffs * factor)

    def _aligned_coeffs(self, other: 'PolyGaussianState') -> np.ndarray:
        """other's coefficients expressed against this state's Gaussian factor and log_norm"""
        same = (
            self.constants == other.constants
            and abs(self.c - other.c) <= WIDTH_MATCH_TOLERANCE * max(1.0, abs(self.c))
            and self.x_center == other.x_center
            and self.p_center == other.p_center
        )
        if not same:
            raise ValueError("states must share width, centers and constants to be combined")
        return other.coeffs * cmath.exp(other.log_norm - self.log_norm)

    def __add__(self, other: 'PolyGaussianState') -> 'PolyGaussianState':
        return self.with_coeffs(poly.polyadd(self.coeffs, self._aligned_coeffs(other)))

    def __sub__(self, other: 'PolyGaussianState') -> 'PolyGaussianState':
        return self.with_coeffs(poly.polysub(self.coeffs, self._aligned_coeffs(other)))

    def coefficient_norm(self) -> float:
        """Max |coefficient| including the exp(log_norm) prefactor"""
        return float(np.max(np.abs(self.coeffs)) * math.exp(self.log_norm.real))


@dataclass(frozen=True)
class LadderOperators:
    """a(t), a+(t) for width c"""
    constants: PhysicalConstants
    c: complex

    def __post_init__(self):
        _riccati_value(self.c)

    @classmethod
    def for_state(cls, state: PolyGaussianState) -> 'LadderOperators':
        return cls(state.constants, state.c)

    @property
    def alpha(self) -> float:
        return self.c.imag ** -0.5

    @property
    def kappa(self) -> float:
        return math.sqrt(self.constants.mass / (2 * self.constants.hbar)) * self.alpha

    def _check(self, state: PolyGaussianState) -> None:
        if state.constants != self.constants:
            raise ModelError("ladder operator and state use different physical constants")
        if abs(self.c - state.c) > WIDTH_MATCH_TOLERANCE * max(1.0, abs(self.c)):
            raise OperatorStateMismatchError(self.c, state.c)


def apply_annihilation(state: PolyGaussianState, ops: Optional[LadderOperators] = None) -> PolyGaussianState:
    """Exact image a(t) psi; the x-center and p-center terms supply the eigenvalue shift"""
    ops = ops or LadderOperators.for_state(state)
    ops._check(state)
    m, hbar = state.constants.mass, state.constants.hbar
    shift = 1j * (state.p_center / m - ops.c * state.x_center)
    coeffs = poly.polyadd(hbar / m * poly.polyder(state.coeffs), shift * state.coeffs)
    return state.with_coeffs(ops.kappa * coeffs)


def apply_creation(state: PolyGaussianState, ops: Optional[LadderOperators] = None) -> PolyGaussianState:
    """Exact image a+(t) psi; raises the polynomial degree by one"""
    ops = ops or LadderOperators.for_state(state)
    ops._check(state)
    m, hbar = state.constants.mass, state.constants.hbar
    shift = 1j * (ops.c.conjugate() * state.x_center - state.p_center / m)
    coeffs = poly.polyadd(-hbar / m * poly.polyder(state.coeffs), 2 * ops.c.imag * poly.polymulx(state.coeffs))
    coeffs = poly.polyadd(coeffs, shift * state.coeffs)
    return state.with_coeffs(ops.kappa * coeffs)


def invariant_operator(state: PolyGaussianState, ops: Optional[LadderOperators] = None) -> PolyGaussianState:
    """(hbar/m) (a+ a + 1/2) psi"""
    ops = ops or LadderOperators.for_state(state)
    number = apply_creation(apply_annihilation(state, ops), ops)
    return (number + state.scale(0.5)).scale(state.constants.hbar / state.constants.mass)


def _log_prefactor(consts: PhysicalConstants, c: complex, phase: float) -> complex:
    """log of N = (m/(pi hbar alpha^2))^{1/4} e^{-i phase/2}"""
    alpha_squared = 1.0 / c.imag
    return complex(0.25 * math.log(consts.mass / (math.pi * consts.hbar * alpha_squared)), -0.5 * phase)


def vacuum_state(consts: PhysicalConstants, c: Union[RiccatiVar, complex], t: float = 0.0,
                 phase: Optional[float] = None) -> PolyGaussianState:
    """
    Normalized vacuum at the origin.

    phase is the accumulated integral of 1/alpha^2; it defaults to imag(c)*t,
    the exact value for a width that has stayed at c since t = 0.
    """
    value = _riccati_value(c)
    phase = value.imag * t if phase is None else phase
    width = c if isinstance(c, RiccatiVar) else RiccatiVar(value)
    return PolyGaussianState(np.array([1.0 + 0j]), 0.0, 0.0, width, _log_prefactor(consts, value, phase), consts)


@dataclass(frozen=True)
class Eigenvalue:
    z: complex
    invariant_level: bool = True


def z_eigenvalue(model: Model, cls: ClassicalState, c: Union[RiccatiVar, complex], t: float,
                 invariant_level: bool = True) -> Eigenvalue:
    """
    z = kappa * [imag(c)*q + i*(p - real(c)*q)] in the family's canonical pair (q, p).

    Conservative and LogNLSE use (eta, eta_dot); Caldirola-Kanai uses
    (eta, e^{gamma t} eta_dot); Expanding uses (Q, Q_dot). For LogNLSE the
    invariant-level value carries e^{gamma t/2}, the physical-level one omits it.
    """
    value = _riccati_value(c)
    kappa = math.sqrt(model.constants.mass / (2 * model.constants.hbar)) * value.imag ** -0.5
    q, q_dot = cls.eta, cls.eta_dot
    scale = 1.0
    if model.family is ModelFamily.CALDIROLA_KANAI:
        q_dot = math.exp(model.gamma * t) * q_dot
    elif model.family is ModelFamily.EXPANDING:
        q, q_dot = canonical_pair(model, t, cls)
    elif model.family is ModelFamily.LOG_NLSE and invariant_level:
        scale = math.exp(model.gamma * t / 2)
    z = scale * kappa * complex(value.imag * q, q_dot - value.real * q)
    return Eigenvalue(z, invariant_level)


def classical_from_eigenvalue(consts: PhysicalConstants, z: Union[Eigenvalue, complex],
                              c: Union[RiccatiVar, complex]) -> ClassicalState:
    """(eta, eta_dot) whose conservative eigenvalue is z at width c"""
    value = _riccati_value(c)
    z = z.z if isinstance(z, Eigenvalue) else complex(z)
    kappa = math.sqrt(consts.mass / (2 * consts.hbar)) * value.imag ** -0.5
    eta = z.real / (kappa * value.imag)
    return ClassicalState(eta, z.imag / kappa + value.real * eta)


def coherent_state(consts: PhysicalConstants, c: Union[RiccatiVar, complex], cls: ClassicalState,
                   phase: float = 0.0) -> PolyGaussianState:
    """
    Closed-form coherent state centered on the trajectory:
    N * exp(i(m/2hbar) c xt^2 + i m eta_dot xt/hbar + i m eta_dot eta/(2hbar)).
    """
    value = _riccati_value(c)
    width = c if isinstance(c, RiccatiVar) else RiccatiVar(value)
    m, hbar = consts.mass, consts.hbar
    log_norm = _log_prefactor(consts, value, phase) + 1j * m * cls.eta_dot * cls.eta / (2 * hbar)
    return PolyGaussianState(np.array([1.0 + 0j]), cls.eta, m * cls.eta_dot, width, log_norm, consts)


def outside_mass(consts: PhysicalConstants, c: complex, center: float, x_grid: Sequence[float]) -> float:
    """Probability of a Gaussian of width c at center lying outside [min(x_grid), max(x_grid)]"""
    sigma = math.sqrt(consts.hbar / (2 * consts.mass * c.imag))
    lo, hi = float(np.min(x_grid)), float(np.max(x_grid))
    scale = math.sqrt(2) * sigma
    return 0.5 * float(erfc((hi - center) / scale) + erfc((center - lo) / scale))


def coherent_closed_form(consts: PhysicalConstants, z: Union[Eigenvalue, complex], c: Union[RiccatiVar, complex],
                         x_grid: Sequence[float], t: float = 0.0, phase: Optional[float] = None) -> np.ndarray:
    """Samples of the normalized coherent state with eigenvalue z on x_grid"""
    value = _riccati_value(c)
    phase = value.imag * t if phase is None else phase
    cls = classical_from_eigenvalue(consts, z, value)
    lost = outside_mass(consts, value, cls.eta, x_grid)
    if lost > COVERAGE_LIMIT:
        raise CoverageError(lost, COVERAGE_LIMIT)
    return coherent_state(consts, c, cls, phase).evaluate(np.asarray(x_grid, dtype=float))


def series_tail_bound(z: Union[Eigenvalue, complex], n_max: int) -> float:
    """|z|^{n+1} / sqrt((n+1)!) for truncation after order n_max"""
    modulus = abs(z.z if isinstance(z, Eigenvalue) else z)
    if modulus == 0:
        return 0.0
    n = n_max + 1
    return math.exp(n * math.log(modulus) - 0.5 * math.lgamma(n + 1))


def displacement_series(consts: PhysicalConstants, z: Union[Eigenvalue, complex], c: Union[RiccatiVar, complex],
                        n_max: int, t: float = 0.0, phase: Optional[float] = None) -> PolyGaussianState:
    """e^{-|z|^2/2} sum_{n <= n_max} z^n (a+)^n / n! applied to the vacuum, as one polynomial state"""
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    z = z.z if isinstance(z, Eigenvalue) else complex(z)
    vacuum = vacuum_state(consts, c, t, phase)
    ops = LadderOperators.for_state(vacuum)
    term = vacuum.with_coeffs(np.array([1.0 + 0j]))
    total = term.coeffs
    for n in range(1, n_max + 1):
        term = apply_creation(term, ops).scale(z / n)
        total = poly.polyadd(total, term.coeffs)
    logger.debug(f"[LADDER] displacement series n_max={n_max}, tail bound {series_tail_bound(z, n_max):.2e}")
    return PolyGaussianState(total, 0.0, 0.0, vacuum.width, vacuum.log_norm - 0.5 * abs(z) ** 2, consts)


def _gaussian_moments(q: complex, count: int) -> np.ndarray:
    """int s^k exp(-q s^2) ds for k < count; odd moments vanish"""
    moments = np.zeros(count, dtype=complex)
    moments[0] = cmath.sqrt(math.pi / q)
    for k in range(0, count - 2, 2):
        moments[k + 2] = (k + 1) / (2 * q) * moments[k]
    return moments


def inner_product(s1: PolyGaussianState, s2: PolyGaussianState) -> complex:
    """Exact <s1|s2> by completing the square and Gaussian moments"""
    if s1.constants != s2.constants:
        raise ModelError("inner product of states with different physical constants")
    hbar = s1.constants.hbar
    k = s1.constants.mass / (2 * hbar)
    c1, c2 = s1.c.conjugate(), s2.c
    x1, p1, x2, p2 = s1.x_center, s1.p_center, s2.x_center, s2.p_center

    q = -1j * k * (c2 - c1)
    if not q.real > 0:
        raise DivergentIntegralError(f"overlap exponent has non-positive real part {q.real!r}")
    b = 2j * k * c1 * x1 - 1j * p1 / hbar - 2j * k * c2 * x2 + 1j * p2 / hbar
    e0 = -1j * k * c1 * x1 ** 2 + 1j * p1 * x1 / hbar + 1j * k * c2 * x2 ** 2 - 1j * p2 * x2 / hbar
    mu = b / (2 * q)

    left = Polynomial(np.conj(s1.coeffs))(Polynomial([mu - x1, 1.0]))
    right = Polynomial(s2.coeffs)(Polynomial([mu - x2, 1.0]))
    product = (left * right).coef
    moments = _gaussian_moments(q, len(product))
    total = complex(np.dot(product, moments))
    return cmath.exp(e0 + b * b / (4 * q) + s1.log_norm.conjugate() + s2.log_norm) * total


def state_norm(state: PolyGaussianState) -> float:
    return math.sqrt(max(inner_product(state, state).real, 0.0))


def quadrature_norm(state: PolyGaussianState, points: int = 64) -> float:
    """int |psi|^2 dx by Gauss-Hermite quadrature about the state's center"""
    sigma = math.sqrt(state.constants.hbar / (2 * state.constants.mass * state.c.imag))
    nodes, weights = hermite.hermgauss(points)
    scale = math.sqrt(2) * sigma
    x = state.x_center + scale * nodes
    density = np.abs(state.evaluate(x)) ** 2
    return float(scale * np.sum(weights * np.exp(nodes ** 2) * density))


@dataclass
class ZDriftReport:
    """Phase-adjusted eigenvalue z*e^{i phi} along a run"""
    z_tilde: np.ndarray
    max_drift: float

    @property
    def z0(self) -> complex:
        return complex(self.z_tilde[0])


def phase_adjusted_constancy(run: TimeSeries) -> ZDriftReport:
    """max |z(t) e^{i phi(t)} - z(0) e^{i phi(0)}| along a run"""
    model = run.model
    if model.family is ModelFamily.CALDIROLA_KANAI:
        raise UnsupportedModelError("phase-adjusted constancy is checked on physical or expanding runs")
    z_tilde = np.empty(len(run), dtype=complex)
    for i, state in enumerate(run.states):
        z = z_eigenvalue(model, state.classical, state.riccati, state.t).z
        z_tilde[i] = z * cmath.exp(1j * state.phase)
    drift = float(np.max(np.abs(z_tilde - z_tilde[0])))
    return ZDriftReport(z_tilde, drift)
