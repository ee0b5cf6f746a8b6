"""
Model right-hand sides and fixed-step integrators.

Riccati equations per family (c is the family's own variable):
    Conservative     dc/dt = -c^2 - omega^2
    LogNLSE          dc/dt = -gamma*c - c^2 - omega^2
    Expanding        dc/dt = -c^2 - Omega^2,        Omega^2 = omega^2 - gamma^2/4
    Caldirola-Kanai  dc/dt = -e^{-gamma t} c^2 - omega^2 e^{gamma t}

The joint (eta, eta_dot, c, phi) system is stepped with classical RK4 and a
step-doubling error estimate. phi is advanced with d(phi)/dt = imag(c) = 1/alpha^2.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple, Union

import numpy as np

from config import Settings, get_settings
from errors import (
    AccuracyError,
    DegenerateWidthError,
    IntegrationError,
    LinearizationSingularityError,
    ProfileError,
    UnphysicalWidthError,
    UnsupportedModelError,
    WidthCollapseError,
)
from models import (
    ClassicalState,
    ErmakovSeries,
    ErmakovState,
    Model,
    ModelFamily,
    RepresentationTag,
    RiccatiVar,
    SystemState,
    TimeSeries,
)

logger = logging.getLogger(__name__)

Rates = Callable[[float, tuple], tuple]

# Breakpoints closer than this (relative) to a step boundary snap onto it
_BREAKPOINT_SLACK = 1e-9


def _value(c: Union[RiccatiVar, complex]) -> complex:
    return c.c if isinstance(c, RiccatiVar) else complex(c)


def _riccati_rate(model: Model, t: float, c: complex) -> complex:
    family = model.family
    if family is ModelFamily.CALDIROLA_KANAI:
        g = model.gamma * t
        return -math.exp(-g) * (c * c) - model.omega_squared(t) * math.exp(g)
    if family is ModelFamily.EXPANDING:
        return -c * c - model.big_omega_squared(t)
    rate = -c * c - model.omega_squared(t)
    if family is ModelFamily.LOG_NLSE and model.gamma:
        rate -= model.gamma * c
    return rate


def riccati_rhs(model: Model, t: float, c: Union[RiccatiVar, complex]) -> complex:
    """Rate dc/dt of the family's Riccati variable"""
    return _riccati_rate(model, t, _value(c))


def classical_rhs(model: Model, t: float, s: ClassicalState) -> Tuple[float, float]:
    """
    Rate of the packet maximum.

    For Expanding the state is read as the canonical pair (Q, Q_dot), which
    obeys Q'' = -Omega^2 Q; use transforms.physical_to_expanding to get there.
    """
    return s.eta_dot, _classical_accel(model, t, s.eta, s.eta_dot)


def _classical_accel(model: Model, t: float, eta: float, eta_dot: float) -> float:
    if model.family is ModelFamily.EXPANDING:
        return -model.big_omega_squared(t) * eta
    accel = -model.omega_squared(t) * eta
    if model.family is not ModelFamily.CONSERVATIVE and model.gamma:
        accel -= model.gamma * eta_dot
    return accel


def _ermakov_rate(model: Model, t: float, alpha: float, alpha_dot: float) -> Tuple[float, float]:
    if not alpha > 0:
        raise DegenerateWidthError(alpha)
    inv_cube = 1.0 / (alpha * alpha * alpha)
    family = model.family
    if family is ModelFamily.CALDIROLA_KANAI:
        accel = -model.omega_squared(t) * alpha + math.exp(-2 * model.gamma * t) * inv_cube
        if model.gamma:
            accel -= model.gamma * alpha_dot
        return alpha_dot, accel
    if family is ModelFamily.CONSERVATIVE:
        return alpha_dot, -model.omega_squared(t) * alpha + inv_cube
    return alpha_dot, -model.big_omega_squared(t) * alpha + inv_cube


def ermakov_rhs(model: Model, t: float, e: ErmakovState) -> Tuple[float, float]:
    """Rate (alpha_dot, alpha_ddot) of the family's Ermakov equation"""
    return _ermakov_rate(model, t, e.alpha, e.alpha_dot)


def riccati_from_ermakov(model: Model, t: float, e: ErmakovState) -> RiccatiVar:
    """c from (alpha, alpha_dot): imag = 1/alpha^2, real is the family's log-derivative"""
    if not e.alpha > 0:
        raise DegenerateWidthError(e.alpha)
    log_rate = e.alpha_dot / e.alpha
    if model.family is ModelFamily.LOG_NLSE:
        log_rate -= model.gamma / 2
    elif model.family is ModelFamily.CALDIROLA_KANAI:
        log_rate *= math.exp(model.gamma * t)
    return RiccatiVar(complex(log_rate, 1.0 / (e.alpha * e.alpha)), model.tag)


def ermakov_from_riccati(model: Model, t: float, c: Union[RiccatiVar, complex]) -> ErmakovState:
    """Inverse of riccati_from_ermakov"""
    value = _value(c)
    if not value.imag > 0:
        raise UnphysicalWidthError(value)
    alpha = value.imag ** -0.5
    real = value.real
    if model.family is ModelFamily.LOG_NLSE:
        real += model.gamma / 2
    elif model.family is ModelFamily.CALDIROLA_KANAI:
        real *= math.exp(-model.gamma * t)
    return ErmakovState(alpha, alpha * real, model.tag)


def _rk4(rates: Rates, t: float, y: tuple, h: float) -> tuple:
    half = 0.5 * h
    k1 = rates(t, y)
    k2 = rates(t + half, tuple(a + half * k for a, k in zip(y, k1)))
    k3 = rates(t + half, tuple(a + half * k for a, k in zip(y, k2)))
    # last stage stays on the left of a right-continuous breakpoint at t + h
    k4 = rates(math.nextafter(t + h, t), tuple(a + h * k for a, k in zip(y, k3)))
    sixth = h / 6.0
    return tuple(a + sixth * (p + 2 * q + 2 * r + s) for a, p, q, r, s in zip(y, k1, k2, k3, k4))


def _step_grid(model: Model, t0: float, t_end: float, dt: float) -> np.ndarray:
    """Step boundaries t0 + n*dt ending at t_end, with breakpoints snapped on"""
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt!r}")
    if not t_end > t0:
        raise ValueError(f"t_end={t_end!r} must exceed the start time {t0!r}")
    model.omega.check_domain(t0, t_end)
    n = max(1, math.ceil((t_end - t0) / dt - 1e-9))
    grid = t0 + np.arange(n + 1) * dt
    grid[-1] = t_end
    for b in model.omega.discontinuities:
        if not t0 < b < t_end:
            continue
        idx = int(round((b - t0) / dt))
        if abs(grid[idx] - b) > _BREAKPOINT_SLACK * max(1.0, abs(b)):
            raise ProfileError(
                f"frequency breakpoint t={b!r} does not fall on a step boundary of dt={dt!r} from t0={t0!r}"
            )
        # endpoints stay at t0 and t_end
        if idx in (0, n):
            continue
        grid[idx] = b
    return grid


def _joint_rates(model: Model) -> Rates:
    def rates(t: float, y: tuple) -> tuple:
        q, q_dot, c, _ = y
        return q_dot, _classical_accel(model, t, q, q_dot), _riccati_rate(model, t, c), c.imag

    return rates


def _scaled_difference(fine: tuple, coarse: tuple) -> float:
    return max(abs(f - g) / (1.0 + abs(f)) for f, g in zip(fine, coarse))


def _check_width(t: float, c: complex, epsilon: float) -> None:
    if not (c.imag > epsilon and cmath.isfinite(c)):
        raise WidthCollapseError(t, c, epsilon)


def integrate(model: Model, init: SystemState, t_end: float, dt: float, *,
              stride: Optional[int] = None, settings: Optional[Settings] = None,
              error_control: bool = True) -> TimeSeries:
    """
    Integrate the joint classical/Riccati/phase system from init.t to t_end.

    init.riccati is read in the model's own representation; init.classical is
    physical unless tagged canonical_expanding. Every accepted step keeps
    imag(c) above the collapse threshold, otherwise WidthCollapseError.
    With error_control each step is also taken as two half steps; the half-step
    result is accepted and (difference / 15) is the error estimate.
    """
    settings = settings or get_settings()
    stride = stride or settings.output_stride
    epsilon = settings.width_epsilon
    tolerance = settings.step_tolerance

    c0 = init.riccati.c
    if not c0.imag > 0:
        raise UnphysicalWidthError(c0)
    t0 = init.t
    grid = _step_grid(model, t0, t_end, dt)
    steps = len(grid) - 1
    expanding = model.family is ModelFamily.EXPANDING
    half_gamma = model.gamma / 2

    eta, eta_dot = init.classical.eta, init.classical.eta_dot
    if expanding and init.classical.tag is not RepresentationTag.CANONICAL_EXPANDING:
        scale = math.exp(half_gamma * t0)
        eta, eta_dot = scale * eta, scale * (eta_dot + half_gamma * eta)

    logger.info(f"[INTEGRATOR] 🚀 {model.family.value}: t in [{t0:g}, {t_end:g}], dt={dt:g}, {steps} steps")
    rates = _joint_rates(model)
    y = (float(eta), float(eta_dot), complex(c0), float(init.phase))
    kept = [(t0, y)]
    max_error = 0.0

    for i in range(steps):
        t, h = float(grid[i]), float(grid[i + 1] - grid[i])
        if error_control:
            coarse = _rk4(rates, t, y, h)
            mid = _rk4(rates, t, y, 0.5 * h)
            y_next = _rk4(rates, t + 0.5 * h, mid, 0.5 * h)
            _check_width(float(grid[i + 1]), y_next[2], epsilon)
            estimate = _scaled_difference(y_next, coarse) / 15.0
            if estimate > tolerance:
                suggested = 0.9 * dt * (tolerance / estimate) ** 0.2
                logger.error(f"[INTEGRATOR] ❌ step error {estimate:.3e} at t={t:g}")
                raise AccuracyError(t, estimate, tolerance, suggested)
            max_error = max(max_error, estimate)
        else:
            y_next = _rk4(rates, t, y, h)
            _check_width(float(grid[i + 1]), y_next[2], epsilon)
        y = y_next
        if (i + 1) % stride == 0 or i + 1 == steps:
            kept.append((float(grid[i + 1]), y))

    times = np.array([t for t, _ in kept])
    values = [v for _, v in kept]
    q = np.array([v[0] for v in values])
    q_dot = np.array([v[1] for v in values])
    if expanding:
        shrink = np.exp(-half_gamma * times)
        q = shrink * q
        q_dot = shrink * q_dot - half_gamma * q
    logger.info(f"[INTEGRATOR] ✅ {model.family.value}: {steps} steps, max step error {max_error:.2e}")
    return TimeSeries(
        model=model,
        times=times,
        eta=q,
        eta_dot=q_dot,
        c=np.array([v[2] for v in values]),
        phase=np.array([v[3] for v in values]),
        dt=dt,
        max_step_error=max_error,
        step_count=steps,
    )


def integrate_ermakov(model: Model, e0: ErmakovState, t0: float, t_end: float, dt: float,
                      cls0: Optional[ClassicalState] = None, stride: int = 1) -> ErmakovSeries:
    """RK4 run of the real Ermakov equation, optionally alongside the trajectory"""
    grid = _step_grid(model, t0, t_end, dt)
    steps = len(grid) - 1
    expanding = model.family is ModelFamily.EXPANDING
    half_gamma = model.gamma / 2
    cls0 = cls0 or ClassicalState(0.0, 0.0)
    eta, eta_dot = cls0.eta, cls0.eta_dot
    if expanding and cls0.tag is not RepresentationTag.CANONICAL_EXPANDING:
        scale = math.exp(half_gamma * t0)
        eta, eta_dot = scale * eta, scale * (eta_dot + half_gamma * eta)

    def rates(t: float, y: tuple) -> tuple:
        alpha, alpha_dot, q, q_dot = y
        return _ermakov_rate(model, t, alpha, alpha_dot) + (q_dot, _classical_accel(model, t, q, q_dot))

    y = (e0.alpha, e0.alpha_dot, float(eta), float(eta_dot))
    kept = [(t0, y)]
    for i in range(steps):
        t, h = float(grid[i]), float(grid[i + 1] - grid[i])
        try:
            y = _rk4(rates, t, y, h)
        except DegenerateWidthError:
            raise IntegrationError("Ermakov width left the positive range inside a step", t)
        if not (y[0] > 0 and math.isfinite(y[0])):
            raise IntegrationError(f"Ermakov width alpha={y[0]!r} left the positive range", float(grid[i + 1]))
        if (i + 1) % stride == 0 or i + 1 == steps:
            kept.append((float(grid[i + 1]), y))

    times = np.array([t for t, _ in kept])
    q = np.array([v[2] for _, v in kept])
    q_dot = np.array([v[3] for _, v in kept])
    if expanding:
        shrink = np.exp(-half_gamma * times)
        q = shrink * q
        q_dot = shrink * q_dot - half_gamma * q
    return ErmakovSeries(
        model=model,
        times=times,
        alpha=np.array([v[0] for _, v in kept]),
        alpha_dot=np.array([v[1] for _, v in kept]),
        eta=q,
        eta_dot=q_dot,
    )


@dataclass
class LambdaSeries:
    """Sampled linearizing variable lambda(t) with lambda_ddot = -Omega^2 lambda"""
    model: Model
    times: np.ndarray
    lam: np.ndarray
    lam_dot: np.ndarray

    def riccati(self) -> np.ndarray:
        """c(t) recovered as lambda_dot/lambda, shifted by -gamma/2 for LogNLSE"""
        c = self.lam_dot / self.lam
        if self.model.family is ModelFamily.LOG_NLSE:
            c = c - self.model.gamma / 2
        return c

    def amplitude(self) -> np.ndarray:
        return np.abs(self.lam)

    def phase(self) -> np.ndarray:
        """Unwrapped arg(lambda)"""
        return np.unwrap(np.angle(self.lam))

    def wronskian(self) -> np.ndarray:
        return (np.conj(self.lam) * self.lam_dot).imag


def _lambda_frequency(model: Model) -> Callable[[float], float]:
    if model.family is ModelFamily.CONSERVATIVE:
        return model.omega_squared
    if model.family in (ModelFamily.EXPANDING, ModelFamily.LOG_NLSE):
        return model.big_omega_squared
    raise UnsupportedModelError(f"lambda linearization is not available for {model.family.value}")


def lambda_initial(model: Model, c0: Union[RiccatiVar, complex]) -> Tuple[complex, complex]:
    """(lambda0, lambda_dot0) with |lambda0| = alpha0, zero initial phase and unit Wronskian"""
    _lambda_frequency(model)
    value = _value(c0)
    if not value.imag > 0:
        raise UnphysicalWidthError(value)
    alpha0 = value.imag ** -0.5
    if model.family is ModelFamily.LOG_NLSE:
        value += model.gamma / 2
    return complex(alpha0), value * alpha0


def lambda_evolve(model: Model, lam0: complex, lam_dot0: complex, t_end: float, dt: float,
                  t0: float = 0.0, stride: int = 1, epsilon: Optional[float] = None) -> LambdaSeries:
    """
    Integrate lambda_ddot = -omega^2 lambda (Omega^2 for Expanding and LogNLSE).

    Raises LinearizationSingularityError when lambda reaches zero.
    """
    omega_squared = _lambda_frequency(model)
    epsilon = get_settings().width_epsilon if epsilon is None else epsilon
    lam0, lam_dot0 = complex(lam0), complex(lam_dot0)
    scale = abs(lam0)
    if scale == 0:
        raise LinearizationSingularityError(t0)
    grid = _step_grid(model, t0, t_end, dt)
    steps = len(grid) - 1
    # with zero Wronskian lambda moves on a line through the origin
    collinear = abs((lam0.conjugate() * lam_dot0).imag) <= epsilon * max(1.0, abs(lam0) * abs(lam_dot0))

    def rates(t: float, y: tuple) -> tuple:
        return y[1], -omega_squared(t) * y[0]

    y = (lam0, lam_dot0)
    kept = [(t0, y)]
    for i in range(steps):
        t_next = float(grid[i + 1])
        y_next = _rk4(rates, float(grid[i]), y, float(grid[i + 1] - grid[i]))
        if abs(y_next[0]) < epsilon * scale or not cmath.isfinite(y_next[0]):
            raise LinearizationSingularityError(t_next)
        if collinear and (y_next[0] * lam0.conjugate()).real * (y[0] * lam0.conjugate()).real < 0:
            raise LinearizationSingularityError(t_next)
        y = y_next
        if (i + 1) % stride == 0 or i + 1 == steps:
            kept.append((t_next, y))

    return LambdaSeries(
        model=model,
        times=np.array([t for t, _ in kept]),
        lam=np.array([v[0] for _, v in kept]),
        lam_dot=np.array([v[1] for _, v in kept]),
    )
