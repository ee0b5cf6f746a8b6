"""
Ermakov invariants, uncertainties and energy contributions.

Uncertainty and energy formulas use the Riccati form, which is the same for
every model family.
"""

import math
from dataclasses import dataclass
from typing import Dict, Optional, Union

import numpy as np

from dynamics import ermakov_from_riccati
from errors import DegenerateWidthError, ModelError, UnphysicalWidthError, UnsupportedModelError
from models import ClassicalState, ErmakovState, Model, ModelFamily, RepresentationTag, RiccatiVar, TimeSeries

# Floor for relative drift when the invariant itself vanishes (eta = eta_dot = 0)
DRIFT_FLOOR = 1e-30


@dataclass(frozen=True)
class UncertaintyRecord:
    """Position/momentum variances, correlation and the Schroedinger-Robertson combination"""
    var_x: float
    var_p: float
    corr: float
    sr_lhs: float
    u_product: float
    tag: RepresentationTag = RepresentationTag.PHYSICAL_NL

    def to_dict(self) -> Dict[str, float]:
        return {
            'var_x': self.var_x,
            'var_p': self.var_p,
            'corr': self.corr,
            'sr_lhs': self.sr_lhs,
            'u_product': self.u_product,
        }


@dataclass(frozen=True)
class InvariantValue:
    value: float
    model_tag: ModelFamily


def _riccati_value(c: Union[RiccatiVar, complex]) -> complex:
    value = c.c if isinstance(c, RiccatiVar) else complex(c)
    if not value.imag > 0:
        raise UnphysicalWidthError(value)
    return value


def canonical_pair(model: Model, t: float, cls: ClassicalState):
    """(Q, Q_dot) for an Expanding model; physical states are lifted with Q = e^{gamma t/2} eta"""
    if cls.tag is RepresentationTag.CANONICAL_EXPANDING:
        return cls.eta, cls.eta_dot
    scale = math.exp(model.gamma * t / 2)
    return scale * cls.eta, scale * (cls.eta_dot + model.gamma / 2 * cls.eta)


def ermakov_invariant(model: Model, t: float, cls: ClassicalState, e: ErmakovState) -> InvariantValue:
    """
    Exact Ermakov invariant of the family.

    e is the family's own width variable: alpha_CK for Caldirola-Kanai,
    alpha_exp (= alpha_NL) for Expanding, alpha_NL for LogNLSE.
    """
    alpha, alpha_dot = e.alpha, e.alpha_dot
    if not alpha > 0:
        raise DegenerateWidthError(alpha)
    eta, eta_dot = cls.eta, cls.eta_dot
    family = model.family
    if family is ModelFamily.CONSERVATIVE:
        value = 0.5 * ((eta_dot * alpha - alpha_dot * eta) ** 2 + (eta / alpha) ** 2)
    elif family is ModelFamily.CALDIROLA_KANAI:
        value = 0.5 * (math.exp(2 * model.gamma * t) * (eta_dot * alpha - alpha_dot * eta) ** 2
                       + (eta / alpha) ** 2)
    elif family is ModelFamily.EXPANDING:
        q, q_dot = canonical_pair(model, t, cls)
        value = 0.5 * alpha ** 2 * ((q_dot - alpha_dot / alpha * q) ** 2 + (q / alpha ** 2) ** 2)
    else:
        shifted_rate = alpha_dot / alpha - model.gamma / 2
        value = 0.5 * math.exp(model.gamma * t) * alpha ** 2 * (
            (eta_dot - shifted_rate * eta) ** 2 + (eta / alpha ** 2) ** 2
        )
    return InvariantValue(value, family)


def uncertainties(model: Model, c: Union[RiccatiVar, complex]) -> UncertaintyRecord:
    """Variances, correlation, SR left-hand side and uncertainty product from c"""
    value = _riccati_value(c)
    m, hbar = model.constants.mass, model.constants.hbar
    re, im = value.real, value.imag
    var_x = hbar / (2 * m) / im
    var_p = hbar * m / 2 / im * (re * re + im * im)
    corr = hbar / 2 / im * re
    u_product = var_x * var_p
    return UncertaintyRecord(
        var_x=var_x,
        var_p=var_p,
        corr=corr,
        sr_lhs=u_product - corr * corr,
        u_product=u_product,
        tag=c.tag if isinstance(c, RiccatiVar) else model.tag,
    )


def energy_contribution(model: Model, c: Union[RiccatiVar, complex], omega: float) -> float:
    """Width contribution (hbar/4)/imag(c) * (real(c)^2 + imag(c)^2 + omega^2) to the energy"""
    value = _riccati_value(c)
    hbar = model.constants.hbar
    return hbar / 4 / value.imag * (value.real ** 2 + value.imag ** 2 + omega * omega)


def ck_uncertainty_product(ck_run: TimeSeries, gamma: Optional[float] = None) -> np.ndarray:
    """
    U_CK(t) = var_x * var_p_canonical * e^{-2 gamma t} along a Caldirola-Kanai run.

    This is the product of canonical quantities and drops below hbar^2/4;
    the physical product of the mapped LogNLSE state never does.
    """
    if ck_run.model.family is not ModelFamily.CALDIROLA_KANAI:
        raise UnsupportedModelError(
            f"U_CK needs a caldirola_kanai run, got {ck_run.model.family.value}"
        )
    gamma = ck_run.model.gamma if gamma is None else gamma
    if gamma != ck_run.model.gamma:
        raise ModelError(f"gamma={gamma!r} does not match the run's gamma={ck_run.model.gamma!r}")
    m, hbar = ck_run.model.constants.mass, ck_run.model.constants.hbar
    re, im = ck_run.c.real, ck_run.c.imag
    var_x = hbar / (2 * m) / im
    var_p = hbar * m / 2 / im * (re * re + im * im)
    return var_x * var_p * np.exp(-2 * gamma * ck_run.times)


def expanding_hamiltonian(model: Model, cls: ClassicalState, t: float) -> float:
    """P^2/2m + m Omega^2 Q^2/2 with P = m Q_dot; constant for constant omega and equal to E0"""
    q, q_dot = canonical_pair(model, t, cls)
    m = model.constants.mass
    return 0.5 * m * (q_dot * q_dot + model.big_omega_squared(t) * q * q)


def invariant_drift(values: np.ndarray) -> float:
    """max |I(t) - I(0)| / max(I(0), floor)"""
    values = np.asarray(values, dtype=float)
    return float(np.max(np.abs(values - values[0])) / max(values[0], DRIFT_FLOOR))


def invariant_series(run: TimeSeries) -> np.ndarray:
    """Family invariant evaluated at every stored state of a run"""
    model = run.model
    values = np.empty(len(run))
    for i, state in enumerate(run.states):
        e = ermakov_from_riccati(model, state.t, state.riccati)
        values[i] = ermakov_invariant(model, state.t, state.classical, e).value
    return values
