"""
Parameter-level maps between the physical LogNLSE picture and the
Caldirola-Kanai and expanding-coordinate canonical pictures.

Every mapped value carries a RepresentationTag; maps check the tag of their
input so canonical and physical quantities cannot be mixed by accident.
"""

import math
from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from errors import RepresentationMismatchError, UnsupportedModelError
from ladder import PolyGaussianState
from models import ClassicalState, ErmakovState, RepresentationTag, RiccatiVar

PHYSICAL = RepresentationTag.PHYSICAL_NL
CK = RepresentationTag.CANONICAL_CK
EXPANDING = RepresentationTag.CANONICAL_EXPANDING


def _expect(tag: RepresentationTag, wanted: RepresentationTag, what: str) -> None:
    if tag is not wanted:
        raise RepresentationMismatchError(f"{what} expects a {wanted.value} input, got {tag.value}")


def nl_to_ck_riccati(c_nl: RiccatiVar, t: float, gamma: float) -> RiccatiVar:
    """c_CK = e^{gamma t} c_NL"""
    _expect(c_nl.tag, PHYSICAL, "nl_to_ck_riccati")
    return RiccatiVar(math.exp(gamma * t) * c_nl.c, CK)


def ck_to_nl_riccati(c_ck: RiccatiVar, t: float, gamma: float) -> RiccatiVar:
    _expect(c_ck.tag, CK, "ck_to_nl_riccati")
    return RiccatiVar(math.exp(-gamma * t) * c_ck.c, PHYSICAL)


def nl_to_ck_alpha(e_nl: ErmakovState, t: float, gamma: float) -> ErmakovState:
    """alpha_CK = e^{-gamma t/2} alpha_NL, derivative by the product rule"""
    _expect(e_nl.tag, PHYSICAL, "nl_to_ck_alpha")
    decay = math.exp(-gamma * t / 2)
    return ErmakovState(decay * e_nl.alpha, decay * (e_nl.alpha_dot - gamma / 2 * e_nl.alpha), CK)


def ck_to_nl_alpha(e_ck: ErmakovState, t: float, gamma: float) -> ErmakovState:
    _expect(e_ck.tag, CK, "ck_to_nl_alpha")
    growth = math.exp(gamma * t / 2)
    alpha = growth * e_ck.alpha
    return ErmakovState(alpha, growth * e_ck.alpha_dot + gamma / 2 * alpha, PHYSICAL)


def physical_to_expanding(cls: ClassicalState, t: float, gamma: float) -> ClassicalState:
    """Q = e^{gamma t/2} eta, Q_dot = e^{gamma t/2} (eta_dot + gamma eta/2)"""
    _expect(cls.tag, PHYSICAL, "physical_to_expanding")
    growth = math.exp(gamma * t / 2)
    return ClassicalState(growth * cls.eta, growth * (cls.eta_dot + gamma / 2 * cls.eta), EXPANDING)


def expanding_to_physical(canonical: ClassicalState, t: float, gamma: float) -> ClassicalState:
    _expect(canonical.tag, EXPANDING, "expanding_to_physical")
    decay = math.exp(-gamma * t / 2)
    eta = decay * canonical.eta
    return ClassicalState(eta, decay * canonical.eta_dot - gamma / 2 * eta, PHYSICAL)


def nl_to_expanding_riccati(c_nl: RiccatiVar, gamma: float) -> RiccatiVar:
    """c_exp = c_NL + gamma/2; same imaginary part, so alpha_exp = alpha_NL"""
    _expect(c_nl.tag, PHYSICAL, "nl_to_expanding_riccati")
    return RiccatiVar(c_nl.c + gamma / 2, EXPANDING)


def expanding_to_nl_riccati(c_exp: RiccatiVar, gamma: float) -> RiccatiVar:
    _expect(c_exp.tag, EXPANDING, "expanding_to_nl_riccati")
    return RiccatiVar(c_exp.c - gamma / 2, PHYSICAL)


def canonical_momentum(p_phys: float, t: float, gamma: float) -> float:
    """p_hat = p e^{gamma t}"""
    return p_phys * math.exp(gamma * t)


def physical_momentum(p_hat: float, t: float, gamma: float) -> float:
    return p_hat * math.exp(-gamma * t)


def _exponent_coefficients(state: PolyGaussianState, c: complex, p: float) -> np.ndarray:
    """x^2, x^1, x^0 coefficients of i(m/2hbar) c (x - x0)^2 + i p (x - x0)/hbar"""
    k = state.constants.mass / (2 * state.constants.hbar)
    x0, hbar = state.x_center, state.constants.hbar
    return np.array([
        1j * k * c,
        -2j * k * c * x0 + 1j * p / hbar,
        1j * k * c * x0 * x0 - 1j * p * x0 / hbar,
    ])


@dataclass
class ExponentMapReport:
    """Residual of ln(psi_CK) = e^{gamma t} ln(psi_NL) on the exponent parameters"""
    residual: float
    coefficients: Dict[str, complex]
    dropped_terms: Dict[str, complex] = field(default_factory=dict)


def exponent_map_check(wp_nl: PolyGaussianState, t: float, gamma: float) -> ExponentMapReport:
    """
    Scale the physical Gaussian exponent by e^{gamma t} and compare with the
    exponent built from the mapped CK parameters (c_CK, p_hat).

    Normalization and purely time-dependent terms (log_norm) are not mapped;
    they are listed under dropped_terms.
    """
    if wp_nl.degree > 0:
        raise UnsupportedModelError(f"exponent map is checked on Gaussian states only, got degree {wp_nl.degree}")
    c_ck = nl_to_ck_riccati(wp_nl.width, t, gamma)
    p_hat = canonical_momentum(wp_nl.p_center, t, gamma)
    scaled = math.exp(gamma * t) * _exponent_coefficients(wp_nl, wp_nl.c, wp_nl.p_center)
    mapped = _exponent_coefficients(wp_nl, c_ck.c, p_hat)
    difference = np.abs(scaled - mapped) / np.maximum(1.0, np.abs(mapped))
    return ExponentMapReport(
        residual=float(np.max(difference)),
        coefficients={'x2': complex(mapped[0]), 'x1': complex(mapped[1]), 'x0': complex(mapped[2])},
        dropped_terms={'log_norm': complex(wp_nl.log_norm)},
    )
