"""
Exception hierarchy for the wave-packet simulator.

Library code raises these; the CLI controller maps them to exit codes.
"""

from typing import Optional


class WavepacketError(Exception):
    """Base class for every error raised by this package"""


class ConfigurationError(WavepacketError, ValueError):
    """Malformed environment setting"""

    def __init__(self, variable: str, value: str, reason: str):
        self.variable = variable
        self.value = value
        super().__init__(f"{variable}={value!r}: {reason}")


class ModelError(WavepacketError, ValueError):
    """Invalid constants or family/damping combination"""


class ProfileError(WavepacketError, ValueError):
    """Invalid frequency profile, or breakpoints that do not fall on step boundaries"""


class ProfileDomainError(ProfileError):
    """Frequency requested outside the sampled grid"""

    def __init__(self, t: float, start: float, end: float):
        self.time = t
        super().__init__(f"omega(t) undefined at t={t:.17g}; sampled grid covers [{start:.17g}, {end:.17g}]")


class StateError(WavepacketError, ValueError):
    """Non-physical state input"""


class DegenerateWidthError(StateError):
    """Ermakov width alpha is not positive"""

    def __init__(self, alpha: float):
        self.alpha = alpha
        super().__init__(f"degenerate width: alpha={alpha!r} must be > 0")


class UnphysicalWidthError(StateError):
    """imag(c) is not positive, the packet is not normalizable"""

    def __init__(self, c: complex):
        self.c = c
        super().__init__(f"unphysical width: imag(c)={c.imag!r} must be > 0")


class IntegrationError(WavepacketError, RuntimeError):
    """Failure while stepping an ODE; carries the offending time"""

    def __init__(self, message: str, time: float):
        self.time = time
        super().__init__(f"{message} (t={time:.17g})")


class WidthCollapseError(IntegrationError):
    """imag(c) fell to the collapse threshold or left the finite range"""

    def __init__(self, time: float, c: complex, epsilon: float):
        self.c = c
        self.epsilon = epsilon
        super().__init__(f"width collapse: imag(c)={c.imag!r} <= {epsilon!r}", time)


class AccuracyError(IntegrationError):
    """Step-doubling error estimate exceeded the tolerance"""

    def __init__(self, time: float, estimate: float, tolerance: float, suggested_dt: float):
        self.estimate = estimate
        self.tolerance = tolerance
        self.suggested_dt = suggested_dt
        super().__init__(
            f"step error estimate {estimate:.3e} exceeds tolerance {tolerance:.3e}; "
            f"retry with dt <= {suggested_dt:.3e}",
            time,
        )


class LinearizationSingularityError(IntegrationError):
    """The linearizing variable lambda passed through zero"""

    def __init__(self, time: float):
        super().__init__("lambda passed through zero", time)


class UnsupportedModelError(WavepacketError, ValueError):
    """Operation is not defined for the requested model family or input"""


class FamilyPoleError(WavepacketError, ArithmeticError):
    """w(t) vanished, so c(t) = c_tilde + 1/w(t) has a pole"""

    def __init__(self, time: float):
        self.time = time
        super().__init__(f"one-parameter family has a pole at t={time:.17g}")


class OperatorStateMismatchError(WavepacketError, ValueError):
    """Ladder operator width differs from the state's width"""

    def __init__(self, operator_c: complex, state_c: complex):
        super().__init__(f"operator width c={operator_c!r} does not match state width c={state_c!r}")


class DivergentIntegralError(WavepacketError, ArithmeticError):
    """Gaussian overlap integral does not converge"""


class CoverageError(WavepacketError, ValueError):
    """Sample grid leaves too much probability mass outside"""

    def __init__(self, outside_mass: float, limit: float):
        self.outside_mass = outside_mass
        super().__init__(f"grid too narrow: mass outside grid {outside_mass:.3e} > {limit:.1e}")


class RepresentationMismatchError(WavepacketError, TypeError):
    """Arithmetic or mapping across different representation tags"""


class ScenarioError(WavepacketError, ValueError):
    """Scenario or scan file failed to parse or validate; message starts with the field path"""

    def __init__(self, field_path: str, reason: str, source: Optional[str] = None):
        self.field_path = field_path
        self.source = source
        where = f" in {source}" if source else ""
        super().__init__(f"{field_path}: {reason}{where}")


def exit_code_for(exc: BaseException) -> int:
    """CLI exit code for an exception raised while serving a subcommand"""
    if isinstance(exc, (ScenarioError, ProfileError, ModelError, ConfigurationError)):
        return 2
    if isinstance(exc, IntegrationError):
        return 3
    if isinstance(exc, OSError):
        return 4
    return 1
