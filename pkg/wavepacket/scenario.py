"""
Scenario and scan file schemas.

Files are JSON documents validated with pydantic; every validation failure is
re-raised as ScenarioError whose message starts with the dotted field path.
"""

import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from dynamics import riccati_from_ermakov
from errors import ScenarioError
from models import (
    ClassicalState,
    ErmakovState,
    FrequencyProfile,
    Model,
    ModelFamily,
    PhysicalConstants,
    RiccatiVar,
    SystemState,
)

logger = logging.getLogger(__name__)

CSV_COLUMNS = [
    't', 'eta', 'eta_dot', 're_c', 'im_c', 'alpha', 'phase', 'I',
    'var_x', 'var_p', 'corr', 'u_product', 'energy', 're_z', 'im_z',
]


class StrictModel(BaseModel):
    model_config = ConfigDict(extra='forbid')


class ComplexValue(StrictModel):
    re: float = 0.0
    im: float = 0.0

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)


class ConstantOmega(StrictModel):
    kind: Literal['constant']
    value: float

    def to_profile(self) -> FrequencyProfile:
        return FrequencyProfile.constant(self.value)


class PiecewiseOmega(StrictModel):
    kind: Literal['piecewise']
    breakpoints: List[float]
    values: List[float]

    @model_validator(mode='after')
    def check_shape(self) -> 'PiecewiseOmega':
        self.to_profile()
        return self

    def to_profile(self) -> FrequencyProfile:
        return FrequencyProfile.piecewise(self.breakpoints, self.values)


class SampledOmega(StrictModel):
    kind: Literal['sampled']
    times: List[float]
    values: List[float]

    @model_validator(mode='after')
    def check_shape(self) -> 'SampledOmega':
        self.to_profile()
        return self

    def to_profile(self) -> FrequencyProfile:
        return FrequencyProfile.sampled(self.times, self.values)


OmegaSpec = Union[ConstantOmega, PiecewiseOmega, SampledOmega]


class ModelSpec(StrictModel):
    family: ModelFamily
    mass: float = Field(1.0, gt=0)
    hbar: float = Field(1.0, gt=0)
    gamma: float = Field(0.0, ge=0)
    omega: OmegaSpec = Field(..., discriminator='kind')

    @model_validator(mode='after')
    def check_family(self) -> 'ModelSpec':
        if self.family is ModelFamily.CONSERVATIVE and self.gamma != 0:
            raise ValueError("conservative model requires gamma = 0")
        return self

    def to_model(self) -> Model:
        return Model(
            family=self.family,
            constants=PhysicalConstants(self.mass, self.hbar),
            gamma=self.gamma,
            omega=self.omega.to_profile(),
        )


class InitialSpec(StrictModel):
    t0: float = 0.0
    eta: float = 0.0
    eta_dot: float = 0.0
    c: Optional[ComplexValue] = None
    alpha: Optional[float] = Field(None, gt=0)
    alpha_dot: Optional[float] = None

    @model_validator(mode='after')
    def check_width(self) -> 'InitialSpec':
        has_c = self.c is not None
        has_alpha = self.alpha is not None or self.alpha_dot is not None
        if has_c == has_alpha:
            raise ValueError("give exactly one of c or (alpha, alpha_dot)")
        if has_alpha and (self.alpha is None or self.alpha_dot is None):
            raise ValueError("alpha and alpha_dot must be given together")
        if has_c and not self.c.im > 0:
            raise ValueError("c.im must be > 0 for a normalizable packet")
        return self


class RunSpec(StrictModel):
    t_end: float = Field(..., gt=0)
    dt: float = Field(..., gt=0)
    stride: Optional[int] = Field(None, ge=1)
    error_control: bool = True


class OutputSpec(StrictModel):
    columns: List[str] = Field(default_factory=lambda: list(CSV_COLUMNS))

    @field_validator('columns')
    @classmethod
    def known_columns(cls, columns: List[str]) -> List[str]:
        unknown = [name for name in columns if name not in CSV_COLUMNS]
        if unknown:
            raise ValueError(f"unknown columns {unknown}; choose from {CSV_COLUMNS}")
        if 't' not in columns:
            columns = ['t'] + columns
        # fixed column order regardless of listing order
        return [name for name in CSV_COLUMNS if name in columns]


class CoherentStateSpec(StrictModel):
    report_z: bool = True                         # include z and |z|^2 in the report
    grid_half_width: float = Field(8.0, gt=0)     # in units of the position standard deviation
    grid_points: int = Field(401, ge=3)
    n_max: int = Field(40, ge=0)


class Scenario(StrictModel):
    """A single simulation: model, initial data, run controls and outputs"""
    name: str = "scenario"
    model: ModelSpec
    initial: InitialSpec
    run: RunSpec
    output: OutputSpec = Field(default_factory=OutputSpec)
    coherent_state: Optional[CoherentStateSpec] = None

    @model_validator(mode='after')
    def check_run_window(self) -> 'Scenario':
        if not self.run.t_end > self.initial.t0:
            raise ValueError(f"run.t_end must exceed initial.t0={self.initial.t0}")
        return self

    def to_model(self) -> Model:
        return self.model.to_model()

    def initial_state(self, model: Optional[Model] = None) -> SystemState:
        model = model or self.to_model()
        init = self.initial
        if init.c is not None:
            riccati = RiccatiVar(init.c.value, model.tag)
        else:
            riccati = riccati_from_ermakov(model, init.t0, ErmakovState(init.alpha, init.alpha_dot))
        return SystemState(init.t0, ClassicalState(init.eta, init.eta_dot), riccati, 0.0)


class ScanSpec(StrictModel):
    """Grid over (omega, gamma, w0) for branch classification"""
    name: str = "scan"
    family: Literal['log_nlse', 'conservative', 'expanding'] = 'log_nlse'
    mass: float = Field(1.0, gt=0)
    hbar: float = Field(1.0, gt=0)
    omega: List[float] = Field(..., min_length=1)
    gamma: List[float] = Field(..., min_length=1)
    w0: List[Union[ComplexValue, Literal['inf']]] = Field(default_factory=lambda: ['inf'], min_length=1)
    horizon: float = Field(10.0, gt=0)

    @field_validator('omega', 'gamma')
    @classmethod
    def finite_nonnegative(cls, values: List[float]) -> List[float]:
        if any(not math.isfinite(v) or v < 0 for v in values):
            raise ValueError("grid values must be finite and >= 0")
        return values

    @model_validator(mode='after')
    def check_family(self) -> 'ScanSpec':
        if self.family == 'conservative' and any(g != 0 for g in self.gamma):
            raise ValueError("conservative scans require gamma = 0")
        return self

    def w0_values(self) -> List[complex]:
        return [complex(math.inf, 0.0) if w == 'inf' else w.value for w in self.w0]


def _field_path(error: Dict[str, Any]) -> str:
    path = ".".join(str(part) for part in error.get('loc', ()))
    return path or "<root>"


def _validate(schema: type, data: Any, source: Optional[str]) -> Any:
    try:
        return schema.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        raise ScenarioError(_field_path(first), first.get('msg', 'invalid value'), source)


def _read_json(path: Union[str, Path]) -> Any:
    text = Path(path).read_text(encoding='utf-8')
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError("<root>", f"not valid JSON ({e.msg} at line {e.lineno})", str(path))


def parse_scenario(data: Any, source: Optional[str] = None) -> Scenario:
    return _validate(Scenario, data, source)


def load_scenario(path: Union[str, Path]) -> Scenario:
    """Read and validate a scenario file"""
    scenario = parse_scenario(_read_json(path), str(path))
    logger.info(f"[SCENARIO] 📄 loaded '{scenario.name}' ({scenario.model.family.value}) from {path}")
    return scenario


def parse_scan(data: Any, source: Optional[str] = None) -> ScanSpec:
    return _validate(ScanSpec, data, source)


def load_scan(path: Union[str, Path]) -> ScanSpec:
    """Read and validate a scan file"""
    spec = parse_scan(_read_json(path), str(path))
    logger.info(f"[SCENARIO] 📄 loaded scan '{spec.name}' with "
                f"{len(spec.omega) * len(spec.gamma) * len(spec.w0)} points from {path}")
    return spec


def schema_document() -> Dict[str, Any]:
    """JSON schemas for both file kinds"""
    return {
        'scenario': Scenario.model_json_schema(),
        'scan': ScanSpec.model_json_schema(),
    }
