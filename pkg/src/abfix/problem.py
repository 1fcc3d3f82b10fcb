"""Problem files: strict JSON documents describing one abfix task."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Annotated, Literal, Optional, Union

from pydantic import (BaseModel, ConfigDict, Field, ValidationError,
                      model_validator)

from . import builtins
from .contraction import ContractionSpec
from .errors import AbfixError, ContractError

FORMAT_VERSION = "1.0"

TASKS = ("verify-metric", "classify", "estimate-contraction",
         "solve-map", "solve-fredholm", "solve-ode")


class ProblemFileError(AbfixError, ValueError):
    """A problem file is malformed or violates a constraint."""


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True, frozen=True)


class IntervalDomain(_Strict):
    kind: Literal["interval"]
    lower: float
    upper: float

    @model_validator(mode="after")
    def _ordered(self):
        if not self.lower <= self.upper:
            raise ValueError("domain: lower must be <= upper")
        return self


class RealLineDomain(_Strict):
    kind: Literal["real-line"]
    scale: float = Field(10.0, gt=0)


class PointsDomain(_Strict):
    kind: Literal["points"]
    points: list[float] = Field(min_length=1)


class GridDomain(_Strict):
    kind: Literal["grid"]
    lower: float = 0.0
    upper: float = 1.0
    intervals: int = Field(100, ge=1)
    value_range: tuple[float, float] = (-1.0, 1.0)

    @model_validator(mode="after")
    def _ordered(self):
        if not self.lower < self.upper:
            raise ValueError("domain: lower must be < upper")
        return self


DomainSpec = Annotated[Union[IntervalDomain, RealLineDomain, PointsDomain, GridDomain],
                       Field(discriminator="kind")]


class SpaceSpec(_Strict):
    name: Literal["abs", "abs-squared", "sup-grid"]
    domain: Optional[DomainSpec] = None
    alpha: Optional[float] = Field(None, ge=1)
    beta: Optional[float] = Field(None, ge=1)


class VerifyMetricTask(_Strict):
    space: SpaceSpec
    alpha: float = Field(ge=1)
    beta: float = Field(ge=1)
    n_triples: int = Field(10_000, ge=1)
    witnesses: list[tuple[float, float, float]] = []


class ClassifyTask(_Strict):
    space: SpaceSpec
    n_triples: int = Field(10_000, ge=1)
    witnesses: list[tuple[float, float, float]] = []


def _check_name(table, value, what):
    if value not in table:
        raise ValueError(f"unknown {what} {value!r}; known: {sorted(table)}")
    return value


class EstimateContractionTask(_Strict):
    map: str
    space: SpaceSpec
    kind: Literal["banach", "alpha-beta", "weak-alpha-beta", "kannan", "reich"]
    n_pairs: int = Field(10_000, ge=1)
    witnesses: list[tuple[float, float]] = []

    @model_validator(mode="after")
    def _known(self):
        _check_name(builtins.MAPS, self.map, "map")
        return self


class _Stopping(_Strict):
    tol: float = Field(1e-10, gt=0)
    max_iter: int = Field(10_000, ge=1)
    mode: Literal["a-posteriori", "a-priori-if-available"] = "a-priori-if-available"


class SolveMapTask(_Stopping):
    map: str
    space: SpaceSpec
    x0: float
    kind: Literal["banach", "alpha-beta", "weak-alpha-beta", "kannan", "reich"]
    constants: dict[str, float]

    @model_validator(mode="after")
    def _valid(self):
        _check_name(builtins.MAPS, self.map, "map")
        try:
            ContractionSpec.from_dict(self.kind, self.constants)
        except ContractError as exc:
            raise ValueError(f"constants: {exc}") from None
        return self

    def spec(self) -> ContractionSpec:
        return ContractionSpec.from_dict(self.kind, self.constants)


class SolveFredholmTask(_Stopping):
    kernel: str
    m: float
    n: float
    M: int = Field(1000, ge=1)
    quadrature: Literal["trapezoid", "simpson"] = "trapezoid"
    lipschitz: Optional[float] = Field(None, gt=0)
    x0: float = 0.0

    @model_validator(mode="after")
    def _valid(self):
        _check_name(builtins.KERNELS, self.kernel, "kernel")
        if not self.m < self.n:
            raise ValueError("m must be < n")
        if self.quadrature == "simpson" and self.M % 2:
            raise ValueError("M must be even for simpson quadrature")
        return self


class SolveOdeTask(_Stopping):
    rhs: str
    s0: float
    r0: float
    h: float = Field(gt=0)
    nodes_per_side: int = Field(500, ge=1)
    lipschitz: Optional[float] = Field(None, gt=0)

    @model_validator(mode="after")
    def _valid(self):
        _check_name(builtins.RHS, self.rhs, "rhs")
        return self


class OutputSpec(_Strict):
    summary: str = "summary.json"
    trace: str = "trace.csv"
    solution: str = "solution.csv"


class ProblemFile(_Strict):
    """One task plus its parameter block.

    The block is keyed by the task name and must be the only block present.
    """

    version: Literal["1.0"] = FORMAT_VERSION
    task: Literal[TASKS]
    seed: int = Field(0, ge=0)
    output: OutputSpec = OutputSpec()
    verify_metric: Optional[VerifyMetricTask] = Field(None, alias="verify-metric")
    classify: Optional[ClassifyTask] = None
    estimate_contraction: Optional[EstimateContractionTask] = Field(
        None, alias="estimate-contraction")
    solve_map: Optional[SolveMapTask] = Field(None, alias="solve-map")
    solve_fredholm: Optional[SolveFredholmTask] = Field(None, alias="solve-fredholm")
    solve_ode: Optional[SolveOdeTask] = Field(None, alias="solve-ode")

    @model_validator(mode="after")
    def _one_block(self):
        present = [t for t in TASKS if getattr(self, t.replace("-", "_")) is not None]
        if len(present) != 1:
            raise ValueError(f"exactly one task block required, found {present or 'none'}")
        if present[0] != self.task:
            raise ValueError(f"task is {self.task!r} but the block is {present[0]!r}")
        return self

    @property
    def block(self):
        return getattr(self, self.task.replace("-", "_"))

    def to_dict(self) -> dict:
        return self.model_dump(mode="json", by_alias=True, exclude_none=True)


def _format_validation(exc: ValidationError) -> str:
    lines = []
    for err in exc.errors():
        loc = ".".join(str(p) for p in err["loc"]) or "<root>"
        msg = err["msg"].removeprefix("Value error, ")
        lines.append(f"{loc}: {msg}")
    return "; ".join(lines)


def parse_problem(data: dict) -> ProblemFile:
    try:
        return ProblemFile.model_validate(data)
    except ValidationError as exc:
        raise ProblemFileError(f"invalid problem: {_format_validation(exc)}") from None


def parse_problem_file(path) -> ProblemFile:
    """Read and validate a JSON problem file.

    Raises
    ------
    ProblemFileError
        On a syntax error (reported with line and column) or on any field
        violating its constraint.
    """
    path = Path(path)
    text = path.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFileError(
            f"{path}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ProblemFileError(f"{path}: top level must be an object")
    return parse_problem(data)


def problem_schema() -> dict:
    return ProblemFile.model_json_schema(by_alias=True)
