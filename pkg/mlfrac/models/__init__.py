"""Data models for the mlfrac library."""
import hashlib
import json
import math
from enum import Enum
from typing import Any, Callable, Dict, List, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


# Mittag-Leffler evaluation

class MLParams(BaseModel):
    """Mittag-Leffler parameters (alpha, beta)."""
    model_config = ConfigDict(frozen=True)

    alpha: float = Field(..., gt=0)
    beta: float = Field(1.0, gt=0)


class SeriesControl(BaseModel):
    """Truncation and precision controls for series evaluation."""
    model_config = ConfigDict(frozen=True)

    tol: float = Field(1e-14, gt=0, lt=1)
    max_terms: int = Field(500, ge=10)
    cancel_ratio_limit: float = Field(1e12, ge=1)
    z_max: float = Field(50.0, gt=0)
    z_switch: float = Field(10.0, gt=0)
    extended_precision: bool = True
    asymptotic_rel_tol: float = Field(1e-12, gt=0, lt=1)


class PrecisionFlag(str, Enum):
    """Whether a series value can be trusted to the requested tolerance."""
    OK = "ok"
    DEGRADED = "degraded"


class MLBranch(str, Enum):
    """Evaluation path taken by ml_eval."""
    SERIES = "series"
    EXTENDED = "extended"
    ASYMPTOTIC = "asymptotic"
    EXPONENTIAL = "exponential"


class MLValue(BaseModel):
    """A Mittag-Leffler value with its error bookkeeping."""
    model_config = ConfigDict(frozen=True)

    value: float
    est_error: float = Field(..., ge=0)
    terms_used: int = Field(..., ge=0)
    precision_flag: PrecisionFlag = PrecisionFlag.OK
    branch: MLBranch = MLBranch.SERIES


# Logarithms with Mittag-Leffler base

class LogBaseContext(BaseModel):
    """Base b = E_alpha(1) for the ordinary base-b logarithm."""
    model_config = ConfigDict(frozen=True)

    alpha: float = Field(..., gt=0, le=1)
    base_value: float = Field(..., gt=1)
    ln_base: float = Field(..., gt=0)


class InverseResult(BaseModel):
    """Solution x of E_alpha(x) = y."""
    model_config = ConfigDict(frozen=True)

    y: float = Field(..., gt=0)
    x: float
    iterations: int = Field(..., ge=0)
    residual: float = Field(..., ge=0)


class PropositionReport(BaseModel):
    """One row of the product/quotient logarithm identities."""
    model_config = ConfigDict(frozen=True)

    alpha: float
    x1: float
    x2: float
    log_product: float
    log_quotient: float
    log_x1: float
    log_x2: float
    log_sum: float
    log_difference: float
    product_gap: float
    quotient_gap: float
    # |L(E(x1) * E(x2)) - (x1 + x2)| and |L(E(x1) / E(x2)) - (x1 - x2)|
    inverse_sum_gap: Optional[float] = None
    inverse_difference_gap: Optional[float] = None


# Time grids and curves

class TimeGrid(BaseModel):
    """Uniform grid t_i = i * h on [0, t_end]."""
    model_config = ConfigDict(frozen=True)

    t_end: float = Field(..., gt=0)
    n_steps: int = Field(..., ge=2)

    @property
    def h(self) -> float:
        return self.t_end / self.n_steps

    @property
    def node_count(self) -> int:
        return self.n_steps + 1

    def nodes(self) -> np.ndarray:
        """Grid nodes, built as i * h so every node is reproducible."""
        return np.arange(self.node_count, dtype=float) * self.h

    def halved(self) -> "TimeGrid":
        """Same horizon with half the step."""
        return TimeGrid(t_end=self.t_end, n_steps=2 * self.n_steps)


class SolutionCurve(BaseModel):
    """Values sampled on a TimeGrid, starting at node `start_index`."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: TimeGrid
    values: np.ndarray
    start_index: int = Field(0, ge=0)
    label: str = ""

    @field_validator("values", mode="before")
    @classmethod
    def _as_array(cls, v: Any) -> np.ndarray:
        return np.asarray(v, dtype=float)

    @model_validator(mode="after")
    def _check_shape(self) -> "SolutionCurve":
        expected = self.grid.node_count - self.start_index
        if self.values.ndim != 1 or self.values.shape[0] != expected:
            raise ValueError(
                f"values must have length {expected}, got shape {self.values.shape}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("values must be finite")
        return self

    def times(self) -> np.ndarray:
        return self.grid.nodes()[self.start_index:]

    @property
    def final_value(self) -> float:
        return float(self.values[-1])

    def to_frame(self, column: Optional[str] = None) -> pd.DataFrame:
        return pd.DataFrame({"t": self.times(), column or self.label or "value": self.values})


class RhsKind(str, Enum):
    """Right-hand sides f(t, u) of D^alpha u = f(t, u)."""
    LOGISTIC = "logistic"
    SI = "si"
    SIS = "sis"
    CUSTOM = "custom"


class RhsSpec(BaseModel):
    """Right-hand side of a fractional initial-value problem."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: RhsKind
    k: Optional[float] = Field(None, gt=0)
    alpha_power: bool = True
    N: Optional[float] = Field(None, gt=0)
    A: Optional[float] = Field(None, gt=0)
    beta_contact: Optional[float] = Field(None, gt=0)
    func: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None

    @model_validator(mode="after")
    def _check_parameters(self) -> "RhsSpec":
        required = {
            RhsKind.LOGISTIC: ("k",),
            RhsKind.SI: ("N", "beta_contact"),
            RhsKind.SIS: ("A", "beta_contact"),
            RhsKind.CUSTOM: ("func",),
        }[self.kind]
        missing = [name for name in required if getattr(self, name) is None]
        if missing:
            raise ValueError(f"{self.kind.value} right-hand side requires {', '.join(missing)}")
        return self

    @classmethod
    def logistic(cls, k: float, alpha_power: bool = True) -> "RhsSpec":
        return cls(kind=RhsKind.LOGISTIC, k=k, alpha_power=alpha_power)

    @classmethod
    def si(cls, N: float, beta_contact: float) -> "RhsSpec":
        return cls(kind=RhsKind.SI, N=N, beta_contact=beta_contact)

    @classmethod
    def sis(cls, A: float, beta_contact: float) -> "RhsSpec":
        return cls(kind=RhsKind.SIS, A=A, beta_contact=beta_contact)

    @classmethod
    def custom(cls, func: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> "RhsSpec":
        return cls(kind=RhsKind.CUSTOM, func=func)


class ResidualReport(BaseModel):
    """Caputo residual of a candidate curve."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    max_residual: float = Field(..., ge=0)
    residual_curve: SolutionCurve
    scheme_error_estimate: float = Field(..., ge=0)
    skip_nodes: int = Field(..., ge=0)


# Logistic and epidemic problems

class ArgInterpretation(str, Enum):
    """Readings of the integral k^a/Gamma(2-a) * int t^(1-a) dt^a."""
    JUMARIE_CONVOLUTION = "jumarie"
    DIFFERENTIAL_SUBSTITUTION = "substitution"


class LogisticProblem(BaseModel):
    """D^alpha u = k^alpha u (1 - u), u(0) = u0."""
    model_config = ConfigDict(frozen=True)

    alpha: float = Field(..., gt=0, le=1)
    k: float = Field(..., gt=0)
    u0: float = Field(..., gt=0, lt=1)


class EpidemicModel(str, Enum):
    SI = "si"
    SIS = "sis"


class EpidemicProblem(BaseModel):
    """Closed-population SI/SIS problem with fractional order alpha."""
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    alpha: float = Field(..., gt=0, le=1)
    N: float = Field(..., gt=0)
    beta_contact: float = Field(..., gt=0)
    lambda_: float = Field(0.0, ge=0, alias="lambda")
    I0: float = Field(..., gt=0)

    @model_validator(mode="after")
    def _check_initial(self) -> "EpidemicProblem":
        if self.I0 >= self.N:
            raise ValueError("I0 must be below N")
        return self

    @property
    def endemic_level(self) -> float:
        """A = N - lambda / beta."""
        return self.N - self.lambda_ / self.beta_contact


class ComparisonReport(BaseModel):
    """Candidate curves side by side with deviations and residuals."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    frame: pd.DataFrame
    deviations: Dict[str, float]
    residuals: Dict[str, ResidualReport]
    notes: List[str] = Field(default_factory=list)

    def deviation_frame(self) -> pd.DataFrame:
        rows = [
            {"pair": pair, "max_deviation": value}
            for pair, value in sorted(self.deviations.items())
        ]
        return pd.DataFrame(rows, columns=["pair", "max_deviation"])

    def residual_frame(self) -> pd.DataFrame:
        rows = [
            {
                "candidate": name,
                "max_residual": report.max_residual,
                "scheme_error_estimate": report.scheme_error_estimate,
            }
            for name, report in sorted(self.residuals.items())
        ]
        return pd.DataFrame(rows, columns=["candidate", "max_residual", "scheme_error_estimate"])


# CLI configuration and artifacts

class OutputFormat(str, Enum):
    CSV = "csv"
    STRUCTURED = "structured"


class SolveMethod(str, Enum):
    PAPER = "paper"
    WEST = "west"
    FABM = "fabm"
    CLASSICAL = "classical"


class ModelName(str, Enum):
    LOGISTIC = "logistic"
    SI = "si"
    SIS = "sis"


class RunConfig(BaseModel):
    """Run configuration shared by every CLI command."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    tol: float = Field(1e-14, gt=0, lt=1)
    max_terms: int = Field(500, ge=10, le=100000)
    cancel_ratio_limit: float = Field(1e12, ge=1)
    z_max: float = Field(50.0, gt=0, le=1000)
    z_switch: float = Field(10.0, gt=0)
    extended_precision: bool = True
    interpretation: ArgInterpretation = ArgInterpretation.JUMARIE_CONVOLUTION
    alpha_exponent_rates: bool = False
    corrector_passes: int = Field(1, ge=1, le=5)
    skip_nodes: int = Field(5, ge=0)
    divergence_bound: float = Field(1e8, gt=0)
    output_format: OutputFormat = OutputFormat.CSV
    output_path: Optional[str] = None

    @model_validator(mode="after")
    def _check_switch(self) -> "RunConfig":
        if self.z_switch >= self.z_max:
            raise ValueError("z_switch must be below z_max")
        return self

    def series_control(self) -> SeriesControl:
        return SeriesControl(
            tol=self.tol,
            max_terms=self.max_terms,
            cancel_ratio_limit=self.cancel_ratio_limit,
            z_max=self.z_max,
            z_switch=self.z_switch,
            extended_precision=self.extended_precision,
        )

    def digest(self) -> str:
        """Short SHA-256 of the canonical JSON form (output path excluded)."""
        payload = self.model_dump(mode="json", exclude={"output_path"})
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]


class TableArtifact(BaseModel):
    """Labelled matrix of reals with a provenance note."""
    model_config = ConfigDict(frozen=True)

    name: str
    row_labels: List[str]
    column_labels: List[str]
    cells: List[List[float]]
    provenance: str = ""
    row_header: str = "row"

    @model_validator(mode="after")
    def _check_dimensions(self) -> "TableArtifact":
        if len(self.cells) != len(self.row_labels):
            raise ValueError("cells must have one row per row label")
        for row in self.cells:
            if len(row) != len(self.column_labels):
                raise ValueError("every row must have one cell per column label")
            if not all(math.isfinite(c) for c in row):
                raise ValueError("cells must be finite")
        return self

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.cells, columns=self.column_labels)
        frame.insert(0, self.row_header, self.row_labels)
        return frame

    def cell(self, row: str, column: str) -> float:
        return self.cells[self.row_labels.index(row)][self.column_labels.index(column)]
