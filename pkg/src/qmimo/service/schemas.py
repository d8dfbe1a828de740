"""Request/response models for the HTTP service."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..channel import CellModel
from ..experiments import Bits, ResultRow, ResultTable, ScenarioConfig
from ..quantizer import INFINITE, QuantizerSpec
from ..rates import RatePoint
from ..validation import CheckResult

BitsWire = int | Literal["inf"]


def bits_to_wire(bits: int | float) -> BitsWire:
    return "inf" if bits == INFINITE else int(bits)


class RhoOut(BaseModel):
    bits: BitsWire
    rho: float
    alpha: float
    mode: str


class QuantizerDesignRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    bits: Bits
    tolerance: float = Field(default=1e-12, gt=0)
    max_iterations: int = Field(default=10_000, ge=1)


class QuantizerSpecOut(BaseModel):
    bits: BitsWire
    rho: float
    alpha: float
    thresholds: list[float]
    levels: list[float]

    @classmethod
    def from_spec(cls, spec: QuantizerSpec) -> "QuantizerSpecOut":
        return cls(
            bits=bits_to_wire(spec.bits),
            rho=spec.rho,
            alpha=spec.alpha,
            thresholds=[float(t) for t in spec.thresholds],
            levels=[float(v) for v in spec.levels],
        )


class RateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    m_antennas: int = Field(ge=1)
    n_users: int = Field(ge=1)
    bits: Bits
    mode: Literal["table", "lloyd-max"] = "table"
    pu_db: float | None = None
    pu_linear: float | None = Field(default=None, gt=0)
    betas: list[float] | None = None
    drop_seed: int = 1006
    seed: int = 2001
    trials: int = Field(default=10_000, ge=100)

    @model_validator(mode="after")
    def _check(self):
        if (self.pu_db is None) == (self.pu_linear is None):
            raise ValueError("provide exactly one of pu_db or pu_linear")
        if self.betas is not None:
            if len(self.betas) != self.n_users:
                raise ValueError(
                    f"betas has {len(self.betas)} entries but n_users is {self.n_users}"
                )
            if any(b <= 0 for b in self.betas):
                raise ValueError("betas must be positive")
        return self

    def p_u(self) -> float:
        if self.pu_linear is not None:
            return self.pu_linear
        return 10.0 ** (self.pu_db / 10.0)


class EstimateOut(BaseModel):
    mean: float
    stderr: float
    trials: int


class UserRateOut(BaseModel):
    user: int
    mc: EstimateOut
    approx: float


class RatePointOut(BaseModel):
    m_antennas: int
    n_users: int
    bits: BitsWire
    alpha: float
    p_u_linear: float
    betas: list[float]
    seed: int
    per_user: list[UserRateOut]
    sum_rate_mc: EstimateOut
    sum_rate_approx: float

    @classmethod
    def from_point(
        cls,
        point: RatePoint,
        *,
        m_antennas: int,
        bits: int | float,
        alpha: float,
        p_u: float,
        betas: list[float],
        seed: int,
    ) -> "RatePointOut":
        per_user = [
            UserRateOut(
                user=i,
                mc=EstimateOut(mean=e.mean, stderr=e.stderr, trials=e.trials),
                approx=point.per_user_approx[i],
            )
            for i, e in enumerate(point.per_user_mc)
        ]
        return cls(
            m_antennas=m_antennas,
            n_users=len(betas),
            bits=bits_to_wire(bits),
            alpha=alpha,
            p_u_linear=p_u,
            betas=betas,
            seed=seed,
            per_user=per_user,
            sum_rate_mc=EstimateOut(
                mean=point.sum_rate_mc.mean,
                stderr=point.sum_rate_mc.stderr,
                trials=point.sum_rate_mc.trials,
            ),
            sum_rate_approx=point.sum_rate_approx,
        )


class ScenarioOverrides(BaseModel):
    """Optional per-request tweaks applied on top of a figure preset."""

    model_config = ConfigDict(extra="forbid")

    m_values: list[int] | None = None
    n_users: int | None = Field(default=None, ge=1)
    power_mode: Literal["fixed", "scaled"] | None = None
    pu_db: float | None = None
    eu_db: float | None = None
    bits_values: list[Bits] | None = None
    cell: CellModel | None = None
    trials: int | None = Field(default=None, ge=100)
    drop_seed: int | None = None
    fading_seed: int | None = None
    bandwidth_hz: float | None = Field(default=None, gt=0)
    c0_watt: float | None = Field(default=None, gt=0)
    c1_watt: float | None = Field(default=None, ge=0)
    drops: int | None = Field(default=None, ge=1)
    jobs: int = Field(default=1, ge=1)

    def as_overrides(self) -> dict:
        return self.model_dump(exclude_none=True, exclude={"jobs"})


class SweepRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config: ScenarioConfig
    jobs: int = Field(default=1, ge=1)


class ResultRowOut(BaseModel):
    m_antennas: int
    n_users: int
    bits: BitsWire
    p_u_linear: float
    sum_rate_mc: float
    sum_rate_mc_stderr: float
    sum_rate_approx: float
    energy_efficiency: float | None
    drop_seed: int
    fading_seed: int
    trials: int
    sum_rate_limit: float | None
    drop_index: int

    @classmethod
    def from_row(cls, row: ResultRow) -> "ResultRowOut":
        return cls(
            m_antennas=row.m_antennas,
            n_users=row.n_users,
            bits=bits_to_wire(row.bits),
            p_u_linear=row.p_u_linear,
            sum_rate_mc=row.sum_rate_mc,
            sum_rate_mc_stderr=row.sum_rate_mc_stderr,
            sum_rate_approx=row.sum_rate_approx,
            energy_efficiency=row.energy_efficiency,
            drop_seed=row.drop_seed,
            fading_seed=row.fading_seed,
            trials=row.trials,
            sum_rate_limit=row.sum_rate_limit,
            drop_index=row.drop_index,
        )


class ResultTableOut(BaseModel):
    rows: list[ResultRowOut]

    @classmethod
    def from_table(cls, table: ResultTable) -> "ResultTableOut":
        return cls(rows=[ResultRowOut.from_row(r) for r in table.rows])


class ValidateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    trials: int = Field(default=10_000, ge=100)
    seed: int = 7
    aqnm_samples: int = Field(default=1_000_000, ge=10_000)


class CheckOut(BaseModel):
    name: str
    estimate: float
    expected: float
    zscore: float | None
    bound: float | None
    passed: bool

    @classmethod
    def from_result(cls, result: CheckResult) -> "CheckOut":
        return cls(
            name=result.name,
            estimate=result.estimate,
            expected=result.expected,
            zscore=result.zscore,
            bound=result.bound,
            passed=result.passed,
        )


class ValidateResponse(BaseModel):
    checks: list[CheckOut]
    all_passed: bool
