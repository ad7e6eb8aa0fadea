"""JSON response models of the command line. Field names are a stable interface.

Exact quantities are always rational strings ("p/q" or "p"), never floats.
"""

from fractions import Fraction
from typing import Dict, List, Optional

from pydantic import BaseModel, Field

from models import (Arc, CriticalData, InvariantArcCheck, LeoCertificate, LeoDecision,
                    MeasureCheck, MixingReport, PeriodicArcWitness, RotationSet, fraction_str)


def _rational(x: Optional[Fraction]) -> Optional[str]:
    return None if x is None else fraction_str(x)


class ArcModel(BaseModel):
    start: str = Field(..., description="Start point in [0, 1) as a rational string")
    length: str = Field(..., description="Arc length in (0, 1]; \"1\" is the full circle")
    end: str = Field(..., description="End point in [0, 1)")
    full: bool = Field(..., description="Whether the arc is the whole circle")

    @classmethod
    def from_arc(cls, arc: Arc) -> 'ArcModel':
        return cls(start=str(arc.start), length=fraction_str(arc.length),
                   end=str(arc.end), full=arc.is_full)


class ErrorResponse(BaseModel):
    error: str = Field(..., description="Stable error code")
    detail: str = Field(..., description="Human readable message")


class MeasureCheckResponse(BaseModel):
    measure_preserving: bool
    witness: Optional[str] = Field(
        default=None, description="Non-critical y whose branch sum differs from 1")
    branch_sum: Optional[str] = Field(default=None, description="Branch sum at the witness")

    @classmethod
    def from_check(cls, check: MeasureCheck) -> 'MeasureCheckResponse':
        return cls(measure_preserving=check.measure_preserving,
                   witness=_rational(check.witness), branch_sum=_rational(check.branch_sum))


class EvalResponse(BaseModel):
    x: str
    value: str = Field(..., description="f(x) on the circle")
    lifted: str = Field(..., description="Lifting value F(x)")


class CriticalDataResponse(BaseModel):
    turning_points: List[str]
    critical_values: List[str]
    kinds: List[str]
    kappa: Optional[str] = None
    zeta: str

    @classmethod
    def from_data(cls, data: CriticalData) -> 'CriticalDataResponse':
        return cls(turning_points=[str(p) for p in data.turning_points],
                   critical_values=[str(v) for v in data.critical_values],
                   kinds=list(data.kinds), kappa=_rational(data.kappa),
                   zeta=fraction_str(data.zeta))


class LeoTimeResponse(BaseModel):
    arc: ArcModel
    leo_time: Optional[int] = Field(
        default=None, description="Smallest n with f^n(A) = S1")
    timeout: bool = Field(..., description="True when no such n was found within max_n")
    max_n: int


class CertificateResponse(BaseModel):
    certified: bool
    reason: Optional[str] = None
    kappa: Optional[str] = None
    zeta: Optional[str] = None
    eta: Optional[str] = None
    eta_raw: Optional[str] = None
    xi: Optional[str] = None
    delta_lb: Optional[str] = None
    growth_min: Optional[str] = None
    epsilon: Optional[str] = None

    @classmethod
    def from_certificate(cls, certificate: LeoCertificate) -> 'CertificateResponse':
        return cls(certified=certificate.certified, reason=certificate.reason,
                   kappa=_rational(certificate.kappa), zeta=_rational(certificate.zeta),
                   eta=_rational(certificate.eta), eta_raw=_rational(certificate.eta_raw),
                   xi=_rational(certificate.xi), delta_lb=_rational(certificate.delta_lb),
                   growth_min=_rational(certificate.growth_min),
                   epsilon=_rational(certificate.epsilon))


class WitnessModel(BaseModel):
    arc: ArcModel
    period: int = Field(..., ge=1)
    orbit: List[ArcModel]

    @classmethod
    def from_witness(cls, witness: PeriodicArcWitness) -> 'WitnessModel':
        return cls(arc=ArcModel.from_arc(witness.arc), period=witness.period,
                   orbit=[ArcModel.from_arc(a) for a in witness.orbit])


class PeriodicArcResponse(BaseModel):
    witness: Optional[WitnessModel] = Field(
        default=None, description="Periodic arc with endpoints in CV(f), smallest period first")


class DecisionResponse(BaseModel):
    leo: bool
    witness: Optional[WitnessModel] = None
    period_bound: int
    exhaustive: bool = Field(
        ..., description="False when the period bound is below the turning-point count")

    @classmethod
    def from_decision(cls, decision: LeoDecision) -> 'DecisionResponse':
        witness = WitnessModel.from_witness(decision.witness) if decision.witness else None
        return cls(leo=decision.leo, witness=witness, period_bound=decision.period_bound,
                   exhaustive=decision.exhaustive)


class RotationEntryModel(BaseModel):
    beta: str
    witnesses: List[WitnessModel] = Field(..., description="Periodic arcs of f o r_beta, smallest period first")


class RotationSetResponse(BaseModel):
    betas: List[str]
    entries: List[RotationEntryModel]
    candidates_checked: int

    @classmethod
    def from_set(cls, rotation_set: RotationSet) -> 'RotationSetResponse':
        return cls(betas=[str(beta) for beta in rotation_set.betas],
                   entries=[RotationEntryModel(beta=str(beta),
                                               witnesses=[WitnessModel.from_witness(w) for w in ws])
                            for beta, ws in rotation_set.entries],
                   candidates_checked=rotation_set.candidates_checked)


class CorrelationResponse(BaseModel):
    a: ArcModel
    b: ArcModel
    n: int = Field(..., ge=0)
    correlation: str = Field(..., description="lambda(f^-n(A) & B) - lambda(A) lambda(B), exact")


class BirkhoffResponse(BaseModel):
    function: str
    length: int
    value: float = Field(..., description="Time average along the orbit")
    integral: float = Field(..., description="Space average of the test function")
    exact_steps: int = Field(..., description="Orbit steps computed in exact arithmetic")


class ReportRowModel(BaseModel):
    function: str
    n: int
    value: str = Field(..., description="Exact rational for correlations, repr of a float otherwise")
    defect: float


class MixingReportResponse(BaseModel):
    map: str
    length: int
    starts: int
    threshold: float
    correlations_decay: bool
    ergodic_consistent: bool
    mixing_consistent: bool
    final_defects: Dict[str, float]
    truncated_at: Dict[str, int]
    correlations: List[ReportRowModel]
    birkhoff: List[ReportRowModel]

    @classmethod
    def from_report(cls, report: MixingReport) -> 'MixingReportResponse':
        def rows(items):
            return [ReportRowModel(function=r.function, n=r.n,
                                   value=str(r.value) if isinstance(r.value, Fraction) else repr(r.value),
                                   defect=r.defect) for r in items]
        return cls(map=report.map_name, length=report.length, starts=report.starts,
                   threshold=report.threshold, correlations_decay=report.correlations_decay,
                   ergodic_consistent=report.ergodic_consistent,
                   mixing_consistent=report.mixing_consistent,
                   final_defects=report.final_defects, truncated_at=report.truncated_at,
                   correlations=rows(report.correlations), birkhoff=rows(report.birkhoff))


class TentInvariantResponse(BaseModel):
    alpha: str
    beta: str
    conditions_hold: bool = Field(
        ..., description="alpha < -beta and alpha + beta > -1/2 for representatives in [-1/2, 1/2)")
    J: ArcModel
    image: ArcModel
    invariant: bool = Field(..., description="T(J) = J exactly")
    subarc_leo_time: Optional[int] = Field(
        default=None, description="leo time of the middle third of J (null means timeout)")

    @classmethod
    def from_check(cls, check: InvariantArcCheck,
                   subarc_leo_time: Optional[int]) -> 'TentInvariantResponse':
        return cls(alpha=str(check.alpha), beta=str(check.beta),
                   conditions_hold=check.conditions_hold, J=ArcModel.from_arc(check.arc),
                   image=ArcModel.from_arc(check.image), invariant=check.invariant,
                   subarc_leo_time=subarc_leo_time)


class Slope5Response(BaseModel):
    measure_preserving: bool
    leo: bool
    rotations: int = Field(..., description="Number of (alpha, beta) grid points")
    arcs_per_rotation: int
    arc_length: str
    max_leo_time: Optional[int] = Field(
        default=None, description="Largest leo time observed; null if any arc timed out")
    all_finite: bool
    min_growth: Optional[str] = Field(
        default=None, description="Smallest growth factor over iterates covering < 3 turning points")
    growth_bound: str
    growth_bound_holds: bool


class Inv3Response(BaseModel):
    measure_preserving: bool
    critical: CriticalDataResponse
    witness: Optional[WitnessModel] = None
    equal_length_orbit: bool
    endpoints_in_cv: bool
    rotation_set: RotationSetResponse
    contains_zero: bool
    max_witness_period: int
    turning_point_count: int
