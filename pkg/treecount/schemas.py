from __future__ import annotations

import json
from datetime import datetime
from typing import Annotated, Any, Optional

from pydantic import BaseModel, ConfigDict, PlainSerializer, field_validator

from treecount.census import AlphaEntry, CensusResult, EvidenceRow, GrowthWitness, Unknown
from treecount.cfrac import AlternatingCF, CFExpansion, NotRepresentable, convergents, format_cf, format_rational, matrix_of_quotients
from treecount.dimension import DimensionCertificate
from treecount.orbit import CongruenceQuotient, SemigroupBall, growth_exponent
from treecount.treegraph import GraphBuildReport, MarkedGraph

SCHEMA_VERSION = "1"

# exact integers travel as decimal strings
BigInt = Annotated[int, PlainSerializer(lambda v: str(v), return_type=str)]


class _Out(BaseModel):
    model_config = ConfigDict(from_attributes=True)

    schema_version: str = SCHEMA_VERSION


class CFOut(_Out):
    value: str
    expansion: str
    convergents: list[str]
    bottom_row: list[BigInt]
    representable: bool
    alternating: Optional[list[int]] = None

    @classmethod
    def from_expansion(cls, cf: CFExpansion, form: AlternatingCF | NotRepresentable | None) -> "CFOut":
        return cls(
            value=format_rational(cf.value),
            expansion=format_cf(cf),
            convergents=[format_rational(c) for c in convergents(cf)],
            bottom_row=list(matrix_of_quotients(cf.quotients).bottom_row),
            representable=isinstance(form, AlternatingCF),
            alternating=list(form.bs) if isinstance(form, AlternatingCF) else None,
        )


class GraphReportOut(_Out):
    bs: list[int]
    trimmed: bool
    vertices: int
    edges: list[list[int]]
    marked: Optional[list[int]] = None
    tau: BigInt
    tau_del: Optional[BigInt] = None
    tau_con: Optional[BigInt] = None
    simple: bool
    planar: bool
    matches_oracle: bool

    @classmethod
    def from_report(cls, report: GraphBuildReport) -> "GraphReportOut":
        g = report.graph
        return cls(
            bs=list(report.bs),
            trimmed=report.trimmed,
            vertices=report.vertex_count,
            edges=[list(e) for e in g.edges],
            marked=list(g.marked_edge) if isinstance(g, MarkedGraph) else None,
            tau=report.tau,
            tau_del=report.tau_del,
            tau_con=report.tau_con,
            simple=report.simple,
            planar=report.planar,
            matches_oracle=report.matches_oracle,
        )


class CensusOut(_Out):
    n: int
    planar: bool
    values: list[BigInt]
    count: int

    @classmethod
    def from_result(cls, result: CensusResult) -> "CensusOut":
        return cls(n=result.n, planar=result.planar, values=list(result.values), count=result.graph_count)


class AlphaOut(_Out):
    t: BigInt
    alpha: Optional[int] = None
    exact: bool = False
    upper_bound: Optional[int] = None
    upper_bound_bs: Optional[list[int]] = None
    witness_edges: Optional[list[list[int]]] = None
    reason: Optional[str] = None

    @classmethod
    def from_entry(cls, entry: AlphaEntry | Unknown) -> "AlphaOut":
        bs = list(entry.upper_bound_bs) if entry.upper_bound_bs else None
        if isinstance(entry, Unknown):
            return cls(t=entry.t, upper_bound=entry.upper_bound, upper_bound_bs=bs, reason=entry.reason)
        return cls(
            t=entry.t,
            alpha=entry.alpha,
            exact=True,
            upper_bound=entry.upper_bound,
            upper_bound_bs=bs,
            witness_edges=[list(e) for e in entry.witness.edges],
        )


class EvidenceRowOut(_Out):
    t: BigInt
    min_letter: Optional[int] = None
    u: Optional[BigInt] = None
    bs: Optional[list[int]] = None
    construction_vertices: Optional[int] = None
    alpha: Optional[int] = None
    log_ratio: Optional[float] = None

    @classmethod
    def from_row(cls, row: EvidenceRow) -> "EvidenceRowOut":
        return cls(
            t=row.t,
            min_letter=row.min_letter,
            u=row.u,
            bs=list(row.bs) if row.bs else None,
            construction_vertices=row.construction_vertices,
            alpha=row.alpha,
            log_ratio=row.log_ratio,
        )


class EvidenceOut(_Out):
    T: int
    max_letter: int
    largest_min_letter: Optional[int] = None
    largest_log_ratio: Optional[float] = None
    unrepresented: list[int]
    rows: list[EvidenceRowOut]

    @classmethod
    def from_rows(cls, T: int, max_letter: int, rows: list[EvidenceRow]) -> "EvidenceOut":
        letters = [r.min_letter for r in rows if r.min_letter is not None]
        ratios = [r.log_ratio for r in rows if r.log_ratio is not None]
        return cls(
            T=T,
            max_letter=max_letter,
            largest_min_letter=max(letters, default=None),
            largest_log_ratio=max(ratios, default=None),
            unrepresented=[r.t for r in rows if r.min_letter is None],
            rows=[EvidenceRowOut.from_row(r) for r in rows],
        )


class GrowthOut(_Out):
    A: int
    budget: int
    cases: int
    count: int
    rate: float

    @classmethod
    def from_witness(cls, w: GrowthWitness) -> "GrowthOut":
        return cls(A=w.A, budget=w.budget, cases=w.cases, count=w.count, rate=w.rate)


class BallStatsOut(_Out):
    A: int
    N: float
    norm: str
    size: int
    growth_exponent: float

    @classmethod
    def from_ball(cls, sball: SemigroupBall) -> "BallStatsOut":
        return cls(A=sball.A, N=sball.N, norm=sball.norm_kind, size=sball.size, growth_exponent=growth_exponent(sball))


class NumeratorsOut(_Out):
    A: int
    N: float
    kind: str
    values: list[BigInt]


class TauOut(_Out):
    vertices: int
    edges: int
    tau: BigInt
    tau_del: Optional[BigInt] = None
    tau_con: Optional[BigInt] = None
    simple: bool
    planar: bool


class RepNumOut(_Out):
    A: int
    N: float
    n: BigInt
    count: int
    ball_size: int


class CongruenceOut(_Out):
    A: int
    q: int
    reached: int
    order: int
    full: bool
    contains_identity: bool
    all_residues: bool

    @classmethod
    def from_quotient(cls, cq: CongruenceQuotient, residues: set[int]) -> "CongruenceOut":
        return cls(
            A=cq.A,
            q=cq.q,
            reached=cq.size,
            order=cq.order,
            full=cq.full,
            contains_identity=cq.contains_identity,
            all_residues=len(residues) == cq.q,
        )


class AdmissibleOut(_Out):
    A: int
    qmax: int
    all_full: bool
    quotients: list[CongruenceOut]


class CertificateOut(_Out):
    kind: str
    s: float
    alphabet: Optional[int] = None
    family: str = "alternating"
    certified: bool
    margin: float
    min_f: float
    eigenvalue: float
    coeffs: list[float]
    chebyshev_coeffs: list[float]
    eigenvector: list[float]
    verification: dict[str, Any]

    @classmethod
    def from_certificate(cls, cert: DimensionCertificate) -> "CertificateOut":
        return cls(
            kind=cert.kind,
            s=cert.s,
            alphabet=cert.alphabet,
            family=cert.family,
            certified=cert.certified,
            margin=cert.margin,
            min_f=cert.min_f,
            eigenvalue=cert.poly.eigenvalue,
            coeffs=list(cert.poly.coeffs),
            chebyshev_coeffs=list(cert.poly.cheb_coeffs),
            eigenvector=list(cert.poly.eigenvector),
            verification=dict(cert.verification),
        )


class PressureOut(_Out):
    A: int
    s: float
    depth: int
    method: str
    family: str
    value: float


class ThresholdOut(_Out):
    A: int
    lo: float
    hi: float
    order: int


class RunRecordOut(_Out):
    id: int
    command: str
    inputs: dict[str, Any]
    outputs: Optional[Any] = None
    argv: Optional[list[str]] = None
    exit_code: int
    artifact_version: str
    created_at: datetime

    @field_validator("inputs", "outputs", "argv", mode="before")
    @classmethod
    def _load_json(cls, v):
        if isinstance(v, str):
            return json.loads(v)
        return v


class CheckOut(BaseModel):
    name: str
    claim: str
    ok: bool
    detail: str = ""


class SelftestOut(_Out):
    status: str
    checks: list[CheckOut]
