# treecount/census.py
"""
Exhaustive spanning-tree census of small connected simple (planar) graphs:
the value sets T(n), the minimal vertex count alpha(t), and desk-scale
witnesses for the growth of the values reachable by the trimmed construction.
Also the smallest letter bound with which an alternating form reaches each t.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import repeat
from typing import Iterable, Optional, Union

import networkx as nx

from treecount.cfrac import AlternatingCF, iter_compositions, to_alternating
from treecount.core.config import settings
from treecount.errors import DomainError, OutOfRange
from treecount.treegraph import Multigraph, build_trimmed, tau

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CensusResult:
    n: int
    planar: bool
    values: tuple[int, ...]
    graph_count: int
    witnesses: dict[int, Multigraph] = field(default_factory=dict, compare=False, repr=False)

    def __contains__(self, t: int) -> bool:
        return t in self.witnesses

    @property
    def count(self) -> int:
        return len(self.values)

    def to_payload(self) -> dict:
        return {
            "n": self.n,
            "planar": self.planar,
            "values": [str(v) for v in self.values],
            "count": self.graph_count,
        }


@dataclass(frozen=True)
class AlphaEntry:
    t: int
    alpha: int
    witness: Multigraph
    upper_bound: Optional[int] = None
    upper_bound_bs: Optional[tuple[int, ...]] = None


@dataclass(frozen=True)
class Unknown:
    t: int
    search_cap: int
    upper_bound: Optional[int] = None
    upper_bound_bs: Optional[tuple[int, ...]] = None
    reason: str = "not attained within the exhaustive range"


@dataclass(frozen=True)
class EvidenceRow:
    t: int
    min_letter: Optional[int]
    u: Optional[int]
    bs: Optional[tuple[int, ...]]
    construction_vertices: Optional[int]
    alpha: Optional[int]
    log_ratio: Optional[float]


@dataclass(frozen=True)
class GrowthWitness:
    A: int
    budget: int
    cases: int
    count: int
    rate: float
    values: tuple[int, ...] = field(repr=False, default=())


def euler_bound_holds(graph: Multigraph) -> bool:
    """|E| <= 3n - 6 (n >= 3) and tau < 8^n for a simple planar graph."""
    if graph.n >= 3 and graph.edge_count > 3 * graph.n - 6:
        return False
    return tau(graph) < 8 ** graph.n


@lru_cache(maxsize=None)
def _atlas_by_order() -> dict[int, list[nx.Graph]]:
    by_order: dict[int, list[nx.Graph]] = {}
    for g in nx.graph_atlas_g():
        by_order.setdefault(g.number_of_nodes(), []).append(g)
    return by_order


def _scan_chunk(graphs: list[nx.Graph], planar: bool) -> tuple[int, dict[int, Multigraph]]:
    witnesses: dict[int, Multigraph] = {}
    examined = 0
    for g in graphs:
        if not nx.is_connected(g):
            continue
        if planar and not nx.check_planarity(g)[0]:
            continue
        examined += 1
        graph = Multigraph.from_networkx(g)
        if planar and not euler_bound_holds(graph):
            raise AssertionError(f"Euler bound violated by {graph.edges}")
        witnesses.setdefault(tau(graph), graph)
    return examined, witnesses


@lru_cache(maxsize=32)
def _scan(n: int, planar: bool, workers: int = 1) -> CensusResult:
    graphs = _atlas_by_order().get(n, [])
    if workers > 1 and len(graphs) > workers:
        size = math.ceil(len(graphs) / workers)
        chunks = [graphs[i:i + size] for i in range(0, len(graphs), size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_scan_chunk, chunks, repeat(planar)))
    else:
        parts = [_scan_chunk(graphs, planar)]

    # chunks keep atlas order, so the first witness per value matches an inline scan
    witnesses: dict[int, Multigraph] = {}
    examined = 0
    for count, found in parts:
        examined += count
        for value, graph in found.items():
            witnesses.setdefault(value, graph)
    values = tuple(sorted(witnesses))
    logger.info("census n=%s planar=%s: %s graphs, %s values (%s workers)", n, planar, examined, len(values), workers)
    return CensusResult(n=n, planar=planar, values=values, graph_count=examined, witnesses=witnesses)


def enumerate_T(n: int, planar: bool = True, workers: Optional[int] = None) -> CensusResult:
    """All spanning-tree counts of connected simple graphs on n vertices (planar ones by default)."""
    if not 1 <= n <= settings.CENSUS_MAX_N:
        raise OutOfRange(f"n must lie in [1, {settings.CENSUS_MAX_N}], got {n}")
    workers = workers or settings.WORKERS
    if workers < 1:
        raise DomainError(f"workers must be >= 1, got {workers}")
    return _scan(n, planar, workers)


def construction_upper_bound(t: int, u_factor: int = 8) -> tuple[Optional[int], Optional[tuple[int, ...]]]:
    """Fewest vertices of a trimmed construction graph with tau = t, over t/u with t < u <= u_factor*t."""
    best: Optional[int] = None
    best_bs: Optional[tuple[int, ...]] = None
    for u in range(t + 1, u_factor * t + 1):
        if math.gcd(t, u) != 1:
            continue
        form = to_alternating(Fraction(t, u))
        if not isinstance(form, AlternatingCF) or form.m < 2:
            continue
        vertices = sum(form.bs[1:]) + 2
        if best is None or vertices < best:
            best, best_bs = vertices, form.bs
    return best, best_bs


def alpha(t: int, search_cap: Optional[int] = None) -> Union[AlphaEntry, Unknown]:
    if t < 3:
        raise DomainError(f"alpha is defined for t >= 3, got {t}")
    cap = min(search_cap or settings.CENSUS_MAX_N, settings.CENSUS_MAX_N)
    bound, bound_bs = construction_upper_bound(t)

    for n in range(1, cap + 1):
        result = enumerate_T(n)
        if t in result:
            return AlphaEntry(t, n, result.witnesses[t], bound, bound_bs)

    # exhaustion rules out n <= cap, so a construction on cap+1 vertices is optimal
    if bound is not None and bound == cap + 1:
        witness = build_trimmed(bound_bs).graph
        return AlphaEntry(t, bound, witness, bound, bound_bs)
    if bound is not None:
        return Unknown(t, cap, bound, bound_bs, reason=f"between {cap + 1} and {bound} vertices")
    return Unknown(t, cap, bound, bound_bs)


def alpha_table(ts: Iterable[int], search_cap: Optional[int] = None) -> list[Union[AlphaEntry, Unknown]]:
    return [alpha(t, search_cap) for t in ts]


def smallest_letter_bound(t: int, max_letter: int) -> tuple[Optional[int], Optional[int], Optional[tuple[int, ...]]]:
    """Least A such that t/u = [0; b1, 1, ..., bm, 1] with every b_i <= A, over coprime u > t.

    Returns (A, u, bs) for the first u attaining it, or Nones if no u works with letters <= max_letter.
    """
    if t < 1:
        raise DomainError(f"t must be positive, got {t}")
    if max_letter < 1:
        raise DomainError(f"max_letter must be >= 1, got {max_letter}")
    best: Optional[int] = None
    best_u: Optional[int] = None
    best_bs: Optional[tuple[int, ...]] = None
    # b1 = floor(u/t), so u < (b1 + 1) t
    for u in range(t + 1, (max_letter + 1) * t):
        if best is not None and u >= best * t:
            break
        if math.gcd(t, u) != 1:
            continue
        form = to_alternating(Fraction(t, u))
        if not isinstance(form, AlternatingCF):
            continue
        top = max(form.bs)
        if top <= max_letter and (best is None or top < best):
            best, best_u, best_bs = top, u, form.bs
    return best, best_u, best_bs


def conjecture_evidence(T: int, max_letter: int = 50) -> list[EvidenceRow]:
    """Bounded-letter representations and construction sizes against log t for 3 <= t <= T."""
    if T < 3:
        raise DomainError(f"T must be >= 3, got {T}")
    rows = []
    for t in range(3, T + 1):
        letter, u, bs = smallest_letter_bound(t, max_letter)
        entry = alpha(t)
        vertices = entry.upper_bound
        rows.append(
            EvidenceRow(
                t=t,
                min_letter=letter,
                u=u,
                bs=bs,
                construction_vertices=vertices,
                alpha=entry.alpha if isinstance(entry, AlphaEntry) else None,
                log_ratio=vertices / math.log(t) if vertices is not None else None,
            )
        )
    worst = max((r.min_letter for r in rows if r.min_letter is not None), default=None)
    logger.info("evidence t <= %s: largest needed letter %s", T, worst)
    return rows


def tree_spectrum(graph: Multigraph) -> float:
    """s(G) = log tau(G) / |V|."""
    count = tau(graph)
    if count == 0:
        raise DomainError("tree spectrum needs a connected graph")
    return math.log(count) / graph.n


def growth_witness(A: int, budget: int) -> GrowthWitness:
    """Distinct tau over trimmed constructions with letters <= A on at most `budget` vertices.

    The trimmed tau does not depend on b1, so b1 = 1 and (b2..bm) runs over all
    compositions of at most budget - 2 with parts <= A.
    """
    if A < 1:
        raise DomainError(f"A must be >= 1, got {A}")
    if budget < 3:
        raise DomainError(f"budget must be >= 3, got {budget}")
    values: set[int] = set()
    cases = 0
    for total in range(1, budget - 1):
        for tail in iter_compositions(total, A):
            report = build_trimmed((1,) + tail)
            values.add(report.tau)
            cases += 1
    count = len(values)
    rate = count ** (1.0 / budget)
    logger.info("growth witness A=%s budget=%s: %s cases, %s distinct, rate %.4f", A, budget, cases, count, rate)
    return GrowthWitness(A, budget, cases, count, rate, tuple(sorted(values)))


def wedge_witness(p: int, q: int, search_cap: Optional[int] = None) -> Multigraph:
    """One-point join of alpha witnesses for p and q; tau multiplies, vertices add minus one."""
    left, right = alpha(p, search_cap), alpha(q, search_cap)
    if isinstance(left, Unknown) or isinstance(right, Unknown):
        raise DomainError(f"no witness known for {p} or {q}")
    return left.witness.wedge(right.witness)
