# treecount/orbit.py
"""
The semigroup generated by M_b = [[1, b], [1, b+1]] (1 <= b <= A): Frobenius
norm balls, numerator orbits with representation numbers, and reduction
modulo q.
"""
from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from sympy import primefactors

from treecount.cfrac import AlternatingCF, Mat2, generator_matrix, to_alternating, vecmat
from treecount.core.config import settings
from treecount.errors import BudgetExceeded, DomainError, OutOfRange

logger = logging.getLogger(__name__)

NORM_KIND = "frobenius"
NUMERATOR_VECTORS = ((0, 1), (1, 0))
DENOMINATOR_VECTORS = ((0, 1), (0, 1))

Residues = tuple[int, int, int, int]


@dataclass(frozen=True)
class SemigroupBall:
    A: int
    N: float
    elements: frozenset[Mat2]
    norm_kind: str = NORM_KIND

    @property
    def size(self) -> int:
        return len(self.elements)


def _radius_sq(N: float) -> Fraction:
    return Fraction(N) ** 2


def ball(A: int, N: float, max_elements: Optional[int] = None) -> SemigroupBall:
    """All nonempty products of generators with Frobenius norm <= N.

    Breadth-first right-multiplication; the norm never decreases along a word,
    so a product that leaves the ball has no descendants inside it.
    """
    if A < 1:
        raise DomainError(f"A must be >= 1, got {A}")
    cap = max_elements or settings.BALL_MAX_ELEMENTS
    radius_sq = _radius_sq(N)
    gens = [generator_matrix(b) for b in range(1, A + 1)]

    seen: set[Mat2] = set()
    frontier = [g for g in gens if g.frobenius_sq <= radius_sq]
    seen.update(frontier)
    while frontier:
        nxt: list[Mat2] = []
        for gamma in frontier:
            base = gamma.frobenius_sq
            for g in gens:
                delta = gamma @ g
                fsq = delta.frobenius_sq
                if fsq < base:
                    raise AssertionError(f"norm decreased: {gamma} -> {delta}")
                if fsq > radius_sq:
                    # entries of M_b grow with b
                    break
                if delta not in seen:
                    seen.add(delta)
                    nxt.append(delta)
            if len(seen) > cap:
                raise BudgetExceeded(f"ball(A={A}, N={N}) passed {cap} elements")
        frontier = nxt
    logger.info("ball A=%s N=%s: %s elements", A, N, len(seen))
    return SemigroupBall(A, N, frozenset(seen))


def ball_by_words(A: int, N: float) -> list[Mat2]:
    """Recursive word enumeration, one matrix per word (no deduplication)."""
    radius_sq = _radius_sq(N)
    gens = [generator_matrix(b) for b in range(1, A + 1)]
    out: list[Mat2] = []

    def extend(prefix: Optional[Mat2]) -> None:
        for g in gens:
            m = g if prefix is None else prefix @ g
            if m.frobenius_sq <= radius_sq:
                out.append(m)
                extend(m)

    extend(None)
    return out


def _pairing(m: Mat2, v1: tuple[int, int], v2: tuple[int, int]) -> int:
    x, y = vecmat(v1, m)
    return x * v2[0] + y * v2[1]


def representation_numbers(
    sball: SemigroupBall,
    v1: tuple[int, int] = NUMERATOR_VECTORS[0],
    v2: tuple[int, int] = NUMERATOR_VECTORS[1],
) -> Counter:
    return Counter(_pairing(m, v1, v2) for m in sball.elements)


def representation_number(
    sball: SemigroupBall,
    n: int,
    v1: tuple[int, int] = NUMERATOR_VECTORS[0],
    v2: tuple[int, int] = NUMERATOR_VECTORS[1],
) -> int:
    return representation_numbers(sball, v1, v2)[n]


def numerators(
    sball: SemigroupBall,
    v1: tuple[int, int] = NUMERATOR_VECTORS[0],
    v2: tuple[int, int] = NUMERATOR_VECTORS[1],
) -> list[int]:
    return sorted(representation_numbers(sball, v1, v2))


def denominators(sball: SemigroupBall) -> list[int]:
    return numerators(sball, *DENOMINATOR_VECTORS)


def growth_exponent(sball: SemigroupBall) -> float:
    """log |B_N| / log N; approaches twice the limit-set dimension."""
    if sball.size == 0 or sball.N <= 1:
        return 0.0
    return math.log(sball.size) / math.log(sball.N)


def is_alternating_member(m: Mat2, A: int) -> bool:
    """Bottom row (t, u) has an alternating form with every letter <= A."""
    t, u = m.bottom_row
    form = to_alternating(Fraction(t, u))
    return isinstance(form, AlternatingCF) and max(form.bs) <= A


# ---------- Reduction mod q ----------

def _mulmod(x: Residues, y: Residues, q: int) -> Residues:
    a, b, c, d = x
    e, f, g, h = y
    return ((a * e + b * g) % q, (a * f + b * h) % q, (c * e + d * g) % q, (c * f + d * h) % q)


def sl2_order(q: int) -> int:
    """|SL(2, Z/qZ)| = q^3 prod_{p | q} (1 - p^-2)."""
    if q < 2:
        raise DomainError(f"q must be >= 2, got {q}")
    order = q ** 3
    for p in primefactors(q):
        order = order // (p * p) * (p * p - 1)
    return order


@dataclass(frozen=True)
class CongruenceQuotient:
    A: int
    q: int
    reached: frozenset[Residues]
    order: int

    @property
    def full(self) -> bool:
        return len(self.reached) == self.order

    @property
    def size(self) -> int:
        return len(self.reached)

    @property
    def contains_identity(self) -> bool:
        return (1, 0, 0, 1) in self.reached

    def is_closed(self) -> bool:
        gens = [generator_matrix(b).mod(self.q) for b in range(1, self.A + 1)]
        return all(_mulmod(x, g, self.q) in self.reached for x in self.reached for g in gens)


def congruence_quotient(A: int, q: int) -> CongruenceQuotient:
    """Semigroup closure of the generators modulo q (worklist)."""
    if A < 1:
        raise DomainError(f"A must be >= 1, got {A}")
    if not 2 <= q <= settings.CONGRUENCE_MAX_Q:
        raise OutOfRange(f"q must lie in [2, {settings.CONGRUENCE_MAX_Q}], got {q}")
    gens = [generator_matrix(b).mod(q) for b in range(1, A + 1)]
    reached: set[Residues] = set(gens)
    work = list(reached)
    while work:
        x = work.pop()
        for g in gens:
            y = _mulmod(x, g, q)
            if y not in reached:
                reached.add(y)
                work.append(y)
    result = CongruenceQuotient(A, q, frozenset(reached), sl2_order(q))
    logger.info("A=%s q=%s: reached %s of %s", A, q, result.size, result.order)
    return result


def admissible_residues(
    quotient: CongruenceQuotient,
    v1: tuple[int, int] = NUMERATOR_VECTORS[0],
    v2: tuple[int, int] = NUMERATOR_VECTORS[1],
) -> set[int]:
    q = quotient.q
    out: set[int] = set()
    for a, b, c, d in quotient.reached:
        x = v1[0] * a + v1[1] * c
        y = v1[0] * b + v1[1] * d
        out.add((x * v2[0] + y * v2[1]) % q)
    return out


def sumset_witness(t: int, u: int) -> Fraction:
    """(t+u)/(t+2u): prepends the letter 1 to an alternating form of t/u."""
    if math.gcd(t, u) != 1 or not 0 < t < u:
        raise DomainError(f"need coprime 0 < t < u, got {t}/{u}")
    out = Fraction(t + u, t + 2 * u)
    source = to_alternating(Fraction(t, u))
    if isinstance(source, AlternatingCF):
        image = to_alternating(out)
        if not isinstance(image, AlternatingCF) or image.bs != (1,) + source.bs:
            raise AssertionError(f"sum-set image of {t}/{u} lost its alternating form")
    return out
