# treecount/cfrac.py
"""
Exact continued fractions, the alternating form [b1,1,b2,1,...,bm,1] and the
2x2 integer matrices behind them.

Matrix convention: row vectors are multiplied on the right. The alternating
fraction with letters b1..bm is read off

    (t, u) = (0, 1) . M_{bm} . ... . M_{b1}

so the LAST letter acts first. Every function here follows that order.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

from treecount.errors import DomainError, ParseError

Rational = Fraction


# ---------- Matrices ----------

@dataclass(frozen=True)
class Mat2:
    """2x2 integer matrix [[a, b], [c, d]], row-major."""

    a: int
    b: int
    c: int
    d: int

    @classmethod
    def identity(cls) -> "Mat2":
        return cls(1, 0, 0, 1)

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    @property
    def frobenius_sq(self) -> int:
        return self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d

    @property
    def frobenius(self) -> float:
        return self.frobenius_sq ** 0.5

    @property
    def bottom_row(self) -> tuple[int, int]:
        return (self.c, self.d)

    def is_nonnegative(self) -> bool:
        return min(self.a, self.b, self.c, self.d) >= 0

    def mod(self, q: int) -> tuple[int, int, int, int]:
        return (self.a % q, self.b % q, self.c % q, self.d % q)


def vecmat(v: tuple[int, int], m: Mat2) -> tuple[int, int]:
    """Row vector times matrix."""
    x, y = v
    return (x * m.a + y * m.c, x * m.b + y * m.d)


def quotient_matrix(a: int) -> Mat2:
    return Mat2(0, 1, 1, a)


@lru_cache(maxsize=256)
def generator_matrix(b: int) -> Mat2:
    """M_b = [[0,1],[1,1]] . [[0,1],[1,b]] = [[1, b], [1, b+1]]."""
    if b < 1:
        raise DomainError(f"generator letter must be >= 1, got {b}")
    return quotient_matrix(1) @ quotient_matrix(b)


def matrix_of_quotients(quotients: Sequence[int]) -> Mat2:
    """[[0,1],[1,a_l]] ... [[0,1],[1,a_1]]; the bottom row is (t, u) of [0; a_1..a_l]."""
    m = Mat2.identity()
    for a in quotients:
        m = quotient_matrix(a) @ m
    return m


def commutation_identity_check(k: int) -> bool:
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    lhs = Mat2(1, 0, 1, 1) @ Mat2(1, k, 0, 1)
    rhs = quotient_matrix(1) @ quotient_matrix(k)
    return lhs == rhs


# ---------- Continued fractions ----------

@dataclass(frozen=True)
class CFExpansion:
    a0: int
    quotients: tuple[int, ...] = ()

    def __post_init__(self):
        if self.a0 < 0:
            raise DomainError(f"a0 must be >= 0, got {self.a0}")
        object.__setattr__(self, "quotients", tuple(int(a) for a in self.quotients))
        if any(a < 1 for a in self.quotients):
            raise DomainError(f"partial quotients must be >= 1, got {list(self.quotients)}")

    @property
    def is_canonical(self) -> bool:
        q = self.quotients
        if not q:
            return True
        if q[-1] >= 2:
            return True
        return self.a0 == 0 and q == (1,)

    @property
    def value(self) -> Fraction:
        return cf_eval(self)

    def with_trailing_one(self) -> "CFExpansion":
        """[..., a] -> [..., a-1, 1]; only defined when the last entry is >= 2 (or a0 >= 1 with no quotients)."""
        q = self.quotients
        if not q:
            if self.a0 < 1:
                raise DomainError("0 has no trailing-one form")
            return CFExpansion(self.a0 - 1, (1,))
        if q[-1] < 2:
            raise DomainError("expansion already ends in 1")
        return CFExpansion(self.a0, q[:-1] + (q[-1] - 1, 1))

    def canonical(self) -> "CFExpansion":
        return cf_expand(self.value)


@dataclass(frozen=True)
class AlternatingCF:
    bs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "bs", tuple(int(b) for b in self.bs))
        if not self.bs:
            raise DomainError("alternating form needs at least one letter")
        if any(b < 1 for b in self.bs):
            raise DomainError(f"letters must be >= 1, got {list(self.bs)}")

    @property
    def m(self) -> int:
        return len(self.bs)

    @property
    def quotients(self) -> tuple[int, ...]:
        out: list[int] = []
        for b in self.bs:
            out.extend((b, 1))
        return tuple(out)

    @property
    def value(self) -> Fraction:
        return alternating_eval(self)


@dataclass(frozen=True)
class NotRepresentable:
    value: Fraction
    reason: str = "no expansion has 1 in every even position"


AlternatingLike = Union[AlternatingCF, Sequence[int]]


def as_alternating(bs: AlternatingLike) -> AlternatingCF:
    if isinstance(bs, AlternatingCF):
        return bs
    return AlternatingCF(tuple(bs))


def cf_eval(cf: CFExpansion) -> Fraction:
    if not cf.quotients:
        return Fraction(cf.a0)
    t, u = matrix_of_quotients(cf.quotients).bottom_row
    # bottom row of the quotient product is already coprime
    return cf.a0 + Fraction(t, u)


def cf_expand(x: Fraction | int | str) -> CFExpansion:
    x = Fraction(x)
    if x < 0:
        raise DomainError(f"expected a nonnegative rational, got {x}")
    num, den = x.numerator, x.denominator
    a0, num = divmod(num, den)
    quotients: list[int] = []
    while num:
        num, den = den, num
        a, num = divmod(num, den)
        quotients.append(a)
    return CFExpansion(a0, tuple(quotients))


def convergents(cf: CFExpansion) -> list[Fraction]:
    return [cf_eval(CFExpansion(cf.a0, cf.quotients[:i])) for i in range(len(cf.quotients) + 1)]


def to_alternating(x: Fraction | int | str) -> AlternatingCF | NotRepresentable:
    x = Fraction(x)
    if not 0 < x < 1:
        raise DomainError(f"alternating forms live in (0, 1), got {x}")
    cf = cf_expand(x)
    for candidate in (cf, cf.with_trailing_one()):
        q = candidate.quotients
        if len(q) % 2 == 0 and all(q[i] == 1 for i in range(1, len(q), 2)):
            return AlternatingCF(q[0::2])
    return NotRepresentable(x)


def alternating_vector(bs: AlternatingLike) -> tuple[int, int]:
    """(t, u) = (0, 1) . M_{bm} ... M_{b1}."""
    acf = as_alternating(bs)
    v = (0, 1)
    for b in reversed(acf.bs):
        v = vecmat(v, generator_matrix(b))
    return v


def alternating_eval(bs: AlternatingLike) -> Fraction:
    t, u = alternating_vector(bs)
    return Fraction(t, u)


def alternating_matrix(bs: AlternatingLike) -> Mat2:
    acf = as_alternating(bs)
    m = Mat2.identity()
    for b in reversed(acf.bs):
        m = m @ generator_matrix(b)
    return m


# ---------- Text notation ----------

_INT = re.compile(r"\s*([0-9]+)\s*")


def parse_rational(text: str) -> Fraction:
    """Parse "t/u" or a bare integer."""
    parts = text.split("/")
    if len(parts) > 2:
        raise ParseError(f"too many '/' in {text!r}", len(parts[0]) + len(parts[1]) + 1)
    pos = 0
    values: list[int] = []
    for part in parts:
        m = _INT.fullmatch(part)
        if not m:
            raise ParseError(f"expected an integer in {text!r}", pos)
        values.append(int(m.group(1)))
        pos += len(part) + 1
    if len(values) == 1:
        return Fraction(values[0])
    if values[1] == 0:
        raise ParseError("zero denominator", len(parts[0]) + 1)
    return Fraction(values[0], values[1])


def parse_cf(text: str) -> CFExpansion:
    """Parse "[a0;a1,a2,...]" or "[a1,a2,...]" (the latter with a0 = 0)."""
    stripped = text.rstrip()
    start = len(text) - len(text.lstrip())
    if not stripped[start:].startswith("["):
        raise ParseError("expected '['", start)
    if not stripped.endswith("]"):
        raise ParseError("expected ']'", len(stripped))
    body_start = start + 1
    body = stripped[body_start:-1]

    a0 = 0
    if ";" in body:
        head, _, body_rest = body.partition(";")
        m = _INT.fullmatch(head)
        if not m:
            raise ParseError("expected an integer before ';'", body_start)
        a0 = int(m.group(1))
        body_start += len(head) + 1
        body = body_rest

    quotients: list[int] = []
    if body.strip():
        pos = body_start
        for token in body.split(","):
            m = _INT.fullmatch(token)
            if not m or int(m.group(1)) < 1:
                raise ParseError(f"expected a positive integer, got {token.strip()!r}", pos)
            quotients.append(int(m.group(1)))
            pos += len(token) + 1
    return CFExpansion(a0, tuple(quotients))


def parse_bs(text: str) -> AlternatingCF:
    """Comma list "b1,b2,..." of alternating letters."""
    letters: list[int] = []
    pos = 0
    for token in text.split(","):
        m = _INT.fullmatch(token)
        if not m or int(m.group(1)) < 1:
            raise ParseError(f"expected a positive integer, got {token.strip()!r}", pos)
        letters.append(int(m.group(1)))
        pos += len(token) + 1
    return AlternatingCF(tuple(letters))


def format_cf(cf: CFExpansion) -> str:
    return "[" + str(cf.a0) + ";" + ",".join(str(a) for a in cf.quotients) + "]"


def format_alternating(acf: AlternatingCF) -> str:
    return "[" + ",".join(str(a) for a in acf.quotients) + "]"


def format_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def iter_compositions(total: int, max_part: int | None = None) -> Iterable[tuple[int, ...]]:
    """All compositions of `total` (ordered tuples of positive parts), parts bounded by max_part."""
    if total == 0:
        yield ()
        return
    top = total if max_part is None else min(total, max_part)
    for first in range(1, top + 1):
        for rest in iter_compositions(total - first, max_part):
            yield (first,) + rest
