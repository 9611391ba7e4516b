# treecount/dimension.py
"""
Transfer operators of the alternating continued-fraction maps
T_b(x) = (b+x)/(1+b+x), their pressure, and polynomial test functions that
certify Hausdorff-dimension bounds:

  * a positive f with L_s f > f on [0,1] proves dim > s (finite alphabet),
  * a positive f with L_s f < f on [0,1] proves dim < s (all letters, where
    the b-sum collapses to Hurwitz zeta values).

Test functions interpolate the leading eigenvector of the collocation matrix
at Chebyshev nodes and are held as Chebyshev series on [0, 1]; the monomial
coefficients are kept for reporting. Certification samples a uniform grid and
adds a closed-form curvature bound on each cell.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import repeat
from typing import Literal, Optional, Sequence, Union

import numpy as np
from numpy.polynomial import Chebyshev, Polynomial

from treecount.core.config import settings
from treecount.errors import BudgetExceeded, CertificationFailed, ConvergenceFailure, DomainError

logger = logging.getLogger(__name__)

Family = Literal["alternating", "zaremba"]
PolynomialLike = Union["TestPolynomial", Chebyshev, Polynomial, Sequence[float]]

# rows of (A x chunk) evaluated at once
_CHUNK = 4_000_000
_EPS = float(np.finfo(float).eps)
_UNIT = [0.0, 1.0]


@dataclass(frozen=True)
class TransferConfig:
    """A=None selects the full alphabet (Hurwitz mode)."""

    A: Optional[int]
    s: float
    order: int = field(default_factory=lambda: settings.DEFAULT_ORDER)
    family: Family = "alternating"

    def __post_init__(self):
        if not 0 < self.s < 1:
            raise DomainError(f"s must lie in (0, 1), got {self.s}")
        if self.order < 2:
            raise DomainError(f"order must be >= 2, got {self.order}")
        if self.A is not None and self.A < 1:
            raise DomainError(f"A must be >= 1, got {self.A}")
        if self.A is None and self.family != "alternating":
            raise DomainError("the full-alphabet operator is implemented for the alternating family only")
        if self.family not in ("alternating", "zaremba"):
            raise DomainError(f"unknown family {self.family!r}")

    @property
    def hurwitz(self) -> bool:
        return self.A is None

    @property
    def alphabet_label(self) -> str:
        return "inf" if self.A is None else str(self.A)


# ---------- Maps ----------

def T_map(b: int, x):
    return (b + x) / (1 + b + x)


def T_deriv(b: int, x):
    return 1.0 / (1 + b + x) ** 2


def zaremba_map(a: int, x):
    return 1.0 / (a + x)


def zaremba_deriv(a: int, x):
    """|d/dx 1/(a+x)|."""
    return 1.0 / (a + x) ** 2


def _branches(cfg: TransferConfig, x: np.ndarray):
    """(denominator, image) for every letter (rows) and point (columns)."""
    letters = np.arange(1, cfg.A + 1, dtype=float)[:, None]
    if cfg.family == "zaremba":
        denom = letters + x
        return denom, 1.0 / denom
    denom = 1.0 + letters + x
    return denom, (letters + x) / denom


def _shifts(cfg: TransferConfig) -> np.ndarray:
    """Denominators at x = 0; they bound every branch on [0, 1] from below."""
    letters = np.arange(1, cfg.A + 1, dtype=float)
    return letters if cfg.family == "zaremba" else 1.0 + letters


# ---------- Pressure ----------

def pressure_estimate(cfg: TransferConfig, depth: int, method: Literal["average", "ratio"] = "average") -> float:
    """Depth-n approximant of the pressure from sum_w |(T_w)'(0)|^s over words of length n.

    "average" is (1/n) log Z_n; "ratio" is log(Z_n / Z_{n-1}).
    """
    if cfg.hurwitz:
        raise DomainError("pressure needs a finite alphabet")
    if depth < 1:
        raise DomainError(f"depth must be >= 1, got {depth}")
    if method not in ("average", "ratio"):
        raise DomainError(f"unknown method {method!r}")
    if cfg.A ** depth > settings.PRESSURE_MAX_TERMS:
        raise BudgetExceeded(f"A^depth = {cfg.A}^{depth} exceeds {settings.PRESSURE_MAX_TERMS}")

    xs = np.zeros(1)
    ws = np.ones(1)
    previous = 1.0
    total = 1.0
    for _ in range(depth):
        denom, image = _branches(cfg, xs[None, :])
        ws = (ws[None, :] * denom ** (-2.0 * cfg.s)).ravel()
        xs = image.ravel()
        previous, total = total, float(ws.sum())
    if method == "ratio":
        return math.log(total / previous)
    return math.log(total) / depth


# ---------- Interpolation ----------

def chebyshev_nodes(N: int) -> np.ndarray:
    """y_j = (cos((2j-1) pi / 2N) + 1) / 2, j = 1..N; decreasing in j."""
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    j = np.arange(1, N + 1)
    return 0.5 * (np.cos((2 * j - 1) * np.pi / (2 * N)) + 1.0)


def lagrange_basis(nodes: Sequence[float]) -> list[Chebyshev]:
    """Cardinal polynomials l_j(y_k) = delta_jk as Chebyshev series on [0, 1]."""
    nodes = np.asarray(nodes, dtype=float)
    deg = nodes.size - 1
    return [Chebyshev.fit(nodes, unit, deg, domain=_UNIT) for unit in np.eye(nodes.size)]


@dataclass(frozen=True)
class TestPolynomial:
    __test__ = False  # not a pytest class

    coeffs: tuple[float, ...]
    cheb_coeffs: tuple[float, ...]
    nodes: tuple[float, ...]
    eigenvector: tuple[float, ...]
    eigenvalue: float
    iterations: int = 0

    @property
    def polynomial(self) -> Polynomial:
        """Monomial form; reporting only."""
        return Polynomial(np.asarray(self.coeffs))

    @property
    def chebyshev(self) -> Chebyshev:
        return Chebyshev(np.asarray(self.cheb_coeffs), domain=_UNIT)

    def __call__(self, x):
        return self.chebyshev(x)


def _as_series(poly: PolynomialLike) -> Union[Chebyshev, Polynomial]:
    if isinstance(poly, TestPolynomial):
        return poly.chebyshev
    if isinstance(poly, (Chebyshev, Polynomial)):
        return poly
    return Polynomial(np.asarray(poly, dtype=float))


def centered_coefficients(poly: PolynomialLike) -> np.ndarray:
    """a_n with f(x) = sum a_n (x-1)^n."""
    return _as_series(poly).convert(domain=[0.0, 2.0], kind=Polynomial, window=[-1.0, 1.0]).coef


def scalar_fit(vector: Sequence[float], reference: Sequence[float]) -> tuple[float, float]:
    """Least-squares c minimising |c v - ref|, and the max residual after scaling."""
    v = np.asarray(vector, dtype=float)
    ref = np.asarray(reference, dtype=float)
    c = float(v @ ref / (v @ v))
    return c, float(np.max(np.abs(c * v - ref)))


# ---------- Hurwitz zeta ----------

_BERNOULLI = (1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0)
_FACTORIAL = (2.0, 24.0, 720.0, 40320.0)


def _poch(s: float, n: int) -> float:
    out = 1.0
    for i in range(n):
        out *= s + i
    return out


def _zeta(s: float, x) -> np.ndarray:
    """Euler-Maclaurin with four Bernoulli corrections; valid for s > 1, x > 0."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    # remainder is bounded by the last correction term
    c = abs(_BERNOULLI[-1]) / _FACTORIAL[-1] * _poch(s, 7)
    y_needed = (c / settings.HURWITZ_TOL) ** (1.0 / (s + 7.0))
    K = max(0, math.ceil(y_needed - float(xs.min())))
    head = np.zeros_like(xs)
    if K:
        k = np.arange(K, dtype=float)[:, None]
        head = np.sum((xs[None, :] + k) ** (-s), axis=0)
    y = xs + K
    tail = y ** (1.0 - s) / (s - 1.0) + 0.5 * y ** (-s)
    for j in range(1, 5):
        tail = tail + _BERNOULLI[j - 1] / _FACTORIAL[j - 1] * _poch(s, 2 * j - 1) * y ** (-s - 2 * j + 1)
    return head + tail


def hurwitz_zeta(s: float, x):
    """zeta(s, x) = sum_{k >= 0} (k + x)^-s for s > 1.5 and x >= 1."""
    if s <= 1.5:
        raise DomainError(f"s must exceed 1.5, got {s}")
    xs = np.asarray(x, dtype=float)
    if np.any(xs < 1):
        raise DomainError("x must be >= 1")
    out = _zeta(s, xs)
    return float(out[0]) if xs.ndim == 0 else out


# ---------- Operator ----------

def apply_operator(cfg: TransferConfig, poly: PolynomialLike, x):
    """[L_s f](x), exact formula: A terms, or deg+1 zeta terms in Hurwitz mode."""
    p = _as_series(poly)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if cfg.hurwitz:
        out = _hurwitz_sum(cfg.s, p, xs + 2.0)
    else:
        out = np.empty_like(xs)
        step = max(1, _CHUNK // cfg.A)
        for start in range(0, xs.size, step):
            denom, image = _branches(cfg, xs[None, start:start + step])
            out[start:start + step] = np.sum(denom ** (-2.0 * cfg.s) * p(image), axis=0)
    return float(out[0]) if np.ndim(x) == 0 else out


def _hurwitz_sum(s: float, p, shifted: np.ndarray) -> np.ndarray:
    if 2.0 * s <= 1.0:
        raise DomainError(f"the full-alphabet operator diverges for s <= 1/2, got {s}")
    out = np.zeros_like(shifted)
    for n, a_n in enumerate(centered_coefficients(p)):
        if a_n:
            out = out + a_n * (-1) ** n * _zeta(2.0 * s + n, shifted)
    return out


def operator_tail(cfg: TransferConfig, poly: PolynomialLike, x, A: int):
    """Letters b > A of the full-alphabet operator."""
    p = _as_series(poly)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = _hurwitz_sum(cfg.s, p, xs + A + 2.0)
    return float(out[0]) if np.ndim(x) == 0 else out


# ---------- Test polynomials ----------

def transfer_matrix(cfg: TransferConfig) -> tuple[np.ndarray, np.ndarray, list[Chebyshev]]:
    """M[j, k] = [L_s l_j](y_k)."""
    nodes = chebyshev_nodes(cfg.order)
    basis = lagrange_basis(nodes)
    M = np.array([apply_operator(cfg, ell, nodes) for ell in basis])
    return M, nodes, basis


def leading_eigenpair(matrix: np.ndarray, tol: Optional[float] = None, max_iter: Optional[int] = None):
    """Power iteration from the all-ones vector; unit Euclidean norm, positive sum.

    Returns (eigenvalue, eigenvector, iterations).
    """
    tol = tol or settings.POWER_ITER_TOL
    max_iter = max_iter or settings.POWER_ITER_MAX
    v = np.ones(matrix.shape[0]) / math.sqrt(matrix.shape[0])
    for it in range(1, max_iter + 1):
        w = matrix @ v
        norm = float(np.linalg.norm(w))
        if norm == 0.0:
            raise ConvergenceFailure("power iteration collapsed to zero")
        w /= norm
        if w.sum() < 0:
            w = -w
        if float(np.max(np.abs(w - v))) < tol:
            eigenvalue = float(w @ (matrix @ w))
            return eigenvalue, w, it
        v = w
    raise ConvergenceFailure(f"power iteration did not reach {tol} in {max_iter} steps")


def build_test_polynomial(cfg: TransferConfig) -> TestPolynomial:
    M, nodes, _ = transfer_matrix(cfg)
    # left eigenvector of M: L f_s = lambda f_s at every node
    eigenvalue, v, iterations = leading_eigenpair(M.T)
    # the interpolant of v is sum_j v_j l_j
    cheb = Chebyshev.fit(nodes, v, cfg.order - 1, domain=_UNIT)
    cheb_coeffs = np.zeros(cfg.order)
    cheb_coeffs[: cheb.coef.size] = cheb.coef
    monomial = cheb.convert(kind=Polynomial).coef
    coeffs = np.zeros(cfg.order)
    coeffs[: min(monomial.size, cfg.order)] = monomial[: cfg.order]
    logger.debug("test polynomial A=%s s=%s: lambda=%.12f after %s steps", cfg.alphabet_label, cfg.s, eigenvalue, iterations)
    return TestPolynomial(
        coeffs=tuple(float(c) for c in coeffs),
        cheb_coeffs=tuple(float(c) for c in cheb_coeffs),
        nodes=tuple(float(y) for y in nodes),
        eigenvector=tuple(float(x) for x in v),
        eigenvalue=eigenvalue,
        iterations=iterations,
    )


def eigenvalue_at(A: Optional[int], s: float, order: Optional[int] = None, family: Family = "alternating") -> float:
    cfg = TransferConfig(A, s, order or settings.DEFAULT_ORDER, family)
    M, _, _ = transfer_matrix(cfg)
    return leading_eigenpair(M.T)[0]


def dimension_estimate(
    A: Optional[int],
    order: Optional[int] = None,
    family: Family = "alternating",
    lo: Optional[float] = None,
    hi: float = 0.999,
    tol: float = 1e-10,
) -> float:
    """Bisection for the s where the leading collocation eigenvalue crosses 1."""
    lo = lo if lo is not None else (0.501 if A is None else 1e-6)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if eigenvalue_at(A, mid, order, family) > 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------- Certification ----------

@dataclass(frozen=True)
class DimensionCertificate:
    kind: Literal["lower", "upper"]
    s: float
    alphabet: Optional[int]
    margin: float
    min_f: float
    verification: dict
    poly: TestPolynomial
    family: Family = "alternating"

    @property
    def certified(self) -> bool:
        positive = self.min_f > 0
        if self.kind == "lower":
            return positive and self.margin > 0
        return positive and self.margin < 0


def _power_sums(cfg: TransferConfig, left: np.ndarray, powers: Sequence[float]) -> dict[float, np.ndarray]:
    """sum_b (c_b + x)^-p at every x in left, where c_b + x is the branch denominator."""
    if cfg.hurwitz:
        return {p: _zeta(p, left + 2.0) for p in powers}
    shifts = _shifts(cfg)[:, None]
    out = {p: np.empty_like(left) for p in powers}
    step = max(1, _CHUNK // cfg.A)
    for start in range(0, left.size, step):
        denom = shifts + left[None, start:start + step]
        for p in powers:
            out[p][start:start + step] = np.sum(denom ** (-p), axis=0)
    return out


def _curvature_bounds(cfg: TransferConfig, cheb: Chebyshev, left: np.ndarray) -> tuple[np.ndarray, float, float]:
    """(bound on |(L_s f - f)''| over each cell [x, x+h], max|f|, max|f''|).

    Each branch term is w(x) f(T(x)) with w = (c+x)^-2s, |T'| = (c+x)^-2 and
    |T''| = 2(c+x)^-3; the denominators are smallest at the left end of the cell.
    max|f^(k)| on [0, 1] is bounded by the coefficient sum of the k-th derivative.
    """
    f0, f1, f2 = (float(np.sum(np.abs(cheb.deriv(k).coef))) for k in range(3))
    sigma = 2.0 * cfg.s
    sums = _power_sums(cfg, left, (sigma + 2.0, sigma + 3.0, sigma + 4.0))
    op = (
        sigma * (sigma + 1.0) * sums[sigma + 2.0] * f0
        + (2.0 * sigma + 2.0) * sums[sigma + 3.0] * f1
        + sums[sigma + 4.0] * f2
    )
    return op + f2, f0, f2


def _certify(cfg: TransferConfig, kind: Literal["lower", "upper"], grid_cells: Optional[int]) -> DimensionCertificate:
    tp = build_test_polynomial(cfg)
    cheb = tp.chebyshev
    cells = grid_cells or settings.CERT_GRID_CELLS
    xs = np.linspace(0.0, 1.0, cells + 1)
    h = 1.0 / cells

    f_vals = cheb(xs)
    l_vals = apply_operator(cfg, cheb, xs)
    diff = l_vals - f_vals
    curvature, f_max, f_curvature = _curvature_bounds(cfg, cheb, xs[:-1])
    # a C^2 function leaves its chord by at most max|g''| h^2 / 8 on a cell
    slack = curvature * h * h / 8.0
    min_f = float(f_vals.min()) - f_curvature * h * h / 8.0

    terms = cfg.order if cfg.hurwitz else cfg.A
    ops = terms * (cfg.order + 10)
    rounding = ops * _EPS * (f_max + float(np.max(np.abs(l_vals))))

    if kind == "lower":
        sampled = float(diff.min())
        margin = float(np.min(np.minimum(diff[:-1], diff[1:]) - slack))
    else:
        sampled = float(diff.max())
        margin = float(np.max(np.maximum(diff[:-1], diff[1:]) + slack))

    cert = DimensionCertificate(
        kind=kind,
        s=cfg.s,
        alphabet=cfg.A,
        margin=margin,
        min_f=min_f,
        verification={
            "method": "grid+curvature",
            "grid_cells": cells,
            "curvature_bound": float(curvature.max()),
            "f_curvature": f_curvature,
            "sampled_extremum": sampled,
            "rounding_budget": rounding,
        },
        poly=tp,
        family=cfg.family,
    )
    above_rounding = abs(margin) > settings.CERT_ROUNDING_FACTOR * rounding
    if not (cert.certified and above_rounding):
        logger.warning(
            "%s certificate rejected: A=%s s=%s margin=%.3e min_f=%.3e",
            kind, cfg.alphabet_label, cfg.s, margin, min_f,
        )
        raise CertificationFailed(
            f"{kind} bound at s={cfg.s} (A={cfg.alphabet_label}) not certified: margin {margin:.3e}, min f {min_f:.3e}",
            certificate=cert,
            best_margin=sampled,
        )
    logger.info("%s certificate: A=%s s=%s margin=%.3e", kind, cfg.alphabet_label, cfg.s, margin)
    return cert


def certify_lower(
    A: int,
    s: float,
    N: Optional[int] = None,
    grid_cells: Optional[int] = None,
    family: Family = "alternating",
) -> DimensionCertificate:
    """Positive f with L_s f > f on [0,1]; proves the dimension exceeds s."""
    if A is None:
        raise DomainError("lower bounds need a finite alphabet")
    return _certify(TransferConfig(A, s, N or settings.DEFAULT_ORDER, family), "lower", grid_cells)


def certify_upper(s: float, N: Optional[int] = None, grid_cells: Optional[int] = None) -> DimensionCertificate:
    """Positive f with L_s f < f on [0,1] over all letters; bounds the full dimension above by s."""
    return _certify(TransferConfig(None, s, N or settings.DEFAULT_ORDER), "upper", grid_cells)


def certificate_curve(cfg: TransferConfig, samples: int = 201) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(x, f_s(x), L_s f_s(x) - f_s(x)) on an even grid, whether or not a certificate exists."""
    if samples < 2:
        raise DomainError(f"samples must be >= 2, got {samples}")
    tp = build_test_polynomial(cfg)
    xs = np.linspace(0.0, 1.0, samples)
    f_vals = tp(xs)
    return xs, f_vals, apply_operator(cfg, tp, xs) - f_vals


def _certifies(A: int, s: float, N: Optional[int], grid_cells: Optional[int]) -> bool:
    try:
        certify_lower(A, s, N, grid_cells)
    except CertificationFailed:
        return False
    return True


def bisect_certified_threshold(
    A: int,
    lo: float,
    hi: float,
    tol: float = 1e-4,
    N: Optional[int] = None,
    grid_cells: Optional[int] = None,
    workers: Optional[int] = None,
) -> tuple[float, float]:
    """Shrink [lo, hi] so that certify_lower succeeds at lo and fails at hi.

    With workers > 1 every round certifies that many interior points in
    separate processes and keeps the bracket around the first failure.
    """
    workers = workers or settings.WORKERS
    if workers < 1:
        raise DomainError(f"workers must be >= 1, got {workers}")
    if workers == 1:
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if _certifies(A, mid, N, grid_cells):
                lo = mid
            else:
                hi = mid
        return lo, hi

    with ProcessPoolExecutor(max_workers=workers) as pool:
        while hi - lo > tol:
            points = [lo + (hi - lo) * (i + 1) / (workers + 1) for i in range(workers)]
            passed = list(pool.map(_certifies, repeat(A), points, repeat(N), repeat(grid_cells)))
            for point, ok in zip(points, passed):
                if not ok:
                    hi = point
                    break
                lo = point
            logger.debug("threshold A=%s bracket [%.6f, %.6f]", A, lo, hi)
    return lo, hi


# ---------- Fractal picture ----------

@dataclass(frozen=True)
class FractalCircle:
    center: float
    diameter: float
    depth: int
    word: tuple[int, ...] = ()


def _compose(word: Sequence[int], x: float) -> float:
    for b in reversed(word):
        x = T_map(b, x)
    return x


def fractal_circles(depth: int, max_digit: int = 10) -> list[FractalCircle]:
    """Gaps removed while building the alternating fractal: [T_w(0), T_w(1/2)) for |w| < depth."""
    if depth < 1:
        raise DomainError(f"depth must be >= 1, got {depth}")
    if max_digit < 1:
        raise DomainError(f"max_digit must be >= 1, got {max_digit}")
    circles: list[FractalCircle] = []
    words: list[tuple[int, ...]] = [()]
    for level in range(1, depth + 1):
        for w in words:
            left, right = _compose(w, 0.0), _compose(w, 0.5)
            circles.append(FractalCircle(0.5 * (left + right), right - left, level, w))
        if level < depth:
            words = [w + (b,) for w in words for b in range(1, max_digit + 1)]
    return circles
