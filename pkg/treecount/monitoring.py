# treecount/monitoring.py
"""Acceptance self-test: every headline claim, recomputed at desk scale."""
from __future__ import annotations

import logging
from typing import Callable

import numpy as np

from treecount.census import enumerate_T, growth_witness
from treecount.cfrac import iter_compositions
from treecount.dimension import (
    bisect_certified_threshold,
    certify_lower,
    certify_upper,
    dimension_estimate,
    scalar_fit,
)
from treecount.errors import CertificationFailed
from treecount.orbit import admissible_residues, ball, congruence_quotient, growth_exponent, representation_numbers
from treecount.treegraph import build_from_alternating, build_trimmed

logger = logging.getLogger(__name__)

T4 = (1, 3, 4, 8, 16)
T5 = (1, 3, 4, 5, 8, 9, 11, 12, 16, 20, 21, 24, 40, 45, 75)

# leading eigenvector and test polynomial for A=110, s=0.775, five nodes
REFERENCE_EIGENVECTOR = (0.3798483, 0.3992862, 0.4366593, 0.4841648, 0.5207676)
REFERENCE_LOWER_COEFFS = (0.526229, -0.225988, 0.116313, -0.0513245, 0.0121844)
# full alphabet, s=0.799
REFERENCE_UPPER_COEFFS = (0.524143, -0.221186, 0.116202, -0.0517567, 0.0123381)


def _close(xs, ys, tol: float) -> bool:
    return bool(np.max(np.abs(np.asarray(xs) - np.asarray(ys))) < tol)


def _check(checks: list, name: str, claim: str, fn: Callable[[], tuple[bool, str]]) -> None:
    try:
        ok, detail = fn()
    except Exception as exc:
        logger.exception("selftest check %s crashed", name)
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    checks.append({"name": name, "claim": claim, "ok": bool(ok), "detail": detail})


def run_selftest(quick: bool = True) -> dict:
    checks: list[dict] = []
    sweep = 8 if quick else 14
    grid = 10_000 if quick else None
    qmax = 12 if quick else 30

    def census():
        t4, t5 = enumerate_T(4).values, enumerate_T(5).values
        return t4 == T4 and t5 == T5, f"T(4)={list(t4)} |T(5)|={len(t5)}"

    def construction():
        failures = cases = 0
        for total in range(1, sweep + 1):
            for bs in iter_compositions(total):
                cases += 1
                failures += not build_from_alternating(bs).matches_oracle
        return failures == 0, f"{cases} cases, {failures} failures"

    def trimmed():
        failures = cases = 0
        for total in range(2, sweep + 1):
            for bs in iter_compositions(total):
                if len(bs) < 2:
                    continue
                report = build_trimmed(bs)
                cases += 1
                in_census = report.vertex_count > 7 or report.tau in enumerate_T(report.vertex_count)
                failures += not (report.matches_oracle and in_census)
        return failures == 0, f"{cases} cases, {failures} failures"

    def admissible():
        bad = []
        for q in range(2, qmax + 1):
            cq = congruence_quotient(2, q)
            if not (cq.full and cq.contains_identity and len(admissible_residues(cq)) == q):
                bad.append(q)
        return not bad, f"q <= {qmax}, failing: {bad}"

    def fibers():
        details = []
        ok = True
        for A in (2, 3):
            for N in (100, 1000):
                sball = ball(A, N)
                total = sum(representation_numbers(sball).values())
                ok = ok and total == sball.size
                details.append(f"A={A} N={N} |B|={sball.size}")
        if not quick:
            theta = dimension_estimate(2)
            exponent = growth_exponent(ball(2, 10_000))
            ok = ok and 2 * theta - 0.3 <= exponent <= 2 * theta + 0.1
            details.append(f"exponent {exponent:.3f} vs 2*theta {2 * theta:.3f}")
        return ok, "; ".join(details)

    def lower_110():
        cert = certify_lower(110, 0.775, 5)
        _, residual = scalar_fit(cert.poly.eigenvector, REFERENCE_EIGENVECTOR)
        ok = (
            _close(cert.poly.eigenvector, REFERENCE_EIGENVECTOR, 1e-4)
            and _close(cert.poly.coeffs, REFERENCE_LOWER_COEFFS, 1e-4)
            and residual < 1e-3
            and cert.min_f > 0.3
            and cert.margin > 7e-5
        )
        return ok, f"margin={cert.margin:.3e} min_f={cert.min_f:.4f}"

    def lower_thresholds():
        failed_100 = []
        for order in (5, 10, 20):
            try:
                certify_lower(100, 0.775, order, grid)
            except CertificationFailed:
                failed_100.append(order)
        four = _succeeds(lambda: certify_lower(4, 0.5, 5, grid))
        three = _succeeds(lambda: certify_lower(3, 0.5, 5, grid))
        lo, hi = bisect_certified_threshold(3, 0.40, 0.47, 1e-4, 5, grid)
        ok = failed_100 == [5, 10, 20] and four and not three and 0.43 < lo and hi < 0.44
        return ok, f"A=100 failed at {failed_100}; A=4 {four}; A=3 {three}; A=3 threshold [{lo:.5f}, {hi:.5f}]"

    def upper_799():
        cert = certify_upper(0.799, 5, grid)
        ok = _close(cert.poly.coeffs, REFERENCE_UPPER_COEFFS, 1e-4) and cert.min_f > 0.3 and cert.margin < -0.0002
        return ok, f"margin={cert.margin:.3e} min_f={cert.min_f:.4f}"

    def high_alphabet():
        lo108, hi108 = bisect_certified_threshold(108, 0.770, 0.780, 1e-5, 5, grid)
        lo109, hi109 = bisect_certified_threshold(109, 0.770, 0.780, 1e-5, 5, grid)
        ok = abs(lo108 - 0.77474) <= 5e-4 and abs(lo109 - 0.77490) <= 5e-4
        return ok, f"A=108 -> {lo108:.5f}, A=109 -> {lo109:.5f}"

    def growth():
        rates = [growth_witness(3, budget).rate for budget in (10, 12, 14)]
        ok = rates[-1] > 1.05 and all(a <= b for a, b in zip(rates, rates[1:]))
        return ok, ", ".join(f"{r:.4f}" for r in rates)

    _check(checks, "census", "T(4) and T(5) by exhaustion", census)
    _check(checks, "construction", "(tau(G-e), tau(G/e)) = (t, u) with b1+...+bm+2 vertices", construction)
    _check(checks, "trimmed", "tau = t on b2+...+bm+2 vertices, values inside T(|V|)", trimmed)
    _check(checks, "admissible", "A=2 reduces onto SL(2, Z/qZ) for every q", admissible)
    _check(checks, "fibers", "sum of representation numbers equals ball size", fibers)
    _check(checks, "lower_110", "A=110 certifies dimension above 0.775", lower_110)
    _check(checks, "lower_thresholds", "A=100 fails at 0.775; A=4 passes and A=3 fails at 1/2", lower_thresholds)
    _check(checks, "upper_799", "full alphabet certifies dimension below 0.799", upper_799)
    _check(checks, "growth", "distinct trimmed tau values grow exponentially in the vertex budget", growth)
    if not quick:
        _check(checks, "high_alphabet", "certified thresholds for A=108, 109", high_alphabet)

    status = "ok" if all(c["ok"] for c in checks) else "fail"
    logger.info("selftest (%s): %s, %s checks", "quick" if quick else "full", status, len(checks))
    return {"status": status, "checks": checks}


def _succeeds(fn: Callable[[], object]) -> bool:
    try:
        fn()
        return True
    except CertificationFailed:
        return False
