# treecount/cli/commands.py
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import re
import shlex
import sys
from pathlib import Path
from typing import Callable, Optional, TextIO

from pydantic import BaseModel
from sqlalchemy.exc import SQLAlchemyError

from treecount import cache, records
from treecount.census import alpha_table, conjecture_evidence, growth_witness
from treecount.cfrac import cf_expand, parse_bs, parse_cf, parse_rational, to_alternating
from treecount.core.config import settings
from treecount.database import SessionLocal
from treecount.dimension import (
    bisect_certified_threshold,
    certificate_curve,
    certify_lower,
    certify_upper,
    fractal_circles,
    pressure_estimate,
    TransferConfig,
)
from treecount.errors import CertificationFailed, DomainError, ParseError, TreecountError
from treecount.monitoring import run_selftest
from treecount.orbit import (
    admissible_residues,
    ball,
    congruence_quotient,
    denominators,
    numerators,
    representation_number,
)
from treecount.schemas import (
    AdmissibleOut,
    AlphaOut,
    BallStatsOut,
    CertificateOut,
    CFOut,
    CongruenceOut,
    EvidenceOut,
    GraphReportOut,
    GrowthOut,
    NumeratorsOut,
    PressureOut,
    RepNumOut,
    RunRecordOut,
    SelftestOut,
    TauOut,
    ThresholdOut,
)
from treecount.treegraph import (
    MarkedGraph,
    build_from_alternating,
    build_trimmed,
    parse_edge_list,
    stv,
    tau,
    to_dot,
    to_edge_list,
)

logger = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad input; that code means a failed certificate here."""

    def error(self, message: str):
        raise ParseError(message, 0)


def _json(model: BaseModel) -> str:
    return model.model_dump_json(indent=2)


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


_DIGITS = re.compile(r"[0-9]+")


def _int_list(text: str) -> list[int]:
    out = []
    pos = 0
    for token in text.split(","):
        if not _DIGITS.fullmatch(token.strip()):
            raise ParseError(f"expected an integer, got {token.strip()!r}", pos)
        out.append(int(token))
        pos += len(token) + 1
    return out


class TreecountCLI:
    def __init__(self, stdout: Optional[TextIO] = None, stderr: Optional[TextIO] = None):
        self.parser: _Parser | None = None
        self.stdout = stdout or sys.stdout
        self.stderr = stderr or sys.stderr
        self.last_output: Optional[str] = None

    def _db(self):
        return SessionLocal()

    def initialize(self) -> None:
        parser = _Parser(prog="treecount", description="Spanning-tree counts, thin orbits and dimension certificates.")
        parser.add_argument("--no-record", action="store_true", help="do not store this run")
        parser.add_argument("--workers", type=int, default=None, help="process pool size for census scans and bisections")
        sub = parser.add_subparsers(dest="command", required=True)

        p = sub.add_parser("cf", help="continued fraction and alternating form")
        p.add_argument("value", nargs="?", help="rational t/u")
        p.add_argument("--eval", dest="cf_text", help='evaluate "[a0;a1,...]"')
        p.set_defaults(handler=self.cmd_cf)

        p = sub.add_parser("graph", help="build the marked graph of an alternating form")
        p.add_argument("--bs", required=True, help="letters b1,...,bm")
        p.add_argument("--trim", action="store_true")
        fmt = p.add_mutually_exclusive_group()
        fmt.add_argument("--dot", action="store_true")
        fmt.add_argument("--edges", action="store_true")
        p.set_defaults(handler=self.cmd_graph)

        p = sub.add_parser("tau", help="spanning trees of an edge-list graph")
        p.add_argument("path", help="edge-list file, or - for stdin")
        p.set_defaults(handler=self.cmd_tau)

        p = sub.add_parser("census", help="T(n) by exhaustion")
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--all-graphs", action="store_true", help="drop the planarity filter")
        p.set_defaults(handler=self.cmd_census)

        p = sub.add_parser("alpha", help="minimal vertex counts")
        p.add_argument("--t", required=True, help="comma list of targets")
        p.add_argument("--cap", type=int, default=None)
        p.add_argument("--csv", action="store_true")
        p.add_argument("--growth", type=int, default=None, metavar="A", help="also report the growth witness for letters <= A")
        p.add_argument("--budget", type=int, default=14)
        p.set_defaults(handler=self.cmd_alpha)

        p = sub.add_parser("evidence", help="smallest letter bound and construction size for every t <= T")
        p.add_argument("--T", type=int, required=True)
        p.add_argument("--max-letter", type=int, default=50)
        p.add_argument("--csv", action="store_true")
        p.set_defaults(handler=self.cmd_evidence)

        p = sub.add_parser("orbit", help="semigroup balls and congruence quotients")
        verbs = p.add_subparsers(dest="verb", required=True)
        v = verbs.add_parser("ball")
        v.add_argument("--A", type=int, required=True)
        v.add_argument("--N", type=float, required=True)
        v = verbs.add_parser("numerators")
        v.add_argument("--A", type=int, required=True)
        v.add_argument("--N", type=float, required=True)
        v.add_argument("--denominators", action="store_true")
        v = verbs.add_parser("repnum")
        v.add_argument("--A", type=int, required=True)
        v.add_argument("--N", type=float, required=True)
        v.add_argument("--n", type=int, required=True)
        v = verbs.add_parser("admissible")
        v.add_argument("--A", type=int, required=True)
        v.add_argument("--qmax", type=int, required=True)
        p.set_defaults(handler=self.cmd_orbit)

        p = sub.add_parser("dim", help="transfer-operator dimension bounds")
        verbs = p.add_subparsers(dest="verb", required=True)
        v = verbs.add_parser("lower")
        v.add_argument("--A", type=int, required=True)
        v.add_argument("--s", type=float, required=True)
        v.add_argument("--order", type=int, default=settings.DEFAULT_ORDER)
        v.add_argument("--grid", type=int, default=None)
        v.add_argument("--family", choices=("alternating", "zaremba"), default="alternating")
        v = verbs.add_parser("upper")
        v.add_argument("--s", type=float, required=True)
        v.add_argument("--order", type=int, default=settings.DEFAULT_ORDER)
        v.add_argument("--grid", type=int, default=None)
        v = verbs.add_parser("pressure")
        v.add_argument("--A", type=int, required=True)
        v.add_argument("--s", type=float, required=True)
        v.add_argument("--depth", type=int, default=10)
        v.add_argument("--method", choices=("average", "ratio"), default="average")
        v.add_argument("--family", choices=("alternating", "zaremba"), default="alternating")
        v = verbs.add_parser("circles")
        v.add_argument("--depth", type=int, required=True)
        v.add_argument("--max-digit", type=int, default=10)
        v = verbs.add_parser("threshold")
        v.add_argument("--A", type=int, required=True)
        v.add_argument("--lo", type=float, required=True)
        v.add_argument("--hi", type=float, required=True)
        v.add_argument("--tol", type=float, default=1e-4)
        v.add_argument("--order", type=int, default=settings.DEFAULT_ORDER)
        v.add_argument("--grid", type=int, default=None)
        v = verbs.add_parser("curve", help="CSV of x, f_s and L_s f_s - f_s")
        v.add_argument("--kind", choices=("lower", "upper"), default="lower")
        v.add_argument("--A", type=int, default=None)
        v.add_argument("--s", type=float, required=True)
        v.add_argument("--order", type=int, default=settings.DEFAULT_ORDER)
        v.add_argument("--samples", type=int, default=201)
        v.add_argument("--family", choices=("alternating", "zaremba"), default="alternating")
        p.set_defaults(handler=self.cmd_dim)

        p = sub.add_parser("reproduce-paper", help="run the acceptance suite")
        p.add_argument("--full", action="store_true")
        p.set_defaults(handler=self.cmd_reproduce)

        p = sub.add_parser("records", help="list stored runs")
        p.add_argument("--limit", type=int, default=10)
        p.add_argument("--command", dest="prefix", default=None)
        p.set_defaults(handler=self.cmd_records, no_record=True)

        self.parser = parser
        logger.debug("TreecountCLI initialized")

    # -------- dispatch --------

    def run(self, argv: Optional[list[str]] = None) -> int:
        if self.parser is None:
            self.initialize()
        argv = list(sys.argv[1:] if argv is None else argv)

        output: Optional[str] = None
        args: Optional[argparse.Namespace] = None
        try:
            args = self.parser.parse_args(argv)
            handler: Callable[[argparse.Namespace], str] = args.handler
            output = handler(args)
            code = 0
        except Exception as exc:
            # unparsable input leaves args unset and is never recorded
            code = self.on_error(exc)
        self.last_output = output

        if output is not None:
            self.stdout.write(output if output.endswith("\n") else output + "\n")
        if args is not None and settings.RECORD_RUNS and not args.no_record:
            self._record(argv, args, output, code)
        return code

    def on_error(self, exc: Exception) -> int:
        if isinstance(exc, TreecountError):
            self.stderr.write(f"error: {exc}\n")
            return exc.exit_code
        logger.exception("Unhandled CLI error", exc_info=exc)
        self.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 1

    def _record(self, argv: list[str], args: argparse.Namespace, output: Optional[str], code: int) -> None:
        inputs = {k: v for k, v in vars(args).items() if k != "handler"}
        db = self._db()
        try:
            records.create_run_record(
                db, command=shlex.join(argv), inputs=inputs, outputs=output, exit_code=code, argv=argv,
            )
        except SQLAlchemyError:
            logger.warning("run record not stored", exc_info=True)
        finally:
            db.close()

    # -------- Commands --------

    def cmd_cf(self, args: argparse.Namespace) -> str:
        if args.cf_text:
            cf = parse_cf(args.cf_text)
        elif args.value:
            cf = cf_expand(parse_rational(args.value))
        else:
            raise ParseError("give a rational or --eval", 0)
        value = cf.value
        form = to_alternating(value) if 0 < value < 1 else None
        return _json(CFOut.from_expansion(cf, form))

    def cmd_graph(self, args: argparse.Namespace) -> str:
        bs = parse_bs(args.bs)
        report = build_trimmed(bs) if args.trim else build_from_alternating(bs)
        if args.dot:
            return to_dot(report.graph)
        if args.edges:
            return to_edge_list(report.graph)
        return _json(GraphReportOut.from_report(report))

    def cmd_tau(self, args: argparse.Namespace) -> str:
        text = sys.stdin.read() if args.path == "-" else Path(args.path).read_text()
        graph = parse_edge_list(text)
        vector = stv(graph) if isinstance(graph, MarkedGraph) else None
        return _json(TauOut(
            vertices=graph.n,
            edges=graph.edge_count,
            tau=tau(graph),
            tau_del=vector.tau_del if vector else None,
            tau_con=vector.tau_con if vector else None,
            simple=graph.is_simple(),
            planar=graph.is_planar(),
        ))

    def cmd_census(self, args: argparse.Namespace) -> str:
        db = self._db()
        try:
            payload, hit = cache.cached_census(db, args.n, not args.all_graphs, args.workers)
        finally:
            db.close()
        logger.info("census n=%s cache %s", args.n, "hit" if hit else "miss")
        return json.dumps(json.loads(payload), indent=2)

    def cmd_alpha(self, args: argparse.Namespace) -> str:
        entries = [AlphaOut.from_entry(e) for e in alpha_table(_int_list(args.t), args.cap)]
        if args.csv:
            rows = [[e.t, e.alpha if e.alpha is not None else "", e.exact, e.upper_bound or ""] for e in entries]
            return _csv(["t", "alpha", "exact", "upper_bound"], rows)
        payload = [e.model_dump(mode="json") for e in entries]
        if args.growth:
            payload.append(GrowthOut.from_witness(growth_witness(args.growth, args.budget)).model_dump(mode="json"))
        return json.dumps(payload, indent=2)

    def cmd_evidence(self, args: argparse.Namespace) -> str:
        rows = conjecture_evidence(args.T, args.max_letter)
        if args.csv:
            header = ["t", "min_letter", "u", "bs", "construction_vertices", "alpha", "log_ratio"]
            return _csv(header, [
                [
                    r.t,
                    r.min_letter or "",
                    r.u or "",
                    ",".join(map(str, r.bs)) if r.bs else "",
                    r.construction_vertices or "",
                    r.alpha or "",
                    f"{r.log_ratio:.6f}" if r.log_ratio is not None else "",
                ]
                for r in rows
            ])
        return _json(EvidenceOut.from_rows(args.T, args.max_letter, rows))

    def cmd_orbit(self, args: argparse.Namespace) -> str:
        if args.verb == "admissible":
            outs = []
            for q in range(2, args.qmax + 1):
                cq = congruence_quotient(args.A, q)
                outs.append(CongruenceOut.from_quotient(cq, admissible_residues(cq)))
            return _json(AdmissibleOut(A=args.A, qmax=args.qmax, all_full=all(o.full for o in outs), quotients=outs))

        sball = ball(args.A, args.N)
        if args.verb == "ball":
            return _json(BallStatsOut.from_ball(sball))
        if args.verb == "numerators":
            kind = "denominators" if args.denominators else "numerators"
            values = denominators(sball) if args.denominators else numerators(sball)
            return _json(NumeratorsOut(A=args.A, N=args.N, kind=kind, values=values))
        return _json(RepNumOut(
            A=args.A, N=args.N, n=args.n,
            count=representation_number(sball, args.n),
            ball_size=sball.size,
        ))

    def cmd_dim(self, args: argparse.Namespace) -> str:
        if args.verb == "pressure":
            cfg = TransferConfig(args.A, args.s, settings.DEFAULT_ORDER, args.family)
            value = pressure_estimate(cfg, args.depth, args.method)
            return _json(PressureOut(A=args.A, s=args.s, depth=args.depth, method=args.method, family=args.family, value=value))
        if args.verb == "circles":
            rows = [[c.center, c.diameter, c.depth] for c in fractal_circles(args.depth, args.max_digit)]
            return _csv(["center", "diameter", "depth"], rows)
        if args.verb == "threshold":
            lo, hi = bisect_certified_threshold(args.A, args.lo, args.hi, args.tol, args.order, args.grid, args.workers)
            return _json(ThresholdOut(A=args.A, lo=lo, hi=hi, order=args.order))
        if args.verb == "curve":
            if args.kind == "lower" and args.A is None:
                raise DomainError("a lower-bound curve needs --A")
            A = args.A if args.kind == "lower" else None
            cfg = TransferConfig(A, args.s, args.order, args.family)
            xs, f_vals, diff = certificate_curve(cfg, args.samples)
            rows = [[f"{x:.6f}", f"{f:.12e}", f"{d:.12e}"] for x, f, d in zip(xs, f_vals, diff)]
            return _csv(["x", "f_s", "Lf_s_minus_f_s"], rows)

        try:
            if args.verb == "lower":
                cert = certify_lower(args.A, args.s, args.order, args.grid, args.family)
            else:
                cert = certify_upper(args.s, args.order, args.grid)
        except CertificationFailed as exc:
            # the rejected certificate is still useful output
            if exc.certificate is not None:
                self.stdout.write(_json(CertificateOut.from_certificate(exc.certificate)) + "\n")
            raise
        return _json(CertificateOut.from_certificate(cert))

    def cmd_reproduce(self, args: argparse.Namespace) -> str:
        result = SelftestOut(**run_selftest(quick=not args.full))
        lines = [f"{'check':<18} {'ok':<5} claim / detail"]
        for c in result.checks:
            lines.append(f"{c.name:<18} {'PASS' if c.ok else 'FAIL':<5} {c.claim} / {c.detail}")
        lines.append(f"status: {result.status}")
        if result.status != "ok":
            self.stdout.write("\n".join(lines) + "\n")
            raise _SelftestFailed("acceptance suite failed")
        return "\n".join(lines)

    def cmd_records(self, args: argparse.Namespace) -> str:
        db = self._db()
        try:
            rows = records.list_run_records(db, command=args.prefix, limit=args.limit)
            payload = [RunRecordOut.model_validate(r).model_dump(mode="json") for r in rows]
        finally:
            db.close()
        return json.dumps(payload, indent=2)


class _SelftestFailed(TreecountError):
    pass


def replay(argv: list[str]) -> tuple[int, Optional[str]]:
    """Re-run a stored argument vector without recording; returns (exit code, output)."""
    out = io.StringIO()
    cli = TreecountCLI(stdout=out, stderr=io.StringIO())
    cli.initialize()
    code = cli.run(["--no-record"] + list(argv))
    return code, cli.last_output
