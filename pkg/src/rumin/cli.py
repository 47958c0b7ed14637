"""Command line: fiber tables, Rumin differentials and randomized identity checks.

Exit codes: 0 when every check passes, 1 when some check fails (witnesses are
printed), 2 on malformed input.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import random
import sys
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import comb
from typing import Callable, Dict, List, Optional, Sequence

from rumin.fibers import (
    duality_pairing,
    ideal_I_fiber,
    ideal_J_fiber,
    lefschetz,
    rumin_dim_formula,
    rumin_fiber_dims,
    weight_codegree_check,
)
from rumin.forms import PolyForm, in_J
from rumin.graded import load_group
from rumin.literals import LiteralError, parse_box, parse_map, parse_poly_form
from rumin.pansu import (
    DEFAULT_SCALES,
    ContactMap,
    HeisPoint,
    convergence_order,
    distance,
    pansu_exact,
    pansu_numeric,
    rumin_chain_check,
    theorem_j_check,
)
from rumin.rumin import LiftError, MembershipError, SupportError, lift_system, rumin_d
from rumin.sampling import rand_contact_map, rand_J_form, rand_rumin_form, rand_subbox, rand_test_form

STATUSES = ("pass", "fail", "vacuous")


class InputError(ValueError):
    """Arguments that parse but cannot be used."""


@dataclass
class Record:
    name: str
    status: str
    witness: Dict[str, str] = field(default_factory=dict)
    runtime: float = 0.0

    def __post_init__(self) -> None:
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")


@dataclass
class Report:
    command: str
    records: List[Record] = field(default_factory=list)
    summary: List[str] = field(default_factory=list)
    table: List[List[str]] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def failures(self) -> List[Record]:
        return [r for r in self.records if r.status == "fail"]

    @property
    def exit_code(self) -> int:
        return 1 if self.failures else 0

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "Report":
        data = json.loads(text)
        records = [Record(**r) for r in data.pop("records")]
        return cls(records=records, **data)

    def to_text(self) -> str:
        lines = list(self.summary)
        if self.table:
            widths = [max(len(row[c]) for row in self.table) for c in range(len(self.table[0]))]
            lines += ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in self.table]
        lines += self.notes
        for rec in self.failures:
            lines.append(f"FAIL {rec.name}")
            lines += [f"  {k}: {v}" for k, v in sorted(rec.witness.items())]
        return "\n".join(lines)

    def to_csv(self) -> str:
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(self.table)
        return buf.getvalue().rstrip("\n")


def _timed(name: str, fn: Callable[[], tuple]) -> Record:
    start = time.perf_counter()
    status, witness = fn()
    return Record(name, status, witness, round(time.perf_counter() - start, 6))


def _yes(flag: bool) -> str:
    return "yes" if flag else "no"


# subcommands


def cmd_dims(args) -> Report:
    report = Report(_echo(args))
    if args.group:
        g = load_group(args.group)
        report.table.append(["k", "dim_I", "dim_J", "dim_quotient", "weight_check"])
        for k in range(g.dim + 1):
            i_dim, j_dim = len(ideal_I_fiber(g, k)), len(ideal_J_fiber(g, k))
            check = weight_codegree_check(g, k)
            report.records.append(Record(check.name, check.status, {"detail": check.detail}))
            report.table.append([str(k), str(i_dim), str(j_dim), str(comb(g.dim, k) - i_dim), check.status])
        report.summary.append(f"{g.name or 'group'}: N={g.dim} step={g.step} nu={g.homogeneous_dim}")
        return report
    n = _need_n(args)
    dims = rumin_fiber_dims(n)
    report.summary.append(" ".join(map(str, dims)))
    report.table.append(["k", "dim_R", "formula"])
    for k, d in enumerate(dims):
        expected = rumin_dim_formula(n, k)
        report.table.append([str(k), str(d), str(expected)])
        status = "pass" if d == expected else "fail"
        report.records.append(Record(f"dim R^{k}", status, {"computed": str(d), "formula": str(expected)}))
    if args.format == "text":
        report.table = []
    return report


def cmd_lemma32(args) -> Report:
    n = _need_n(args)
    report = Report(_echo(args))
    report.table.append(["k", "shape", "rank", "injective", "surjective", "expected_inj", "expected_surj"])
    for k in range(2 * n + 1):
        rep = lefschetz(n, k)
        exp_inj, exp_surj = k <= n - 1, k >= n - 1
        ok = rep.injective == exp_inj and rep.surjective == exp_surj
        rows, cols = rep.shape
        report.table.append([str(k), f"{rows}x{cols}", str(rep.rank), _yes(rep.injective),
                             _yes(rep.surjective), _yes(exp_inj), _yes(exp_surj)])
        report.records.append(Record(f"W_{k}", "pass" if ok else "fail",
                                     {"rank": str(rep.rank), "shape": f"{rows}x{cols}"}))
    for k in range(n + 1):
        rep = duality_pairing(n, k)
        det = "none" if rep.determinant is None else str(rep.determinant)
        size = f"{len(rep.left)}x{len(rep.right)}"
        report.notes.append(f"pairing k={k}: {size} det={det}")
        report.records.append(Record(f"pairing {k}", "pass" if rep.nondegenerate else "fail",
                                     {"size": size, "det": det}))
    verdict = "PASS" if not report.failures else "FAIL"
    report.summary.append(f"{verdict} Lefschetz thresholds and duality pairings on H_{n}")
    return report


def cmd_rumin_d(args) -> Report:
    n = _need_n(args)
    alpha = _alpha(args, n)
    if alpha is None:
        raise InputError("rumin-d needs --alpha")
    k = _degree(args, alpha)
    report = Report(_echo(args))
    start = time.perf_counter()
    d_alpha = rumin_d(n, k, alpha, args.degree_bound)
    report.summary.append(f"d_{k}({alpha}) = {d_alpha if not d_alpha.is_zero() else 0}")
    report.records.append(Record(f"d_{k}", "pass", {"value": str(d_alpha)}, round(time.perf_counter() - start, 6)))
    if k == n:
        def lift():
            sol = lift_system(n, alpha, args.degree_bound)
            status = "pass" if sol.kernel_dim == 0 else "fail"
            return status, {"lift": str(sol.form), "unknowns": str(sol.unknowns), "kernel_dim": str(sol.kernel_dim)}
        report.records.append(_timed("lift uniqueness", lift))
    if k + 1 <= 2 * n:
        def dd():
            out = rumin_d(n, k + 1, d_alpha, args.degree_bound)
            return ("pass" if out.is_zero() else "fail"), {"d_d": str(out)}
        report.records.append(_timed(f"d_{k + 1} d_{k} = 0", dd))
    return report


def _trial_report(args, name: str, trial: Callable[[random.Random, int], tuple]) -> Report:
    report = Report(_echo(args))
    rng = random.Random(args.seed)
    worst = Fraction(0)
    for i in range(args.trials):
        start = time.perf_counter()
        residual, witness = trial(rng, i)
        witness["residual"] = str(residual)
        status = "pass" if residual == 0 else "fail"
        if residual != 0 and worst == 0:
            worst = residual
        report.records.append(Record(f"{name} {i + 1}", status, witness, round(time.perf_counter() - start, 6)))
    passed = args.trials - len(report.failures)
    verdict = "PASS" if not report.failures else "FAIL"
    report.summary.append(f"{verdict} residual={worst} ({passed}/{args.trials})")
    return report


def _maps(args, n: int) -> Callable[[random.Random], ContactMap]:
    if args.map:
        fixed = parse_map(args.map, n)
        return lambda rng: fixed
    return lambda rng: rand_contact_map(rng, n)


def _support(rng: random.Random, box):
    return rand_subbox(rng, box)


def cmd_weak_check(args) -> Report:
    from rumin.rumin import weak_identity_check

    n = _need_n(args)
    k = _need_k(args, n)
    beta_fixed = _alpha(args, n, k)
    gamma_fixed = parse_poly_form(args.gamma, n, k + 1) if args.gamma else None
    box = _box(args, n)

    def trial(rng, i):
        beta = beta_fixed if beta_fixed is not None else _random_rumin(rng, n, k, args.alpha_degree)
        gamma = gamma_fixed if gamma_fixed is not None else rumin_d(n, k, beta, args.degree_bound)
        eta = rand_test_form(rng, n, 2 * n - k, args.eta_degree, _support(rng, box), j_valued=k < n)
        res = weak_identity_check(n, k, beta, gamma, eta, box)
        return res, {"beta": str(beta), "gamma": str(gamma), "eta": str(eta)}

    return _trial_report(args, "weak identity", trial)


def cmd_j_check(args) -> Report:
    n = _need_n(args)
    maps = _maps(args, n)
    alpha_fixed = _alpha(args, n)
    if alpha_fixed is not None and not in_J(alpha_fixed):
        raise InputError(f"--alpha {args.alpha!r} is not J-valued")
    k = _degree(args, alpha_fixed) if alpha_fixed is not None else args.k
    if k is None or not n + 1 <= k <= 2 * n:
        raise InputError(f"j-check needs a degree k in {n + 1}..{2 * n}")
    box = _box(args, n)

    def trial(rng, i):
        f = maps(rng)
        alpha = alpha_fixed if alpha_fixed is not None else _nonzero(lambda: rand_J_form(rng, n, k, args.alpha_degree))
        eta = rand_test_form(rng, n, 2 * n - k, args.eta_degree, _support(rng, box), j_valued=False)
        res = theorem_j_check(f, alpha, eta, box)
        return res, {"map": f.label, "alpha": str(alpha), "eta": str(eta)}

    return _trial_report(args, "pullback identity", trial)


def cmd_chain_check(args) -> Report:
    n = _need_n(args)
    k = _need_k(args, n)
    maps = _maps(args, n)
    alpha_fixed = _alpha(args, n, k)
    if alpha_fixed is not None and k > n and not in_J(alpha_fixed):
        raise InputError(f"--alpha {args.alpha!r} is not J-valued")
    box = _box(args, n)

    def trial(rng, i):
        f = maps(rng)
        alpha = alpha_fixed if alpha_fixed is not None else _random_rumin(rng, n, k, args.alpha_degree)
        eta = rand_test_form(rng, n, 2 * n - k, args.eta_degree, _support(rng, box))
        res = rumin_chain_check(f, k, alpha, eta, box, args.degree_bound)
        return res, {"map": f.label, "alpha": str(alpha), "eta": str(eta)}

    return _trial_report(args, "chain identity", trial)


def cmd_pansu_numeric(args) -> Report:
    n = _need_n(args)
    if not args.map:
        raise InputError("pansu-numeric needs --map")
    f = parse_map(args.map, n)
    point = _point(args.point, n)
    scales = tuple(float(s) for s in args.scales.split(",")) if args.scales else DEFAULT_SCALES
    report = Report(_echo(args))
    start = time.perf_counter()
    exact = pansu_exact(f, point)
    num = pansu_numeric(f, point, scales)
    errors = [distance(e, exact) for e in num.estimates]
    extrap_err = distance(num.extrapolated, exact)
    # a Pansu-linear map is exact at every scale up to rounding; no order to fit
    exact_everywhere = max(errors) <= EXTRAPOLATION_TOL
    order = None if exact_everywhere else convergence_order(scales, errors)
    ok = num.converged and extrap_err <= EXTRAPOLATION_TOL and (exact_everywhere or order >= 1.0 - ORDER_SLACK)
    witness = {
        "exact": _fmt_diff(exact),
        "extrapolated": _fmt_diff(num.extrapolated, float_fmt=True),
        "errors": ",".join(f"{e:.3e}" for e in errors),
        "order": "exact" if order is None else f"{order:.6f}",
        "extrapolated_error": f"{extrap_err:.3e}",
    }
    report.records.append(Record("pansu differential", "pass" if ok else "fail", witness,
                                 round(time.perf_counter() - start, 6)))
    verdict = "PASS" if ok else "FAIL"
    report.summary.append(f"{verdict} D_P f{_fmt_point(point)} = {witness['exact']}")
    report.summary.append(f"scales {','.join(f'{s:g}' for s in scales)} errors {witness['errors']}")
    report.summary.append(f"order {witness['order']} extrapolated error {witness['extrapolated_error']}")
    return report


# numeric acceptance thresholds for pansu-numeric
ORDER_SLACK = 1e-6
EXTRAPOLATION_TOL = 1e-6


def _fmt_diff(d, float_fmt: bool = False) -> str:
    fmt = (lambda v: f"{float(v):.9g}") if float_fmt else str
    rows = ";".join(",".join(fmt(v) for v in row) for row in d.horizontal)
    return f"H=[{rows}] lam={fmt(d.vertical)}"


def _fmt_point(p: HeisPoint) -> str:
    return "(" + ",".join(str(v) for v in p.coords()) + ")"


# argument helpers


def _echo(args) -> str:
    return " ".join(args.argv)


def _need_n(args) -> int:
    if args.n is None or args.n < 1:
        raise InputError("--n must be a positive integer")
    return args.n


def _need_k(args, n: int) -> int:
    alpha = _alpha(args, n) if args.alpha else None
    k = args.k if args.k is not None else (alpha.degree if alpha is not None else None)
    if k is None or not 0 <= k <= 2 * n:
        raise InputError(f"--k must lie in 0..{2 * n}")
    return k


def _alpha(args, n: int, k: Optional[int] = None) -> Optional[PolyForm]:
    if not args.alpha:
        return None
    return parse_poly_form(args.alpha, n, k)


def _degree(args, alpha: PolyForm) -> int:
    if args.k is not None and args.k != alpha.degree:
        raise InputError(f"--alpha has degree {alpha.degree}, not --k {args.k}")
    return alpha.degree


def _box(args, n: int):
    if args.box:
        return parse_box(args.box, 2 * n + 1)
    return parse_box("x".join(["[0,1]"] * (2 * n + 1)))


def _point(text: Optional[str], n: int) -> HeisPoint:
    if not text:
        return HeisPoint.of([Fraction(0)] * (2 * n + 1))
    try:
        vals = [Fraction(v.strip()) for v in text.split(",")]
    except (ValueError, ZeroDivisionError):
        raise LiteralError(f"bad point {text!r}") from None
    if len(vals) != 2 * n + 1:
        raise LiteralError(f"point of H_{n} needs {2 * n + 1} coordinates")
    return HeisPoint.of(vals)


def _nonzero(draw):
    for _ in range(100):
        w = draw()
        if not w.is_zero():
            return w
    raise RuntimeError("random generator kept producing zero forms")


def _random_rumin(rng, n, k, degree):
    return _nonzero(lambda: rand_rumin_form(rng, n, k, degree))


COMMANDS = {
    "dims": cmd_dims,
    "lemma32": cmd_lemma32,
    "rumin-d": cmd_rumin_d,
    "weak-check": cmd_weak_check,
    "j-check": cmd_j_check,
    "chain-check": cmd_chain_check,
    "pansu-numeric": cmd_pansu_numeric,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rumin", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "dims": "dimensions of the Rumin fibers (or I/J tables for --group)",
        "lemma32": "Lefschetz ranks and duality pairings",
        "rumin-d": "apply the Rumin differential to --alpha",
        "weak-check": "weak-form identity against random test forms",
        "j-check": "pullback identity for J-valued forms under contact maps",
        "chain-check": "chain-map identity for Pansu pullback",
        "pansu-numeric": "difference-quotient Pansu differential vs exact",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--n", type=int, default=None if name == "dims" else 1)
        p.add_argument("--format", choices=("text", "json", "csv"), default="text")
        if name == "dims":
            p.add_argument("--group", help="heisenberg:n, abelian:m, engel, sums a+b, or a JSON file")
            continue
        if name == "lemma32":
            continue
        p.add_argument("--k", type=int)
        p.add_argument("--alpha", help='form literal such as "t*th[1]"')
        p.add_argument("--degree-bound", type=int, dest="degree_bound")
        if name == "rumin-d":
            continue
        if name == "pansu-numeric":
            p.add_argument("--map", required=True)
            p.add_argument("--point", help="comma-separated coordinates, default the origin")
            p.add_argument("--scales", help=f"comma-separated decreasing scales, default {DEFAULT_SCALES}")
            continue
        if name != "weak-check":
            p.add_argument("--map", help="contact map literal; random maps when omitted")
        else:
            p.add_argument("--gamma", help="claimed d_k of --alpha; computed when omitted")
        p.add_argument("--alpha-degree", type=int, default=2, dest="alpha_degree",
                       help="polynomial degree of random forms when --alpha is omitted")
        p.add_argument("--eta-degree", type=int, default=1, dest="eta_degree",
                       help="polynomial degree of the random test forms")
        p.add_argument("--box", help="integration box such as [0,1]x[0,1]x[0,1]")
        p.add_argument("--trials", type=int, default=20)
        p.add_argument("--seed", type=int, default=0)
    return parser


def run(argv: Sequence[str], out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    args.argv = list(argv)
    if args.format == "csv" and args.command not in ("dims", "lemma32"):
        parser.print_usage(err)
        print("error: csv output is only available for dims and lemma32", file=err)
        return 2
    try:
        report = COMMANDS[args.command](args)
    except (LiteralError, InputError, MembershipError, SupportError, LiftError, ValueError) as exc:
        parser.print_usage(err)
        print(f"error: {exc}", file=err)
        return 2
    if args.format == "json":
        print(report.to_json(), file=out)
    elif args.format == "csv":
        print(report.to_csv(), file=out)
    else:
        print(report.to_text(), file=out)
    return report.exit_code


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
