"""Command-line interface: ``geomwords <command> ...``.

Output is a JSON envelope ``{"command", "params", "mode", "results",
"provenance"}`` by default, or CSV with ``--format csv``.  Result rows carry
the fields ``statistic, n, q, quantity, value_exact, value_float,
provenance``; ``value_exact`` is an ``"a/b"`` string in exact mode and null in
float mode.  ``verify`` rows are ``check, status, residual`` instead.

Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
3 capacity error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

from . import closed_forms as cf
from . import montecarlo as mc
from . import oracle
from . import verify as vf
from .law import DomainError, GeometricLaw, parse_scalar
from .words import STATISTICS, Word

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAPACITY = 0, 1, 2, 3
CSV_FIELDS = ("statistic", "n", "q", "quantity", "value_exact", "value_float", "provenance")
VERIFY_FIELDS = ("check", "status", "residual")
LIMIT_ROUTE = "q→1 limit"


class UsageError(Exception):
    pass


@dataclass
class Envelope:
    command: str
    params: dict
    mode: str
    results: list
    provenance: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "Envelope":
        return cls(data["command"], data["params"], data["mode"], data["results"], data["provenance"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)

    def to_csv(self) -> str:
        buf = io.StringIO()
        fields = VERIFY_FIELDS if self.command == "verify" else CSV_FIELDS
        writer = csv.DictWriter(buf, fieldnames=fields, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        writer.writerows(self.results)
        return buf.getvalue()


def _render(value):
    """``(value_exact, value_float)`` for one scalar."""
    if isinstance(value, Fraction):
        return str(value), float(value)
    if isinstance(value, int):
        return str(value), float(value)
    return None, float(value)


def _row(statistic, n, q, quantity, value, provenance, exact=True) -> dict:
    exact_text, approx = _render(value)
    return {
        "statistic": statistic,
        "n": n,
        "q": q,
        "quantity": quantity,
        "value_exact": exact_text if exact else None,
        "value_float": approx,
        "provenance": provenance,
    }


def _envelope(command, params, mode, rows) -> Envelope:
    tags = sorted({r["provenance"] for r in rows if "provenance" in r})
    return Envelope(command, params, mode, rows, tags)


def parse_word(text: str | None, path: str | None) -> Word:
    if path is not None:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read word file {path}: {exc}") from exc
        if not isinstance(data, list):
            raise UsageError("word file must hold a JSON array of positive integers")
        items = data
    elif text is not None:
        items = []
        for tok in text.split(","):
            tok = tok.strip()
            try:
                items.append(int(tok))
            except ValueError:
                raise UsageError(f"letter {tok!r} is not an integer") from None
    else:
        raise UsageError("give --word or --word-file")
    try:
        return Word(items)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def _parse_q(text: str, mode: str | None):
    """Return ``(q, mode)``; ``q`` is None for the literal ``"1"``."""
    try:
        if mode == "float":
            value = parse_scalar(text, exact=False)
        else:
            value = parse_scalar(text, exact=True if mode == "exact" or "/" in text else None)
            if isinstance(value, float) and value.is_integer():
                value = Fraction(int(value))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if value == 1:
        return None, "exact" if mode is None else mode
    try:
        law = GeometricLaw(value)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc
    return law, "exact" if law.exact else "float"


def _parse_q_list(text: str) -> list:
    try:
        return [Fraction(parse_scalar(t, exact=True)) for t in text.split(",")]
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _parse_n_list(text: str) -> list:
    try:
        return [int(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"malformed n list {text!r}") from None


def _statistics(choice):
    return list(STATISTICS) if choice in (None, "both") else [choice]


# ---------------------------------------------------------------- commands


def cmd_stat(args) -> tuple:
    word = parse_word(args.word, args.word_file)
    rows = []
    for statistic in _statistics(args.statistic):
        value = STATISTICS[statistic][0](word)
        rows.append(_row(statistic, word.n, None, "value", value, "direct"))
    return _envelope("stat", {"word": list(word), "statistic": args.statistic}, "exact", rows), EXIT_OK


def cmd_moments(args) -> tuple:
    law, mode = _parse_q(args.q, args.mode)
    params = {"statistic": args.statistic, "n": args.n, "q": args.q}
    rows = []
    for statistic in _statistics(args.statistic):
        if law is None:
            params["route"] = LIMIT_ROUTE
            mean, var = cf.permutation_limit_moments(args.n, statistic)
            e2 = var - mean + mean * mean
            if mode == "float":
                mean, var, e2 = float(mean), float(var), float(e2)
            q_text = "1"
        else:
            report = cf.closed_form_moments(statistic, args.n, law)
            mean, var, e2 = report.mean, report.variance, report.second_factorial_moment
            q_text = str(law.q)
        exact = mode == "exact"
        for name, value in (("mean", mean), ("second_factorial_moment", e2), ("variance", var)):
            rows.append(_row(statistic, args.n, q_text, name, value, "closed-form", exact))
    return _envelope("moments", params, mode, rows), EXIT_OK


def cmd_dist(args) -> tuple:
    law, mode = _parse_q(args.q, args.mode)
    if law is None:
        raise UsageError("q = 1 is not a geometric law; use `moments --q 1` for the permutation limit")
    table = oracle.distribution(args.statistic, args.n, law)
    rows = [_row(args.statistic, args.n, str(law.q), f"P[{k}]", pr, "oracle-exact", law.exact)
            for k, pr in table.entries.items()]
    params = {"statistic": args.statistic, "n": args.n, "q": args.q}
    return _envelope("dist", params, mode, rows), EXIT_OK


def cmd_simulate(args) -> tuple:
    law, _ = _parse_q(args.q, "float")
    if law is None or law.q == 0:
        raise UsageError("simulation needs 0 < q < 1")
    cfg = mc.SimulationConfig(args.statistic, args.n, law, args.samples, args.seed, args.workers)
    est = mc.estimate_moments(cfg)
    ref = cf.closed_form_moments(args.statistic, args.n, law)
    z = (est.mean - ref.mean) / est.standard_error if est.standard_error > 0 else 0.0
    q = str(law.q)
    s, n = args.statistic, args.n
    rows = [
        _row(s, n, q, "mean_estimate", est.mean, "monte-carlo", False),
        _row(s, n, q, "variance_estimate", est.variance, "monte-carlo", False),
        _row(s, n, q, "standard_error", est.standard_error, "monte-carlo", False),
        _row(s, n, q, "samples", est.samples, "monte-carlo", False),
        _row(s, n, q, "mean_reference", ref.mean, "closed-form", False),
        _row(s, n, q, "variance_reference", ref.variance, "closed-form", False),
        _row(s, n, q, "z_score", z, "monte-carlo", False),
    ]
    params = {"statistic": s, "n": n, "q": args.q, "samples": args.samples,
              "seed": args.seed, "workers": args.workers}
    return _envelope("simulate", params, "float", rows), EXIT_OK


def cmd_asymptotics(args) -> tuple:
    law, _ = _parse_q(args.q, "float")
    if law is None or law.q == 0:
        raise UsageError("asymptotics need 0 < q < 1")
    s, q = args.statistic, str(law.q)
    rows = []
    params = {"statistic": s, "q": args.q, "n_list": args.n_list}
    if s == "knuth":
        consts = cf.q_series_constants(law, args.tolerance)
        params["tolerance"] = args.tolerance
        rows.append(_row(s, None, q, "alpha", consts.alpha, "closed-form", False))
        rows.append(_row(s, None, q, "beta", consts.beta, "closed-form", False))
    for n in _parse_n_list(args.n_list):
        ref = cf.closed_form_moments(s, n, law)
        if s == "knuth":
            approx_mean, approx_var = cf.asymptotic_knuth(n, law, consts)
        else:
            approx_mean, approx_var = cf.asymptotic_inversions(n, law)
        for name, value, approx in (("mean", ref.mean, approx_mean), ("variance", ref.variance, approx_var)):
            rows.append(_row(s, n, q, name, value, "closed-form", False))
            rows.append(_row(s, n, q, f"{name}_approx", approx, "closed-form", False))
            rows.append(_row(s, n, q, f"{name}_residual", value - approx, "closed-form", False))
    return _envelope("asymptotics", params, "float", rows), EXIT_OK


def cmd_verify(args) -> tuple:
    qs = _parse_q_list(args.q) if args.q else list(vf.DEFAULT_Q)
    checks = vf.run_suite(args.suite, args.n_max, qs, sequences=args.sequences,
                          seed=args.seed, letter_bound=args.letter_bound)
    rows = [{"check": c.name, "status": c.status,
             "residual": None if c.residual is None else str(c.residual)} for c in checks]
    params = {"suite": args.suite, "n_max": args.n_max, "q": [str(q) for q in qs]}
    env = Envelope("verify", params, "exact", rows, ["closed-form", "oracle-exact"])
    statuses = {c.status for c in checks}
    if vf.FAIL in statuses:
        code = EXIT_FAIL
    elif vf.CAPACITY in statuses:
        code = EXIT_CAPACITY
    else:
        code = EXIT_OK
    return env, code


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="geomwords", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", help="write to this file instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)
    stats = list(STATISTICS)

    p = sub.add_parser("stat", parents=[common], help="statistics of a given word")
    p.add_argument("--word", help="comma-separated positive integers")
    p.add_argument("--word-file", help="JSON array of positive integers")
    p.add_argument("--statistic", choices=stats)
    p.set_defaults(func=cmd_stat)

    p = sub.add_parser("moments", parents=[common], help="closed-form mean and variance")
    p.add_argument("--statistic", choices=stats + ["both"], default="both")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", required=True, help='"a/b", a decimal, or "1" for the permutation limit')
    p.add_argument("--mode", choices=("exact", "float"))
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("dist", parents=[common], help="exact distribution by enumeration")
    p.add_argument("--statistic", choices=stats, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--mode", choices=("exact", "float"))
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo estimate")
    p.add_argument("--statistic", choices=stats, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--samples", type=int, default=10 ** 5)
    p.add_argument("--seed", type=int, default=mc.DEFAULT_SEED)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("asymptotics", parents=[common], help="large-n approximations")
    p.add_argument("--statistic", choices=stats, required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--n-list", required=True, help="comma-separated lengths")
    p.add_argument("--tolerance", type=float, default=1e-12)
    p.set_defaults(func=cmd_asymptotics)

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("--suite", choices=vf.SUITES + ("all",), default="all")
    p.add_argument("--n-max", type=int)
    p.add_argument("--q", help="comma-separated rationals (default 1/5,1/4,1/3,1/2,2/3,3/4)")
    p.add_argument("--sequences", type=int, default=100, help="random sequences for identities")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--letter-bound", type=int, help="fixed M for oracle-ladder (default: from tail bound)")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        env, code = args.func(args)
    except (UsageError, DomainError) as exc:
        print(f"geomwords: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except oracle.CapacityError as exc:
        print(f"geomwords: capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    text = env.to_csv() if args.format == "csv" else env.to_json() + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
