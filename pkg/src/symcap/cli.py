"""Command-line front end.

Every subcommand builds one output record::

    {"command": ..., "request": {...}, "results": [row, ...], "diagnostics": {...}}

where a row carries ``j``, ``value`` (float), ``exact`` (symbolic string or
null), ``multiplicity``, ``provenance`` (list of strings) and ``bindings``
(radius symbols used by ``exact``).  Some commands add a ``summary`` object.
Exit status: 0 success, 2 input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .bidisk import (
    DEFAULT_NMAX,
    BidiskSpectrumQuery,
    bidisk_interval_intersection,
    bidisk_spectrum_values,
    verify_lag_report,
)
from .capacities import DomainSpec, Kind, capacity_ball, embedding_obstruction
from .domain import ActionValue, PSymmetry, default_tol, validate_radii
from .errors import AmbiguousInFloatMode, InputError, NoConvergence, NumericalFailure, SymcapError
from .hamiltonians import ball_gauge, ellipsoid_gauge, quadratic_hamiltonian, smoothed_bidisk_gauge
from .spectrum import eh_stream, sigma_p_prime_stream, sigma_p_stream

CSV_COLUMNS = ("j", "value", "exact", "multiplicity", "provenance")

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


# -- exact-string evaluation ---------------------------------------------------


def evaluate_exact(expr: str, bindings: dict | None = None, digits: int = 30) -> float:
    """Evaluate an ``exact`` string such as ``"3*pi*r1^2"`` or ``"10*cos(3*pi/10)"``.

    ``bindings`` maps radius symbols to decimal strings; they are read as
    exact rationals.
    """
    import sympy

    from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

    local = {"pi": sympy.pi, "cos": sympy.cos, "sin": sympy.sin, "sqrt": sympy.sqrt}
    for name, val in (bindings or {}).items():
        local[name] = sympy.Rational(str(val))
    e = parse_expr(expr, local_dict=local, transformations=standard_transformations + (convert_xor,))
    if e.free_symbols:
        raise InputError(f"unbound symbols in {expr!r}: {sorted(map(str, e.free_symbols))}")
    return float(sympy.N(e, digits))


# -- argument helpers ----------------------------------------------------------


def _floats(text: str, what: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"{what}: expected comma-separated numbers, got {text!r}") from None


def _radius_tokens(text: str) -> list[str]:
    toks = [t.strip() for t in text.split(",") if t.strip()]
    _floats(text, "--radii")
    return toks


def _radii(tokens: list[str], exact: bool):
    return validate_radii([Fraction(t) if exact else float(t) for t in tokens], True if exact else None)


def _bindings(tokens: list[str]) -> dict:
    return {f"r{i}": t for i, t in enumerate(tokens, start=1)}


def _row(j, v: ActionValue, bindings=None) -> dict:
    row = {
        "j": j,
        "value": v.numeric,
        "exact": v.expression(),
        "multiplicity": v.multiplicity,
        "provenance": [t.expression() for t in v.provenance] or [v.expression()],
        "bindings": dict(bindings or {}),
    }
    if v.exact:
        row["pi_multiple"] = str(v.pi_multiple)
    return row


def _tol(args) -> float:
    return default_tol() if getattr(args, "tol", None) is None else args.tol


# -- subcommands ---------------------------------------------------------------


def _cmd_sequence(args) -> dict:
    kind = args.command
    tol = _tol(args)
    if kind == "ball":
        tok = _radius_tokens(args.radius)
        if len(tok) != 1:
            raise InputError("--radius takes a single value")
        r = _radii(tok, args.exact)
        sym = PSymmetry(args.n, args.kappa)
        rows = [_row(j, capacity_ball(args.n, sym, r, j), {f"r{i}": tok[0] for i in range(1, args.n + 1)})
                for j in range(1, args.count + 1)]
        diag = {"tol": tol, "mode": "exact" if args.exact else "float", "ambiguities": [],
                "source": "ball table"}
        req = {"domain": "ball", "n": args.n, "radius": tok[0], "kappa": args.kappa}
    else:
        tok = _radius_tokens(args.radii)
        r = _radii(tok, args.exact)
        sym = PSymmetry(r.n, args.kappa)
        make = sigma_p_stream if kind == "ellipsoid" else sigma_p_prime_stream
        stream = make(r, sym, tol=tol, strict=args.strict)
        rows = [_row(j, v, _bindings(tok)) for j, v in enumerate(stream.sequence(args.count), start=1)]
        diag = {"tol": tol, "mode": "exact" if args.exact else "float",
                "ambiguities": list(stream.ambiguities), "flags": list(stream.flags)}
        req = {"domain": kind, "radii": tok, "kappa": args.kappa}
    req.update(count=args.count, exact=args.exact)
    return {"command": kind, "request": req, "results": rows, "diagnostics": diag}


def _cmd_spectrum(args) -> dict:
    tol = _tol(args)
    tok = _radius_tokens(args.radii)
    r = _radii(tok, args.exact)
    if args.type == "eh":
        stream = eh_stream(r, tol=tol, strict=args.strict)
    else:
        sym = PSymmetry(r.n, args.kappa)
        make = sigma_p_stream if args.type == "p" else sigma_p_prime_stream
        stream = make(r, sym, tol=tol, strict=args.strict)
    rows = [_row(i, v, _bindings(tok)) for i, v in enumerate(stream.groups(args.count), start=1)]
    return {
        "command": "spectrum",
        "request": {"type": args.type, "radii": tok, "kappa": args.kappa, "count": args.count,
                    "exact": args.exact},
        "results": rows,
        "diagnostics": {"tol": tol, "mode": "exact" if args.exact else "float",
                        "ambiguities": list(stream.ambiguities), "flags": list(stream.flags)},
    }


def _parse_domain(text: str, kappa: int, n_hint: int | None, exact: bool):
    """``ellipsoid:1,2`` / ``polydisc:1,2`` / ``ball:R`` (n from ``--n`` or the other domain)."""
    kind, sep, body = text.partition(":")
    if not sep or not body:
        raise InputError(f"domain must look like kind:values, got {text!r}")
    tok = _radius_tokens(body)
    kind = kind.strip().lower()
    if kind in ("ellipsoid", "polydisc"):
        r = _radii(tok, exact)
        d = DomainSpec(Kind(kind), PSymmetry(r.n, kappa), r)
        return d, _bindings(tok)
    if kind == "ball":
        if len(tok) != 1:
            raise InputError("ball takes one radius")
        if n_hint is None:
            raise InputError("ball domain needs --n when the other domain is also a ball")
        d = DomainSpec.ball(n_hint, kappa, Fraction(tok[0]) if exact else float(tok[0]),
                            exact=True if exact else None)
        return d, {f"r{i}": tok[0] for i in range(1, n_hint + 1)}
    raise InputError(f"unsupported domain kind {kind!r} (ellipsoid, polydisc, ball)")


def _domain_n(text: str) -> int | None:
    kind, _, body = text.partition(":")
    if kind.strip().lower() == "ball":
        return None
    return len(_radius_tokens(body)) if body else None


def _cmd_obstruct(args) -> dict:
    n = args.n or _domain_n(args.source) or _domain_n(args.target)
    a, ba = _parse_domain(args.source, args.kappa, n, args.exact)
    b, bb = _parse_domain(args.target, args.kappa, n, args.exact)
    verdict = embedding_obstruction(a, b, args.depth, tol=_tol(args))
    rows = []
    if verdict.values is not None:
        ra, rb = _row(verdict.witness, verdict.values[0], ba), _row(verdict.witness, verdict.values[1], bb)
        ra["domain"], rb["domain"] = "from", "to"
        rows = [ra, rb]
    return {
        "command": "obstruct",
        "request": {"from": args.source, "to": args.target, "kappa": args.kappa, "depth": args.depth,
                    "exact": args.exact},
        "results": rows,
        "summary": {"status": verdict.status.value, "witness": verdict.witness,
                    "checked_up_to": verdict.checked_up_to},
        "diagnostics": {"tol": _tol(args)},
    }


def _cmd_bidisk(args) -> dict:
    if args.verify:
        rep = verify_lag_report(args.nmax)
        rows = [_row(i, v) for i, v in enumerate(rep.c_P2_candidates, start=1)]
        return {
            "command": "bidisk",
            "request": {"mode": "verify", "n_max": args.nmax},
            "results": rows,
            "summary": {
                "ok": rep.ok(),
                "c_P1_interval": list(rep.c_P1_interval),
                "c_P1_candidates": [v.numeric for v in rep.c_P1_candidates],
                "c_P1_certified": rep.c_P1_certified,
                "c_P2_interval": list(rep.c_P2_interval),
                "c_P2_certified": rep.c_P2_certified,
                "c_EH_members": rep.c_EH_members,
                "lower_bound_cP2": rep.lower_bound_cP2,
            },
            "diagnostics": {"certified": rep.c_P1_certified and rep.c_P2_certified},
        }
    if args.interval:
        bounds = _floats(args.interval, "--interval")
        if len(bounds) != 2:
            raise InputError("--interval takes lo,hi")
        res = bidisk_interval_intersection(BidiskSpectrumQuery(bounds[0], bounds[1], args.nmax))
        if args.require_certified and not res.certified:
            raise NoConvergence(
                "intersection could not be certified",
                diagnostics={"accumulation_points": res.accumulation_points,
                             "partial": [v.numeric for v in res.values]},
            )
        return {
            "command": "bidisk",
            "request": {"mode": "interval", "lo": bounds[0], "hi": bounds[1], "n_max": args.nmax,
                        "certified": args.certified},
            "results": [_row(i, v) for i, v in enumerate(res.values, start=1)],
            "diagnostics": {
                "certified": res.certified,
                "accumulation_warning": res.accumulation_warning,
                "accumulation_points": res.accumulation_points,
                "boundary_ambiguous": [v.numeric for v in res.boundary_ambiguous],
            },
        }
    listing = bidisk_spectrum_values(args.nmax, max_value=args.max_value)
    return {
        "command": "bidisk",
        "request": {"mode": "listing", "n_max": args.nmax, "max_value": args.max_value},
        "results": [_row(i, v) for i, v in enumerate(listing, start=1)],
        "diagnostics": {"certified": False, "note": "listing truncated at n_max"},
    }


def _solve_gauge(args):
    kind, _, body = args.domain.partition(":")
    kind = kind.strip().lower()
    if kind == "ellipsoid":
        tok = _radius_tokens(body)
        r = validate_radii([float(t) for t in tok])
        sym = PSymmetry(r.n, args.kappa)
        return ellipsoid_gauge(r, sym), sym, r, _bindings(tok)
    if kind == "ball":
        tok = _radius_tokens(body)
        if len(tok) != 1 or args.n is None:
            raise InputError("ball domain needs one radius and --n")
        r = validate_radii([float(tok[0])] * args.n)
        sym = PSymmetry(args.n, args.kappa)
        return ball_gauge(args.n, float(tok[0]), sym), sym, r, {f"r{i}": tok[0] for i in range(1, args.n + 1)}
    if kind == "bidisk":
        p = 8.0
        if body:
            key, _, val = body.partition("=")
            p = float(val if val else key)
        sym = PSymmetry(2, args.kappa)
        return smoothed_bidisk_gauge(p, sym), sym, None, {}
    raise InputError(f"unsupported solve domain {kind!r} (ellipsoid, ball, bidisk[:p=..])")


def _cmd_solve(args) -> dict:
    from .solver import min_action_survey, min_brake_survey

    q, sym, r, bind = _solve_gauge(args)
    tol = 1e-8 if args.tol is None else args.tol
    if args.symmetry == "p":
        sym.require_proper("P-symmetric search")
        survey = min_action_survey(q, sym, starts=args.starts, tol=tol, threads=args.threads, seed=args.seed)
        closed = sigma_p_stream(r, sym) if r is not None else None
    else:
        survey = min_brake_survey(q, starts=args.starts, tol=tol, threads=args.threads, seed=args.seed)
        closed = eh_stream(r) if r is not None else None
    if not survey.found:
        raise NoConvergence("no start converged",
                            diagnostics={"starts": survey.attempted, "tol": tol})
    rows = []
    for i, c in enumerate(survey.found, start=1):
        row = {"j": i, "value": c.action, "exact": None, "multiplicity": 1,
               "provenance": [c.symmetry], "bindings": bind, "period": c.period,
               "residuals": c.residuals}
        if closed is not None:
            best = min(closed.up_to(c.action * 1.01 + 1.0), key=lambda v: abs(v.numeric - c.action))
            row["closed_form_match"] = best.expression()
            row["match_rel_error"] = abs(best.numeric - c.action) / best.numeric
        rows.append(row)
    return {
        "command": "solve",
        "request": {"domain": args.domain, "kappa": args.kappa, "symmetry": args.symmetry,
                    "starts": args.starts, "tol": tol, "threads": args.threads, "seed": args.seed},
        "results": rows,
        "summary": {"estimate": survey.estimate, "converged": survey.converged, "note": survey.note},
        "diagnostics": {"tol": tol},
    }


def _cmd_loopcheck(args) -> dict:
    from . import loopspace as L

    rng = np.random.default_rng(args.seed)
    checks = []
    dims_ok = all(L.constrained_dim(j, n, k) == L.constrained_dim_formula(j, n, k)
                  for n in range(1, args.n + 1) for k in range(n) for j in range(1, 21))
    checks.append({"check": "dimension formula", "ok": dims_ok, "error": 0.0})
    sym = PSymmetry(args.n, args.kappa)
    H = quadratic_hamiltonian(args.n, 1.7, sym)
    worst_act, worst_grad = 0.0, 0.0
    for _ in range(args.trials):
        x = L.make_loop(args.n, args.kappa, args.N, rng.standard_normal((2 * args.N + 1, 2 * args.n)))
        ts = np.arange(4 * args.N + 2) / (4 * args.N + 2)
        dx, xs = x.derivative(ts), x.evaluate(ts)
        quad = 0.5 * float(np.mean(np.sum(-np.concatenate([-dx[:, args.n:], dx[:, :args.n]], 1) * xs, 1)))
        worst_act = max(worst_act, abs(quad - L.action(x)) / max(1.0, abs(L.action(x))))
        g = L.grad_action_h(x, H)
        d = L.make_loop(args.n, args.kappa, args.N, rng.standard_normal((2 * args.N + 1, 2 * args.n)))
        h = 1e-5
        fd = (L.action_h(x + d * h, H) - L.action_h(x - d * h, H)) / (2 * h)
        an = L.inner_half(g, d)
        worst_grad = max(worst_grad, abs(fd - an) / max(1e-12, abs(an)))
    checks.append({"check": "spectral vs quadrature action", "ok": worst_act < 1e-10, "error": worst_act})
    checks.append({"check": "gradient vs central difference", "ok": worst_grad < 1e-6, "error": worst_grad})
    if not all(c["ok"] for c in checks):
        raise NoConvergence("loop-space self-test failed", diagnostics={"checks": checks})
    return {
        "command": "loopcheck",
        "request": {"n": args.n, "kappa": args.kappa, "N": args.N, "trials": args.trials, "seed": args.seed},
        "results": [],
        "summary": {"checks": checks},
        "diagnostics": {},
    }


# -- output --------------------------------------------------------------------


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, float) and not math.isfinite(o):
        return str(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _csv(record: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in record["results"]:
        prov = ";".join(row["provenance"])
        if "domain" in row:
            prov = f"{row['domain']}|{prov}"
        w.writerow([row["j"], repr(float(row["value"])), row["exact"] or "", row["multiplicity"], prov])
    return buf.getvalue()


def _table(record: dict) -> str:
    lines = [f"# {record['command']}  " + "  ".join(f"{k}={v}" for k, v in record["request"].items())]
    rows = [(str(r["j"]), f"{r['value']:.15g}", r["exact"] or "-", str(r["multiplicity"]),
             ";".join(r["provenance"])) for r in record["results"]]
    if rows:
        head = ("j", "value", "exact", "mult", "provenance")
        widths = [max(len(h), *(len(x[i]) for x in rows)) for i, h in enumerate(head)]
        lines.append("  ".join(h.ljust(w) for h, w in zip(head, widths)))
        lines.extend("  ".join(c.ljust(w) for c, w in zip(x, widths)) for x in rows)
    for key in ("summary", "diagnostics"):
        for k, v in record.get(key, {}).items():
            lines.append(f"# {k}: {v}")
    return "\n".join(lines) + "\n"


def emit(record: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(record, indent=2, default=_json_default) + "\n"
    if fmt == "csv":
        return _csv(record)
    return _table(record)


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="symcap", description="P-symmetric capacities and action spectra.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=("json", "csv", "table"), default="table")
    exact = argparse.ArgumentParser(add_help=False)
    exact.add_argument("--exact", action="store_true", help="read radii as exact decimals")
    exact.add_argument("--strict", action="store_true", help="fail on float-mode grouping ambiguity")
    exact.add_argument("--tol", type=float, default=None, help="relative tolerance (default SYMCAP_TOL or 1e-12)")
    sub = p.add_subparsers(dest="command", required=True)

    for name in ("ellipsoid", "polydisc"):
        s = sub.add_parser(name, parents=[fmt, exact], help=f"capacities c_P^1..c_P^J of a {name}")
        s.add_argument("--radii", required=True)
        s.add_argument("--kappa", type=int, required=True)
        s.add_argument("--count", type=int, default=8)
    s = sub.add_parser("ball", parents=[fmt, exact], help="capacities of the ball B^{2n}(R)")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--radius", "--radii", dest="radius", default="1")
    s.add_argument("--kappa", type=int, required=True)
    s.add_argument("--count", type=int, default=8)

    s = sub.add_parser("spectrum", parents=[fmt, exact], help="first K distinct spectrum values")
    s.add_argument("--type", choices=("p", "pprime", "eh"), default="p")
    s.add_argument("--radii", required=True)
    s.add_argument("--kappa", type=int, default=0)
    s.add_argument("--count", type=int, default=10)

    s = sub.add_parser("obstruct", parents=[fmt, exact], help="capacity-sequence embedding obstruction")
    s.add_argument("--from", dest="source", required=True)
    s.add_argument("--to", dest="target", required=True)
    s.add_argument("--kappa", type=int, required=True)
    s.add_argument("--depth", type=int, default=64)
    s.add_argument("--n", type=int, default=None)

    s = sub.add_parser("bidisk", parents=[fmt], help="Lagrangian bidisk spectrum")
    s.add_argument("--interval", default=None, help="lo,hi (half-open)")
    s.add_argument("--certified", action="store_true",
                   help="attach the tail-certificate status (always computed for --interval)")
    s.add_argument("--require-certified", action="store_true",
                   help="exit 3 unless the intersection is certified")
    s.add_argument("--verify", action="store_true", help="report the c_P^1, c_P^2 brackets")
    s.add_argument("--nmax", type=int, default=None)
    s.add_argument("--max-value", type=float, default=20.0)

    s = sub.add_parser("solve", parents=[fmt], help="numerical closed-characteristic search")
    s.add_argument("--domain", required=True, help="ellipsoid:1,2 | ball:R (with --n) | bidisk[:p=8]")
    s.add_argument("--kappa", type=int, default=0)
    s.add_argument("--n", type=int, default=None)
    s.add_argument("--symmetry", choices=("p", "brake"), default="p")
    s.add_argument("--starts", type=int, default=64)
    s.add_argument("--tol", type=float, default=None)
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("loopcheck", parents=[fmt], help="loop-space self-tests")
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--kappa", type=int, default=1)
    s.add_argument("--N", type=int, default=8)
    s.add_argument("--trials", type=int, default=10)
    s.add_argument("--seed", type=int, default=0)
    return p


_HANDLERS = {
    "ellipsoid": _cmd_sequence,
    "polydisc": _cmd_sequence,
    "ball": _cmd_sequence,
    "spectrum": _cmd_spectrum,
    "obstruct": _cmd_obstruct,
    "bidisk": _cmd_bidisk,
    "solve": _cmd_solve,
    "loopcheck": _cmd_loopcheck,
}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse usage errors
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.command == "bidisk" and args.nmax is None:
        args.nmax = DEFAULT_NMAX if (args.interval or args.verify) else 64
    try:
        record = _HANDLERS[args.command](args)
    except (InputError, ValueError) as exc:
        stderr.write(f"symcap: input error: {exc}\n")
        return EXIT_INPUT
    except NumericalFailure as exc:
        stderr.write(f"symcap: numerical failure: {exc}\n")
        stderr.write(json.dumps({"diagnostics": exc.diagnostics}, default=_json_default) + "\n")
        return EXIT_NUMERIC
    except AmbiguousInFloatMode as exc:
        stderr.write(f"symcap: ambiguous in float mode: {exc}; rerun with --exact\n")
        return EXIT_NUMERIC
    except SymcapError as exc:
        stderr.write(f"symcap: {exc}\n")
        return EXIT_NUMERIC
    stdout.write(emit(record, args.format))
    return EXIT_OK


def main() -> None:
    sys.exit(run())
