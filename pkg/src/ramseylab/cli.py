"""Command-line entry point.

Exit status: 0 on success, 1 when a check ran and answered no, 2 when the
command could not run (usage, I/O or domain error).  Errors are reported on
stderr as one JSON object carrying a stable ``code``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable

from . import builder, convexlp, incidence, matrices, randgen
from .errors import InvalidInput, PartialColoring, RamseyLabError
from .predim import (
    Alpha,
    Graph,
    approx_below,
    closure,
    delta,
    delta_of,
    empty_graph,
    free_amalgam,
    hit_interval,
    is_closed,
    kalpha_member,
    parse_alpha,
)

EXIT_OK, EXIT_NO, EXIT_ERROR = 0, 1, 2
DEFAULT_ALPHA = "quad:-1,1,1,2"


@dataclass
class Outcome:
    """What a subcommand produced: a payload to emit and its verdict."""

    payload: object
    ok: bool = True
    fmt: str = "json"  # default format when --format is not given


# --- serialization -------------------------------------------------------------


def _jsonable(x):
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (frozenset, set)):
        return sorted((_jsonable(v) for v in x), key=repr)
    if hasattr(x, "to_json"):
        return _jsonable(x.to_json())
    return x


def render(results, fmt: str) -> str:
    """Bit-stable text for ``results``: sorted-key JSON, CSV, or raw text."""
    if fmt == "json":
        return json.dumps(_jsonable(results), sort_keys=True, indent=1) + "\n"
    if fmt == "csv":
        if isinstance(results, str):
            return results
        records = [_jsonable(r) for r in results]
        if not records:
            return ""
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=sorted(records[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(records)
        return buf.getvalue()
    if fmt == "text":
        return results if isinstance(results, str) else render(results, "json")
    raise InvalidInput(f"unknown format {fmt!r}")


def emit_report(results, fmt: str = "json", path=None) -> str:
    text = render(results, fmt)
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)
    return text


# --- input helpers -------------------------------------------------------------


def _read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path}: not valid JSON ({exc.msg})") from exc


def _graph(path) -> Graph:
    data = _read_json(path)
    return Graph.from_json(data.get("graph", data))  # glue output wraps the graph


def _label(tok: str):
    tok = tok.strip()
    try:
        return int(tok)
    except ValueError:
        return tok


def _subset(text: str | None) -> list:
    if not text:
        return []
    return [_label(t) for t in text.split(",") if t.strip()]


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise InvalidInput(f"expected comma-separated integers, got {text!r}") from exc


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidInput(f"not a rational number: {text!r}") from exc


def _fixture(directory, name: str):
    d = Path(directory)
    return _graph(d / f"{name}.graph.json"), _read_json(d / f"{name}.params.json")


def _ab_fixture(directory):
    B, params = _fixture(directory, "ab")
    A = Graph.from_json(params["A"]) if "A" in params else _triangle()
    return A, B, params


def _triangle() -> Graph:
    return Graph([0, 1, 2], [(0, 1), (1, 2), (0, 2)])


def _incidence(args) -> incidence.IncidenceStructure:
    if args.fano:
        return incidence.fano_plane()
    if not args.incidence:
        raise InvalidInput("give --incidence FILE or --fano")
    return incidence.IncidenceStructure.from_json(_read_json(args.incidence))


# --- subcommands ---------------------------------------------------------------


def cmd_gen_matrix(args, alpha) -> Outcome:
    Y = randgen.base_matrix(args.n)
    if args.p is not None:
        Y = randgen.perturb(Y, _fraction(args.p), args.seed, args.trial)
    return Outcome(matrices.format_matrix(Y), fmt="text")


def cmd_check_config(args, alpha) -> Outcome:
    M = matrices.read_matrix(args.matrix)
    rep = matrices.k_config_check(M, args.k)
    missing = None
    if rep.missing is not None:
        missing = {"columns": list(rep.missing.one_based()), "values": list(rep.missing.values)}
    return Outcome({"k": args.k, "holds": rep.holds, "missing": missing}, rep.holds)


def cmd_check_convex(args, alpha) -> Outcome:
    M = matrices.read_matrix(args.matrix)
    split = convexlp.natural_split(M.n_cols) if args.halving else None
    res = convexlp.convex_ramsey_decide(M, split=split, engine=args.engine)
    return Outcome(res.to_json(), res.satisfies)


def cmd_sweep(args, alpha) -> Outcome:
    rows = randgen.sweep(_ints(args.ns), args.k, _fraction(args.eps), args.trials, args.seed)
    if args.format == "json":
        return Outcome([r.as_record() for r in rows])
    return Outcome(randgen.sweep_csv(rows), fmt="csv")


def cmd_bounds(args, alpha) -> Outcome:
    return Outcome(randgen.bounds(args.n, _fraction(args.p), _fraction(args.t)).to_json())


def cmd_delta(args, alpha) -> Outcome:
    G = _graph(args.graph)
    val = delta_of(G, _subset(args.subset), alpha) if args.subset else delta(G, alpha)
    return Outcome({"v": val.v, "e": val.e, "value": str(val), "approx": float(val)})


def cmd_member(args, alpha) -> Outcome:
    ok, bad = kalpha_member(_graph(args.graph), alpha, args.engine)
    return Outcome({"member": ok, "violating": None if bad is None else bad}, ok)


def cmd_closed(args, alpha) -> Outcome:
    ok = is_closed(_subset(args.subset), _graph(args.graph), alpha, args.engine)
    return Outcome({"closed": ok}, ok)


def cmd_closure(args, alpha) -> Outcome:
    G = _graph(args.graph)
    cl = closure(_subset(args.subset), G, alpha, args.engine)
    return Outcome({"closure": [v for v in G.vertices if v in cl]})


def cmd_amalgam(args, alpha) -> Outcome:
    shared = _subset(args.shared) if args.shared is not None else None
    return Outcome(free_amalgam(_graph(args.graph), _graph(args.other), shared))


def cmd_approx(args, alpha) -> Outcome:
    if args.N is not None:
        pair = approx_below(alpha, args.N)
    elif args.lo is not None and args.hi is not None:
        pair = hit_interval(alpha, _fraction(args.lo), _fraction(args.hi), r_cap=args.limit, r_min=args.r_min)
    else:
        raise InvalidInput("give --N, or both --lo and --hi")
    val = pair.value(alpha)
    return Outcome({"r": pair.r, "s": pair.s, "value": str(val), "approx": float(val)})


def _write_build(args, name, graph, params, report, extra=None) -> Outcome:
    payload = {"params": params, "report": report.to_json()}
    if args.out and args.out != "-":
        paths = builder.write_fixture(args.out, name, graph, params, report, extra)
        payload["files"] = [str(p) for p in paths]
        args.out = None  # fixture files already written; summary goes to stdout
    else:
        payload["graph"] = graph.to_json()
    return Outcome(payload, report.ok)


def cmd_build_ef(args, alpha) -> Outcome:
    F = _graph(args.graph) if args.graph else empty_graph(args.f_size)
    if args.verify_only:
        EF, params = _fixture(args.verify_only, "ef")
        rep = builder.verify_EF(EF, builder.EFParams(**_ef_params(params, alpha)), F)
        return Outcome({"params": params, "report": rep.to_json()}, rep.ok)
    EF, params, rep = builder.build_EF(alpha, args.N, F, r_cap=args.limit)
    return _write_build(args, "ef", EF, params.to_json(), rep)


def _ef_params(p: dict, alpha: Alpha) -> dict:
    fields = ("N", "m", "r", "s", "r0", "r1", "m0", "m1")
    out = {k: int(p[k]) for k in fields}
    out["alpha"] = parse_alpha(p["alpha"])
    out["attach"] = tuple(p["attach"])
    out["E"] = tuple(p["E"])
    out["F"] = tuple(p["F"])
    return out


def cmd_build_ab(args, alpha) -> Outcome:
    if args.verify_only:
        A, B, params = _ab_fixture(args.verify_only)
        ab = builder.ABParams(
            parse_alpha(params["alpha"]),
            int(params["n"]),
            int(params["C"]),
            int(params["r_u"]),
            int(params["s_u"]),
            tuple((tuple(p["u"]), tuple(p["vertices"])) for p in params["pieces"]),
        )
        rep = builder.verify_AB(A, B, ab)
        return Outcome({"params": params, "report": rep.to_json()}, rep.ok)
    A, B, params, rep = builder.build_AB(alpha, args.n, args.C, r_cap=args.limit)
    pj = params.to_json()
    pj["A"] = A.to_json()
    return _write_build(args, "ab", B, pj, rep)


def cmd_glue(args, alpha) -> Outcome:
    A, B, _ = _ab_fixture(args.fixture)
    g = builder.glue_lines(B, A, args.pattern, args.count, alpha)
    return Outcome({"graph": g.graph.to_json(), "copies": [sorted(m.values()) for m in g.copies]})


def cmd_extract(args, alpha) -> Outcome:
    A, B, _ = _ab_fixture(args.fixture)
    X = _graph(args.graph)
    return Outcome(incidence.extract_incidence(X, A, B, alpha))


def cmd_pseudoplane(args, alpha) -> Outcome:
    I = _incidence(args)
    ok = incidence.is_k_pseudoplane(I, args.k)
    return Outcome({"k": args.k, "pseudoplane": ok}, ok)


def _order(args):
    return random.Random(args.seed) if args.shuffle else None


def cmd_free(args, alpha) -> Outcome:
    I = _incidence(args)
    free, state = incidence.is_free_k_pseudoplane(I, args.k, _order(args))
    return Outcome({"k": args.k, "free": free, "state": state.to_json()}, free)


def cmd_color(args, alpha) -> Outcome:
    I = _incidence(args)
    M = matrices.read_matrix(args.matrix)
    f = incidence.consistent_coloring(I, M, args.k, _order(args), check=not args.no_check)
    return Outcome(f)


def cmd_verify_color(args, alpha) -> Outcome:
    I = _incidence(args)
    M = matrices.read_matrix(args.matrix)
    f = incidence.Coloring.from_json(_read_json(args.coloring), I)
    try:
        ok, reason = incidence.verify_coloring(I, M, f), None
    except PartialColoring as exc:
        ok, reason = False, str(exc)
    return Outcome({"valid": ok, "reason": reason}, ok)


def cmd_extend(args, alpha) -> Outcome:
    A, B, _ = _ab_fixture(args.fixture)
    M = _graph(args.graph)
    return Outcome(builder.extend_generic(M, _subset(args.subset), B, A, alpha))


COMMANDS: dict[str, tuple[Callable, str]] = {
    "gen-matrix": (cmd_gen_matrix, "base matrix, optionally perturbed with flip probability p"),
    "check-config": (cmd_check_config, "k-configuration check of a matrix"),
    "check-convex": (cmd_check_convex, "exact convex Ramsey decision (minimum spread)"),
    "sweep": (cmd_sweep, "Monte-Carlo sweep over matrix sizes"),
    "bounds": (cmd_bounds, "union and tail bounds"),
    "delta": (cmd_delta, "pre-dimension of a graph or subset"),
    "member": (cmd_member, "membership in K_alpha"),
    "closed": (cmd_closed, "closedness of a subset"),
    "closure": (cmd_closure, "closure of a subset"),
    "amalgam": (cmd_amalgam, "free amalgam of two graphs"),
    "approx": (cmd_approx, "integer pairs placing r - alpha*s in a window"),
    "build-ef": (cmd_build_ef, "extension E of F with small negative relative delta"),
    "build-ab": (cmd_build_ab, "the (A;B) pair of triangles and connecting pieces"),
    "glue": (cmd_glue, "chain, star or cycle of B-copies glued over A-copies"),
    "extract": (cmd_extract, "incidence structure of closed A- and B-copies"),
    "pseudoplane": (cmd_pseudoplane, "k-pseudoplane check"),
    "free": (cmd_free, "free k-pseudoplane check by peeling"),
    "color": (cmd_color, "consistent coloring from matrix rows"),
    "verify-color": (cmd_verify_color, "check that every line reads a matrix row"),
    "extend": (cmd_extend, "one step of generic extension by B over a closed A-copy"),
}


def _global_flags() -> argparse.ArgumentParser:
    g = argparse.ArgumentParser(add_help=False)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--alpha", default=DEFAULT_ALPHA, help="quad:a,b,c,d meaning (a + b*sqrt(d))/c")
    g.add_argument("--out", default=None, help="output file, or directory for fixtures")
    g.add_argument("--format", choices=("json", "csv", "text"), default=None)
    g.add_argument("--limit", type=int, default=10**5, help="search cap for Diophantine scans")
    g.add_argument(
        "--verify-only",
        metavar="PATH",
        default=None,
        help="replay: compare against a previous report (fixture directory for build-*)",
    )
    return g


def _add_arguments(name: str, p: argparse.ArgumentParser) -> None:
    engine = dict(choices=("auto", "brute", "pieces", "mincut"), default="auto")
    if name == "gen-matrix":
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--p", default=None)
        p.add_argument("--trial", type=int, default=0)
    elif name == "check-config":
        p.add_argument("--matrix", required=True)
        p.add_argument("--k", type=int, required=True)
    elif name == "check-convex":
        p.add_argument("--matrix", required=True)
        p.add_argument("--engine", choices=("auto", "simplex", "certified"), default="auto")
        p.add_argument("--halving", action="store_true", help="allow the halving certificate on the natural split")
    elif name == "sweep":
        p.add_argument("--k", type=int, required=True)
        p.add_argument("--ns", required=True, help="comma-separated even sizes")
        p.add_argument("--eps", required=True)
        p.add_argument("--trials", type=int, required=True)
    elif name == "bounds":
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--p", required=True)
        p.add_argument("--t", required=True)
    elif name in ("delta", "member", "closed", "closure"):
        p.add_argument("--graph", required=True)
        if name != "member":
            p.add_argument("--subset", default=None if name == "delta" else "")
        if name != "delta":
            p.add_argument("--engine", **engine)
    elif name == "amalgam":
        p.add_argument("--graph", required=True)
        p.add_argument("--other", required=True)
        p.add_argument("--shared", default=None)
    elif name == "approx":
        p.add_argument("--N", type=int, default=None)
        p.add_argument("--lo", default=None)
        p.add_argument("--hi", default=None)
        p.add_argument("--r-min", type=int, default=0)
    elif name == "build-ef":
        p.add_argument("--N", type=int, default=10)
        p.add_argument("--f-size", type=int, default=4, help="F as this many isolated vertices")
        p.add_argument("--graph", default=None, help="F as a graph file instead")
    elif name == "build-ab":
        p.add_argument("--n", type=int, default=3)
        p.add_argument("--C", type=int, default=17)
    elif name == "glue":
        p.add_argument("--fixture", required=True, help="directory holding ab.graph.json")
        p.add_argument("--pattern", choices=("chain", "star", "cycle"), default="chain")
        p.add_argument("--count", type=int, default=3)
    elif name == "extract":
        p.add_argument("--fixture", required=True)
        p.add_argument("--graph", required=True)
    elif name in ("pseudoplane", "free", "color", "verify-color"):
        p.add_argument("--incidence", default=None)
        p.add_argument("--fano", action="store_true")
        if name != "verify-color":
            p.add_argument("--k", type=int, default=2)
        if name in ("free", "color"):
            p.add_argument("--shuffle", action="store_true", help="peel in a random order drawn from --seed")
        if name in ("color", "verify-color"):
            p.add_argument("--matrix", required=True)
        if name == "color":
            p.add_argument("--no-check", action="store_true")
        if name == "verify-color":
            p.add_argument("--coloring", required=True)
    elif name == "extend":
        p.add_argument("--fixture", required=True)
        p.add_argument("--graph", required=True)
        p.add_argument("--subset", required=True, help="closed copy of A in the graph")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ramseylab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    common = _global_flags()
    for name, (_, help_text) in COMMANDS.items():
        _add_arguments(name, sub.add_parser(name, parents=[common], help=help_text))
    return parser


def _error(code: str, message: str) -> int:
    sys.stderr.write(json.dumps({"error": code, "message": message}, sort_keys=True) + "\n")
    return EXIT_ERROR


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed usage
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    func, _ = COMMANDS[args.command]
    try:
        alpha = parse_alpha(args.alpha)
        replay_build = args.command in ("build-ef", "build-ab")
        outcome = func(args, alpha)
        fmt = args.format or outcome.fmt
        if args.verify_only and not replay_build:
            expected = Path(args.verify_only).read_text()
            same = render(outcome.payload, fmt) == expected
            sys.stdout.write(json.dumps({"replay_matches": same}) + "\n")
            return EXIT_OK if same else EXIT_NO
        emit_report(outcome.payload, fmt, args.out)
    except RamseyLabError as exc:
        return _error(exc.code, str(exc))
    except OSError as exc:
        return _error("IO_ERROR", str(exc))
    return EXIT_OK if outcome.ok else EXIT_NO


def main() -> None:
    sys.exit(run())
