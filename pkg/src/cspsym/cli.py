"""Command-line entry point.

Exit codes: 0 pass, 1 fail, 2 unknown or limit reached, 3 input error.
Default limits can be overridden with the environment variables
``CSPSYM_MAX_STATES``, ``CSPSYM_MAX_DEPTH`` and ``CSPSYM_CAP``.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Sequence

from . import library
from .checkers import (
    FAIL,
    PASS,
    CheckPreconditionError,
    Limits,
    PropertyReport,
    check_electoral,
    check_pairwise_sync,
    check_symmetric,
    pair_coverage,
)
from .engine import (
    DEFAULT_COMPUTATION_CAP,
    DEFAULT_MAX_DEPTH,
    DEFAULT_MAX_STATES,
    PROPER,
    TRUNCATED,
    Computation,
    ExplorationLimit,
    computations,
    explore,
    random_run,
)
from .extension import (
    ExtensionError,
    check_identifying_structure,
    g_automorphisms,
    identifying_structure,
    parse_extension,
    slice_orbits,
    verify_extension,
)
from .graph import (
    DEFAULT_SEARCH_BOUND,
    GraphError,
    GraphFormatError,
    Permutation,
    SearchBoundExceeded,
    automorphisms,
    is_peer_to_peer,
    parse_graph,
)
from .lang.parser import ParseError
from .lang.system import (
    SystemDefinitionError,
    SystemFormatError,
    load_system,
    system_files,
    write_system,
)

EXIT = {PASS: 0, FAIL: 1, "unknown": 2}
INPUT_ERROR = 3


class InputError(Exception):
    pass


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"environment variable {name} is not an integer: {raw!r}") from None


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def _limits(args) -> Limits:
    return Limits(
        max_states=args.max_states or _env_int("CSPSYM_MAX_STATES", DEFAULT_MAX_STATES),
        max_depth=args.max_depth or _env_int("CSPSYM_MAX_DEPTH", DEFAULT_MAX_DEPTH),
        cap=args.cap or _env_int("CSPSYM_CAP", DEFAULT_COMPUTATION_CAP),
    )


def _emit(out, lines):
    for line in lines:
        print(line, file=out)


def _report(out, args, rep: PropertyReport) -> int:
    print(f"# {args.cmd_name} {_limits(args).header()}", file=out)
    _emit(out, rep.lines())
    return EXIT[rep.verdict]


def _write_trace(path: str | None, c: Computation | None):
    if not path or c is None:
        return
    with open(path, "w", encoding="utf-8") as fh:
        for line in c.lines():
            fh.write(line + "\n")
        fh.write(f"# outcome {c.outcome}\n")


# ---------------------------------------------------------------------------
# graph / ext


def cmd_graph_check(args, out) -> int:
    net = parse_graph(_read(args.file), args.file)
    rep = is_peer_to_peer(net, args.bound)
    group = automorphisms(net, args.bound)
    print(f"# graph check bound={args.bound}", file=out)
    print(f"vertices={len(net.vertices)} edges={len(net.edges)}", file=out)
    print(f"automorphisms={len(group)}", file=out)
    for p in group:
        print(f"  {p} period={p.period()} well_balanced={str(p.is_well_balanced()).lower()}", file=out)
    _emit(out, rep.lines())
    return 0 if rep.ok else 1


def cmd_ext_verify(args, out) -> int:
    x = parse_extension(_read(args.file), args.file)
    rep = verify_extension(x, args.bound)
    print(f"# ext verify bound={args.bound}", file=out)
    _emit(out, rep.lines())
    return 0 if rep.ok else 1


def cmd_ext_slice(args, out) -> int:
    x = parse_extension(_read(args.file), args.file)
    try:
        sigma = Permutation.from_cycles(args.sigma, x.base.vertices)
        iota = Permutation.from_cycles(args.iota, x.ext.vertices)
    except GraphError as exc:
        raise InputError(str(exc)) from None
    reps = args.reps.split(",") if args.reps else None
    result = slice_orbits(x, sigma, iota, reps)
    print("# ext slice", file=out)
    print(f"sigma={sigma}", file=out)
    print(f"iota={iota}", file=out)
    print(f"sliced={result}", file=out)
    print("orbits=" + " ".join("{" + ",".join(sorted(o)) + "}" for o in result.orbits()), file=out)
    print(f"period={result.period()} well_balanced={str(result.is_well_balanced()).lower()}", file=out)
    return 0


def cmd_ext_idstruct(args, out) -> int:
    x = parse_extension(_read(args.file), args.file)
    h = identifying_structure(x)
    print(f"# ext idstruct bound={args.bound}", file=out)
    print(f"vertices={len(h.ext.vertices)} edges={len(h.ext.edges)}", file=out)
    if args.check:
        group = check_identifying_structure(x, h, args.bound)
        print(f"automorphisms={len(group)} blocks_respected=true", file=out)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(h.to_text())
    else:
        out.write(h.to_text())
    return 0


# ---------------------------------------------------------------------------
# sys


def cmd_sys_explore(args, out) -> int:
    sys_ = load_system(args.file)
    lim = _limits(args)
    print(f"# sys explore {lim.header()}", file=out)
    try:
        g = explore(sys_, lim.max_states, lim.max_depth)
    except ExplorationLimit as exc:
        print("verdict=unknown", file=out)
        print(f"reason={exc}", file=out)
        for k in sorted(exc.stats):
            print(f"{k}={exc.stats[k]}", file=out)
        return 2
    st = g.stats()
    for k in sorted(st):
        print(f"{k}={st[k]}", file=out)
    print(f"acyclic={str(g.acyclic).lower()}", file=out)
    for tag, n in sorted(g.tags().items()):
        print(f"terminal_{tag}={n}", file=out)
    if g.acyclic:
        print(f"computations={g.count_computations()}", file=out)
    if args.graph:
        with open(args.graph, "w", encoding="utf-8") as fh:
            fh.write(g.to_text())
    if args.trace and g.acyclic:
        _write_trace(args.trace, next(computations(g, 1)))
    ok = g.acyclic and all(t == PROPER for t in g.terminal.values())
    print(f"verdict={'pass' if ok else 'fail'}", file=out)
    return 0 if ok else 1


def _pairs_arg(spec: str, vertices) -> list[str]:
    if spec == "all":
        return list(vertices)
    vs = [v.strip() for v in spec.split(",") if v.strip()]
    unknown = set(vs) - set(vertices)
    if unknown:
        raise InputError(f"unknown vertices in --pairs: {sorted(unknown)}")
    return vs


def cmd_sys_check_sync(args, out) -> int:
    sys_ = load_system(args.file)
    rep = check_pairwise_sync(sys_, _pairs_arg(args.pairs, sys_.vertices), _limits(args))
    _trace_from(rep, args.trace)
    return _report(out, args, rep)


def cmd_sys_check_election(args, out) -> int:
    sys_ = load_system(args.file)
    rep = check_electoral(sys_, _limits(args))
    _trace_from(rep, args.trace)
    return _report(out, args, rep)


def cmd_sys_check_symmetry(args, out) -> int:
    sys_ = load_system(args.file)
    if args.g_filter:
        x = parse_extension(_read(args.g_filter), args.g_filter)
        if x.ext != sys_.network:
            raise InputError("the --g-filter extension network differs from the system's network")
        group = g_automorphisms(x, args.bound)
    else:
        group = automorphisms(sys_.network, args.bound)
    rep = check_symmetric(sys_, group, _limits(args), method=args.method)
    _trace_from(rep, args.trace)
    return _report(out, args, rep)


def _trace_from(rep: PropertyReport, path: str | None):
    for w in rep.witnesses:
        if isinstance(w, Computation):
            _write_trace(path, w)
            return


def _seed_range(spec: str) -> range:
    a, sep, b = spec.partition("..")
    try:
        lo = int(a)
        hi = int(b) if sep else lo
    except ValueError:
        raise InputError(f"bad seed range {spec!r}; expected A..B") from None
    if hi < lo:
        raise InputError(f"empty seed range {spec!r}")
    return range(lo, hi + 1)


def cmd_sys_sample(args, out) -> int:
    sys_ = load_system(args.file)
    seeds = _seed_range(args.seeds)
    q = _pairs_arg(args.pairs, sys_.vertices) if args.pairs else None
    need = len(q) * (len(q) - 1) // 2 if q else 0
    print(f"# sys sample seeds={args.seeds} max_steps={args.max_steps}", file=out)
    counts: dict[str, int] = {}
    first_bad = None
    uncovered = 0
    first = None
    for seed in seeds:
        c = random_run(sys_, seed, args.max_steps)
        if first is None:
            first = c
        counts[c.outcome] = counts.get(c.outcome, 0) + 1
        short = q is not None and len(pair_coverage(c, q)) < need
        uncovered += short
        bad = c.outcome != PROPER or short
        # a genuine failure outranks an earlier truncated run as the witness
        upgrade = first_bad is not None and first_bad[1].outcome == TRUNCATED and c.outcome != TRUNCATED
        if bad and (first_bad is None or upgrade):
            first_bad = (seed, c)
    for k in sorted(counts):
        print(f"runs_{k}={counts[k]}", file=out)
    if q is not None:
        print(f"runs_missing_pairs={uncovered}", file=out)
    if first_bad is not None:
        seed, c = first_bad
        print(f"witness_seed={seed} outcome={c.outcome}", file=out)
        _write_trace(args.trace, c)
    else:
        _write_trace(args.trace, first)
    if first_bad is not None and first_bad[1].outcome != TRUNCATED:
        verdict = "fail"
    elif counts.get(TRUNCATED):
        verdict = "unknown"
    else:
        verdict = "pass"
    print(f"verdict={verdict}", file=out)
    return EXIT[verdict]


# ---------------------------------------------------------------------------
# gen


def cmd_gen(args, out) -> int:
    if args.name in library.GENERATORS:
        gen = library.GENERATORS[args.name]
        if args.net:
            net = parse_graph(_read(args.net), args.net)
            try:
                sys_ = gen(net)
            except TypeError:
                raise InputError(f"generator {args.name!r} does not take a network") from None
        else:
            sys_ = gen()
        if args.out:
            path = write_system(sys_, args.out)
            print(f"wrote {path}", file=out)
        else:
            for fname, text in system_files(sys_).items():
                print(f"==> {fname}", file=out)
                out.write(text)
        return 0
    if args.name in library.NETWORKS or args.name in library.EXTENSIONS:
        obj = (library.NETWORKS.get(args.name) or library.EXTENSIONS[args.name])()
        text = obj.to_text()
        if args.out:
            os.makedirs(args.out, exist_ok=True)
            suffix = "graph" if args.name in library.NETWORKS else "ext"
            path = os.path.join(args.out, f"{args.name}.{suffix}")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
            print(f"wrote {path}", file=out)
        else:
            out.write(text)
        return 0
    names = sorted(library.GENERATORS) + sorted(library.NETWORKS) + sorted(library.EXTENSIONS)
    raise InputError(f"unknown generator {args.name!r}; known: {', '.join(names)}")


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cspsym", description="Mini-CSP interpreter and verifier.")
    sub = ap.add_subparsers(dest="group", required=True)

    def limits(p):
        p.add_argument("--max-states", type=int, default=None)
        p.add_argument("--max-depth", type=int, default=None)
        p.add_argument("--cap", type=int, default=None, help="computation cap")
        p.add_argument("--trace", help="write a step log here")

    def bound(p):
        p.add_argument("--bound", type=int, default=DEFAULT_SEARCH_BOUND,
                       help="largest vertex count for automorphism search")

    g = sub.add_parser("graph").add_subparsers(dest="cmd", required=True)
    p = g.add_parser("check")
    p.add_argument("file")
    bound(p)
    p.set_defaults(func=cmd_graph_check, cmd_name="graph check")

    e = sub.add_parser("ext").add_subparsers(dest="cmd", required=True)
    p = e.add_parser("verify")
    p.add_argument("file")
    bound(p)
    p.set_defaults(func=cmd_ext_verify)
    p = e.add_parser("slice")
    p.add_argument("file")
    p.add_argument("--sigma", required=True)
    p.add_argument("--iota", required=True)
    p.add_argument("--reps", help="comma-separated representatives, one per sigma-orbit")
    p.set_defaults(func=cmd_ext_slice)
    p = e.add_parser("idstruct")
    p.add_argument("file")
    p.add_argument("--check", action="store_true")
    p.add_argument("--out")
    bound(p)
    p.set_defaults(func=cmd_ext_idstruct)

    s = sub.add_parser("sys").add_subparsers(dest="cmd", required=True)
    p = s.add_parser("explore")
    p.add_argument("file")
    p.add_argument("--graph", help="write the state graph listing here")
    limits(p)
    p.set_defaults(func=cmd_sys_explore, cmd_name="sys explore")
    p = s.add_parser("check-sync")
    p.add_argument("file")
    p.add_argument("--pairs", default="all")
    limits(p)
    p.set_defaults(func=cmd_sys_check_sync, cmd_name="sys check-sync")
    p = s.add_parser("check-election")
    p.add_argument("file")
    limits(p)
    p.set_defaults(func=cmd_sys_check_election, cmd_name="sys check-election")
    p = s.add_parser("check-symmetry")
    p.add_argument("file")
    p.add_argument("--g-filter", dest="g_filter")
    p.add_argument("--method", choices=["automaton", "enumerate"], default="automaton")
    limits(p)
    bound(p)
    p.set_defaults(func=cmd_sys_check_symmetry, cmd_name="sys check-symmetry")
    p = s.add_parser("sample")
    p.add_argument("file")
    p.add_argument("--seeds", default="1..100")
    p.add_argument("--max-steps", type=int, default=DEFAULT_MAX_DEPTH)
    p.add_argument("--pairs", help="also require direct communication for these pairs (all|a,b,...)")
    p.add_argument("--trace")
    p.set_defaults(func=cmd_sys_sample)

    p = sub.add_parser("gen")
    p.add_argument("name")
    p.add_argument("--net")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)
    return ap


def run_command(argv: Sequence[str], out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(list(argv))
    except SystemExit as exc:
        return INPUT_ERROR if exc.code else 0
    try:
        return args.func(args, out)
    except (InputError, GraphFormatError, ParseError, SystemFormatError, SystemDefinitionError,
            GraphError, ExtensionError, CheckPreconditionError, library.LibraryError) as exc:
        print(f"error: {exc}", file=err)
        return INPUT_ERROR
    except SearchBoundExceeded as exc:
        print(f"error: {exc}", file=err)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=err)
        return INPUT_ERROR


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
