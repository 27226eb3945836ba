"""Command-line interface.

Exit codes: 0 success or affirmative answer, 1 negative answer, 2 usage or
parse error, 3 search budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Optional

from . import __version__
from .codes import ChannelSpec, is_prefix_code, kraft_sum, redundancy
from .disentangle import (
    DisentangleInput,
    NoApplicableCase,
    ProductSpec,
    disentangle,
    disentangle_case1,
    disentangle_case2,
    case1_channel,
)
from .formats import FormatError, format_codebook, format_probs, parse_codebook, parse_probs
from .search import optimal_tree_code
from .selvage import selvage_code, spa
from .separation import (
    SeparationWitness,
    above_tree_line_sufficient,
    find_t_separation,
    format_partition,
    is_separated,
)
from .treedec import NotDecodable, decide_tree_decodable, to_sexpr

EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

TABLE1 = {
    (2, 2, 2): ("1.559581", "1.559581"),
    (5, 3, 2): ("2.976887", "2.980124"),
    (6, 3, 2): ("3.154833", "3.154833"),
}


class UsageError(Exception):
    pass


def _read(path: Optional[str]) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        _write(args.output, json.dumps(payload, sort_keys=True, indent=2) + "\n")
    else:
        _write(args.output, text.rstrip("\n") + "\n")


def _spec(sizes) -> ChannelSpec:
    try:
        return ChannelSpec(tuple(sizes))
    except ValueError as e:
        raise UsageError(str(e)) from None


def _parse_partition(text: str, n: int):
    try:
        parts = [tuple(int(k) for k in chunk.split(",")) for chunk in text.split("/")]
    except ValueError:
        raise UsageError(f"bad partition {text!r}; use e.g. 0,1/2/3") from None
    flat = sorted(k for p in parts for k in p)
    if flat != list(range(n)):
        raise UsageError(f"partition {text!r} does not cover positions 0..{n - 1} once")
    return tuple(parts)


def cmd_check(args) -> int:
    cb = parse_codebook(_read(args.input))
    prefix = is_prefix_code(cb)
    kraft = kraft_sum(cb)
    payload = {"channels": list(cb.spec.sizes), "codewords": len(cb), "prefix": prefix,
               "kraft_sum": f"{kraft.numerator}/{kraft.denominator}"}
    lines = [f"channels: {cb.spec}", f"codewords: {len(cb)}",
             f"prefix code: {'yes' if prefix else 'no'}", f"kraft sum: {kraft}"]
    if prefix:
        res = decide_tree_decodable(cb)
        if isinstance(res, NotDecodable):
            payload["tree_decodable"] = False
            payload["witness_rows"] = list(res.rows)
            payload["witness"] = [str(c) for c in res.witness]
            lines.append("tree-decodable: no")
            lines.append("interweave witness (rows " + ",".join(map(str, res.rows)) + "): "
                         + " ".join(str(c) for c in res.witness))
        else:
            payload["tree_decodable"] = True
            payload["tree"] = to_sexpr(res)
            lines.append("tree-decodable: yes")
            lines.append(f"tree: {to_sexpr(res)}")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK if prefix else EXIT_NO


def cmd_tree(args) -> int:
    cb = parse_codebook(_read(args.input))
    if not is_prefix_code(cb):
        raise UsageError("input is not a prefix code")
    res = decide_tree_decodable(cb)
    if isinstance(res, NotDecodable):
        _emit(args, {"tree_decodable": False, "witness_rows": list(res.rows),
                     "witness": format_codebook(res.witness)},
              "not tree-decodable; witness:\n" + format_codebook(res.witness))
        return EXIT_NO
    _emit(args, {"tree_decodable": True, "tree": to_sexpr(res)}, to_sexpr(res))
    return EXIT_OK


def cmd_selvage(args) -> int:
    out = selvage_code(_spec(args.sizes))
    if args.output is not None:
        _write(args.output, format_codebook(out.full))
        print(f"unit_count: {out.unit_count}")
    else:
        sys.stdout.write(format_codebook(out.full))
        print(f"# unit_count: {out.unit_count}")
    return EXIT_OK


def cmd_spa(args) -> int:
    spec = _spec(args.sizes)
    out = selvage_code(spec)
    if args.output is not None:
        _write(args.output, format_probs(out.spa))
        print(f"unit_count: {out.unit_count}")
    else:
        sys.stdout.write(format_probs(out.spa))
        print(f"# unit_count: {out.unit_count}")
    return EXIT_OK


def cmd_separate(args) -> int:
    spec = _spec(args.sizes)
    n = spec.n
    if args.t is not None:
        if not 1 <= args.t <= n:
            raise UsageError(f"t must be in 1..{n}")
        ts = [args.t]
    else:
        ts = list(range(1, n + 1))
    found = {t: find_t_separation(spec, t) for t in ts}
    singles = {}
    for k in range(n):
        wit = is_separated((k,), spec)
        singles[k] = None if wit is None else list(wit.x)
    report = above_tree_line_sufficient(spec) if args.t is None else None
    payload = {
        "channels": list(spec.sizes),
        "separations": {str(t): (None if p is None else [list(x) for x in p]) for t, p in found.items()},
        "singleton_witnesses": {str(k): v for k, v in singles.items()},
    }
    lines = [f"channels: {spec}"]
    for t, p in found.items():
        lines.append(f"t={t}: " + ("none" if p is None else format_partition(p, spec)))
    for k, v in singles.items():
        lines.append(f"{{{spec[k]}}} at position {k}: "
                     + ("separated" if v is None else f"not separated, witness {tuple(v)}"))
    if report is not None:
        payload["verdict"] = report.verdict
        lines.append(f"verdict: {report.verdict}")
    _emit(args, payload, "\n".join(lines))
    if args.t is not None:
        return EXIT_OK if found[args.t] is not None else EXIT_NO
    return EXIT_OK if any(p is not None for t, p in found.items() if t >= 2) else EXIT_NO


def cmd_disentangle(args) -> int:
    spec = _spec(args.sizes)
    partition = _parse_partition(args.partition, spec.n)
    try:
        if args.part is not None:
            if args.witness is None:
                raise UsageError("--part needs --witness")
            x = tuple(int(v) for v in args.witness.split(","))
            pspec = ProductSpec(spec, partition)
            inside = [k for k in pspec.partition[args.part] if x[k] > 0]
            inp = DisentangleInput(pspec, args.part,
                                   SeparationWitness(x, inside[0] if inside else -1))
            res = disentangle_case1(inp) if case1_channel(inp) is not None else disentangle_case2(inp)
        else:
            res = disentangle(spec, partition)
    except NoApplicableCase as e:
        print(f"no construction: {e}", file=sys.stderr)
        return EXIT_NO
    except ValueError as e:
        raise UsageError(str(e)) from None
    red = redundancy(res.codebook, res.probabilities)
    payload = {
        "case": res.case, "root_class": res.root_class,
        "failing_part": res.input.failing_part, "witness": list(res.input.witness.x),
        "codebook": format_codebook(res.codebook), "probabilities": format_probs(res.probabilities),
        "tree": to_sexpr(res.tree), "codewords": len(res.codebook),
        "redundancy_zero": red.is_zero(),
    }
    text = (f"# case {res.case}, root class {res.root_class}, part {res.input.failing_part}, "
            f"witness {res.input.witness.x}, redundancy {red.pretty()}\n"
            + format_codebook(res.codebook) + f"# tree: {to_sexpr(res.tree)}\n")
    _emit(args, payload, text)
    return EXIT_OK


def _search_payload(res) -> dict:
    return {
        "channels": list(res.spec.sizes),
        "tree": to_sexpr(res.tree),
        "assignment": {str(j): f"{p.numerator}/{p.denominator}" for j, p in enumerate(res.probs)},
        "expected_exact": res.expected.pretty(),
        "expected": res.expected.to_decimal(6),
        "entropy": res.entropy.to_decimal(6),
        "optimal_is_entropy": res.optimal_is_entropy,
        "certified": res.certified,
    }


def cmd_search(args) -> int:
    spec = _spec(args.sizes)
    if args.spa:
        probs = spa(spec)
    elif args.input is not None:
        probs = parse_probs(_read(args.input))
    else:
        raise UsageError("search needs --input <probs> or --spa")
    res = optimal_tree_code(probs, spec, budget=args.budget)
    payload = _search_payload(res)
    text = "\n".join([
        f"channels: {spec}",
        f"tree: {payload['tree']}",
        f"expected: {payload['expected']} ({payload['expected_exact']})",
        f"entropy: {payload['entropy']}",
        f"optimal is entropy: {'yes' if res.optimal_is_entropy else 'no'}",
        f"certified: {'yes' if res.certified else 'no'}",
    ])
    _emit(args, payload, text)
    if not res.certified and args.certify:
        return EXIT_BUDGET
    return EXIT_OK


def _table1_row(sizes, budget):
    res = optimal_tree_code(spa(sizes), sizes, budget=budget)
    return sizes, res.entropy.to_decimal(6), res.expected.to_decimal(6), res.certified


def cmd_table1(args) -> int:
    rows = list(TABLE1)
    if args.jobs and args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            results = list(ex.map(_table1_row, rows, [args.budget] * len(rows)))
    else:
        results = [_table1_row(r, args.budget) for r in rows]
    payload = {"rows": []}
    lines = [f"{'Q':<12}{'entropy':>12}{'tree-decodable':>16}  status"]
    status = EXIT_OK
    for sizes, h, opt, cert in results:
        ref = TABLE1[sizes]
        match = (h, opt) == ref
        flags = []
        if not match:
            flags.append(f"MISMATCH reference {ref[0]} / {ref[1]}")
            status = max(status, EXIT_NO)
        if not cert:
            flags.append("NOT CERTIFIED")
            if args.certify:
                status = EXIT_BUDGET
        payload["rows"].append({"channels": list(sizes), "entropy": h, "optimal_tree_decodable": opt,
                                "certified": cert, "matches_reference": match})
        label = "(" + ",".join(map(str, sizes)) + ")-ary"
        lines.append(f"{label:<12}{h:>12}{opt:>16}  " + ("; ".join(flags) or "ok"))
    _emit(args, payload, "\n".join(lines))
    return status


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", "-i")
    common.add_argument("--output", "-o")
    common.add_argument("--json", action="store_true")
    common.add_argument("--budget", type=float, default=None, help="search time limit (s)")
    common.add_argument("--certify", action="store_true",
                        help="exit 3 unless optimality is proven")
    common.add_argument("--jobs", type=int, default=1)

    ap = argparse.ArgumentParser(prog="mcprefix", description="Multichannel prefix code lab")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    sub.add_parser("check", parents=[common], help="prefix / Kraft / tree report").set_defaults(func=cmd_check)
    sub.add_parser("tree", parents=[common], help="decoding tree or witness").set_defaults(func=cmd_tree)
    for name, func in (("selvage", cmd_selvage), ("spa", cmd_spa)):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("sizes", type=int, nargs="+")
        p.set_defaults(func=func)
    p = sub.add_parser("separate", parents=[common])
    p.add_argument("sizes", type=int, nargs="+")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--t", type=int)
    g.add_argument("--all", action="store_true")
    p.set_defaults(func=cmd_separate)
    p = sub.add_parser("disentangle", parents=[common])
    p.add_argument("sizes", type=int, nargs="+")
    p.add_argument("--partition", required=True, help="positions, e.g. 0,1/2/3")
    p.add_argument("--part", type=int, help="failing part index")
    p.add_argument("--witness", help="comma-separated solution vector")
    p.set_defaults(func=cmd_disentangle)
    p = sub.add_parser("search", parents=[common])
    p.add_argument("sizes", type=int, nargs="+")
    p.add_argument("--spa", action="store_true", help="search on the selvage assembly of the sizes")
    p.set_defaults(func=cmd_search)
    sub.add_parser("table1", parents=[common]).set_defaults(func=cmd_table1)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        return args.func(args)
    except FormatError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
