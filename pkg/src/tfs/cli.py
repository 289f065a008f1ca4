"""Command-line front end: ``tfs --sig FILE SUBCOMMAND [AVM ...]``.

Exit codes: 0 success or true, 1 unsatisfiable / failure / false,
2 usage or parse error, 3 ill-formed signature.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional

from .drfs import compact, drfs_unify
from .errors import ParseError, ResolutionBoundError, SignatureError
from .hierarchy import compile_signature, describe
from .resolve import (DEFAULT_BOUND, brute_force_resolve, check_well_typed,
                      is_well_typable, materialize, resolve)
from .textio import (drfs_to_json, format_signature, fs_to_json, parse_avm,
                     parse_signature, print_drfs, print_fs)
from .unfill import unfill

OK, NO, USAGE, BAD_SIG = 0, 1, 2, 3

PREDICATES = ("welltyped", "welltypable")
ONE_AVM = ("welltyped", "welltypable", "resolve", "compact", "unfill")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="tfs",
        description="Resolve, compact, unfill and unify typed feature structures.")
    p.add_argument("--sig", metavar="PATH", help="signature file")
    p.add_argument("--json", action="store_true", help="emit JSON instead of text")
    p.add_argument("--oracle", action="store_true",
                   help="resolve by brute-force enumeration")
    p.add_argument("--bound", type=int, default=DEFAULT_BOUND, metavar="N",
                   help="labelling-space limit for --oracle (default: %(default)s)")
    p.add_argument("--no-unfill", action="store_true",
                   help="skip unfilling in the unify pipeline")
    p.add_argument("command", choices=("parse-sig", "check-sig") + ONE_AVM + ("unify",))
    p.add_argument("inputs", nargs="*", metavar="AVM",
                   help="inline AVM text or a path to a file holding one")
    return p


def _read_input(arg: str) -> str:
    if os.path.isfile(arg):
        with open(arg, encoding="utf-8") as fh:
            return fh.read()
    return arg


class _Usage(Exception):
    pass


def run(argv: Optional[List[str]] = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return OK if exc.code == 0 else USAGE
    try:
        return _dispatch(args, out, err)
    except _Usage as exc:
        print(f"tfs: {exc}", file=err)
        return USAGE
    except ParseError as exc:
        print(f"tfs: parse error: {exc}", file=err)
        return USAGE
    except ResolutionBoundError as exc:
        print(f"tfs: {exc}", file=err)
        return USAGE


def _dispatch(args, out, err) -> int:
    cmd = args.command
    if cmd == "parse-sig":
        path = args.sig or (args.inputs[0] if args.inputs else None)
        if path is None:
            raise _Usage("parse-sig needs a signature file")
        decls = parse_signature(_read_input(path))
        if args.json:
            emit = {"types": decls.types, "edges": decls.edges, "approp": decls.approp}
            print(json.dumps(emit, indent=2), file=out)
        else:
            print(format_signature(decls), file=out)
        return OK

    if not args.sig:
        raise _Usage(f"{cmd} needs --sig")
    try:
        with open(args.sig, encoding="utf-8") as fh:
            source = fh.read()
    except OSError as exc:
        raise _Usage(f"cannot read signature: {exc}")
    try:
        sig = compile_signature(parse_signature(source))
    except (ParseError, SignatureError) as exc:
        print(f"tfs: ill-formed signature: {exc}", file=err)
        return BAD_SIG

    if cmd == "check-sig":
        if args.json:
            table = {s: {f: sig.types[v] for f, v in
                         sorted(sig.approp[sig.species_type(i)].items())}
                     for i, s in enumerate(sig.species)}
            print(json.dumps({"species": list(sig.species), "approp": table}, indent=2),
                  file=out)
        else:
            print(describe(sig), file=out)
        return OK

    want = 2 if cmd == "unify" else 1
    if len(args.inputs) != want:
        raise _Usage(f"{cmd} takes exactly {want} AVM argument(s)")
    graphs = [parse_avm(sig, _read_input(a)) for a in args.inputs]

    def resolved(F):
        if args.oracle:
            return brute_force_resolve(sig, F, args.bound)
        return resolve(sig, F)

    if cmd in PREDICATES:
        F = graphs[0]
        if cmd == "welltyped":
            problems = check_well_typed(sig, F)
            for p in problems:
                print(p, file=err)
            answer = not problems
        else:
            answer = is_well_typable(sig, F)
        print(json.dumps(answer) if args.json else str(answer).lower(), file=out)
        return OK if answer else NO

    if cmd == "resolve":
        F = graphs[0]
        rel = resolved(F)
        if not rel:
            print(json.dumps({"satisfiable": False}) if args.json else "UNSATISFIABLE",
                  file=out)
            return NO
        structures = [materialize(F, t) for t in rel]
        if args.json:
            print(json.dumps({"satisfiable": True,
                              "resolvents": [fs_to_json(sig, g) for g in structures]},
                             indent=2), file=out)
        else:
            for g in structures:
                print(print_fs(sig, g), file=out)
        return OK

    compacted = []
    for F in graphs:
        rel = resolved(F)
        if not rel:
            print(json.dumps({"satisfiable": False}) if args.json else "UNSATISFIABLE",
                  file=out)
            return NO
        compacted.append(compact(sig, F, rel))

    if cmd == "compact":
        result = compacted[0]
    elif cmd == "unfill":
        result = unfill(sig, compacted[0])
    else:
        a, b = compacted
        if not args.no_unfill:
            a, b = unfill(sig, a), unfill(sig, b)
        result = drfs_unify(sig, a, b)
        if result is None:
            print(json.dumps({"unified": False}) if args.json else "FAIL", file=out)
            return NO
        if not args.no_unfill:
            result = unfill(sig, result)

    if args.json:
        print(json.dumps(drfs_to_json(result), indent=2), file=out)
    else:
        print(print_drfs(result), file=out)
    return OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
