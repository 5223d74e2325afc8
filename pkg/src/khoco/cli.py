"""Command line entry points.

Every command is a thin wrapper over library calls and prints
deterministic JSON (pass ``--pretty`` for an indented version).

    khoco homology --pd FILE --ht H,T
    khoco movie --in FILE --preset low|bal|hi [--ht H,T]
    khoco torus-verify --k K --sminus S --part 1|2
    khoco spectral --pd FILE --ht H,T [--page R]
    khoco scomplex --torus K [--sharp]
    khoco selftest [--fast]

Exit codes: 0 success, 1 validation failure, 2 internal assertion
failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import cobordism as cob
from . import scomplex as sc
from . import spectral as sp
from . import torus as tor
from .diagram import parse_pd
from .khovanov import FrobeniusParams, build_cube, homology


def _params(text: str) -> FrobeniusParams:
    try:
        h, t = (int(x) for x in text.split(","))
    except ValueError as exc:
        raise SystemExit(f"bad --ht value {text!r}: expected H,T") from exc
    return FrobeniusParams(h, t)


def _emit(data, pretty: bool) -> None:
    if pretty:
        print(json.dumps(data, indent=2, sort_keys=True))
    else:
        print(json.dumps(data, sort_keys=True))


def cmd_homology(args) -> int:
    with open(args.pd) as fh:
        d = parse_pd(fh.read())
    c = build_cube(d, _params(args.ht))
    _emit(homology(c).to_json(), args.pretty)
    return 0


def cmd_movie(args) -> int:
    with open(args.infile) as fh:
        data = json.load(fh)
    movie = cob.Movie.from_json(data)
    preset = data.get("preset", args.preset)
    f, ledger = cob.assemble(movie, _params(args.ht), preset=preset)
    out = {
        "preset": preset,
        "bidegree": list(f.measured_bidegree()) if not f.is_zero() else None,
        "zero": f.is_zero(),
        "ledger": ledger.to_json(),
        "homology_map": _homology_map_json(f),
    }
    _emit(out, args.pretty)
    return 0


def _homology_map_json(f) -> dict:
    from .khovanov import induced_homology_map

    out = {}
    for h in f.source.degrees():
        src, tgt, mat = induced_homology_map(f, h)
        if src.group.is_trivial:
            continue
        out[str(h)] = {
            "source": src.group.to_json(),
            "target": tgt.group.to_json(),
            "matrix": mat.to_rows(),
        }
    return out


def cmd_torus_verify(args) -> int:
    fn = tor.verify_T2q_part1 if args.part == 1 else tor.verify_T2q_part2
    report = fn(args.k, args.sminus)
    _emit(report, args.pretty)
    return 0 if report["pass"] else 1


def cmd_spectral(args) -> int:
    with open(args.pd) as fh:
        d = parse_pd(fh.read())
    c = build_cube(d, _params(args.ht))
    f = sp.quantum_filtration(c)
    out = {"i0": f.i0, "i1": f.i1, "homology": str(f.homology())}
    if args.page is not None:
        out["page"] = sp.page(f, args.page).to_json()
    else:
        out["pages"] = [sp.page(f, r).to_json() for r in range(f.max_page() + 2)]
    first = None
    for r0 in range(f.max_page() + 2):
        if sp.degenerates_at(f, r0):
            first = r0
            break
    out["degenerates_at"] = first
    out["criterion_at_degeneration"] = (
        sp.degeneration_criterion(f, first) if first is not None else None
    )
    _emit(out, args.pretty)
    return 0


def cmd_scomplex(args) -> int:
    s = sc.torus_scomplex(args.torus)
    s.validate()
    out = {"scomplex": sc.scomplex_json(s)}
    if args.sharp:
        groups = sc.sharp_homology_at_T1(s)
        out["sharp_T1"] = {
            "grading0": groups["0"].to_json(),
            "grading1": groups["1"].to_json(),
        }
    out["z2_reduction"] = z2 = sc.z2_reduction_check(s)
    _emit(out, args.pretty)
    return 0


def cmd_selftest(args) -> int:
    from . import acceptance

    ok = acceptance.run_all(fast=args.fast)
    return 0 if ok else 1


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="khoco", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--pretty", action="store_true", help="indent JSON output")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("homology", help="bigraded homology of a PD diagram")
    q.add_argument("--pd", required=True)
    q.add_argument("--ht", default="0,0")
    q.set_defaults(fn=cmd_homology)

    q = sub.add_parser("movie", help="assemble a movie JSON file")
    q.add_argument("--in", dest="infile", required=True)
    q.add_argument("--preset", choices=["low", "bal", "hi"], default="low")
    q.add_argument("--ht", default="0,0")
    q.set_defaults(fn=cmd_movie)

    q = sub.add_parser("torus-verify", help="torus knot theorem reports")
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--sminus", type=int, required=True)
    q.add_argument("--part", type=int, choices=[1, 2], required=True)
    q.set_defaults(fn=cmd_torus_verify)

    q = sub.add_parser("spectral", help="quantum-filtration spectral pages")
    q.add_argument("--pd", required=True)
    q.add_argument("--ht", default="0,1")
    q.add_argument("--page", type=int, default=None)
    q.set_defaults(fn=cmd_spectral)

    q = sub.add_parser("scomplex", help="torus S-complex reports")
    q.add_argument("--torus", type=int, required=True)
    q.add_argument("--sharp", action="store_true")
    q.set_defaults(fn=cmd_scomplex)

    q = sub.add_parser("selftest", help="run the acceptance suite")
    q.add_argument("--fast", action="store_true",
                   help="shrink the randomized property corpus")
    q.set_defaults(fn=cmd_selftest)
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit:
        raise
    except AssertionError as exc:
        print(f"internal assertion failure: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
