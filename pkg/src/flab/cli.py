"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 parse error, 3 resource bound
exceeded.  FLAB_MAX_COSETS overrides the coset enumeration bound.
"""

from __future__ import annotations

import argparse
import json
import sys

from .abelian import Character, abelianization, primitive_characters, to_standard_form
from .brown import brown_rank1, brown_rank2
from .cosets import (cyclic_cover, max_cosets_default, reidemeister_schreier,
                     simplify_subgroup, subgroup_counts, subgroup_homology,
                     low_index_subgroups)
from .errors import FlabError, Overflow, ParseError
from .fox import alexander_polynomial, fibred_obstructions
from .laurent import render
from .pipeline import (BatchOpts, CorankOpts, DecideOpts, corank_bounds,
                       decide_fibred, dehn_fill, emit_plot, run_batch)
from .presentations import format_presentation, parse_presentations
from .words import cyclic_reduce, free_reduce


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        print(f"cannot read {path}: {e}", file=sys.stderr)
        raise SystemExit(1)
    try:
        pres = parse_presentations(text)
    except ParseError as e:
        print(f"parse error in {path}: {e}", file=sys.stderr)
        raise SystemExit(2)
    if not pres:
        print(f"no presentations in {path}", file=sys.stderr)
        raise SystemExit(2)
    return pres


def _parse_char(text: str, n: int) -> Character:
    vals = tuple(int(x) for x in text.split(","))
    if len(vals) != n:
        print(f"character needs {n} comma-separated integers", file=sys.stderr)
        raise SystemExit(1)
    return Character(vals)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="flab",
                 description="fibredness and co-rank of finitely presented "
                             "3-manifold groups")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="validate and echo normalized presentations")
    p.add_argument("file")

    p = sub.add_parser("abelianize", help="homology of each presentation")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("alex", help="Alexander polynomial data")
    p.add_argument("file")
    p.add_argument("--standard-form", action="store_true",
                   help="convert to standard form first")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("bns", help="Brown's algorithm on 2-generator "
                                   "1-relator presentations")
    p.add_argument("file")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--char", help="character values m,n")
    g.add_argument("--all", action="store_true",
                   help="report the full rank-2 exceptional set")

    p = sub.add_parser("fill", help="Dehn filling along a cusp")
    p.add_argument("file")
    p.add_argument("--cusp", type=int, default=0, metavar="K")
    p.add_argument("--slope", required=True, metavar="p,q")

    p = sub.add_parser("cover", help="cyclic cover presentation")
    p.add_argument("file")
    p.add_argument("--degree", type=int, required=True, metavar="N")
    p.add_argument("--char", help="character values (default: the unique one)")

    p = sub.add_parser("subgroups", help="low-index subgroup classes")
    p.add_argument("file")
    p.add_argument("--max-index", type=int, default=5, metavar="N")

    p = sub.add_parser("fiber", help="decide fibredness")
    p.add_argument("file")
    p.add_argument("--max-cover", type=int, default=6, metavar="N")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("corank", help="co-rank bounds")
    p.add_argument("file")
    p.add_argument("--max-index", type=int, default=5, metavar="N")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("plot", help="SVG walk / grid-path figures")
    p.add_argument("file")
    p.add_argument("--out", required=True, metavar="DIR")

    p = sub.add_parser("batch", help="batch report (JSON lines)")
    p.add_argument("file")
    p.add_argument("--out", required=True, metavar="REPORT.jsonl")
    p.add_argument("--jobs", type=int, default=1, metavar="N")
    p.add_argument("--corank", action="store_true")
    p.add_argument("--max-cover", type=int, default=6)
    p.add_argument("--plot-dir", metavar="DIR",
                   help="also render figures next to the report")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return _dispatch(args)
    except SystemExit as e:
        return int(e.code or 0)
    except Overflow as e:
        print(f"resource bound exceeded: {e}", file=sys.stderr)
        return 3
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return 2
    except FlabError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def _dispatch(args) -> int:
    cmd = args.command
    if cmd == "parse":
        for pres in _load(args.file):
            sys.stdout.write(format_presentation(pres))
            sys.stdout.write("\n")
        return 0

    if cmd == "abelianize":
        for pres in _load(args.file):
            ab = abelianization(pres)
            if args.json:
                print(json.dumps({"name": pres.name, **ab.to_json()},
                                 sort_keys=True))
            else:
                print(f"{pres.name or '(unnamed)'}: {ab.describe()}")
        return 0

    if cmd == "alex":
        for pres in _load(args.file):
            work = pres
            if args.standard_form:
                work, _ = to_standard_form(pres)
            data = alexander_polynomial(work)
            ob = (fibred_obstructions(data.delta, data.ab, work.flags)
                  if data.status == "ok" else None)
            if args.json:
                print(json.dumps({"name": pres.name, **data.to_json()},
                                 sort_keys=True))
            else:
                name = pres.name or "(unnamed)"
                print(f"{name}: delta = {render(data.delta)}")
                if ob is not None and ob.not_fibred:
                    for d in ob.details:
                        print(f"{name}:   obstruction: {d}")
        return 0

    if cmd == "bns":
        for pres in _load(args.file):
            name = pres.name or "(unnamed)"
            norm_rel = cyclic_reduce(free_reduce(pres.relators[0]))[0] \
                if pres.relators else None
            if pres.ngens != 2 or len(pres.relators) != 1 or norm_rel is None:
                print(f"{name}: skipped (needs a 2-generator 1-relator "
                      "presentation)", file=sys.stderr)
                continue
            ab = abelianization(pres)
            if args.char:
                chi = _parse_char(args.char, 2)
                if ab.betti == 2:
                    rep = brown_rank2(norm_rel)
                    fg = rep.fg_kernel(tuple(chi.values))
                else:
                    fg = brown_rank1(norm_rel, chi).fg_kernel
                print(f"{name}: chi={args.char}: "
                      f"{'finitely generated' if fg else 'not finitely generated'}")
            elif ab.betti == 2:
                rep = brown_rank2(norm_rel)
                if rep.all_exceptional:
                    print(f"{name}: no character has finitely generated kernel")
                else:
                    rays = " ".join(f"({x},{y})" for x, y in rep.exceptional_rays)
                    cones = " ".join(f"[({a[0]},{a[1]})..({b[0]},{b[1]})]"
                                     for a, b in rep.exceptional_cones)
                    print(f"{name}: exceptional rays: {rays or 'none'}"
                          + (f"; cones: {cones}" if cones else ""))
            else:
                chi = primitive_characters(ab).unique()
                fg = brown_rank1(norm_rel, chi).fg_kernel
                print(f"{name}: unique character {list(chi.values)}: "
                      f"{'finitely generated' if fg else 'not finitely generated'}")
        return 0

    if cmd == "fill":
        try:
            pq = args.slope.split(",")
            p, q = int(pq[0]), int(pq[1])
        except (ValueError, IndexError):
            print("slope must be 'p,q'", file=sys.stderr)
            return 1
        for pres in _load(args.file):
            if args.cusp >= len(pres.cusps):
                print(f"{pres.name or '(unnamed)'}: skipped (no cusp "
                      f"{args.cusp})", file=sys.stderr)
                continue
            filled = dehn_fill(pres, args.cusp, p, q)
            sys.stdout.write(format_presentation(filled))
            sys.stdout.write("\n")
        return 0

    if cmd == "cover":
        for pres in _load(args.file):
            ab = abelianization(pres)
            chi = (_parse_char(args.char, pres.ngens) if args.char
                   else primitive_characters(ab).unique())
            table = cyclic_cover(pres, chi, args.degree)
            sp = simplify_subgroup(reidemeister_schreier(pres, table))
            sys.stdout.write(format_presentation(sp.presentation))
            for letter, word in sorted(sp.spell_inclusions().items()):
                print(f"# {letter} = {word or '1'}")
            print()
        return 0

    if cmd == "subgroups":
        for pres in _load(args.file):
            counts = subgroup_counts(pres, args.max_index)
            name = pres.name or "(unnamed)"
            txt = " ".join(f"{n}:{counts[n]}" for n in sorted(counts))
            print(f"{name}: subgroup classes by index: {txt}")
        return 0

    if cmd == "fiber":
        opts = DecideOpts(max_cover=args.max_cover)
        for pres in _load(args.file):
            verdict = decide_fibred(pres, opts)
            if args.json:
                print(json.dumps({"name": pres.name, **verdict.to_json()},
                                 sort_keys=True))
            else:
                name = pres.name or "(unnamed)"
                print(f"{name}: {verdict.status}")
                for e in verdict.evidence:
                    print(f"{name}:   {e.stage}: {e.result}")
                for c in verdict.caveats:
                    print(f"{name}:   caveat: {c}")
        return 0

    if cmd == "corank":
        opts = CorankOpts(max_index=args.max_index)
        for pres in _load(args.file):
            report = corank_bounds(pres, opts)
            if args.json:
                print(json.dumps({"name": pres.name, **report.to_json()},
                                 sort_keys=True))
            else:
                name = pres.name or "(unnamed)"
                print(f"{name}: corank in [{report.lower}, {report.upper}]")
                for e in report.evidence:
                    print(f"{name}:   {e.stage}: {e.result}")
        return 0

    if cmd == "plot":
        from .errors import Unsupported
        for pres in _load(args.file):
            try:
                for path in emit_plot(pres, args.out):
                    print(path)
            except Unsupported as e:
                print(f"{pres.name or '(unnamed)'}: skipped ({e})",
                      file=sys.stderr)
        return 0

    if cmd == "batch":
        opts = BatchOpts(jobs=args.jobs, corank=args.corank,
                         decide=DecideOpts(max_cover=args.max_cover),
                         plot_dir=args.plot_dir)
        summary = run_batch(args.file, args.out, opts)
        print(f"total {summary['total']}: {summary['fibred']} fibred, "
              f"{summary['not_fibred']} not fibred, "
              f"{summary['unknown']} unknown, {summary['errors']} errors",
              file=sys.stderr)
        return 0

    return 1


if __name__ == "__main__":
    raise SystemExit(main())
