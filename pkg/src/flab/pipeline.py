"""The decision cascade: Dehn filling, the staged fibredness decision
(Brown, Alexander obstructions, quotient argument, cyclic covers), co-rank
bounds, batch processing, and plot emission.

Stage order follows computational cost: Brown's algorithm is immediate,
Alexander polynomials are cheap, covers are the expensive last resort.
Stages 1-2 are definitive; stage 3 only ever produces NotFibred; stages
4-5 only ever produce Fibred.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from .abelian import (AbelianStructure, Character, abelianization,
                      primitive_characters)
from .brown import brown_quotient, brown_rank1, brown_rank2
from .cosets import (cyclic_cover, low_index_subgroups, reidemeister_schreier,
                     simplify_subgroup, subgroup_counts, subgroup_homology,
                     todd_coxeter)
from .errors import (BadSlope, FlabError, NoCusp, NotACharacter, NoPattern,
                     Overflow, ParseError, Unsupported)
from .foldings import (ascending_hnn_check, build_folded_graph, concat_double_relators,
                       descent_check, extract_fiber_subwords, generates_whole)
from .fox import alexander_polynomial, fibred_obstructions
from .laurent import render
from .presentations import (Presentation, _parse_block, parse_presentations,
                            substitute)
from .words import Word, cyclic_reduce, exponent_vector, free_reduce
from math import gcd

F2_CLASS_COUNTS = {2: 3, 3: 7, 4: 26, 5: 97}


# ---------------------------------------------------------------------------
# Dehn filling

def dehn_fill(pres: Presentation, cusp_index: int, p: int, q: int) -> Presentation:
    """Append the filling relator m^p l^q and retire the cusp.  Requires
    coprime (p, q) with q >= 0."""
    if not 0 <= cusp_index < len(pres.cusps):
        raise NoCusp(f"presentation has {len(pres.cusps)} cusps")
    if q < 0 or gcd(abs(p), q) != 1:
        raise BadSlope(f"slope ({p},{q}) is not coprime with q >= 0")
    m, l = pres.cusps[cusp_index]
    filler = free_reduce(m.power(p) * l.power(q))
    cusps = tuple(c for i, c in enumerate(pres.cusps) if i != cusp_index)
    flags = replace(pres.flags, is_closed=not cusps, is_hyperbolic=False)
    return replace(pres, relators=pres.relators + (filler,), cusps=cusps,
                   name=f"{pres.name}({p},{q})" if pres.name else f"({p},{q})",
                   flags=flags)


# ---------------------------------------------------------------------------
# Fibredness cascade

@dataclass
class DecideOpts:
    max_cover: int = 6
    max_cosets: int | None = None
    char_bound: int = 3
    corroborate: bool = True


@dataclass
class Evidence:
    stage: str
    result: str
    detail: dict

    def to_json(self):
        return {"stage": self.stage, "result": self.result, "detail": self.detail}


@dataclass
class FibredVerdict:
    status: str  # "Fibred" | "NotFibred" | "Unknown"
    beta1: int
    evidence: list[Evidence] = field(default_factory=list)
    caveats: tuple[str, ...] = ()
    certificate: dict | None = None

    def to_json(self):
        return {"status": self.status, "beta1": self.beta1,
                "evidence": [e.to_json() for e in self.evidence],
                "caveats": list(self.caveats),
                "certificate": self.certificate}


def _normalized(pres: Presentation) -> Presentation:
    rels = tuple(cyclic_reduce(free_reduce(r))[0] for r in pres.relators)
    return replace(pres, relators=tuple(r for r in rels if r.letters))


def decide_fibred(pres: Presentation, opts: DecideOpts | None = None) -> FibredVerdict:
    opts = opts or DecideOpts()
    norm = _normalized(pres)
    ab = abelianization(norm)
    ev: list[Evidence] = []
    caveats: list[str] = []
    if norm.flags.is_3manifold and norm.cusps and ab.betti < len(norm.cusps):
        caveats.append(f"beta1 = {ab.betti} is below the cusp count "
                       f"{len(norm.cusps)}; check the peripheral data")
    if ab.betti == 0:
        ev.append(Evidence("homology", "NotFibred",
                           {"betti": 0, "torsion": list(ab.torsion)}))
        return FibredVerdict("NotFibred", 0, ev, tuple(caveats))

    # stage 1/2: Brown on a 2-generator 1-relator presentation
    if norm.ngens == 2 and len(norm.relators) == 1:
        relator = norm.relators[0]
        if ab.betti == 1:
            chi = primitive_characters(ab).unique()
            res = brown_rank1(relator, chi)
            status = "Fibred" if res.fg_kernel else "NotFibred"
            ev.append(Evidence("brown_rank1", status,
                               {"chi": list(chi.values),
                                "heights": list(res.walk.heights)}))
            cert = None
            if res.fg_kernel:
                cert = {"type": "brown_rank1", "relator": norm.spell(relator),
                        "gens": list(norm.alphabet), "chi": list(chi.values)}
            if status == "NotFibred" and opts.corroborate:
                _alexander_stage(norm, ab, ev)
            return FibredVerdict(status, ab.betti, ev, tuple(caveats), cert)
        if ab.betti == 2:
            report = brown_rank2(relator)
            if norm.flags.is_3manifold and not report.symmetric:
                caveats.append("hull lacks order-2 symmetry despite the "
                               "3-manifold flag")
            detail = {"hull": [list(v) for v in report.hull],
                      "exceptional_rays": [list(r) for r in report.exceptional_rays],
                      "exceptional_cones": [[list(a), list(b)]
                                            for a, b in report.exceptional_cones],
                      "all_exceptional": report.all_exceptional}
            if report.all_exceptional:
                ev.append(Evidence("brown_rank2", "NotFibred", detail))
                if opts.corroborate:
                    _alexander_stage(norm, ab, ev)
                return FibredVerdict("NotFibred", 2, ev, tuple(caveats))
            witness = _fg_witness(report)
            detail["witness"] = list(witness)
            ev.append(Evidence("brown_rank2", "Fibred", detail))
            cert = {"type": "brown_rank2", "relator": norm.spell(relator),
                    "gens": list(norm.alphabet), "witness": list(witness)}
            return FibredVerdict("Fibred", 2, ev, tuple(caveats), cert)

    # stage 3: Alexander obstructions
    ob = _alexander_stage(norm, ab, ev)
    if ob is not None and ob.not_fibred:
        return FibredVerdict("NotFibred", ab.betti, ev, tuple(caveats))

    # stage 4: quotient argument for 2-generator multi-relator presentations
    if norm.ngens == 2 and len(norm.relators) >= 2:
        cert = _quotient_stage(norm, ab, opts, ev)
        if cert is not None:
            caveats.append("fibred-via-quotient: requires irreducibility or "
                           "longitude-slope filling")
            return FibredVerdict("Fibred", ab.betti, ev, tuple(caveats), cert)

    # stage 5: cyclic covers and the ascending-HNN certificate
    if ab.betti == 1:
        cert = _cover_stage(norm, ab, opts, ev)
        if cert is not None:
            return FibredVerdict("Fibred", ab.betti, ev, tuple(caveats), cert)

    return FibredVerdict("Unknown", ab.betti, ev, tuple(caveats))


def _alexander_stage(pres, ab, ev) -> object | None:
    if not pres.relators:
        return None
    data = alexander_polynomial(pres, ab=ab)
    if data.status == "zero_ideal":
        ev.append(Evidence("alexander", "inconclusive", {"delta": "0"}))
        return None
    ob = fibred_obstructions(data.delta, ab, pres.flags)
    fired = [d for d in ob.details]
    ev.append(Evidence("alexander", "NotFibred" if ob.not_fibred else "inconclusive",
                       {"delta": render(data.delta), "obstructions": fired,
                        "torsion_consistent": ob.torsion_consistent}))
    return ob


def _fg_witness(report):
    for size in range(1, 81):
        for m in range(0, size + 1):
            for n in (size - m, m - size):
                if gcd(m, abs(n)) != 1:
                    continue
                if report.fg_kernel((m, n)):
                    return (m, n)
    raise FlabError("no finitely generated direction found despite a passing face")


def _quotient_stage(pres, ab, opts, ev):
    fam = primitive_characters(ab)
    if ab.betti == 1:
        chis = [fam.unique()]
    else:
        chis = [fam.character(lam)
                for lam in fam.primitive_directions(opts.char_bound)]
    for idx in range(len(pres.relators)):
        for chi in chis:
            if chi.is_zero():
                continue
            try:
                cert = brown_quotient(pres, idx, chi)
            except (NotACharacter, Unsupported):
                continue
            if cert is None:
                continue
            if cert.fg_kernel_in_quotient:
                ev.append(Evidence("brown_quotient", "Fibred",
                                   {"relator_index": idx,
                                    "chi": list(cert.chi.values),
                                    "method": cert.method,
                                    "quotient_betti": cert.quotient_betti}))
                return {"type": "quotient", "relator_index": idx,
                        "gens": list(pres.alphabet),
                        "relator": pres.spell(pres.relators[idx]),
                        "chi": list(cert.chi.values)}
    ev.append(Evidence("brown_quotient", "inconclusive",
                       {"characters_tried": len(chis)}))
    return None


def _cover_stage(pres, ab, opts, ev):
    chi = primitive_characters(ab).unique()
    for n in range(1, opts.max_cover + 1):
        try:
            table = cyclic_cover(pres, chi, n)
            sp = reidemeister_schreier(pres, table)
            sp = simplify_subgroup(sp)
        except FlabError as e:
            ev.append(Evidence("cover", "error", {"degree": n, "error": str(e)}))
            continue
        cover = sp.presentation
        # the stable letter maps to a chi-value of +-n; fiber letters to 0
        t_letter = None
        ok = True
        for g in cover.generators:
            val = chi(sp.inclusion[g.letter])
            if val == 0:
                continue
            if abs(val) == n and t_letter is None:
                t_letter = g.letter
            else:
                ok = False
                break
        if not ok or t_letter is None or cover.ngens < 2:
            continue
        from .abelian import is_simple_form
        work = cover
        for _ in range(len(work.relators)):
            if is_simple_form(work, t_letter):
                break
            try:
                work, _log = concat_double_relators(work, t_letter)
            except NoPattern:
                break
        if not is_simple_form(work, t_letter):
            continue
        hnn = ascending_hnn_check(work, t_letter)
        if not hnn.fibred:
            continue
        fiber_letters = [g.letter for g in work.generators if g.letter != t_letter]
        if not descent_check(sp, ab, fiber_letters):
            continue
        side = hnn.side_used if hnn.side_used != "both" else "t_to_T"
        sub = hnn.subwords[side]
        ev.append(Evidence("cover", "Fibred",
                           {"degree": n, "t": t_letter,
                            "fiber_rank": hnn.fiber_rank,
                            "side": hnn.side_used}))
        return {"type": "cover", "degree": n, "t": t_letter,
                "cover_gens": list(work.alphabet),
                "cover_relators": [work.spell(r) for r in work.relators],
                "inclusions": {l: pres.spell(w) for l, w in sp.inclusion.items()},
                "fiber_rank": hnn.fiber_rank}
    ev.append(Evidence("cover", "inconclusive", {"max_degree": opts.max_cover}))
    return None


def verify_fibred_certificate(pres: Presentation, verdict: FibredVerdict) -> bool:
    """Independently re-validate a Fibred certificate from its stored data."""
    if verdict.status != "Fibred" or verdict.certificate is None:
        return False
    cert = verdict.certificate
    kind = cert["type"]
    if kind == "brown_rank1":
        from .words import parse_word
        rel = parse_word(cert["relator"], cert["gens"])
        return brown_rank1(rel, Character(tuple(cert["chi"]))).fg_kernel
    if kind == "brown_rank2":
        from .words import parse_word
        rel = parse_word(cert["relator"], cert["gens"])
        return brown_rank2(rel).fg_kernel(tuple(cert["witness"]))
    if kind == "quotient":
        norm = _normalized(pres)
        got = brown_quotient(norm, cert["relator_index"],
                             Character(tuple(cert["chi"])))
        return got is not None and got.fg_kernel_in_quotient
    if kind == "cover":
        from .presentations import presentation as mk
        cover = mk(cert["cover_gens"], cert["cover_relators"],
                   flags=pres.flags)
        t = cert["t"]
        d = cover.ngens - 1
        for side in ("t_to_T", "T_to_t"):
            fs = extract_fiber_subwords(cover, t, side)
            if generates_whole(build_folded_graph(fs.words, d)):
                norm = _normalized(pres)
                ab = abelianization(norm)
                fibers = [l for l in cert["cover_gens"] if l != t]
                incl = {l: norm.word(w) for l, w in cert["inclusions"].items()}

                class _C:  # minimal inclusion carrier
                    inclusion = incl
                return descent_check(_C, ab, fibers)
        return False
    return False


# ---------------------------------------------------------------------------
# Co-rank bounds

@dataclass
class CorankOpts:
    max_index: int = 5
    max_cosets: int | None = None
    decide: DecideOpts = field(default_factory=lambda: DecideOpts(max_cover=4))
    exhaustive: bool = False


@dataclass
class CorankReport:
    lower: int
    upper: int
    evidence: list[Evidence] = field(default_factory=list)

    def to_json(self):
        return {"lower": self.lower, "upper": self.upper,
                "evidence": [e.to_json() for e in self.evidence]}


def corank_bounds(pres: Presentation, opts: CorankOpts | None = None) -> CorankReport:
    opts = opts or CorankOpts()
    norm = _normalized(pres)
    ab = abelianization(norm)
    ev: list[Evidence] = []
    if ab.betti == 0:
        ev.append(Evidence("homology", "corank 0", {"betti": 0}))
        return CorankReport(0, 0, ev)
    if not norm.relators:
        ev.append(Evidence("free_group", f"corank {norm.ngens}",
                           {"reason": "free group surjects onto itself"}))
        return CorankReport(norm.ngens, norm.ngens, ev)
    lower, upper = 1, ab.betti

    def done():
        return upper <= lower and not opts.exhaustive

    # (a) two-generator obstruction
    if not done() and norm.ngens == 2 and norm.relators:
        upper = min(upper, 1)
        ev.append(Evidence("two_generator", "upper <= 1",
                           {"reason": "2-generator with a nontrivial relator "
                                      "cannot surject onto F2"}))
    # (c) commuting-relator reduction
    if not done():
        res = _commutator_obstruction(norm)
        if res is not None:
            conclusive, detail = res
            if conclusive:
                upper = min(upper, 1)
                ev.append(Evidence("commutator", "upper <= 1", detail))
            else:
                ev.append(Evidence("commutator", "candidate", detail))
    # (d) index-2 homology test
    if not done():
        subs = low_index_subgroups(norm, 2)
        strong = 0
        homs = []
        for tbl in subs:
            h = subgroup_homology(norm, table=tbl, max_cosets=opts.max_cosets)
            homs.append({"index": 2, "betti": h.betti, "torsion": list(h.torsion)})
            if h.betti >= 3:
                strong += 1
        if strong < 3:
            upper = min(upper, 1)
            ev.append(Evidence("index2_homology", "upper <= 1",
                               {"subgroups": homs,
                                "with_betti_ge_3": strong}))
        else:
            ev.append(Evidence("index2_homology", "no obstruction",
                               {"subgroups": homs}))
    # (e) subgroup-count test
    if not done():
        counts = subgroup_counts(norm, min(opts.max_index, 5))
        fail_at = next((n for n in sorted(counts)
                        if n in F2_CLASS_COUNTS and counts[n] < F2_CLASS_COUNTS[n]),
                       None)
        if fail_at is not None:
            upper = min(upper, 1)
            ev.append(Evidence("subgroup_counts", "upper <= 1",
                               {"counts": counts, "f2_counts": F2_CLASS_COUNTS,
                                "overtaken_at": fail_at}))
        else:
            ev.append(Evidence("subgroup_counts", "no obstruction",
                               {"counts": counts}))
    # (b) fibred obstruction
    if not done():
        verdict = decide_fibred(norm, opts.decide)
        if verdict.status == "Fibred":
            upper = min(upper, ab.betti - 1)
            ev.append(Evidence("fibred", f"upper <= {ab.betti - 1}",
                               {"reason": "free groups have no finitely "
                                          "generated normal subgroups of "
                                          "infinite index"}))
    return CorankReport(min(lower, upper), upper, ev)


def _commutator_like(w: Word):
    """(g, h) if the cyclic word is a commutator of two generator powers
    x y x^-1 y^-1 with x = g^s, y = h^u."""
    ls = w.letters
    if len(ls) != 4:
        return None
    (g1, s1), (g2, s2), (g3, s3), (g4, s4) = ls
    if g1 == g3 and g2 == g4 and g1 != g2 and s1 == -s3 and s2 == -s4:
        return (g1, g2)
    return None


def _commutator_obstruction(pres: Presentation):
    """The surjection-onto-F2 contradiction from a commutator relator: the
    commuting images are powers of one element; a third generator with
    nonzero exponent sum in another relator then maps the relator to a
    nontrivial word of F2."""
    for i, r in enumerate(pres.relators):
        w = cyclic_reduce(free_reduce(r))[0]
        pair = None
        for k in range(len(w.letters)):
            pair = _commutator_like(w.rotate(k))
            if pair:
                break
        if not pair:
            continue
        detail = {"relator_index": i,
                  "commuting": [pres.generators[pair[0]].letter,
                                pres.generators[pair[1]].letter]}
        if pres.ngens != 3:
            return (False, detail)
        third = next(g.id for g in pres.generators if g.id not in pair)
        for j, other in enumerate(pres.relators):
            if j == i:
                continue
            if exponent_vector(other, pres.ngens)[third] != 0:
                detail["witness_relator"] = j
                detail["third_generator"] = pres.generators[third].letter
                return (True, detail)
        return (False, detail)
    # the substitution pattern x Y z^m X y Z^m: reduce to a commutator
    reduced = _substitution_commutator(pres)
    if reduced is not None:
        return _commutator_obstruction(reduced)
    return None


def _substitution_commutator(pres: Presentation) -> Presentation | None:
    """Detect a relator of shape x^s y^u z^M x^-s y^-u z^-M (up to rotation
    and inversion) in a 3-generator presentation and apply the two
    substitutions x := y^-u * x', y := z^M * y'^-1 that turn it into a
    commutator of the fresh generators; returns the transformed
    presentation only when the commutator actually appears."""
    if pres.ngens != 3:
        return None
    for r in pres.relators:
        w = cyclic_reduce(free_reduce(r))[0]
        n = len(w.letters)
        if n < 6 or n % 2 != 0:
            continue
        m = (n - 4) // 2
        for cand in (w, w.inverse()):
            for k in range(n):
                ls = cand.rotate(k).letters
                x, sx = ls[0]
                y, sy = ls[1]
                run1 = ls[2:2 + m]
                x2, sx2 = ls[2 + m]
                y2, sy2 = ls[3 + m]
                run2 = ls[4 + m:]
                if x2 != x or y2 != y or x == y or sx2 != -sx or sy2 != -sy:
                    continue
                zs = {g for g, _ in run1} | {g for g, _ in run2}
                if len(zs) != 1:
                    continue
                z = zs.pop()
                if z in (x, y):
                    continue
                sz = run1[0][1]
                if (not all(s == sz for _, s in run1)
                        or not all(s == -sz for _, s in run2)):
                    continue
                xl = pres.generators[x].letter
                yl = pres.generators[y].letter
                zl = pres.generators[z].letter
                out = _apply_commutator_substitutions(pres, xl, yl, zl, sy, sz, m)
                if out is not None:
                    return out
    return None


def _apply_commutator_substitutions(pres, xl, yl, zl, sy, sz, m):
    ypart = yl if sy < 0 else yl.upper()  # y^-sy
    zglyph = zl if sz > 0 else zl.upper()
    zrun = zglyph if m == 1 else f"{zglyph}{m}"
    f1 = _pick_fresh(pres)
    try:
        p1, _ = substitute(pres, xl, ypart + f1, f1)
    except FlabError:
        return None
    f2 = _pick_fresh(p1)
    try:
        p2, _ = substitute(p1, yl, zrun + f2.upper(), f2)
    except FlabError:
        return None
    for rr in p2.relators:
        ww = cyclic_reduce(free_reduce(rr))[0]
        for k in range(len(ww.letters)):
            if _commutator_like(ww.rotate(k)):
                return p2
    return None


def _pick_fresh(pres) -> str:
    used = set(pres.alphabet)
    for c in "xyzwvuped":
        if c not in used:
            return c
    i = 0
    while f"g{i}" in used:
        i += 1
    return f"g{i}"


# ---------------------------------------------------------------------------
# Plots

def emit_plot(pres: Presentation, out_dir: str) -> list[str]:
    """Write the SVG walk (beta1 = 1) or grid path with hull (beta1 = 2)
    for a 2-generator 1-relator presentation; returns the files written."""
    import os

    from .render import svg_height_walk, svg_lattice_path
    norm = _normalized(pres)
    if norm.ngens != 2 or len(norm.relators) != 1 or not norm.relators[0].letters:
        raise Unsupported("plots need a 2-generator presentation with one "
                          "nonempty relator")
    ab = abelianization(norm)
    os.makedirs(out_dir, exist_ok=True)
    name = norm.name or "presentation"
    written = []
    if ab.betti == 1:
        chi = primitive_characters(ab).unique()
        res = brown_rank1(norm.relators[0], chi)
        path = os.path.join(out_dir, f"{name}_walk.svg")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(svg_height_walk(res.walk, norm.alphabet))
        written.append(path)
    elif ab.betti == 2:
        report = brown_rank2(norm.relators[0])
        path = os.path.join(out_dir, f"{name}_path.svg")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(svg_lattice_path(report))
        written.append(path)
    else:
        raise Unsupported(f"beta1 = {ab.betti} has no plot")
    return written


# ---------------------------------------------------------------------------
# Batch processing

@dataclass
class BatchOpts:
    jobs: int = 1
    corank: bool = False
    decide: DecideOpts = field(default_factory=DecideOpts)
    corank_opts: CorankOpts = field(default_factory=CorankOpts)
    plot_dir: str | None = None


def _split_blocks(text: str) -> list[list[tuple[int, str]]]:
    blocks: list[list[tuple[int, str]]] = [[]]
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            if blocks[-1]:
                blocks.append([])
            continue
        blocks[-1].append((lineno, line))
    if blocks and not blocks[-1]:
        blocks.pop()
    return blocks


def _process_block(args) -> dict:
    block, corank, decide_opts, corank_opts, plot_dir = args
    start = time.monotonic()
    entry: dict = {}
    try:
        pres = _parse_block(block)
    except ParseError as e:
        return {"name": None, "error": str(e), "error_kind": "parse"}
    entry["name"] = pres.name
    try:
        verdict = decide_fibred(pres, decide_opts)
        entry["fibred"] = verdict.to_json()
        if corank:
            entry["corank"] = corank_bounds(pres, corank_opts).to_json()
        if plot_dir is not None:
            try:
                entry["plots"] = emit_plot(pres, plot_dir)
            except Unsupported:
                pass
    except Overflow as e:
        entry["error"] = str(e)
        entry["error_kind"] = "resource"
    except FlabError as e:
        entry["error"] = str(e)
        entry["error_kind"] = "library"
    entry["seconds"] = round(time.monotonic() - start, 3)
    return entry


def run_batch(input_path: str, output_path: str,
              opts: BatchOpts | None = None) -> dict:
    """Process every presentation block; one JSON object per line in input
    order; per-entry errors are isolated.  Returns the summary counts."""
    opts = opts or BatchOpts()
    with open(input_path, encoding="utf-8") as fh:
        text = fh.read()
    blocks = _split_blocks(text)
    work = [(b, opts.corank, opts.decide, opts.corank_opts, opts.plot_dir)
            for b in blocks]
    if opts.jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=opts.jobs) as pool:
            entries = list(pool.map(_process_block, work))
    else:
        entries = [_process_block(w) for w in work]
    with open(output_path, "w", encoding="utf-8") as fh:
        for entry in entries:
            fh.write(json.dumps(entry, sort_keys=True) + "\n")
    summary = {"total": len(entries), "fibred": 0, "not_fibred": 0,
               "unknown": 0, "errors": 0}
    for entry in entries:
        if "error" in entry:
            summary["errors"] += 1
        else:
            status = entry["fibred"]["status"]
            key = {"Fibred": "fibred", "NotFibred": "not_fibred",
                   "Unknown": "unknown"}[status]
            summary[key] += 1
    return summary
