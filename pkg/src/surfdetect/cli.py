"""Command line front end.

Exit status: 0 when every check passes, 1 on unreadable or malformed input,
2 when a mathematical check fails (the report then carries a witness).
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path
from typing import Optional

from . import __version__, building
from .building import LatticeBasis, LatticeError, parse_matrix
from .funcfield import ZeroDivision
from .groups import (
    GroupError,
    PsiMap,
    Presentation,
    abelianization,
    format_word,
    parse_word,
    reduce_word,
    schreier,
)
from .manifold.cover import (
    build_cover,
    corollary_count,
    group_corollary,
    lift_surface,
    orbit_count,
    parse_perm_file,
    surface_loop_words,
)
from .manifold.normal import Coorientation, NormalSurface, is_separating, normal_check
from .manifold.triangulation import (
    ParseError,
    Triangulation,
    TriangulationError,
    fundamental_group,
    homology_h1,
    validate,
)

SCHEMA = "surfdetect.report/1"


class InputError(Exception):
    """Exit status 1."""


class CheckFailed(Exception):
    """Exit status 2; carries the partial report."""

    def __init__(self, report: dict):
        super().__init__(report.get("error", "check failed"))
        self.report = report


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from e


def _load_tri(path: str) -> Triangulation:
    return Triangulation.from_text(_read(path))


def _load_surface(path: Optional[str], tri: Triangulation) -> Optional[NormalSurface]:
    if path is None:
        return None
    s = NormalSurface.from_text(_read(path))
    if s.size != tri.size:
        raise InputError(f"{path}: {s.size} tetrahedra, triangulation has {tri.size}")
    return s


def _load_coor(path: Optional[str], s: Optional[NormalSurface]) -> Optional[Coorientation]:
    if path is None or s is None:
        return None
    return Coorientation.from_text(_read(path), s)


def _checked_validate(tri: Triangulation) -> dict:
    try:
        return validate(tri).as_dict()
    except TriangulationError as e:
        raise CheckFailed({"stage": "validate", "error": str(e), "witness": e.witness}) from e


def _gauge(text: str) -> tuple:
    try:
        tet, v = text.split(".")
        out = (int(tet), int(v))
    except ValueError as e:
        raise InputError(f"gauge must look like TET.VERTEX, got {text!r}") from e
    if not 0 <= out[1] < 4:
        raise InputError(f"gauge vertex must be 0..3, got {out[1]}")
    return out


# -- subcommands ----------------------------------------------------------------------


def cmd_validate(args) -> dict:
    tri = _load_tri(args.triangulation)
    surf = _load_surface(args.surface, tri)
    rep = _checked_validate(tri)
    dual = fundamental_group(tri)
    free, torsion = abelianization(dual.presentation)
    h1 = homology_h1(tri)
    out = {
        "stage": "validate",
        "triangulation": rep,
        "presentation": {
            "generators": dual.names,
            "relators": [format_word(r, dual.names) for r in dual.presentation.relators],
        },
        "abelianization": {"rank": free, "torsion": torsion},
        "homology_h1": {"rank": h1[0], "torsion": h1[1]},
        "homology_agrees": (free, torsion) == h1,
    }
    ok = out["homology_agrees"]
    if surf is not None:
        try:
            nc = normal_check(tri, surf)
            sep, k = is_separating(tri, surf)
        except TriangulationError as e:
            raise CheckFailed({**out, "error": str(e), "witness": e.witness}) from e
        out["surface"] = {**nc.as_dict(), "separating": sep, "complement_components": k}
        coor = _load_coor(args.coor, surf)
        if coor is not None:
            try:
                coor.check(tri, surf)
                out["surface"]["coorientation"] = "consistent"
            except TriangulationError as e:
                raise CheckFailed({**out, "error": str(e), "witness": e.witness}) from e
    out["pass"] = ok
    return out


def _load_rep(path: Optional[str], dual):
    if path is None:
        return None
    try:
        return parse_perm_file(_read(path), dual)
    except GroupError as e:
        raise ParseError(str(e)) from e


def _checked_rep(rep, dual) -> None:
    try:
        rep.validate(dual.presentation)
    except GroupError as e:
        raise CheckFailed({"error": str(e), "witness": {"permutation_rep": str(e)}}) from e


def cmd_cover(args) -> dict:
    tri = _load_tri(args.triangulation)
    _checked_validate(tri)
    dual = fundamental_group(tri)
    rep = _load_rep(args.perm, dual)
    _checked_rep(rep, dual)
    cov = build_cover(tri, rep, dual)
    out: dict = {
        "stage": "cover",
        "degree": rep.degree,
        "generator_images": {n: [j + 1 for j in p] for n, p in zip(dual.names, rep.perms)},
        "cover": _checked_validate(cov.tri),
    }
    ok = out["cover"]["tetrahedra"] == rep.degree * tri.size
    if args.output:
        Path(args.output).write_text(cov.tri.to_text())
        out["written"] = args.output
    surf = _load_surface(args.surface, tri)
    if surf is not None:
        try:
            base = normal_check(tri, surf)
            lifted = lift_surface(cov, surf)
            lc = normal_check(cov.tri, lifted)
        except TriangulationError as e:
            raise CheckFailed({**out, "error": str(e), "witness": e.witness}) from e
        orbits = [orbit_count(rep, ws) for ws in surface_loop_words(tri, dual, surf)]
        out["lift"] = {
            "euler": lc.euler,
            "base_euler": base.euler,
            "euler_multiplicative": lc.euler == rep.degree * base.euler,
            "components": lc.count,
            "orbit_count": sum(orbits),
            "counts_agree": lc.count == sum(orbits),
            "discs": lifted.disc_count(),
            "component_complements": [is_separating(cov.tri, c.vector)[1] for c in lc.components],
        }
        ok = ok and out["lift"]["euler_multiplicative"] and out["lift"]["counts_agree"]
    out["pass"] = ok
    return out


def _parse_subgroups(text: str, names) -> dict:
    out = {}
    for ln in text.splitlines():
        ln = ln.split("#", 1)[0].strip()
        if not ln:
            continue
        key, sep, rest = ln.partition(":")
        key = key.strip()
        if not sep or key not in ("surface", "plus", "minus"):
            raise ParseError(f"expected 'surface:', 'plus:' or 'minus:' line, got {ln!r}")
        words = [w for w in rest.split(",") if w.strip()]
        out[key] = [parse_word(w, names) for w in words]
    for key in ("surface", "plus", "minus"):
        out.setdefault(key, [])
    return out


def cmd_corollary(args) -> dict:
    if args.presentation:
        pres = Presentation.parse(_read(args.presentation))
        if not args.perm or not args.subgroups:
            raise InputError("group-level mode needs --perm and --subgroups")
        from .groups import PermRep

        rep = PermRep.parse(_read(args.perm), pres.names)
        try:
            rep.validate(pres)
        except GroupError as e:
            raise CheckFailed({"stage": "corollary", "error": str(e), "witness": {"permutation_rep": str(e)}}) from e
        subs = _parse_subgroups(_read(args.subgroups), pres.names)
        out = {"stage": "corollary", "mode": "group", **group_corollary(rep, subs["surface"], subs["plus"], subs["minus"])}
        out["pass"] = True
        return out
    if not args.triangulation or not args.surface:
        raise InputError("corollary needs a triangulation and --surface (or --presentation)")
    tri = _load_tri(args.triangulation)
    _checked_validate(tri)
    surf = _load_surface(args.surface, tri)
    dual = fundamental_group(tri)
    rep = _load_rep(args.perm, dual) if args.perm else None
    if rep is None:
        from .groups import PermRep

        rep = PermRep.trivial(dual.presentation.ngens)
    _checked_rep(rep, dual)
    try:
        rpt = corollary_count(tri, surf, rep, dual)
    except TriangulationError as e:
        raise CheckFailed({"stage": "corollary", "error": str(e), "witness": e.witness}) from e
    out = {"stage": "corollary", "mode": "triangulation", **rpt.as_dict()}
    counts = out["components"]
    agree = out["orbit_counts"] == counts
    found_needed = rpt.inequality
    ok = agree and (not found_needed or rpt.nonseparating_component is not None)
    ok = ok and rpt.lift_euler == rep.degree * rpt.base_euler
    out["orbit_counts_agree"] = agree
    out["pass"] = ok
    return out


def _prepare_pipeline(args):
    from .detect import Pipeline

    tri = _load_tri(args.triangulation)
    _checked_validate(tri)
    surf = _load_surface(args.surface, tri)
    if surf is None:
        raise InputError("--surface is required")
    coor = _load_coor(args.coor, surf)
    dual = fundamental_group(tri)
    rep = _load_rep(args.perm, dual)
    if rep is not None:
        _checked_rep(rep, dual)
    psi = None
    if getattr(args, "psi", None):
        cs = schreier(dual.presentation, rep) if rep is not None else None
        if cs is None:
            from .groups import PermRep

            cs = schreier(dual.presentation, PermRep.trivial(dual.presentation.ngens))
        try:
            psi = PsiMap.parse(_read(args.psi), cs)
        except GroupError as e:
            raise ParseError(str(e)) from e
    gauge = _gauge(args.gauge) if args.gauge else (0, 0)
    if gauge[0] >= tri.size:
        raise InputError(f"gauge tetrahedron {gauge[0]} out of range")
    try:
        return Pipeline.prepare(tri, surf, coor, rep, lift=args.lift, psi=psi, gauge=gauge)
    except TriangulationError as e:
        raise CheckFailed({"stage": "prepare", "error": str(e), "witness": e.witness}) from e


def _random_words(ngens: int, count: int, seed: int, max_len: int = 8) -> list:
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.randint(1, max_len)
        out.append(reduce_word(rng.choice([1, -1]) * rng.randint(1, ngens) for _ in range(n)))
    return out


def cmd_detect(args) -> dict:
    from .detect import check_equivariance, run_pipeline

    p = _prepare_pipeline(args)
    if args.dump_psi:
        Path(args.dump_psi).write_text(p.psi_geometric.format(p.cosets))
    report = run_pipeline(p, general=args.general)
    report["stage"] = "detect"
    if args.samples and p.dual.presentation.ngens:
        words = _random_words(p.dual.presentation.ngens, args.samples, args.seed)
        extra = check_equivariance(p, words)
        report["equivariance_random"] = {**extra, "seed": args.seed}
        report["pass"] = report["pass"] and extra["pass"]
    return report


def cmd_character(args) -> dict:
    from .detect import character_report, default_words

    p = _prepare_pipeline(args)
    words = default_words(p)
    for text in args.word or []:
        try:
            words.append(parse_word(text, p.names))
        except GroupError as e:
            raise ParseError(str(e)) from e
    rpt = character_report(p, words)
    return {"stage": "character", **rpt}


def _lattice(text: str) -> LatticeBasis:
    if text.startswith("diag:"):
        return LatticeBasis.diagonal([int(x) for x in text[5:].split(",")])
    return LatticeBasis(parse_matrix(text))


def cmd_building(args) -> dict:
    try:
        a = _lattice(args.a)
        b = _lattice(args.b) if args.b else None
    except (ValueError, ZeroDivision) as e:
        raise ParseError(str(e)) from e
    out: dict = {"stage": "building", "query": args.query}
    if args.query == "type":
        out["type"] = building.vertex_type(a)
        out["dimension"] = a.dim
        out["pass"] = True
        return out
    if b is None:
        raise InputError(f"'{args.query}' needs two lattices")
    try:
        e = building.invariant_factor_exponents(a, b)
    except LatticeError as err:
        raise ParseError(str(err)) from err
    out["exponents"] = list(e)
    if args.query == "dist":
        out["distance"] = building.graph_distance(a, b)
    else:
        out["adjacent"] = building.adjacent(a, b)
        if out["adjacent"]:
            inner, outer = building.flag_witness(a, b)
            out["flag"] = {"inner": str(inner), "outer": str(outer)}
    out["pass"] = True
    return out


# -- plumbing -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="surfdetect", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--report", help="write the JSON report here instead of stdout")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check a triangulation (and surface)")
    p.add_argument("triangulation")
    p.add_argument("--surface")
    p.add_argument("--coor")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("cover", parents=[common], help="build the cover of a permutation representation")
    p.add_argument("triangulation")
    p.add_argument("--perm", required=True)
    p.add_argument("--surface")
    p.add_argument("--output", help="write the cover triangulation")
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("corollary", parents=[common], help="component counts for a separating surface")
    p.add_argument("triangulation", nargs="?")
    p.add_argument("--surface")
    p.add_argument("--perm")
    p.add_argument("--presentation", help="group-level mode: presentation file")
    p.add_argument("--subgroups", help="group-level mode: surface/plus/minus subgroup words")
    p.set_defaults(func=cmd_corollary)

    for name, func, helptext in (
        ("detect", cmd_detect, "run the lattice pipeline"),
        ("character", cmd_character, "trace polynomials of the induced representation"),
    ):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("triangulation")
        p.add_argument("--surface", required=True)
        p.add_argument("--coor", help="coorientation file (default: propagate from the first disc)")
        p.add_argument("--perm", help="permutation representation (default: trivial)")
        p.add_argument("--lift", type=int, help="component of the lifted surface to use")
        p.add_argument("--gauge", help="corner TET.VERTEX given height 0 (default 0.0)")
        p.add_argument("--psi", help="psi values on Schreier generators (overrides the surface)")
        p.set_defaults(func=func)
        if name == "detect":
            p.add_argument("--dump-psi", help="write the surface psi in 'psi v1' format")
            p.add_argument("--general", action="store_true", help="cross-check with general lattice arithmetic")
            p.add_argument("--samples", type=int, default=0, help="extra random words for the equivariance check")
        else:
            p.add_argument("--word", action="append", help="extra word, e.g. 'x0 x1^-1'")

    p = sub.add_parser("building", parents=[common], help="distance, adjacency or type of lattices")
    p.add_argument("query", choices=["dist", "adjacent", "type"])
    p.add_argument("a", help="basis as 't, 0; 0, t^-1' or diag:1,-1")
    p.add_argument("b", nargs="?")
    p.set_defaults(func=cmd_building)
    return ap


def _emit(report: dict, path: Optional[str]) -> None:
    text = json.dumps({"schema": SCHEMA, **report}, indent=2, sort_keys=True, default=str) + "\n"
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    report_path = getattr(args, "report", None)
    try:
        report = args.func(args)
    except (InputError, ParseError, GroupError, LatticeError) as e:
        _emit({"pass": False, "error": str(e), "exit": 1}, report_path)
        return 1
    except CheckFailed as e:
        _emit({**e.report, "pass": False, "exit": 2}, report_path)
        return 2
    code = 0 if report.get("pass") else 2
    _emit({**report, "exit": code}, report_path)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
