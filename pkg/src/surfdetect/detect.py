"""Heights, the vertex map into the building, the equivariance and
distance-two checks, dual surface extraction and the trace report.

Vertex images are diagonal lattices ``(+)_i reps_i (x) Lambda_{h_i}`` stored as
the height vector ``h``; the full 2d exponent vector is
``(h_1, -h_1, ..., h_d, -h_d)``, so two images are homothetic exactly when
their height vectors are equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import building
from .building import DiagonalClass, LatticeBasis, block_diagonal, diagonal
from .groups import (
    CosetStructure,
    MonomialRep,
    PermRep,
    PsiMap,
    expand_w,
    format_laurent,
    format_word,
    induced_rep,
    is_symmetric,
    laurent_valuation,
    monomial_to_matrix,
    rewrite_in_w,
    schreier,
    trace_poly,
)
from .manifold.cover import (
    HeightField,
    build_cover,
    lift_coorientation,
    lift_surface,
    psi_geometric,
    psi_from_surface,
)
from .manifold.normal import (
    QUAD_PAIRS,
    Coorientation,
    NormalSurface,
    NormalSurfaceError,
    cut,
    normal_check,
    pipeline_ready,
    reference_side,
)
from .manifold.triangulation import Triangulation, fundamental_group

REPORT_SCHEMA = "surfdetect.detect/1"


class PipelineError(NormalSurfaceError):
    """A hypothesis of the pipeline fails (witness attached)."""


# -- vertex images ---------------------------------------------------------------


@dataclass(frozen=True)
class VertexImage:
    heights: tuple

    @property
    def exponents(self) -> tuple:
        return tuple(x for h in self.heights for x in (h, -h))

    def diagonal_class(self) -> DiagonalClass:
        return DiagonalClass(self.exponents)

    def basis(self) -> LatticeBasis:
        return LatticeBasis(diagonal(self.exponents))

    def distance(self, other: "VertexImage") -> int:
        return 2 * max(abs(a - b) for a, b in zip(self.heights, other.heights))


def primed_lattice(lo: VertexImage, hi: VertexImage) -> LatticeBasis:
    """The lattice between two images differing by 0/1 per block: on a
    block with heights (n, n+1) use span(t^n e1, t^(-n-1) e2)."""
    blocks = []
    for a, b in zip(lo.heights, hi.heights):
        n = min(a, b)
        blocks.append(diagonal((n, -n - 1)) if a != b else diagonal((a, -a)))
    return LatticeBasis(block_diagonal(blocks))


# -- the pipeline state ----------------------------------------------------------


@dataclass
class HeightAssignment:
    """heights[tet][i][v] = g~ at corner v of the lift reps_i . tet~."""

    heights: list
    gauge: tuple
    shift: int

    def f0(self, tet: int) -> list:
        d = len(self.heights[tet])
        return [VertexImage(tuple(self.heights[tet][i][v] for i in range(d))) for v in range(4)]


@dataclass
class Pipeline:
    tri: Triangulation
    surface: NormalSurface
    coor: Coorientation
    rep: PermRep
    dual: object = None
    cover: object = None
    lift_index: int = 0
    lift: Optional[NormalSurface] = None
    field_: Optional[HeightField] = None
    cosets: Optional[CosetStructure] = None
    psi_geometric: Optional[PsiMap] = None
    psi: Optional[PsiMap] = None
    psi_source: str = "surface"
    gauge: tuple = (0, 0)
    heights: Optional[HeightAssignment] = None
    notes: list = field(default_factory=list)

    @classmethod
    def prepare(
        cls,
        tri: Triangulation,
        surface: NormalSurface,
        coor: Optional[Coorientation],
        rep: Optional[PermRep] = None,
        lift: Optional[int] = None,
        psi: Optional[PsiMap] = None,
        gauge: tuple = (0, 0),
    ) -> "Pipeline":
        pipeline_ready(tri, surface)
        if coor is None:
            coor = Coorientation.propagate(tri, surface)
        coor.check(tri, surface)
        dual = fundamental_group(tri)
        rep = rep or PermRep.trivial(dual.presentation.ngens)
        cov = build_cover(tri, rep, dual)
        lifted = lift_surface(cov, surface)
        comps = normal_check(cov.tri, lifted).components
        if not comps:
            raise PipelineError("surface is empty", {"surface": "empty"})
        if lift is None:
            lift = next((i for i, c in enumerate(comps) if cut(cov.tri, c.vector).components == 1), None)
            if lift is None:
                raise PipelineError(
                    "every component of the lifted surface separates the cover",
                    {"components": len(comps)},
                )
        if not 0 <= lift < len(comps):
            raise PipelineError(f"no lift component {lift}", {"lift": lift})
        t_surf = comps[lift].vector
        all_signs = lift_coorientation(cov, coor).signs
        t_coor = Coorientation({d: e for d, e in all_signs.items() if t_surf.coords[d[0]][d[1]]})
        hf = HeightField.build(cov, t_surf, t_coor)
        cs = schreier(dual.presentation, rep)
        geo = psi_geometric(hf, cs)
        p = cls(tri, surface, coor, rep, dual, cov, lift, t_surf, hf, cs, geo, psi or geo)
        p.psi_source = "file" if psi is not None else "surface"
        p.gauge = gauge
        p.heights = p.compute_heights()
        return p

    @property
    def degree(self) -> int:
        return self.rep.degree

    @property
    def names(self) -> list:
        return self.dual.names

    def compute_heights(self) -> HeightAssignment:
        hf = self.field_
        cs = self.cosets
        gt, gv = self.gauge
        shift = -hf.corner_height((), gt, gv)
        out = []
        starts = [hf.word_offset(cs.reps[i]) for i in range(self.degree)]
        for tet in range(self.tri.size):
            path = self.dual.path_to[tet]
            per = []
            for i, (sheet, off) in enumerate(starts):
                assert sheet == i
                end, off2 = hf.walk(sheet, path)
                loc = hf.local[self.cover.index(tet, end)]
                per.append(tuple(off + off2 + loc[v] + shift for v in range(4)))
            out.append(per)
        return HeightAssignment(out, self.gauge, shift)

    def image_of(self, w, tet: int, v: int) -> VertexImage:
        """f~ at corner v of the lift w . tet~, computed directly from heights."""
        hf = self.field_
        shift = self.heights.shift
        return VertexImage(
            tuple(hf.corner_height(self.cosets.reps[i] + tuple(w), tet, v) + shift for i in range(self.degree))
        )

    def monomial(self, w) -> MonomialRep:
        return induced_rep(tuple(w), self.cosets, self.psi)


# -- checks ----------------------------------------------------------------------


def check_equivariance(p: Pipeline, words: Optional[list] = None, general: bool = False) -> dict:
    """P(g) f~(s) == f~(g s) for every sampled word and every corner."""
    words = words if words is not None else [(k + 1,) for k in range(p.dual.presentation.ngens)]
    checked = 0
    for w in words:
        m = p.monomial(w)
        mat = monomial_to_matrix(m) if general else None
        for tet in range(p.tri.size):
            here = p.heights.f0(tet)
            for v in range(4):
                got = m.act_exponents(here[v].heights)
                want = p.image_of(w, tet, v)
                ok = got == want.heights
                if general:
                    moved = building.act(mat, here[v].basis())
                    if building.homothetic(moved, want.basis()) != ok:
                        raise AssertionError("diagonal and general lattice checks disagree")
                checked += 1
                if not ok:
                    return {
                        "pass": False,
                        "checked": checked,
                        "witness": {
                            "word": format_word(w, p.names),
                            "corner": f"{tet}.{v}",
                            "image_of_corner": list(want.heights),
                            "action_applied": list(got),
                        },
                    }
    return {"pass": True, "checked": checked, "words": len(words)}


def _disc_partition(s: NormalSurface, tet: int) -> Optional[frozenset]:
    ds = s.discs(tet)
    if not ds:
        return None
    ref = frozenset(reference_side(ds[0][1]))
    return frozenset({ref, frozenset(range(4)) - ref})


def check_tet_images(p: Pipeline, general: bool = True) -> dict:
    """Classify the four corner images of every tetrahedron."""
    rows = []
    failure = None
    for tet in range(p.tri.size):
        imgs = p.heights.f0(tet)
        classes = sorted(set(imgs), key=lambda x: (sum(x.heights), x.heights))
        row: dict = {"tet": tet, "classes": len(classes)}
        if len(classes) == 1:
            row["heights"] = list(classes[0].heights)
            if p.surface.discs(tet):
                failure = failure or {"tetrahedron": tet, "reason": "surface disc but one class"}
        elif len(classes) == 2:
            lo, hi = classes
            dist = lo.distance(hi)
            row["distance"] = dist
            plus = tuple(v for v in range(4) if imgs[v] == hi)
            minus = tuple(v for v in range(4) if imgs[v] == lo)
            row["plus"], row["minus"] = list(plus), list(minus)
            row["heights"] = {"plus": list(hi.heights), "minus": list(lo.heights)}
            crossed = [i for i, (a, b) in enumerate(zip(lo.heights, hi.heights)) if a != b]
            row["crossed_cosets"] = [i + 1 for i in crossed]
            flags = False
            if dist == 2:
                lam = primed_lattice(lo, hi)
                t_lam = lam.scaled(1)
                flags = all(
                    building.strictly_contains(lam, x) and building.strictly_contains(x, t_lam)
                    for x in (lo.basis(), hi.basis())
                )
                if general:
                    gd = building.graph_distance(lo.basis(), hi.basis())
                    row["distance_general"] = gd
                    flags = flags and gd == 2
                    flags = flags and building.adjacent(lam, lo.basis()) and building.adjacent(lam, hi.basis())
            row["flags"] = flags
            part = frozenset({frozenset(plus), frozenset(minus)})
            row["matches_surface"] = part == _disc_partition(p.surface, tet)
            if dist != 2 or not flags or not row["matches_surface"]:
                failure = failure or {"tetrahedron": tet, "reason": "distance/flag/partition check", "distance": dist}
        else:
            row["heights"] = [list(c.heights) for c in classes]
            failure = failure or {"tetrahedron": tet, "reason": f"{len(classes)} distinct classes"}
        rows.append(row)
    out = {"pass": failure is None, "tetrahedra": rows}
    if failure:
        out["witness"] = failure
    return out


def extract_dual_surface(p: Pipeline, classification: dict) -> NormalSurface:
    """Two parallel discs separating plus from minus corners in every crossed tetrahedron."""
    coords = []
    for row in classification["tetrahedra"]:
        c = [0] * 7
        if row["classes"] == 2:
            plus, minus = row["plus"], row["minus"]
            small = plus if len(plus) <= len(minus) else minus
            if len(small) == 1:
                c[small[0]] = 2
            elif len(small) == 2:
                k = next(k for k, pair in enumerate(QUAD_PAIRS) if set(small) in (set(pair[0]), set(pair[1])))
                c[4 + k] = 2
        coords.append(tuple(c))
    return NormalSurface(coords)


def dual_surface_report(p: Pipeline, classification: dict) -> dict:
    dual = extract_dual_surface(p, classification)
    want = p.surface.scaled(2)
    equal = dual.coords == want.coords
    out: dict = {"vector": [list(c) for c in dual.coords], "equals_two_copies": equal}
    try:
        nc = normal_check(p.tri, dual)
        out["components"] = nc.count
        out["euler"] = nc.euler
        out["input_components"] = normal_check(p.tri, p.surface).count
    except NormalSurfaceError as e:
        out["matching_error"] = str(e)
        out["equals_two_copies"] = False
    return out


# -- characters and stabilizers ----------------------------------------------------


def default_words(p: Pipeline) -> list:
    words = [()]
    words += [(k + 1,) for k in range(p.dual.presentation.ngens)]
    for k in p.cosets.nontrivial():
        w = p.cosets.schreier_words[k]
        if w not in words:
            words.append(w)
    return words


def character_report(p: Pipeline, words: Optional[list] = None) -> dict:
    words = words if words is not None else default_words(p)
    rows = []
    min_val = 0
    nonconstant = False
    all_sym = True
    all_w = True
    for w in words:
        tr = trace_poly(p.monomial(w))
        val = laurent_valuation(tr)
        sym = is_symmetric(tr)
        row = {
            "word": format_word(w, p.names),
            "trace": format_laurent(tr),
            "valuation": val if tr else None,
            "symmetric": sym,
        }
        if sym:
            q = rewrite_in_w(tr)
            row["in_w"] = format_laurent({i: c for i, c in enumerate(q) if c}, "w")
            row["w_exact"] = expand_w(q) == tr
            all_w = all_w and row["w_exact"]
        all_sym = all_sym and sym
        if tr and any(k != 0 for k in tr):
            nonconstant = True
        if tr:
            min_val = min(min_val, val)
        rows.append(row)
    return {
        "pass": nonconstant and all_sym and all_w and min_val <= -1,
        "degree": 2 * p.degree,
        "min_valuation": min_val,
        "nonconstant": nonconstant,
        "all_symmetric": all_sym,
        "all_rewrite_in_w": all_w,
        "traces": rows,
    }


def stabilizer_probe(p: Pipeline, image: VertexImage, words: Optional[list] = None) -> list:
    """Words among ``words`` (default: generators) that move the class."""
    words = words if words is not None else [(k + 1,) for k in range(p.dual.presentation.ngens)]
    return [format_word(w, p.names) for w in words if p.monomial(w).act_exponents(image.heights) != image.heights]


# -- full run ------------------------------------------------------------------------


def psi_report(p: Pipeline) -> dict:
    cs = p.cosets
    out = {
        "source": p.psi_source,
        "values": {cs.schreier_name(k): v for k, v in enumerate(p.psi.values) if cs.schreier_words[k]},
        "relator_failures": [list(x) for x in p.psi.validate(cs)],
        "surjective": p.psi.is_surjective(),
    }
    # route through the cover's own presentation as an independent check
    npsi = psi_from_surface(p.cover.tri, p.lift, Coorientation(
        {d: e for d, e in lift_coorientation(p.cover, p.coor).signs.items() if p.lift.coords[d[0]][d[1]]}
    ))
    mismatches = []
    for k in cs.nontrivial():
        cross = p.dual.loop_crossings(cs.schreier_words[k])
        ncross = []
        sheet = 0
        for a, f in cross:
            ncross.append((p.cover.index(a, sheet), f))
            sheet = p.cover.sheet_after(sheet, a, f)
        nw = npsi.dual.word_of_crossings(npsi.dual.path_to[0] + ncross)
        if npsi.eval(nw) != p.psi_geometric.values[k]:
            mismatches.append(cs.schreier_name(k))
    out["cover_presentation"] = {
        "generators": len(npsi.values),
        "relator_failures": [list(x) for x in npsi.relator_failures],
        "surjective": npsi.surjective(),
        "agrees_with_schreier_values": not mismatches,
    }
    out["pass"] = not out["relator_failures"] and out["surjective"] and not npsi.relator_failures and not mismatches
    return out


def run_pipeline(p: Pipeline, general: bool = False) -> dict:
    cs = p.cosets
    eq = check_equivariance(p, general=general)
    cls = check_tet_images(p)
    dual = dual_surface_report(p, cls) if cls["pass"] else {"equals_two_copies": False, "skipped": True}
    chars = character_report(p)
    base = VertexImage(tuple([0] * p.degree))
    movers = stabilizer_probe(p, base)
    psi = psi_report(p)
    report = {
        "schema": REPORT_SCHEMA,
        "degree": p.degree,
        "lattice_dimension": 2 * p.degree,
        "gauge": {"corner": f"{p.gauge[0]}.{p.gauge[1]}", "shift": p.heights.shift},
        "coset_representatives": [format_word(w, p.names) for w in cs.reps],
        "lift_component": p.lift_index,
        "psi": psi,
        "equivariance": eq,
        "classification": cls,
        "dual_surface": dual,
        "dual_equals_two_copies": bool(dual.get("equals_two_copies")),
        "character": chars,
        "stabilizer": {"base_class_moved_by": movers, "nontrivial": bool(movers)},
    }
    report["pass"] = bool(
        eq["pass"] and cls["pass"] and report["dual_equals_two_copies"] and chars["pass"] and psi["pass"]
    )
    return report
