"""Finite covers from permutation representations, lifted surfaces, the
intersection homomorphism and the component count for separating surfaces.

Sheets follow the right-action convention of :mod:`surfdetect.groups`:
crossing a face with letter ``x`` moves sheet ``j`` to ``j^x``; tree faces
keep the sheet.  Tetrahedron ``(tet, sheet)`` of the cover has index
``tet * d + sheet``.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from ..groups import (
    CosetStructure,
    GroupError,
    PermRep,
    PsiMap,
    Word,
    format_word,
    inverse_word,
    perm_inverse,
)
from .normal import (
    Coorientation,
    NormalSurface,
    NormalSurfaceError,
    cut,
    disc_components,
    face_region,
    arcs_at,
    glued_arcs,
    normal_check,
    positive_side,
)
from .triangulation import (
    DualPresentation,
    ParseError,
    Triangulation,
    fundamental_group,
    face_vertices,
)


@dataclass
class Cover:
    base: Triangulation
    dual: DualPresentation
    rep: PermRep
    tri: Triangulation

    @property
    def degree(self) -> int:
        return self.rep.degree

    def index(self, tet: int, sheet: int) -> int:
        return tet * self.degree + sheet

    def project(self, ntet: int) -> tuple[int, int]:
        return divmod(ntet, self.degree)

    def sheet_after(self, sheet: int, tet: int, face: int) -> int:
        x = self.dual.letters[(tet, face)]
        return self.rep.act(sheet, (x,)) if x else sheet


def build_cover(tri: Triangulation, rep: PermRep, dual: Optional[DualPresentation] = None) -> Cover:
    """The d-sheeted cover N -> M determined by ``rep``."""
    dual = dual or fundamental_group(tri)
    rep.validate(dual.presentation)
    d = rep.degree
    gl: list = [[None] * 4 for _ in range(tri.size * d)]
    cov = Cover(tri, dual, rep, None)  # type: ignore[arg-type]
    for a in range(tri.size):
        for f in range(4):
            g = tri.gluings[a][f]
            if g is None:
                continue
            b, h, perm = g
            for j in range(d):
                gl[a * d + j][f] = (b * d + cov.sheet_after(j, a, f), h, perm)
    cov.tri = Triangulation(gl)
    return cov


def lift_surface(cov: Cover, s: NormalSurface) -> NormalSurface:
    return NormalSurface([s.coords[a] for a in range(cov.base.size) for _ in range(cov.degree)])


def lift_coorientation(cov: Cover, coor: Coorientation) -> Coorientation:
    signs = {}
    for (tet, kind, j), e in coor.signs.items():
        for sheet in range(cov.degree):
            signs[(cov.index(tet, sheet), kind, j)] = e
    return Coorientation(signs)


def parse_perm_file(text: str, dual: DualPresentation) -> PermRep:
    """Generator images (``perm x0: 2 1``) or face voltages (``perm 3.2: 2 1``).

    Voltages are given on one side of a face; the other side gets the
    inverse and unlisted faces carry the identity.
    """
    body = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    body = [ln for ln in body if ln]
    face_lines = [ln for ln in body if re.match(r"perm\s+\d+\.[0-3]\s*:", ln)]
    if not face_lines:
        try:
            return PermRep.parse(text, dual.names)
        except GroupError as e:
            raise ParseError(str(e)) from e
    if len(face_lines) != sum(1 for ln in body if ln.startswith("perm")):
        raise ParseError("cannot mix generator and face permutations")
    degree = None
    volt: dict = {}
    for ln in body:
        m = re.fullmatch(r"degree\s+(\d+)", ln)
        if m:
            degree = int(m.group(1))
            continue
        m = re.fullmatch(r"perm\s+(\d+)\.([0-3])\s*:\s*([\d\s]+)", ln)
        if not m:
            raise ParseError(f"cannot parse {ln!r}")
        a, f = int(m.group(1)), int(m.group(2))
        if a >= dual.tri.size or dual.tri.gluings[a][f] is None:
            raise ParseError(f"face {a}.{f} is not an interior face")
        imgs = tuple(int(x) - 1 for x in m.group(3).split())
        if sorted(imgs) != list(range(len(imgs))):
            raise ParseError(f"face {a}.{f}: not a permutation")
        degree = degree or len(imgs)
        if len(imgs) != degree:
            raise ParseError(f"face {a}.{f}: expected degree {degree}")
        b, h, _ = dual.tri.gluings[a][f]
        if (b, h) in volt and volt[(b, h)] != perm_inverse(imgs):
            raise ParseError(f"face {a}.{f} given inconsistently from both sides")
        volt[(a, f)] = imgs
        volt[(b, h)] = perm_inverse(imgs)
    ident = tuple(range(degree))
    perms = []
    for k in range(dual.presentation.ngens):
        cur = list(ident)
        for c in dual.loop_crossings((k + 1,)):
            p = volt.get(c, ident)
            cur = [p[x] for x in cur]
        perms.append(tuple(cur))
    return PermRep(degree, perms)


# -- heights and the intersection homomorphism ---------------------------------


class HeightError(NormalSurfaceError):
    pass


@dataclass
class HeightField:
    """Integer heights on corners of the cover cut along T.

    The height of corner v of cover tetrahedron n is ``offset + local[n][v]``
    where ``local`` is 1 on the + side of the disc of T in n and 0
    elsewhere; crossing a face changes the offset by ``delta[(n, f)]``.
    """

    cover: Cover
    surface: NormalSurface
    coor: Coorientation
    local: list
    delta: dict

    @classmethod
    def build(cls, cov: Cover, surface: NormalSurface, coor: Coorientation) -> "HeightField":
        n = cov.tri
        local = []
        for ntet in range(n.size):
            plus = positive_side(surface, coor, ntet)
            local.append(tuple(1 if v in plus else 0 for v in range(4)))
        delta = {}
        for a in range(n.size):
            for f in range(4):
                g = n.gluings[a][f]
                if g is None:
                    continue
                b, _, perm = g
                vals = {local[a][v] - local[b][perm[v]] for v in face_vertices(f)}
                if len(vals) != 1:
                    raise HeightError(
                        f"heights disagree across face {a}.{f} of the cover", {"face": f"{a}.{f}"}
                    )
                delta[(a, f)] = vals.pop()
        return cls(cov, surface, coor, local, delta)

    def walk(self, sheet: int, crossings: list, tet: int = 0) -> tuple[int, int]:
        """Follow base crossings from (tet, sheet); return (end sheet, offset change)."""
        off = 0
        cov = self.cover
        for a, f in crossings:
            off += self.delta[(cov.index(a, sheet), f)]
            sheet = cov.sheet_after(sheet, a, f)
        return sheet, off

    def word_offset(self, w: Word, sheet: int = 0) -> tuple[int, int]:
        return self.walk(sheet, self.cover.dual.loop_crossings(w))

    def corner_height(self, w: Word, tet: int, v: int) -> int:
        """g~ at corner v of the lift w . tet~ (base tetrahedron has offset 0)."""
        sheet, off = self.word_offset(w)
        sheet, off2 = self.walk(sheet, self.cover.dual.path_to[tet])
        return off + off2 + self.local[self.cover.index(tet, sheet)][v]


def psi_geometric(hf: HeightField, c: CosetStructure) -> PsiMap:
    """psi on Schreier generators: the height change around each loop."""
    vals = []
    for w in c.schreier_words:
        sheet, off = hf.word_offset(w)
        assert sheet == 0
        vals.append(off)
    return PsiMap(vals)


@dataclass
class NPsi:
    """psi on the dual generators of the cover N."""

    dual: DualPresentation
    values: list
    relator_failures: list = field(default_factory=list)

    def surjective(self) -> bool:
        import math

        nz = [abs(v) for v in self.values if v]
        return bool(nz) and math.gcd(*nz) == 1

    def eval(self, w: Word) -> int:
        return sum(self.values[abs(x) - 1] * (1 if x > 0 else -1) for x in w)


def psi_from_surface(n: Triangulation, surface: NormalSurface, coor: Coorientation, dual=None) -> NPsi:
    """Signed crossing count of each dual generator loop of N with the surface.

    A crossing counts +1 when the loop passes from the - side to the + side.
    """
    coor.check(n, surface)
    dual = dual or fundamental_group(n)
    trivial = PermRep.trivial(dual.presentation.ngens)
    cov = Cover(n, dual, trivial, n)
    hf = HeightField.build(cov, surface, coor)
    vals = [hf.word_offset((k + 1,))[1] for k in range(dual.presentation.ngens)]
    out = NPsi(dual, vals)
    for r in dual.presentation.relators:
        v = out.eval(r)
        if v:
            out.relator_failures.append((format_word(r, dual.names), v))
    return out


# -- components of lifts, complements and orbit counting -----------------------


def orbit_count(rep: PermRep, words: list) -> int:
    d = rep.degree
    perms = [rep.word_perm(w) for w in words]
    seen = [False] * d
    count = 0
    for s in range(d):
        if seen[s]:
            continue
        count += 1
        seen[s] = True
        queue = deque([s])
        while queue:
            j = queue.popleft()
            for p in perms:
                for k in (p[j], perm_inverse(p)[j]):
                    if not seen[k]:
                        seen[k] = True
                        queue.append(k)
    return count


def _loop_words(dual: DualPresentation, nodes: list, edges: list) -> dict:
    """Generators of the image of pi_1 of each piece-graph component.

    ``edges`` holds (node, node', face crossing) triples.  Returns
    component root -> list of words based at tetrahedron 0.
    """
    adj: dict = {x: [] for x in nodes}
    for x, y, cr in edges:
        adj[x].append((y, cr))
    tree_path: dict = {}
    roots: dict = {}
    out: dict = {}
    for start in nodes:
        if start in tree_path:
            continue
        tree_path[start] = []
        roots[start] = start
        out[start] = []
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y, cr in adj[x]:
                if y not in tree_path:
                    tree_path[y] = tree_path[x] + [cr]
                    roots[y] = start
                    queue.append(y)
    base_tet = {x: x[0] for x in nodes}
    for x, y, cr in edges:
        r = roots[x]
        a = base_tet[r]
        loop = dual.path_to[a] + tree_path[x] + [cr] + dual.reverse_path(tree_path[y]) + dual.reverse_path(dual.path_to[a])
        w = dual.word_of_crossings(loop)
        if w:
            out[r].append(max(w, inverse_word(w)))
    return {r: sorted(set(ws)) for r, ws in out.items()}


def surface_loop_words(tri: Triangulation, dual: DualPresentation, s: NormalSurface) -> list:
    """Per component of s, words generating the image of its pi_1."""
    comp = disc_components(tri, s)
    discs = sorted(comp)
    edges = []
    for d1, d2, _, _, fa, fb in glued_arcs(tri, s):
        edges.append((d1, d2, fa))
        edges.append((d2, d1, fb))
    words = _loop_words(dual, discs, edges)
    return [words[r] for r in sorted(words, key=lambda r: comp[r])]


def region_edges(tri: Triangulation, s: NormalSurface) -> list:
    out = []
    for a, f, (b, g, perm) in tri.interior_faces():
        ca, cb = s.coords[a], s.coords[b]
        pairs = [(face_region(a, ca, f, None), face_region(b, cb, g, None))]
        for v in face_vertices(f):
            for p in range(arcs_at(ca, f, v)):
                pairs.append((face_region(a, ca, f, v, p), face_region(b, cb, g, perm[v], p)))
        for x, y in pairs:
            out.append((x, y, (a, f)))
            out.append((y, x, (b, g)))
    return out


def region_loop_words(tri: Triangulation, dual: DualPresentation, s: NormalSurface) -> tuple[dict, dict]:
    """(region -> complement component, component -> loop words)."""
    res = cut(tri, s)
    nodes = sorted(res.labels, key=lambda r: (r[0], str(r)))
    words = _loop_words(dual, nodes, region_edges(tri, s))
    by_comp = {res.labels[r]: ws for r, ws in words.items()}
    return res.labels, by_comp


@dataclass
class CorollaryReport:
    degree: int
    surface_components: int
    plus_components: int
    minus_components: int
    orbit_counts: dict
    inequality: bool
    nonseparating_component: Optional[int]
    nonseparating_complement: Optional[int]
    lift_euler: int
    base_euler: int
    subgroup_words: dict

    def as_dict(self) -> dict:
        return {
            "degree": self.degree,
            "components": {
                "surface": self.surface_components,
                "plus": self.plus_components,
                "minus": self.minus_components,
            },
            "orbit_counts": self.orbit_counts,
            "inequality_holds": self.inequality,
            "nonseparating_lift": self.nonseparating_component,
            "nonseparating_lift_complement_components": self.nonseparating_complement,
            "euler": {"base": self.base_euler, "lift": self.lift_euler},
            "subgroup_words": self.subgroup_words,
        }


class CorollaryError(NormalSurfaceError):
    pass


def corollary_count(tri: Triangulation, s: NormalSurface, rep: PermRep, dual=None) -> CorollaryReport:
    """Component counts of p^-1(S), p^-1(M+), p^-1(M-) in the cover."""
    dual = dual or fundamental_group(tri)
    base = normal_check(tri, s)
    if base.count != 1:
        raise CorollaryError(f"surface has {base.count} components, expected 1", {"components": base.count})
    labels, comp_words = region_loop_words(tri, dual, s)
    ncomp = max(labels.values()) + 1
    if ncomp != 2:
        raise CorollaryError("surface does not separate", {"complement_components": ncomp})
    (s_words,) = surface_loop_words(tri, dual, s)
    cov = build_cover(tri, rep, dual)
    lifted = lift_surface(cov, s)
    lift_check = normal_check(cov.tri, lifted)
    ncut = cut(cov.tri, lifted)
    side_comps: list = [set(), set()]
    for r, lab in ncut.labels.items():
        tet, sheet = cov.project(r[0])
        base_r = (tet,) + r[1:]
        side_comps[labels[base_r]].add(lab)
    plus, minus = len(side_comps[0]), len(side_comps[1])
    orbits = {
        "surface": orbit_count(rep, s_words),
        "plus": orbit_count(rep, comp_words[0]),
        "minus": orbit_count(rep, comp_words[1]),
    }
    found = None
    found_cut = None
    for i, info in enumerate(lift_check.components):
        k = cut(cov.tri, info.vector).components
        if k == 1:
            found, found_cut = i, k
            break
    names = dual.names
    return CorollaryReport(
        degree=rep.degree,
        surface_components=lift_check.count,
        plus_components=plus,
        minus_components=minus,
        orbit_counts=orbits,
        inequality=lift_check.count >= plus + minus,
        nonseparating_component=found,
        nonseparating_complement=found_cut,
        lift_euler=lift_check.euler,
        base_euler=base.euler,
        subgroup_words={
            "surface": [format_word(w, names) for w in s_words],
            "plus": [format_word(w, names) for w in comp_words[0]],
            "minus": [format_word(w, names) for w in comp_words[1]],
        },
    )


def group_corollary(rep: PermRep, surface_words: list, plus_words: list, minus_words: list) -> dict:
    """Index inequality from orbit counts alone (no triangulation)."""
    s = orbit_count(rep, surface_words)
    p = orbit_count(rep, plus_words)
    m = orbit_count(rep, minus_words)
    return {
        "degree": rep.degree,
        "orbit_counts": {"surface": s, "plus": p, "minus": m},
        "inequality_holds": s >= p + m,
        "forces_nonseparating_lift": s >= p + m,
    }
