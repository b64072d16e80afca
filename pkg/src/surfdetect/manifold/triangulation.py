"""Face-pairing triangulations, validation and the dual-graph presentation.

A triangulation has tetrahedra ``0..n-1`` with vertices ``0..3``; face ``f``
of a tetrahedron is the face opposite vertex ``f``.  ``gluings[tet][f]`` is
either ``None`` (boundary) or ``(tet2, f2, perm)`` where ``perm`` is a
4-tuple mapping vertices of ``tet`` to vertices of ``tet2`` with
``perm[f] == f2``.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations, permutations
from typing import Optional

from ..groups import Presentation, Word, cyclic_reduce, reduce_word

Gluing = tuple  # (tet, face, perm)


class ParseError(ValueError):
    """Malformed input file (exit status 1)."""


class TriangulationError(ValueError):
    """A structural check failed; ``witness`` names the offending simplex."""

    def __init__(self, message: str, witness: dict):
        super().__init__(message)
        self.witness = witness


def perm_sign(p) -> int:
    sign = 1
    p = list(p)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def perm_inv(p) -> tuple:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def face_vertices(f: int) -> tuple:
    return tuple(v for v in range(4) if v != f)


@dataclass
class Triangulation:
    gluings: list

    @property
    def size(self) -> int:
        return len(self.gluings)

    def neighbour(self, tet: int, face: int) -> Optional[Gluing]:
        return self.gluings[tet][face]

    def interior_faces(self):
        """Each interior face class once, from its lexicographically smaller side."""
        for tet in range(self.size):
            for f in range(4):
                g = self.gluings[tet][f]
                if g is not None and (tet, f) <= (g[0], g[1]):
                    yield tet, f, g

    def boundary_faces(self):
        for tet in range(self.size):
            for f in range(4):
                if self.gluings[tet][f] is None:
                    yield tet, f

    # -- file format ---------------------------------------------------------

    def to_text(self, both_sides: bool = False) -> str:
        """Serialize; by default each interior face is written once."""
        lines = ["tri v1", f"tet {self.size}"]
        for tet in range(self.size):
            for f in range(4):
                g = self.gluings[tet][f]
                if g is None:
                    lines.append(f"glue {tet}.{f} boundary")
                elif both_sides or (tet, f) <= (g[0], g[1]):
                    imgs = "".join(str(g[2][v]) for v in face_vertices(f))
                    lines.append(f"glue {tet}.{f} {g[0]}.{g[1]} {imgs}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Triangulation":
        lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
        lines = [(i + 1, ln) for i, ln in enumerate(lines) if ln]
        if not lines or lines[0][1] != "tri v1":
            raise ParseError("triangulation file must start with 'tri v1'")
        if len(lines) < 2:
            raise ParseError("missing 'tet <k>' line")
        m = re.fullmatch(r"tet\s+(\d+)", lines[1][1])
        if not m:
            raise ParseError(f"line {lines[1][0]}: expected 'tet <k>'")
        n = int(m.group(1))
        declared: dict = {}
        for lineno, ln in lines[2:]:
            m = re.fullmatch(r"glue\s+(\d+)\.([0-3])\s+(?:(boundary)|(\d+)\.([0-3])\s+([0-3]{3}))", ln)
            if not m:
                raise ParseError(f"line {lineno}: cannot parse {ln!r}")
            a, f = int(m.group(1)), int(m.group(2))
            if a >= n:
                raise ParseError(f"line {lineno}: tetrahedron {a} out of range")
            if (a, f) in declared:
                raise ParseError(f"line {lineno}: face {a}.{f} declared twice")
            if m.group(3):
                declared[(a, f)] = None
                continue
            b, g = int(m.group(4)), int(m.group(5))
            if b >= n:
                raise ParseError(f"line {lineno}: tetrahedron {b} out of range")
            imgs = [int(c) for c in m.group(6)]
            perm = [0] * 4
            for v, w in zip(face_vertices(f), imgs):
                perm[v] = w
            perm[f] = g
            if sorted(perm) != [0, 1, 2, 3]:
                raise ParseError(f"line {lineno}: {m.group(6)!r} is not a bijection onto face {b}.{g}")
            declared[(a, f)] = (b, g, tuple(perm))
        gluings: list = [[None] * 4 for _ in range(n)]
        missing = []
        for a in range(n):
            for f in range(4):
                if (a, f) in declared:
                    gluings[a][f] = declared[(a, f)]
                    continue
                partners = [(k, v) for k, v in declared.items() if v is not None and (v[0], v[1]) == (a, f)]
                if not partners:
                    missing.append(f"{a}.{f}")
                    continue
                (b, g), (_, _, perm) = partners[0]
                gluings[a][f] = (b, g, perm_inv(perm))
        if missing:
            raise ParseError("faces without a gluing or 'boundary' line: " + ", ".join(missing))
        return cls(gluings)


# -- combinatorial structure -------------------------------------------------


class _UF:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        p = self.parent.setdefault(x, x)
        if p != x:
            p = self.parent[x] = self.find(p)
        return p

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


@dataclass
class EdgeClass:
    incidences: list  # (tet, a, b) oriented consistently with incidences[0]
    crossings: list  # (tet, exit face) around the edge, cyclic when interior
    interior: bool


@dataclass
class ValidationReport:
    tetrahedra: int
    orientable: bool
    orientation: list
    vertices: int
    edges: int
    faces: int
    boundary_faces: int
    vertex_links: list  # (euler characteristic, on boundary)
    closed: bool

    def as_dict(self) -> dict:
        return {
            "tetrahedra": self.tetrahedra,
            "orientable": self.orientable,
            "vertices": self.vertices,
            "edges": self.edges,
            "faces": self.faces,
            "boundary_faces": self.boundary_faces,
            "closed": self.closed,
            "vertex_links": [{"euler": e, "boundary": b} for e, b in self.vertex_links],
        }


def _check_gluings(tri: Triangulation) -> None:
    n = tri.size
    for a in range(n):
        for f in range(4):
            g = tri.gluings[a][f]
            if g is None:
                continue
            b, h, perm = g
            face = f"{a}.{f}"
            if not 0 <= b < n:
                raise TriangulationError(f"face {face} glued to missing tetrahedron {b}", {"face": face})
            if (b, h) == (a, f):
                raise TriangulationError(f"face {face} glued to itself", {"face": face})
            if perm[f] != h:
                raise TriangulationError(f"face {face}: vertex map does not send face to face", {"face": face})
            back = tri.gluings[b][h]
            if back is None or back[0] != a or back[1] != f or back[2] != perm_inv(perm):
                raise TriangulationError(
                    f"gluing not involutive at face {b}.{h} (partner of {face})",
                    {"face": f"{b}.{h}", "partner": face},
                )


def _orientation(tri: Triangulation) -> list:
    orient = [0] * tri.size
    for start in range(tri.size):
        if orient[start]:
            continue
        if start:
            raise TriangulationError("triangulation is not connected", {"tetrahedron": start})
        orient[start] = 1
        queue = deque([start])
        while queue:
            a = queue.popleft()
            for f in range(4):
                g = tri.gluings[a][f]
                if g is None:
                    continue
                b, _, perm = g
                want = -orient[a] * perm_sign(perm)
                if not orient[b]:
                    orient[b] = want
                    queue.append(b)
                elif orient[b] != want:
                    raise TriangulationError(
                        f"orientation mismatch across face {a}.{f}", {"face": f"{a}.{f}"}
                    )
    return orient


def _walk_edge(tri: Triangulation, tet: int, a: int, b: int, e: int, x: int):
    """Walk around edge ab of ``tet`` exiting first through face x.

    Returns (incidences, crossings, closed).
    """
    start = (tet, a, b, e, x)
    inc = [(tet, a, b)]
    crossings = []
    state = start
    while True:
        d, a1, b1, e1, x1 = state
        g = tri.gluings[d][x1]
        if g is None:
            return inc, crossings, False
        d2, _, p = g
        crossings.append((d, x1))
        state = (d2, p[a1], p[b1], p[x1], p[e1])
        if state == start:
            return inc, crossings, True
        if state[0] == tet and {state[1], state[2]} == {a, b}:
            raise TriangulationError(
                f"edge {a}{b} of tetrahedron {tet} is identified with itself in reverse",
                {"edge": f"{tet}:{a}{b}"},
            )
        inc.append(state[:3])
        if len(inc) > 6 * tri.size:
            raise TriangulationError("edge walk did not terminate", {"edge": f"{tet}:{a}{b}"})


def edge_classes(tri: Triangulation) -> list:
    seen = set()
    out = []
    for tet in range(tri.size):
        for a, b in combinations(range(4), 2):
            if (tet, a, b) in seen:
                continue
            c, d = [v for v in range(4) if v not in (a, b)]
            inc, cross, closed = _walk_edge(tri, tet, a, b, c, d)
            if not closed:
                inc2, cross2, _ = _walk_edge(tri, tet, a, b, d, c)
                inc = list(reversed(inc2[1:])) + inc
                cross = cross2[::-1] + cross
            for d_, u, w in inc:
                key = (d_, min(u, w), max(u, w))
                seen.add(key)
            out.append(EdgeClass(inc, cross, closed))
    return out


def vertex_classes(tri: Triangulation) -> dict:
    uf = _UF()
    for a in range(tri.size):
        for v in range(4):
            uf.find((a, v))
        for f in range(4):
            g = tri.gluings[a][f]
            if g is not None:
                for v in face_vertices(f):
                    uf.union((a, v), (g[0], g[2][v]))
    roots = sorted({uf.find((a, v)) for a in range(tri.size) for v in range(4)})
    index = {r: i for i, r in enumerate(roots)}
    return {(a, v): index[uf.find((a, v))] for a in range(tri.size) for v in range(4)}


def validate(tri: Triangulation) -> ValidationReport:
    """Check involutivity, connectedness, orientability and edge/vertex links.

    Raises :class:`TriangulationError` naming the offending simplex.
    """
    if tri.size == 0:
        raise TriangulationError("empty triangulation", {})
    _check_gluings(tri)
    orient = _orientation(tri)
    edges = edge_classes(tri)
    verts = vertex_classes(tri)
    nverts = max(verts.values()) + 1
    faces = list(tri.interior_faces()) + list(tri.boundary_faces())
    bfaces = list(tri.boundary_faces())
    on_boundary = set()
    for a, f in bfaces:
        for v in face_vertices(f):
            on_boundary.add(verts[(a, v)])
    euler = [0] * nverts
    for a in range(tri.size):
        for v in range(4):
            euler[verts[(a, v)]] += 1
    for item in faces:
        a, f = item[0], item[1]
        for v in face_vertices(f):
            euler[verts[(a, v)]] -= 1
    for ec in edges:
        d, u, w = ec.incidences[0]
        euler[verts[(d, u)]] += 1
        euler[verts[(d, w)]] += 1
    links = [(euler[i], i in on_boundary) for i in range(nverts)]
    for i, (chi, bdy) in enumerate(links):
        want = 1 if bdy else 2
        if chi != want:
            rep = next(k for k, v in verts.items() if v == i)
            raise TriangulationError(
                f"vertex {rep[0]}:{rep[1]} has link with Euler characteristic {chi}"
                f" (expected {'disc' if bdy else 'sphere'})",
                {"vertex": f"{rep[0]}:{rep[1]}"},
            )
    return ValidationReport(
        tetrahedra=tri.size,
        orientable=True,
        orientation=orient,
        vertices=nverts,
        edges=len(edges),
        faces=len(faces),
        boundary_faces=len(bfaces),
        vertex_links=links,
        closed=not bfaces,
    )


# -- dual presentation ---------------------------------------------------------


@dataclass
class DualPresentation:
    """pi_1 from the dual 2-complex: generators are non-tree interior face
    classes, relators are loops around interior edges."""

    tri: Triangulation
    presentation: Presentation
    generator_faces: list  # (tet, face) "from" side of each generator
    letters: dict  # (tet, face) crossing -> signed letter, 0 for tree faces
    path_to: list  # crossings (tet, face) from tetrahedron 0
    relator_edges: list = field(default_factory=list)

    @property
    def names(self) -> list:
        return self.presentation.names

    def letter(self, tet: int, face: int) -> int:
        return self.letters[(tet, face)]

    def reverse_path(self, crossings: list) -> list:
        out = []
        for tet, f in reversed(crossings):
            b, h, _ = self.tri.gluings[tet][f]
            out.append((b, h))
        return out

    def loop_crossings(self, w: Word) -> list:
        """Dual-graph crossings of the loop at tetrahedron 0 representing w."""
        out = []
        for x in w:
            a, f = self.generator_faces[abs(x) - 1]
            b, h, _ = self.tri.gluings[a][f]
            if x < 0:
                a, f, b = b, h, a
            out += self.path_to[a] + [(a, f)] + self.reverse_path(self.path_to[b])
        return out

    def word_of_crossings(self, crossings: list) -> Word:
        return reduce_word(self.letters[c] for c in crossings if self.letters[c])


def fundamental_group(tri: Triangulation) -> DualPresentation:
    n = tri.size
    parent: list = [None] * n
    path_to: list = [None] * n
    path_to[0] = []
    tree = set()
    queue = deque([0])
    while queue:
        a = queue.popleft()
        for f in range(4):
            g = tri.gluings[a][f]
            if g is None:
                continue
            b, h, _ = g
            if path_to[b] is None:
                path_to[b] = path_to[a] + [(a, f)]
                parent[b] = (a, f)
                tree.add((a, f))
                tree.add((b, h))
                queue.append(b)
    if any(p is None for p in path_to):
        raise TriangulationError("triangulation is not connected", {"tetrahedron": path_to.index(None)})
    gens = []
    letters = {}
    for a, f, g in tri.interior_faces():
        if (a, f) in tree:
            letters[(a, f)] = letters[(g[0], g[1])] = 0
            continue
        k = len(gens) + 1
        gens.append((a, f))
        letters[(a, f)] = k
        letters[(g[0], g[1])] = -k
    names = [f"x{i}" for i in range(len(gens))]
    relators = []
    redges = []
    for ec in edge_classes(tri):
        if not ec.interior:
            continue
        w = cyclic_reduce(tuple(letters[c] for c in ec.crossings if letters[c]))
        redges.append(ec.incidences[0])
        if w:
            relators.append(w)
    pres = Presentation(names, relators)
    return DualPresentation(tri, pres, gens, letters, path_to, redges)


# -- homology oracle -------------------------------------------------------------


def boundary_matrices(tri: Triangulation) -> tuple:
    """Integer boundary matrices d1 (V x E) and d2 (E x F) of the cell structure."""
    verts = vertex_classes(tri)
    nverts = max(verts.values()) + 1
    edges = edge_classes(tri)
    edge_of: dict = {}
    for i, ec in enumerate(edges):
        for d, u, w in ec.incidences:
            edge_of[(d, u, w)] = (i, 1)
            edge_of[(d, w, u)] = (i, -1)
    d1 = [[0] * len(edges) for _ in range(nverts)]
    for i, ec in enumerate(edges):
        d, u, w = ec.incidences[0]
        d1[verts[(d, w)]][i] += 1
        d1[verts[(d, u)]][i] -= 1
    faces = [(a, f) for a, f, _ in tri.interior_faces()] + list(tri.boundary_faces())
    d2 = [[0] * len(faces) for _ in range(len(edges))]
    for j, (a, f) in enumerate(faces):
        v0, v1, v2 = face_vertices(f)
        for (u, w), s in (((v1, v2), 1), ((v0, v2), -1), ((v0, v1), 1)):
            i, o = edge_of[(a, u, w)]
            d2[i][j] += s * o
    return d1, d2


def homology_h1(tri: Triangulation) -> tuple[int, list]:
    """(betti_1, torsion) of H_1 via Smith normal form of the boundary maps."""
    from sympy import Matrix
    from sympy.matrices.normalforms import invariant_factors

    d1, d2 = boundary_matrices(tri)
    ne = len(d2)
    r1 = Matrix(d1).rank() if d1 and ne else 0
    if d2 and d2[0]:
        inv = [int(x) for x in invariant_factors(Matrix(d2)) if x != 0]
    else:
        inv = []
    r2 = len(inv)
    betti = ne - r1 - r2
    return betti, sorted(abs(x) for x in inv if abs(x) != 1)


def all_perms4() -> list:
    return list(permutations(range(4)))
