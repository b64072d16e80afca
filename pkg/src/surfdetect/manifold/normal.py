"""Normal surfaces in standard coordinates, coorientations and cutting.

Per tetrahedron a surface has 7 coordinates: triangles ``t0..t3`` (the
triangle cutting off vertex ``v``) followed by quads ``q0..q2``.  Quad type
``k`` separates the vertex pairs in ``QUAD_PAIRS[k]``; the first pair (the one
containing vertex 0) is called side A.

A disc is named ``(tet, kind, j)``: ``kind < 4`` is a triangle at vertex
``kind`` and ``j`` counts outwards from that vertex; ``kind = 4 + k`` is a quad
of type ``k`` and ``j`` counts from side A.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from typing import Optional

from .triangulation import (
    ParseError,
    Triangulation,
    TriangulationError,
    _UF,
    edge_classes,
    face_vertices,
)

QUAD_PAIRS = (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))

Disc = tuple  # (tet, kind, j)


class NormalSurfaceError(TriangulationError):
    """Matching failure, non-embedded coordinates or one-sidedness."""


def quad_type(u: int, w: int) -> int:
    """The quad type pairing vertex u with vertex w."""
    for k, (p, q) in enumerate(QUAD_PAIRS):
        if {u, w} in ({*p}, {*q}):
            return k
    raise ValueError(f"no quad pairs {u} with {w}")


def on_side_a(k: int, v: int) -> bool:
    return v in QUAD_PAIRS[k][0]


def disc_name(d: Disc) -> str:
    tet, kind, j = d
    body = f"t{kind}" if kind < 4 else f"q{kind - 4}"
    return f"{tet}:{body}#{j}"


@dataclass
class NormalSurface:
    coords: list  # one 7-tuple per tetrahedron

    @property
    def size(self) -> int:
        return len(self.coords)

    @classmethod
    def empty(cls, n: int) -> "NormalSurface":
        return cls([(0,) * 7 for _ in range(n)])

    def __add__(self, other: "NormalSurface") -> "NormalSurface":
        return NormalSurface([tuple(x + y for x, y in zip(a, b)) for a, b in zip(self.coords, other.coords)])

    def scaled(self, k: int) -> "NormalSurface":
        return NormalSurface([tuple(k * x for x in c) for c in self.coords])

    def is_empty(self) -> bool:
        return not any(any(c) for c in self.coords)

    def quad(self, tet: int) -> tuple[int, int]:
        """(type, count) of the quads in ``tet``; type 0 when there are none."""
        c = self.coords[tet]
        for k in range(3):
            if c[4 + k]:
                return k, c[4 + k]
        return 0, 0

    def discs(self, tet: int) -> list:
        c = self.coords[tet]
        out = [(tet, v, j) for v in range(4) for j in range(c[v])]
        k, q = self.quad(tet)
        out += [(tet, 4 + k, j) for j in range(q)]
        return out

    def all_discs(self) -> list:
        return [d for tet in range(self.size) for d in self.discs(tet)]

    def disc_count(self) -> int:
        return sum(sum(c) for c in self.coords)

    def to_text(self) -> str:
        return "surf v1\n" + "".join(" ".join(str(x) for x in c) + "\n" for c in self.coords)

    @classmethod
    def from_text(cls, text: str) -> "NormalSurface":
        lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln]
        if not lines or lines[0] != "surf v1":
            raise ParseError("surface file must start with 'surf v1'")
        coords = []
        for ln in lines[1:]:
            if not re.fullmatch(r"\d+(\s+\d+){6}", ln):
                raise ParseError(f"expected 7 nonnegative integers, got {ln!r}")
            coords.append(tuple(int(x) for x in ln.split()))
        return cls(coords)


# -- local combinatorics -------------------------------------------------------


def arcs_at(c, f: int, v: int) -> int:
    """Number of normal arcs cutting off corner ``v`` of face ``f``."""
    return c[v] + c[4 + quad_type(v, f)]


def arc_owner(tet: int, c, f: int, v: int, p: int) -> Disc:
    """Disc containing arc ``p`` (counted from v) at corner v of face f."""
    tv = c[v]
    if p < tv:
        return (tet, v, p)
    k = quad_type(v, f)
    j = p - tv
    if not on_side_a(k, v):
        j = c[4 + k] - 1 - j
    return (tet, 4 + k, j)


def edge_point_owner(tet: int, c, u: int, w: int, p: int) -> Disc:
    """Disc through normal point ``p`` (counted from u) on edge uw."""
    if p < c[u]:
        return (tet, u, p)
    p -= c[u]
    k = quad_type(u, w)
    sep = [kk for kk in range(3) if kk != k and c[4 + kk]]
    if sep:
        kq = sep[0]
        q = c[4 + kq]
        if p < q:
            return (tet, 4 + kq, p if on_side_a(kq, u) else q - 1 - p)
        p -= q
    return (tet, w, c[w] - 1 - p)


def edge_weight(c, u: int, w: int) -> int:
    k = quad_type(u, w)
    return c[u] + c[w] + sum(c[4 + kk] for kk in range(3) if kk != k)


def reference_side(kind: int) -> tuple:
    """Vertices on the reference (+) side of a disc of this kind."""
    if kind < 4:
        return (kind,)
    return QUAD_PAIRS[kind - 4][0]


def check_embedded(tri: Triangulation, s: NormalSurface) -> None:
    if s.size != tri.size:
        raise NormalSurfaceError(
            f"surface has {s.size} tetrahedra, triangulation has {tri.size}", {"tetrahedra": s.size}
        )
    for tet, c in enumerate(s.coords):
        if len(c) != 7 or any(x < 0 for x in c):
            raise NormalSurfaceError(f"tetrahedron {tet}: bad coordinates {c}", {"tetrahedron": tet})
        if sum(1 for x in c[4:] if x) > 1:
            raise NormalSurfaceError(
                f"tetrahedron {tet}: two quad types, surface is not embedded", {"tetrahedron": tet}
            )


def check_matching(tri: Triangulation, s: NormalSurface) -> None:
    """Raise NormalSurfaceError naming the first face where arcs disagree."""
    check_embedded(tri, s)
    for a, f, (b, g, perm) in tri.interior_faces():
        ca, cb = s.coords[a], s.coords[b]
        for v in face_vertices(f):
            na, nb = arcs_at(ca, f, v), arcs_at(cb, g, perm[v])
            if na != nb:
                raise NormalSurfaceError(
                    f"matching equation fails on face {a}.{f}: {na} arcs at vertex {v}, "
                    f"{nb} on the other side at {b}:{perm[v]}",
                    {"face": f"{a}.{f}", "vertex": v, "arcs": [na, nb]},
                )


def glued_arcs(tri: Triangulation, s: NormalSurface):
    """Yield (disc, disc', c, c', face, face') for each arc on an interior face.

    The signs c, c' tell whether the reference side of each disc contains
    the corner the arc cuts off.
    """
    for a, f, (b, g, perm) in tri.interior_faces():
        ca, cb = s.coords[a], s.coords[b]
        for v in face_vertices(f):
            for p in range(arcs_at(ca, f, v)):
                d1 = arc_owner(a, ca, f, v, p)
                d2 = arc_owner(b, cb, g, perm[v], p)
                c1 = 1 if v in reference_side(d1[1]) else -1
                c2 = 1 if perm[v] in reference_side(d2[1]) else -1
                yield d1, d2, c1, c2, (a, f), (b, g)


# -- components, euler characteristic -----------------------------------------


@dataclass
class ComponentInfo:
    discs: list
    euler: int
    two_sided: bool
    vector: NormalSurface


@dataclass
class NormalCheck:
    euler: int
    components: list  # ComponentInfo, ordered by first disc

    @property
    def count(self) -> int:
        return len(self.components)

    @property
    def orientable(self) -> bool:
        return all(c.two_sided for c in self.components)

    def as_dict(self) -> dict:
        return {
            "euler": self.euler,
            "components": self.count,
            "orientable": self.orientable,
            "per_component": [
                {"euler": c.euler, "two_sided": c.two_sided, "discs": len(c.discs), "vector": [list(v) for v in c.vector.coords]}
                for c in self.components
            ],
        }


def disc_components(tri: Triangulation, s: NormalSurface) -> dict:
    """Disc -> component index (components ordered by smallest disc)."""
    check_matching(tri, s)
    uf = _UF()
    for d in s.all_discs():
        uf.find(d)
    for d1, d2, *_ in glued_arcs(tri, s):
        uf.union(d1, d2)
    roots: dict = {}
    out = {}
    for d in s.all_discs():
        r = uf.find(d)
        out[d] = roots.setdefault(r, len(roots))
    return out


def propagate_coorientation(tri: Triangulation, s: NormalSurface, seeds: Optional[dict] = None) -> Optional[dict]:
    """Consistent signs for every disc, or None when some component is one-sided.

    ``seeds`` fixes the sign of chosen discs; each component without a seed
    starts from +1 on its smallest disc.
    """
    adj: dict = {d: [] for d in s.all_discs()}
    for d1, d2, c1, c2, *_ in glued_arcs(tri, s):
        rel = c1 * c2  # eps2 = eps1 * c1 * c2
        adj[d1].append((d2, rel))
        adj[d2].append((d1, rel))
    signs: dict = {}
    seeds = seeds or {}
    order = sorted(adj, key=lambda d: (d not in seeds, d))
    for start in order:
        if start in signs:
            continue
        signs[start] = seeds.get(start, 1)
        queue = deque([start])
        while queue:
            d = queue.popleft()
            for e, rel in adj[d]:
                want = signs[d] * rel
                if e not in signs:
                    signs[e] = want
                    queue.append(e)
                elif signs[e] != want:
                    return None
    return signs


def normal_check(tri: Triangulation, s: NormalSurface) -> NormalCheck:
    """Euler characteristic, components, sidedness and per-component vectors."""
    comp = disc_components(tri, s)
    ncomp = len(set(comp.values()))
    chi = [0] * ncomp
    for d, i in comp.items():
        chi[i] += 1
    seen_faces = set()
    for tet in range(tri.size):
        c = s.coords[tet]
        for f in range(4):
            g = tri.gluings[tet][f]
            if g is not None:
                if (g[0], g[1]) in seen_faces:
                    continue
                seen_faces.add((tet, f))
            for v in face_vertices(f):
                for p in range(arcs_at(c, f, v)):
                    chi[comp[arc_owner(tet, c, f, v, p)]] -= 1
    for ec in edge_classes(tri):
        tet, u, w = ec.incidences[0]
        c = s.coords[tet]
        for p in range(edge_weight(c, u, w)):
            chi[comp[edge_point_owner(tet, c, u, w, p)]] += 1
    infos = []
    discs_by: list = [[] for _ in range(ncomp)]
    for d in s.all_discs():
        discs_by[comp[d]].append(d)
    for i in range(ncomp):
        vec = [[0] * 7 for _ in range(tri.size)]
        for tet, kind, _ in discs_by[i]:
            vec[tet][kind] += 1
        sub = NormalSurface([tuple(r) for r in vec])
        two = propagate_coorientation(tri, sub) is not None
        infos.append(ComponentInfo(discs_by[i], chi[i], two, sub))
    return NormalCheck(sum(chi), infos)


def component_surfaces(tri: Triangulation, s: NormalSurface) -> list:
    return [c.vector for c in normal_check(tri, s).components]


# -- coorientations ----------------------------------------------------------


@dataclass
class Coorientation:
    """Sign per disc: +1 when the transverse direction points to the
    reference side (the corner vertex for a triangle, side A for a quad)."""

    signs: dict  # disc -> +-1

    def negated(self) -> "Coorientation":
        return Coorientation({d: -e for d, e in self.signs.items()})

    def check(self, tri: Triangulation, s: NormalSurface) -> None:
        for d in s.all_discs():
            if self.signs.get(d) not in (1, -1):
                raise NormalSurfaceError(f"disc {disc_name(d)} has no sign", {"disc": disc_name(d)})
        for d1, d2, c1, c2, *_ in glued_arcs(tri, s):
            if self.signs[d1] * c1 != self.signs[d2] * c2:
                raise NormalSurfaceError(
                    f"coorientation flips between discs {disc_name(d1)} and {disc_name(d2)}",
                    {"discs": [disc_name(d1), disc_name(d2)]},
                )

    def to_text(self, s: NormalSurface) -> str:
        lines = ["coor v1"]
        for tet in range(s.size):
            ds = s.discs(tet)
            lines.append(" ".join(f"{self.signs[d]:+d}" for d in ds) if ds else "0")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, s: NormalSurface) -> "Coorientation":
        lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln]
        if not lines or lines[0] != "coor v1":
            raise ParseError("coorientation file must start with 'coor v1'")
        body = lines[1:]
        if len(body) != s.size:
            raise ParseError(f"coorientation has {len(body)} lines for {s.size} tetrahedra")
        signs = {}
        for tet, ln in enumerate(body):
            ds = s.discs(tet)
            toks = ln.split()
            if not ds:
                if toks != ["0"]:
                    raise ParseError(f"tetrahedron {tet} has no discs, expected '0'")
                continue
            if len(toks) != len(ds) or any(t not in ("+1", "-1", "1") for t in toks):
                raise ParseError(f"tetrahedron {tet}: expected {len(ds)} signs (+1/-1), got {ln!r}")
            for d, tok in zip(ds, toks):
                signs[d] = int(tok)
        return cls(signs)

    @classmethod
    def propagate(cls, tri: Triangulation, s: NormalSurface, seeds: Optional[dict] = None) -> "Coorientation":
        signs = propagate_coorientation(tri, s, seeds)
        if signs is None:
            raise NormalSurfaceError("surface is one-sided; no coorientation exists", {"surface": "one-sided"})
        return cls(signs)


def positive_side(s: NormalSurface, coor: Coorientation, tet: int) -> tuple:
    """Corners on the + side of the single disc in ``tet`` (empty if none)."""
    ds = s.discs(tet)
    if not ds:
        return ()
    (d,) = ds
    ref = reference_side(d[1])
    if coor.signs[d] > 0:
        return ref
    return tuple(v for v in range(4) if v not in ref)


# -- hypotheses and cutting ----------------------------------------------------


def pipeline_ready(tri: Triangulation, s: NormalSurface) -> None:
    """At most one disc in every tetrahedron (raises naming the first offender)."""
    check_matching(tri, s)
    for tet, c in enumerate(s.coords):
        if sum(c) > 1:
            raise NormalSurfaceError(
                f"tetrahedron {tet} meets the surface in {sum(c)} discs", {"tetrahedron": tet}
            )


def tet_regions(tet: int, c) -> list:
    _, q = _quad(c)
    out = [(tet, "V", v, j) for v in range(4) for j in range(c[v])]
    out += [(tet, "Z", j) for j in range(q + 1)]
    return out


def _quad(c) -> tuple[int, int]:
    for kk in range(3):
        if c[4 + kk]:
            return kk, c[4 + kk]
    return 0, 0


def face_region(tet: int, c, f: int, v: Optional[int], p: int = 0):
    """Tetrahedron region containing a region of face f.

    ``v is None`` selects the central region of the face; otherwise the
    region between arcs p-1 and p at corner v.
    """
    k, q = _quad(c)
    if v is None:
        if q == 0:
            return (tet, "Z", 0)
        (partner,) = [u for u in face_vertices(f) if quad_type(u, f) == k]
        return (tet, "Z", q if on_side_a(k, partner) else 0)
    if p < c[v]:
        return (tet, "V", v, p)
    j = p - c[v]
    return (tet, "Z", j if on_side_a(k, v) else q - j)


@dataclass
class CutResult:
    components: int
    labels: dict  # region -> component index


def cut(tri: Triangulation, s: NormalSurface) -> CutResult:
    """Components of the complement of s, by gluing tetrahedron chunks."""
    check_matching(tri, s)
    uf = _UF()
    for tet in range(tri.size):
        for r in tet_regions(tet, s.coords[tet]):
            uf.find(r)
    for a, f, (b, g, perm) in tri.interior_faces():
        ca, cb = s.coords[a], s.coords[b]
        uf.union(face_region(a, ca, f, None), face_region(b, cb, g, None))
        for v in face_vertices(f):
            for p in range(arcs_at(ca, f, v)):
                uf.union(face_region(a, ca, f, v, p), face_region(b, cb, g, perm[v], p))
    roots: dict = {}
    labels = {}
    for tet in range(tri.size):
        for r in tet_regions(tet, s.coords[tet]):
            labels[r] = roots.setdefault(uf.find(r), len(roots))
    return CutResult(len(roots), labels)


def is_separating(tri: Triangulation, s: NormalSurface) -> tuple[bool, int]:
    """(separating, number of complement components)."""
    n = cut(tri, s).components
    return n >= 2, n


def disc_sides(s: NormalSurface, d: Disc) -> tuple:
    """The two tetrahedron regions adjacent to a disc: (reference side, other)."""
    tet, kind, j = d
    c = s.coords[tet]
    if kind < 4:
        inner = (tet, "V", kind, j)
        if j + 1 < c[kind]:
            outer = (tet, "V", kind, j + 1)
        else:
            k, q = _quad(c)
            outer = (tet, "Z", 0 if (q == 0 or on_side_a(k, kind)) else q)
        return inner, outer
    return (tet, "Z", j), (tet, "Z", j + 1)


def vertex_link(tri: Triangulation, vertex: int) -> NormalSurface:
    from .triangulation import vertex_classes

    verts = vertex_classes(tri)
    coords = []
    for tet in range(tri.size):
        coords.append(tuple(1 if verts[(tet, v)] == vertex else 0 for v in range(4)) + (0, 0, 0))
    return NormalSurface(coords)
