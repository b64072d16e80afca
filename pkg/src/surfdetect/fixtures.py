"""Small triangulated manifolds with normal surfaces, used by the tests and
shipped as data files.

Every builder returns a :class:`Fixture`; ``write_fixture`` dumps it in the
text formats read by the command line tool.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from pathlib import Path
from typing import Optional

from .manifold.normal import Coorientation, NormalSurface
from .manifold.triangulation import (
    Triangulation,
    TriangulationError,
    face_vertices,
    homology_h1,
    perm_inv,
    validate,
)

DATA_DIR = Path(__file__).parent / "data"


@dataclass
class Fixture:
    name: str
    tri: Triangulation
    surface: Optional[NormalSurface] = None
    coor: Optional[Coorientation] = None
    perms: dict = field(default_factory=dict)  # label -> perm file text
    notes: str = ""


def from_simplices(simplices: list) -> Triangulation:
    """Glue tetrahedra given by vertex labels along faces with equal label sets."""
    faces: dict = {}
    for tet, labels in enumerate(simplices):
        if len(set(labels)) != 4:
            raise ValueError(f"tetrahedron {tet} has repeated labels {labels}")
        for f in range(4):
            key = frozenset(labels[v] for v in face_vertices(f))
            faces.setdefault(key, []).append((tet, f))
    gluings: list = [[None] * 4 for _ in simplices]
    for key, sides in faces.items():
        if len(sides) > 2:
            raise ValueError(f"face {sorted(key)} shared by {len(sides)} tetrahedra")
        if len(sides) == 2:
            (a, f), (b, g) = sides
            la, lb = simplices[a], simplices[b]
            perm = [0] * 4
            for v in range(4):
                perm[v] = lb.index(la[v]) if v != f else g
            gluings[a][f] = (b, g, tuple(perm))
            gluings[b][g] = (a, f, perm_inv(perm))
    return Triangulation(gluings)


def _disc_surface(n: int, discs: dict) -> tuple[NormalSurface, Coorientation]:
    """Surface with one disc per listed tetrahedron: {tet: (kind, sign)}."""
    coords = []
    signs = {}
    for tet in range(n):
        c = [0] * 7
        if tet in discs:
            kind, sign = discs[tet]
            c[kind] = 1
            signs[(tet, kind, 0)] = sign
        coords.append(tuple(c))
    return NormalSurface(coords), Coorientation(signs)


def _prism(bottom: tuple, top: tuple) -> list:
    a0, b0, c0 = bottom
    a1, b1, c1 = top
    return [(a0, b0, c0, a1), (b0, c0, a1, b1), (c0, a1, b1, c1)]


# prism cross-section separating bottom from top, + side towards the top
_PRISM_DISC = ((3, 1), (4, -1), (0, -1))


def solid_torus_simplices(tag: str = "", levels: int = 3, twist: int = 0) -> list:
    """Triangle x circle as ``levels`` stacked prisms; the top of the last
    prism is glued to the bottom with the triangle rotated ``twist`` steps."""
    tri = []
    for k in range(levels):
        bottom = tuple(f"{tag}{x}{k}" for x in "abc")
        if k + 1 < levels:
            top = tuple(f"{tag}{x}{k + 1}" for x in "abc")
        else:
            names = [f"{tag}{x}0" for x in "abc"]
            top = tuple(names[(i + twist) % 3] for i in range(3))
        tri += _prism(bottom, top)
    return tri


def solid_torus(twist: int = 0) -> Fixture:
    """Solid torus with a meridian disc crossing prism 1 (non-separating)."""
    simp = solid_torus_simplices(twist=twist)
    tri = from_simplices(simp)
    discs = {3 + i: d for i, d in enumerate(_PRISM_DISC)}
    s, coor = _disc_surface(tri.size, discs)
    perms = {"d2": "degree 2\nperm x0: 2 1\n"}
    return Fixture("solid_torus", tri, s, coor, perms, "meridian disc, pi_1 = Z")


# -- the 3-torus ---------------------------------------------------------------


def _kuhn_index() -> list:
    return list(permutations(range(3)))


def three_torus() -> Fixture:
    """Six-tetrahedron cube with opposite faces glued, horizontal torus fibre.

    Tetrahedron (a, b, c) has vertices 0, e_a, e_a + e_b, e_a + e_b + e_c.
    """
    order = _kuhn_index()
    idx = {p: i for i, p in enumerate(order)}
    gl: list = [[None] * 4 for _ in order]
    ident = (0, 1, 2, 3)
    for p in order:
        a, b, c = p
        i = idx[p]
        gl[i][1] = (idx[(b, a, c)], 1, ident)
        gl[i][2] = (idx[(a, c, b)], 2, ident)
        # face 0 (x_a = 1) translated by -e_a is face 3 of (b, c, a)
        j = idx[(b, c, a)]
        gl[i][0] = (j, 3, (3, 0, 1, 2))
        gl[j][3] = (i, 0, perm_inv((3, 0, 1, 2)))
    tri = Triangulation(gl)
    discs = {}
    for p in order:
        k = p.index(2) + 1  # vertices v_k.. have z = 1
        discs[idx[p]] = {1: (0, -1), 2: (4, -1), 3: (3, 1)}[k]
    s, coor = _disc_surface(tri.size, discs)
    z_faces = [idx[p] for p in order if p[0] == 2]
    perms = {}
    for d in (2, 4):
        cyc = " ".join(str((j + 1) % d + 1) for j in range(d))
        perms[f"z{d}"] = f"degree {d}\n" + "".join(f"perm {t}.0: {cyc}\n" for t in z_faces)
    return Fixture("three_torus", tri, s, coor, perms, "horizontal torus, pi_1 = Z^3")


# -- genus two handlebody -----------------------------------------------------------


def handlebody() -> Fixture:
    """Two solid tori joined by a one-prism tube; the tube's cross-section is
    a separating disc."""
    left = solid_torus_simplices("L")
    right = solid_torus_simplices("R")
    for top in (("Ra0", "Rb0", "Ra1"), ("Rb0", "Ra0", "Ra1")):
        tube = _prism(("La0", "Lb0", "La1"), top)
        simp = left + right + tube
        tri = from_simplices(simp)
        try:
            validate(tri)
        except TriangulationError:
            continue
        break
    else:  # pragma: no cover - construction is fixed
        raise AssertionError("no orientable tube gluing")
    base = len(left) + len(right)
    discs = {base + i: d for i, d in enumerate(_PRISM_DISC)}
    s, coor = _disc_surface(tri.size, discs)
    # the closing faces of each solid torus (top of its last prism)
    perms = {}
    for name, imgs in (("d2", ("2 1", "2 1")), ("d3", ("2 3 1", "2 1 3"))):
        deg = len(imgs[0].split())
        lines = [f"degree {deg}"]
        for tag, img in zip("LR", imgs):
            tet, face = _closing_face(simp, tag)
            lines.append(f"perm {tet}.{face}: {img}")
        perms[name] = "\n".join(lines) + "\n"
    return Fixture("handlebody", tri, s, coor, perms, "genus two handlebody, separating disc")


def _closing_face(simp: list, tag: str) -> tuple[int, int]:
    """A face where the last prism of a solid torus meets level 0."""
    for tet, labels in enumerate(simp):
        if labels == (f"{tag}c2", f"{tag}a0", f"{tag}b0", f"{tag}c0"):
            return tet, 0
    raise AssertionError(tag)


def ball() -> Fixture:
    tri = Triangulation([[None] * 4])
    return Fixture("ball", tri, NormalSurface.empty(1), None, {}, "one tetrahedron, all faces boundary")


def one_tet_sphere() -> Fixture:
    """A closed one-tetrahedron triangulation of the 3-sphere (found by search)."""
    tri = _search_one_tet_sphere()
    return Fixture("sphere", tri, None, None, {}, "closed, simply connected")


def _search_one_tet_sphere() -> Triangulation:
    pairings = [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))]
    perms = list(permutations(range(4)))
    for pairing in pairings:
        (f1, g1), (f2, g2) = pairing
        for p1 in perms:
            if p1[f1] != g1:
                continue
            for p2 in perms:
                if p2[f2] != g2:
                    continue
                gl = [[None] * 4]
                gl[0][f1] = (0, g1, p1)
                gl[0][g1] = (0, f1, perm_inv(p1))
                gl[0][f2] = (0, g2, p2)
                gl[0][g2] = (0, f2, perm_inv(p2))
                tri = Triangulation(gl)
                try:
                    rep = validate(tri)
                except TriangulationError:
                    continue
                # the closed orientable one-tetrahedron manifolds are S^3,
                # L(4,1) and L(5,2); trivial homology singles out S^3
                if rep.closed and homology_h1(tri) == (0, []):
                    return tri
    raise AssertionError("no one-tetrahedron sphere found")  # pragma: no cover


ALL = {
    "solid_torus": solid_torus,
    "three_torus": three_torus,
    "handlebody": handlebody,
    "ball": ball,
    "sphere": one_tet_sphere,
}


def load(name: str) -> Fixture:
    return ALL[name]()


def write_fixture(fx: Fixture, directory: Path) -> list:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    p = directory / f"{fx.name}.tri"
    p.write_text(fx.tri.to_text())
    written.append(p)
    if fx.surface is not None:
        p = directory / f"{fx.name}.surf"
        p.write_text(fx.surface.to_text())
        written.append(p)
    if fx.coor is not None and fx.surface is not None:
        p = directory / f"{fx.name}.coor"
        p.write_text(fx.coor.to_text(fx.surface))
        written.append(p)
    for label, text in fx.perms.items():
        p = directory / f"{fx.name}.{label}.perm"
        p.write_text(text)
        written.append(p)
    return written


def fixture_path(name: str) -> Path:
    return DATA_DIR / name


def write_all(directory: Path = DATA_DIR) -> list:
    """Regenerate every shipped data file."""
    from .manifold.cover import parse_perm_file, region_loop_words, surface_loop_words
    from .manifold.normal import vertex_link
    from .manifold.triangulation import fundamental_group
    from .groups import format_word

    written = []
    for name in ALL:
        written += write_fixture(load(name), directory)
    sphere = load("sphere")
    p = Path(directory) / "sphere.link.surf"
    p.write_text(vertex_link(sphere.tri, 0).to_text())
    written.append(p)
    # group-level input for the separating-disc count
    hb = load("handlebody")
    dual = fundamental_group(hb.tri)
    p = Path(directory) / "handlebody.pres"
    p.write_text(dual.presentation.format())
    written.append(p)
    (s_words,) = surface_loop_words(hb.tri, dual, hb.surface)
    _, comp_words = region_loop_words(hb.tri, dual, hb.surface)
    lines = [
        "surface: " + ", ".join(format_word(w, dual.names) for w in s_words),
        "plus: " + ", ".join(format_word(w, dual.names) for w in comp_words[0]),
        "minus: " + ", ".join(format_word(w, dual.names) for w in comp_words[1]),
    ]
    p = Path(directory) / "handlebody.sub"
    p.write_text("\n".join(lines) + "\n")
    written.append(p)
    rep = parse_perm_file(hb.perms["d2"], dual)
    p = Path(directory) / "handlebody.d2.gens.perm"
    p.write_text(rep.format(dual.names))
    written.append(p)
    return written


if __name__ == "__main__":  # pragma: no cover
    for path in write_all():
        print(path)
