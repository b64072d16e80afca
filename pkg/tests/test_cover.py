import itertools

import pytest

from surfdetect.groups import PermRep, schreier
from surfdetect.manifold.cover import (
    CorollaryError,
    HeightField,
    build_cover,
    corollary_count,
    group_corollary,
    lift_coorientation,
    lift_surface,
    orbit_count,
    parse_perm_file,
    psi_from_surface,
    psi_geometric,
    region_loop_words,
    surface_loop_words,
)
from surfdetect.manifold.normal import is_separating, normal_check
from surfdetect.manifold.triangulation import (
    ParseError,
    fundamental_group,
    homology_h1,
    validate,
)

COVERS = [("solid_torus", "d2"), ("three_torus", "z2"), ("three_torus", "z4"),
          ("handlebody", "d2"), ("handlebody", "d3")]


def brute_orbits(rep, words):
    """Orbit count by closing {0..d-1} under all word permutations to a partition."""
    d = rep.degree
    blocks = [{j} for j in range(d)]
    perms = [rep.word_perm(w) for w in words]
    changed = True
    while changed:
        changed = False
        for b, c in itertools.combinations(range(len(blocks)), 2):
            if any(p[j] in blocks[c] or p[k] == j for p in perms for j in blocks[b] for k in blocks[c]):
                blocks[b] |= blocks[c]
                del blocks[c]
                changed = True
                break
    return len(blocks)


def test_trivial_cover_is_identity(fx):
    f = fx("handlebody")
    dual = fundamental_group(f.tri)
    cov = build_cover(f.tri, PermRep.trivial(dual.presentation.ngens), dual)
    assert cov.tri == f.tri


@pytest.mark.parametrize("name, label", COVERS)
def test_cover_structure(fx, rep_of, name, label):
    f = fx(name)
    rep = rep_of(name, label)
    cov = build_cover(f.tri, rep)
    assert cov.tri.size == rep.degree * f.tri.size
    validate(cov.tri)  # raises when disconnected or non-orientable
    for ntet in range(cov.tri.size):
        tet, sheet = cov.project(ntet)
        for face in range(4):
            g = cov.tri.gluings[ntet][face]
            base = f.tri.gluings[tet][face]
            assert (g is None) == (base is None)
            if g is not None:
                assert cov.project(g[0])[0] == base[0] and g[1:] == base[1:]


def test_double_cover_homology(fx, rep_of):
    # a connected cover of a solid torus is a solid torus
    cov = build_cover(fx("solid_torus").tri, rep_of("solid_torus", "d2"))
    assert homology_h1(cov.tri) == (1, [])
    # three-torus covers are three-tori
    cov = build_cover(fx("three_torus").tri, rep_of("three_torus", "z4"))
    assert homology_h1(cov.tri) == (3, [])


@pytest.mark.parametrize("name, label", COVERS)
def test_lift_multiplies_euler_and_matches_orbits(fx, rep_of, name, label):
    f = fx(name)
    dual = fundamental_group(f.tri)
    rep = rep_of(name, label)
    cov = build_cover(f.tri, rep, dual)
    lifted = lift_surface(cov, f.surface)
    assert lifted.disc_count() == rep.degree * f.surface.disc_count()
    nc = normal_check(cov.tri, lifted)
    assert nc.euler == rep.degree * normal_check(f.tri, f.surface).euler
    (words,) = surface_loop_words(f.tri, dual, f.surface)
    assert nc.count == orbit_count(rep, words) == brute_orbits(rep, words)
    lift_coorientation(cov, f.coor).check(cov.tri, lifted)


def test_parse_perm_file_forms(fx):
    f = fx("solid_torus")
    dual = fundamental_group(f.tri)
    rep = parse_perm_file(f.perms["d2"], dual)
    assert rep.degree == 2 and rep.perms == [(1, 0)]
    hb = fx("handlebody")
    hdual = fundamental_group(hb.tri)
    voltage = parse_perm_file(hb.perms["d2"], hdual)
    assert parse_perm_file(voltage.format(hdual.names), hdual) == voltage
    with pytest.raises(ParseError):
        parse_perm_file("degree 2\nperm 0.0: 2 2\n", hdual)
    with pytest.raises(ParseError):
        parse_perm_file("degree 2\nperm nope: 2 1\n", hdual)


@pytest.mark.parametrize("name", ["solid_torus", "three_torus", "handlebody"])
def test_psi_relators_and_surjectivity(fx, name):
    f = fx(name)
    npsi = psi_from_surface(f.tri, f.surface, f.coor)
    assert npsi.relator_failures == []
    sep, _ = is_separating(f.tri, f.surface)
    assert npsi.surjective() == (not sep)
    rev = psi_from_surface(f.tri, f.surface, f.coor.negated())
    assert rev.values == [-v for v in npsi.values]


def test_meridian_loop_crosses_once(fx):
    f = fx("solid_torus")
    npsi = psi_from_surface(f.tri, f.surface, f.coor)
    assert sorted(abs(v) for v in npsi.values) == [1]


@pytest.mark.parametrize("name, label", COVERS)
def test_geometric_psi_on_cover(fx, rep_of, name, label):
    f = fx(name)
    dual = fundamental_group(f.tri)
    rep = rep_of(name, label)
    cov = build_cover(f.tri, rep, dual)
    hf = HeightField.build(cov, lift_surface(cov, f.surface), lift_coorientation(cov, f.coor))
    c = schreier(dual.presentation, rep)
    psi = psi_geometric(hf, c)
    assert psi.validate(c) == []


def test_corollary_trivial_rep(fx):
    f = fx("handlebody")
    dual = fundamental_group(f.tri)
    rep = corollary_count(f.tri, f.surface, PermRep.trivial(dual.presentation.ngens), dual)
    assert (rep.surface_components, rep.plus_components, rep.minus_components) == (1, 1, 1)
    assert not rep.inequality
    assert rep.nonseparating_component is None


@pytest.mark.parametrize("label, counts", [("d2", (2, 1, 1)), ("d3", (3, 1, 2))])
def test_corollary_handlebody(fx, rep_of, label, counts):
    f = fx("handlebody")
    rep = rep_of("handlebody", label)
    r = corollary_count(f.tri, f.surface, rep)
    assert (r.surface_components, r.plus_components, r.minus_components) == counts
    assert r.inequality and r.nonseparating_component is not None
    assert r.nonseparating_complement == 1
    assert r.orbit_counts == dict(zip(["surface", "plus", "minus"], counts))
    assert r.lift_euler == rep.degree * r.base_euler


def test_group_level_corollary(fx, rep_of):
    f = fx("handlebody")
    dual = fundamental_group(f.tri)
    (s_words,) = surface_loop_words(f.tri, dual, f.surface)
    _, comp = region_loop_words(f.tri, dual, f.surface)
    for label in ("d2", "d3"):
        rep = rep_of("handlebody", label)
        g = group_corollary(rep, s_words, comp[0], comp[1])
        r = corollary_count(f.tri, f.surface, rep, dual)
        assert g["orbit_counts"] == r.orbit_counts
        assert g["inequality_holds"]


def test_corollary_rejects_nonseparating(fx, rep_of):
    f = fx("solid_torus")
    with pytest.raises(CorollaryError):
        corollary_count(f.tri, f.surface, rep_of("solid_torus", "d2"))
