import pytest

from surfdetect import building
from surfdetect.building import graph_distance, homothetic, standard_lambda
from surfdetect.detect import (
    Pipeline,
    PipelineError,
    VertexImage,
    character_report,
    check_equivariance,
    check_tet_images,
    extract_dual_surface,
    primed_lattice,
    run_pipeline,
    stabilizer_probe,
)
from surfdetect.groups import PsiMap
from surfdetect.manifold.normal import NormalSurface, normal_check, positive_side

CASES = [("solid_torus", None), ("solid_torus", "d2"), ("three_torus", None), ("three_torus", "z2"),
         ("three_torus", "z4"), ("handlebody", "d2"), ("handlebody", "d3")]


@pytest.fixture(scope="module")
def pipelines(fx, rep_of):
    cache = {}

    def get(name, label=None, **kw):
        key = (name, label, tuple(sorted(kw.items())))
        if key not in cache:
            f = fx(name)
            rep = rep_of(name, label) if label else None
            cache[key] = Pipeline.prepare(f.tri, f.surface, f.coor, rep, **kw)
        return cache[key]

    return get


def test_vertex_image_basics():
    a = VertexImage((0, 1))
    assert a.exponents == (0, 0, 1, -1)
    assert a.distance(VertexImage((0, 0))) == 2
    assert a.distance(VertexImage((2, 1))) == 4
    # fast path distance against the general building routine
    for h in [(0, 0), (1, -1), (3, 0), (2, 2)]:
        b = VertexImage(h)
        assert a.distance(b) == graph_distance(a.basis(), b.basis())
        assert (a.diagonal_class() == b.diagonal_class()) == homothetic(a.basis(), b.basis())


def test_d1_images_are_standard_lattices():
    for n in range(-3, 4):
        assert homothetic(VertexImage((n,)).basis(), standard_lambda(n))
        lam = primed_lattice(VertexImage((n,)), VertexImage((n + 1,)))
        assert building.strictly_contains(lam, standard_lambda(n))
        assert building.strictly_contains(standard_lambda(n + 1), lam.scaled(1))


@pytest.mark.parametrize("name, label", CASES)
def test_pipeline_passes(pipelines, name, label):
    report = run_pipeline(pipelines(name, label))
    assert report["pass"], report
    assert report["dual_equals_two_copies"]
    assert report["equivariance"]["pass"] and report["classification"]["pass"]


@pytest.mark.parametrize("name, label", [("solid_torus", None), ("handlebody", "d2")])
def test_equivariance_general_crosscheck(pipelines, name, label):
    p = pipelines(name, label)
    assert check_equivariance(p, general=True)["pass"]
    assert check_equivariance(p, words=[()])["pass"]


def test_heights_along_tree_and_across_discs(pipelines, fx):
    p = pipelines("solid_torus")
    f = fx("solid_torus")
    h = p.heights.heights
    for tet in range(f.tri.size):
        plus = positive_side(f.surface, f.coor, tet)
        corners = h[tet][0]
        if not plus:
            assert len(set(corners)) == 1
        else:
            top = max(corners)
            assert {v for v in range(4) if corners[v] == top} == set(plus)
            assert top - min(corners) == 1
    for a, fc, (b, g, perm) in f.tri.interior_faces():
        if p.dual.letters[(a, fc)] == 0:
            for v in range(4):
                if v != fc:
                    assert h[a][0][v] == h[b][0][perm[v]]


def test_meridian_shifts_heights_by_one(pipelines):
    p = pipelines("solid_torus")
    _, off = p.field_.word_offset((1,))
    assert abs(off) == 1
    assert p.psi.values == [off]
    img = p.image_of((1,), 0, 0)
    assert img.heights[0] == p.heights.heights[0][0][0] + off


def test_tet_classification_matches_surface(pipelines, fx):
    for name, label in [("solid_torus", None), ("handlebody", "d2")]:
        p = pipelines(name, label)
        rows = check_tet_images(p)["tetrahedra"]
        f = fx(name)
        for row in rows:
            crossed = bool(f.surface.discs(row["tet"]))
            assert row["classes"] == (2 if crossed else 1)
            if crossed:
                assert row["distance"] == 2 and row["flags"] and row["matches_surface"]
                assert row["distance_general"] == 2


def test_covering_case_crosses_two_cosets(pipelines):
    p = pipelines("handlebody", "d2")
    rows = [r for r in check_tet_images(p)["tetrahedra"] if r["classes"] == 2]
    assert rows and all(r["distance"] == 2 for r in rows)
    assert p.degree == 2


def test_extracted_surface(pipelines, fx):
    p = pipelines("three_torus")
    f = fx("three_torus")
    out = extract_dual_surface(p, check_tet_images(p))
    assert out == f.surface.scaled(2)
    assert normal_check(f.tri, out).count == 2


def test_no_crossing_gives_empty_extraction(pipelines):
    p = pipelines("solid_torus")
    classification = {"tetrahedra": [{"tet": t, "classes": 1} for t in range(p.tri.size)]}
    assert extract_dual_surface(p, classification).is_empty()


def test_character_examples(pipelines):
    p = pipelines("solid_torus")
    rep = character_report(p, words=[(), (1,)])
    rows = {r["word"]: r for r in rep["traces"]}
    assert rows["1"]["trace"] == "2" and rows["1"]["valuation"] == 0
    assert rows["x0"]["trace"] == "z^-1 + z" and rows["x0"]["valuation"] == -1
    assert rep["pass"]
    big = character_report(pipelines("handlebody", "d2"))
    assert big["pass"] and big["min_valuation"] <= -1 and big["degree"] == 4
    assert all(r["symmetric"] and r["w_exact"] for r in big["traces"])


def test_stabilizer_probe(pipelines):
    p = pipelines("solid_torus")
    base = VertexImage((0,))
    assert stabilizer_probe(p, base) == ["x0"]
    assert stabilizer_probe(p, base, words=[()]) == []


def test_zero_psi_degenerate(fx):
    f = fx("solid_torus")
    p = Pipeline.prepare(f.tri, f.surface, f.coor, psi=PsiMap([0]))
    assert stabilizer_probe(p, VertexImage((0,))) == []
    assert not character_report(p)["pass"]
    assert not run_pipeline(p)["pass"]


@pytest.mark.parametrize("name, label", [("solid_torus", None), ("handlebody", "d2"), ("three_torus", "z2")])
def test_corrupted_psi_has_witness(pipelines, fx, rep_of, name, label):
    p = pipelines(name, label)
    f = fx(name)
    for k in p.cosets.nontrivial():
        bad = PsiMap(list(p.psi_geometric.values))
        bad.values[k] += 1
        q = Pipeline.prepare(f.tri, f.surface, f.coor, rep_of(name, label) if label else None, psi=bad)
        eq = check_equivariance(q)
        assert not eq["pass"]
        assert {"word", "corner", "image_of_corner", "action_applied"} <= set(eq["witness"])


def test_reversed_coorientation_negates_psi(fx):
    f = fx("three_torus")
    a = Pipeline.prepare(f.tri, f.surface, f.coor)
    b = Pipeline.prepare(f.tri, f.surface, f.coor.negated())
    assert b.psi.values == [-v for v in a.psi.values]
    assert run_pipeline(b)["pass"]


def test_gauge_changes_preserve_distances(fx):
    f = fx("handlebody")
    from surfdetect.manifold.cover import parse_perm_file
    from surfdetect.manifold.triangulation import fundamental_group

    rep = parse_perm_file(f.perms["d2"], fundamental_group(f.tri))
    a = Pipeline.prepare(f.tri, f.surface, f.coor, rep)
    b = Pipeline.prepare(f.tri, f.surface, f.coor, rep, gauge=(19, 3))
    assert b.heights.f0(19)[3] == VertexImage((0, b.heights.f0(19)[3].heights[1]))
    ia = [img for t in range(f.tri.size) for img in a.heights.f0(t)]
    ib = [img for t in range(f.tri.size) for img in b.heights.f0(t)]
    for x in range(0, len(ia), 7):
        for y in range(0, len(ia), 5):
            assert ia[x].distance(ia[y]) == ib[x].distance(ib[y])
    assert run_pipeline(b)["pass"]


def test_separating_surface_without_good_lift(fx):
    f = fx("handlebody")
    with pytest.raises(PipelineError):
        Pipeline.prepare(f.tri, f.surface, f.coor)


def test_not_pipeline_ready(fx):
    f = fx("solid_torus")
    with pytest.raises(Exception):
        Pipeline.prepare(f.tri, f.surface.scaled(2), None)
    with pytest.raises(PipelineError):
        Pipeline.prepare(f.tri, NormalSurface.empty(f.tri.size), None)
