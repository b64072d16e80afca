"""Acceptance criteria, one test each.  Every test records its outcome and
runtime in ``conftest.ACCEPTANCE_RESULTS``; the summary hook prints one line
per criterion."""

import itertools
import json
import random
import time
from collections import deque
from contextlib import contextmanager

from conftest import ACCEPTANCE_RESULTS

from surfdetect import building
from surfdetect.building import (
    DiagonalClass,
    LatticeBasis,
    adjacent,
    graph_distance,
    standard_lambda,
    standard_lambda_prime,
)
from surfdetect.cli import main
from surfdetect.detect import Pipeline, character_report, check_equivariance, check_tet_images, extract_dual_surface
from surfdetect.funcfield import ZERO, monomial
from surfdetect.groups import PermRep, abelianization, induced_rep, matrix_trace, monomial_to_matrix, schreier, trace_poly
from surfdetect.manifold.cover import corollary_count, lift_coorientation, psi_from_surface
from surfdetect.manifold.normal import Coorientation, cut
from surfdetect.manifold.triangulation import Triangulation, fundamental_group, homology_h1


@contextmanager
def criterion(n, limit):
    info = {"detail": ""}
    start = time.perf_counter()
    ok = False
    try:
        yield info
        ok = True
    finally:
        secs = time.perf_counter() - start
        ok = ok and secs < limit
        ACCEPTANCE_RESULTS[n] = (ok, secs, info["detail"])
        print(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({secs:.2f} s, limit {limit} s) {info['detail']}")
    assert secs < limit, f"criterion {n} took {secs:.2f} s (limit {limit} s)"


def apartment_bfs(n, radius):
    """Distances from the origin class in the apartment graph, by BFS."""
    def norm(v):
        lo = min(v)
        return tuple(x - lo for x in v)

    steps = [s for s in itertools.product((0, 1), repeat=n) if 0 < sum(s) < n]
    dist = {norm((0,) * n): 0}
    queue = deque(dist)
    while queue:
        v = queue.popleft()
        if dist[v] == radius:
            continue
        for s in steps:
            for sign in (1, -1):
                w = norm(tuple(a + sign * b for a, b in zip(v, s)))
                if w not in dist:
                    dist[w] = dist[v] + 1
                    queue.append(w)
    return dist


def test_criterion_1_building_distance():
    with criterion(1, 10) as info:
        pairs = 0
        for n in (2, 3, 4):
            bfs = apartment_bfs(n, 6)
            vecs = list(itertools.product(range(4), repeat=n))
            classes = sorted({DiagonalClass(v).exponents for v in vecs})
            bases = {c: LatticeBasis.diagonal(c) for c in classes}
            for a in vecs:
                for b in vecs:
                    diff = tuple(y - x for x, y in zip(a, b))
                    lo = min(diff)
                    want = bfs[tuple(x - lo for x in diff)]
                    assert graph_distance(DiagonalClass(a), DiagonalClass(b)) == want
                    pairs += 1
            # every class pair again through the general invariant-factor route
            for a, b in itertools.product(classes, repeat=2):
                diff = tuple(y - x for x, y in zip(a, b))
                lo = min(diff)
                assert graph_distance(bases[a], bases[b]) == bfs[tuple(x - lo for x in diff)]
        info["detail"] = f"{pairs} vector pairs agree with apartment BFS"


def test_criterion_2_flags():
    with criterion(2, 1) as info:
        for n in range(-3, 4):
            lp, ln, ln1 = standard_lambda_prime(n), standard_lambda(n), standard_lambda(n + 1)
            assert adjacent(lp, ln) and adjacent(lp, ln1)
            assert graph_distance(ln, ln1) == 2
            t_lp = lp.scaled(1)
            assert building.strictly_contains(lp, ln1) and building.strictly_contains(ln1, t_lp)
            assert building.strictly_contains(lp, ln) and building.strictly_contains(ln, t_lp)
        info["detail"] = "n = -3..3"


def test_criterion_3_trace_oracle(fx, rep_of):
    cases = [("solid_torus", None), ("solid_torus", "d2"), ("three_torus", None), ("three_torus", "z2"),
             ("three_torus", "z4"), ("handlebody", "d2"), ("handlebody", "d3")]
    with criterion(3, 5) as info:
        total = 0
        for name, label in cases:
            f = fx(name)
            dual = fundamental_group(f.tri)
            rep = rep_of(name, label) if label else PermRep.trivial(dual.presentation.ngens)
            assert rep.degree <= 4
            c = schreier(dual.presentation, rep)
            psi = Pipeline.prepare(f.tri, f.surface, f.coor, rep).psi
            rng = random.Random(f"{name}-{label}")
            n = dual.presentation.ngens
            for _ in range(200):
                w = tuple(rng.choice([1, -1]) * rng.randint(1, n) for _ in range(rng.randint(0, 12)))
                m = induced_rep(w, c, psi)
                poly = sum((monomial(k, v) for k, v in trace_poly(m).items()), ZERO)
                assert matrix_trace(monomial_to_matrix(m)) == poly
                total += 1
        info["detail"] = f"{total} words over {len(cases)} groups"


def _pipeline_checks(p, surface):
    eq = check_equivariance(p)
    assert eq["pass"], eq
    assert eq["checked"] == p.dual.presentation.ngens * p.tri.size * 4
    cls = check_tet_images(p)
    assert cls["pass"], cls.get("witness")
    for row in cls["tetrahedra"]:
        assert row["classes"] == 1 or (row["classes"] == 2 and row["distance"] == 2)
    assert extract_dual_surface(p, cls).coords == surface.scaled(2).coords
    return eq, cls


def test_criterion_4_classical_case(fx):
    with criterion(4, 10) as info:
        f = fx("solid_torus")
        p = Pipeline.prepare(f.tri, f.surface, f.coor)
        assert p.degree == 1
        eq, cls = _pipeline_checks(p, f.surface)
        info["detail"] = f"{eq['checked']} corner checks, {f.tri.size} tetrahedra"


def test_criterion_5_covering_case(fx, rep_of):
    with criterion(5, 30) as info:
        f = fx("handlebody")
        assert cut(f.tri, f.surface).components == 2
        p = Pipeline.prepare(f.tri, f.surface, f.coor, rep_of("handlebody", "d2"))
        assert 2 * p.degree == 4
        eq, cls = _pipeline_checks(p, f.surface)
        ch = character_report(p)
        assert ch["min_valuation"] <= -1
        assert ch["all_symmetric"] and ch["all_rewrite_in_w"] and ch["pass"]
        info["detail"] = f"4-dim rep, min valuation {ch['min_valuation']}, {len(ch['traces'])} traces"


def test_criterion_6_corollary(fx, rep_of):
    with criterion(6, 5) as info:
        f = fx("handlebody")
        r = corollary_count(f.tri, f.surface, rep_of("handlebody", "d2"))
        assert r.surface_components >= r.plus_components + r.minus_components
        assert r.nonseparating_component is not None and r.nonseparating_complement == 1
        info["detail"] = f"{r.surface_components} >= {r.plus_components} + {r.minus_components}"


def test_criterion_7_psi_and_homology(fx, rep_of):
    with criterion(7, 5) as info:
        for name in ("solid_torus", "three_torus"):
            f = fx(name)
            npsi = psi_from_surface(f.tri, f.surface, f.coor)
            assert npsi.relator_failures == [] and npsi.surjective()
        f = fx("handlebody")
        p = Pipeline.prepare(f.tri, f.surface, f.coor, rep_of("handlebody", "d2"))
        npsi = psi_from_surface(p.cover.tri, p.lift, _lift_coor(p))
        assert npsi.relator_failures == [] and npsi.surjective()
        for name in ("solid_torus", "three_torus", "handlebody", "ball", "sphere"):
            tri = fx(name).tri
            assert abelianization(fundamental_group(tri).presentation) == homology_h1(tri)
        info["detail"] = "3 non-separating surfaces, 5 homology checks"


def _lift_coor(p):
    signs = lift_coorientation(p.cover, p.coor).signs
    return Coorientation({d: e for d, e in signs.items() if p.lift.coords[d[0]][d[1]]})


def test_criterion_8_negative_controls(tmp_path, data_dir, capsys):
    with criterion(8, 5) as info:
        base = ["detect", data_dir / "handlebody.tri", "--surface", data_dir / "handlebody.surf",
                "--perm", data_dir / "handlebody.d2.perm"]
        dump = tmp_path / "psi.txt"
        assert main([str(a) for a in base + ["--dump-psi", dump]]) == 0
        capsys.readouterr()
        lines = dump.read_text().splitlines()
        k = next(i for i, ln in enumerate(lines[1:], 1) if ln.split()[1] != "0")
        name, val = lines[k].split()
        lines[k] = f"{name} {int(val) + 1}"
        dump.write_text("\n".join(lines) + "\n")
        report = tmp_path / "bad_psi.json"
        assert main([str(a) for a in base + ["--psi", dump, "--report", report]]) == 2
        witness = json.loads(report.read_text())["equivariance"]["witness"]
        assert witness["word"] and witness["image_of_corner"] != witness["action_applied"]

        tri = Triangulation.from_text((data_dir / "solid_torus.tri").read_text())
        text = tri.to_text(both_sides=True).splitlines()
        i = next(i for i, ln in enumerate(text) if ln.startswith("glue 5.3"))
        head, imgs = text[i].rsplit(" ", 1)
        text[i] = f"{head} {imgs[1]}{imgs[0]}{imgs[2]}"
        broken = tmp_path / "broken.tri"
        broken.write_text("\n".join(text) + "\n")
        report = tmp_path / "broken.json"
        assert main(["validate", str(broken), "--report", str(report)]) == 2
        glue_witness = json.loads(report.read_text())["witness"]
        assert glue_witness
        info["detail"] = f"psi witness word {witness['word']}, gluing witness {glue_witness}"
