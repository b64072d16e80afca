import json

import pytest

from surfdetect import fixtures
from surfdetect.cli import main
from surfdetect.manifold.triangulation import Triangulation


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_shipped_data_is_current(tmp_path, data_dir):
    for p in fixtures.write_all(tmp_path):
        assert p.read_bytes() == (data_dir / p.name).read_bytes(), p.name


@pytest.mark.parametrize("name", ["solid_torus", "three_torus", "handlebody", "ball", "sphere"])
def test_validate_fixtures(capsys, data_dir, name):
    code, rep = run(capsys, "validate", data_dir / f"{name}.tri")
    assert code == 0 and rep["pass"]
    assert rep["schema"] == "surfdetect.report/1"


def test_validate_with_surface(capsys, data_dir):
    code, rep = run(capsys, "validate", data_dir / "handlebody.tri", "--surface", data_dir / "handlebody.surf",
                    "--coor", data_dir / "handlebody.coor")
    assert code == 0


def test_cover_writes_triangulation(capsys, tmp_path, data_dir):
    out = tmp_path / "cover.tri"
    code, rep = run(capsys, "cover", data_dir / "solid_torus.tri", "--perm", data_dir / "solid_torus.d2.perm",
                    "--surface", data_dir / "solid_torus.surf", "--output", out)
    assert code == 0
    assert Triangulation.from_text(out.read_text()).size == 18


@pytest.mark.parametrize("perm", ["handlebody.d2.perm", "handlebody.d3.perm", "handlebody.d2.gens.perm"])
def test_corollary(capsys, data_dir, perm):
    code, rep = run(capsys, "corollary", data_dir / "handlebody.tri", "--surface", data_dir / "handlebody.surf",
                    "--perm", data_dir / perm)
    assert code == 0 and rep["pass"]


def test_corollary_group_mode(capsys, data_dir):
    code, rep = run(capsys, "corollary", "--presentation", data_dir / "handlebody.pres",
                    "--subgroups", data_dir / "handlebody.sub", "--perm", data_dir / "handlebody.d2.gens.perm")
    assert code == 0 and rep["pass"]


@pytest.mark.parametrize(
    "name, perm",
    [("solid_torus", None), ("solid_torus", "d2"), ("three_torus", "z2"), ("handlebody", "d2"), ("handlebody", "d3")],
)
def test_detect(capsys, data_dir, name, perm):
    args = ["detect", data_dir / f"{name}.tri", "--surface", data_dir / f"{name}.surf",
            "--coor", data_dir / f"{name}.coor"]
    if perm:
        args += ["--perm", data_dir / f"{name}.{perm}.perm"]
    code, rep = run(capsys, *args)
    assert code == 0, rep
    assert rep["dual_equals_two_copies"] is True
    assert rep["schema"] == "surfdetect.detect/1"


def test_detect_is_deterministic(tmp_path, data_dir):
    paths = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        args = ["detect", data_dir / "handlebody.tri", "--surface", data_dir / "handlebody.surf",
                "--perm", data_dir / "handlebody.d2.perm", "--samples", "20", "--seed", "4", "--report", out]
        assert main([str(a) for a in args]) == 0
        paths.append(out)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_detect_corrupted_psi(capsys, tmp_path, data_dir):
    base = ["detect", data_dir / "solid_torus.tri", "--surface", data_dir / "solid_torus.surf",
            "--perm", data_dir / "solid_torus.d2.perm"]
    dump = tmp_path / "psi.txt"
    assert run(capsys, *base, "--dump-psi", dump)[0] == 0
    lines = dump.read_text().splitlines()
    k = next(i for i, ln in enumerate(lines[1:], 1) if ln.split()[1] != "0")
    name, val = lines[k].split()
    lines[k] = f"{name} {int(val) + 1}"
    dump.write_text("\n".join(lines) + "\n")
    code, rep = run(capsys, *base, "--psi", dump)
    assert code == 2
    assert rep["equivariance"]["witness"]["word"]


def test_character(capsys, data_dir):
    code, rep = run(capsys, "character", data_dir / "solid_torus.tri", "--surface", data_dir / "solid_torus.surf",
                    "--word", "x0 x0")
    assert code == 0
    assert any(r["trace"] == "z^-2 + z^2" for r in rep["traces"])


def test_building_queries(capsys):
    assert run(capsys, "building", "dist", "diag:1,-1", "diag:2,-2")[1]["distance"] == 2
    code, rep = run(capsys, "building", "adjacent", "diag:0,-1", "diag:1,-1")
    assert code == 0 and rep["adjacent"] is True
    assert run(capsys, "building", "type", "t, 0; 0, 1")[1]["type"] == 1


def test_input_errors_exit_1(capsys, tmp_path, data_dir):
    assert run(capsys, "validate", tmp_path / "missing.tri")[0] == 1
    bad = tmp_path / "bad.tri"
    bad.write_text("tri v1\ntet 1\nnonsense\n")
    assert run(capsys, "validate", bad)[0] == 1
    assert run(capsys, "building", "dist", "1, 1; 1, 1", "diag:0,0")[0] == 1


def test_broken_gluing_exit_2(capsys, tmp_path, data_dir):
    tri = Triangulation.from_text((data_dir / "solid_torus.tri").read_text())
    lines = tri.to_text(both_sides=True).splitlines()
    i = next(i for i, ln in enumerate(lines) if ln.startswith("glue 5.3"))
    head, imgs = lines[i].rsplit(" ", 1)
    lines[i] = f"{head} {imgs[1]}{imgs[0]}{imgs[2]}"
    bad = tmp_path / "broken.tri"
    bad.write_text("\n".join(lines) + "\n")
    code, rep = run(capsys, "validate", bad)
    assert code == 2
    assert rep["witness"]


def test_separating_surface_detect_exit_2(capsys, data_dir):
    code, rep = run(capsys, "detect", data_dir / "handlebody.tri", "--surface", data_dir / "handlebody.surf")
    assert code == 2 and rep["witness"]
