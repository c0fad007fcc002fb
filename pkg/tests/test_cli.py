import json
import math
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spheremaps import documents as docs
from spheremaps.cli import run
from spheremaps.constructions import random_rational_sphere_map, random_sphere_map
from spheremaps.errors import ValidationError
from spheremaps.maps import PolynomialSphereMap, RationalSphereMap, identity_map
from spheremaps.normalform import GParams, JParams, make_G, make_J
from strategies import seeds


def write_map(path, F):
    path.write_text(docs.serialize_map(F))
    return str(path)


def run_json(capsys, argv):
    code = run(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip().startswith("{") else out)


# -- documents ---------------------------------------------------------------


def same_bits(a, b):
    return np.array_equal(np.asarray(a).view(np.uint8), np.asarray(b).view(np.uint8))


@settings(max_examples=60, deadline=None)
@given(seed=seeds, d=st.integers(0, 6), N=st.integers(1, 5), rational=st.booleans())
def test_map_round_trip_bit_exact(seed, d, N, rational):
    if rational and d >= 1 and N >= 1:
        F = random_rational_sphere_map(d, N, seed)
        G = docs.parse_map(docs.serialize_map(F))
        assert same_bits(G.numerator, F.numerator) and same_bits(G.denominator, F.denominator)
    else:
        f = random_sphere_map(d, N, seed)
        g = docs.parse_map(docs.serialize_map(f))
        assert isinstance(g, PolynomialSphereMap)
        assert same_bits(g.coeffs, f.coeffs)


def test_negative_zero_survives():
    f = PolynomialSphereMap(np.array([[complex(-0.0, -0.0), 1.0]]))
    g = docs.parse_map(docs.serialize_map(f))
    assert same_bits(g.coeffs, f.coeffs)


def test_document_layout_is_component_major():
    doc = docs.map_to_document(PolynomialSphereMap.from_components([[0, 1], [0.5]]))
    assert doc["numerator"] == [[[0.0, 0.0], [1.0, 0.0]], [[0.5, 0.0], [0.0, 0.0]]]
    assert "denominator" not in doc


def test_document_errors_name_the_field():
    ragged = {"kind": "polynomial", "target_dim": 2, "numerator": [[[1, 0]], [[0, 0], [1, 0]]]}
    with pytest.raises(ValidationError, match=r"numerator\[1\].*ragged"):
        docs.parse_map_document(ragged)
    with pytest.raises(ValidationError, match="target_dim"):
        docs.parse_map_document({"kind": "polynomial", "target_dim": 3, "numerator": [[[1, 0]]]})
    with pytest.raises(ValidationError, match="denominator"):
        docs.parse_map_document({"kind": "rational", "target_dim": 1, "numerator": [[[1, 0]]]})
    with pytest.raises(ValidationError, match=r"numerator\[0\]\[0\]"):
        docs.parse_map_document({"kind": "polynomial", "target_dim": 1, "numerator": [[[1, 0, 2]]]})
    with pytest.raises(ValidationError, match="line 2 column"):
        docs.loads('{"kind":\n  ]')


def test_dumps_is_deterministic():
    obj = {"x": 0.1, "z": 1 + 2j, "m": np.eye(2)}
    assert docs.dumps(obj) == docs.dumps(obj)
    assert "0.10000000000000001" in docs.dumps(obj)


# -- commands ----------------------------------------------------------------


def test_verify_identity(tmp_path, capsys):
    code, rep = run_json(capsys, ["verify", write_map(tmp_path / "z.json", identity_map(1))])
    assert code == 0 and rep["passed"] and rep["max_residual"] == 0


def test_verify_failure_exit_one(tmp_path, capsys):
    f = PolynomialSphereMap.from_components([[0, 1], [1]])
    code, rep = run_json(capsys, ["verify", write_map(tmp_path / "f.json", f)])
    assert code == 1 and not rep["passed"]


def test_equiv_distinct_j_family(tmp_path, capsys):
    a = write_map(tmp_path / "a.json", make_J(JParams(math.pi / 6, math.pi / 4)))
    b = write_map(tmp_path / "b.json", make_J(JParams(math.pi / 4, math.pi / 6)))
    code, rep = run_json(capsys, ["equiv", a, b])
    assert code == 1 and rep["message"] == "not *-equivalent"


def test_equiv_rotated_copy(tmp_path, capsys):
    f = random_sphere_map(3, 3, 0)
    from spheremaps.maps import rotate_source

    a = write_map(tmp_path / "a.json", f)
    b = write_map(tmp_path / "b.json", rotate_source(f, 1.0))
    code, rep = run_json(capsys, ["equiv", a, b])
    assert code == 0 and rep["witness"]["theta"] == pytest.approx(1.0)


def test_homotopy_csv_grid(tmp_path, capsys):
    j = write_map(tmp_path / "j.json", make_J(JParams(math.pi / 4, math.pi / 4)))
    code = run(["homotopy", j, "--to-identity"])
    lines = capsys.readouterr().out.strip().splitlines()
    assert code == 0
    assert lines[0] == "t,theta,residual"
    assert len(lines) == 1 + 21 * 64
    rows = np.array([[float(x) for x in line.split(",")] for line in lines[1:]])
    assert np.all(rows[:, 2] < 1e-8)
    assert np.all(np.diff(rows[::64, 0]) > 0)  # t is the outer index


def test_homotopy_json_manifest(tmp_path, capsys):
    g = write_map(tmp_path / "g.json", make_G(GParams(0.5, 0.4), 2))
    code, rep = run_json(capsys, ["homotopy", g, "--to-identity", "--format", "json", "--dim", "3"])
    assert code == 0 and rep["depth"] == 1 and rep["target_dim"] == 3
    assert [s["kind"] for s in rep["segments"]] == ["UnitaryPath", "AutomorphismDeformation", "UnitaryPath"]


def test_homotopy_polynomial_flag(tmp_path, capsys):
    f = write_map(tmp_path / "f.json", random_sphere_map(3, 2, 1))
    code, rep = run_json(capsys, ["homotopy", f, "--to-identity", "--polynomial", "--format", "json"])
    assert code == 0 and rep["max_degree"] <= 3


def test_normal_form_and_classify(tmp_path, capsys):
    j = write_map(tmp_path / "j.json", make_J(JParams(0.3, 0.9)))
    code, rep = run_json(capsys, ["normal-form", j])
    assert code == 0 and rep["parameters"]["alpha"][0] == pytest.approx(math.tan(0.3))
    code, rep = run_json(capsys, ["classify", j])
    assert code == 0 and rep["family"] == "J"
    assert rep["parameters"]["alpha"] == pytest.approx(0.3)


def test_sample_reduce_gram_moduli(tmp_path, capsys):
    out = tmp_path / "s.json"
    assert run(["sample", "--degree", "3", "--dim", "4", "--seed", "7", "--output", str(out)]) == 0
    assert docs.parse_map(out.read_text()).degree == 3
    code, rep = run_json(capsys, ["gram", str(out)])
    assert code == 0 and len(rep["gram"]) == 4
    code, rep = run_json(capsys, ["moduli-dim", "--degree", "2", "--seed", "3"])
    assert code == 0 and rep["rank"] == 5 and rep["dimension"] == 4
    num = np.array([[0, 0], [0, 1], [1, 0]], dtype=complex)
    code, doc = run_json(capsys, ["reduce", write_map(tmp_path / "r.json", RationalSphereMap(num, [0, 1]))])
    assert code == 0 and doc["kind"] == "polynomial"


def test_demo_nonalgebraic(capsys):
    code, rep = run_json(capsys, ["demo-nonalgebraic", "--order", "16", "--tol", "1e-6"])
    assert code == 0 and rep["sup_residual"] < 1e-6


def test_usage_errors_exit_two(tmp_path, capsys):
    assert run([]) == 2
    assert run(["verify"]) == 2
    assert run(["verify", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "polynomial", "target_dim": 1,\n "numerator": [[[1, 0], [0]]]}')
    assert run(["verify", str(bad)]) == 2
    err = capsys.readouterr().err
    assert "numerator[0][1]" in err
    bad.write_text('{"kind": "polynomial",\n,}')
    assert run(["verify", str(bad)]) == 2
    assert "line 2 column 1" in capsys.readouterr().err
    assert run(["sample"]) == 2


def test_env_tolerance_and_flag_precedence(tmp_path, capsys, monkeypatch):
    f = PolynomialSphereMap(np.array([[0.0], [1.0 + 1e-7]]))
    path = write_map(tmp_path / "f.json", f)
    assert run(["verify", path]) == 1
    monkeypatch.setenv("SPHEREMAP_TOL", "1e-6")
    assert run(["verify", path]) == 0
    assert run(["verify", path, "--tol", "1e-9"]) == 1
    monkeypatch.setenv("SPHEREMAP_TOL", "oops")
    assert run(["verify", path]) == 2
    capsys.readouterr()


def test_reports_are_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        assert run(["sample", "--degree", "4", "--dim", "3", "--seed", "11", "--output", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()
    ra, rb = tmp_path / "ra.json", tmp_path / "rb.json"
    for out in (ra, rb):
        assert run(["normal-form", str(a), "--output", str(out)]) == 0
    assert ra.read_bytes() == rb.read_bytes()


def test_module_entry_point(tmp_path):
    path = write_map(tmp_path / "z.json", identity_map(2))
    proc = subprocess.run([sys.executable, "-m", "spheremaps", "verify", path], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["passed"] is True
