import json

import numpy as np
import pytest

from wilsonlab import grid, serialize, sympl, synth
from wilsonlab import groups as grp
from wilsonlab.errors import BadParameters, DimensionMismatch


@pytest.mark.parametrize("dims", [(1, 4, 8), (2, 2, 4)])
def test_signal_roundtrips(tmp_path, dims):
    spec = grid.make_grid(*dims)
    f = grid.random_signal(spec, 0)
    serialize.write_signal_csv(f, tmp_path / "f.csv")
    assert np.array_equal(serialize.read_signal(tmp_path / "f.csv").values, f.values)
    serialize.write_signal_binary(f, tmp_path / "f.bin")
    back = serialize.read_signal(tmp_path / "f.bin", spec)
    assert back.spec == spec and np.array_equal(back.values, f.values)
    data = serialize.signal_to_bytes(f)
    assert len(data) == 24 + 16 * spec.size
    assert np.frombuffer(data[:24], "<i8").tolist() == list(dims)


def test_signal_errors(tmp_path):
    spec = grid.make_grid(1, 4, 8)
    f = grid.random_signal(spec, 1)
    serialize.write_signal_csv(f, tmp_path / "f.csv")
    with pytest.raises(DimensionMismatch):
        serialize.read_signal(tmp_path / "f.csv", grid.make_grid(1, 2, 8))
    lines = (tmp_path / "f.csv").read_text().splitlines()
    (tmp_path / "bare.csv").write_text("\n".join(lines[1:]))
    with pytest.raises(BadParameters):
        serialize.read_signal_csv(tmp_path / "bare.csv")
    assert np.array_equal(serialize.read_signal_csv(tmp_path / "bare.csv", spec).values, f.values)
    with pytest.raises(DimensionMismatch):
        serialize.signal_from_bytes(serialize.signal_to_bytes(f)[:-16])
    with pytest.raises(DimensionMismatch):
        serialize.signal_from_bytes(b"123")


def test_family_roundtrip(tmp_path):
    spec = grid.make_grid(2, 2, 4)
    W = synth.wilson_family(grid.random_hermitian_window(spec, 2), grp.make_group(2, [(1, 1)]))
    serialize.write_family(W, tmp_path / "w.json")
    manifest = json.loads((tmp_path / "w.json").read_text())
    assert manifest["count"] == W.count and manifest["kind"] == "wilson"
    back = serialize.read_family(tmp_path / "w.json")
    assert np.array_equal(back.vectors, W.vectors)
    assert back.labels == W.labels


def test_matrix_and_plan_roundtrip(tmp_path):
    rng = np.random.default_rng(3)
    A = sympl.random_symplectic(2, rng)
    serialize.write_matrix_csv(A, tmp_path / "a.csv")
    assert np.array_equal(serialize.read_matrix_csv(tmp_path / "a.csv"), A)
    plan = sympl.decompose(A)
    back = serialize.plan_from_json(serialize.plan_to_json(plan))
    assert back.kinds() == plan.kinds()
    assert np.allclose(back.matrix, plan.matrix, atol=0, rtol=0)
    empty = serialize.plan_from_json(serialize.plan_to_json(sympl.OperatorPlan((), 3)))
    assert empty.d == 3 and len(empty) == 0


def test_grid_csv(tmp_path):
    serialize.write_grid_csv(tmp_path / "t.csv", np.array([0.0, 0.5]), np.array([1 + 2j, 3]), 1e-11, (2,))
    rows = (tmp_path / "t.csv").read_text().splitlines()
    assert rows[0] == "alpha1,omega1,re,im,error_bound"
    assert rows[1].split(",") == ["2.0", "0.0", "1.0", "2.0", "1e-11"]
