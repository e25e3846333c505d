import json
import math

import numpy as np
import pytest

from phase_contract import io
from phase_contract.errors import DomainError


def test_fmt_roundtrips_floats():
    for x in (0.1, 1 / 3, 2.0**-1074, 1e308, -0.0):
        assert float(io.fmt(x)) == x


def test_to_json_rejects_nan():
    with pytest.raises(ValueError):
        io.to_json({"x": math.nan})


def test_to_json_numpy_types():
    doc = json.loads(io.to_json({"a": np.float64(0.1), "b": np.int64(3), "c": np.arange(2)}))
    assert doc == {"a": 0.1, "b": 3, "c": [0, 1]}


def test_operator_roundtrip(rng, tmp_path):
    A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    path = tmp_path / "op.json"
    io.write_operator(path, A, two_s=3)
    header, B = io.read_operator(path)
    assert header == {"two_s": 3}
    assert np.array_equal(A, B)


def test_operator_needs_one_tag():
    with pytest.raises(ValueError):
        io.operator_to_json(np.eye(2))
    with pytest.raises(ValueError):
        io.operator_to_json(np.eye(2), two_s=1, n_max=1)


@pytest.mark.parametrize("text", [
    "not json",
    '{"two_s": 1}',
    '{"two_s": 1, "matrix": [[[1, 0]]]}',
    '{"n_max": 0, "matrix": [[[1, 0], [0, 0]]]}',
    '{"two_s": 1, "matrix": [[1, 2], [3, 4]]}',
])
def test_malformed_operator(text):
    with pytest.raises(DomainError):
        io.operator_from_json(text)


def test_non_square():
    with pytest.raises(DomainError):
        io.operator_to_json(np.zeros((2, 3)), two_s=1)


def test_csv_tables():
    text = io.wigner_csv([0.0], [1.5], [-2.0])
    assert text == "q,p,w\n0,1.5,-2\n"
    text = io.samples_csv([0.1], [0.2], [0.3], [1 - 2j])
    assert text.splitlines()[1] == "0.10000000000000001,0.20000000000000001,0.29999999999999999,1,-2"


def test_write_text_stdout(capsys, tmp_path):
    io.write_text("hello\n", None)
    io.write_text("x\n", "-")
    assert capsys.readouterr().out == "hello\nx\n"
    io.write_text("file\n", tmp_path / "f.txt")
    assert (tmp_path / "f.txt").read_text() == "file\n"
