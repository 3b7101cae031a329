import io as _io
import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qest import io
from qest.exceptions import ModelError
from qest.measurement import optimal_measurement_for_weight

from conftest import make_model


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_round_trip(x):
    assert float(io.fmt_float(x)) == x
    assert json.loads(io.dumps({"x": x}))["x"] == x


def test_dumps_types():
    text = io.dumps({"a": np.float64(0.1), "b": [1, 2.5], "c": True, "d": "s", "e": np.arange(2)})
    assert json.loads(text) == {"a": 0.1, "b": [1, 2.5], "c": True, "d": "s", "e": [0, 1]}
    assert "0.10000000000000001" in text
    with pytest.raises(ValueError):
        io.fmt_float(float("nan"))


def test_model_round_trip(tmp_path):
    m = make_model(4, 8)
    path = tmp_path / "m.json"
    path.write_text(io.dumps(io.model_to_json(m)))
    pure, mixed = io.load_model(path)
    assert mixed is None
    assert np.array_equal(pure.psi0, m.psi0) and np.array_equal(pure.dpsi, m.dpsi)
    assert np.array_equal(pure.weight, m.weight)


def test_povm_round_trip():
    m = make_model(3, 8)
    povm, _ = optimal_measurement_for_weight(m)
    back = io.parse_povm(json.loads(io.dumps(io.povm_to_json(povm))))
    assert back.labels == povm.labels
    assert all(np.array_equal(a, b) for a, b in zip(povm.elements, back.elements))


@pytest.mark.parametrize("doc, field", [
    ([], "JSON object"),
    ({"psi0": [[1, 0], [0, 0]]}, "dpsi"),
    ({"psi0": [[1, 0], [0]], "dpsi": []}, "psi0[1]"),
    ({"psi0": [[1, 0], [0, 0]], "dpsi": [[[0, 0], [1, 0]]]}, "dpsi"),
    ({"psi0": [[1, 0], [0, "a"]], "dpsi": []}, "psi0[1][1]"),
    ({"dim": 3, "psi0": [[1, 0], [0, 0]], "dpsi": [[[0, 0], [1, 0]], [[0, 0], [0, 1]]]}, "dim"),
    ({"psi0": [[1, 0], [0, 0]], "dpsi": [[[0, 0], [1, 0]], [[0, 0], [0, 1]]], "weight": [[1, 0]]}, "weight"),
    ({"mixed": {"rho": [[[1, 0]]]}}, "mixed"),
    ({"dim": 2}, "psi0"),
])
def test_schema_errors_name_the_field(doc, field):
    with pytest.raises(io.FileFormatError, match=field.replace("[", r"\[").replace("]", r"\]")):
        io.parse_model(doc)


def test_invalid_model_is_model_error():
    with pytest.raises(ModelError):
        io.parse_model({"psi0": [[1, 0], [1, 0]], "dpsi": [[[0, 0], [1, 0]], [[0, 0], [0, 1]]]})


def test_load_json_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"a": 1,\n  oops}')
    with pytest.raises(io.FileFormatError, match="line 2"):
        io.load_json(bad)
    with pytest.raises(io.FileFormatError):
        io.load_json(tmp_path / "missing.json")


def test_mixed_file():
    doc = {
        "dim": 2,
        "mixed": {
            "rho": [[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]],
            "drho": [[[[0, 0], [0.5, 0]], [[0.5, 0], [0, 0]]], [[[0, 0], [0, -0.5]], [[0, 0.5], [0, 0]]]],
        },
    }
    pure, mixed = io.parse_model(doc)
    assert pure is None and mixed.dim == 2


def test_write_csv():
    buf = _io.StringIO()
    io.write_csv(buf, ("a", "b"), [{"a": 0.1, "b": 2}])
    assert buf.getvalue() == "a,b\n0.10000000000000001,2\n"


def test_parse_povm_errors():
    with pytest.raises(io.FileFormatError):
        io.parse_povm({"elements": []})
    with pytest.raises(io.FileFormatError):
        io.parse_povm({"elements": [[[[1, 0]]], [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]]})
