"""JSON model/POVM files, CSV sweep tables and lossless float formatting.

Complex numbers are stored as ``[re, im]`` pairs.  A model file looks like::

    {"dim": 2,
     "psi0": [[1, 0], [0, 0]],
     "dpsi": [[[0, 0], [0.5, 0]], [[0, 0], [0, 0.5]]],
     "weight": [[1, 0], [0, 1]],
     "mixed": {"rho": [[[1, 0], [0, 0]], ...], "drho": [..., ...]}}

``weight`` is optional (identity) and so is ``mixed``.  A file may carry only
``mixed``, in which case it describes a mixed model.  ``dim`` is checked
against the arrays when present.
"""
import csv
import json
import math

import numpy as np

from .exceptions import ModelError
from .measurement import Povm
from .mixed import MixedModel
from .statmodel import PureModel, gauge_fix

__all__ = [
    "FileFormatError",
    "fmt_float",
    "dumps",
    "load_json",
    "parse_model",
    "load_model",
    "pure_to_mixed",
    "povm_to_json",
    "parse_povm",
    "load_povm",
    "write_csv",
    "model_to_json",
]


class FileFormatError(ValueError):
    """Unreadable file or a schema violation; the message names the offending field."""


def fmt_float(x):
    """17 significant digits, which round-trips every IEEE double."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialise non-finite value {x!r}")
    return format(x, ".17g")


def dumps(obj, indent=None):
    """``json.dumps`` with every float written to 17 significant digits."""

    def conv(o):
        if isinstance(o, (bool, np.bool_)):
            return bool(o)
        if isinstance(o, (float, np.floating)):
            return _Raw(fmt_float(o))
        if isinstance(o, (int, np.integer)):
            return int(o)
        if isinstance(o, dict):
            return {str(k): conv(v) for k, v in o.items()}
        if isinstance(o, (list, tuple)):
            return [conv(v) for v in o]
        if isinstance(o, np.ndarray):
            return conv(o.tolist())
        if isinstance(o, complex):
            return [_Raw(fmt_float(o.real)), _Raw(fmt_float(o.imag))]
        return o

    # json has no hook for raw number text, so floats pass through placeholders
    raw = []

    def default(o):
        if isinstance(o, _Raw):
            raw.append(o.text)
            return f"\x00{len(raw) - 1}\x00"
        raise TypeError(f"not JSON serialisable: {type(o).__name__}")

    text = json.dumps(conv(obj), default=default, indent=indent)
    for k, r in enumerate(raw):
        text = text.replace(f'"\\u0000{k}\\u0000"', r, 1)
    return text


class _Raw:
    __slots__ = ("text",)

    def __init__(self, text):
        self.text = text


def load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise FileFormatError(f"{path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _number(x, where):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise FileFormatError(f"{where}: expected a number, got {x!r}")
    return float(x)


def _complex_vector(data, where):
    if not isinstance(data, list) or not data:
        raise FileFormatError(f"{where}: expected a non-empty array of [re, im] pairs")
    out = np.empty(len(data), dtype=complex)
    for i, pair in enumerate(data):
        if not isinstance(pair, list) or len(pair) != 2:
            raise FileFormatError(f"{where}[{i}]: expected an [re, im] pair, got {pair!r}")
        out[i] = complex(_number(pair[0], f"{where}[{i}][0]"), _number(pair[1], f"{where}[{i}][1]"))
    return out


def _complex_matrix(data, where):
    if not isinstance(data, list) or not data:
        raise FileFormatError(f"{where}: expected a matrix of [re, im] pairs")
    rows = [_complex_vector(row, f"{where}[{i}]") for i, row in enumerate(data)]
    if any(r.size != len(rows) for r in rows):
        raise FileFormatError(f"{where}: matrix must be square")
    return np.array(rows)


def _real_matrix(data, where, shape):
    if not isinstance(data, list) or len(data) != shape[0]:
        raise FileFormatError(f"{where}: expected a {shape[0]}x{shape[1]} array of reals")
    out = np.empty(shape)
    for i, row in enumerate(data):
        if not isinstance(row, list) or len(row) != shape[1]:
            raise FileFormatError(f"{where}[{i}]: expected {shape[1]} reals")
        for j, x in enumerate(row):
            out[i, j] = _number(x, f"{where}[{i}][{j}]")
    return out


def _pair_of(data, where, parse):
    if not isinstance(data, list) or len(data) != 2:
        raise FileFormatError(f"{where}: expected exactly two entries, one per parameter")
    return np.array([parse(d, f"{where}[{j}]") for j, d in enumerate(data)])


def parse_model(doc):
    """Build ``(pure, mixed)`` from a decoded model file; either may be ``None``.

    Schema problems raise :class:`FileFormatError`; a well-formed file that
    describes an invalid model raises :class:`~qest.exceptions.ModelError`.
    """
    if not isinstance(doc, dict):
        raise FileFormatError("model file must contain a JSON object")
    weight = None
    if "weight" in doc:
        weight = _real_matrix(doc["weight"], "weight", (2, 2))
    dim = doc.get("dim")
    if dim is not None and (isinstance(dim, bool) or not isinstance(dim, int) or dim < 2):
        raise FileFormatError(f"dim: expected an integer >= 2, got {dim!r}")

    pure = mixed = None
    if "psi0" in doc or "dpsi" in doc:
        for key in ("psi0", "dpsi"):
            if key not in doc:
                raise FileFormatError(f"{key}: missing field")
        psi0 = _complex_vector(doc["psi0"], "psi0")
        dpsi = _pair_of(doc["dpsi"], "dpsi", _complex_vector)
        if dim is not None and (psi0.size != dim or dpsi.shape[1] != dim):
            raise FileFormatError(f"psi0/dpsi: length does not match dim = {dim}")
        pure = PureModel(psi0, dpsi, weight)
    if "mixed" in doc:
        m = doc["mixed"]
        if not isinstance(m, dict) or "rho" not in m or "drho" not in m:
            raise FileFormatError("mixed: expected an object with 'rho' and 'drho'")
        rho = _complex_matrix(m["rho"], "mixed.rho")
        drho = _pair_of(m["drho"], "mixed.drho", _complex_matrix)
        if dim is not None and rho.shape[0] != dim:
            raise FileFormatError(f"mixed.rho: size does not match dim = {dim}")
        mixed = MixedModel(rho, drho, weight)
    if pure is None and mixed is None:
        raise FileFormatError("model file needs 'psi0' and 'dpsi', or 'mixed'")
    return pure, mixed


def load_model(path):
    return parse_model(load_json(path))


def pure_to_mixed(model):
    """``rho = |psi><psi|`` with ``d_j rho = |d_j psi><psi| + h.c.`` (after gauge fixing)."""
    model = gauge_fix(model)
    psi = model.psi0
    rho = np.outer(psi, psi.conj())
    drho = []
    for d in model.dpsi:
        op = np.outer(d, psi.conj())
        drho.append(op + op.conj().T)
    return MixedModel(rho, np.array(drho), model.weight)


def _pairs(m):
    m = np.asarray(m, dtype=complex)
    return [[[z.real, z.imag] for z in row] for row in m]


def povm_to_json(povm, extra=None):
    doc = {"dim": povm.dim, "labels": list(povm.labels), "elements": [_pairs(e) for e in povm.elements]}
    if extra:
        doc.update(extra)
    return doc


def parse_povm(doc):
    if not isinstance(doc, dict) or "elements" not in doc:
        raise FileFormatError("POVM file must be an object with an 'elements' array")
    elems = doc["elements"]
    if not isinstance(elems, list) or not elems:
        raise FileFormatError("elements: expected a non-empty array of matrices")
    mats = [_complex_matrix(e, f"elements[{i}]") for i, e in enumerate(elems)]
    labels = doc.get("labels")
    try:
        return Povm(mats, labels)
    except ValueError as exc:
        raise FileFormatError(str(exc)) from None


def load_povm(path):
    return parse_povm(load_json(path))


def write_csv(fh, fields, rows):
    """Write dict rows with floats at 17 significant digits."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(fields)
    for row in rows:
        writer.writerow([fmt_float(row[f]) if isinstance(row[f], float) else row[f] for f in fields])


def model_to_json(model):
    """Inverse of :func:`parse_model` for a pure model."""
    if not isinstance(model, PureModel):
        raise ModelError("only pure models are serialised")
    return {
        "dim": model.dim,
        "psi0": [[z.real, z.imag] for z in model.psi0],
        "dpsi": [[[z.real, z.imag] for z in d] for d in model.dpsi],
        "weight": model.weight.tolist(),
    }
