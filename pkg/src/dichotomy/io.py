"""Serialization: the shared matrix JSON schema, grid/torus CSV and JSON
formats, and a deterministic JSON writer.

Matrix JSON: {"n": int, "re": [[...]], "im": [[...]]} row-major, "im"
optional (zero).  GridFunction CSV columns: t, re(f_1), im(f_1), ...,
re(f_n), im(f_n).  Green samples CSV: t, re(G_ij)..., im(G_ij)...
row-major.  TorusFunction JSON: {"M": int, "coeffs": {"k": [re..., im...]}}.

JSON written through ``canonical_json`` is byte-deterministic: keys are
sorted and every float is rendered with 17 significant digits.
"""

import json
import os
import tempfile

import numpy as np

from .errors import InputError
from .multiplier import GridFunction, TorusFunction
from .operator_core import Generator, load_generator

__all__ = [
    "load_matrix_json",
    "matrix_to_json_dict",
    "gridfunction_to_csv",
    "gridfunction_from_csv",
    "torusfunction_to_json_dict",
    "torusfunction_from_json_dict",
    "green_samples_to_csv",
    "canonical_json",
    "atomic_write_text",
]


def load_matrix_json(source):
    """Read the matrix JSON schema from a path, file object, or dict."""
    if isinstance(source, dict):
        doc = source
    elif hasattr(source, "read"):
        doc = json.load(source)
    else:
        with open(source, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    if not isinstance(doc, dict) or "n" not in doc or "re" not in doc:
        raise InputError('matrix JSON must contain keys "n" and "re"')
    n = doc["n"]
    re = np.asarray(doc["re"], dtype=float)
    im = np.asarray(doc.get("im", np.zeros_like(re)), dtype=float)
    if re.shape != (n, n) or im.shape != (n, n):
        raise InputError(f'matrix JSON shape mismatch: declared n={n}, got re {re.shape}, im {im.shape}')
    return load_generator(re + 1j * im)


def matrix_to_json_dict(a):
    a = np.asarray(a, dtype=complex)
    return {"n": a.shape[0], "re": a.real.tolist(), "im": a.imag.tolist()}


def _fmt(x):
    return format(float(x), ".17g")


def gridfunction_to_csv(f: GridFunction, path):
    samples = f.samples if f.is_vector else f.samples[:, None]
    lines = []
    for t, row in zip(f.grid, samples):
        cells = [_fmt(t)]
        for v in row:
            cells.append(_fmt(v.real))
            cells.append(_fmt(v.imag))
        lines.append(",".join(cells))
    atomic_write_text(path, "\n".join(lines) + "\n")


def gridfunction_from_csv(path):
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rows.append([float(c) for c in line.split(",")])
    if len(rows) < 2:
        raise InputError("grid CSV needs at least two rows")
    arr = np.asarray(rows)
    t = arr[:, 0]
    h = t[1] - t[0]
    if h <= 0 or np.any(np.abs(np.diff(t) - h) > 1e-9 * max(1.0, abs(h))):
        raise InputError("grid CSV times must be uniform and increasing")
    pairs = arr[:, 1:]
    if pairs.shape[1] % 2 != 0:
        raise InputError("grid CSV needs re/im column pairs after the time column")
    vals = pairs[:, 0::2] + 1j * pairs[:, 1::2]
    if vals.shape[1] == 1:
        vals = vals[:, 0]
    return GridFunction(float(t[0]), float(h), vals)


def torusfunction_to_json_dict(f: TorusFunction):
    coeffs = {}
    for k, row in zip(f.wavenumbers, f.coeffs):
        coeffs[str(int(k))] = [float(v) for v in np.concatenate([row.real, row.imag])]
    return {"M": int(f.truncation), "coeffs": coeffs}


def torusfunction_from_json_dict(doc):
    m = int(doc["M"])
    coeffs = np.zeros((2 * m + 1, 0), dtype=complex)
    rows = []
    n = None
    for k in range(-m, m + 1):
        flat = doc["coeffs"].get(str(k))
        if flat is None:
            raise InputError(f"torus JSON missing coefficient {k}")
        flat = np.asarray(flat, dtype=float)
        if n is None:
            if flat.size % 2 != 0:
                raise InputError("torus coefficients must hold re..., im... halves")
            n = flat.size // 2
        rows.append(flat[:n] + 1j * flat[n:])
    return TorusFunction(np.asarray(rows), m)


def green_samples_to_csv(samples, path):
    lines = []
    for t, mat in zip(samples.times, samples.values):
        flat = np.asarray(mat).ravel()
        cells = [_fmt(t)] + [_fmt(v.real) for v in flat] + [_fmt(v.imag) for v in flat]
        lines.append(",".join(cells))
    atomic_write_text(path, "\n".join(lines) + "\n")


def _canonize(obj):
    if isinstance(obj, dict):
        items = sorted(obj.items())
        return "{" + ",".join(json.dumps(str(k)) + ":" + _canonize(v) for k, v in items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_canonize(v) for v in obj) + "]"
    if isinstance(obj, np.ndarray):
        return _canonize(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        if not np.isfinite(obj):
            return json.dumps(None)
        return _fmt(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return _canonize({"re": float(obj.real), "im": float(obj.imag)})
    if isinstance(obj, str):
        return json.dumps(obj)
    raise InputError(f"cannot serialize object of type {type(obj)!r}")


def canonical_json(obj):
    """Deterministic JSON text: sorted keys, floats at 17 significant digits."""
    return _canonize(obj) + "\n"


def atomic_write_text(path, text):
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
