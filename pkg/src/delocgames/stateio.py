"""File formats for states and tactics.

States are JSON documents in one of three forms:

* ``{"name": ..., "params": {...}}`` -- a named constructor,
* ``{"dims": [...], "matrix": [[re, im], ...]}`` -- a density matrix, entries
  row-major as ``[re, im]`` pairs,
* ``{"dims": [...], "vector": [[re, im], ...]}`` -- a pure-state vector.

Tactics are ``{"label": ..., "u_a": [[re, im], ...], "v_b": [[re, im], ...]}``
with each unitary row-major in the same pair encoding.

All reals are emitted with 17 significant digits so a file round-trips
bit-exactly through a double.
"""

from __future__ import annotations

import json
import math
import os

import numpy as np

from .qcore import DensityMatrix, PureState, ValidationError, named_state


def _format_value(obj) -> str:
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        if not math.isfinite(obj):
            raise ValidationError(f"cannot serialize non-finite value {obj!r}")
        return f"{float(obj):.17g}"
    if isinstance(obj, str):
        return json.dumps(obj)
    if obj is None:
        return "null"
    if isinstance(obj, dict):
        items = ", ".join(f"{json.dumps(str(k))}: {_format_value(v)}" for k, v in obj.items())
        return "{" + items + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_format_value(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: dict) -> str:
    """Serialize a report/state dictionary with full-precision floats."""
    return _format_value(obj) + "\n"


def _encode_complex(values: np.ndarray) -> list[list[float]]:
    flat = np.asarray(values, dtype=complex).reshape(-1)
    return [[float(z.real), float(z.imag)] for z in flat]


def _decode_complex(pairs, count: int, what: str) -> np.ndarray:
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] != count:
        raise ValidationError(f"{what} must be {count} [re, im] pairs, got shape {arr.shape}")
    return arr[:, 0] + 1j * arr[:, 1]


def state_to_dict(state) -> dict:
    if isinstance(state, PureState):
        return {"dims": list(state.dims), "vector": _encode_complex(state.amplitudes)}
    if isinstance(state, DensityMatrix):
        return {"dims": list(state.dims), "matrix": _encode_complex(state.matrix)}
    raise TypeError(f"expected PureState or DensityMatrix, got {type(state).__name__}")


def state_from_dict(doc: dict):
    if not isinstance(doc, dict):
        raise ValidationError("state document must be a JSON object")
    if "name" in doc:
        return named_state(str(doc["name"]), doc.get("params", {}))
    if "dims" not in doc:
        raise ValidationError("state document needs either 'name' or 'dims'")
    dims = tuple(int(d) for d in doc["dims"])
    d = math.prod(dims)
    if "vector" in doc:
        return PureState(dims, _decode_complex(doc["vector"], d, "vector"))
    if "matrix" in doc:
        flat = _decode_complex(doc["matrix"], d * d, "matrix")
        return DensityMatrix(dims, flat.reshape(d, d))
    raise ValidationError("state document needs a 'vector' or 'matrix' field")


def dump_state(state, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(state_to_dict(state)))


def load_state(path: str | os.PathLike):
    with open(path, "r", encoding="utf-8") as fh:
        return state_from_dict(json.load(fh))


def tactic_to_dict(tactic) -> dict:
    return {
        "label": tactic.label,
        "dim": int(tactic.dim),
        "u_a": _encode_complex(tactic.u_a),
        "v_b": _encode_complex(tactic.v_b),
    }


def tactic_from_dict(doc: dict):
    from .games import Tactic  # local import: games depends on measures

    if not isinstance(doc, dict) or "u_a" not in doc or "v_b" not in doc:
        raise ValidationError("tactic document needs 'u_a' and 'v_b' fields")
    d = int(doc.get("dim", 2))
    u = _decode_complex(doc["u_a"], d * d, "u_a").reshape(d, d)
    v = _decode_complex(doc["v_b"], d * d, "v_b").reshape(d, d)
    return Tactic(u, v, label=str(doc.get("label", "file")))


def dump_tactic(tactic, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(tactic_to_dict(tactic)))


def load_tactic(path: str | os.PathLike):
    with open(path, "r", encoding="utf-8") as fh:
        return tactic_from_dict(json.load(fh))
