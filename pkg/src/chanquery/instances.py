"""JSON instance files.

A channel is an object with a ``kind`` and the matching payload::

    {"kind": "classical", "stochastic": [[0.9, 0.1], [0.2, 0.8]]}
    {"kind": "cq", "outputs": [MATRIX, ...]}
    {"kind": "quantum", "dim_in": 2, "dim_out": 2, "kraus": [MATRIX, ...]}

and a state is ``{"kind": "state", "matrix": MATRIX}``. A ``MATRIX`` is a list
of rows whose entries are real numbers or ``[re, im]`` pairs.

An instance file holds ``channels`` (or ``states``) plus optional ``priors``,
``p``, ``eps`` and ``delta``. Parse failures raise :class:`ValidationError`
naming the invariant that failed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .channels import ClassicalChannel, CQChannel, QuantumChannel, as_density_matrix
from .errors import ValidationError


def _matrix(data, what: str) -> np.ndarray:
    try:
        rows = []
        for row in data:
            vals = []
            for z in row:
                if isinstance(z, (list, tuple)):
                    if len(z) != 2:
                        raise ValidationError("complex entry is [re, im]", f"{what}: {z!r}")
                    vals.append(complex(float(z[0]), float(z[1])))
                else:
                    vals.append(complex(float(z)))
            rows.append(vals)
        m = np.array(rows, dtype=complex)
    except ValidationError:
        raise
    except (TypeError, ValueError) as exc:
        raise ValidationError("numeric matrix", f"{what}: {exc}") from None
    if m.ndim != 2:
        raise ValidationError("rectangular matrix", what)
    return m


def _encode_matrix(m: np.ndarray) -> list:
    m = np.asarray(m)
    if np.iscomplexobj(m) and np.any(np.abs(m.imag) > 0):
        return [[[float(z.real), float(z.imag)] for z in row] for row in m]
    return [[float(np.real(z)) for z in row] for row in m]


def parse_channel(obj: dict, where: str = "channel"):
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ValidationError("channel object with a kind", where)
    kind = obj["kind"]
    if kind == "classical":
        if "stochastic" not in obj:
            raise ValidationError("classical channel has a stochastic matrix", where)
        m = _matrix(obj["stochastic"], where)
        if np.any(np.abs(m.imag) > 0):
            raise ValidationError("real stochastic matrix", where)
        try:
            return ClassicalChannel(m.real)
        except ValidationError as exc:
            raise ValidationError(f"row-stochastic matrix ({exc.invariant})", where) from None
    if kind == "cq":
        outs = obj.get("outputs")
        if not outs:
            raise ValidationError("CQ channel has outputs", where)
        return CQChannel([_matrix(o, f"{where} output {i}") for i, o in enumerate(outs)])
    if kind == "quantum":
        ops = obj.get("kraus")
        if not ops:
            raise ValidationError("quantum channel has Kraus operators", where)
        mats = [_matrix(k, f"{where} Kraus {i}") for i, k in enumerate(ops)]
        ch = QuantumChannel(mats)
        for key, actual in (("dim_in", ch.dim_in), ("dim_out", ch.dim_out)):
            if key in obj and int(obj[key]) != actual:
                raise ValidationError(f"declared {key} matches Kraus shape", f"{where}: {obj[key]} vs {actual}")
        return ch
    raise ValidationError("channel kind in {quantum, classical, cq}", f"{where}: {kind!r}")


def parse_state(obj, where: str = "state") -> np.ndarray:
    if isinstance(obj, dict):
        if "matrix" not in obj:
            raise ValidationError("state object has a matrix", where)
        obj = obj["matrix"]
    return as_density_matrix(_matrix(obj, where), where)


def channel_to_json(ch) -> dict:
    if isinstance(ch, ClassicalChannel):
        return {"kind": "classical", "stochastic": ch.matrix.tolist()}
    if isinstance(ch, CQChannel):
        return {"kind": "cq", "outputs": [_encode_matrix(o) for o in ch.outputs]}
    return {
        "kind": "quantum",
        "dim_in": ch.dim_in,
        "dim_out": ch.dim_out,
        "kraus": [_encode_matrix(k) for k in ch.kraus],
    }


@dataclass
class Instance:
    channels: list = field(default_factory=list)
    states: list = field(default_factory=list)
    priors: list[float] | None = None
    p: float | None = None
    eps: float | None = None
    delta: float | None = None

    def to_json(self) -> dict:
        out: dict = {}
        if self.channels:
            out["channels"] = [channel_to_json(c) for c in self.channels]
        if self.states:
            out["states"] = [{"kind": "state", "matrix": _encode_matrix(s)} for s in self.states]
        for key in ("priors", "p", "eps", "delta"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        return out


def _unit(obj: dict, key: str):
    if key not in obj or obj[key] is None:
        return None
    try:
        val = float(obj[key])
    except (TypeError, ValueError):
        raise ValidationError(f"{key} is a number", repr(obj[key])) from None
    if not (0 < val < 1) or math.isnan(val):
        raise ValidationError(f"{key} in (0, 1)", str(val))
    return val


def parse_instance(obj) -> Instance:
    if not isinstance(obj, dict):
        raise ValidationError("instance is a JSON object")
    inst = Instance(
        channels=[parse_channel(c, f"channels[{i}]") for i, c in enumerate(obj.get("channels", []))],
        states=[parse_state(s, f"states[{i}]") for i, s in enumerate(obj.get("states", []))],
        p=_unit(obj, "p"),
        eps=_unit(obj, "eps"),
        delta=_unit(obj, "delta"),
    )
    if not inst.channels and not inst.states:
        raise ValidationError("instance has channels or states")
    if "priors" in obj:
        pri = [float(x) for x in obj["priors"]]
        if any(x <= 0 for x in pri) or abs(sum(pri) - 1) > 1e-12:
            raise ValidationError("priors positive and summing to 1", str(pri))
        inst.priors = pri
    return inst


def load_instance(path) -> Instance:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError("readable instance file", str(exc)) from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError("well-formed JSON", str(exc)) from None
    return parse_instance(obj)
