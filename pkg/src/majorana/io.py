"""JSON schemas for states, constellations, paths, Hamiltonians and trajectories."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .dynamics import HamiltonianSpec, Trajectory
from .geometry import StarPath
from .hilbert import SpinState
from .stellar import Constellation


class SchemaError(ValueError):
    pass


def _require(obj, key):
    if not isinstance(obj, dict) or key not in obj:
        raise SchemaError(f"missing field {key!r}")
    return obj[key]


def state_to_json(s: SpinState) -> dict:
    return {
        "two_j": s.two_j,
        "re": s.amplitudes.real.tolist(),
        "im": s.amplitudes.imag.tolist(),
    }


def state_from_json(obj) -> SpinState:
    two_j = int(_require(obj, "two_j"))
    re = np.asarray(_require(obj, "re"), dtype=float)
    im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    if re.shape != im.shape:
        raise SchemaError("re and im have different lengths")
    return SpinState(two_j, re + 1j * im)


def vector_to_json(v) -> dict:
    return {"x": float(v[0]), "y": float(v[1]), "z": float(v[2])}


def vector_from_json(obj) -> np.ndarray:
    return np.array([float(_require(obj, k)) for k in ("x", "y", "z")])


def constellation_to_json(u: Constellation) -> dict:
    return {"two_j": u.two_j, "stars": [vector_to_json(s) for s in u.stars]}


def constellation_from_json(obj) -> Constellation:
    two_j = int(_require(obj, "two_j"))
    stars = [vector_from_json(s) for s in _require(obj, "stars")]
    if len(stars) != two_j:
        raise SchemaError(f"two_j={two_j} but {len(stars)} stars given")
    return Constellation(np.array(stars).reshape(-1, 3))


def path_to_json(p: StarPath) -> dict:
    return {"closed": p.closed, "samples": [constellation_to_json(s) for s in p.samples]}


def path_from_json(obj) -> StarPath:
    samples = [constellation_from_json(s) for s in _require(obj, "samples")]
    return StarPath(samples, closed=bool(obj.get("closed", True)))


def hamiltonian_to_json(h: HamiltonianSpec) -> dict:
    return {"b_field": h.b_field.tolist(), "quad": h.quad.tolist(), "constant": h.constant}


def hamiltonian_from_json(obj) -> HamiltonianSpec:
    if not isinstance(obj, dict):
        raise SchemaError("Hamiltonian must be a JSON object")
    return HamiltonianSpec(
        b_field=obj.get("b_field", [0.0, 0.0, 0.0]),
        quad=obj.get("quad", np.zeros((3, 3)).tolist()),
        constant=obj.get("constant", 0.0),
    )


def trajectory_to_json(t: Trajectory) -> dict:
    return {
        "times": t.times.tolist(),
        "energies": t.energies.tolist(),
        "constellations": [
            {"two_j": len(s), "stars": [vector_to_json(v) for v in s]} for s in t.stars
        ],
    }


def trajectory_from_json(obj) -> Trajectory:
    frames = _require(obj, "constellations")
    for c in frames:
        constellation_from_json(c)  # validation only
    # keep the stored coordinates bit-for-bit instead of renormalizing them
    stars = np.array([[vector_from_json(v) for v in c["stars"]] for c in frames]).reshape(len(frames), -1, 3)
    return Trajectory(
        np.asarray(_require(obj, "times"), dtype=float),
        stars,
        np.asarray(_require(obj, "energies"), dtype=float),
    )


def trajectory_csv_rows(t: Trajectory):
    """Rows (t, star, x, y, z) for plotting."""
    for time, stars in zip(t.times, t.stars):
        for i, s in enumerate(stars):
            yield (repr(float(time)), i, *(repr(float(c)) for c in s))


def load_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise SchemaError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc.msg})") from exc


def dumps(obj) -> str:
    # repr-based float output is the shortest string that round-trips exactly
    return json.dumps(obj, indent=2)
