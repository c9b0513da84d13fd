"""Single-file JSON checkpoints: layer kinds, shapes, flat parameters."""

from __future__ import annotations

import json

import numpy as np

from ..errors import CheckpointError


def save_checkpoint(path, kind: str, config: dict, seed: int, params: list) -> None:
    """Write a model to JSON; ``params`` is a list of (name, array, grad)."""
    payload = {
        "kind": kind,
        "config": config,
        "seed": seed,
        "layers": [
            {
                "name": name,
                "shape": list(arr.shape),
                "dtype": str(arr.dtype),
                "data": [float(v) for v in arr.reshape(-1)],
            }
            for name, arr, _ in params
        ],
    }
    with open(path, "w") as f:
        json.dump(payload, f, sort_keys=True)


def load_checkpoint(path) -> dict:
    try:
        with open(path) as f:
            payload = json.load(f)
    except FileNotFoundError as exc:
        raise CheckpointError(f"checkpoint not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise CheckpointError(f"malformed checkpoint: {path}") from exc
    for key in ("kind", "config", "seed", "layers"):
        if key not in payload:
            raise CheckpointError(f"checkpoint missing field {key!r}: {path}")
    return payload


def restore_params(payload: dict, params: list) -> None:
    """Copy checkpoint arrays into an existing model's parameter list."""
    by_name = {entry["name"]: entry for entry in payload["layers"]}
    for name, arr, _ in params:
        entry = by_name.get(name)
        if entry is None:
            raise CheckpointError(f"checkpoint lacks parameter {name!r}")
        data = np.asarray(entry["data"], dtype=arr.dtype).reshape(entry["shape"])
        if tuple(data.shape) != tuple(arr.shape):
            raise CheckpointError(f"shape mismatch for {name!r}")
        arr[...] = data
