"""JSON formats for states, spectral sets and bound reports."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .contextuality import SpectralSet
from .qlinalg import DensityMatrix, ValidationError


def state_to_dict(rho: DensityMatrix) -> dict:
    """``{"dims": [...], "re": [[...]], "im": [[...]]}`` with row-major nesting."""
    return {"dims": list(rho.dims), "re": rho.data.real.tolist(), "im": rho.data.imag.tolist()}


def state_from_dict(obj: dict) -> DensityMatrix:
    try:
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
        dims = tuple(int(d) for d in obj.get("dims", [re.shape[0]]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed state JSON: {exc}") from exc
    if re.shape != im.shape:
        raise ValidationError("re and im parts differ in shape")
    return DensityMatrix(re + 1j * im, dims)


def write_state(path, rho: DensityMatrix) -> None:
    Path(path).write_text(json.dumps(state_to_dict(rho)))


def read_state(path) -> DensityMatrix:
    return state_from_dict(json.loads(Path(path).read_text()))


def write_spectral_set(path, spectral_set: SpectralSet) -> None:
    Path(path).write_text(json.dumps(spectral_set.to_dict()))


def read_spectral_set(path) -> SpectralSet:
    return SpectralSet.from_dict(json.loads(Path(path).read_text()))


def dumps_strict(obj) -> str:
    """``json.dumps`` that refuses NaN/inf instead of emitting non-standard tokens."""

    def check(v):
        if isinstance(v, float) and not math.isfinite(v):
            raise ValidationError("non-finite float in output")
        if isinstance(v, dict):
            for x in v.values():
                check(x)
        elif isinstance(v, (list, tuple)):
            for x in v:
                check(x)

    check(obj)
    return json.dumps(obj, allow_nan=False, indent=2)
