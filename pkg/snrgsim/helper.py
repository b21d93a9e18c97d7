import json
import logging
import math
from typing import Any, Optional, Sequence

import numpy as np

logger = logging.getLogger(__name__)
logger.setLevel(level=logging.CRITICAL)

GAMMA_E = 2.8e6  # Hz/G
D_ZFS = 2.870e9  # Hz


def conv(source_unit: str, target_unit: str, conversion_factor: float):
    """Documents unit conversion. It does nothing but to return the conversion factor."""
    return conversion_factor


def transition_frequency(bz: float, gamma: float = GAMMA_E, d: float = D_ZFS) -> float:
    """Returns the |0> <-> |-1> transition frequency in Hz for a longitudinal field `bz` in G."""
    return d - gamma * bz


def detuning_from_mismatch(f1: float, b1: float, gamma: float = GAMMA_E) -> float:
    """Returns the angular gradient detuning seen by a spin whose drive modulation amplitude `f1`
    (Hz) differs from the field-induced shift `gamma * b1` (b1 in G)."""
    return 2 * math.pi * (f1 - gamma * b1)


def bordered(text: str) -> str:
    """Adds a border around a given text."""
    lines = text.splitlines()
    width = max(len(s) for s in lines)
    res = [f"┌{'─' * width}┐"]
    for s in lines:
        res.append("│" + (s + " " * width)[:width] + "│")
    res.append(f"└{'─' * width}┘")
    return "\n".join(res)


def fmt_float(x: float, digits: int) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "nan"
    return f"{x:.{digits}g}"


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return float(f"{x:.17g}") if math.isfinite(x) else str(x)
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def dumps_json(obj: Any, indent: Optional[int] = 2) -> str:
    """Serializes nested dicts/lists/scalars to strict JSON.

    Key order is preserved, so equal inputs give equal bytes. Non-finite floats become the
    strings "nan", "inf" and "-inf".
    """
    return json.dumps(_jsonable(obj), indent=indent, allow_nan=False, ensure_ascii=False)


def parse_floats(text: str) -> Sequence[float]:
    """Parses a comma separated list of numbers."""
    return [float(v) for v in text.replace(";", ",").split(",") if v.strip()]
