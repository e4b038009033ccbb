import json
import math
import typing as t

import numpy as np
import pandas as pd

from ..const import SIGNIFICANT_DIGITS


def round_sig(value: float, digits: int = SIGNIFICANT_DIGITS) -> float:
    """Round to `digits` significant digits; non-finite values pass through."""
    value = float(value)
    if not math.isfinite(value):
        return value
    return float(f"{value:.{digits}g}")


def normalize(payload: t.Any) -> t.Any:
    """Recursively convert numpy scalars/arrays and round floats."""
    if isinstance(payload, dict):
        return {str(k): normalize(v) for k, v in payload.items()}
    if isinstance(payload, (list, tuple)):
        return [normalize(v) for v in payload]
    if isinstance(payload, np.ndarray):
        return normalize(payload.tolist())
    if isinstance(payload, (bool, np.bool_)):
        return bool(payload)
    if isinstance(payload, (int, np.integer)):
        return int(payload)
    if isinstance(payload, (float, np.floating)):
        return round_sig(payload)
    return payload


def dump_json(payload: t.Any, indent: t.Optional[int] = 2) -> str:
    """JSON text with alphabetical keys and 12 significant digits."""
    return json.dumps(normalize(payload), indent=indent, sort_keys=True)


def frame_to_csv(frame: pd.DataFrame) -> str:
    return frame.to_csv(
        index=False,
        float_format=f"%.{SIGNIFICANT_DIGITS}g",
        lineterminator="\n",
    )
