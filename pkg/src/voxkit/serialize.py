"""Field conventions shared by TSV manifests and metric reports.

Floats are written in shortest round-trip form, infinities as inf/-inf,
and absent values as empty fields (null in JSON).
"""

import math


def format_field(value) -> str:
    """Render one TSV cell."""
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(float(value))
    return str(value)


def parse_optional_float(text: str):
    """Parse a float field where the empty string means absent."""
    if text == "":
        return None
    return float(text)


def json_value(value):
    """JSON-safe rendering; infinities become the strings inf/-inf."""
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value
