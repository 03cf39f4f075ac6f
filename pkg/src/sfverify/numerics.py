"""Arithmetic model shared by every evaluator in the package.

Integers are 64-bit with saturation on overflow; floats are IEEE binary64
(Python floats). Comparisons and boolean connectives yield int 0/1; guards
coerce C-style (nonzero = true). There is no division anywhere in the ASTs.
"""

from __future__ import annotations

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1


def sat(v: int) -> int:
    if v > INT64_MAX:
        return INT64_MAX
    if v < INT64_MIN:
        return INT64_MIN
    return v


def sat_add(a: int, b: int) -> int:
    return sat(a + b)


def sat_sub(a: int, b: int) -> int:
    return sat(a - b)


def sat_mul(a: int, b: int) -> int:
    return sat(a * b)


def sat_neg(a: int) -> int:
    return sat(-a)


def truthy(v: float | int) -> bool:
    return v != 0


def promote_pair(a: float | int, b: float | int) -> tuple:
    """Comparison operands: an int compared with a float becomes float64.

    (Python would compare exactly; C code and the lowered kernels cannot,
    so promotion is the defined model and every evaluator uses it.)
    """
    if isinstance(a, float) or isinstance(b, float):
        return float(a), float(b)
    return a, b


def coerce(value: float | int, sort: str) -> float | int:
    """Coerce a numeric value to a declared sort (assignment semantics)."""
    if sort == "float":
        return float(value)
    if isinstance(value, float):
        # C-style truncation toward zero, then saturate
        if value != value:  # NaN
            return 0
        if value >= INT64_MAX:
            return INT64_MAX
        if value <= INT64_MIN:
            return INT64_MIN
        return int(value)
    return sat(int(value))
