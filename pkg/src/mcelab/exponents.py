"""Dimension-dependent exponents and the weight parameters of the proofs.

All functions take the ambient dimension ``n >= 2``. Values are doubles;
where a branch is integral (``p_n = n`` for small ``n`` and so on) the
integer is returned as an exact float.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import astuple, dataclass, fields

from .errors import DomainError

__all__ = [
    "ExponentRow",
    "p_n",
    "q_n",
    "q_bar_n",
    "a_regularity",
    "a_liouville",
    "discriminant_st",
    "radial_coeff",
    "radial_threshold",
    "table",
    "table_csv",
]


def _check_n(n):
    if int(n) != n or n < 2:
        raise DomainError(f"dimension must be an integer >= 2, got {n!r}")
    return int(n)


def p_n(n: int) -> float:
    """Morrey exponent of the gradient for stable solutions."""
    n = _check_n(n)
    if n <= 5:
        return float(n)
    return n / (n - 4.0 * math.sqrt(n - 1) + 4.0)


def q_n(n: int) -> float:
    """Liouville growth exponent for general stable solutions."""
    n = _check_n(n)
    if n <= 10:
        return -1.0
    return -n / 2 + math.sqrt(n - 1) + 1.0


def q_bar_n(n: int) -> float:
    """Known radial growth exponent from earlier work (comparison only)."""
    n = _check_n(n)
    if n <= 6:
        return -n + 2.0 * math.sqrt(n - 1) + 3.0
    return -n / 2 + math.sqrt(n - 1) + 2.0


def a_regularity(n: int) -> float:
    n = _check_n(n)
    if n <= 5:
        return (n - 1) / 2
    return 2.0 * math.sqrt(n - 1) - 2.0


def a_liouville(n: int, radial: bool = False) -> float:
    n = _check_n(n)
    if radial or n >= 11:
        return math.sqrt(n - 1) + 1.0
    return (n - 2) / 2


def discriminant_st(n: int, a: float) -> float:
    """``a(a+4) - 4n + 8``; the s-t form's discriminant is ``a^2 z^2`` times this."""
    _check_n(n)
    return a * (a + 4.0) - 4.0 * n + 8.0


def radial_coeff(n: int, a: float) -> float:
    """Coefficient of ``z`` in the radial reduction of ``L1 + L2 + L3``."""
    _check_n(n)
    return -a * a + 2.0 * a + n - 2.0


def radial_threshold(n: int) -> float:
    """Growth exponent ``-n + 2 sqrt(n-1) + 2`` of the radial Liouville theorem."""
    n = _check_n(n)
    return -n + 2.0 * math.sqrt(n - 1) + 2.0


@dataclass(frozen=True)
class ExponentRow:
    n: int
    p_n: float
    q_n: float
    q_bar_n: float
    a_reg: float
    a_liouville_general: float
    a_liouville_radial: float

    @classmethod
    def for_dimension(cls, n: int) -> "ExponentRow":
        return cls(
            n=_check_n(n),
            p_n=p_n(n),
            q_n=q_n(n),
            q_bar_n=q_bar_n(n),
            a_reg=a_regularity(n),
            a_liouville_general=a_liouville(n, radial=False),
            a_liouville_radial=a_liouville(n, radial=True),
        )


def table(n_lo: int, n_hi: int) -> list[ExponentRow]:
    n_lo, n_hi = _check_n(n_lo), _check_n(n_hi)
    if n_lo > n_hi:
        raise DomainError("need n_lo <= n_hi")
    return [ExponentRow.for_dimension(n) for n in range(n_lo, n_hi + 1)]


def table_csv(rows) -> str:
    """Render rows as CSV with a header; floats use ``repr`` for round-tripping."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f.name for f in fields(ExponentRow)])
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in astuple(row)])
    return buf.getvalue()
