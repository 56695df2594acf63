"""Pure-Python exact rank kernel (sparse rows, unbounded integers)."""

from __future__ import annotations

from math import gcd


def _primitive(row: dict) -> dict:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    return {c: v // g for c, v in row.items()}


def integer_rank(rows, ncols: int) -> int:
    """Rank over Q of an integer matrix given as sparse rows ``{col: value}``.

    Fraction-free incremental echelon: each incoming row is reduced against
    the stored pivot rows, cross-multiplying by ``pivot/g`` and ``entry/g``
    and then dividing out the row content, until it either vanishes or opens
    a new leading column.
    """
    pivots: dict = {}
    for raw in rows:
        row = {c: v for c, v in raw.items() if v}
        while row:
            lead = min(row)
            piv = pivots.get(lead)
            if piv is None:
                pivots[lead] = _primitive(row)
                break
            a, b = piv[lead], row[lead]
            g = gcd(a, b)
            fa, fb = a // g, b // g
            new = {c: v * fa for c, v in row.items()}
            for c, v in piv.items():
                new[c] = new.get(c, 0) - v * fb
            row = _primitive({c: v for c, v in new.items() if v})
    return len(pivots)
