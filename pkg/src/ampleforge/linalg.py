"""Exact sparse linear algebra over F_p.

Vectors are dicts {row_key: nonzero coefficient}; row keys are arbitrary
orderable hashables (typically (slot, exponent-tuple) pairs), so graded
pieces never have to be enumerated densely.  Elimination is column-wise
with pivots chosen at each column's largest row key, which makes every
routine deterministic for a fixed column order.
"""

from __future__ import annotations


def vec_add_scaled(dst: dict, src: dict, c: int, p: int) -> None:
    """dst += c*src in place."""
    for k, v in src.items():
        w = (dst.get(k, 0) + c * v) % p
        if w:
            dst[k] = w
        else:
            dst.pop(k, None)


def _reduce(col: dict, pivots: dict, p: int) -> dict:
    """Eliminate col against the pivot columns; returns the remainder."""
    col = dict(col)
    while col:
        key = max(col)
        piv = pivots.get(key)
        if piv is None:
            return col
        vec_add_scaled(col, piv, (-col[key]) % p, p)
    return col


def _insert_pivot(col: dict, pivots: dict, p: int) -> None:
    key = max(col)
    inv = pow(col[key], p - 2, p)
    pivots[key] = {k: (v * inv) % p for k, v in col.items()}


def rank(columns, p: int) -> int:
    """Rank of the span of the given sparse columns."""
    pivots: dict = {}
    r = 0
    for col in columns:
        rem = _reduce(col, pivots, p)
        if rem:
            _insert_pivot(rem, pivots, p)
            r += 1
    return r


class Echelon:
    """Incremental column echelon with optional combination tracking."""

    def __init__(self, p: int, track: bool = False):
        self.p = p
        self.track = track
        self.pivots: dict = {}          # row_key -> monic column
        self.combos: dict = {}          # row_key -> combo dict (if tracking)
        self.n_added = 0

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def _reduce_tracked(self, col: dict, combo: dict):
        col = dict(col)
        combo = dict(combo)
        p = self.p
        while col:
            key = max(col)
            piv = self.pivots.get(key)
            if piv is None:
                return col, combo
            c = (-col[key]) % p
            vec_add_scaled(col, piv, c, p)
            if self.track:
                vec_add_scaled(combo, self.combos[key], c, p)
        return col, combo

    def add(self, col: dict, tag=None):
        """Insert a column.

        Returns None if the column was independent (a new pivot).  Otherwise
        returns the zero-combination: a dict {tag: coeff} with sum(coeff *
        column_tag) = 0 and the new column's own tag carrying coefficient 1.
        Invariant while reducing: current = sum(combo[t] * original_t).
        """
        combo = {tag: 1} if self.track else {}
        rem, combo = self._reduce_tracked(col, combo)
        self.n_added += 1
        if not rem:
            return combo
        key = max(rem)
        inv = pow(rem[key], self.p - 2, self.p)
        self.pivots[key] = {k: (v * inv) % self.p for k, v in rem.items()}
        if self.track:
            self.combos[key] = {k: (v * inv) % self.p for k, v in combo.items()}
        return None

    def reduce(self, col: dict) -> dict:
        """Remainder of col against the current pivots (no insertion)."""
        return _reduce(col, self.pivots, self.p)

    def solve(self, col: dict):
        """Express col in the span; dict tag->coeff, or None if outside."""
        if not self.track:
            raise RuntimeError("Echelon built without tracking")
        rem, combo = self._reduce_tracked(col, {})
        if rem:
            return None
        return {k: (-v) % self.p for k, v in combo.items()}


def kernel_basis(columns, p: int):
    """Kernel of the matrix whose columns are given, as combination dicts.

    Returns a list of dicts {column_index: coeff}; the list order follows
    the column order, so output is deterministic.
    """
    ech = Echelon(p, track=True)
    out = []
    for i, col in enumerate(columns):
        combo = ech.add(col, tag=i)
        if combo is not None:
            out.append(combo)
    return out
