"""Sparse Gaussian elimination over an exact field.

Vectors are dicts keyed by any totally ordered hashable (monomial exponent
tuples, coordinate labels).  Pivots are chosen as the largest key so results
are deterministic for a fixed insertion order.
"""

from __future__ import annotations

from typing import Optional

from .rings import QQ


class SpanSolver:
    """Incremental row space with expression tracking.

    add() returns whether the vector enlarged the span; solve() writes a
    vector as a combination of the previously added ones.
    """

    def __init__(self, field=QQ):
        self.field = field
        self.rows: list = []   # (pivot_key, vector, expression dict)
        self.count = 0

    def _reduce(self, vec: dict):
        f = self.field
        vec = {k: v for k, v in vec.items() if not f.is_zero(v)}
        expr: dict = {}
        for pivot, rvec, rexpr in self.rows:
            c = vec.get(pivot)
            if c is None or f.is_zero(c):
                continue
            for k, v in rvec.items():
                cur = vec.get(k, f.zero())
                s = f.sub(cur, f.mul(c, v))
                if f.is_zero(s):
                    vec.pop(k, None)
                else:
                    vec[k] = s
            for i, v in rexpr.items():
                cur = expr.get(i, f.zero())
                s = f.add(cur, f.mul(c, v))
                if f.is_zero(s):
                    expr.pop(i, None)
                else:
                    expr[i] = s
        return vec, expr

    def add(self, vec: dict) -> bool:
        f = self.field
        red, expr = self._reduce(vec)
        idx = self.count
        self.count += 1
        if not red:
            return False
        pivot = max(red)
        inv = f.invert(red[pivot])
        nvec = {k: f.canon(f.mul(v, inv)) for k, v in red.items()}
        nexpr = {i: f.canon(f.neg(f.mul(v, inv))) for i, v in expr.items()}
        nexpr[idx] = f.canon(inv)
        self.rows.append((pivot, nvec, nexpr))
        return True

    def rank(self) -> int:
        return len(self.rows)

    def solve(self, vec: dict) -> Optional[dict]:
        """Coefficients over added vectors reproducing vec, or None."""
        red, expr = self._reduce(vec)
        if red:
            return None
        return expr

    def contains(self, vec: dict) -> bool:
        red, _ = self._reduce(vec)
        return not red


class NullspaceBuilder:
    """RREF of a growing constraint matrix; kernel basis on demand.

    Columns are integers 0..ncols-1.  The kernel basis is echelonized with
    one basis vector per free column, unit there, deterministic.
    """

    def __init__(self, ncols: int, field=QQ):
        self.ncols = ncols
        self.field = field
        self.pivot_rows: dict = {}   # pivot column -> row dict

    def add(self, row: dict) -> None:
        f = self.field
        row = {k: v for k, v in row.items() if not f.is_zero(v)}
        # eliminate every existing pivot column so the invariant "pivot
        # rows are zero at all other pivot columns" is preserved
        while True:
            hit = None
            for k in row:
                if k in self.pivot_rows:
                    hit = k
                    break
            if hit is None:
                break
            c = row[hit]
            for k, v in self.pivot_rows[hit].items():
                cur = row.get(k, f.zero())
                s = f.sub(cur, f.mul(c, v))
                if f.is_zero(s):
                    row.pop(k, None)
                else:
                    row[k] = s
        if not row:
            return
        p = min(row)
        inv = f.invert(row[p])
        norm = {k: f.canon(f.mul(v, inv)) for k, v in row.items()}
        # back-eliminate p from the other rows
        for q, other in list(self.pivot_rows.items()):
            c = other.get(p)
            if c is None or f.is_zero(c):
                continue
            new = dict(other)
            for k, v in norm.items():
                cur = new.get(k, f.zero())
                s = f.sub(cur, f.mul(c, v))
                if f.is_zero(s):
                    new.pop(k, None)
                else:
                    new[k] = s
            self.pivot_rows[q] = new
        self.pivot_rows[p] = norm

    def rank(self) -> int:
        return len(self.pivot_rows)

    def kernel_basis(self) -> list:
        f = self.field
        free = [j for j in range(self.ncols) if j not in self.pivot_rows]
        basis = []
        for j in free:
            vec = {j: f.one()}
            for p, row in self.pivot_rows.items():
                c = row.get(j)
                if c is not None and not f.is_zero(c):
                    vec[p] = f.canon(f.neg(c))
            basis.append(vec)
        return basis
