"""Dense linear algebra over F_q with elements encoded as small integers.

An element with F_p-coordinates (v_0, ..., v_{f-1}) is encoded as
sum v_j p^j, so 0 and 1 keep their usual meaning.  All arithmetic goes
through precomputed q x q tables.
"""

from __future__ import annotations

from .ring import FiniteField, FqElem


class FqTables:
    __slots__ = ("field", "q", "add", "mul", "neg", "inv", "_digits")

    def __init__(self, field: FiniteField):
        self.field = field
        q, p, f = field.q, field.p, field.f
        self.q = q
        self._digits = [tuple((n // p ** j) % p for j in range(f)) for n in range(q)]
        elems = [FqElem(field, d) for d in self._digits]
        self.add = [[self.encode((a + b).v) for b in elems] for a in elems]
        self.mul = [[self.encode((a * b).v) for b in elems] for a in elems]
        self.neg = [self.encode((-a).v) for a in elems]
        self.inv = [0] + [self.encode(a.inverse().v) for a in elems[1:]]

    def encode(self, raw) -> int:
        p = self.field.p
        n = 0
        for c in reversed(raw[:self.field.f]):
            n = n * p + c % p
        return n

    def decode(self, n: int) -> tuple:
        return self._digits[n]

    def sub(self, a: int, b: int) -> int:
        return self.add[a][self.neg[b]]


def rref(F: FqTables, rows, ncols: int):
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    rows = [list(r) for r in rows]
    add, mul, neg, inv = F.add, F.mul, F.neg, F.inv
    pivots = []
    rank = 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        prow = rows[rank]
        s = inv[prow[c]]
        if s != 1:
            prow[:] = [mul[s][x] for x in prow]
        support = [j for j in range(c, ncols) if prow[j]]
        for i, row in enumerate(rows):
            if i != rank and row[c]:
                t = neg[row[c]]
                mt = mul[t]
                for j in support:
                    row[j] = add[row[j]][mt[prow[j]]]
        pivots.append(c)
        rank += 1
        if rank == len(rows):
            break
    return rows[:rank], pivots


def rank(F: FqTables, rows, ncols: int) -> int:
    return len(rref(F, rows, ncols)[1])


def span_basis(F: FqTables, vectors, ncols: int) -> list:
    """Canonical (RREF) basis of the span."""
    return [tuple(r) for r in rref(F, vectors, ncols)[0]]


def nullspace(F: FqTables, rows, ncols: int) -> list:
    """Canonical basis of {v : rows . v = 0}."""
    red, pivots = rref(F, rows, ncols)
    pivset = set(pivots)
    basis = []
    for fc in range(ncols):
        if fc in pivset:
            continue
        v = [0] * ncols
        v[fc] = 1
        for r, pc in zip(red, pivots):
            if r[fc]:
                v[pc] = F.neg[r[fc]]
        basis.append(v)
    return span_basis(F, basis, ncols)


def solve(F: FqTables, rows, rhs, ncols: int):
    """A solution of rows . v = rhs with free variables zero, or None."""
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, pivots = rref(F, aug, ncols + 1)
    if pivots and pivots[-1] == ncols:
        return None
    v = [0] * ncols
    for r, pc in zip(red, pivots):
        v[pc] = r[ncols]
    return v


def in_span(F: FqTables, basis, vectors, ncols: int) -> bool:
    r0 = rank(F, basis, ncols)
    return rank(F, list(basis) + list(vectors), ncols) == r0
