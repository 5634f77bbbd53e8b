"""Sparse matrices and exact rank / kernel / solve over Q and F_p.

Matrices are stored as coordinate dicts; elimination works on
column-indexed row dicts with an incidence index so that only rows
actually meeting a pivot column are touched.

Over Q (and Z, where ranks agree with Q) elimination is
integer-preserving: rows are cross-multiplied and stripped of their
content instead of divided, so every intermediate entry is an integer.
Kernel vectors are back-substituted in exact rational arithmetic and
returned as primitive integer vectors.
"""

from fractions import Fraction
from heapq import heapify, heappop, heappush
from math import gcd

from .rings import ZZ, QQ, Ring


class SparseMatrix:
    """An immutable-by-convention sparse matrix: no zeros, no duplicates."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows, cols, data=None):
        if rows < 0 or cols < 0:
            raise ValueError("negative matrix dimensions")
        self.rows = rows
        self.cols = cols
        self.data = {}
        if data:
            for (i, j), v in data.items():
                if v == 0:
                    continue
                if not (0 <= i < rows and 0 <= j < cols):
                    raise ValueError(f"entry ({i},{j}) outside {rows}x{cols} matrix")
                self.data[i, j] = v

    @classmethod
    def from_triplets(cls, rows, cols, triplets):
        """Build from (row, col, value) triplets, accumulating duplicates."""
        data = {}
        for i, j, v in triplets:
            if not (0 <= i < rows and 0 <= j < cols):
                raise ValueError(f"entry ({i},{j}) outside {rows}x{cols} matrix")
            w = data.get((i, j), 0) + v
            if w == 0:
                data.pop((i, j), None)
            else:
                data[i, j] = w
        m = cls(rows, cols)
        m.data = data
        return m

    @classmethod
    def from_dense(cls, array):
        rows = len(array)
        cols = len(array[0]) if rows else 0
        return cls.from_triplets(
            rows, cols,
            ((i, j, v) for i, row in enumerate(array) for j, v in enumerate(row)))

    @classmethod
    def from_columns(cls, rows, columns):
        """Stack dict-vectors (index -> value) as the columns of a matrix."""
        return cls.from_triplets(
            rows, len(columns),
            ((i, j, v) for j, col in enumerate(columns) for i, v in col.items()))

    def triplets(self):
        return sorted((i, j, v) for (i, j), v in self.data.items())

    def to_dense(self):
        out = [[0] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.data.items():
            out[i][j] = v
        return out

    def transpose(self):
        t = SparseMatrix(self.cols, self.rows)
        t.data = {(j, i): v for (i, j), v in self.data.items()}
        return t

    def row_dicts(self):
        rows = [{} for _ in range(self.rows)]
        for (i, j), v in self.data.items():
            rows[i][j] = v
        return rows

    def column(self, j):
        return {i: v for (i, jj), v in self.data.items() if jj == j}

    def columns(self):
        cols = [{} for _ in range(self.cols)]
        for (i, j), v in self.data.items():
            cols[j][i] = v
        return cols

    def matvec(self, vec):
        """Apply to a dict-vector, returning a dict-vector."""
        out = {}
        for (i, j), v in self.data.items():
            x = vec.get(j)
            if x:
                w = out.get(i, 0) + v * x
                if w == 0:
                    out.pop(i, None)
                else:
                    out[i] = w
        return out

    def matmul(self, other):
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        by_row = other.row_dicts()
        data = {}
        for (i, j), v in self.data.items():
            for k, w in by_row[j].items():
                key = (i, k)
                s = data.get(key, 0) + v * w
                if s == 0:
                    data.pop(key, None)
                else:
                    data[key] = s
        out = SparseMatrix(self.rows, other.cols)
        out.data = data
        return out

    def scaled(self, c):
        out = SparseMatrix(self.rows, self.cols)
        if c != 0:
            out.data = {k: c * v for k, v in self.data.items()}
        return out

    def reduced(self, ring):
        """Entrywise image under ring.normalize (e.g. reduction mod p)."""
        out = SparseMatrix(self.rows, self.cols)
        for k, v in self.data.items():
            w = ring.normalize(v)
            if w != 0:
                out.data[k] = w
        return out

    def is_zero(self):
        return not self.data

    def nnz(self):
        return len(self.data)

    def __eq__(self, other):
        return (isinstance(other, SparseMatrix) and self.rows == other.rows
                and self.cols == other.cols and self.data == other.data)

    def __repr__(self):
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={len(self.data)})"


def _strip_content(row):
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        for j in row:
            row[j] //= g
    return row


def _clear_denominators(row):
    den = 1
    for v in row.values():
        if isinstance(v, Fraction):
            den = den * v.denominator // gcd(den, v.denominator)
    if den != 1:
        return {j: int(v * den) for j, v in row.items()}
    return {j: int(v) for j, v in row.items()}


def _echelon(row_list, cols, p=None):
    """In-place sparse elimination; returns (pivots, echelon rows).

    ``pivots`` is the increasing list of pivot columns, one per returned
    row.  With p=None rows stay integral: when the pivot divides the
    eliminated entry the update is a plain row combination, otherwise
    the row is cross-multiplied and stripped of its content.  Otherwise
    arithmetic is mod p.
    """
    rows = [dict(r) for r in row_list if r]
    if p is None:
        rows = [_strip_content(_clear_denominators(r)) for r in rows]
        rows = [r for r in rows if r]
    col_rows = {}
    for idx, r in enumerate(rows):
        for j in r:
            col_rows.setdefault(j, set()).add(idx)
    used = set()
    pivots = []
    pivot_rows = []
    for j in sorted(col_rows):
        cand = [idx for idx in col_rows[j] if idx not in used]
        if not cand:
            continue
        if p is None:
            idx = min(cand, key=lambda i: (abs(rows[i][j]) != 1, len(rows[i]), abs(rows[i][j]), i))
        else:
            idx = min(cand, key=lambda i: (len(rows[i]), i))
        used.add(idx)
        pivots.append(j)
        piv_row = rows[idx]
        piv = piv_row[j]
        pivot_rows.append(piv_row)
        for other in col_rows[j] - {idx}:
            if other in used:
                continue
            row = rows[other]
            c = row[j]
            if p is None:
                q, rem = divmod(c, piv)
                if rem == 0:
                    new = dict(row)
                    for k, v in piv_row.items():
                        w = new.get(k, 0) - q * v
                        if w:
                            new[k] = w
                        else:
                            new.pop(k, None)
                else:
                    new = {k: piv * v for k, v in row.items()}
                    for k, v in piv_row.items():
                        w = new.get(k, 0) - c * v
                        if w:
                            new[k] = w
                        else:
                            new.pop(k, None)
                    _strip_content(new)
            else:
                f = c * pow(piv, -1, p) % p
                new = dict(row)
                for k, v in piv_row.items():
                    w = (new.get(k, 0) - f * v) % p
                    if w:
                        new[k] = w
                    else:
                        new.pop(k, None)
            for k in row:
                if k not in new:
                    col_rows[k].discard(other)
            for k in new:
                if k not in row:
                    col_rows.setdefault(k, set()).add(other)
            rows[other] = new
    return pivots, pivot_rows


def _kernel_from_echelon(pivots, pivot_rows, cols, p=None):
    """Back-substitute one kernel vector per free column."""
    pivot_set = set(pivots)
    basis = []
    for f in range(cols):
        if f in pivot_set:
            continue
        vec = {f: 1 if p is not None else Fraction(1)}
        # rows have increasing pivot columns; solve bottom-up
        for i in range(len(pivots) - 1, -1, -1):
            if pivots[i] > f:
                continue
            row = pivot_rows[i]
            acc = 0
            for j, v in row.items():
                if j == pivots[i]:
                    continue
                x = vec.get(j)
                if x:
                    acc += v * x
            if p is not None:
                val = -acc * pow(row[pivots[i]], -1, p) % p
            else:
                val = Fraction(-acc, row[pivots[i]])
            if val:
                vec[pivots[i]] = val
        if p is None:
            vec = _strip_content(_clear_denominators(vec))
        basis.append(vec)
    return basis


def _field_char(ring):
    if not isinstance(ring, Ring):
        raise TypeError(f"expected a Ring, got {type(ring).__name__}")
    if not ring.is_field:
        raise ValueError("ring Z is not a field here; use smith_normal_form / cohomology_at")
    return ring.p if ring.kind == "GF" else None


def rank(m, ring):
    """Rank over Q or F_p (for Z input, this is the rank over Q).

    Rank needs no echelon order, so pivots are chosen greedily:
    singleton rows first (their elimination generates no fill at all),
    then the sparsest column with the sparsest small-entry row in it
    (Markowitz-style).  Both queues are lazily-deleted heaps.
    """
    p = ring.p if ring.kind == "GF" else None
    rows = {}
    for (i, j), v in m.data.items():
        rows.setdefault(i, {})[j] = v
    if p is None:
        rows = {i: _strip_content(_clear_denominators(r)) for i, r in rows.items()}
    col_rows = {}
    for i, r in rows.items():
        for j in r:
            col_rows.setdefault(j, set()).add(i)
    col_heap = [(len(s), j) for j, s in col_rows.items()]
    heapify(col_heap)
    row_heap = [(len(r), i) for i, r in rows.items() if len(r) == 1]
    heapify(row_heap)
    rank_ = 0
    while col_rows:
        # fill-free first: a singleton row pivot only deletes entries
        i = j = None
        while row_heap:
            _cnt, cand_i = heappop(row_heap)
            r = rows.get(cand_i)
            if r is not None and len(r) == 1:
                i = cand_i
                j = next(iter(r))
                break
        if i is None:
            cnt, cand_j = heappop(col_heap)
            s = col_rows.get(cand_j)
            if s is None:
                continue
            if len(s) != cnt:
                heappush(col_heap, (len(s), cand_j))
                continue
            j = cand_j
            if p is None:
                i = min(s, key=lambda r_: (abs(rows[r_][j]) != 1, len(rows[r_]),
                                           abs(rows[r_][j]), r_))
            else:
                i = min(s, key=lambda r_: (len(rows[r_]), r_))
        piv_row = rows.pop(i)
        piv = piv_row[j]
        for jj in piv_row:
            s = col_rows.get(jj)
            if s is not None:
                s.discard(i)
                if not s:
                    del col_rows[jj]
        rank_ += 1
        for other in list(col_rows.get(j, ())):
            row = rows[other]
            c = row[j]
            if p is None:
                q, rem = divmod(c, piv)
                if rem == 0:
                    for k, v in piv_row.items():
                        w = row.get(k, 0) - q * v
                        if w:
                            if k not in row:
                                sk = col_rows.get(k)
                                if sk is None:
                                    col_rows[k] = {other}
                                    heappush(col_heap, (1, k))
                                else:
                                    sk.add(other)
                            row[k] = w
                        elif k in row:
                            del row[k]
                            sk = col_rows[k]
                            sk.discard(other)
                            if not sk:
                                del col_rows[k]
                    if len(row) == 1:
                        heappush(row_heap, (1, other))
                    elif not row:
                        del rows[other]
                    continue
                new = {k: piv * v for k, v in row.items()}
                for k, v in piv_row.items():
                    w = new.get(k, 0) - c * v
                    if w:
                        new[k] = w
                    else:
                        new.pop(k, None)
                _strip_content(new)
            else:
                f = c * pow(piv, -1, p) % p
                new = dict(row)
                for k, v in piv_row.items():
                    w = (new.get(k, 0) - f * v) % p
                    if w:
                        new[k] = w
                    else:
                        new.pop(k, None)
            for k in row:
                if k not in new:
                    sk = col_rows.get(k)
                    if sk is not None:
                        sk.discard(other)
                        if not sk:
                            del col_rows[k]
            for k in new:
                if k not in row:
                    sk = col_rows.get(k)
                    if sk is None:
                        col_rows[k] = {other}
                        heappush(col_heap, (1, k))
                    else:
                        sk.add(other)
            if new:
                rows[other] = new
                if len(new) == 1:
                    heappush(row_heap, (1, other))
            else:
                del rows[other]
    return rank_


def rank_and_kernel(m, ring):
    """Exact (rank, kernel basis) over a field; kernel vectors are dicts.

    Over Q the kernel vectors are primitive integer vectors spanning the
    same subspace.
    """
    p = _field_char(ring)
    pivots, pivot_rows = _echelon(m.row_dicts(), m.cols, p)
    basis = _kernel_from_echelon(pivots, pivot_rows, m.cols, p)
    return len(pivots), basis


def solve(m, target, ring):
    """One solution x of m x = target over a field, or None.

    ``target`` is a dict-vector; the solution is a dict-vector (over Q
    with Fraction entries where needed).
    """
    p = _field_char(ring)
    aug = m.row_dicts()
    n = m.cols
    for i, v in target.items():
        if v:
            aug[i] = dict(aug[i])
            aug[i][n] = v
    pivots, pivot_rows = _echelon(aug, n + 1, p)
    if n in pivots:
        return None
    vec = {}
    for i in range(len(pivots) - 1, -1, -1):
        row = pivot_rows[i]
        acc = row.get(n, 0)
        for j, v in row.items():
            if j in (pivots[i], n):
                continue
            x = vec.get(j)
            if x:
                acc -= v * x
        if p is not None:
            val = acc * pow(row[pivots[i]], -1, p) % p
        else:
            val = Fraction(acc, row[pivots[i]])
        if val:
            vec[pivots[i]] = val
    return vec


def rank_of_columns(columns, ring):
    """Rank of a list of dict-vectors."""
    p = ring.p if ring.kind == "GF" else None
    rows = {}
    for j, col in enumerate(columns):
        for i, v in col.items():
            rows.setdefault(i, {})[j] = v
    pivots, _ = _echelon(list(rows.values()), len(columns), p)
    return len(pivots)
