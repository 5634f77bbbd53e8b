"""Smith normal form over Z and cohomology of a two-map pair.

The SNF is computed by elementary row/column operations with pivots
chosen by minimal absolute value; column operations are tracked so that
saturated kernel lattices (and coordinates of sublattices inside them)
come out of the same elimination.  Naive SNF is entirely adequate here:
the Koszul blocks are sparse with entries bounded by small multiples of
the structure constants.
"""

from dataclasses import dataclass
from math import gcd

from .linalg import SparseMatrix, rank as field_rank
from .rings import ZZ, Ring


class CompositionError(ValueError):
    """d_out o d_in is nonzero where a cochain pair was expected."""


@dataclass(frozen=True)
class SmithForm:
    """Nonzero invariant factors d_1 | d_2 | ... of an integer matrix."""

    diagonal: tuple

    @property
    def rank(self):
        return len(self.diagonal)


@dataclass(frozen=True)
class CohomologyGroup:
    """ker/im at one spot of a complex: free rank plus prime-power torsion."""

    ring: Ring
    free_rank: int
    torsion: tuple = ()

    @property
    def dimension(self):
        if self.torsion:
            raise ValueError("torsion present; no single dimension over Z")
        return self.free_rank


def _check_int_entries(m):
    for v in m.data.values():
        if not isinstance(v, int):
            raise ValueError(f"integer matrix required, found entry {v!r}")


class _SmithWorker:
    """Mutable elimination state with optional column-transform tracking."""

    def __init__(self, m, track=False):
        self.rows, self.cols = m.rows, m.cols
        self.entries = dict(m.data)
        self.row_inc = {}
        self.col_inc = {}
        for (i, j) in self.entries:
            self.row_inc.setdefault(i, set()).add(j)
            self.col_inc.setdefault(j, set()).add(i)
        self.track = track
        if track:
            # V: original @ V == current;  Vinv == V^-1
            self.V = [{j: 1} for j in range(self.cols)]
            self.Vinv = [{j: 1} for j in range(self.cols)]

    def get(self, i, j):
        return self.entries.get((i, j), 0)

    def _set(self, i, j, v):
        if v:
            self.entries[i, j] = v
            self.row_inc.setdefault(i, set()).add(j)
            self.col_inc.setdefault(j, set()).add(i)
        elif (i, j) in self.entries:
            del self.entries[i, j]
            self.row_inc[i].discard(j)
            self.col_inc[j].discard(i)

    def swap_rows(self, i1, i2):
        if i1 == i2:
            return
        cols1 = {j: self.entries.pop((i1, j)) for j in list(self.row_inc.get(i1, ()))}
        cols2 = {j: self.entries.pop((i2, j)) for j in list(self.row_inc.get(i2, ()))}
        for j in cols1:
            self.col_inc[j].discard(i1)
        for j in cols2:
            self.col_inc[j].discard(i2)
        self.row_inc[i1], self.row_inc[i2] = set(), set()
        for j, v in cols2.items():
            self._set(i1, j, v)
        for j, v in cols1.items():
            self._set(i2, j, v)

    def swap_cols(self, j1, j2):
        if j1 == j2:
            return
        rows1 = {i: self.entries.pop((i, j1)) for i in list(self.col_inc.get(j1, ()))}
        rows2 = {i: self.entries.pop((i, j2)) for i in list(self.col_inc.get(j2, ()))}
        for i in rows1:
            self.row_inc[i].discard(j1)
        for i in rows2:
            self.row_inc[i].discard(j2)
        self.col_inc[j1], self.col_inc[j2] = set(), set()
        for i, v in rows2.items():
            self._set(i, j1, v)
        for i, v in rows1.items():
            self._set(i, j2, v)
        if self.track:
            self.V[j1], self.V[j2] = self.V[j2], self.V[j1]
            self.Vinv[j1], self.Vinv[j2] = self.Vinv[j2], self.Vinv[j1]

    def addmul_row(self, dst, src, q):
        # row dst += q * row src
        if q == 0:
            return
        for j in list(self.row_inc.get(src, ())):
            self._set(dst, j, self.get(dst, j) + q * self.entries[src, j])

    def addmul_col(self, dst, src, q):
        # col dst += q * col src
        if q == 0:
            return
        for i in list(self.col_inc.get(src, ())):
            self._set(i, dst, self.get(i, dst) + q * self.entries[i, src])
        if self.track:
            vd, vs = self.V[dst], self.V[src]
            for i, v in vs.items():
                w = vd.get(i, 0) + q * v
                if w:
                    vd[i] = w
                else:
                    vd.pop(i, None)
            # inverse op on Vinv: row src -= q * row dst
            rd, rs = self.Vinv[dst], self.Vinv[src]
            for i, v in rd.items():
                w = rs.get(i, 0) - q * v
                if w:
                    rs[i] = w
                else:
                    rs.pop(i, None)

    def negate_row(self, i):
        for j in self.row_inc.get(i, ()):
            self.entries[i, j] = -self.entries[i, j]

    def min_abs_entry(self, start):
        best = None
        for (i, j), v in self.entries.items():
            if i < start or j < start:
                continue
            key = (abs(v), i, j)
            if best is None or key < best[0]:
                best = (key, i, j)
                if abs(v) == 1:
                    break
        return None if best is None else (best[1], best[2])

    def active_in_cross(self, t):
        col = [i for i in self.col_inc.get(t, ()) if i > t]
        row = [j for j in self.row_inc.get(t, ()) if j > t]
        return col, row

    def diagonalize(self):
        """Reduce to diag(d_1..d_r, 0...) and return [d_1..d_r] (positive)."""
        diag = []
        t = 0
        while t < min(self.rows, self.cols):
            pos = self.min_abs_entry(t)
            if pos is None:
                break
            self.swap_rows(t, pos[0])
            self.swap_cols(t, pos[1])
            while True:
                piv = self.get(t, t)
                col, row = self.active_in_cross(t)
                if not col and not row:
                    # pivot must divide the rest of the submatrix
                    bad = None
                    for (i, j), v in self.entries.items():
                        if i > t and j > t and v % piv != 0:
                            bad = j
                            break
                    if bad is None:
                        break
                    self.addmul_col(t, bad, 1)
                    continue
                progressed = False
                for i in col:
                    q = self.entries[i, t] // piv
                    self.addmul_row(i, t, -q)
                    if (i, t) in self.entries:
                        # remainder is a strictly smaller pivot candidate
                        self.swap_rows(t, i)
                        progressed = True
                        break
                if progressed:
                    continue
                piv = self.get(t, t)
                for j in row:
                    q = self.entries[t, j] // piv
                    self.addmul_col(j, t, -q)
                    if (t, j) in self.entries:
                        self.swap_cols(t, j)
                        break
            piv = self.get(t, t)
            if piv < 0:
                self.negate_row(t)
                piv = -piv
            diag.append(piv)
            t += 1
        # enforce the divisibility chain d_i | d_{i+1}
        changed = True
        while changed:
            changed = False
            for i in range(len(diag) - 1):
                a, b = diag[i], diag[i + 1]
                if b % a != 0:
                    g = gcd(a, b)
                    diag[i], diag[i + 1] = g, a * b // g
                    changed = True
        return diag


def smith_normal_form(m):
    """SNF invariant factors of an integer SparseMatrix."""
    _check_int_entries(m)
    worker = _SmithWorker(m, track=False)
    return SmithForm(tuple(worker.diagonalize()))


def smith_with_kernel(m):
    """(SmithForm, saturated kernel basis, coordinate map) for m over Z.

    The kernel basis consists of integer dict-vectors spanning
    ker(m) as a direct summand of Z^cols.  ``coords(vec)`` rewrites an
    integer vector of ker(m) in that basis (exactly, or raises).
    """
    _check_int_entries(m)
    worker = _SmithWorker(m, track=True)
    diag = worker.diagonalize()
    r = len(diag)
    kernel = [dict(worker.V[j]) for j in range(r, m.cols)]
    vinv_rows = worker.Vinv

    def coords(vec):
        out = {}
        for pos in range(m.cols):
            acc = 0
            for i, v in vinv_rows[pos].items():
                x = vec.get(i)
                if x:
                    acc += v * x
            if acc:
                if pos < r:
                    raise ValueError("vector is not in the kernel lattice")
                out[pos - r] = acc
        return out

    return SmithForm(tuple(diag)), kernel, coords


def integer_kernel_basis(m):
    """Basis of the saturated lattice ker(m) in Z^cols."""
    return smith_with_kernel(m)[1]


def _prime_power_split(d):
    out = []
    q = 2
    while q * q <= d:
        if d % q == 0:
            e = 0
            while d % q == 0:
                d //= q
                e += 1
            out.append(q ** e)
        q += 1
    if d > 1:
        out.append(d)
    return out


def torsion_prime_powers(diagonal):
    """Split invariant factors > 1 into sorted prime powers."""
    out = []
    for d in diagonal:
        if d > 1:
            out.extend(_prime_power_split(d))
    return tuple(sorted(out))


def cohomology_at(d_in, d_out, ring, label=None):
    """Cohomology ker(d_out)/im(d_in) of the pair  A --d_in--> B --d_out--> C.

    Field case: the dimension, as free_rank.  Z case: free rank plus
    prime-power torsion coefficients, computed from the SNF of d_in
    written in a saturated basis of the cocycle lattice ker(d_out).
    """
    if d_in.rows != d_out.cols:
        raise ValueError(
            f"chain mismatch: d_in lands in dim {d_in.rows}, d_out starts at {d_out.cols}")
    composed = d_out.matmul(d_in)
    if ring.kind == "GF":
        composed = composed.reduced(ring)
    if not composed.is_zero():
        where = f" at {label}" if label else ""
        raise CompositionError(f"d_out o d_in != 0{where}")
    if ring.is_field:
        d_out_r = d_out.reduced(ring) if ring.kind == "GF" else d_out
        d_in_r = d_in.reduced(ring) if ring.kind == "GF" else d_in
        nullity = d_out.cols - field_rank(d_out_r, ring)
        dim = nullity - field_rank(d_in_r, ring)
        return CohomologyGroup(ring, dim)
    _, kernel, coords = smith_with_kernel(d_out)
    cols = [coords(col) for col in d_in.columns()]
    inside = SparseMatrix.from_triplets(
        len(kernel), len(cols),
        ((i, j, v) for j, col in enumerate(cols) for i, v in col.items()))
    snf = smith_normal_form(inside)
    return CohomologyGroup(ZZ, len(kernel) - snf.rank, torsion_prime_powers(snf.diagonal))
