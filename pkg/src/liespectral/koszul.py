"""The bigraded dga E_0^{s,t} = Lambda^t(g*) (x) S^s(g*) with its two
anticommuting differentials.

Basis elements are pairs (ext, exp): a sorted tuple of exterior indices
and a dense exponent vector.  Products are normalized to this canonical
order with the sign induced by graded commutativity in the *total*
degree 2s + t (x_i has total degree 1, y_i total degree 2).

Sign convention.  The differentials extend
    d0(x_i) = -sum_{j<k} c_jk^i x_j x_k,     d0(y_i) = sum_{j,k} c_jk^i y_j x_k,
    d1(x_i) = y_i,                           d1(y_i) = 0
as derivations.  Normalizing products as above reproduces, entry for
entry, the classical Bockstein table of sl2 (d0(x_0) = x_+ x_-,
d0(y_+) = -2 y_0 x_+ + 2 y_+ x_0, ...), so no per-generator sign fudge
is needed; the identities d0^2 = d1^2 = d0 d1 + d1 d0 = 0 pin the
convention down and are checked mechanically by the test suite.

Only generator images are tabulated; block matrices apply the
derivation per basis element on demand, so memory scales with the
block, not with a multiplication table.
"""

from bisect import bisect_left
from itertools import combinations
from math import comb

from .linalg import SparseMatrix


def exponent_vectors(n, s):
    """All degree-s exponent vectors of length n, in descending lex order."""
    if n == 0:
        return [()] if s == 0 else []
    if n == 1:
        return [(s,)]
    out = []
    for head in range(s, -1, -1):
        for tail in exponent_vectors(n - 1, s - head):
            out.append((head,) + tail)
    return out


def block_basis(L, s, t):
    """Ordered monomial basis of E_0^{s,t}: exterior subset, then exponents."""
    if t < 0 or t > L.dim or s < 0:
        return []
    exps = exponent_vectors(L.dim, s)
    return [(ext, exp) for ext in combinations(range(L.dim), t) for exp in exps]


def block_size(L, s, t):
    if t < 0 or t > L.dim or s < 0:
        return 0
    return comb(L.dim, t) * comb(s + L.dim - 1, L.dim - 1)


def weight_of(L, element):
    """Sum of the generator weights (x_i and y_i carry the same weight)."""
    if L.weights is None:
        raise ValueError(f"{L.name} carries no weight assignment")
    ext, exp = element
    rank = L.weight_rank()
    total = [0] * rank
    for i in ext:
        for a, w in enumerate(L.weights[i]):
            total[a] += w
    for i, e in enumerate(exp):
        if e:
            for a, w in enumerate(L.weights[i]):
                total[a] += e * w
    return tuple(total)


def _generator_tables(L):
    """Images of the generators under d0, from the structure constants."""
    d0x = {i: [] for i in range(L.dim)}   # d0(x_i) = sum c * x_a x_b, a < b
    d0y = {i: [] for i in range(L.dim)}   # d0(y_i) = sum c * y_j x_k
    for (i, j, k, v) in L.constants:
        d0x[k].append((i, j, -v))
        d0y[k].append((i, j, v))    # c_ij^k y_i x_j
        d0y[k].append((j, i, -v))   # c_ji^k y_j x_i
    return d0x, d0y


def _merge_two(rest, m, a, b):
    """Sign and sorted result of rest[:m] + (a, b) + rest[m:], a < b."""
    inv = 0
    for idx, r in enumerate(rest):
        if idx < m:
            inv += (r > a) + (r > b)
        else:
            inv += (a > r) + (b > r)
    merged = tuple(sorted(rest + (a, b)))
    return (-1) ** (inv & 1), merged


def _wedge_right(ext, k):
    """Sign and result of ext ^ x_k (k appended, then sorted); None if k in ext."""
    pos = bisect_left(ext, k)
    if pos < len(ext) and ext[pos] == k:
        return None
    inv = len(ext) - pos  # elements of ext greater than k
    return (-1) ** (inv & 1), ext[:pos] + (k,) + ext[pos:]


def apply_d0(L, element, tables=None):
    """d0 of a basis element, as {basis element: integer/exact coefficient}."""
    d0x, d0y = tables if tables is not None else _generator_tables(L)
    ext, exp = element
    out = {}
    for m, i in enumerate(ext):
        rest = ext[:m] + ext[m + 1:]
        dsign = (-1) ** (m & 1)
        for (a, b, c) in d0x[i]:
            if a in rest or b in rest:
                continue
            msign, merged = _merge_two(rest, m, a, b)
            key = (merged, exp)
            w = out.get(key, 0) + dsign * msign * c
            if w:
                out[key] = w
            else:
                out.pop(key, None)
    tsign = (-1) ** (len(ext) & 1)
    for i, e in enumerate(exp):
        if not e:
            continue
        for (j, k, c) in d0y[i]:
            wedge = _wedge_right(ext, k)
            if wedge is None:
                continue
            wsign, merged = wedge
            new_exp = list(exp)
            new_exp[i] -= 1
            new_exp[j] += 1
            key = (merged, tuple(new_exp))
            w = out.get(key, 0) + tsign * wsign * e * c
            if w:
                out[key] = w
            else:
                out.pop(key, None)
    return out


def apply_d1(L, element):
    """d1 of a basis element: suspend one exterior factor at a time."""
    ext, exp = element
    out = {}
    for m, i in enumerate(ext):
        rest = ext[:m] + ext[m + 1:]
        new_exp = list(exp)
        new_exp[i] += 1
        key = (rest, tuple(new_exp))
        w = out.get(key, 0) + (-1) ** (m & 1)
        if w:
            out[key] = w
        else:
            out.pop(key, None)
    return out


def _matrix_between(L, ring, source, target_index, images, target_rows):
    # generator coefficients are already ring elements; only GF reduces
    modulus = ring.p if ring.kind == "GF" else None
    triplets = []
    for col, elem in enumerate(source):
        for key, c in images(elem).items():
            v = c % modulus if modulus else c
            if v != 0:
                triplets.append((target_index[key], col, v))
    return SparseMatrix.from_triplets(target_rows, len(source), triplets)


def build_d0(L, s, t, ring=None):
    """Matrix of d0: E_0^{s,t} -> E_0^{s,t+1} in the canonical bases."""
    ring = ring or L.ring
    source = block_basis(L, s, t)
    target = block_basis(L, s, t + 1)
    index = {e: i for i, e in enumerate(target)}
    tables = _generator_tables(L)
    return _matrix_between(L, ring, source, index,
                           lambda e: apply_d0(L, e, tables), len(target))


def build_d1(L, s, t, ring=None):
    """Matrix of d1: E_0^{s,t} -> E_0^{s+1,t-1} in the canonical bases."""
    ring = ring or L.ring
    source = block_basis(L, s, t)
    target = block_basis(L, s + 1, t - 1)
    index = {e: i for i, e in enumerate(target)}
    return _matrix_between(L, ring, source, index,
                           lambda e: apply_d1(L, e), len(target))


# kept for interface parity with the basis element tuple
BasisElement = tuple
CochainBlock = None  # assigned below


class _Block:
    """One (s,t) block: ordered basis, index, and the two outgoing maps."""

    __slots__ = ("s", "t", "basis", "index", "d0", "d1", "weights")

    def __init__(self, s, t):
        self.s = s
        self.t = t
        self.basis = None
        self.index = None
        self.d0 = None
        self.d1 = None
        self.weights = None


CochainBlock = _Block


class KoszulComplex:
    """Lazy cache of blocks and differentials for one algebra and ring."""

    def __init__(self, L, ring=None):
        self.L = L
        self.ring = ring or L.ring
        self._tables = _generator_tables(L)
        self._blocks = {}

    def _block(self, s, t):
        key = (s, t)
        if key not in self._blocks:
            self._blocks[key] = _Block(s, t)
        return self._blocks[key]

    def basis(self, s, t):
        b = self._block(s, t)
        if b.basis is None:
            b.basis = block_basis(self.L, s, t)
        return b.basis

    def index(self, s, t):
        b = self._block(s, t)
        if b.index is None:
            b.index = {e: i for i, e in enumerate(self.basis(s, t))}
        return b.index

    def size(self, s, t):
        return block_size(self.L, s, t)

    def d0(self, s, t):
        b = self._block(s, t)
        if b.d0 is None:
            b.d0 = self._build_d0(s, t)
        return b.d0

    def d1(self, s, t):
        b = self._block(s, t)
        if b.d1 is None:
            b.d1 = self._build_d1(s, t)
        return b.d1

    def drop_matrices(self, s, t):
        """Free the cached differentials of one block (memory control)."""
        key = (s, t)
        if key in self._blocks:
            self._blocks[key].d0 = None
            self._blocks[key].d1 = None

    def _build_d0(self, s, t):
        """Table-driven d0 block: the exterior image depends only on the
        exterior part and the polynomial moves only on the exponent, so
        both halves are tabulated once per block."""
        L = self.L
        n = L.dim
        nrows = self.size(s, t + 1)
        if t < 0 or t > n or nrows == 0:
            return SparseMatrix(nrows, self.size(s, t))
        target_index = self.index(s, t + 1)
        d0x, d0y = self._tables
        exts = list(combinations(range(n), t))
        exps = exponent_vectors(n, s)
        ext_img = {}
        wedge = {}
        for ext in exts:
            imgs = {}
            for m, i in enumerate(ext):
                rest = ext[:m] + ext[m + 1:]
                dsign = -1 if m & 1 else 1
                for (a, bb, c) in d0x[i]:
                    if a in rest or bb in rest:
                        continue
                    msign, merged = _merge_two(rest, m, a, bb)
                    w = imgs.get(merged, 0) + dsign * msign * c
                    if w:
                        imgs[merged] = w
                    elif merged in imgs:
                        del imgs[merged]
            ext_img[ext] = list(imgs.items())
            wedge[ext] = [_wedge_right(ext, k) for k in range(n)]
        poly_img = []
        for exp in exps:
            terms = []
            for i, e in enumerate(exp):
                if e:
                    for (j, k, c) in d0y[i]:
                        if j == i:
                            ne = exp
                        else:
                            ne = exp[:i] + (e - 1,) + exp[i + 1:]
                            ne = ne[:j] + (ne[j] + 1,) + ne[j + 1:]
                        terms.append((ne, k, e * c))
            poly_img.append(terms)
        acc = {}
        tsign = -1 if t & 1 else 1
        col = 0
        for ext in exts:
            eimg = ext_img[ext]
            wrow = wedge[ext]
            for pi, exp in enumerate(exps):
                for merged, c in eimg:
                    key = (target_index[merged, exp], col)
                    acc[key] = acc.get(key, 0) + c
                for (ne, k, c) in poly_img[pi]:
                    wk = wrow[k]
                    if wk is None:
                        continue
                    key = (target_index[wk[1], ne], col)
                    acc[key] = acc.get(key, 0) + tsign * wk[0] * c
                col += 1
        return self._finish(acc, nrows, col)

    def _build_d1(self, s, t):
        L = self.L
        n = L.dim
        nrows = self.size(s + 1, t - 1)
        if t < 1 or t > n:
            return SparseMatrix(nrows, self.size(s, t))
        target_index = self.index(s + 1, t - 1)
        exts = list(combinations(range(n), t))
        exps = exponent_vectors(n, s)
        d1_ext = {ext: [(ext[:m] + ext[m + 1:], ext[m], -1 if m & 1 else 1)
                        for m in range(t)] for ext in exts}
        acc = {}
        col = 0
        for ext in exts:
            moves = d1_ext[ext]
            for exp in exps:
                for rest, i, sign in moves:
                    ne = exp[:i] + (exp[i] + 1,) + exp[i + 1:]
                    key = (target_index[rest, ne], col)
                    acc[key] = acc.get(key, 0) + sign
                col += 1
        return self._finish(acc, nrows, col)

    def _finish(self, acc, nrows, ncols):
        if self.ring.kind == "GF":
            p = self.ring.p
            acc = {k: v % p for k, v in acc.items()}
        out = SparseMatrix(nrows, ncols)
        out.data = {k: v for k, v in acc.items() if v}
        return out

    def element_weights(self, s, t):
        b = self._block(s, t)
        if b.weights is None:
            b.weights = [weight_of(self.L, e) for e in self.basis(s, t)]
        return b.weights

    def weight_partition(self, s, t):
        """Column indices of the block grouped by weight class."""
        parts = {}
        for i, w in enumerate(self.element_weights(s, t)):
            parts.setdefault(w, []).append(i)
        return parts

    def evict(self, s):
        """Drop cached blocks at Hodge degree s (memory control for sweeps)."""
        for key in [k for k in self._blocks if k[0] == s]:
            del self._blocks[key]

    def polynomial_vector(self, s, poly_coeffs):
        """Coordinates of a polynomial (exponent dict) in the (s, 0) block."""
        index = self.index(s, 0)
        out = {}
        for exp, v in poly_coeffs.items():
            w = self.ring.normalize(v)
            if w != 0:
                out[index[((), exp)]] = w
        return out

    def cochain_vector(self, s, t, terms):
        """Coordinates of {(ext, exp): coeff} in the (s, t) block."""
        index = self.index(s, t)
        out = {}
        for key, v in terms.items():
            w = self.ring.normalize(v)
            if w != 0:
                out[index[key]] = w
        return out


def submatrix(m, row_indices, col_indices):
    """Extract a submatrix, reindexed densely (for weight strata)."""
    rmap = {r: i for i, r in enumerate(row_indices)}
    cmap = {c: i for i, c in enumerate(col_indices)}
    data = {}
    for (i, j), v in m.data.items():
        if i in rmap and j in cmap:
            data[rmap[i], cmap[j]] = v
    out = SparseMatrix(len(row_indices), len(col_indices))
    out.data = data
    return out


def partition_matrix(m, row_parts, col_parts):
    """Split a weight-preserving map into its strata in one pass.

    row_parts/col_parts map weight -> index list; returns
    {weight: SparseMatrix}.  Entries crossing distinct weights would be
    dropped, but the differentials never produce any.
    """
    rmaps = {}
    for w, idx in row_parts.items():
        for i, r in enumerate(idx):
            rmaps[r] = (w, i)
    cmaps = {}
    for w, idx in col_parts.items():
        for i, c in enumerate(idx):
            cmaps[c] = (w, i)
    data = {w: {} for w in col_parts}
    for (i, j), v in m.data.items():
        wc, jj = cmaps[j]
        wr, ii = rmaps[i]
        if wr == wc:
            data[wc][ii, jj] = v
    out = {}
    for w, cols in col_parts.items():
        sub = SparseMatrix(len(row_parts.get(w, ())), len(cols))
        sub.data = data[w]
        out[w] = sub
    return out


def dump_block(m, path):
    """Cross-check dump: 'rows cols nnz' header then 'row col value' lines."""
    with open(path, "w") as fh:
        fh.write(f"{m.rows} {m.cols} {m.nnz()}\n")
        for i, j, v in m.triplets():
            fh.write(f"{i} {j} {v}\n")
