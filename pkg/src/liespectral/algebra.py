"""Lie algebras by structure constants: validation, built-in families,
Killing form, characteristic-coefficient invariants, weight gradings.

Structure constants are stored only for i < j; brackets with i >= j are
derived by antisymmetry.  Built-in families use integral matrix-unit
bases so that every algebra specializes to all coefficient rings.
"""

import json
import re
from dataclasses import dataclass
from fractions import Fraction

from .linalg import SparseMatrix, rank as matrix_rank
from .rings import QQ, ZZ, Ring, parse_ring

DEFAULT_DIM_CAP = 10


@dataclass(frozen=True)
class Violation:
    kind: str      # "jacobi" | "weight"
    triple: tuple  # basis indices, 0-based

    def __str__(self):
        return f"{self.kind} violation at basis triple {self.triple}"


@dataclass(frozen=True)
class LieAlgebra:
    """dim, ring, sparse constants c_ij^k for i < j, optional weights."""

    name: str
    dim: int
    ring: Ring
    constants: tuple      # ((i, j, k, value), ...), 0-based, i < j
    basis_names: tuple
    weights: tuple | None = None  # one integer vector per basis element

    def __post_init__(self):
        seen = set()
        for (i, j, k, v) in self.constants:
            if not (0 <= i < j < self.dim and 0 <= k < self.dim):
                raise ValueError(f"constant index ({i},{j},{k}) out of range")
            if (i, j, k) in seen:
                raise ValueError(f"duplicate constant for ({i},{j},{k})")
            if v == 0:
                raise ValueError("zero structure constant stored")
            seen.add((i, j, k))
        if len(self.basis_names) != self.dim:
            raise ValueError("need one basis name per dimension")
        if self.weights is not None:
            if len(self.weights) != self.dim:
                raise ValueError("need one weight vector per basis element")
            lengths = {len(w) for w in self.weights}
            if len(lengths) > 1:
                raise ValueError("weight vectors must share a common length")

    def bracket_table(self):
        """dict (i,j) -> {k: c_ij^k} with i < j."""
        table = {}
        for (i, j, k, v) in self.constants:
            table.setdefault((i, j), {})[k] = v
        return table

    def bracket(self, i, j):
        """[e_i, e_j] as {k: coefficient}; antisymmetry for i >= j."""
        if i == j:
            return {}
        sign = 1
        if i > j:
            i, j, sign = j, i, -1
        out = {}
        for (a, b, k, v) in self.constants:
            if a == i and b == j:
                out[k] = self.ring.normalize(sign * v)
        return {k: v for k, v in out.items() if v != 0}

    def ad_matrix(self, i):
        """Matrix of ad(e_i) acting on basis columns."""
        mat = [[0] * self.dim for _ in range(self.dim)]
        for j in range(self.dim):
            for k, v in self.bracket(i, j).items():
                mat[k][j] = v
        return mat

    def to_ring(self, ring):
        if ring == self.ring:
            return self
        consts = []
        for (i, j, k, v) in self.constants:
            w = ring.normalize(v)
            if w != 0:
                consts.append((i, j, k, w))
        return LieAlgebra(self.name, self.dim, ring, tuple(consts),
                          self.basis_names, self.weights)

    def weight_rank(self):
        if self.weights is None:
            return 0
        return len(self.weights[0]) if self.weights else 0

    def to_json(self):
        """The documented interchange format; bit-exact round-trip."""
        consts = []
        for (i, j, k, v) in sorted(self.constants):
            if isinstance(v, Fraction):
                consts.append([i + 1, j + 1, k + 1, f"{v.numerator}/{v.denominator}"])
            else:
                consts.append([i + 1, j + 1, k + 1, v])
        doc = {"name": self.name, "dim": self.dim, "ring": str(self.ring),
               "constants": consts}
        if self.weights is not None:
            doc["weights"] = [list(w) for w in self.weights]
        return json.dumps(doc, indent=2, sort_keys=False)

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        ring = parse_ring(doc["ring"])
        dim = int(doc["dim"])
        consts = []
        for i, j, k, v in doc["constants"]:
            if isinstance(v, str):
                num, den = v.split("/")
                v = Fraction(int(num), int(den))
            consts.append((i - 1, j - 1, k - 1, ring.normalize(v)))
        weights = doc.get("weights")
        if weights is not None:
            weights = tuple(tuple(int(x) for x in w) for w in weights)
        names = tuple(doc.get("basis_names", (f"x{i+1}" for i in range(dim))))
        return cls(doc.get("name", "algebra"), dim, ring, tuple(consts), names, weights)


def jacobi_check(L):
    """None if the Jacobi identity (and weight compatibility) holds,
    else the first violating triple."""
    ring = L.ring
    if L.weights is not None:
        for (i, j, k, v) in L.constants:
            wi, wj, wk = L.weights[i], L.weights[j], L.weights[k]
            if tuple(a + b for a, b in zip(wi, wj)) != tuple(wk):
                return Violation("weight", (i, j, k))
    for i in range(L.dim):
        for j in range(i + 1, L.dim):
            for k in range(j + 1, L.dim):
                acc = {}
                for (a, b, c) in ((i, j, k), (j, k, i), (k, i, j)):
                    for m, v in L.bracket(a, b).items():
                        for l, w in L.bracket(m, c).items():
                            acc[l] = acc.get(l, 0) + v * w
                if any(ring.normalize(v) != 0 for v in acc.values()):
                    return Violation("jacobi", (i, j, k))
    return None


# ---------------------------------------------------------------------------
# built-in families, via explicit integral matrix realizations

def _matrix_bracket(A, B):
    AB = {}
    for (i, k), a in A.items():
        for (kk, j), b in B.items():
            if k == kk:
                AB[i, j] = AB.get((i, j), 0) + a * b
    for (i, k), b in B.items():
        for (kk, j), a in A.items():
            if k == kk:
                AB[i, j] = AB.get((i, j), 0) - b * a
    return {k: v for k, v in AB.items() if v != 0}


def _from_matrices(name, mats, names, decompose, ring, weights=None, cap=DEFAULT_DIM_CAP):
    dim = len(mats)
    if dim > cap:
        raise ValueError(f"{name}: dimension {dim} exceeds cap {cap}")
    consts = []
    for i in range(dim):
        for j in range(i + 1, dim):
            coeffs = decompose(_matrix_bracket(mats[i], mats[j]))
            for k, v in sorted(coeffs.items()):
                v = ring.normalize(v)
                if v != 0:
                    consts.append((i, j, k, v))
    return LieAlgebra(name, dim, ring, tuple(consts), tuple(names), weights)


def _weights_from_cartan(L, cartan):
    """Dual weights: minus the ad-eigenvalue vector under the Cartan basis."""
    weights = []
    for j in range(L.dim):
        if j in cartan:
            weights.append((0,) * len(cartan))
            continue
        vec = []
        for c in cartan:
            br = L.bracket(c, j)
            if set(br) - {j}:
                raise ValueError("basis element is not a Cartan eigenvector")
            vec.append(-br.get(j, 0))
        weights.append(tuple(vec))
    return tuple(weights)


def sl(n, ring=ZZ, cap=DEFAULT_DIM_CAP):
    """sl(n): h_k = E_kk - E_(k+1)(k+1), then E_ij (i != j), with root weights."""
    if n < 2:
        raise ValueError("sl(n) needs n >= 2")
    mats, names = [], []
    for k in range(n - 1):
        mats.append({(k, k): 1, (k + 1, k + 1): -1})
        names.append(f"h{k+1}")
    offdiag = [(i, j) for i in range(n) for j in range(n) if i != j]
    for (i, j) in offdiag:
        mats.append({(i, j): 1})
        names.append(f"E{i+1}{j+1}")

    def decompose(M):
        out = {}
        diag_acc = 0
        for k in range(n - 1):
            diag_acc += M.get((k, k), 0)
            if diag_acc:
                out[k] = diag_acc
        for idx, (i, j) in enumerate(offdiag):
            v = M.get((i, j), 0)
            if v:
                out[n - 1 + idx] = v
        return out

    L = _from_matrices(f"sl{n}", mats, names, decompose, ring, cap=cap)
    return LieAlgebra(L.name, L.dim, L.ring, L.constants, L.basis_names,
                      _weights_from_cartan(L, set(range(n - 1))))


def sp(two_n, ring=ZZ, cap=DEFAULT_DIM_CAP):
    """sp(2n) in the block form [[A, B], [C, -A^T]], B and C symmetric."""
    if two_n < 2 or two_n % 2:
        raise ValueError("sp(2n) needs an even size >= 2")
    n = two_n // 2
    mats, names = [], []
    for i in range(n):  # Cartan first
        mats.append({(i, i): 1, (n + i, n + i): -1})
        names.append(f"a{i+1}{i+1}")
    for i in range(n):
        for j in range(n):
            if i != j:
                mats.append({(i, j): 1, (n + j, n + i): -1})
                names.append(f"a{i+1}{j+1}")
    for i in range(n):
        for j in range(i, n):
            m = {(i, n + j): 1}
            if i != j:
                m[j, n + i] = 1
            mats.append(m)
            names.append(f"b{i+1}{j+1}")
    for i in range(n):
        for j in range(i, n):
            m = {(n + i, j): 1}
            if i != j:
                m[n + j, i] = 1
            mats.append(m)
            names.append(f"c{i+1}{j+1}")

    index = {}
    for idx, m in enumerate(mats):
        rep = min(m)  # each matrix unit occurs in exactly one basis element
        index[rep] = (idx, m[rep])

    def decompose(M):
        out = {}
        for key, v in M.items():
            if key in index:
                idx, unit = index[key]
                out[idx] = v // unit if unit != 1 else v
        return out

    L = _from_matrices(f"sp{two_n}", mats, names, decompose, ring, cap=cap)
    return LieAlgebra(L.name, L.dim, L.ring, L.constants, L.basis_names,
                      _weights_from_cartan(L, set(range(n))))


def so(n, ring=ZZ, cap=DEFAULT_DIM_CAP):
    """so(n) on the antisymmetric matrices E_ij - E_ji, i < j (no weights)."""
    if n < 2:
        raise ValueError("so(n) needs n >= 2")
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    mats = [{(i, j): 1, (j, i): -1} for (i, j) in pairs]
    names = [f"L{i+1}{j+1}" for (i, j) in pairs]

    def decompose(M):
        out = {}
        for idx, (i, j) in enumerate(pairs):
            v = M.get((i, j), 0)
            if v:
                out[idx] = v
        return out

    return _from_matrices(f"so{n}", mats, names, decompose, ring, cap=cap)


def nonabelian2(ring=ZZ):
    """The non-abelian algebra of dimension 2: [x_e, x_h] = x_e."""
    return LieAlgebra("nonabelian2", 2, ring,
                      ((0, 1, 1, ring.normalize(-1)),),
                      ("h", "e"), ((0,), (1,)))


def abelian(n, ring=ZZ, cap=DEFAULT_DIM_CAP):
    if n > cap:
        raise ValueError(f"abelian({n}) exceeds cap {cap}")
    return LieAlgebra(f"abelian{n}", n, ring, (),
                      tuple(f"x{i+1}" for i in range(n)), None)


def direct_sum(A, B):
    """Direct sum; brackets across the summands vanish."""
    if A.ring != B.ring:
        raise ValueError("summands must share a coefficient ring")
    consts = list(A.constants)
    d = A.dim
    consts += [(i + d, j + d, k + d, v) for (i, j, k, v) in B.constants]
    weights = None
    if A.weights is not None and B.weights is not None:
        ra, rb = A.weight_rank(), B.weight_rank()
        weights = tuple(w + (0,) * rb for w in A.weights) + \
            tuple((0,) * ra + w for w in B.weights)
    return LieAlgebra(f"{A.name}+{B.name}", A.dim + B.dim, A.ring, tuple(consts),
                      A.basis_names + B.basis_names, weights)


_BUILTIN_RE = re.compile(r"^(sl|sp|so|abelian)[(:]?(\d+)\)?$")


def builtin(name, ring=ZZ, cap=DEFAULT_DIM_CAP):
    """Look up a built-in algebra: sl(n), sp(2n), so(n), nonabelian2,
    abelian(n), or direct_sum:<spec>+<spec>."""
    name = name.strip()
    if name.startswith("direct_sum:"):
        parts = name[len("direct_sum:"):].split("+")
        if len(parts) != 2:
            raise ValueError("direct_sum wants exactly two summands")
        return direct_sum(builtin(parts[0], ring, cap), builtin(parts[1], ring, cap))
    if name == "nonabelian2":
        return nonabelian2(ring)
    m = _BUILTIN_RE.match(name)
    if not m:
        raise ValueError(f"unknown builtin algebra {name!r}")
    family, size = m.group(1), int(m.group(2))
    maker = {"sl": sl, "sp": sp, "so": so, "abelian": abelian}[family]
    return maker(size, ring, cap)


# ---------------------------------------------------------------------------
# invariants

@dataclass(frozen=True)
class BilinearForm:
    matrix: tuple  # tuple of row tuples

    def __call__(self, a, b):
        return self.matrix[a][b]

    def is_symmetric(self):
        n = len(self.matrix)
        return all(self.matrix[a][b] == self.matrix[b][a]
                   for a in range(n) for b in range(n))

    def rank(self, ring=QQ):
        return matrix_rank(SparseMatrix.from_dense([list(r) for r in self.matrix]), ring)


@dataclass(frozen=True)
class InvariantPolynomial:
    """Element of S^s(g*): exponent-vector dict over the dual basis."""

    nvars: int
    degree: int
    coeffs: tuple  # ((exp tuple, value), ...) sorted

    def as_dict(self):
        return dict(self.coeffs)

    @classmethod
    def from_dict(cls, nvars, degree, coeffs):
        clean = {e: v for e, v in coeffs.items() if v != 0}
        for e in clean:
            if len(e) != nvars or sum(e) != degree:
                raise ValueError(f"exponent {e} is not degree {degree} in {nvars} vars")
        return cls(nvars, degree, tuple(sorted(clean.items())))


def killing_form(L):
    """K(a,b) = trace(ad(a) ad(b))."""
    ads = [L.ad_matrix(i) for i in range(L.dim)]
    n = L.dim
    rows = []
    for a in range(n):
        row = []
        for b in range(n):
            row.append(L.ring.normalize(
                sum(ads[a][k][j] * ads[b][j][k] for j in range(n) for k in range(n))))
        rows.append(tuple(row))
    return BilinearForm(tuple(rows))


def quadratic_invariant(form):
    """Promote a symmetric form to the degree-2 polynomial Q(y) = K(y, y)."""
    n = len(form.matrix)
    coeffs = {}
    for a in range(n):
        for b in range(a, n):
            v = form.matrix[a][b] if a == b else 2 * form.matrix[a][b]
            if v:
                exp = tuple(2 if i == a else 0 for i in range(n)) if a == b else \
                    tuple(1 if i in (a, b) else 0 for i in range(n))
                coeffs[exp] = v
    return InvariantPolynomial.from_dict(n, 2, coeffs)


def _poly_mul(p, q, nvars):
    out = {}
    for e1, v1 in p.items():
        for e2, v2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            w = out.get(e, 0) + v1 * v2
            if w:
                out[e] = w
            else:
                out.pop(e, None)
    return out


def _symbolic_det(entries, rows, cols, nvars):
    """Determinant by Laplace expansion; entries[(r,c)] are exponent dicts."""
    if not rows:
        return {(0,) * nvars: 1}
    r = rows[0]
    out = {}
    for pos, c in enumerate(cols):
        e = entries.get((r, c))
        if not e:
            continue
        sub = _symbolic_det(entries, rows[1:], cols[:pos] + cols[pos + 1:], nvars)
        term = _poly_mul(e, sub, nvars)
        sign = 1 if pos % 2 == 0 else -1
        for k, v in term.items():
            w = out.get(k, 0) + sign * v
            if w:
                out[k] = w
            else:
                out.pop(k, None)
    return out


def sigma_invariant(n, i, cap=DEFAULT_DIM_CAP):
    """The i-th characteristic-polynomial coefficient of a traceless matrix,
    as a polynomial on sl(n) in its dual basis (degree i, 2 <= i <= n)."""
    if not 2 <= i <= n:
        raise ValueError(f"sigma_{i} needs 2 <= i <= n = {n}")
    if n * n - 1 > cap and n > 4:
        raise ValueError(f"sl({n}) exceeds cap {cap}")
    nvars = n * n - 1
    offdiag = [(a, b) for a in range(n) for b in range(n) if a != b]
    entries = {}
    for r in range(n):
        diag = {}
        for k in (r - 1, r):
            if 0 <= k < n - 1:
                exp = tuple(1 if m == k else 0 for m in range(nvars))
                diag[exp] = 1 if k == r else -1
        if diag:
            entries[r, r] = diag
    for idx, (a, b) in enumerate(offdiag):
        exp = tuple(1 if m == n - 1 + idx else 0 for m in range(nvars))
        entries[a, b] = {exp: 1}
    total = {}
    import itertools
    for subset in itertools.combinations(range(n), i):
        minor = _symbolic_det(entries, list(subset), list(subset), nvars)
        for k, v in minor.items():
            w = total.get(k, 0) + v
            if w:
                total[k] = w
            else:
                total.pop(k, None)
    return InvariantPolynomial.from_dict(nvars, i, total)
