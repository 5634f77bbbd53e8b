"""E_1 = H*(g, S^s(ad*)) blockwise, higher pages of the classifying
spectral sequence inside a Hodge truncation window, weight-stratified
reports, and Euler-Poincare checks.

Pages beyond E_1 are computed by the filtration-subquotient method on
the total complex T = d0 + d1: at filtration s and total degree
m = 2s + t,

    E_r^{s,t}  =  Z_r^s / (Z_{r-1}^{s+1} + T Z_{r-1}^{s-r+1}),
    Z_k^s      =  { x in F^s T^m : T x in F^{s+k} },

so every page entry and every d_r rank is a difference of two sparse
ranks.  The elementwise zig-zag of the construction is kept as a test
cross-check only.

Truncating at Hodge degree N corrupts entries whose zig-zag legs leave
the window; an entry of page r is reliable iff s <= N - r + 1 and the
reports carry that predicate explicitly.
"""

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .koszul import KoszulComplex, partition_matrix
from .linalg import SparseMatrix, rank as matrix_rank, rank_and_kernel, rank_of_columns
from .rings import Ring


def stable_page_index(dim):
    """E_m = E_infinity once m > (dim+1)/2."""
    return (dim + 1) // 2 + 1


def _require_field(ring):
    if not ring.is_field:
        raise ValueError("page computations need a field; use the torsion "
                         "module for integral cohomology")


@dataclass
class PageReport:
    """Dimensions of one page inside the window, with validity bookkeeping."""

    algebra: str
    ring: str
    r: int
    window: int
    entries: dict = field(default_factory=dict)   # (s,t) -> nonzero dim
    ranks: dict = field(default_factory=dict)     # (s,t) -> rank of d_r out

    def entry(self, s, t):
        return self.entries.get((s, t), 0)

    def valid(self, s, t=0):
        return 0 <= s <= self.window - self.r + 1

    @property
    def valid_max_s(self):
        return self.window - self.r + 1

    def valid_entries(self):
        return {k: v for k, v in self.entries.items() if self.valid(*k)}


def _stratified_ranks(complex_, ring, s, t, by_weight):
    """Rank of d0 at (s,t); per-weight dict when stratifying."""
    d0 = complex_.d0(s, t)
    if not by_weight:
        return {None: matrix_rank(d0, ring)}
    cols = complex_.weight_partition(s, t)
    rows = complex_.weight_partition(s, t + 1) if t + 1 <= complex_.L.dim else {}
    rows = {w: rows.get(w, []) for w in cols}
    return {w: matrix_rank(sub, ring)
            for w, sub in partition_matrix(d0, rows, cols).items()}


def _e1_hodge_slice(L, ring, s, by_weight):
    """Per-weight E_1 dimensions and block sizes at one Hodge degree."""
    complex_ = KoszulComplex(L, ring)
    n = L.dim
    ranks = []   # ranks[t][w]
    sizes = []   # sizes[t][w]
    for t in range(n + 1):
        ranks.append(_stratified_ranks(complex_, ring, s, t, by_weight))
        complex_.drop_matrices(s, t)
        if by_weight:
            sizes.append({w: len(ix) for w, ix in complex_.weight_partition(s, t).items()})
        else:
            sizes.append({None: complex_.size(s, t)})
    dims = {}
    for t in range(n + 1):
        for w, size in sizes[t].items():
            incoming = ranks[t - 1].get(w, 0) if t > 0 else 0
            d = size - ranks[t].get(w, 0) - incoming
            if d:
                dims[t, w] = d
    return dims


def _e1_worker(args):
    L, ring, s, by_weight = args
    return s, _e1_hodge_slice(L, ring, s, by_weight)


def compute_E1(L, ring, window, jobs=1):
    """PageReport of E_1^{s,t} = H^t(g, S^s(ad*)) for all s <= window."""
    _require_field(ring)
    by_weight = L.weights is not None
    report = PageReport(L.name, str(ring), 1, window)
    work = [(L, ring, s, by_weight) for s in range(window + 1)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            slices = dict(pool.map(_e1_worker, work))
    else:
        slices = dict(map(_e1_worker, work))
    for s in range(window + 1):
        for (t, _w), d in sorted(slices[s].items()):
            key = (s, t)
            report.entries[key] = report.entries.get(key, 0) + d
    return report


def stratify(L, ring, window, jobs=1):
    """Weight-stratified E_1: {weight class: PageReport}, page 1."""
    _require_field(ring)
    if L.weights is None:
        raise ValueError(f"{L.name} carries no weights to stratify by")
    work = [(L, ring, s, True) for s in range(window + 1)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            slices = dict(pool.map(_e1_worker, work))
    else:
        slices = dict(map(_e1_worker, work))
    strata = {}
    for s in range(window + 1):
        for (t, w), d in sorted(slices[s].items()):
            rep = strata.setdefault(
                w, PageReport(L.name, str(ring), 1, window))
            rep.entries[s, t] = d
    return strata


def euler_poincare_check(L, ring, s):
    """(passed, alternating sum) of sum_t (-1)^t dim E_1^{s,t}."""
    _require_field(ring)
    if L.dim == 0:
        raise ValueError("Euler-Poincare check needs dim g > 0")
    dims = _e1_hodge_slice(L, ring, s, L.weights is not None)
    total = 0
    for (t, _w), d in dims.items():
        total += (-1) ** t * d
    return total == 0, total


class PageEngine:
    """Filtration subquotients of the truncated total complex."""

    def __init__(self, L, ring, window):
        _require_field(ring)
        self.L = L
        self.ring = ring
        self.N = window
        self.complex = KoszulComplex(L, ring)
        self._z_cache = {}

    def _columns(self, m):
        """Hodge columns active at total degree m, with ambient offsets."""
        n = self.L.dim
        cols = [c for c in range(max(0, -(-(m - n) // 2)), min(self.N, m // 2) + 1)]
        offsets = {}
        total = 0
        for c in cols:
            offsets[c] = total
            total += self.complex.size(c, m - 2 * c)
        return cols, offsets, total

    def _apply_T(self, vec, m, offsets_in, offsets_out):
        """Total differential on a degree-m ambient vector."""
        out = {}
        for c, base in offsets_in.items():
            t = m - 2 * c
            comp = {}
            for i, v in vec.items():
                if base <= i < base + self.complex.size(c, t):
                    comp[i - base] = v
            if not comp:
                continue
            if c in offsets_out:  # d0 keeps the column
                img = self.complex.d0(c, t).matvec(comp)
                tgt = offsets_out[c]
                for i, v in img.items():
                    w = out.get(tgt + i, 0) + v
                    if w:
                        out[tgt + i] = w
                    else:
                        out.pop(tgt + i, None)
            if c + 1 in offsets_out:  # d1 moves one column right
                img = self.complex.d1(c, t).matvec(comp)
                tgt = offsets_out[c + 1]
                for i, v in img.items():
                    w = out.get(tgt + i, 0) + v
                    if w:
                        out[tgt + i] = w
                    else:
                        out.pop(tgt + i, None)
        if self.ring.kind == "GF":
            out = {i: v % self.ring.p for i, v in out.items()}
            out = {i: v for i, v in out.items() if v}
        return out

    def z_basis(self, s, k, m):
        """Kernel basis of Z_k^s in global degree-m coordinates."""
        key = (s, k, m)
        if key in self._z_cache:
            return self._z_cache[key]
        cols, offsets, _total = self._columns(m)
        active = [c for c in cols if c >= s]
        if not active:
            self._z_cache[key] = []
            return []
        # local unknown layout over the active columns
        loc_off = {}
        total = 0
        for c in active:
            loc_off[c] = total
            total += self.complex.size(c, m - 2 * c)
        rows = []
        row_base = 0
        triplets = []
        for cp in range(s, s + k):
            if cp > self.N:
                continue  # conditions beyond the window are dropped (validity)
            t_out = m + 1 - 2 * cp
            nrows = self.complex.size(cp, t_out)
            if nrows:
                if cp in loc_off:
                    for (i, j, v) in self.complex.d0(cp, m - 2 * cp).triplets():
                        triplets.append((row_base + i, loc_off[cp] + j, v))
                if cp - 1 in loc_off:
                    for (i, j, v) in self.complex.d1(cp - 1, m - 2 * (cp - 1)).triplets():
                        triplets.append((row_base + i, loc_off[cp - 1] + j, v))
            row_base += nrows
        system = SparseMatrix.from_triplets(row_base, total, triplets)
        if self.ring.kind == "GF":
            system = system.reduced(self.ring)
        _, kernel = rank_and_kernel(system, self.ring)
        basis = []
        for vec in kernel:
            glob = {}
            for c in active:
                size = self.complex.size(c, m - 2 * c)
                for i, v in vec.items():
                    if loc_off[c] <= i < loc_off[c] + size:
                        glob[offsets[c] + (i - loc_off[c])] = v
            basis.append(glob)
        self._z_cache[key] = basis
        return basis

    def boundary_columns(self, r, s, m):
        """Columns spanning Z_{r-1}^{s+1} + T Z_{r-1}^{s-r+1} at degree m.

        In the first quadrant a negative filtration index means "no
        restriction", so the clamped leg keeps its landing condition
        T x in F^s: z_basis(p0, s - p0) with p0 = max(s - r + 1, 0).
        """
        cols = list(self.z_basis(s + 1, r - 1, m))
        p0 = max(s - r + 1, 0)
        _, off_prev, _ = self._columns(m - 1)
        _, off_here, _ = self._columns(m)
        for vec in self.z_basis(p0, s - p0, m - 1):
            img = self._apply_T(vec, m - 1, off_prev, off_here)
            if img:
                cols.append(img)
        return cols

    def entry(self, r, s, t):
        """dim E_r^{s,t} (exact within the valid region s <= N - r + 1)."""
        if t < 0 or t > self.L.dim or s < 0:
            return 0
        m = 2 * s + t
        z = self.z_basis(s, r, m)
        if not z:
            return 0
        bnd = self.boundary_columns(r, s, m)
        return len(z) - rank_of_columns(bnd, self.ring)

    def rank_out(self, r, s, t):
        """Rank of d_r leaving E_r^{s,t} (needs s <= N - r)."""
        if t < 0 or t > self.L.dim or s < 0:
            return 0
        m = 2 * s + t
        z = self.z_basis(s, r, m)
        if not z:
            return 0
        cols = self.boundary_columns(r, s, m) + self.z_basis(s, r + 1, m)
        return len(z) - rank_of_columns(cols, self.ring)


def compute_pages(L, ring, window, r_max=None, jobs=1):
    """PageReports for r = 1 .. r_max (default: the stable page index).

    Entries with s <= window - r + 1 are exact; the rest are marked by
    the report's validity predicate.  Ranks of d_r are recorded for
    entries with s <= window - r.
    """
    _require_field(ring)
    if r_max is None:
        r_max = stable_page_index(L.dim)
    engine = PageEngine(L, ring, window)
    first = compute_E1(L, ring, window, jobs=jobs)
    reports = [first]
    for r in range(2, r_max + 1):
        rep = PageReport(L.name, str(ring), r, window)
        prev = reports[-1]
        for (s, t) in sorted(prev.entries):
            d = engine.entry(r, s, t)
            if d:
                rep.entries[s, t] = d
        reports.append(rep)
    for rep in reports:
        r = rep.r
        for (s, t) in sorted(rep.entries):
            if s <= window - r:
                rk = engine.rank_out(r, s, t)
                if rk:
                    rep.ranks[s, t] = rk
    return reports


def differential_rank(L, ring, window, r, s, t):
    """Rank of d_r: E_r^{s,t} -> E_r^{s+r, t-2r+1} (exact for s <= window - r)."""
    engine = PageEngine(L, ring, window)
    return engine.rank_out(r, s, t)


class BlockE1:
    """Representative-level work in one E_1 block: membership, spans,
    induced d1 classes."""

    def __init__(self, L, ring, s, t, complex_=None):
        _require_field(ring)
        self.L = L
        self.ring = ring
        self.s = s
        self.t = t
        self.complex = complex_ or KoszulComplex(L, ring)
        self._image_cols = self.complex.d0(s, t - 1).columns() if t > 0 else []
        self._image_rank = rank_of_columns(self._image_cols, ring)

    def is_cocycle(self, vec):
        img = self.complex.d0(self.s, self.t).matvec(vec)
        if self.ring.kind == "GF":
            img = {i: v % self.ring.p for i, v in img.items() if v % self.ring.p}
        return not img

    def in_image(self, vec):
        if not vec:
            return True
        return rank_of_columns(self._image_cols + [vec], self.ring) == self._image_rank

    def classes_independent(self, vectors):
        return (rank_of_columns(self._image_cols + list(vectors), self.ring)
                == self._image_rank + len(vectors))

    def span_dimension(self, vectors):
        return rank_of_columns(self._image_cols + list(vectors), self.ring) - self._image_rank

    def dim(self):
        d0 = self.complex.d0(self.s, self.t)
        return d0.cols - matrix_rank(d0, self.ring) - self._image_rank

    def d1_class(self, vec):
        """d1 of a cocycle, as a vector in the (s+1, t-1) block."""
        img = self.complex.d1(self.s, self.t).matvec(vec)
        if self.ring.kind == "GF":
            img = {i: v % self.ring.p for i, v in img.items() if v % self.ring.p}
        return img


# ---------------------------------------------------------------------------
# rendering

def report_to_dict(report, strata=None):
    doc = {
        "algebra": report.algebra,
        "ring": report.ring,
        "N": report.window,
        "pages": [_page_dict(report)],
    }
    if strata is not None:
        doc["strata"] = [
            {"weight": list(w), "entries": _entry_list(rep)}
            for w, rep in sorted(strata.items())
        ]
    return doc


def pages_to_dict(reports):
    first = reports[0]
    return {
        "algebra": first.algebra,
        "ring": first.ring,
        "N": first.window,
        "pages": [_page_dict(rep) for rep in reports],
    }


def _entry_list(report):
    return [[s, t, d] for (s, t), d in sorted(report.entries.items())]


def _page_dict(report):
    doc = {
        "r": report.r,
        "entries": _entry_list(report),
        "valid": [[s, t] for (s, t) in sorted(report.entries) if report.valid(s, t)],
    }
    if report.ranks:
        doc["d_ranks"] = [[s, t, rk] for (s, t), rk in sorted(report.ranks.items())]
    return doc


def render_grid(report, n_ext):
    """ASCII grid: rows t = n..0 top-down, columns s = 0..N; '.' for zero,
    '?' outside the valid region."""
    width = max([len(str(d)) for d in report.entries.values()] + [1])
    lines = [f"E_{report.r}[{report.algebra} / {report.ring}], N = {report.window} "
             f"(entries with s > {report.valid_max_s} marked '?')"]
    header = "t\\s " + " ".join(f"{s:>{width}}" for s in range(report.window + 1))
    lines.append(header)
    for t in range(n_ext, -1, -1):
        cells = []
        for s in range(report.window + 1):
            if not report.valid(s, t):
                cells.append("?".rjust(width))
            else:
                d = report.entry(s, t)
                cells.append((str(d) if d else ".").rjust(width))
        lines.append(f"{t:>3} " + " ".join(cells))
    return "\n".join(lines)
