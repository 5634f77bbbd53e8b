"""Integral cohomology of the Koszul complex per Hodge degree, torsion
prime discovery, and the universal-coefficient comparison between the
mod-p and characteristic-zero pictures.

The Z-side is computed only at the E_1 level (Smith normal form of d0
on the saturated cocycle lattice); pages over Z are out of scope.
"""

from dataclasses import dataclass

from .koszul import KoszulComplex
from .linalg import SparseMatrix
from .rings import GF, QQ, ZZ
from .smith import cohomology_at
from .spectral import compute_E1


@dataclass(frozen=True)
class IntegralCohomology:
    """Free rank and prime-power torsion of H^t(g, S^s(ad*)) over Z."""

    s: int
    t: int
    free_rank: int
    torsion: tuple  # sorted prime powers, each > 1

    def torsion_count(self, p):
        return sum(1 for q in self.torsion if q % p == 0)

    def to_dict(self):
        return {"s": self.s, "t": self.t, "free_rank": self.free_rank,
                "torsion": [_format_prime_power(q) for q in self.torsion]}


def _format_prime_power(q):
    for p in range(2, q + 1):
        if q % p == 0:
            k = 0
            while q % p == 0:
                q //= p
                k += 1
            return f"{p}^{k}" if k > 1 else str(p)
    return str(q)


def _require_integral(L):
    if L.ring != ZZ:
        raise ValueError(f"integral cohomology needs ring Z, got {L.ring}")


def integral_cohomology(L, s, t, complex_=None):
    """H^t at Hodge degree s over Z, from SNF on the cocycle lattice."""
    _require_integral(L)
    complex_ = complex_ or KoszulComplex(L, ZZ)
    d_in = complex_.d0(s, t - 1) if t > 0 else SparseMatrix(complex_.size(s, t), 0)
    d_out = complex_.d0(s, t)
    group = cohomology_at(d_in, d_out, ZZ, label=f"(s,t)=({s},{t})")
    return IntegralCohomology(s, t, group.free_rank, group.torsion)


def integral_table(L, window):
    """All IntegralCohomology entries with s <= window, t <= dim."""
    _require_integral(L)
    complex_ = KoszulComplex(L, ZZ)
    out = []
    for s in range(window + 1):
        for t in range(L.dim + 1):
            out.append(integral_cohomology(L, s, t, complex_))
        complex_.evict(s)
    return out


def torsion_primes(L, window):
    """Map s -> set of primes dividing any torsion coefficient at s."""
    out = {}
    for entry in integral_table(L, window):
        primes = set()
        for q in entry.torsion:
            for p in range(2, q + 1):
                if q % p == 0:
                    primes.add(p)
                    while q % p == 0:
                        q //= p
        out.setdefault(entry.s, set()).update(primes)
    return out


def first_occurrence(tors_by_s):
    """Map prime -> least Hodge degree where it shows torsion."""
    first = {}
    for s in sorted(tors_by_s):
        for p in tors_by_s[s]:
            first.setdefault(p, s)
    return first


def ucf_compare(L, p, window):
    """Per-(s,t) verdict: 'match', 'torsion-explained', or 'violation'.

    dim over F_p must equal the integral free rank plus the p-torsion
    counts in this and the next exterior degree (universal
    coefficients); over Q equality with the free rank alone.
    """
    _require_integral(L)
    integral = {(e.s, e.t): e for e in integral_table(L, window)}
    dims_q = compute_E1(L.to_ring(QQ), QQ, window)
    dims_p = compute_E1(L.to_ring(GF(p)), GF(p), window)
    verdicts = {}
    for s in range(window + 1):
        for t in range(L.dim + 1):
            here = integral[s, t]
            above = integral.get((s, t + 1))
            tors = here.torsion_count(p) + (above.torsion_count(p) if above else 0)
            dq = dims_q.entry(s, t)
            dp = dims_p.entry(s, t)
            if dq != here.free_rank:
                verdicts[s, t] = "violation"
            elif dp == dq and tors == 0:
                verdicts[s, t] = "match"
            elif dp == here.free_rank + tors:
                verdicts[s, t] = "match" if tors == 0 else "torsion-explained"
            else:
                verdicts[s, t] = "violation"
    return verdicts
