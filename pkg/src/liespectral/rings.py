"""Exact coefficient rings: the integers, the rationals and prime fields.

All arithmetic in this package is exact.  Integers and rationals use
Python's arbitrary-precision ``int`` / ``fractions.Fraction``; a prime
field F_p stores its elements as ints in ``range(p)``.
"""

from dataclasses import dataclass
from fractions import Fraction


def is_prime(n):
    """Deterministic Miller-Rabin, valid for all n < 2**64."""
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d = n - 1
    s = 0
    while d % 2 == 0:
        s += 1
        d //= 2
    for a in (2, 325, 9375, 28178, 450775, 9780504, 1795265022):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class Ring:
    """One of Z, Q, or F_p (p prime; p = 2 is allowed for linear algebra)."""

    kind: str  # "Z" | "Q" | "GF"
    p: int | None = None

    def __post_init__(self):
        if self.kind not in ("Z", "Q", "GF"):
            raise ValueError(f"unknown ring kind {self.kind!r}")
        if self.kind == "GF":
            if self.p is None or not is_prime(self.p):
                raise ValueError(f"F_p needs a prime modulus, got {self.p!r}")
        elif self.p is not None:
            raise ValueError(f"ring {self.kind} takes no modulus")

    @property
    def is_field(self):
        return self.kind != "Z"

    @property
    def char(self):
        return self.p if self.kind == "GF" else 0

    def normalize(self, x):
        """Coerce a scalar into canonical form for this ring."""
        if self.kind == "GF":
            if isinstance(x, Fraction):
                num, den = x.numerator, x.denominator
                if den % self.p == 0:
                    raise ZeroDivisionError(f"denominator {den} not invertible mod {self.p}")
                return num * pow(den, -1, self.p) % self.p
            return x % self.p
        if self.kind == "Q":
            x = Fraction(x)
            return int(x) if x.denominator == 1 else x
        if isinstance(x, Fraction):
            if x.denominator != 1:
                raise ValueError(f"{x} is not an integer")
            return int(x)
        return int(x)

    def __str__(self):
        return f"Fp:{self.p}" if self.kind == "GF" else self.kind


ZZ = Ring("Z")
QQ = Ring("Q")


def GF(p):
    return Ring("GF", p)


def parse_ring(text):
    """Parse "Z", "Q" or "Fp:<p>" (the JSON/CLI spelling)."""
    text = text.strip()
    if text == "Z":
        return ZZ
    if text == "Q":
        return QQ
    if text.startswith("Fp:"):
        return GF(int(text[3:]))
    raise ValueError(f"cannot parse ring {text!r} (expected Z, Q or Fp:<p>)")
