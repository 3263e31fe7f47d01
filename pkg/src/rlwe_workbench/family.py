"""Search and validate parameters for the vulnerable composite-field family.

A parameter triple (p, d, q) names the degree-2(p-1) field obtained by
adjoining sqrt(d) to the p-th cyclotomic field.  The attack-enabling
structure requires all of:

    1. p an odd prime,
    2. d > 1 squarefree,
    3. d = 2 or 3 (mod 4),
    4. gcd(d, p) = 1,
    5. q prime with q = 1 (mod p),
    6. d a quadratic non-residue mod q.

Under 1-6 the prime q has residue degree 2, the quotient R/qR contains
F_{q^2}, and the chi-square attacks of the attack module apply.

Squarefreeness is decided by trial division up to 10^6; d with a square
factor beyond 10^12 is rejected as undecidable rather than silently
accepted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

from .ffield import is_prime, legendre
from .rings import FamilyRing
from .sampling import compute_beta

_TRIAL_LIMIT = 10 ** 6


class UndecidedError(ValueError):
    """Trial division exhausted before the squarefree question was settled."""


def is_squarefree(n: int) -> bool:
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return True
    m = n
    f = 2
    while f <= _TRIAL_LIMIT and f * f <= m:
        if m % f == 0:
            m //= f
            if m % f == 0:
                return False
        f += 1 if f == 2 else 2
    if m > 1 and f * f <= m:
        # remaining cofactor has no factor <= 10^6; it is squarefree unless it
        # is itself a square or a prime square times a prime, so check squares
        r = math.isqrt(m)
        if r * r == m:
            return False
        if not is_prime(m):
            raise UndecidedError(
                "cannot certify %d squarefree: unfactored cofactor %d" % (n, m))
    return True


@dataclass(frozen=True)
class FamilyParams:
    """A validated (p, d, q) triple with the quantities the tools consume."""
    p: int
    d: int
    q: int
    deg: int = field(init=False)
    log2_disc: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "deg", 2 * (self.p - 1))
        ld = (2 * (self.p - 2) * math.log2(self.p)
              + (self.p - 1) * math.log2(4 * self.d))
        object.__setattr__(self, "log2_disc", ld)

    def ring(self) -> FamilyRing:
        return FamilyRing(self.p, self.d, self.q)

    def suggested_r(self, r0: float = 1.0) -> float:
        """Width r whose discriminant-normalized value equals r0."""
        return r0 * 2 ** (self.log2_disc / (2 * self.deg))

    def beta(self, r: float) -> float:
        return compute_beta(self.d, r, self.p - 1)


def violations(p: int, d: int, q: int) -> List[str]:
    """Empty list iff (p, d, q) is admissible; else the named failures."""
    out = []
    if not (p > 2 and is_prime(p)):
        out.append("p=%d is not an odd prime" % p)
    if d <= 1:
        out.append("d=%d is not > 1" % d)
    else:
        if d % 4 not in (2, 3):
            out.append("d=%d is not 2 or 3 mod 4" % d)
        if not is_squarefree(d):
            out.append("d=%d is not squarefree" % d)
    if p > 2 and d >= 1 and math.gcd(d, p) != 1:
        out.append("gcd(d=%d, p=%d) != 1" % (d, p))
    if not is_prime(q):
        out.append("q=%d is not prime" % q)
    else:
        if p > 2 and is_prime(p) and q % p != 1:
            out.append("q=%d is not 1 mod p=%d" % (q, p))
        if d > 1 and legendre(d, q) != -1:
            out.append("d=%d is a square mod q=%d" % (d, q))
    return out


def validate(p: int, d: int, q: int) -> FamilyParams:
    """FamilyParams for an admissible triple; ValueError naming each failure."""
    bad = violations(p, d, q)
    if bad:
        raise ValueError("inadmissible parameters: " + "; ".join(bad))
    return FamilyParams(p, d, q)


def search_q(p: int, d: int, q_min: int, q_max: int) -> List[FamilyParams]:
    """All admissible q in [q_min, q_max] for fixed (p, d), ascending."""
    base = violations(p, d, 0)
    base = [v for v in base if "q=" not in v]
    if base:
        raise ValueError("inadmissible (p, d): " + "; ".join(base))
    out = []
    # q = 1 (mod p) narrows the scan to one residue class
    start = q_min + (-(q_min - 1)) % p
    for q in range(start, q_max + 1, p):
        if q > 2 and is_prime(q) and legendre(d, q) == -1:
            out.append(FamilyParams(p, d, q))
    return out


def extend_d(p: int, q: int, d: int, k_max: int) -> List[FamilyParams]:
    """Admissible triples (p, d + 4kq, q) for k = 1..k_max.

    d' = d + 4kq preserves d' mod 4 and legendre(d', q); each candidate is
    still fully re-validated (squarefreeness and gcd can break).
    """
    validate(p, d, q)
    out = []
    for k in range(1, k_max + 1):
        d2 = d + 4 * k * q
        if not violations(p, d2, q):
            out.append(FamilyParams(p, d2, q))
    return out
