"""Arithmetic in F_q and its quadratic extension F_{q^2} = F_q[sqrt(d)].

The extension is realized concretely as F_q[x]/(x^2 - d_red) for a quadratic
nonresidue d_red, so elements are coordinate pairs (u, v) = u + v*sqrt(d_red).
Everything here is exact integer arithmetic; q stays well inside a machine
word for every parameter set this project touches (q <= ~11000).
"""

from __future__ import annotations

from typing import List, Optional

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
                 59, 61, 67, 71, 73, 79, 83, 89, 97)

# Strong-pseudoprime bases that make Miller-Rabin deterministic for any
# n < 3.3 * 10^24, which covers the full 64-bit range used here.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic primality test for the 64-bit range."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    # trial division for small n, fixed-base strong pseudoprime battery beyond
    if n < 1 << 20:
        f = 101
        while f * f <= n:
            if n % f == 0:
                return False
            f += 2
        return True
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def legendre(a: int, q: int) -> int:
    """Legendre symbol (a/q) in {-1, 0, +1} for an odd prime q."""
    if q == 2 or not is_prime(q):
        raise ValueError("legendre: modulus %d is not an odd prime" % q)
    a %= q
    if a == 0:
        return 0
    t = pow(a, (q - 1) // 2, q)
    return -1 if t == q - 1 else 1


def smallest_nonresidue(q: int) -> int:
    """Smallest quadratic nonresidue mod an odd prime q."""
    for a in range(2, q):
        if legendre(a, q) == -1:
            return a
    raise ValueError("no nonresidue found mod %d" % q)  # unreachable for odd prime


class FieldCtx:
    """A prime q together with the realization F_{q^2} = F_q[sqrt(d_red)].

    d_red must be a quadratic nonresidue mod q.  alpha_p, when set, is an
    element of multiplicative order p in F_q^* (the image of a p-th root of
    unity under reduction); attacks on the composite family need it.
    """

    __slots__ = ("q", "d_red", "alpha_p")

    def __init__(self, q: int, d_red: Optional[int] = None, alpha_p: Optional[int] = None):
        if q == 2 or not is_prime(q):
            raise ValueError("FieldCtx: q = %d is not an odd prime" % q)
        if d_red is None:
            d_red = smallest_nonresidue(q)
        d_red %= q
        if legendre(d_red, q) != -1:
            raise ValueError("FieldCtx: d_red = %d is not a nonresidue mod %d" % (d_red, q))
        if alpha_p is not None:
            alpha_p %= q
            if alpha_p == 1 or alpha_p == 0:
                raise ValueError("FieldCtx: alpha_p must have order > 1")
        self.q = q
        self.d_red = d_red
        self.alpha_p = alpha_p

    @classmethod
    def for_family(cls, p: int, d: int, q: int) -> "FieldCtx":
        """Context for the (p, d, q) family: d reduced mod q defines the
        extension (valid exactly because (d/q) = -1), and alpha_p is a fixed
        element of order p."""
        ctx = cls(q, d_red=d % q)
        ctx2 = cls(q, d_red=ctx.d_red, alpha_p=find_order_p_element(p, ctx))
        return ctx2

    def elem(self, u: int, v: int = 0) -> "Fq2Elem":
        return Fq2Elem(self, u % self.q, v % self.q)

    def __repr__(self):
        return "FieldCtx(q=%d, d_red=%d, alpha_p=%r)" % (self.q, self.d_red, self.alpha_p)

    def __eq__(self, other):
        return (isinstance(other, FieldCtx) and self.q == other.q
                and self.d_red == other.d_red and self.alpha_p == other.alpha_p)


class Fq2Elem:
    """u + v*sqrt(d_red) in F_{q^2}, coordinates reduced to [0, q-1]."""

    __slots__ = ("ctx", "u", "v")

    def __init__(self, ctx: FieldCtx, u: int, v: int = 0):
        self.ctx = ctx
        self.u = u % ctx.q
        self.v = v % ctx.q

    def in_prime_field(self) -> bool:
        return self.v == 0

    def __add__(self, other: "Fq2Elem") -> "Fq2Elem":
        return Fq2Elem(self.ctx, self.u + other.u, self.v + other.v)

    def __sub__(self, other: "Fq2Elem") -> "Fq2Elem":
        return Fq2Elem(self.ctx, self.u - other.u, self.v - other.v)

    def __neg__(self) -> "Fq2Elem":
        return Fq2Elem(self.ctx, -self.u, -self.v)

    def __mul__(self, other: "Fq2Elem") -> "Fq2Elem":
        q, d = self.ctx.q, self.ctx.d_red
        u = (self.u * other.u + d * self.v * other.v) % q
        v = (self.u * other.v + self.v * other.u) % q
        return Fq2Elem(self.ctx, u, v)

    def inverse(self) -> "Fq2Elem":
        # x^-1 = conj(x) / N(x) with N(x) = u^2 - d v^2 in F_q^*
        q, d = self.ctx.q, self.ctx.d_red
        n = (self.u * self.u - d * self.v * self.v) % q
        if n == 0:
            raise ZeroDivisionError("inverse of 0 in F_{q^2}")
        ninv = pow(n, q - 2, q)
        return Fq2Elem(self.ctx, self.u * ninv, -self.v * ninv)

    def __truediv__(self, other: "Fq2Elem") -> "Fq2Elem":
        return self * other.inverse()

    def __pow__(self, e: int) -> "Fq2Elem":
        if e < 0:
            return self.inverse() ** (-e)
        out = Fq2Elem(self.ctx, 1, 0)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        return (isinstance(other, Fq2Elem) and self.u == other.u and self.v == other.v
                and self.ctx.q == other.ctx.q and self.ctx.d_red == other.ctx.d_red)

    def __hash__(self):
        return hash((self.u, self.v, self.ctx.q, self.ctx.d_red))

    def __repr__(self):
        return "Fq2Elem(%d + %d*sqrt(%d) mod %d)" % (self.u, self.v, self.ctx.d_red, self.ctx.q)


def find_order_p_element(p: int, ctx: FieldCtx) -> int:
    """An element of exact multiplicative order p in F_q^* (q = 1 mod p).

    Takes c^((q-1)/p) for increasing c until the result is not 1; p prime
    forces the order to be exactly p.
    """
    q = ctx.q
    if (q - 1) % p != 0:
        raise ValueError("no order-%d element: q = %d is not 1 mod %d" % (p, q, p))
    for c in range(2, q):
        x = pow(c, (q - 1) // p, q)
        if x != 1:
            return x
    raise ValueError("no order-%d element found mod %d" % (p, q))  # unreachable


def frobenius(x: Fq2Elem, ctx: FieldCtx) -> Fq2Elem:
    """x^q; in coordinates (u, v) -> (u, -v) since sqrt(d)^q = -sqrt(d)."""
    return Fq2Elem(ctx, x.u, -x.v)


def trace(x: Fq2Elem, ctx: FieldCtx) -> int:
    """Tr: F_{q^2} -> F_q, x + x^q = 2u."""
    return 2 * x.u % ctx.q


def coset_reps(ctx: FieldCtx) -> List[Fq2Elem]:
    """Representatives t_1..t_q of the additive cosets of F_q in F_{q^2}.

    Canonical choice t_j = (j-1)*sqrt(d_red): two elements are in the same
    coset iff their v coordinates agree, so these hit each coset once.
    """
    return [Fq2Elem(ctx, 0, j) for j in range(ctx.q)]
