"""Ring arithmetic, canonical embeddings, and reduction maps.

Two ring families:

* FamilyRing -- R = Z[zeta_p, sqrt(d)], the ring of integers of
  Q(zeta_p) * Q(sqrt(d)) with p an odd prime and d > 1 squarefree,
  d = 2,3 mod 4, gcd(d, p) = 1.  Degree 2(p-1).  The integral basis is
  frozen as

      1, zeta, ..., zeta^(p-2),  sqrt(d), zeta*sqrt(d), ..., zeta^(p-2)*sqrt(d)

  and coefficient vectors follow that order: coeffs[0:p-1] is the
  "e1 block" over Z[zeta_p], coeffs[p-1:2(p-1)] the "e2 block" (the
  sqrt(d) part).

* CycloRing -- Z[zeta_m] for m a power of 2, degree n = m/2, with the
  negacyclic relation x^n = -1.

The adjusted canonical embedding iota maps each conjugate pair of complex
embeddings sigma to (sqrt(2)*Re sigma, sqrt(2)*Im sigma).  The embedding
coordinate order is frozen (and only matters for byte-stable golden tests):
for FamilyRing, conjugate-pair blocks are sorted by cyclotomic exponent
a = 1..(p-1)/2 outer and by the +/- sqrt(d) branch inner (+ first); for
CycloRing by odd exponent j = 1, 3, ..., n-1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np

from .ffield import FieldCtx, Fq2Elem


@dataclass(frozen=True)
class FamilyRing:
    p: int
    d: int
    q: int

    def __post_init__(self):
        if self.p < 3 or self.p % 2 == 0:
            raise ValueError("FamilyRing: p must be an odd prime, got %d" % self.p)
        if self.d <= 1:
            raise ValueError("FamilyRing: d must exceed 1, got %d" % self.d)

    @property
    def family_n(self) -> int:
        """n = p - 1, the degree of the cyclotomic subfield."""
        return self.p - 1

    @property
    def deg(self) -> int:
        return 2 * (self.p - 1)

    @property
    def abs_disc(self) -> int:
        """|disc| = p^(2(p-2)) * (4d)^(p-1)."""
        return self.p ** (2 * (self.p - 2)) * (4 * self.d) ** (self.p - 1)


@dataclass(frozen=True)
class CycloRing:
    m: int
    q: int

    def __post_init__(self):
        if self.m < 4 or self.m & (self.m - 1):
            raise ValueError("CycloRing: m must be a power of 2 >= 4, got %d" % self.m)
        if (self.q - 1) % self.m != 0:
            raise ValueError("CycloRing: q = %d is not 1 mod m = %d" % (self.q, self.m))

    @property
    def n(self) -> int:
        return self.m // 2

    @property
    def deg(self) -> int:
        return self.n

    @property
    def abs_disc(self) -> int:
        # |disc(Z[zeta_m])| = 2^(n*(log2(m) - 1)) for m a power of 2
        k = self.m.bit_length() - 1
        return 2 ** (self.n * (k - 1))

    def alpha(self) -> int:
        """A primitive m-th root of unity mod q (smallest-base power)."""
        return _find_primitive_root_2pow(self.m, self.q)


@lru_cache(maxsize=64)
def _find_primitive_root_2pow(m: int, q: int) -> int:
    for c in range(2, q):
        x = pow(c, (q - 1) // m, q)
        # order is exactly m iff x^(m/2) = -1 (m is a power of 2)
        if pow(x, m // 2, q) == q - 1:
            return x
    raise ValueError("no primitive %d-th root mod %d" % (m, q))


Ring = Union[FamilyRing, CycloRing]


class RingElem:
    """An element of R (or R/qR) as a coefficient vector over the fixed basis."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = np.asarray(coeffs, dtype=np.int64)

    def __len__(self):
        return len(self.coeffs)

    def __eq__(self, other):
        return isinstance(other, RingElem) and np.array_equal(self.coeffs, other.coeffs)

    def __repr__(self):
        return "RingElem(%s)" % self.coeffs.tolist()


def _check_len(x: RingElem, ring: Ring):
    if len(x) != ring.deg:
        raise ValueError("coefficient vector has length %d, ring degree is %d"
                         % (len(x), ring.deg))


def _cyclotomic_mul(a: np.ndarray, b: np.ndarray, p: int, q: int) -> np.ndarray:
    """Product in Z[zeta_p]/q over the basis 1..zeta^(p-2).

    Lift to Z[x]/(x^p - 1) (cyclic convolution), then eliminate the x^(p-1)
    coefficient using zeta^(p-1) = -(1 + zeta + ... + zeta^(p-2)).
    """
    full = np.convolve(a, b)
    cyc = np.zeros(p, dtype=np.int64)
    for i in range(len(full)):
        cyc[i % p] += full[i]
    return (cyc[:p - 1] - cyc[p - 1]) % q


def ring_mul(x: RingElem, y: RingElem, ring: Ring) -> RingElem:
    """Product in R/qR."""
    _check_len(x, ring)
    _check_len(y, ring)
    q = ring.q
    if isinstance(ring, CycloRing):
        n = ring.n
        full = np.convolve(x.coeffs, y.coeffs)
        out = np.zeros(n, dtype=np.int64)
        out[:len(full[:n])] = full[:n]
        out[:len(full) - n] -= full[n:]  # x^n = -1
        return RingElem(out % q)
    n = ring.family_n
    x1, x2 = x.coeffs[:n], x.coeffs[n:]
    y1, y2 = y.coeffs[:n], y.coeffs[n:]
    # (x1 + x2 sqrt(d))(y1 + y2 sqrt(d)) = (x1 y1 + d x2 y2) + (x1 y2 + x2 y1) sqrt(d)
    u = (_cyclotomic_mul(x1, y1, ring.p, q) + ring.d * _cyclotomic_mul(x2, y2, ring.p, q)) % q
    v = (_cyclotomic_mul(x1, y2, ring.p, q) + _cyclotomic_mul(x2, y1, ring.p, q)) % q
    return RingElem(np.concatenate([u, v]))


@lru_cache(maxsize=32)
def _embedding_matrix(ring: Ring) -> np.ndarray:
    """Rows are iota(basis element) in the frozen coordinate order."""
    if isinstance(ring, CycloRing):
        n, m = ring.n, ring.m
        E = np.empty((n, n))
        col = 0
        for j in range(1, n, 2):  # representative of the pair (j, m - j)
            ang = 2.0 * math.pi * j / m
            for i in range(n):
                E[i, col] = math.sqrt(2.0) * math.cos(ang * i)
                E[i, col + 1] = math.sqrt(2.0) * math.sin(ang * i)
            col += 2
        return E
    p, d = ring.p, ring.d
    n, deg = ring.family_n, ring.deg
    E = np.empty((deg, deg))
    sd = math.sqrt(d)
    col = 0
    for a in range(1, (p - 1) // 2 + 1):
        for s in (1.0, -1.0):
            ang = 2.0 * math.pi * a / p
            for i in range(n):
                re, im = math.cos(ang * i), math.sin(ang * i)
                E[i, col] = math.sqrt(2.0) * re
                E[i, col + 1] = math.sqrt(2.0) * im
                E[n + i, col] = math.sqrt(2.0) * s * sd * re
                E[n + i, col + 1] = math.sqrt(2.0) * s * sd * im
            col += 2
    return E


def canonical_embed(x: RingElem, ring: Ring) -> np.ndarray:
    """iota(x) as a real vector of length deg (signed-integer coefficients)."""
    _check_len(x, ring)
    return x.coeffs.astype(float) @ _embedding_matrix(ring)


def gram_matrix(ring: Ring) -> np.ndarray:
    """Gram matrix of the embedded integral basis; det equals |disc|."""
    E = _embedding_matrix(ring)
    return E @ E.T


def reduce_mod_prime(x: RingElem, ring: Ring, ctx: FieldCtx):
    """The reduction map rho: R/qR -> R/(prime over q).

    FamilyRing: evaluates zeta_p at ctx.alpha_p and sqrt(d) at sqrt(d_red),
    landing in F_{q^2}.  CycloRing: evaluates zeta_m at the ring's primitive
    root alpha, landing in F_q (returned as a plain int).
    """
    _check_len(x, ring)
    q = ring.q
    if ctx is not None and ctx.q != q:
        raise ValueError("context modulus %d does not match ring modulus %d" % (ctx.q, q))
    if isinstance(ring, CycloRing):
        alpha = ring.alpha()
        powers = _root_powers(alpha, ring.n, q)
        return int((x.coeffs % q) @ powers % q)
    if ctx.alpha_p is None:
        raise ValueError("FamilyRing reduction needs a context with alpha_p set")
    if pow(ctx.alpha_p, ring.p, q) != 1:
        raise ValueError("ctx.alpha_p does not have order %d mod %d" % (ring.p, q))
    if (ring.d - ctx.d_red) % q != 0:
        raise ValueError("ctx.d_red is not d mod q; rho would land in the wrong model of F_{q^2}")
    n = ring.family_n
    powers = _root_powers(ctx.alpha_p, n, q)
    u = int((x.coeffs[:n] % q) @ powers % q)
    v = int((x.coeffs[n:] % q) @ powers % q)
    return Fq2Elem(ctx, u, v)


def reduce_mod_prime_batch(coeffs: np.ndarray, ring: Ring, ctx: FieldCtx):
    """Vectorized reduce_mod_prime over a (count, deg) coefficient array.

    Returns (u, v) int64 arrays for a FamilyRing and a single int64 array
    for a CycloRing.  Same context validation as the scalar map.
    """
    coeffs = np.asarray(coeffs, dtype=np.int64)
    if coeffs.ndim != 2 or coeffs.shape[1] != ring.deg:
        raise ValueError("expected a (count, %d) coefficient array" % ring.deg)
    q = ring.q
    if ctx is not None and ctx.q != q:
        raise ValueError("context modulus %d does not match ring modulus %d" % (ctx.q, q))
    if isinstance(ring, CycloRing):
        powers = _root_powers(ring.alpha(), ring.n, q)
        return (coeffs % q) @ powers % q
    if ctx.alpha_p is None:
        raise ValueError("FamilyRing reduction needs a context with alpha_p set")
    if pow(ctx.alpha_p, ring.p, q) != 1:
        raise ValueError("ctx.alpha_p does not have order %d mod %d" % (ring.p, q))
    if (ring.d - ctx.d_red) % q != 0:
        raise ValueError("ctx.d_red is not d mod q; rho would land in the wrong model of F_{q^2}")
    n = ring.family_n
    powers = _root_powers(ctx.alpha_p, n, q)
    u = (coeffs[:, :n] % q) @ powers % q
    v = (coeffs[:, n:] % q) @ powers % q
    return u, v


@lru_cache(maxsize=64)
def _root_powers(alpha: int, n: int, q: int) -> np.ndarray:
    out = np.empty(n, dtype=np.int64)
    acc = 1
    for i in range(n):
        out[i] = acc
        acc = acc * alpha % q
    return out


def scaled_width_r0(r: float, ring: Ring) -> float:
    """r0 = r / |disc|^(1/(2*deg)), the sparsity-normalized error width."""
    if r <= 0:
        raise ValueError("width r must be positive")
    if isinstance(ring, CycloRing):
        # |disc|^(1/(2n)) = sqrt(n) for 2-power cyclotomics
        return r / math.sqrt(ring.n)
    p, d = ring.p, ring.d
    log_disc = 2 * (p - 2) * math.log(p) + (p - 1) * math.log(4 * d)
    return r * math.exp(-log_disc / (2 * ring.deg))
