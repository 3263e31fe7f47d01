"""Fourier-analytic distance-from-uniform estimates for 2-power cyclotomic
RLWE error distributions, plus small-instance brute-force oracles and the
seeded empirical uniformity experiment.

The central quantity, for m a power of 2, n = m/2, q prime with a root
alpha of order m, and even k >= 2:

    eps(m, q, k, alpha) = (1/2) * sum_{y in F_q, y != 0}
                              prod_{i=0}^{n-1} cos(pi * alpha^i * y / q)^k

It upper-bounds the statistical distance between (sum_i alpha^i e_i mod q)
with e_i i.i.d. shifted-binomial V_k and the uniform distribution on F_q.

Orbit collapsing.  Let H = <alpha>, the unique order-m subgroup of F_q*.
The per-y term is invariant along H-orbits: alpha^n = -1 for a root of
exact 2-power order m, so {alpha^i y : i < n} is a transversal of the
+/- pairs inside yH, and cos^k is even.  Hence the term equals
prod over those pairs of cos(pi z / q)^k, which depends only on the coset
yH — not on y's position in it and not on which primitive root generated
H.  Two consequences used throughout:

  * eps(m, q, k, alpha) is the same for every root alpha of exact order m
    (they all generate H), so a report can fill all phi(m) per-root values
    from one computation;
  * the y-sum needs one term per coset, (q-1)/m of them, n cosines each:
    (q-1)/2 cosine evaluations total instead of n*(q-1).

Values reach 2^-431 and beyond, so every term is accumulated as
k * sum_i log2|cos|, terms below 2^-1100 are flushed to zero, and the sum
uses a max-shifted exponent accumulation.  Cosine arguments are built by
integer modular arithmetic only.

The degree-2 variant replaces F_q by F_{q^2} (alpha of order m | q^2-1,
m not dividing q-1) and puts a trace inside the cosine:
term(y) = prod_{i=1}^{n} cos(pi * Tr(alpha^i y) / q)^k over y != 0 in
F_{q^2}, with Tr(u + v*sqrt(w)) = 2u.  Same orbit structure, (q^2-1)/2
cosine evaluations; instances with q^2 > 1.5e6 sit behind long_run=True.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from .attack import critical_value
from .ffield import is_prime, smallest_nonresidue
from .rings import CycloRing, reduce_mod_prime_batch
from .sampling import GaussianSpec, RngHandle, sample_lattice_gauss_batch

_FLUSH_LOG2 = -1100.0
_LONG_RUN_Q2 = 1_500_000


def _is_pow2(m: int) -> bool:
    return m >= 2 and m & (m - 1) == 0


def _check_mk(m: int, k: int) -> None:
    if not _is_pow2(m):
        raise ValueError("m=%d is not a power of 2 >= 2" % m)
    if k < 2 or k % 2:
        raise ValueError("k=%d is not an even integer >= 2" % k)


def nu_hat(y: int, q: int, k: int) -> float:
    """Transform of the reduced V_k distribution at frequency y: cos(pi y/q)^k."""
    if k < 2 or k % 2:
        raise ValueError("k=%d is not an even integer >= 2" % k)
    return math.cos(math.pi * (y % q) / q) ** k


def _prime_factors(n: int) -> List[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1 if f == 2 else 2
    if n > 1:
        out.append(n)
    return out


def _generator_mod_q(q: int) -> int:
    factors = _prime_factors(q - 1)
    for g in range(2, q):
        if all(pow(g, (q - 1) // f, q) != 1 for f in factors):
            return g
    raise ValueError("no generator mod %d (q not prime?)" % q)


def _has_order_m(alpha: int, m: int, q: int) -> bool:
    # for 2-power m: order | m and order does not divide m/2
    return pow(alpha, m, q) == 1 and pow(alpha, m // 2, q) == q - 1


def _logsumexp2(logs: np.ndarray) -> float:
    kept = logs[logs > _FLUSH_LOG2]
    if kept.size == 0:
        return -math.inf
    top = float(kept.max())
    return top + math.log2(np.exp2(kept - top).sum())


# ---------------------------------------------------------------- degree 1

def _deg1_orbit_logs(m: int, q: int, k: int) -> np.ndarray:
    """log2 of the per-coset y-term, one entry per coset of H in F_q*."""
    n = m // 2
    g = _generator_mod_q(q)
    t = (q - 1) // m
    reps = np.empty(t, dtype=np.int64)
    r = 1
    for j in range(t):
        reps[j] = r
        r = r * g % q
    alpha = pow(g, t, q)
    apow = np.empty(n, dtype=np.int64)
    a = 1
    for i in range(n):
        apow[i] = a
        a = a * alpha % q
    args = apow[:, None] * reps[None, :] % q
    # q odd => no argument hits q/2, so no cosine is exactly 0
    logs = np.log2(np.abs(np.cos(np.pi * args / q))).sum(axis=0)
    return k * logs


def _assemble_log2_eps(m: int, orbit_logs: np.ndarray) -> float:
    # sum over y != 0 = m * (sum over coset representatives); then * 1/2
    return math.log2(m) - 1.0 + _logsumexp2(orbit_logs)


def epsilon_for_alpha(m: int, q: int, k: int, alpha: int) -> float:
    """log2 of eps(m, q, k, alpha).  Identical for every valid alpha (see
    the module docstring); alpha is still validated to have exact order m."""
    _check_mk(m, k)
    if not (is_prime(q) and (q - 1) % m == 0):
        raise ValueError("need q prime with q = 1 (mod m); got q=%d, m=%d" % (q, m))
    if not _has_order_m(alpha % q, m, q):
        raise ValueError("alpha=%d does not have exact order %d mod %d" % (alpha, m, q))
    return _assemble_log2_eps(m, _deg1_orbit_logs(m, q, k))


@dataclass
class EstimateReport:
    m: int
    q: int
    k: int
    degree: int
    per_root_log2: Dict
    log2_eps: float
    log2_bound: Optional[float]
    beta: float
    runtime_ms: float

    @property
    def neg_floor_log2_eps(self) -> int:
        return int(math.floor(-self.log2_eps))


def _beta_gauss(m: int, q: int) -> float:
    return (1.0 + math.sqrt(q) / m) / 2.0


def theoretical_bound(m: int, q: int, k: int) -> float:
    """log2 of (q-1)/2 * beta^(km/4), beta = (1 + sqrt(q)/m)/2.

    Requires q < m^2 so that beta < 1 and the bound decays.  The formula
    itself is congruence-agnostic and is also reported for degree-2
    instances (where m | q^2-1 rather than q-1) as a reference value.
    """
    _check_mk(m, k)
    if q >= m * m:
        raise ValueError("bound needs q < m^2 (beta < 1); got q=%d, m=%d" % (q, m))
    return math.log2((q - 1) / 2.0) + (k * m / 4.0) * math.log2(_beta_gauss(m, q))


def _bound_or_none(m: int, q: int, k: int) -> Optional[float]:
    return theoretical_bound(m, q, k) if q < m * m else None


def epsilon(m: int, q: int, k: int, workers: int = 1) -> EstimateReport:
    """eps(m, q, k) maximized over all phi(m) primitive m-th roots mod q."""
    t0 = time.perf_counter()
    _check_mk(m, k)
    if not is_prime(q):
        raise ValueError("q=%d is not prime" % q)
    if (q - 1) % m != 0:
        raise ValueError("no m-th roots of unity: q=%d is not 1 mod m=%d" % (q, m))
    log2_eps = _assemble_log2_eps(m, _deg1_orbit_logs(m, q, k))
    g = _generator_mod_q(q)
    alpha0 = pow(g, (q - 1) // m, q)
    per_root = {pow(alpha0, j, q): log2_eps for j in range(1, m, 2)}
    return EstimateReport(m, q, k, 1, per_root, log2_eps,
                          _bound_or_none(m, q, k), _beta_gauss(m, q),
                          (time.perf_counter() - t0) * 1e3)


# ---------------------------------------------------------------- degree 2

def deg2_admissible(m: int, q: int) -> bool:
    """q prime with an order-m root in F_{q^2} but none in F_q."""
    return (_is_pow2(m) and is_prime(q)
            and (q * q - 1) % m == 0 and (q - 1) % m != 0)


def nearest_admissible_q_deg2(m: int, q0: int) -> int:
    """The admissible prime closest to q0 (smaller wins a tie)."""
    if deg2_admissible(m, q0):
        return q0
    for delta in range(1, q0):
        for cand in (q0 - delta, q0 + delta):
            if cand > 2 and deg2_admissible(m, cand):
                return cand
    raise ValueError("no admissible q near %d for m=%d" % (q0, m))


def _fq2_mul(x, y, q: int, w: int):
    return ((x[0] * y[0] + x[1] * y[1] % q * w) % q,
            (x[0] * y[1] + x[1] * y[0]) % q)


def _fq2_pow(x, e: int, q: int, w: int):
    out, base = (1, 0), x
    while e:
        if e & 1:
            out = _fq2_mul(out, base, q, w)
        base = _fq2_mul(base, base, q, w)
        e >>= 1
    return out


def _generator_fq2(q: int, w: int):
    order = q * q - 1
    factors = _prime_factors(order)
    for v in range(1, q):
        for u in range(q):
            g = (u, v)
            if all(_fq2_pow(g, order // f, q, w) != (1, 0) for f in factors):
                return g
    raise ValueError("no generator found for F_{%d^2}" % q)


def _deg2_chunk(args):
    u, v, cs, ds, q, w, k = args
    logs = np.zeros(len(u), dtype=np.float64)
    for c, d in zip(cs, ds):
        # Tr((c + d sqrt(w)) (u + v sqrt(w))) = 2 (c u + d v w)
        tr = 2 * ((c * u + (d * w % q) * v) % q) % q
        logs += np.log2(np.abs(np.cos(np.pi * tr / q)))
    return k * logs


def epsilon_deg2(m: int, q: int, k: int, workers: int = 1,
                 long_run: bool = False) -> EstimateReport:
    """Degree-2 estimate: y runs over F_{q^2} \\ {0}, trace inside the cosine."""
    t0 = time.perf_counter()
    _check_mk(m, k)
    if not is_prime(q):
        raise ValueError("q=%d is not prime" % q)
    if not deg2_admissible(m, q):
        raise ValueError(
            "degree-2 needs m | q^2-1 and m not dividing q-1; (m=%d, q=%d) fails"
            " (nearest admissible q is %d)" % (m, q, nearest_admissible_q_deg2(m, q)))
    if q * q > _LONG_RUN_Q2 and not long_run:
        raise ValueError("q^2 = %d exceeds the desk-scale budget; pass long_run=True"
                         % (q * q))
    w = smallest_nonresidue(q)
    n = m // 2
    order = q * q - 1
    t = order // m
    g = _generator_fq2(q, w)
    u = np.empty(t, dtype=np.int64)
    v = np.empty(t, dtype=np.int64)
    r = (1, 0)
    for j in range(t):
        u[j], v[j] = r
        r = _fq2_mul(r, g, q, w)
    alpha = _fq2_pow(g, t, q, w)
    cs, ds = [], []
    a = alpha
    for _ in range(n):  # alpha^1 .. alpha^n
        cs.append(a[0])
        ds.append(a[1])
        a = _fq2_mul(a, alpha, q, w)
    cs, ds = np.array(cs, dtype=np.int64), np.array(ds, dtype=np.int64)
    if workers > 1 and t >= 4 * workers:
        spans = np.array_split(np.arange(t), workers)
        jobs = [(u[s], v[s], cs, ds, q, w, k) for s in spans if len(s)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_deg2_chunk, jobs))
        orbit_logs = np.concatenate(parts)
    else:
        orbit_logs = _deg2_chunk((u, v, cs, ds, q, w, k))
    log2_eps = _assemble_log2_eps(m, orbit_logs)
    per_root = {}
    alpha_sq = _fq2_mul(alpha, alpha, q, w)
    a = alpha
    for _ in range(m // 2):  # alpha^j for odd j: the phi(m) order-m roots
        per_root[a] = log2_eps
        a = _fq2_mul(a, alpha_sq, q, w)
    return EstimateReport(m, q, k, 2, per_root, log2_eps,
                          _bound_or_none(m, q, k), _beta_gauss(m, q),
                          (time.perf_counter() - t0) * 1e3)


# ------------------------------------------------------- brute-force oracles

def _brute_force_numerators(m: int, q: int, k: int, alpha: int) -> List[int]:
    """Exact counts (over 2^(kn)) of sum_i alpha^i e_i mod q, e_i i.i.d. V_k.

    Feasible only while (k+1)^n <= 2^24, n = m/2.
    """
    _check_mk(m, k)
    n = m // 2
    if n * math.log2(k + 1) > 24:
        raise ValueError("support (k+1)^%d too large for exact convolution" % n)
    if not _has_order_m(alpha % q, m, q):
        raise ValueError("alpha=%d does not have exact order %d mod %d" % (alpha, m, q))
    shifts = [t - k // 2 for t in range(k + 1)]
    weights = [math.comb(k, t) for t in range(k + 1)]
    dist = [0] * q
    dist[0] = 1
    a = 1
    for _ in range(n):
        nxt = [0] * q
        for val, cnt in enumerate(dist):
            if cnt:
                for sh, wt in zip(shifts, weights):
                    nxt[(val + a * sh) % q] += cnt * wt
        dist = nxt
        a = a * alpha % q
    return dist


def brute_force_pmf(m: int, q: int, k: int, alpha: int) -> np.ndarray:
    """Exact pmf of sum_i alpha^i e_i mod q as floats (numerators exact)."""
    numer = _brute_force_numerators(m, q, k, alpha)
    total = 2 ** (k * (m // 2))
    return np.array([c / total for c in numer], dtype=np.float64)


def brute_force_distance(m: int, q: int, k: int) -> float:
    """Exact statistical distance, maximized over all primitive roots alpha.

    Delta(e_alpha, uniform) = (1/2) sum_a |pmf(a) - 1/q|, evaluated in
    integer arithmetic before the one final division.
    """
    if not (is_prime(q) and (q - 1) % m == 0):
        raise ValueError("need q prime with q = 1 (mod m); got q=%d, m=%d" % (q, m))
    g = _generator_mod_q(q)
    alpha0 = pow(g, (q - 1) // m, q)
    n = m // 2
    total = 2 ** (k * n)
    best = 0.0
    for j in range(1, m, 2):
        numer = _brute_force_numerators(m, q, k, pow(alpha0, j, q))
        dist_num = sum(abs(c * q - total) for c in numer)
        best = max(best, dist_num / (2.0 * q * total))
    return best


def gauss_sum_check(m: int, q: int, alpha: int) -> float:
    """max over y != 0 of |sum_{j<m} exp(2 pi i alpha^j y / q)|; <= sqrt(q)."""
    if not _is_pow2(m):
        raise ValueError("m=%d is not a power of 2 >= 2" % m)
    if not _has_order_m(alpha % q, m, q):
        raise ValueError("alpha=%d does not have exact order %d mod %d" % (alpha, m, q))
    apow = np.empty(m, dtype=np.int64)
    a = 1
    for j in range(m):
        apow[j] = a
        a = a * alpha % q
    best = 0.0
    ys = np.arange(1, q, dtype=np.int64)
    for lo in range(0, len(ys), 4096):
        chunk = ys[lo:lo + 4096]
        args = apow[:, None] * chunk[None, :] % q
        sums = np.abs(np.exp(2j * np.pi * args / q).sum(axis=0))
        best = max(best, float(sums.max()))
    return best


# ------------------------------------------------- empirical uniformity runs

@dataclass
class EmpiricalResult:
    m: int
    q: int
    r0: float
    count: int
    chi2: float
    critical: float
    uniform: bool


def empirical_uniformity(m: int, q: int, r0: float, count: int, seed: int,
                         confidence: float = 0.99) -> EmpiricalResult:
    """Seeded experiment: draw `count` ring errors of per-coefficient width
    r0 (i.e. r = r0 * sqrt(n) before discriminant normalization), reduce
    through rho into F_q, and chi-square the histogram against uniform."""
    ring = CycloRing(m, q)
    spec = GaussianSpec(r0 * math.sqrt(ring.n))
    coeffs, _ = sample_lattice_gauss_batch(ring, spec, RngHandle(seed), count)
    vals = reduce_mod_prime_batch(coeffs % q, ring, None)
    counts = np.bincount(vals, minlength=q)
    exp = count / q
    chi2 = float(((counts - exp) ** 2).sum() / exp)
    crit = critical_value(q - 1, confidence)
    return EmpiricalResult(m, q, r0, count, chi2, crit, chi2 <= crit)
