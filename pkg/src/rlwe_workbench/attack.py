"""Chi-square attacks on RLWE modulo a residue-degree-2 prime.

Both attacks reduce every sample through rho: R/qR -> F_{q^2}, writing
rho(a) = (a1, a2) and rho(b) = (b1, b2) on the F_q-basis {1, sqrt(d)}.

two_bin_attack
    For each guess g = (u, v) of rho(s), the residual rho(b) - g*rho(a)
    lands in the subfield F_q iff  b2 = u*a2 + v*a1 (mod q).  Under the
    null (uniform b) that event has probability 1/q; with the correct
    guess and an error whose sqrt(d)-block reduces to 0 it is near-certain.
    A two-bin chi-square statistic over all q^2 guesses flags the excess.

coset_attack
    Loops over the q additive cosets t_j = (0, j-1) of F_q in F_{q^2}.
    Per sample, m_j = (conj(b) - b - conj(a*t_j) + a*t_j) / (conj(a) - a)
    collapses to the F_q value (b2 - (j-1)*a1) / a2, so with x = b2/a2 and
    g = a1/a2 the whole score row is a histogram of x - (j-1)*g.  Samples
    with a2 = 0 carry no coset information and are dropped.  For the coset
    containing rho(s)'s second coordinate, m_j = s0 + (conj(e)-e)/(conj(a)-a),
    which sticks at the constant s0 whenever the error reduces into F_q, so
    that histogram spikes; wrong cosets stay uniform.  q guesses instead
    of q^2.

Default thresholds are family-wise: a run makes q (coset) or q^2 (two-bin)
independent-ish tests, so per-test significance is scaled to keep the
whole-run false-flag probability near 0.01.  Pass an explicit beta_chi to
override (e.g. the single-test 0.99 quantile critical_value(q-1, 0.99)).
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from statistics import NormalDist
from typing import List, Optional, Tuple

import numpy as np

from .ffield import FieldCtx
from .oracle import SampleSet
from .rings import FamilyRing, reduce_mod_prime_batch

VERDICT_GUESS = "GUESS"
VERDICT_NOT_RLWE = "NOT-RLWE"
VERDICT_INSUFFICIENT = "INSUFFICIENT-SAMPLES"


def chi_square(counts, expected) -> float:
    """Pearson statistic sum((obs - exp)^2 / exp) over >= 2 bins."""
    obs = np.asarray(counts, dtype=np.float64)
    exp = np.asarray(expected, dtype=np.float64)
    if exp.ndim == 0:
        exp = np.full(obs.shape, float(exp))
    if obs.ndim != 1 or obs.shape != exp.shape or obs.size < 2:
        raise ValueError("counts and expected must be vectors of equal length >= 2")
    if np.any(exp <= 0):
        raise ValueError("every expected bin value must be positive")
    return float((((obs - exp) ** 2) / exp).sum())


def critical_value(dof: int, confidence: float) -> float:
    """Chi-square quantile: exact for dof 1, Wilson-Hilferty for dof >= 2."""
    if dof < 1:
        raise ValueError("dof must be >= 1")
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must lie in (0, 1)")
    if dof == 1:
        # chi^2_1 = Z^2, so the quantile is an inverse-normal identity
        z = NormalDist().inv_cdf((1.0 + confidence) / 2.0)
        return z * z
    z = NormalDist().inv_cdf(confidence)
    t = 2.0 / (9.0 * dof)
    return dof * (1.0 - t + z * math.sqrt(t)) ** 3


@dataclass
class AttackConfig:
    """beta_chi and min_samples default per-attack when left as None."""
    beta_chi: Optional[float] = None
    min_samples: Optional[int] = None
    workers: int = 1

    def __post_init__(self):
        if self.beta_chi is not None and not self.beta_chi > 0:
            raise ValueError("beta_chi must be positive")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass
class AttackOutcome:
    verdict: str
    candidate: Optional[Tuple[int, int]]
    chi2_by_index: np.ndarray
    samples_used: int
    guesses_evaluated: int
    elapsed_ms: float
    candidates: List[Tuple[int, int]] = field(default_factory=list)
    beta_chi: float = float("nan")

    def report(self) -> dict:
        return {
            "verdict": self.verdict,
            "candidate": list(self.candidate) if self.candidate is not None else None,
            "chi2_by_index": [round(v, 6) for v in self.chi2_by_index.tolist()],
            "samples_used": self.samples_used,
            "elapsed_ms": round(self.elapsed_ms, 3),
            "guesses_evaluated": self.guesses_evaluated,
        }


def _verdict(candidates: List[Tuple[int, int]]):
    if not candidates:
        return VERDICT_NOT_RLWE, None
    if len(candidates) == 1:
        return VERDICT_GUESS, candidates[0]
    return VERDICT_INSUFFICIENT, None


def _rho_batch(samples: SampleSet, ctx: FieldCtx):
    ring = samples.ring
    if not isinstance(ring, FamilyRing):
        raise ValueError("attacks need residue degree 2; this sample set's ring "
                         "reduces into F_q itself")
    a1, a2 = reduce_mod_prime_batch(samples.a, ring, ctx)
    b1, b2 = reduce_mod_prime_batch(samples.b, ring, ctx)
    return a1, a2, b1, b2


def _inverse_table(q: int) -> np.ndarray:
    """inv[w] = w^(-1) mod q for w in 1..q-1 (inv[0] unused, set to 0)."""
    inv = np.zeros(q, dtype=np.int64)
    inv[1] = 1
    for w in range(2, q):
        # classic recurrence: inv[w] = -(q//w) * inv[q % w] mod q
        inv[w] = (q - q // w) * inv[q % w] % q
    return inv


# ------------------------------------------------------------------ coset

def default_beta_coset(q: int) -> float:
    """Family-wise threshold: per-coset significance 0.01/q over q cosets."""
    return critical_value(q - 1, 1.0 - 0.01 / q)


def _coset_chunk(args):
    x, g, q, lo, hi = args
    exp = len(x) / q
    out = np.empty(hi - lo, dtype=np.float64)
    for i, tau in enumerate(range(lo, hi)):
        counts = np.bincount((x - tau * g) % q, minlength=q)
        out[i] = float(((counts - exp) ** 2).sum() / exp)
    return lo, out


def coset_attack(samples: SampleSet, ctx: FieldCtx,
                 config: Optional[AttackConfig] = None) -> AttackOutcome:
    """Algorithm: q coset guesses, modal m_j recovery, chi-square flagging."""
    t0 = time.perf_counter()
    config = config or AttackConfig()
    ring = samples.ring
    q = ring.q
    a1, a2, _, b2 = _rho_batch(samples, ctx)
    keep = a2 % q != 0
    usable = int(keep.sum())
    beta = config.beta_chi if config.beta_chi is not None else default_beta_coset(q)
    min_samples = config.min_samples if config.min_samples is not None else 5 * q
    if usable == 0 or usable < min_samples:
        return AttackOutcome(VERDICT_INSUFFICIENT, None, np.zeros(q), usable, 0,
                             (time.perf_counter() - t0) * 1e3, [], beta)
    inv = _inverse_table(q)
    ainv = inv[a2[keep] % q]
    x = b2[keep] % q * ainv % q
    g = a1[keep] % q * ainv % q
    chi2 = np.empty(q, dtype=np.float64)
    jobs = _partition(q, config.workers)
    if len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            parts = list(pool.map(_coset_chunk, [(x, g, q, lo, hi) for lo, hi in jobs]))
    else:
        parts = [_coset_chunk((x, g, q, 0, q))]
    for lo, vals in parts:
        chi2[lo:lo + len(vals)] = vals
    candidates = []
    for tau in np.nonzero(chi2 > beta)[0]:
        counts = np.bincount((x - int(tau) * g) % q, minlength=q)
        top = counts.max()
        for s0 in np.nonzero(counts == top)[0]:
            candidates.append((int(s0), int(tau)))
    verdict, cand = _verdict(candidates)
    return AttackOutcome(verdict, cand, chi2, usable, q,
                         (time.perf_counter() - t0) * 1e3, candidates, beta)


# ---------------------------------------------------------------- two-bin

def _log_binom_pmf(m: int, p: float, k: int) -> float:
    return (math.lgamma(m + 1) - math.lgamma(k + 1) - math.lgamma(m - k + 1)
            + k * math.log(p) + (m - k) * math.log1p(-p))


def _binom_upper_quantile(m: int, p: float, alpha: float) -> int:
    """Smallest c with P(Binomial(m, p) >= c) <= alpha."""
    mean = m * p
    sd = math.sqrt(m * p * (1.0 - p))
    hi = min(m, int(mean + 40.0 * sd) + 2)
    tail = 0.0
    for k in range(hi, -1, -1):
        tail += math.exp(_log_binom_pmf(m, p, k))
        if tail > alpha:
            return k + 1
    return 0


def _two_bin_stat(count, m: int, q: int):
    """Chi-square over bins (F_q, complement) for bin-1 count(s)."""
    exp1 = m / q
    return (np.asarray(count, dtype=np.float64) - exp1) ** 2 * q * q / (m * (q - 1.0))


def default_beta_two_bin(q: int, sample_count: int) -> float:
    """Family-wise threshold over q^2 guesses via the exact binomial tail.

    The bin-1 count under the null is Binomial(M, 1/q), whose right tail is
    far heavier than the chi-square(1) approximation at the tiny per-guess
    significance 0.01/q^2 a q^2-guess sweep needs.  The threshold is placed
    half a count below the exact binomial upper quantile at 0.005/q^2
    (half the budget, since the statistic is two-sided); the lower tail
    cannot reach that statistic value at any usable M.
    """
    alpha = 0.005 / (q * q)
    c_hi = _binom_upper_quantile(sample_count, 1.0 / q, alpha)
    return float(_two_bin_stat(c_hi - 0.5, sample_count, q))


def _two_bin_chunk(args):
    a1, a2, b2, inv, q, lo, hi = args
    nz = a1 % q != 0
    a1inv = inv[a1[nz] % q]
    b2nz, a2nz = b2[nz] % q, a2[nz] % q
    b2z, a2z = b2[~nz] % q, a2[~nz] % q
    counts = np.empty((hi - lo, q), dtype=np.int64)
    for i, u in enumerate(range(lo, hi)):
        # records with a1 != 0: bin-1 guess needs v = (b2 - u*a2)/a1
        v = (b2nz - u * a2nz) % q * a1inv % q
        row = np.bincount(v, minlength=q)
        # records with a1 == 0: in bin 1 iff b2 == u*a2, for every v
        row += int(((b2z - u * a2z) % q == 0).sum())
        counts[i] = row
    return lo, counts


def two_bin_attack(samples: SampleSet, ctx: FieldCtx,
                   config: Optional[AttackConfig] = None) -> AttackOutcome:
    """All q^2 guesses g, two bins per guess: residual in F_q or not."""
    t0 = time.perf_counter()
    config = config or AttackConfig()
    ring = samples.ring
    q = ring.q
    m = len(samples)
    min_samples = config.min_samples if config.min_samples is not None else 5 * q
    if m < min_samples:
        raise ValueError("two-bin attack needs at least %d samples, got %d"
                         % (min_samples, m))
    a1, a2, _, b2 = _rho_batch(samples, ctx)
    beta = (config.beta_chi if config.beta_chi is not None
            else default_beta_two_bin(q, m))
    inv = _inverse_table(q)
    counts = np.empty((q, q), dtype=np.int64)
    jobs = _partition(q, config.workers)
    if len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            parts = list(pool.map(_two_bin_chunk,
                                  [(a1, a2, b2, inv, q, lo, hi) for lo, hi in jobs]))
    else:
        parts = [_two_bin_chunk((a1, a2, b2, inv, q, 0, q))]
    for lo, rows in parts:
        counts[lo:lo + len(rows)] = rows
    chi2 = _two_bin_stat(counts, m, q).reshape(-1)
    candidates = [(int(i) // q, int(i) % q) for i in np.nonzero(chi2 > beta)[0]]
    verdict, cand = _verdict(candidates)
    return AttackOutcome(verdict, cand, chi2, m, q * q,
                         (time.perf_counter() - t0) * 1e3, candidates, beta)


def _partition(n: int, workers: int) -> List[Tuple[int, int]]:
    """Contiguous [lo, hi) chunks covering range(n), at most `workers` of them."""
    k = max(1, min(workers, n))
    step = -(-n // k)
    return [(lo, min(lo + step, n)) for lo in range(0, n, step)]
