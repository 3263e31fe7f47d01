"""Generate, persist, and load RLWE sample sets and uniform decoys.

File format (the project's one wire contract)
----------------------------------------------
Line-delimited JSON.  Line 1 is the header object with keys in this fixed
order:

    schema_version, ring_kind, p, d, m, q, error_kind, width_or_k,
    seed, count, secret_hash

ring_kind is "family" or "cyclo"; p/d (family) or m (cyclo) are null when
inapplicable.  error_kind is "gaussian", "binomial", "zero" (degenerate test
hook) or "uniform" (decoy sets, where width_or_k is null and secret_hash is
null).  Every subsequent line is one record {"a": [...], "b": [...]} with
coefficients in [0, q-1], vectors of length deg.

The secret never appears in the file; secret_hash is the hex sha256 of the
canonical encoding "q=<q>;coeffs=<c0>,<c1>,..." so a reported guess can be
checked later against a disclosed secret.

Determinism
-----------
(seed, count) fully determine the bytes of a sample set.  Generation is
chunked at a fixed 1024 records with one forked RNG per chunk, so parallel
generation with any worker count produces identical files.  Within a chunk
the draw order is: all a-vectors, then all errors.  The secret uses its own
fork index 2^63, outside the chunk range.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from hashlib import sha256
from typing import Optional, Union

import numpy as np

from .rings import CycloRing, FamilyRing, Ring, RingElem, ring_mul
from .sampling import (BinomialSpec, GaussianSpec, RngHandle, sample_binomial_vk,
                       sample_lattice_gauss_batch)

SCHEMA_VERSION = 1
_CHUNK = 1024
_SECRET_INDEX = 1 << 63

ErrorSpec = Union[GaussianSpec, BinomialSpec, None]


def secret_commitment(coeffs: np.ndarray, q: int) -> str:
    enc = "q=%d;coeffs=%s" % (q, ",".join(str(int(c) % q) for c in coeffs))
    return sha256(enc.encode()).hexdigest()


@dataclass
class RlweInstance:
    """A ring, an error spec, a secret, and the master seed.

    error None is the degenerate zero-error test hook.
    """
    ring: Ring
    error: ErrorSpec
    secret: RingElem
    seed: int

    @classmethod
    def generate(cls, ring: Ring, error: ErrorSpec, seed: int) -> "RlweInstance":
        rng = RngHandle(seed).fork(_SECRET_INDEX)
        coeffs = rng.gen.integers(0, ring.q, size=ring.deg, dtype=np.int64)
        return cls(ring, error, RingElem(coeffs), seed)


class SampleSet:
    """Header metadata plus ordered (a, b) records as (count, deg) arrays."""

    def __init__(self, header: dict, a: np.ndarray, b: np.ndarray):
        self.header = header
        self.a = np.asarray(a, dtype=np.int64)
        self.b = np.asarray(b, dtype=np.int64)
        deg = _ring_from_header(header).deg
        if self.a.shape != (header["count"], deg) or self.b.shape != self.a.shape:
            raise ValueError("record arrays do not match header count/degree")

    def __len__(self):
        return len(self.a)

    @property
    def ring(self) -> Ring:
        return _ring_from_header(self.header)


def _ring_from_header(h: dict) -> Ring:
    if h["ring_kind"] == "family":
        return FamilyRing(h["p"], h["d"], h["q"])
    if h["ring_kind"] == "cyclo":
        return CycloRing(h["m"], h["q"])
    raise ValueError("unknown ring_kind %r" % h["ring_kind"])


def _header(ring: Ring, error_kind: str, width_or_k, seed: int, count: int,
            secret_hash: Optional[str]) -> dict:
    fam = isinstance(ring, FamilyRing)
    return {
        "schema_version": SCHEMA_VERSION,
        "ring_kind": "family" if fam else "cyclo",
        "p": ring.p if fam else None,
        "d": ring.d if fam else None,
        "m": None if fam else ring.m,
        "q": ring.q,
        "error_kind": error_kind,
        "width_or_k": width_or_k,
        "seed": seed,
        "count": count,
        "secret_hash": secret_hash,
    }


def _error_fields(error: ErrorSpec):
    if error is None:
        return "zero", None
    if isinstance(error, GaussianSpec):
        return "gaussian", error.r
    return "binomial", error.k


def _sample_errors(ring: Ring, error: ErrorSpec, rng: RngHandle, count: int) -> np.ndarray:
    if error is None:
        return np.zeros((count, ring.deg), dtype=np.int64)
    if isinstance(error, BinomialSpec):
        # coefficient-wise V_k (the estimator's model distribution)
        draws = sample_binomial_vk(error, rng, size=count * ring.deg)
        return draws.reshape(count, ring.deg)
    coeffs, _ = sample_lattice_gauss_batch(ring, error, rng, count)
    return coeffs


def _gen_chunk(args):
    ring, error, secret_coeffs, seed, start, n = args
    rng = RngHandle(seed).fork(start // _CHUNK)
    q, deg = ring.q, ring.deg
    a = rng.gen.integers(0, q, size=(n, deg), dtype=np.int64)
    e = _sample_errors(ring, error, rng, n)
    b = np.empty((n, deg), dtype=np.int64)
    s = RingElem(secret_coeffs)
    for i in range(n):
        prod = ring_mul(RingElem(a[i]), s, ring)
        b[i] = (prod.coeffs + e[i]) % q
    return start, a, b


def draw_rlwe(instance: RlweInstance, count: int, workers: int = 1) -> SampleSet:
    """count records (a, b = a*s + e) with a uniform in R/qR."""
    if count < 1:
        raise ValueError("count must be >= 1")
    ring = instance.ring
    kind, wk = _error_fields(instance.error)
    header = _header(ring, kind, wk, instance.seed, count,
                     secret_commitment(instance.secret.coeffs, ring.q))
    jobs = [(ring, instance.error, instance.secret.coeffs, instance.seed,
             start, min(_CHUNK, count - start)) for start in range(0, count, _CHUNK)]
    a = np.empty((count, ring.deg), dtype=np.int64)
    b = np.empty((count, ring.deg), dtype=np.int64)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_gen_chunk, jobs))
    else:
        results = [_gen_chunk(j) for j in jobs]
    for start, ca, cb in results:
        a[start:start + len(ca)] = ca
        b[start:start + len(cb)] = cb
    return SampleSet(header, a, b)


def draw_uniform(instance: RlweInstance, count: int, workers: int = 1) -> SampleSet:
    """Decoy set: both coordinates uniform and independent in R/qR."""
    if count < 1:
        raise ValueError("count must be >= 1")
    ring = instance.ring
    header = _header(ring, "uniform", None, instance.seed, count, None)
    a = np.empty((count, ring.deg), dtype=np.int64)
    b = np.empty((count, ring.deg), dtype=np.int64)
    for start in range(0, count, _CHUNK):
        n = min(_CHUNK, count - start)
        rng = RngHandle(instance.seed).fork(start // _CHUNK)
        a[start:start + n] = rng.gen.integers(0, ring.q, size=(n, ring.deg), dtype=np.int64)
        b[start:start + n] = rng.gen.integers(0, ring.q, size=(n, ring.deg), dtype=np.int64)
    return SampleSet(header, a, b)


class SampleFileError(ValueError):
    """Malformed sample file; carries the offending 1-based line number."""

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__("line %d: %s" % (line, message))


_HEADER_KEYS = ["schema_version", "ring_kind", "p", "d", "m", "q",
                "error_kind", "width_or_k", "seed", "count", "secret_hash"]


def dump(sample_set: SampleSet, fh) -> None:
    fh.write(json.dumps({k: sample_set.header[k] for k in _HEADER_KEYS}) + "\n")
    for i in range(len(sample_set)):
        fh.write('{"a": %s, "b": %s}\n'
                 % (sample_set.a[i].tolist(), sample_set.b[i].tolist()))


def save(sample_set: SampleSet, path) -> None:
    with open(path, "w") as fh:
        dump(sample_set, fh)


def load(path) -> SampleSet:
    with open(path) as fh:
        try:
            header = json.loads(fh.readline())
        except json.JSONDecodeError as e:
            raise SampleFileError(1, "bad header JSON (%s)" % e) from e
        missing = [k for k in _HEADER_KEYS if k not in header]
        if missing:
            raise SampleFileError(1, "header missing keys %s" % missing)
        try:
            ring = _ring_from_header(header)
        except (ValueError, TypeError) as e:
            raise SampleFileError(1, "bad ring parameters (%s)" % e) from e
        count, deg, q = header["count"], ring.deg, ring.q
        a = np.empty((count, deg), dtype=np.int64)
        b = np.empty((count, deg), dtype=np.int64)
        got = 0
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            if got >= count:
                raise SampleFileError(lineno, "more records than header count %d" % count)
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as e:
                raise SampleFileError(lineno, "bad record JSON (%s)" % e) from e
            for key, dst in (("a", a), ("b", b)):
                vec = rec.get(key)
                if not isinstance(vec, list) or len(vec) != deg:
                    raise SampleFileError(
                        lineno, "record %d: %r is not a length-%d vector" % (got, key, deg))
                if any(not isinstance(c, int) or c < 0 or c >= q for c in vec):
                    raise SampleFileError(
                        lineno, "record %d: %r has coefficients outside [0, %d)" % (got, key, q))
                dst[got] = vec
            got += 1
        if got != count:
            raise SampleFileError(got + 1, "expected %d records, found %d" % (count, got))
    return SampleSet(header, a, b)
