"""BPSK/AWGN channel, soft-decision decoders and a reproducible Monte-Carlo harness.

Bits map to ``(-1)^b`` with unit energy per coded bit, so the noise variance
per dimension is ``1 / (2 R E_b/N_0)``.

Randomness is organised in blocks of :data:`BLOCK_SIZE` trials.  Block ``b``
draws from ``PCG64(SeedSequence(seed, spawn_key=(b,)))``: first all message
bits of the block (``BLOCK_SIZE x k_bits`` integers in {0, 1}), then all
noise (``BLOCK_SIZE x n_bits`` standard normals).  Trial ``t`` is row
``t % BLOCK_SIZE`` of block ``t // BLOCK_SIZE``.  A trial's outcome therefore
depends only on ``(seed, t)``, and the harness stops at exactly the same trial
however many workers share the blocks.
"""

from __future__ import annotations

import functools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .bounds import SnrLike, _rho
from .codes import (
    BlockCode,
    DimensionTooLarge,
    codebook_bits,
    decode_bdd,
    generator_matrix_bits,
    min_distance_exhaustive,
)

__all__ = [
    "BLOCK_SIZE",
    "DECODERS",
    "McEstimate",
    "SoftDecodeResult",
    "SoftReceived",
    "binary_image_distance",
    "bdd_decode",
    "chase2_decode",
    "check_decoder",
    "gmd_decode",
    "ml_decode_exhaustive",
    "noise_sigma2",
    "run_monte_carlo",
    "run_paired",
    "transmit",
    "trial_received",
    "wilson_interval",
]

BLOCK_SIZE = 1024
ML_MAX_LOG2 = 16


@dataclass(frozen=True)
class SoftReceived:
    samples: np.ndarray
    noise_sigma2: float

    def __post_init__(self):
        if not self.noise_sigma2 > 0.0:
            raise ValueError(f"noise variance must be positive, got {self.noise_sigma2}")

    @property
    def hard(self) -> np.ndarray:
        return (self.samples < 0).astype(np.uint8)


@dataclass(frozen=True)
class SoftDecodeResult:
    """``fallback`` marks a hard-decision word returned because no candidate decoded."""

    decided: np.ndarray
    euclidean_dist2: float
    candidates_tested: int
    fallback: bool = False


@dataclass(frozen=True)
class McEstimate:
    trials: int
    word_errors: int
    ci95_low: float
    ci95_high: float
    fallbacks: int = 0

    @property
    def wer_hat(self) -> float:
        return self.word_errors / self.trials if self.trials else 0.0


def noise_sigma2(rate: float, snr: SnrLike) -> float:
    rho = _rho(snr)
    if rho <= 0.0:
        raise ValueError("simulation needs E_b/N_0 > 0")
    return 1.0 / (2.0 * rate * rho)


def wilson_interval(errors: int, trials: int, alpha: float = 0.05) -> tuple[float, float]:
    from statsmodels.stats.proportion import proportion_confint

    if trials <= 0:
        return 0.0, 1.0
    lo, hi = proportion_confint(errors, trials, alpha=alpha, method="wilson")
    # keep the interval ordered around the point estimate despite rounding
    p = errors / trials
    return float(min(lo, p)), float(max(hi, p))


def _dist2(y: np.ndarray, bits: np.ndarray) -> float:
    return float(np.sum((y - (1.0 - 2.0 * bits)) ** 2))


def transmit(code: BlockCode, message, snr: SnrLike, rng: np.random.Generator) -> SoftReceived:
    """Encode ``message`` (symbols), modulate and add white Gaussian noise."""
    from .codes import encode

    bits = code.to_bits(encode(code, message))
    s2 = noise_sigma2(code.rate, snr)
    y = (1.0 - 2.0 * bits) + math.sqrt(s2) * rng.standard_normal(bits.size)
    return SoftReceived(y, s2)


@functools.lru_cache(maxsize=None)
def binary_image_distance(code: BlockCode) -> tuple[int, bool]:
    """Minimum distance of the binary image and whether it is exact.

    Enumeration is used where the dimension allows it; otherwise the symbol
    design distance stands in as a lower bound (flag ``False``).
    """
    try:
        return min_distance_exhaustive(code), True
    except DimensionTooLarge:
        return code.d_design, False


def _hard_decode_bits(code: BlockCode, bits: np.ndarray, erasures=()) -> Optional[np.ndarray]:
    out = decode_bdd(code, code.from_bits(bits), erasures)
    if not out.corrected:
        return None
    return code.to_bits(out.codeword)


def bdd_decode(code: BlockCode, received: SoftReceived) -> SoftDecodeResult:
    """Algebraic BDD on hard decisions."""
    y = received.samples
    hard = received.hard
    cand = _hard_decode_bits(code, hard)
    if cand is None:
        return SoftDecodeResult(hard, _dist2(y, hard), 1, True)
    return SoftDecodeResult(cand, _dist2(y, cand), 1)


def chase2_decode(code: BlockCode, received: SoftReceived, n_flips: Optional[int] = None) -> SoftDecodeResult:
    """Chase algorithm 2 on the binary image.

    All ``2^p`` patterns on the ``p = floor(d_img / 2)`` least reliable bits
    are tried; the closest decoded candidate in Euclidean distance wins.
    """
    y = received.samples
    hard = received.hard
    p = binary_image_distance(code)[0] // 2 if n_flips is None else int(n_flips)
    lrp = np.argsort(np.abs(y), kind="stable")[:p]
    best = None
    best_d = math.inf
    seen = set()
    for pattern in range(1 << p):
        z = hard.copy()
        mask = ((pattern >> np.arange(p)) & 1).astype(bool)
        z[lrp[mask]] ^= 1
        cand = _hard_decode_bits(code, z)
        if cand is None:
            continue
        key = cand.tobytes()
        if key in seen:
            continue
        seen.add(key)
        dd = _dist2(y, cand)
        if dd < best_d:
            best, best_d = cand, dd
    if best is None:
        return SoftDecodeResult(hard, _dist2(y, hard), 1 << p, True)
    return SoftDecodeResult(best, best_d, 1 << p)


def gmd_decode(code: BlockCode, received: SoftReceived) -> SoftDecodeResult:
    """GMD at the symbol level: erase the s least reliable symbols, s = 0, 2, 4, ..."""
    if code.binary:
        raise ValueError(f"GMD decoding needs a non-binary (RS) code, got {code!r}")
    y = received.samples
    hard = received.hard
    rel = np.abs(y).reshape(code.n_sym, code.m).sum(axis=1)
    order = np.argsort(rel, kind="stable")
    best = None
    best_d = math.inf
    tested = 0
    for s in range(0, code.d_design, 2):
        tested += 1
        cand = _hard_decode_bits(code, hard, order[:s].tolist())
        if cand is None:
            continue
        dd = _dist2(y, cand)
        if dd < best_d:
            best, best_d = cand, dd
    if best is None:
        return SoftDecodeResult(hard, _dist2(y, hard), tested, True)
    return SoftDecodeResult(best, best_d, tested)


@functools.lru_cache(maxsize=8)
def _ml_table(code: BlockCode) -> tuple[np.ndarray, np.ndarray]:
    cb = codebook_bits(code, ML_MAX_LOG2)
    return cb, 1.0 - 2.0 * cb.astype(float)


def ml_decode_exhaustive(code: BlockCode, received: SoftReceived) -> SoftDecodeResult:
    """Exact ML by scanning the whole codebook (``k_bits <= 16``)."""
    cb, mod = _ml_table(code)
    y = received.samples
    # min ||y - x||^2  <=>  max <y, x> since every x has the same norm
    j = int(np.argmax(mod @ y))
    return SoftDecodeResult(cb[j], _dist2(y, cb[j]), cb.shape[0])


DECODERS: dict[str, Callable[[BlockCode, SoftReceived], SoftDecodeResult]] = {
    "bdd": bdd_decode,
    "chase2": chase2_decode,
    "gmd": gmd_decode,
    "ml": ml_decode_exhaustive,
}


def check_decoder(code: BlockCode, decoder: str) -> None:
    """Raise ``ValueError`` when ``decoder`` cannot run on ``code``."""
    if decoder not in DECODERS:
        raise ValueError(f"unknown decoder {decoder!r}; expected one of {', '.join(DECODERS)}")
    if decoder == "gmd" and code.binary:
        raise ValueError(f"decoder 'gmd' needs an RS code, {code.name or code.family} is binary")
    if decoder == "ml" and code.k_bits > ML_MAX_LOG2:
        raise ValueError(f"decoder 'ml' limited to k_bits <= {ML_MAX_LOG2}, code has {code.k_bits}")


# ---------------------------------------------------------------- harness


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))


def _block_data(code: BlockCode, s2: float, seed: int, block: int) -> tuple[np.ndarray, np.ndarray]:
    rng = _block_rng(seed, block)
    msgs = rng.integers(0, 2, size=(BLOCK_SIZE, code.k_bits), dtype=np.int64)
    noise = rng.standard_normal((BLOCK_SIZE, code.n_bits))
    G = _gen_bits(code)
    sent = ((msgs @ G) & 1).astype(np.uint8)
    y = (1.0 - 2.0 * sent) + math.sqrt(s2) * noise
    return sent, y


@functools.lru_cache(maxsize=None)
def _gen_bits(code: BlockCode) -> np.ndarray:
    return generator_matrix_bits(code).astype(np.int64)


@functools.lru_cache(maxsize=None)
def _check_bits(code: BlockCode) -> np.ndarray:
    # systematic image G = [P | I]  ->  H^T = [I ; P^T]
    G = _gen_bits(code)
    r = code.n_bits - code.k_bits
    if not np.array_equal(G[:, r:], np.eye(code.k_bits, dtype=np.int64)):
        raise ArithmeticError("binary image generator is not systematic")
    return np.vstack([np.eye(r, dtype=np.int64), G[:, :r]])


def trial_received(code: BlockCode, snr: SnrLike, seed: int, trial: int) -> tuple[np.ndarray, SoftReceived]:
    """Transmitted bits and received vector of one harness trial."""
    s2 = noise_sigma2(code.rate, snr)
    sent, y = _block_data(code, s2, seed, trial // BLOCK_SIZE)
    r = trial % BLOCK_SIZE
    return sent[r], SoftReceived(y[r], s2)


def _run_block(args) -> tuple[np.ndarray, np.ndarray]:
    """Error and fallback flags, shape ``(len(decoders), BLOCK_SIZE)``."""
    code, decoders, s2, seed, block = args
    sent, y = _block_data(code, s2, seed, block)
    fns = [DECODERS[d] for d in decoders]
    err = np.zeros((len(fns), BLOCK_SIZE), dtype=bool)
    fb = np.zeros_like(err)
    hard = (y < 0).astype(np.int64)
    # a hard-decision word that is already a codeword is the closest binary
    # word to y, so every decoder here returns it; only the rest are decoded
    is_cw = ~np.any((hard @ _check_bits(code)) & 1, axis=1)
    err[:, is_cw] = np.any(hard[is_cw] != sent[is_cw], axis=1)
    for r in np.flatnonzero(~is_cw):
        rx = SoftReceived(y[r], s2)
        for j, fn in enumerate(fns):
            res = fn(code, rx)
            err[j, r] = not np.array_equal(res.decided, sent[r])
            fb[j, r] = res.fallback
    return err, fb


def _estimate(errors: int, trials: int, fallbacks: int) -> McEstimate:
    lo, hi = wilson_interval(errors, trials)
    return McEstimate(trials, errors, lo, hi, fallbacks)


def _iter_blocks(code, decoders, s2, seed, n_blocks, workers):
    jobs = ((code, decoders, s2, seed, b) for b in range(n_blocks))
    if workers <= 1:
        for job in jobs:
            yield _run_block(job)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # bounded look-ahead keeps the pool busy without racing far past the stop
        pending = []
        for job in jobs:
            pending.append(pool.submit(_run_block, job))
            if len(pending) >= 2 * workers:
                yield pending.pop(0).result()
        for fut in pending:
            yield fut.result()


def run_monte_carlo(
    code: BlockCode,
    decoder: str,
    snr: SnrLike,
    seed: int,
    max_trials: int = 10**6,
    target_errors: Optional[int] = None,
    workers: int = 1,
) -> McEstimate:
    """Simulate until ``target_errors`` word errors or ``max_trials`` trials.

    The count stops at the exact trial that reaches the target, so the
    estimate is a pure function of the arguments other than ``workers``.
    """
    check_decoder(code, decoder)
    if max_trials <= 0:
        raise ValueError("max_trials must be positive")
    if target_errors is not None and target_errors <= 0:
        raise ValueError("target_errors must be positive")
    s2 = noise_sigma2(code.rate, snr)
    n_blocks = -(-max_trials // BLOCK_SIZE)
    trials = errors = fallbacks = 0
    gen = _iter_blocks(code, (decoder,), s2, int(seed), n_blocks, workers)
    try:
        for err, fb in gen:
            e = err[0][: max_trials - trials]
            f = fb[0][: e.size]
            if target_errors is not None and errors + int(e.sum()) >= target_errors:
                stop = int(np.flatnonzero(e)[target_errors - errors - 1]) + 1
                e, f = e[:stop], f[:stop]
            trials += e.size
            errors += int(e.sum())
            fallbacks += int(f.sum())
            if trials >= max_trials or (target_errors is not None and errors >= target_errors):
                break
    finally:
        gen.close()
    return _estimate(errors, trials, fallbacks)


def run_paired(
    code: BlockCode,
    decoders: Sequence[str],
    snr: SnrLike,
    trials: int,
    seed: int,
    workers: int = 1,
) -> dict[str, McEstimate]:
    """Run several decoders on the same ``trials`` received vectors."""
    decoders = tuple(decoders)
    for d in decoders:
        check_decoder(code, d)
    s2 = noise_sigma2(code.rate, snr)
    n_blocks = -(-trials // BLOCK_SIZE)
    errs = np.zeros(len(decoders), dtype=np.int64)
    fbs = np.zeros_like(errs)
    done = 0
    for err, fb in _iter_blocks(code, decoders, s2, int(seed), n_blocks, workers):
        take = min(BLOCK_SIZE, trials - done)
        errs += err[:, :take].sum(axis=1)
        fbs += fb[:, :take].sum(axis=1)
        done += take
    return {d: _estimate(int(errs[j]), trials, int(fbs[j])) for j, d in enumerate(decoders)}
