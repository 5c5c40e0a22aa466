"""GF(2^m) arithmetic and small BCH/RS codes with errors-and-erasures decoding.

Codewords are stored lowest degree first: ``c[i]`` is the coefficient of
``x^i``, and position ``i`` has locator ``alpha^i``.  Encoding is systematic
with the parity in positions ``0 .. n-k-1`` and the message in the rest.
Every code here has the consecutive roots ``alpha^1 .. alpha^(d-1)``, so a
single Berlekamp-Massey decoder serves BCH, Hamming and RS codes alike.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

__all__ = [
    "GaloisField",
    "BlockCode",
    "HardDecodeOutcome",
    "PRIMITIVE_POLYS",
    "CATALOG",
    "get_code",
    "gf_table_build",
    "bch_code",
    "rs_code",
    "encode",
    "decode_bdd",
    "syndromes",
    "is_codeword",
    "min_distance_exhaustive",
    "DimensionTooLarge",
]

# bit i is the coefficient of x^i
PRIMITIVE_POLYS = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10001001,
    8: 0b100011101,
}


class GaloisField:
    """GF(2^m) with log/antilog tables for a primitive polynomial."""

    def __init__(self, m: int, primitive_poly: Optional[int] = None):
        if not 1 <= m <= 8:
            raise ValueError(f"field degree must be in [1, 8], got {m}")
        poly = PRIMITIVE_POLYS[m] if primitive_poly is None else int(primitive_poly)
        if poly >> m != 1:
            raise ValueError(f"polynomial {poly:#b} does not have degree {m}")
        self.m = m
        self.order = 1 << m
        self.q1 = self.order - 1
        self.poly = poly
        exp = np.zeros(2 * self.q1, dtype=np.int64)
        log = np.full(self.order, -1, dtype=np.int64)
        x = 1
        for i in range(self.q1):
            if log[x] != -1:
                raise ValueError(f"polynomial {poly:#b} is not primitive (cycle length {i})")
            exp[i] = x
            log[x] = i
            x <<= 1
            if x & self.order:
                x ^= poly
        if x != 1:
            raise ValueError(f"polynomial {poly:#b} is not primitive")
        exp[self.q1:] = exp[: self.q1]
        exp.setflags(write=False)
        log.setflags(write=False)
        self.exp = exp
        self.log = log
        # plain-list copies: scalar indexing into lists is far cheaper than into arrays
        self._exp = exp.tolist()
        self._log = log.tolist()

    def __repr__(self):
        return f"GaloisField(m={self.m}, poly={self.poly:#b})"

    def alpha(self, i: int) -> int:
        return self._exp[i % self.q1]

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def div(self, a: int, b: int) -> int:
        if b == 0:
            raise ZeroDivisionError("division by zero in GF(2^m)")
        if a == 0:
            return 0
        return self._exp[(self._log[a] - self._log[b]) % self.q1]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return self._exp[(self.q1 - self._log[a]) % self.q1]

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            return 1 if e == 0 else 0
        return self._exp[(self._log[a] * e) % self.q1]

    # polynomials are lists of coefficients, lowest degree first

    def poly_mul(self, p: Sequence[int], q: Sequence[int]) -> list[int]:
        out = [0] * (len(p) + len(q) - 1)
        for i, a in enumerate(p):
            if a == 0:
                continue
            for j, b in enumerate(q):
                if b:
                    out[i + j] ^= self.mul(a, b)
        return out

    def poly_eval(self, p: Sequence[int], x: int) -> int:
        acc = 0
        for c in reversed(p):
            acc = self.mul(acc, x) ^ c
        return acc

    def poly_mod(self, p: Sequence[int], g: Sequence[int]) -> list[int]:
        out = list(p)
        dg = len(g) - 1
        lead_inv = self.inv(g[-1])
        for i in range(len(out) - 1, dg - 1, -1):
            c = out[i]
            if c:
                f = self.mul(c, lead_inv)
                for j, gj in enumerate(g):
                    if gj:
                        out[i - dg + j] ^= self.mul(f, gj)
        return out[:dg]


@functools.lru_cache(maxsize=None)
def gf_table_build(m: int, primitive_poly: Optional[int] = None) -> GaloisField:
    return GaloisField(m, primitive_poly)


@dataclass(frozen=True, eq=False)
class BlockCode:
    """A cyclic code over GF(2^m) with designed distance ``d_design``.

    ``family`` is ``"BCH"``, ``"HAMMING"`` (binary, symbols are bits) or
    ``"RS"`` (symbols are field elements, binary image of ``m * n`` bits).
    """

    family: str
    field: GaloisField
    n_sym: int
    k_sym: int
    d_design: int
    generator: tuple[int, ...]
    name: str = ""
    _pow_table: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        gf = self.field
        # pow_table[i, j-1] = alpha^(i j): syndromes without per-symbol log lookups
        i = np.arange(self.n_sym)[:, None]
        j = np.arange(1, self.d_design)[None, :]
        tbl = gf.exp[(i * j) % gf.q1]
        tbl.setflags(write=False)
        object.__setattr__(self, "_pow_table", tbl)

    @property
    def binary(self) -> bool:
        return self.family != "RS"

    @property
    def m(self) -> int:
        return self.field.m

    @property
    def bits_per_symbol(self) -> int:
        return 1 if self.binary else self.field.m

    @property
    def n_bits(self) -> int:
        return self.n_sym * self.bits_per_symbol

    @property
    def k_bits(self) -> int:
        return self.k_sym * self.bits_per_symbol

    @property
    def rate(self) -> float:
        return self.k_sym / self.n_sym

    @property
    def t(self) -> int:
        return (self.d_design - 1) // 2

    def __repr__(self):
        return f"BlockCode({self.name or self.family}, n={self.n_sym}, k={self.k_sym}, d={self.d_design})"

    # binary image: symbol s -> bits (s >> 0 & 1, ..., s >> (m-1) & 1)

    def to_bits(self, symbols) -> np.ndarray:
        s = np.asarray(symbols, dtype=np.int64)
        if self.binary:
            return s.astype(np.uint8)
        shifts = np.arange(self.m)
        return ((s[..., :, None] >> shifts) & 1).reshape(*s.shape[:-1], -1).astype(np.uint8)

    def from_bits(self, bits) -> np.ndarray:
        b = np.asarray(bits, dtype=np.int64)
        if self.binary:
            return b
        b = b.reshape(*b.shape[:-1], self.n_sym, self.m)
        return np.sum(b << np.arange(self.m), axis=-1)


@dataclass(frozen=True)
class HardDecodeOutcome:
    """``codeword`` is None on failure; ``errors`` counts corrected non-erased symbols."""

    codeword: Optional[np.ndarray]
    errors: int = 0
    erasures: int = 0

    @property
    def corrected(self) -> bool:
        return self.codeword is not None


def _minimal_poly(gf: GaloisField, e: int) -> list[int]:
    coset = []
    x = e % gf.q1
    while x not in coset:
        coset.append(x)
        x = (2 * x) % gf.q1
    poly = [1]
    for c in coset:
        poly = gf.poly_mul(poly, [gf.alpha(c), 1])
    if any(v not in (0, 1) for v in poly):
        raise ArithmeticError("minimal polynomial has non-binary coefficients")
    return poly


def bch_code(m: int, t: int, name: str = "", family: str = "BCH") -> BlockCode:
    """Narrow-sense primitive binary BCH code of length 2^m - 1 correcting t errors."""
    gf = gf_table_build(m)
    n = gf.q1
    g = [1]
    seen: set[int] = set()
    for i in range(1, 2 * t + 1):
        rep = min(((i << s) % n) for s in range(m))
        if rep in seen:
            continue
        seen.add(rep)
        g = gf.poly_mul(g, _minimal_poly(gf, i))
    return BlockCode(family, gf, n, n - (len(g) - 1), 2 * t + 1, tuple(g), name)


def rs_code(m: int, n_minus_k: int, name: str = "") -> BlockCode:
    """Reed-Solomon code of length 2^m - 1 with roots alpha^1 .. alpha^(n-k)."""
    gf = gf_table_build(m)
    n = gf.q1
    g = [1]
    for i in range(1, n_minus_k + 1):
        g = gf.poly_mul(g, [gf.alpha(i), 1])
    return BlockCode("RS", gf, n, n - n_minus_k, n_minus_k + 1, tuple(g), name)


def _catalog() -> dict[str, BlockCode]:
    return {
        "hamming_7_4": bch_code(3, 1, "hamming_7_4", family="HAMMING"),
        "bch_15_7": bch_code(4, 2, "bch_15_7"),
        "bch_31_21": bch_code(5, 2, "bch_31_21"),
        "bch_63_45": bch_code(6, 3, "bch_63_45"),
        "rs_15_11": rs_code(4, 4, "rs_15_11"),
        "rs_15_9": rs_code(4, 6, "rs_15_9"),
    }


CATALOG_IDS = ("hamming_7_4", "bch_15_7", "bch_31_21", "bch_63_45", "rs_15_11", "rs_15_9")


@functools.lru_cache(maxsize=1)
def _catalog_cached() -> dict[str, BlockCode]:
    return _catalog()


def get_code(code_id: str) -> BlockCode:
    """Look up a catalog code by id, e.g. ``"bch_15_7"`` or ``"rs_15_11"``."""
    cat = _catalog_cached()
    try:
        return cat[code_id]
    except KeyError:
        raise KeyError(f"unknown code {code_id!r}; available: {', '.join(CATALOG_IDS)}") from None


CATALOG = CATALOG_IDS


def encode(code: BlockCode, message) -> np.ndarray:
    """Systematic encoding: ``c(x) = x^(n-k) m(x) + (x^(n-k) m(x) mod g(x))``."""
    msg = np.asarray(message, dtype=np.int64)
    if msg.shape != (code.k_sym,):
        raise ValueError(f"message must have {code.k_sym} symbols, got shape {msg.shape}")
    limit = 2 if code.binary else code.field.order
    if np.any((msg < 0) | (msg >= limit)):
        raise ValueError("message symbols out of range")
    r = code.n_sym - code.k_sym
    shifted = [0] * r + msg.tolist()
    parity = code.field.poly_mod(shifted, code.generator)
    out = np.array(parity + msg.tolist(), dtype=np.int64)
    return out


def syndromes(code: BlockCode, word) -> np.ndarray:
    """``S_j = r(alpha^j)`` for ``j = 1 .. d_design - 1``."""
    w = np.asarray(word, dtype=np.int64)
    gf = code.field
    nz = np.nonzero(w)[0]
    if nz.size == 0:
        return np.zeros(code.d_design - 1, dtype=np.int64)
    if code.binary:
        rows = code._pow_table[nz]
    else:
        # r_i alpha^(ij) = alpha^(log r_i + i j)
        idx = (gf.log[w[nz]][:, None] + (nz[:, None] * np.arange(1, code.d_design)[None, :])) % gf.q1
        rows = gf.exp[idx]
    return np.bitwise_xor.reduce(rows, axis=0)


def is_codeword(code: BlockCode, word) -> bool:
    return not np.any(syndromes(code, word))


def decode_bdd(code: BlockCode, received, erasures: Iterable[int] = ()) -> HardDecodeOutcome:
    """Errors-and-erasures bounded-distance decoding.

    Berlekamp-Massey started from the erasure locator, Chien search over all
    positions and Forney's formula for the values.  Corrects every pattern with
    ``2 * errors + erasures < d_design``; anything the decoder cannot
    reconcile with a codeword inside that radius is reported as a failure.
    """
    gf = code.field
    r = np.array(received, dtype=np.int64)
    if r.shape != (code.n_sym,):
        raise ValueError(f"received word must have {code.n_sym} symbols, got shape {r.shape}")
    eras = sorted(set(int(e) for e in erasures))
    s = len(eras)
    if s > code.d_design - 1:
        raise ValueError(f"{s} erasures exceed the correction capability (d-1 = {code.d_design - 1})")
    if any(not 0 <= e < code.n_sym for e in eras):
        raise ValueError("erasure position out of range")
    if eras:
        r[eras] = 0
    synd = syndromes(code, r).tolist()
    if not any(synd):
        return HardDecodeOutcome(r, 0, s)

    # erasure locator Gamma(x) = prod (1 - alpha^i x)
    lam = [1]
    for e in eras:
        lam = gf.poly_mul(lam, [1, gf.alpha(e)])
    b = list(lam)
    L = s
    nsyn = code.d_design - 1
    for k in range(s, nsyn):
        # discrepancy for syndrome index k (S_{k+1})
        delta = 0
        for j in range(min(len(lam), k + 1)):
            if lam[j]:
                delta ^= gf.mul(lam[j], synd[k - j])
        b = [0] + b
        if delta == 0:
            continue
        new = lam + [0] * (len(b) - len(lam))
        for j, bj in enumerate(b):
            if bj:
                new[j] ^= gf.mul(delta, bj)
        if 2 * L <= k + s:
            inv = gf.inv(delta)
            b = [gf.mul(inv, c) for c in lam]
            L = k + 1 + s - L
        lam = new
    while len(lam) > 1 and lam[-1] == 0:
        lam.pop()
    deg = len(lam) - 1
    if deg != L or 2 * (L - s) + s > nsyn:
        return HardDecodeOutcome(None)

    # Chien search: position i is a root when Lambda(alpha^-i) = 0
    # Lambda(alpha^-i) = xor_j alpha^(log lam_j - i j), evaluated for all i at once
    pos = np.arange(code.n_sym)
    acc = np.zeros(code.n_sym, dtype=np.int64)
    for j, c in enumerate(lam):
        if c:
            acc ^= gf.exp[(gf.log[c] - pos * j) % gf.q1]
    locs = np.flatnonzero(acc == 0).tolist()
    if len(locs) != deg:
        return HardDecodeOutcome(None)
    if not set(eras) <= set(locs):
        return HardDecodeOutcome(None)

    # Omega(x) = S(x) Lambda(x) mod x^(d-1),  S(x) = sum_j S_{j+1} x^j
    omega = gf.poly_mul(synd, lam)[:nsyn]
    dlam = [lam[j] if j % 2 == 1 else 0 for j in range(1, len(lam))]  # formal derivative
    corrected = r.copy()
    for i in locs:
        xinv = gf.alpha(-i)
        den = gf.poly_eval(dlam, xinv)
        if den == 0:
            return HardDecodeOutcome(None)
        val = gf.div(gf.poly_eval(omega, xinv), den)
        corrected[i] ^= val
    if code.binary and np.any(corrected > 1):
        return HardDecodeOutcome(None)
    if np.any(syndromes(code, corrected)):
        return HardDecodeOutcome(None)
    nerr = sum(1 for i in locs if i not in set(eras) and corrected[i] != r[i])
    return HardDecodeOutcome(corrected, nerr, s)


class DimensionTooLarge(ValueError):
    """Refusal to enumerate a codebook beyond the configured size."""


def generator_matrix_bits(code: BlockCode) -> np.ndarray:
    """Binary generator matrix of the (binary image of the) code, k_bits x n_bits."""
    rows = []
    limit_bits = code.bits_per_symbol
    for pos in range(code.k_sym):
        for b in range(limit_bits):
            msg = np.zeros(code.k_sym, dtype=np.int64)
            msg[pos] = 1 << b
            rows.append(code.to_bits(encode(code, msg)))
    return np.array(rows, dtype=np.uint8)


def codebook_bits(code: BlockCode, max_log2: int = 16) -> np.ndarray:
    """All 2^k_bits codewords of the binary image, in message-index order."""
    kb = code.k_bits
    if kb > max_log2:
        raise DimensionTooLarge(f"2^{kb} codewords exceed the enumeration limit 2^{max_log2}")
    return _codebook(code, kb)


def _codebook(code: BlockCode, kb: int) -> np.ndarray:
    G = generator_matrix_bits(code).astype(np.int64)
    out = np.empty((1 << kb, code.n_bits), dtype=np.uint8)
    chunk = 1 << min(kb, 14)
    for start in range(0, 1 << kb, chunk):
        idx = np.arange(start, start + chunk, dtype=np.int64)
        msgs = (idx[:, None] >> np.arange(kb)) & 1
        out[start : start + chunk] = (msgs @ G) & 1
    return out


def min_distance_exhaustive(code: BlockCode, max_log2: int = 20) -> int:
    """Minimum nonzero weight of the binary image by full enumeration."""
    kb = code.k_bits
    if kb > max_log2:
        raise DimensionTooLarge(f"2^{kb} codewords exceed the enumeration limit 2^{max_log2}")
    G = generator_matrix_bits(code).astype(np.int64)
    best = code.n_bits
    chunk = 1 << min(kb, 14)
    for start in range(0, 1 << kb, chunk):
        idx = np.arange(max(start, 1), start + chunk, dtype=np.int64)
        msgs = (idx[:, None] >> np.arange(kb)) & 1
        w = ((msgs @ G) & 1).sum(axis=1)
        best = min(best, int(w.min()))
    return best


def weight_distribution(code: BlockCode, max_log2: int = 20) -> dict[int, int]:
    """Exact weight enumerator ``{w: A_w}`` of the binary image by enumeration."""
    kb = code.k_bits
    if kb > max_log2:
        raise DimensionTooLarge(f"2^{kb} codewords exceed the enumeration limit 2^{max_log2}")
    G = generator_matrix_bits(code).astype(np.int64)
    counts = np.zeros(code.n_bits + 1, dtype=np.int64)
    chunk = 1 << min(kb, 14)
    for start in range(0, 1 << kb, chunk):
        idx = np.arange(start, start + chunk, dtype=np.int64)
        msgs = (idx[:, None] >> np.arange(kb)) & 1
        counts += np.bincount(((msgs @ G) & 1).sum(axis=1), minlength=code.n_bits + 1)
    return {w: int(c) for w, c in enumerate(counts) if c}
