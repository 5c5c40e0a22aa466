"""Code parameters, log-domain weight spectra and Gilbert-Varshamov distances."""

from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .numkernel import LN2, inverse_binary_entropy, ln_binomial

__all__ = [
    "CodeParams",
    "LogWeightSpectrum",
    "SpectrumParseError",
    "random_spectrum",
    "load_spectrum",
    "save_spectrum",
    "format_spectrum",
    "parse_spectrum",
    "gv_distance_asymptotic",
    "gv_distance_exact",
]


@dataclass(frozen=True)
class CodeParams:
    """An (n, k, d_H) binary linear block code."""

    n: int
    k: int
    d: int

    def __post_init__(self):
        for name in ("n", "k", "d"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v:
                raise ValueError(f"{name} must be an integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        if not 0 < self.k <= self.n:
            raise ValueError(f"need 0 < k <= n, got n={self.n}, k={self.k}")
        if not 1 <= self.d <= self.n:
            raise ValueError(f"need 1 <= d <= n, got n={self.n}, d={self.d}")

    @property
    def rate(self) -> float:
        return self.k / self.n

    @property
    def redundancy(self) -> int:
        return self.n - self.k


@dataclass(frozen=True)
class LogWeightSpectrum:
    """Natural-log weight coefficients ``ln A_i`` for ``i = d_min .. n``.

    The all-zero codeword is never stored.  Entries may be ``-inf`` for weights
    with no codewords.
    """

    n: int
    d_min: int
    ln_coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        coeffs = np.array(self.ln_coeffs, dtype=float)
        coeffs.setflags(write=False)
        object.__setattr__(self, "ln_coeffs", coeffs)
        if not 1 <= self.d_min <= self.n:
            raise ValueError(f"need 1 <= d_min <= n, got d_min={self.d_min}, n={self.n}")
        if coeffs.ndim != 1 or coeffs.size != self.n - self.d_min + 1:
            raise ValueError(
                f"expected {self.n - self.d_min + 1} coefficients, got {coeffs.size}"
            )
        if np.any(np.isnan(coeffs)) or np.any(coeffs == np.inf):
            raise ValueError("coefficients must be finite or -inf")

    @property
    def weights(self) -> np.ndarray:
        return np.arange(self.d_min, self.n + 1)

    def ln_coeff(self, i: int) -> float:
        if i < self.d_min or i > self.n:
            return -math.inf
        return float(self.ln_coeffs[i - self.d_min])

    def support(self) -> tuple[np.ndarray, np.ndarray]:
        """Weights and ln A_i restricted to entries with A_i > 0."""
        mask = np.isfinite(self.ln_coeffs)
        return self.weights[mask], self.ln_coeffs[mask]

    @classmethod
    def from_counts(cls, n: int, counts: dict[int, int]) -> "LogWeightSpectrum":
        """Build from integer counts ``{weight: A_w}``; weight 0 is ignored."""
        ws = sorted(w for w, a in counts.items() if w > 0 and a > 0)
        if not ws:
            raise ValueError("spectrum has no nonzero-weight codewords")
        d_min = ws[0]
        coeffs = np.full(n - d_min + 1, -np.inf)
        for w in ws:
            coeffs[w - d_min] = math.log(counts[w])
        return cls(n, d_min, coeffs)


def random_spectrum(params: CodeParams) -> LogWeightSpectrum:
    """Random-code spectrum ``A_i = 2^-(n-k) C(n, i)`` truncated below ``d_H``."""
    n, d = params.n, params.d
    shift = params.redundancy * LN2
    coeffs = np.array([ln_binomial(n, i) - shift for i in range(d, n + 1)])
    return LogWeightSpectrum(n, d, coeffs)


class SpectrumParseError(ValueError):
    """Malformed spectrum file; ``line`` is 1-based (0 when not line-specific)."""

    def __init__(self, message: str, line: int = 0):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


def format_spectrum(spectrum: LogWeightSpectrum) -> str:
    lines = [f"n={spectrum.n} dmin={spectrum.d_min}"]
    for w, c in zip(spectrum.weights.tolist(), spectrum.ln_coeffs.tolist()):
        lines.append(f"{w} {_fmt_coeff(c)}")
    return "\n".join(lines) + "\n"


def _fmt_coeff(c: float) -> str:
    if c == -math.inf:
        return "-inf"
    return f"{c:.17g}"


def _parse_coeff(tok: str) -> float:
    if tok.lower() in ("-inf", "-infinity"):
        return -math.inf
    v = float(tok)
    if not math.isfinite(v):
        raise ValueError(f"coefficient must be finite or -inf, got {tok!r}")
    return v


def parse_spectrum(text: str) -> LogWeightSpectrum:
    """Parse the textual spectrum format.

    Comment lines start with ``#``.  The first other line is the header
    ``n=<int> dmin=<int>``; each following line is ``<weight> <ln_coeff>``
    with weights strictly increasing and covering every weight in
    ``[dmin, n]``.  A ``0 0`` line for the all-zero codeword is accepted and
    skipped.
    """
    header = None
    n = d_min = 0
    weights: list[int] = []
    coeffs: list[float] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if header is None:
            header = lineno
            try:
                fields = dict(tok.split("=", 1) for tok in line.split())
                n = int(fields["n"])
                d_min = int(fields["dmin"])
            except (KeyError, ValueError):
                raise SpectrumParseError(
                    f"expected header 'n=<int> dmin=<int>', got {line!r}", lineno
                ) from None
            if not 1 <= d_min <= n:
                raise SpectrumParseError(f"need 1 <= dmin <= n, got n={n} dmin={d_min}", lineno)
            continue
        parts = line.split()
        if len(parts) != 2:
            raise SpectrumParseError(f"expected '<weight> <ln_coeff>', got {line!r}", lineno)
        try:
            w = int(parts[0])
            c = _parse_coeff(parts[1])
        except ValueError as exc:
            raise SpectrumParseError(str(exc), lineno) from None
        if w == 0 and not weights:
            if c != 0.0:
                raise SpectrumParseError("weight 0 must have ln coefficient 0", lineno)
            continue
        if w > n:
            raise SpectrumParseError(f"weight {w} exceeds n={n}", lineno)
        if weights and w <= weights[-1]:
            raise SpectrumParseError(f"weights must be strictly increasing, got {w}", lineno)
        expected = d_min + len(weights)
        if w != expected:
            raise SpectrumParseError(f"expected weight {expected}, got {w}", lineno)
        weights.append(w)
        coeffs.append(c)
    if header is None:
        raise SpectrumParseError("empty spectrum file")
    if not weights or weights[-1] != n:
        raise SpectrumParseError(f"spectrum must list every weight from {d_min} to {n}")
    return LogWeightSpectrum(n, d_min, np.array(coeffs))


def load_spectrum(source: Union[str, os.PathLike]) -> LogWeightSpectrum:
    return parse_spectrum(Path(source).read_text(encoding="utf-8"))


def save_spectrum(spectrum: LogWeightSpectrum, path: Union[str, os.PathLike]) -> None:
    """Write ``spectrum`` atomically in the textual format."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
    with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_spectrum(spectrum))
    os.replace(tmp, path)


def _round_half_away(x: float) -> int:
    return int(math.floor(abs(x) + 0.5)) * (1 if x >= 0 else -1)


def gv_distance_asymptotic(n: int, rate: float) -> int:
    """``round(n * H^-1(1 - R))``, half away from zero, never below 1."""
    if not 0.0 < rate < 1.0:
        raise ValueError(f"rate must lie in (0, 1), got {rate}")
    return max(1, _round_half_away(n * inverse_binary_entropy(1.0 - rate)))


def gv_distance_exact(n: int, k: int) -> int:
    """Largest d with ``sum_{i=0}^{d-2} C(n-1, i) < 2^(n-k)`` (Varshamov bound).

    Exact integer arithmetic throughout.
    """
    if not 0 < k <= n:
        raise ValueError(f"need 0 < k <= n, got n={n}, k={k}")
    budget = 1 << (n - k)
    total = 0
    term = 1  # C(n-1, i)
    i = 0
    while i <= n - 1 and total + term < budget:
        total += term
        term = term * (n - 1 - i) // (i + 1)
        i += 1
    # sum over 0..i-1 fits, so d - 2 = i - 1
    return max(1, min(i + 1, n))


def spectrum_from_pairs(n: int, pairs: Sequence[tuple[int, float]]) -> LogWeightSpectrum:
    """Spectrum from sparse ``(weight, ln A)`` pairs; missing weights get -inf."""
    ws = [w for w, _ in pairs if w > 0]
    d_min = min(ws)
    coeffs = np.full(n - d_min + 1, -np.inf)
    for w, c in pairs:
        if w > 0:
            coeffs[w - d_min] = c
    return LogWeightSpectrum(n, d_min, coeffs)
