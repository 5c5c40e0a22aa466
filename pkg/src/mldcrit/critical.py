"""Closed-form critical point of ML decoding for random-like codes.

The critical SNR is where the dominant weight of the max-term approximation
reaches the minimum distance; below it the error rate is governed by heavier
codewords, above it by the minimum-distance term alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .bounds import dominant_weight, max_term_approx
from .numkernel import LOG10E, binary_entropy, inverse_binary_entropy
from .spectrum import CodeParams

__all__ = [
    "CriticalPoint",
    "critical_snr",
    "critical_wer",
    "critical_point",
    "gv_critical",
]

_LOG10_2 = math.log10(2.0)


@dataclass(frozen=True)
class CriticalPoint:
    ebn0_crit_linear: float
    log10_wer_crit: float

    @property
    def ebn0_crit_db(self) -> float:
        """dB view; NaN when the linear value is not positive."""
        if self.ebn0_crit_linear <= 0.0:
            return math.nan
        return 10.0 * math.log10(self.ebn0_crit_linear)

    @property
    def sub_zero(self) -> bool:
        """True when d_H >= n/2 pushes the critical SNR to zero or below."""
        return self.ebn0_crit_linear <= 0.0

    def format(self) -> str:
        db = "undefined" if self.sub_zero else f"{self.ebn0_crit_db:.4f}"
        return f"ebn0_crit_db={db} log10_wer={self.log10_wer_crit:.3f}"


def _check_d(params: CodeParams) -> None:
    if not 0 < params.d < params.n:
        raise ValueError(f"a critical point needs 0 < d < n, got d={params.d}, n={params.n}")


def critical_snr(params: CodeParams) -> float:
    """Critical E_b/N_0 as a linear ratio: ``ln(n/d - 1) / R``.

    The value is returned as-is even when ``d >= n/2`` makes it zero or
    negative; :attr:`CriticalPoint.sub_zero` flags that case.
    """
    _check_d(params)
    return math.log(params.n / params.d - 1.0) / params.rate


def critical_wer(params: CodeParams) -> float:
    """log10 of ``2^{-n(1-R-H(d/n))} (d/(n-d))^d``."""
    _check_d(params)
    n, d = params.n, params.d
    return -n * (1.0 - params.rate - binary_entropy(d / n)) * _LOG10_2 + d * math.log10(d / (n - d))


def critical_point(params: CodeParams, check: bool = True) -> CriticalPoint:
    """Critical SNR and WER together.

    With ``check`` the closed forms are cross-checked: the dominant weight at
    the critical SNR must equal ``d`` and the max-term approximation there must
    equal the critical WER, both to 1e-9 relative.
    """
    lin = critical_snr(params)
    cp = CriticalPoint(lin, critical_wer(params))
    if check and lin >= 0.0:
        dw = dominant_weight(params, lin)
        if abs(dw - params.d) > 1e-9 * params.d:
            raise ArithmeticError(f"dominant weight {dw} at the critical SNR differs from d={params.d}")
        approx = max_term_approx(params, lin) * LOG10E
        if abs(approx - cp.log10_wer_crit) > 1e-9 * max(1.0, abs(cp.log10_wer_crit)):
            raise ArithmeticError(
                f"max-term value {approx} at the critical SNR differs from {cp.log10_wer_crit}"
            )
    return cp


def gv_critical(n: int, rate: float) -> CriticalPoint:
    """Critical point of a length-n code sitting exactly at the GV distance.

    With ``p = H^-1(1 - R)`` the entropy factor cancels and the closed forms
    reduce to ``ln(1/p - 1) / R`` and ``n p log10(p / (1 - p))``.
    """
    if not 0.0 < rate < 1.0:
        raise ValueError(f"rate must lie in (0, 1), got {rate}")
    p = inverse_binary_entropy(1.0 - rate)
    return CriticalPoint(math.log(1.0 / p - 1.0) / rate, n * p * math.log10(p / (1.0 - p)))


def general_critical_real(n: int, rate: float, d: float) -> CriticalPoint:
    """The general closed forms evaluated at a real-valued distance ``d``."""
    if not 0.0 < d < n:
        raise ValueError(f"need 0 < d < n, got d={d}")
    ebn0 = math.log(n / d - 1.0) / rate
    wer = -n * (1.0 - rate - binary_entropy(d / n)) * _LOG10_2 + d * math.log10(d / (n - d))
    return CriticalPoint(ebn0, wer)
