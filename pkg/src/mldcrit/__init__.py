"""Critical point of ML decoding for random-like linear block codes.

Log-domain union, max-term and tangential sphere bounds, the closed-form
critical SNR/WER, and a small BCH/RS simulation bench (algebraic BDD,
Chase-2, GMD and exhaustive ML) for checking them where simulation reaches.
"""

from .bounds import SnrPoint, evaluate, sweep, tangential_sphere_bound, union_bound
from .critical import CriticalPoint, critical_point, critical_snr, critical_wer, gv_critical
from .spectrum import CodeParams, LogWeightSpectrum, random_spectrum

__version__ = "0.1.0"

__all__ = [
    "CodeParams",
    "CriticalPoint",
    "LogWeightSpectrum",
    "SnrPoint",
    "critical_point",
    "critical_snr",
    "critical_wer",
    "evaluate",
    "gv_critical",
    "random_spectrum",
    "sweep",
    "tangential_sphere_bound",
    "union_bound",
]
