"""
Critical points of random-like codes
====================================

Where does the minimum-distance term take over the ML error rate?
"""

import numpy as np

from mldcrit import CodeParams, critical_point, gv_critical
from mldcrit.spectrum import gv_distance_asymptotic, gv_distance_exact

# three long codes, two high-rate and one at rate 1/2
for n, k, d in [(2040, 1912, 17), (2040, 1784, 36), (2000, 1000, 222)]:
    cp = critical_point(CodeParams(n, k, d))
    print(f"({n},{k},{d})  {cp.format()}")

# lower rate pushes the critical WER down by orders of magnitude
for rate in (0.937, 0.875, 0.75, 0.5):
    cp = gv_critical(2040, rate)
    print(f"GV code, n=2040, R={rate:<5}  Eb/N0={cp.ebn0_crit_db:.3f} dB  log10 WER={cp.log10_wer_crit:.1f}")

# two ways to state the GV distance; they drift apart slowly as n grows
for n, k in [(2000, 1000), (2040, 1784), (2040, 1912)]:
    print(f"d_GV({n},{k}): asymptotic {gv_distance_asymptotic(n, k / n)}, exact {gv_distance_exact(n, k)}")

# the critical SNR is not monotone in the rate: it bottoms out near R = 0.64
rates = np.linspace(0.3, 0.95, 14)
snr = np.array([gv_critical(2000, r).ebn0_crit_linear for r in rates])
print("argmin over the scan:", rates[np.argmin(snr)].round(3))
