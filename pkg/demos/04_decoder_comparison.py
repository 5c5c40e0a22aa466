"""
Hard BDD, Chase-2 and ML on the same noise
==========================================

Paired Monte Carlo: every decoder sees identical received vectors.
"""

import math

from mldcrit import SnrPoint
from mldcrit.bounds import union_bound
from mldcrit.codes import get_code, weight_distribution
from mldcrit.simulate import run_paired
from mldcrit.spectrum import CodeParams, LogWeightSpectrum

bch = get_code("bch_15_7")
for db in (3.0, 4.0, 5.0):
    res = run_paired(bch, ("bdd", "chase2", "ml"), SnrPoint.from_db(db), trials=20_000, seed=2024)
    row = "  ".join(f"{k}={v.wer_hat:.2e}" for k, v in res.items())
    print(f"BCH(15,7) {db} dB  {row}")

# the union bound from the true spectrum sits just above the ML curve
wd = weight_distribution(bch)
spec = LogWeightSpectrum.from_counts(15, wd)
for db in (3.0, 4.0, 5.0):
    print(f"UB at {db} dB: {math.exp(union_bound(spec, CodeParams(15, 7, 5), SnrPoint.from_db(db))):.2e}")

# GMD at the symbol level of RS(15,11) against hard BDD
rs = get_code("rs_15_11")
res = run_paired(rs, ("bdd", "gmd", "chase2"), SnrPoint.from_db(5.0), trials=10_000, seed=7)
print("RS(15,11) 5 dB ", {k: v.word_errors for k, v in res.items()})
