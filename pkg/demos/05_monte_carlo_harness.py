"""
Monte Carlo with error targets and confidence intervals
=======================================================
"""

import math

from scipy import stats

from mldcrit import SnrPoint
from mldcrit.codes import get_code
from mldcrit.simulate import run_monte_carlo

code = get_code("bch_15_7")

# hard BDD has an exact answer: more than t = 2 bit errors out of 15
for db in (4.0, 5.0, 6.0):
    est = run_monte_carlo(code, "bdd", SnrPoint.from_db(db), seed=11, target_errors=200)
    p = stats.norm.sf(math.sqrt(2 * code.rate * 10 ** (db / 10)))
    exact = stats.binom.sf(2, 15, p)
    print(
        f"{db} dB  trials={est.trials:6d}  wer={est.wer_hat:.3e}  "
        f"95% CI=[{est.ci95_low:.3e}, {est.ci95_high:.3e}]  exact={exact:.3e}"
    )

# same seed, same answer, whatever the worker count
a = run_monte_carlo(code, "chase2", SnrPoint.from_db(4.0), seed=5, target_errors=50)
b = run_monte_carlo(code, "chase2", SnrPoint.from_db(4.0), seed=5, target_errors=50, workers=2)
print("reproducible across workers:", a == b)
