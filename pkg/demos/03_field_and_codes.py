"""
Finite fields, BCH and RS codes
===============================
"""

import numpy as np

from mldcrit.codes import decode_bdd, encode, get_code, gf_table_build, weight_distribution

# GF(16) from x^4 + x + 1: exponents add modulo 15
gf = gf_table_build(4)
print("alpha^5 * alpha^12 =", gf.mul(gf.alpha(5), gf.alpha(12)), "= alpha^2 =", gf.alpha(2))

# weight distribution of the (15,7) BCH code by enumeration
print("BCH(15,7):", weight_distribution(get_code("bch_15_7")))

# RS(15,11): two errors, or four erasures, are within reach of the decoder
rs = get_code("rs_15_11")
rng = np.random.default_rng(1)
c = encode(rs, rng.integers(0, 16, size=11))

r = c.copy()
r[[2, 9]] ^= [5, 11]
out = decode_bdd(rs, r)
print("2 errors   -> corrected:", out.corrected, "errors found:", out.errors)

r = c.copy()
r[[0, 4, 7, 13]] = 0
out = decode_bdd(rs, r, erasures=[0, 4, 7, 13])
print("4 erasures -> corrected:", out.corrected, np.array_equal(out.codeword, c))

# three errors is past the radius: here the decoder lands on a wrong codeword
r = c.copy()
r[[1, 5, 12]] ^= [3, 3, 3]
out = decode_bdd(rs, r)
print("3 errors   -> corrected:", out.corrected, "same as sent:", out.corrected and np.array_equal(out.codeword, c))
