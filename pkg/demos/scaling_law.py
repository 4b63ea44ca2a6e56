"""The mixed-norm ratio ||R_T f_lam||_{q,r} / ||f_lam||_p under dilation f_lam(x) = f(lam x).

At q = p', 1/r = 1 - m/p' the ratio does not depend on lam; any other r
gives a power lam^{1 - m - 1/r + m/p}. The fitted log-log slopes show both.
"""
from transradon.verify import scaling_exponent_test, scaling_exponents

p = 1.5
q, r = scaling_exponents(2, p)
print(f"p={p}: q={q:g}, r={r:g}")
for rr in (r, r + 0.5, r + 2.0):
    rep = scaling_exponent_test(p, r=rr)
    d = rep.details
    print(f"r={rr:<4g} slope {d['slope']:+.5f}, predicted {d['predicted_slope']:+.5f}")
