"""
The catenoid strip is unstable
==============================

Builds the strip chart of the catenoid, evaluates the second variation
along the family psi_k and watches it settle at its negative limit.
"""

# In[1]:

import math

import numpy as np

from h1minimal import strips as S
from h1minimal import variation as V

# In[2]:
# sec, tan and tan/2 on (-0.1, 0.1).  F'^2 - 2 sigma' G' = -1 identically.

d = S.catenoid_strip(0.1)
print("J =", d.J, " strictness:", S.strict_condition(d, 0.0))
print("chart parabolas keep their vertices at |v| >=", d.vertex_bound)
print("but on u = 0 the chart only covers |v| <", 0.5 * math.tan(0.1))

# In[3]:
# The chart reproduces the catenoid's own parametrization.

r = np.linspace(-2, 2, 5)
s = np.full_like(r, 0.05)
u, _ = S.catenoid_lambda(r, s)
p = S.embed(d, *S.psi_map(d, u, s))
q = S.catenoid_theta(r, s)
print("chart vs parametrization:", np.max(np.abs([p.x - q.x, p.y - q.y, p.t - q.t])))

# In[4]:
# The sweep.  Each psi_k is a cutoff in s times a wide cutoff in u, divided
# by sqrt(Q).  The second variation turns negative once k is large enough.

bump = V.BumpSpec(0.5 * d.width / 2 * 0.99)
limit = V.instability_limit(d, bump)
print(f"predicted limit {limit:.10f}")
print("  = -(3 pi/2) int chi^2 cos^2 ds")
print(f"{'k':>6} {'term1':>12} {'term2':>12} {'total':>12} {'gap':>8}")
for k in (1, 4, 16, 32, 64, 256, 1024):
    rep = V.second_variation_strip(d, V.TestFunctionPsiK(d, bump, k))
    print(f"{k:6d} {rep.term1:12.6f} {rep.term2:12.6f} {rep.total:12.6f} {rep.total / limit - 1:8.4f}  {rep.verdict}")

# In[5]:
# The potential term converges quickly; the gradient term only like 1/k,
# because the u-cutoff's derivative contributes on a region of width ~k.
# In the limit the two terms stand in the ratio -1/4.

lt = V.limit_terms_numeric(d, bump)
print("limit terms:", lt.term1, lt.term2, " ratio", lt.ratio)

# In[6]:
# A finite-difference check of the second variation at k = 2, computed from
# the perimeter of the perturbed graphs phi + lambda psi.

t = V.TestFunctionPsiK(d, bump, 2)
(u0, u1), (s0, s1) = t.support
patch = S.StripPatch(d, u0, u1, s0, s1)
br = [bump.breaks(0.0, 2), bump.breaks(t.center)]
fd = V.fd_second_variation(S.as_intrinsic_graph(d), V.PulledBackPsi(t, d), patch, breaks=br, rtol=1e-8)
print("formula", V.second_variation_strip(d, t).total, " finite difference", fd)
