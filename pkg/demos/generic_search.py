"""
Searching for destabilizing deformations
========================================

Minimizes the second variation over tensor cubic B-splines on a box.
Negative values certify instability; the vertical plane never produces one.
"""

# In[1]:

from h1minimal import IntrinsicGraph, Rect
from h1minimal import strips as S
from h1minimal import variation as V

# In[2]:
# phi = uv/(1 + u^2/2) is an entire minimal intrinsic graph without
# characteristic points.  Larger boxes find more negative directions.

saddle = IntrinsicGraph("(u*v)/(1+u^2/2)")
for L in (2, 4, 8):
    res = V.generic_instability_search(saddle, Rect(-L, L, -L, L))
    print(f"box [-{L},{L}]^2: minimum {res.minimum:+.6f}  (L2 Rayleigh {res.rayleigh_l2:+.4f}, Gram cond {res.gram_condition:.0f})  {res.verdict}")

# In[3]:
# The eigenvector is an honest test function: integrating its second
# variation adaptively reproduces the eigenvalue.

res = V.generic_instability_search(saddle, Rect(-2, 2, -2, 2))
w = res.witness()
rep = V.second_variation_intrinsic(saddle, w, Rect(-2, 2, -2, 2), breaks=w.knots(), rtol=1e-10)
print("eigenvalue", res.minimum, " quadrature", rep.total)

# In[4]:
# The vertical plane phi = 0: the potential term vanishes identically and
# the quadratic form is positive.

plane = V.generic_instability_search(IntrinsicGraph("0"), Rect(-1, 1, -1, 1))
print("vertical plane minimum", plane.minimum, plane.verdict)

# In[5]:
# The same search on a patch of the catenoid strip, in chart coordinates.

d = S.catenoid_strip(0.1)
g = S.as_intrinsic_graph(d)
for L in (2, 4):
    r = V.generic_instability_search(g, S.StripPatch(d, -L, L, *d.J), n=12)
    print(f"catenoid patch u in [-{L},{L}]: minimum {r.minimum:+.6f}")
