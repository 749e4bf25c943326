"""
Horizontal geometry of surfaces in H1
=====================================

Mean curvature of t-graphs and level sets, the characteristic locus, and
the horizontal rulings of a minimal graph.  Run with ``python3``.
"""

# In[1]:

import numpy as np

from h1minimal import HeisenbergPoint, ImplicitSurface, Rect, TGraph, mean_curvature
from h1minimal.surfaces import char_locus_scan, horizontal_data_tgraph, rule_line_through, seed_from_tgraph

# In[2]:
# The saddle t = xy/2 is minimal away from its characteristic line y = 0.

saddle = TGraph("x*y/2", Rect(-2, 2, -2, 2))
x, y = np.meshgrid(np.linspace(-2, 2, 9), [-1.5, -0.5, 0.5, 1.5])
print("max |H| on the saddle:", np.max(np.abs(mean_curvature(saddle, (x.ravel(), y.ravel())))))
print("characteristic grid points:", len(char_locus_scan(saddle, n=9)))

# In[3]:
# The paraboloid t = (x^2 + y^2)/4 is not minimal; |H| falls off like 1/r.

bowl = TGraph("(x^2+y^2)/4", Rect(0.5, 2, 0.5, 2))
for r in (0.75, 1.0, 2.0):
    pt = (r / np.sqrt(2), r / np.sqrt(2))
    print(f"r = {r:4}:  H = {mean_curvature(bowl, pt):.12f}   1/(sqrt(2) r) = {1 / (np.sqrt(2) * r):.12f}")

# In[4]:
# The catenoid as a level set.  Points on it are parametrized by the radius.

cat = ImplicitSurface("t^2-((x^2+y^2)-1)/4", HeisenbergPoint(1.0, 0.0, 0.0))
rng = np.random.default_rng(0)
r = rng.uniform(1, 3, 500)
a = rng.uniform(0, 2 * np.pi, 500)
t = np.sqrt((r * r - 1) / 4)
print("max |H| on the catenoid:", np.max(np.abs(mean_curvature(cat, (r * np.cos(a), r * np.sin(a), t)))))

# In[5]:
# Through every noncharacteristic point of a minimal surface passes a
# horizontal straight line contained in it.

line = rule_line_through(saddle, (1.0, 1.0))
print("direction", line.direction, "t slope", line.t_slope)
print("max residual over |r| <= 10:", np.max(np.abs(line.residual(np.linspace(-10, 10, 201)))))
print("frame components of the velocity:", tuple(line.velocity_frame()))

# In[6]:
# Integral curves of the horizontal normal are seed curves: the rulings
# through them sweep out the surface again.

h = horizontal_data_tgraph(saddle, 0.0, 1.0)
print("unit normal at (0, 1):", float(h.p_bar), float(h.q_bar))
trace = seed_from_tgraph(saddle, (0.0, 1.0), 1.5)
print("end point", trace.gamma[-1], "height", trace.h0[-1], "Richardson error", trace.richardson_error)
P = trace.ruled_point(2048, np.linspace(-1, 1, 5))
print("ruled points stay on the graph:", np.max(np.abs(saddle.value(P.x, P.y) - P.t)))
