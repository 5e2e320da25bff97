#!/usr/bin/env python3
"""From one constant potential to a family of surfaces.

The normalized data b = 1, B = 1/16 drives the whole machine: the
holomorphic frame ODEs integrate to rotation-type loops, the Iwasawa step
turns them into a para-unitary frame family F^mu, and the Sym formulas read
off two surfaces at once:

  * in Minkowski 3-space, a circular cylinder with mean curvature 1/2;
  * in the Heisenberg group, the minimal hyperbolic paraboloid x3 = x1 x2/2.

Varying the spectral angle theta slides through an isometric family.
"""

import numpy as np

from nilweier import Pipeline, translate_potential

pot = translate_potential("1", "0", "0.0625", "0")
print("potential:  f =", pot.f.pretty(), " g =", pot.g.pretty())
print("            Q =", pot.Q.pretty(), " R =", pot.R.pretty())

pipe = Pipeline(
    pot,
    np.linspace(-2, 2, 21),
    np.linspace(-2, 2, 21),
    trunc_n=20,
    steps_per_cell=8,
    thetas=(0.0, 0.15, -0.15),
).run()

sg = pipe.surface_grid
print("\nangle function h on the grid:", np.nanmin(pipe.frame_grid.h), "to",
      np.nanmax(pipe.frame_grid.h), "(expected identically 1)")

for k, theta in enumerate(sg.thetas):
    nil = sg.nil[k]
    l3 = sg.l3[k]
    parab = np.nanmax(np.abs(nil[..., 2] - nil[..., 0] * nil[..., 1] / 2))
    circle = np.nanmax(np.abs(l3[..., 0] ** 2 + l3[..., 2] ** 2 - 1))
    print(f"theta={theta:+.2f}:  |x3 - x1 x2/2| <= {parab:.2e}   "
          f"|x1^2 + x3^2 - 1| <= {circle:.2e}")

# the Minkowski surface and its unit normal at the basepoint
i0 = list(sg.s_grid).index(0.0)
print("\nf_L3(0,0)  =", sg.l3[0, i0, i0], " (south pole of the cylinder)")
print("normal(0,0) =", sg.normals[0, i0, i0])
