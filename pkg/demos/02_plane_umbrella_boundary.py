#!/usr/bin/env python3
"""Horizontal planes, umbrellas, and the edge of the big cell.

The potential b = 4, B = 0 produces the horizontal plane x3 = 0.  Its
factorization degenerates exactly on the hyperbola s*t = -1: those
gridpoints fall outside the big cell and are reported as holes instead of
aborting the sweep.  Prepending a constant para-unitary loop with degree
+-3 coefficients to the same potential tilts the plane into a horizontal
umbrella, still a minimal graph x3 = a x1 + b x2 + c.
"""

import numpy as np

from nilweier import OutsideBigCell, Pipeline, translate_potential
from nilweier.config import _umbrella_frame

pot = translate_potential("4", "0", "0", "0")
pipe = Pipeline(
    pot,
    np.linspace(-2, 2, 21),
    np.linspace(-2, 2, 21),
    trunc_n=16,
    steps_per_cell=8,
    thetas=(0.0,),
).run()

fg = pipe.frame_grid
print("holes (outside big cell / angle function <= 0):", int(fg.holes.sum()))
print("worst |x3| on -1 < s t < 1:",
      np.nanmax(np.abs(pipe.surface_grid.nil[0][np.abs(
          fg.s_grid[:, None] * fg.t_grid[None, :]) < 1][..., 2])))
print("angle function at (0.5, 0.5):", pipe.h_at(0.5, 0.5),
      " closed form 4/(1+st) =", 4 / (1 + 0.25))

try:
    pipe.frame_at(1.0, -1.0)
except OutsideBigCell as exc:
    print("factorization at s*t = -1 correctly fails:", exc)

# same potential, tilted initial condition -> horizontal umbrella
umbrella = Pipeline(
    pot,
    np.linspace(-0.6, 0.6, 17),
    np.linspace(-0.6, 0.6, 17),
    trunc_n=16,
    steps_per_cell=8,
    thetas=(0.0,),
    initial_frame=_umbrella_frame(0.5),
).run()
pts = umbrella.surface_grid.nil[0][~umbrella.surface_grid.holes]
A = np.column_stack([pts[:, 0], pts[:, 1], np.ones(len(pts))])
coef, *_ = np.linalg.lstsq(A, pts[:, 2], rcond=None)
resid = np.abs(A @ coef - pts[:, 2]).max()
print(f"\numbrella graph fit x3 = {coef[0]:.4f} x1 + {coef[1]:.4f} x2 + {coef[2]:.4f}"
      f"   (residual {resid:.1e})")
