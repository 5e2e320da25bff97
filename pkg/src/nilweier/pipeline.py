"""End-to-end generalized Weierstrass representation.

Pipeline stages, all over the real pair (null coordinate) picture:

  1. A potential (f(s), g(t), Q(s), R(t)) defines the 1-form pair
         xi_s = lam^{-1} [[0, -f/4], [Q/f, 0]] ds,
         xi_t = lam      [[0, -R/g], [g/4, 0]] dt.
  2. RK4 integrates  d Phi_s = Phi_s xi_s,  d Phi_t = Phi_t xi_t  from 0,
     so Phi_s lives in Lambda^-_* and Phi_t in Lambda^+_*.
  3. Per gridpoint the Iwasawa decomposition produces the unitary-type frame
     F = Phi_s V_+^{-1} with V_+(0) = id, then a diagonal gauge diag(d, 1/d)
     with d^4 = f/(g d22^2) normalizes the off-diagonal lam^{-+1} Maurer-
     Cartan coefficients to (-h/4, h/4), where d22 is the constant diagonal
     of V_- and the angle function is h = sqrt(f g) * d22 > 0.
  4. Sym-type formulas evaluated exactly from Laurent coefficients give the
     Minkowski surface (CMC 1/2), its unit normal and the Heisenberg-group
     minimal surface, per spectral angle theta (mu = e^(i' theta)).

The reverse direction (normalized-potential extraction) Birkhoff-splits the
frame along the coordinate axes and differentiates the normalized factors.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegeneratePotential,
    DegenerateSpinors,
    GaugeFailure,
    OutsideBigCell,
)
from .expressions import Expression, combine, const_times, parse_expression, rename_variable
from .factorization import birkhoff_split, iwasawa_double
from .loopalg import (
    SIGMA3,
    LoopPair,
    PCMatrix2,
    TailAccumulator,
    TwistedLoop,
    loop_inv,
    loop_mul,
    pair_eval,
)
from .paracomplex import ParaComplex

__all__ = [
    "PotentialSpec",
    "translate_potential",
    "pair_potential",
    "solve_frame_ode",
    "build_extended_frames",
    "sym_map",
    "extract_normalized_potential",
    "weierstrass_integral_L3",
    "FrameGrid",
    "SurfaceGrid",
    "Pipeline",
]

_VANISH_TOL = 1e-12


# ---------------------------------------------------------------------------
# potentials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PotentialSpec:
    """Para-holomorphic potential in real-pair form.

    The four coefficient functions are f(s), g(t), Q(s), R(t); `provenance`
    records whether they came from normalized data (b, B) or were given
    directly.  For normalized data f = Re b + Im b, g = Re b - Im b,
    Q = 4(Re B + Im B), R = 4(Re B - Im B), all read on the real axis.
    """

    f: Expression
    g: Expression
    Q: Expression
    R: Expression
    provenance: str = "pair-direct"

    def xi_s(self, s: float) -> np.ndarray:
        fv = self.f.eval(s)
        if abs(fv) < _VANISH_TOL:
            raise DegeneratePotential(f"f vanishes at s={s}")
        return np.array([[0.0, -fv / 4.0], [self.Q.eval(s) / fv, 0.0]])

    def xi_t(self, t: float) -> np.ndarray:
        gv = self.g.eval(t)
        if abs(gv) < _VANISH_TOL:
            raise DegeneratePotential(f"g vanishes at t={t}")
        return np.array([[0.0, -self.R.eval(t) / gv], [gv / 4.0, 0.0]])

    def validate_on(self, s_values, t_values) -> None:
        for s in s_values:
            if abs(self.f.eval(float(s))) < _VANISH_TOL:
                raise DegeneratePotential(f"f vanishes at sampled s={float(s)}")
        for t in t_values:
            if abs(self.g.eval(float(t))) < _VANISH_TOL:
                raise DegeneratePotential(f"g vanishes at sampled t={float(t)}")


def translate_potential(b_re: str, b_im: str, B_re: str, B_im: str) -> PotentialSpec:
    """Build the real-pair potential from normalized data b(z), B(z).

    The arguments are expression sources in the neutral axis variable `z`
    (the real-axis restriction of the para-holomorphic functions); the
    translated coefficients read them on the s-axis and the t-axis.
    """
    bre = parse_expression(b_re, "z")
    bim = parse_expression(b_im, "z")
    Bre = parse_expression(B_re, "z")
    Bim = parse_expression(B_im, "z")
    return PotentialSpec(
        f=rename_variable(combine("+", bre, bim), "s"),
        g=rename_variable(combine("-", bre, bim), "t"),
        Q=rename_variable(const_times(4.0, combine("+", Bre, Bim)), "s"),
        R=rename_variable(const_times(4.0, combine("-", Bre, Bim)), "t"),
        provenance="normalized",
    )


def pair_potential(f: str, g: str, Q: str, R: str) -> PotentialSpec:
    return PotentialSpec(
        f=parse_expression(f, "s"),
        g=parse_expression(g, "t"),
        Q=parse_expression(Q, "s"),
        R=parse_expression(R, "t"),
        provenance="pair-direct",
    )


# ---------------------------------------------------------------------------
# holomorphic frame ODE
# ---------------------------------------------------------------------------


class _AxisFlow:
    """RK4 flow of d Phi = Phi * (lam^deg A(x)) dx from the basepoint x = 0.

    Every requested value integrates afresh from 0 with a step count fixed by
    the per-unit density, so results are independent of evaluation order.
    """

    def __init__(self, coeff_fn, deg: int, N: int, steps_per_unit: float, tail: TailAccumulator):
        self.coeff_fn = coeff_fn
        self.deg = deg
        self.N = N
        self.spu = float(steps_per_unit)
        self.tail = tail
        self._cache: dict[float, TwistedLoop] = {0.0: TwistedLoop.identity(N)}

    def at(self, x: float) -> TwistedLoop:
        x = float(x)
        hit = self._cache.get(x)
        if hit is not None:
            return hit
        n = max(1, int(math.ceil(abs(x) * self.spu - 1e-12)))
        h = x / n
        phi = TwistedLoop.identity(self.N)
        pos = 0.0
        for k in range(n):
            a0 = self.coeff_fn(pos)
            am = self.coeff_fn(pos + h / 2.0)
            a1 = self.coeff_fn(pos + h)
            k1 = phi.shift_mul(a0, self.deg, self.tail)
            k2 = (phi + (h / 2.0) * k1).shift_mul(am, self.deg, self.tail)
            k3 = (phi + (h / 2.0) * k2).shift_mul(am, self.deg, self.tail)
            k4 = (phi + h * k3).shift_mul(a1, self.deg, self.tail)
            phi = phi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            pos = (k + 1) * h
        self._cache[x] = phi
        return phi


def solve_frame_ode(
    potential: PotentialSpec,
    s_grid,
    t_grid,
    steps_per_cell: int = 8,
    trunc_n: int = 24,
    tail: TailAccumulator | None = None,
):
    """Integrate the two holomorphic frame ODEs along the axes.

    Returns (phi_s list over s_grid, phi_t list over t_grid, flow_s, flow_t);
    the flows evaluate off-grid points deterministically.
    """
    s_grid = np.asarray(s_grid, float)
    t_grid = np.asarray(t_grid, float)
    for name, grid in (("s", s_grid), ("t", t_grid)):
        if grid.size < 2 or np.any(np.diff(grid) <= 0):
            raise ValueError(f"{name} grid must be strictly increasing with >= 2 samples")
        if not np.any(grid == 0.0):
            raise ValueError(f"{name} grid must contain the basepoint 0")
    if steps_per_cell < 1:
        raise ValueError("steps_per_cell must be >= 1")
    tail = tail if tail is not None else TailAccumulator()
    potential.validate_on(s_grid, t_grid)
    min_cell = float(min(np.diff(s_grid).min(), np.diff(t_grid).min()))
    spu = steps_per_cell / min_cell
    flow_s = _AxisFlow(potential.xi_s, -1, trunc_n, spu, tail)
    flow_t = _AxisFlow(potential.xi_t, +1, trunc_n, spu, tail)
    phi_s = [flow_s.at(s) for s in s_grid]
    phi_t = [flow_t.at(t) for t in t_grid]
    return phi_s, phi_t, flow_s, flow_t


# ---------------------------------------------------------------------------
# Iwasawa + gauge normalization
# ---------------------------------------------------------------------------


@dataclass
class FramePoint:
    loop: TwistedLoop  # gauge-normalized frame (single slot; pair is (F, F))
    h: float
    gauge_log: float
    conditioning: float
    d22: float

    def pair(self) -> LoopPair:
        return LoopPair.from_frame(self.loop)


def _frame_point(
    phi_s: TwistedLoop,
    phi_t: TwistedLoop,
    f_val: float,
    g_val: float,
    initial: TwistedLoop | None,
    tail: TailAccumulator | None,
    gridpoint=None,
) -> FramePoint:
    try:
        res = iwasawa_double(phi_s, phi_t, tail)
    except OutsideBigCell as exc:
        exc.gridpoint = gridpoint
        raise
    d22 = float(res.vminus.coeff(0)[1, 1])
    fg = f_val * g_val
    if fg <= 0.0 or d22 <= 1e-13:
        raise GaugeFailure(
            f"angle function not positive (f*g={fg:.3e}, d22={d22:.3e})", gridpoint=gridpoint
        )
    h = math.sqrt(fg) * d22
    d = (f_val / (g_val * d22 * d22)) ** 0.25
    frame = res.frame.slot_s.scale_columns(d)
    if initial is not None:
        frame = loop_mul(initial, frame, tail)
    return FramePoint(
        loop=frame, h=h, gauge_log=math.log(d), conditioning=res.conditioning, d22=d22
    )


@dataclass
class FrameGrid:
    s_grid: np.ndarray
    t_grid: np.ndarray
    trunc_n: int
    frames: np.ndarray  # object array of TwistedLoop (or None at holes)
    h: np.ndarray
    gauge_log: np.ndarray
    conditioning: np.ndarray
    holes: np.ndarray  # bool mask
    hole_errors: list = field(default_factory=list)
    potential: PotentialSpec | None = None
    phi_s: list | None = None
    phi_t: list | None = None

    def pair_at(self, i: int, j: int) -> LoopPair:
        return LoopPair.from_frame(self.frames[i, j])

    def interior_indices(self):
        ns, nt = len(self.s_grid), len(self.t_grid)
        for i in range(1, ns - 1):
            for j in range(1, nt - 1):
                if not self.holes[i, j]:
                    yield i, j


def build_extended_frames(
    phi_s_list,
    phi_t_list,
    potential: PotentialSpec,
    s_grid,
    t_grid,
    initial: TwistedLoop | None = None,
    tail: TailAccumulator | None = None,
    threads: int = 1,
) -> FrameGrid:
    """Per-gridpoint Iwasawa decomposition plus diagonal gauge normalization.

    Points outside the big cell (or with nonpositive angle function) are
    recorded as holes, not fatal errors; the sweep is deterministic for any
    thread count because every point writes only its own slot.
    """
    s_grid = np.asarray(s_grid, float)
    t_grid = np.asarray(t_grid, float)
    ns, nt = len(s_grid), len(t_grid)
    frames = np.empty((ns, nt), dtype=object)
    h = np.full((ns, nt), np.nan)
    gauge_log = np.full((ns, nt), np.nan)
    conditioning = np.full((ns, nt), np.nan)
    holes = np.zeros((ns, nt), dtype=bool)
    hole_errors: list = []
    f_vals = [potential.f.eval(float(s)) for s in s_grid]
    g_vals = [potential.g.eval(float(t)) for t in t_grid]

    def run_row(i: int):
        row_tail = TailAccumulator(bound=tail.bound if tail is not None else 1e-9)
        row_errors = []
        for j in range(nt):
            try:
                pt = _frame_point(
                    phi_s_list[i],
                    phi_t_list[j],
                    f_vals[i],
                    g_vals[j],
                    initial,
                    row_tail,
                    gridpoint=(float(s_grid[i]), float(t_grid[j])),
                )
            except (OutsideBigCell, GaugeFailure) as exc:
                holes[i, j] = True
                row_errors.append((i, j, type(exc).__name__, str(exc)))
                continue
            frames[i, j] = pt.loop
            h[i, j] = pt.h
            gauge_log[i, j] = pt.gauge_log
            conditioning[i, j] = pt.conditioning
        return i, row_tail, row_errors

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_row, range(ns)))
    else:
        results = [run_row(i) for i in range(ns)]
    for _, row_tail, row_errors in sorted(results, key=lambda r: r[0]):
        if tail is not None:
            tail.merge(row_tail)
        hole_errors.extend(row_errors)
    return FrameGrid(
        s_grid=s_grid,
        t_grid=t_grid,
        trunc_n=phi_s_list[0].N,
        frames=frames,
        h=h,
        gauge_log=gauge_log,
        conditioning=conditioning,
        holes=holes,
        hole_errors=hole_errors,
        potential=potential,
        phi_s=list(phi_s_list),
        phi_t=list(phi_t_list),
    )


# ---------------------------------------------------------------------------
# Sym-type formulas
# ---------------------------------------------------------------------------


def _sym_point(frame: TwistedLoop, theta: float):
    """Surface data at one gridpoint and spectral angle.

    Everything is exact in the spectral parameter: with D = (lam dF) F^{-1},
    C = F s3 F^{-1}, E = (lam d)^2 F * F^{-1} evaluated at lam = e^theta, the
    l-slot of the Minkowski surface is G = -D - C/2, the l-slot of its mu-log
    derivative is A = -(E - D^2) - [D, C]/2, and the coordinates read

        L3:  (p, q, r) = (-(G01 + G10), G10 - G01, 2 G00)
        nil: (x1, x2, x3) = (G10 - G01, -(G01 + G10), -A00)
        normal: (-(C01 + C10)/2, (C10 - C01)/2, C00).
    """
    lam = math.exp(theta)
    M = frame.eval(lam)
    M1 = frame.eval_log_deriv(lam, 1)
    M2 = frame.eval_log_deriv(lam, 2)
    det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
    Minv = np.array([[M[1, 1], -M[0, 1]], [-M[1, 0], M[0, 0]]]) / det
    D = M1 @ Minv
    E = M2 @ Minv
    C = M @ SIGMA3 @ Minv
    G = -D - 0.5 * C
    A = -(E - D @ D) - 0.5 * (D @ C - C @ D)
    l3 = np.array([-(G[0, 1] + G[1, 0]), G[1, 0] - G[0, 1], 2.0 * G[0, 0]])
    nil = np.array([G[1, 0] - G[0, 1], -(G[0, 1] + G[1, 0]), -A[0, 0]])
    normal = np.array([-(C[0, 1] + C[1, 0]) / 2.0, (C[1, 0] - C[0, 1]) / 2.0, C[0, 0]])
    return nil, l3, normal


@dataclass
class SurfaceGrid:
    thetas: np.ndarray
    s_grid: np.ndarray
    t_grid: np.ndarray
    nil: np.ndarray  # (n_theta, ns, nt, 3)
    l3: np.ndarray
    normals: np.ndarray
    holes: np.ndarray  # (ns, nt) spectral-angle independent
    frame_grid: FrameGrid | None = None


def sym_map(fr: FrameGrid, thetas) -> SurfaceGrid:
    thetas = np.asarray(thetas, float)
    ns, nt = len(fr.s_grid), len(fr.t_grid)
    shape = (len(thetas), ns, nt, 3)
    nil = np.full(shape, np.nan)
    l3 = np.full(shape, np.nan)
    normals = np.full(shape, np.nan)
    for k, theta in enumerate(thetas):
        for i in range(ns):
            for j in range(nt):
                if fr.holes[i, j]:
                    continue
                nil[k, i, j], l3[k, i, j], normals[k, i, j] = _sym_point(
                    fr.frames[i, j], float(theta)
                )
    return SurfaceGrid(
        thetas=thetas,
        s_grid=fr.s_grid,
        t_grid=fr.t_grid,
        nil=nil,
        l3=l3,
        normals=normals,
        holes=fr.holes.copy(),
        frame_grid=fr,
    )


# ---------------------------------------------------------------------------
# pipeline facade
# ---------------------------------------------------------------------------


class Pipeline:
    """Owns one run: potential, axis flows, frame grid, surfaces.

    Also serves as the exact point evaluator behind all finite-difference
    verification: `frame_at`, `surface_at` and `spinors_at` recompute any
    off-grid point from scratch (deterministically), never by interpolation.
    """

    def __init__(
        self,
        potential: PotentialSpec,
        s_grid,
        t_grid,
        trunc_n: int = 24,
        steps_per_cell: int = 8,
        thetas=(0.0,),
        initial_frame: TwistedLoop | None = None,
        threads: int = 1,
        tail_bound: float = 1e-9,
    ):
        self.potential = potential
        self.s_grid = np.asarray(s_grid, float)
        self.t_grid = np.asarray(t_grid, float)
        self.trunc_n = int(trunc_n)
        self.steps_per_cell = int(steps_per_cell)
        self.thetas = np.asarray(thetas, float)
        self.threads = max(1, int(threads))
        self.tail = TailAccumulator(bound=tail_bound)
        if initial_frame is not None and initial_frame.N != self.trunc_n:
            initial_frame = TwistedLoop.from_terms(
                self.trunc_n,
                {k: initial_frame.coeff(k) for k in range(-initial_frame.N, initial_frame.N + 1)},
            )
        self.initial_frame = initial_frame
        self.phi_s, self.phi_t, self._flow_s, self._flow_t = solve_frame_ode(
            potential, self.s_grid, self.t_grid, self.steps_per_cell, self.trunc_n, self.tail
        )
        self.frame_grid: FrameGrid | None = None
        self.surface_grid: SurfaceGrid | None = None
        self._point_cache: dict[tuple[float, float], FramePoint] = {}

    # -- batch stages ---------------------------------------------------------
    def run(self) -> "Pipeline":
        self.frame_grid = build_extended_frames(
            self.phi_s,
            self.phi_t,
            self.potential,
            self.s_grid,
            self.t_grid,
            initial=self.initial_frame,
            tail=self.tail,
            threads=self.threads,
        )
        self.surface_grid = sym_map(self.frame_grid, self.thetas)
        return self

    # -- point evaluators -------------------------------------------------------
    def frame_at(self, s: float, t: float) -> FramePoint:
        key = (float(s), float(t))
        hit = self._point_cache.get(key)
        if hit is None:
            hit = _frame_point(
                self._flow_s.at(s),
                self._flow_t.at(t),
                self.potential.f.eval(float(s)),
                self.potential.g.eval(float(t)),
                self.initial_frame,
                None,
                gridpoint=key,
            )
            self._point_cache[key] = hit
        return hit

    def h_at(self, s: float, t: float) -> float:
        return self.frame_at(s, t).h

    def surface_at(self, s: float, t: float, theta: float):
        """(nil point, L3 point, unit normal) at an arbitrary parameter point."""
        return _sym_point(self.frame_at(s, t).loop, float(theta))

    def nil_at(self, s, t, theta):
        return self.surface_at(s, t, theta)[0]

    def l3_at(self, s, t, theta):
        return self.surface_at(s, t, theta)[1]

    def normal_at(self, s, t, theta):
        return self.surface_at(s, t, theta)[2]

    def frame_pc_at(self, s: float, t: float, theta: float) -> PCMatrix2:
        return pair_eval(self.frame_at(s, t).pair(), float(theta))

    def spinors_at(self, s: float, t: float, theta: float):
        """Generating spinor pair (chi1, chi2) and angle function h.

        The pair is gauged by mu^{-1/2}, mu^{+1/2} so that it satisfies the
        plain nonlinear Dirac system with potential (i'/4) h at every
        spectral angle, matching the surface produced by the Sym formulas.
        """
        pt = self.frame_at(s, t)
        F = pair_eval(pt.pair(), float(theta))
        root = math.sqrt(pt.h / 2.0)
        half = float(theta) / 2.0
        mu_m = ParaComplex.from_null(math.exp(-half), math.exp(half))  # mu^{-1/2}
        mu_p = ParaComplex.from_null(math.exp(half), math.exp(-half))  # mu^{+1/2}
        chi1 = mu_m * F.entry(1, 0) * root
        chi2 = mu_p * F.entry(1, 1) * root
        return chi1, chi2, pt.h


# ---------------------------------------------------------------------------
# normalized potential extraction
# ---------------------------------------------------------------------------


@dataclass
class ExtractedPotential:
    axis_values: np.ndarray
    f: np.ndarray
    Q: np.ndarray
    g: np.ndarray
    R: np.ndarray
    b_hat: list  # ParaComplex samples of -(i'/4)(f l + g lbar)
    B_hat: list  # ParaComplex samples of (Q l + R lbar)/4


def _log_derivative_loop(factor_fn, x: float, delta: float) -> TwistedLoop:
    """A(x)^{-1} A'(x) by a 4th-order central stencil on the factor loops."""
    deriv = (1.0 / (12.0 * delta)) * (
        factor_fn(x - 2 * delta)
        + (-8.0) * factor_fn(x - delta)
        + 8.0 * factor_fn(x + delta)
        + (-1.0) * factor_fn(x + 2 * delta)
    )
    return loop_mul(loop_inv(factor_fn(x)), deriv)


def extract_normalized_potential(
    pipeline: Pipeline, axis_values=None, fd_step: float = 1e-2
) -> ExtractedPotential:
    """Recover the normalized potential data from the frame family.

    The frame at (s, 0) is Birkhoff-split with the minus factor normalized at
    infinity; its logarithmic s-derivative is the lam^{-1} potential matrix,
    giving f and Q.  Symmetrically the plus-normalized factor along (0, t)
    gives g and R.  Requires the axes inside the domain of the potential.
    """
    if axis_values is None:
        axis_values = pipeline.s_grid
    axis_values = np.asarray(axis_values, float)

    def minus_factor(s: float) -> TwistedLoop:
        return birkhoff_split(pipeline.frame_at(s, 0.0).loop, "minus_star_plus").minus

    def plus_factor(t: float) -> TwistedLoop:
        return birkhoff_split(pipeline.frame_at(0.0, t).loop, "plus_star_minus").plus

    f_rec, Q_rec, g_rec, R_rec = [], [], [], []
    for x in axis_values:
        xs = float(x)
        xi_s = _log_derivative_loop(minus_factor, xs, fd_step).coeff(-1)
        fv = -4.0 * xi_s[0, 1]
        f_rec.append(fv)
        Q_rec.append(xi_s[1, 0] * fv)
        xi_t = _log_derivative_loop(plus_factor, xs, fd_step).coeff(+1)
        gv = 4.0 * xi_t[1, 0]
        g_rec.append(gv)
        R_rec.append(-xi_t[0, 1] * gv)
    f_rec = np.array(f_rec)
    Q_rec = np.array(Q_rec)
    g_rec = np.array(g_rec)
    R_rec = np.array(R_rec)
    b_hat = [ParaComplex.from_null(-fv / 4.0, gv / 4.0) for fv, gv in zip(f_rec, g_rec)]
    B_hat = [ParaComplex.from_null(qv / 4.0, rv / 4.0) for qv, rv in zip(Q_rec, R_rec)]
    return ExtractedPotential(
        axis_values=axis_values, f=f_rec, Q=Q_rec, g=g_rec, R=R_rec, b_hat=b_hat, B_hat=B_hat
    )


# ---------------------------------------------------------------------------
# integral representation in Minkowski space
# ---------------------------------------------------------------------------


def _phi_null(spinor_fn, s: float, t: float):
    """Null components (d f/ds, d f/dt) of the closed Minkowski 1-form.

    With e = i' the integrand vector is
    (conj(psi2)^2 - psi1^2, i'(conj(psi2)^2 + psi1^2), 2 i' psi1 conj(psi2));
    its l and lbar components are exactly the s- and t-derivatives of the
    surface.
    """
    psi1, psi2 = spinor_fn(s, t)
    c2b = psi2.conj()
    if abs((psi2 * c2b - psi1 * psi1.conj()).re) < 1e-14:
        raise DegenerateSpinors(f"spinor norm degenerates at (s={s}, t={t})")
    comp1 = c2b * c2b - psi1 * psi1
    comp2 = ParaComplex(0.0, 1.0) * (c2b * c2b + psi1 * psi1)
    comp3 = 2.0 * ParaComplex(0.0, 1.0) * psi1 * c2b
    p = np.array([comp1.p, comp2.p, comp3.p])
    q = np.array([comp1.q, comp2.q, comp3.q])
    return p, q


def integrate_weierstrass_path(spinor_fn, waypoints, cells_per_unit: float = 10.0) -> np.ndarray:
    """Integrate the Weierstrass 1-form along an axis-aligned polyline.

    Each segment uses composite Simpson quadrature with at least one cell per
    1/cells_per_unit of parameter length.  Returns the increment vector.
    """
    total = np.zeros(3)
    for (s0, t0), (s1, t1) in zip(waypoints[:-1], waypoints[1:]):
        if s0 != s1 and t0 != t1:
            raise ValueError("waypoints must form axis-aligned segments")
        if s0 == s1 and t0 == t1:
            continue
        along_s = t0 == t1
        a, b = (s0, s1) if along_s else (t0, t1)
        ncells = max(1, int(math.ceil(abs(b - a) * cells_per_unit)))
        xs = np.linspace(a, b, ncells + 1)
        comp = 0 if along_s else 1
        for x0, x1 in zip(xs[:-1], xs[1:]):
            xm = 0.5 * (x0 + x1)
            vals = []
            for x in (x0, xm, x1):
                st = (x, t0) if along_s else (s0, x)
                vals.append(_phi_null(spinor_fn, *st)[comp])
            total = total + (x1 - x0) / 6.0 * (vals[0] + 4.0 * vals[1] + vals[2])
    return total


def weierstrass_integral_L3(
    spinor_fn,
    s_values,
    t_values,
    basepoint=(0.0, 0.0),
    base_value=(0.0, 0.0, 0.0),
    cells_per_unit: float = 10.0,
) -> np.ndarray:
    """Surface samples from path integration of the spinor 1-form.

    Integrates from `basepoint` along the t = t_base row first, then up each
    column; the 1-form is closed, so the path choice only matters through
    quadrature error.
    """
    s_values = np.asarray(s_values, float)
    t_values = np.asarray(t_values, float)
    s_base, t_base = float(basepoint[0]), float(basepoint[1])
    out = np.zeros((len(s_values), len(t_values), 3))
    row = {}
    for i, s in enumerate(s_values):
        row[i] = np.asarray(base_value, float) + integrate_weierstrass_path(
            spinor_fn, [(s_base, t_base), (float(s), t_base)], cells_per_unit
        )
    for i, s in enumerate(s_values):
        for j, t in enumerate(t_values):
            out[i, j] = row[i] + integrate_weierstrass_path(
                spinor_fn, [(float(s), t_base), (float(s), float(t))], cells_per_unit
            )
    return out
