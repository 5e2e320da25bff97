"""Heisenberg-group and Minkowski geometry with verification residuals.

The Heisenberg group here is R^3 with multiplication
    (x1,x2,x3)*(y1,y2,y3) = (x1+y1, x2+y2, x3+y3 + (x1 y2 - y1 x2)/2)
and the left-invariant indefinite metric of signature (-,+,+) in the
orthonormal left-invariant frame E1, E2, E3 (E1 timelike).  Minkowski space
L3 carries the (+,-,+) metric throughout.

All differential checks are finite-difference based with explicit error
budgets: central differences of order 2, optionally Richardson-extrapolated,
and every residual can report the estimated FD noise floor next to the
value.  Null coordinates (s, t) are used everywhere: for a para-complex
field w = w_p l + w_q lbar one has (d_z w)_p = d_s w_p, (d_z w)_q = d_t w_q
and the conjugate swaps slots, so all Cauchy-Riemann style operators become
componentwise cross-derivatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMetric, GridTooCoarse, ProjectionPole, ZeroDivisor
from .paracomplex import ParaComplex

__all__ = [
    "nil_mul",
    "nil_inv",
    "nil_left_translate",
    "nil_metric_and_bracket",
    "nil_metric",
    "sym_bracket",
    "lie_bracket",
    "first_fundamental_form",
    "minimality_residual",
    "mean_curvature_L3",
    "SpinorField",
    "spinors_and_dirac",
    "abresch_rosenberg",
    "pi_nil_plus",
    "pi_l3_minus",
    "pi_l3_minus_inv",
    "gauss_from_spinors",
    "flatness_residual",
]

NIL_METRIC_SIGNS = np.array([-1.0, 1.0, 1.0])
L3_METRIC_SIGNS = np.array([1.0, -1.0, 1.0])


# ---------------------------------------------------------------------------
# group structure
# ---------------------------------------------------------------------------


def nil_mul(a, b) -> np.ndarray:
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    return np.array(
        [a[0] + b[0], a[1] + b[1], a[2] + b[2] + 0.5 * (a[0] * b[1] - b[0] * a[1])]
    )


def nil_inv(a) -> np.ndarray:
    return -np.asarray(a, float)


def nil_left_translate(x, v) -> np.ndarray:
    """Coordinate tangent vector v at the point x, expressed in the
    left-invariant frame (E1, E2, E3)."""
    x = np.asarray(x, float)
    v = np.asarray(v, float)
    return np.array([v[0], v[1], v[2] + 0.5 * (x[1] * v[0] - x[0] * v[1])])


def nil_metric(X, Y) -> float:
    """Indefinite product of frame-component vectors, signature (-,+,+)."""
    X = np.asarray(X, float)
    Y = np.asarray(Y, float)
    return float((NIL_METRIC_SIGNS * X * Y).sum())


def sym_bracket(X, Y) -> np.ndarray:
    """Symmetrized connection bracket {X,Y} = nabla_X Y + nabla_Y X on frame
    components; nonzero entries: {e1,e3} = -e2, {e2,e3} = -e1."""
    X = np.asarray(X)
    Y = np.asarray(Y)
    return np.array(
        [
            -(X[1] * Y[2] + X[2] * Y[1]),
            -(X[0] * Y[2] + X[2] * Y[0]),
            0.0 * X[0],
        ]
    )


def lie_bracket(X, Y) -> np.ndarray:
    """[e1, e2] = e3 and cyclic-zero otherwise (tau = 1/2)."""
    X = np.asarray(X)
    Y = np.asarray(Y)
    return np.array([0.0 * X[0], 0.0 * X[0], X[0] * Y[1] - X[1] * Y[0]])


def nil_metric_and_bracket(X, Y, at=None):
    """(g(X,Y), {X,Y}) for vectors given in the left-invariant frame.

    If `at` is provided the inputs are coordinate vectors at that point and
    are left-translated first.
    """
    if at is not None:
        X = nil_left_translate(at, X)
        Y = nil_left_translate(at, Y)
    return nil_metric(X, Y), sym_bracket(X, Y)


# ---------------------------------------------------------------------------
# finite differences
# ---------------------------------------------------------------------------


def _central(fn, x: float, h: float):
    return (np.asarray(fn(x + h)) - np.asarray(fn(x - h))) / (2.0 * h)


def richardson_d1(fn, x: float, h: float, levels: int = 2):
    """Richardson-extrapolated first derivative of a vector-valued callable."""
    table = [_central(fn, x, h / (2.0**k)) for k in range(levels)]
    for m in range(1, levels):
        fac = 4.0**m
        table = [(fac * table[k + 1] - table[k]) / (fac - 1.0) for k in range(len(table) - 1)]
    return table[0]


def cross_d2(fn, s: float, t: float, h: float, levels: int = 2):
    """Richardson-extrapolated mixed derivative d^2/(ds dt) of fn(s, t)."""

    def estimate(hh):
        return (
            np.asarray(fn(s + hh, t + hh))
            - np.asarray(fn(s + hh, t - hh))
            - np.asarray(fn(s - hh, t + hh))
            + np.asarray(fn(s - hh, t - hh))
        ) / (4.0 * hh * hh)

    table = [estimate(h / (2.0**k)) for k in range(levels)]
    for m in range(1, levels):
        fac = 4.0**m
        table = [(fac * table[k + 1] - table[k]) / (fac - 1.0) for k in range(len(table) - 1)]
    return table[0]


# ---------------------------------------------------------------------------
# first fundamental form and conformality
# ---------------------------------------------------------------------------


@dataclass
class FundamentalFormResult:
    E: np.ndarray  # <f_x, f_x>
    G: np.ndarray  # <f_y, f_y>
    F: np.ndarray  # <f_x, f_y>
    conformal_factor: np.ndarray  # e^u estimate = E
    residual: float  # max(|E + G|, |F|)


def _xy_tangents(surface_fn, s, t, step, space: str):
    """FD tangents in conformal coordinates x, y; s = x + y, t = x - y."""
    fpp = np.asarray(surface_fn(s + step, t + step))
    fmm = np.asarray(surface_fn(s - step, t - step))
    fpm = np.asarray(surface_fn(s + step, t - step))
    fmp = np.asarray(surface_fn(s - step, t + step))
    f_x = (fpp - fmm) / (2.0 * step)
    f_y = (fpm - fmp) / (2.0 * step)
    if space == "nil":
        base = np.asarray(surface_fn(s, t))
        f_x = nil_left_translate(base, f_x)
        f_y = nil_left_translate(base, f_y)
        signs = NIL_METRIC_SIGNS
    elif space == "l3":
        signs = L3_METRIC_SIGNS
    else:
        raise ValueError(f"unknown space {space!r}")
    return f_x, f_y, signs


def first_fundamental_form(surface_fn, points, step: float = 1e-3, space: str = "nil"):
    """Conformality data at each (s, t) point.

    Returns per-point arrays of <f_x,f_x>, <f_y,f_y>, <f_x,f_y> and the peak
    conformality residual max(|<f_x,f_x> + <f_y,f_y>|, |<f_x,f_y>|).
    Raises DegenerateMetric when the form collapses at a point.
    """
    Es, Gs, Fs = [], [], []
    for s, t in points:
        f_x, f_y, signs = _xy_tangents(surface_fn, float(s), float(t), step, space)
        E = float((signs * f_x * f_x).sum())
        G = float((signs * f_y * f_y).sum())
        F = float((signs * f_x * f_y).sum())
        if abs(E) < 1e-14 and abs(G) < 1e-14:
            raise DegenerateMetric(f"first fundamental form vanishes at (s={s}, t={t})")
        Es.append(E)
        Gs.append(G)
        Fs.append(F)
    Es, Gs, Fs = np.array(Es), np.array(Gs), np.array(Fs)
    residual = float(max(np.abs(Es + Gs).max(), np.abs(Fs).max()))
    return FundamentalFormResult(E=Es, G=Gs, F=Fs, conformal_factor=Es, residual=residual)


# ---------------------------------------------------------------------------
# minimality (structure equation) residuals
# ---------------------------------------------------------------------------


@dataclass
class MinimalityResult:
    maurer_cartan: float  # max residual of the integrability equation
    minimality: float  # max residual of the zero-mean-curvature equation
    residual: float
    noise_floor: float


def _translated_null_derivs(surface_fn, s, t, step):
    """P = left-translated d_s f and Q = left-translated d_t f at (s, t)."""
    base = np.asarray(surface_fn(s, t))
    ds = (np.asarray(surface_fn(s + step, t)) - np.asarray(surface_fn(s - step, t))) / (2 * step)
    dt = (np.asarray(surface_fn(s, t + step)) - np.asarray(surface_fn(s, t - step))) / (2 * step)
    return nil_left_translate(base, ds), nil_left_translate(base, dt)


def _minimality_at(surface_fn, s, t, step):
    P0, Q0 = _translated_null_derivs(surface_fn, s, t, step)
    Psp, Qsp = _translated_null_derivs(surface_fn, s + step, t, step)
    Psm, Qsm = _translated_null_derivs(surface_fn, s - step, t, step)
    Ptp, Qtp = _translated_null_derivs(surface_fn, s, t + step, step)
    Ptm, Qtm = _translated_null_derivs(surface_fn, s, t - step, step)
    dP_dt = (Ptp - Ptm) / (2 * step)
    dQ_ds = (Qsp - Qsm) / (2 * step)
    # integrability: p slot of  Phi_zbar - conj(Phi)_z + [conj(Phi), Phi]
    r_mc_p = dP_dt - dQ_ds + lie_bracket(Q0, P0)
    r_mc_q = dQ_ds - dP_dt + lie_bracket(P0, Q0)
    # zero mean curvature: Phi_zbar + conj(Phi)_z + {Phi, conj(Phi)}
    r_min_p = dP_dt + dQ_ds + sym_bracket(P0, Q0)
    r_min_q = dQ_ds + dP_dt + sym_bracket(Q0, P0)
    mc = max(np.abs(r_mc_p).max(), np.abs(r_mc_q).max())
    mini = max(np.abs(r_min_p).max(), np.abs(r_min_q).max())
    return mc, mini


def minimality_residual(surface_fn, points, step: float = 1e-3, claim: float | None = None):
    """Structure-equation residuals of a map into the Heisenberg group.

    Central differences at `step`; the noise floor is estimated by comparing
    against the doubled step (second-order Richardson gap).  When `claim` is
    given and the floor exceeds it, GridTooCoarse is raised.
    """
    mc1 = mini1 = mc2 = mini2 = 0.0
    for s, t in points:
        a, b = _minimality_at(surface_fn, float(s), float(t), step)
        mc1, mini1 = max(mc1, a), max(mini1, b)
        a2, b2 = _minimality_at(surface_fn, float(s), float(t), 2.0 * step)
        mc2, mini2 = max(mc2, a2), max(mini2, b2)
    residual = max(mc1, mini1)
    noise_floor = abs(max(mc2, mini2) - residual) / 3.0 + 1e-13 / step**2 * 1e-3
    if claim is not None and noise_floor > claim:
        raise GridTooCoarse(
            f"FD noise floor {noise_floor:.3e} exceeds claimed residual {claim:.3e}"
        )
    return MinimalityResult(
        maurer_cartan=mc1, minimality=mini1, residual=residual, noise_floor=noise_floor
    )


# ---------------------------------------------------------------------------
# mean curvature in Minkowski space
# ---------------------------------------------------------------------------


def _auto_normal(f_x, f_y):
    v = L3_METRIC_SIGNS * np.cross(f_x, f_y)
    nn = float((L3_METRIC_SIGNS * v * v).sum())
    if nn <= 1e-20:
        raise DegenerateMetric("surface normal is not spacelike")
    n = v / math.sqrt(nn)
    if n[2] < 0:
        n = -n
    return n


def mean_curvature_L3(surface_fn, points, step: float = 1e-3, normal_fn=None) -> np.ndarray:
    """Pointwise mean curvature of a timelike surface in L3 ((+,-,+) metric).

    H = tr(II I^{-1})/2 with II = -<df, dN>.  When `normal_fn` is omitted the
    normal is the normalized Lorentzian cross product oriented with positive
    third component (the orientation of the engine's Gauss maps).
    """
    if normal_fn is None:

        def normal_fn(s, t):
            f_x, f_y, _ = _xy_tangents(surface_fn, s, t, step, "l3")
            return _auto_normal(f_x, f_y)

    out = []
    for s, t in points:
        s, t = float(s), float(t)
        f_x, f_y, signs = _xy_tangents(surface_fn, s, t, step, "l3")
        npp = np.asarray(normal_fn(s + step, t + step))
        nmm = np.asarray(normal_fn(s - step, t - step))
        npm = np.asarray(normal_fn(s + step, t - step))
        nmp = np.asarray(normal_fn(s - step, t + step))
        n_x = (npp - nmm) / (2.0 * step)
        n_y = (npm - nmp) / (2.0 * step)
        E = float((signs * f_x * f_x).sum())
        F = float((signs * f_x * f_y).sum())
        G = float((signs * f_y * f_y).sum())
        det = E * G - F * F
        if abs(det) < 1e-12 * max(E * E + G * G + F * F, 1e-30):
            raise DegenerateMetric(f"first fundamental form singular at (s={s}, t={t})")
        II_xx = -float((signs * f_x * n_x).sum())
        II_yy = -float((signs * f_y * n_y).sum())
        II_xy = -0.5 * float((signs * (f_x * n_y + f_y * n_x)).sum())
        I_mat = np.array([[E, F], [F, G]])
        II_mat = np.array([[II_xx, II_xy], [II_xy, II_yy]])
        out.append(0.5 * float(np.trace(II_mat @ np.linalg.inv(I_mat))))
    return np.array(out)


# ---------------------------------------------------------------------------
# spinors, Dirac residuals, Hopf/quadratic differentials
# ---------------------------------------------------------------------------


def _null(z: ParaComplex) -> np.ndarray:
    return np.array([z.p, z.q])


@dataclass
class SpinorField:
    """Generating spinors on a point set with their consistency residuals.

    `dirac` is the worst residual of the two coupled first-order equations
    with potential (i'/4) h; `h_gap` compares the supplied angle function
    with 2(psi2 conj(psi2) - psi1 conj(psi1)); `eu` is the spinor expression
    2(psi2 conj(psi2) + psi1 conj(psi1)) of the conformal factor root.
    """

    points: list
    psi1: list
    psi2: list
    h: np.ndarray
    eu: np.ndarray
    dirac: float
    h_gap: float
    dirac_potential_re: float

    def dirac_potential(self, k: int) -> ParaComplex:
        """U = -(H/2) e^{u/2} + (i'/4) h at point k; purely imaginary at H=0."""
        return ParaComplex(0.0, float(self.h[k]) / 4.0)


def spinors_and_dirac(spinor_fn, h_fn, points, step: float = 1e-3) -> SpinorField:
    """Evaluate spinors and the nonlinear Dirac residuals at each point.

    spinor_fn(s, t) -> (psi1, psi2) para-complex; h_fn(s, t) -> angle
    function.  Derivatives are central differences at `step`.
    """

    def p1(s, t):
        return _null(spinor_fn(s, t)[0])

    def p2(s, t):
        return _null(spinor_fn(s, t)[1])

    psi1_out, psi2_out, h_out, eu_out = [], [], [], []
    worst_dirac = 0.0
    worst_hgap = 0.0
    worst_repot = 0.0
    for s, t in points:
        s, t = float(s), float(t)
        c1 = spinor_fn(s, t)[0]
        c2 = spinor_fn(s, t)[1]
        h = float(h_fn(s, t))
        d1_s = _central(lambda x: p1(x, t), s, step)
        d1_t = _central(lambda x: p1(s, x), t, step)
        d2_s = _central(lambda x: p2(x, t), s, step)
        d2_t = _central(lambda x: p2(s, x), t, step)
        n1, n2 = _null(c1), _null(c2)
        # d_z psi2 + (i'/4) h psi1 : null components (d_s p, d_t q)
        r1 = np.array([d2_s[0] + 0.25 * h * n1[0], d2_t[1] - 0.25 * h * n1[1]])
        # -d_zbar psi1 + (i'/4) h psi2 : d_zbar has components (d_t p, d_s q)
        r2 = np.array([-d1_t[0] + 0.25 * h * n2[0], -d1_s[1] - 0.25 * h * n2[1]])
        worst_dirac = max(worst_dirac, float(np.abs(r1).max()), float(np.abs(r2).max()))
        h_spinor = 2.0 * (n2[0] * n2[1] - n1[0] * n1[1])
        eu = 2.0 * (n2[0] * n2[1] + n1[0] * n1[1])
        worst_hgap = max(worst_hgap, abs(h_spinor - h))
        # Dirac potential from the equation itself: -d_z psi2 / psi1; needs
        # Richardson-extrapolated derivatives to resolve Re U at the 1e-9 level
        scale = math.sqrt(max(abs(eu), 1e-12))
        if min(abs(n1[0]), abs(n1[1])) > 1e-2 * scale:
            base = max(step, 2e-2)
            dp = float(richardson_d1(lambda x: p2(x, t)[0], s, base, levels=3))
            dq = float(richardson_d1(lambda x: p2(s, x)[1], t, base, levels=3))
            pot_p = -dp / n1[0]
            pot_q = -dq / n1[1]
            worst_repot = max(worst_repot, abs((pot_p + pot_q) / 2.0))
        psi1_out.append(c1)
        psi2_out.append(c2)
        h_out.append(h)
        eu_out.append(eu)
    return SpinorField(
        points=list(points),
        psi1=psi1_out,
        psi2=psi2_out,
        h=np.array(h_out),
        eu=np.array(eu_out),
        dirac=worst_dirac,
        h_gap=worst_hgap,
        dirac_potential_re=worst_repot,
    )


def _hopf_B_at(spinor_fn, s: float, t: float, step: float) -> np.ndarray:
    """Null components of the quadratic-differential coefficient B at (s,t).

    B = -(i'/4) (A + i' phi3^2) with the Hopf coefficient
    A = 2(psi1 (conj psi2)_z - conj(psi2) (psi1)_z) - 4 i' psi1^2 conj(psi2)^2
    and phi3 = 2 psi1 conj(psi2).
    """

    def fields(ss, tt):
        a, b = spinor_fn(ss, tt)
        return _null(a), _null(b.conj())

    n1, n2b = fields(s, t)
    d_s = _central(lambda x: np.concatenate(fields(x, t)), s, step)
    d_t = _central(lambda x: np.concatenate(fields(s, x)), t, step)
    # d_z w has null components (d_s w_p, d_t w_q)
    d1 = np.array([d_s[0], d_t[1]])  # (psi1)_z
    d2b = np.array([d_s[2], d_t[3]])  # (conj psi2)_z
    term = 2.0 * (n1 * d2b - n2b * d1)
    quart = n1 * n1 * n2b * n2b
    # i' has null form (1, -1)
    iota = np.array([1.0, -1.0])
    A = term - 4.0 * iota * quart
    phi3sq = 4.0 * n1 * n1 * n2b * n2b
    B = -0.25 * iota * (A + iota * phi3sq)
    return B


@dataclass
class QuadraticDifferentialResult:
    B: list  # ParaComplex per point
    dzbar_residual: float


def abresch_rosenberg(
    spinor_fn, points, step: float = 1e-2, richardson: bool = True
) -> QuadraticDifferentialResult:
    """Quadratic-differential coefficient B and its para-holomorphy defect.

    The H = 0 branch: B = -(i'/4)(A + i' phi3^2).  `richardson` extrapolates
    the step once for fourth-order accuracy of B itself; the d_zbar residual
    is measured by differencing the B field.
    """

    def B_at(s, t):
        b1 = _hopf_B_at(spinor_fn, s, t, step)
        if not richardson:
            return b1
        b2 = _hopf_B_at(spinor_fn, s, t, step / 2.0)
        return (4.0 * b2 - b1) / 3.0

    values = []
    worst = 0.0
    for s, t in points:
        s, t = float(s), float(t)
        b = B_at(s, t)
        values.append(ParaComplex.from_null(float(b[0]), float(b[1])))
        dB_t = _central(lambda x: B_at(s, x), t, step)
        dB_s = _central(lambda x: B_at(x, t), s, step)
        # d_zbar B has null components (d_t B_p, d_s B_q)
        worst = max(worst, abs(float(dB_t[0])), abs(float(dB_s[1])))
    return QuadraticDifferentialResult(B=values, dzbar_residual=worst)


# ---------------------------------------------------------------------------
# Gauss map projections
# ---------------------------------------------------------------------------


def pi_nil_plus(v) -> ParaComplex:
    """Stereographic projection of the Heisenberg de Sitter sphere from (0,0,1)."""
    v = np.asarray(v, float)
    if abs(1.0 - v[2]) < 1e-15:
        raise ProjectionPole("projection pole x3 = 1")
    return ParaComplex(v[0] / (1.0 - v[2]), v[1] / (1.0 - v[2]))


def pi_l3_minus(v) -> ParaComplex:
    """Stereographic projection of the L3 de Sitter sphere from (0,0,-1)."""
    v = np.asarray(v, float)
    if abs(1.0 + v[2]) < 1e-15:
        raise ProjectionPole("projection pole x3 = -1")
    return ParaComplex(v[0] / (1.0 + v[2]), v[1] / (1.0 + v[2]))


def pi_l3_minus_inv(g: ParaComplex) -> np.ndarray:
    gg = g.modulus_form()
    if abs(1.0 + gg) < 1e-15:
        raise ProjectionPole("inverse projection undefined on |g|^2 = -1")
    return np.array([2.0 * g.re, 2.0 * g.im, 1.0 - gg]) / (1.0 + gg)


def gauss_from_spinors(psi1: ParaComplex, psi2: ParaComplex) -> ParaComplex:
    """Projected Gauss map g = i' conj(psi1) / psi2."""
    if psi2.is_zero_divisor(1e-300):
        raise ZeroDivisor("psi2 is a zero divisor")
    return ParaComplex(0.0, 1.0) * psi1.conj() / psi2


# ---------------------------------------------------------------------------
# flat connection family residual
# ---------------------------------------------------------------------------


def flatness_residual(h_fn, Q_fn, R_fn, points, thetas, step: float = 2e-2) -> float:
    """Residual of d alpha + alpha ^ alpha for the spectral connection family.

    alpha is assembled from the angle function h and the potential data
    (Q, R); its curvature U_zbar - V_z + [V, U] is evaluated slotwise in
    null coordinates at each theta.  First and mixed derivatives of log h
    are Richardson extrapolated, so the result is FD-noise limited.
    """
    worst = 0.0
    for s, t in points:
        s, t = float(s), float(t)
        h = float(h_fn(s, t))
        Q = float(Q_fn(s))
        R = float(R_fn(t))

        def logh_s(x):
            return math.log(h_fn(x, t))

        def logh_t(x):
            return math.log(h_fn(s, x))

        a = float(richardson_d1(logh_s, s, step, levels=3))  # d_s log h
        b = float(richardson_d1(logh_t, t, step, levels=3))  # d_t log h
        m = float(cross_d2(lambda u, v: math.log(h_fn(u, v)), s, t, step, levels=3))
        h_s = a * h
        h_t = b * h
        for theta in thetas:
            ep = math.exp(float(theta))
            em = math.exp(-float(theta))
            Up = np.array([[a / 2.0, -h * em / 4.0], [Q * em / h, -a / 2.0]])
            Uq = np.array([[b / 2.0, h * ep / 4.0], [-R * ep / h, -b / 2.0]])
            Vp = np.array([[-b / 2.0, -R * ep / h], [h * ep / 4.0, b / 2.0]])
            Vq = np.array([[-a / 2.0, Q * em / h], [-h * em / 4.0, a / 2.0]])
            dUp_t = np.array([[m / 2.0, -h_t * em / 4.0], [-Q * em * h_t / h**2, -m / 2.0]])
            dVp_s = np.array([[-m / 2.0, R * ep * h_s / h**2], [ep * h_s / 4.0, m / 2.0]])
            dUq_s = np.array([[m / 2.0, h_s * ep / 4.0], [R * ep * h_s / h**2, -m / 2.0]])
            dVq_t = np.array([[-m / 2.0, -Q * em * h_t / h**2], [-em * h_t / 4.0, m / 2.0]])
            flat_p = dUp_t - dVp_s + Vp @ Up - Up @ Vp
            flat_q = dUq_s - dVq_t + Vq @ Uq - Uq @ Vq
            worst = max(worst, float(np.abs(flat_p).max()), float(np.abs(flat_q).max()))
    return worst
