"""Verification report: every structural identity the engine promises.

Each check produces {check, value, threshold, pass} (some carry a noise
floor); `run_verification` aggregates them into a JSON-ready dict.  For
builtin potentials the closed-form oracles (surface relations, quadratic
differential values, angle function) are checked as well.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DegenerateMetric, NilWeierError
from .geometry import (
    abresch_rosenberg,
    first_fundamental_form,
    flatness_residual,
    mean_curvature_L3,
    minimality_residual,
    spinors_and_dirac,
)
from .loopalg import PCMatrix2, SIGMA3, pair_eval
from .pipeline import Pipeline, extract_normalized_potential

__all__ = ["run_verification", "safe_points"]

_LAMBDA_THETAS = (0.0, 0.25, -0.25, 0.5, -0.5)


def safe_points(pipeline: Pipeline, count: int = 9, margin: int = 2, nil_side: bool = False):
    """Interior gridpoints with a hole-free neighborhood, downsampled.

    With nil_side=True, points whose induced Heisenberg metric is close to
    degenerate are dropped too (finite differences need a margin there).
    """
    fg = pipeline.frame_grid
    ns, nt = len(fg.s_grid), len(fg.t_grid)
    candidates = []
    for i in range(margin, ns - margin):
        for j in range(margin, nt - margin):
            block = fg.holes[i - margin : i + margin + 1, j - margin : j + margin + 1]
            if block.any():
                continue
            candidates.append((float(fg.s_grid[i]), float(fg.t_grid[j])))
    if nil_side and candidates:
        theta0 = float(pipeline.thetas[0])

        def conf(st):
            try:
                res = first_fundamental_form(
                    lambda a, b: pipeline.nil_at(a, b, theta0), [st], step=1e-3, space="nil"
                )
                return abs(float(res.E[0]))
            except (DegenerateMetric, NilWeierError):
                return 0.0

        vals = [conf(st) for st in candidates]
        positives = sorted(v for v in vals if v > 0.0)
        med = positives[len(positives) // 2] if positives else 0.0
        # keep points whose induced metric sits in a moderate band around the
        # median (finite differences degrade where it degenerates or blows up),
        # preferring points near the basepoint
        banded = [
            (abs(st[0]) + abs(st[1]), st)
            for st, v in zip(candidates, vals)
            if med / 30.0 <= v <= med * 30.0
        ]
        banded.sort(key=lambda r: (r[0], r[1]))
        candidates = [st for _, st in banded]
        return candidates[:count]
    if len(candidates) > count:
        idx = np.linspace(0, len(candidates) - 1, count).astype(int)
        candidates = [candidates[k] for k in idx]
    return candidates


def _check(name, value, threshold, floor=None):
    """A residual passes when below threshold, or, for FD-based checks with a
    noise floor, when it does not exceed that floor by more than 10x (then
    there is no evidence of a genuine violation)."""
    ok = bool(value <= threshold)
    entry = {
        "check": name,
        "value": float(value),
        "threshold": float(threshold),
    }
    if floor is not None:
        entry["noise_floor"] = float(floor)
        ok = ok or bool(value <= 10.0 * floor)
    entry["pass"] = ok
    return entry


_ORACLE_B = {"cylinder": 1.0 / 16.0, "hyperbolic-cylinder": -1.0 / 16.0, "horizontal-plane": 0.0}


def _surface_relation(oracle: str, v: np.ndarray) -> float:
    if oracle == "cylinder":
        return abs(v[2] - v[0] * v[1] / 2.0)
    if oracle == "hyperbolic-cylinder":
        return abs(v[2] + v[0] * v[1] / 2.0)
    if oracle in ("horizontal-plane",):
        return abs(v[2])
    return 0.0


def run_verification(pipeline: Pipeline, oracle: str | None = None) -> dict:
    if pipeline.frame_grid is None:
        pipeline.run()
    fg = pipeline.frame_grid
    sg = pipeline.surface_grid
    checks = []
    pts = safe_points(pipeline)
    pts_nil = safe_points(pipeline, nil_side=True)
    theta0 = float(pipeline.thetas[0])
    thetas = [float(x) for x in pipeline.thetas]

    # frame quality: det, para-unitarity, angle function stability in theta
    det_err = reality_err = h_theta_err = 0.0
    for s, t in pts:
        pt = pipeline.frame_at(s, t)
        pair = pt.pair()
        for th in _LAMBDA_THETAS:
            F = pair_eval(pair, th)
            d = F.det()
            det_err = max(det_err, abs(d.re - 1.0), abs(d.im))
            inv = F.conj().transpose().inverse()
            s3 = PCMatrix2.from_real(SIGMA3)
            reality_err = max(reality_err, ((s3 @ inv @ s3) - F).max_abs())
            f21, f22 = F.entry(1, 0), F.entry(1, 1)
            h_theta = pt.h * (f22 * f22.conj() - f21 * f21.conj()).re
            h_theta_err = max(h_theta_err, abs(h_theta - pt.h))
    checks.append(_check("frame_det_unit", det_err, 1e-10))
    checks.append(_check("frame_reality_condition", reality_err, 1e-10))
    checks.append(_check("angle_function_theta_independent", h_theta_err, 1e-9))

    parity = max(
        fg.frames[i, j].parity_error()
        for i in range(len(fg.s_grid))
        for j in range(len(fg.t_grid))
        if not fg.holes[i, j]
    )
    checks.append(_check("frame_twisting_parity", parity, 1e-12))

    # spinors and Dirac system
    for th in sorted({theta0, max(thetas)}):
        sp = spinors_and_dirac(
            lambda a, b: pipeline.spinors_at(a, b, th)[:2],
            pipeline.h_at,
            pts_nil,
            step=1e-3,
        )
        tag = f"theta={th:g}"
        checks.append(_check(f"dirac_residual[{tag}]", sp.dirac, 1e-6))
        checks.append(_check(f"angle_function_spinor_gap[{tag}]", sp.h_gap, 1e-9))
        checks.append(
            _check(f"dirac_potential_purely_imaginary[{tag}]", sp.dirac_potential_re, 1e-9)
        )

    # conformality of the Heisenberg surface and conformal factor consistency
    sp0 = spinors_and_dirac(
        lambda a, b: pipeline.spinors_at(a, b, theta0)[:2], pipeline.h_at, pts_nil, step=1e-3
    )
    fff = first_fundamental_form(
        lambda a, b: pipeline.nil_at(a, b, theta0), pts_nil, step=1e-3, space="nil"
    )
    fff_coarse = first_fundamental_form(
        lambda a, b: pipeline.nil_at(a, b, theta0), pts_nil, step=2e-3, space="nil"
    )
    conf_scale = max(1.0, float(np.abs(fff.E).max()))
    conf_res = fff.residual / conf_scale
    conf_floor = abs(fff_coarse.residual / conf_scale - conf_res) / 3.0
    checks.append(_check("nil_conformality_residual", conf_res, 1e-6, floor=conf_floor))
    # conformal factor e^u equals the square of the spinor expression
    # 2(psi2 conj psi2 + psi1 conj psi1); compare squares since the spinor
    # root is signed past singular curves of the surface
    eu_gap = float(np.abs(fff.E - sp0.eu**2).max()) / conf_scale
    checks.append(_check("conformal_factor_vs_spinors", eu_gap, 1e-5))

    # Minkowski side: conformal factor equals h^2, mean curvature 1/2
    fff_l3 = first_fundamental_form(
        lambda a, b: pipeline.l3_at(a, b, theta0), pts, step=1e-3, space="l3"
    )
    h_vals = np.array([pipeline.h_at(s, t) for s, t in pts])
    l3_scale = max(1.0, float((h_vals**2).max()))
    checks.append(
        _check(
            "l3_conformal_factor_vs_h_squared",
            float(np.abs(fff_l3.E - h_vals**2).max()) / l3_scale,
            1e-5,
        )
    )
    try:
        H = mean_curvature_L3(
            lambda a, b: pipeline.l3_at(a, b, theta0),
            pts,
            step=1e-3,
            normal_fn=lambda a, b: pipeline.normal_at(a, b, theta0),
        )
        checks.append(_check("l3_mean_curvature_half", float(np.abs(H - 0.5).max()), 1e-3))
    except DegenerateMetric:
        checks.append(_check("l3_mean_curvature_half", float("inf"), 1e-3))

    # normals: unit, orthogonal to FD tangents
    nn_err = orth_err = 0.0
    for s, t in pts:
        n = pipeline.normal_at(s, t, theta0)
        nn = n[0] ** 2 - n[1] ** 2 + n[2] ** 2
        nn_err = max(nn_err, abs(nn - 1.0))
        d = 1e-4
        fx = (np.asarray(pipeline.l3_at(s + d, t + d, theta0)) - pipeline.l3_at(s - d, t - d, theta0)) / (2 * d)
        fy = (np.asarray(pipeline.l3_at(s + d, t - d, theta0)) - pipeline.l3_at(s - d, t + d, theta0)) / (2 * d)
        for v in (fx, fy):
            orth_err = max(orth_err, abs(n[0] * v[0] - n[1] * v[1] + n[2] * v[2]))
    checks.append(_check("normal_unit_length", nn_err, 1e-8))
    checks.append(_check("normal_tangency", orth_err, 1e-6))

    # structure equations of the generated Heisenberg surface
    mres = minimality_residual(
        lambda a, b: pipeline.nil_at(a, b, theta0), pts_nil, step=1e-3
    )
    checks.append(_check("minimality_residual", mres.residual, 1e-5, floor=mres.noise_floor))

    # quadratic differential: para-holomorphy and oracle value
    ar = abresch_rosenberg(
        lambda a, b: pipeline.spinors_at(a, b, theta0)[:2], pts_nil, step=1e-2
    )
    checks.append(_check("quadratic_differential_dzbar", ar.dzbar_residual, 1e-6))
    if oracle in _ORACLE_B and theta0 == 0.0:
        b_err = max(
            max(abs(b.re - _ORACLE_B[oracle]), abs(b.im)) for b in ar.B
        )
        checks.append(_check(f"quadratic_differential_value[{oracle}]", b_err, 1e-7))

    # flat connection family
    flat = flatness_residual(
        pipeline.h_at,
        pipeline.potential.Q.eval,
        pipeline.potential.R.eval,
        pts_nil,
        _LAMBDA_THETAS,
    )
    checks.append(_check("flat_connection_residual", flat, 1e-8))

    # Sym gauge invariance under a mu-independent diagonal field
    gauge_err = 0.0
    from .pipeline import _sym_point

    for s, t in pts:
        c = 0.3 * math.sin(s + 0.7) * math.cos(t - 0.3)
        loop = pipeline.frame_at(s, t).loop
        base = _sym_point(loop, theta0)
        gauged = _sym_point(loop.scale_columns(math.exp(c)), theta0)
        for u, v in zip(base, gauged):
            gauge_err = max(gauge_err, float(np.abs(u - v).max()))
    checks.append(_check("sym_gauge_invariance", gauge_err, 1e-12))

    # round trip through the normalized potential; with a non-identity
    # initial frame the surface's own normalized data differs from the
    # configured one, so the comparison is only meaningful without it
    if pipeline.initial_frame is None:
        axis = [x for x in np.linspace(-0.4, 0.4, 5)]
        rec = extract_normalized_potential(pipeline, axis_values=axis)
        pot = pipeline.potential
        rt_err = 0.0
        for k, x in enumerate(rec.axis_values):
            rt_err = max(
                rt_err,
                abs(rec.f[k] - pot.f.eval(float(x))),
                abs(rec.g[k] - pot.g.eval(float(x))),
                abs(rec.Q[k] - pot.Q.eval(float(x))) / 4.0,
                abs(rec.R[k] - pot.R.eval(float(x))) / 4.0,
            )
        checks.append(_check("normalized_potential_roundtrip", rt_err, 1e-7))

    # oracle surface relations
    if oracle is not None and oracle in ("cylinder", "hyperbolic-cylinder", "horizontal-plane"):
        rel_err = 0.0
        st_grid = sg
        for k in range(len(st_grid.thetas)):
            for i in range(len(st_grid.s_grid)):
                for j in range(len(st_grid.t_grid)):
                    if st_grid.holes[i, j]:
                        continue
                    s, t = st_grid.s_grid[i], st_grid.t_grid[j]
                    if oracle == "horizontal-plane" and not (-1.0 < s * t < 1.0):
                        continue
                    rel_err = max(rel_err, _surface_relation(oracle, st_grid.nil[k, i, j]))
        tol = 1e-8 if oracle == "horizontal-plane" else 1e-6
        checks.append(_check(f"surface_relation[{oracle}]", rel_err, tol))
        if oracle == "cylinder":
            circ = float(
                np.nanmax(np.abs(sg.l3[..., 0] ** 2 + sg.l3[..., 2] ** 2 - 1.0))
            )
            checks.append(_check("l3_circular_cylinder_relation", circ, 1e-6))

    holes = int(fg.holes.sum())
    report = {
        "name": oracle or "run",
        "passed": all(c["pass"] for c in checks),
        "checks": checks,
        "holes": holes,
        "max_conditioning": float(np.nanmax(fg.conditioning)) if not np.isnan(fg.conditioning).all() else None,
        "tail_relative": pipeline.tail.relative(),
    }
    return report
