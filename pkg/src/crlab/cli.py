"""Command-line entry point: every verification and audit as one command.

    crlab <command> [--config FILE] [--lambda X] [--s-grid a,b,c]
                    [--grid NxM] [--out DIR] [--json] [--csv] ...

Commands: verify-frame, verify-structure-eq, lift, flow, beltrami,
variation, breaking-audit, search.  Each writes report-<command>.json into
the output directory (plus CSV data with --csv) and prints a console
summary.  Exit status is 0 on completion, including failed or
reported-only checks; only configuration and numerical-failure errors exit
nonzero.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import polyfields as pf
from .config import RunConfig, load_config
from .errors import CrlabError
from .fields import (ConstantField, PolynomialField, ProductField,
                     RadialProfileField, frame_derivative, re_w1)
from .flows import (FlowMap, beltrami, contact_defect, equivariance_defect,
                    hamiltonian_field, max_dilatation)
from .hopf import (BaseCurve, IdentityMap, RiemannSpherePoint, RoundMetric,
                   StretchedMetric, ZAxisRotation, cap_area, horizontal_lift,
                   lift_base_map, project, quotient_dilatation, section_point,
                   structure_equation_residual, whole_sphere_area)
from .report import Report, write_csv
from .sampling import sphere_grid, torus_band_grid, torus_grid
from .sphere import (SpherePoint, clifford_point, frame_at, orientation_check,
                     random_points)
from .structures import invariant_family, pushforward_consistency
from .variation import (HamiltonianFamily, breaking_audit,
                        breaking_hamiltonian, coeff_a, coeff_b,
                        first_variation, fit_even_response, measured_abs_slope,
                        measured_slope, second_variation,
                        torus_mean_first_variation)

_KRONECKER = np.eye(3)


def _generic_field():
    """Re(w1^2 w2b): a field whose second frame derivatives do not vanish."""
    return PolynomialField({(2, 0, 0, 1): 0.5, (0, 1, 2, 0): 0.5})


def _family(cfg: RunConfig):
    return invariant_family(cfg.lambda_max, cfg.bump_width)


def _audit_hamiltonian(cfg: RunConfig):
    return breaking_hamiltonian(cfg.lambda_max,
                                cutoff=(cfg.cutoff_lo, cfg.cutoff_hi),
                                margin=cfg.cutoff_margin)


# ----------------------------------------------------------------------
# Commands
# ----------------------------------------------------------------------

def cmd_verify_frame(cfg: RunConfig, out: str, csv: bool) -> Report:
    rep = Report("verify-frame", cfg.echo())
    rng = np.random.default_rng(cfg.seed)
    pts = random_points(cfg.random_points, rng)

    worst = 0.0
    tang = 0.0
    antisym = 0.0
    realpart = 0.0
    for q in pts:
        fp = frame_at(q)
        vecs = (fp.holo, fp.anti, fp.reeb)
        pair = np.array([[fp.psi(v) for v in vecs],
                         [fp.psib(v) for v in vecs],
                         [fp.eta(v) for v in vecs]])
        worst = max(worst, float(np.max(np.abs(pair - _KRONECKER))))
        x, y = fp.contact_basis()
        for v in (x, y, fp.reeb):
            tang = max(tang, v.tangency_residual(q))
        antisym = max(antisym, abs(fp.deta(x, y) + fp.deta(y, x)))
        realpart = max(realpart, abs(np.real(fp.deta(fp.holo, fp.anti))))
    rep.add_upper("duality_kronecker", worst, cfg.tol("duality"),
                  points=len(pts))
    rep.add_upper("tangency", tang, cfg.tol("tangency"))
    rep.add_upper("deta_antisymmetry", antisym, cfg.tol("duality"))
    rep.add_upper("deta_frame_pair_imaginary", realpart, cfg.tol("duality"))

    comms = {
        "bracket_Z_Zb": (pf.lie_bracket(pf.Z_FIELD, pf.ZB_FIELD)
                         + pf.R_FIELD * pf.sp.I),
        "bracket_R_Z": (pf.lie_bracket(pf.R_FIELD, pf.Z_FIELD)
                        + 2 * pf.sp.I * pf.Z_FIELD),
        "bracket_R_Zb": (pf.lie_bracket(pf.R_FIELD, pf.ZB_FIELD)
                         - 2 * pf.sp.I * pf.ZB_FIELD),
        "bracket_X_Y": (pf.lie_bracket(pf.X_FIELD, pf.Y_FIELD)
                        + 2 * pf.R_FIELD),
        "bracket_X_R": (pf.lie_bracket(pf.X_FIELD, pf.R_FIELD)
                        - 2 * pf.Y_FIELD),
        "bracket_Y_R": (pf.lie_bracket(pf.Y_FIELD, pf.R_FIELD)
                        + 2 * pf.X_FIELD),
    }
    for name, resid in comms.items():
        rep.add(name + "_exact", 0.0 if resid.is_zero() else 1.0, 0.0,
                resid.is_zero(), arithmetic="exact-polynomial")

    vals = [orientation_check(q) for q in pts[:100]]
    rep.add_lower("orientation_positive", min(vals), 0.0,
                  value_at_base=orientation_check(SpherePoint(1.0, 0.0)))
    return rep


def cmd_verify_structure_eq(cfg: RunConfig, out: str, csv: bool) -> Report:
    rep = Report("verify-structure-eq", cfg.echo())
    rng = np.random.default_rng(cfg.seed)
    pts = random_points(cfg.random_points, rng)
    worst = max(structure_equation_residual(q) for q in pts)
    rep.add_upper("structure_equation_residual", worst,
                  cfg.tol("structure_eq"), points=len(pts))
    fiber = 0.0
    for q in pts[:100]:
        fp = frame_at(q)
        x, _ = fp.contact_basis()
        fiber = max(fiber, abs(fp.deta(fp.reeb, x)))
    rep.add_upper("reeb_contraction", fiber, cfg.tol("duality"))

    prof, nu = _family(cfg)
    push = max(pushforward_consistency(nu, q) for q in pts[:200]
               if abs(q.w1) > 0.1)
    rep.add_upper("pushforward_consistency", push, cfg.tol("pushforward"))
    return rep


def cmd_lift(cfg: RunConfig, out: str, csv: bool) -> Report:
    rep = Report("lift", cfg.echo())
    rng = np.random.default_rng(cfg.seed)

    loop = BaseCurve.circle(0j, 1.0)
    lr = horizontal_lift(loop, section_point(loop.start()),
                         steps=cfg.lift_steps)
    gap = abs(lr.phase_mod_2pi - np.pi)
    rep.add_upper("equator_loop_phase", gap, cfg.tol("phase_loop"),
                  phase=lr.phase, phase_mod_2pi=lr.phase_mod_2pi)
    rep.add_upper("equator_loop_legendrian", lr.legendrian_defect,
                  cfg.tol("legendrian"))
    rep.add_upper("equator_loop_projection", lr.projection_defect, 1e-9)

    worst_cap = 0.0
    worst_leg = lr.legendrian_defect
    for _ in range(cfg.n_caps):
        c = complex(rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6))
        radius = rng.uniform(0.15, 0.7)
        area = cap_area(c, radius, "south", "half_omega0")
        cap = BaseCurve.circle(c, radius)
        res = horizontal_lift(cap, section_point(cap.start()),
                              steps=max(2000, cfg.lift_steps // 4))
        d = (res.phase + area) % (2.0 * np.pi)
        d = min(d, 2.0 * np.pi - d)
        worst_cap = max(worst_cap, d)
        worst_leg = max(worst_leg, res.legendrian_defect)
    rep.add_upper("cap_phase_area", worst_cap, cfg.tol("phase_cap"),
                  caps=cfg.n_caps)
    rep.add_upper("lift_legendrian_defect", worst_leg, cfg.tol("legendrian"))

    rep.add_upper("sphere_area_total",
                  abs(whole_sphere_area("omega0") - 4 * np.pi), 1e-8)

    if csv:
        rows = [(t, p.w1.real, p.w1.imag, p.w2.real, p.w2.imag, ph)
                for t, p, ph in zip(lr.times, lr.points, lr.phases)]
        write_csv(os.path.join(out, "lift-equator.csv"),
                  ["t", "re_w1", "im_w1", "re_w2", "im_w2", "phi"], rows)
    return rep


def cmd_flow(cfg: RunConfig, out: str, csv: bool) -> Report:
    rep = Report("flow", cfg.echo())
    rng = np.random.default_rng(cfg.seed)
    pts = random_points(8, rng)

    rot = FlowMap(hamiltonian_field(ConstantField(1.0)),
                  steps_per_unit=cfg.rk4_steps_per_unit, s_max=cfg.s_max)
    worst = 0.0
    for s in cfg.rotation_s:
        for q in pts[:4]:
            worst = max(worst, rot.point(q, s).distance(q.rotate(s)))
    rep.add_upper("rotation_flow_exactness", worst, cfg.tol("rotation"),
                  s_values=list(cfg.rotation_s))

    fl = FlowMap(hamiltonian_field(re_w1()),
                 steps_per_unit=cfg.rk4_steps_per_unit, s_max=cfg.s_max)
    q = pts[0]
    ab = fl.point(fl.point(q, 0.2), 0.1)
    c = fl.point(q, 0.3)
    rep.add_upper("group_law", ab.distance(c), cfg.tol("group_law"))

    gen = FlowMap(hamiltonian_field(_generic_field()),
                  steps_per_unit=cfg.rk4_steps_per_unit, s_max=cfg.s_max,
                  min_steps=1)
    defects = [contact_defect(gen, pts[1], 0.5, n) for n in (8, 16, 32)]
    orders = [float(np.log2(defects[i] / defects[i + 1])) for i in range(2)]
    rep.add_lower("contact_defect_order", min(orders),
                  cfg.tol("contact_order"), defects=defects, orders=orders)

    drifts = [gen.raw_step_drift(pts[2], h) for h in (0.2, 0.1, 0.05)]
    dorders = [float(np.log2(drifts[i] / drifts[i + 1])) for i in range(2)]
    rep.add_lower("sphere_drift_order", min(dorders), 4.5,
                  drifts=drifts, orders=dorders)

    field = hamiltonian_field(_generic_field())
    worst_h = 0.0
    for q in random_points(min(cfg.random_points, 1000), rng):
        fp = frame_at(q)
        worst_h = max(worst_h, abs(fp.eta(field.at(q))
                                   - _generic_field().value(q)))
    rep.add_upper("hamiltonian_identity", worst_h, cfg.tol("duality"))

    u68 = _audit_hamiltonian(cfg)
    eq_flow = FlowMap(hamiltonian_field(u68),
                      steps_per_unit=cfg.rk4_steps_per_unit, s_max=cfg.s_max)
    eq = max(equivariance_defect(eq_flow, clifford_point(0.4, 1.1), phi, 0.05)
             for phi in (0.7, 2.9))
    rep.add_upper("radial_flow_equivariance", eq, cfg.tol("equivariance"))

    if csv:
        write_csv(os.path.join(out, "flow-contact-defect.csv"),
                  ["n_steps", "defect"],
                  list(zip((8, 16, 32), defects)))
    return rep


def cmd_beltrami(cfg: RunConfig, out: str, csv: bool) -> Report:
    rep = Report("beltrami", cfg.echo())
    rng = np.random.default_rng(cfg.seed)
    prof, nu = _family(cfg)
    pts = random_points(6, rng)

    rot = FlowMap(hamiltonian_field(ConstantField(1.0)),
                  steps_per_unit=cfg.rk4_steps_per_unit, s_max=cfg.s_max)
    worst0 = max(abs(abs(beltrami(rot, nu, q, 0.0)) - nu.abs_value(q))
                 for q in pts)
    rep.add_upper("beltrami_at_zero", worst0, 1e-14)

    worstr = 0.0
    for s in cfg.rotation_s:
        for q in pts[:3]:
            worstr = max(worstr, abs(abs(beltrami(rot, nu, q, s))
                                     - nu.abs_value(q)))
    rep.add_upper("rotation_flow_mu", worstr, cfg.tol("rotation_mu"))

    grid = sphere_grid(min(cfg.sphere_grid, 32)) + torus_grid(cfg.torus_grid)
    res = max_dilatation(rot, nu, grid, 0.0)
    target = cfg.lambda_max ** 2
    rep.add_upper("identity_dilatation", abs(res.dilatation - target),
                  cfg.tol("dilatation"), dilatation=res.dilatation,
                  sup_mu=res.sup_mu)
    on_torus = abs(abs(res.argmax.w1) ** 2 - 0.5) < 1e-9
    rep.add("sup_attained_on_torus", float(abs(abs(res.argmax.w1) ** 2 - 0.5)),
            1e-9, on_torus)

    k32 = max_dilatation(rot, nu, torus_band_grid(32, 8), 0.0).dilatation
    k64 = max_dilatation(rot, nu, torus_band_grid(64, 8), 0.0).dilatation
    rep.add_upper("refinement_stability", abs(k32 - k64), 1e-4,
                  k32=k32, k64=k64)

    kq = quotient_dilatation(IdentityMap(), StretchedMetric(prof),
                             RoundMetric(), RiemannSpherePoint("south", 1.0))
    rep.add_upper("quotient_dilatation_equator", abs(kq - target),
                  cfg.tol("quotient"), value=kq)

    sup_inv = max(nu.abs_value(q) for q in grid)
    want = nu.params.torus_nu_abs
    rep.add_upper("sup_nu", abs(sup_inv - want), cfg.tol("sup_nu"))
    inv = max(nu.invariance_residual(q) for q in sphere_grid(cfg.sphere_grid))
    rep.add_upper("invariance", inv, cfg.tol("invariance"))
    tor = max(abs(frame_derivative(nu.coeff, ("Z",), q))
              + abs(frame_derivative(nu.coeff, ("Zb",), q))
              for q in torus_grid(cfg.torus_grid))
    rep.add_upper("torus_frame_derivatives", tor, cfg.tol("torus_frame"))
    return rep


def cmd_variation(cfg: RunConfig, out: str, csv: bool) -> Report:
    rep = Report("variation", cfg.echo())
    rng = np.random.default_rng(cfg.seed)
    prof, nu = _family(cfg)
    ugen = _generic_field()
    flow_gen = FlowMap(hamiltonian_field(ugen),
                       steps_per_unit=cfg.rk4_steps_per_unit, s_max=cfg.s_max)

    inside = [q for q in random_points(400, rng)
              if nu.abs_value(q) > 0.05][:20]
    worst_rel = 0.0
    for q in inside:
        pred = first_variation(nu, ugen, q).value
        got = measured_slope(flow_gen, nu, q)
        worst_rel = max(worst_rel, abs(got - pred) / max(abs(pred), 1e-6))
    rep.add_upper("first_variation_slope", worst_rel,
                  cfg.tol("first_variation"), points=len(inside))

    zero_pts = []
    for th in np.linspace(0, 2 * np.pi, 7)[:-1]:
        r = 0.98
        zero_pts.append(SpherePoint(r * np.exp(1j * th),
                                    np.sqrt(1 - r * r) * np.exp(0.3j)))
    worst_abs = 0.0
    for q in zero_pts:
        pred = first_variation(nu, ugen, q)
        assert pred.absolute_law
        got = measured_abs_slope(flow_gen, nu, q)
        worst_abs = max(worst_abs, abs(got - pred.value)
                        / max(abs(pred.value), 1e-6))
    rep.add_upper("abs_law_slope", worst_abs, cfg.tol("first_variation"),
                  points=len(zero_pts))

    flow_lin = FlowMap(hamiltonian_field(re_w1()),
                       steps_per_unit=cfg.rk4_steps_per_unit, s_max=cfg.s_max)
    degen = 0.0
    for q in inside[:5]:
        pred = first_variation(nu, re_w1(), q).value
        got = measured_slope(flow_lin, nu, q, s0=4e-3)
        degen = max(degen, abs(got - pred))
    rep.add_upper("degenerate_hamiltonian_slope", degen, 1e-8,
                  note="second frame derivative of Re(w1) vanishes; both "
                       "routes must give zero")

    u68 = _audit_hamiltonian(cfg)
    st = u68._stack(np.sqrt(0.5))
    rep.add_upper("torus_slope_exact", abs(st[1] - u68.slope),
                  cfg.tol("radial_derivs"), expected=u68.slope)
    rep.add_upper("torus_curvature_exact", abs(st[2] - u68.curvature),
                  cfg.tol("radial_derivs"), expected=u68.curvature)

    rep.add_upper("torus_mean_audit_hamiltonian",
                  abs(torus_mean_first_variation(u68, nu, n=32)), 1e-10)
    sin_theta = ProductField(
        RadialProfileField(lambda r: (1 / r, -1 / r ** 2, 2 / r ** 3,
                                      -6 / r ** 4)),
        PolynomialField({(1, 0, 0, 0): -0.5j, (0, 0, 1, 0): 0.5j}))
    rep.add_upper("torus_mean_angular_hamiltonian",
                  abs(torus_mean_first_variation(sin_theta, nu, n=64)),
                  cfg.tol("torus_mean"))
    rep.add_upper("torus_mean_generic",
                  abs(torus_mean_first_variation(ugen, nu, n=64)),
                  cfg.tol("torus_mean"))

    tor = clifford_point(0.7, 1.3)
    flow68 = FlowMap(hamiltonian_field(u68),
                     steps_per_unit=cfg.rk4_steps_per_unit, s_max=cfg.s_max)
    from .flows import pullback_quotient
    ss = np.concatenate([-np.asarray(cfg.s_grid)[::-1],
                         np.asarray(cfg.s_grid)])
    nus = np.array([pullback_quotient(flow68.evaluate(tor, float(s)), tor)
                    for s in ss])
    coefs, *_ = np.linalg.lstsq(np.vander(ss, 4, increasing=True), nus,
                                rcond=None)
    b_an = coeff_b(u68, tor)
    rep.add_upper("quadratic_coefficient_two_routes",
                  abs(coefs[2] - b_an) / abs(b_an), cfg.tol("two_route"),
                  analytic={"re": b_an.real, "im": b_an.imag},
                  fitted={"re": coefs[2].real, "im": coefs[2].imag})
    a_an = coeff_a(u68, tor)
    rep.add_upper("linear_coefficient_two_routes",
                  abs(coefs[1] - a_an) / abs(a_an), cfg.tol("two_route"))
    return rep


def cmd_breaking_audit(cfg: RunConfig, out: str, csv: bool) -> Report:
    rep = Report("breaking-audit", cfg.echo())
    prof, nu = _family(cfg)
    u = _audit_hamiltonian(cfg)
    audit = breaking_audit(nu, u, s_grid=cfg.s_grid,
                           torus_points=cfg.torus_grid,
                           sphere_n=cfg.sphere_grid,
                           steps_per_unit=cfg.rk4_steps_per_unit,
                           band_n=cfg.band_grid)
    rep.add_upper("first_variation_condition", audit.condition_residual,
                  cfg.tol("condition"), grid=f"{cfg.sphere_grid}^2")
    rep.add_upper("torus_slope_exact", audit.derivative_gaps[0],
                  cfg.tol("radial_derivs"))
    rep.add_upper("torus_curvature_exact", audit.derivative_gaps[1],
                  cfg.tol("radial_derivs"))
    rep.add_upper("second_variation_two_routes", audit.max_consistency_gap,
                  cfg.tol("two_route"), points=len(audit.reports))
    rep.add("measured_sign", audit.measured_sign,
            audit.expected_sign_reference, None,
            agrees=audit.measured_sign == audit.expected_sign_reference)
    rep.add("equivariance_defect", audit.equivariance_defect,
            cfg.tol("equivariance"), None)
    rep.add("sup_mu_vs_sup_nu",
            {repr(s): v - audit.sup_nu for s, v in audit.sup_mu_by_s.items()},
            None, None, sup_nu=audit.sup_nu)
    rep.extras["audit"] = audit.summary()
    rep.extras["points"] = [r.to_dict() for r in audit.reports]

    if csv:
        write_csv(os.path.join(out, "audit-sup-mu.csv"), ["s", "sup_mu"],
                  sorted(audit.sup_mu_by_s.items()))
        rows = []
        for i, r in enumerate(audit.reports):
            c_fd = r.fd_fit["coefficients"][2]
            rows.append((i, r.nu_abs, r.first_coeff, r.second_coeff, c_fd,
                         r.consistency, r.equivariance_defect))
        write_csv(os.path.join(out, "audit-points.csv"),
                  ["index", "nu_abs", "first_coeff", "second_analytic",
                   "second_fitted", "consistency", "equivariance"], rows)
    return rep


def cmd_search(cfg: RunConfig, out: str, csv: bool) -> Report:
    from .variation import hamiltonian_search
    rep = Report("search", cfg.echo())
    prof, nu = _family(cfg)
    u = _audit_hamiltonian(cfg)
    grid = torus_grid(max(2, min(cfg.torus_grid, 4)))
    s = float(max(cfg.s_grid))

    res = hamiltonian_search(HamiltonianFamily.scaled(u), nu, s, grid,
                             steps_per_unit=max(64, cfg.rk4_steps_per_unit // 8))
    base = max(nu.abs_value(q) for q in grid)
    rep.add_upper("scaled_family_no_worse", res.objective - base, 1e-12,
                  best=res.params.tolist(), steps=len(res.trace))
    objs = [v for _, v in res.trace]
    rep.add("descent_monotone", float(max(
        (y - x for x, y in zip(objs, objs[1:])), default=0.0)), 0.0,
        all(y <= x + 1e-15 for x, y in zip(objs, objs[1:])))

    res_c = hamiltonian_search(HamiltonianFamily.constants(), nu, s, grid,
                               steps_per_unit=max(64, cfg.rk4_steps_per_unit // 8))
    rep.add_upper("constants_family_rotation_invariant",
                  abs(res_c.objective - base), 1e-9)
    rep.extras["scaled_trace"] = res.trace
    rep.extras["constants_trace"] = res_c.trace

    if csv:
        write_csv(os.path.join(out, "search-trace.csv"),
                  ["step", "objective"],
                  [(i, v) for i, (_, v) in enumerate(res.trace)])
    return rep


COMMANDS = {
    "verify-frame": cmd_verify_frame,
    "verify-structure-eq": cmd_verify_structure_eq,
    "lift": cmd_lift,
    "flow": cmd_flow,
    "beltrami": cmd_beltrami,
    "variation": cmd_variation,
    "breaking-audit": cmd_breaking_audit,
    "search": cmd_search,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="crlab",
        description="numerical laboratory for contact flows and "
                    "quasiconformal distortion on the 3-sphere")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", default=None, help="key = value file")
        sp.add_argument("--lambda", dest="lambda_", default=None,
                        help="maximal stretch of the invariant family")
        sp.add_argument("--bump-width", default=None)
        sp.add_argument("--s-grid", default=None,
                        help="comma-separated flow times")
        sp.add_argument("--grid", default=None,
                        help="NxM: sphere and torus grid sizes")
        sp.add_argument("--steps", default=None,
                        help="RK4 steps per unit time")
        sp.add_argument("--seed", default=None)
        sp.add_argument("--out", default=None, help="output directory")
        sp.add_argument("--json", action="store_true",
                        help="print the report JSON to stdout")
        sp.add_argument("--csv", action="store_true",
                        help="write CSV data files")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {}
    if args.lambda_ is not None:
        overrides["lambda"] = args.lambda_
    if args.bump_width is not None:
        overrides["bump_width"] = args.bump_width
    if args.s_grid is not None:
        overrides["s_grid"] = args.s_grid
    if args.steps is not None:
        overrides["rk4_steps_per_unit"] = args.steps
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out is not None:
        overrides["out_dir"] = args.out
    if args.grid is not None:
        try:
            n, m = args.grid.lower().split("x")
            overrides["sphere_grid"] = int(n)
            overrides["torus_grid"] = int(m)
        except ValueError:
            print(f"error: bad --grid {args.grid!r}, expected NxM",
                  file=sys.stderr)
            return 2
    try:
        cfg = load_config(args.config, overrides)
        out = cfg.out_dir
        rep = COMMANDS[args.command](cfg, out, args.csv)
        path = rep.write(out)
    except CrlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(rep.console())
    print(f"report written to {path}")
    if args.json:
        print(rep.to_json(), end="")
    return 0


if __name__ == "__main__":
    sys.exit(main())
