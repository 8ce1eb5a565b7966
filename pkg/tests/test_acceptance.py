"""Acceptance criteria, one test per criterion, each recording a PASS/FAIL line."""
import time

import numpy as np

from gravtopo.bundles import BundleKind, helicity_basis, random_fiber_element
from gravtopo.clutching import (GLOBAL_FRAME, UNSMOOTHED_FRAME, closed_form_transition,
                                equator_jumps, frame_defects, global_frame, homotopy_T, transition)
from gravtopo.obstructions import (NAIVE_FRAME, J_total, commutator_residuals, fit_stabilizing_spin,
                                   linear_subbundle_verdict, sample_points, sample_sections,
                                   singularity_scan)
from gravtopo.poincare import act_lorentz
from gravtopo.spacetime import Wavevector, random_lorentz, sphere_mesh
from gravtopo.tensors import hs_inner, validate_fiber
from gravtopo.topology import analytic_berry, berry_data, chern_integral, chern_lattice, winding

PHI_LOOP = np.linspace(0.0, 2.0 * np.pi, 512, endpoint=False)


def test_criterion_1_chern_numbers(acceptance):
    expected = {BundleKind.GRAVITON_PLUS: -4, BundleKind.GRAVITON_MINUS: 4,
                BundleKind.PHOTON_PLUS: -2, BundleKind.PHOTON_MINUS: 2}
    lattice_mesh = sphere_mesh(32, 64, "uniform-lattice")
    gl = sphere_mesh(32, 64)
    ok, details, lattice = True, [], {}
    for kind, target in expected.items():
        start = time.perf_counter()
        lattice[kind] = chern_lattice(kind, lattice_mesh)
        analytic = chern_integral(analytic_berry(kind, gl), gl)
        fd = chern_integral(berry_data(kind, gl), gl)
        elapsed = time.perf_counter() - start
        ok &= (lattice[kind] == target and abs(analytic - target) <= 1e-6
               and abs(fd - target) <= 1e-3 and elapsed <= 10.0)
        details.append(f"{kind.value}: lattice {lattice[kind]}, analytic {analytic:.9f}, "
                       f"fd {fd:.7f}, {elapsed:.2f}s")
    pair_sums = (lattice[BundleKind.GRAVITON_PLUS] + lattice[BundleKind.GRAVITON_MINUS],
                 lattice[BundleKind.PHOTON_PLUS] + lattice[BundleKind.PHOTON_MINUS])
    total = chern_lattice(BundleKind.GRAVITON_TOTAL, lattice_mesh)
    ok &= pair_sums == (0, 0) and total == 0
    details.append(f"pair sums {pair_sums}, rank-2 total {total}")
    assert acceptance("1 Chern numbers", ok, "; ".join(details))


def test_criterion_2_berry_closed_forms(acceptance):
    rng = np.random.default_rng(2)
    n = 1000
    theta = np.arccos(rng.uniform(np.cos(np.pi - 0.05), np.cos(0.05), n))
    phi = rng.uniform(0.0, 2.0 * np.pi, n)
    nodes = np.stack([theta, phi], axis=1)
    steps = (1e-3, 5e-4, 2.5e-4)
    ok, details = True, []
    for kind in (BundleKind.GRAVITON_PLUS, BundleKind.GRAVITON_MINUS):
        h = kind.helicity
        conn_err, curv_err = [], []
        for step in steps:
            field = berry_data(kind, nodes, step)
            conn_err.append(np.max(np.abs(field.connection_phi + 1j * h * np.cos(theta))))
            curv_err.append(np.max(np.abs(field.curvature_density - 1j * h * np.sin(theta))))
        conn_order = np.log2(np.array(conn_err[:-1]) / conn_err[1:])
        curv_order = np.log2(np.array(curv_err[:-1]) / curv_err[1:])
        ok &= bool(np.all(conn_order >= 1.8) and np.all(curv_order >= 1.8))
        details.append(f"{kind.value}: connection orders {np.round(conn_order, 3).tolist()}, "
                       f"curvature orders {np.round(curv_order, 3).tolist()}, "
                       f"errors at h=2.5e-4 {conn_err[-1]:.1e}/{curv_err[-1]:.1e}")
    assert acceptance("2 Berry closed forms", ok, "; ".join(details))


def test_criterion_3_clutching_data(acceptance):
    t = transition(PHI_LOOP)
    off = max(np.max(np.abs(t[:, 0, 1])), np.max(np.abs(t[:, 1, 0])))
    windings = (winding(t[:, 0, 0]), winding(t[:, 1, 1]))
    rng = np.random.default_rng(3)
    th = rng.uniform(np.pi / 2, np.pi, 1000)
    ph = rng.uniform(0.0, 2.0 * np.pi, 1000)
    tb = homotopy_T(th, ph)
    sphere = np.max(np.abs(np.abs(tb[:, 0, 0]) ** 2 + tb[:, 0, 1].real ** 2 - 1.0))
    start_match = np.max(np.abs(homotopy_T(np.pi / 2, PHI_LOOP) - closed_form_transition(PHI_LOOP)))
    end_match = np.max(np.abs(homotopy_T(np.pi, PHI_LOOP) - np.eye(2)))
    ok = off <= 1e-10 and windings == (4, -4) and max(sphere, start_match, end_match) <= 1e-12
    assert acceptance("3 clutching data", ok,
                      f"off-diagonal {off:.1e}, windings {windings}, unit-sphere {sphere:.1e}, "
                      f"T(pi/2)=T {start_match:.1e}, T(pi)=1 {end_match:.1e}")


def test_criterion_4_global_frame(acceptance):
    mesh = sphere_mesh(128, 256)
    ortho, gauge = frame_defects(global_frame(mesh.theta, mesh.phi), mesh.theta, mesh.phi)
    ring = np.linspace(0.0, 2.0 * np.pi, 256, endpoint=False)
    jumps, controls = {}, {}
    for h in (1e-3, 5e-4):
        jumps[h] = equator_jumps(GLOBAL_FRAME, ring, h)[0]
        controls[h] = equator_jumps(UNSMOOTHED_FRAME, ring, h)[0]
    lattice = sphere_mesh(32, 64, "uniform-lattice")
    tau = (chern_lattice(lambda t, p: global_frame(t, p)[..., 0, :, :], lattice),
           chern_lattice(lambda t, p: global_frame(t, p)[..., 1, :, :], lattice))
    ok = (ortho <= 1e-10 and gauge <= 1e-10 and all(jumps[h] <= 10 * h for h in jumps)
          and all(c >= 0.1 for c in controls.values()) and tau == (0, 0))
    assert acceptance("4 global frame", ok,
                      f"orthonormality {ortho:.1e}, gauge {gauge:.1e}, equator jumps "
                      f"{ {h: f'{v:.1e}' for h, v in jumps.items()} }, unsmoothed "
                      f"{ {h: round(v, 3) for h, v in controls.items()} }, tau Chern {tau}")


def test_criterion_5_euler_obstruction(acceptance):
    verdict = linear_subbundle_verdict(sphere_mesh(64, 128))
    naive = singularity_scan(NAIVE_FRAME)
    smooth = singularity_scan(GLOBAL_FRAME)
    naive_ok = (naive.singular_poles == ["north", "south"]
                and all(p.stable and p.indices[0] != (0, 0) for p in naive.poles))
    ok = (abs(verdict.pfaffian_integral - 8 * np.pi) <= 1e-3
          and verdict.linear_subbundle == "obstructed" and naive_ok and smooth.singular_poles == [])
    indices = {p.pole: p.indices[-1] for p in naive.poles}
    assert acceptance("5 Euler obstruction", ok,
                      f"integral {verdict.pfaffian_integral:.7f} (8pi = {8 * np.pi:.7f}), "
                      f"verdict {verdict.linear_subbundle}, naive frame singular at "
                      f"{naive.singular_poles} with indices {indices}, global frame singular at "
                      f"{smooth.singular_poles}")


def test_criterion_6_poincare_representation(acceptance):
    rng = np.random.default_rng(6)
    worst = dict(composition=0.0, unitarity=0.0, gauge=0.0, helicity=0.0)
    for _ in range(1000):
        l1, l2 = random_lorentz(rng, 3.0), random_lorentz(rng, 3.0)
        k = Wavevector(rng.normal(size=3))
        a, b = random_fiber_element(rng, k), random_fiber_element(rng, k)
        a /= np.sqrt(hs_inner(a, a).real)
        b /= np.sqrt(hs_inner(b, b).real)
        k1, a1 = act_lorentz(l1, k, a)
        _, a21 = act_lorentz(l2, k1, a1)
        _, a_direct = act_lorentz(l2 @ l1, k, a)
        _, b1 = act_lorentz(l1, k, b)
        plus, minus = helicity_basis(BundleKind.GRAVITON_TOTAL, k)
        p1, m1 = helicity_basis(BundleKind.GRAVITON_TOTAL, k1)
        _, plus_img = act_lorentz(l1, k, plus)
        _, minus_img = act_lorentz(l1, k, minus)
        worst["composition"] = max(worst["composition"], np.max(np.abs(a21 - a_direct)))
        worst["unitarity"] = max(worst["unitarity"], abs(hs_inner(a1, b1) - hs_inner(a, b)))
        worst["gauge"] = max(worst["gauge"], validate_fiber(k1, a1).max_defect)
        worst["helicity"] = max(worst["helicity"], abs(hs_inner(m1, plus_img)),
                                abs(hs_inner(p1, minus_img)))
    ok = all(v <= 1e-10 for v in worst.values())
    assert acceptance("6 Poincare representation", ok,
                      ", ".join(f"{k} {v:.1e}" for k, v in worst.items()))


def test_criterion_7_angular_momentum_algebra(acceptance):
    start = time.perf_counter()
    points = sample_points(20)
    sections = sample_sections()
    reports = [r for s in sections for r in commutator_residuals(s, points, eps=1e-3)]
    by_relation = {}
    for r in reports:
        by_relation.setdefault(r.relation, []).append(r)
    all_passed = all(r.passed for r in reports)
    orders = [r.order for r in reports if r.status == "converged"]
    # the helicity eigenvalue of khat.J is +/-2 at every test point
    helicity_err = 0.0
    for kind, sign in ((BundleKind.GRAVITON_PLUS, 0), (BundleKind.GRAVITON_MINUS, 1)):
        section = sections[sign]
        for k in points:
            kj = sum(k[b] * J_total(section, k, b, eps=1e-4) for b in range(3))
            helicity_err = max(helicity_err, abs(hs_inner(section(k), kj) - kind.helicity))
    spin = fit_stabilizing_spin(points[0])
    elapsed = time.perf_counter() - start
    ok = (len(sections) >= 5 and len(points) >= 20 and all_passed and min(orders) >= 1.8
          and helicity_err <= 1e-6 and spin.fitted_norm <= 1e-8 and spin.helicity_norm > 1.0)
    counts = {rel: f"{sum(r.passed for r in rs)}/{len(rs)}" for rel, rs in by_relation.items()}
    assert acceptance("7 angular-momentum algebra", ok,
                      f"{len(sections)} sections x {len(points)} points, passing {counts}, "
                      f"min order {min(orders):.3f}, roundoff-floor rows "
                      f"{sum(r.status == 'roundoff' for r in reports)}, helicity error "
                      f"{helicity_err:.1e}, spin-fit norm {spin.fitted_norm:.1e} "
                      f"(helicity generator norm {spin.helicity_norm:.3f}), {elapsed:.1f}s")
