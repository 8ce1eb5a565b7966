"""End-to-end computations behind each CLI command.

Every pipeline returns a :class:`PipelineResult`: a JSON-ready payload, a
flat table for CSV output, and the named checks that decide the exit code.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bundles import BundleKind
from .clutching import (GLOBAL_FRAME, UNSMOOTHED_FRAME, equator_jumps, frame_columns,
                        frame_defects, frame_rows, global_frame)
from .errors import DomainError
from .obstructions import (NAIVE_FRAME, commutator_residuals, fit_stabilizing_spin,
                           linear_subbundle_verdict, singularity_scan, sample_points, sample_sections)
from .spacetime import sphere_mesh
from .topology import analytic_berry, berry_data, chern_integral, chern_lattice
from .verification import Check, euclidean_checks, fiber_checks, representation_checks

SCHEMA = "gravtopo/1"


@dataclass
class PipelineResult:
    command: str
    payload: dict
    columns: list[str]
    rows: list[list]
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def document(self, config: dict) -> dict:
        doc = {"schema": SCHEMA, "command": self.command, "config": config,
               "passed": self.passed}
        doc.update(self.payload)
        doc["checks"] = [c.as_dict() for c in self.checks]
        failures = [c.as_dict() for c in self.checks if not c.passed]
        if failures:
            doc["failures"] = failures
        return doc


def _map(fn, items, threads: int):
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _expected_chern(kind: BundleKind) -> int:
    return 0 if kind.helicity is None else -2 * kind.helicity


def run_chern(bundles=None, ntheta: int = 32, nphi: int = 64, fd_step: float = 1e-4,
              tol: float = 1e-3, analytic_tol: float = 1e-6, threads: int = 1) -> PipelineResult:
    """First Chern numbers by closed-form curvature, finite differences and the plaquette lattice."""
    kinds = [BundleKind(b) for b in bundles] if bundles else list(BundleKind)
    gl = sphere_mesh(ntheta, nphi, "gauss-legendre")
    lattice_mesh = sphere_mesh(ntheta, nphi, "uniform-lattice")

    def one(kind):
        return kind, {
            "analytic": chern_integral(analytic_berry(kind, gl), gl),
            "lattice": chern_lattice(kind, lattice_mesh),
            "fd": chern_integral(berry_data(kind, gl, fd_step), gl),
        }

    results = dict(_map(one, kinds, threads))
    checks, rows = [], []
    for kind, r in results.items():
        name = kind.value
        checks += [
            Check(f"{name}:lattice_expected", abs(r["lattice"] - _expected_chern(kind)), 0.0),
            Check(f"{name}:analytic_agrees", abs(r["analytic"] - r["lattice"]), analytic_tol),
            Check(f"{name}:fd_agrees", abs(r["fd"] - r["lattice"]), tol),
        ]
        rows += [[name, method, value] for method, value in r.items()]
    for plus, minus in ((BundleKind.GRAVITON_PLUS, BundleKind.GRAVITON_MINUS),
                        (BundleKind.PHOTON_PLUS, BundleKind.PHOTON_MINUS)):
        if plus in results and minus in results:
            total = results[plus]["lattice"] + results[minus]["lattice"]
            checks.append(Check(f"{plus.value.split('-')[0]}:pair_sum_zero", abs(total), 0.0))
    payload = {"results": {k.value: v for k, v in results.items()}}
    return PipelineResult("chern", payload, ["bundle", "method", "value"], rows, checks)


def run_frame(ntheta: int = 128, nphi: int = 256, tol: float = 1e-10,
              steps=(1e-3, 5e-4), include_samples: bool = True) -> PipelineResult:
    """Globally smooth frame of the graviton bundle sampled on a mesh, with its validity checks."""
    mesh = sphere_mesh(ntheta, nphi, "gauss-legendre")
    theta, phi = mesh.theta, mesh.phi
    values = global_frame(theta, phi)
    ortho, gauge = frame_defects(values, theta, phi)
    checks = [Check("orthonormality", ortho, tol), Check("gauge_validity", gauge, tol)]
    ring = np.arange(nphi) * (2.0 * np.pi / nphi)
    jumps = {}
    for h in steps:
        smooth, _ = equator_jumps(GLOBAL_FRAME, ring, h)
        rough, _ = equator_jumps(UNSMOOTHED_FRAME, ring, h)
        jumps[repr(h)] = {"global": smooth, "unsmoothed": rough}
        checks.append(Check(f"equator_jump_h={h!r}", smooth, 10.0 * h))
        # negative control: the unsmoothed frame must show an O(1) kink
        checks.append(Check(f"unsmoothed_kink_h={h!r}", 0.1 / max(rough, 1e-300), 1.0))
    columns = frame_columns()
    rows = frame_rows(global_frame, theta, phi)
    payload = {"mesh": {"kind": mesh.kind, "n_theta": ntheta, "n_phi": nphi},
               "orthonormality_defect": ortho, "gauge_defect": gauge, "equator_jumps": jumps}
    if include_samples:
        payload["columns"] = columns
        payload["samples"] = rows
    return PipelineResult("frame", payload, columns, rows, checks)


def run_euler(ntheta: int = 64, nphi: int = 128, fd_step: float = 1e-4,
              tol: float = 1e-3) -> PipelineResult:
    """Pfaffian integral of the real graviton bundle and the linear-polarization verdict."""
    verdict = linear_subbundle_verdict(sphere_mesh(ntheta, nphi), fd_step)
    payload = {"pfaffian_integral": verdict.pfaffian_integral,
               "euler_number": round(verdict.euler_number, 6),
               "linear_subbundle": verdict.linear_subbundle}
    checks = [Check("pfaffian_equals_8pi", abs(verdict.pfaffian_integral - 8.0 * np.pi), tol),
              Check("linear_subbundle_obstructed", float(verdict.linear_subbundle != "obstructed"), 0.0)]
    rows = [[verdict.pfaffian_integral, verdict.euler_number, verdict.linear_subbundle]]
    return PipelineResult("euler", payload, ["pfaffian_integral", "euler_number", "linear_subbundle"],
                          rows, checks)


def run_scan(theta_min: float = 0.05, loops: int = 4) -> PipelineResult:
    """Polar singularity scan of the naive plus/cross frame and of the global frame."""
    reports = [singularity_scan(NAIVE_FRAME, theta_min, loops),
               singularity_scan(GLOBAL_FRAME, theta_min, loops)]
    payload, rows = {"frames": {}}, []
    for rep in reports:
        poles = {}
        for p in rep.poles:
            idx = [list(i) if i is not None else None for i in p.indices]
            poles[p.pole] = {"radii": list(p.radii), "indices": idx, "stable": p.stable,
                             "oscillation": list(p.oscillation), "singular": p.singular}
            final = p.indices[-1]
            rows.append([rep.frame, p.pole, p.singular, p.stable,
                         None if final is None else final[0], None if final is None else final[1]])
        payload["frames"][rep.frame] = poles
    naive, smooth = reports
    checks = [
        Check("naive_singular_at_both_poles", float(len(naive.singular_poles) != 2), 0.0),
        Check("naive_indices_stable", float(not all(p.stable for p in naive.poles)), 0.0),
        Check("global_frame_regular", float(len(smooth.singular_poles)), 0.0),
    ]
    return PipelineResult("scan", payload,
                          ["frame", "pole", "singular", "stable", "index_1", "index_2"], rows, checks)


def run_commutators(points: int = 20, fd_step: float = 1e-3, min_order: float = 1.8,
                    spin_tol: float = 1e-8, seed: int = 7, threads: int = 1) -> PipelineResult:
    """Angular-momentum commutators for the candidate spin/orbit split, plus the spin-fit argument."""
    if not 1e-6 <= fd_step <= 1e-3:
        raise DomainError("commutator fd step must lie in [1e-6, 1e-3]")
    pts = sample_points(points, seed)
    sections = sample_sections()
    tables = _map(lambda s: commutator_residuals(s, pts, fd_step, min_order), sections, threads)
    reports = [r for table in tables for r in table]
    spin = fit_stabilizing_spin(pts[0])
    checks = []
    for relation in ("so3", "Lie_1", "Lie_2", "Lie_3"):
        subset = [r for r in reports if r.relation == relation]
        bad = sum(not r.passed for r in subset)
        checks.append(Check(f"{relation}:converged", float(bad), 0.0))
    checks += [Check("stabilizing_spin_norm", spin.fitted_norm, spin_tol),
               Check("helicity_action_nonzero", 1.0 / max(spin.helicity_norm, 1e-300), 1.0)]
    columns = ["section", "point", "pair", "relation", "residual", "fd_step",
               "residual_half", "order", "status"]
    rows = [[r.section, r.point, "".join(r.pair), r.relation, r.residual, r.fd_step,
             r.residual_half, r.order, r.status] for r in reports]
    orders = [r.order for r in reports if r.status == "converged"]
    payload = {
        "sections": [s.name for s in sections],
        "points": len(pts),
        "min_order": min(orders) if orders else None,
        "status_counts": {s: sum(r.status == s for r in reports)
                          for s in ("converged", "roundoff", "nonconvergent")},
        "spin_fit": {"fitted_norm": spin.fitted_norm, "objective": spin.objective,
                     "solutions": spin.solutions, "helicity_generator_norm": spin.helicity_norm,
                     "helicity_so3_residual": spin.helicity_so3_residual},
        "columns": columns,
        "table": rows,
    }
    return PipelineResult("commutators", payload, columns, rows, checks)


def run_verify(samples: int = 1000, tol: float = 1e-10, max_rapidity: float = 3.0) -> PipelineResult:
    """Gauge, unitarity and representation-law property suite."""
    checks = (representation_checks(samples, tol=tol, max_rapidity=max_rapidity)
              + euclidean_checks(tol=tol) + fiber_checks())
    rows = [[c.name, c.value, c.limit, c.passed] for c in checks]
    payload = {"samples": samples, "max_rapidity": max_rapidity}
    return PipelineResult("verify", payload, ["name", "value", "limit", "passed"], rows, checks)
