import numpy as np
import pytest
from hypothesis import given, strategies as st

from gravtopo.clutching import (GLOBAL_FRAME, LOWER_FRAME, UNSMOOTHED_FRAME, UPPER_FRAME,
                                closed_form_transition, equator_jumps, frame_columns, frame_defects,
                                frame_hemisphere, frame_rows, global_frame, gram_matrix, homotopy_T,
                                smooth_step, smoothness_scan, transition)
from gravtopo.errors import DomainError
from gravtopo.spacetime import sphere_mesh, unit_vector
from gravtopo.tensors import standard_bases, validate_fiber
from gravtopo.topology import chern_lattice, winding

B = standard_bases()
PHI = np.linspace(0, 2 * np.pi, 256, endpoint=False)


def test_hemisphere_frame_examples():
    upper = frame_hemisphere("upper", 0.0, 0.8)
    assert np.allclose(upper[0], B.a_plus) and np.allclose(upper[1], B.a_minus)
    lower = frame_hemisphere("lower", np.pi, 0.8)
    south = np.array([0, 0, -1.0])
    assert validate_fiber(south, lower[0]).max_defect <= 1e-12
    assert validate_fiber(south, lower[1]).max_defect <= 1e-12
    assert np.allclose(frame_hemisphere("upper", np.pi / 2, 0.0),
                       frame_hemisphere("lower", np.pi / 2, 0.0), atol=1e-12)


def test_hemisphere_domains():
    with pytest.raises(DomainError):
        frame_hemisphere("upper", 2.0, 0.0)
    with pytest.raises(DomainError):
        frame_hemisphere("lower", 1.0, 0.0)
    with pytest.raises(DomainError):
        frame_hemisphere("middle", 1.0, 0.0)
    with pytest.raises(DomainError):
        UPPER_FRAME(np.array([2.0]), np.array([0.0]))
    assert LOWER_FRAME(np.array([2.0]), np.array([0.0])).shape == (1, 2, 3, 3)


def test_transition_examples_and_windings():
    assert np.allclose(transition(0.0), np.eye(2), atol=1e-12)
    assert np.allclose(transition(np.pi / 4), -np.eye(2), atol=1e-12)
    t = transition(PHI)
    assert np.max(np.abs(t - closed_form_transition(PHI))) <= 1e-10
    assert (winding(t[:, 0, 0]), winding(t[:, 1, 1])) == (4, -4)


@given(st.floats(0.01, np.pi - 0.01), st.floats(0, 2 * np.pi))
def test_overlap_identity_on_open_band(theta, phi):
    upper = frame_hemisphere("upper", theta, phi, extended=True)
    lower = frame_hemisphere("lower", theta, phi, extended=True)
    assert np.allclose(gram_matrix(upper, lower), closed_form_transition(phi), atol=1e-10)


def test_homotopy_examples():
    assert np.allclose(homotopy_T(np.pi, 0.37), np.eye(2), atol=1e-12)
    assert np.allclose(homotopy_T(np.pi / 2, PHI), closed_form_transition(PHI), atol=1e-12)
    with pytest.raises(DomainError):
        homotopy_T(1.0, 0.0)


@given(st.floats(np.pi / 2, np.pi), st.floats(0, 2 * np.pi))
def test_homotopy_stays_in_su2(theta, phi):
    t = homotopy_T(theta, phi)
    x, y, z = t[0, 0].real, t[0, 0].imag, t[0, 1].real
    assert x**2 + y**2 + z**2 == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(t @ t.conj().T, np.eye(2), atol=1e-12)
    assert np.linalg.det(t) == pytest.approx(1.0, abs=1e-12)


def test_smooth_step_examples():
    assert smooth_step(np.pi / 2) == np.pi / 2
    assert smooth_step(0.3) == np.pi / 2
    assert smooth_step(np.pi) == np.pi
    assert smooth_step(3 * np.pi / 4) == pytest.approx(3 * np.pi / 4, abs=1e-15)
    g = smooth_step(np.linspace(np.pi / 2, np.pi, 200))
    assert np.all(np.diff(g) >= 0)


def test_global_frame_examples():
    assert np.allclose(global_frame(0.3, 1.1), frame_hemisphere("upper", 0.3, 1.1))
    t, p = np.full_like(PHI, np.pi / 2), PHI
    upper = frame_hemisphere("upper", t, p)
    assert np.max(np.abs(upper - global_frame(t, p))) <= 1e-10
    near_south = global_frame(np.full(2, np.pi - 1e-3), np.array([0.2, 4.0]))
    ortho, gauge = frame_defects(near_south, np.full(2, np.pi - 1e-3), np.array([0.2, 4.0]))
    assert ortho <= 1e-12 and gauge <= 1e-12


def test_global_frame_valid_on_fine_grid():
    mesh = sphere_mesh(64, 128)
    ortho, gauge = frame_defects(global_frame(mesh.theta, mesh.phi), mesh.theta, mesh.phi)
    assert ortho <= 1e-10 and gauge <= 1e-10


def test_global_frame_is_single_valued_at_poles():
    for pole in (0.0, np.pi):
        values = global_frame(np.full_like(PHI, pole), PHI)
        assert np.max(np.abs(values - values[0])) <= 1e-12


@pytest.mark.parametrize("h", [1e-3, 5e-4])
def test_equator_jump_scales_with_step(h):
    smooth, _ = equator_jumps(GLOBAL_FRAME, PHI, h)
    rough, _ = equator_jumps(UNSMOOTHED_FRAME, PHI, h)
    assert smooth <= 10 * h
    assert rough > 0.5


def test_smoothness_scan_bounds_derivatives():
    mesh = sphere_mesh(16, 32)
    coarse = smoothness_scan(GLOBAL_FRAME, mesh, h=1e-3)
    fine = smoothness_scan(GLOBAL_FRAME, mesh, h=5e-4)
    assert coarse.flagged_nodes == () and fine.flagged_nodes == ()
    assert fine.max_derivative <= 1.05 * coarse.max_derivative
    with pytest.raises(DomainError):
        smoothness_scan(GLOBAL_FRAME, mesh, h=1e-2)


def test_tau_line_bundles_are_trivial():
    mesh = sphere_mesh(32, 64, "uniform-lattice")
    assert chern_lattice(lambda t, p: global_frame(t, p)[..., 0, :, :], mesh) == 0
    assert chern_lattice(lambda t, p: global_frame(t, p)[..., 1, :, :], mesh) == 0


def test_frame_export_layout():
    cols = frame_columns()
    assert cols[:4] == ["theta", "phi", "f1_xx_re", "f1_xx_im"] and len(cols) == 26
    rows = frame_rows(global_frame, np.array([0.0]), np.array([0.0]))
    assert rows[0][2] == pytest.approx(B.a_plus[0, 0].real)
    assert rows[0][5] == pytest.approx(B.a_plus[0, 1].imag)
    assert unit_vector(0.0, 0.0)[2] == 1.0
