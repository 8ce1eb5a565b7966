"""Berry connection and curvature, Chern numbers, Euler class, windings.

Orientation of S^2 is ``dtheta ^ dphi`` (outward normal).  With the Berry
connection ``sigma = <A, dA>`` the first Chern number is
``C_1 = (i / 2 pi) * integral(Omega)``, so a helicity-h line bundle has
``sigma_phi = -i h cos(theta)``, ``Omega = i h sin(theta) dtheta ^ dphi``
and ``C_1 = -2 h``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .bundles import BundleKind, bundle_kind, fiber_inner, transported, transport_rotation
from .errors import DomainError, NonGaugeConsistentError, RefinementError
from .spacetime import SphereMesh
from .tensors import hs_inner, standard_bases

DEFAULT_FD_STEP = 1e-4
MAX_FD_STEP = 1e-2


@dataclass(frozen=True)
class BerrySample:
    node: tuple[float, float]
    connection_phi: complex
    connection_theta: complex
    curvature_density: complex


@dataclass(frozen=True)
class BerryField:
    """Per-node Berry data on a mesh (or on an explicit list of nodes).

    ``curvature_density`` is the coefficient of ``dtheta ^ dphi``; nodes
    whose stencil would cross a pole are listed in ``skipped`` and hold NaN.
    """

    kind: BundleKind
    method: str
    fd_step: float | None
    theta: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)
    connection_theta: np.ndarray = field(repr=False)
    connection_phi: np.ndarray = field(repr=False)
    curvature_density: np.ndarray = field(repr=False)
    skipped: tuple[int, ...] = ()

    def samples(self) -> list[BerrySample]:
        return [BerrySample((float(t), float(p)), complex(cp), complex(ct), complex(c))
                for t, p, cp, ct, c in zip(self.theta, self.phi, self.connection_phi,
                                           self.connection_theta, self.curvature_density)]

    def rows(self) -> list[dict]:
        return [{"theta": float(t), "phi": float(p),
                 "connection_theta_im": float(np.imag(ct)), "connection_phi_im": float(np.imag(cp)),
                 "curvature_re": float(np.real(c)), "curvature_im": float(np.imag(c))}
                for t, p, ct, cp, c in zip(self.theta, self.phi, self.connection_theta,
                                           self.connection_phi, self.curvature_density)]


def _nodes(mesh) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(mesh, SphereMesh):
        return mesh.theta, mesh.phi
    nodes = np.asarray(mesh, dtype=float).reshape(-1, 2)
    return nodes[:, 0], nodes[:, 1]


def _frame(kind: BundleKind, theta, phi) -> np.ndarray:
    """Section values with an explicit member axis: ``(..., rank, *fiber_shape)``."""
    values = transported(kind, theta, phi)
    if kind.rank == 1:
        values = values[..., None, :] if kind.is_photon else values[..., None, :, :]
    return values


def _trace_connection(kind, s0, s_plus, s_minus, h):
    """``sum_a <s_a, (s_a(+h) - s_a(-h)) / 2h>`` over frame members."""
    return np.sum(fiber_inner(s0, (s_plus - s_minus) / (2.0 * h)), axis=-1)


def connection_fd(kind, theta, phi, h: float) -> tuple[np.ndarray, np.ndarray]:
    """Central-difference Berry connection ``(sigma_theta, sigma_phi)``; traced for rank 2."""
    kind = bundle_kind(kind)
    s0 = _frame(kind, theta, phi)
    sig_t = _trace_connection(kind, s0, _frame(kind, theta + h, phi), _frame(kind, theta - h, phi), h)
    sig_p = _trace_connection(kind, s0, _frame(kind, theta, phi + h), _frame(kind, theta, phi - h), h)
    return sig_t, sig_p


def berry_data(kind, mesh, fd_step: float = DEFAULT_FD_STEP) -> BerryField:
    """Finite-difference Berry connection and curvature of a helicity section.

    The curvature is the central difference of the connection,
    ``Omega = d_theta sigma_phi - d_phi sigma_theta``; the ``sigma ^ sigma``
    term vanishes identically (rank 1, and in trace for rank 2).
    """
    kind = bundle_kind(kind)
    if not 0.0 < fd_step <= MAX_FD_STEP:
        raise DomainError(f"fd_step must lie in (0, {MAX_FD_STEP}]")
    theta, phi = _nodes(mesh)
    h = fd_step
    bad = (theta - h <= 0.0) | (theta + h >= np.pi)
    t = np.where(bad, np.pi / 2, theta)

    sig_t, sig_p = connection_fd(kind, t, phi, h)
    _, sig_p_up = connection_fd(kind, t + h, phi, h)
    _, sig_p_dn = connection_fd(kind, t - h, phi, h)
    sig_t_fw, _ = connection_fd(kind, t, phi + h, h)
    sig_t_bw, _ = connection_fd(kind, t, phi - h, h)
    curv = (sig_p_up - sig_p_dn) / (2.0 * h) - (sig_t_fw - sig_t_bw) / (2.0 * h)

    nan = np.nan + 0j
    return BerryField(
        kind, "fd", fd_step, theta, phi,
        np.where(bad, nan, sig_t), np.where(bad, nan, sig_p), np.where(bad, nan, curv),
        tuple(int(i) for i in np.flatnonzero(bad)),
    )


def analytic_berry(kind, mesh) -> BerryField:
    """Closed-form connection ``-i h cos(theta) dphi`` and curvature ``i h sin(theta)``."""
    kind = bundle_kind(kind)
    theta, phi = _nodes(mesh)
    h = 0 if kind is BundleKind.GRAVITON_TOTAL else kind.helicity
    zero = np.zeros_like(theta, dtype=complex)
    return BerryField(kind, "analytic", None, theta, phi, zero,
                      -1j * h * np.cos(theta) + zero, 1j * h * np.sin(theta) + zero)


def chern_integral(field_: BerryField, mesh: SphereMesh, residue_tol: float = 1e-8) -> float:
    """``(i / 2 pi) * sum(w * Omega / sin(theta))`` over the mesh quadrature."""
    if field_.skipped:
        raise DomainError(f"{len(field_.skipped)} nodes were skipped; refine fd_step before integrating")
    if len(field_.theta) != len(mesh.weights) or not np.allclose(field_.theta, mesh.theta):
        raise DomainError("Berry samples are not aligned with the mesh nodes")
    density = field_.curvature_density / np.sin(field_.theta)
    value = 1j / (2.0 * np.pi) * mesh.integrate(density)
    if abs(value.imag) > residue_tol:
        raise NonGaugeConsistentError(f"Chern integral has imaginary residue {value.imag:.3g}")
    return float(value.real)


# -- lattice (plaquette field strength) method --------------------------------

SectionSource = BundleKind | str | Callable


def _vertex_samples(source, theta, phi) -> np.ndarray:
    """Flattened fiber samples ``(n_vertices, rank, dim)``."""
    if callable(source) and not isinstance(source, (BundleKind, str)):
        values = np.asarray(source(theta, phi), dtype=complex)
        extra = values.ndim - theta.ndim
        # (3,3) tensor or (3,) vector -> rank 1; (r,3,3) frame -> rank r
        rank = values.shape[-3] if extra == 3 else 1
    else:
        kind = bundle_kind(source)
        values = transported(kind, theta, phi)
        rank = kind.rank
    n = theta.shape[0]
    return values.reshape(n, rank, -1)


def chern_lattice(source, mesh: SphereMesh, gauge: Callable | None = None,
                  residue_tol: float = 1e-6, min_overlap: float = 1e-3) -> int:
    """Gauge-invariant plaquette Chern number.

    ``source`` is a bundle kind or a callable ``(theta, phi) -> sections``
    returning line-bundle samples ``(..., 3, 3)`` / ``(..., 3)`` or a frame
    ``(..., r, 3, 3)``.  Links are ``U = det<u(n), u(n')> / |det|``, the
    plaquette field strength is the principal argument of the loop product,
    and the positively oriented sum obeys ``C_1 = -sum(F) / 2 pi``.
    ``gauge`` multiplies every sample by ``exp(i chi(theta, phi))``.
    """
    if mesh.kind != "uniform-lattice" or mesh.vertices is None:
        raise DomainError("chern_lattice needs a uniform-lattice mesh")
    if mesh.n_theta < 16 or mesh.n_phi < 32:
        raise RefinementError("lattice Chern numbers need at least 16x32 cells")
    theta, phi = mesh.vertices[:, 0], mesh.vertices[:, 1]
    u = _vertex_samples(source, theta, phi)
    if gauge is not None:
        u = u * np.exp(1j * np.asarray(gauge(theta, phi)))[:, None, None]

    cells = mesh.plaquettes
    total = 0.0
    for cell in cells:
        loop = np.asarray(cell)
        nxt = np.roll(loop, -1)
        m = np.einsum("lai,lbi->lab", u[loop].conj(), u[nxt])
        links = np.linalg.det(m) if m.shape[-1] > 1 else m[:, 0, 0]
        mags = np.abs(links)
        if np.min(mags) < min_overlap:
            raise RefinementError(f"link overlap {np.min(mags):.2e} < {min_overlap}; refine the mesh")
        total += np.angle(np.prod(links / mags))
    raw = -total / (2.0 * np.pi)
    nearest = round(raw)
    if abs(raw - nearest) > residue_tol:
        raise RefinementError(f"lattice flux {raw!r} is not within {residue_tol} of an integer")
    return int(nearest)


# -- Euler class of the real bundle -------------------------------------------

@dataclass(frozen=True)
class EulerData:
    """Real connection matrix (dphi part) and Pfaffian density per node.

    ``pfaffian_density`` is the coefficient of ``dtheta ^ dphi``.
    """

    connection_matrix_phi: np.ndarray = field(repr=False)
    pfaffian_density: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class EulerResult:
    integral: float
    euler_number: float
    data: EulerData = field(repr=False)


def _real_frame(theta, phi) -> np.ndarray:
    b = standard_bases()
    r = transport_rotation(theta, phi)
    rt = np.swapaxes(r, -1, -2)
    return np.stack([r @ b.b_plus @ rt, r @ b.b_cross @ rt], axis=-3).real


def _real_connection(theta, phi, h):
    """Antisymmetric ``omega_ab = <B_a, dB_b>`` (theta and phi parts)."""
    f0 = _real_frame(theta, phi)

    def part(fp, fm):
        d = (fp - fm) / (2.0 * h)
        return np.real(hs_inner(f0[..., :, None, :, :], d[..., None, :, :, :]))

    om_t = part(_real_frame(theta + h, phi), _real_frame(theta - h, phi))
    om_p = part(_real_frame(theta, phi + h), _real_frame(theta, phi - h))
    return om_t, om_p


def euler_pfaffian_integral(mesh, fd_step: float = DEFAULT_FD_STEP) -> EulerResult:
    """Integral of the Pfaffian of the real plus/cross frame curvature.

    For a 2x2 antisymmetric connection ``omega ^ omega`` vanishes, so
    ``Pf(Omega) = Omega_12 = d omega_12``.
    """
    if not 0.0 < fd_step <= MAX_FD_STEP:
        raise DomainError(f"fd_step must lie in (0, {MAX_FD_STEP}]")
    theta, phi = _nodes(mesh)
    h = fd_step
    if np.any((theta - h <= 0.0) | (theta + h >= np.pi)):
        raise DomainError("finite-difference stencil crosses a pole; reduce fd_step")
    _, om_p = _real_connection(theta, phi, h)
    _, om_p_up = _real_connection(theta + h, phi, h)
    _, om_p_dn = _real_connection(theta - h, phi, h)
    om_t_fw, _ = _real_connection(theta, phi + h, h)
    om_t_bw, _ = _real_connection(theta, phi - h, h)
    curv12 = ((om_p_up - om_p_dn)[..., 0, 1] - (om_t_fw - om_t_bw)[..., 0, 1]) / (2.0 * h)
    data = EulerData(om_p, curv12)
    if isinstance(mesh, SphereMesh):
        integral = float(mesh.integrate(curv12 / np.sin(theta)))
    else:
        integral = float("nan")
    return EulerResult(integral, integral / (2.0 * np.pi), data)


# -- windings ------------------------------------------------------------------

def winding(phases, residue_tol: float = 1e-9) -> int:
    """Winding number of a closed loop of unit complex samples (endpoint not repeated)."""
    z = np.asarray(phases, dtype=complex).reshape(-1)
    if z.size < 16:
        raise RefinementError("winding needs at least 16 samples")
    mags = np.abs(z)
    if np.min(mags) < 1e-12:
        raise DomainError("winding samples must be nonzero")
    z = z / mags
    steps = np.angle(np.roll(z, -1) / z)
    if np.max(np.abs(steps)) >= np.pi - 1e-9:
        raise RefinementError("consecutive phase jump reaches pi; the loop is undersampled")
    raw = np.sum(steps) / (2.0 * np.pi)
    nearest = round(raw)
    if abs(raw - nearest) > residue_tol:
        raise RefinementError(f"winding residue {abs(raw - nearest):.3g} exceeds {residue_tol}")
    return int(nearest)
