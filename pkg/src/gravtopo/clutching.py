"""Explicit globally smooth frame of the graviton bundle by clutching.

Frames are returned as arrays of shape ``(..., 2, 3, 3)``: the member axis
comes before the tensor indices, so a single frame unpacks as a pair.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np

from .errors import ConventionError, DomainError
from .spacetime import P_REFLECT, SphereMesh, rodrigues, unit_vector
from .tensors import hs_inner, standard_bases, validate_fiber

HALF_PI = 0.5 * np.pi
_ANGLE_SLACK = 1e-14
_BASES = standard_bases()


@dataclass(frozen=True)
class FrameField:
    """A pair of tensor-valued functions of ``(theta, phi)`` on a colatitude band."""

    name: str
    evaluator: Callable = field(repr=False)
    theta_domain: tuple[float, float] = (0.0, np.pi)

    def __call__(self, theta, phi) -> np.ndarray:
        lo, hi = self.theta_domain
        t = np.asarray(theta)
        if np.any((t < lo - _ANGLE_SLACK) | (t > hi + _ANGLE_SLACK)):
            raise DomainError(f"{self.name}: theta outside [{lo:.6g}, {hi:.6g}]")
        return self.evaluator(theta, phi)


def apply_matrix(t, frame) -> np.ndarray:
    """``(T F)_a = sum_b T_ab F_b`` for a 2x2 matrix field acting on a frame."""
    return np.einsum("...ab,...bij->...aij", t, frame)


def _upper(theta, phi) -> np.ndarray:
    r = rodrigues(theta, phi)
    rt = np.swapaxes(r, -1, -2)
    return np.stack([r @ _BASES.a_plus @ rt, r @ _BASES.a_minus @ rt], axis=-3)


def _lower(theta, phi) -> np.ndarray:
    # reflect k through the xy-plane, use the upper frame there, reflect back; swap members
    u = _upper(np.pi - np.asarray(theta, dtype=float), phi)
    p = P_REFLECT
    return np.stack([p @ u[..., 1, :, :] @ p, p @ u[..., 0, :, :] @ p], axis=-3)


def frame_hemisphere(which: Literal["upper", "lower"], theta, phi, extended: bool = False) -> np.ndarray:
    """Rotation-transported frame on the upper or reflected frame on the lower hemisphere.

    With ``extended=True`` both formulas are evaluated on the open band
    ``0 < theta < pi`` (where they are still smooth), which is what the
    overlap identity ``F_U = T F_L`` is stated on.
    """
    t = np.asarray(theta, dtype=float)
    if which == "upper":
        lo, hi = (0.0, np.pi) if extended else (0.0, HALF_PI)
        fn = _upper
    elif which == "lower":
        lo, hi = (0.0, np.pi) if extended else (HALF_PI, np.pi)
        fn = _lower
    else:
        raise DomainError(f"hemisphere must be 'upper' or 'lower', not {which!r}")
    if np.any((t < lo - _ANGLE_SLACK) | (t > hi + _ANGLE_SLACK)):
        raise DomainError(f"theta outside the {which} hemisphere [{lo:.6g}, {hi:.6g}]")
    return fn(t, phi)


def gram_matrix(upper, lower) -> np.ndarray:
    """``T_ab = <F_L,b, F_U,a>``, i.e. the coefficients of F_U in the (orthonormal) F_L."""
    return hs_inner(lower[..., None, :, :, :], upper[..., :, None, :, :])


def closed_form_transition(phi) -> np.ndarray:
    phi = np.asarray(phi, dtype=float)
    out = np.zeros(phi.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = np.exp(4j * phi)
    out[..., 1, 1] = np.exp(-4j * phi)
    return out


def transition(phi, tol: float = 1e-10) -> np.ndarray:
    """Equatorial transition matrix recovered from the two hemisphere frames.

    Raises ``ConventionError`` if the Gram matrix leaks off the diagonal or
    disagrees with ``diag(exp(4 i phi), exp(-4 i phi))``.
    """
    phi = np.asarray(phi, dtype=float)
    t = gram_matrix(_upper(HALF_PI, phi), _lower(HALF_PI, phi))
    off = max(float(np.max(np.abs(t[..., 0, 1]))), float(np.max(np.abs(t[..., 1, 0]))))
    if off > tol:
        raise ConventionError(f"transition leaks off the diagonal by {off:.3g}")
    mismatch = float(np.max(np.abs(t - closed_form_transition(phi))))
    if mismatch > tol:
        raise ConventionError(f"transition differs from the closed form by {mismatch:.3g}")
    return t


def homotopy_T(theta, phi) -> np.ndarray:
    """SU(2) homotopy from the transition loop (theta = pi/2) to the identity (theta = pi)."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if np.any((theta < HALF_PI - _ANGLE_SLACK) | (theta > np.pi + _ANGLE_SLACK)):
        raise DomainError("homotopy parameter theta must lie in [pi/2, pi]")
    return _homotopy(theta, phi)


def _homotopy(theta, phi) -> np.ndarray:
    theta, phi = np.broadcast_arrays(theta, phi)
    s, c = np.sin(theta), np.cos(theta)
    x = np.cos(4 * phi) * s**2 + c**2
    y = np.sin(4 * phi) * s
    z = -np.sin(2 * phi) ** 2 * np.sin(2 * theta)
    out = np.empty(theta.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = x + 1j * y
    out[..., 0, 1] = z
    out[..., 1, 0] = -z
    out[..., 1, 1] = x - 1j * y
    return out


def _bump(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def smooth_step(theta):
    """Flat-at-both-ends smooth step from pi/2 (theta <= pi/2) to pi (theta >= pi)."""
    theta = np.asarray(theta, dtype=float)
    a = _bump(theta - HALF_PI)
    b = _bump(np.pi - theta)
    denom = a + b
    ratio = np.divide(a, denom, out=np.where(theta >= np.pi, 1.0, 0.0), where=denom > 0)
    g = HALF_PI * (1.0 + ratio)
    return g if g.ndim else float(g)


def _assemble(theta, phi, lower_matrix) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    theta, phi = np.broadcast_arrays(theta, np.asarray(phi, dtype=float))
    south = theta >= HALF_PI
    upper = _upper(theta, phi)
    lower = apply_matrix(lower_matrix(theta, phi), _lower(theta, phi))
    return np.where(south[..., None, None, None], lower, upper)


def global_frame(theta, phi) -> np.ndarray:
    """Smooth orthonormal frame of the graviton bundle on all of S^2.

    ``F_U`` on the open upper hemisphere; ``T(g(theta), phi) F_L`` on the
    closed lower hemisphere.  Both branch formulas are regular at their own
    pole, so the poles need no special casing.
    """
    theta = np.asarray(theta, dtype=float)
    if np.any((theta < -_ANGLE_SLACK) | (theta > np.pi + _ANGLE_SLACK)):
        raise DomainError("theta must lie in [0, pi]")
    return _assemble(theta, phi, lambda t, p: _homotopy(smooth_step(t), p))


def unsmoothed_frame(theta, phi) -> np.ndarray:
    """Continuous but not smooth variant using ``T(theta, phi)`` without the step ``g``."""
    theta = np.asarray(theta, dtype=float)
    return _assemble(theta, phi, lambda t, p: _homotopy(np.clip(t, HALF_PI, np.pi), p))


GLOBAL_FRAME = FrameField("global", global_frame)
UNSMOOTHED_FRAME = FrameField("unsmoothed", unsmoothed_frame)
UPPER_FRAME = FrameField("upper", _upper, (0.0, HALF_PI))
LOWER_FRAME = FrameField("lower", _lower, (HALF_PI, np.pi))


def frame_defects(frame: np.ndarray, theta, phi) -> tuple[float, float]:
    """Worst orthonormality defect and worst gauge defect of frame samples."""
    gram = hs_inner(frame[..., :, None, :, :], frame[..., None, :, :, :])
    ortho = float(np.max(np.abs(gram - np.eye(2))))
    k = unit_vector(theta, phi)
    k = np.broadcast_to(k[..., None, :], frame.shape[:-2] + (3,))
    gauge = validate_fiber(k, frame).max_defect
    return ortho, gauge


# -- smoothness ---------------------------------------------------------------

@dataclass(frozen=True)
class SmoothnessReport:
    h: float
    max_first_theta: float
    max_first_phi: float
    max_second_theta: float
    max_second_phi: float
    equator_jump_first: float
    equator_jump_second: float
    flagged_nodes: tuple[int, ...] = ()

    @property
    def max_derivative(self) -> float:
        return max(self.max_first_theta, self.max_first_phi,
                   self.max_second_theta, self.max_second_phi)


def _maxabs(x, axis):
    return np.max(np.abs(x), axis=axis)


def _central(frame, theta, phi, h):
    f0 = frame(theta, phi)
    ft_p, ft_m = frame(theta + h, phi), frame(theta - h, phi)
    fp_p, fp_m = frame(theta, phi + h), frame(theta, phi - h)
    axes = (-3, -2, -1)
    return (_maxabs((ft_p - ft_m) / (2 * h), axes),
            _maxabs((fp_p - fp_m) / (2 * h), axes),
            _maxabs((ft_p - 2 * f0 + ft_m) / h**2, axes),
            _maxabs((fp_p - 2 * f0 + fp_m) / h**2, axes))


def equator_jumps(frame: Callable, phi, h: float) -> tuple[float, float]:
    """Mismatch of second-order one-sided theta derivatives across theta = pi/2."""
    phi = np.asarray(phi, dtype=float)
    below = [frame(HALF_PI - n * h, phi) for n in range(4)]
    above = [frame(HALF_PI + n * h, phi) for n in range(4)]

    def d1(f, s):
        return s * (3 * f[0] - 4 * f[1] + f[2]) / (2 * h)

    def d2(f):
        return (2 * f[0] - 5 * f[1] + 4 * f[2] - f[3]) / h**2

    jump1 = float(np.max(np.abs(d1(above, -1.0) - d1(below, 1.0))))
    jump2 = float(np.max(np.abs(d2(above) - d2(below))))
    return jump1, jump2


def smoothness_scan(frame: FrameField, mesh: SphereMesh, h: float = 1e-3,
                    growth: float = 1.5) -> SmoothnessReport:
    """Refinement-stable finite-difference smoothness certificate (orders 1 and 2).

    A node is flagged when a derivative estimate grows by more than
    ``growth`` under ``h -> h/2``, i.e. the local Lipschitz estimate diverges.
    """
    if h > 1e-3:
        raise DomainError("smoothness_scan needs h <= 1e-3")
    theta, phi = mesh.theta, mesh.phi
    lo, hi = frame.theta_domain
    keep = (theta - h >= lo) & (theta + h <= hi)
    t, p = theta[keep], phi[keep]
    coarse = _central(frame, t, p, h)
    fine = _central(frame, t, p, h / 2)
    grew = np.zeros(t.shape, dtype=bool)
    for c, f in zip(coarse, fine):
        grew |= f > growth * c + 1e-6
    idx = np.flatnonzero(keep)[grew]
    if lo <= HALF_PI - 3 * h and hi >= HALF_PI + 3 * h:
        j1, j2 = equator_jumps(frame, mesh.phi_nodes, h)
    else:
        j1 = j2 = float("nan")
    return SmoothnessReport(h, *(float(np.max(c)) for c in coarse), j1, j2,
                            tuple(int(i) for i in idx))


# -- export ---------------------------------------------------------------------

COMPONENTS = ("xx", "xy", "xz", "yy", "yz", "zz")
_IDX = ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2))


def frame_columns() -> list[str]:
    cols = ["theta", "phi"]
    for member in (1, 2):
        for comp in COMPONENTS:
            cols += [f"f{member}_{comp}_re", f"f{member}_{comp}_im"]
    return cols


def frame_rows(frame: Callable, theta, phi) -> list[list[float]]:
    """Rows ``theta, phi`` followed by re/im of the 6 independent components of each member."""
    theta = np.asarray(theta, dtype=float).reshape(-1)
    phi = np.asarray(phi, dtype=float).reshape(-1)
    values = frame(theta, phi)
    rows = []
    for n in range(theta.size):
        row = [float(theta[n]), float(phi[n])]
        for member in range(2):
            for i, j in _IDX:
                z = values[n, member, i, j]
                row += [float(z.real), float(z.imag)]
        rows.append(row)
    return rows
