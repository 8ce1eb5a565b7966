"""Helicity bases of the graviton and photon bundles.

Sections are produced by rotation transport from the fiber over ``e_z``
using ``R = R_z(phi) R_y(theta)``, which maps ``e_z`` exactly onto
``k(theta, phi) = (sin t cos p, sin t sin p, cos t)``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, GaugeError
from .spacetime import angles, as_vector, axis_rotation, rot_y, rot_z
from .tensors import hs_inner, standard_bases, validate_fiber


class BundleKind(str, enum.Enum):
    GRAVITON_TOTAL = "graviton-total"
    GRAVITON_PLUS = "graviton-plus"
    GRAVITON_MINUS = "graviton-minus"
    PHOTON_PLUS = "photon-plus"
    PHOTON_MINUS = "photon-minus"

    @property
    def is_photon(self) -> bool:
        return self.value.startswith("photon")

    @property
    def helicity(self) -> int | None:
        """Helicity of the line bundle; ``None`` for the rank-2 total bundle."""
        return {"graviton-plus": 2, "graviton-minus": -2,
                "photon-plus": 1, "photon-minus": -1}.get(self.value)

    @property
    def rank(self) -> int:
        return 2 if self is BundleKind.GRAVITON_TOTAL else 1


def bundle_kind(value) -> BundleKind:
    try:
        return BundleKind(value)
    except ValueError:
        raise DomainError(f"unknown bundle {value!r}; choose from "
                          f"{[b.value for b in BundleKind]}") from None


@dataclass(frozen=True)
class HelicityCoefficients:
    c_plus: complex
    c_minus: complex


_BASES = standard_bases()
_PHOTON_PLUS = np.array([1.0, 1j, 0.0]) / np.sqrt(2.0)
_PHOTON_MINUS = np.array([1.0, -1j, 0.0]) / np.sqrt(2.0)


def transport_rotation(theta, phi) -> np.ndarray:
    return rot_z(phi) @ rot_y(theta)


def fiber_inner(a, b):
    """Hermitian product on either bundle: Hilbert-Schmidt for tensors, ``a^dagger b`` for vectors."""
    a = np.asarray(a)
    if a.shape[-1:] == (3,) and a.shape[-2:] != (3, 3):
        return np.einsum("...i,...i->...", a.conj(), np.asarray(b))
    return hs_inner(a, b)


def _is_vector(x) -> bool:
    return np.ndim(x) == 1


def act_fiber(r, x):
    """Fiber part of the rotation action on a tensor (``R A R^T``) or a vector (``R v``)."""
    x = np.asarray(x)
    if _is_vector(x):
        return np.asarray(r) @ x
    return np.asarray(r) @ x @ np.swapaxes(np.asarray(r), -1, -2)


def transported(kind: BundleKind, theta, phi):
    """Rotation-transported basis element(s) at ``(theta, phi)``; no pole check.

    Graviton kinds return ``(..., 3, 3)`` tensors (the rank-2 total bundle
    returns ``(..., 2, 3, 3)``, plus then minus); photon kinds return
    ``(..., 3)`` vectors.  At the poles the result depends on phi but is
    still a unit element of the right fiber.
    """
    kind = bundle_kind(kind)
    r = transport_rotation(theta, phi)
    rt = np.swapaxes(r, -1, -2)
    if kind is BundleKind.GRAVITON_PLUS:
        return r @ _BASES.a_plus @ rt
    if kind is BundleKind.GRAVITON_MINUS:
        return r @ _BASES.a_minus @ rt
    if kind is BundleKind.GRAVITON_TOTAL:
        return np.stack([r @ _BASES.a_plus @ rt, r @ _BASES.a_minus @ rt], axis=-3)
    if kind is BundleKind.PHOTON_PLUS:
        return r @ _PHOTON_PLUS
    return r @ _PHOTON_MINUS


def _check_not_pole(theta) -> None:
    theta = np.asarray(theta)
    if np.any((theta <= 0.0) | (theta >= np.pi)):
        raise DomainError("helicity sections are undefined at the poles theta = 0 and theta = pi")


def helicity_basis(kind, k):
    """Orthonormal pair spanning the positive and negative helicity fibers over ``k``.

    Graviton kinds give ``(A_+, A_-)``; photon kinds give ``(eps_+, eps_-)``.
    """
    kind = bundle_kind(kind)
    theta, phi = angles(k)
    _check_not_pole(theta)
    if kind.is_photon:
        r = transport_rotation(theta, phi)
        return r @ _PHOTON_PLUS, r @ _PHOTON_MINUS
    pair = transported(BundleKind.GRAVITON_TOTAL, theta, phi)
    return pair[..., 0, :, :], pair[..., 1, :, :]


def helicity_section(kind, theta, phi):
    """The single helicity section of a signed bundle kind, evaluated on arrays."""
    kind = bundle_kind(kind)
    if kind is BundleKind.GRAVITON_TOTAL:
        raise DomainError("graviton-total is rank 2; use transported() for its frame")
    _check_not_pole(theta)
    return transported(kind, theta, phi)


def helicity_of(k, a, eps: float = 1e-3) -> float:
    """Helicity from the phase acquired under a small rotation about ``k``.

    ``h = -arg<A, Sigma(R_k(eps)) A> / eps``, Richardson-extrapolated over
    ``eps`` and ``eps / 2``.  ``A`` must be a unit-norm eigenvector of the
    rotation; a phase-coherence residual above 1e-6 raises.
    """
    if not 0.0 < eps <= 1e-2:
        raise DomainError("eps must lie in (0, 1e-2]")
    a = np.asarray(a, dtype=complex)
    norm = np.real(fiber_inner(a, a))
    if abs(norm - 1.0) > 1e-10:
        raise DomainError(f"helicity_of expects a unit-norm element, <A, A> = {norm!r}")
    khat = as_vector(k) / np.linalg.norm(as_vector(k))

    def rate(step):
        rotated = act_fiber(axis_rotation(khat, step), a)
        overlap = fiber_inner(a, rotated)
        residual = np.sqrt(np.real(fiber_inner(rotated - overlap * a, rotated - overlap * a)))
        if residual / step > 1e-6:
            raise GaugeError(f"not a helicity eigenvector: phase-coherence residual {residual / step:.3g}")
        return -np.angle(overlap) / step

    coarse, fine = rate(eps), rate(eps / 2)
    return float((4.0 * fine - coarse) / 3.0)


def decompose(k, a) -> HelicityCoefficients:
    """Coordinates of a fiber element in the helicity basis over ``k``."""
    a = np.asarray(a, dtype=complex)
    if _is_vector(a):
        khat = as_vector(k) / np.linalg.norm(as_vector(k))
        if abs(np.vdot(khat, a)) > 1e-8:
            raise GaugeError("photon polarization is not transverse")
        plus, minus = helicity_basis(BundleKind.PHOTON_PLUS, k)
    else:
        report = validate_fiber(k, a)
        if report.max_defect > 1e-8 * max(1.0, float(np.max(np.abs(a)))):
            raise GaugeError(f"tensor is not in the fiber: {report}")
        plus, minus = helicity_basis(BundleKind.GRAVITON_TOTAL, k)
    return HelicityCoefficients(complex(fiber_inner(plus, a)), complex(fiber_inner(minus, a)))


def random_fiber_element(rng: np.random.Generator, k) -> np.ndarray:
    """Random complex fiber element over ``k`` (not normalized)."""
    plus, minus = helicity_basis(BundleKind.GRAVITON_TOTAL, k)
    c = rng.normal(size=2) + 1j * rng.normal(size=2)
    return c[0] * plus + c[1] * minus

