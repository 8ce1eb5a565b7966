"""Small-tensor algebra for transverse-traceless polarization tensors.

A polarization tensor is stored as a full complex 3x3 ndarray (spatial part
``A^{ij}``) or, for the intermediate steps of a Lorentz transformation, a
complex 4x4 ndarray with index order (0, 1, 2, 3) and metric signature
(-, +, +, +).  All routines broadcast over leading axes.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError

DEFAULT_TOL = 1e-12

ETA = np.diag([-1.0, 1.0, 1.0, 1.0])


def pol_tensor(entries) -> np.ndarray:
    """Build a polarization tensor, enforcing symmetry by construction."""
    m = np.asarray(entries, dtype=complex)
    if m.shape[-2:] != (3, 3):
        raise ValueError(f"expected trailing shape (3, 3), got {m.shape}")
    return 0.5 * (m + np.swapaxes(m, -1, -2))


def hs_inner(a, b):
    """Hilbert-Schmidt product ``Tr(a^dagger b) / 2``.

    Conjugate-linear in ``a``, linear in ``b``.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    return 0.5 * np.einsum("...ij,...ij->...", a.conj(), b)


def hs_norm(a):
    return np.sqrt(np.real(hs_inner(a, a)))


def _unit(k) -> np.ndarray:
    k = np.asarray(getattr(k, "vec", k), dtype=float)
    n = np.linalg.norm(k, axis=-1, keepdims=True)
    if np.any(n == 0.0):
        raise DomainError("zero wavevector: k = 0 is not a point of the forward lightcone")
    return k / n


@dataclass(frozen=True)
class GaugeReport:
    """Max-norm gauge defects of a candidate fiber element."""

    symmetric_defect: float
    trace_defect: float
    transverse_defect: float
    temporal_defect: float = 0.0

    @property
    def max_defect(self) -> float:
        return max(self.symmetric_defect, self.trace_defect,
                   self.transverse_defect, self.temporal_defect)

    def ok(self, tol: float = DEFAULT_TOL) -> bool:
        return self.max_defect <= tol

    def violations(self, tol: float = DEFAULT_TOL) -> list[str]:
        return [name for name in ("symmetric_defect", "trace_defect",
                                  "transverse_defect", "temporal_defect")
                if getattr(self, name) > tol]


def validate_fiber(k, a) -> GaugeReport:
    """Measure how far ``a`` is from the fiber over ``k``.

    ``a`` may be a spatial 3x3 tensor or a 4x4 tensor; for the latter the
    temporal row/column is reported separately and the trace and
    transversality use the Minkowski metric with ``k^0 = |k|``.
    The transverse defect is measured against the unit vector ``k/|k|``.
    """
    khat = _unit(k)
    a = np.asarray(a, dtype=complex)
    sym = float(np.max(np.abs(a - np.swapaxes(a, -1, -2))))
    if a.shape[-2:] == (3, 3):
        tr = float(np.max(np.abs(np.trace(a, axis1=-2, axis2=-1))))
        trans = float(np.max(np.abs(np.einsum("...ij,...j->...i", a, khat))))
        return GaugeReport(sym, tr, trans, 0.0)
    if a.shape[-2:] == (4, 4):
        k4 = np.concatenate([np.ones(khat.shape[:-1] + (1,)), khat], axis=-1)
        k_low = k4 @ ETA
        tr = float(np.max(np.abs(np.einsum("...ij,ij->...", a, ETA))))
        trans = float(np.max(np.abs(np.einsum("...ij,...j->...i", a, k_low))))
        temporal = float(max(np.max(np.abs(a[..., 0, :])), np.max(np.abs(a[..., :, 0]))))
        return GaugeReport(sym, tr, trans, temporal)
    raise ValueError(f"expected a 3x3 or 4x4 tensor, got shape {a.shape}")


class StandardBases(NamedTuple):
    b_plus: np.ndarray
    b_cross: np.ndarray
    a_plus: np.ndarray
    a_minus: np.ndarray


def standard_bases() -> StandardBases:
    """Plus/cross and circular basis tensors of the fiber over ``e_z``.

    ``a_plus``/``a_minus`` are ``(b_plus +/- i b_cross) / sqrt(2)``.
    """
    b_plus = np.diag([1.0, -1.0, 0.0]).astype(complex)
    b_cross = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 0]], dtype=complex)
    a_plus = (b_plus + 1j * b_cross) / np.sqrt(2.0)
    a_minus = (b_plus - 1j * b_cross) / np.sqrt(2.0)
    return StandardBases(b_plus, b_cross, a_plus, a_minus)


def tt_project(k, m) -> np.ndarray:
    """Orthogonal projection of a 3x3 matrix onto the fiber over ``k``."""
    khat = _unit(k)
    p = np.eye(3) - np.einsum("...i,...j->...ij", khat, khat)
    s = pol_tensor(m)
    q = p @ s @ p
    tr = np.trace(q, axis1=-2, axis2=-1)[..., None, None]
    return q - 0.5 * p * tr


def symmetric_basis() -> list[np.ndarray]:
    """Orthonormal (Hilbert-Schmidt) basis of complex symmetric 3x3 matrices."""
    out = []
    for i in range(3):
        e = np.zeros((3, 3), dtype=complex)
        e[i, i] = np.sqrt(2.0)
        out.append(e)
    for i, j in ((0, 1), (0, 2), (1, 2)):
        e = np.zeros((3, 3), dtype=complex)
        e[i, j] = e[j, i] = 1.0
        out.append(e)
    return out


def fiber_rank(k, tol: float = 1e-10) -> int:
    """Complex dimension of the fiber, from the rank of the projector image."""
    images = np.array([tt_project(k, e).ravel() for e in symmetric_basis()])
    return int(np.linalg.matrix_rank(images, tol=tol))
