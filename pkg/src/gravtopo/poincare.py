"""Action of the Poincare group on graviton fiber elements ``(k, A)``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, GaugeError
from .spacetime import ETA, Wavevector, is_orthogonal, lorentz_defect
from .tensors import validate_fiber

FIBER_TOL = 1e-10


@dataclass(frozen=True)
class Translation:
    """Spacetime translation by the four-vector ``a^mu``."""

    a: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a", np.asarray(self.a, dtype=float).reshape(4))


def _require_fiber(k: Wavevector, a, tol: float = FIBER_TOL) -> None:
    report = validate_fiber(k, a)
    scale = max(1.0, float(np.max(np.abs(a))))
    if report.max_defect > tol * scale:
        raise GaugeError(f"not a fiber element over {k!r}: {report}")


def act_translation(t: Translation, k: Wavevector, a):
    """Multiply by the plane-wave phase ``exp(i a^mu k_mu)`` with ``k_mu = (-w, k)``."""
    _require_fiber(k, a)
    phase = np.exp(1j * float(t.a @ ETA @ k.four()))
    return k, phase * np.asarray(a, dtype=complex)


def act_orthogonal(r, k: Wavevector, a):
    """``(k, A) -> (R k, R A R^T)`` for any orthogonal R, reflections included."""
    r = np.asarray(r, dtype=float)
    if not is_orthogonal(r):
        raise DomainError("act_orthogonal needs an orthogonal 3x3 matrix")
    _require_fiber(k, a)
    return Wavevector(r @ k.vec), r @ np.asarray(a, dtype=complex) @ r.T


def embed(a) -> np.ndarray:
    """Spatial tensor as a 4x4 tensor with vanishing temporal row and column."""
    out = np.zeros(np.shape(a)[:-2] + (4, 4), dtype=complex)
    out[..., 1:, 1:] = a
    return out


def gauge_restore(kprime, aprime) -> np.ndarray:
    """Gauge transformation removing the temporal components of ``aprime``.

    ``kprime`` is the lightlike four-momentum ``(k'^0, k')``; the returned
    tensor is ``A' - i C k' - i k' C`` with ``C`` fixed by ``A''^{a0} = 0``.
    """
    kprime = np.asarray(kprime, dtype=float)
    k0 = kprime[0]
    if k0 <= 0.0:
        raise DomainError(f"k'^0 = {k0!r} is not on the forward lightcone")
    aprime = np.asarray(aprime, dtype=complex)
    c = (1j / k0) * (-aprime[:, 0] + (aprime[0, 0] / (2.0 * k0)) * kprime)
    return aprime - 1j * np.outer(c, kprime) - 1j * np.outer(kprime, c)


def act_lorentz(lam, k: Wavevector, a):
    """Covariant transform followed by temporal gauge restoration.

    Returns the transformed wavevector and the spatial part of ``A''``.
    """
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (4, 4) or lorentz_defect(lam) > 1e-9 * max(1.0, np.max(np.abs(lam))) ** 2:
        raise DomainError("not a Lorentz transformation")
    _require_fiber(k, a)
    kprime = lam @ k.four()
    if kprime[0] <= 0.0:
        raise RuntimeError("Lorentz image left the forward lightcone; the transform is not orthochronous")
    aprime = lam @ embed(a) @ lam.T
    restored = gauge_restore(kprime, aprime)
    return Wavevector(kprime[1:]), restored[1:, 1:]
