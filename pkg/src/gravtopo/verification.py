"""Randomized property suite for the fiber algebra and the Poincare representation."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bundles import BundleKind, helicity_basis, helicity_of, random_fiber_element
from .poincare import Translation, act_lorentz, act_orthogonal, act_translation
from .spacetime import P_REFLECT, Wavevector, random_lorentz, random_rotation, random_unit
from .tensors import fiber_rank, hs_inner, hs_norm, symmetric_basis, tt_project, validate_fiber


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    limit: float

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "limit", float(self.limit))

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.value) and self.value <= self.limit)

    def as_dict(self) -> dict:
        return {"name": self.name, "value": self.value, "limit": self.limit, "passed": self.passed}


def _random_k(rng) -> Wavevector:
    return Wavevector(random_unit(rng) * np.exp(rng.uniform(np.log(0.5), np.log(2.0))))


def _unit_fiber(rng, k):
    a = random_fiber_element(rng, k)
    return a / hs_norm(a)


def representation_checks(samples: int = 1000, seed: int = 0, tol: float = 1e-10,
                          max_rapidity: float = 3.0) -> list[Check]:
    """Composition, unitarity, gauge preservation and helicity invariance on random data.

    Each sample draws ``Lambda_1, Lambda_2`` (rotations, boosts or products,
    rapidity at most ``max_rapidity``), a wavevector and two unit fiber
    elements.  Defects are relative to the unit input norm.
    """
    rng = np.random.default_rng(seed)
    composition = unitarity = gauge = helicity = 0.0
    for _ in range(samples):
        l1 = random_lorentz(rng, max_rapidity)
        l2 = random_lorentz(rng, max_rapidity)
        k = _random_k(rng)
        a, b = _unit_fiber(rng, k), _unit_fiber(rng, k)

        k1, a1 = act_lorentz(l1, k, a)
        k12, a12 = act_lorentz(l2, k1, a1)
        kc, ac = act_lorentz(l2 @ l1, k, a)
        scale = max(1.0, np.linalg.norm(kc.vec))
        composition = max(composition, float(np.max(np.abs(a12 - ac))),
                          float(np.max(np.abs(k12.vec - kc.vec))) / scale)

        _, b1 = act_lorentz(l1, k, b)
        unitarity = max(unitarity, abs(complex(hs_inner(a1, b1) - hs_inner(a, b))))

        gauge = max(gauge, validate_fiber(k1, a1).max_defect)

        plus, minus = helicity_basis(BundleKind.GRAVITON_TOTAL, k)
        p1, m1 = helicity_basis(BundleKind.GRAVITON_TOTAL, k1)
        _, plus_img = act_lorentz(l1, k, plus)
        _, minus_img = act_lorentz(l1, k, minus)
        helicity = max(helicity, abs(complex(hs_inner(m1, plus_img))),
                       abs(complex(hs_inner(p1, minus_img))))
    return [
        Check("composition_law", composition, tol),
        Check("unitarity", unitarity, tol),
        Check("gauge_preservation", gauge, tol),
        Check("helicity_subbundle_invariance", helicity, tol),
    ]


def euclidean_checks(samples: int = 200, seed: int = 1, tol: float = 1e-10) -> list[Check]:
    """Translations and rotations/reflections: group law, unitarity, helicity flip under reflection."""
    rng = np.random.default_rng(seed)
    trans = rot = flip = 0.0
    for _ in range(samples):
        k = _random_k(rng)
        a = _unit_fiber(rng, k)
        t1, t2 = Translation(rng.normal(size=4)), Translation(rng.normal(size=4))
        _, x = act_translation(t2, *act_translation(t1, k, a))
        _, y = act_translation(Translation(t1.a + t2.a), k, a)
        trans = max(trans, float(np.max(np.abs(x - y))), abs(hs_norm(x) - 1.0))

        r1, r2 = random_rotation(rng), random_rotation(rng) @ P_REFLECT
        _, x = act_orthogonal(r2, *act_orthogonal(r1, k, a))
        _, y = act_orthogonal(r2 @ r1, k, a)
        rot = max(rot, float(np.max(np.abs(x - y))), abs(hs_norm(x) - 1.0))

        plus, _ = helicity_basis(BundleKind.GRAVITON_TOTAL, k)
        kr, image = act_orthogonal(P_REFLECT, k, plus)
        _, minus_r = helicity_basis(BundleKind.GRAVITON_TOTAL, kr)
        flip = max(flip, abs(abs(complex(hs_inner(minus_r, image))) - 1.0))
    return [
        Check("translation_group_law", trans, tol),
        Check("orthogonal_group_law", rot, tol),
        Check("reflection_swaps_helicity", flip, tol),
    ]


def fiber_checks(samples: int = 200, seed: int = 2) -> list[Check]:
    """Projector idempotence, fiber dimension, positivity and helicity eigenvalues."""
    rng = np.random.default_rng(seed)
    idem = rank = positivity = hel = 0.0
    for _ in range(samples):
        k = random_unit(rng)
        m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        p = tt_project(k, m)
        idem = max(idem, float(np.max(np.abs(tt_project(k, p) - p))))
        rank = max(rank, abs(fiber_rank(k) - 2))
        v = sum(c * e for c, e in zip(rng.normal(size=6) + 1j * rng.normal(size=6), symmetric_basis()))
        n = complex(hs_inner(v, v))
        positivity = max(positivity, abs(n.imag), max(0.0, -n.real))
        for kind, h in ((BundleKind.GRAVITON_PLUS, 2), (BundleKind.GRAVITON_MINUS, -2),
                        (BundleKind.PHOTON_PLUS, 1), (BundleKind.PHOTON_MINUS, -1)):
            pair = helicity_basis(kind, k)
            elem = pair[0] if h > 0 else pair[1]
            hel = max(hel, abs(helicity_of(k, elem) - h))
    return [
        Check("tt_projector_idempotent", idem, 1e-12),
        Check("fiber_dimension_two", float(rank), 0.0),
        Check("hs_inner_positive", positivity, 1e-14),
        Check("helicity_eigenvalues", hel, 1e-6),
    ]
