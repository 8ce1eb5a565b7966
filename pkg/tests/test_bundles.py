import numpy as np
import pytest
from hypothesis import given

from gravtopo.bundles import (BundleKind, bundle_kind, decompose, fiber_inner, helicity_basis,
                              helicity_of, helicity_section, random_fiber_element, transported)
from gravtopo.errors import DomainError, GaugeError
from gravtopo.spacetime import unit_vector
from gravtopo.tensors import hs_inner, standard_bases, tt_project, validate_fiber

from strategies import azimuth, polar

B = standard_bases()
EZ = np.array([0.0, 0.0, 1.0])


def test_bundle_kind_metadata():
    assert BundleKind.GRAVITON_PLUS.helicity == 2
    assert BundleKind.PHOTON_MINUS.helicity == -1
    assert BundleKind.GRAVITON_TOTAL.rank == 2
    assert bundle_kind("photon-plus").is_photon
    with pytest.raises(DomainError):
        bundle_kind("scalar")


def test_basis_near_north_pole_approaches_standard_pair():
    plus, minus = helicity_basis(BundleKind.GRAVITON_TOTAL, unit_vector(1e-3, 0.0))
    assert np.max(np.abs(plus - B.a_plus)) < 1e-3
    assert np.max(np.abs(minus - B.a_minus)) < 1e-3


@given(polar, azimuth)
def test_graviton_basis_is_orthonormal_and_in_fiber(theta, phi):
    k = unit_vector(theta, phi)
    plus, minus = helicity_basis(BundleKind.GRAVITON_TOTAL, k)
    assert validate_fiber(k, plus).max_defect <= 1e-12
    assert validate_fiber(k, minus).max_defect <= 1e-12
    assert abs(hs_inner(plus, minus)) <= 1e-12
    assert abs(hs_inner(plus, plus) - 1) <= 1e-12


@given(polar, azimuth)
def test_photon_basis_is_transverse(theta, phi):
    k = unit_vector(theta, phi)
    for eps in helicity_basis(BundleKind.PHOTON_PLUS, k):
        assert abs(k @ eps) <= 1e-12


@given(polar, azimuth)
def test_plus_section_splits_into_orthonormal_real_pair(theta, phi):
    plus = helicity_section(BundleKind.GRAVITON_PLUS, theta, phi)
    b1, b2 = np.sqrt(2) * plus.real, np.sqrt(2) * plus.imag
    assert abs(hs_inner(b1, b2)) <= 1e-12
    assert hs_inner(b1, b1).real == pytest.approx(1.0, abs=1e-12)
    assert hs_inner(b2, b2).real == pytest.approx(1.0, abs=1e-12)


def test_helicity_of_examples():
    assert helicity_of(EZ, B.a_plus) == pytest.approx(2.0, abs=1e-8)
    assert helicity_of(EZ, B.a_minus) == pytest.approx(-2.0, abs=1e-8)
    assert helicity_of(EZ, np.array([1, 1j, 0]) / np.sqrt(2)) == pytest.approx(1.0, abs=1e-8)


@given(polar, azimuth)
def test_helicity_of_transported_sections(theta, phi):
    k = unit_vector(theta, phi)
    for kind in BundleKind:
        if kind.helicity is None:
            continue
        elem = helicity_section(kind, theta, phi)
        assert helicity_of(k, elem) == pytest.approx(kind.helicity, abs=1e-8)


def test_helicity_of_rejects_mixtures_and_bad_steps():
    with pytest.raises(GaugeError):
        helicity_of(EZ, B.b_plus)
    with pytest.raises(DomainError):
        helicity_of(EZ, B.a_plus, eps=0.1)
    with pytest.raises(DomainError):
        helicity_of(EZ, 2 * B.a_plus)


def test_decompose_examples(rng):
    k = unit_vector(1e-4, 0.0)
    c = decompose(k, helicity_basis(BundleKind.GRAVITON_TOTAL, k)[0])
    assert (c.c_plus, c.c_minus) == (pytest.approx(1.0, abs=1e-6), pytest.approx(0.0, abs=1e-6))
    c = decompose(k, tt_project(k, B.b_plus))
    assert abs(c.c_plus) == pytest.approx(1 / np.sqrt(2), abs=1e-6)
    assert abs(c.c_minus) == pytest.approx(1 / np.sqrt(2), abs=1e-6)
    k = unit_vector(1.1, 2.3)
    a = random_fiber_element(rng, k)
    c = decompose(k, a)
    assert abs(c.c_plus) ** 2 + abs(c.c_minus) ** 2 == pytest.approx(hs_inner(a, a).real, abs=1e-12)


def test_decompose_photon_and_rejects_non_fiber():
    k = unit_vector(0.8, 0.1)
    plus, minus = helicity_basis(BundleKind.PHOTON_PLUS, k)
    c = decompose(k, 0.6 * plus + 0.8j * minus)
    assert c.c_plus == pytest.approx(0.6) and c.c_minus == pytest.approx(0.8j)
    with pytest.raises(GaugeError):
        decompose(k, np.eye(3))
    with pytest.raises(GaugeError):
        decompose(k, k.astype(complex))


def test_helicity_section_rejects_poles_and_rank_two():
    with pytest.raises(DomainError):
        helicity_section(BundleKind.GRAVITON_PLUS, 0.0, 0.0)
    with pytest.raises(DomainError):
        helicity_section(BundleKind.GRAVITON_TOTAL, 1.0, 0.0)


def test_transported_shapes():
    theta = np.linspace(0.1, 3.0, 5)
    assert transported(BundleKind.GRAVITON_TOTAL, theta, theta).shape == (5, 2, 3, 3)
    assert transported(BundleKind.PHOTON_MINUS, theta, theta).shape == (5, 3)
    assert fiber_inner(np.array([1, 1j, 0]), np.array([1, 1j, 0])) == pytest.approx(2.0)
