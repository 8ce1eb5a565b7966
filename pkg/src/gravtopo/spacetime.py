"""Momentum-space points, rotations, boosts and quadrature meshes on S^2."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .errors import DomainError

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class Wavevector:
    """Spatial part of a forward-lightcone four-momentum ``(|k|, k)``."""

    vec: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.vec, dtype=float).reshape(3)
        if not np.all(np.isfinite(v)) or np.linalg.norm(v) == 0.0:
            raise DomainError("zero wavevector: the origin is removed from the lightcone")
        object.__setattr__(self, "vec", v)

    @classmethod
    def from_angles(cls, theta: float, phi: float, omega: float = 1.0) -> "Wavevector":
        return cls(omega * unit_vector(theta, phi))

    @property
    def omega(self) -> float:
        return float(np.linalg.norm(self.vec))

    @property
    def hat(self) -> np.ndarray:
        return self.vec / self.omega

    @property
    def theta(self) -> float:
        return float(np.arccos(np.clip(self.hat[2], -1.0, 1.0)))

    @property
    def phi(self) -> float:
        return float(np.arctan2(self.vec[1], self.vec[0]) % TWO_PI)

    def four(self) -> np.ndarray:
        return np.concatenate([[self.omega], self.vec])

    def __repr__(self) -> str:
        return f"Wavevector({self.vec[0]:.6g}, {self.vec[1]:.6g}, {self.vec[2]:.6g})"


def as_vector(k) -> np.ndarray:
    return np.asarray(getattr(k, "vec", k), dtype=float)


def unit_vector(theta, phi) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)
                     * np.ones_like(phi)], axis=-1)


def angles(k) -> tuple[np.ndarray, np.ndarray]:
    """Colatitude in [0, pi] and azimuth in [0, 2 pi) of (an array of) wavevectors."""
    v = as_vector(k)
    r = np.linalg.norm(v, axis=-1)
    if np.any(r == 0.0):
        raise DomainError("zero wavevector")
    theta = np.arccos(np.clip(v[..., 2] / r, -1.0, 1.0))
    phi = np.arctan2(v[..., 1], v[..., 0]) % TWO_PI
    return theta, phi


# -- rotations ------------------------------------------------------------

def skew(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    z = np.zeros(v.shape[:-1])
    return np.stack([
        np.stack([z, -v[..., 2], v[..., 1]], axis=-1),
        np.stack([v[..., 2], z, -v[..., 0]], axis=-1),
        np.stack([-v[..., 1], v[..., 0], z], axis=-1),
    ], axis=-2)


def rot_z(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=float)
    c, s = np.cos(psi), np.sin(psi)
    o, z = np.ones_like(psi), np.zeros_like(psi)
    return np.stack([np.stack([c, -s, z], -1),
                     np.stack([s, c, z], -1),
                     np.stack([z, z, o], -1)], -2)


def rot_y(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=float)
    c, s = np.cos(psi), np.sin(psi)
    o, z = np.ones_like(psi), np.zeros_like(psi)
    return np.stack([np.stack([c, z, s], -1),
                     np.stack([z, o, z], -1),
                     np.stack([-s, z, c], -1)], -2)


def rodrigues(theta, phi) -> np.ndarray:
    """Rotation about ``(-sin phi, cos phi, 0)`` by ``theta``; maps ``e_z`` to ``k(theta, phi)``."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    theta, phi = np.broadcast_arrays(theta, phi)
    c, s = np.cos(phi), np.sin(phi)
    z = np.zeros_like(phi)
    k = np.stack([np.stack([z, z, c], -1),
                  np.stack([z, z, s], -1),
                  np.stack([-c, -s, z], -1)], -2)
    st = np.sin(theta)[..., None, None]
    vt = (1.0 - np.cos(theta))[..., None, None]
    return np.eye(3) + k * st + (k @ k) * vt


def axis_rotation(axis, psi) -> np.ndarray:
    """Right-handed rotation by ``psi`` about the unit vector ``axis``."""
    axis = np.asarray(axis, dtype=float)
    if abs(np.linalg.norm(axis) - 1.0) > 1e-12:
        raise DomainError(f"rotation axis must be a unit vector, |axis| = {np.linalg.norm(axis)!r}")
    k = skew(axis)
    psi = np.asarray(psi, dtype=float)[..., None, None]
    return np.eye(3) + np.sin(psi) * k + (1.0 - np.cos(psi)) * (k @ k)


P_REFLECT = np.diag([1.0, 1.0, -1.0])


def is_orthogonal(r, tol: float = 1e-12) -> bool:
    r = np.asarray(r, dtype=float)
    return r.shape == (3, 3) and np.max(np.abs(r.T @ r - np.eye(3))) <= tol


def is_rotation(r, tol: float = 1e-12) -> bool:
    return is_orthogonal(r, tol) and abs(np.linalg.det(r) - 1.0) <= tol


# -- Lorentz transformations ------------------------------------------------

ETA = np.diag([-1.0, 1.0, 1.0, 1.0])


def boost(direction, rapidity: float) -> np.ndarray:
    """Pure boost along a unit 3-vector, parametrized by rapidity."""
    n = np.asarray(direction, dtype=float)
    if abs(np.linalg.norm(n) - 1.0) > 1e-12:
        raise DomainError("boost direction must be a unit vector")
    ch, sh = np.cosh(rapidity), np.sinh(rapidity)
    lam = np.eye(4)
    lam[0, 0] = ch
    lam[0, 1:] = sh * n
    lam[1:, 0] = sh * n
    lam[1:, 1:] += (ch - 1.0) * np.outer(n, n)
    return lam


def embed_rotation(r) -> np.ndarray:
    lam = np.eye(4)
    lam[1:, 1:] = r
    return lam


def lorentz_defect(lam) -> float:
    lam = np.asarray(lam, dtype=float)
    return float(np.max(np.abs(lam.T @ ETA @ lam - ETA)))


def is_proper_orthochronous(lam, tol: float = 1e-12) -> bool:
    lam = np.asarray(lam, dtype=float)
    return (lam.shape == (4, 4) and lorentz_defect(lam) <= tol * max(1.0, np.max(np.abs(lam)) ** 2)
            and lam[0, 0] >= 1.0 - tol and np.linalg.det(lam) > 0)


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
        [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
        [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
    ])


def random_unit(rng: np.random.Generator, size=None) -> np.ndarray:
    shape = (3,) if size is None else (size, 3)
    v = rng.normal(size=shape)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def random_lorentz(rng: np.random.Generator, max_rapidity: float = 3.0) -> np.ndarray:
    """Rotation, boost, or a product of the two, chosen at random."""
    choice = rng.integers(3)
    r = embed_rotation(random_rotation(rng))
    b = boost(random_unit(rng), rng.uniform(-max_rapidity, max_rapidity))
    return (r, b, b @ r)[choice]


# -- meshes ------------------------------------------------------------------

MeshKind = Literal["gauss-legendre", "uniform-lattice"]


@dataclass(frozen=True)
class SphereMesh:
    """Product quadrature on S^2 plus, for lattices, a plaquette complex.

    Quadrature nodes are the product grid ``theta x phi`` flattened
    theta-major; all nodes avoid the poles.  ``vertices`` and ``plaquettes``
    are only populated for the uniform lattice: vertex 0 is the north pole,
    the last vertex is the south pole, and each plaquette is a tuple of
    vertex indices traversed in the positive (theta, then phi) sense.  The
    two polar rings of cells are triangles.
    """

    kind: str
    n_theta: int
    n_phi: int
    theta_nodes: np.ndarray = field(repr=False)
    phi_nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    vertices: np.ndarray | None = field(default=None, repr=False)
    plaquettes: tuple = field(default=(), repr=False)

    @property
    def theta(self) -> np.ndarray:
        return np.repeat(self.theta_nodes, self.n_phi)

    @property
    def phi(self) -> np.ndarray:
        return np.tile(self.phi_nodes, self.n_theta)

    @property
    def nodes(self) -> np.ndarray:
        return np.stack([self.theta, self.phi], axis=-1)

    def integrate(self, values) -> complex | float:
        """Ordered (deterministic) weighted sum of per-node values per unit solid angle."""
        values = np.asarray(values).reshape(-1)
        return np.sum(self.weights * values)

    def to_json(self) -> str:
        return json.dumps({
            "schema": "gravtopo.mesh/1",
            "kind": self.kind,
            "n_theta": self.n_theta,
            "n_phi": self.n_phi,
            "nodes": self.nodes.tolist(),
            "weights": self.weights.tolist(),
        })


def fejer_weights(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Fejer's first rule on [-1, 1] at ``x_i = cos((i + 1/2) pi / n)``.

    Returns ``(theta_i, w_i)``; exact for polynomials in x of degree < n.
    """
    theta = (np.arange(n) + 0.5) * np.pi / n
    j = np.arange(1, n // 2 + 1)
    s = np.cos(2.0 * np.outer(theta, j)) / (4.0 * j**2 - 1.0)
    w = (2.0 / n) * (1.0 - 2.0 * s.sum(axis=1))
    return theta, w


def sphere_mesh(n_theta: int, n_phi: int, kind: MeshKind = "gauss-legendre") -> SphereMesh:
    """Quadrature mesh on the unit sphere.

    ``gauss-legendre`` uses Legendre roots in cos(theta); ``uniform-lattice``
    uses the half-step offset grid ``theta_i = (i + 1/2) pi / n_theta`` with
    Fejer weights and carries the plaquette complex used for lattice Chern
    numbers.
    """
    if n_theta < 4 or n_phi < 8:
        raise DomainError(f"degenerate mesh {n_theta}x{n_phi}: need n_theta >= 4 and n_phi >= 8")
    dphi = TWO_PI / n_phi
    phi = np.arange(n_phi) * dphi
    if kind == "gauss-legendre":
        x, w = np.polynomial.legendre.leggauss(n_theta)
        order = np.argsort(-x)
        theta = np.arccos(x[order])
        weights = np.repeat(w[order] * dphi, n_phi)
        return SphereMesh(kind, n_theta, n_phi, theta, phi, weights)
    if kind == "uniform-lattice":
        theta, w = fejer_weights(n_theta)
        weights = np.repeat(w * dphi, n_phi)
        verts, plaqs = _plaquette_complex(n_theta, n_phi)
        return SphereMesh(kind, n_theta, n_phi, theta, phi, weights, verts, plaqs)
    raise DomainError(f"unknown mesh kind {kind!r}")


def _plaquette_complex(n_theta: int, n_phi: int):
    """Cells of the (theta, phi) grid with corners at theta = i pi / n_theta."""
    edges = np.arange(n_theta + 1) * np.pi / n_theta
    phis = np.arange(n_phi) * TWO_PI / n_phi
    verts = [(0.0, 0.0)]
    for t in edges[1:-1]:
        verts.extend((t, p) for p in phis)
    verts.append((np.pi, 0.0))
    south = len(verts) - 1

    def vid(i, j):
        if i == 0:
            return 0
        if i == n_theta:
            return south
        return 1 + (i - 1) * n_phi + (j % n_phi)

    plaqs = []
    for i in range(n_theta):
        for j in range(n_phi):
            loop = [vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)]
            # collapse the repeated pole corner of the polar rings
            cell = tuple(v for n, v in enumerate(loop) if v != loop[n - 1])
            plaqs.append(cell)
    return np.array(verts), tuple(plaqs)
