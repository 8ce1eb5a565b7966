"""Negative results: singular plus/cross frames, no linear subbundle, no spin/orbit split."""
from __future__ import annotations

import csv
import io
import itertools
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg import expm
from scipy.optimize import least_squares

from .bundles import BundleKind, transported
from .clutching import FrameField, _lower, _upper, gram_matrix, global_frame
from .errors import DomainError, NonConvergentError
from .spacetime import angles, axis_rotation, sphere_mesh, unit_vector
from .tensors import hs_inner
from .topology import euler_pfaffian_integral, winding

AXES = {"x": 0, "y": 1, "z": 2}
_E = np.eye(3)


# -- naive plus/cross frame ----------------------------------------------------

def naive_frame(theta, phi) -> np.ndarray:
    """``(u u - v v, u v + v u)`` built from the spherical unit vectors ``e_theta, e_phi``."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if np.any((theta <= 0.0) | (theta >= np.pi)):
        raise DomainError("the plus/cross frame is singular at the poles theta = 0, pi")
    theta, phi = np.broadcast_arrays(theta, phi)
    u = np.stack([np.cos(theta) * np.cos(phi), np.cos(theta) * np.sin(phi), -np.sin(theta)], -1)
    v = np.stack([-np.sin(phi), np.cos(phi), np.zeros_like(phi)], -1)
    uu = np.einsum("...i,...j->...ij", u, u)
    vv = np.einsum("...i,...j->...ij", v, v)
    uv = np.einsum("...i,...j->...ij", u, v)
    plus = uu - vv
    cross = uv + np.swapaxes(uv, -1, -2)
    return np.stack([plus, cross], axis=-3).astype(complex)


NAIVE_FRAME = FrameField("naive", naive_frame, (0.0, np.pi))


# -- singularity scan -----------------------------------------------------------

@dataclass(frozen=True)
class PoleReport:
    pole: str
    radii: tuple[float, ...]
    indices: tuple[tuple[int, int] | None, ...]
    oscillation: tuple[float, ...]
    singular: bool

    @property
    def stable(self) -> bool:
        return None not in self.indices and len(set(self.indices)) == 1


@dataclass(frozen=True)
class SingularityReport:
    frame: str
    poles: tuple[PoleReport, ...]

    @property
    def singular_poles(self) -> list[str]:
        return [p.pole for p in self.poles if p.singular]


def _loop_indices(m, min_modulus=0.1):
    """Windings of the dominant (diagonal or anti-diagonal) entries of a U(2) loop."""
    diag = min(np.min(np.abs(m[:, 0, 0])), np.min(np.abs(m[:, 1, 1])))
    anti = min(np.min(np.abs(m[:, 0, 1])), np.min(np.abs(m[:, 1, 0])))
    if max(diag, anti) < min_modulus:
        return None
    if diag >= anti:
        return winding(m[:, 0, 0]), winding(m[:, 1, 1])
    return winding(m[:, 0, 1]), winding(m[:, 1, 0])


def singularity_scan(frame: FrameField, theta_min: float = 0.05, loops: int = 4,
                     n_phi: int = 512) -> SingularityReport:
    """Rotation of a frame around shrinking polar circles, relative to a reference smooth there.

    The reference is the rotation-transported frame (north) or its
    reflection (south), both regular at their pole and helicity-diagonal.
    On each circle the overlap loop ``M(phi) = <ref_s, F_b>`` is reduced to
    a pair of integer windings; nonzero windings that persist as the
    circle shrinks certify a point singularity.  ``oscillation`` is
    ``max |M(phi) - M(0)|`` and tends to 0 for a frame continuous at the pole.
    """
    if not 0.0 < theta_min < 0.1:
        raise DomainError("theta_min must lie in (0, 0.1)")
    if loops < 2:
        raise DomainError("need at least two circles to judge stability")
    phi = np.arange(n_phi) * (2.0 * np.pi / n_phi)
    lo, hi = frame.theta_domain
    poles = []
    for name, in_domain, reference, to_theta in (
        ("north", lo <= 0.0, _upper, lambda r: r),
        ("south", hi >= np.pi, _lower, lambda r: np.pi - r),
    ):
        if not in_domain:
            continue
        radii, indices, osc = [], [], []
        for level in range(loops):
            r = theta_min / 2**level
            t = np.full_like(phi, to_theta(r))
            m = gram_matrix(frame(t, phi), reference(t, phi))
            radii.append(r)
            indices.append(_loop_indices(m))
            osc.append(float(np.max(np.abs(m - m[0]))))
        stable = None not in indices and len(set(indices)) == 1
        if stable:
            singular = indices[0] != (0, 0)
        else:
            singular = osc[-1] > 0.5 * osc[0] and osc[-1] > 1e-6
        poles.append(PoleReport(name, tuple(radii), tuple(indices), tuple(osc), bool(singular)))
    return SingularityReport(frame.name, tuple(poles))


# -- linear polarization obstruction --------------------------------------------

@dataclass(frozen=True)
class LinearSubbundleVerdict:
    pfaffian_integral: float
    euler_number: float
    linear_subbundle: str


def linear_subbundle_verdict(mesh=None, fd_step: float = 1e-4) -> LinearSubbundleVerdict:
    """A nonzero Euler integral of the real bundle rules out linearly polarized subbundles."""
    mesh = mesh if mesh is not None else sphere_mesh(64, 128)
    result = euler_pfaffian_integral(mesh, fd_step)
    verdict = "obstructed" if abs(result.integral) > 1.0 else "not-obstructed"
    return LinearSubbundleVerdict(result.integral, result.euler_number, verdict)


# -- sections and angular momentum operators ------------------------------------

def _away_from_poles(k, margin: float = 0.05) -> bool:
    theta, _ = angles(k)
    return bool(margin < theta < np.pi - margin)


@dataclass(frozen=True)
class SectionFn:
    """A closed-form section ``k -> tensor`` defined on an open subset of the lightcone.

    Values are memoized per wavevector (bitwise), which keeps nested
    operator expressions affordable.
    """

    name: str
    evaluator: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    domain: Callable[[np.ndarray], bool] = field(default=_away_from_poles, repr=False)
    _memo: dict = field(default_factory=dict, repr=False, compare=False)

    def __call__(self, k) -> np.ndarray:
        k = np.asarray(getattr(k, "vec", k), dtype=float)
        key = k.tobytes()
        if key not in self._memo:
            if not self.domain(k):
                raise DomainError(f"section {self.name!r} is not defined at k = {k}")
            self._memo[key] = self.evaluator(k)
        return self._memo[key]

    def fresh(self) -> "SectionFn":
        """Same section with an empty value cache."""
        return SectionFn(self.name, self.evaluator, self.domain)


def _axis(a) -> int:
    return AXES[a] if isinstance(a, str) else int(a)


def _rotated(s: SectionFn, k: np.ndarray, a: int, psi: float) -> np.ndarray:
    r = axis_rotation(_E[a], psi)
    return r @ s(r.T @ k) @ r.T


def J_total(s: SectionFn, k, axis, eps: float = 1e-4, richardson: bool = True,
            convention: int = 1) -> np.ndarray:
    """Rotation generator ``(J_a s)(k) = i d/dpsi [Sigma(R_a(psi)) s](k)`` at ``psi = 0``.

    ``[Sigma(R) s](k) = R s(R^-1 k) R^-1``.  ``convention=-1`` selects the
    opposite sign ``-i d/dpsi``.
    """
    if not 1e-6 <= eps <= 1e-3:
        raise DomainError("eps must lie in [1e-6, 1e-3]")
    k = np.asarray(getattr(k, "vec", k), dtype=float)
    a = _axis(axis)

    def central(step):
        return (_rotated(s, k, a, step) - _rotated(s, k, a, -step)) / (2.0 * step)

    d = central(eps)
    if richardson:
        d = (4.0 * central(eps / 2) - d) / 3.0
    return convention * 1j * d


def _unit(k):
    return k / np.linalg.norm(k)


class OperatorAlgebra:
    """Finite-difference ``J``, helicity, ``J_s`` and ``J_o`` operators at one step size.

    ``J_s,a = khat_a (khat . J)`` is the candidate spin part and
    ``J_o,a = J_a - J_s,a`` the candidate orbital part.  Derived sections
    are cached per (operator, axis, input) so shared subexpressions are
    evaluated once.
    """

    def __init__(self, eps: float, richardson: bool = False):
        self.eps = eps
        self.richardson = richardson
        self._derived: dict = {}

    def _make(self, key, name, evaluator, s):
        full = (key, id(s))
        if full not in self._derived:
            self._derived[full] = (SectionFn(name, evaluator, s.domain), s)
        return self._derived[full][0]

    def J(self, a, s: SectionFn) -> SectionFn:
        a = _axis(a)
        return self._make(("J", a), f"J{a}[{s.name}]",
                          lambda k: J_total(s, k, a, self.eps, self.richardson), s)

    def helicity(self, s: SectionFn) -> SectionFn:
        def ev(k):
            kh = _unit(k)
            return sum(kh[b] * self.J(b, s)(k) for b in range(3))
        return self._make(("H",), f"H[{s.name}]", ev, s)

    def Js(self, a, s: SectionFn) -> SectionFn:
        a = _axis(a)
        hs = self.helicity(s)
        return self._make(("Js", a), f"Js{a}[{s.name}]", lambda k: _unit(k)[a] * hs(k), s)

    def Jo(self, a, s: SectionFn) -> SectionFn:
        a = _axis(a)
        ja, jsa = self.J(a, s), self.Js(a, s)
        return self._make(("Jo", a), f"Jo{a}[{s.name}]", lambda k: ja(k) - jsa(k), s)


def _levi(a, b):
    """``(c, sign)`` with ``epsilon_abc = sign`` for a != b."""
    c = 3 - a - b
    return c, (1.0 if (a, b, c) in ((0, 1, 2), (1, 2, 0), (2, 0, 1)) else -1.0)


@dataclass(frozen=True)
class CommutatorReport:
    section: str
    point: int
    pair: tuple[str, str]
    relation: str
    residual: float
    fd_step: float
    residual_half: float = float("nan")
    order: float = float("nan")
    status: str = "unchecked"

    @property
    def passed(self) -> bool:
        return self.status in ("converged", "roundoff")


RELATIONS = ("so3", "Lie_1", "Lie_2", "Lie_3")
CYCLIC = ((0, 1), (1, 2), (2, 0))
ORDERED = tuple((a, b) for a, b in itertools.permutations(range(3), 2))


def _relation_residual(relation: str, a: int, b: int, s: SectionFn, k, alg: OperatorAlgebra) -> float:
    c, sign = _levi(a, b)

    def comm(x, y):
        return x(a, y(b, s))(k) - y(b, x(a, s))(k)

    if relation == "so3":
        diff = comm(alg.J, alg.J) - 1j * sign * alg.J(c, s)(k)
    elif relation == "Lie_1":
        diff = comm(alg.Js, alg.Js)
    elif relation == "Lie_2":
        diff = comm(alg.Jo, alg.Js) - 1j * sign * alg.Js(c, s)(k)
    elif relation == "Lie_3":
        diff = comm(alg.Jo, alg.Jo) - 1j * sign * (alg.Jo(c, s)(k) - alg.Js(c, s)(k))
    else:
        raise DomainError(f"unknown relation {relation!r}")
    return float(np.sqrt(np.real(hs_inner(diff, diff))))


def commutator_residuals(s: SectionFn, points, eps: float = 1e-3, min_order: float = 1.8,
                         roundoff_floor: float | None = None,
                         relations=RELATIONS, strict: bool = False) -> list[CommutatorReport]:
    """Residuals of the angular-momentum commutation relations under nested central differences.

    Each residual is evaluated at ``eps`` and ``eps / 2``; the observed order
    is ``log2(r(eps) / r(eps/2))``.  Status is ``converged`` for order >=
    ``min_order``, ``roundoff`` when both residuals already sit below
    ``roundoff_floor``, and ``nonconvergent`` otherwise.  The default floor
    ``10 u / (eps/2)^2`` is the rounding noise of a nested second difference
    with machine epsilon ``u``.  ``strict=True`` raises
    ``NonConvergentError`` instead of returning nonconvergent rows.
    """
    if roundoff_floor is None:
        roundoff_floor = 10.0 * np.finfo(float).eps / (eps / 2) ** 2
    reports = []
    names = "xyz"
    for n, k in enumerate(points):
        k = np.asarray(getattr(k, "vec", k), dtype=float)
        base = s.fresh()
        coarse, fine = OperatorAlgebra(eps), OperatorAlgebra(eps / 2)
        for relation in relations:
            pairs = ORDERED if relation == "Lie_2" else CYCLIC
            for a, b in pairs:
                r1 = _relation_residual(relation, a, b, base, k, coarse)
                r2 = _relation_residual(relation, a, b, base, k, fine)
                order = float(np.log2(r1 / r2)) if r1 > 0 and r2 > 0 else float("inf")
                if max(r1, r2) <= roundoff_floor:
                    status = "roundoff"
                elif order >= min_order:
                    status = "converged"
                else:
                    status = "nonconvergent"
                reports.append(CommutatorReport(s.name, n, (names[a], names[b]), relation,
                                                r1, eps, r2, order, status))
    if strict:
        bad = [r for r in reports if r.status == "nonconvergent"]
        if bad:
            raise NonConvergentError(f"{len(bad)} residuals did not converge, first: {bad[0]}")
    return reports


def commutator_csv(reports: list[CommutatorReport]) -> str:
    buf = io.StringIO()
    cols = ["section", "point", "pair", "relation", "residual", "fd_step",
            "residual_half", "order", "status"]
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for r in reports:
        row = asdict(r)
        row["pair"] = "".join(r.pair)
        writer.writerow([row[c] for c in cols])
    return buf.getvalue()


def _from_angles(fn):
    def ev(k):
        t, p = angles(k)
        return fn(float(t), float(p), _unit(k))
    return ev


def sample_sections() -> list[SectionFn]:
    """Closed-form graviton sections used for the commutator study."""
    plus = lambda t, p: transported(BundleKind.GRAVITON_PLUS, t, p)  # noqa: E731
    minus = lambda t, p: transported(BundleKind.GRAVITON_MINUS, t, p)  # noqa: E731
    return [
        SectionFn("helicity-plus", _from_angles(lambda t, p, kh: plus(t, p))),
        SectionFn("helicity-minus", _from_angles(lambda t, p, kh: minus(t, p))),
        SectionFn("modulated-plus", _from_angles(
            lambda t, p, kh: (1.0 + 0.3 * kh[0] - 0.2 * kh[1] * kh[2]) * plus(t, p))),
        SectionFn("mixed", _from_angles(
            lambda t, p, kh: (0.5 + 0.4 * kh[2]) * plus(t, p) + (0.3 - 0.2j * kh[0]) * minus(t, p))),
        SectionFn("rodrigues-upper", _from_angles(
            lambda t, p, kh: (1.0 + 0.25 * kh[1] ** 2) * _upper(t, p)[0])),
        SectionFn("global-frame-2", _from_angles(lambda t, p, kh: global_frame(t, p)[1])),
        SectionFn("naive-plus", _from_angles(lambda t, p, kh: naive_frame(t, p)[0])),
    ]


def sample_points(n: int = 20, seed: int = 7, margin: float = 0.4) -> np.ndarray:
    """Random unit wavevectors in the band ``margin < theta < pi - margin``."""
    rng = np.random.default_rng(seed)
    z = rng.uniform(np.cos(np.pi - margin), np.cos(margin), size=n)
    phi = rng.uniform(0.0, 2.0 * np.pi, size=n)
    return unit_vector(np.arccos(z), phi)


# -- no stabilizing spin ----------------------------------------------------------

@dataclass(frozen=True)
class SpinFitReport:
    fitted_norm: float
    objective: float
    helicity_generator: np.ndarray = field(repr=False)
    helicity_norm: float = 0.0
    helicity_so3_residual: float = 0.0
    solutions: int = 0
    largest_solution_norm: float = 0.0


_CHECK_AXES = (np.array([1.0, 0, 0]), np.array([0, 1.0, 0]), np.array([0, 0, 1.0]),
               np.array([1.0, 1.0, 1.0]) / np.sqrt(3.0), np.array([1.0, -2.0, 0.5]) / np.sqrt(5.25))


def _hermitian_triple(x) -> np.ndarray:
    x = np.asarray(x).reshape(3, 4)
    out = np.empty((3, 2, 2), dtype=complex)
    out[:, 0, 0] = x[:, 0]
    out[:, 1, 1] = x[:, 1]
    out[:, 0, 1] = x[:, 2] + 1j * x[:, 3]
    out[:, 1, 0] = x[:, 2] - 1j * x[:, 3]
    return out


def _spin_residuals(x) -> np.ndarray:
    s = _hermitian_triple(x)
    res = []
    for a, b in CYCLIC:
        c, sign = _levi(a, b)
        res.append(s[a] @ s[b] - s[b] @ s[a] - 1j * sign * s[c])
    # a genuine (non-projective) SO(3) action returns to the identity after 2 pi
    for n in _CHECK_AXES:
        gen = np.einsum("a,aij->ij", n, s)
        res.append(expm(-2j * np.pi * gen) - np.eye(2))
    r = np.concatenate([m.ravel() for m in res])
    return np.concatenate([r.real, r.imag])


def helicity_generator(k, eps: float = 1e-4) -> np.ndarray:
    """Generator of rotations fixing ``k`` on the fiber, in the helicity basis (fitted numerically)."""
    k = np.asarray(getattr(k, "vec", k), dtype=float)
    t, p = angles(k)
    basis = transported(BundleKind.GRAVITON_TOTAL, t, p)
    kh = _unit(k)

    def action(psi):
        r = axis_rotation(kh, psi)
        moved = r @ basis @ r.T
        return hs_inner(basis[:, None], moved[None, :])

    return 1j * (action(eps) - action(-eps)) / (2 * eps)


def fit_stabilizing_spin(k, starts: int = 12, seed: int = 3, solution_tol: float = 1e-12) -> SpinFitReport:
    """Least-squares search for a 2x2 Hermitian triple generating an SO(3) action on one fiber.

    Starts include the measured helicity generator placed along ``k``, a
    spin-1/2 triple, and random triples.  Every start whose objective drops
    below ``solution_tol`` is a solution; the report carries the largest
    solution norm (zero for the trivial action only).
    """
    k = np.asarray(getattr(k, "vec", k), dtype=float)
    kh = _unit(k)
    hgen = helicity_generator(k)
    rng = np.random.default_rng(seed)

    def pack(triple):
        triple = np.asarray(triple)
        return np.stack([triple[:, 0, 0].real, triple[:, 1, 1].real,
                         triple[:, 0, 1].real, triple[:, 0, 1].imag], axis=1).ravel()

    pauli = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]]) / 2
    seeds = [pack(np.einsum("a,ij->aij", kh, hgen)), pack(pauli)]
    scales = np.geomspace(0.02, 1.0, max(0, starts - 2))
    seeds += [rng.normal(scale=sc, size=12) for sc in scales]

    best, best_x, sols = np.inf, None, []
    for x0 in seeds:
        fit = least_squares(_spin_residuals, x0, method="lm", xtol=1e-15, ftol=1e-15,
                            gtol=1e-15, max_nfev=4000)
        obj = float(np.sum(fit.fun**2))
        norm = float(np.linalg.norm(_hermitian_triple(fit.x)))
        if obj < solution_tol:
            sols.append(norm)
        if obj < best:
            best, best_x = obj, fit.x
    hel_triple = np.einsum("a,ij->aij", kh, hgen)
    hel_res = float(np.sqrt(np.sum(_spin_residuals(pack(hel_triple))[:24] ** 2)))
    return SpinFitReport(
        fitted_norm=float(np.linalg.norm(_hermitian_triple(best_x))),
        objective=best,
        helicity_generator=hgen,
        helicity_norm=float(np.linalg.norm(hgen)),
        helicity_so3_residual=hel_res,
        solutions=len(sols),
        largest_solution_norm=max(sols) if sols else float("nan"),
    )
