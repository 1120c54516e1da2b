"""Residual checks for the algebraic identities of the induced structure.

Every check samples points and tangent vectors, evaluates ``LHS - RHS`` of
one identity, and reports the worst residual.  Residuals are sup-norms
divided by ``max(1, |LHS|, |RHS|, operand size)``, where the operand size
is ``|X|`` for identities linear in a tangent ``X`` and ``|X||Y|`` for the
bilinear ones, so one tolerance works across radii and tangent lengths.

Seeding
-------
Point ``i`` of case ``c`` in stream ``s`` draws from
``np.random.default_rng(np.random.SeedSequence([seed, c, i, s]))``: the
point first, then the tangents.  ``SeedSequence`` hashes the entropy list,
so streams do not depend on how a grid is partitioned, and a single
point can be regenerated from its ``worst_case`` record.  Streams are
``0`` for the hypersphere and ``1`` for the product of spheres.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence

import numpy as np

from . import closed_form
from .config import CaseSpec, SuiteConfig
from .errors import InvalidInputError
from .geometry import AmbientStructure, BlockSwap
from .induction import InducedStructure, chain_induce, check_nesting, induce_at_point, perturb, structure_differences
from .submanifolds import Hypersphere, ManifoldPoint, ProductOfSpheres, Submanifold

CODIM1_IDS = ("2.2.i", "2.2.ii", "2.2.iii", "2.2.iv", "2.3.i", "2.3.ii", "2.3.iii")
CODIM2_IDS = (
    "2.6.i", "2.6.ii", "2.6.iii", "2.6.iv", "2.6.v", "2.6.vi", "2.6.vii", "2.6.viii", "2.6.ix",
    "2.7.i", "2.7.ii", "2.7.iii", "2.7.iv",
)
THEOREM_ID = "thm2.1"
SPHERE_FORM_IDS = ("sphere.a", "sphere.xi", "sphere.u", "sphere.P")
PRODUCT_FORM_IDS = ("product.a", "product.xi1", "product.xi2", "product.u1", "product.u2", "product.P")

SPHERE_STREAM = 0
PRODUCT_STREAM = 1
DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class Fault:
    """A deliberate perturbation of one computed component, see :func:`perturb`."""

    component: str
    delta: float
    index: int = 0


@dataclass
class IdentityReport:
    identity_id: str
    samples: int
    max_residual: float
    tolerance: float
    passed: bool
    worst_case: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "identity_id": self.identity_id,
            "samples": self.samples,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "worst_case": dict(self.worst_case),
        }


def point_rng(seed: int, case_index: int, point_index: int, stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, case_index, point_index, stream]))


@dataclass
class Sample:
    """Points ``(n, m)`` and tangents ``(n, k, m)`` with their seed bookkeeping."""

    points: ManifoldPoint
    tangents: np.ndarray
    seed: int
    case_index: int
    stream: int
    point_indices: np.ndarray


def draw_sample(sub: Submanifold, n_points: int, n_tangents: int, seed: int, case_index: int = 0,
                stream: int = 0, point_indices: Optional[Sequence[int]] = None) -> Sample:
    idx = np.arange(n_points) if point_indices is None else np.asarray(point_indices, dtype=int)
    coords = np.empty((len(idx), sub.m))
    tangents = np.empty((len(idx), n_tangents, sub.m))
    for row, i in enumerate(idx):
        rng = point_rng(seed, case_index, int(i), stream)
        coords[row] = sub.draw_coords(rng)
        tangents[row] = sub.draw_tangents(coords[row], rng, n_tangents)
    return Sample(sub.point(coords), tangents, seed, case_index, stream, idx)


def _sup(v: np.ndarray) -> np.ndarray:
    return np.max(np.abs(v), axis=-1)


def _vec_res(lhs: np.ndarray, rhs: np.ndarray, scale=1.0) -> np.ndarray:
    """``scale`` carries the size of tangent operands (``|X|`` or ``|X||Y|``)."""
    return _sup(lhs - rhs) / np.maximum(np.maximum(1.0, scale), np.maximum(_sup(lhs), _sup(rhs)))


def _sc_res(lhs, rhs, scale=1.0) -> np.ndarray:
    lhs, rhs = np.broadcast_arrays(lhs, rhs)
    return np.abs(lhs - rhs) / np.maximum(np.maximum(1.0, scale), np.maximum(np.abs(lhs), np.abs(rhs)))


def _norm(v: np.ndarray) -> np.ndarray:
    return np.sqrt(np.einsum("...m,...m->...", v, v))


def _dot(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return np.einsum("...m,...m->...", u, v)


def _report(identity_id: str, res: np.ndarray, tol: float, sample: Sample) -> IdentityReport:
    """``res`` is ``(n,)`` for point identities or ``(n, k)`` for tangent ones."""
    if res.size == 0:
        return IdentityReport(identity_id, 0, 0.0, tol, True, {})
    flat = int(np.argmax(res))  # first occurrence on ties: lowest sample index
    worst = {"seed": sample.seed, "case_index": sample.case_index, "stream": sample.stream}
    if res.ndim == 1:
        worst["point_index"] = int(sample.point_indices[flat])
        worst["tangent_index"] = None
    else:
        pi, ti = np.unravel_index(flat, res.shape)
        worst["point_index"] = int(sample.point_indices[pi])
        worst["tangent_index"] = int(ti)
    mx = float(res.flat[flat])
    return IdentityReport(identity_id, int(res.size), mx, tol, bool(mx <= tol), worst)


def _tol(tol, identity_id: str) -> float:
    if isinstance(tol, dict):
        return tol.get(identity_id, tol.get("default", DEFAULT_TOL))
    return float(tol)


def _partner(X: np.ndarray) -> np.ndarray:
    return np.roll(X, -1, axis=-2)


def _fault_direction(sample: Sample) -> np.ndarray:
    t = sample.tangents[:, 0, :]
    return t / np.linalg.norm(t, axis=-1, keepdims=True)


def _apply_fault(st: InducedStructure, fault: Optional[Fault], sample: Sample) -> InducedStructure:
    if fault is None:
        return st
    return perturb(st, fault.component, fault.delta, _fault_direction(sample), fault.index)


def _require_product_structure(s: AmbientStructure):
    if s.epsilon != 1:
        raise InvalidInputError("identity checks are defined for structures with P^2 = +Id only")


def codim1_residuals(st: InducedStructure, X: np.ndarray) -> dict[str, np.ndarray]:
    """Residuals of the seven hypersurface identities at a batch of points."""
    Y = _partner(X)
    nX = _norm(X)
    nXY = nX * _norm(Y)
    xi = st.xi[..., 0, :]
    a = st.a[..., 0, 0]
    u = st.u(X)[..., 0]
    uY = st.u(Y)[..., 0]
    PX, PY = st.P(X), st.P(Y)
    rhs_i = X - u[..., None] * xi[..., None, :]
    return {
        "2.2.i": _vec_res(st.P(PX), rhs_i, nX),
        "2.2.ii": _sc_res(st.u(PX)[..., 0], -a[..., None] * u, nX),
        "2.2.iii": _sc_res(st.u(xi)[..., 0], 1.0 - a ** 2),
        "2.2.iv": _vec_res(st.P(xi), -a[..., None] * xi),
        "2.3.i": _sc_res(u, _dot(X, xi[..., None, :]), nX),
        "2.3.ii": _sc_res(_dot(PX, Y), _dot(X, PY), nXY),
        "2.3.iii": _sc_res(_dot(PX, PY), _dot(X, Y) - u * uY, nXY),
    }


def codim2_residuals(st: InducedStructure, X: np.ndarray) -> dict[str, np.ndarray]:
    """Residuals of the thirteen codimension-two identities."""
    Y = _partner(X)
    nX = _norm(X)
    nXY = nX * _norm(Y)
    xi1, xi2 = st.xi[..., 0, :], st.xi[..., 1, :]
    a = st.a
    a11, a12, a21, a22 = a[..., 0, 0], a[..., 0, 1], a[..., 1, 0], a[..., 1, 1]
    uX, uY = st.u(X), st.u(Y)
    u1, u2 = uX[..., 0], uX[..., 1]
    PX, PY = st.P(X), st.P(Y)
    uPX = st.u(PX)
    uxi1, uxi2 = st.u(xi1), st.u(xi2)
    col = lambda c: c[..., None]  # noqa: E731
    return {
        "2.6.i": _vec_res(st.P(PX), X - col(u1) * xi1[..., None, :] - col(u2) * xi2[..., None, :], nX),
        "2.6.ii": _sc_res(uPX[..., 0], -col(a11) * u1 - col(a12) * u2, nX),
        "2.6.iii": _sc_res(uPX[..., 1], -col(a21) * u1 - col(a22) * u2, nX),
        "2.6.iv": _sc_res(uxi1[..., 0], 1.0 - a11 ** 2 - a12 ** 2),
        "2.6.v": _sc_res(uxi1[..., 1], -a11 * a12 - a12 * a22),
        "2.6.vi": _sc_res(uxi2[..., 0], -a11 * a12 - a12 * a22),
        "2.6.vii": _sc_res(uxi2[..., 1], 1.0 - a12 ** 2 - a22 ** 2),
        "2.6.viii": _vec_res(st.P(xi1), -col(a11) * xi1 - col(a12) * xi2),
        "2.6.ix": _vec_res(st.P(xi2), -col(a12) * xi1 - col(a22) * xi2),
        "2.7.i": _sc_res(u1, _dot(X, xi1[..., None, :]), nX),
        "2.7.ii": _sc_res(u2, _dot(X, xi2[..., None, :]), nX),
        "2.7.iii": _sc_res(_dot(PX, Y), _dot(X, PY), nXY),
        "2.7.iv": _sc_res(_dot(PX, PY), _dot(X, Y) - u1 * uY[..., 0] - u2 * uY[..., 1], nXY),
    }


def check_codim1(s: AmbientStructure, sph: Hypersphere, n_points: int = 100, n_tangents: int = 8,
                 seed: int = 0, tol=DEFAULT_TOL, *, case_index: int = 0, fault: Optional[Fault] = None,
                 point_indices: Optional[Sequence[int]] = None,
                 sample: Optional[Sample] = None) -> list[IdentityReport]:
    """Seven reports, one per hypersurface identity, in :data:`CODIM1_IDS` order.

    A precomputed ``sample`` (from :func:`draw_sample`) replaces the sampling
    arguments.
    """
    _require_product_structure(s)
    if sample is None:
        sample = draw_sample(sph, n_points, n_tangents, seed, case_index, SPHERE_STREAM, point_indices)
    st = _apply_fault(induce_at_point(s, sph, sample.points), fault, sample)
    res = codim1_residuals(st, sample.tangents)
    return [_report(i, res[i], _tol(tol, i), sample) for i in CODIM1_IDS]


def check_codim2(s: AmbientStructure, prod: ProductOfSpheres, n_points: int = 100, n_tangents: int = 8,
                 seed: int = 0, tol=DEFAULT_TOL, *, case_index: int = 0, fault: Optional[Fault] = None,
                 route: str = "direct", point_indices: Optional[Sequence[int]] = None,
                 sample: Optional[Sample] = None) -> list[IdentityReport]:
    """Thirteen reports in :data:`CODIM2_IDS` order.

    ``route="chain"`` checks the structure built through the enclosing
    hypersphere instead of the direct one.
    """
    _require_product_structure(s)
    if sample is None:
        sample = draw_sample(prod, n_points, n_tangents, seed, case_index, PRODUCT_STREAM, point_indices)
    if route == "direct":
        st = induce_at_point(s, prod, sample.points)
    elif route == "chain":
        st = chain_induce(s, prod.enclosing_sphere(), prod, sample.points)
    else:
        raise InvalidInputError(f"route must be 'direct' or 'chain', got {route!r}")
    st = _apply_fault(st, fault, sample)
    res = codim2_residuals(st, sample.tangents)
    return [_report(i, res[i], _tol(tol, i), sample) for i in CODIM2_IDS]


def check_theorem_chain(s: AmbientStructure, outer: Hypersphere, inner: ProductOfSpheres, n_points: int = 100,
                        seed: int = 0, tol=DEFAULT_TOL, *, n_probes: int = 8, case_index: int = 0,
                        include_xi1_perp: bool = True,
                        point_indices: Optional[Sequence[int]] = None,
                        sample: Optional[Sample] = None) -> IdentityReport:
    """Direct and chained induction must give the same structure.

    The residual at a point is the largest of the ``a``, ``xi``, ``P X`` and
    ``u(X)`` discrepancies over ``n_probes`` tangent probes.
    """
    check_nesting(outer, inner)
    if sample is None:
        sample = draw_sample(inner, n_points, n_probes, seed, case_index, PRODUCT_STREAM, point_indices)
    direct = induce_at_point(s, inner, sample.points)
    chained = chain_induce(s, outer, inner, sample.points, include_xi1_perp=include_xi1_perp)
    diffs = structure_differences(direct, chained, sample.tangents)
    res = np.max(np.stack(list(diffs.values()), axis=-1), axis=-1)
    return _report(THEOREM_ID, res, _tol(tol, THEOREM_ID), sample)


def closed_form_residuals_sphere(s: BlockSwap, sph: Hypersphere, sample: Sample) -> dict[str, np.ndarray]:
    st = induce_at_point(s, sph, sample.points)
    X = sample.tangents
    a11, xi1 = closed_form.example1_structure(s, sph, sample.points)
    u1, PX = closed_form.example1_u_and_P(s, sph, sample.points, X)
    return {
        "sphere.a": _sc_res(a11, st.a[..., 0, 0]),
        "sphere.xi": _vec_res(xi1, st.xi[..., 0, :]),
        "sphere.u": _sc_res(u1, st.u(X)[..., 0], _norm(X)),
        "sphere.P": _vec_res(PX, st.P(X), _norm(X)),
    }


def closed_form_residuals_product(s: BlockSwap, prod: ProductOfSpheres, sample: Sample) -> dict[str, np.ndarray]:
    st = induce_at_point(s, prod, sample.points)
    X = sample.tangents
    a, xi1, xi2 = closed_form.example2_structure(s, prod, sample.points)
    u1, u2, PX = closed_form.example2_u_and_P(s, prod, sample.points, X)
    uX = st.u(X)
    return {
        "product.a": np.max(_sc_res(a, st.a), axis=(-2, -1)),
        "product.xi1": _vec_res(xi1, st.xi[..., 0, :]),
        "product.xi2": _vec_res(xi2, st.xi[..., 1, :]),
        "product.u1": _sc_res(u1, uX[..., 0], _norm(X)),
        "product.u2": _sc_res(u2, uX[..., 1], _norm(X)),
        "product.P": _vec_res(PX, st.P(X), _norm(X)),
    }


def check_closed_forms(s: BlockSwap, sph: Hypersphere, prod: Optional[ProductOfSpheres], n_points: int = 100,
                       n_tangents: int = 8, seed: int = 0, tol=DEFAULT_TOL, *,
                       case_index: int = 0, samples: Optional[tuple[Sample, Optional[Sample]]] = None
                       ) -> list[IdentityReport]:
    """Closed forms against the generic engine on the same samples as the identity checks.

    The product comparison is skipped when ``prod`` is None or the ``eps``
    signs are mixed (the closed forms assume a single sign).
    """
    sph_sample, prod_sample = samples if samples is not None else (None, None)
    sample = sph_sample or draw_sample(sph, n_points, n_tangents, seed, case_index, SPHERE_STREAM)
    res = closed_form_residuals_sphere(s, sph, sample)
    reports = [_report(i, res[i], _tol(tol, i), sample) for i in SPHERE_FORM_IDS]
    if prod is not None and len(set(s.eps)) == 1:
        sample = prod_sample or draw_sample(prod, n_points, n_tangents, seed, case_index, PRODUCT_STREAM)
        res = closed_form_residuals_product(s, prod, sample)
        reports += [_report(i, res[i], _tol(tol, i), sample) for i in PRODUCT_FORM_IDS]
    return reports


def random_case(rng: np.random.Generator, *, single_eps: bool = False,
                radius_range: tuple[float, float] = (0.5, 3.0)) -> CaseSpec:
    """Random block-swap configuration with radii drawn uniformly from ``radius_range``."""
    p = int(rng.integers(1, 4))
    q = int(rng.integers(2, 5))
    nu = tuple(int(v) for v in rng.choice([-1, 1], size=p))
    if single_eps:
        eps = (int(rng.choice([-1, 1])),) * q
    else:
        eps = tuple(int(v) for v in rng.choice([-1, 1], size=q))
    r, r3 = (float(v) for v in rng.uniform(*radius_range, size=2))
    return CaseSpec(p, q, nu, eps, r, r3)


def check_closed_forms_random(n_triples: int = 1000, seed: int = 0, tol=DEFAULT_TOL) -> list[IdentityReport]:
    """Closed forms against the engine over random (configuration, point, tangent) triples.

    Triple ``i`` uses ``point_rng(seed, i, 0, stream)`` to draw its
    configuration, point and tangent; the product triples use ``eps_j`` of
    a single sign.
    """
    rows: dict[str, list[float]] = {i: [] for i in SPHERE_FORM_IDS + PRODUCT_FORM_IDS}
    for i in range(n_triples):
        rng = point_rng(seed, i, 0, SPHERE_STREAM)
        case = random_case(rng)
        s = BlockSwap(case.p, case.q, case.nu, case.eps)
        sph = Hypersphere(s.m, case.R)
        sample = _one(sph, rng, seed, i, SPHERE_STREAM)
        for k, v in closed_form_residuals_sphere(s, sph, sample).items():
            rows[k].append(float(np.max(v)))

        rng = point_rng(seed, i, 0, PRODUCT_STREAM)
        case = random_case(rng, single_eps=True)
        s = BlockSwap(case.p, case.q, case.nu, case.eps)
        prod = ProductOfSpheres(case.p, case.q, case.r, case.r3)
        sample = _one(prod, rng, seed, i, PRODUCT_STREAM)
        for k, v in closed_form_residuals_product(s, prod, sample).items():
            rows[k].append(float(np.max(v)))

    reports = []
    for ident, vals in rows.items():
        arr = np.asarray(vals)
        t = _tol(tol, ident)
        if arr.size == 0:
            reports.append(IdentityReport(ident, 0, 0.0, t, True, {}))
            continue
        worst = int(np.argmax(arr))
        stream = PRODUCT_STREAM if ident.startswith("product") else SPHERE_STREAM
        mx = float(arr[worst])
        reports.append(IdentityReport(ident, int(arr.size), mx, t, mx <= t,
                                      {"seed": seed, "triple_index": worst, "stream": stream}))
    return reports


def _one(sub: Submanifold, rng: np.random.Generator, seed: int, index: int, stream: int) -> Sample:
    pt = sub.sample_point(rng)
    tangents = sub.sample_tangents(pt, rng, 1)
    return Sample(sub.point(pt.coords[None, :]), tangents[None], seed, index, stream, np.array([0]))


@dataclass
class CaseReport:
    case_index: int
    descriptor: dict[str, Any]
    reports: list[IdentityReport]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)


@dataclass
class SuiteReport:
    seed: int
    cases: list[CaseReport]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    def failures(self) -> list[tuple[int, IdentityReport]]:
        return [(c.case_index, r) for c in self.cases for r in c.reports if not r.passed]


def run_case(case: CaseSpec, case_index: int, seed: int, n_points: int, n_tangents: int,
             tolerance: Callable[[str], float]) -> CaseReport:
    s = BlockSwap(case.p, case.q, case.nu, case.eps)
    prod = ProductOfSpheres(case.p, case.q, case.r, case.r3)
    sph = prod.enclosing_sphere()
    tol = {i: tolerance(i) for i in CODIM1_IDS + CODIM2_IDS + (THEOREM_ID,) + SPHERE_FORM_IDS + PRODUCT_FORM_IDS}
    on_sphere = draw_sample(sph, n_points, n_tangents, seed, case_index, SPHERE_STREAM)
    on_product = draw_sample(prod, n_points, n_tangents, seed, case_index, PRODUCT_STREAM)
    reports = check_codim1(s, sph, tol=tol, sample=on_sphere)
    reports += check_codim2(s, prod, tol=tol, sample=on_product)
    reports.append(check_theorem_chain(s, sph, prod, tol=tol, sample=on_product))
    reports += check_closed_forms(s, sph, prod, tol=tol, samples=(on_sphere, on_product))
    return CaseReport(case_index, case.descriptor(), reports)


def run_full_suite(config: SuiteConfig) -> SuiteReport:
    """Run every case of ``config``; deterministic given the seed."""
    cases = [
        run_case(case, i, config.seed, config.n_points, config.n_tangents, config.tolerance)
        for i, case in enumerate(config.cases)
    ]
    return SuiteReport(config.seed, cases)
