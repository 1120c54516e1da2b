"""Tangential/normal decomposition of the ambient structure on a submanifold.

For a submanifold with orthonormal normals ``N_1..N_r`` and tangent ``X``::

    P~ X   = P X  + sum_a u_a(X) N_a
    P~ N_a = eps xi_a + sum_b a_ab N_b

:func:`induce_at_point` reads these off directly in the ambient space.
:func:`chain_induce` gets the same data in two codimension-one steps,
passing through the enclosing hypersphere.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InvalidInputError
from .geometry import AmbientStructure
from .submanifolds import (
    DEFAULT_MEMBERSHIP_TOL,
    Hypersphere,
    ManifoldPoint,
    ProductOfSpheres,
    Submanifold,
    TangentVector,
    project_onto_tangent,
)

DEFAULT_PROBES = 8


def _coeffs(v: np.ndarray, frame: np.ndarray, point_ndim: int) -> np.ndarray:
    if v.ndim == point_ndim:
        return np.einsum("...m,...rm->...r", v, frame)
    return np.einsum("...km,...rm->...kr", v, frame)


@dataclass(frozen=True, eq=False)
class InducedStructure:
    """Induced data at a point (or a batch of points).

    ``xi`` and ``a`` are materialised; ``P`` and ``u`` are kept as actions
    so that each construction route evaluates them its own way.
    """

    base: ManifoldPoint
    frame: np.ndarray
    xi: np.ndarray
    a: np.ndarray
    epsilon: int
    P_action: Callable[[np.ndarray], np.ndarray] = dataclasses.field(repr=False)
    u_action: Callable[[np.ndarray], np.ndarray] = dataclasses.field(repr=False)

    @property
    def codim(self) -> int:
        return self.frame.shape[-2]

    def _vectors(self, X) -> np.ndarray:
        if isinstance(X, TangentVector):
            if X.base is not self.base and not np.array_equal(X.base.coords, self.base.coords):
                raise InvalidInputError("tangent vector is based at a different point")
            X = X.coords
        X = np.asarray(X, dtype=float)
        if X.shape[-1] != self.frame.shape[-1]:
            raise InvalidInputError(f"expected vectors of dimension {self.frame.shape[-1]}, got {X.shape}")
        return X

    def P(self, X) -> np.ndarray:
        return self.P_action(self._vectors(X))

    def u(self, X) -> np.ndarray:
        """1-forms evaluated on ``X``; last axis indexes ``alpha``."""
        return self.u_action(self._vectors(X))


def induce_at_point(s: AmbientStructure, sub: Submanifold, pt) -> InducedStructure:
    """Decompose ``P~ X`` and ``P~ N_a`` directly against the full frame."""
    if s.m != sub.m:
        raise InvalidInputError(f"structure acts on E^{s.m}, submanifold lives in E^{sub.m}")
    if not isinstance(pt, ManifoldPoint):
        pt = sub.point(pt)
    frame = sub.normal_frame(pt)
    nd = pt.coords.ndim
    PN = s.apply(frame)
    a = np.einsum("...am,...bm->...ab", PN, frame)
    xi = s.epsilon * (PN - np.einsum("...ab,...bm->...am", a, frame))

    def P_action(X):
        return project_onto_tangent(frame, s.apply(X), nd)

    def u_action(X):
        return _coeffs(s.apply(X), frame, nd)

    return InducedStructure(pt, frame, xi, a, s.epsilon, P_action, u_action)


def check_nesting(outer: Hypersphere, inner: ProductOfSpheres, tol: float = DEFAULT_MEMBERSHIP_TOL):
    """Require ``r^2 + r3^2 = R^2`` (relative to ``R^2``) and a shared ambient space."""
    if outer.m != inner.m:
        raise InvalidInputError(f"outer lives in E^{outer.m}, inner in E^{inner.m}")
    if abs(inner.r ** 2 + inner.r3 ** 2 - outer.R ** 2) > tol * outer.R ** 2:
        raise InvalidInputError(
            f"inner is not nested in outer: r^2 + r3^2 = {inner.r ** 2 + inner.r3 ** 2!r} != R^2 = {outer.R ** 2!r}"
        )


def chain_induce(
    s: AmbientStructure,
    outer: Hypersphere,
    inner: ProductOfSpheres,
    pt,
    *,
    include_xi1_perp: bool = True,
    nesting_tol: float = DEFAULT_MEMBERSHIP_TOL,
) -> InducedStructure:
    """Induce on ``inner`` through the intermediate hypersurface ``outer``.

    Step one decomposes against ``N_1`` on the sphere; step two decomposes
    the sphere's structure against ``N_2`` inside the sphere.  ``a_12`` comes
    from the ``N_2`` component of the sphere's ``xi_1`` while ``a_21`` is the
    sphere's ``u_1`` evaluated on ``N_2``; they are not forced equal.

    ``include_xi1_perp=False`` drops the ``N_2`` component of ``xi_1`` and is
    only meant for fault injection.
    """
    if s.m != inner.m:
        raise InvalidInputError(f"structure acts on E^{s.m}, submanifold lives in E^{inner.m}")
    check_nesting(outer, inner, nesting_tol)
    if not isinstance(pt, ManifoldPoint):
        pt = inner.point(pt)
    inner_frame = inner.normal_frame(pt)
    outer_pt = outer.point(pt.coords, tol=max(nesting_tol, DEFAULT_MEMBERSHIP_TOL))
    n1 = outer.normal_frame(outer_pt)[..., 0, :]
    n2 = inner_frame[..., 1, :]
    eps = s.epsilon
    nd = pt.coords.ndim

    def dot(u, v):
        return np.einsum("...m,...m->...", u, v)

    # hypersphere step
    PN1 = s.apply(n1)
    a11 = dot(PN1, n1)
    xi_bar = eps * (PN1 - a11[..., None] * n1)

    def u1(X):
        n1b = n1 if X.ndim == nd else n1[..., None, :]
        return np.einsum("...m,...m->...", s.apply(X), n1b)

    def P_bar(X):
        n1b = n1 if X.ndim == nd else n1[..., None, :]
        PX = s.apply(X)
        return PX - np.einsum("...m,...m->...", PX, n1b)[..., None] * n1b

    # step inside the hypersphere
    PbarN2 = P_bar(n2)
    a22 = dot(PbarN2, n2)
    xi2 = eps * (PbarN2 - a22[..., None] * n2)
    a21 = u1(n2)
    xi_bar_n2 = dot(xi_bar, n2)
    if include_xi1_perp:
        a12 = eps * xi_bar_n2
        xi1 = xi_bar - xi_bar_n2[..., None] * n2
    else:
        a12 = np.zeros_like(a11)
        xi1 = xi_bar

    a = np.stack([np.stack([a11, a12], -1), np.stack([a21, a22], -1)], -2)
    xi = np.stack([xi1, xi2], -2)
    frame = np.stack([n1, n2], -2)

    def P_action(X):
        n2b = n2 if X.ndim == nd else n2[..., None, :]
        PbX = P_bar(X)
        return PbX - np.einsum("...m,...m->...", PbX, n2b)[..., None] * n2b

    def u_action(X):
        n2b = n2 if X.ndim == nd else n2[..., None, :]
        return np.stack([u1(X), np.einsum("...m,...m->...", P_bar(X), n2b)], -1)

    return InducedStructure(pt, frame, xi, a, eps, P_action, u_action)


def apply_induced_P(st: InducedStructure, X) -> np.ndarray:
    return st.P(X)


def evaluate_u(st: InducedStructure, X) -> np.ndarray:
    return st.u(X)


def _same_base(lhs: InducedStructure, rhs: InducedStructure) -> bool:
    a, b = lhs.base.coords, rhs.base.coords
    if a.shape != b.shape:
        return False
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    return bool(np.all(np.abs(a - b) <= 1e-12 * scale))


def structure_differences(lhs: InducedStructure, rhs: InducedStructure, probes) -> dict[str, np.ndarray]:
    """Componentwise sup-norm differences, reduced over all but the batch axes."""
    if lhs.codim != rhs.codim:
        raise InvalidInputError(f"codimension mismatch: {lhs.codim} vs {rhs.codim}")
    if not _same_base(lhs, rhs):
        raise InvalidInputError("structures are based at different points")
    probes = probes.coords if isinstance(probes, TangentVector) else np.asarray(probes, dtype=float)
    nb = lhs.base.coords.ndim - 1
    if probes.ndim == nb + 1:
        probes = probes[..., None, :]

    def reduce(x, keep):
        axes = tuple(range(keep, x.ndim))
        return np.max(np.abs(x), axis=axes) if axes else np.abs(x)

    return {
        "a": reduce(lhs.a - rhs.a, nb),
        "xi": reduce(lhs.xi - rhs.xi, nb),
        "P": reduce(lhs.P_action(probes) - rhs.P_action(probes), nb),
        "u": reduce(lhs.u_action(probes) - rhs.u_action(probes), nb),
    }


def compare_structures(lhs: InducedStructure, rhs: InducedStructure, probes) -> float:
    """Largest discrepancy in ``a``, ``xi``, ``P X`` and ``u(X)`` over the probes."""
    diffs = structure_differences(lhs, rhs, probes)
    return float(max(np.max(v) if np.size(v) else 0.0 for v in diffs.values()))


COMPONENTS = ("a", "xi", "P", "u")


def perturb(st: InducedStructure, component: str, delta: float, direction=None, index: int = 0) -> InducedStructure:
    """Copy of ``st`` with one component shifted by ``delta``.

    ``a``  : entry ``(index, index)`` gets ``+delta``.
    ``xi`` : ``xi_index`` gets ``+delta * direction``.
    ``P``  : ``P X`` gets ``+delta <X, e> e`` with ``e = direction``.
    ``u``  : ``u_index(X)`` gets ``+delta <X, e>``.

    ``direction`` should be a unit tangent vector (per batch point).
    """
    if component not in COMPONENTS:
        raise InvalidInputError(f"unknown component {component!r}; expected one of {COMPONENTS}")
    if component == "a":
        a = st.a.copy()
        a[..., index, index] += delta
        return dataclasses.replace(st, a=a)
    if direction is None:
        raise InvalidInputError(f"perturbing {component!r} needs a direction")
    e = np.asarray(direction, dtype=float)
    nd = st.base.coords.ndim
    if component == "xi":
        xi = st.xi.copy()
        xi[..., index, :] += delta * e
        return dataclasses.replace(st, xi=xi)

    def along(X):
        eb = e if X.ndim == nd else e[..., None, :]
        return np.einsum("...m,...m->...", X, eb), eb

    if component == "P":
        base_P = st.P_action

        def P_action(X):
            c, eb = along(X)
            return base_P(X) + delta * c[..., None] * eb

        return dataclasses.replace(st, P_action=P_action)

    base_u = st.u_action

    def u_action(X):
        out = base_u(X).copy()
        out[..., index] += delta * along(X)[0]
        return out

    return dataclasses.replace(st, u_action=u_action)

