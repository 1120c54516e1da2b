"""Explicit formulas for the block-swap structure on spheres.

These are written out coordinate by coordinate, without projections or
frames, so they can serve as oracles for :mod:`afstruct.induction`.

Notation at a point ``(x, y, z)`` with tangent ``(X, Y, Z)``::

    sigma = sum nu_i x^i y^i            tau = sum eps_j (z^j)^2
    gamma = sum nu_i (x^i Y^i + y^i X^i) mu = sum eps_j z^j Z^j
    r1^2 = |x|^2, r2^2 = |y|^2, r3^2 = |z|^2, r^2 = r1^2 + r2^2, R^2 = r^2 + r3^2

On the sphere the 1-form is ``u_1(X) = (gamma + mu) / R``; it is linear in
``X``, so anything containing ``tau`` in its place is wrong.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidInputError
from .geometry import BlockSwap
from .submanifolds import DEFAULT_MEMBERSHIP_TOL, Hypersphere, ManifoldPoint, ProductOfSpheres, TangentVector

RADIUS_AGREEMENT_TOL = 1e-10


@dataclass(frozen=True)
class PointInvariants:
    sigma: np.ndarray
    tau: np.ndarray
    r1sq: np.ndarray
    r2sq: np.ndarray
    r3sq: np.ndarray

    @property
    def rsq(self) -> np.ndarray:
        return self.r1sq + self.r2sq

    @property
    def Rsq(self) -> np.ndarray:
        return self.rsq + self.r3sq


@dataclass(frozen=True)
class TangentInvariants:
    gamma: np.ndarray
    mu: np.ndarray


def _blocks(s: BlockSwap, v: np.ndarray):
    p = s.p
    return v[..., :p], v[..., p:2 * p], v[..., 2 * p:]


def _coords(v, m: int) -> np.ndarray:
    if isinstance(v, (ManifoldPoint, TangentVector)):
        v = v.coords
    v = np.asarray(v, dtype=float)
    if v.ndim == 0 or v.shape[-1] != m:
        raise InvalidInputError(f"expected coordinates of dimension {m}, got shape {v.shape}")
    return v


def invariants(s: BlockSwap, pt, X=None) -> tuple[PointInvariants, Optional[TangentInvariants]]:
    """Scalar invariants at ``pt`` and, if given, along ``X``.

    ``X`` may carry one extra axis (several tangents per point).
    """
    if not isinstance(s, BlockSwap):
        raise InvalidInputError("closed forms are only available for BlockSwap structures")
    coords = _coords(pt, s.m)
    nu = np.asarray(s.nu, dtype=float)
    eps = np.asarray(s.eps, dtype=float)
    x, y, z = _blocks(s, coords)
    pinv = PointInvariants(
        sigma=np.sum(nu * x * y, axis=-1),
        tau=np.sum(eps * z * z, axis=-1),
        r1sq=np.sum(x * x, axis=-1),
        r2sq=np.sum(y * y, axis=-1),
        r3sq=np.sum(z * z, axis=-1),
    )
    if X is None:
        return pinv, None
    V = _coords(X, s.m)
    if V.ndim > coords.ndim:
        x, y, z = x[..., None, :], y[..., None, :], z[..., None, :]
    VX, VY, VZ = _blocks(s, V)
    tinv = TangentInvariants(
        gamma=np.sum(nu * (x * VY + y * VX), axis=-1),
        mu=np.sum(eps * z * VZ, axis=-1),
    )
    return pinv, tinv


def _check_radius(name: str, measured, nominal: float):
    dev = np.max(np.abs(np.asarray(measured) - nominal ** 2)) / nominal ** 2
    if dev > RADIUS_AGREEMENT_TOL:
        raise InvalidInputError(f"{name}^2 from coordinates deviates from nominal by {dev:.3e} (relative)")


def _on(sub, pt, tol):
    if isinstance(pt, ManifoldPoint):
        if pt.host != sub:
            raise InvalidInputError(f"point belongs to {pt.host!r}, not {sub!r}")
        return pt.coords
    return sub.point(pt, tol).coords


def _single_eps(s: BlockSwap) -> int:
    if len(set(s.eps)) != 1:
        raise InvalidInputError(f"closed forms on the product need all eps_j equal, got {s.eps}")
    return s.eps[0]


def _tangent(coords: np.ndarray, X, frame: np.ndarray, tol: float) -> np.ndarray:
    V = _coords(X, coords.shape[-1])
    if V.ndim > coords.ndim:
        frame = frame[..., None, :, :]
    comp = np.einsum("...m,...rm->...r", V, frame)
    scale = np.maximum(1.0, np.linalg.norm(V, axis=-1))
    if np.any(np.abs(comp) > tol * scale[..., None]):
        raise InvalidInputError(
            f"vector is not tangent: normal component {float(np.max(np.abs(comp))):.3e}"
        )
    return V


def example1_structure(s: BlockSwap, sph: Hypersphere, pt, tol: float = DEFAULT_MEMBERSHIP_TOL):
    """``(a_11, xi_1)`` on the sphere of radius ``R``.

    ``a_11 = (2 sigma + tau) / R^2`` and
    ``xi_1 = (nu y - a_11 x, nu x - a_11 y, (eps - a_11) z) / R``.
    """
    coords = _on(sph, pt, tol)
    inv, _ = invariants(s, coords)
    _check_radius("R", inv.Rsq, sph.R)
    R = sph.R
    nu = np.asarray(s.nu, dtype=float)
    eps = np.asarray(s.eps, dtype=float)
    x, y, z = _blocks(s, coords)
    a11 = (2 * inv.sigma + inv.tau) / R ** 2
    a = a11[..., None]
    xi1 = np.concatenate([nu * y - a * x, nu * x - a * y, (eps - a) * z], axis=-1) / R
    return a11, xi1


def example1_u_and_P(s: BlockSwap, sph: Hypersphere, pt, X, tol: float = DEFAULT_MEMBERSHIP_TOL):
    """``(u_1(X), P X)`` on the sphere.

    ``u_1 = (gamma + mu) / R``;
    ``P X = (nu Y - c x, nu X - c y, eps Z - c z)`` with ``c = u_1 / R``.
    """
    coords = _on(sph, pt, tol)
    V = _tangent(coords, X, (coords / sph.R)[..., None, :], 1e-10)
    _, tinv = invariants(s, coords, V)
    R = sph.R
    u1 = (tinv.gamma + tinv.mu) / R
    c = (u1 / R)[..., None]
    nu = np.asarray(s.nu, dtype=float)
    eps = np.asarray(s.eps, dtype=float)
    x, y, z = _blocks(s, coords)
    if V.ndim > coords.ndim:
        x, y, z = x[..., None, :], y[..., None, :], z[..., None, :]
    VX, VY, VZ = _blocks(s, V)
    PX = np.concatenate([nu * VY - c * x, nu * VX - c * y, eps * VZ - c * z], axis=-1)
    return u1, PX


def example2_structure(s: BlockSwap, prod: ProductOfSpheres, pt, tol: float = DEFAULT_MEMBERSHIP_TOL):
    """``(a, xi_1, xi_2)`` on the product of spheres, all ``eps_j`` equal.

    With ``w = (nu y - (2 sigma / r^2) x, nu x - (2 sigma / r^2) y)`` and
    ``v = (eps - tau / r3^2) z``::

        a_11 = (2 sigma + eps r3^2) / R^2
        a_12 = a_21 = (2 sigma - eps r^2) r3 / (r R^2)
        a_22 = (2 sigma r3^2 + eps r^4) / (r^2 R^2)
        xi_1 = (w, v) / R
        xi_2 = ((r3 / r) w, -(r / r3) v) / R
    """
    e = _single_eps(s)
    coords = _on(prod, pt, tol)
    inv, _ = invariants(s, coords)
    _check_radius("r", inv.rsq, prod.r)
    _check_radius("r3", inv.r3sq, prod.r3)
    r, r3 = prod.r, prod.r3
    R2 = r ** 2 + r3 ** 2
    sig = inv.sigma
    a11 = (2 * sig + e * r3 ** 2) / R2
    a12 = (2 * sig - e * r ** 2) * r3 / (r * R2)
    a22 = (2 * sig * r3 ** 2 + e * r ** 4) / (r ** 2 * R2)
    a = np.stack([np.stack([a11, a12], -1), np.stack([a12, a22], -1)], -2)
    nu = np.asarray(s.nu, dtype=float)
    eps = np.asarray(s.eps, dtype=float)
    x, y, z = _blocks(s, coords)
    c = (2 * sig / r ** 2)[..., None]
    w = np.concatenate([nu * y - c * x, nu * x - c * y], axis=-1)
    v = (eps - (inv.tau / r3 ** 2)[..., None]) * z
    R = np.sqrt(R2)
    xi1 = np.concatenate([w, v], axis=-1) / R
    xi2 = np.concatenate([(r3 / r) * w, -(r / r3) * v], axis=-1) / R
    return a, xi1, xi2


def example2_u_and_P(s: BlockSwap, prod: ProductOfSpheres, pt, X, tol: float = DEFAULT_MEMBERSHIP_TOL):
    """``(u_1(X), u_2(X), P X)`` on the product of spheres.

    ``u_1 = (gamma + mu) / R``, ``u_2 = ((r3 / r) gamma - (r / r3) mu) / R`` and
    ``P X = (nu Y - (gamma / r^2) x, nu X - (gamma / r^2) y, eps Z - (mu / r3^2) z)``.
    """
    _single_eps(s)
    coords = _on(prod, pt, tol)
    V = _tangent(coords, X, prod.normal_frame(prod.point(coords, tol)), 1e-10)
    _, tinv = invariants(s, coords, V)
    r, r3, R = prod.r, prod.r3, prod.R
    g, mu = tinv.gamma, tinv.mu
    u1 = (g + mu) / R
    u2 = ((r3 / r) * g - (r / r3) * mu) / R
    nu = np.asarray(s.nu, dtype=float)
    eps = np.asarray(s.eps, dtype=float)
    x, y, z = _blocks(s, coords)
    if V.ndim > coords.ndim:
        x, y, z = x[..., None, :], y[..., None, :], z[..., None, :]
    VX, VY, VZ = _blocks(s, V)
    cg = (g / r ** 2)[..., None]
    cm = (mu / r3 ** 2)[..., None]
    PX = np.concatenate([nu * VY - cg * x, nu * VX - cg * y, eps * VZ - cm * z], axis=-1)
    return u1, u2, PX
