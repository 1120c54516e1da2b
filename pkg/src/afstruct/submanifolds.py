"""Spheres and products of spheres presented by orthonormal normal frames.

Points carry a reference to the submanifold they were validated against.
Coordinates may hold a leading batch axis, in which case every operation
acts pointwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import InvalidInputError

DEFAULT_MEMBERSHIP_TOL = 1e-10
TANGENT_REJECT_RATIO = 1e-6


@dataclass(frozen=True, eq=False)
class ManifoldPoint:
    coords: np.ndarray
    host: "Submanifold"

    @property
    def batch_shape(self) -> tuple[int, ...]:
        return self.coords.shape[:-1]

    def __getitem__(self, idx) -> "ManifoldPoint":
        return ManifoldPoint(self.coords[idx], self.host)


@dataclass(frozen=True, eq=False)
class TangentVector:
    coords: np.ndarray
    base: ManifoldPoint


def _as_coords(v, m: int) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim == 0 or v.shape[-1] != m:
        raise InvalidInputError(f"expected coordinates of dimension {m}, got shape {v.shape}")
    return v


def _unit_gaussian(rng: np.random.Generator, n: int) -> np.ndarray:
    while True:
        draw = rng.standard_normal(n)
        norm = math.sqrt(draw @ draw)
        if norm > 0.0:
            return draw / norm


class _Base:
    m: int
    codim: int

    def membership_residual(self, pt) -> np.ndarray:
        raise NotImplementedError

    def _frame(self, coords: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def contains(self, pt, tol: float = DEFAULT_MEMBERSHIP_TOL) -> bool:
        coords = pt.coords if isinstance(pt, ManifoldPoint) else _as_coords(pt, self.m)
        return bool(np.all(self.membership_residual(coords) <= tol))

    def point(self, coords, tol: float = DEFAULT_MEMBERSHIP_TOL) -> ManifoldPoint:
        """Validate ``coords`` and wrap them as a point of this submanifold."""
        coords = _as_coords(coords, self.m)
        res = self.membership_residual(coords)
        if np.any(res > tol):
            raise InvalidInputError(
                f"point is not on {self!r}: membership residual {float(np.max(res)):.17g} > {tol:g}"
            )
        coords = coords.copy()
        coords.setflags(write=False)
        return ManifoldPoint(coords, self)

    def _own(self, pt: ManifoldPoint) -> np.ndarray:
        if not isinstance(pt, ManifoldPoint):
            return self.point(pt).coords
        if pt.host is not self and pt.host != self:
            raise InvalidInputError(f"point belongs to {pt.host!r}, not {self!r}")
        return pt.coords

    def normal_frame(self, pt: ManifoldPoint) -> np.ndarray:
        """Orthonormal normals at ``pt``, shape ``(..., codim, m)``."""
        return self._frame(self._own(pt))

    def project_tangent(self, pt: ManifoldPoint, v) -> TangentVector:
        """Remove the normal components of ``v``.

        ``v`` has shape ``(..., m)`` matching the point batch, or
        ``(..., k, m)`` for ``k`` vectors per point.
        """
        coords = self._own(pt)
        frame = self._frame(coords)
        v = _as_coords(v, self.m)
        pt = pt if isinstance(pt, ManifoldPoint) else self.point(coords)
        return TangentVector(project_onto_tangent(frame, v, coords.ndim), pt)

    def draw_coords(self, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def sample_point(self, rng: np.random.Generator) -> ManifoldPoint:
        """Uniform point: each sphere factor gets a normalised Gaussian draw."""
        return self.point(self.draw_coords(rng))

    def draw_tangents(self, coords: np.ndarray, rng: np.random.Generator, k: int) -> np.ndarray:
        """Unvalidated core of :meth:`sample_tangents` for a single point."""
        frame = self._frame(coords)
        draws = rng.standard_normal((k, self.m))
        out = draws - (draws @ frame.T) @ frame
        bad = np.einsum("ij,ij->i", out, out) < TANGENT_REJECT_RATIO ** 2 * np.einsum("ij,ij->i", draws, draws)
        for i in np.flatnonzero(bad):
            while True:
                d = rng.standard_normal(self.m)
                t = d - (frame @ d) @ frame
                if t @ t >= TANGENT_REJECT_RATIO ** 2 * (d @ d):
                    out[i] = t
                    break
        return out

    def sample_tangents(self, pt: ManifoldPoint, rng: np.random.Generator, k: int) -> np.ndarray:
        """``k`` tangent vectors at a single point, shape ``(k, m)``.

        Each is the tangential part of a standard Gaussian draw; draws whose
        tangential part is shorter than ``1e-6`` of the draw are redrawn.
        """
        coords = self._own(pt)
        if coords.ndim != 1:
            raise InvalidInputError("sample_tangents expects a single point")
        return self.draw_tangents(coords, rng, k)

    def sample_tangent(self, pt: ManifoldPoint, rng: np.random.Generator) -> TangentVector:
        pt = pt if isinstance(pt, ManifoldPoint) else self.point(pt)
        return TangentVector(self.sample_tangents(pt, rng, 1)[0], pt)


def project_onto_tangent(frame: np.ndarray, v: np.ndarray, point_ndim: int = 1) -> np.ndarray:
    """``v - sum_a <v, N_a> N_a`` for frames of shape ``(..., r, m)``."""
    if v.ndim == point_ndim:
        coeff = np.einsum("...m,...rm->...r", v, frame)
        return v - np.einsum("...r,...rm->...m", coeff, frame)
    coeff = np.einsum("...km,...rm->...kr", v, frame)
    return v - np.einsum("...kr,...rm->...km", coeff, frame)


@dataclass(frozen=True)
class Hypersphere(_Base):
    """Round sphere of radius ``R`` centred at the origin of E^m."""

    m: int
    R: float

    codim = 1

    def __post_init__(self):
        if self.m < 2:
            raise InvalidInputError(f"ambient dimension must be at least 2, got {self.m}")
        if not self.R > 0:
            raise InvalidInputError(f"radius must be positive, got {self.R}")

    def membership_residual(self, coords) -> np.ndarray:
        coords = _as_coords(coords, self.m)
        return np.abs(np.einsum("...i,...i->...", coords, coords) - self.R ** 2) / self.R ** 2

    def _frame(self, coords):
        return (coords / self.R)[..., None, :]

    def draw_coords(self, rng):
        return self.R * _unit_gaussian(rng, self.m)


@dataclass(frozen=True)
class ProductOfSpheres(_Base):
    """S^(2p-1)(r) x S^(q-1)(r3) inside S^(2p+q-1)(R), R^2 = r^2 + r3^2.

    The first factor lives in the ``(x, y)`` block, the second in ``z``.
    """

    p: int
    q: int
    r: float
    r3: float

    codim = 2

    def __post_init__(self):
        if self.p < 1:
            raise InvalidInputError(f"p must be positive, got {self.p}")
        if self.q < 2:
            raise InvalidInputError(f"q must be at least 2 so S^(q-1) has a tangent space, got {self.q}")
        if not (self.r > 0 and self.r3 > 0):
            raise InvalidInputError(f"radii must be positive, got r={self.r}, r3={self.r3}")

    @property
    def m(self) -> int:
        return 2 * self.p + self.q

    @property
    def R(self) -> float:
        return math.hypot(self.r, self.r3)

    def enclosing_sphere(self) -> Hypersphere:
        return Hypersphere(self.m, self.R)

    def membership_residual(self, coords) -> np.ndarray:
        coords = _as_coords(coords, self.m)
        k = 2 * self.p
        first = np.einsum("...i,...i->...", coords[..., :k], coords[..., :k])
        second = np.einsum("...i,...i->...", coords[..., k:], coords[..., k:])
        return np.maximum(np.abs(first - self.r ** 2) / self.r ** 2, np.abs(second - self.r3 ** 2) / self.r3 ** 2)

    def _frame(self, coords):
        k = 2 * self.p
        R, r, r3 = self.R, self.r, self.r3
        n2 = np.empty_like(coords)
        n2[..., :k] = (r3 / r) * coords[..., :k]
        n2[..., k:] = -(r / r3) * coords[..., k:]
        return np.stack([coords / R, n2 / R], axis=-2)

    def draw_coords(self, rng):
        k = 2 * self.p
        return np.concatenate([self.r * _unit_gaussian(rng, k), self.r3 * _unit_gaussian(rng, self.q)])


Submanifold = Union[Hypersphere, ProductOfSpheres]


def contains(sub: Submanifold, pt, tol: float = DEFAULT_MEMBERSHIP_TOL) -> bool:
    return sub.contains(pt, tol)


def normal_frame(sub: Submanifold, pt) -> np.ndarray:
    return sub.normal_frame(pt)


def project_tangent(sub: Submanifold, pt, v) -> TangentVector:
    return sub.project_tangent(pt, v)


def sample_point(sub: Submanifold, rng: np.random.Generator) -> ManifoldPoint:
    return sub.sample_point(rng)


def sample_tangent(sub: Submanifold, pt, rng: np.random.Generator) -> TangentVector:
    return sub.sample_tangent(pt, rng)
