"""Euclidean ambient space with an orthogonal involutive structure.

Vectors are plain ``numpy`` arrays whose last axis holds the ``m``
coordinates; any leading axes are treated as a batch.  For the block-swap
family the coordinate layout is ``(x^1..x^p, y^1..y^p, z^1..z^q)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import InvalidInputError

DEFAULT_VALIDATION_TOL = 1e-10


def _signs(values, name: str) -> tuple[int, ...]:
    out = tuple(int(v) for v in values)
    if any(v not in (1, -1) for v in out):
        raise InvalidInputError(f"{name} entries must be +1 or -1, got {list(values)}")
    return out


@dataclass(frozen=True)
class BlockSwap:
    """(x, y, z) -> (nu*y, nu*x, eps*z) on E^(2p+q).

    Squares to the identity and preserves the Euclidean metric for every
    choice of signs.
    """

    p: int
    q: int
    nu: tuple[int, ...]
    eps: tuple[int, ...]

    def __post_init__(self):
        if self.p < 1 or self.q < 1:
            raise InvalidInputError(f"p and q must be positive, got p={self.p}, q={self.q}")
        object.__setattr__(self, "nu", _signs(self.nu, "nu"))
        object.__setattr__(self, "eps", _signs(self.eps, "eps"))
        if len(self.nu) != self.p:
            raise InvalidInputError(f"len(nu)={len(self.nu)} does not match p={self.p}")
        if len(self.eps) != self.q:
            raise InvalidInputError(f"len(eps)={len(self.eps)} does not match q={self.q}")

    @property
    def m(self) -> int:
        return 2 * self.p + self.q

    @property
    def epsilon(self) -> int:
        return 1

    def apply(self, v: np.ndarray) -> np.ndarray:
        p = self.p
        nu = np.asarray(self.nu, dtype=float)
        eps = np.asarray(self.eps, dtype=float)
        out = np.empty_like(v)
        out[..., :p] = nu * v[..., p:2 * p]
        out[..., p:2 * p] = nu * v[..., :p]
        out[..., 2 * p:] = eps * v[..., 2 * p:]
        return out

    def matrix(self) -> np.ndarray:
        """Dense m x m matrix of the map."""
        return self.apply(np.eye(self.m)).T


@dataclass(frozen=True)
class GenericInvolution:
    """Structure given by a matrix ``M`` with ``M @ M = epsilon * I``.

    Construction does not validate; call :func:`validate_structure`.
    """

    matrix_: np.ndarray = field(repr=False)
    epsilon: int = 1

    def __post_init__(self):
        mat = np.array(self.matrix_, dtype=float)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise InvalidInputError(f"structure matrix must be square, got shape {mat.shape}")
        if self.epsilon not in (1, -1):
            raise InvalidInputError(f"epsilon must be +1 or -1, got {self.epsilon}")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix_", mat)

    @property
    def m(self) -> int:
        return self.matrix_.shape[0]

    def apply(self, v: np.ndarray) -> np.ndarray:
        return v @ self.matrix_.T

    def matrix(self) -> np.ndarray:
        return self.matrix_.copy()


AmbientStructure = Union[BlockSwap, GenericInvolution]


def _check_dim(v: np.ndarray, m: int) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim == 0 or v.shape[-1] != m:
        raise InvalidInputError(f"expected vectors of dimension {m}, got shape {v.shape}")
    return v


def apply_structure(s: AmbientStructure, v) -> np.ndarray:
    """Apply the ambient structure to ``v`` (shape ``(..., m)``)."""
    return s.apply(_check_dim(v, s.m))


def inner_product(u, v) -> np.ndarray:
    """Euclidean inner product over the last axis."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape[-1:] != v.shape[-1:]:
        raise InvalidInputError(f"dimension mismatch: {u.shape} vs {v.shape}")
    return np.einsum("...i,...i->...", u, v)


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    violations: tuple[str, ...] = ()
    involution_residual: float = 0.0
    compatibility_residual: float = 0.0

    def __bool__(self):
        return self.ok


def validate_structure(s: AmbientStructure, tol: float = DEFAULT_VALIDATION_TOL) -> ValidationResult:
    """Check ``P^2 = eps I`` and metric compatibility on the standard basis."""
    if not tol > 0:
        raise InvalidInputError(f"tol must be positive, got {tol}")
    eye = np.eye(s.m)
    images = s.apply(eye)
    twice = s.apply(images)
    inv_res = float(np.max(np.abs(twice - s.epsilon * eye)))
    # Gram matrix of the images against the identity Gram matrix.
    compat_res = float(np.max(np.abs(images @ images.T - eye)))
    violations = []
    if inv_res > tol:
        violations.append(f"P^2 != {s.epsilon:+d}*Id (max residual {inv_res:.3e})")
    if compat_res > tol:
        violations.append(f"<PU,PV> != <U,V> (max residual {compat_res:.3e})")
    return ValidationResult(not violations, tuple(violations), inv_res, compat_res)
