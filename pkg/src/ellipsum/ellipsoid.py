"""Ellipsoid value type, parameterization conversions and geometric queries.

An ellipsoid is the set {x : (x - q)' Q^{-1} (x - q) <= 1} with center q and
symmetric positive definite shape matrix Q. The same set can be written as a
quadratic form {x : x'Ax + 2x'b + c <= 0}; both directions of that conversion
live here, together with volume, support function, membership, affine images
and boundary sampling for plots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DimensionMismatch, NotPositiveDefinite, SingularMap, UnsupportedDimension

#: absolute slack on the quadratic-form residual for membership tests,
#: forgiving of roundoff on exact boundary points
MEMBERSHIP_TOL = 1e-12


def unit_ball_volume(dim: int) -> float:
    """Volume of the Euclidean unit ball in ``dim`` dimensions."""
    return math.pi ** (dim / 2.0) / math.gamma(dim / 2.0 + 1.0)


def unit_direction(vector) -> np.ndarray:
    """Normalize a direction vector to unit Euclidean length.

    The zero vector is rejected.
    """
    u = np.asarray(vector, dtype=float).reshape(-1)
    norm = float(np.linalg.norm(u))
    if norm == 0.0 or not math.isfinite(norm):
        raise ValueError("direction must be a nonzero finite vector")
    return u / norm


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Ellipsoid:
    """Ellipsoid with center ``center`` and SPD shape matrix ``shape``.

    The shape matrix is symmetrized on construction (rejecting genuinely
    asymmetric input) and checked for positive definiteness via Cholesky.
    Instances are immutable; the stored arrays are read-only.
    """

    center: np.ndarray
    shape: np.ndarray

    def __post_init__(self):
        center = np.array(self.center, dtype=float).reshape(-1)
        shape = linalg.symmetrize(self.shape)
        if center.shape[0] != shape.shape[0]:
            raise DimensionMismatch(
                f"center has dim {center.shape[0]}, shape matrix is {shape.shape[0]}x{shape.shape[0]}"
            )
        chol = linalg.cholesky(shape)  # raises NotPositiveDefinite for invalid shapes
        object.__setattr__(self, "center", _freeze(center))
        object.__setattr__(self, "shape", _freeze(shape))
        object.__setattr__(self, "_chol", _freeze(chol))

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    @property
    def chol(self) -> np.ndarray:
        """Lower Cholesky factor of the shape matrix, cached at construction."""
        return self._chol

    def volume(self) -> float:
        """pi^(d/2) / Gamma(d/2 + 1) * sqrt(det Q)."""
        return unit_ball_volume(self.dim) * float(np.prod(np.diagonal(self._chol)))

    def support(self, direction) -> float:
        """Support function value u'q + sqrt(u'Qu).

        Positively homogeneous in ``direction``; pass a unit vector to get
        the distance of the supporting hyperplane from the origin.
        """
        u = np.asarray(direction, dtype=float).reshape(-1)
        return float(u @ self.center + math.sqrt(max(u @ self.shape @ u, 0.0)))

    def contains_point(self, point) -> bool:
        """Membership test with absolute slack MEMBERSHIP_TOL on the residual."""
        x = np.asarray(point, dtype=float).reshape(-1)
        if x.shape[0] != self.dim:
            raise DimensionMismatch(f"point has dim {x.shape[0]}, ellipsoid has dim {self.dim}")
        z = linalg.solve_lower(self._chol, x - self.center)
        return float(z @ z) <= 1.0 + MEMBERSHIP_TOL

    def to_quadratic_form(self) -> QuadraticForm:
        """Convert to the (A, b, c) triple: A = Q^{-1}, b = -Q^{-1}q, c = q'Q^{-1}q - 1.

        Always emits this normalization, which makes the round trip through
        ``from_quadratic_form`` testable.
        """
        a = linalg.solve_cholesky(self._chol, np.eye(self.dim))
        aq = linalg.solve_cholesky(self._chol, self.center)
        return QuadraticForm(A=0.5 * (a + a.T), b=-aq, c=float(self.center @ aq) - 1.0)

    def sqrt_shape(self) -> np.ndarray:
        """Symmetric square root of the shape matrix, via eigendecomposition."""
        values, vectors = linalg.sym_eig(self.shape)
        return (vectors * np.sqrt(np.maximum(values, 0.0))) @ vectors.T

    def boundary_points(self, samples: int) -> np.ndarray:
        """Points on the boundary, as rows of an array.

        In 2-D, ``samples`` equally spaced angles on the unit circle are
        mapped through x = Q^{1/2} v + q. In 3-D a latitude-longitude grid
        with ``samples`` rows and columns is used. Other dimensions raise
        UnsupportedDimension.
        """
        if samples < 1:
            raise ValueError("samples must be positive")
        if self.dim == 2:
            angles = 2.0 * math.pi * np.arange(samples) / samples
            v = np.stack([np.cos(angles), np.sin(angles)], axis=0)
        elif self.dim == 3:
            lat = np.linspace(0.0, math.pi, samples)
            lon = 2.0 * math.pi * np.arange(samples) / samples
            th, ph = np.meshgrid(lat, lon, indexing="ij")
            v = np.stack(
                [
                    (np.sin(th) * np.cos(ph)).ravel(),
                    (np.sin(th) * np.sin(ph)).ravel(),
                    np.cos(th).ravel(),
                ],
                axis=0,
            )
        else:
            raise UnsupportedDimension(f"boundary sampling needs dim 2 or 3, got {self.dim}")
        return (self.sqrt_shape() @ v).T + self.center

    def to_dict(self) -> dict:
        """JSON-ready representation: {"center": [...], "shape": [[...], ...]}."""
        return {"center": self.center.tolist(), "shape": self.shape.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> Ellipsoid:
        try:
            center = data["center"]
            shape = data["shape"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"ellipsoid object needs 'center' and 'shape': {exc}") from exc
        return cls(center=np.asarray(center, dtype=float), shape=np.asarray(shape, dtype=float))

    def __repr__(self):
        return f"Ellipsoid(center={self.center.tolist()}, shape={self.shape.tolist()})"


@dataclass(frozen=True, eq=False)
class QuadraticForm:
    """The set {x : x'Ax + 2x'b + c <= 0} with A positive definite.

    The triple is only defined up to positive scaling; construction accepts
    any scaling but requires a nonempty interior, i.e. c < b'A^{-1}b.
    """

    A: np.ndarray
    b: np.ndarray
    c: float

    def __post_init__(self):
        a = linalg.symmetrize(self.A)
        b = np.array(self.b, dtype=float).reshape(-1)
        if b.shape[0] != a.shape[0]:
            raise DimensionMismatch(f"b has dim {b.shape[0]}, A is {a.shape[0]}x{a.shape[0]}")
        L = linalg.cholesky(a)
        radius = float(b @ linalg.solve_cholesky(L, b)) - float(self.c)
        if not radius > 0.0:
            raise ValueError("quadratic form describes a set with empty interior")
        object.__setattr__(self, "A", _freeze(a))
        object.__setattr__(self, "b", _freeze(b))
        object.__setattr__(self, "c", float(self.c))

    @property
    def dim(self) -> int:
        return self.b.shape[0]


def from_quadratic_form(form: QuadraticForm) -> Ellipsoid:
    """Recover (q, Q) from an (A, b, c) triple: q = -A^{-1}b, Q = (b'A^{-1}b - c) A^{-1}.

    Accepts any positive scaling of the triple; the scale factor
    b'A^{-1}b - c restores the Q that satisfies the defining inequality.
    """
    L = linalg.cholesky(form.A)
    ainv_b = linalg.solve_cholesky(L, form.b)
    radius = float(form.b @ ainv_b) - form.c
    ainv = linalg.solve_cholesky(L, np.eye(form.dim))
    return Ellipsoid(center=-ainv_b, shape=radius * 0.5 * (ainv + ainv.T))


def affine_image(ell: Ellipsoid, matrix, shift=None) -> Ellipsoid:
    """Image of an ellipsoid under x -> F x + shift: E(Fq + shift, F Q F')."""
    f = np.asarray(matrix, dtype=float)
    if f.ndim != 2 or f.shape[1] != ell.dim:
        raise DimensionMismatch(f"map shape {f.shape} incompatible with dim {ell.dim}")
    s = np.zeros(f.shape[0]) if shift is None else np.asarray(shift, dtype=float).reshape(-1)
    if s.shape[0] != f.shape[0]:
        raise DimensionMismatch("shift length does not match the map's output dimension")
    new_shape = f @ ell.shape @ f.T
    try:
        return Ellipsoid(center=f @ ell.center + s, shape=0.5 * (new_shape + new_shape.T))
    except NotPositiveDefinite as exc:
        raise SingularMap(f"image shape matrix is not positive definite: {exc}") from exc


def lift_degenerate(shape_psd, eps: float) -> np.ndarray:
    """Regularize a PSD matrix to a PD one: Q + eps * max(trace(Q)/d, 1) * I.

    With eps = 0 this is the identity, so well-posed inputs pass through
    untouched; rank-deficient shapes (e.g. from tall input maps) need a
    small positive eps.
    """
    if eps < 0.0:
        raise ValueError("eps must be nonnegative")
    q = linalg.symmetrize(shape_psd)
    d = q.shape[0]
    trace_scale = max(float(np.trace(q)) / d, 1.0)
    return q + (eps * trace_scale) * np.eye(d)
