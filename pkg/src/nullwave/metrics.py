"""Closed-form Lorentzian metric families with hand-coded exact derivatives.

All families are block metrics g = -n^2 dt^2 + g_ij dx^i dx^j with signature
(-,+,+,+).  Derivatives up to second order are exact, so curvature built from
them carries no finite-difference error.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

__all__ = ["MetricSampler", "make_metric", "bump", "bump_grad", "bump_hess"]


def bump(x: np.ndarray, center: np.ndarray, radius: float) -> np.ndarray:
    """C^5 compactly supported bump (1 - r^2/rho^2)^6, zero for r >= rho."""
    s = np.sum((x - center) ** 2, axis=-1) / radius**2
    return np.where(s < 1.0, (1.0 - np.minimum(s, 1.0)) ** 6, 0.0)


def bump_grad(x: np.ndarray, center: np.ndarray, radius: float) -> np.ndarray:
    d = x - center
    s = np.sum(d**2, axis=-1) / radius**2
    f = np.where(s < 1.0, (1.0 - np.minimum(s, 1.0)) ** 5, 0.0)
    return (-12.0 / radius**2) * f[..., None] * d


def bump_hess(x: np.ndarray, center: np.ndarray, radius: float) -> np.ndarray:
    d = x - center
    s = np.sum(d**2, axis=-1) / radius**2
    inside = s < 1.0
    f4 = np.where(inside, (1.0 - np.minimum(s, 1.0)) ** 4, 0.0)
    f5 = np.where(inside, (1.0 - np.minimum(s, 1.0)) ** 5, 0.0)
    eye = np.eye(3)
    outer = d[..., :, None] * d[..., None, :]
    return (120.0 / radius**4) * f4[..., None, None] * outer - (
        12.0 / radius**2
    ) * f5[..., None, None] * eye


@dataclass(frozen=True)
class MetricSampler:
    """Analytic block metric; ``family`` selects the closed form.

    Families:
      minkowski      flat space
      conformal_bump g_ij = (1 + eps*B)^2 delta_ij, static
      time_bump      g_ij = (1 + eps*t*B) delta_ij, second fundamental form -eps*B/2
      lapse_bump     n = 1 + eps*B, flat slices
    """

    family: str = "minkowski"
    eps: float = 0.0
    center: tuple[float, float, float] = (0.0, 0.0, 0.0)
    radius: float = 2.0

    def __post_init__(self):
        if self.family not in ("minkowski", "conformal_bump", "time_bump", "lapse_bump"):
            raise ValueError(f"unknown metric family {self.family!r}")

    # -- scalar profiles ---------------------------------------------------
    def _b(self, x):
        return bump(x, np.asarray(self.center), self.radius)

    def _db(self, x):
        return bump_grad(x, np.asarray(self.center), self.radius)

    def _d2b(self, x):
        return bump_hess(x, np.asarray(self.center), self.radius)

    def key(self) -> str:
        raw = f"{self.family}:{self.eps!r}:{self.center!r}:{self.radius!r}"
        return hashlib.sha256(raw.encode()).hexdigest()[:16]

    # -- lapse and spatial metric -------------------------------------------
    def lapse(self, t, x) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.family == "lapse_bump":
            return np.broadcast_to(1.0 + self.eps * self._b(x), np.broadcast_shapes(t.shape, x.shape[:-1])).copy()
        return np.ones(np.broadcast_shapes(t.shape, np.asarray(x).shape[:-1]))

    def lapse_spatial_grad(self, t, x) -> np.ndarray:
        base = np.broadcast_shapes(np.asarray(t, dtype=float).shape, np.asarray(x).shape[:-1])
        if self.family == "lapse_bump":
            return np.broadcast_to(self.eps * self._db(x), base + (3,)).copy()
        return np.zeros(base + (3,))

    def spatial_metric(self, t, x) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        base = np.broadcast_shapes(t.shape, np.asarray(x).shape[:-1])
        eye = np.eye(3)
        if self.family == "conformal_bump":
            w = (1.0 + self.eps * self._b(x)) ** 2
        elif self.family == "time_bump":
            w = 1.0 + self.eps * t * self._b(x)
        else:
            w = np.ones(base)
        return np.broadcast_to(w[..., None, None] * eye, base + (3, 3)).copy()

    def dt_spatial_metric(self, t, x) -> np.ndarray:
        base = np.broadcast_shapes(np.asarray(t, dtype=float).shape, np.asarray(x).shape[:-1])
        if self.family == "time_bump":
            return np.broadcast_to(
                (self.eps * self._b(x))[..., None, None] * np.eye(3), base + (3, 3)
            ).copy()
        return np.zeros(base + (3, 3))

    def second_fundamental_form(self, t, x) -> np.ndarray:
        """k_ij = -(1/2n) dt g_ij, exact."""
        n = self.lapse(t, x)
        return -0.5 * self.dt_spatial_metric(t, x) / n[..., None, None]

    def dk_spatial(self, t, x) -> np.ndarray:
        """Partial derivatives d_c k_ij, index order (..., c, i, j)."""
        base = np.broadcast_shapes(np.asarray(t, dtype=float).shape, np.asarray(x).shape[:-1])
        out = np.zeros(base + (3, 3, 3))
        if self.family == "time_bump":
            db = self._db(x)
            out += np.broadcast_to(
                (-0.5 * self.eps) * db[..., :, None, None] * np.eye(3), base + (3, 3, 3)
            )
        return out

    # -- full spacetime metric and derivatives --------------------------------
    def g(self, t, x) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        base = np.broadcast_shapes(t.shape, np.asarray(x).shape[:-1])
        out = np.zeros(base + (4, 4))
        out[..., 0, 0] = -self.lapse(t, x) ** 2
        out[..., 1:, 1:] = self.spatial_metric(t, x)
        return out

    def dg(self, t, x) -> np.ndarray:
        """d_mu g_ab, index order (..., mu, a, b)."""
        t = np.asarray(t, dtype=float)
        base = np.broadcast_shapes(t.shape, np.asarray(x).shape[:-1])
        out = np.zeros(base + (4, 4, 4))
        eye = np.eye(3)
        if self.family == "conformal_bump":
            b, db = self._b(x), self._db(x)
            fac = 2.0 * self.eps * (1.0 + self.eps * b)
            out[..., 1:, 1:, 1:] = fac[..., None, None, None] * db[..., :, None, None] * eye
        elif self.family == "time_bump":
            b, db = self._b(x), self._db(x)
            out[..., 0, 1:, 1:] = (self.eps * b)[..., None, None] * eye
            out[..., 1:, 1:, 1:] = (
                (self.eps * t)[..., None, None, None] * db[..., :, None, None] * eye
            )
        elif self.family == "lapse_bump":
            b, db = self._b(x), self._db(x)
            fac = -2.0 * (1.0 + self.eps * b) * self.eps
            out[..., 1:, 0, 0] = fac[..., None] * db
        return out

    def d2g(self, t, x) -> np.ndarray:
        """d_mu d_nu g_ab, index order (..., mu, nu, a, b)."""
        t = np.asarray(t, dtype=float)
        base = np.broadcast_shapes(t.shape, np.asarray(x).shape[:-1])
        out = np.zeros(base + (4, 4, 4, 4))
        eye = np.eye(3)
        if self.family == "conformal_bump":
            b, db, d2b = self._b(x), self._db(x), self._d2b(x)
            outer = db[..., :, None] * db[..., None, :]
            block = 2.0 * self.eps**2 * outer + (
                2.0 * self.eps * (1.0 + self.eps * b)
            )[..., None, None] * d2b
            out[..., 1:, 1:, 1:, 1:] = block[..., :, :, None, None] * eye
        elif self.family == "time_bump":
            db, d2b = self._db(x), self._d2b(x)
            out[..., 0, 1:, 1:, 1:] = self.eps * db[..., :, None, None] * eye
            out[..., 1:, 0, 1:, 1:] = self.eps * db[..., :, None, None] * eye
            out[..., 1:, 1:, 1:, 1:] = (
                (self.eps * t)[..., None, None, None, None] * d2b[..., :, :, None, None] * eye
            )
        elif self.family == "lapse_bump":
            b, db, d2b = self._b(x), self._db(x), self._d2b(x)
            outer = db[..., :, None] * db[..., None, :]
            block = -2.0 * self.eps**2 * outer - (
                2.0 * self.eps * (1.0 + self.eps * b)
            )[..., None, None] * d2b
            out[..., 1:, 1:, 0, 0] = block
        return out

    def inverse_g(self, t, x) -> np.ndarray:
        return np.linalg.inv(self.g(t, x))

    def is_static(self) -> bool:
        return self.family in ("minkowski", "conformal_bump", "lapse_bump")

    def check_signature(self, t, x) -> bool:
        """Signature (-,+,+,+) via eigenvalue signs of g at the given points."""
        ev = np.linalg.eigvalsh(self.g(t, x))
        return bool(np.all(ev[..., 0] < 0) and np.all(ev[..., 1:] > 0))


def make_metric(family: str, **params) -> MetricSampler:
    return MetricSampler(family=family, **params)
