"""Orthonormal-frame connection 1-forms, their curvature, gauge transition,
and the divergence-free potential B = (-Lap)^{-1} curl A on periodic boxes.

Internal so(3,1) indices are stored as antisymmetric pairs (alpha < beta), six
components; antisymmetry is structural, never re-checked.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curvature import christoffel, riemann_at, spatial_christoffel
from .grids import GridField, GridSpec, finite_diff
from .metrics import MetricSampler

__all__ = [
    "PAIRS",
    "FrameField",
    "ConnectionForm",
    "coordinate_frame",
    "gram_schmidt_frame",
    "rotate_frame",
    "connection_form",
    "gauge_transform",
    "curvature_from_connection",
    "frame_projected_riemann",
    "divergence_residual",
    "curl_periodic",
    "divergence_periodic",
    "inv_laplacian_periodic",
    "vector_potential_B",
]

PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
MINK = np.diag([-1.0, 1.0, 1.0, 1.0])


def pair_pack(mat: np.ndarray) -> np.ndarray:
    """Antisymmetric (...,4,4) -> (...,6) over PAIRS."""
    return np.stack([mat[..., a, b] for a, b in PAIRS], axis=-1)


def pair_unpack(packed: np.ndarray) -> np.ndarray:
    out = np.zeros(packed.shape[:-1] + (4, 4), dtype=packed.dtype)
    for idx, (a, b) in enumerate(PAIRS):
        out[..., a, b] = packed[..., idx]
        out[..., b, a] = -packed[..., idx]
    return out


@dataclass
class FrameField:
    """Four vector fields e_0..e_3; values shape grid + (frame, coordinate)."""

    spec: GridSpec
    values: np.ndarray  # (..., alpha, mu)

    def orthonormality_defect(self, metric: MetricSampler) -> float:
        t, x, y, z = self.spec.meshgrid()
        pts = np.stack([x, y, z], axis=-1)
        g = metric.g(t, pts)
        gram = np.einsum("...am,...mn,...bn->...ab", self.values, g, self.values)
        return float(np.abs(gram - MINK).max())


def coordinate_frame(spec: GridSpec) -> FrameField:
    vals = np.broadcast_to(np.eye(4), spec.shape + (4, 4)).copy()
    return FrameField(spec, vals)


def gram_schmidt_frame(metric: MetricSampler, spec: GridSpec) -> FrameField:
    """Orthonormal frame from the coordinate frame, e_0 = T first."""
    t, x, y, z = spec.meshgrid()
    pts = np.stack([x, y, z], axis=-1)
    g = metric.g(t, pts)
    seeds = np.broadcast_to(np.eye(4), spec.shape + (4, 4)).copy()
    seeds[..., 0, 0] = 1.0 / metric.lapse(t, pts)  # e_0 = T for block metrics
    out = np.zeros_like(seeds)
    signs = (-1.0, 1.0, 1.0, 1.0)
    for a in range(4):
        v = seeds[..., a, :].copy()
        for b in range(a):
            proj = signs[b] * np.einsum("...m,...mn,...n->...", out[..., b, :], g, v)
            v -= proj[..., None] * out[..., b, :]
        norm2 = np.einsum("...m,...mn,...n->...", v, g, v) * signs[a]
        out[..., a, :] = v / np.sqrt(norm2)[..., None]
    return FrameField(spec, out)


def rotate_frame(frame: FrameField, rot: np.ndarray) -> FrameField:
    """Apply a pointwise internal transformation e~_a = O_a^c e_c.

    ``rot`` has shape grid + (4,4); it must preserve the Minkowski metric.
    """
    return FrameField(frame.spec, np.einsum("...ac,...cm->...am", rot, frame.values))


@dataclass
class ConnectionForm:
    """(A_mu)_{ab}: external coordinate index mu, internal antisymmetric pair."""

    spec: GridSpec
    values: np.ndarray  # grid + (mu, pair)

    def matrices(self) -> np.ndarray:
        """Full internal matrices, grid + (mu, 4, 4)."""
        return pair_unpack(self.values)


def connection_form(
    metric: MetricSampler,
    frame: FrameField,
    order: int = 2,
    orthonormality_tol: float = 1e-8,
) -> ConnectionForm:
    """(A_mu)_{ab} = g(D_mu e_b, e_a): exact Christoffels, FD frame derivatives."""
    defect = frame.orthonormality_defect(metric)
    if defect > orthonormality_tol:
        raise ValueError(f"frame not orthonormal: defect {defect:.2e}")
    spec = frame.spec
    t, x, y, z = spec.meshgrid()
    pts = np.stack([x, y, z], axis=-1)
    g = metric.g(t, pts)
    gam = christoffel(metric, t, pts)
    de = np.stack(
        [
            _diff_components(spec, frame.values, axis, order)
            for axis in range(4)
        ],
        axis=-3,
    )  # grid + (mu, alpha, nu)
    cov = de + np.einsum("...nmc,...ac->...man", gam, frame.values)
    # cov[..., mu, b, n] = (D_mu e_b)^n ; contract with e_a to lower
    amat = np.einsum("...am,...mn,...ubn->...uab", frame.values, g, cov)
    return ConnectionForm(spec, pair_pack(amat))


def _diff_components(spec: GridSpec, vals: np.ndarray, axis: int, order: int) -> np.ndarray:
    from .grids import _diff_array

    spacing = spec.spacing(axis)
    if spacing == 0:
        return np.zeros_like(vals)
    if vals.shape[axis] < order + 1:  # short axis: largest stencil that fits
        order = 2
    return _diff_array(vals, axis, spacing, order)


def gauge_transform(
    metric: MetricSampler, A: ConnectionForm, rot: np.ndarray, order: int = 2
) -> ConnectionForm:
    """Transition A~ = O A O^{-1} + (dO) O^{-1} in lowered-index form."""
    mats = A.matrices()  # (..., mu, a, b) lowered internal indices
    new = np.einsum("...ac,...bd,...mcd->...mab", rot, rot, mats)
    dO = np.stack(
        [_diff_components(A.spec, rot, axis, order) for axis in range(4)], axis=-3
    )
    new += np.einsum("...mac,...bd,...cd->...mab", dO, rot, MINK)
    return ConnectionForm(A.spec, pair_pack(new))


def curvature_from_connection(A: ConnectionForm, order: int = 2) -> np.ndarray:
    """(F_{mu nu})_{ab} = d_mu A_nu - d_nu A_mu - [A_mu, A_nu]; grid + (mu,nu,4,4)."""
    mats = A.matrices()
    spec = A.spec
    d = np.stack(
        [_diff_components(spec, mats, axis, order) for axis in range(4)], axis=-4
    )  # (..., lam, mu, a, b)
    dA = d - np.einsum("...lmab->...mlab", d)
    up = np.einsum("...mac,...cd->...mad", mats, MINK)  # (A_mu)_a^d
    bracket = np.einsum("...mad,...ndb->...mnab", up, mats) - np.einsum(
        "...nad,...mdb->...mnab", up, mats
    )
    return dA - bracket


def frame_projected_riemann(metric: MetricSampler, frame: FrameField) -> np.ndarray:
    """R(e_a, e_b, d_mu, d_nu) from the exact Riemann tensor; grid + (mu,nu,4,4)."""
    spec = frame.spec
    t, x, y, z = spec.meshgrid()
    pts = np.stack([x, y, z], axis=-1)
    riem = riemann_at(metric, t, pts)
    return np.einsum("...ai,...bj,...ijmn->...mnab", frame.values, frame.values, riem)


def divergence_residual(
    metric: MetricSampler, A: ConnectionForm, t_index: int = 0, order: int = 2
) -> tuple[np.ndarray, np.ndarray]:
    """Coulomb-like gauge diagnostics on one slice.

    Returns (div, quad): the covariant spatial divergence nabla^l (A_l) per
    internal pair, and the pointwise quadratic scalar sum_{l,pair} (A_l)^2.
    The two are reported separately; the schematic relation div A = A^2
    suppresses the contraction pattern.
    """
    spec = A.spec
    t, x, y, z = spec.meshgrid()
    pts = np.stack([x, y, z], axis=-1)
    gam3 = spatial_christoffel(metric, t, pts)[t_index]
    ginv = np.linalg.inv(metric.spatial_metric(t, pts))[t_index]
    spatial = A.values[..., 1:, :]  # (..., l, pair)
    dvals = np.stack(
        [_diff_components(spec, spatial, axis, order)[t_index] for axis in (1, 2, 3)],
        axis=-3,
    )  # (space, c, l, pair)
    covd = dvals - np.einsum("...mcl,...mp->...clp", gam3, spatial[t_index])
    div = np.einsum("...cl,...clp->...p", ginv, covd)
    quad = np.sum(spatial[t_index] ** 2, axis=(-1, -2))
    return div, quad


# -- periodic (spectral) toolkit for the B potential --------------------------


def _kgrid(n: int, length: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    k1 = 2 * np.pi * np.fft.fftfreq(n, d=length / n)
    return np.meshgrid(k1, k1, k1, indexing="ij")


def curl_periodic(A: np.ndarray, length: float) -> np.ndarray:
    """(curl A)_i = eps_i^{jl} d_j A_l on a periodic box.

    ``A`` has shape (n,n,n,3) + internal; the curl acts on axis 3.
    """
    n = A.shape[0]
    kx, ky, kz = _kgrid(n, length)
    extra = A.ndim - 4
    k = [arr.reshape(arr.shape + (1,) * extra) for arr in (kx, ky, kz)]
    Ah = np.fft.fftn(A, axes=(0, 1, 2))
    comp = [Ah[(slice(None),) * 3 + (i,)] for i in range(3)]

    def d(j, c):
        return 1j * k[j] * comp[c]
    curl_h = np.stack(
        [d(1, 2) - d(2, 1), d(2, 0) - d(0, 2), d(0, 1) - d(1, 0)], axis=3
    )
    out = np.fft.ifftn(curl_h, axes=(0, 1, 2))
    return out.real if np.isrealobj(A) else out


def divergence_periodic(A: np.ndarray, length: float) -> np.ndarray:
    n = A.shape[0]
    kx, ky, kz = _kgrid(n, length)
    Ah = np.fft.fftn(A, axes=(0, 1, 2))
    div_h = 1j * (kx * Ah[..., 0] + ky * Ah[..., 1] + kz * Ah[..., 2])
    out = np.fft.ifftn(div_h, axes=(0, 1, 2))
    return out.real if np.isrealobj(A) else out


def inv_laplacian_periodic(F: np.ndarray, length: float) -> np.ndarray:
    """(-Lap)^{-1} F with the zero mode dropped (zero-mean convention)."""
    n = F.shape[0]
    kx, ky, kz = _kgrid(n, length)
    k2 = kx**2 + ky**2 + kz**2
    k2[0, 0, 0] = 1.0
    shape = k2.shape + (1,) * (F.ndim - 3)
    Fh = np.fft.fftn(F, axes=(0, 1, 2)) / k2.reshape(shape)
    Fh[0, 0, 0] = 0.0
    out = np.fft.ifftn(Fh, axes=(0, 1, 2))
    return out.real if np.isrealobj(F) else out


def vector_potential_B(A: np.ndarray, length: float) -> np.ndarray:
    """B = (-Lap)^{-1} curl A on a periodic box, component-wise in any
    trailing internal indices; zero-mean convention."""
    return inv_laplacian_periodic(curl_periodic(A, length), length)
