"""Time-foliation data (lapse, second fundamental form) and residual checks
of the maximal-foliation constraint and structure equations.

Residuals are reported, never asserted: the built-in metric families need not
satisfy the Einstein constraints, so only the purely geometric identities are
expected to converge to zero under refinement.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curvature import riemann_at, ricci_at, spatial_christoffel, spatial_ricci
from .grids import GridField, GridSpec, finite_diff
from .metrics import MetricSampler

__all__ = ["FoliationData", "extract_foliation", "constraint_residuals", "structure_residuals"]


@dataclass
class FoliationData:
    """Per-slice geometry of the t-foliation in the block gauge."""

    spec: GridSpec
    metric: MetricSampler
    lapse: GridField           # n(t,x)
    spatial_metric: GridField  # g_ij
    k: GridField               # second fundamental form k_ij

    def validate(self) -> None:
        if np.any(self.lapse.values <= 0):
            raise ValueError("lapse must be positive")
        asym = np.abs(self.k.values - np.swapaxes(self.k.values, -1, -2)).max()
        if asym > 1e-12:
            raise ValueError("second fundamental form not symmetric")
        if np.any(np.linalg.eigvalsh(self.spatial_metric.values)[..., 0] <= 0):
            raise ValueError("induced metric not positive definite")


def extract_foliation(metric: MetricSampler, spec: GridSpec) -> FoliationData:
    """Sample n, g_ij and k_ij = -(1/2n) dt g_ij from a block-form metric."""
    t, x, y, z = spec.meshgrid()
    pts = np.stack([x, y, z], axis=-1)
    n = metric.lapse(t, pts)
    gsp = metric.spatial_metric(t, pts)
    k = metric.second_fundamental_form(t, pts)
    fol = FoliationData(
        spec=spec,
        metric=metric,
        lapse=GridField(spec, n),
        spatial_metric=GridField(spec, gsp, ("spatial", "spatial")),
        k=GridField(spec, k, ("spatial", "spatial")),
    )
    fol.validate()
    return fol


def _interior_l2(spec: GridSpec, vals: np.ndarray, width: int = 2) -> float:
    """RMS-type L2 over the interior, components flattened."""
    wt = width if spec.n_time > 2 * width + 1 else (spec.n_time - 1) // 2
    sl = [slice(wt, -wt if wt else None)] + [slice(width, -width)] * 3
    v = vals[tuple(sl)]
    cell = spec.h**3 * (spec.dt if spec.n_time > 1 else 1.0)
    return float(np.sqrt(np.sum(np.abs(v) ** 2) * cell))


def _spatial_cov_div_k(fol: FoliationData, order: int = 2) -> np.ndarray:
    """nabla^a k_ab on each slice: FD partials + analytic spatial Christoffels."""
    spec = fol.spec
    t, x, y, z = spec.meshgrid()
    pts = np.stack([x, y, z], axis=-1)
    gam = spatial_christoffel(fol.metric, t, pts)
    ginv = np.linalg.inv(fol.spatial_metric.values)
    k = fol.k.values
    dk = np.stack(
        [finite_diff(fol.k, a, order).values for a in (1, 2, 3)], axis=-3
    )  # (..., c, i, j)
    covd = (
        dk
        - np.einsum("...lci,...lj->...cij", gam, k)
        - np.einsum("...lcj,...il->...cij", gam, k)
    )
    return np.einsum("...ci,...cij->...j", ginv, covd)


def _hessian_lapse(fol: FoliationData, order: int = 2) -> np.ndarray:
    spec = fol.spec
    t, x, y, z = spec.meshgrid()
    pts = np.stack([x, y, z], axis=-1)
    gam = spatial_christoffel(fol.metric, t, pts)
    dn = np.stack(
        [finite_diff(fol.lapse, a, order).values for a in (1, 2, 3)], axis=-1
    )
    hess = np.empty(spec.shape + (3, 3))
    for i in range(3):
        comp = GridField(spec, dn[..., i])
        for j in range(3):
            hess[..., j, i] = finite_diff(comp, j + 1, order).values
    hess -= np.einsum("...lij,...l->...ij", gam, dn)
    return 0.5 * (hess + np.swapaxes(hess, -1, -2)), dn


def constraint_residuals(fol: FoliationData, order: int = 2) -> dict:
    """L2 norms of the maximal-foliation constraint residuals.

    momentum:    nabla^a k_ab
    hamiltonian: R_scal - |k|^2
    maximal:     tr_g k
    lapse:       Lap n - n |k|^2
    """
    spec = fol.spec
    t, x, y, z = spec.meshgrid()
    pts = np.stack([x, y, z], axis=-1)
    ginv = np.linalg.inv(fol.spatial_metric.values)
    k = fol.k.values
    kup = np.einsum("...ia,...ab,...bj->...ij", ginv, k, ginv)
    k2 = np.einsum("...ij,...ij->...", kup, k)
    trk = np.einsum("...ij,...ij->...", ginv, k)
    ric3 = spatial_ricci(fol.metric, t, pts)
    rscal = np.einsum("...ij,...ij->...", ginv, ric3)
    mom = _spatial_cov_div_k(fol, order)
    hess, _ = _hessian_lapse(fol, order)
    lap_n = np.einsum("...ij,...ij->...", ginv, hess)
    return {
        "momentum": _interior_l2(spec, mom),
        "hamiltonian": _interior_l2(spec, rscal - k2),
        "maximal": _interior_l2(spec, trk),
        "lapse": _interior_l2(spec, lap_n - fol.lapse.values * k2),
        "grid_h": spec.h,
    }


def structure_residuals(fol: FoliationData, order: int = 2) -> dict:
    """Residuals of the geometric structure identities of the t-foliation.

    evolution: (D_T k)_ij - R(di,T,dj,T) + n^-1 Hess(n)_ij - k_il k^l_j
    codazzi:   nabla_i k_jl - nabla_j k_il + R(dl,T,di,dj)
    gauss:     Ric3_ij + trk k_ij - k_il k^l_j - Ric_proj_ij - R(di,T,dj,T)

    These hold for every block metric; the vacuum forms of the paper follow
    when the spacetime Ricci term vanishes.
    """
    spec = fol.spec
    metric = fol.metric
    t, x, y, z = spec.meshgrid()
    pts = np.stack([x, y, z], axis=-1)
    n = fol.lapse.values
    gspinv = np.linalg.inv(fol.spatial_metric.values)
    k = fol.k.values
    kk = np.einsum("...il,...lm,...mj->...ij", k, gspinv, k)
    trk = np.einsum("...ij,...ij->...", gspinv, k)

    riem = riemann_at(metric, t, pts)
    ric4 = ricci_at(metric, t, pts)
    r_iTjT = riem[..., 1:, 0, 1:, 0] / (n**2)[..., None, None]

    # evolution of k: projected D_T of the spacetime extension of k
    from .curvature import christoffel

    gam4 = christoffel(metric, t, pts)
    dtk = finite_diff(fol.k, 0, order).values
    corr = np.einsum("...li,...lj->...ij", gam4[..., 1:, 0, 1:], k) + np.einsum(
        "...lj,...il->...ij", gam4[..., 1:, 0, 1:], k
    )
    DTk = (dtk - corr) / n[..., None, None]
    hess, _ = _hessian_lapse(fol, order)
    res_evol = DTk - r_iTjT + hess / n[..., None, None] - kk

    # Codazzi
    gam3 = spatial_christoffel(metric, t, pts)
    dk = np.stack([finite_diff(fol.k, a, order).values for a in (1, 2, 3)], axis=-3)
    covdk = (
        dk
        - np.einsum("...lcj,...lm->...cjm", gam3, k)
        - np.einsum("...lcm,...jl->...cjm", gam3, k)
    )  # (..., i, j, l) = nabla_i k_jl
    anti = covdk - np.swapaxes(covdk, -3, -2)
    r_lTij = np.einsum("...lij->...ijl", riem[..., 1:, 0, 1:, 1:]) / n[..., None, None, None]
    res_codazzi = anti + r_lTij

    # Gauss (traced)
    ric3 = spatial_ricci(metric, t, pts)
    res_gauss = ric3 + trk[..., None, None] * k - kk - ric4[..., 1:, 1:] - r_iTjT

    return {
        "evolution": _interior_l2(spec, res_evol),
        "codazzi": _interior_l2(spec, res_codazzi),
        "gauss": _interior_l2(spec, res_gauss),
        "grid_h": spec.h,
    }
