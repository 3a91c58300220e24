"""Curvature from analytic metric derivatives, and discrete wave operators.

Christoffel symbols and the Riemann tensor are evaluated pointwise from the
exact metric derivatives, so they carry no stencil error; only operators that
differentiate sampled fields (dalembertian, covariant divergences of grid
data) use finite differences.
"""

from __future__ import annotations

import numpy as np

from .grids import GridField, GridSpec, finite_diff
from .metrics import MetricSampler

__all__ = [
    "christoffel",
    "riemann_at",
    "ricci_at",
    "weyl_at",
    "hodge_dual",
    "riemann",
    "dalembertian",
    "covariant_div_rank2",
    "spatial_christoffel",
    "spatial_ricci",
]


def christoffel(metric: MetricSampler, t, x) -> np.ndarray:
    """Gamma^s_{mu nu} at the given points, index order (..., s, mu, nu)."""
    dg = metric.dg(t, x)
    ginv = metric.inverse_g(t, x)
    # sym_{rho mu nu} = d_mu g_{rho nu} + d_nu g_{rho mu} - d_rho g_{mu nu}
    sym = np.einsum("...mrn->...rmn", dg) + np.einsum("...nrm->...rmn", dg) - dg
    return 0.5 * np.einsum("...sr,...rmn->...smn", ginv, sym)


def _dchristoffel(metric: MetricSampler, t, x) -> np.ndarray:
    """d_lam Gamma^s_{mu nu}, index order (..., lam, s, mu, nu)."""
    dg = metric.dg(t, x)
    d2g = metric.d2g(t, x)
    ginv = metric.inverse_g(t, x)
    dginv = -np.einsum("...sa,...lab,...br->...lsr", ginv, dg, ginv)
    sym = np.einsum("...mrn->...rmn", dg) + np.einsum("...nrm->...rmn", dg) - dg
    dsym = (
        np.einsum("...lmrn->...lrmn", d2g)
        + np.einsum("...lnrm->...lrmn", d2g)
        - d2g
    )
    return 0.5 * (
        np.einsum("...lsr,...rmn->...lsmn", dginv, sym)
        + np.einsum("...sr,...lrmn->...lsmn", ginv, dsym)
    )


def riemann_at(metric: MetricSampler, t, x) -> np.ndarray:
    """Fully covariant R_{a b mu nu} at the given points."""
    gam = christoffel(metric, t, x)
    dgam = _dchristoffel(metric, t, x)
    up = (
        np.einsum("...mrns->...rsmn", dgam)
        - np.einsum("...nrms->...rsmn", dgam)
        + np.einsum("...rml,...lns->...rsmn", gam, gam)
        - np.einsum("...rnl,...lms->...rsmn", gam, gam)
    )
    return np.einsum("...ar,...rbmn->...abmn", metric.g(t, x), up)


def ricci_at(metric: MetricSampler, t, x) -> np.ndarray:
    riem = riemann_at(metric, t, x)
    ginv = metric.inverse_g(t, x)
    return np.einsum("...am,...abmn->...bn", ginv, riem)


def weyl_at(metric: MetricSampler, t, x) -> np.ndarray:
    """Weyl part of the Riemann tensor (trace-free in four dimensions)."""
    g = metric.g(t, x)
    riem = riemann_at(metric, t, x)
    ric = np.einsum("...am,...abmn->...bn", metric.inverse_g(t, x), riem)
    scal = np.einsum("...ab,...ab->...", metric.inverse_g(t, x), ric)

    def gg(i, j):
        return g[..., i, j]

    out = riem.copy()
    # C = R - (g kulkarni Ric)/2 + R_scal/6 (g kulkarni g)/2
    term = 0.5 * (
        np.einsum("...am,...bn->...abmn", g, ric)
        - np.einsum("...an,...bm->...abmn", g, ric)
        - np.einsum("...bm,...an->...abmn", g, ric)
        + np.einsum("...bn,...am->...abmn", g, ric)
    )
    gterm = np.einsum("...am,...bn->...abmn", g, g) - np.einsum(
        "...an,...bm->...abmn", g, g
    )
    out -= term
    out += (scal / 6.0)[..., None, None, None, None] * gterm
    return out


_LC = np.zeros((4, 4, 4, 4))
for _p in __import__("itertools").permutations(range(4)):
    _sign = 1
    _perm = list(_p)
    for _i in range(4):
        for _j in range(_i + 1, 4):
            if _perm[_i] > _perm[_j]:
                _sign = -_sign
    _LC[_p] = _sign


def hodge_dual(metric: MetricSampler, t, x, riem: np.ndarray) -> np.ndarray:
    """Left Hodge dual *R_{ab mn} = 1/2 eps_{ab}^{ls} R_{ls mn}."""
    g = metric.g(t, x)
    ginv = metric.inverse_g(t, x)
    vol = np.sqrt(-np.linalg.det(g))
    eps_low = vol[..., None, None, None, None] * _LC
    eps_mixed = np.einsum("...abgd,...gl,...ds->...abls", eps_low, ginv, ginv)
    return 0.5 * np.einsum("...abls,...lsmn->...abmn", eps_mixed, riem)


def riemann(metric: MetricSampler, spec: GridSpec, chunk: int = 65536) -> GridField:
    """R_{ab mu nu} sampled on the lattice (rank-4, spacetime indices)."""
    t, x, y, z = spec.meshgrid()
    pts = np.stack([x, y, z], axis=-1).reshape(-1, 3)
    ts = np.broadcast_to(t, spec.shape).reshape(-1)
    out = np.empty((pts.shape[0], 4, 4, 4, 4))
    for lo in range(0, pts.shape[0], chunk):
        sl = slice(lo, lo + chunk)
        out[sl] = riemann_at(metric, ts[sl], pts[sl])
    vals = out.reshape(spec.shape + (4, 4, 4, 4))
    if not np.isfinite(vals).all():
        raise ValueError("metric degenerate somewhere on the grid")
    return GridField(spec, vals, ("spacetime",) * 4)


def dalembertian(metric: MetricSampler, fld: GridField, order: int = 2) -> GridField:
    """Box_g phi = |g|^{-1/2} d_mu(|g|^{1/2} g^{mu nu} d_nu phi) by finite differences.

    Accuracy degrades in a boundary layer of ``order`` nodes (one-sided
    stencils); exclude it from norms.
    """
    if fld.rank != 0:
        raise ValueError("dalembertian expects a scalar field")
    spec = fld.spec
    t, x, y, z = spec.meshgrid()
    pts = np.stack([x, y, z], axis=-1)
    g = metric.g(t, pts)
    ginv = np.linalg.inv(g)
    sqrtg = np.sqrt(-np.linalg.det(g))
    grad = np.stack([finite_diff(fld, a, order).values for a in range(4)], axis=-1)
    flux = sqrtg[..., None] * np.einsum("...mn,...n->...m", ginv, grad)
    div = np.zeros_like(fld.values, dtype=flux.dtype)
    for a in range(4):
        comp = GridField(spec, flux[..., a])
        div = div + finite_diff(comp, a, order).values
    return GridField(spec, div / sqrtg)


def covariant_div_rank2(metric: MetricSampler, fld: GridField, order: int = 2) -> GridField:
    """D^a Q_{ab} for a rank-2 covariant spacetime grid field; result rank-1."""
    if fld.index_kinds != ("spacetime", "spacetime"):
        raise ValueError("expects a rank-2 spacetime field")
    spec = fld.spec
    t, x, y, z = spec.meshgrid()
    pts = np.stack([x, y, z], axis=-1)
    ginv = metric.inverse_g(t, pts)
    gam = christoffel(metric, t, pts)
    dq = np.stack(
        [finite_diff(fld, a, order).values for a in range(4)], axis=-3
    )  # (..., mu, a, b)
    covd = (
        dq
        - np.einsum("...lma,...lb->...mab", gam, fld.values)
        - np.einsum("...lmb,...al->...mab", gam, fld.values)
    )
    vals = np.einsum("...ma,...mab->...b", ginv, covd)
    return GridField(spec, vals, ("spacetime",))


def spatial_christoffel(metric: MetricSampler, t, x) -> np.ndarray:
    """Christoffels of the induced metric on Sigma_t, index order (..., s, i, j)."""
    dg = metric.dg(t, x)[..., 1:, 1:, 1:]
    ginv = np.linalg.inv(metric.spatial_metric(t, x))
    sym = np.einsum("...mrn->...rmn", dg) + np.einsum("...nrm->...rmn", dg) - dg
    return 0.5 * np.einsum("...sr,...rmn->...smn", ginv, sym)


def spatial_ricci(metric: MetricSampler, t, x) -> np.ndarray:
    """Ricci tensor of the induced 3-metric, exact from analytic derivatives."""
    dg = metric.dg(t, x)[..., 1:, 1:, 1:]
    d2g = metric.d2g(t, x)[..., 1:, 1:, 1:, 1:]
    gsp = metric.spatial_metric(t, x)
    ginv = np.linalg.inv(gsp)
    sym = np.einsum("...mrn->...rmn", dg) + np.einsum("...nrm->...rmn", dg) - dg
    gam = 0.5 * np.einsum("...sr,...rmn->...smn", ginv, sym)
    dginv = -np.einsum("...sa,...lab,...br->...lsr", ginv, dg, ginv)
    dsym = (
        np.einsum("...lmrn->...lrmn", d2g)
        + np.einsum("...lnrm->...lrmn", d2g)
        - d2g
    )
    dgam = 0.5 * (
        np.einsum("...lsr,...rmn->...lsmn", dginv, sym)
        + np.einsum("...sr,...lrmn->...lsmn", ginv, dsym)
    )
    riem_up = (
        np.einsum("...mrns->...rsmn", dgam)
        - np.einsum("...nrms->...rsmn", dgam)
        + np.einsum("...rml,...lns->...rsmn", gam, gam)
        - np.einsum("...rnl,...lms->...rsmn", gam, gam)
    )
    return np.einsum("...rsrn->...sn", riem_up)
