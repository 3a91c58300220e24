"""Structured spacetime lattices, sampled fields, finite differences and mixed norms.

Axis convention: axis 0 is coordinate time, axes 1..3 are x, y, z.  Component
axes of tensor fields follow the four grid axes.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GridSpec",
    "GridField",
    "finite_diff",
    "mixed_norm",
    "write_field",
    "read_field",
    "slice_to_csv",
]


@dataclass(frozen=True)
class GridSpec:
    """Uniform lattice on [-half_width, half_width]^3 x [t_min, t_max]."""

    half_width: float = 4.0
    n_space: int = 48
    t_min: float = 0.0
    t_max: float = 1.0
    n_time: int = 32

    def __post_init__(self):
        if self.n_space < 8:
            raise ValueError(f"n_space must be >= 8, got {self.n_space}")
        if self.n_time < 1:
            raise ValueError(f"n_time must be >= 1, got {self.n_time}")
        if self.half_width <= 0:
            raise ValueError("half_width must be positive")
        if self.n_time > 1 and self.t_max <= self.t_min:
            raise ValueError("time slices must be strictly increasing")

    @property
    def h(self) -> float:
        """Spatial lattice spacing."""
        return 2.0 * self.half_width / (self.n_space - 1)

    @property
    def dt(self) -> float:
        if self.n_time == 1:
            return 0.0
        return (self.t_max - self.t_min) / (self.n_time - 1)

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return (self.n_time, self.n_space, self.n_space, self.n_space)

    def spacing(self, axis: int) -> float:
        return self.dt if axis == 0 else self.h

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, self.n_time)

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(-self.half_width, self.half_width, self.n_space)

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Broadcastable (t, x, y, z) coordinate arrays of shape self.shape."""
        t = self.times[:, None, None, None]
        x = self.xs[None, :, None, None]
        y = self.xs[None, None, :, None]
        z = self.xs[None, None, None, :]
        return np.broadcast_arrays(t, x, y, z)

    def spatial_meshgrid(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        xs = self.xs
        return np.meshgrid(xs, xs, xs, indexing="ij")

    def refine(self, factor: int = 2) -> "GridSpec":
        """Spec with (n-1)*factor+1 points per axis; same bounds, nested nodes."""
        return GridSpec(
            half_width=self.half_width,
            n_space=(self.n_space - 1) * factor + 1,
            t_min=self.t_min,
            t_max=self.t_max,
            n_time=(self.n_time - 1) * factor + 1 if self.n_time > 1 else 1,
        )


@dataclass
class GridField:
    """Tensor samples on a GridSpec lattice.

    ``values`` has shape ``spec.shape + component_shape``; ``index_kinds``
    names the component axes ("spacetime" for 4-valued, "spatial" for
    3-valued indices); empty for scalars.
    """

    spec: GridSpec
    values: np.ndarray
    index_kinds: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        self.values = np.asarray(self.values)
        expected = self.spec.shape + self.component_shape
        if self.values.shape != expected:
            raise ValueError(
                f"values shape {self.values.shape} does not match {expected}"
            )

    @property
    def component_shape(self) -> tuple[int, ...]:
        return tuple(4 if k == "spacetime" else 3 for k in self.index_kinds)

    @property
    def rank(self) -> int:
        return len(self.index_kinds)

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.values).all())

    def interior(self, width: int) -> np.ndarray:
        """Values with a boundary layer of ``width`` nodes stripped (all grid axes)."""
        sl = [slice(width, -width if width else None)] * 4
        if self.spec.n_time == 1:
            sl[0] = slice(None)
        return self.values[tuple(sl)]

    def copy(self) -> "GridField":
        return GridField(self.spec, self.values.copy(), self.index_kinds)


_STENCILS = {
    # order -> (interior offsets/coeffs, list of one-sided rows near the low edge)
    2: (
        ([-1, 1], [-0.5, 0.5]),
        [([0, 1, 2], [-1.5, 2.0, -0.5])],
    ),
    4: (
        ([-2, -1, 1, 2], [1 / 12, -8 / 12, 8 / 12, -1 / 12]),
        [
            ([0, 1, 2, 3, 4], [-25 / 12, 48 / 12, -36 / 12, 16 / 12, -3 / 12]),
            ([0, 1, 2, 3, 4], [-3 / 12, -10 / 12, 18 / 12, -6 / 12, 1 / 12]),
        ],
    ),
}


def _diff_array(values: np.ndarray, axis: int, spacing: float, order: int) -> np.ndarray:
    """Differentiate along ``axis``: central stencil inside, one-sided at edges."""
    n = values.shape[axis]
    (offsets, coeffs), edge_rows = _STENCILS[order]
    if n < len(edge_rows[0][0]):
        raise ValueError(f"axis of length {n} too small for order-{order} stencil")
    out = np.zeros_like(values, dtype=np.result_type(values.dtype, float))
    half = order // 2

    def take(idx):
        return np.take(values, idx, axis=axis)

    core = sum(c * take(range(half + o, n - half + o)) for o, c in zip(offsets, coeffs))
    sl = [slice(None)] * values.ndim
    sl[axis] = slice(half, n - half)
    out[tuple(sl)] = core

    for row, (idx, cs) in enumerate(edge_rows):
        lo = sum(c * take(i) for i, c in zip(idx, cs))
        hi = -sum(c * take(n - 1 - i) for i, c in zip(idx, cs))
        sl_lo, sl_hi = [slice(None)] * values.ndim, [slice(None)] * values.ndim
        sl_lo[axis], sl_hi[axis] = row, n - 1 - row
        out[tuple(sl_lo)] = lo
        out[tuple(sl_hi)] = hi
    return out / spacing


def finite_diff(fld: GridField, axis: int, order: int = 2) -> GridField:
    """Partial derivative of ``fld`` along a grid axis (0=t, 1..3=x,y,z)."""
    if axis not in (0, 1, 2, 3):
        raise ValueError(f"axis must be one of 0..3, got {axis}")
    if order not in _STENCILS:
        raise ValueError(f"order must be 2 or 4, got {order}")
    spacing = fld.spec.spacing(axis)
    if spacing == 0.0:
        raise ValueError("cannot differentiate along a single-slice time axis")
    if fld.spec.shape[axis] < order + 1:
        raise ValueError("grid too small for requested stencil order")
    return GridField(fld.spec, _diff_array(fld.values, axis, spacing, order), fld.index_kinds)


def _slice_weights(n: int, spacing: float) -> np.ndarray:
    w = np.full(n, spacing)
    w[0] = w[-1] = 0.5 * spacing
    return w


def mixed_norm(fld: GridField, p: float, q: float, boundary: int = 0) -> float:
    """L^p in time of the L^q spatial norm, by trapezoidal quadrature per slice.

    ``p`` or ``q`` equal to ``np.inf`` takes the max.  A ``boundary`` layer of
    nodes is stripped from every axis before the norm is formed.
    """
    if not (1 <= p) or not (1 <= q):
        raise ValueError("p and q must lie in [1, inf]")
    spec = fld.spec
    if fld.rank != 0:
        raise ValueError("mixed_norm expects a scalar field")
    vals = np.abs(fld.interior(boundary))
    if vals.size == 0:
        raise ValueError("empty grid after boundary stripping")
    nt, nx = vals.shape[0], vals.shape[1]
    wx = _slice_weights(nx, spec.h)
    w3 = wx[:, None, None] * wx[None, :, None] * wx[None, None, :]
    if np.isinf(q):
        slice_norms = vals.reshape(nt, -1).max(axis=1)
    else:
        slice_norms = (np.tensordot(vals**q, w3, axes=3)) ** (1.0 / q)
    if np.isinf(p) or nt == 1:
        return float(slice_norms.max())
    wt = _slice_weights(nt, spec.dt)
    return float((slice_norms**p @ wt) ** (1.0 / p))


_MAGIC = b"NWF1"


def write_field(fld: GridField, path) -> None:
    """Flat binary layout: magic, JSON header length, header, row-major body."""
    header = json.dumps(
        {
            "half_width": fld.spec.half_width,
            "n_space": fld.spec.n_space,
            "t_min": fld.spec.t_min,
            "t_max": fld.spec.t_max,
            "n_time": fld.spec.n_time,
            "index_kinds": list(fld.index_kinds),
            "dtype": str(fld.values.dtype),
        }
    ).encode()
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", len(header)))
        fh.write(header)
        fh.write(np.ascontiguousarray(fld.values).tobytes())


def read_field(path) -> GridField:
    with open(path, "rb") as fh:
        if fh.read(4) != _MAGIC:
            raise ValueError("not a nullwave field file")
        (hlen,) = struct.unpack("<I", fh.read(4))
        header = json.loads(fh.read(hlen).decode())
        spec = GridSpec(
            half_width=header["half_width"],
            n_space=header["n_space"],
            t_min=header["t_min"],
            t_max=header["t_max"],
            n_time=header["n_time"],
        )
        kinds = tuple(header["index_kinds"])
        comp = tuple(4 if k == "spacetime" else 3 for k in kinds)
        raw = np.frombuffer(fh.read(), dtype=np.dtype(header["dtype"]))
    return GridField(spec, raw.reshape(spec.shape + comp).copy(), kinds)


def slice_to_csv(fld: GridField, t_index: int, path) -> None:
    """Dump one time slice of a scalar field as x,y,z,value rows."""
    if fld.rank != 0:
        raise ValueError("CSV export supports scalar fields only")
    xs = fld.spec.xs
    vals = fld.values[t_index]
    with open(path, "w") as fh:
        fh.write("x,y,z,re,im\n")
        for i, x in enumerate(xs):
            for j, y in enumerate(xs):
                for k, z in enumerate(xs):
                    v = complex(vals[i, j, k])
                    fh.write(f"{x!r},{y!r},{z!r},{v.real!r},{v.imag!r}\n")
