import numpy as np
import pytest

from nullwave import GridField, GridSpec, finite_diff, make_metric, mixed_norm
from nullwave.curvature import dalembertian, riemann, riemann_at
from nullwave.grids import read_field, write_field


def scalar(spec, fn):
    t, x, y, z = spec.meshgrid()
    return GridField(spec, np.asarray(fn(t, x, y, z), dtype=float))


class TestFiniteDiff:
    def test_linear_field_exact(self):
        spec = GridSpec(n_space=12, n_time=4)
        f = scalar(spec, lambda t, x, y, z: 1.7 + 2.5 * x)
        d = finite_diff(f, 1, order=2)
        assert np.abs(d.values - 2.5).max() < 1e-12

    def test_constant_field_zero(self):
        spec = GridSpec(n_space=10, n_time=4)
        f = scalar(spec, lambda t, x, y, z: 3.0 + 0 * x)
        for axis in range(4):
            assert np.abs(finite_diff(f, axis, 2).values).max() < 1e-13

    @pytest.mark.parametrize("order", [2, 4])
    def test_richardson_ratio(self, order):
        # refinement halves h; interior error should drop by ~2^order
        errs = []
        for n in (33, 65):
            spec = GridSpec(half_width=2.0, n_space=n, n_time=2)
            f = scalar(spec, lambda t, x, y, z: np.sin(x))
            d = finite_diff(f, 1, order)
            exact = scalar(spec, lambda t, x, y, z: np.cos(x)).values
            w = order
            errs.append(np.abs((d.values - exact)[:, w:-w, w:-w, w:-w]).max())
        ratio = errs[0] / errs[1]
        assert abs(ratio - 2**order) < 0.1 * 2**order

    def test_axis_and_order_validation(self):
        spec = GridSpec(n_space=10, n_time=4)
        f = scalar(spec, lambda t, x, y, z: x)
        with pytest.raises(ValueError):
            finite_diff(f, 5, 2)
        with pytest.raises(ValueError):
            finite_diff(f, 1, 3)
        small = GridSpec(n_space=8, n_time=2)
        g = scalar(small, lambda t, x, y, z: x)
        with pytest.raises(ValueError):
            finite_diff(g, 0, 4)


class TestRiemann:
    def test_minkowski_zero(self):
        spec = GridSpec(n_space=8, n_time=2)
        R = riemann(make_metric("minkowski"), spec)
        assert np.abs(R.values).max() == 0.0

    def test_antisymmetries(self):
        m = make_metric("conformal_bump", eps=0.01)
        rng = np.random.default_rng(3)
        pts = rng.uniform(-1.5, 1.5, (200, 3))
        ts = rng.uniform(0, 1, 200)
        R = riemann_at(m, ts, pts)
        scale = np.abs(R).max()
        assert np.abs(R + np.swapaxes(R, 1, 2)).max() < 1e-10 * scale
        assert np.abs(R + np.swapaxes(R, 3, 4)).max() < 1e-10 * scale

    def test_first_bianchi(self):
        m = make_metric("time_bump", eps=0.02)
        rng = np.random.default_rng(4)
        pts = rng.uniform(-1.5, 1.5, (100, 3))
        ts = rng.uniform(0, 1, 100)
        R = riemann_at(m, ts, pts)
        cyc = R + np.einsum("pabmn->pamnb", R) + np.einsum("pabmn->panbm", R)
        assert np.abs(cyc).max() < 1e-10 * np.abs(R).max()

    def test_conformal_bump_vs_symbolic_oracle(self):
        sympy = pytest.importorskip("sympy")
        sp = sympy
        eps_v, rho = 0.01, 2.0
        t, x, y, z = sp.symbols("t x y z")
        s = (x**2 + y**2 + z**2) / rho**2
        w = (1 + eps_v * (1 - s) ** 6) ** 2  # valid inside the bump support
        g = sp.diag(-1, w, w, w)
        ginv = sp.diag(-1, 1 / w, 1 / w, 1 / w)
        coords = [t, x, y, z]
        Gam = [
            [
                [
                    sum(
                        ginv[a, r]
                        * (
                            sp.diff(g[r, v], coords[m])
                            + sp.diff(g[r, m], coords[v])
                            - sp.diff(g[m, v], coords[r])
                        )
                        for r in range(4)
                    )
                    / 2
                    for v in range(4)
                ]
                for m in range(4)
            ]
            for a in range(4)
        ]
        rng = np.random.default_rng(7)
        pts = rng.uniform(-0.9, 0.9, (100, 3))
        ts = rng.uniform(0, 1, 100)
        metric = make_metric("conformal_bump", eps=eps_v, radius=rho)
        R_num = riemann_at(metric, ts, pts)
        # spot-check independent components; the metric is diagonal, so
        # lowering the first index needs a single term
        comps = [(1, 2, 1, 2), (1, 0, 1, 0), (1, 3, 2, 3), (2, 3, 2, 3), (1, 2, 1, 3)]

        def riem_up(r, sg, mu, nu):
            e = sp.diff(Gam[r][nu][sg], coords[mu]) - sp.diff(Gam[r][mu][sg], coords[nu])
            for l in range(4):
                e += Gam[r][mu][l] * Gam[l][nu][sg] - Gam[r][nu][l] * Gam[l][mu][sg]
            return e

        for a, b, mu, nu in comps:
            expr = g[a, a] * riem_up(a, b, mu, nu)
            fn = sp.lambdify((x, y, z), expr, "numpy")
            vals = fn(pts[:, 0], pts[:, 1], pts[:, 2])
            num = R_num[:, a, b, mu, nu]
            scale = max(np.abs(vals).max(), 1e-6)
            assert np.abs(num - vals).max() < 1e-8 * scale


class TestDalembertian:
    def test_flat_null_plane(self):
        spec = GridSpec(half_width=2.0, n_space=16, n_time=8)
        om = np.array([1.0, 0, 0])
        f = scalar(spec, lambda t, x, y, z: -t + x * om[0] + y * om[1] + z * om[2])
        box = dalembertian(make_metric("minkowski"), f)
        assert np.abs(box.interior(2)).max() < 1e-10

    def test_flat_t_squared(self):
        spec = GridSpec(half_width=2.0, n_space=12, n_time=8)
        f = scalar(spec, lambda t, x, y, z: t**2 + 0 * x)
        box = dalembertian(make_metric("minkowski"), f)
        assert np.abs(box.interior(2) + 2.0).max() < 1e-9

    def test_flat_oscillatory_discretization_error(self):
        lam = 4.0
        om = np.array([0.6, 0.8, 0.0])
        errs = []
        for n in (17, 33):
            spec = GridSpec(half_width=1.0, n_space=n, t_min=0.0, t_max=2.0, n_time=n)
            t, x, y, z = spec.meshgrid()
            u = -t + x * om[0] + y * om[1] + z * om[2]
            f = GridField(spec, np.exp(1j * lam * u))
            box = dalembertian(make_metric("minkowski"), f)
            errs.append(np.abs(box.interior(2)).max() / lam**2)
        h = 2.0 / 16
        assert errs[0] < 5 * (h * lam) ** 2 / lam * lam  # O(h^2) bound with slack
        assert errs[0] / errs[1] > 3.0  # second-order convergence


class TestMixedNorm:
    def test_constant_unit_volume(self):
        spec = GridSpec(half_width=0.5, n_space=9, t_min=0.0, t_max=1.0, n_time=5)
        f = scalar(spec, lambda t, x, y, z: -2.0 + 0 * x)
        for p, q in [(1, 1), (2, 2), (4, 2), (np.inf, 2), (2, np.inf)]:
            assert abs(mixed_norm(f, p, q) - 2.0) < 1e-12

    def test_fubini_p_equals_q(self):
        spec = GridSpec(half_width=1.0, n_space=9, n_time=6)
        rng = np.random.default_rng(0)
        f = GridField(spec, rng.standard_normal(spec.shape))
        p = 3
        # flat L^p over the spacetime box with the same trapezoid weights
        wx = np.full(9, spec.h)
        wx[0] = wx[-1] = spec.h / 2
        wt = np.full(6, spec.dt)
        wt[0] = wt[-1] = spec.dt / 2
        w4 = wt[:, None, None, None] * wx[:, None, None] * wx[None, :, None] * wx[None, None, :]
        flat = (np.sum(np.abs(f.values) ** p * w4)) ** (1 / p)
        assert abs(mixed_norm(f, p, p) - flat) < 1e-12 * flat

    def test_half_slice_indicator(self):
        m = 8
        spec = GridSpec(half_width=1.0, n_space=9, t_min=0.0, t_max=1.0, n_time=2 * m + 1)
        rng = np.random.default_rng(1)
        profile = rng.standard_normal((9, 9, 9))
        vals = np.zeros(spec.shape)
        vals[m:] = profile  # second half of the slices, endpoint included
        f = GridField(spec, vals)
        wx = np.full(9, spec.h)
        wx[0] = wx[-1] = spec.h / 2
        w3 = wx[:, None, None] * wx[None, :, None] * wx[None, None, :]
        slice_l2 = np.sqrt(np.sum(profile**2 * w3))
        for p in (1.0, 2.0, 4.0):
            t_half = spec.dt * (m + 0.5)  # trapezoid measure of the indicator
            expected = t_half ** (1 / p) * slice_l2
            assert abs(mixed_norm(f, p, 2) - expected) < 1e-12 * expected
            assert abs(expected - 2 ** (-1 / p) * slice_l2) < 0.05 * slice_l2

    def test_homogeneous_and_monotone(self):
        spec = GridSpec(half_width=1.0, n_space=8, n_time=4)
        rng = np.random.default_rng(2)
        a = rng.standard_normal(spec.shape)
        f = GridField(spec, a)
        g = GridField(spec, 3.0 * a)
        bigger = GridField(spec, np.abs(a) + 0.5)
        for p, q in [(2, 2), (4, 2), (1, 3)]:
            assert abs(mixed_norm(g, p, q) - 3 * mixed_norm(f, p, q)) < 1e-10
            assert mixed_norm(bigger, p, q) >= mixed_norm(f, p, q)

    def test_rejects_bad_exponents(self):
        spec = GridSpec(n_space=8, n_time=2)
        f = scalar(spec, lambda t, x, y, z: x)
        with pytest.raises(ValueError):
            mixed_norm(f, 0.5, 2)


def test_field_serialization_roundtrip(tmp_path):
    spec = GridSpec(half_width=1.0, n_space=8, n_time=3)
    rng = np.random.default_rng(5)
    f = GridField(
        spec, rng.standard_normal(spec.shape + (4, 4)), ("spacetime", "spacetime")
    )
    path = tmp_path / "field.nwf"
    write_field(f, path)
    g = read_field(path)
    assert g.spec == spec
    assert g.index_kinds == f.index_kinds
    assert np.array_equal(g.values, f.values)


def test_gridspec_invariants():
    with pytest.raises(ValueError):
        GridSpec(n_space=4)
    with pytest.raises(ValueError):
        GridSpec(t_min=1.0, t_max=0.0, n_time=4)
    spec = GridSpec(n_space=9, half_width=4.0)
    assert abs(spec.h - 1.0) < 1e-15
