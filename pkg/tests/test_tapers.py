import numpy as np
import pytest
from scipy import integrate

import pointspec as ps
from pointspec.errors import ValidationError

# 1d transform values computed with a 200001-node trapezoid rule on
# Box((5,)): integral of t(x) exp(-ikx) over [-L/2, L/2]
ORACLE_1D = {
    (1, 0.0): 2.0131684841380877 + 0.0j,
    (1, np.pi / 5.0): 1.5811388300841895 + 0.0j,  # the singular point k = a
    (1, 0.7): 1.487820909851329 + 0.0j,
    (1, 2.3): -0.1398196507281582 + 0.0j,
    (1, -1.1): 0.9011173036984816 + 0.0j,
    (2, 0.0): 0.0 + 0.0j,
    (2, 2.0 * np.pi / 5.0): 1.581138830084189j,
    (2, 0.7): 1.4360724714906912j,
    (2, 2.3): 0.21771940198303324j,
    (2, -1.1): -1.6434647739790076j,
}


class TestSineTaperTransform:
    @pytest.mark.parametrize("p,k", sorted(ORACLE_1D, key=str))
    def test_1d_against_quadrature(self, p, k):
        window = ps.Box((5.0,))
        taper = ps.sine_taper((p,))
        got = taper.ft(np.array([[k]]), window)[0]
        want = ORACLE_1D[(p, k)]
        assert got == pytest.approx(want, abs=1e-9)

    def test_2d_factorizes(self):
        window = ps.Box((5.0, 7.0))
        taper = ps.sine_taper((1, 2))
        k = np.array([[0.7, 2.3], [np.pi / 5.0, -1.1], [0.0, 2.0 * np.pi / 7.0]])
        got = taper.ft(k, window)
        t1 = ps.sine_taper((1,))
        t2 = ps.sine_taper((2,))
        want = (t1.ft(k[:, :1], ps.Box((5.0,)))
                * t2.ft(k[:, 1:], ps.Box((7.0,))))
        np.testing.assert_allclose(got, want, atol=1e-12)

    def test_2d_against_direct_quadrature(self):
        window = ps.Box((4.0, 6.0))
        taper = ps.sine_taper((2, 3))
        k = np.array([0.9, -1.7])
        xs = np.linspace(-2.0, 2.0, 4001)
        ys = np.linspace(-3.0, 3.0, 4001)
        tx = np.sqrt(2.0 / 4.0) * np.sin(2.0 * np.pi * (xs + 2.0) / 4.0)
        ty = np.sqrt(2.0 / 6.0) * np.sin(3.0 * np.pi * (ys + 3.0) / 6.0)
        ix = integrate.simpson(tx * np.exp(-1j * k[0] * xs), x=xs)
        iy = integrate.simpson(ty * np.exp(-1j * k[1] * ys), x=ys)
        got = taper.ft(k[None, :], window)[0]
        assert got == pytest.approx(ix * iy, abs=1e-9)

    def test_continuity_at_singular_point(self):
        window = ps.Box((5.0,))
        taper = ps.sine_taper((3,))
        a = 3.0 * np.pi / 5.0
        at = taper.ft(np.array([[a]]), window)[0]
        near = taper.ft(np.array([[a + 1e-9], [a - 1e-9]]), window)
        np.testing.assert_allclose(near, at, atol=1e-7)


class TestTaperEvaluation:
    def test_sine_eval_matches_formula_and_masks(self):
        window = ps.Box((5.0, 7.0))
        taper = ps.sine_taper((1, 2))
        pts = np.array([[0.0, 0.0], [1.0, -2.0], [2.5001, 0.0]])
        got = taper.eval(pts, window)
        want0 = (np.sqrt(2.0 / 5.0) * np.sin(np.pi * 2.5 / 5.0)
                 * np.sqrt(2.0 / 7.0) * np.sin(2.0 * np.pi * 3.5 / 7.0))
        assert got[0] == pytest.approx(want0, abs=1e-12)
        assert got[2] == 0.0

    @pytest.mark.parametrize("index", [(1, 1), (1, 2), (2, 2), (3, 1)])
    def test_normalization(self, index):
        window = ps.Box((5.0, 7.0))
        taper = ps.sine_taper(index)
        xs = np.linspace(-2.5, 2.5, 2049)
        ys = np.linspace(-3.5, 3.5, 2049)
        xx, yy = np.meshgrid(xs, ys, indexing="ij")
        pts = np.column_stack([xx.ravel(), yy.ravel()])
        vals = taper.eval(pts, window).reshape(xx.shape)
        norm = integrate.simpson(integrate.simpson(vals ** 2, x=ys, axis=1), x=xs)
        assert norm == pytest.approx(1.0, abs=1e-10)

    def test_family_orthogonality(self):
        window = ps.Box((5.0, 7.0))
        family = ps.sine_taper_family(4, 2)
        xs = np.linspace(-2.5, 2.5, 1025)
        ys = np.linspace(-3.5, 3.5, 1025)
        xx, yy = np.meshgrid(xs, ys, indexing="ij")
        pts = np.column_stack([xx.ravel(), yy.ravel()])
        fields = [t.eval(pts, window).reshape(xx.shape) for t in family]
        for i in range(4):
            for j in range(i + 1, 4):
                inner = integrate.simpson(
                    integrate.simpson(fields[i] * fields[j], x=ys, axis=1), x=xs)
                assert abs(inner) < 1e-10

    def test_indicator_taper(self):
        window = ps.Box((5.0, 7.0))
        taper = ps.indicator_taper()
        pts = np.array([[0.0, 0.0], [10.0, 0.0]])
        got = taper.eval(pts, window)
        assert got[0] == pytest.approx(1.0 / np.sqrt(35.0))
        assert got[1] == 0.0
        # transform at zero is sqrt of the window volume
        assert taper.ft(np.zeros((1, 2)), window)[0] == pytest.approx(np.sqrt(35.0))

    def test_ball_windows_rejected(self):
        with pytest.raises(ValidationError):
            ps.sine_taper((1, 1)).eval(np.zeros((1, 2)), ps.Ball(3.0))


class TestFamilyConstruction:
    def test_exact_square(self):
        fam = ps.sine_taper_family(4, 2)
        assert [t.index for t in fam] == [(1, 1), (1, 2), (2, 1), (2, 2)]

    def test_partial_square_row_major(self):
        fam = ps.sine_taper_family(5, 2)
        assert [t.index for t in fam] == [(1, 1), (1, 2), (1, 3), (2, 1), (2, 2)]

    def test_one_dimensional(self):
        fam = ps.sine_taper_family(3, 1)
        assert [t.index for t in fam] == [(1,), (2,), (3,)]

    def test_bad_inputs(self):
        with pytest.raises(ValidationError):
            ps.sine_taper_family(0, 2)
        with pytest.raises(ValidationError):
            ps.sine_taper((0, 1))

    def test_descriptor(self):
        assert ps.sine_taper((2, 1)).descriptor == "sine21"
