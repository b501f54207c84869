import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wilsonlab import contin, grid
from wilsonlab.errors import BadParameters, DimensionMismatch, OffGridShift, PeriodTooSmall, TooLarge

SPECS = [grid.make_grid(1, 4, 8), grid.make_grid(1, 2, 6), grid.make_grid(2, 2, 4), grid.make_grid(3, 2, 2)]
spec_st = st.sampled_from(SPECS)


def _signal(spec, seed):
    return grid.random_signal(spec, seed)


def test_make_grid():
    s = grid.make_grid(1, 4, 8)
    assert s.L == 32 and s.size == 32
    s = grid.make_grid(2, 2, 4)
    assert s.L == 8 and s.size == 64
    with pytest.raises(BadParameters):
        grid.make_grid(1, 3, 8)
    with pytest.raises(BadParameters):
        grid.make_grid(1, 4, 7)
    with pytest.raises(BadParameters):
        grid.make_grid(0, 4, 8)
    with pytest.raises(TooLarge):
        grid.make_grid(3, 64, 64)


def test_signal_norm_weight():
    spec = grid.make_grid(2, 2, 4)
    f = grid.GridSignal(spec, np.ones(spec.size))
    assert f.norm() == pytest.approx(np.sqrt(spec.size / 16))
    with pytest.raises(DimensionMismatch):
        grid.GridSignal(spec, np.ones(5))


def test_tf_shift_examples():
    spec = grid.make_grid(1, 4, 8)
    f = _signal(spec, 0)
    assert np.array_equal(grid.tf_shift(f, [0], [0]).values, f.values)
    d = grid.delta(spec)
    out = grid.translate(d, [0.5])
    assert np.argmax(np.abs(out.values)) == 4
    m = grid.tf_shift(d, [0.5], [3])
    assert abs(m.values[4]) == pytest.approx(1)
    assert m.values[4] == pytest.approx(np.exp(2j * np.pi * 3 * 4 / 8))
    with pytest.raises(OffGridShift):
        grid.translate(f, [1 / 16])
    with pytest.raises(OffGridShift):
        grid.modulate(f, [1 / 8])


def test_modulation_translation_commutator():
    spec = grid.make_grid(1, 4, 8)
    f = _signal(spec, 1)
    for lam, gam in [(0.5, 3), (1.25, 1), (-0.375, 2.5)]:
        mt = grid.modulate(grid.translate(f, [lam]), [gam])
        tm = grid.translate(grid.modulate(f, [gam]), [lam])
        assert np.allclose(mt.values, np.exp(2j * np.pi * gam * lam) * tm.values, atol=1e-13)


def test_dft_examples():
    spec = grid.make_grid(1, 4, 8)
    d = grid.delta(spec) * spec.r
    assert np.allclose(grid.dft(d).values, 1.0)
    f = _signal(spec, 2)
    assert np.max(np.abs(grid.dft(grid.idft(grid.GridSignal(spec, f.values, "freq"))).values - f.values)) < 1e-13
    g = grid.random_symmetric_window(spec, 3)
    assert np.max(np.abs(grid.dft(g).values.imag)) <= 1e-13
    with pytest.raises(BadParameters):
        grid.dft(f, "sideways")


def test_dft_frequency_convention():
    # a modulation by gamma moves the spectrum by gamma*P bins
    spec = grid.make_grid(1, 4, 8)
    one = grid.GridSignal(spec, np.ones(spec.size))
    spec_vals = grid.dft(grid.modulate(one, [3])).values
    assert np.argmax(np.abs(spec_vals)) == 3 * spec.P


def test_zak_examples():
    spec = grid.make_grid(1, 4, 8)
    z = grid.zak(grid.delta(spec)).values
    assert np.allclose(z[0], 1) and np.allclose(z[1:], 0)
    f = _signal(spec, 4)
    assert np.max(np.abs(grid.inverse_zak(grid.zak(f)).values - f.values)) < 1e-13


def test_zak_cell_shift_covariance():
    spec = grid.make_grid(1, 4, 8)
    k = np.arange(spec.P)
    for seed in range(10):
        f = _signal(spec, seed)
        lhs = grid.zak(grid.translate(f, [1])).values
        rhs = np.exp(-2j * np.pi * k / spec.P)[None, :] * grid.zak(f).values
        assert np.allclose(lhs, rhs, atol=1e-12)
        j = np.arange(spec.r)
        lhs = grid.zak(grid.modulate(f, [3])).values
        rhs = np.exp(2j * np.pi * 3 * j / spec.r)[:, None] * grid.zak(f).values
        assert np.allclose(lhs, rhs, atol=1e-12)


def test_zak_quasi_periodic():
    spec = grid.make_grid(2, 2, 4)
    f = _signal(spec, 5)
    z = grid.zak(f)
    for j, k in [((1, 2), (0, 1)), ((3, 0), (1, 1))]:
        jj = (j[0] + spec.r, j[1] - 2 * spec.r)
        kk = (k[0], k[1])
        expected = np.exp(2j * np.pi * (kk[0] * 1 + kk[1] * (-2)) / spec.P) * z.at(j, k)
        assert z.at(jj, kk) == pytest.approx(expected)
        assert z.at(j, (k[0] + spec.P, k[1])) == pytest.approx(z.at(j, k))


def test_zak_norm():
    for spec in SPECS:
        f = _signal(spec, 6)
        z = grid.zak(f).values
        assert np.sum(np.abs(z) ** 2) == pytest.approx(spec.P ** spec.d * np.sum(np.abs(f.values) ** 2))


def test_periodize_examples():
    spec = grid.make_grid(1, 4, 8)
    cos = contin.builtin_window("cos")
    g = grid.periodize_sample(cos, spec)
    x = grid.positions(spec)
    assert np.allclose(g.values, np.where(np.abs(x) <= 1, np.cos(np.pi * x / 2), 0), atol=1e-15)
    tent = contin.builtin_window("tent")
    g = grid.periodize_sample(tent, spec)
    assert np.allclose(g.values, np.sqrt(np.clip(1 - np.abs(x), 0, None)), atol=1e-15)
    z = grid.periodize_sample(lambda t: np.zeros_like(t), spec, support=1.0)
    assert not np.any(z.values)
    with pytest.raises(PeriodTooSmall):
        grid.periodize_sample(lambda t: np.exp(-t * t), spec)


def test_periodize_wraps_long_support():
    spec = grid.make_grid(1, 2, 4)
    g = grid.periodize_sample(lambda t: np.where(np.abs(t) <= 1.5, 1.0, 0.0), spec, support=1.5)
    # two periods overlap where 0.5 <= |x| <= 1.5 modulo 2
    x = grid.positions(spec)
    expected = 1.0 + (np.abs(x) >= 0.5)
    assert np.allclose(g.values.real, expected)


def test_random_symmetric_window():
    spec = grid.make_grid(2, 2, 4)
    g = grid.random_symmetric_window(spec, 1)
    assert g.norm() == pytest.approx(1, abs=1e-13)
    assert np.max(np.abs(grid.dft(g).values.imag)) <= 1e-13
    assert np.allclose(g.values, grid.reversal(g.values))
    h = grid.random_symmetric_window(spec, 2)
    assert (g - h).norm() > 0
    assert np.array_equal(g.values, grid.random_symmetric_window(spec, 1).values)


def test_random_hermitian_window():
    spec = grid.make_grid(2, 2, 4)
    g = grid.random_hermitian_window(spec, 1)
    assert g.norm() == pytest.approx(1)
    assert np.max(np.abs(grid.dft(g).values.imag)) <= 1e-13
    assert np.allclose(grid.reversal(g.values), g.values.conj())


@settings(max_examples=60, deadline=None)
@given(spec_st, st.integers(0, 10_000), st.integers(-40, 40), st.integers(-40, 40))
def test_unitary_operations(spec, seed, a, b):
    f = _signal(spec, seed)
    n = f.norm()
    lam = [a / spec.r] * spec.d
    gam = [b / spec.P] * spec.d
    assert grid.tf_shift(f, lam, gam).norm() == pytest.approx(n, rel=1e-12)
    assert grid.dft(f).norm() == pytest.approx(n, rel=1e-12)
    fh = grid.GridSignal(spec, f.values, "freq")
    assert grid.idft(fh).norm() == pytest.approx(fh.norm(), rel=1e-12)
    z = grid.zak(f).values
    assert np.sqrt(np.sum(np.abs(z) ** 2) * spec.weight / spec.P ** spec.d) == pytest.approx(n, rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(spec_st, st.integers(0, 10_000), st.lists(st.integers(-30, 30), min_size=4, max_size=4))
def test_tf_shift_composition(spec, seed, k):
    f = _signal(spec, seed)
    l1, g1 = [k[0] / spec.r] * spec.d, [k[1] / 2] * spec.d
    l2, g2 = [k[2] / spec.r] * spec.d, [k[3] / 2] * spec.d
    lhs = grid.tf_shift(grid.tf_shift(f, l1, g1), l2, g2)
    rhs = grid.tf_shift(f, np.add(l1, l2), np.add(g1, g2))
    # M_g2 T_l2 M_g1 T_l1 = exp(-2 pi i <g1, l2>) M_{g1+g2} T_{l1+l2}
    scalar = np.exp(-2j * np.pi * np.dot(g1, l2))
    assert np.allclose(lhs.values, scalar * rhs.values, atol=1e-12)
    # in the T_l M_g ordering the scalar is exp(2 pi i <g2, l1>)
    tm = lambda h, l, g: grid.translate(grid.modulate(h, g), l)
    lhs = tm(tm(f, l1, g1), l2, g2)
    rhs = tm(f, np.add(l1, l2), np.add(g1, g2))
    assert np.allclose(lhs.values, np.exp(2j * np.pi * np.dot(g2, l1)) * rhs.values, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(spec_st, st.integers(0, 10_000))
def test_spectrum_real_iff_hermitian(spec, seed):
    f = _signal(spec, seed)
    herm = grid.GridSignal(spec, (f.values + grid.reversal(f.values).conj()) / 2)
    assert np.max(np.abs(grid.dft(herm).values.imag)) < 1e-12
    real_spec = grid.GridSignal(spec, grid.dft(f).values.real, "freq")
    back = grid.idft(real_spec).values
    assert np.allclose(grid.reversal(back), back.conj(), atol=1e-12)
    # a generic signal has neither property
    assert np.max(np.abs(grid.dft(f).values.imag)) > 1e-3
