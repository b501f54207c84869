import numpy as np
import pytest
from scipy import integrate

from wilsonlab import contin
from wilsonlab import groups as grp
from wilsonlab.errors import AlphaNotInDual, BadParameters, NoTimeEvaluator, TruncationInsufficient, UnknownName

SPOT = [0.0, 0.1, 0.25, 0.5, 1.0, 1.7, 3.3, 7.5, 12.25]


@pytest.mark.parametrize("name", ["cos", "tent"])
def test_unit_norm(name):
    w = contin.builtin_window(name)
    assert contin.time_norm(w) == pytest.approx(1, abs=1e-12)
    # the frequency side by Plancherel
    val = 2 * integrate.quad(lambda t: abs(w.freq(t)) ** 2, 0, np.inf, limit=2000)[0]
    assert val == pytest.approx(1, abs=1e-6)


def test_indicator_norm():
    w = contin.builtin_window("indicator_D")
    # four times the area of D, measured with a fine midpoint rule
    n = 800
    x = (np.arange(4 * n) + 0.5) / n
    y = (np.arange(2 * n) + 0.5) / n
    X, Y = np.meshgrid(x, y, indexing="ij")
    area = np.sum(w.freq(X, Y) != 0) / n ** 2
    assert area == pytest.approx(4, abs=1e-2)
    energy = np.sum(np.abs(w.freq(X, Y)) ** 2) / n ** 2
    assert energy == pytest.approx(1, abs=1e-2)


@pytest.mark.parametrize("name", ["cos", "tent"])
def test_quadrature_matches_closed_form(name):
    w = contin.builtin_window(name)
    for om in SPOT:
        assert abs(w.freq_quadrature(om) - w.freq(np.array([om]))[0]) <= 1e-10
        assert abs(w.freq(np.array([-om]))[0] - w.freq(np.array([om]))[0]) <= 1e-14
    assert np.max(np.abs(np.imag(w.freq(np.linspace(-40, 40, 2001))))) <= 1e-11


def test_generic_quadrature_route():
    # the cos window goes through the weighted-quad path
    w = contin.builtin_window("cos")
    assert w.extra.get("quadrature") is None
    assert abs(w.freq_quadrature(0.0) - 4 / np.pi) <= 1e-12


@pytest.mark.parametrize("name", ["cos", "tent"])
def test_decay_bound(name):
    assert contin.check_decay(contin.builtin_window(name)) <= 1.0


def test_unknown_and_missing_evaluators():
    with pytest.raises(UnknownName):
        contin.builtin_window("gauss")
    w = contin.builtin_window("indicator_D")
    with pytest.raises(NoTimeEvaluator):
        contin.partition_of_unity_check(w, 1.0)
    with pytest.raises(NoTimeEvaluator):
        w.freq_quadrature(0.5)


def test_partition_of_unity():
    for name in ("cos", "tent"):
        dev, c = contin.partition_of_unity_check(contin.builtin_window(name), 1.0)
        assert dev <= 1e-12 and c == pytest.approx(1)
    dev, _ = contin.partition_of_unity_check(contin.builtin_window("cos"), 2.0)
    assert dev > 0.4


def test_painless_guard():
    w = contin.builtin_window("cos")
    out = contin.painless_bound(w, 1.0, 0.5)
    assert out["lower"] == pytest.approx(2) and out["upper"] == pytest.approx(2)
    with pytest.raises(BadParameters):
        contin.painless_bound(w, 0.5, 1.0)


def test_counterexample_point():
    w = contin.builtin_window("indicator_D")
    pt = np.array([[1.5, 1.25]])
    assert contin.in_omega(pt)[0]
    assert contin.alternating_sum(w, (1, 1), pt)[0] == pytest.approx(0.5, abs=1e-12)


def test_counterexample_report():
    rep = contin.counterexample_report()
    assert rep["points"] == 400 and rep["all_interior"]
    assert rep["wilson_alternating_sum_deviation"] <= 1e-12
    assert rep["gabor_t0_deviation"] <= 1e-12
    assert rep["gabor_other_alpha_max"] <= 1e-12


def test_indicator_disjoint_alpha():
    w = contin.builtin_window("indicator_D")
    pts = contin.omega_interior_grid(10)
    tab = contin.autocorr_continuous(w, 1.0, 0.5, [(20, 0), (0, 20)], pts)
    assert all(np.all(t.values == 0) for t in tab.values())


def test_alpha_not_in_dual():
    w = contin.builtin_window("cos")
    with pytest.raises(AlphaNotInDual):
        contin.autocorr_continuous(w, 0.5, 1.0, 0.5, [0.1])
    with pytest.raises(AlphaNotInDual):
        contin.autocorr_continuous(w, 0.5, grp.make_group(1, [(1,)]), 1.0, [0.1])
    with pytest.raises(TruncationInsufficient):
        contin.autocorr_continuous(w, 0.5, 1.0, 0.0, [0.1], radius=2.0)


@pytest.mark.parametrize("name", ["cos", "tent"])
def test_truncation_certificate(name):
    w = contin.builtin_window(name)
    om = np.linspace(0, 0.5, 9)
    base = contin.autocorr_continuous(w, 0.5, 1.0, [0.0, 1.0, -2.0], om)
    for key, res in base.items():
        assert res.error_bound < 1e-10
        wide = contin.autocorr_continuous(w, 0.5, 1.0, key, om, radius=res.radius + 5)[key]
        assert np.max(np.abs(wide.values - res.values)) <= res.error_bound


def test_example12_lattices():
    rep = contin.example12_report()
    for name in ("cos", "tent"):
        rows = rep[name]["lattices"]
        assert rows["M_{m/2}T_n"]["deviation"] <= 1e-8
        assert rep[name]["certified"] == ["M_{m/2}T_n"]
    assert rep["cos"]["lattices"]["M_mT_{n/2}"]["per_alpha"]["0"] > 1.0
    assert rep["tent"]["lattices"]["M_mT_{n/2}"]["per_alpha"]["0"] > 1.0


def test_walnut_matches_lattice_sum():
    # the time-side and frequency-side tightness tests agree
    w = contin.builtin_window("cos")
    cor = contin.walnut_correlations(w, 1.0, 0.5)
    assert np.max(np.abs(cor[0] - 1)) <= 1e-12
    assert all(np.max(np.abs(v)) <= 1e-12 for k, v in cor.items() if k)
    cor = contin.walnut_correlations(w, 0.5, 1.0)
    assert np.max(np.abs(cor[1])) > 0.1


@pytest.mark.parametrize("name,rate", [("cos", 2.0), ("tent", 1.5)])
def test_cross_model_convergence(name, rate):
    errs = [contin.cross_model_t0(name, 8, r) for r in (16, 32, 64)]
    assert errs[0] > errs[1] > errs[2]
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders > rate - 0.1)


@pytest.mark.xfail(strict=True, reason="sampling error is O(1/r^2) for cos and O(1/r^1.5) for tent; "
                   "r=16 leaves about 4e-3 and 3e-2")
@pytest.mark.parametrize("name", ["cos", "tent"])
def test_cross_model_agreement_at_stated_tolerance(name):
    assert contin.cross_model_t0(name, 8, 16) <= 1e-4
