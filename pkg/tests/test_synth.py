import itertools

import numpy as np
import pytest

from wilsonlab import frames, grid, synth
from wilsonlab import groups as grp
from wilsonlab.errors import IncompatibleGrid, NotAGroupElement, WrongDimension

GRIDS = [(1, 2, 2), (1, 4, 8), (1, 2, 6), (2, 2, 2), (2, 2, 4), (3, 2, 2)]


def _mod(g, freq):
    return grid.modulate(g, freq).values.reshape(-1)


def _contains_up_to_phase(F, vec, tol=1e-12):
    """Index of a member equal to ``vec`` times a unimodular scalar, else None."""
    V = F.vectors
    nv = np.linalg.norm(vec)
    ok = (np.abs(np.abs(V.conj() @ vec) - nv * nv) <= tol * nv * nv) & \
        (np.abs(np.linalg.norm(V, axis=1) - nv) <= tol * nv)
    hits = np.flatnonzero(ok)
    return int(hits[0]) if len(hits) else None


def test_gabor_counts():
    spec = grid.make_grid(1, 2, 2)
    # redundancy 1 on a 4-dimensional space
    assert synth.gabor_family(grid.delta(spec), grp.trivial_group(1)).count == 4
    spec = grid.make_grid(1, 4, 8)
    F = synth.gabor_family(grid.delta(spec), grp.make_group(1, [(1,)]))
    assert F.count == 64 and len(F.labels) == 64
    spec = grid.make_grid(2, 2, 4)
    assert synth.gabor_family(grid.delta(spec), grp.make_group(2, [(1, 1)])).count == 128


@pytest.mark.parametrize("d,P,r", GRIDS)
def test_cardinalities(d, P, r):
    spec = grid.make_grid(d, P, r)
    g = grid.random_symmetric_window(spec, 0)
    for G in grp.separable_groups(d, up_to_permutation=False):
        assert synth.gabor_family(g, G).count == G.order * spec.size
        W = synth.wilson_family(g, G)
        assert W.count == spec.size
        assert W.vectors.shape == (spec.size, spec.size)


def test_wilson_count_example():
    spec = grid.make_grid(1, 4, 8)
    G = grp.make_group(1, [(1,)])
    pairs = synth.wilson_labels(G, 8)
    # gamma = 0 and 4 keep one h each, the three free orbits keep both
    assert len(pairs) == 8
    assert synth.wilson_family(grid.random_symmetric_window(spec, 1), G).count == 32


def test_si_form_expansion_matches_members():
    spec = grid.make_grid(2, 2, 4)
    G = grp.make_group(2, [(1, 1)])
    g = grid.random_hermitian_window(spec, 2)
    F = synth.gabor_family(g, G)
    si = F.si_form
    assert F.count == len(si.generator_labels) * len(si.offsets) * spec.P ** 2
    for i, (glab, off, n) in list(enumerate(F.labels))[::17]:
        # members are T_lambda M_gamma g
        expected = grid.translate(grid.modulate(g, glab), np.add(off, n))
        assert np.allclose(F.vectors[i], expected.flat())


def test_wilson_generator_examples():
    spec = grid.make_grid(1, 4, 8)
    G = grp.make_group(1, [(1,)])
    g = grid.random_symmetric_window(spec, 3)
    psi = synth.wilson_generator(g, G, (0,), (0,))
    assert np.allclose(psi.values, g.values)
    assert not np.any(synth.wilson_generator(g, G, (1,), (0,)).values)
    for gamma in (1, 2, 3):
        psi = synth.wilson_generator(g, G, (0,), (gamma,))
        expected = (_mod(g, [gamma]) + (-1) ** gamma * _mod(g, [-gamma])) / np.sqrt(2)
        assert np.allclose(psi.flat(), expected)
    with pytest.raises(NotAGroupElement):
        g2 = grid.random_symmetric_window(grid.make_grid(2, 2, 4), 0)
        synth.wilson_generator(g2, grp.make_group(2, [(1, 1)]), (1, 0), (0, 0))


def test_incompatible_window():
    G = grp.make_group(2, [(1, 1)])
    with pytest.raises(IncompatibleGrid):
        synth.gabor_family(grid.random_symmetric_window(grid.make_grid(1, 4, 8), 0), G)


@pytest.mark.parametrize("d,P,r", [(1, 4, 8), (2, 2, 4), (3, 2, 2)])
def test_vacuity_matches_zero_signal(d, P, r):
    spec = grid.make_grid(d, P, r)
    g = grid.random_symmetric_window(spec, 4)
    for G in grp.separable_groups(d):
        for gamma in grp.fundamental_domain(G, r):
            for h in G.elements:
                psi = synth.wilson_generator(g, G, h, gamma)
                assert (psi.norm() < 1e-12) == grp.is_vacuous(G, h, gamma, r)


def test_diagonal_group_branches():
    """Direct transcription of the three branches for the diagonal group on free orbits and gamma=0."""
    for d, P, r in [(1, 4, 8), (2, 2, 4)]:
        spec = grid.make_grid(d, P, r)
        G = grp.diagonal_group(d)
        g = grid.random_hermitian_window(spec, 5)
        W = synth.wilson_family(g, G)
        half = [0.5] * d
        expected = []
        for n in itertools.product(range(P), repeat=d):
            expected.append(grid.translate(g, n).flat())
        for gamma in itertools.product(range(r), repeat=d):
            neg = tuple((-x) % r for x in gamma)
            if neg == gamma or gamma > neg:
                continue
            s = (-1) ** sum(gamma)
            plus = (_mod(g, gamma) + s * _mod(g, [-x for x in gamma])) / np.sqrt(2)
            minus = (_mod(g, gamma) - s * _mod(g, [-x for x in gamma])) / np.sqrt(2)
            for n in itertools.product(range(P), repeat=d):
                expected.append(grid.translate(grid.GridSignal(spec, plus), n).flat())
                expected.append(grid.translate(grid.GridSignal(spec, minus), np.add(n, half)).flat())
        found = set()
        for vec in expected:
            idx = _contains_up_to_phase(W, vec)
            assert idx is not None
            found.add(idx)
        assert len(found) == len(expected)


def test_parseval_generators_have_unit_norm():
    for d, P, r, gens in [(1, 4, 8, [(1,)]), (2, 2, 4, [(1, 1)]), (2, 2, 4, [(1, 0), (0, 1)])]:
        spec = grid.make_grid(d, P, r)
        G = grp.make_group(d, gens)
        g, _ = frames.random_separable_window(spec, G, 6)
        h = frames.canonical_tight(g, G)
        W = synth.wilson_family(h, G)
        norms = np.linalg.norm(W.si_form.generators, axis=1) * np.sqrt(spec.weight)
        assert np.allclose(norms, 1, atol=1e-10)


def test_tensor_family_structure():
    spec = grid.make_grid(2, 2, 4)
    g, _ = frames.random_separable_window(spec, grp.full_group(2), 7)
    T = synth.tensor_wilson_family(g)
    assert T.count == spec.size
    # first branch is the plain integer translates
    for i, n in enumerate(itertools.product(range(2), repeat=2)):
        assert np.allclose(T.vectors[i], grid.translate(g, n).flat())
    with pytest.raises(WrongDimension):
        synth.tensor_wilson_family(grid.random_symmetric_window(grid.make_grid(1, 4, 8), 0))


def test_tensor_display_line():
    # 1/2 T_n T_{(1/2,0)} (M_(m1,m2) - (-1)^m1 M_(-m1,m2) + (-1)^m2 M_(m1,-m2) - (-1)^(m1+m2) M_-(m1,m2)) g
    spec = grid.make_grid(2, 2, 8)
    g, _ = frames.random_separable_window(spec, grp.full_group(2), 8)
    T = synth.tensor_wilson_family(g)
    W = synth.wilson_family(g, grp.full_group(2))
    m1, m2 = 1, 2
    vec = 0.5 * (_mod(g, (m1, m2)) - (-1) ** m1 * _mod(g, (-m1, m2))
                 + (-1) ** m2 * _mod(g, (m1, -m2)) - (-1) ** (m1 + m2) * _mod(g, (-m1, -m2)))
    for n in [(0, 0), (1, 0), (1, 1)]:
        member = grid.translate(grid.GridSignal(spec, vec), np.add(n, (0.5, 0))).flat()
        assert _contains_up_to_phase(T, member) is not None
        assert _contains_up_to_phase(W, member) is not None


@pytest.mark.parametrize("P,r", [(2, 4), (2, 8), (4, 4)])
def test_tensor_matches_full_group(P, r):
    spec = grid.make_grid(2, P, r)
    G = grp.full_group(2)
    g, _ = frames.random_separable_window(spec, G, 9)
    T = synth.tensor_wilson_family(g)
    W = synth.wilson_family(g, G)
    perm = synth.match_members(W, T)
    assert sorted(perm.tolist()) == list(range(W.count))
    a = synth.canonical_phase(W.vectors)
    b = synth.canonical_phase(synth.reorder(T, perm).vectors)
    assert np.max(np.abs(a - b)) < 1e-12


def test_canonical_phase():
    rows = np.array([[0, 1j, 2], [0, 0, -3]])
    out = synth.canonical_phase(rows)
    assert out[0, 1] == pytest.approx(1) and out[1, 2] == pytest.approx(3)
