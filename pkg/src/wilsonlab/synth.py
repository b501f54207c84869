"""Gabor and Wilson system families on the finite model.

A family keeps its members as rows of a read-only complex matrix (one row
per member, row-major flattened samples) plus a parallel tuple of labels.
When the family is shift invariant, ``si_form`` records the generators, the
half-integer translation offsets and the implied lattice ``Z_P^d``; members
are then ordered generator-major, offset next, integer translate last.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import groups as grp
from .errors import DimensionMismatch, IncompatibleGrid, NotAGroupElement, WrongDimension
from .grid import GridSignal, GridSpec, _modulation_phase


@dataclass(frozen=True, eq=False)
class SIForm:
    """Shift-invariant factorization: members T_{offset + n} gen, n in Z_P^d."""

    generators: np.ndarray  # (n_gen, L^d)
    generator_labels: tuple
    offsets: tuple  # half-integer translation offsets
    density: float  # members per unit volume per generator, i.e. |offsets|


class SystemFamily:
    """An ordered family of grid signals.

    Either pass ``vectors`` and ``labels`` directly, or only an ``si_form``;
    in the latter case members are expanded on first access.
    """

    def __init__(self, spec: GridSpec, vectors=None, labels=None, si_form: SIForm | None = None,
                 kind: str = ""):
        self.spec = spec
        self.si_form = si_form
        self.kind = kind
        if vectors is None:
            if si_form is None:
                raise DimensionMismatch("family needs members or a shift-invariant form")
            self._vectors = None
            self._labels = None
        else:
            labels = tuple(labels)
            vecs = np.array(vectors, dtype=complex).reshape(len(labels), spec.size)
            vecs.setflags(write=False)
            self._vectors, self._labels = vecs, labels

    def _expand(self):
        vecs, labels = expand_si(self.spec, self.si_form)
        vecs.setflags(write=False)
        self._vectors, self._labels = vecs, labels

    @property
    def vectors(self) -> np.ndarray:
        if self._vectors is None:
            self._expand()
        return self._vectors

    @property
    def labels(self) -> tuple:
        if self._labels is None:
            self._expand()
        return self._labels

    @property
    def count(self) -> int:
        if self._labels is None:
            si = self.si_form
            return len(si.generator_labels) * len(si.offsets) * self.spec.P ** self.spec.d
        return len(self._labels)

    def member(self, i: int) -> GridSignal:
        return GridSignal(self.spec, self.vectors[i])

    @property
    def members(self):
        return [self.member(i) for i in range(self.count)]

    def index(self) -> dict:
        return {lab: i for i, lab in enumerate(self.labels)}


def _roll(arr: np.ndarray, spec: GridSpec, lam) -> np.ndarray:
    """Translate rows of ``arr`` (shape (..., L^d)) by the half-integer vector lam."""
    steps = np.rint(np.asarray(lam, dtype=float) * spec.r).astype(int)
    if np.max(np.abs(np.asarray(lam, dtype=float) * spec.r - steps), initial=0) > 1e-9:
        raise IncompatibleGrid(f"translation {lam} is not on the grid")
    lead = arr.shape[:-1]
    a = arr.reshape(lead + spec.shape)
    axes = tuple(range(len(lead), len(lead) + spec.d))
    return np.roll(a, tuple(int(s) for s in steps), axis=axes).reshape(arr.shape)


def expand_si(spec: GridSpec, si: SIForm):
    """Members and (generator label, offset, n) labels of a shift-invariant form."""
    cells = list(itertools.product(range(spec.P), repeat=spec.d))
    rows, labels = [], []
    for gen, glab in zip(si.generators, si.generator_labels):
        for off in si.offsets:
            shifted = _roll(gen, spec, off)
            for n in cells:
                rows.append(_roll(shifted, spec, n))
                labels.append((glab, tuple(off), n))
    return np.array(rows).reshape(len(labels), spec.size), tuple(labels)


def _family_from_si(spec, si, kind):
    return SystemFamily(spec, si_form=si, kind=kind)


def _check_window(g: GridSignal, G: grp.SeparableGroup):
    if not isinstance(g, GridSignal):
        raise IncompatibleGrid("window must be a GridSignal")
    if g.spec.d != G.d:
        raise IncompatibleGrid(f"window has d={g.spec.d}, group has d={G.d}")
    if g.spec.r % 2 or g.spec.P % 2:
        raise IncompatibleGrid("grid needs even P and r")


def modulated(g: GridSignal, gammas) -> np.ndarray:
    """Rows M_gamma g for each gamma."""
    return np.array([(g.values * _modulation_phase(g.spec, gm)).reshape(-1) for gm in gammas])


def half_offsets(G: grp.SeparableGroup) -> tuple:
    return tuple(tuple(s / 2 for s in sigma) for sigma in G.elements)


def gabor_family(g: GridSignal, G: grp.SeparableGroup) -> SystemFamily:
    """Members T_lambda M_gamma g, lambda over half Lambda mod P, gamma over Z_r^d."""
    _check_window(g, G)
    spec = g.spec
    gammas = list(itertools.product(range(spec.r), repeat=spec.d))
    si = SIForm(modulated(g, gammas), tuple(gammas), half_offsets(G), float(G.order))
    return _family_from_si(spec, si, "gabor")


def wilson_coefficient(G: grp.SeparableGroup, gamma, modulus: int) -> float:
    info = grp.orbit_and_stabilizer(G, gamma, modulus)
    return 2.0 ** (-G.k) * np.sqrt(len(info.orbit))


def wilson_generator(g: GridSignal, G: grp.SeparableGroup, h, gamma) -> GridSignal:
    """c_gamma T_{h/2} sum_sigma (-1)^<I(h)+gamma, sigma> M_{R_sigma gamma} g."""
    _check_window(g, G)
    if tuple(grp.parity(h)) not in G or len(h) != G.d:
        raise NotAGroupElement(f"h={tuple(h)} is not in the group")
    spec = g.spec
    gamma = tuple(int(x) % spec.r for x in gamma)
    if len(gamma) != G.d:
        raise DimensionMismatch("gamma has the wrong length")
    if grp.is_vacuous(G, h, gamma, spec.r):
        return GridSignal(spec, np.zeros(spec.shape))
    ih = grp.iso_I(G, h)
    acc = np.zeros(spec.size, dtype=complex)
    for sigma in G.elements:
        sign = grp.pairing(tuple(a + b for a, b in zip(ih, gamma)), sigma)
        freq = grp.reflect(sigma, gamma, spec.r)
        acc += sign * (g.values * _modulation_phase(spec, freq)).reshape(-1)
    acc *= wilson_coefficient(G, gamma, spec.r)
    acc = _roll(acc, spec, [s / 2 for s in h])
    return GridSignal(spec, acc)


def wilson_labels(G: grp.SeparableGroup, r: int):
    """Non-vacuous (gamma, h) pairs in lexicographic order."""
    out = []
    for gamma in grp.fundamental_domain(G, r):
        for h in sorted(G.elements):
            if not grp.is_vacuous(G, h, gamma, r):
                out.append((gamma, h))
    return out


def wilson_family(g: GridSignal, G: grp.SeparableGroup) -> SystemFamily:
    """Members T_n psi_{h,gamma}, n in Z_P^d, ordered by (gamma, h, n)."""
    _check_window(g, G)
    spec = g.spec
    pairs = wilson_labels(G, spec.r)
    gens = np.array([wilson_generator(g, G, h, gm).flat() for gm, h in pairs])
    si = SIForm(gens, tuple(pairs), ((0.0,) * spec.d,), 1.0)
    return _family_from_si(spec, si, "wilson")


# 1-D factor operators of the tensor construction.  Each branch is a list of
# (coefficient, frequency) terms plus a half-shift bit.
def _axis_branches(r: int):
    out = [("id", 0, 0, [(1.0, 0)])]
    for m in range(1, r // 2):
        s = (-1) ** m
        out.append(("plus", m, 0, [(1 / np.sqrt(2), m), (s / np.sqrt(2), -m)]))
        out.append(("minus", m, 1, [(1 / np.sqrt(2), m), (-s / np.sqrt(2), -m)]))
    # the self-paired residue r/2 keeps a single modulate
    out.append(("half", r // 2, (r // 2) % 2, [(1.0, r // 2)]))
    return out


def tensor_wilson_family(g: GridSignal) -> SystemFamily:
    """Two-dimensional product of one-dimensional Wilson branches applied to g."""
    spec = g.spec
    if spec.d != 2:
        raise WrongDimension(f"tensor construction needs d=2, got d={spec.d}")
    branches = _axis_branches(spec.r)
    gens, labels = [], []
    for b1, b2 in itertools.product(branches, repeat=2):
        acc = np.zeros(spec.size, dtype=complex)
        for (c1, f1), (c2, f2) in itertools.product(b1[3], b2[3]):
            acc += c1 * c2 * (g.values * _modulation_phase(spec, (f1, f2))).reshape(-1)
        acc = _roll(acc, spec, (b1[2] / 2, b2[2] / 2))
        gens.append(acc)
        labels.append(((b1[0], b1[1]), (b2[0], b2[1])))
    si = SIForm(np.array(gens), tuple(labels), ((0.0, 0.0),), 1.0)
    return _family_from_si(spec, si, "tensor_wilson")


def canonical_phase(rows: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Rotate each row so its first entry of non-negligible size is positive real."""
    rows = np.array(rows, dtype=complex)
    for i, row in enumerate(rows):
        mags = np.abs(row)
        if mags.max(initial=0) == 0:
            continue
        j = int(np.argmax(mags > tol * mags.max()))
        rows[i] = row * (np.conj(row[j]) / mags[j])
    return rows


def match_members(A: SystemFamily, B: SystemFamily) -> np.ndarray:
    """Permutation ``perm`` with B.vectors[perm[i]] ~ A.vectors[i] up to phase."""
    if A.count != B.count or A.spec != B.spec:
        raise DimensionMismatch("families differ in size or grid")
    a = canonical_phase(A.vectors)
    b = canonical_phase(B.vectors)
    # nearest neighbour in l2; O(n^2) is fine at these sizes
    dist = (np.sum(np.abs(a) ** 2, 1)[:, None] + np.sum(np.abs(b) ** 2, 1)[None, :]
            - 2 * np.real(a.conj() @ b.T))
    perm = np.argmin(dist, axis=1)
    return perm


def reorder(F: SystemFamily, perm) -> SystemFamily:
    perm = list(int(p) for p in perm)
    return SystemFamily(F.spec, F.vectors[perm], tuple(F.labels[p] for p in perm), None, F.kind)
