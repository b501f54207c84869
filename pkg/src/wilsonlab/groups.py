"""Separable subgroups of Z^d/(2Z^d) and their reflection combinatorics.

A parity vector is a tuple of 0/1 ints, a coset representative of
Z^d/(2Z^d).  A separable group is generated by parity vectors with pairwise
disjoint supports; the support of the i-th generator is block ``S_i`` and its
smallest index is the anchor ``n_i``.  Coordinates are 0-based throughout.

The groups here act on integer vectors by coordinate sign flips
``R_sigma``.  The lattice ``Lambda`` is the union of the cosets
``sigma + 2Z^d`` over the group, and ``2 Lambda^perp`` is the set of integer
vectors whose coordinate sum over every block is even.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .errors import (
    BadModulus,
    DimensionMismatch,
    NotAGroupElement,
    OverlappingSupports,
    ZeroGenerator,
)

ParityVector = tuple  # tuple[int, ...] with entries in {0, 1}


def parity(v: Iterable[int]) -> ParityVector:
    """Reduce an integer vector to its {0,1} coset representative."""
    return tuple(int(x) % 2 for x in v)


def _check_dim(d: int, *vectors) -> None:
    for v in vectors:
        if len(v) != d:
            raise DimensionMismatch(f"expected length {d}, got {len(v)}")


@dataclass(frozen=True)
class SeparableGroup:
    d: int
    generators: tuple

    @property
    def k(self) -> int:
        return len(self.generators)

    @property
    def order(self) -> int:
        return 2 ** self.k

    @cached_property
    def blocks(self) -> tuple:
        return tuple(tuple(i for i, b in enumerate(s) if b) for s in self.generators)

    @cached_property
    def remainder(self) -> tuple:
        used = {i for block in self.blocks for i in block}
        return tuple(i for i in range(self.d) if i not in used)

    @cached_property
    def anchors(self) -> tuple:
        # n_i = min S_i; any member of S_i would do, min keeps runs reproducible
        return tuple(min(block) for block in self.blocks)

    @cached_property
    def elements(self) -> tuple:
        """All 2^k elements; index bit i is the coefficient of generator i."""
        out = []
        for idx in range(self.order):
            coeffs = [(idx >> i) & 1 for i in range(self.k)]
            out.append(self.combine(coeffs))
        return tuple(out)

    @cached_property
    def _element_set(self) -> frozenset:
        return frozenset(self.elements)

    def combine(self, coeffs: Sequence[int]) -> ParityVector:
        v = [0] * self.d
        for c, s in zip(coeffs, self.generators):
            if c % 2:
                v = [(a + b) % 2 for a, b in zip(v, s)]
        return tuple(v)

    def __contains__(self, sigma) -> bool:
        return len(sigma) == self.d and parity(sigma) in self._element_set

    def coefficients(self, sigma) -> tuple:
        """Generator coefficients of ``sigma``; they are read off at the anchors."""
        _check_dim(self.d, sigma)
        s = parity(sigma)
        if s not in self._element_set:
            raise NotAGroupElement(f"{tuple(sigma)} is not in the group")
        return tuple(s[n] for n in self.anchors)

    def index(self, sigma) -> int:
        return sum(c << i for i, c in enumerate(self.coefficients(sigma)))


def make_group(d: int, generators: Sequence[Sequence[int]] = ()) -> SeparableGroup:
    if d < 1:
        raise DimensionMismatch("dimension must be at least 1")
    gens = []
    for g in generators:
        _check_dim(d, g)
        p = parity(g)
        if not any(p):
            raise ZeroGenerator(f"generator {tuple(g)} is zero mod 2")
        gens.append(p)
    for (i, a), (j, b) in itertools.combinations(enumerate(gens), 2):
        shared = [n for n in range(d) if a[n] and b[n]]
        if shared:
            raise OverlappingSupports(
                f"generators {i} and {j} share support indices {shared}"
            )
    return SeparableGroup(d, tuple(gens))


def trivial_group(d: int) -> SeparableGroup:
    return make_group(d, [])


def full_group(d: int) -> SeparableGroup:
    return make_group(d, [tuple(int(i == j) for i in range(d)) for j in range(d)])


def diagonal_group(d: int) -> SeparableGroup:
    """The group generated by (1, ..., 1)."""
    return make_group(d, [(1,) * d])


def separable_groups(d: int, up_to_permutation: bool = True):
    """Enumerate separable subgroups of Z^d/(2Z^d).

    With ``up_to_permutation`` one group per multiset of block sizes is
    returned, blocks laid out on consecutive coordinates.
    """
    if up_to_permutation:
        for sizes in _block_size_multisets(d):
            gens, start = [], 0
            for s in sizes:
                gens.append(tuple(int(start <= i < start + s) for i in range(d)))
                start += s
            yield make_group(d, gens)
        return
    # every family of pairwise disjoint nonempty supports (each label 0 = unused)
    seen = set()
    for labels in itertools.product(range(d + 1), repeat=d):
        blocks = {}
        for i, lab in enumerate(labels):
            if lab:
                blocks.setdefault(lab, []).append(i)
        key = frozenset(tuple(b) for b in blocks.values())
        if key in seen:
            continue
        seen.add(key)
        gens = [tuple(int(i in b) for i in range(d)) for b in sorted(key)]
        yield make_group(d, gens)


def _block_size_multisets(d: int, max_part: int | None = None):
    """Non-increasing tuples of positive block sizes with sum <= d."""
    if max_part is None:
        max_part = d
    yield ()
    for first in range(min(d, max_part), 0, -1):
        for rest in _block_size_multisets(d - first, first):
            yield (first,) + rest


def reflect(sigma: Sequence[int], x: Sequence, modulus: int | None = None) -> tuple:
    """Coordinatewise sign flip ``R_sigma x``, reduced mod ``modulus`` if given."""
    if len(sigma) != len(x):
        raise DimensionMismatch(f"sigma has length {len(sigma)}, x has {len(x)}")
    out = tuple(-xi if si % 2 else xi for si, xi in zip(sigma, x))
    if modulus is not None:
        out = tuple(xi % modulus for xi in out)
    return out


@dataclass(frozen=True)
class OrbitInfo:
    orbit: tuple  # sorted orbit points
    stabilizer: tuple  # elements of G fixing gamma, in group order
    coset_reps: tuple  # one sigma per orbit point, aligned with ``orbit``


def _check_modulus(modulus):
    if modulus is not None and (modulus < 2 or modulus % 2):
        raise BadModulus(f"modulus must be an even integer >= 2, got {modulus}")


def orbit_and_stabilizer(G: SeparableGroup, gamma: Sequence[int], modulus: int | None = None) -> OrbitInfo:
    _check_dim(G.d, gamma)
    _check_modulus(modulus)
    base = tuple(int(g) for g in gamma)
    if modulus is not None:
        base = tuple(g % modulus for g in base)
    reps = {}
    stab = []
    for sigma in G.elements:
        y = reflect(sigma, base, modulus)
        reps.setdefault(y, sigma)
        if y == base:
            stab.append(sigma)
    orbit = tuple(sorted(reps))
    return OrbitInfo(orbit, tuple(stab), tuple(reps[y] for y in orbit))


def in_lambda(G: SeparableGroup, n: Sequence[int]) -> bool:
    """Is the integer vector ``n`` in the lattice union of sigma + 2Z^d?"""
    _check_dim(G.d, n)
    return parity(n) in G


def in_dual_two_lambda(G: SeparableGroup, alpha: Sequence[int]) -> bool:
    """Is ``alpha`` in 2 Lambda^perp, i.e. even coordinate sum on every block?"""
    _check_dim(G.d, alpha)
    return all(sum(int(alpha[j]) for j in block) % 2 == 0 for block in G.blocks)


def iso_I(G: SeparableGroup, sigma: Sequence[int]) -> ParityVector:
    """Self-duality isomorphism: generator i goes to the unit vector at its anchor."""
    coeffs = G.coefficients(sigma)
    v = [0] * G.d
    for c, n in zip(coeffs, G.anchors):
        v[n] = c
    return tuple(v)


def tilde(G: SeparableGroup, alpha: Sequence[int]) -> ParityVector:
    """The element of G whose image under ``iso_I`` is ``alpha + 2 Lambda^perp``."""
    _check_dim(G.d, alpha)
    coeffs = [sum(int(alpha[j]) for j in block) % 2 for block in G.blocks]
    return G.combine(coeffs)


def pairing(alpha: Sequence[int], sigma: Sequence[int]) -> int:
    """The character value (-1)^<alpha, sigma>."""
    if len(alpha) != len(sigma):
        raise DimensionMismatch(f"alpha has length {len(alpha)}, sigma has {len(sigma)}")
    return -1 if sum(int(a) * int(s) for a, s in zip(alpha, sigma)) % 2 else 1


def fundamental_domain(G: SeparableGroup, modulus: int) -> tuple:
    """Lexicographically smallest member of every orbit in Z_r^d, sorted."""
    if modulus is None or modulus < 2 or modulus % 2:
        raise BadModulus(f"modulus must be an even integer >= 2, got {modulus}")
    chosen = set()
    for gamma in itertools.product(range(modulus), repeat=G.d):
        info = orbit_and_stabilizer(G, gamma, modulus)
        chosen.add(info.orbit[0])
    return tuple(sorted(chosen))


def _character(G, h, gamma):
    ih = iso_I(G, h)
    shift = tuple(a + int(b) for a, b in zip(ih, gamma))
    return lambda sigma: pairing(shift, sigma)


def char_sum(G: SeparableGroup, h, gamma, sigma0, modulus: int | None = None) -> int:
    """Sum of (-1)^<I(h)+gamma, sigma> over the coset sigma0 + G_gamma."""
    _check_dim(G.d, h, gamma, sigma0)
    G.coefficients(sigma0)
    chi = _character(G, h, gamma)
    stab = orbit_and_stabilizer(G, gamma, modulus).stabilizer
    s0 = parity(sigma0)
    return sum(chi(tuple((a + b) % 2 for a, b in zip(s0, s))) for s in stab)


def is_vacuous(G: SeparableGroup, h, gamma, modulus: int | None = None) -> bool:
    """True when the character of (h, gamma) is nontrivial on the stabilizer."""
    _check_dim(G.d, h, gamma)
    chi = _character(G, h, gamma)
    stab = orbit_and_stabilizer(G, gamma, modulus).stabilizer
    return any(chi(s) != 1 for s in stab)


def group_from_mapping(cfg: dict) -> SeparableGroup:
    """Build a group from ``{"dimension": d, "generators": [[...], ...]}``."""
    from .errors import ConfigError

    try:
        d = int(cfg["dimension"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError("group config needs an integer 'dimension'") from exc
    gens = cfg.get("generators", [])
    if not isinstance(gens, list):
        raise ConfigError("'generators' must be an array of 0/1 arrays")
    return make_group(d, [tuple(int(x) for x in g) for g in gens])


def group_to_mapping(G: SeparableGroup) -> dict:
    return {"dimension": G.d, "generators": [list(g) for g in G.generators]}
