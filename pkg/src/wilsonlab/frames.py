"""Frame analysis of system families on the finite model.

Matrices use the weighted inner product of the grid, so the frame operator
is ``Phi Phi^H / r^d`` and the Gram matrix ``Phi^H Phi / r^d`` where ``Phi``
has the members as columns.  Autocorrelations live on the frequency grid:
entry ``kappa`` stands for the frequency ``kappa/P`` and a dual label
``alpha`` shifts by ``alpha*P`` samples.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from . import groups as grp
from .errors import (
    AlphaNotInDual,
    DegenerateFibers,
    DimensionMismatch,
    NotShiftInvariant,
    NotTight,
    SeparabilityRequired,
    SymmetryViolated,
    TooLarge,
)
from .grid import GridSignal, GridSpec, ZakArray, dft, inverse_zak, random_hermitian_window, translate, zak
from .synth import SystemFamily, gabor_family, wilson_family

MAX_DIMENSION = 4096
MAX_MEMBERS = 65536
FLAG_TOL = 1e-9
ONB_TOL = 1e-9
FIBER_EPS = 1e-12


def _check_size(F: SystemFamily):
    if F.spec.size > MAX_DIMENSION or F.count > MAX_MEMBERS:
        raise TooLarge(f"family of {F.count} members in dimension {F.spec.size} exceeds the caps")


def gram(F: SystemFamily) -> np.ndarray:
    """Gram[i, j] = <f_j, f_i>."""
    _check_size(F)
    V = F.vectors
    return F.spec.weight * (V.conj() @ V.T)


def frame_operator(F: SystemFamily) -> np.ndarray:
    _check_size(F)
    V = F.vectors
    return F.spec.weight * (V.T @ V.conj())


@dataclass(frozen=True)
class FrameReport:
    lower: float
    upper: float
    riesz_lower: float
    riesz_upper: float
    flags: dict
    tolerance: float
    count: int
    dimension: int
    gram_deviation: float = field(default=float("nan"))

    def as_dict(self) -> dict:
        return {
            "lower": self.lower, "upper": self.upper,
            "riesz_lower": self.riesz_lower, "riesz_upper": self.riesz_upper,
            "flags": dict(self.flags), "tolerance": self.tolerance,
            "count": self.count, "dimension": self.dimension,
            "gram_deviation": self.gram_deviation,
        }


def frame_bounds(F: SystemFamily, tol: float = FLAG_TOL) -> FrameReport:
    S = frame_operator(F)
    evs = linalg.eigvalsh(S)
    lower, upper = max(float(evs[0]), 0.0), float(evs[-1])
    Gm = gram(F)
    gevs = linalg.eigvalsh(Gm)
    scale = max(upper, 1e-300)
    nonzero = gevs[gevs > tol * scale]
    independent = len(nonzero) == F.count
    riesz_lower = float(nonzero[0]) if len(nonzero) else 0.0
    riesz_upper = float(gevs[-1])
    dev = float(np.max(np.abs(Gm - np.eye(F.count)))) if F.count else 0.0
    frame = lower > tol * scale
    tight = frame and (upper - lower) <= tol * scale
    flags = {
        "bessel": bool(np.isfinite(upper)),
        "frame": bool(frame),
        "tight": bool(tight),
        "parseval": bool(tight and abs(upper - 1) <= tol and abs(lower - 1) <= tol),
        "riesz_basis": bool(frame and independent),
        "onb": bool(frame and independent and dev <= ONB_TOL),
    }
    return FrameReport(lower, upper, riesz_lower, riesz_upper, flags, tol,
                       F.count, F.spec.size, dev)


# ---- autocorrelations ---------------------------------------------------

def _require_si(F: SystemFamily):
    if F.si_form is None:
        raise NotShiftInvariant("family has no shift-invariant form")
    return F.si_form


def in_translation_dual(F: SystemFamily, alpha) -> bool:
    """<alpha, offset> integral for every translation offset of the family."""
    si = _require_si(F)
    a = np.asarray(alpha, dtype=float)
    return all(abs(v - round(v)) < 1e-9 for v in (float(np.dot(a, off)) for off in si.offsets))


def dual_residues(F: SystemFamily) -> list:
    """Dual labels of the translation lattice, as residues in Z_r^d."""
    spec = F.spec
    return [a for a in itertools.product(range(spec.r), repeat=spec.d) if in_translation_dual(F, a)]


def _generator_spectra(F: SystemFamily) -> np.ndarray:
    si = _require_si(F)
    spec = F.spec
    axes = tuple(range(1, spec.d + 1))
    return np.fft.fftn(si.generators.reshape((-1,) + spec.shape), axes=axes) * spec.weight


def _shift_freq(arr: np.ndarray, spec: GridSpec, alpha) -> np.ndarray:
    """arr(kappa - alpha*P) along the trailing d axes."""
    steps = tuple(int(a) * spec.P for a in alpha)
    axes = tuple(range(arr.ndim - spec.d, arr.ndim))
    return np.roll(arr, steps, axis=axes)


def _alpha_tuple(spec, alpha):
    alpha = tuple(int(a) for a in np.atleast_1d(alpha))
    if len(alpha) != spec.d:
        raise DimensionMismatch(f"alpha must have length {spec.d}")
    return alpha


def autocorrelation(F: SystemFamily, alpha, spectra=None) -> np.ndarray:
    """t_alpha(kappa) = density * sum_gen ghat(kappa) conj(ghat(kappa - alpha P))."""
    si = _require_si(F)
    alpha = _alpha_tuple(F.spec, alpha)
    if not in_translation_dual(F, alpha):
        raise AlphaNotInDual(f"alpha={alpha} is not in the dual of the translation lattice")
    if spectra is None:
        spectra = _generator_spectra(F)
    shifted = _shift_freq(spectra, F.spec, alpha)
    return si.density * np.sum(spectra * shifted.conj(), axis=0)


@dataclass(frozen=True, eq=False)
class AutocorrTable:
    spec: GridSpec
    entries: dict  # alpha residue -> array over the frequency grid
    lattice_density: float

    def hermitian_residual(self) -> float:
        worst = 0.0
        r = self.spec.r
        for alpha, t in self.entries.items():
            neg = tuple((-a) % r for a in alpha)
            # t_{-alpha}(kappa) = conj(t_alpha(kappa + alpha P))
            rhs = _shift_freq(t, self.spec, neg).conj()
            worst = max(worst, float(np.max(np.abs(self.entries[neg] - rhs))))
        return worst


def autocorr_table(F: SystemFamily) -> AutocorrTable:
    si = _require_si(F)
    spectra = _generator_spectra(F)
    entries = {a: autocorrelation(F, a, spectra) for a in dual_residues(F)}
    return AutocorrTable(F.spec, entries, si.density)


@dataclass(frozen=True)
class TightnessReport:
    deviation: float
    bound: float
    tolerance: float
    passed: bool
    eigen_tight: bool
    agrees: bool
    worst_alpha: tuple


def verify_tight_via_autocorr(F: SystemFamily, a: float | None = None, tol: float = 1e-10,
                              table: AutocorrTable | None = None,
                              report: FrameReport | None = None) -> TightnessReport:
    """max |t_alpha - a delta_{alpha,0}| over dual alpha and the frequency grid."""
    table = table or autocorr_table(F)
    zero = (0,) * F.spec.d
    if a is None:
        a = float(np.mean(table.entries[zero].real))
    worst, worst_alpha = 0.0, zero
    for alpha, t in table.entries.items():
        target = a if alpha == zero else 0.0
        dev = float(np.max(np.abs(t - target)))
        if dev > worst:
            worst, worst_alpha = dev, alpha
    passed = worst <= tol
    report = report or frame_bounds(F)
    eig_tight = report.flags["tight"] and abs(report.upper - a) <= FLAG_TOL * max(abs(a), 1.0)
    return TightnessReport(worst, float(a), tol, passed, eig_tight, passed == eig_tight, worst_alpha)


def apply_from_table(table: AutocorrTable, f: GridSignal) -> GridSignal:
    """S f computed on the frequency side: sum_alpha t_alpha(kappa) fhat(kappa - alpha P)."""
    fh = dft(f).values
    acc = np.zeros(fh.shape, dtype=complex)
    for alpha, t in table.entries.items():
        acc += t * _shift_freq(fh, table.spec, alpha)
    return dft(GridSignal(table.spec, acc, "freq"), "inverse")


def frame_operator_from_table(table: AutocorrTable) -> np.ndarray:
    spec = table.spec
    cols = []
    for i in range(spec.size):
        e = np.zeros(spec.size)
        e[i] = 1.0
        cols.append(apply_from_table(table, GridSignal(spec, e)).flat())
    return np.array(cols).T


def wf_identity_check(F: SystemFamily, f: GridSignal, table: AutocorrTable | None = None) -> float:
    """|sum_members |<f,m>|^2 - sum_alpha <t_alpha T_alpha fhat, fhat>| ."""
    if f.spec != F.spec:
        raise DimensionMismatch("signal and family live on different grids")
    table = table or autocorr_table(F)
    coeffs = F.spec.weight * (F.vectors.conj() @ f.flat())
    lhs = float(np.sum(np.abs(coeffs) ** 2))
    fh = dft(f).values
    rhs = 0.0 + 0.0j
    for alpha, t in table.entries.items():
        rhs += np.sum(t * _shift_freq(fh, F.spec, alpha) * fh.conj())
    rhs *= F.spec.freq_weight
    return float(abs(lhs - rhs))


# ---- the Gabor/Wilson frame operator ratio -------------------------------

def separable_from_factors(spec: GridSpec, G: grp.SeparableGroup, factors) -> GridSignal:
    """Assemble g(x) = prod_i g_i(x restricted to block i).

    ``factors`` lists arrays for the blocks S_1..S_k followed by one for the
    remainder S_0 when it is nonempty; factor i has shape (L,)*|S_i|.
    """
    parts = list(G.blocks) + ([G.remainder] if G.remainder else [])
    if len(factors) != len(parts):
        raise SeparabilityRequired(f"need {len(parts)} factors, got {len(factors)}")
    letters = "abcdefghijklmnopqrstuvwxyz"
    operands, subs = [], []
    for fac, part in zip(factors, parts):
        arr = np.asarray(getattr(fac, "values", fac), dtype=complex)
        if arr.shape != (spec.L,) * len(part):
            raise SeparabilityRequired(f"factor for coordinates {part} has shape {arr.shape}")
        operands.append(arr)
        subs.append("".join(letters[i] for i in part))
    out = "".join(letters[i] for i in range(spec.d))
    return GridSignal(spec, np.einsum(",".join(subs) + "->" + out, *operands))


def random_separable_window(spec: GridSpec, G: grp.SeparableGroup, seed: int):
    """Unit-norm window with real spectrum, a product over the blocks of G.

    Returns ``(g, factors)`` with factors in the order ``separable_from_factors`` expects.
    """
    parts = list(G.blocks) + ([G.remainder] if G.remainder else [])
    factors = []
    for i, part in enumerate(parts):
        sub = GridSpec(len(part), spec.P, spec.r)
        factors.append(random_hermitian_window(sub, seed * 1009 + i).values)
    g = separable_from_factors(spec, G, factors)
    return g * (1.0 / g.norm()), factors


def max_imag_spectrum(g: GridSignal) -> float:
    return float(np.max(np.abs(dft(g).values.imag)))


def frame_operator_ratio_check(g: GridSignal, G: grp.SeparableGroup, factors=None,
                               allow_nonseparable: bool = False) -> float:
    """Relative Frobenius residual of S_Gabor - 2^k S_Wilson.

    ``allow_nonseparable`` skips the factor requirement for k >= 2 so that
    control windows can be measured.
    """
    imag = max_imag_spectrum(g)
    if imag > 1e-10:
        raise SymmetryViolated(f"window spectrum is not real (max |Im| = {imag:.3g})")
    if G.k >= 2 and not allow_nonseparable:
        if factors is None:
            raise SeparabilityRequired("k >= 2 needs explicit separable factors")
        rebuilt = separable_from_factors(g.spec, G, factors)
        err = np.max(np.abs(rebuilt.values - g.values))
        if err > 1e-10 * max(np.max(np.abs(g.values)), 1e-300):
            raise SeparabilityRequired(f"factors do not reproduce the window (error {err:.3g})")
    Sg = frame_operator(gabor_family(g, G))
    Sw = frame_operator(wilson_family(g, G))
    return float(linalg.norm(Sg - G.order * Sw) / linalg.norm(Sg))


# ---- Zak-based canonical tight window --------------------------------------

def fiber_weight(g: GridSignal, G: grp.SeparableGroup) -> np.ndarray:
    """sum over the group of |Z(T_{sigma/2} g)|^2 on the Zak grid."""
    total = 0.0
    for sigma in G.elements:
        z = zak(translate(g, [s / 2 for s in sigma])).values
        total = total + np.abs(z) ** 2
    return total


def canonical_tight(g: GridSignal, G: grp.SeparableGroup, eps: float = FIBER_EPS) -> GridSignal:
    """Unit-norm window h whose Gabor family over the group is tight with bound 2^k."""
    W = fiber_weight(g, G)
    bad = np.argwhere(W < eps)
    if len(bad):
        d = g.spec.d
        fibers = [(tuple(int(x) for x in row[:d]), tuple(int(x) for x in row[d:])) for row in bad]
        raise DegenerateFibers(f"{len(fibers)} Zak fibers have weight below {eps}", fibers)
    z = zak(g)
    h = inverse_zak(ZakArray(g.spec, z.values / np.sqrt(W)))
    return h * (1.0 / h.norm())


def orthogonal_modulates_check(g: GridSignal, F: SystemFamily, require_tight: bool = True,
                               report: FrameReport | None = None) -> dict:
    """Largest |<M_beta g, M_beta' g>| over distinct dual residues beta, beta'."""
    if require_tight:
        report = report or frame_bounds(F)
        if not report.flags["tight"]:
            raise NotTight("family is not tight, the orthogonality statement does not apply")
    spec = g.spec
    betas = dual_residues(F)
    gh = dft(g).values
    worst = 0.0
    # <M_b g, M_b' g> depends only on b - b'
    diffs = {tuple((a - b) % spec.r for a, b in zip(x, y)) for x in betas for y in betas if x != y}
    for diff in diffs:
        val = spec.freq_weight * np.sum(_shift_freq(gh, spec, diff) * gh.conj())
        worst = max(worst, abs(complex(val)))
    return {"max_offdiag": float(worst), "diagonal": g.norm() ** 2, "count": len(betas)}
