"""Continuous windows and lattice-sum autocorrelations on frequency grids.

Windows are described on the frequency side, optionally with a time-side
evaluator.  Autocorrelations of Gabor-type systems
``{T_lambda M_gamma g}`` with ``gamma`` on a rectangular modulation lattice
and ``lambda`` on a translation lattice are evaluated by truncated lattice
sums; every value carries a rigorous bound on the discarded tail.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate, special

from . import groups as grp
from .errors import (
    AlphaNotInDual,
    BadParameters,
    DimensionMismatch,
    NoTimeEvaluator,
    TruncationInsufficient,
    UnknownName,
)

TAIL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class AnalyticWindow:
    """A window given by its Fourier transform ``freq`` (and maybe its samples ``time``).

    ``decay=(C, p)`` asserts |ghat(w)| <= C (1+|w|)^-p for all w (d=1).
    ``tail=(C, p, w0)`` is the sharper |ghat(w)| <= C |w|^-p for |w| >= w0,
    used to size truncations.  ``freq_box`` bounds the support of a compactly
    supported ghat as per-axis (lo, hi) pairs.
    """

    name: str
    d: int
    freq: Callable
    time: Callable | None = None
    support: float | None = None  # sup-norm radius of the time-side support
    decay: tuple | None = None
    tail: tuple | None = None
    freq_box: tuple | None = None
    even: bool = False
    extra: dict = field(default_factory=dict)

    def freq_quadrature(self, omega: float) -> float:
        """Independent route to ghat(omega) by adaptive quadrature of the time side."""
        if self.time is None or self.d != 1:
            raise NoTimeEvaluator(f"window {self.name!r} has no one-dimensional time evaluator")
        quad = self.extra.get("quadrature")
        if quad is not None:
            return quad(omega)
        s = self.support
        re = integrate.quad(self.time, -s, s, weight="cos", wvar=2 * np.pi * omega,
                            epsabs=1e-13, epsrel=1e-13, limit=400)[0]
        im = integrate.quad(self.time, -s, s, weight="sin", wvar=2 * np.pi * omega,
                            epsabs=1e-13, epsrel=1e-13, limit=400)[0]
        return complex(re, -im)


def _cos_time(x):
    x = np.asarray(x, dtype=float)
    return np.where(np.abs(x) <= 1, np.cos(0.5 * np.pi * x), 0.0)


def _cos_freq(w):
    w = np.asarray(w, dtype=float)
    return np.sinc(0.5 - 2 * w) + np.sinc(0.5 + 2 * w)


def _tent_time(x):
    x = np.asarray(x, dtype=float)
    return np.sqrt(np.clip(1 - np.abs(x), 0.0, None))


_TENT_SERIES = 24


def _tent_freq(w):
    """2 int_0^1 sqrt(1-x) cos(2 pi w x) dx in closed form via Fresnel integrals."""
    w = np.abs(np.asarray(w, dtype=float))
    b = 2 * np.pi * w
    out = np.empty_like(b)
    big = b >= 1
    if np.any(big):
        bb = b[big]
        s, c = special.fresnel(2 * np.sqrt(w[big]))
        out[big] = (2 / bb) * np.sqrt(np.pi / (2 * bb)) * (c * np.sin(bb) - s * np.cos(bb))
    if np.any(~big):
        # Taylor series of the cosine, integrated termwise against sqrt(1-x)
        bs = b[~big]
        acc = np.zeros_like(bs)
        for n in range(_TENT_SERIES):
            acc += (-1) ** n * bs ** (2 * n) / math.factorial(2 * n) * special.beta(2 * n + 1, 1.5)
        out[~big] = 2 * acc
    return out


def _tent_quadrature(omega):
    # x = 1 - u^2 removes the square-root endpoint singularity
    val = integrate.quad(lambda u: 2 * u * u * np.cos(2 * np.pi * omega * (1 - u * u)), 0, 1,
                         epsabs=1e-14, epsrel=1e-14, limit=400)[0]
    return complex(2 * val, 0.0)


def _d_indicator(x, y):
    # half-open so that the 2Z^2 translates tile the plane exactly
    return (0 <= y) & (y < 2) & (y <= x) & (x < y + 2)


def _indicator_freq(x, y):
    return 0.5 * _d_indicator(np.asarray(x, dtype=float), np.asarray(y, dtype=float))


# |ghat(w)| <= 1/(pi |1/4 - 4w^2|); for |w| >= 1 that is <= 1/(3.75 pi) w^-2
_COS_TAIL = (1 / (3.75 * np.pi), 2.0, 1.0)
# |C(z) - 1/2|, |S(z) - 1/2| <= 1/(pi z) with z = 2 sqrt(w) gives, for w >= 1,
# |ghat(w)| <= (sqrt(2)/2 + 1/pi) / (2 pi) w^-1.5
_TENT_TAIL = ((np.sqrt(2) / 2 + 1 / np.pi) / (2 * np.pi), 1.5, 1.0)


def builtin_window(name: str) -> AnalyticWindow:
    if name == "cos":
        return AnalyticWindow("cos", 1, _cos_freq, _cos_time, support=1.0,
                              decay=(1.6, 2.0), tail=_COS_TAIL, even=True)
    if name == "tent":
        return AnalyticWindow("tent", 1, _tent_freq, _tent_time, support=1.0,
                              decay=(1.5, 1.5), tail=_TENT_TAIL, even=True,
                              extra={"quadrature": _tent_quadrature})
    if name == "indicator_D":
        return AnalyticWindow("indicator_D", 2, _indicator_freq, None,
                              freq_box=((0.0, 4.0), (0.0, 2.0)))
    raise UnknownName(f"unknown window {name!r}; choose cos, tent or indicator_D")


BUILTIN_WINDOWS = ("cos", "tent", "indicator_D")


def check_decay(w: AnalyticWindow, limit: float = 50.0, samples: int = 200001) -> float:
    """Largest ratio |ghat(w)| / (C (1+|w|)^-p) seen on [0, limit]; <= 1 means the bound holds."""
    if w.decay is None:
        raise BadParameters(f"window {w.name!r} declares no decay bound")
    C, p = w.decay
    om = np.linspace(0, limit, samples)
    vals = np.abs(w.freq(om)) if w.even else np.maximum(np.abs(w.freq(om)), np.abs(w.freq(-om)))
    return float(np.max(vals * (1 + om) ** p / C))


def time_norm(w: AnalyticWindow) -> float:
    if w.time is None:
        raise NoTimeEvaluator(f"window {w.name!r} has no time evaluator")
    s = w.support
    return math.sqrt(integrate.quad(lambda x: abs(w.time(x)) ** 2, -s, s, points=[0.0],
                                    epsabs=1e-14, limit=200)[0])


def partition_of_unity_check(w: AnalyticWindow, step: float, grid_count: int = 10_000):
    """max |sum_n |g(x - n step)|^2 - c| over one period, with c the grid mean.

    Returns ``(deviation, c)``.
    """
    if w.time is None:
        raise NoTimeEvaluator(f"window {w.name!r} has no time evaluator")
    if w.support is None:
        raise BadParameters("partition of unity needs a compactly supported window")
    x = np.linspace(0, step, grid_count, endpoint=False)
    reach = int(math.ceil(w.support / step)) + 1
    total = np.zeros_like(x)
    for n in range(-reach, reach + 1):
        total += np.abs(w.time(x - n * step)) ** 2
    c = float(np.mean(total))
    return float(np.max(np.abs(total - c))), c


def painless_bound(w: AnalyticWindow, translation_step: float, modulation_step: float,
                   grid_count: int = 10_000):
    """Frame bounds of {M_{m b} T_{n a} g} from the diagonal Walnut term.

    Only valid when the support length does not exceed 1/b, so that all
    off-diagonal correlation terms vanish identically.
    """
    if w.support is None or 2 * w.support > 1 / modulation_step + 1e-12:
        raise BadParameters("support is longer than the dual-lattice gap")
    dev, c = partition_of_unity_check(w, translation_step, grid_count)
    vals = c / modulation_step
    return {"lower": vals - dev / modulation_step, "upper": vals + dev / modulation_step,
            "deviation": dev / modulation_step}


def walnut_correlations(w: AnalyticWindow, translation_step: float, modulation_step: float,
                        grid_count: int = 4000) -> dict:
    """Time-side correlation functions G_k(x) = sum_n g(x - n a) conj g(x - n a - k/b).

    {M_{mb} T_{na} g} is tight exactly when G_0 is constant and G_k vanishes for
    k != 0; the bound is then G_0 / b.
    """
    if w.time is None or w.support is None:
        raise NoTimeEvaluator("Walnut correlations need a compactly supported time evaluator")
    a, b = translation_step, modulation_step
    x = np.linspace(0, a, grid_count, endpoint=False)
    reach = int(math.ceil(2 * w.support / a)) + 2
    kmax = int(math.floor(2 * w.support * b))
    out = {}
    for k in range(-kmax, kmax + 1):
        acc = np.zeros_like(x, dtype=complex)
        for n in range(-reach, reach + 1):
            acc += w.time(x - n * a) * np.conj(w.time(x - n * a - k / b))
        out[k] = acc
    return out


# ---- lattice autocorrelation --------------------------------------------

def _per_axis(v, d, what):
    arr = np.atleast_1d(np.asarray(v, dtype=float))
    if arr.size == 1:
        arr = np.full(d, float(arr[0]))
    if arr.shape != (d,) or np.any(arr <= 0):
        raise BadParameters(f"{what} must be a positive scalar or length-{d} vector")
    return arr


@dataclass(frozen=True)
class TranslationLattice:
    """Either a rectangular lattice with per-axis steps or half of Lambda for a group."""

    d: int
    steps: tuple | None = None
    group: grp.SeparableGroup | None = None

    @property
    def density(self) -> float:
        if self.group is not None:
            return float(self.group.order)
        return float(1.0 / np.prod(self.steps))

    def in_dual(self, alpha) -> bool:
        alpha = np.asarray(alpha, dtype=float)
        if self.group is not None:
            if np.any(np.abs(alpha - np.rint(alpha)) > 1e-12):
                return False
            return grp.in_dual_two_lambda(self.group, [int(round(a)) for a in alpha])
        prod = alpha * np.asarray(self.steps)
        return bool(np.all(np.abs(prod - np.rint(prod)) < 1e-9))


def translation_lattice(spec, d: int) -> TranslationLattice:
    if isinstance(spec, TranslationLattice):
        return spec
    if isinstance(spec, grp.SeparableGroup):
        if spec.d != d:
            raise DimensionMismatch("group dimension differs from the window dimension")
        return TranslationLattice(d, group=spec)
    return TranslationLattice(d, steps=tuple(_per_axis(spec, d, "translation step")))


@dataclass(frozen=True, eq=False)
class ContinuousAutocorr:
    alpha: tuple
    omega: np.ndarray
    values: np.ndarray
    error_bound: float
    radius: float
    terms: int


def _tail_bound(w: AnalyticWindow, b: float, radius: float, reach: float, density: float) -> float:
    """Cauchy-Schwarz bound on the discarded part of the lattice sum.

    ``reach`` bounds |omega| and |omega - alpha|; the kept modulations are
    |gamma| <= radius.
    """
    if w.tail is not None:
        C, p, w0 = w.tail
        edge = radius - b - reach
        if edge >= w0:
            return density * 2 * C * C / b * edge ** (1 - 2 * p) / (2 * p - 1)
    if w.decay is not None:
        C, p = w.decay
        edge = 1 + radius - b - reach
        if edge >= 1:
            return density * 2 * C * C / b * edge ** (1 - 2 * p) / (2 * p - 1)
    return math.inf


def _choose_radius(w, b, reach, density, tol):
    radius = max(4.0, 2 * reach + 2 * b)
    for _ in range(80):
        if _tail_bound(w, b, radius, reach, density) < tol:
            return radius
        radius *= 1.5
    raise TruncationInsufficient(f"no truncation radius certifies a tail below {tol}")


def autocorr_continuous(w: AnalyticWindow, modulation_step, translation, alphas, omega,
                        radius: float | None = None, tol: float = TAIL_TOL) -> dict:
    """t_alpha(omega) = density * sum_gamma ghat(omega - gamma) conj(ghat(omega - gamma - alpha)).

    ``gamma`` runs over the rectangular lattice with the given per-axis
    modulation steps; ``translation`` is a per-axis step, a step vector, or a
    separable group (translations over half of its lattice).  ``alphas`` may
    be one dual vector or a list; the result maps each alpha to a
    ``ContinuousAutocorr``.
    """
    d = w.d
    lat = translation_lattice(translation, d)
    steps = _per_axis(modulation_step, d, "modulation step")
    alist = [tuple(float(a) for a in row) for row in np.asarray(alphas, dtype=float).reshape(-1, d)]
    for al in alist:
        if len(al) != d:
            raise DimensionMismatch(f"alpha must have length {d}")
        if not lat.in_dual(al):
            raise AlphaNotInDual(f"alpha={al} is not in the dual of the translation lattice")
    om = np.asarray(omega, dtype=float).reshape(-1, d)
    density = lat.density
    out = {}
    if w.freq_box is not None:
        for al in alist:
            out[_key(al)] = _compact_sum(w, steps, al, om, density)
        return out
    if d != 1:
        raise TruncationInsufficient("tail certificates are only available for d = 1 or compact spectra")
    b = float(steps[0])
    amax = max(abs(al[0]) for al in alist)
    reach = float(np.max(np.abs(om))) + amax
    if radius is None:
        radius = _choose_radius(w, b, reach, density, tol)
    bound = _tail_bound(w, b, radius, reach, density)
    if not bound < tol:
        raise TruncationInsufficient(f"radius {radius} leaves a tail bound of {bound:.3g} >= {tol}")
    M = int(math.floor(radius / b))
    # one evaluation of ghat on omega - b m serves every alpha that is a multiple of b
    shifts = [al[0] / b for al in alist]
    aligned = all(abs(s - round(s)) < 1e-12 for s in shifts)
    extra = int(max(abs(round(s)) for s in shifts)) if aligned else 0
    m = np.arange(-M - extra, M + extra + 1)
    vals = {}
    base = w.freq(om[:, :1] - b * m[None, :])
    for al, s in zip(alist, shifts):
        if aligned:
            k = int(round(s))
            lo = extra
            main = base[:, lo:lo + 2 * M + 1]
            other = base[:, lo + k:lo + k + 2 * M + 1]
        else:
            mm = np.arange(-M, M + 1)
            main = w.freq(om[:, :1] - b * mm[None, :])
            other = w.freq(om[:, :1] - b * mm[None, :] - al[0])
        t = density * np.sum(main * np.conj(other), axis=1)
        vals[_key(al)] = ContinuousAutocorr(al, om.copy(), t, bound, radius, 2 * M + 1)
    return vals


def _key(al):
    return tuple(int(a) if float(a).is_integer() else a for a in al)


def _compact_sum(w, steps, al, om, density):
    """Exact finite sum for compactly supported spectra."""
    box = w.freq_box
    ranges = []
    for axis in range(w.d):
        lo, hi = box[axis]
        s = steps[axis]
        top = np.max(om[:, axis]) - lo
        bot = np.min(om[:, axis]) - hi
        # omega - gamma must fall in [lo, hi]
        ranges.append(np.arange(int(math.floor(bot / s)) - 1, int(math.ceil(top / s)) + 2))
    t = np.zeros(len(om), dtype=complex)
    n = 0
    for mvec in itertools.product(*ranges):
        gamma = np.asarray(mvec) * steps
        a = w.freq(*(om - gamma).T)
        if not np.any(a):
            continue
        c = w.freq(*(om - gamma - np.asarray(al)).T)
        t += a * np.conj(c)
        n += 1
    return ContinuousAutocorr(tuple(al), om.copy(), density * t, 0.0, float("nan"), n)


# ---- the two-dimensional counterexample ----------------------------------

def omega_interior_grid(n: int = 20, margin: float = 0.05) -> np.ndarray:
    """n x n points of {1<=y<=2, y<=x<=y+2} kept ``margin`` away from the edges.

    Points also avoid integer y and integer x - y, where the lattice sums jump.
    """
    y = np.linspace(1 + margin, 2 - margin, n)
    s = np.linspace(margin, 2 - margin, n)
    if np.any(np.abs(s - np.rint(s)) < 1e-12) or np.any(np.abs(y - np.rint(y)) < 1e-12):
        raise BadParameters("grid hits a discontinuity line")
    Y, S = np.meshgrid(y, s, indexing="ij")
    return np.column_stack([(Y + S).ravel(), Y.ravel()])


def in_omega(pts) -> np.ndarray:
    pts = np.atleast_2d(pts)
    x, y = pts[:, 0], pts[:, 1]
    return (1 <= x) & (x <= 4) & (1 <= y) & (y <= 2) & (x - 2 <= y) & (y <= x)


def alternating_sum(w: AnalyticWindow, alpha, omega) -> np.ndarray:
    """sum_m (-1)^{|m|} conj(ghat(omega - m)) ghat(omega + m - alpha) for a compact spectrum."""
    om = np.asarray(omega, dtype=float).reshape(-1, w.d)
    alpha = np.asarray(alpha, dtype=float)
    box = w.freq_box
    span = [int(math.ceil(hi - lo)) + int(np.max(np.abs(om))) + int(np.max(np.abs(alpha))) + 2
            for lo, hi in box]
    total = np.zeros(len(om), dtype=complex)
    for m in itertools.product(*(range(-s, s + 1) for s in span)):
        m = np.asarray(m, dtype=float)
        sign = -1.0 if int(np.sum(m)) % 2 else 1.0
        a = w.freq(*(om - m).T)
        if not np.any(a):
            continue
        total += sign * np.conj(a) * w.freq(*(om + m - alpha).T)
    return total


def counterexample_report(n: int = 20, margin: float = 0.05, extra_alphas=None) -> dict:
    """Gabor tightness and the failing Wilson condition for the indicator window."""
    w = builtin_window("indicator_D")
    pts = omega_interior_grid(n, margin)
    wil = alternating_sum(w, (1, 1), pts)
    if extra_alphas is None:
        extra_alphas = [a for a in itertools.product(range(-4, 5, 2), repeat=2) if a != (0, 0)]
    alphas = [(0, 0)] + list(extra_alphas)
    # the redundancy-4 system {T_{n/2} M_m g}: modulation step 1, translation step 1/2
    tab = autocorr_continuous(w, 1.0, 0.5, alphas, pts)
    t0 = tab[(0, 0)].values
    others = max(float(np.max(np.abs(tab[_key(a)].values))) for a in extra_alphas)
    return {
        "points": len(pts),
        "all_interior": bool(np.all(in_omega(pts))),
        "wilson_alternating_sum_deviation": float(np.max(np.abs(wil - 0.5))),
        "wilson_alternating_sum_mean": float(np.mean(wil.real)),
        "gabor_t0_deviation": float(np.max(np.abs(t0 - 4.0))),
        "gabor_other_alpha_max": others,
        "tested_alphas": [list(a) for a in alphas],
    }


# ---- which lattice does each window make tight ------------------------------

LATTICES = {
    # name: (translation step, modulation step)
    "M_{m/2}T_n": (1.0, 0.5),
    "M_mT_{n/2}": (0.5, 1.0),
}


def lattice_tightness(w: AnalyticWindow, lattice: str, n_omega: int = 16, n_alpha: int = 3,
                      bound: float = 2.0) -> dict:
    """Largest |t_alpha - bound delta| over a period of omega and the first dual alphas."""
    a, b = LATTICES[lattice]
    period = b
    om = np.linspace(0, period, n_omega, endpoint=False) + period / (2 * n_omega)
    dual_step = 1 / a
    alphas = [k * dual_step for k in range(-n_alpha, n_alpha + 1)]
    tab = autocorr_continuous(w, b, a, alphas, om)
    worst, err = 0.0, 0.0
    per_alpha = {}
    for al in alphas:
        res = tab[_key((al,))]
        target = bound if al == 0 else 0.0
        dev = float(np.max(np.abs(res.values - target)))
        per_alpha[str(_key((al,))[0])] = dev
        worst = max(worst, dev)
        err = max(err, res.error_bound)
    return {"lattice": lattice, "window": w.name, "deviation": worst, "tail_bound": err,
            "tight": worst <= 1e-8, "per_alpha": per_alpha,
            "radius": tab[_key((0.0,))].radius, "terms": tab[_key((0.0,))].terms}


def example12_report(names=("cos", "tent"), n_omega: int = 16) -> dict:
    out = {}
    for name in names:
        w = builtin_window(name)
        dev, c = partition_of_unity_check(w, 1.0)
        rows = {lat: lattice_tightness(w, lat, n_omega) for lat in LATTICES}
        certified = [lat for lat, row in rows.items() if row["tight"]]
        out[name] = {"partition_deviation": dev, "partition_constant": c,
                     "lattices": rows, "certified": certified}
    return out


# ---- comparison with the finite model -----------------------------------

def cross_model_t0(name: str, P: int, r: int) -> float:
    """max |finite t_0 - continuous t_0| on one period for {T_{n/2} M_m g}."""
    from .grid import make_grid, periodize_sample
    from .frames import autocorrelation
    from .synth import gabor_family

    w = builtin_window(name)
    spec = make_grid(1, P, r)
    g = periodize_sample(w, spec)
    F = gabor_family(g, grp.make_group(1, [(1,)]))
    t_fin = autocorrelation(F, (0,))
    kappa = np.arange(P)
    cont = autocorr_continuous(w, 1.0, 0.5, 0.0, kappa / P)[(0,)]
    return float(np.max(np.abs(t_fin[kappa] - cont.values)))
