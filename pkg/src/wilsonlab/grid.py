"""The finite model: complex functions on Z_L^d with L = P*r.

Sample ``j`` sits at position ``j/r``; there are ``P`` unit cells per axis and
``r`` samples per unit.  Time-side sums carry the weight ``1/r^d`` and
frequency-side sums the weight ``1/P^d``, so that discrete norms track
continuous L^2 norms.  Frequency index ``kappa`` corresponds to ``kappa/P``
cycles per unit.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import BadParameters, DimensionMismatch, OffGridShift, PeriodTooSmall, TooLarge

DEFAULT_MAX_SAMPLES = 2 ** 22
_INT_TOL = 1e-9


@dataclass(frozen=True)
class GridSpec:
    d: int
    P: int
    r: int

    @property
    def L(self) -> int:
        return self.P * self.r

    @property
    def shape(self) -> tuple:
        return (self.L,) * self.d

    @property
    def size(self) -> int:
        return self.L ** self.d

    @property
    def weight(self) -> float:
        """Time-side quadrature weight 1/r^d."""
        return float(self.r) ** (-self.d)

    @property
    def freq_weight(self) -> float:
        return float(self.P) ** (-self.d)


def make_grid(d: int, P: int, r: int, max_samples: int = DEFAULT_MAX_SAMPLES) -> GridSpec:
    for name, v in (("d", d), ("P", P), ("r", r)):
        if int(v) != v:
            raise BadParameters(f"{name} must be an integer, got {v}")
    d, P, r = int(d), int(P), int(r)
    if d < 1:
        raise BadParameters("d must be at least 1")
    if P < 2 or P % 2:
        raise BadParameters(f"P must be a positive even integer, got {P}")
    if r < 2 or r % 2:
        raise BadParameters(f"r must be a positive even integer, got {r}")
    if (P * r) ** d > max_samples:
        raise TooLarge(f"{(P * r) ** d} samples exceeds the cap of {max_samples}")
    return GridSpec(d, P, r)


@dataclass(frozen=True, eq=False)
class GridSignal:
    """Samples on the grid; ``domain`` says whether they are time or frequency values."""

    spec: GridSpec
    values: np.ndarray
    domain: str = field(default="time")

    def __post_init__(self):
        vals = np.array(self.values, dtype=complex)
        if vals.size != self.spec.size:
            raise DimensionMismatch(f"expected {self.spec.size} samples, got {vals.size}")
        vals = vals.reshape(self.spec.shape)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if self.domain not in ("time", "freq"):
            raise BadParameters(f"unknown domain {self.domain!r}")

    @property
    def weight(self) -> float:
        return self.spec.weight if self.domain == "time" else self.spec.freq_weight

    def norm(self) -> float:
        return float(np.sqrt(self.weight * np.sum(np.abs(self.values) ** 2)))

    def inner(self, other: "GridSignal") -> complex:
        """Weighted inner product, linear in the first slot."""
        _same_spec(self, other)
        return complex(self.weight * np.vdot(other.values, self.values))

    def with_values(self, values) -> "GridSignal":
        return GridSignal(self.spec, values, self.domain)

    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)

    def __add__(self, other):
        _same_spec(self, other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other):
        _same_spec(self, other)
        return self.with_values(self.values - other.values)

    def __mul__(self, scalar):
        return self.with_values(self.values * complex(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return self.with_values(-self.values)


def _same_spec(a: GridSignal, b: GridSignal) -> None:
    if a.spec != b.spec:
        raise DimensionMismatch(f"grid mismatch: {a.spec} vs {b.spec}")


def zeros(spec: GridSpec) -> GridSignal:
    return GridSignal(spec, np.zeros(spec.shape, dtype=complex))


def delta(spec: GridSpec, index=None) -> GridSignal:
    """Unit impulse (unweighted value 1) at ``index``, default the origin."""
    v = np.zeros(spec.shape, dtype=complex)
    v[tuple(index) if index is not None else (0,) * spec.d] = 1.0
    return GridSignal(spec, v)


def positions(spec: GridSpec, signed: bool = True) -> np.ndarray:
    """Per-axis sample positions j/r; signed picks representatives in [-P/2, P/2)."""
    j = np.arange(spec.L)
    if signed:
        j = np.where(j >= spec.L // 2, j - spec.L, j)
    return j / spec.r


def frequencies(spec: GridSpec) -> np.ndarray:
    """Per-axis frequencies kappa/P with kappa taken in [-L/2, L/2)."""
    k = np.arange(spec.L)
    k = np.where(k >= spec.L // 2, k - spec.L, k)
    return k / spec.P


def _as_steps(vec, scale, d, what):
    vec = np.atleast_1d(np.asarray(vec, dtype=float))
    if vec.shape != (d,):
        raise DimensionMismatch(f"{what} must have length {d}")
    steps = vec * scale
    rounded = np.rint(steps)
    if np.max(np.abs(steps - rounded)) > _INT_TOL:
        raise OffGridShift(f"{what}={vec.tolist()} does not land on the grid")
    return rounded.astype(np.int64)


def translate(f: GridSignal, lam) -> GridSignal:
    """(T_lam f)(j) = f(j - lam*r); lam*r must be integral."""
    steps = _as_steps(lam, f.spec.r, f.spec.d, "lambda")
    return f.with_values(np.roll(f.values, tuple(int(s) for s in steps), axis=tuple(range(f.spec.d))))


def _modulation_phase(spec: GridSpec, gamma) -> np.ndarray:
    # gamma*P integral keeps the character L-periodic
    kappa = _as_steps(gamma, spec.P, spec.d, "gamma")
    phase = np.zeros(spec.shape)
    j = np.arange(spec.L)
    for axis, kk in enumerate(kappa):
        shp = [1] * spec.d
        shp[axis] = spec.L
        phase = phase + ((int(kk) * j) % spec.L).reshape(shp) / spec.L
    return np.exp(2j * np.pi * phase)


def modulate(f: GridSignal, gamma) -> GridSignal:
    """(M_gamma f)(j) = exp(2 pi i <gamma, j/r>) f(j)."""
    return f.with_values(f.values * _modulation_phase(f.spec, gamma))


def tf_shift(f: GridSignal, lam, gamma) -> GridSignal:
    """M_gamma T_lam f."""
    return modulate(translate(f, lam), gamma)


def dft(f: GridSignal, direction: str = "forward") -> GridSignal:
    """Forward: fft(f)/r^d sampled at kappa/P.  Inverse undoes it exactly."""
    spec = f.spec
    if direction == "forward":
        return GridSignal(spec, np.fft.fftn(f.values) * spec.weight, "freq")
    if direction == "inverse":
        return GridSignal(spec, np.fft.ifftn(f.values) / spec.weight, "time")
    raise BadParameters(f"direction must be 'forward' or 'inverse', got {direction!r}")


def idft(f: GridSignal) -> GridSignal:
    return dft(f, "inverse")


@dataclass(frozen=True, eq=False)
class ZakArray:
    """Zak samples indexed (j_1..j_d, k_1..k_d), j in Z_r^d, k in Z_P^d."""

    spec: GridSpec
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=complex)
        shape = (self.spec.r,) * self.spec.d + (self.spec.P,) * self.spec.d
        if vals.size != int(np.prod(shape)):
            raise DimensionMismatch(f"Zak array needs shape {shape}")
        vals = vals.reshape(shape)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def at(self, j, k) -> complex:
        """Quasi-periodic extension to arbitrary integer (j, k)."""
        spec = self.spec
        j = np.asarray(j, dtype=np.int64)
        k = np.asarray(k, dtype=np.int64)
        q, j0 = np.divmod(j, spec.r)
        k0 = np.mod(k, spec.P)
        phase = np.exp(2j * np.pi * float(np.dot(q, k)) / spec.P)
        return complex(phase * self.values[tuple(j0) + tuple(k0)])


def _cell_axes(d):
    # reshape Z_L^d to (P, r, P, r, ...): index (m_1, j_1, m_2, j_2, ...)
    return tuple(2 * a for a in range(d)), tuple(2 * a + 1 for a in range(d))


def zak(f: GridSignal) -> ZakArray:
    """Zf(j,k) = sum_m f(j + m r) exp(-2 pi i <m,k>/P)."""
    spec = f.spec
    d = spec.d
    m_axes, j_axes = _cell_axes(d)
    cells = f.values.reshape((spec.P, spec.r) * d)
    z = np.fft.fftn(cells, axes=m_axes)
    return ZakArray(spec, np.transpose(z, j_axes + m_axes))


def inverse_zak(z: ZakArray) -> GridSignal:
    spec = z.spec
    d = spec.d
    m_axes, j_axes = _cell_axes(d)
    # undo the transpose: output axis 2a is k_a (input axis d+a), 2a+1 is j_a
    order = []
    for a in range(d):
        order += [d + a, a]
    cells = np.transpose(z.values, order)
    cells = np.fft.ifftn(cells, axes=m_axes)
    return GridSignal(spec, cells.reshape(spec.shape))


def periodize_sample(w, spec: GridSpec, support: float | None = None, decay=None,
                     tol: float = 1e-14, max_periods: int = 4096) -> GridSignal:
    """Sample ``sum_m w(j/r + m P)`` on the grid.

    ``w`` is either a callable taking ``d`` broadcastable coordinate arrays,
    or an object with a ``time`` callable and optional ``support`` (sup-norm
    radius) and ``decay`` ``(C, p)`` meaning ``|w(x)| <= C (1+|x|)^-p`` on
    each axis.
    """
    func = getattr(w, "time", w)
    if func is None or not callable(func):
        raise BadParameters("window has no time-side evaluator")
    if support is None:
        support = getattr(w, "support", None)
    if decay is None:
        decay = getattr(w, "time_decay", None)
    P = spec.P
    if support is not None:
        lo = int(np.floor((-support - P) / P))
        hi = int(np.ceil(support / P))
    elif decay is not None:
        C, p = decay
        if p <= 1:
            raise PeriodTooSmall("decay exponent must exceed 1 for a convergent periodization")
        # per-axis tail beyond M periods is at most 2C((M-1)P)^(1-p)/((p-1)P)
        M = 1
        while 2 * C * ((M - 1) * P + 1) ** (1 - p) / ((p - 1) * P) > tol:
            M *= 2
            if M > max_periods:
                raise PeriodTooSmall(f"tail bound not met within {max_periods} periods")
        lo, hi = -M, M
    else:
        raise PeriodTooSmall("need a support radius or a decay bound to periodize")
    if (hi - lo + 1) ** spec.d > max_periods ** max(spec.d, 1):
        raise PeriodTooSmall("periodization needs too many periods")
    x = positions(spec, signed=False)
    grids = np.meshgrid(*([x] * spec.d), indexing="ij")
    total = np.zeros(spec.shape, dtype=complex)
    for shift in itertools.product(range(lo, hi + 1), repeat=spec.d):
        coords = [g + s * P for g, s in zip(grids, shift)]
        if support is not None and any(np.min(np.abs(c)) > support for c in coords):
            continue
        total += np.asarray(func(*coords), dtype=complex)
    return GridSignal(spec, total)


def reversal(values: np.ndarray) -> np.ndarray:
    """values(-j mod L) along every axis."""
    return np.roll(np.flip(values), 1, axis=tuple(range(values.ndim)))


def random_symmetric_window(spec: GridSpec, seed: int) -> GridSignal:
    """Real, even, unit-norm window; its DFT is real."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(spec.shape)
    v = v + reversal(v)
    g = GridSignal(spec, v)
    return g * (1.0 / g.norm())


def random_signal(spec: GridSpec, seed: int) -> GridSignal:
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(spec.shape) + 1j * rng.standard_normal(spec.shape)
    return GridSignal(spec, v)


def separable_window(spec: GridSpec, factors) -> GridSignal:
    """Tensor product of 1-D sample vectors, one per axis, each of length L."""
    if len(factors) != spec.d:
        raise DimensionMismatch(f"need {spec.d} factors, got {len(factors)}")
    out = np.ones((1,) * 0, dtype=complex)
    for fac in factors:
        fac = np.asarray(getattr(fac, "values", fac), dtype=complex).reshape(-1)
        if fac.size != spec.L:
            raise DimensionMismatch(f"factor needs {spec.L} samples, got {fac.size}")
        out = np.multiply.outer(out, fac)
    return GridSignal(spec, out)


def random_hermitian_window(spec: GridSpec, seed: int) -> GridSignal:
    """Unit-norm window with a real, generally non-even, spectrum.

    Real even windows have Zak transforms that vanish on whole fibers for
    some non-diagonal groups (e.g. the diagonal group in d=2), so tight
    windows are built from these instead.
    """
    rng = np.random.default_rng(seed)
    spectrum = GridSignal(spec, rng.standard_normal(spec.shape), "freq")
    g = dft(spectrum, "inverse")
    return g * (1.0 / g.norm())
