"""Symplectic matrices, operator plans built from Fourier/dilation/chirp
primitives, their phase factors, and their exact action on the grid.

A plan is written leftmost first and applied right to left, like a
composition of operators.  Its matrix is the product of the associated
matrices in written order:

    Fourier        <->  J = [[0, I], [-I, 0]]
    InverseFourier <-> -J
    Dilation(C)    <->  [[C^-1, 0], [0, C^T]]
    Chirp(M)       <->  [[I, 0], [M, I]]
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import groups as grp
from .errors import (
    AllBlocksSingular,
    BadParameters,
    DimensionMismatch,
    IncompatibleChirp,
    IncompatibleDilation,
    IncompatibleFourier,
    IncompatiblePlan,
    OddDimension,
)
from .grid import GridSignal, GridSpec, dft, tf_shift
from .synth import SystemFamily, wilson_coefficient, wilson_labels

SYMPLECTIC_TOL = 1e-10
COND_MAX = 1e8
_GRID_TOL = 1e-9

FOURIER = "Fourier"
INVERSE_FOURIER = "InverseFourier"
DILATION = "Dilation"
CHIRP = "Chirp"
KINDS = (FOURIER, INVERSE_FOURIER, DILATION, CHIRP)


def standard_J(d: int) -> np.ndarray:
    I = np.eye(d)
    Z = np.zeros((d, d))
    return np.block([[Z, I], [-I, Z]])


def _square_even(A) -> tuple:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise OddDimension(f"expected a square matrix, got shape {A.shape}")
    if A.shape[0] % 2:
        raise OddDimension(f"symplectic matrices have even size, got {A.shape[0]}")
    return A, A.shape[0] // 2


def blocks(A):
    A, d = _square_even(A)
    return A[:d, :d], A[:d, d:], A[d:, :d], A[d:, d:]


@dataclass(frozen=True)
class SymplecticCheck:
    ok: bool
    residual: float
    block_residuals: tuple  # (K^T Q asym, L^T R asym, K^T R - Q^T L - I)
    blocks_ok: bool

    def __bool__(self):
        return self.ok


def is_symplectic(A, tol: float = SYMPLECTIC_TOL) -> SymplecticCheck:
    A, d = _square_even(A)
    J = standard_J(d)
    res = float(np.max(np.abs(A.T @ J @ A - J)))
    K, L, Q, R = blocks(A)
    KQ, LR = K.T @ Q, L.T @ R
    br = (float(np.max(np.abs(KQ - KQ.T))), float(np.max(np.abs(LR - LR.T))),
          float(np.max(np.abs(K.T @ R - Q.T @ L - np.eye(d)))))
    return SymplecticCheck(res <= tol, res, br, max(br) <= tol)


@dataclass(frozen=True)
class SymplecticMatrix:
    K: np.ndarray
    L: np.ndarray
    Q: np.ndarray
    R: np.ndarray

    @property
    def d(self) -> int:
        return self.K.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        return np.block([[self.K, self.L], [self.Q, self.R]])


def as_symplectic(A, tol: float = 1e-9) -> SymplecticMatrix:
    chk = is_symplectic(A, tol)
    if not chk.ok:
        raise BadParameters(f"matrix is not symplectic (residual {chk.residual:.3g})")
    return SymplecticMatrix(*(np.array(b) for b in blocks(A)))


@dataclass(frozen=True, eq=False)
class PrimitiveOp:
    kind: str
    matrix: np.ndarray | None = None
    d: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise BadParameters(f"unknown primitive {self.kind!r}")
        if self.kind in (DILATION, CHIRP):
            m = np.atleast_2d(np.asarray(self.matrix, dtype=float))
            if m.shape[0] != m.shape[1]:
                raise DimensionMismatch("primitive matrix must be square")
            object.__setattr__(self, "d", m.shape[0])
            object.__setattr__(self, "matrix", m)
            if self.kind == DILATION and abs(np.linalg.det(m)) < 1e-300:
                raise BadParameters("dilation matrix must be invertible")
            if self.kind == CHIRP and np.max(np.abs(m - m.T)) > 1e-12:
                raise BadParameters("chirp matrix must be symmetric")

    def associated(self) -> np.ndarray:
        d = self.d
        I, Z = np.eye(d), np.zeros((d, d))
        if self.kind == FOURIER:
            return standard_J(d)
        if self.kind == INVERSE_FOURIER:
            return -standard_J(d)
        if self.kind == DILATION:
            return np.block([[np.linalg.inv(self.matrix), Z], [Z, self.matrix.T]])
        return np.block([[I, Z], [self.matrix, I]])

    def phase(self, nu) -> complex:
        nu = np.asarray(nu, dtype=float)
        lam, gam = nu[: self.d], nu[self.d:]
        if self.kind in (FOURIER, INVERSE_FOURIER):
            return np.exp(2j * np.pi * float(lam @ gam))
        if self.kind == DILATION:
            return 1.0 + 0j
        return np.exp(-1j * np.pi * float(lam @ self.matrix @ lam))

    def is_identity(self) -> bool:
        if self.kind == DILATION:
            return bool(np.allclose(self.matrix, np.eye(self.d), atol=0, rtol=0))
        if self.kind == CHIRP:
            return not np.any(self.matrix)
        return False

    def label(self) -> str:
        if self.matrix is None:
            return self.kind
        return f"{self.kind}({np.array2string(self.matrix, precision=6, separator=',')})"

    def to_json(self) -> dict:
        return {"kind": self.kind, "d": self.d,
                "matrix": None if self.matrix is None else self.matrix.tolist()}


def fourier(d: int = 1) -> PrimitiveOp:
    return PrimitiveOp(FOURIER, None, d)


def inverse_fourier(d: int = 1) -> PrimitiveOp:
    return PrimitiveOp(INVERSE_FOURIER, None, d)


def dilation(C) -> PrimitiveOp:
    return PrimitiveOp(DILATION, C)


def chirp(M) -> PrimitiveOp:
    return PrimitiveOp(CHIRP, M)


@dataclass(frozen=True, eq=False)
class OperatorPlan:
    ops: tuple
    d: int

    @property
    def matrix(self) -> np.ndarray:
        return recompose(self)

    def simplified(self) -> "OperatorPlan":
        return simplify(self)

    def kinds(self) -> list:
        return [op.kind for op in self.ops]

    def to_json(self) -> list:
        return [op.to_json() for op in self.ops]

    def __len__(self):
        return len(self.ops)


def make_plan(ops, d: int | None = None) -> OperatorPlan:
    ops = tuple(ops)
    if d is None:
        if not ops:
            raise BadParameters("an empty plan needs an explicit dimension")
        d = ops[0].d
    for op in ops:
        if op.d != d:
            raise DimensionMismatch(f"primitive {op.label()} acts in dimension {op.d}, plan has {d}")
    return OperatorPlan(ops, d)


def plan_from_json(items, d: int | None = None) -> OperatorPlan:
    ops = []
    for it in items:
        kind = it["kind"]
        if kind in (FOURIER, INVERSE_FOURIER):
            ops.append(PrimitiveOp(kind, None, int(it.get("d", d or 1))))
        else:
            ops.append(PrimitiveOp(kind, np.asarray(it["matrix"], dtype=float)))
    return make_plan(ops, d)


def recompose(plan: OperatorPlan) -> np.ndarray:
    out = np.eye(2 * plan.d)
    for op in plan.ops:
        out = out @ op.associated()
    return out


def simplify(plan: OperatorPlan) -> OperatorPlan:
    """Drop trivial chirps and dilations and cancel adjacent F / F^-1 pairs."""
    stack = []
    for op in plan.ops:
        if op.is_identity():
            continue
        if stack and {stack[-1].kind, op.kind} == {FOURIER, INVERSE_FOURIER}:
            stack.pop()
            continue
        stack.append(op)
    return OperatorPlan(tuple(stack), plan.d)


def _invertible(B, cond_max):
    return np.linalg.cond(B) <= cond_max


def _case_plan(case, K, L, Q, R):
    """The operator chain for one invertible block, leftmost factor first."""
    d = K.shape[0]
    inv = np.linalg.inv
    F, Fi = fourier(d), inverse_fourier(d)

    def sym(M):
        return chirp(0.5 * (M + M.T))

    if case == "K":
        Ki = inv(K)
        return [sym(Q @ Ki), dilation(Ki), F, sym(-Ki @ L), Fi]
    if case == "L":
        Li = inv(L)
        return [sym(R @ Li), dilation(Li), F, sym(Li @ K)]
    if case == "Q":
        Qi = inv(Q)
        return [Fi, sym(-K @ Qi), dilation(Qi), F, sym(-Qi @ R), Fi]
    if case == "R":
        Ri = inv(R)
        return [Fi, sym(-L @ Ri), dilation(Ri), F, sym(Ri @ Q)]
    raise BadParameters(f"unknown block {case!r}")


def decompose(A, order=("L", "K", "R", "Q"), cond_max: float = COND_MAX,
              reduce: bool = True) -> OperatorPlan:
    """Plan for the first invertible block in ``order``."""
    A, d = _square_even(A)
    chk = is_symplectic(A, 1e-9)
    if not chk.ok:
        raise BadParameters(f"matrix is not symplectic (residual {chk.residual:.3g})")
    K, L, Q, R = blocks(A)
    named = {"K": K, "L": L, "Q": Q, "R": R}
    for case in order:
        if _invertible(named[case], cond_max):
            plan = OperatorPlan(tuple(_case_plan(case, K, L, Q, R)), d)
            return simplify(plan) if reduce else plan
    raise AllBlocksSingular("no block of the matrix is invertible within the condition limit")


def phase_factor(plan: OperatorPlan, nu) -> complex:
    """Fold phi over the plan from the right: prod_i phi(op_i, A_{i+1}...A_m nu)."""
    v = np.asarray(nu, dtype=float)
    if v.shape != (2 * plan.d,):
        raise DimensionMismatch(f"nu must have length {2 * plan.d}")
    total = 1.0 + 0j
    for op in reversed(plan.ops):
        total *= op.phase(v)
        v = op.associated() @ v
    return complex(total)


def ks_plan(a: float, c: float):
    """A = [[2a, c], [0, 1/(2a)]] with the chain D_{1/(2a)} F S_{-c/(2a)} F^-1."""
    if not a > 0 or c < 0:
        raise BadParameters("need a > 0 and c >= 0")
    A = np.array([[2 * a, c], [0.0, 1 / (2 * a)]])
    plan = OperatorPlan((dilation([[1 / (2 * a)]]), fourier(1), chirp([[-c / (2 * a)]]),
                         inverse_fourier(1)), 1)
    return as_symplectic(A), simplify(plan)


def random_symplectic(d: int, rng, factors: int = 4) -> np.ndarray:
    """Product of random Fourier, dilation and chirp generator matrices."""
    out = np.eye(2 * d)
    for _ in range(factors):
        kind = rng.integers(3)
        if kind == 0:
            m = standard_J(d)
        elif kind == 1:
            C = rng.standard_normal((d, d)) + 2 * np.eye(d)
            m = dilation(C).associated()
        else:
            M = rng.standard_normal((d, d))
            m = chirp(M + M.T).associated()
        out = out @ m
    return out


def random_plan(d: int, rng, length: int = 4) -> OperatorPlan:
    ops = []
    for _ in range(length):
        kind = rng.integers(4)
        if kind == 0:
            ops.append(fourier(d))
        elif kind == 1:
            ops.append(inverse_fourier(d))
        elif kind == 2:
            ops.append(dilation(rng.standard_normal((d, d)) + 2 * np.eye(d)))
        else:
            M = rng.standard_normal((d, d))
            ops.append(chirp(M + M.T))
    return OperatorPlan(tuple(ops), d)


# ---- grid realization ------------------------------------------------------

def _is_int(x, tol=_GRID_TOL) -> bool:
    x = np.asarray(x, dtype=float)
    return bool(np.all(np.abs(x - np.rint(x)) <= tol))


def check_op(op: PrimitiveOp, spec: GridSpec, index: int = 0) -> None:
    """Raise if ``op`` cannot act exactly and unitarily on ``spec``."""
    if op.d != spec.d:
        raise DimensionMismatch(f"primitive {index} acts in dimension {op.d}, grid has {spec.d}")
    where = f"primitive {index} ({op.label()})"
    if op.kind in (FOURIER, INVERSE_FOURIER):
        if spec.P != spec.r:
            raise IncompatibleFourier(
                f"{where}: the Fourier transform maps the grid to itself only when P == r "
                f"(got P={spec.P}, r={spec.r})")
    elif op.kind == DILATION:
        C = op.matrix
        if not _is_int(C) or abs(abs(round(np.linalg.det(C))) - 1) > _GRID_TOL:
            raise IncompatibleDilation(
                f"{where}: needs an integer matrix with determinant +-1 to permute the grid unitarily")
    else:
        M = op.matrix
        if not _is_int(spec.P * M / spec.r) or not _is_int(spec.P ** 2 * np.diag(M) / 2):
            raise IncompatibleChirp(
                f"{where}: exp(pi i <x, M x>) is P-periodic on x = j/r only if P*M/r is integral "
                f"and P^2*M_ii is even (P={spec.P}, r={spec.r})")


def check_plan(plan: OperatorPlan, spec: GridSpec) -> None:
    for i, op in enumerate(plan.ops):
        check_op(op, spec, i)


def _grid_axes(spec):
    j = np.arange(spec.L)
    return np.meshgrid(*([j] * spec.d), indexing="ij")


def apply_op(op: PrimitiveOp, f: GridSignal) -> GridSignal:
    spec = f.spec
    check_op(op, spec)
    if op.kind == FOURIER:
        return GridSignal(spec, dft(f).values)
    if op.kind == INVERSE_FOURIER:
        return GridSignal(spec, dft(GridSignal(spec, f.values, "freq"), "inverse").values)
    idx = _grid_axes(spec)
    if op.kind == DILATION:
        C = np.rint(op.matrix).astype(np.int64)
        src = [sum(C[a, b] * idx[b] for b in range(spec.d)) % spec.L for a in range(spec.d)]
        return f.with_values(f.values[tuple(src)])
    M = op.matrix
    # x = j/r; exp(pi i x.Mx) computed from the integer quadratic form to limit rounding
    q = sum(M[a, b] * idx[a].astype(float) * idx[b] for a in range(spec.d) for b in range(spec.d))
    phase = np.mod(q / spec.r ** 2, 2.0)
    return f.with_values(f.values * np.exp(1j * np.pi * phase))


def apply_plan(plan: OperatorPlan, f: GridSignal) -> GridSignal:
    check_plan(plan, f.spec)
    out = f
    for op in reversed(plan.ops):
        out = apply_op(op, out)
    return out


def grid_compatible(spec: GridSpec, nu) -> bool:
    nu = np.asarray(nu, dtype=float)
    d = spec.d
    return _is_int(nu[:d] * spec.r) and _is_int(nu[d:] * spec.P)


def pi_shift(f: GridSignal, nu) -> GridSignal:
    """pi(nu) f = M_gamma T_lambda f for nu = (lambda, gamma)."""
    d = f.spec.d
    nu = np.asarray(nu, dtype=float)
    if not grid_compatible(f.spec, nu):
        raise IncompatiblePlan(f"time-frequency shift {nu.tolist()} is not on the grid")
    return tf_shift(f, nu[:d], nu[d:])


def intertwining_residual(plan: OperatorPlan, f: GridSignal, nu) -> float:
    """|| mu pi(nu) f - phi(nu) pi(A nu) mu f || for a grid-compatible nu."""
    A = recompose(plan)
    lhs = apply_plan(plan, pi_shift(f, nu))
    rhs = pi_shift(apply_plan(plan, f), A @ np.asarray(nu, dtype=float)) * phase_factor(plan, nu)
    return (lhs - rhs).norm()


# ---- symplectic Wilson systems -------------------------------------------

def symplectic_wilson_family(g: GridSignal, G: grp.SeparableGroup, plan: OperatorPlan,
                             include_phase: bool = True) -> SystemFamily:
    """Members pi(A lam) pi(A lam*_h) c_gamma sum_sigma phi(A, R sigma gamma) sign pi(A R sigma gamma) mu g.

    Labels and ordering follow ``wilson_family``.  The reflections act on the
    integer representative of gamma in [0, r), not its residue.
    """
    spec = g.spec
    d = spec.d
    if plan.d != d or G.d != d:
        raise DimensionMismatch("plan, group and window dimensions differ")
    check_plan(plan, spec)
    A = recompose(plan)
    base = apply_plan(plan, g)
    rows, labels = [], []
    gens = []
    zero = np.zeros(d)
    for gamma, h in wilson_labels(G, spec.r):
        ih = grp.iso_I(G, h)
        acc = np.zeros(spec.shape, dtype=complex)
        for sigma in G.elements:
            sign = grp.pairing(tuple(a + b for a, b in zip(ih, gamma)), sigma)
            nu = np.concatenate([zero, np.asarray(grp.reflect(sigma, gamma), dtype=float)])
            Anu = A @ nu
            if not grid_compatible(spec, Anu):
                raise IncompatiblePlan(f"A maps {nu.tolist()} off the grid to {Anu.tolist()}")
            ph = phase_factor(plan, nu) if include_phase else 1.0
            acc = acc + ph * sign * pi_shift(base, Anu).values
        acc = acc * wilson_coefficient(G, gamma, spec.r)
        lam_star = np.concatenate([np.asarray(h, dtype=float) / 2, zero])
        gens.append((gamma, h, pi_shift(GridSignal(spec, acc), A @ lam_star)))
    for gamma, h, psi in gens:
        for n in itertools.product(range(spec.P), repeat=d):
            lam = np.concatenate([np.asarray(n, dtype=float), zero])
            rows.append(pi_shift(psi, A @ lam).flat())
            labels.append(((gamma, h), (0.0,) * d, n))
    return SystemFamily(spec, np.array(rows), labels, None, "symplectic_wilson")


def wilson_phase_diagonal(plan: OperatorPlan, G: grp.SeparableGroup, spec: GridSpec) -> np.ndarray:
    """phi(A, lam) phi(A, lam*_h) per member, in wilson_family order."""
    d = spec.d
    zero = np.zeros(d)
    out = []
    for gamma, h in wilson_labels(G, spec.r):
        ls = np.concatenate([np.asarray(h, dtype=float) / 2, zero])
        for n in itertools.product(range(spec.P), repeat=d):
            lam = np.concatenate([np.asarray(n, dtype=float), zero])
            out.append(phase_factor(plan, lam) * phase_factor(plan, ls))
    return np.array(out)


def phase_constant_per_orbit(plan: OperatorPlan, G: grp.SeparableGroup, r: int) -> bool:
    """Are the phases phi(A, R sigma gamma) equal across sigma for every gamma?"""
    d = G.d
    zero = np.zeros(d)
    for gamma in grp.fundamental_domain(G, r):
        vals = [phase_factor(plan, np.concatenate([zero, np.asarray(grp.reflect(s, gamma), float)]))
                for s in G.elements]
        if max(abs(v - vals[0]) for v in vals) > 1e-12:
            return False
    return True
