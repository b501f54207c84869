"""Registry of verification checks.

Every check returns a non-negative residual-type value; it passes when the
value is at most its tolerance.  Checks that need a particular grid or
dimension carry their own defaults, overridable per check from the
campaign config.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import contin, frames, grid, synth, sympl
from . import groups as grp
from .errors import ConfigError


@dataclass(frozen=True)
class Claim:
    tag: str
    citation: str


@dataclass
class CheckContext:
    """Campaign inputs shared by the window-dependent checks."""

    spec: grid.GridSpec
    group: grp.SeparableGroup
    window: grid.GridSignal
    factors: list | None = None
    seed: int = 0
    params: dict = field(default_factory=dict)


@dataclass
class CheckResult:
    value: float
    parameters: dict
    details: dict = field(default_factory=dict)
    grids: dict = field(default_factory=dict)  # name -> (omega, values, error_bound)


@dataclass(frozen=True)
class Check:
    name: str
    claim: Claim
    tolerance: float
    run: Callable
    defaults: dict = field(default_factory=dict)
    uses_window: bool = False


REGISTRY: dict = {}


def register(name, tag, citation, tolerance, defaults=None, uses_window=False):
    def wrap(fn):
        REGISTRY[name] = Check(name, Claim(tag, citation), tolerance, fn, dict(defaults or {}),
                               uses_window)
        return fn
    return wrap


def get_check(name: str) -> Check:
    try:
        return REGISTRY[name]
    except KeyError:
        raise ConfigError(f"unknown check {name!r}") from None


def claim_table() -> list:
    return [(c.name, c.claim.tag, c.claim.citation, c.tolerance) for c in REGISTRY.values()]


def _ctx_params(ctx: CheckContext) -> dict:
    return {"grid": {"d": ctx.spec.d, "P": ctx.spec.P, "r": ctx.spec.r},
            "group": grp.group_to_mapping(ctx.group)}


def _unit(f: grid.GridSignal) -> grid.GridSignal:
    return f * (1.0 / f.norm())


# ---- Gabor / Wilson on the finite model ----------------------------------

@register("frame_operator_ratio", "gabor_wilson_operator_identity",
          "For a window with real spectrum (separable when k >= 2) the Gabor frame operator "
          "over half of Lambda equals 2^k times the Wilson frame operator.", 1e-10,
          uses_window=True)
def _frame_operator_ratio(ctx, p):
    res = frames.frame_operator_ratio_check(ctx.window, ctx.group, ctx.factors)
    return CheckResult(res, {**_ctx_params(ctx), "factor": ctx.group.order})


@register("wilson_onb", "wilson_onb_from_tight_gabor",
          "If the Gabor system is tight with bound 2^k, the Wilson system is an orthonormal basis "
          "with exactly L^d members.", 1e-9, uses_window=True)
def _wilson_onb(ctx, p):
    h = frames.canonical_tight(ctx.window, ctx.group)
    W = synth.wilson_family(h, ctx.group)
    rep = frames.frame_bounds(W)
    gab = frames.verify_tight_via_autocorr(synth.gabor_family(h, ctx.group), float(ctx.group.order))
    count_ok = W.count == ctx.spec.size
    value = max(rep.gram_deviation, gab.deviation) if count_ok else float("inf")
    return CheckResult(value, _ctx_params(ctx),
                       {"gram_deviation": rep.gram_deviation, "gabor_deviation": gab.deviation,
                        "members": W.count, "flags": rep.flags})


@register("riesz_duality", "riesz_bound_duality",
          "Gabor frame bounds (a, b) correspond to Wilson Riesz bounds (2^-k a, 2^-k b).", 1e-8,
          uses_window=True)
def _riesz_duality(ctx, p):
    G = ctx.group
    rg = frames.frame_bounds(synth.gabor_family(ctx.window, G))
    rw = frames.frame_bounds(synth.wilson_family(ctx.window, G))
    if not rg.flags["frame"]:
        return CheckResult(float("inf"), _ctx_params(ctx), {"gabor_frame": False})
    lo, hi = rg.lower / G.order, rg.upper / G.order
    value = max(abs(rw.riesz_lower - lo) / lo, abs(rw.riesz_upper - hi) / hi)
    return CheckResult(value, _ctx_params(ctx),
                       {"gabor_bounds": [rg.lower, rg.upper],
                        "wilson_riesz": [rw.riesz_lower, rw.riesz_upper]})


@register("tight_autocorr", "autocorrelation_tightness_criterion",
          "A shift-invariant system is tight with bound a exactly when t_alpha = a delta_{alpha,0}.",
          1e-10, uses_window=True)
def _tight_autocorr(ctx, p):
    G = ctx.group
    h = frames.canonical_tight(ctx.window, G)
    verdicts = {}
    for name, g in (("window", ctx.window), ("tight", h)):
        for kind, build in (("gabor", synth.gabor_family), ("wilson", synth.wilson_family)):
            rep = frames.verify_tight_via_autocorr(build(g, G))
            verdicts[f"{name}_{kind}"] = {"deviation": rep.deviation, "autocorr_tight": rep.passed,
                                          "eigen_tight": rep.eigen_tight, "agrees": rep.agrees}
    tight = frames.verify_tight_via_autocorr(synth.gabor_family(h, G), float(G.order))
    agree = all(v["agrees"] for v in verdicts.values())
    return CheckResult(tight.deviation if agree else float("inf"), _ctx_params(ctx), verdicts)


@register("wf_identity", "weak_frame_operator_identity",
          "sum |<f, member>|^2 equals sum_alpha <t_alpha T_alpha fhat, fhat> for "
          "shift-invariant systems.", 1e-10, {"signals": 10}, uses_window=True)
def _wf_identity(ctx, p):
    worst = 0.0
    for build in (synth.gabor_family, synth.wilson_family):
        F = build(ctx.window, ctx.group)
        table = frames.autocorr_table(F)
        for i in range(int(p["signals"])):
            f = _unit(grid.random_signal(ctx.spec, ctx.seed * 7919 + i))
            worst = max(worst, frames.wf_identity_check(F, f, table))
    return CheckResult(worst, {**_ctx_params(ctx), "signals": int(p["signals"])})


@register("wilson_autocorr", "wilson_autocorrelation_vanishing",
          "For a symmetric (separable) window the Wilson autocorrelations t_alpha vanish for alpha "
          "outside 2 Lambda-perp.", 1e-12, uses_window=True)
def _wilson_autocorr(ctx, p):
    W = synth.wilson_family(ctx.window, ctx.group)
    table = frames.autocorr_table(W)
    worst = max((float(np.max(np.abs(t))) for a, t in table.entries.items()
                 if not grp.in_dual_two_lambda(ctx.group, a)), default=0.0)
    return CheckResult(worst, _ctx_params(ctx))


@register("orthogonal_modulates", "orthogonal_modulates",
          "For a window whose Gabor system is tight, its modulates by twice the dual group "
          "form an orthogonal set.", 1e-10, uses_window=True)
def _orthogonal_modulates(ctx, p):
    h = frames.canonical_tight(ctx.window, ctx.group)
    out = frames.orthogonal_modulates_check(h, synth.gabor_family(h, ctx.group))
    return CheckResult(out["max_offdiag"], _ctx_params(ctx), out)


@register("cardinality", "family_cardinality",
          "The Gabor family has 2^k L^d members and the pruned Wilson family exactly L^d.", 0.0,
          {"grids": [[1, 2, 2], [1, 4, 8], [1, 2, 6], [2, 2, 2], [2, 2, 4], [3, 2, 2]]})
def _cardinality(ctx, p):
    bad = 0
    cases = 0
    for d, P, r in p["grids"]:
        spec = grid.make_grid(d, P, r)
        for G in grp.separable_groups(d):
            g = grid.delta(spec)
            cases += 1
            gab = synth.gabor_family(g, G).count
            wil = len(synth.wilson_labels(G, r)) * P ** d
            bad += (gab != G.order * spec.size) + (wil != spec.size)
    return CheckResult(float(bad), {"grids": p["grids"], "cases": cases})


# ---- group combinatorics -----------------------------------------------------

def _half_lambda_box(G, half_width):
    """Points of (1/2) Lambda inside [-w, w]^d, found by brute force."""
    rng = range(-2 * half_width, 2 * half_width + 1)
    return np.array([n for n in itertools.product(rng, repeat=G.d) if grp.in_lambda(G, n)]) / 2


def _box(w, d):
    return np.array(list(itertools.product(range(-w, w + 1), repeat=d)))


def _pairs_integrally(alphas, points):
    """Row i: <alphas[i], x> is an integer for every x in points."""
    prod = alphas @ points.T
    return np.all(np.abs(prod - np.rint(prod)) < 1e-12, axis=1)


@register("annihilator", "annihilator_even_sum",
          "The dual of Z^d together with 1/2 + Z^d is the set of integer vectors with even "
          "coordinate sum.", 0.0, {"box": 5, "max_d": 3})
def _annihilator(ctx, p):
    w = int(p["box"])
    bad = 0
    for d in range(1, int(p["max_d"]) + 1):
        doubled = _box(2 * w, d)
        same_parity = np.all(doubled % 2 == doubled[:, :1] % 2, axis=1)
        lam = doubled[same_parity] / 2
        alphas = _box(w, d)
        brute = _pairs_integrally(alphas, lam)
        bad += int(np.sum(brute != (alphas.sum(axis=1) % 2 == 0)))
    return CheckResult(float(bad), {"box": w, "max_d": int(p["max_d"])})


def _dual_mismatches(G, w):
    bad = 0
    alphas = _box(w, G.d)
    brute = _pairs_integrally(alphas, _half_lambda_box(G, w))
    bad += sum(b != grp.in_dual_two_lambda(G, a) for a, b in zip(alphas.tolist(), brute))
    els = G.elements
    for i, si in enumerate(G.generators):
        for j, sj in enumerate(G.generators):
            bad += (grp.pairing(grp.iso_I(G, si), sj) == -1) != (i == j)
    for s in els:
        for h in els:
            bad += grp.pairing(grp.iso_I(G, s), h) != grp.pairing(s, grp.iso_I(G, h))
        # I(s) in 2 Lambda-perp only for s = 0
        bad += grp.in_dual_two_lambda(G, grp.iso_I(G, s)) != (not any(s))
        # pairing only sees alpha modulo 2 Lambda-perp
        for beta in itertools.product(range(-2, 3), repeat=G.d):
            if grp.in_dual_two_lambda(G, beta):
                for alpha in itertools.product(range(-1, 2), repeat=G.d):
                    bad += grp.pairing(alpha, s) != grp.pairing(np.add(alpha, beta), s)
    return bad


@register("group_duality", "dual_group_relations",
          "2 Lambda-perp is characterised by even block sums, I pairs generators with their "
          "anchors and is symmetric, and pairings are coset invariant.", 0.0,
          {"box": 5, "max_d": 3})
def _group_duality(ctx, p):
    bad, groups = 0, 0
    for d in range(1, int(p["max_d"]) + 1):
        for G in grp.separable_groups(d):
            groups += 1
            bad += _dual_mismatches(G, int(p["box"]))
    return CheckResult(float(bad), {"box": int(p["box"]), "max_d": int(p["max_d"]), "groups": groups})


def _char_sum_mismatches(G, w):
    bad = 0
    for gamma in itertools.product(range(-w, w + 1), repeat=G.d):
        stab = [s for s in G.elements if grp.reflect(s, gamma) == tuple(gamma)]
        for h in G.elements:
            ih = grp.iso_I(G, h)
            for s0 in G.elements:
                coset = {tuple((a + b) % 2 for a, b in zip(s0, s)) for s in stab}
                brute = sum(grp.pairing(np.add(ih, gamma), s) for s in coset)
                got = grp.char_sum(G, h, gamma, s0)
                bad += got != brute
                bad += abs(got) not in (0, len(stab))
                bad += grp.is_vacuous(G, h, gamma) != (grp.char_sum(G, h, gamma, (0,) * G.d) == 0)
    return bad


@register("char_sum", "character_sum_values",
          "Character sums over cosets of the stabilizer are 0 or plus/minus its order, "
          "depending on whether the character is trivial there.", 0.0, {"box": 3, "max_d": 3})
def _char_sum(ctx, p):
    bad, groups = 0, 0
    for d in range(1, int(p["max_d"]) + 1):
        for G in grp.separable_groups(d):
            groups += 1
            bad += _char_sum_mismatches(G, int(p["box"]))
    return CheckResult(float(bad), {"box": int(p["box"]), "max_d": int(p["max_d"]), "groups": groups})


# ---- continuous examples ---------------------------------------------------------

@register("partition_of_unity", "example_windows_partition",
          "The cos and tent windows satisfy sum_n |g(x - n)|^2 = 1.", 1e-12,
          {"grid_count": 10000, "windows": ["cos", "tent"]})
def _partition(ctx, p):
    worst, out = 0.0, {}
    for name in p["windows"]:
        dev, c = contin.partition_of_unity_check(contin.builtin_window(name), 1.0, int(p["grid_count"]))
        out[name] = {"deviation": dev, "constant": c}
        worst = max(worst, dev, abs(c - 1))
    return CheckResult(worst, {"grid_count": int(p["grid_count"]), "windows": list(p["windows"])}, out)


@register("example12_lattice", "example_windows_lattice",
          "The cos and tent windows give tight Gabor frames with bound 2; the check reports "
          "which of the two half-step lattices is certified.", 1e-8,
          {"n_omega": 16, "lattice": "M_{m/2}T_n"})
def _example12(ctx, p):
    rep = contin.example12_report(n_omega=int(p["n_omega"]))
    lat = p["lattice"]
    value = max(max(r["lattices"][lat]["deviation"], r["lattices"][lat]["tail_bound"])
                for r in rep.values())
    details = {name: {"certified": r["certified"],
                      "deviation": {k: v["deviation"] for k, v in r["lattices"].items()},
                      "tail_bound": {k: v["tail_bound"] for k, v in r["lattices"].items()}}
               for name, r in rep.items()}
    return CheckResult(value, {"n_omega": int(p["n_omega"]), "lattice": lat}, details)


@register("counterexample", "counterexample_indicator",
          "For ghat = 1/2 on D the Wilson alternating sum equals 1/2 on Omega, so the Wilson "
          "system fails to be orthonormal while the Gabor system is tight with bound 4.", 1e-12,
          {"n": 20, "margin": 0.05})
def _counterexample(ctx, p):
    rep = contin.counterexample_report(int(p["n"]), float(p["margin"]))
    value = max(rep["wilson_alternating_sum_deviation"], rep["gabor_t0_deviation"],
                rep["gabor_other_alpha_max"])
    if not rep["all_interior"]:
        value = float("inf")
    w = contin.builtin_window("indicator_D")
    pts = contin.omega_interior_grid(int(p["n"]), float(p["margin"]))
    grids = {"counterexample_alternating_sum": (pts, contin.alternating_sum(w, (1, 1), pts), 0.0)}
    return CheckResult(value, {"n": int(p["n"]), "margin": float(p["margin"])}, rep, grids)


# ---- symplectic ------------------------------------------------------------------

@register("symplectic_membership", "symplectic_block_criteria",
          "A^T J A = J holds exactly when K^T Q and L^T R are symmetric and K^T R - Q^T L = I.",
          0.0, {"matrices": 200, "seed": 11})
def _membership(ctx, p):
    rng = np.random.default_rng(int(p["seed"]))
    bad = 0
    n = int(p["matrices"])
    for i in range(n):
        d = 1 + i % 3
        A = sympl.random_symplectic(d, rng)
        if i % 2:
            A = A + 1e-3 * rng.standard_normal(A.shape)
        chk = sympl.is_symplectic(A)
        bad += chk.ok != chk.blocks_ok
        bad += chk.ok != (i % 2 == 0)
    return CheckResult(float(bad), {"matrices": n, "seed": int(p["seed"])})


@register("decompose_roundtrip", "symplectic_decomposition",
          "A symplectic matrix with an invertible block factors into Fourier, dilation and chirp "
          "matrices.", 1e-9, {"matrices": 200, "seed": 12})
def _roundtrip(ctx, p):
    rng = np.random.default_rng(int(p["seed"]))
    worst = 0.0
    for i in range(int(p["matrices"])):
        A = sympl.random_symplectic(1 + i % 3, rng)
        plan = sympl.decompose(A)
        worst = max(worst, float(np.max(np.abs(sympl.recompose(plan) - A))),
                    sympl.is_symplectic(sympl.recompose(plan), 1e-9).residual)
    return CheckResult(worst, {"matrices": int(p["matrices"]), "seed": int(p["seed"])})


@register("phase_reflection", "phase_reflection_invariance",
          "The phase factor phi(A, nu) is invariant under nu -> -nu.", 1e-12,
          {"plans": 100, "points": 100, "seed": 13})
def _phase_reflection(ctx, p):
    rng = np.random.default_rng(int(p["seed"]))
    worst = 0.0
    for i in range(int(p["plans"])):
        d = 1 + i % 3
        plan = sympl.random_plan(d, rng, 1 + i % 6)
        for _ in range(int(p["points"])):
            nu = rng.uniform(-3, 3, 2 * d)
            worst = max(worst, abs(sympl.phase_factor(plan, nu) - sympl.phase_factor(plan, -nu)))
    return CheckResult(worst, {k: int(p[k]) for k in ("plans", "points", "seed")})


def grid_test_plans(d):
    """Grid-compatible plans on a square grid covering every primitive kind."""
    I = np.eye(d)
    shear = I.copy()
    if d > 1:
        shear[0, 1] = 1
    M = 2 * I
    if d > 1:
        M[0, 1] = M[1, 0] = 1
    F, Fi = sympl.fourier(d), sympl.inverse_fourier(d)
    ops = [[F], [Fi], [sympl.dilation(-I)], [sympl.dilation(shear)], [sympl.chirp(M)],
           [sympl.chirp(-M), F, sympl.dilation(shear), Fi, sympl.chirp(M)],
           [F, F, sympl.chirp(M), Fi]]
    return [sympl.make_plan(o, d) for o in ops]


@register("intertwining", "intertwining_identity",
          "mu(A) pi(nu) = phi(A, nu) pi(A nu) mu(A) for every primitive and composite plan.",
          1e-11, {"grids": [[1, 8, 8], [2, 4, 4]], "points": 20, "seed": 14})
def _intertwining(ctx, p):
    rng = np.random.default_rng(int(p["seed"]))
    worst, unitary = 0.0, 0.0
    for d, P, r in p["grids"]:
        spec = grid.make_grid(d, P, r)
        f = _unit(grid.random_signal(spec, int(p["seed"])))
        for plan in grid_test_plans(d):
            unitary = max(unitary, abs(sympl.apply_plan(plan, f).norm() - 1))
            for _ in range(int(p["points"])):
                nu = rng.integers(-3 * spec.L, 3 * spec.L, 2 * d) / r
                worst = max(worst, sympl.intertwining_residual(plan, f, nu))
    return CheckResult(max(worst, unitary), {"grids": p["grids"], "points": int(p["points"])},
                       {"intertwining": worst, "unitarity": unitary})


def _tight_on(spec, G, seed):
    g, _ = frames.random_separable_window(spec, G, seed)
    return frames.canonical_tight(g, G)


@register("ks_onb", "ks_wilson_onb",
          "With ab = 1/2 and the matrix [[2a, c], [0, 1/(2a)]] the transferred Wilson system of a "
          "tight window is an orthonormal basis.", 1e-9, {"P": 8, "c": [0, 1, 2, 3], "seed": 15})
def _ks_onb(ctx, p):
    P = int(p["P"])
    spec = grid.make_grid(1, P, P)
    G = grp.full_group(1)
    h = _tight_on(spec, G, int(p["seed"]))
    worst, out = 0.0, {}
    for c in p["c"]:
        _, plan = sympl.ks_plan(0.5, float(c))
        F = sympl.symplectic_wilson_family(h, G, plan)
        rep = frames.frame_bounds(F)
        out[str(c)] = {"gram_deviation": rep.gram_deviation, "onb": rep.flags["onb"]}
        worst = max(worst, rep.gram_deviation)
    return CheckResult(worst, {"P": P, "r": P, "a": 0.5, "c": list(p["c"])}, out)


@register("symplectic_wilson", "symplectic_wilson_gram",
          "Transferring a Wilson system by mu(A) preserves its Gram matrix; for the Fourier plan "
          "the Grams agree entrywise.", 1e-10, {"d": 1, "P": 8, "seed": 16})
def _symplectic_wilson(ctx, p):
    d, P = int(p["d"]), int(p["P"])
    spec = grid.make_grid(d, P, P)
    G = grp.full_group(d)
    h = _tight_on(spec, G, int(p["seed"]))
    ref = frames.gram(synth.wilson_family(h, G))
    plan = sympl.make_plan([sympl.fourier(d)])
    with_phase = frames.gram(sympl.symplectic_wilson_family(h, G, plan))
    without = frames.gram(sympl.symplectic_wilson_family(h, G, plan, include_phase=False))
    value = float(np.max(np.abs(with_phase - ref)))
    return CheckResult(value, {"d": d, "P": P, "r": P, "plan": plan.to_json()},
                       {"phase_omitted_difference": float(np.max(np.abs(without - with_phase))),
                        "phase_constant_per_orbit": sympl.phase_constant_per_orbit(plan, G, P)})


@register("tensor_equivalence", "tensor_wilson_equivalence",
          "In d = 2 the tensor product of one-dimensional Wilson systems coincides with the "
          "Wilson system of the full group.", 1e-12, {"P": 2, "r": 4, "seed": 17})
def _tensor(ctx, p):
    spec = grid.make_grid(2, int(p["P"]), int(p["r"]))
    G = grp.full_group(2)
    g, _ = frames.random_separable_window(spec, G, int(p["seed"]))
    T = synth.tensor_wilson_family(g)
    W = synth.wilson_family(g, G)
    perm = synth.match_members(W, T)
    complete = sorted(perm.tolist()) == list(range(W.count))
    a = synth.canonical_phase(W.vectors)
    b = synth.canonical_phase(synth.reorder(T, perm).vectors)
    gram_diff = float(np.max(np.abs(spec.weight * (a.conj() @ a.T - b.conj() @ b.T))))
    member_diff = float(np.max(np.abs(a - b)))
    value = max(gram_diff, member_diff) if complete else float("inf")
    return CheckResult(value, {"P": int(p["P"]), "r": int(p["r"])},
                       {"gram_difference": gram_diff, "member_difference": member_diff,
                        "permutation_complete": complete})
