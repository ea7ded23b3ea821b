"""Verification suites: randomized invariant batteries with fixed seeds.

Each suite maps (seed, trial index, options) to one plain-dict record,
so trials can be computed independently, in any order or in parallel,
and reassembled deterministically: the per-trial generator is
np.random.default_rng([seed, index]) and nothing else is stateful.

Suites: goldman-gl and goldman-unoriented compare the combinatorial
bracket against the direct crossing-by-crossing pairing sum under a
representation; jacobi checks antisymmetry and the cyclic identity at
evaluation level; chen exercises the transport engine (error
certificate, factorial decay on a scalar-profile family, perturbed
holonomy against RK4, series multiplicativity); dgla sweeps instances
through the axiom battery, the moment identity, MC tangency and the
gauge homomorphism; variation compares closed-form gradients with
finite differences and the generic projection route.
"""

from __future__ import annotations

import numpy as np

from . import bracket as B
from . import dgla as DG
from . import groups as G
from . import serialize as Z
from . import surface as S
from . import transport as T

SUITE_NAMES = ("goldman-gl", "goldman-unoriented", "jacobi", "chen",
               "dgla", "variation")

_DEFAULT_TRIALS = {"goldman-gl": 50, "goldman-unoriented": 50, "jacobi": 30,
                   "chen": 26, "dgla": 8, "variation": 700}

_GL_GROUPS = ("GL(2,R)", "GL(2,C)")
_FORM_GROUPS = ("O(2)", "O(1,1)", "U(2)", "Sp(2,R)")
_VARIATION_GROUPS = ("GL(2,R)", "GL(2,C)", "O(2,1)", "O(2,C)", "U(1,1)",
                     "Sp(2,R)", "Sp(1,1)")


def default_trials(suite: str) -> int:
    return _DEFAULT_TRIALS[suite]


def random_reduced_word(rng: np.random.Generator, genus: int,
                        max_len: int = 6) -> list[int]:
    """Nonempty cyclically reduced word with letters in range."""
    letters = [k for k in range(-2 * genus, 2 * genus + 1) if k != 0]
    while True:
        length = int(rng.integers(1, max_len + 1))
        draw = [letters[int(rng.integers(len(letters)))] for _ in range(length)]
        word = S.cyclic_reduce(draw)
        if word:
            return word


def _spec_for(group: str) -> G.GroupSpec:
    return Z.parse_group_string(group)


def _goldman_record(seed: int, idx: int, genus, group, tol: float,
                    unoriented: bool) -> dict:
    rng = np.random.default_rng([seed, idx])
    groups = _FORM_GROUPS if unoriented else _GL_GROUPS
    gname = group if group else groups[idx % len(groups)]
    g = genus if genus else 1 + (idx // len(groups)) % 2
    spec = _spec_for(gname)
    rep = S.sample_representation(spec, g, rng)
    w1 = random_reduced_word(rng, g)
    w2 = random_reduced_word(rng, g)
    if unoriented:
        ls = B.bracket_unoriented(g, w1, w2, seed=2 * idx)
    else:
        ls = B.bracket_oriented(g, w1, w2, seed=2 * idx)
    value = ls.evaluate(rep)
    direct = B.poisson_direct(rep, w1, w2, seed=2 * idx + 1)
    resid = abs(value - direct)
    rel = resid / (1.0 + abs(value))
    return {"trial": idx, "genus": g, "group": gname,
            "word1": S.format_word(w1), "word2": S.format_word(w2),
            "value": value, "direct": direct, "residual": resid,
            "relative": rel, "pass": bool(rel <= tol)}


def goldman_gl_trial(seed: int, idx: int, genus=None, group=None,
                     tol: float = 1e-8) -> dict:
    return _goldman_record(seed, idx, genus, group, tol, unoriented=False)


def goldman_unoriented_trial(seed: int, idx: int, genus=None, group=None,
                             tol: float = 1e-8) -> dict:
    return _goldman_record(seed, idx, genus, group, tol, unoriented=True)


def jacobi_trial(seed: int, idx: int, genus=None, group=None,
                 tol: float = 1e-8) -> dict:
    rng = np.random.default_rng([seed, idx])
    unoriented = bool(idx % 2)
    if group:
        gname = group
    else:
        gname = ("U(2)" if unoriented else "GL(2,R)") if idx % 4 < 2 \
            else ("O(1,1)" if unoriented else "GL(2,C)")
    g = genus if genus else 1 + (idx // 4) % 2
    spec = _spec_for(gname)
    rep = S.sample_representation(spec, g, rng)
    words = [random_reduced_word(rng, g, max_len=3) for _ in range(3)]
    sums = [B.LoopSum([(w, 1)]) for w in words]

    def br(x, y, s):
        return B.bracket_sums(g, x, y, seed=s, unoriented=unoriented)

    anti = br(sums[0], sums[1], 3 * idx) + br(sums[1], sums[0], 3 * idx + 1)
    jac = (br(sums[0], br(sums[1], sums[2], 7 * idx), 7 * idx + 1)
           + br(sums[1], br(sums[2], sums[0], 7 * idx + 2), 7 * idx + 3)
           + br(sums[2], br(sums[0], sums[1], 7 * idx + 4), 7 * idx + 5))
    anti_resid = abs(anti.evaluate(rep))
    jac_resid = abs(jac.evaluate(rep))
    resid = max(anti_resid, jac_resid)
    return {"trial": idx, "genus": g, "group": gname,
            "unoriented": unoriented,
            "words": [S.format_word(w) for w in words],
            "antisymmetry": anti_resid, "jacobi": jac_resid,
            "residual": resid, "pass": bool(resid <= tol)}


def _chen_random_path(rng: np.random.Generator) -> T.MatrixPath:
    """Gentle non-commuting path with r_hat roughly in [0.3, 1.2]."""
    target = rng.uniform(0.3, 1.15)
    m0 = rng.normal(size=(2, 2))
    m0 = target * m0 / np.linalg.norm(m0, 2)
    m1 = rng.normal(size=(2, 2))
    m1 = 0.02 * m1 / np.linalg.norm(m1, 2)
    phase = rng.uniform(0, 2 * np.pi)
    return T.MatrixPath(lambda t: m0 + np.cos(2 * np.pi * t + phase) * m1, 2)


def _chen_ratio_path(rng: np.random.Generator) -> T.MatrixPath:
    m = rng.normal(size=(2, 2))
    m = m + (0.3 + np.linalg.norm(m, 2)) * np.eye(2)
    m = m / np.linalg.norm(m, 2)
    c = rng.uniform(0.5, 1.4)
    phase = rng.uniform(0, 2 * np.pi)

    def fn(t):
        return c * (1 + 0.3 * np.sin(2 * np.pi * t + phase)) * m

    return T.MatrixPath(fn, 2)


def _word_rep_pert(rng, scale):
    spec = _spec_for("U(2)" if rng.integers(2) else "GL(2,R)")
    g = 2
    rep = S.sample_representation(spec, g, rng)
    pert = {k + 1: scale * G.random_algebra_element(spec, rng)
            for k in range(2 * g)}
    return rep, pert


def chen_trial(seed: int, idx: int, genus=None, group=None,
               tol: float = 1e-7) -> dict:
    rng = np.random.default_rng([seed, idx])
    rec = {"trial": idx}
    if idx == 0:
        # constant nilpotent coefficient: one exact term, rest zero
        n = np.array([[0.0, 1.0], [0.0, 0.0]])
        res = T.picard_transport(T.MatrixPath(lambda t: n, 2), n_max=6,
                                 n_steps=200)
        resid = float(np.linalg.norm(res.transport - np.eye(2) - n))
        rec.update({"subtest": "nilpotent", "residual": resid,
                    "pass": bool(resid <= 1e-13)})
        return rec
    sub = ("transport", "ratio", "multiplicativity",
           "perturbed", "exact_zero")[(idx - 1) % 5]
    rec["subtest"] = sub
    if sub == "transport":
        path = _chen_random_path(rng)
        res = T.picard_transport(path, n_max=12, n_steps=2000)
        gap = float(np.linalg.norm(res.transport - T.rk4_transport(path, 2000)))
        budget = res.remainder_bound + tol
        norm_ok = all(
            np.linalg.norm(term, 2) <= res.r_hat ** k / _fact(k) * (1 + 1e-6)
            + 1e-12 for k, term in enumerate(res.terms))
        rec.update({"r_hat": res.r_hat, "gap": gap,
                    "remainder_bound": res.remainder_bound,
                    "residual": max(gap - res.remainder_bound, 0.0),
                    "term_bounds_ok": bool(norm_ok),
                    "pass": bool(gap <= budget and norm_ok)})
    elif sub == "ratio":
        path = _chen_ratio_path(rng)
        res = T.picard_transport(path, n_max=10, n_steps=2000)
        norms = [float(np.linalg.norm(t, 2)) for t in res.terms]
        worst = 0.0
        for k in range(10):
            if norms[k] < 1e-10:
                break
            worst = max(worst, norms[k + 1] / norms[k] - res.r_hat / (k + 1))
        rec.update({"r_hat": res.r_hat, "residual": worst,
                    "pass": bool(worst <= 1e-6)})
    elif sub == "multiplicativity":
        rep, pert = _word_rep_pert(rng, 0.2 / 3)
        u = random_reduced_word(rng, 2, max_len=3)
        v = random_reduced_word(rng, 2, max_len=3)
        out_u = T.perturbed_holonomy(rep, pert, u)
        out_v = T.perturbed_holonomy(rep, pert, v)
        out_uv = T.perturbed_holonomy(rep, pert, list(u) + list(v))
        hv = S.holonomy(rep, v)
        hv_inv = np.linalg.inv(hv)
        worst = 0.0
        for n in range(5):
            want = sum(out_v.series[n - i] @ hv @ out_u.series[i] @ hv_inv
                       for i in range(n + 1))
            worst = max(worst, float(np.linalg.norm(out_uv.series[n] - want)))
        rec.update({"word_u": S.format_word(u), "word_v": S.format_word(v),
                    "residual": worst, "pass": bool(worst <= tol)})
    elif sub == "perturbed":
        rep, pert = _word_rep_pert(rng, 0.05)
        word = random_reduced_word(rng, 2, max_len=6)
        out = T.perturbed_holonomy(rep, pert, word)
        gap = float(np.linalg.norm(
            out.value - T.rk4_perturbed_holonomy(rep, pert, word)))
        rec.update({"word": S.format_word(word), "gap": gap,
                    "residual": gap, "pass": bool(gap <= 1e-6)})
    else:
        rep, _ = _word_rep_pert(rng, 0.0)
        d = rep.spec.matrix_dim
        zeros = {k: np.zeros((d, d)) for k in range(1, 5)}
        word = random_reduced_word(rng, 2, max_len=6)
        out = T.perturbed_holonomy(rep, zeros, word, n_max=4, n_steps=400)
        exact = bool(np.array_equal(out.value, S.holonomy(rep, word)))
        rec.update({"word": S.format_word(word),
                    "residual": 0.0 if exact else 1.0, "pass": exact})
    return rec


_DGLA_CONFIGS = ((1, "GL(2,R)"), (1, "U(2)"), (2, "GL(2,R)"), (1, "Sp(2,R)"),
                 (1, "GL(2,C)"), (2, "U(2)"), (1, "O(1,1)"), (1, "minimal"))


def dgla_trial(seed: int, idx: int, genus=None, group=None,
               tol: float = 1e-12) -> dict:
    rng = np.random.default_rng([seed, idx])
    g, gname = _DGLA_CONFIGS[idx % len(_DGLA_CONFIGS)]
    if genus:
        g = genus
    if group:
        gname = group
    if gname == "minimal":
        inst = DG.minimal_differential_instance()
    else:
        inst = DG.surface_toy_instance(g, _spec_for(gname))
    report = DG.axioms_residual(inst)
    axioms_ok = DG.axioms_pass(report, tol=tol)
    d0, d1 = inst.dims

    h = 1e-4
    moment_fd = 0.0
    for _ in range(5):
        x = rng.normal(size=d1)
        v = rng.normal(size=d1)
        a = rng.normal(size=d0)
        fd = (DG.moment(inst, x + h * v, a)
              - DG.moment(inst, x - h * v, a)) / (2 * h)
        moment_fd = max(moment_fd, abs(
            fd - DG.omega(inst, 1, DG.gauge_field(inst, a, x), v)))

    mc = DG.mc_solve(inst, rng)
    tangency = float("inf")
    if mc.converged:
        a = rng.normal(size=d0)
        xi = DG.gauge_field(inst, a, mc.x)
        tangency = float(np.linalg.norm(DG.linearized_mc(inst, mc.x) @ xi))

    xi_hom = 0.0
    for _ in range(5):
        x = rng.normal(size=d1)
        a = rng.normal(size=d0)
        b = rng.normal(size=d0)
        lhs = DG.gauge_field(inst, DG.bracket(inst, 0, a, 0, b), x)
        rhs = (DG.bracket(inst, 0, a, 1, DG.gauge_field(inst, b, x))
               - DG.bracket(inst, 0, b, 1, DG.gauge_field(inst, a, x)))
        xi_hom = max(xi_hom, float(np.linalg.norm(lhs - rhs)))

    ok = bool(axioms_ok and mc.converged and moment_fd <= 1e-5
              and tangency <= 1e-8 and xi_hom <= 1e-10)
    return {"trial": idx, "genus": g, "group": gname,
            "axioms_max": max(v for k, v in report.items()
                              if not k.startswith("sigma")),
            "axioms_pass": bool(axioms_ok), "moment_fd": moment_fd,
            "mc_converged": bool(mc.converged), "mc_residual": mc.residual,
            "tangency": tangency, "xi_homomorphism": xi_hom, "pass": ok}


def _fact(k: int) -> float:
    out = 1.0
    for i in range(2, k + 1):
        out *= i
    return out


def variation_trial(seed: int, idx: int, genus=None, group=None,
                    tol: float = 1e-5) -> dict:
    rng = np.random.default_rng([seed, idx])
    gname = group if group else _VARIATION_GROUPS[idx % len(_VARIATION_GROUPS)]
    spec = _spec_for(gname)
    g = G.random_element(spec, rng)
    x = G.random_algebra_element(spec, rng)
    h = 1e-4
    from scipy.linalg import expm

    def f_along(t):
        return G.invariant_f(spec, g @ expm(t * x))

    fd = (f_along(h) - f_along(-h)) / (2 * h)
    fd_resid = abs(fd - G.pairing(G.variation(spec, g), x))
    proj_resid = float(np.linalg.norm(
        G.variation(spec, g) - G.variation_generic(spec, g)))
    rec = {"trial": idx, "group": gname, "fd_residual": fd_resid,
           "projection_residual": proj_resid}
    ok = fd_resid <= tol and proj_resid <= 1e-9
    if (idx // len(_VARIATION_GROUPS)) % 10 == 0:
        xs = [G.random_algebra_element(spec, rng)]
        y = G.random_algebra_element(spec, rng)

        def f2(s, t):
            return G.invariant_f(spec, g @ expm(s * xs[0]) @ expm(t * y))

        mixed = (f2(h, h) - f2(h, -h) - f2(-h, h) + f2(-h, -h)) / (4 * h * h)
        k1 = abs(mixed - G.pairing(G.variation_hat(spec, g, xs), y))
        xs2 = xs + [G.random_algebra_element(spec, rng)]

        def f3(s1, s2, t):
            return G.invariant_f(
                spec, g @ expm(s1 * xs2[0]) @ expm(s2 * xs2[1]) @ expm(t * y))

        # third-order stencil: roundoff goes like eps/h^3, so h=1e-4 is
        # too small; 1e-3 balances it against the O(h^2) truncation
        h3 = 1e-3
        m3 = sum(a * b * c * f3(a * h3, b * h3, c * h3)
                 for a in (1, -1) for b in (1, -1) for c in (1, -1)) / (8 * h3 ** 3)
        k2 = abs(m3 - G.pairing(G.variation_hat(spec, g, xs2), y))
        rec.update({"khat1_residual": k1, "khat2_residual": k2})
        ok = ok and k1 <= 1e-4 and k2 <= 1e-4
    rec.update({"residual": fd_resid, "pass": bool(ok)})
    return rec


_TRIAL_FNS = {
    "goldman-gl": goldman_gl_trial,
    "goldman-unoriented": goldman_unoriented_trial,
    "jacobi": jacobi_trial,
    "chen": chen_trial,
    "dgla": dgla_trial,
    "variation": variation_trial,
}

_DEFAULT_TOLS = {"goldman-gl": 1e-8, "goldman-unoriented": 1e-8,
                 "jacobi": 1e-8, "chen": 1e-7, "dgla": 1e-12,
                 "variation": 1e-5}


def run_trial(suite: str, seed: int, idx: int, genus=None, group=None,
              tol=None) -> dict:
    fn = _TRIAL_FNS[suite]
    return fn(seed, idx, genus=genus, group=group,
              tol=tol if tol is not None else _DEFAULT_TOLS[suite])


def run_suite(suite: str, seed: int, trials=None, genus=None, group=None,
              tol=None) -> tuple[list[dict], dict]:
    """All records plus a summary; the CLI prints both as JSON lines."""
    if suite not in _TRIAL_FNS:
        raise ValueError(f"unknown suite {suite!r}")
    n = trials if trials else default_trials(suite)
    records = [run_trial(suite, seed, i, genus=genus, group=group, tol=tol)
               for i in range(n)]
    return records, summarize(suite, seed, records)


def summarize(suite: str, seed: int, records: list[dict]) -> dict:
    failures = sum(1 for r in records if not r["pass"])
    max_resid = max((r.get("residual", 0.0) for r in records), default=0.0)
    return {"suite": suite, "seed": seed, "trials": len(records),
            "failures": failures, "max_residual": max_resid,
            "pass": bool(failures == 0)}
