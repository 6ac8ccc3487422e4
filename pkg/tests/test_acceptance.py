"""Acceptance criteria 1-9, one test per criterion.

Each test logs a single PASS/FAIL line (shown in the terminal summary) and
then asserts. Instances are seeded, so every run sees the same ones.
"""

import itertools
import math
import time

import numpy as np
import pytest

from chanquery.channel_divergences import (
    channel_fidelity,
    channel_fidelity_cq,
    geometric_channel_fidelity_sdp,
)
from chanquery.channels import (
    ClassicalChannel,
    CQChannel,
    QuantumChannel,
    make_rng,
    pure_state,
    random_channel,
    random_classical,
    random_cq,
    random_state,
    tensor_power,
)
from chanquery.complexity import (
    Verdict,
    qc_asymmetric_bounds,
    qc_mary_bounds,
    qc_precise_bounds,
    qc_symmetric_bounds,
    sym_asym_convert,
    trivial_case,
)
from chanquery.divergences import RenyiKind, fidelity, q_s, renyi
from chanquery.oracle import (
    classical_mary_pgm_error,
    exact_nstar_asymmetric_channel,
    exact_nstar_product_channel,
    helstrom_error,
)

SEED = 20240601


def _classical_pair(tag, i, n_in=2, n_out=2):
    rng = make_rng([SEED, tag, i])
    return random_classical(n_in, rng, n_out), random_classical(n_in, rng, n_out)


def _merge_best(*reports):
    lower = max(r.best_lower for r in reports)
    upper = min(r.best_upper for r in reports)
    return lower, upper


# ---------------------------------------------------------------------------


def test_criterion_1_symmetric_classical_sandwich(acceptance_log):
    t0 = time.perf_counter()
    violations = []
    for i in range(200):
        N, M = _classical_pair(1, i)
        rep = qc_symmetric_bounds(0.5, N, M, 1e-3)
        n_star = exact_nstar_product_channel(0.5, N, M, 1e-3).n_star
        lower = rep.best_lower
        holevo = rep.bound("holevo-upper").value if rep.verdict.kind is Verdict.NON_TRIVIAL else rep.best_upper
        if not (lower <= n_star <= holevo):
            violations.append((i, lower, n_star, holevo))
    elapsed = time.perf_counter() - t0
    ok = not violations and elapsed < 60
    acceptance_log(1, ok, f"200 classical pairs, {len(violations)} violations, {elapsed:.1f}s (limit 60s)")
    assert not violations, violations[:5]
    assert elapsed < 60


def test_criterion_2_factor_four_precise_classical(acceptance_log):
    ratio_bad, sandwich_bad = [], []
    for i in range(100):
        p = (0.1, 0.3, 0.5)[i % 3]
        eps = p / 100
        N, M = _classical_pair(2, i)
        rep = qc_precise_bounds(p, N, M, eps)
        if rep.verdict.kind is not Verdict.NON_TRIVIAL:
            continue
        low, up = rep.bound("lambda-lower"), rep.bound("lambda-upper")
        ratio = up.pre_ceiling / low.pre_ceiling
        if abs(ratio - 4) > 4e-12:
            ratio_bad.append((i, ratio))
        n_star = exact_nstar_product_channel(p, N, M, eps).n_star
        if not (low.value <= n_star <= up.value):
            sandwich_bad.append((i, p, low.value, n_star, up.value))
    ok = not ratio_bad and not sandwich_bad
    acceptance_log(
        2, ok, f"100 classical instances, ratio violations {len(ratio_bad)}, sandwich violations {len(sandwich_bad)}"
    )
    assert not ratio_bad, ratio_bad[:5]
    assert not sandwich_bad, sandwich_bad[:5]


def test_criterion_3_cq_sandwich(acceptance_log):
    p, eps = 0.5, 0.005
    violations, skipped = [], 0
    for i in range(50):
        rng = make_rng([SEED, 3, i])
        N, M = random_cq(3, 2, rng), random_cq(3, 2, rng)
        lower, upper = _merge_best(qc_symmetric_bounds(p, N, M, eps), qc_precise_bounds(p, N, M, eps))
        res = exact_nstar_product_channel(p, N, M, eps)
        if not res.finite:
            skipped += 1
            continue
        if not (lower <= res.n_star <= upper):
            violations.append((i, lower, res.n_star, upper))
    ok = not violations
    acceptance_log(3, ok, f"50 CQ pairs, {len(violations)} violations, {skipped} beyond the oracle's n_max")
    assert not violations, violations[:5]


def test_criterion_4_asymmetric_classical_sandwich(acceptance_log):
    violations = []
    for i in range(30):
        N, M = _classical_pair(4, i)
        rep = qc_asymmetric_bounds(N, M, 0.01, 0.01)
        n_star = exact_nstar_asymmetric_channel(N, M, 0.01, 0.01).n_star
        if not (rep.best_lower <= n_star <= rep.best_upper):
            violations.append((i, rep.best_lower, n_star, rep.best_upper))
    ok = not violations
    acceptance_log(4, ok, f"30 classical instances, {len(violations)} violations")
    assert not violations, violations[:5]


def _bhattacharyya(a, b):
    return float(np.sum(np.sqrt(a * b)))


def test_criterion_5_mary_bound_chain(acceptance_log):
    eps = 0.01
    priors = np.full(3, 1 / 3)
    order_bad, chain_bad, channel_level_bad = [], [], 0
    for i in range(20):
        rng = make_rng([SEED, 5, i])
        chans = [random_classical(3, rng) for _ in range(3)]
        rep = qc_mary_bounds(list(zip(priors, chans)), eps)
        if not rep.best_lower <= rep.best_upper:
            order_bad.append((i, rep.best_lower, rep.best_upper))
        n_inputs = chans[0].n_in
        # pairwise channel fidelities, each minimized over inputs separately
        chan_f = {
            (a, b): min(_bhattacharyya(chans[a].matrix[x], chans[b].matrix[x]) ** 2 for x in range(n_inputs))
            for a, b in itertools.combinations(range(3), 2)
        }
        for n in range(1, 21):
            best_err = min(
                classical_mary_pgm_error(priors, np.array([c.matrix[x] for c in chans]), n) for x in range(n_inputs)
            )
            # product strategy: one input for all pairs, then minimized over inputs
            per_input = min(
                3
                * max(
                    math.sqrt(priors[a] * priors[b])
                    * _bhattacharyya(chans[a].matrix[x], chans[b].matrix[x]) ** n
                    for a, b in itertools.combinations(range(3), 2)
                )
                for x in range(n_inputs)
            )
            if best_err > per_input + 1e-10:
                chain_bad.append((i, n, best_err, per_input))
            channel_level = 3 * max(
                math.sqrt(priors[a] * priors[b]) * chan_f[(a, b)] ** (n / 2) for a, b in chan_f
            )
            if best_err > channel_level + 1e-10:
                channel_level_bad += 1
    ok = not order_bad and not chain_bad
    acceptance_log(
        5,
        ok,
        f"20 ensembles, lower>upper {len(order_bad)}, per-input chain violations {len(chain_bad)} "
        f"(channel-level form exceeded at {channel_level_bad} of 400 (ensemble, n) points)",
    )
    assert not order_bad, order_bad[:5]
    assert not chain_bad, chain_bad[:5]


def test_criterion_6_divergence_property_suite(acceptance_log):
    t0 = time.perf_counter()
    rng = make_rng([SEED, 6])
    failures = {}

    def fail(name, info):
        failures.setdefault(name, []).append(info)

    alphas = {
        RenyiKind.PETZ: (0.3, 0.5, 1.5, 2.0),
        RenyiKind.SANDWICHED: (0.5, 0.75, 1.5, 2.0),
        RenyiKind.GEOMETRIC: (0.3, 0.5, 1.5, 2.0),
    }
    for t in range(500):
        d = (2, 3, 4)[t % 3]
        rho, sigma = random_state(d, rng), random_state(d, rng)
        ch = random_channel(d, rng, dim_out=2 + t % 2)
        out_r, out_s = ch.apply(rho), ch.apply(sigma)
        for kind, alist in alphas.items():
            for a in alist:
                before, after = renyi(rho, sigma, a, kind), renyi(out_r, out_s, a, kind)
                if after > before + 1e-8:
                    fail("dpi", (t, kind.value, a, before, after))
    for t in range(100):
        r1, s1, r2, s2 = (random_state(2, rng) for _ in range(4))
        for s in (0.25, 0.5, 0.75):
            lhs = q_s(s, np.kron(r1, r2), np.kron(s1, s2))
            if abs(lhs - q_s(s, r1, s1) * q_s(s, r2, s2)) > 1e-10:
                fail("multiplicativity", (t, s))
        f = fidelity(r1, s1, "uhlmann")
        if fidelity(r1, s1, "holevo") > f + 1e-9 or fidelity(r1, s1, "geometric") > f + 1e-9:
            fail("fidelity order", t)
        for a in (0.3, 0.5, 1.5, 2.0):
            if renyi(r1, s1, a, "petz") > renyi(r1, s1, a, "geometric") + 1e-8:
                fail("petz <= geometric", (t, a))
        p = float(rng.uniform(0.05, 0.95))
        tn = 1 - 2 * helstrom_error(p, r1, s1)
        if tn > math.sqrt(1 - 4 * p * (1 - p) * f) + 1e-8:
            fail("audenaert", t)
    for t in range(30):
        rho, sigma = random_state(2, rng), random_state(2, rng)
        p = float(rng.uniform(0.1, 0.9))
        for n in range(1, 6):
            err = helstrom_error(p, tensor_power(rho, n), tensor_power(sigma, n))
            for s in (0.25, 0.5, 0.75):
                if err > p**s * (1 - p) ** (1 - s) * q_s(s, rho, sigma) ** n + 1e-10:
                    fail("chernoff", (t, n, s))
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 120
    summary = ", ".join(f"{k}: {len(v)}" for k, v in failures.items()) or "no failures"
    acceptance_log(6, ok, f"DPI/multiplicativity/orderings/Audenaert/Chernoff - {summary}, {elapsed:.1f}s (limit 120s)")
    assert not failures, {k: v[:3] for k, v in failures.items()}
    assert elapsed < 120


def test_criterion_7_sdp_correctness(acceptance_log):
    qubit_gap, classical_gap = [], []
    for i in range(50):
        rng = make_rng([SEED, 7, i])
        N, M = random_channel(2, rng), random_channel(2, rng)
        sdp = geometric_channel_fidelity_sdp(N, M).value
        opt = channel_fidelity(N, M, "geometric", method="optimize").value
        if abs(sdp - opt) > 1e-3:
            qubit_gap.append((i, sdp, opt))
    for i in range(50):
        N, M = _classical_pair(7, i)
        closed = channel_fidelity_cq(N, M).value
        sdp = geometric_channel_fidelity_sdp(N.to_quantum(), M.to_quantum()).value
        if abs(sdp - closed) > 1e-5:
            classical_gap.append((i, sdp, closed))
    ok = not qubit_gap and not classical_gap
    acceptance_log(
        7,
        ok,
        f"SDP vs optimization off by >1e-3 on {len(qubit_gap)}/50 qubit pairs, "
        f"vs classical closed form off by >1e-5 on {len(classical_gap)}/50",
    )
    assert not qubit_gap, qubit_gap[:5]
    assert not classical_gap, classical_gap[:5]


def test_criterion_8_trivial_cases(acceptance_log):
    N, M = ClassicalChannel([[0.9, 0.1], [0.3, 0.7]]), ClassicalChannel([[0.6, 0.4], [0.2, 0.8]])
    zero = CQChannel([pure_state([1, 0])])
    one = CQChannel([pure_state([0, 1])])
    replace0 = QuantumChannel([np.array([[1, 0], [0, 0]]), np.array([[0, 1], [0, 0]])])
    replace1 = QuantumChannel([np.array([[0, 0], [1, 0]]), np.array([[0, 0], [0, 1]])])
    cases = [
        ("eps >= 1/2", trivial_case(0.5, 0.6, N, M), Verdict.ONE),
        ("eps >= p^s q^(1-s)", trivial_case(0.1, 0.2, N, M), Verdict.ONE),
        ("orthogonal CQ outputs", trivial_case(0.5, 0.01, zero, one), Verdict.ONE),
        ("orthogonal replacer channels", trivial_case(0.5, 0.01, replace0, replace1), Verdict.ONE),
        ("identical channels", trivial_case(0.5, 0.1, N, N), Verdict.INFINITE),
        ("identical quantum channels", trivial_case(0.3, 0.1, replace0, replace0), Verdict.INFINITE),
        ("generic pair", trivial_case(0.5, 0.01, N, M), Verdict.NON_TRIVIAL),
    ]
    wrong = [(name, got.kind.value, want.value) for name, got, want in cases if got.kind is not want]
    # the verdicts agree with the exact oracle where it applies
    oracle_one = exact_nstar_product_channel(0.5, zero, one, 0.01).n_star == 1
    oracle_inf = math.isinf(exact_nstar_product_channel(0.5, N, N, 0.1, n_max=50).n_star)
    ok = not wrong and oracle_one and oracle_inf
    acceptance_log(8, ok, f"{len(cases)} constructed instances, {len(wrong)} wrong verdicts")
    assert not wrong, wrong
    assert oracle_one and oracle_inf


def test_criterion_9_conversion_soundness(acceptance_log):
    violations = []
    for i in range(30):
        rng = make_rng([SEED, 9, i])
        N, M = random_classical(2, rng), random_classical(2, rng)
        eps, delta = float(rng.uniform(0.005, 0.05)), float(rng.uniform(0.005, 0.05))
        conv = sym_asym_convert("asym-to-sym", eps=eps, delta=delta)
        n_as = exact_nstar_asymmetric_channel(N, M, eps, delta).n_star
        s_low = exact_nstar_product_channel(conv["p"], N, M, conv["lower_eps"]).n_star
        s_up = exact_nstar_product_channel(conv["p"], N, M, conv["upper_eps"]).n_star
        if not (s_low <= n_as <= s_up):
            violations.append(("first", i, s_low, n_as, s_up))
        p = float(rng.uniform(0.2, 0.8))
        e = float(rng.uniform(0.005, 0.05))
        conv = sym_asym_convert("sym-to-asym", p=p, eps=e)
        n_s = exact_nstar_product_channel(p, N, M, e).n_star
        a_low = exact_nstar_asymmetric_channel(N, M, *conv["lower"]).n_star
        a_up = exact_nstar_asymmetric_channel(N, M, *conv["upper"]).n_star
        if not (a_low <= n_s <= a_up):
            violations.append(("second", i, a_low, n_s, a_up))
    ok = not violations
    acceptance_log(9, ok, f"30 classical instances, both relations, {len(violations)} violations")
    assert not violations, violations[:5]


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
