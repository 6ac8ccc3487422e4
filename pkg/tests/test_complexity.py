import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chanquery.channels import (
    ClassicalChannel,
    CQChannel,
    QuantumChannel,
    basis_state,
    make_rng,
    pure_state,
    random_channel,
    random_classical,
)
from chanquery.channel_divergences import InputOptConfig
from chanquery.complexity import (
    Verdict,
    lambda_star,
    qc_asymmetric_bounds,
    qc_mary_bounds,
    qc_precise_bounds,
    qc_symmetric_bounds,
    sc_state_bounds,
    sym_asym_convert,
    trivial_case,
)
from chanquery.errors import DomainError

N_CL = ClassicalChannel([[0.9, 0.1], [0.8, 0.2]])
M_CL = ClassicalChannel([[0.8, 0.2], [0.9, 0.1]])
# Bhattacharyya coefficient of (0.9, 0.1) vs (0.8, 0.2); F is its square
BC = math.sqrt(0.72) + math.sqrt(0.02)
REPLACE0 = QuantumChannel([np.array([[1, 0], [0, 0]]), np.array([[0, 1], [0, 0]])])
REPLACE1 = QuantumChannel([np.array([[0, 0], [1, 0]]), np.array([[0, 0], [0, 1]])])
FAST = InputOptConfig(restarts=8)


class TestLambdaStar:
    def test_examples(self):
        assert lambda_star(0.5, 0.01) == 0.5
        assert lambda_star(0.5, 0.005) == 0.5
        want = math.log(800) / (math.log(800) + math.log(200))
        assert lambda_star(0.2, 0.001) == pytest.approx(want, abs=1e-14)
        assert want == pytest.approx(0.557845, abs=1e-6)

    def test_domain(self):
        with pytest.raises(DomainError):
            lambda_star(0.2, 0.3)
        with pytest.raises(DomainError):
            lambda_star(0.7, 0.01)

    @given(st.floats(0.01, 0.5), st.floats(1e-6, 0.99))
    def test_range(self, p, frac):
        assert 0.5 <= lambda_star(p, p * frac) < 1


class TestTrivial:
    def test_examples(self):
        assert trivial_case(0.5, 0.6, N_CL, M_CL).kind is Verdict.ONE
        assert trivial_case(0.5, 0.1, N_CL, N_CL).kind is Verdict.INFINITE
        assert trivial_case(0.5, 0.01, REPLACE0, REPLACE1).kind is Verdict.ONE
        assert trivial_case(0.5, 0.01, N_CL, M_CL).kind is Verdict.NON_TRIVIAL

    def test_one_takes_precedence_over_infinite(self):
        # identical channels but eps >= min(p, q): guessing the likelier hypothesis already works
        assert trivial_case(0.1, 0.2, N_CL, N_CL).kind is Verdict.ONE

    def test_distinct_objects_equal_channels(self):
        twin = ClassicalChannel(N_CL.matrix.copy())
        assert trivial_case(0.5, 0.1, N_CL, twin).kind is Verdict.INFINITE

    def test_cq_with_one_orthogonal_symbol(self):
        a = CQChannel([basis_state(0, 2), basis_state(0, 2)])
        b = CQChannel([basis_state(0, 2), basis_state(1, 2)])
        assert trivial_case(0.5, 0.01, a, b).kind is Verdict.ONE

    def test_bounds_report_trivial_verdict(self):
        rep = qc_symmetric_bounds(0.5, REPLACE0, REPLACE1, 0.01)
        assert rep.verdict.kind is Verdict.ONE
        assert rep.best_lower == rep.best_upper == 1


class TestStateBounds:
    def test_bernoulli_example(self):
        rho, sigma = np.diag([0.5, 0.5]), np.diag([1 / 8, 7 / 8])
        rep = sc_state_bounds(0.5, rho, sigma, 1e-3)
        q = math.sqrt(1 / 16) + math.sqrt(7 / 16)
        pre_up = 2 * 0.5 * math.log(500) / -math.log(q)
        assert rep.bound("lambda-upper").pre_ceiling == pytest.approx(pre_up, rel=1e-12)
        assert rep.bound("lambda-upper").value == 68
        assert rep.bound("lambda-lower").value == 17
        f = q**2
        assert rep.bound("fidelity-lower").value == pytest.approx(
            math.log(0.25 / (1e-3 * (1 - 1e-3))) / -math.log(f), rel=1e-12
        )

    def test_identical_states(self, rng):
        rho = np.diag([0.3, 0.7])
        rep = sc_state_bounds(0.5, rho, rho, 0.01)
        assert rep.best_lower == math.inf

    def test_orthogonal_states(self):
        rep = sc_state_bounds(0.3, basis_state(0, 2), basis_state(1, 2), 0.01)
        assert rep.best_upper == 1

    def test_bures_clamped(self):
        rep = sc_state_bounds(0.5, np.diag([0.5, 0.5]), np.diag([0.4, 0.6]), 0.49)
        assert rep.best_lower >= 0


class TestSymmetric:
    def test_classical_example(self):
        rep = qc_symmetric_bounds(0.5, N_CL, M_CL, 0.01)
        neg_log_f = -math.log(BC**2)
        want = math.log(0.25 / (0.01 * 0.99)) / neg_log_f
        assert rep.bound("geometric-fidelity-lower").value == pytest.approx(want, rel=1e-10)
        assert want == pytest.approx(159.83, abs=0.01)
        assert rep.bound("holevo-upper").pre_ceiling == pytest.approx(2 * math.log(50) / neg_log_f, rel=1e-10)
        assert rep.bound("holevo-upper").value == 388
        assert rep.bound("chernoff-upper").value <= 388

    def test_holevo_dominates_chernoff(self):
        for i in range(20):
            rng = make_rng([31, i])
            n, m = random_classical(3, rng), random_classical(3, rng)
            rep = qc_symmetric_bounds(float(rng.uniform(0.1, 0.9)), n, m, 1e-3)
            if rep.verdict.kind is Verdict.NON_TRIVIAL:
                assert rep.bound("holevo-upper").value >= rep.bound("chernoff-upper").value - 1

    def test_monotone_in_eps(self):
        prev = None
        for eps in np.geomspace(1e-4, 0.1, 10):
            rep = qc_symmetric_bounds(0.4, N_CL, M_CL, float(eps))
            vals = {b.name: b.value for b in rep.lower + rep.upper}
            if prev is not None:
                for k, v in vals.items():
                    assert v <= prev[k] + 1e-9, k
            prev = vals

    def test_quantum_pair_sandwich_consistency(self):
        for i in range(3):
            rng = make_rng([41, i])
            n, m = random_channel(2, rng), random_channel(2, rng)
            rep = qc_symmetric_bounds(0.5, n, m, 0.01, FAST)
            assert math.floor(rep.best_lower) <= rep.best_upper

    def test_cq_has_holevo_lower(self):
        a = CQChannel([basis_state(0, 2), pure_state([1, 1])])
        b = CQChannel([pure_state([1, 1j]), basis_state(1, 2)])
        rep = qc_symmetric_bounds(0.5, a, b, 0.01)
        assert rep.bound("holevo-fidelity-lower").applicable


class TestPrecise:
    def test_classical_example(self):
        rep = qc_precise_bounds(0.5, N_CL, M_CL, 0.005)
        c = -math.log(BC)
        low, up = rep.bound("lambda-lower"), rep.bound("lambda-upper")
        assert low.pre_ceiling == pytest.approx(0.25 * math.log(100) / c, rel=1e-12)
        assert (low.value, up.value) == (114, 456)
        assert up.pre_ceiling / low.pre_ceiling == pytest.approx(4, rel=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            qc_precise_bounds(0.5, N_CL, M_CL, 0.02)
        with pytest.raises(DomainError):
            qc_precise_bounds(0.7, N_CL, M_CL, 0.001)

    def test_cq_pure_outputs(self):
        a, b = CQChannel([basis_state(0, 2)]), CQChannel([pure_state([1, 1])])
        rep = qc_precise_bounds(0.5, a, b, 0.005)
        # Tr[rho^(1/2) sigma^(1/2)] for pure states is the squared overlap
        c = -math.log(0.5)
        assert rep.bound("lambda-upper").pre_ceiling == pytest.approx(math.log(100) / c, rel=1e-10)


class TestAsymmetric:
    def test_classical_example(self):
        rep = qc_asymmetric_bounds(N_CL, M_CL, 0.01, 0.01)
        assert 0 < rep.best_lower <= rep.best_upper < math.inf

    def test_swap_symmetry(self):
        a = qc_asymmetric_bounds(N_CL, ClassicalChannel([[0.6, 0.4], [0.3, 0.7]]), 0.02, 0.02)
        b = qc_asymmetric_bounds(ClassicalChannel([[0.6, 0.4], [0.3, 0.7]]), N_CL, 0.02, 0.02)
        assert a.best_lower == pytest.approx(b.best_lower, rel=1e-9)
        assert a.bound("renyi-lower-forward").value == pytest.approx(b.bound("renyi-lower-reverse").value, rel=1e-9)

    def test_renyi_lower_term_by_hand(self):
        rep = qc_asymmetric_bounds(N_CL, M_CL, 0.01, 0.01)

        def d(alpha):
            # geometric and Petz agree for classical inputs; take the worse input
            return max(
                math.log(sum(t**alpha * r ** (1 - alpha) for t, r in zip(N_CL.matrix[x], M_CL.matrix[x])))
                / (alpha - 1)
                for x in range(2)
            )

        grid = [math.log(0.99 ** (a / (a - 1)) / 0.01) / d(a) for a in np.arange(1.05, 2.0001, 0.05)]
        assert rep.bound("renyi-lower-forward").value >= max(grid) - 1e-9
        assert rep.bound("renyi-lower-forward").value <= max(grid) * 1.01


class TestConversions:
    def test_examples(self):
        out = sym_asym_convert("asym-to-sym", eps=0.01, delta=0.01)
        assert out["p"] == 0.5
        assert out["lower_eps"] == pytest.approx(0.01) and out["upper_eps"] == pytest.approx(0.005)
        out = sym_asym_convert("sym-to-asym", p=0.5, eps=0.01)
        assert out["lower"] == pytest.approx((0.02, 0.02)) and out["upper"] == pytest.approx((0.01, 0.01))

    def test_domain(self):
        with pytest.raises(DomainError):
            sym_asym_convert("sym-to-asym", p=0.999, eps=0.5)


class TestMary:
    def test_two_channels_reduce(self):
        rep = qc_mary_bounds([(0.5, N_CL), (0.5, M_CL)], 0.01)
        # p_m p_m' / (p_m + p_m') = 1/4 for two uniform hypotheses
        want = math.log(1 / (4 * 0.01)) / -math.log(BC**2)
        assert rep.bound("pairwise-geometric-lower").value == pytest.approx(want, rel=1e-10)

    def test_orthogonal_replacers(self):
        outs = [pure_state(v) for v in ([1, 0, 0], [0, 1, 0], [0, 0, 1])]
        chans = [CQChannel([o, o]) for o in outs]
        rep = qc_mary_bounds([(1 / 3, c) for c in chans], 0.01)
        assert rep.best_upper == 1

    def test_random_classical_ordered(self):
        rng = make_rng(77)
        chans = [random_classical(3, rng) for _ in range(3)]
        rep = qc_mary_bounds([(1 / 3, c) for c in chans], 0.01)
        assert rep.best_lower <= rep.best_upper
