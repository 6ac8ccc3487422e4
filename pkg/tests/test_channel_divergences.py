import json
import math

import numpy as np
import pytest

from chanquery.channel_divergences import (
    Direction,
    InputOptConfig,
    Method,
    amortized_note,
    c_s_channel,
    channel_fidelity,
    channel_fidelity_cq,
    channel_renyi,
    export_sdp_json,
    geometric_channel_fidelity_choi,
    geometric_channel_fidelity_sdp,
    q_s_channel,
)
from chanquery.channels import (
    ClassicalChannel,
    CQChannel,
    QuantumChannel,
    basis_state,
    make_rng,
    max_entangled,
    pure_state,
    random_channel,
    random_cq,
    random_state,
)
from chanquery.divergences import fidelity, q_s
from chanquery.errors import CapacityError, ValidationError

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1.0, -1.0]).astype(complex)
IDENTITY = QuantumChannel([np.eye(2)])
DEPOLARIZE = QuantumChannel([0.5 * P for P in (np.eye(2), X, Y, Z)])
REPLACE0 = QuantumChannel([np.array([[1, 0], [0, 0]]), np.array([[0, 1], [0, 0]])])
REPLACE1 = QuantumChannel([np.array([[0, 0], [1, 0]]), np.array([[0, 0], [0, 1]])])
N_CL = ClassicalChannel([[0.9, 0.1], [0.8, 0.2]])
M_CL = ClassicalChannel([[0.8, 0.2], [0.9, 0.1]])
PLUS = pure_state([1, 1])
FAST = InputOptConfig(restarts=8)


class TestClosedForms:
    def test_classical_fidelity_example(self):
        expect = (math.sqrt(0.72) + math.sqrt(0.02)) ** 2
        assert expect == pytest.approx(0.98, abs=1e-12)
        for kind in ("uhlmann", "holevo", "geometric"):
            res = channel_fidelity(N_CL, M_CL, kind)
            assert res.value == pytest.approx(expect, abs=1e-12)
            assert res.method is Method.CLASSICAL_CLOSED_FORM
            assert res.direction is Direction.EXACT
        assert channel_fidelity_cq(N_CL, M_CL).optimizer_input == 0  # tie broken by smallest index

    def test_cq_examples(self):
        a = CQChannel([basis_state(0, 2), basis_state(0, 2)])
        b = CQChannel([basis_state(0, 2), basis_state(1, 2)])
        res = channel_fidelity_cq(a, b)
        assert res.value == pytest.approx(0, abs=1e-12) and res.optimizer_input == 1
        assert channel_fidelity_cq(a, a).value == pytest.approx(1)
        # pure outputs: Holevo fidelity is the squared overlap squared
        pair = (CQChannel([basis_state(0, 2)]), CQChannel([PLUS]))
        assert channel_fidelity_cq(*pair, "holevo").value == pytest.approx(0.25, abs=1e-12)
        assert amortized_note(*pair).value == pytest.approx(0.25, abs=1e-12)
        assert amortized_note(a, a).value == pytest.approx(1)
        assert amortized_note(IDENTITY, DEPOLARIZE) == "not computed"

    def test_alphabet_mismatch(self):
        with pytest.raises(ValidationError):
            channel_fidelity_cq(N_CL, ClassicalChannel([[1.0, 0.0]]))

    def test_c_s_classical(self):
        res = c_s_channel(N_CL, M_CL, 0.5)
        assert res.value == pytest.approx(-math.log(math.sqrt(0.72) + math.sqrt(0.02)), abs=1e-12)
        assert res.value == pytest.approx(0.0101013537, abs=1e-10)
        for s in (0.2, 0.7):
            q = q_s_channel(N_CL, M_CL, s)
            assert c_s_channel(N_CL, M_CL, s).value == pytest.approx(-math.log(q.value), abs=1e-14)
        assert c_s_channel(N_CL, N_CL, 0.3).value == pytest.approx(0, abs=1e-14)

    def test_c_half_cq_is_half_holevo(self, rng):
        a, b = random_cq(3, 2, rng), random_cq(3, 2, rng)
        fh = channel_fidelity_cq(a, b, "holevo").value
        assert c_s_channel(a, b, 0.5).value == pytest.approx(-0.5 * math.log(fh), abs=1e-10)

    def test_classical_renyi_closed_form(self):
        for alpha in (0.5, 1.5, 2.0):
            want = max(
                math.log(sum(t**alpha * r ** (1 - alpha) for t, r in zip(N_CL.matrix[x], M_CL.matrix[x])))
                / (alpha - 1)
                for x in range(2)
            )
            for kind in ("petz", "geometric"):
                assert channel_renyi(N_CL, M_CL, alpha, kind).value == pytest.approx(want, abs=1e-12)


class TestGeneralChannels:
    def test_identical_channels(self, rng):
        ch = random_channel(2, rng)
        assert geometric_channel_fidelity_sdp(ch, ch).value == pytest.approx(1, abs=1e-6)
        assert geometric_channel_fidelity_choi(ch, ch).value == pytest.approx(1, abs=1e-9)
        assert channel_renyi(ch, ch, 0.5, "geometric").value == pytest.approx(0, abs=1e-9)
        assert q_s_channel(ch, ch, 0.5, cfg=FAST).value == pytest.approx(1, abs=1e-9)

    def test_orthogonal_replacers(self):
        assert geometric_channel_fidelity_sdp(REPLACE0, REPLACE1).value == pytest.approx(0, abs=1e-6)
        assert channel_fidelity(REPLACE0, REPLACE1, "uhlmann", FAST).value == pytest.approx(0, abs=1e-12)

    def test_identity_vs_depolarizing_below_max_entangled(self):
        res = channel_fidelity(IDENTITY, DEPOLARIZE, "uhlmann", FAST)
        phi = max_entangled(2)
        at_phi = fidelity(IDENTITY.apply(phi, 2), DEPOLARIZE.apply(phi, 2))
        assert at_phi == pytest.approx(0.25, abs=1e-12)
        assert res.value <= at_phi + 1e-9
        assert res.method is Method.INPUT_OPTIMIZATION and res.direction is Direction.UPPER

    def test_sdp_agrees_with_choi_closed_form(self):
        for i in range(5):
            rng = make_rng([99, i])
            n, m = random_channel(2, rng), random_channel(2, rng)
            sdp = geometric_channel_fidelity_sdp(n, m)
            assert sdp.value == pytest.approx(sdp.details["closed_form"], abs=1e-6)
            assert sdp.details["block_residual"] < 1e-7
            assert sdp.converged

    def test_classical_dispatch_equality(self):
        closed = channel_fidelity_cq(N_CL, M_CL).value
        qn, qm = N_CL.to_quantum(), M_CL.to_quantum()
        assert geometric_channel_fidelity_sdp(qn, qm).value == pytest.approx(closed, abs=1e-5)
        assert channel_fidelity(qn, qm, "uhlmann", FAST, method="optimize").value == pytest.approx(closed, abs=1e-5)

    def test_petz_below_geometric_alpha_two(self):
        for i in range(3):
            rng = make_rng([7, i])
            n, m = random_channel(2, rng), random_channel(2, rng)
            petz = channel_renyi(n, m, 2.0, "petz", FAST)
            geo = channel_renyi(n, m, 2.0, "geometric")
            assert petz.direction is Direction.LOWER
            assert petz.value <= geo.value + 1e-6

    def test_chain_rule_output_fidelity(self, rng):
        n, m = random_channel(2, rng), random_channel(2, rng)
        value = geometric_channel_fidelity_sdp(n, m).value
        for _ in range(10):
            rho = random_state(4, rng)
            assert fidelity(n.apply(rho, 2), m.apply(rho, 2), "geometric") >= value - 1e-6

    def test_two_copy_product_inputs_submultiplicative(self, rng):
        n, m = random_channel(2, rng), random_channel(2, rng)
        nn, mm = n.tensor(n), m.tensor(m)
        # product inputs are reordered R1 A1 R2 A2 -> R1 R2 A1 A2 before the 2-copy channel
        perm = np.arange(16).reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).ravel()
        family = [random_state(4, rng) for _ in range(20)]
        one = min(fidelity(n.apply(r, 2), m.apply(r, 2), "geometric") for r in family)
        two = min(
            fidelity(nn.apply(p, 4), mm.apply(p, 4), "geometric")
            for p in (np.kron(r, r)[np.ix_(perm, perm)] for r in family)
        )
        assert two <= one**2 + 1e-6

    def test_q_s_optimization_is_upper_bound_on_inputs(self, rng):
        n, m = random_channel(2, rng), random_channel(2, rng)
        res = q_s_channel(n, m, 0.4, cfg=FAST)
        assert res.direction is Direction.UPPER
        rho = res.optimizer_input
        assert q_s(0.4, n.apply(rho, 2), m.apply(rho, 2)) == pytest.approx(res.value, abs=1e-9)

    def test_capacity_cap(self, rng):
        n, m = random_channel(5, rng), random_channel(5, rng)
        with pytest.raises(CapacityError):
            geometric_channel_fidelity_sdp(n, m)

    def test_optimizer_is_seeded(self, rng):
        n, m = random_channel(2, rng), random_channel(2, rng)
        a = channel_fidelity(n, m, "uhlmann", FAST)
        b = channel_fidelity(n, m, "uhlmann", FAST)
        assert a.value == b.value


def test_sdp_export_round_trips():
    doc = json.loads(export_sdp_json(IDENTITY, DEPOLARIZE))
    assert {"blocks", "objective", "constraints"} <= doc.keys()
    gn = np.array([[complex(*z) for z in row] for row in doc["data"]["Gamma_N"]])
    assert np.allclose(gn, IDENTITY.choi)


def test_mixed_kinds_are_promoted():
    # a classical channel paired with a quantum one is compared through its embedding
    res = channel_fidelity(N_CL, IDENTITY, "geometric")
    assert res.method is Method.SDP


def test_dimension_mismatch():
    with pytest.raises(ValidationError, match="equal dimensions"):
        channel_fidelity(IDENTITY, QuantumChannel([np.eye(3)]))
