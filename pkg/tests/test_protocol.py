"""Two-way reconciliation sessions end to end.

Small instances use exhaustive ML decoding so every protocol branch is
checked against direct enumeration; the operating-point runs use the LDPC
engine at frozen seeds. Hash claims are verified against the explicit
matrix construction.
"""

import json
import math

import numpy as np
import pytest

from qkdpost.blocks import parity_seq, partition, second_bit_seq
from qkdpost.channel import BellDiagonal, sample_pair, six_state_point
from qkdpost.codes import CodeConfig, ParityCheck, code_for_rate
from qkdpost.entropy import binary_entropy, type_deviation_bound
from qkdpost.keyrate import rate_proposed
from qkdpost.protocol import (
    ALICE_TO_BOB,
    BOB_TO_ALICE,
    Abort,
    DecoderPolicy,
    Message,
    SessionConfig,
    Transcript,
    key_length,
    parameter_estimation,
    run_full_session,
    run_ir,
    toeplitz_hash,
)

ML = DecoderPolicy(engine="ml")


def dense_code(n: int, rate: float, seed: int) -> ParityCheck:
    return code_for_rate(n, rate, CodeConfig(construction="dense"), np.random.default_rng(seed))


def test_parameter_estimation_accepts():
    x = np.array([0, 1, 1, 0], dtype=np.uint8)
    out = parameter_estimation(x, x.copy(), nominal_e=0.0, tol=0.01)
    assert out == 0.0


def test_parameter_estimation_aborts():
    x = np.array([0, 1, 1, 0], dtype=np.uint8)
    out = parameter_estimation(x, x ^ 1, nominal_e=0.05, tol=0.02)
    assert isinstance(out, Abort)
    assert out.estimate == 1.0
    assert out.nominal == 0.05


def test_parameter_estimation_validation():
    x = np.zeros(4, dtype=np.uint8)
    with pytest.raises(ValueError):
        parameter_estimation(x, np.zeros(3, dtype=np.uint8), 0.0, 0.01)
    with pytest.raises(ValueError):
        parameter_estimation(np.zeros(0, dtype=np.uint8), np.zeros(0, dtype=np.uint8), 0.0, 0.01)


def test_parameter_estimation_abort_rate():
    # The type-class proxy bound uses L1 radius 2*tol on a binary alphabet.
    # It is vacuous at this sample size, so also pin an empirical ceiling.
    p = six_state_point(0.05)
    m, tol = 10_000, 0.02
    rng = np.random.default_rng(15)
    aborts = 0
    trials = 100
    for _ in range(trials):
        x, y = sample_pair(p, m, rng)
        aborts += isinstance(parameter_estimation(x, y, 0.05, tol), Abort)
    assert aborts / trials <= type_deviation_bound(m, 2.0 * tol, 2)
    assert aborts / trials <= 0.05


def test_toeplitz_zero_input():
    rng = np.random.default_rng(16)
    seed = rng.integers(0, 2, size=24 + 8 - 1, dtype=np.uint8)
    out = toeplitz_hash(seed, np.zeros(24, dtype=np.uint8), 8)
    assert out.size == 8
    assert not out.any()


def test_toeplitz_linearity():
    rng = np.random.default_rng(17)
    for _ in range(20):
        seed = rng.integers(0, 2, size=40 + 16 - 1, dtype=np.uint8)
        a = rng.integers(0, 2, size=40, dtype=np.uint8)
        b = rng.integers(0, 2, size=40, dtype=np.uint8)
        lhs = toeplitz_hash(seed, a ^ b, 16)
        rhs = toeplitz_hash(seed, a, 16) ^ toeplitz_hash(seed, b, 16)
        assert np.array_equal(lhs, rhs)


def test_toeplitz_matches_explicit_matrix():
    rng = np.random.default_rng(18)
    n, ell = 6, 3
    for _ in range(50):
        seed = rng.integers(0, 2, size=n + ell - 1, dtype=np.uint8)
        value = rng.integers(0, 2, size=n, dtype=np.uint8)
        matrix = np.array([[seed[i - j + n - 1] for j in range(n)] for i in range(ell)])
        expected = (matrix @ value) % 2
        assert np.array_equal(toeplitz_hash(seed, value, ell), expected)


def test_toeplitz_validation():
    value = np.zeros(10, dtype=np.uint8)
    with pytest.raises(ValueError):
        toeplitz_hash(np.zeros(10, dtype=np.uint8), value, 4)
    with pytest.raises(ValueError):
        toeplitz_hash(np.zeros(20, dtype=np.uint8), value, 11)
    with pytest.raises(ValueError):
        toeplitz_hash(np.zeros(8, dtype=np.uint8), value, -1)
    empty = toeplitz_hash(np.zeros(9, dtype=np.uint8), value, 0)
    assert empty.size == 0


def test_toeplitz_collision_rate():
    # By linearity a pair collides iff their difference hashes to zero; each
    # nonzero difference collides on exactly 1/8 of all seeds. 500 sampled
    # seeds put the worst of the 63 difference classes within 0.21.
    rng = np.random.default_rng(14)
    seeds = rng.integers(0, 2, size=(500, 6 + 3 - 1), dtype=np.uint8)
    worst = 0.0
    for dval in range(1, 64):
        d = np.array([(dval >> (5 - i)) & 1 for i in range(6)], dtype=np.uint8)
        coll = sum(1 for s in seeds if not toeplitz_hash(s, d, 3).any())
        worst = max(worst, coll / 500)
    assert worst <= 0.21


def test_key_length():
    noiseless = BellDiagonal(1.0, 0.0, 0.0, 0.0)
    assert key_length(noiseless, 500, margin=0.0) == 1000
    assert key_length(noiseless, 500, margin=2.0) == 0
    n = 50_000
    ell = key_length(six_state_point(0.05), n, margin=0.02)
    target = rate_proposed(six_state_point(0.05)) - 0.02
    assert abs(ell / (2 * n) - target) <= 1.0 / (2 * n)
    with pytest.raises(ValueError):
        key_length(noiseless, 500, margin=-0.1)
    with pytest.raises(ValueError):
        key_length(noiseless, 0, margin=0.0)


def test_run_ir_noiseless():
    rng = np.random.default_rng(19)
    n = 64
    x = rng.integers(0, 2, size=2 * n, dtype=np.uint8)
    code1 = dense_code(n, 0.5, seed=20)
    ir = run_ir(
        x, x.copy(), code1,
        lambda n0: dense_code(n0, 0.2, seed=21),
        (0, n), crossover1=0.01, crossover2=0.01,
    )
    assert ir.reconciliation_ok
    assert ir.n_hat0 == n
    assert not ir.bounds_violated
    assert ir.decode1.iterations == 0
    assert not ir.decode1.error_estimate.any()
    assert ir.transcript.labels() == ("t1", "w1hat", "t2")
    assert ir.leak_bits == code1.m + math.ceil(n * 0.2)
    expected = np.empty(2 * n, dtype=np.uint8)
    expected[0::2] = parity_seq(x)
    expected[1::2] = second_bit_seq(x, np.zeros(n, dtype=np.uint8))
    assert np.array_equal(ir.u_hat, expected)
    assert np.array_equal(ir.u_tilde, expected)


def test_run_ir_single_block_error():
    # One flipped raw bit gives a weight-1 parity discrepancy; the seed-7
    # dense code decodes every weight-1 coset uniquely, checked on the spot.
    rng = np.random.default_rng(22)
    n = 8
    code1 = dense_code(n, 0.5, seed=7)
    x = rng.integers(0, 2, size=2 * n, dtype=np.uint8)
    y = x.copy()
    y[6] ^= 1
    w1_true = parity_seq(x ^ y)
    assert w1_true.tolist() == [0, 0, 0, 1, 0, 0, 0, 0]
    dense = code1.to_dense()
    target = tuple(code1.syndrome(w1_true))
    matches = [
        v for v in range(2**n)
        if tuple(dense @ np.array([(v >> (n - 1 - i)) & 1 for i in range(n)], dtype=np.uint8) % 2)
        == target and bin(v).count("1") <= 1
    ]
    assert matches == [0b00010000]
    ir = run_ir(
        x, y, code1,
        lambda n0: dense_code(n0, 0.5, seed=23),
        (0, n), crossover1=0.1, crossover2=0.01, policy=ML,
    )
    assert np.array_equal(ir.transcript.find("w1hat").payload, w1_true)
    assert ir.n_hat0 == 7
    assert ir.reconciliation_ok
    u_true = np.empty(2 * n, dtype=np.uint8)
    u_true[0::2] = parity_seq(x)
    u_true[1::2] = second_bit_seq(x, w1_true)
    assert np.array_equal(ir.u_hat, u_true)


def test_run_ir_bounds_violation_guess():
    rng = np.random.default_rng(24)
    n = 16
    code1 = dense_code(n, 0.5, seed=25)
    x = rng.integers(0, 2, size=2 * n, dtype=np.uint8)
    y = x.copy()
    y[10] ^= 1
    ir = run_ir(
        x, y, code1,
        lambda n0: dense_code(n0, 0.5, seed=26),
        (n, n), crossover1=0.05, crossover2=0.01, policy=ML,
        rng=np.random.default_rng(27),
    )
    assert ir.bounds_violated
    assert ir.decode2 is None
    assert ir.transcript.labels() == ("t1", "w1hat")
    assert ir.leak_bits == code1.m
    assert not ir.reconciliation_ok


def test_run_ir_no_survivors():
    # Flipping one raw bit per block discards every second bit; with an
    # identity round-one code the parity discrepancies decode exactly, the
    # second round never runs, and both outputs still agree.
    rng = np.random.default_rng(28)
    n = 8
    code1 = ParityCheck.from_dense(np.eye(n, dtype=np.uint8))
    x = rng.integers(0, 2, size=2 * n, dtype=np.uint8)
    y = x.copy()
    y[0::2] ^= 1
    ir = run_ir(
        x, y, code1,
        lambda n0: dense_code(n0, 0.5, seed=29),
        (0, n), crossover1=0.3, crossover2=0.01, policy=ML,
    )
    assert ir.n_hat0 == 0
    assert not ir.bounds_violated
    assert ir.decode2 is None
    assert ir.transcript.labels() == ("t1", "w1hat")
    assert ir.leak_bits == n
    assert ir.reconciliation_ok
    assert not ir.u_hat[1::2].any()


def test_run_ir_validation():
    n = 8
    code1 = dense_code(n, 0.5, seed=30)
    x = np.zeros(2 * n, dtype=np.uint8)
    factory = lambda n0: dense_code(n0, 0.5, seed=31)
    with pytest.raises(ValueError):
        run_ir(x, np.zeros(2 * n - 1, dtype=np.uint8), code1, factory, (0, n), 0.1, 0.1)
    with pytest.raises(ValueError):
        run_ir(np.zeros(2 * n + 2, dtype=np.uint8), np.zeros(2 * n + 2, dtype=np.uint8),
               code1, factory, (0, n), 0.1, 0.1)
    with pytest.raises(ValueError):
        run_ir(x, x, code1, factory, (5, 3), 0.1, 0.1)
    with pytest.raises(ValueError):
        run_ir(x, x, code1, factory, (0, n + 1), 0.1, 0.1)
    bad_factory = lambda n0: dense_code(n0 - 1, 0.5, seed=32)
    ones = x.copy()
    ones[0] ^= 1
    with pytest.raises(ValueError):
        run_ir(x, ones, code1, bad_factory, (0, n), 0.1, 0.1)


def test_run_ir_operating_point():
    # Six-state nominal laws at e = 0.05: parity discrepancy rate 0.095,
    # surviving-bit rate 0.0025/0.905, both codes at entropy + 0.05.
    n = 50_000
    p = six_state_point(0.05)
    c1, c2 = 0.095, 0.0025 / 0.905
    rate1 = binary_entropy(c1) + 0.05
    rate2 = binary_entropy(c2) + 0.05
    code1 = code_for_rate(n, rate1, rng=np.random.default_rng(33))
    bounds = (math.floor(n * (0.905 - 0.05)), math.ceil(n * (0.905 + 0.05)))
    rng = np.random.default_rng(34)
    for _ in range(3):
        x, y = sample_pair(p, 2 * n, rng)
        ir = run_ir(
            x, y, code1,
            lambda n0: code_for_rate(n0, rate2, rng=np.random.default_rng(35)),
            bounds, c1, c2,
        )
        assert ir.reconciliation_ok
        assert not ir.bounds_violated
        assert abs(ir.n_hat0 / n - 0.905) <= 0.01
        assert ir.leak_bits == code1.m + math.ceil(ir.n_hat0 * rate2)


def test_decoder_policy():
    with pytest.raises(ValueError):
        DecoderPolicy(engine="viterbi")
    with pytest.raises(ValueError):
        DecoderPolicy(max_iters=0)
    with pytest.raises(ValueError):
        DecoderPolicy(retry_iters=-1)
    code = dense_code(12, 0.5, seed=36)
    res = ML.decode(code, np.zeros(code.m, dtype=np.uint8), 0.1)
    assert res.converged
    assert not res.error_estimate.any()
    # An unsatisfiable iteration budget reports failure instead of raising.
    hard = code_for_rate(18, 0.45, CodeConfig(construction="peg"), np.random.default_rng(37))
    starved = DecoderPolicy(max_iters=1, retry_iters=1)
    seen_failure = False
    rng = np.random.default_rng(38)
    for _ in range(20):
        t = rng.integers(0, 2, size=hard.m, dtype=np.uint8)
        out = starved.decode(hard, t, 0.3)
        seen_failure |= not out.converged
    assert seen_failure


def test_message_and_transcript_contracts():
    with pytest.raises(ValueError):
        Message(ALICE_TO_BOB, "t3", np.zeros(4, dtype=np.uint8))
    with pytest.raises(ValueError):
        Message(BOB_TO_ALICE, "t1", np.zeros(4, dtype=np.uint8))
    with pytest.raises(ValueError):
        Message("sideways", "t1", np.zeros(4, dtype=np.uint8))
    t1 = Message(ALICE_TO_BOB, "t1", np.array([1, 0, 1, 1], dtype=np.uint8))
    w1 = Message(BOB_TO_ALICE, "w1hat", np.zeros(4, dtype=np.uint8))
    with pytest.raises(ValueError):
        Transcript((w1, t1))
    transcript = Transcript((t1, w1))
    assert transcript.labels() == ("t1", "w1hat")
    assert transcript.find("t1") is t1
    assert transcript.find("t2") is None
    record = t1.to_dict()
    assert record["bits"] == 4
    assert record["payload_hex"] == "b0"
    assert record["direction"] == ALICE_TO_BOB


def test_session_config_validation():
    channel = six_state_point(0.05)
    with pytest.raises(ValueError):
        SessionConfig(channel=channel, n=0)
    with pytest.raises(ValueError):
        SessionConfig(channel=channel, m=3)
    with pytest.raises(ValueError):
        SessionConfig(channel=channel, delta=0.0)
    with pytest.raises(ValueError):
        SessionConfig(channel=channel, abort_tolerance=-0.1)
    with pytest.raises(ValueError):
        SessionConfig(channel=channel, finite_size_margin=-0.1)
    with pytest.raises(ValueError):
        SessionConfig(channel=channel, mapping="b92")
    with pytest.raises(ValueError):
        SessionConfig(channel=channel, n=100, n0_bounds=(60, 40))
    with pytest.raises(ValueError):
        SessionConfig(channel=channel, n=100, n0_bounds=(0, 101))


def test_full_session_noiseless():
    cfg = SessionConfig(channel=BellDiagonal(1.0, 0.0, 0.0, 0.0), n=2000, m=2000, seed=5)
    report = run_full_session(cfg)
    assert not report.aborted
    assert report.nominal_e == 0.0
    assert report.estimated_e == 0.0
    assert report.reconciliation_ok
    assert report.key_match
    assert report.n_hat0 == 2000
    assert report.decode1_converged and report.decode2_converged
    assert report.transcript.labels() == ("t1", "w1hat", "t2", "hash_seed")
    assert report.leak_bits == 2 * math.ceil(2000 * 0.05)
    assert report.key_alice.size == 4000
    assert abs(report.empirical_key_rate - 1.0) <= 1.0 / 4000


def test_full_session_margin_deduction():
    cfg = SessionConfig(
        channel=BellDiagonal(1.0, 0.0, 0.0, 0.0),
        n=2000, m=2000, seed=5, finite_size_margin=0.25,
    )
    report = run_full_session(cfg)
    assert report.key_alice.size == 3000
    assert abs(report.empirical_key_rate - 0.75) <= 1.0 / 4000


def test_full_session_abort():
    cfg = SessionConfig(
        channel=six_state_point(0.05), n=500, m=2000, abort_tolerance=1e-9, seed=3,
    )
    report = run_full_session(cfg)
    assert report.aborted
    assert report.estimated_e != report.nominal_e
    assert report.key_alice.size == 0
    assert report.key_bob.size == 0
    assert report.leak_bits == 0
    assert report.transcript.labels() == ()
    assert not report.key_match
    assert report.empirical_key_rate == 0.0
    assert report.decode1_converged is None


def test_full_session_determinism():
    cfg = SessionConfig(channel=BellDiagonal(1.0, 0.0, 0.0, 0.0), n=1000, m=2000, seed=9)
    first = run_full_session(cfg).to_json()
    second = run_full_session(cfg).to_json()
    assert first == second
    other = run_full_session(
        SessionConfig(channel=BellDiagonal(1.0, 0.0, 0.0, 0.0), n=1000, m=2000, seed=10)
    ).to_json()
    assert first != other


def test_full_session_bb84_mapping():
    cfg = SessionConfig(
        channel=BellDiagonal(1.0, 0.0, 0.0, 0.0), n=1000, m=2000, seed=11, mapping="bb84",
    )
    report = run_full_session(cfg)
    assert not report.aborted
    assert report.key_match
    assert report.empirical_key_rate == pytest.approx(1.0, abs=1e-3)


def test_full_session_operating_point():
    cfg = SessionConfig(channel=six_state_point(0.05), n=50_000, m=20_000, seed=0)
    report = run_full_session(cfg)
    assert not report.aborted
    assert report.reconciliation_ok
    assert report.key_match
    assert abs(report.n_hat0 / 50_000 - 0.905) <= 0.01
    t1 = report.transcript.find("t1")
    t2 = report.transcript.find("t2")
    assert report.leak_bits == t1.payload.size + t2.payload.size
    rate = rate_proposed(six_state_point(report.estimated_e))
    assert abs(report.empirical_key_rate - rate) <= 1.0 / (2 * 50_000)


def test_session_report_json():
    cfg = SessionConfig(channel=BellDiagonal(1.0, 0.0, 0.0, 0.0), n=500, m=2000, seed=12)
    report = run_full_session(cfg)
    decoded = json.loads(report.to_json())
    assert decoded["n"] == 500
    assert decoded["key_bits"] == 1000
    assert decoded["key_alice_hex"] == decoded["key_bob_hex"]
    labels = [msg["label"] for msg in decoded["transcript"]["messages"]]
    assert labels == ["t1", "w1hat", "t2", "hash_seed"]
    assert decoded["transcript"]["messages"][0]["direction"] == "alice_to_bob"
