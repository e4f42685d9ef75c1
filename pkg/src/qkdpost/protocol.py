"""Executable two-party post-processing session.

One session runs parameter estimation, the two-way information
reconciliation rounds, and privacy amplification, with every public message
recorded in an ordered transcript and every leaked bit counted. The flow:

1. Alice and Bob compare a fresh sample of bit pairs; a sample error rate
   too far from the configured channel aborts the session.
2. Alice compresses her block-parity sequence to a syndrome; Bob decodes
   the parity discrepancies and sends his estimate back.
3. Second bits survive only on blocks whose estimated discrepancy parity is
   0. If the survivor count lands inside the agreed window, a second
   syndrome round corrects them; otherwise Bob fills in uniformly random
   guesses and no second syndrome is sent.
4. Both parties hash their reconciled strings with a shared Toeplitz seed
   drawn fresh per session and published in the transcript.

Leak accounting is the exact syndrome bit count |t1| + |t2|; estimation
disclosures and the hash seed are public by construction and carry no key
information. Security bookkeeping at finite size is collapsed into a single
configurable key-rate margin: the session certifies leak counts and rate
formulas, not a composable finite-size security claim, since the smooth
entropy quantities behind such a claim have no closed form here.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.signal import fftconvolve

from .blocks import as_bits, parity_seq, partition, second_bit_seq
from .channel import BellDiagonal, bb84_family, derived_dists, sample_pair, six_state_point
from .codes import CodeConfig, DecodeResult, ParityCheck, bp_decode, code_for_rate, ml_decode
from .entropy import shannon_entropy
from .keyrate import bb84_rate, rate_proposed

__all__ = [
    "ALICE_TO_BOB",
    "BOB_TO_ALICE",
    "Abort",
    "Message",
    "Transcript",
    "DecoderPolicy",
    "IrResult",
    "SessionConfig",
    "SessionReport",
    "parameter_estimation",
    "run_ir",
    "toeplitz_hash",
    "key_length",
    "run_full_session",
]

ALICE_TO_BOB = "alice_to_bob"
BOB_TO_ALICE = "bob_to_alice"

# Legal message order; t2 is skipped when the survivor window is violated
# (or empty) and hash_seed only appears in full sessions.
_LABEL_ORDER = ("t1", "w1hat", "t2", "hash_seed")
_LABEL_DIRECTION = {
    "t1": ALICE_TO_BOB,
    "w1hat": BOB_TO_ALICE,
    "t2": ALICE_TO_BOB,
    "hash_seed": ALICE_TO_BOB,
}

# Decoder validity clamp for degenerate estimates (noiseless or saturated).
_CROSSOVER_FLOOR = 1e-12


def _bits_hex(bits: np.ndarray) -> str:
    return np.packbits(bits).tobytes().hex() if bits.size else ""


@dataclass(frozen=True)
class Message:
    """One public-channel transmission."""

    direction: str
    label: str
    payload: np.ndarray

    def __post_init__(self):
        if self.label not in _LABEL_ORDER:
            raise ValueError(f"unknown message label {self.label!r}")
        if self.direction != _LABEL_DIRECTION[self.label]:
            raise ValueError(f"message {self.label!r} cannot travel {self.direction}")
        object.__setattr__(self, "payload", as_bits(self.payload))

    def to_dict(self) -> dict:
        return {
            "direction": self.direction,
            "label": self.label,
            "bits": int(self.payload.size),
            "payload_hex": _bits_hex(self.payload),
        }


@dataclass(frozen=True)
class Transcript:
    """Ordered public messages of one session.

    Labels must respect protocol order (t1, w1hat, optional t2, optional
    hash_seed); prefixes are legal, so partial transcripts from aborted or
    reconciliation-only runs validate too.
    """

    messages: tuple[Message, ...] = ()

    def __post_init__(self):
        last = -1
        for msg in self.messages:
            pos = _LABEL_ORDER.index(msg.label)
            if pos <= last:
                raise ValueError(f"message {msg.label!r} out of protocol order")
            last = pos

    def labels(self) -> tuple[str, ...]:
        return tuple(m.label for m in self.messages)

    def find(self, label: str) -> Message | None:
        for msg in self.messages:
            if msg.label == label:
                return msg
        return None

    def with_message(self, message: Message) -> "Transcript":
        return Transcript(self.messages + (message,))

    def to_dict(self) -> dict:
        return {"messages": [m.to_dict() for m in self.messages]}


@dataclass(frozen=True)
class Abort:
    """Estimation outcome outside the configured tolerance."""

    estimate: float
    nominal: float
    tolerance: float


def parameter_estimation(
    sample_x: np.ndarray,
    sample_y: np.ndarray,
    nominal_e: float,
    tol: float,
) -> float | Abort:
    """Empirical error rate of a disclosed sample, or Abort when it strays.

    Returns Hamming(sample_x, sample_y) / m when within tol of nominal_e,
    an Abort record otherwise. The disclosed sample is consumed either way.
    """
    x = as_bits(sample_x)
    y = as_bits(sample_y)
    if x.size != y.size:
        raise ValueError(f"sample lengths differ: {x.size} vs {y.size}")
    if x.size == 0:
        raise ValueError("estimation sample is empty")
    estimate = float(np.sum(x ^ y)) / x.size
    if abs(estimate - nominal_e) <= tol:
        return estimate
    return Abort(estimate=estimate, nominal=nominal_e, tolerance=tol)


@dataclass(frozen=True)
class DecoderPolicy:
    """Decode schedule for both syndrome rounds.

    engine "bp" runs sum-product decoding with the given iteration budget;
    a non-convergent first pass is retried once with heavier damping and
    retry_iters iterations (set retry_iters=0 to disable). The retry only
    fires on detectable failure, meaning a syndrome mismatch; a decode that
    converges to the wrong coset member is invisible to the decoding party
    and surfaces later as a key mismatch. engine "ml" decodes exhaustively
    and is only feasible on toy codes.
    """

    engine: str = "bp"
    max_iters: int = 300
    llr_clip: float = 25.0
    damping: float = 0.0
    retry_iters: int = 1200
    retry_damping: float = 0.3

    def __post_init__(self):
        if self.engine not in ("bp", "ml"):
            raise ValueError(f"unknown decode engine {self.engine!r}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.retry_iters < 0:
            raise ValueError("retry_iters must be >= 0")

    def decode(self, code: ParityCheck, t: np.ndarray, crossover: float) -> DecodeResult:
        if self.engine == "ml":
            return ml_decode(code, t)
        result = bp_decode(
            code, t, crossover, max_iters=self.max_iters, llr_clip=self.llr_clip, damping=self.damping
        )
        if not result.converged and self.retry_iters > 0:
            result = bp_decode(
                code,
                t,
                crossover,
                max_iters=self.retry_iters,
                llr_clip=self.llr_clip,
                damping=self.retry_damping,
            )
        return result


@dataclass(frozen=True)
class IrResult:
    """Outputs of the reconciliation rounds.

    u_hat and u_tilde are Alice's and Bob's length-2n reconciled strings,
    parity bits interleaved with surviving second bits (discarded second
    bits are literal zeros). leak_bits counts syndrome bits only.
    reconciliation_ok certifies u_hat == u_tilde == the string Alice would
    have produced with the true discrepancy parities.
    """

    u_hat: np.ndarray
    u_tilde: np.ndarray
    transcript: Transcript
    leak_bits: int
    n_hat0: int
    bounds_violated: bool
    reconciliation_ok: bool
    decode1: DecodeResult
    decode2: DecodeResult | None


def _interleave(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    out = np.empty(first.size + second.size, dtype=np.uint8)
    out[0::2] = first
    out[1::2] = second
    return out


def run_ir(
    x: np.ndarray,
    y: np.ndarray,
    code1: ParityCheck,
    code2_factory: Callable[[int], ParityCheck],
    n0_bounds: tuple[int, int],
    crossover1: float,
    crossover2: float,
    policy: DecoderPolicy = DecoderPolicy(),
    rng: np.random.Generator | None = None,
) -> IrResult:
    """Run both reconciliation rounds on raw keys x (Alice) and y (Bob).

    Round one: Alice sends the syndrome t1 of her block parities under
    code1; Bob decodes the discrepancy parities w1hat from t1 plus his own
    syndrome at crossover1 and sends w1hat back. Round two: both sides keep
    second bits only on blocks with estimated discrepancy parity 0 (zeros
    elsewhere). If the survivor count n_hat0 falls outside n0_bounds, Bob
    guesses the surviving second bits uniformly at random and no second
    syndrome is sent; otherwise Alice sends the syndrome t2 of her
    survivors under code2_factory(n_hat0) and Bob decodes at crossover2.

    rng feeds only the violation-branch guess; decode failures are reported
    in the result, never raised.
    """
    x = as_bits(x)
    y = as_bits(y)
    n = code1.n
    if x.size != y.size:
        raise ValueError(f"raw key lengths differ: {x.size} vs {y.size}")
    if x.size != 2 * n:
        raise ValueError(f"raw key length {x.size}, expected {2 * n} for the round-one code")
    lo, hi = int(n0_bounds[0]), int(n0_bounds[1])
    if not 0 <= lo <= hi <= n:
        raise ValueError(f"survivor bounds ({lo}, {hi}) not within [0, {n}]")
    if rng is None:
        rng = np.random.default_rng()

    u1 = parity_seq(x)
    v1 = parity_seq(y)
    t1 = code1.syndrome(u1)
    transcript = Transcript().with_message(Message(ALICE_TO_BOB, "t1", t1))

    decode1 = policy.decode(code1, t1 ^ code1.syndrome(v1), crossover1)
    w1hat = decode1.error_estimate
    transcript = transcript.with_message(Message(BOB_TO_ALICE, "w1hat", w1hat))

    u2_hat = second_bit_seq(x, w1hat)
    v2_hat = second_bit_seq(y, w1hat)
    survivors = partition(w1hat)
    n_hat0 = survivors.n0
    violated = not lo <= n_hat0 <= hi

    u1_tilde = v1 ^ w1hat
    u2_tilde = np.zeros(n, dtype=np.uint8)
    leak = code1.m
    decode2: DecodeResult | None = None
    if violated:
        u2_tilde[survivors.t0] = rng.integers(0, 2, size=n_hat0, dtype=np.uint8)
    elif n_hat0 > 0:
        code2 = code2_factory(n_hat0)
        if code2.n != n_hat0:
            raise ValueError(f"round-two code has {code2.n} columns, expected {n_hat0}")
        t2 = code2.syndrome(u2_hat[survivors.t0])
        transcript = transcript.with_message(Message(ALICE_TO_BOB, "t2", t2))
        leak += code2.m
        v2_surv = v2_hat[survivors.t0]
        decode2 = policy.decode(code2, t2 ^ code2.syndrome(v2_surv), crossover2)
        u2_tilde[survivors.t0] = v2_surv ^ decode2.error_estimate

    u_hat = _interleave(u1, u2_hat)
    u_tilde = _interleave(u1_tilde, u2_tilde)
    w1_true = parity_seq(x ^ y)
    u_true = _interleave(u1, second_bit_seq(x, w1_true))
    ok = bool(np.array_equal(u_hat, u_tilde) and np.array_equal(u_hat, u_true))
    return IrResult(
        u_hat=u_hat,
        u_tilde=u_tilde,
        transcript=transcript,
        leak_bits=int(leak),
        n_hat0=n_hat0,
        bounds_violated=violated,
        reconciliation_ok=ok,
        decode1=decode1,
        decode2=decode2,
    )


def toeplitz_hash(seed: np.ndarray, value: np.ndarray, ell: int) -> np.ndarray:
    """Multiply by the binary Toeplitz matrix built from seed diagonals.

    The matrix has ell rows and len(value) columns; entry (i, j) is
    seed[i - j + len(value) - 1], so row i of the output is one window of
    the full convolution of value with seed. Requires seed length exactly
    len(value) + ell - 1.
    """
    seed = as_bits(seed)
    value = as_bits(value)
    if not 0 <= ell <= value.size:
        raise ValueError(f"output length {ell} not in [0, {value.size}]")
    if seed.size != value.size + ell - 1:
        raise ValueError(f"seed length {seed.size}, expected {value.size + ell - 1}")
    if ell == 0:
        return np.zeros(0, dtype=np.uint8)
    counts = fftconvolve(value.astype(np.float64), seed.astype(np.float64))
    window = counts[value.size - 1 : value.size - 1 + ell]
    return (np.rint(window).astype(np.int64) & 1).astype(np.uint8)


def key_length(p_est: BellDiagonal, n: int, margin: float) -> int:
    """Distillable bits for 2n raw bits at the estimated channel.

    floor(2n * max(0, asymptotic rate - margin)); margin absorbs every
    finite-size correction in one configurable deduction.
    """
    if margin < 0.0:
        raise ValueError(f"margin {margin} must be >= 0")
    if n < 1:
        raise ValueError("need at least one block")
    rate = rate_proposed(p_est) - margin
    return int(math.floor(2 * n * max(0.0, rate)))


@dataclass(frozen=True)
class SessionConfig:
    """Full-session parameters.

    channel is the nominal source; estimation aborts when the sampled error
    rate strays more than abort_tolerance from its bit-flip rate. delta is
    the code-rate margin added to both syndrome rates and doubles as the
    radius of the default survivor window n * (P_W1(0) -/+ delta); pass
    n0_bounds to override the window. An upper bound anchored at P_W1(1)
    instead would sit far below the typical survivor count and reject
    almost every honest session, so the default anchors both ends at
    P_W1(0). mapping selects how the scalar estimate is lifted to a
    Bell-diagonal point: "six-state" pins all four entries; "bb84" leaves
    the phase split free and takes the rate-minimizing member, which is the
    conservative choice for key length (the reconciliation laws only depend
    on the bit-flip marginal, so decoding is mapping-independent).
    """

    channel: BellDiagonal
    n: int = 50_000
    m: int = 20_000
    delta: float = 0.05
    n0_bounds: tuple[int, int] | None = None
    abort_tolerance: float = 0.02
    finite_size_margin: float = 0.0
    seed: int = 0
    mapping: str = "six-state"
    code_config: CodeConfig = CodeConfig()
    decoder: DecoderPolicy = DecoderPolicy()

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("block count must be >= 1")
        if self.m < 2 or self.m % 2 != 0:
            raise ValueError("estimation sample size must be even and >= 2 (drawn block-wise)")
        if self.delta <= 0.0:
            raise ValueError("delta must be > 0")
        if self.abort_tolerance < 0.0:
            raise ValueError("abort_tolerance must be >= 0")
        if self.finite_size_margin < 0.0:
            raise ValueError("finite_size_margin must be >= 0")
        if self.mapping not in ("six-state", "bb84"):
            raise ValueError(f"unknown mapping {self.mapping!r}")
        if self.n0_bounds is not None:
            lo, hi = self.n0_bounds
            if not 0 <= lo <= hi <= self.n:
                raise ValueError(f"n0_bounds ({lo}, {hi}) not within [0, {self.n}]")


@dataclass(frozen=True)
class SessionReport:
    """Immutable record of one session.

    leak_bits is exactly |t1| + |t2|; empirical_key_rate is
    len(key_alice) / (2n). bounds_violated and the decode flags separate a
    survivor-window rejection from a plain decode failure; decode flags are
    None for rounds that never ran. estimated_e sits next to the nominal
    rate so calibration drift is visible in the report itself.
    """

    aborted: bool
    nominal_e: float
    estimated_e: float
    n: int
    transcript: Transcript
    leak_bits: int
    key_alice: np.ndarray
    key_bob: np.ndarray
    reconciliation_ok: bool
    key_match: bool
    empirical_key_rate: float
    n_hat0: int
    bounds_violated: bool
    decode1_converged: bool | None
    decode2_converged: bool | None

    def to_dict(self) -> dict:
        return {
            "aborted": self.aborted,
            "nominal_e": self.nominal_e,
            "estimated_e": self.estimated_e,
            "n": self.n,
            "leak_bits": self.leak_bits,
            "n_hat0": self.n_hat0,
            "bounds_violated": self.bounds_violated,
            "decode1_converged": self.decode1_converged,
            "decode2_converged": self.decode2_converged,
            "reconciliation_ok": self.reconciliation_ok,
            "key_match": self.key_match,
            "key_bits": int(self.key_alice.size),
            "empirical_key_rate": self.empirical_key_rate,
            "key_alice_hex": _bits_hex(self.key_alice),
            "key_bob_hex": _bits_hex(self.key_bob),
            "transcript": self.transcript.to_dict(),
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def _estimate_to_point(estimate: float, mapping: str) -> BellDiagonal:
    if mapping == "six-state":
        return six_state_point(estimate)
    _, p11_star = bb84_rate(estimate, "proposed")
    return bb84_family(estimate, p11_star)


def run_full_session(cfg: SessionConfig) -> SessionReport:
    """Sample, estimate, reconcile, and hash one session; deterministic per seed.

    The seed is split into independent streams for estimation sampling, raw
    keys, both code constructions, the hash seed, and the violation-branch
    guess, in that fixed order. An out-of-tolerance estimate yields an
    aborted report with empty transcript and zero leak. Code rates are the
    estimated block-law entropies plus delta; estimates extreme enough to
    push a rate out of (0, 1) fail code construction and raise, since no
    syndrome shorter than the data exists there.
    """
    streams = np.random.SeedSequence(cfg.seed).spawn(6)
    rng_est, rng_data, rng_code1, rng_code2, rng_hash, rng_guess = map(np.random.default_rng, streams)
    nominal_e = cfg.channel.bit_flip_rate()

    sample_x, sample_y = sample_pair(cfg.channel, cfg.m, rng_est)
    outcome = parameter_estimation(sample_x, sample_y, nominal_e, cfg.abort_tolerance)
    empty = np.zeros(0, dtype=np.uint8)
    if isinstance(outcome, Abort):
        return SessionReport(
            aborted=True,
            nominal_e=nominal_e,
            estimated_e=outcome.estimate,
            n=cfg.n,
            transcript=Transcript(),
            leak_bits=0,
            key_alice=empty,
            key_bob=empty,
            reconciliation_ok=False,
            key_match=False,
            empirical_key_rate=0.0,
            n_hat0=0,
            bounds_violated=False,
            decode1_converged=None,
            decode2_converged=None,
        )

    estimate = outcome
    point = _estimate_to_point(estimate, cfg.mapping)
    laws = derived_dists(point)
    rate1 = shannon_entropy(laws.w1_dist) + cfg.delta
    rate2 = shannon_entropy(laws.w2_given_w1_0) + cfg.delta
    crossover1 = min(max(laws.w1_dist(1), _CROSSOVER_FLOOR), 0.5 - _CROSSOVER_FLOOR)
    crossover2 = min(max(laws.w2_given_w1_0(1), _CROSSOVER_FLOOR), 0.5 - _CROSSOVER_FLOOR)
    if cfg.n0_bounds is not None:
        bounds = cfg.n0_bounds
    else:
        center = laws.w1_dist(0)
        bounds = (
            max(0, math.floor(cfg.n * (center - cfg.delta))),
            min(cfg.n, math.ceil(cfg.n * (center + cfg.delta))),
        )

    x, y = sample_pair(cfg.channel, 2 * cfg.n, rng_data)
    code1 = code_for_rate(cfg.n, rate1, config=cfg.code_config, rng=rng_code1)
    ir = run_ir(
        x,
        y,
        code1,
        lambda n0: code_for_rate(n0, rate2, config=cfg.code_config, rng=rng_code2),
        bounds,
        crossover1,
        crossover2,
        policy=cfg.decoder,
        rng=rng_guess,
    )

    ell = key_length(point, cfg.n, cfg.finite_size_margin)
    hash_seed = rng_hash.integers(0, 2, size=2 * cfg.n + ell - 1, dtype=np.uint8)
    key_alice = toeplitz_hash(hash_seed, ir.u_hat, ell)
    key_bob = toeplitz_hash(hash_seed, ir.u_tilde, ell)
    transcript = ir.transcript.with_message(Message(ALICE_TO_BOB, "hash_seed", hash_seed))
    return SessionReport(
        aborted=False,
        nominal_e=nominal_e,
        estimated_e=estimate,
        n=cfg.n,
        transcript=transcript,
        leak_bits=ir.leak_bits,
        key_alice=key_alice,
        key_bob=key_bob,
        reconciliation_ok=ir.reconciliation_ok,
        key_match=bool(np.array_equal(key_alice, key_bob)),
        empirical_key_rate=key_alice.size / ir.u_hat.size,
        n_hat0=ir.n_hat0,
        bounds_violated=ir.bounds_violated,
        decode1_converged=ir.decode1.converged,
        decode2_converged=None if ir.decode2 is None else ir.decode2.converged,
    )
