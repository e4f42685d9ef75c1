"""Bell-diagonal channel parameterizations and raw-key sampling.

A two-qubit Bell-diagonal state is parameterized by four probabilities
(p00, p10, p01, p11); the first index is the bit-flip component x, the second
the phase component z. Measuring both halves in the z basis makes only the
bit-flip marginal P_X(x) = sum_z p_xz observable: Alice's bit is uniform and
Bob's differs with probability P_X(1) = p10 + p11. Phase components never show
up in sampling but drive the key-rate formulas, so all four entries travel
together as the single source of truth for the constraint sets.

The block laws derived here describe length-2 blocks of the bit-flip process:
W1 is the block parity of the discrepancy pattern, W2 the second-bit
discrepancy after parity alignment. Degenerate denominators produce
flagged-undefined sub-results that downstream formulas consume as
multiply-by-zero => zero, matching the structure of the rate expressions where
every undefined factor carries a vanishing prefactor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .entropy import Dist

__all__ = [
    "BellDiagonal",
    "DerivedBlockDists",
    "six_state_point",
    "bb84_family",
    "derived_dists",
    "sample_pair",
]

_SUM_TOL = 1e-12


@dataclass(frozen=True)
class BellDiagonal:
    """Bell-diagonal entries (p00, p10, p01, p11); must sum to 1."""

    p00: float
    p10: float
    p01: float
    p11: float

    def __post_init__(self):
        entries = (self.p00, self.p10, self.p01, self.p11)
        for name, value in zip(("p00", "p10", "p01", "p11"), entries):
            if value < -_SUM_TOL or value > 1.0 + _SUM_TOL:
                raise ValueError(f"{name}={value} outside [0, 1]")
        total = math.fsum(entries)
        if abs(total - 1.0) > _SUM_TOL:
            raise ValueError(f"entries sum to {total}, not 1")

    def as_dist(self) -> Dist:
        """The four entries as a distribution in (00, 10, 01, 11) order."""
        clipped = [max(0.0, v) for v in (self.p00, self.p10, self.p01, self.p11)]
        total = math.fsum(clipped)
        return Dist([v / total for v in clipped])

    def bit_flip_rate(self) -> float:
        """P_X(1) = p10 + p11; the probability Bob's z-basis bit differs."""
        return self.p10 + self.p11

    def x_marginal(self) -> Dist:
        """P_X over the bit-flip component: (p00+p01, p10+p11)."""
        return Dist([min(1.0, max(0.0, self.p00 + self.p01)), min(1.0, max(0.0, self.p10 + self.p11))])


@dataclass(frozen=True)
class DerivedBlockDists:
    """Block laws of the length-2 reduction for one Bell-diagonal channel.

    w1_dist: law of the block discrepancy parity W1 (equals pbar).
    w2_given_w1_0: law of the second-bit discrepancy W2 given W1 = 0.
    pbar: P_Xbar, the two-copy parity law of the bit-flip marginal.
    pprime: the transformed four-entry law entering the post-alignment rate
        term, in (00, 10, 01, 11) order; None when pbar(0) = 0, in which case
        every consumer multiplies it by pbar(0) = 0 and the product is 0.
    """

    w1_dist: Dist
    w2_given_w1_0: Dist
    pbar: Dist
    pprime: BellDiagonal | None

    @property
    def pprime_defined(self) -> bool:
        return self.pprime is not None


def six_state_point(e: float) -> BellDiagonal:
    """The single Bell-diagonal state consistent with six-state error rate e.

    All three marginal conditions p10+p11 = p01+p11 = p01+p10 = e hold, which
    forces (1 - 3e/2, e/2, e/2, e/2). Valid for 0 <= e <= 2/3.
    """
    if e < -_SUM_TOL or e > 2.0 / 3.0 + _SUM_TOL:
        raise ValueError(f"six-state error rate {e} outside [0, 2/3]")
    e = min(max(e, 0.0), 2.0 / 3.0)
    return BellDiagonal(1.0 - 1.5 * e, 0.5 * e, 0.5 * e, 0.5 * e)


def bb84_family(e: float, p11: float) -> BellDiagonal:
    """The BB84-compatible Bell-diagonal state with free parameter p11.

    BB84 estimation constrains only p10+p11 = e and p01+p11 = e, leaving the
    one-parameter family (1-2e+p11, e-p11, e-p11, p11) with p11 in [0, e].
    """
    if e < -_SUM_TOL or e > 0.5 + _SUM_TOL:
        raise ValueError(f"BB84 error rate {e} outside [0, 1/2]")
    if p11 < -_SUM_TOL or p11 > e + _SUM_TOL:
        raise ValueError(f"p11={p11} outside [0, e={e}]")
    e = min(max(e, 0.0), 0.5)
    p11 = min(max(p11, 0.0), e)
    p00 = 1.0 - 2.0 * e + p11
    if p00 < -_SUM_TOL:
        raise ValueError(f"p00={p00} negative for e={e}, p11={p11}")
    return BellDiagonal(max(p00, 0.0), e - p11, e - p11, p11)


def derived_dists(p: BellDiagonal) -> DerivedBlockDists:
    """Block laws of the length-2 reduction.

    With row sums r0 = p00+p01 and r1 = p10+p11 (the bit-flip marginal):

        pbar(0) = r0^2 + r1^2        pbar(1) = 2 r0 r1
        w1_dist = pbar
        w2_given_w1_0 = (r0^2, r1^2) / pbar(0)
        pprime = (p00^2+p01^2, 2 p00 p01, p10^2+p11^2, 2 p10 p11) / pbar(0)

    pbar(0) = 0 can only happen at r0 = r1 = 0, which normalization forbids,
    but r0*r1 products of tiny negatives are clipped defensively. pprime is
    flagged undefined (None) when pbar(0) = 0.
    """
    r0 = max(0.0, p.p00 + p.p01)
    r1 = max(0.0, p.p10 + p.p11)
    pbar0 = r0 * r0 + r1 * r1
    pbar1 = 2.0 * r0 * r1
    total = pbar0 + pbar1
    # total = (r0+r1)^2 = 1 up to rounding; renormalize the pair exactly.
    pbar = Dist([pbar0 / total, pbar1 / total])
    w1 = pbar
    if pbar0 > 0.0:
        w2 = Dist([r0 * r0 / (pbar0), r1 * r1 / (pbar0)])
        q00 = (p.p00 * p.p00 + p.p01 * p.p01) / pbar0
        q10 = 2.0 * p.p00 * p.p01 / pbar0
        q01 = (p.p10 * p.p10 + p.p11 * p.p11) / pbar0
        q11 = 2.0 * p.p10 * p.p11 / pbar0
        qs = q00 + q10 + q01 + q11
        pprime = BellDiagonal(q00 / qs, q10 / qs, q01 / qs, q11 / qs)
    else:
        w2 = Dist([1.0, 0.0])
        pprime = None
    return DerivedBlockDists(w1_dist=w1, w2_given_w1_0=w2, pbar=pbar, pprime=pprime)


def sample_pair(p: BellDiagonal, length: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Sample correlated raw keys (x, y) of the given even length.

    x is i.i.d. uniform; y = x XOR e with e_i i.i.d. Bernoulli(p10 + p11).
    Phase-flip components do not affect z-basis outcomes, so only the bit-flip
    marginal enters. Reproducible given the generator state.
    """
    if length < 2 or length % 2 != 0:
        raise ValueError(f"length must be even and >= 2, got {length}")
    x = rng.integers(0, 2, size=length, dtype=np.uint8)
    flips = (rng.random(length) < p.bit_flip_rate()).astype(np.uint8)
    y = x ^ flips
    return x, y
