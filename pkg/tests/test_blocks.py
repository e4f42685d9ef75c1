"""Block reduction: parities, second bits, partitions, subsequences."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qkdpost.blocks import as_bits, parity_seq, partition, second_bit_seq, subseq
from qkdpost.channel import derived_dists, sample_pair, six_state_point


def test_as_bits_rejects_non_binary():
    with pytest.raises(ValueError):
        as_bits([0, 1, 2])
    with pytest.raises(ValueError):
        as_bits([[0, 1]])


def test_parity_seq():
    assert parity_seq([0, 0, 1, 1]).tolist() == [0, 0]
    assert parity_seq([0, 1, 1, 0]).tolist() == [1, 1]
    with pytest.raises(ValueError):
        parity_seq([0, 1, 1])


def test_second_bit_seq():
    assert second_bit_seq([0, 1, 1, 1], [0, 0]).tolist() == [1, 1]
    assert second_bit_seq([0, 1, 1, 1], [1, 1]).tolist() == [0, 0]
    assert second_bit_seq([0, 1, 1, 1], [0, 1]).tolist() == [1, 0]
    with pytest.raises(ValueError):
        second_bit_seq([0, 1], [0, 1])


def test_partition():
    p = partition([0, 0, 0])
    assert p.t0.tolist() == [0, 1, 2]
    assert p.t1.tolist() == []
    p = partition([1, 0, 1])
    assert p.t0.tolist() == [1]
    assert p.t1.tolist() == [0, 2]
    assert p.n0 == 1


def test_subseq():
    s = [1, 0, 1]
    assert subseq(s, [0, 2]).tolist() == [1, 1]
    assert subseq(s, []).tolist() == []
    assert subseq(s, [0, 1, 2]).tolist() == [1, 0, 1]
    with pytest.raises(IndexError):
        subseq(s, [3])


bitseqs = st.lists(st.integers(0, 1), min_size=2, max_size=64).filter(lambda s: len(s) % 2 == 0)


@given(bitseqs, st.randoms())
def test_parity_linearity(bits, pyrandom):
    x = np.array(bits, dtype=np.uint8)
    y = np.array([pyrandom.randint(0, 1) for _ in bits], dtype=np.uint8)
    assert np.array_equal(parity_seq(x) ^ parity_seq(y), parity_seq(x ^ y))


@given(st.lists(st.integers(0, 1), min_size=0, max_size=64))
def test_partition_covers(w1hat):
    p = partition(w1hat)
    assert p.t0.size + p.t1.size == len(w1hat)


def test_block_laws_converge_on_samples():
    # end-to-end: sampled discrepancy pattern must follow the derived laws
    p = six_state_point(0.1)
    d = derived_dists(p)
    rng = np.random.default_rng(123)
    x, y = sample_pair(p, 2 * 10**5, rng)
    w1 = parity_seq(x) ^ parity_seq(y)
    assert abs(np.mean(w1) - d.w1_dist(1)) < 0.01
    # second-bit discrepancy restricted to true parity-0 blocks
    err2 = (x ^ y).reshape(-1, 2)[:, 1]
    w2_on_t0 = err2[w1 == 0]
    assert abs(np.mean(w2_on_t0) - d.w2_given_w1_0(1)) < 0.01
