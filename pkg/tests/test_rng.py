import numpy as np

from lslab.rng import SplitMix64


def test_reference_stream():
    # published SplitMix64 outputs for seed 0
    out = SplitMix64(0).next_u64(3)
    assert [int(v) for v in out] == [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]


def test_stream_is_resumable():
    a = SplitMix64(42)
    first = np.concatenate([a.next_u64(5), a.next_u64(7)])
    assert np.array_equal(first, SplitMix64(42).next_u64(12))


def test_uniform_and_normal_ranges():
    g = SplitMix64(3)
    u = g.uniform(10000)
    assert u.min() >= 0 and u.max() < 1
    z = SplitMix64(3).normal(20001)
    assert z.size == 20001
    assert abs(z.mean()) < 0.05 and abs(z.std() - 1) < 0.05


def test_complex_normal_variance():
    z = SplitMix64(9).complex_normal(20000)
    assert abs(np.mean(np.abs(z) ** 2) - 2.0) < 0.1
