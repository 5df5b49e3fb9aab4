import math

import numpy as np
import pytest

from lnnet.rng import SplitMix64, mix64

MASK = (1 << 64) - 1


def oracle_u64(seed, n):
    """Textbook SplitMix64 on Python integers."""
    state, out = seed, []
    for _ in range(n):
        state = (state + 0x9E3779B97F4A7C15) & MASK
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        out.append(z ^ (z >> 31))
    return out


def oracle_normals(seed, n):
    u = [(v >> 11) * 2.0 ** -53 for v in oracle_u64(seed, 2 * ((n + 1) // 2))]
    out = []
    for a, b in zip(u[0::2], u[1::2]):
        r = math.sqrt(-2.0 * math.log1p(-a))
        out += [r * math.cos(2 * math.pi * b), r * math.sin(2 * math.pi * b)]
    return out[:n]


def test_published_vectors():
    assert [int(v) for v in SplitMix64(0).next_u64(3)] == [
        0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]
    assert [int(v) for v in SplitMix64(1234567).next_u64(5)] == [
        6457827717110365317, 3203168211198807973, 9817491932198370423,
        4593380528125082431, 16408922859458223821]


@pytest.mark.parametrize("seed", [0, 1, 7, 2**63 + 5, MASK])
def test_matches_integer_oracle(seed):
    assert [int(v) for v in SplitMix64(seed).next_u64(50)] == oracle_u64(seed, 50)


def test_counter_continues_across_calls():
    r = SplitMix64(9)
    a = list(r.next_u64(3)) + list(r.next_u64(4))
    assert [int(v) for v in a] == oracle_u64(9, 7)


def test_frozen_uniforms_and_normals():
    assert SplitMix64(42).uniform(2).tolist() == [0.7415648787718233, 0.1599103928769201]
    np.testing.assert_array_equal(SplitMix64(42).normal(3),
                                  [0.8822489062222688, 1.388473285287707, -0.4508498757188601])


def test_normals_match_oracle():
    np.testing.assert_allclose(SplitMix64(3).normal(101), oracle_normals(3, 101), rtol=0, atol=1e-15)


def test_normal_moments():
    z = SplitMix64(11).normal(200_000)
    assert abs(z.mean()) < 0.01
    assert abs(z.var() - 1) < 0.01


def test_uniform_range():
    u = SplitMix64(5).uniform(10_000)
    assert u.min() >= 0 and u.max() < 1


def test_split_is_deterministic_and_distinct():
    root = SplitMix64(17)
    assert root.split(3).seed == SplitMix64(17).split(3).seed
    assert len({root.split(k).seed for k in range(1000)}) == 1000
    assert root.split(0).seed == mix64(17 ^ mix64(1))


def test_split_does_not_advance_parent():
    r = SplitMix64(4)
    r.split(1)
    assert int(r.next_u64(1)[0]) == oracle_u64(4, 1)[0]


def test_permutation_and_integers():
    p = SplitMix64(8).permutation(50)
    assert sorted(p.tolist()) == list(range(50))
    k = SplitMix64(8).integers(1000, 3)
    assert set(k.tolist()) == {0, 1, 2}


def test_unit_vector_norm():
    r = SplitMix64(1)
    for d in (1, 2, 5):
        assert np.linalg.norm(r.unit_vector(d)) == pytest.approx(1.0, abs=1e-15)
