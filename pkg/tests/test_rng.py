from hypothesis import given, strategies as st

from bcc.rng import SplitMix64, derive_seed


def test_reference_vector():
    # published SplitMix64 outputs for seed 1234567
    rng = SplitMix64(1234567)
    assert [rng.next_u64() for _ in range(3)] == [
        6457827717110365317,
        3203168211198807973,
        9817491932198370423,
    ]


def test_unit_draw_uses_top_53_bits():
    a, b = SplitMix64(9), SplitMix64(9)
    x = a.next_u64()
    assert b.random() == (x >> 11) / 2**53


def test_derive_seed_is_stream_position():
    rng = SplitMix64(42)
    stream = [rng.next_u64() for _ in range(10)]
    assert [derive_seed(42, i) for i in range(10)] == stream


@given(st.integers(0, 2**64 - 1), st.integers(1, 1000))
def test_randbelow_in_range(seed, n):
    rng = SplitMix64(seed)
    assert all(0 <= rng.randbelow(n) < n for _ in range(20))


def test_randbelow_roughly_uniform():
    rng = SplitMix64(5)
    counts = [0] * 3
    for _ in range(30000):
        counts[rng.randbelow(3)] += 1
    # each count ~ Binomial(30000, 1/3), sd ~ 81.6
    assert all(abs(c - 10000) < 4 * 81.65 for c in counts)
