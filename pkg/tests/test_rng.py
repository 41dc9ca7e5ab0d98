import pytest

from burstlab.rng import MASK64, SplitMix64, Xoshiro256StarStar, derive_seed, mix64


def test_splitmix64_reference_vectors():
    assert SplitMix64(0).next() == 0xE220A8397B1DCDAF
    assert SplitMix64(1234567).next() == 6457827717110365317


def test_xoshiro256starstar_reference_vector():
    rng = Xoshiro256StarStar(state=[1, 2, 3, 4])
    assert [rng.next() for _ in range(4)] == [11520, 0, 1509978240, 1215971899390074240]


def test_seeding_goes_through_splitmix():
    sm = SplitMix64(42)
    state = [sm.next() for _ in range(4)]
    a = Xoshiro256StarStar(42)
    b = Xoshiro256StarStar(state=state)
    assert [a.next() for _ in range(10)] == [b.next() for _ in range(10)]


def test_negative_seeds_wrap_to_64_bits():
    assert Xoshiro256StarStar(-1).next() == Xoshiro256StarStar(MASK64).next()


@pytest.mark.parametrize("n", [1, 2, 3, 7, 10**6, 2**63 + 5])
def test_bounded_in_range(n):
    rng = Xoshiro256StarStar(5)
    assert all(0 <= rng.bounded(n) < n for _ in range(200))


def test_bounded_rejects_biased_zone():
    # n = 2**63 + 1: threshold is 2**63 - 1, so roughly half the draws are rejected
    n = 2**63 + 1
    threshold = ((1 << 64) - n) % n
    ref = Xoshiro256StarStar(9)
    rng = Xoshiro256StarStar(9)
    value = rng.bounded(n)
    while True:
        r = ref.next()
        if r >= threshold:
            assert value == r % n
            break


def test_derive_seed_documented_formula():
    assert derive_seed(7, 100, 3) == mix64(mix64(mix64(7) ^ 100) ^ 3)
    assert derive_seed(7, 100, 3) != derive_seed(7, 3, 100)
