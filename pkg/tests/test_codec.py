"""Linear codes from valid sets: encode, syndrome decode, channel model."""

import itertools

import pytest

from golden_data import GOLDEN_SETS
from magset.codec import (
    NoUnitPivotError,
    UnknownSyndromeError,
    decode,
    encode,
    is_codeword,
    make_code,
    pivot_index,
    simulate_channel,
)


@pytest.fixture(scope="module")
def code20():
    return make_code({1, 9, 13, 17}, 20)


def test_make_code_sorts_row_and_validates(code20):
    assert code20.elements == (1, 9, 13, 17)
    assert code20.length == 4
    with pytest.raises(ValueError):
        make_code({5}, 20)  # 4*5 == 0 mod 20: not a valid set
    with pytest.raises(ValueError):
        make_code({1, 2}, 9)


def test_is_codeword(code20):
    assert is_codeword(code20, (2, 2, 0, 0))  # 2 + 18 = 20 = 0
    assert is_codeword(code20, (0, 0, 0, 0))
    assert not is_codeword(code20, (1, 0, 0, 0))
    with pytest.raises(ValueError):
        is_codeword(code20, (1, 0, 0))  # length mismatch


def test_encode_example(code20):
    assert pivot_index(code20) == 0
    assert encode(code20, (2, 0, 0)) == (2, 2, 0, 0)
    assert encode(code20, (0, 0, 0)) == (0, 0, 0, 0)
    with pytest.raises(ValueError):
        encode(code20, (2, 0))  # wrong message length


def test_encode_needs_unit_pivot():
    # {4} is a valid set at q=20 (products 4,8,12,16) with no unit element:
    # the code exists and decodes, but nothing can be encoded.
    code = make_code({4}, 20)
    assert decode(code, (5,)) == ((5,), None)
    with pytest.raises(NoUnitPivotError):
        pivot_index(code)
    with pytest.raises(NoUnitPivotError):
        encode(code, ())


def test_decode_example(code20):
    word, error = decode(code20, (2, 5, 0, 0))  # syndrome 47 = 7 mod 20
    assert (word, error) == ((2, 2, 0, 0), (1, 3))
    assert code20.table.lookup(7) == (3, 9)
    assert decode(code20, (2, 2, 0, 0)) == ((2, 2, 0, 0), None)


def test_decode_unknown_syndrome_is_detection(code20):
    received = (3, 3, 0, 0)  # syndrome 30 = 10: not a single-error syndrome
    with pytest.raises(UnknownSyndromeError) as info:
        decode(code20, received)
    assert info.value.syndrome == 10


def test_exhaustive_single_error_roundtrip(code20):
    q, m = 20, code20.length
    sample = (0, 1, 7, 13, 19)
    for message in itertools.product(sample, repeat=m - 1):
        sent = encode(code20, message)
        for position in range(m):
            for magnitude in range(1, 5):
                received = list(sent)
                received[position] = (received[position] + magnitude) % q
                word, error = decode(code20, received)
                assert word == sent
                assert error == (position, magnitude)


def test_double_errors_never_silently_accepted(code20):
    q, m = 20, code20.length
    sent = encode(code20, (2, 0, 0))
    for i, j in itertools.combinations(range(m), 2):
        for e1, e2 in itertools.product(range(1, 5), repeat=2):
            received = list(sent)
            received[i] = (received[i] + e1) % q
            received[j] = (received[j] + e2) % q
            try:
                word, _error = decode(code20, received)
            except UnknownSyndromeError:
                continue  # detected
            assert word != sent  # miscorrected, but never reported clean


def test_code_size_is_q_to_m_minus_1():
    for elements, q in (({1, 9}, 10), ({1, 9, 13, 17}, 20)):
        code = make_code(elements, q)
        m = code.length
        count = sum(
            1 for word in itertools.product(range(q), repeat=m)
            if is_codeword(code, word))
        assert count == q ** (m - 1)
        # Packing bound for single limited-magnitude errors.
        assert count * (m * code.lam + 1) <= q**m


def test_simulate_deterministic_and_fully_correcting(code20):
    stats = simulate_channel(code20, 400, error_rate=1.0, seed=11)
    again = simulate_channel(code20, 400, error_rate=1.0, seed=11)
    other = simulate_channel(code20, 400, error_rate=1.0, seed=12)
    assert stats == again
    assert stats != other or stats.corrected == other.corrected == 400
    assert (stats.trials, stats.corrected, stats.detected,
            stats.miscorrected) == (400, 400, 0, 0)
    assert stats.to_json_dict() == {"trials": 400, "corrected": 400,
                                    "detected": 0, "miscorrected": 0,
                                    "seed": 11}


def test_simulate_error_rate_zero(code20):
    stats = simulate_channel(code20, 100, error_rate=0.0, seed=3)
    assert stats.corrected == 100 and stats.miscorrected == 0


def test_simulate_on_golden_sets():
    for q in (40, 44):
        code = make_code(GOLDEN_SETS[q], q)
        stats = simulate_channel(code, 300, error_rate=1.0, seed=5)
        assert stats.corrected == 300


def test_simulate_validates_inputs(code20):
    with pytest.raises(ValueError):
        simulate_channel(code20, -1)
    with pytest.raises(ValueError):
        simulate_channel(code20, 10, error_rate=1.5)
