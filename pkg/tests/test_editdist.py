from __future__ import annotations

import itertools

import pytest
from hypothesis import given, strategies as st

from prclab.editdist import (BallTooLarge, SEDBudget, ed_ball_bound, edit_ball_enumerate, edit_ball_same_length,
                             edit_distance, hamming_ball, sed_ball_bound, sed_ball_enumerate, sed_member)
from prclab.rng import make_rng

bits = st.text(alphabet="01", max_size=16)


def dp_indel(a: str, b: str) -> int:
    """Plain O(|a||b|) insert/delete DP, the reference for the bit-parallel version."""
    prev = list(range(len(b) + 1))
    for i in range(1, len(a) + 1):
        cur = [i] + [0] * len(b)
        for j in range(1, len(b) + 1):
            cur[j] = prev[j - 1] if a[i - 1] == b[j - 1] else 1 + min(prev[j], cur[j - 1])
        prev = cur
    return prev[-1]


def all_strings(max_len: int):
    for n in range(max_len + 1):
        for t in itertools.product("01", repeat=n):
            yield "".join(t)


def test_edit_distance_examples():
    assert edit_distance("0101", "0101") == 0
    assert edit_distance("0", "1") == 2
    assert edit_distance("", "11") == 2


def test_metric_and_parity_on_1000_random_triples():
    rng = make_rng(2024)
    for _ in range(1000):
        a, b, c = ("".join(rng.choice(["0", "1"], size=rng.integers(0, 17))) for _ in range(3))
        ab, bc, ac = edit_distance(a, b), edit_distance(b, c), edit_distance(a, c)
        assert ab == edit_distance(b, a) == dp_indel(a, b)
        assert ac <= ab + bc
        assert (ab - len(a) - len(b)) % 2 == 0
        assert (ab == 0) == (a == b)


@given(bits, bits)
def test_matches_reference_dp(a, b):
    assert edit_distance(a, b) == dp_indel(a, b)


def test_long_strings_match_reference():
    rng = make_rng(5)
    for n in (63, 64, 65, 200):
        a = "".join(rng.choice(["0", "1"], size=n))
        b = "".join(rng.choice(["0", "1"], size=n + 7))
        assert edit_distance(a, b) == dp_indel(a, b)


def test_ball_examples():
    assert edit_ball_enumerate("0101", 0) == {"0101"}
    assert edit_ball_enumerate("0", 1) == {"0", "", "00", "01", "10"}
    assert len(edit_ball_enumerate("0101", 2)) <= ed_ball_bound(4, 2)
    assert ed_ball_bound(4, 2) == pytest.approx((2.718281828459045 * 6 * 3 / 2) ** 2)
    with pytest.raises(BallTooLarge):
        edit_ball_enumerate("0" * 40, 1)


def test_ball_membership_against_distance():
    universe = list(all_strings(6))
    for w in ("", "0", "01", "0110"):
        for d in range(3):
            ball = edit_ball_enumerate(w, d)
            assert ball == {y for y in universe if dp_indel(w, y) <= d}


def test_ball_bound_exhaustive_len_8():
    for w in all_strings(8):
        for d in (1, 2):
            assert len(edit_ball_enumerate(w, d)) <= ed_ball_bound(len(w), d)


def test_same_length_ball():
    universe = ["".join(t) for t in itertools.product("01", repeat=5)]
    for w in ("00000", "01101"):
        assert edit_ball_same_length(w, 2) == {y for y in universe if dp_indel(w, y) <= 2}
        assert edit_ball_same_length(w, 4) == {y for y in universe if dp_indel(w, y) <= 4}


def test_sed_examples():
    assert sed_member("0110", "0110", SEDBudget(0, 0, 4))
    assert sed_member("0000", "0001", SEDBudget(0.25, 0, 4))
    assert not sed_member("0000", "1111", SEDBudget(0, 0, 4))


def _sed_oracle(w: str, y: str, subs: int, indels: int) -> bool:
    for r in range(subs + 1):
        for pos in itertools.combinations(range(len(w)), r):
            z = list(w)
            for p in pos:
                z[p] = "1" if z[p] == "0" else "0"
            if dp_indel("".join(z), y) <= indels:
                return True
    return False


def test_sed_member_matches_witness_search():
    rng = make_rng(9)
    for n in range(0, 11):
        for _ in range(30):
            w = "".join(rng.choice(["0", "1"], size=n))
            y = "".join(rng.choice(["0", "1"], size=max(0, n + int(rng.integers(-2, 3)))))
            hf, ef = float(rng.choice([0, 0.1, 0.2, 0.3])), float(rng.choice([0, 0.1, 0.2, 0.3]))
            b = SEDBudget(hf, ef, n)
            assert sed_member(w, y, b) == _sed_oracle(w, y, b.subs, b.indels)


def test_sed_member_exhaustive_short():
    for w in all_strings(4):
        for y in all_strings(5):
            for hf, ef in ((0.25, 0.25), (0.5, 0.5), (0.0, 0.5)):
                b = SEDBudget(hf, ef, len(w))
                assert sed_member(w, y, b) == _sed_oracle(w, y, b.subs, b.indels)


def test_sed_ball_bound_exhaustive():
    for n in range(1, 11):
        for p in (0.05, 0.25, 0.45):
            for eps in (0.1, 0.2, 0.3):
                w = "01" * (n // 2) + "0" * (n % 2)
                ball = sed_ball_enumerate(w, 0.5 - p, eps)
                assert len(ball) <= sed_ball_bound(n, p, eps)


def test_hamming_ball_size():
    assert len(hamming_ball("0000", 1)) == 5
    assert len(hamming_ball("000000", 2)) == 1 + 6 + 15
