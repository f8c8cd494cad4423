import itertools
import random

import pytest

from sebq.latin import LatinSquare, Quasigroup, random_latin_square, xor_latin_square
from sebq.transforms import (
    d_transform,
    e_transform,
    fold_apply,
    fold_reverse,
    leader_update_dec,
    leader_update_enc,
    xor_checksum,
)

MUL_5 = [
    [0, 1, 2, 3, 4],
    [1, 0, 3, 4, 2],
    [2, 4, 0, 1, 3],
    [3, 2, 4, 0, 1],
    [4, 3, 1, 2, 0],
]


@pytest.fixture
def xq():
    return Quasigroup.from_square(xor_latin_square(4))


@pytest.fixture
def q5():
    return Quasigroup.from_square(LatinSquare(MUL_5))


class TestFold:
    def test_xor_chain(self, xq):
        assert fold_apply(xq, (1, 2), 3) == 0  # 2 ^ (1 ^ 3)

    def test_empty_leader_is_identity(self, xq, q5):
        assert fold_apply(xq, (), 3) == 3
        assert fold_apply(q5, (), 2) == 2

    def test_worked_example_single_step(self, q5):
        # one fold step is a plain table read
        assert fold_apply(q5, (1,), 2) == MUL_5[1][2] == 3

    def test_fold_reverse_inverts(self, xq, q5):
        rng = random.Random(0)
        for q in (xq, q5):
            for _ in range(50):
                beta = [rng.randrange(q.order) for _ in range(rng.randint(0, 5))]
                a = rng.randrange(q.order)
                assert fold_reverse(q, beta, fold_apply(q, beta, a)) == a

    def test_symbol_range_enforced(self, xq):
        with pytest.raises(ValueError):
            fold_apply(xq, (1, 2), 4)
        with pytest.raises(ValueError):
            fold_apply(xq, (9,), 0)


class TestChecksum:
    def test_pair(self):
        assert xor_checksum([2, 2]) == [2, 0]

    def test_singleton(self):
        assert xor_checksum([7]) == [7]

    def test_triple(self):
        assert xor_checksum([1, 2, 3]) == [1, 2, 0]

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            xor_checksum([])


class TestLeaderUpdates:
    def test_enc_xor_example(self, xq):
        assert leader_update_enc(xq, 3, (1, 2)) == [2, 2]

    def test_enc_zero_fixed_point(self, xq):
        assert leader_update_enc(xq, 0, (0, 0)) == [0, 0]

    def test_enc_single_block_is_table_read(self, q5):
        for b in range(5):
            for a in range(5):
                assert leader_update_enc(q5, a, (b,)) == [MUL_5[b][a]]

    def test_dec_matches_paired_encryption_state(self, xq):
        # decrypt-side update must land on the state the encrypt side reached
        assert leader_update_dec(xq, 0, (1, 2)) == [2, 2]

    def test_dec_zero_fixed_point(self, xq):
        assert leader_update_dec(xq, 0, (0, 0)) == [0, 0]

    def test_paired_updates_agree_everywhere(self, q5, xq):
        rng = random.Random(1)
        for q in (q5, xq):
            for _ in range(200):
                n = rng.randint(1, 6)
                delta = [rng.randrange(q.order) for _ in range(n)]
                a = rng.randrange(q.order)
                c = fold_apply(q, delta, a)
                assert leader_update_dec(q, c, delta) == leader_update_enc(q, a, delta)

    def test_empty_leader_rejected(self, xq):
        with pytest.raises(ValueError):
            leader_update_enc(xq, 0, ())
        with pytest.raises(ValueError):
            leader_update_dec(xq, 0, ())


class TestTransforms:
    def test_xor_worked_chain(self, xq):
        cipher, final = e_transform(xq, (1, 2), (3, 0))
        assert cipher == [0, 0]
        assert final == [2, 2]

    def test_empty_message_returns_leader(self, q5):
        cipher, final = e_transform(q5, (2, 3), ())
        assert cipher == [] and final == [2, 3]
        plain, final = d_transform(q5, (2, 3), ())
        assert plain == [] and final == [2, 3]

    def test_all_zero_absorbing(self, xq):
        cipher, _ = e_transform(xq, (0, 0), (0, 0, 0))
        assert cipher == [0, 0, 0]

    def test_xor_decrypt_worked_chain(self, xq):
        plain, final = d_transform(xq, (1, 2), (0, 0))
        assert plain == [3, 0]
        assert final == [2, 2]

    def test_round_trip_random(self):
        rng = random.Random(2)
        for _ in range(300):
            order = rng.choice([4, 8, 16])
            q = Quasigroup.from_square(random_latin_square(order, rng.randrange(10**9)))
            leader = [rng.randrange(order) for _ in range(rng.randint(1, 5))]
            alpha = [rng.randrange(order) for _ in range(rng.randint(0, 12))]
            cipher, final_e = e_transform(q, leader, alpha)
            plain, final_d = d_transform(q, leader, cipher)
            assert plain == alpha
            assert final_d == final_e

    def test_reverse_round_trip(self):
        # e(d(gamma)) = gamma as well
        rng = random.Random(3)
        q = Quasigroup.from_square(random_latin_square(8, 5))
        for _ in range(100):
            leader = [rng.randrange(8) for _ in range(rng.randint(1, 4))]
            gamma = [rng.randrange(8) for _ in range(rng.randint(0, 8))]
            plain, _ = d_transform(q, leader, gamma)
            cipher, _ = e_transform(q, leader, plain)
            assert cipher == gamma

    def test_bijection_exhaustive_small(self):
        # k=2 symbols, leaders up to 2 blocks, strings up to 2 blocks
        q = Quasigroup.from_square(random_latin_square(4, 11))
        for n in (1, 2):
            for leader in itertools.product(range(4), repeat=n):
                for l in (1, 2):
                    images = {
                        tuple(e_transform(q, leader, msg)[0])
                        for msg in itertools.product(range(4), repeat=l)
                    }
                    assert len(images) == 4**l

    def test_xor_closed_form(self, xq):
        # with the XOR table the cipher chain collapses to a running XOR
        rng = random.Random(4)
        for _ in range(50):
            leader = [rng.randrange(4) for _ in range(rng.randint(1, 5))]
            alpha = [rng.randrange(4) for _ in range(rng.randint(0, 10))]
            cipher, _ = e_transform(xq, leader, alpha)
            acc = 0
            for b in leader:
                acc ^= b
            expected = []
            for a in alpha:
                acc ^= a
                expected.append(acc)
            assert cipher == expected

    def test_empty_leader_rejected(self, xq):
        with pytest.raises(ValueError):
            e_transform(xq, (), (1,))
        with pytest.raises(ValueError):
            d_transform(xq, (), (1,))
