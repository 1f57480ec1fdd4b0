"""Divisor-class and valuation partitions of Z_q."""

import math

import pytest

from magset.numtheory import euler_phi
from magset.residues import (
    Instance,
    decompose,
    divisor_class,
    n_partition_k2,
    n_partition_k3,
    theta2,
)


def test_instance_from_q():
    inst = Instance.from_q(40)
    assert (inst.q, inst.k, inst.r, inst.lam) == (40, 3, 5, 4)
    assert inst.coprime_to_six
    assert not Instance.from_q(42).coprime_to_six


def test_instance_validates_shape():
    with pytest.raises(ValueError):
        Instance(40, 2, 10)  # r must be odd
    with pytest.raises(ValueError):
        Instance(40, 2, 5)  # 2^2 * 5 != 40
    with pytest.raises(ValueError):
        Instance(0, 0, 0)


def test_divisor_class_q40():
    inst = Instance.from_q(40)
    assert divisor_class(inst, 5) == {x for x in range(40) if math.gcd(x, 5) == 1}
    assert divisor_class(inst, 1) == {0, 5, 10, 15, 20, 25, 30, 35}
    with pytest.raises(ValueError):
        divisor_class(inst, 3)


def test_decompose_partitions_everything():
    for q in (10, 40, 190, 380, 152):
        inst = Instance.from_q(q)
        classes = decompose(inst)
        union = set()
        total = 0
        for cls in classes:
            assert not (cls.v_d & union)
            union |= cls.v_d
            total += len(cls.v_d)
            expected = (1 << inst.k) * (euler_phi(cls.d) if cls.d > 1 else 1)
            assert len(cls.v_d) == expected, (q, cls.d)
            assert set().union(*cls.u) == cls.v_d
        assert union == set(range(q))
        assert total == q


def test_valuation_partition_k3():
    inst = Instance.from_q(40)
    odd, twice, four_times, rest = n_partition_k3(inst)
    assert odd == set(range(1, 40, 2))
    assert twice == {x for x in range(1, 40) if x % 4 == 2}
    assert four_times == {x for x in range(1, 40) if x % 8 == 4}
    assert rest == {8, 16, 24, 32}
    with pytest.raises(ValueError):
        n_partition_k3(Instance.from_q(20))


def test_valuation_partition_k2():
    inst = Instance.from_q(20)
    odd, twice, rest = n_partition_k2(inst)
    assert odd == set(range(1, 20, 2))
    assert twice == {2, 6, 10, 14, 18}
    assert rest == {4, 8, 12, 16}


def test_theta2_layer_bijections():
    # Doubling maps the odd layer of each nontrivial class onto the
    # twice-odd layer, and the twice-odd layer onto itself, bijectively.
    for q in (10, 22, 38, 110):
        inst = Instance.from_q(q)
        for cls in decompose(inst):
            if cls.d == 1:
                continue
            u0, u1 = cls.u
            assert {theta2(x, q) for x in u0} == set(u1)
            assert {theta2(x, q) for x in u1} == set(u1)
    with pytest.raises(ValueError):
        theta2(1, 9)
