"""Objective definitions, generalized targets, and CLI parsing."""

import numpy as np
import pytest

from ealab.objectives import (
    evaluate,
    is_optimum,
    leadingones,
    leadingones_target,
    level,
    linear,
    onemax,
    onemax_target,
    parse_objective,
)
from ealab.variation import ParameterError, RandomSource, random_bitstring


class TestDefinitions:
    def test_optima(self):
        n = 12
        ones = np.ones(n, np.uint8)
        assert evaluate(onemax(n), ones) == n
        assert evaluate(leadingones(n), ones) == n

    def test_leadingones_prefix(self):
        x = np.array([1, 1, 0, 1, 1, 1, 1], np.uint8)
        assert evaluate(leadingones(7), x) == 2

    def test_onemax_counts(self):
        x = np.array([1, 0, 1, 1, 0], np.uint8)
        assert evaluate(onemax(5), x) == 3

    def test_target_definition(self):
        rng = RandomSource(1)
        z = random_bitstring(20, rng)
        obj = onemax_target(z)
        assert evaluate(obj, z) == 20
        assert evaluate(obj, 1 - z) == 0

    def test_linear_matches_onemax_for_unit_weights(self):
        rng = RandomSource(2)
        n = 25
        lin = linear(np.ones(n))
        om = onemax(n)
        for _ in range(10 ** 4):
            x = random_bitstring(n, rng)
            assert evaluate(lin, x) == evaluate(om, x)

    def test_linear_weighted(self):
        obj = linear([3.0, 1.0, 2.0])
        assert obj.optimum_value == 6.0
        assert evaluate(obj, [1, 0, 1]) == 5.0
        assert is_optimum(obj, 6.0)
        assert not is_optimum(obj, 5.999999)

    def test_leadingones_target_permuted(self):
        # inspect positions in the order 2,0,1 against target 101
        z = np.array([1, 0, 1], np.uint8)
        obj = leadingones_target(z, [2, 0, 1])
        assert evaluate(obj, [1, 0, 1]) == 3
        # x agrees with z at permuted index 0 (position 2) but not position 0
        assert evaluate(obj, [0, 0, 1]) == 1
        # x disagrees at position 2 (first inspected)
        assert evaluate(obj, [1, 0, 0]) == 0

    def test_is_optimum(self):
        assert is_optimum(onemax(5), 5.0)
        assert not is_optimum(onemax(5), 4.0)


class TestInvariantsAndCoupling:
    def test_value_bounds_and_domination(self):
        rng = RandomSource(3)
        n = 30
        om, lo = onemax(n), leadingones(n)
        for _ in range(2000):
            x = random_bitstring(n, rng)
            vo, vl = evaluate(om, x), evaluate(lo, x)
            assert 0 <= vo <= n and 0 <= vl <= n
            assert vl <= vo

    def test_xor_coupling(self):
        # OneMax(x) == OM_z(y) where y = x XOR (all-ones XOR z)
        rng = RandomSource(4)
        n = 40
        om = onemax(n)
        for _ in range(500):
            x = random_bitstring(n, rng)
            z = random_bitstring(n, rng)
            y = x ^ (1 - z)
            assert evaluate(om, x) == evaluate(onemax_target(z), y)

    def test_level_for_linear_counts_correct_bits(self):
        obj = linear([0.5, 4.0, 1.0, 1.0])
        assert level(obj, [1, 0, 1, 0]) == 2
        assert level(obj, [1, 1, 1, 1]) == 4


class TestValidation:
    def test_dimension_mismatch(self):
        with pytest.raises(ParameterError):
            evaluate(onemax(5), np.zeros(4, np.uint8))

    def test_linear_weight_domain(self):
        with pytest.raises(ParameterError):
            linear([1.0, 0.0, 2.0])
        with pytest.raises(ParameterError):
            linear([1.0, -1.0])
        with pytest.raises(ParameterError):
            linear([])

    def test_permutation_validation(self):
        z = np.ones(3, np.uint8)
        with pytest.raises(ParameterError):
            leadingones_target(z, [0, 0, 1])
        with pytest.raises(ParameterError):
            leadingones_target(z, [0, 1])

    def test_bit_validation(self):
        with pytest.raises(ParameterError):
            evaluate(onemax(3), [0, 1, 2])


class TestParsing:
    def test_basic_names(self):
        assert parse_objective("onemax", 8).kind == "onemax"
        assert parse_objective("leadingones", 8).kind == "leadingones"

    def test_linear_weights(self):
        obj = parse_objective("linear:3,1,2", 3)
        assert obj.kind == "linear"
        assert list(obj.weights) == [3.0, 1.0, 2.0]
        with pytest.raises(ParameterError):
            parse_objective("linear:1,2", 3)
        with pytest.raises(ParameterError):
            parse_objective("linear:a,b,c", 3)

    def test_hex_target(self):
        # 0xb = 1011 most-significant-bit first
        obj = parse_objective("onemax-z:b", 4)
        assert list(obj.target) == [1, 0, 1, 1]
        with pytest.raises(ParameterError):
            parse_objective("onemax-z:1ff", 4)  # needs 9 bits
        with pytest.raises(ParameterError):
            parse_objective("onemax-z:zz", 4)

    def test_leadingones_target_specs(self):
        obj = parse_objective("leadingones-z:f:identity", 4)
        assert list(obj.permutation) == [0, 1, 2, 3]
        obj = parse_objective("leadingones-z:f:reverse", 4)
        assert list(obj.permutation) == [3, 2, 1, 0]
        obj = parse_objective("leadingones-z:f:2,0,1,3", 4)
        assert list(obj.permutation) == [2, 0, 1, 3]
        with pytest.raises(ParameterError):
            parse_objective("leadingones-z:f", 4)
        with pytest.raises(ParameterError):
            parse_objective("leadingones-z:f:0,0,1,2", 4)

    def test_unknown(self):
        with pytest.raises(ParameterError):
            parse_objective("jump", 8)
