import math
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pqforge.errors import DomainError, ValidationError
from pqforge.quantum_model import (LOG2_SATURATION, Log2Quantity, QuantityKind, QueryComplexityInput,
                                   QuantumEnvironment, algebraic_query_term, collision_search_log2_cost,
                                   compose_attack_success, decoherence_log2_factor, entropy_loss_bound,
                                   grover_log2_cost, lattice_success_decay, logsumexp2,
                                   max_feasible_dimension, min_queries_for_error,
                                   parallelization_log2_penalty, quantum_advantage_bound,
                                   quantum_lower_bound, quantum_walk_cost)


class TestEnvironment:
    def test_defaults(self):
        env = QuantumEnvironment()
        assert env.lambda_d == pytest.approx(1e6)
        assert not env.coherent

    def test_ideal(self):
        env = QuantumEnvironment.ideal()
        assert env.coherent and env.gate_ratio == 0.0

    @pytest.mark.parametrize("kwargs", [
        {"tau_g": 0}, {"tau_g": 1.0, "tau_d": 0.5}, {"k": 0}, {"k": 1.5}, {"epsilon": 1.0},
        {"tau_g": math.inf},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ValidationError):
            QuantumEnvironment(**kwargs)


class TestLog2Quantity:
    def test_probability_must_be_nonpositive(self):
        with pytest.raises(ValidationError):
            Log2Quantity.probability(0.5)

    def test_value_overflows_to_inf(self):
        assert Log2Quantity.cost(1024).value == math.inf
        assert Log2Quantity.cost(10).value == 1024.0

    def test_plus_is_sum(self):
        a = Log2Quantity.cost(3.0).plus(Log2Quantity.cost(3.0))
        assert a.log2_value == pytest.approx(4.0)

    def test_times_probability_clamped(self):
        p = Log2Quantity.probability(0.0).times(Log2Quantity.probability(0.0))
        assert p.kind is QuantityKind.PROBABILITY and p.log2_value == 0.0

    def test_logsumexp_handles_inf(self):
        assert logsumexp2([-math.inf, -math.inf]) == -math.inf
        assert logsumexp2([1000.0, 1000.0]) == pytest.approx(1001.0)


class TestDecoherence:
    def test_floor_value(self):
        # lambda_d * 128 ln 2, high-precision value 88722839.11167...
        assert min_queries_for_error(2.0 ** -128, QuantumEnvironment()) == pytest.approx(88722839.1116730, rel=1e-12)

    def test_floor_half_error(self):
        env = QuantumEnvironment.from_ratio(1e3)
        assert min_queries_for_error(0.5, env) == pytest.approx(693.147180559945, rel=1e-12)

    def test_factor_is_exp(self):
        env = QuantumEnvironment.from_ratio(100.0)
        got = decoherence_log2_factor(50, env).log2_value
        assert got == pytest.approx(math.log2(math.exp(-0.5)), rel=1e-12)

    def test_factor_at_2_pow_1024(self):
        got = decoherence_log2_factor(Log2Quantity.cost(1024), QuantumEnvironment())
        assert math.isfinite(got.log2_value) and got.log2_value < 0

    def test_factor_saturates(self):
        got = decoherence_log2_factor(Log2Quantity.cost(1e6), QuantumEnvironment())
        assert got.log2_value == -LOG2_SATURATION == -sys.float_info.max

    def test_ideal_factor_is_one(self):
        assert decoherence_log2_factor(1e300, QuantumEnvironment.ideal()).log2_value == 0.0

    @settings(max_examples=100, deadline=None)
    @given(st.floats(min_value=0, max_value=2000), st.floats(min_value=0, max_value=2000))
    def test_factor_monotone(self, a, b):
        env = QuantumEnvironment()
        fa = decoherence_log2_factor(Log2Quantity.cost(a), env).log2_value
        fb = decoherence_log2_factor(Log2Quantity.cost(b), env).log2_value
        if a <= b:
            assert fa >= fb


class TestLowerBound:
    def test_floor_dominates(self):
        inp = QueryComplexityInput(deg_eps=10, sparsity=1, domain_size_log2=128, epsilon=0.25)
        env = QuantumEnvironment()
        assert quantum_lower_bound(inp, env).value == pytest.approx(1e6 * math.log(4), rel=1e-12)

    def test_ideal_drops_floor(self):
        inp = QueryComplexityInput(deg_eps=2, sparsity=4, domain_size_log2=10, epsilon=0.25)
        got = quantum_lower_bound(inp, QuantumEnvironment.ideal()).value
        assert got == pytest.approx(0.25 / 2 * 8)

    def test_algebraic_term_rejects_excess_sparsity(self):
        with pytest.raises(DomainError):
            algebraic_query_term(QueryComplexityInput(1, 2 ** 11, 10, 0.1))

    def test_epsilon_range(self):
        with pytest.raises(ValidationError):
            QueryComplexityInput(1, 1, 1, 0.5)


class TestSmallOps:
    def test_penalty(self):
        assert parallelization_log2_penalty(10 ** 6).log2_value == pytest.approx(-9.965784284662087)
        assert parallelization_log2_penalty(1).log2_value == 0.0

    def test_compose(self):
        env = QuantumEnvironment(k=4)
        got = compose_attack_success(Log2Quantity.probability(-1.0), 0, env)
        assert got.log2_value == pytest.approx(-2.0)

    def test_entropy_loss(self):
        assert entropy_loss_bound(10, QuantumEnvironment(), 256) == pytest.approx(10 * 1e-6 * 256)

    def test_costs(self):
        assert collision_search_log2_cost(256).log2_value == pytest.approx(85.333333333333)
        assert grover_log2_cost(128).log2_value == 64.0

    def test_walk(self):
        assert quantum_walk_cost(1, 2, 3, 0.25, 0.25) == pytest.approx(1 + (4 + 3) * 2)

    def test_advantage_bound(self):
        # (T/lambda_d) * log2(dim)/dim / ln 2 with T = 1e6/1024 * 10
        env = QuantumEnvironment()
        got = quantum_advantage_bound(1e6, env, 1024)
        assert got == pytest.approx(10 / 1024 / math.log(2), rel=1e-12)
        assert math.isfinite(quantum_advantage_bound(Log2Quantity.cost(1024), env, 1024))
        assert quantum_advantage_bound(Log2Quantity.cost(1100), env, 1024) == LOG2_SATURATION

    def test_success_decay(self):
        env = QuantumEnvironment()
        assert lattice_success_decay(0.5, 0.0, env, 512) == 0.5
        assert lattice_success_decay(1.0, env.tau_d, env, 4) == pytest.approx(math.exp(-2))
        with pytest.raises(DomainError):
            lattice_success_decay(1.0, 1.0, env, 2)

    def test_max_dimension(self):
        env = QuantumEnvironment()
        assert max_feasible_dimension(env, 128, 0.5) == math.floor(1e6 * 7 / 128)
        with pytest.raises(DomainError):
            max_feasible_dimension(QuantumEnvironment.ideal(), 128, 0.5)
