from collections import Counter

import numpy as np
import pytest

from ridexplain.agents import (ALL_DESCRIPTORS, DEFAULT_SUBSET, axis_agent, axis_select, pbe_agent,
                               random_agent, random_selection, validate_subset)
from ridexplain.errors import ConfigurationError, InputError
from ridexplain.explanations import ExplanationDescriptor, Scenario
from ridexplain.mlp import LAYER_SIZES, init
from ridexplain.pricing import TripQuote


def has_anchor_pair(indices):
    return any(ExplanationDescriptor.from_index(i).anchor_sibling() in indices for i in indices)


class TestPBE:
    def test_worked(self, worked_scenario):
        out = pbe_agent(worked_scenario)
        assert out.texts == (
            "A private ride would have cost $13.83 and would have taken 12 minutes.",
            "Public transportation costs $2.5 and would have taken 26 minutes.",
        )
        assert out.selected == ()

    def test_always_two_sentences(self):
        out = pbe_agent(Scenario(4, TripQuote(3, 4, 5, 6, 7, 8)))
        assert len(out.disclosures) == 2
        assert "$5" in out.texts[0] and "6 minutes" in out.texts[0]


class TestRandom:
    def test_deterministic(self, worked_scenario):
        assert random_agent(worked_scenario, 9) == random_agent(worked_scenario, 9)

    def test_depends_on_scenario_id(self):
        q = TripQuote(7.53, 13, 13.83, 12, 2.5, 26, 0.5)
        picks = {random_agent(Scenario(i, q), 3).indices for i in range(30)}
        assert len(picks) > 1

    def test_size_distribution(self):
        rng = np.random.default_rng(2024)
        sizes = Counter()
        for _ in range(10_000):
            pick = random_selection(rng, ALL_DESCRIPTORS)
            assert len(set(pick)) == len(pick)
            assert not has_anchor_pair(pick)
            sizes[len(pick)] += 1
        assert set(sizes) == {1, 2, 3, 4}
        assert all(0.22 <= sizes[k] / 10_000 <= 0.28 for k in sizes)
        mean = sum(k * v for k, v in sizes.items()) / 10_000
        assert 2.3 <= mean <= 2.7

    def test_tiny_pool_returns_feasible_maximum(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            pick = random_selection(rng, [0, 1])
            assert len(pick) == 1

    def test_empty_pool(self):
        with pytest.raises(InputError):
            random_selection(np.random.default_rng(0), [])


class TestAxis:
    def test_zero_weights_select_all(self, worked_scenario):
        m = init(0)
        for w in m.weights:
            w[:] = 0.0
        out = axis_agent(m, DEFAULT_SUBSET, worked_scenario)
        assert out.indices == DEFAULT_SUBSET
        assert out.probabilities == (0.5,) * 6

    def test_negative_biases_fall_back_to_one(self, worked_scenario):
        m = init(0)
        m.biases[-1][:] = -50.0
        m.biases[-1][2] = -40.0
        out = axis_agent(m, DEFAULT_SUBSET, worked_scenario)
        assert out.indices == (DEFAULT_SUBSET[2],)

    def test_select_rule(self):
        assert axis_select(np.array([0.1, 0.5, 0.49, 0.9])) == [1, 3]
        assert axis_select(np.array([0.1, 0.3, 0.2])) == [1]

    def test_width_mismatch(self, worked_scenario):
        with pytest.raises(ConfigurationError):
            axis_agent(init(0, (7, 8, 5)), DEFAULT_SUBSET, worked_scenario)

    @pytest.mark.parametrize("subset", [(0, 1, 2), (0, 0, 1, 2, 3, 4), (0, 1, 2, 3, 4, 17)])
    def test_bad_subset(self, subset):
        with pytest.raises(ConfigurationError):
            validate_subset(subset)

    def test_default_subset_has_no_anchor_pair(self):
        assert not has_anchor_pair(DEFAULT_SUBSET)

    def test_teacher_model_picks_private_cost(self, teacher_run, worked_scenario):
        model = teacher_run[2]
        out = axis_agent(model, DEFAULT_SUBSET, worked_scenario)
        assert {0, 3, 12} <= set(out.indices)
        assert 1 <= len(out.indices) <= 6
        assert axis_agent(model, DEFAULT_SUBSET, worked_scenario) == out

    def test_layer_sizes_constant(self):
        assert LAYER_SIZES == (7, 8, 7, 6)
