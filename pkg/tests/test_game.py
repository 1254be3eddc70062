import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import grid_argmax_quadratic
from ridexplain.errors import InputError, ParseError
from ridexplain.game import (DiscreteDistribution, ReceiverStrategy, SenderStrategy, compute_pbe,
                             expected_utilities, load_prior, quiet_posterior, random_prior,
                             receiver_best_response, simulate_threshold, unravel, verify_pbe)

UNIFORM3 = DiscreteDistribution.from_pairs([1, 2, 3], [1, 1, 1], normalize=True)


def check(prior, res):
    return verify_pbe(prior, res.sender, res.receiver, res.quiet_belief)


class TestDistribution:
    def test_merge_and_sort(self):
        d = DiscreteDistribution.from_pairs([3, 1, 3], [0.25, 0.5, 0.25])
        assert d.support == (1.0, 3.0) and d.probs == (0.5, 0.5)

    def test_zero_mass_dropped(self):
        assert DiscreteDistribution.from_pairs([1, 2], [1.0, 0.0]).support == (1.0,)

    @pytest.mark.parametrize("vals,probs", [([1, 2], [0.5, 0.4]), ([1], [-1.0]), ([], [])])
    def test_rejects(self, vals, probs):
        with pytest.raises(InputError):
            DiscreteDistribution.from_pairs(vals, probs)

    def test_moments(self):
        assert UNIFORM3.mean() == 2.0
        assert UNIFORM3.variance() == pytest.approx(2 / 3)


class TestBestResponse:
    def test_point_mass(self):
        assert receiver_best_response(DiscreteDistribution.point(4.2)) == 4.2

    def test_two_point(self):
        assert receiver_best_response(DiscreteDistribution.from_pairs([0, 10], [0.5, 0.5])) == 5.0

    def test_grid_oracle(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            b = random_prior(rng, 6, 0.0, 5.0)
            assert abs(receiver_best_response(b) - grid_argmax_quadratic(b.support, b.probs)) <= 1e-4


class TestPBE:
    def test_uniform(self):
        res = compute_pbe(UNIFORM3)
        assert res.receiver.on_quiet == 1.0
        assert [res.sender.at(x) for x in (1, 2, 3)] == [0.0, 1.0, 1.0]
        assert check(UNIFORM3, res)

    def test_single_point(self):
        prior = DiscreteDistribution.point(5.0)
        res = compute_pbe(prior)
        assert res.receiver.on_quiet == 5.0
        assert check(prior, res)

    def test_quiet_above_min_fails(self):
        res = compute_pbe(UNIFORM3)
        v = verify_pbe(UNIFORM3, res.sender, ReceiverStrategy(2.0), res.quiet_belief)
        assert not v
        assert 2 in {c for c, _ in v.failures}

    def test_hiding_max_fails(self):
        sender = SenderStrategy({1.0: 0.0, 2.0: 1.0, 3.0: 0.0})
        post = quiet_posterior(UNIFORM3, sender)
        v = verify_pbe(UNIFORM3, sender, ReceiverStrategy(post.mean()), post)
        assert not v and any(c == 1 for c, _ in v.failures)

    def test_inconsistent_belief_fails(self):
        res = compute_pbe(UNIFORM3)
        v = verify_pbe(UNIFORM3, res.sender, res.receiver, DiscreteDistribution.point(3.0))
        assert {c for c, _ in v.failures} >= {2, 3}

    def test_revealing_at_min_also_equilibrium(self):
        # indifference at min: full revelation with the off-path belief at min
        sender = SenderStrategy.constant(UNIFORM3, 1.0)
        assert verify_pbe(UNIFORM3, sender, ReceiverStrategy(1.0), DiscreteDistribution.point(1.0))

    def test_random_priors(self):
        rng = np.random.default_rng(11)
        for _ in range(40):
            prior = random_prior(rng)
            assert check(prior, compute_pbe(prior))


class TestUnravel:
    def test_uniform(self):
        assert unravel(UNIFORM3) == [2.0, 1.0]

    def test_point_mass(self):
        assert unravel(DiscreteDistribution.point(7.0)) == [7.0]

    def test_iteration_bound(self):
        rng = np.random.default_rng(5)
        for _ in range(40):
            prior = random_prior(rng)
            seq = unravel(prior)
            assert seq[-1] == prior.min
            assert len(seq) - 1 <= len(prior.support)
            assert all(b < a for a, b in zip(seq, seq[1:]))

    def test_geometric_steps(self):
        prior = DiscreteDistribution.from_pairs([1, 2, 3, 4], [0.25] * 4)
        assert unravel(prior) == [2.5, 1.5, 1.0]


class TestUtilities:
    def test_always_reveal(self):
        u1, u2 = expected_utilities(UNIFORM3, SenderStrategy.constant(UNIFORM3, 1.0),
                                    ReceiverStrategy(1.0))
        assert (u1, u2) == (2.0, 0.0)

    def test_always_quiet(self):
        u1, u2 = expected_utilities(UNIFORM3, SenderStrategy.constant(UNIFORM3, 0.0),
                                    ReceiverStrategy(UNIFORM3.mean()))
        assert u1 == 2.0
        assert u2 == pytest.approx(-UNIFORM3.variance(), abs=1e-15)

    def test_pbe_payoffs(self):
        res = compute_pbe(UNIFORM3)
        assert expected_utilities(UNIFORM3, res.sender, res.receiver) == (2.0, 0.0)

    def test_simulate_threshold(self):
        sender, receiver, (u1, u2) = simulate_threshold(UNIFORM3, 2.0)
        assert receiver.on_quiet == 1.5
        assert u1 == pytest.approx(2.0)
        assert u2 == pytest.approx(-1 / 6)


@given(vals=st.lists(st.integers(-50, 50), min_size=1, max_size=8, unique=True),
       a=st.sampled_from([0.5, 2.0, 4.0]), b=st.integers(-20, 20))
def test_affine_rescaling(vals, a, b):
    prior = DiscreteDistribution.from_pairs(vals, [1.0] * len(vals), normalize=True)
    moved = DiscreteDistribution.from_pairs([a * v + b for v in vals], list(prior.probs))
    res, res2 = compute_pbe(prior), compute_pbe(moved)
    assert res2.receiver.on_quiet == pytest.approx(a * res.receiver.on_quiet + b)
    assert check(moved, res2)
    assert unravel(moved)[-1] == pytest.approx(a * unravel(prior)[-1] + b)


def test_load_prior(tmp_path):
    (tmp_path / "p.csv").write_text("value,prob\n3,0.5\n1,0.5\n")
    assert load_prior(tmp_path / "p.csv").support == (1.0, 3.0)
    (tmp_path / "q.csv").write_text("value,prob\n3,0.5\n1,0.3\n")
    with pytest.raises(ParseError):
        load_prior(tmp_path / "q.csv")
