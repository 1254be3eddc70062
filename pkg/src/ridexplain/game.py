"""Disclosure signaling game over the price of an alternative.

Nature draws ``x`` from a discrete prior on ``[min, max]``. The sender
(agent) either says ``x`` or stays quiet; it cannot lie. The receiver
(passenger) then names an estimate ``a2``. Payoffs are ``a2`` for the
sender and ``-(a2 - x)**2`` for the receiver.

A stated price is believed outright, so the only strategic choice of the
receiver is the answer to silence, and only the sender's reveal
probabilities matter. The unique equilibrium has the sender reveal every
``x > min`` and the receiver answer ``min`` to silence.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import InputError, ParseError
from .roadnet import read_csv_rows

TOL = 1e-9
PROB_SUM_TOL = 1e-12


@dataclass(frozen=True)
class DiscreteDistribution:
    support: tuple[float, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        if len(self.support) != len(self.probs):
            raise InputError("support and probs differ in length")
        if not self.support:
            raise InputError("distribution needs a non-empty support")
        if any(b <= a for a, b in zip(self.support, self.support[1:])):
            raise InputError("support must be strictly ascending")
        if any(not (p > 0) for p in self.probs):
            raise InputError("probabilities must be strictly positive")
        if abs(math.fsum(self.probs) - 1.0) > PROB_SUM_TOL:
            raise InputError(f"probabilities sum to {math.fsum(self.probs)}, not 1")

    @classmethod
    def from_pairs(cls, values: Sequence[float], probs: Sequence[float],
                   normalize: bool = False) -> "DiscreteDistribution":
        """Sort, merge duplicate values, drop zero-mass points."""
        mass: dict[float, list[float]] = {}
        for v, p in zip(values, probs):
            if p < 0 or not math.isfinite(p) or not math.isfinite(v):
                raise InputError(f"invalid point ({v}, {p})")
            mass.setdefault(float(v), []).append(float(p))
        merged = [(v, math.fsum(ps)) for v, ps in sorted(mass.items())]
        merged = [(v, p) for v, p in merged if p > 0]
        if not merged:
            raise InputError("distribution has no positive mass")
        support = tuple(v for v, _ in merged)
        ps = [p for _, p in merged]
        if normalize:
            total = math.fsum(ps)
            ps = [p / total for p in ps]
        return cls(support, tuple(ps))

    @classmethod
    def point(cls, v: float) -> "DiscreteDistribution":
        return cls((float(v),), (1.0,))

    @property
    def min(self) -> float:
        return self.support[0]

    @property
    def max(self) -> float:
        return self.support[-1]

    def mean(self) -> float:
        return math.fsum(p * x for x, p in zip(self.support, self.probs))

    def variance(self) -> float:
        m = self.mean()
        return math.fsum(p * (x - m) ** 2 for x, p in zip(self.support, self.probs))

    def conditional(self, keep) -> "DiscreteDistribution | None":
        pts = [(x, p) for x, p in zip(self.support, self.probs) if keep(x)]
        if not pts:
            return None
        total = math.fsum(p for _, p in pts)
        return DiscreteDistribution.from_pairs([x for x, _ in pts], [p / total for _, p in pts])


Belief = DiscreteDistribution


@dataclass(frozen=True)
class SenderStrategy:
    """Probability of saying ``x`` (rather than staying quiet) for each ``x``."""

    reveal_prob: Mapping[float, float] = field(hash=False)

    def __post_init__(self):
        for x, r in self.reveal_prob.items():
            if not 0.0 <= r <= 1.0:
                raise InputError(f"reveal probability for {x} is {r}, outside [0, 1]")

    def at(self, x: float) -> float:
        try:
            return self.reveal_prob[x]
        except KeyError:
            raise InputError(f"sender strategy does not cover state {x}") from None

    @classmethod
    def threshold(cls, prior: DiscreteDistribution, above: float) -> "SenderStrategy":
        return cls({x: 1.0 if x > above else 0.0 for x in prior.support})

    @classmethod
    def constant(cls, prior: DiscreteDistribution, r: float) -> "SenderStrategy":
        return cls({x: r for x in prior.support})


@dataclass(frozen=True)
class ReceiverStrategy:
    on_quiet: float
    echoes_messages: bool = True

    def respond(self, message: float | None) -> float:
        return self.on_quiet if message is None else message


@dataclass(frozen=True)
class PBEResult:
    sender: SenderStrategy
    receiver: ReceiverStrategy
    quiet_belief: Belief
    sender_indifferent_at_min: bool = True


@dataclass
class Verdict:
    ok: bool
    failures: list[tuple[int, str]] = field(default_factory=list)

    def __bool__(self):
        return self.ok


def receiver_best_response(belief: Belief) -> float:
    """Estimate maximising ``E[-(a - Y)**2]``, i.e. the belief mean."""
    return belief.mean()


def compute_pbe(prior: DiscreteDistribution) -> PBEResult:
    """The equilibrium of the disclosure game.

    The sender is indifferent at ``min``; this picks silence there, which
    keeps the quiet message on path.
    """
    lo = prior.min
    sender = SenderStrategy({x: 0.0 if x == lo else 1.0 for x in prior.support})
    return PBEResult(sender, ReceiverStrategy(lo), DiscreteDistribution.point(lo), True)


def quiet_posterior(prior: DiscreteDistribution, sender: SenderStrategy) -> Belief | None:
    """Bayes posterior after silence, or ``None`` when silence has zero probability."""
    w = [p * (1.0 - sender.at(x)) for x, p in zip(prior.support, prior.probs)]
    total = math.fsum(w)
    if total <= 0:
        return None
    pts = [(x, wi / total) for x, wi in zip(prior.support, w) if wi > 0]
    return DiscreteDistribution.from_pairs([x for x, _ in pts], [p for _, p in pts], normalize=True)


def total_variation(a: DiscreteDistribution, b: DiscreteDistribution) -> float:
    pa = dict(zip(a.support, a.probs))
    pb = dict(zip(b.support, b.probs))
    return 0.5 * math.fsum(abs(pa.get(x, 0.0) - pb.get(x, 0.0)) for x in set(pa) | set(pb))


def verify_pbe(prior: DiscreteDistribution, sender: SenderStrategy, receiver: ReceiverStrategy,
               quiet_belief: Belief, tol: float = TOL) -> Verdict:
    """Check the three equilibrium conditions; failures carry the condition number."""
    failures: list[tuple[int, str]] = []
    q = receiver.on_quiet

    for x in prior.support:
        r = sender.at(x)
        got = r * x + (1.0 - r) * q
        best = max(x, q)
        if best - got > tol:
            action = "quiet" if x < q else "reveal"
            failures.append((1, f"sender at x={x!r} earns {got!r} but {action} yields {best!r}"))

    if not receiver.echoes_messages:
        failures.append((2, "receiver does not take stated prices at face value"))
    if not prior.min - tol <= q <= prior.max + tol:
        failures.append((2, f"quiet response {q!r} outside [{prior.min!r}, {prior.max!r}]"))
    expected = receiver_best_response(quiet_belief)
    if abs(q - expected) > tol:
        failures.append((2, f"quiet response {q!r} differs from belief mean {expected!r}"))

    posterior = quiet_posterior(prior, sender)
    if posterior is not None:
        tv = total_variation(posterior, quiet_belief)
        if tv > tol:
            failures.append((3, f"quiet belief is {tv:.3g} in total variation from the Bayes posterior"))

    return Verdict(not failures, failures)


def unravel(prior: DiscreteDistribution, max_iters: int = 10_000) -> list[float]:
    """Successive answers to silence as the sender reveals everything above the last one.

    A sender at exactly ``c`` is indifferent and reveals.
    """
    seq = [prior.mean()]
    for _ in range(max_iters):
        c = seq[-1]
        hidden = prior.conditional(lambda x: x < c)
        if hidden is None or hidden.support == (prior.min,):
            nxt = prior.min
        else:
            nxt = hidden.mean()
        if nxt == c:
            break
        seq.append(nxt)
    return seq


def expected_utilities(prior: DiscreteDistribution, sender: SenderStrategy,
                       receiver: ReceiverStrategy) -> tuple[float, float]:
    q = receiver.on_quiet
    u1 = math.fsum(p * (sender.at(x) * x + (1.0 - sender.at(x)) * q)
                   for x, p in zip(prior.support, prior.probs))
    u2 = 0.0 - math.fsum(p * (1.0 - sender.at(x)) * (q - x) ** 2
                    for x, p in zip(prior.support, prior.probs))
    return u1, u2


def simulate_threshold(prior: DiscreteDistribution, reveal_above: float):
    """Threshold sender against the receiver whose silence answer is Bayes-consistent."""
    sender = SenderStrategy.threshold(prior, reveal_above)
    post = quiet_posterior(prior, sender)
    # off-path silence: the equilibrium belief (point mass at min)
    on_quiet = prior.min if post is None else receiver_best_response(post)
    receiver = ReceiverStrategy(on_quiet)
    return sender, receiver, expected_utilities(prior, sender, receiver)


def random_prior(rng: np.random.Generator, max_support: int = 10,
                 low: float = 0.0, high: float = 100.0) -> DiscreteDistribution:
    size = int(rng.integers(1, max_support + 1))
    values = np.unique(np.round(rng.uniform(low, high, size), 6))
    weights = rng.uniform(0.05, 1.0, len(values))
    return DiscreteDistribution.from_pairs(values.tolist(), (weights / weights.sum()).tolist(),
                                           normalize=True)


def load_prior(path) -> DiscreteDistribution:
    values, probs = [], []
    for line, (v, p) in read_csv_rows(path, ["value", "prob"]):
        try:
            values.append(float(v))
            probs.append(float(p))
        except ValueError as exc:
            raise ParseError(f"bad prior row: {exc}", line=line) from exc
    try:
        return DiscreteDistribution.from_pairs(values, probs)
    except InputError as exc:
        raise ParseError(f"{path}: {exc}") from exc
