"""The three explanation-selection agents: full disclosure, random, and learned."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, InputError
from .explanations import (CO2_INDEX, N_DESCRIPTORS, ExplanationDescriptor, RenderedExplanation,
                           Scenario, extract_features, format_minutes, format_money,
                           load_templates, render)
from .mlp import MLPModel, forward

#: private-cost abs (shared side), private-cost % (alternative side), private-time abs
#: (shared side), public-time abs (shared side), public-cost % (alternative side), CO2
DEFAULT_SUBSET: tuple[int, ...] = (0, 3, 4, 12, 11, CO2_INDEX)
ALL_DESCRIPTORS: tuple[int, ...] = tuple(range(N_DESCRIPTORS))
SELECTION_THRESHOLD = 0.5


@dataclass(frozen=True)
class AgentOutput:
    agent_name: str
    scenario_id: int
    disclosures: tuple[str, ...] = ()
    selected: tuple[RenderedExplanation, ...] = ()
    probabilities: tuple[float, ...] = field(default=(), compare=False)

    @property
    def texts(self) -> tuple[str, ...]:
        return self.disclosures or tuple(r.text for r in self.selected)

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(r.descriptor.index for r in self.selected)

    def to_dict(self) -> dict:
        d = {"agent": self.agent_name, "scenario_id": self.scenario_id, "texts": list(self.texts)}
        if self.selected:
            d["indices"] = list(self.indices)
        if self.probabilities:
            d["probabilities"] = list(self.probabilities)
        return d


def validate_subset(subset: Sequence[int]) -> tuple[int, ...]:
    subset = tuple(int(i) for i in subset)
    if len(subset) != 6 or len(set(subset)) != 6:
        raise ConfigurationError(f"selection subset needs 6 distinct indices, got {subset}")
    if any(not 0 <= i < N_DESCRIPTORS for i in subset):
        raise ConfigurationError(f"selection subset indices must lie in 0..16, got {subset}")
    return subset


def pbe_agent(s: Scenario, templates: dict | None = None) -> AgentOutput:
    """Disclose every alternative fact: private and public cost and time."""
    t = (templates or load_templates())["disclosures"]
    q = s.quote
    lines = (
        t["private"].format(cost=format_money(q.private_cost_usd),
                            minutes=format_minutes(q.private_time_min)),
        t["public"].format(cost=format_money(q.public_cost_usd),
                           minutes=format_minutes(q.public_time_min)),
    )
    return AgentOutput("pbe", s.scenario_id, disclosures=lines)


def random_selection(rng: np.random.Generator, pool: Sequence[int]) -> list[int]:
    """Pick 1..4 descriptors uniformly, never two that differ only by anchor.

    Walking a uniform permutation and skipping conflicts is the same as
    drawing without replacement and redrawing conflicting candidates.
    """
    if not pool:
        raise InputError("random agent needs a non-empty pool")
    k = int(rng.integers(1, 5))
    chosen: list[int] = []
    blocked: set[int] = set()
    for i in rng.permutation(np.asarray(pool)):
        i = int(i)
        if i in blocked or i in chosen:
            continue
        chosen.append(i)
        sib = ExplanationDescriptor.from_index(i).anchor_sibling()
        if sib is not None:
            blocked.add(sib)
        if len(chosen) == k:
            break
    return sorted(chosen)


def random_agent(s: Scenario, seed: int, pool: Sequence[int] = ALL_DESCRIPTORS,
                 templates: dict | None = None) -> AgentOutput:
    rng = np.random.default_rng([seed, s.scenario_id])
    picks = random_selection(rng, pool)
    rendered = tuple(render(ExplanationDescriptor.from_index(i), s, templates) for i in picks)
    return AgentOutput("random", s.scenario_id, selected=rendered)


def axis_select(probs: np.ndarray) -> list[int]:
    """Positions with probability >= 0.5, else the single most likely one."""
    picked = [k for k, p in enumerate(probs) if p >= SELECTION_THRESHOLD]
    return picked or [int(np.argmax(probs))]


def axis_agent(model: MLPModel, subset: Sequence[int], s: Scenario,
               templates: dict | None = None) -> AgentOutput:
    subset = validate_subset(subset)
    if model.n_inputs != 7 or model.n_outputs != len(subset):
        raise ConfigurationError(
            f"model maps {model.n_inputs} -> {model.n_outputs}; need 7 -> {len(subset)}")
    probs = forward(model, extract_features(s))
    rendered = tuple(render(ExplanationDescriptor.from_index(subset[k]), s, templates)
                     for k in axis_select(probs))
    return AgentOutput("axis", s.scenario_id, selected=rendered,
                       probabilities=tuple(float(p) for p in probs))
