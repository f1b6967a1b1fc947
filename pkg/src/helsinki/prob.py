"""Uniform measure over admissible completions, and what it buys.

The base rules assign no probabilities; the minimal symmetric choice is
the uniform distribution over all admissible completions of the chosen
inputs, and every number downstream (marginals, signalling scores,
epistemic weights) is relative to that choice. All arithmetic is exact
rational; distributions serialize as strings like "1/3", never floats.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .analysis import InputTriple, hidden_state_set
from .model import FLAVORS, HiddenState, production_completions
from .solver import Assignment, complete
from .structure import INTERVENTION, OBSERVATION, Scenario, intervention_edges


class EmptySupportError(Exception):
    """The requested inputs admit no completion at all."""


@dataclass
class CompletionDistribution:
    """Uniform distribution over the admissible completions of some inputs."""

    support: list[tuple[Assignment, Fraction]]


def completion_distribution(scenario: Scenario, inputs: Assignment) -> CompletionDistribution:
    """Uniform distribution over completions of `inputs`.

    `inputs` must cover every intervention edge; it may additionally pin
    hidden or output edges, which conditions the distribution on them.
    """
    missing = [e for e in intervention_edges(scenario) if e not in inputs]
    if missing:
        raise ValueError(f"inputs must cover every intervention edge; missing: {', '.join(missing)}")
    result = complete(scenario.structure, inputs)
    if not result.solutions:
        raise EmptySupportError(f"no admissible completion for inputs {dict(sorted(inputs.items()))}")
    weight = Fraction(1, len(result.solutions))
    return CompletionDistribution([(a, weight) for a in result.solutions])


def marginal(dist: CompletionDistribution, edge: str) -> dict[str, Fraction]:
    """Pushforward of the distribution to the flavor at one edge."""
    if not dist.support or edge not in dist.support[0][0]:
        raise ValueError(f"unknown edge {edge!r}")
    out = {f: Fraction(0) for f in FLAVORS}
    for assignment, p in dist.support:
        out[assignment[edge]] += p
    return out


def total_variation(d1: dict[str, Fraction], d2: dict[str, Fraction]) -> Fraction:
    return sum((abs(d1[f] - d2[f]) for f in FLAVORS), Fraction(0)) / 2


def signalling_score(
    scenario: Scenario, target: str, remote: str, context: Assignment
) -> Fraction:
    """How much the target marginal can move when only `remote` changes.

    Maximum total-variation distance between the target's marginals over
    the possible remote values, with every other intervention pinned by
    `context`. Zero exactly when the target's statistics ignore the remote
    setting.
    """
    if scenario.roles.get(remote) != INTERVENTION:
        raise ValueError(f"remote edge {remote!r} is not an intervention edge")
    if scenario.roles.get(target) != OBSERVATION:
        raise ValueError(f"target edge {target!r} is not an observation edge")
    expected = [e for e in intervention_edges(scenario) if e != remote]
    if sorted(context) != expected:
        raise ValueError(f"context must assign exactly {', '.join(expected)}")

    marginals = {}
    for value in FLAVORS:
        try:
            dist = completion_distribution(scenario, {**context, remote: value})
        except EmptySupportError as exc:
            raise EmptySupportError(f"remote value {value}: {exc}") from exc
        marginals[value] = marginal(dist, target)
    return max(
        total_variation(marginals[v1], marginals[v2])
        for v1, v2 in itertools.combinations(FLAVORS, 2)
    )


def epistemic_state(
    center_in: str, known: Optional[dict[str, str]] = None
) -> dict[HiddenState, Fraction]:
    """Weight of each hidden state before the wing settings are fixed.

    For each hidden state compatible with the center input, the weight is
    the fraction of wing-setting pairs consistent with `known` (9, 3, or 1
    of them, uniformly weighted) under which that hidden state is
    admissible. `known` may pin "l_in" and/or "r_in".
    """
    known = dict(known or {})
    extra = sorted(set(known) - {"l_in", "r_in"})
    if extra:
        raise ValueError(f"known settings may only pin l_in and r_in, got: {', '.join(extra)}")
    for edge, value in known.items():
        if value not in FLAVORS:
            raise ValueError(f"known[{edge!r}]: unknown flavor {value!r}")

    left_options = [known["l_in"]] if "l_in" in known else list(FLAVORS)
    right_options = [known["r_in"]] if "r_in" in known else list(FLAVORS)
    pairs = [(l, r) for l in left_options for r in right_options]

    weights = {}
    for hidden in production_completions(center_in):
        admitting = sum(
            1 for l, r in pairs if hidden in hidden_state_set(InputTriple(l, center_in, r))
        )
        weights[hidden] = Fraction(admitting, len(pairs))
    return weights
