"""Local rules of the Helsinki flavor model.

Edges carry one of three symbolic flavors. A node joins exactly three
edges and is admissible only when strictly homogeneous (all three flavors
equal) or strictly inhomogeneous (all three distinct). Production nodes
split one edge into two, annihilation nodes merge two edges into one.

Everything in this module is a pure function over immutable values; the
fixed flavor order A < B < C is used for all deterministic output ordering.
"""

from __future__ import annotations

import itertools
from typing import Iterable

Flavor = str
HiddenState = tuple[str, str]
Permutation = dict[str, str]

FLAVORS: tuple[str, ...] = ("A", "B", "C")

PRODUCTION = "production"
ANNIHILATION = "annihilation"
NODE_KINDS = (PRODUCTION, ANNIHILATION)


def check_flavor(value: str) -> str:
    """Return `value` if it is a flavor, raise ValueError otherwise."""
    if value not in FLAVORS:
        raise ValueError(f"unknown flavor {value!r}; expected one of {', '.join(FLAVORS)}")
    return value


def node_admissible(flavors: Iterable[Flavor]) -> bool:
    """True when three incident flavors are all equal or all distinct."""
    items = tuple(flavors)
    if len(items) != 3:
        raise ValueError(f"a node joins exactly 3 edges, got {len(items)} flavors")
    return len(set(items)) in (1, 3)


def annihilation_output(in1: Flavor, in2: Flavor) -> Flavor:
    """The unique flavor completing an admissible node with the two inputs.

    Symmetric in its arguments: equal inputs return themselves, distinct
    inputs return the remaining third flavor.
    """
    if in1 == in2:
        return in1
    (third,) = set(FLAVORS) - {in1, in2}
    return third


def production_completions(value: Flavor) -> list[tuple[Flavor, Flavor]]:
    """All admissible (left, right) output pairs for a production input.

    Exactly three ordered pairs, sorted by (left, right) under A < B < C:
    the homogeneous pair plus both orderings of the two remaining flavors.
    Output order is semantically meaningful; (B, C) and (C, B) are
    different hidden states downstream.
    """
    others = [f for f in FLAVORS if f != value]
    return sorted([(value, value), (others[0], others[1]), (others[1], others[0])])


# --- flavor permutations (the symmetry group of the rules) ---

IDENTITY: Permutation = {f: f for f in FLAVORS}

ALL_PERMUTATIONS: tuple[Permutation, ...] = tuple(
    dict(zip(FLAVORS, images)) for images in itertools.permutations(FLAVORS)
)


def permutation_from_string(images: str) -> Permutation:
    """Build a flavor bijection from the images of A, B, C in order.

    "BCA" means A->B, B->C, C->A.
    """
    if len(images) != 3 or set(images) != set(FLAVORS):
        raise ValueError(f"not a flavor bijection: {images!r}")
    return dict(zip(FLAVORS, images))


def permutation_to_string(p: Permutation) -> str:
    return "".join(p[f] for f in FLAVORS)


def compose(p: Permutation, q: Permutation) -> Permutation:
    """The bijection applying q first, then p."""
    return {f: p[q[f]] for f in FLAVORS}


def invert(p: Permutation) -> Permutation:
    return {image: f for f, image in p.items()}


def apply_permutation(p: Permutation, assignment: dict[str, Flavor]) -> dict[str, Flavor]:
    """Relabel every assigned flavor through the bijection p; keys unchanged."""
    return {edge: p[value] for edge, value in assignment.items()}
