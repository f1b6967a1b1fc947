"""Hidden-state analysis of the basic cell and consistency sweeps.

The wing inputs of the cell act like measurement settings: which hidden
states survive depends counterfactually on them, and one wing's admissible
outputs depend on the other wing's setting. Both dependencies are computed
here as exact set differences over exhaustive solution sets, along with the
symmetry-class reduction of the 27 input triples to 4 and the exhaustive
check that no choice of inputs ever strands a chain without a completion.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .model import (
    ALL_PERMUTATIONS,
    FLAVORS,
    HiddenState,
    Permutation,
    production_completions,
)
from .solver import Assignment, complete, has_completion
from .structure import Scenario, build_chain, build_h_cell, intervention_edges


class InputTriple(NamedTuple):
    """The three past-side choices of the basic cell: left, center, right."""

    left: str
    center: str
    right: str

    def label(self) -> str:
        return f"{self.left}_{self.center}_{self.right}"

    @staticmethod
    def from_label(label: str) -> "InputTriple":
        parts = label.split("_")
        if len(parts) != 3 or any(p not in FLAVORS for p in parts):
            raise ValueError(f"not an input triple label: {label!r}")
        return InputTriple(*parts)


ALL_INPUT_TRIPLES: tuple[InputTriple, ...] = tuple(
    InputTriple(*combo) for combo in itertools.product(FLAVORS, repeat=3)
)


class Transform(NamedTuple):
    """A flavor relabeling plus an optional left/right swap."""

    permutation: Permutation
    reflected: bool


class RetroWitness(NamedTuple):
    """A wing-input change that alters the admissible hidden states."""

    base: InputTriple
    changed_input: str
    new_value: str
    lost_hidden: frozenset[HiddenState]
    gained_hidden: frozenset[HiddenState]


class NonlocalWitness(NamedTuple):
    """A wing-input change that alters the far wing's admissible outputs."""

    base: InputTriple
    changed_input: str
    new_value: str
    remote_edge: str
    old_outputs: frozenset[str]
    new_outputs: frozenset[str]


@dataclass
class StateTable:
    """Allowed hidden states per canonical input class; 4 rows, 3 columns."""

    columns: tuple[HiddenState, ...]
    rows: dict[InputTriple, dict[HiddenState, bool]]


@dataclass
class ConsistencyReport:
    """Outcome of an exhaustive all-inputs completability check."""

    family: str
    max_cells: Optional[int]
    checked: int
    counterexample: Optional[tuple[Scenario, Assignment]]


_CELL = build_h_cell()


def apply_transform(t: InputTriple, transform: Transform) -> InputTriple:
    """Relabel flavors, then swap wings if reflected (the two commute)."""
    p = transform.permutation
    mapped = InputTriple(p[t.left], p[t.center], p[t.right])
    if transform.reflected:
        mapped = InputTriple(mapped.right, mapped.center, mapped.left)
    return mapped


def reflect_triple(t: InputTriple) -> InputTriple:
    return InputTriple(t.right, t.center, t.left)


def hidden_state_set(t: InputTriple) -> set[HiddenState]:
    """Hidden (left, right) pairs admissible under the given inputs."""
    result = complete(_CELL.structure, {"l_in": t.left, "c_in": t.center, "r_in": t.right})
    return {(a["h_left"], a["h_right"]) for a in result.solutions}


def canonicalize_inputs(t: InputTriple) -> tuple[InputTriple, Transform]:
    """Normal form of a triple under flavor relabeling and wing reflection.

    The canonical representative has center A and the lexicographically
    least (left, right) among all images with center A. Returns the
    representative and one transform realizing it.
    """
    best: Optional[tuple[InputTriple, Transform]] = None
    for p in ALL_PERMUTATIONS:
        if p[t.center] != "A":
            continue
        for reflected in (False, True):
            transform = Transform(p, reflected)
            image = apply_transform(t, transform)
            if best is None or (image.left, image.right) < (best[0].left, best[0].right):
                best = (image, transform)
    assert best is not None
    return best


def input_classes() -> list[InputTriple]:
    """The distinct canonical forms over all 27 triples, sorted."""
    return sorted({canonicalize_inputs(t)[0] for t in ALL_INPUT_TRIPLES})


def state_table() -> StateTable:
    """Allowed hidden states for each canonical input class.

    Columns are the three hidden states compatible with center input A,
    in canonical order.
    """
    columns = tuple(production_completions("A"))
    rows = {}
    for t in input_classes():
        allowed = hidden_state_set(t)
        rows[t] = {h: h in allowed for h in columns}
    return StateTable(columns, rows)


def retro_witnesses() -> list[RetroWitness]:
    """Every single wing-input change that alters the hidden-state set.

    Ordered lexicographically by (base triple, changed side, new value).
    """
    witnesses = []
    for base in ALL_INPUT_TRIPLES:
        base_set = hidden_state_set(base)
        for side in ("left", "right"):
            for new_value in FLAVORS:
                if new_value == getattr(base, side):
                    continue
                varied_set = hidden_state_set(base._replace(**{side: new_value}))
                if varied_set != base_set:
                    witnesses.append(
                        RetroWitness(
                            base,
                            side,
                            new_value,
                            frozenset(base_set - varied_set),
                            frozenset(varied_set - base_set),
                        )
                    )
    return witnesses


def _output_set(t: InputTriple, edge: str) -> frozenset[str]:
    result = complete(_CELL.structure, {"l_in": t.left, "c_in": t.center, "r_in": t.right})
    return frozenset(a[edge] for a in result.solutions)


def nonlocality_witnesses() -> list[NonlocalWitness]:
    """Every single wing-input change that alters the far wing's admissible
    output flavors. Same canonical ordering as the retro list."""
    witnesses = []
    for base in ALL_INPUT_TRIPLES:
        for side, remote in (("left", "r_out"), ("right", "l_out")):
            old = _output_set(base, remote)
            for new_value in FLAVORS:
                if new_value == getattr(base, side):
                    continue
                new = _output_set(base._replace(**{side: new_value}), remote)
                if new != old:
                    witnesses.append(NonlocalWitness(base, side, new_value, remote, old, new))
    return witnesses


def _sweep_inputs(scenario: Scenario):
    edges = intervention_edges(scenario)
    for combo in itertools.product(FLAVORS, repeat=len(edges)):
        yield dict(zip(edges, combo))


def check_all_inputs(scenario: Scenario, family: str = "scenario") -> ConsistencyReport:
    """Verify every total intervention assignment admits a completion."""
    checked = 0
    for inputs in _sweep_inputs(scenario):
        checked += 1
        if not has_completion(scenario.structure, inputs):
            return ConsistencyReport(family, None, checked, (scenario, inputs))
    return ConsistencyReport(family, None, checked, None)


def consistency_sweep(max_cells: int) -> ConsistencyReport:
    """Exhaustively check chains of 1..max_cells cells for input choices
    with no admissible completion.

    Inputs are visited in canonical order (cells ascending, then edge-wise
    lexicographic), so a reported counterexample is the least one.
    """
    if max_cells < 1:
        raise ValueError(f"max_cells must be at least 1, got {max_cells}")
    checked = 0
    for k in range(1, max_cells + 1):
        scenario = build_chain(k)
        for inputs in _sweep_inputs(scenario):
            checked += 1
            if not has_completion(scenario.structure, inputs):
                return ConsistencyReport("chain", max_cells, checked, (scenario, inputs))
    return ConsistencyReport("chain", max_cells, checked, None)
