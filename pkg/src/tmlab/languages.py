"""Bounded-halting deciders, reference acceptors, and the non-halting pool.

``decide_bhp`` answers whether a machine has an accepting run on an input
within a step bound, returning a replayable branch-choice witness when it
does.  The reference acceptors wrap the deciders behind the instrumented
reader and accept exactly the complements: an instance is accepted when no
accepting run exists within its bound.

The pool is a curated list of machine/input pairs that provably never
accept, each carrying a machine-checkable proof tag.  Arbitrary non-halting
proofs are undecidable in general; these three tags are the honest subset
the toolkit can revalidate from scratch.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Callable

from .acceptor_runtime import PAST_END, Acceptor, Outcome, RunContext
from .tm_core import (
    Configuration,
    Instance,
    Machine,
    MalformedEncoding,
    Path,
    decode_instance,
    is_accepting,
    machine_from_json,
    machine_to_json,
    start_configuration,
    step_successors,
)


class BudgetExceeded(Exception):
    """The pruned search still outgrew its configuration budget."""


class NotDeterministic(Exception):
    """A deterministic-only operation was given a branching machine."""


class InvalidPair(Exception):
    """A pool pair's non-acceptance proof failed revalidation."""


def decide_bhp(
    inst: Instance, budget: int, tick: Callable[[], None] | None = None
) -> Path | None:
    """Branch-choice witness of length <= bound, or None if there is none.

    Breadth-first over the configuration tree with first-seen duplicate
    pruning, so memory is bounded by distinct configurations and the
    returned witness is deterministic.  ``tick`` is called once per explored
    configuration (used by acceptors to charge their work).

    Raises BudgetExceeded when more than ``budget`` configurations would be
    explored.  That signals desk-scale overflow, never a wrong answer.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    m = inst.machine
    start = start_configuration(inst.input)
    explored = 1
    if tick is not None:
        tick()
    if is_accepting(m, start):
        return ()
    # nodes[i] = (configuration, parent index, branch taken to get here)
    nodes: list[tuple[Configuration, int, int]] = [(start, -1, -1)]
    seen = {start.key()}
    frontier = [0]
    for _depth in range(inst.bound):
        next_frontier: list[int] = []
        for idx in frontier:
            conf = nodes[idx][0]
            for branch, succ in enumerate(step_successors(m, conf)):
                key = succ.key()
                if key in seen:
                    continue
                seen.add(key)
                explored += 1
                if explored > budget:
                    raise BudgetExceeded(
                        f"more than {budget} configurations at depth {succ.steps_taken}"
                    )
                if tick is not None:
                    tick()
                nodes.append((succ, idx, branch))
                if is_accepting(m, succ):
                    choices: list[int] = []
                    node = len(nodes) - 1
                    while node > 0:
                        _, parent, br = nodes[node]
                        choices.append(br)
                        node = parent
                    return tuple(reversed(choices))
                next_frontier.append(len(nodes) - 1)
        if not next_frontier:
            break
        frontier = next_frontier
    return None


def decide_dbhp(inst: Instance, tick: Callable[[], None] | None = None) -> bool:
    """Does the unique run accept within the bound?  Linear in the bound."""
    m = inst.machine
    if not m.is_deterministic:
        raise NotDeterministic(f"machine has a branching transition set")
    conf = start_configuration(inst.input)
    for _ in range(inst.bound + 1):
        if tick is not None:
            tick()
        if is_accepting(m, conf):
            return True
        succs = step_successors(m, conf)
        if not succs:
            return False
        conf = succs[0]
    return False


def verify_path(inst: Instance, path: Path) -> bool:
    """Replay ``path`` from the start; true iff it reaches acceptance in time.

    Acceptance is checked before each step, so a path that passes through an
    accept state verifies even if its tail would fall off the tree.  Any
    out-of-range choice met before acceptance makes the path invalid.
    """
    m = inst.machine
    conf = start_configuration(inst.input)
    if is_accepting(m, conf):
        return True
    for choice in path:
        if conf.steps_taken >= inst.bound:
            return False
        succs = step_successors(m, conf)
        if not 0 <= choice < len(succs):
            return False
        conf = succs[choice]
        if is_accepting(m, conf):
            return True
    return False


# ---------------------------------------------------------------------------
# Reference acceptors
# ---------------------------------------------------------------------------

def _read_all(ctx: RunContext) -> str:
    bits = []
    pos = 0
    while True:
        sym = ctx.read_at(pos)
        if sym == PAST_END:
            return "".join(bits)
        bits.append("1" if sym else "0")
        pos += 1


def reference_cobhp_acceptor(decide_budget: int = 10**6) -> Acceptor:
    """Full-read acceptor for the complement of the bounded halting problem.

    Reads and parses the entire input, runs the bounded search, and accepts
    exactly when no accepting run exists.  Malformed inputs are rejected.
    Because it always reads everything, its step count exceeds the pad
    length on every instance, which makes every pool pair maximally hard
    for it.
    """

    def behavior(ctx: RunContext) -> Outcome:
        text = _read_all(ctx)
        try:
            inst = decode_instance(text)
        except MalformedEncoding:
            return Outcome.REJECT
        try:
            witness = decide_bhp(inst, decide_budget, tick=ctx.charge)
        except BudgetExceeded:
            return Outcome.BUDGET
        return Outcome.REJECT if witness is not None else Outcome.ACCEPT

    return Acceptor(name="cobhp-ref", behavior=behavior, provenance="reference")


def reference_codbhp_acceptor(decide_budget: int = 10**6) -> Acceptor:
    """Full-read acceptor for the deterministic-machine complement language.

    Instances whose machine branches are rejected outright: they are not
    well-formed members of the deterministic problem.
    """

    def behavior(ctx: RunContext) -> Outcome:
        text = _read_all(ctx)
        try:
            inst = decode_instance(text)
        except MalformedEncoding:
            return Outcome.REJECT
        if not inst.machine.is_deterministic:
            return Outcome.REJECT
        accepted = decide_dbhp(inst, tick=ctx.charge)
        return Outcome.REJECT if accepted else Outcome.ACCEPT

    return Acceptor(name="codbhp-ref", behavior=behavior, provenance="reference")


# ---------------------------------------------------------------------------
# Curated non-halting pool
# ---------------------------------------------------------------------------

NO_ACCEPT_STATE = "no-accept-state"
DEAD_END_BEFORE_ACCEPT = "dead-end-before-accept"
STRUCTURAL_LOOP = "structural-loop"

_PROOF_KINDS = (NO_ACCEPT_STATE, DEAD_END_BEFORE_ACCEPT, STRUCTURAL_LOOP)


@dataclass(frozen=True)
class NonAcceptanceProof:
    kind: str
    bound: int = 64
    description: str = ""


@dataclass(frozen=True)
class HaltingPair:
    """A machine/input pair that provably has no accepting run at any bound."""

    name: str
    machine: Machine
    input: str
    proof: NonAcceptanceProof


def _reachable_closure(
    m: Machine, input_bits: str, cap: int
) -> tuple[list[Configuration], dict[int, list[int]], bool]:
    """BFS closure of the configuration graph; truncated flag when > cap."""
    start = start_configuration(input_bits)
    configs = [start]
    index = {start.key(): 0}
    edges: dict[int, list[int]] = {}
    queue = [0]
    while queue:
        i = queue.pop(0)
        edges[i] = []
        for succ in step_successors(m, configs[i]):
            key = succ.key()
            if key not in index:
                if len(configs) >= cap:
                    return configs, edges, True
                index[key] = len(configs)
                configs.append(succ)
                queue.append(index[key])
            edges[i].append(index[key])
    return configs, edges, False


def _has_cycle(edges: dict[int, list[int]]) -> bool:
    WHITE, GREY, BLACK = 0, 1, 2
    color = {i: WHITE for i in edges}
    for root in edges:
        if color[root] != WHITE:
            continue
        stack = [(root, iter(edges[root]))]
        color[root] = GREY
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if color.get(nxt, WHITE) == GREY:
                    return True
                if color.get(nxt, WHITE) == WHITE:
                    color[nxt] = GREY
                    stack.append((nxt, iter(edges.get(nxt, []))))
                    advanced = True
                    break
            if not advanced:
                color[node] = BLACK
                stack.pop()
    return False


def validate_pair(pair: HaltingPair) -> None:
    """Recheck the tagged proof from scratch; raises InvalidPair on failure."""
    kind = pair.proof.kind
    if kind not in _PROOF_KINDS:
        raise InvalidPair(f"{pair.name}: unknown proof kind {kind!r}")
    if kind == NO_ACCEPT_STATE:
        if pair.machine.accept_states:
            raise InvalidPair(f"{pair.name}: machine has accept states")
        return
    configs, edges, truncated = _reachable_closure(
        pair.machine, pair.input, pair.proof.bound
    )
    if truncated:
        raise InvalidPair(
            f"{pair.name}: closure exceeds {pair.proof.bound} configurations"
        )
    if any(is_accepting(pair.machine, c) for c in configs):
        raise InvalidPair(f"{pair.name}: an accepting configuration is reachable")
    if kind == DEAD_END_BEFORE_ACCEPT and _has_cycle(edges):
        raise InvalidPair(f"{pair.name}: reachable set has a cycle, not a dead end")


def pair_to_json(pair: HaltingPair) -> dict:
    return {
        "name": pair.name,
        "machine": machine_to_json(pair.machine),
        "input": pair.input,
        "proof": {
            "kind": pair.proof.kind,
            "bound": pair.proof.bound,
            "description": pair.proof.description,
        },
    }


def pair_from_json(obj: dict) -> HaltingPair:
    proof = obj["proof"]
    return HaltingPair(
        name=obj["name"],
        machine=machine_from_json(obj["machine"]),
        input=obj.get("input", ""),
        proof=NonAcceptanceProof(
            kind=proof["kind"],
            bound=proof.get("bound", 64),
            description=proof.get("description", ""),
        ),
    )


def curated_cohp_pool() -> list[HaltingPair]:
    """The shipped pool, revalidated on load."""
    data = resources.files(__package__).joinpath("data/cohp_pool.json").read_text()
    pool = [pair_from_json(obj) for obj in json.loads(data)]
    for pair in pool:
        validate_pair(pair)
    return pool
