"""Universal witness search by dovetailing, and search-from-decision.

``levin_search_witness`` enumerates every machine in canonical encoding
order and runs each one, deterministically (branch 0 everywhere), on the
instance's encoded string.  Whenever an enumeratee halts, its tape is
decoded as a branch-index sequence and pushed through the path verifier;
the first verified witness wins.  The schedule is the classic exponential
fan: in phase k, program i <= k receives 2^(k-i) fresh steps, so program
i's cumulative allotment after phase k is exactly 2^(k-i+1) - 1.

Enumeratees caught revisiting a configuration can never halt, so they are
retired; that keeps the dovetail from drowning in trivial loops.

``schnorr_search_from_decision`` rebuilds a witness from a yes/no oracle
alone by committing one branch choice at a time: candidate extensions are
turned into real decision queries by pinning the already-chosen prefix into
the machine itself (``force_choice_prefix``) and asking about the original
input at the original bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator

from .languages import verify_path
from .tm_core import (
    BLANK,
    Configuration,
    Instance,
    Machine,
    Path,
    enumerate_machines,
    force_choice_prefix,
    is_accepting,
    make_instance,
    start_configuration,
    step_successors,
)


class OracleInconsistent(Exception):
    """The decision oracle claimed a witness exists but offered no branch."""


@dataclass(frozen=True)
class DovetailSchedule:
    """Slot iterator for the exponential dovetail."""

    @staticmethod
    def allotment(phase: int, program: int) -> int:
        return 2 ** (phase - program)

    @staticmethod
    def cumulative(phase: int, program: int) -> int:
        return 2 ** (phase - program + 1) - 1

    @staticmethod
    def phase_total(phase: int) -> int:
        return 2 ** (phase + 1) - 1

    def slots(self) -> Iterator[tuple[int, int, int]]:
        """Yields (phase, program index, fresh steps) forever."""
        phase = 0
        while True:
            for i in range(phase + 1):
                yield phase, i, self.allotment(phase, i)
            phase += 1


# Shared enumeration cache: machine programs in canonical order.
_PROGRAMS: list[tuple[str, Machine]] = []
_PROGRAM_SOURCE = enumerate_machines()


def _program(index: int) -> tuple[str, Machine]:
    while len(_PROGRAMS) <= index:
        _PROGRAMS.append(next(_PROGRAM_SOURCE))
    return _PROGRAMS[index]


class _Simulation:
    """Persistent deterministic run of one enumeratee on the instance string."""

    __slots__ = ("machine", "conf", "live", "halted", "seen")

    def __init__(self, machine: Machine, input_bits: str):
        self.machine = machine
        self.conf = start_configuration(input_bits)
        self.live = True
        self.halted = False
        self.seen = {self.conf.key()}

    def run(self, steps: int) -> int:
        """Advance up to ``steps`` steps; returns steps charged.

        Discovering a halt or a repeated configuration costs one step.
        """
        charged = 0
        while charged < steps:
            succs = step_successors(self.machine, self.conf)
            charged += 1
            if not succs:
                self.live = False
                self.halted = True
                return charged
            self.conf = succs[0]
            key = self.conf.key()
            if key in self.seen:
                self.live = False  # provably loops forever; never prints
                return charged
            self.seen.add(key)
        return charged

    def tape_contents(self) -> str | None:
        """Written region from cell 0; None when a blank gap interrupts it."""
        cells = [p for p, s in self.conf.tape.items() if s != BLANK]
        if not cells:
            return ""
        top = max(cells)
        bits = []
        for p in range(top + 1):
            sym = self.conf.tape.get(p, BLANK)
            if sym == BLANK:
                return None
            bits.append("1" if sym else "0")
        return "".join(bits)


def decode_candidate(tape_bits: str | None) -> Path | None:
    """Tape contents as a branch-index sequence of unary numerals.

    A run of ones cut off by the end of the written region still counts as a
    numeral (the region boundary acts as its terminator).
    """
    if tape_bits is None:
        return None
    path = []
    ones = 0
    for ch in tape_bits:
        if ch == "1":
            ones += 1
        else:
            path.append(ones)
            ones = 0
    if ones:
        path.append(ones)
    return tuple(path)


@dataclass(frozen=True)
class LevinResult:
    found: bool
    path: Path | None
    program_index: int | None
    phase: int | None
    steps_used: int

    def to_json(self) -> dict:
        return {
            "found": self.found,
            "path": list(self.path) if self.path is not None else None,
            "programIndex": self.program_index,
            "phase": self.phase,
            "stepsUsed": self.steps_used,
        }


def levin_search_witness(inst: Instance, total_budget: int) -> LevinResult:
    """First verified witness under the dovetail, or NotFound on exhaustion.

    Deterministic given the budget.  A NotFound never claims the witness
    does not exist; it only reports that the budget ran out.
    """
    if total_budget <= 0:
        raise ValueError("total budget must be positive")
    sims: dict[int, _Simulation] = {}
    used = 0
    for phase, index, allotment in DovetailSchedule().slots():
        if used >= total_budget:
            return LevinResult(False, None, None, None, used)
        sim = sims.get(index)
        if sim is None:
            sim = _Simulation(_program(index)[1], inst.encoded)
            sims[index] = sim
        if not sim.live:
            continue
        used += sim.run(min(allotment, total_budget - used))
        if sim.halted:
            candidate = decode_candidate(sim.tape_contents())
            if candidate is not None and verify_path(inst, candidate):
                return LevinResult(True, candidate, index, phase, used)
    raise AssertionError("unreachable")


def levin_search_doubling(
    inst: Instance, start_budget: int = 2**10, cap: int = 2**24
) -> LevinResult:
    """Run the search with doubling budgets until found or the cap is hit."""
    budget = min(start_budget, cap)
    while True:
        result = levin_search_witness(inst, budget)
        if result.found or budget >= cap:
            return result
        budget = min(budget * 2, cap)


# ---------------------------------------------------------------------------
# Search from decision
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SchnorrResult:
    path: Path | None
    oracle_calls: int

    @property
    def found(self) -> bool:
        return self.path is not None

    def to_json(self) -> dict:
        return {
            "found": self.found,
            "path": list(self.path) if self.path is not None else None,
            "oracleCalls": self.oracle_calls,
        }


def schnorr_search_from_decision(
    inst: Instance, oracle: Callable[[Instance], bool]
) -> SchnorrResult:
    """Build a witness using only a decision oracle for the bounded language.

    Commits branch choices left to right.  Extending a prefix by candidate
    branch c is decided by one oracle call on the instance whose machine has
    the extended prefix pinned in.  Oracle calls are bounded by
    bound * max-branching + 1.

    Raises OracleInconsistent when the oracle affirms the current prefix but
    denies every extension; that is impossible against an honest oracle.
    """
    calls = 0

    def ask(query: Instance) -> bool:
        nonlocal calls
        calls += 1
        return bool(oracle(query))

    if not ask(inst):
        return SchnorrResult(None, calls)
    m = inst.machine
    prefix: list[int] = []
    conf = start_configuration(inst.input)
    while True:
        if is_accepting(m, conf):
            path = tuple(prefix)
            assert verify_path(inst, path)
            return SchnorrResult(path, calls)
        if len(prefix) >= inst.bound:
            raise OracleInconsistent(
                "bound exhausted on an affirmed prefix that does not accept"
            )
        succs = step_successors(m, conf)
        committed = None
        for c in range(len(succs)):
            pinned = force_choice_prefix(m, tuple(prefix) + (c,))
            if ask(make_instance(pinned, inst.input, inst.bound)):
                committed = c
                break
        if committed is None:
            raise OracleInconsistent(
                f"no branch extends the affirmed prefix {tuple(prefix)}"
            )
        prefix.append(committed)
        conf = succs[committed]
