"""Instrumented execution substrate for acceptors.

An acceptor is a deterministic host-level procedure that sees its input only
through a tracked reader.  The cost model charges one unit per reader call
and per declared internal operation, and reports

    steps = max(internalOps, maxPosRead + 1)

so a run can never be cheaper than the farthest input cell it touched.  That
floor is the one tape-machine fact the rest of the toolkit leans on: an
acceptor that answers without probing the tail of its input would answer
identically, at identical cost, on any input sharing the probed prefix.

There is deliberately no length query on the reader.  An acceptor can
discover the end of its input by probing past it, but it cannot ask.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

PAST_END = -1


class Outcome(enum.Enum):
    ACCEPT = "Accept"
    REJECT = "Reject"
    BUDGET = "BudgetFlag"


class _BudgetStop(Exception):
    """Internal signal: the step budget ran out mid-behaviour."""


class RunContext:
    """Reader plus op-counter handed to an acceptor behaviour."""

    __slots__ = ("_input", "_budget", "internal_ops", "max_pos_read", "transcript")

    def __init__(self, input_bits: str, step_budget: int):
        self._input = input_bits
        self._budget = step_budget
        self.internal_ops = 0
        self.max_pos_read: int | None = None
        self.transcript: list[tuple[int, int]] = []

    def read_at(self, pos: int) -> int:
        """Symbol at ``pos``: 0, 1, or PAST_END.  Costs one op."""
        if pos < 0:
            raise ValueError("read position must be >= 0")
        self.charge(1)
        if self.max_pos_read is None or pos > self.max_pos_read:
            self.max_pos_read = pos
        if pos < len(self._input):
            sym = 1 if self._input[pos] == "1" else 0
        else:
            sym = PAST_END
        self.transcript.append((pos, sym))
        return sym

    def charge(self, n: int = 1) -> None:
        self.internal_ops += n
        if self.internal_ops > self._budget:
            raise _BudgetStop()


@dataclass(frozen=True)
class Acceptor:
    """A named deterministic decision procedure over a RunContext."""

    name: str
    behavior: Callable[[RunContext], Outcome]
    provenance: str = "external"


@dataclass(frozen=True)
class RunReport:
    """One measured run.  ``steps`` is the reported runtime value."""

    outcome: Outcome
    steps: int
    max_pos_read: int | None
    internal_ops: int
    input_length: int
    transcript: tuple[tuple[int, int], ...] = ()


def run_measured(a: Acceptor, input_bits: str, step_budget: int) -> RunReport:
    """Execute ``a`` on a fresh reader and measure it.

    Budget overrun is an outcome (BudgetFlag), never an exception: a
    truncated run is not a runtime value and is excluded from certificates.
    """
    if step_budget <= 0:
        raise ValueError("step budget must be positive")
    ctx = RunContext(input_bits, step_budget)
    try:
        outcome = a.behavior(ctx)
    except _BudgetStop:
        outcome = Outcome.BUDGET
    if ctx.max_pos_read is None:
        steps = ctx.internal_ops
    else:
        steps = max(ctx.internal_ops, ctx.max_pos_read + 1)
    if ctx.max_pos_read is not None and steps < ctx.max_pos_read + 1:
        raise AssertionError("cost-model floor violated")
    return RunReport(
        outcome=outcome,
        steps=steps,
        max_pos_read=ctx.max_pos_read,
        internal_ops=ctx.internal_ops,
        input_length=len(input_bits),
        transcript=tuple(ctx.transcript),
    )


REPORT_FIELDS = (
    "acceptor",
    "inputId",
    "outcome",
    "steps",
    "maxPosRead",
    "internalOps",
    "inputLength",
)


def report_row(acceptor_name: str, input_id: str, r: RunReport) -> list[str]:
    return [
        acceptor_name,
        input_id,
        r.outcome.value,
        str(r.steps),
        "" if r.max_pos_read is None else str(r.max_pos_read),
        str(r.internal_ops),
        str(r.input_length),
    ]
