"""Single-tape Turing machines over {0, 1, blank} and their bit-exact codec.

Machines are nondeterministic transition tables on a one-way-infinite tape.
Everything here is an immutable value: machines, instances and configurations
can be shared freely and replayed deterministically.

The codec uses self-delimiting unary numerals U(n) = 1^n 0 throughout, so an
encoded instance parses strictly left to right and the trailing run of 1s is
unambiguously the step-bound pad.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator

ZERO, ONE, BLANK = 0, 1, 2
LEFT, RIGHT = 0, 1

SYMBOLS = (ZERO, ONE, BLANK)
MOVES = (LEFT, RIGHT)

# (next_state, write_symbol, move)
TransitionEntry = tuple[int, int, int]
TransitionTable = dict[tuple[int, int], tuple[TransitionEntry, ...]]
Path = tuple[int, ...]


class MalformedEncoding(ValueError):
    """A bit string is not a canonical machine or instance encoding."""


def unary(n: int) -> str:
    return "1" * n + "0"


@dataclass(frozen=True)
class Machine:
    """A transition table. State 0 is the start state.

    ``transitions`` maps (state, symbol) to an ordered tuple of entries; the
    position of an entry in the tuple is its branch index.  A missing key (or
    empty tuple, which is normalised away) means the machine halts when it
    finds itself in that situation.
    """

    num_states: int
    accept_states: frozenset[int]
    transitions: TransitionTable

    def __post_init__(self) -> None:
        if self.num_states < 1:
            raise ValueError("machine needs at least one state")
        object.__setattr__(self, "accept_states", frozenset(self.accept_states))
        for q in self.accept_states:
            if not 0 <= q < self.num_states:
                raise ValueError(f"accept state {q} out of range")
        table: TransitionTable = {}
        for (q, s), entries in self.transitions.items():
            if not 0 <= q < self.num_states:
                raise ValueError(f"transition state {q} out of range")
            if s not in SYMBOLS:
                raise ValueError(f"transition symbol {s} invalid")
            entries = tuple(entries)
            if not entries:
                continue
            if len(set(entries)) != len(entries):
                raise ValueError(f"duplicate branch in transition set ({q}, {s})")
            for nxt, w, mv in entries:
                if not 0 <= nxt < self.num_states:
                    raise ValueError(f"next state {nxt} out of range")
                if w not in SYMBOLS or mv not in MOVES:
                    raise ValueError("bad write symbol or move")
            table[(q, s)] = entries
        object.__setattr__(self, "transitions", table)

    @property
    def is_deterministic(self) -> bool:
        return all(len(v) <= 1 for v in self.transitions.values())

    @property
    def max_branching(self) -> int:
        return max((len(v) for v in self.transitions.values()), default=0)

    def entries(self, state: int, symbol: int) -> tuple[TransitionEntry, ...]:
        return self.transitions.get((state, symbol), ())


@dataclass
class Configuration:
    """A machine mid-run: control state, written cells, head, step count."""

    state: int
    tape: dict[int, int]
    head: int
    steps_taken: int

    def symbol_under_head(self) -> int:
        return self.tape.get(self.head, BLANK)

    def key(self) -> tuple:
        """Hashable identity ignoring the step counter (for dedup)."""
        return (self.state, self.head, tuple(sorted(self.tape.items())))


def start_configuration(input_bits: str) -> Configuration:
    tape = {i: (ONE if b == "1" else ZERO) for i, b in enumerate(input_bits)}
    return Configuration(state=0, tape=tape, head=0, steps_taken=0)


def is_accepting(m: Machine, c: Configuration) -> bool:
    return c.state in m.accept_states


def step_successors(m: Machine, c: Configuration) -> list[Configuration]:
    """All one-step successors, in branch order.

    An empty list means the machine halts here.  A Left move at cell 0 stays
    at cell 0 (one-way-infinite tape convention).
    """
    out = []
    for nxt, write, move in m.entries(c.state, c.symbol_under_head()):
        tape = dict(c.tape)
        if write == BLANK:
            tape.pop(c.head, None)
        else:
            tape[c.head] = write
        head = c.head + 1 if move == RIGHT else max(0, c.head - 1)
        out.append(Configuration(nxt, tape, head, c.steps_taken + 1))
    return out


def replay_path(m: Machine, input_bits: str, path: Path) -> Configuration | None:
    """Replay branch choices from the start; None if a choice is out of range."""
    conf = start_configuration(input_bits)
    for choice in path:
        succs = step_successors(m, conf)
        if not 0 <= choice < len(succs):
            return None
        conf = succs[choice]
    return conf


# ---------------------------------------------------------------------------
# Codec
# ---------------------------------------------------------------------------

def _read_unary(s: str, pos: int) -> tuple[int, int]:
    n = 0
    while True:
        if pos >= len(s):
            raise MalformedEncoding("truncated unary numeral")
        ch = s[pos]
        pos += 1
        if ch == "0":
            return n, pos
        if ch == "1":
            n += 1
        else:
            raise MalformedEncoding(f"non-bit character {ch!r}")


def encode_machine(m: Machine) -> str:
    parts = [unary(m.num_states)]
    accepts = sorted(m.accept_states)
    parts.append(unary(len(accepts)))
    parts.extend(unary(a) for a in accepts)
    items = sorted(m.transitions.items())
    total = sum(len(v) for _, v in items)
    parts.append(unary(total))
    for (q, s), entries in items:
        for nxt, w, mv in entries:
            parts.extend((unary(q), unary(s), unary(nxt), unary(w), unary(mv)))
    return "".join(parts)


def _parse_machine(s: str, pos: int) -> tuple[Machine, int]:
    num_states, pos = _read_unary(s, pos)
    if num_states < 1:
        raise MalformedEncoding("zero states")
    k, pos = _read_unary(s, pos)
    accepts = []
    for _ in range(k):
        a, pos = _read_unary(s, pos)
        if accepts and a <= accepts[-1]:
            raise MalformedEncoding("accept states not strictly increasing")
        if a >= num_states:
            raise MalformedEncoding("accept state out of range")
        accepts.append(a)
    total, pos = _read_unary(s, pos)
    table: TransitionTable = {}
    last_key = None
    for _ in range(total):
        q, pos = _read_unary(s, pos)
        sym, pos = _read_unary(s, pos)
        nxt, pos = _read_unary(s, pos)
        w, pos = _read_unary(s, pos)
        mv, pos = _read_unary(s, pos)
        if q >= num_states or nxt >= num_states:
            raise MalformedEncoding("entry state out of range")
        if sym > 2 or w > 2 or mv > 1:
            raise MalformedEncoding("entry symbol or move out of range")
        key = (q, sym)
        if last_key is not None and key < last_key:
            raise MalformedEncoding("entries not sorted by (state, symbol)")
        last_key = key
        prev = table.get(key, ())
        entry = (nxt, w, mv)
        if entry in prev:
            raise MalformedEncoding("duplicate branch entry")
        table[key] = prev + (entry,)
    return Machine(num_states, frozenset(accepts), table), pos


def decode_machine(s: str) -> Machine:
    m, pos = _parse_machine(s, 0)
    if pos != len(s):
        raise MalformedEncoding("trailing garbage after machine")
    return m


def encode_input(x: str) -> str:
    """Each bit b becomes the pair 1b; a single 0 terminates the field."""
    for b in x:
        if b not in "01":
            raise ValueError(f"input is not a bit string: {x!r}")
    return "".join("1" + b for b in x) + "0"


def encode_instance(m: Machine, x: str, t: int) -> str:
    if t < 0:
        raise ValueError("step bound must be >= 0")
    return encode_machine(m) + encode_input(x) + "1" * t


@dataclass(frozen=True)
class Instance:
    """A parsed machine/input/bound triple plus its canonical encoding."""

    machine: Machine
    input: str
    bound: int
    encoded: str


def make_instance(m: Machine, x: str, t: int) -> Instance:
    return Instance(m, x, t, encode_instance(m, x, t))


def decode_instance(s: str) -> Instance:
    m, pos = _parse_machine(s, 0)
    bits = []
    while True:
        if pos >= len(s):
            raise MalformedEncoding("truncated input field")
        ch = s[pos]
        pos += 1
        if ch == "0":
            break
        if ch != "1":
            raise MalformedEncoding(f"non-bit character {ch!r}")
        if pos >= len(s):
            raise MalformedEncoding("truncated input bit pair")
        b = s[pos]
        pos += 1
        if b not in "01":
            raise MalformedEncoding(f"non-bit character {b!r}")
        bits.append(b)
    pad = s[pos:]
    if "0" in pad:
        raise MalformedEncoding("zero inside the unary pad")
    x = "".join(bits)
    return Instance(m, x, len(pad), s)


# ---------------------------------------------------------------------------
# Choice-forcing transforms
# ---------------------------------------------------------------------------

def force_first_choice(m: Machine, branch: int) -> Machine:
    """Pin every visit of the start state to one branch, behind a stall step.

    The result has one extra state: a fresh start that stalls for a single
    step (write-back, move Left at the wall) and hands control to a copy of
    ``m`` whose start-state transition sets are cut down to the ``branch``-th
    entry.  Symbols whose set has no such entry become dead ends rather than
    errors, so the operation is total.  Accepting runs of the result are one
    step longer than the runs of ``m`` they mirror.
    """
    if branch < 0:
        raise ValueError("branch index must be >= 0")
    table: TransitionTable = {}
    for s in SYMBOLS:
        table[(0, s)] = ((1, s, LEFT),)
    for (q, s), entries in m.transitions.items():
        if q == 0:
            if branch < len(entries):
                nxt, w, mv = entries[branch]
                table[(1, s)] = ((nxt + 1, w, mv),)
        else:
            table[(q + 1, s)] = tuple((nxt + 1, w, mv) for nxt, w, mv in entries)
    accepts = frozenset(a + 1 for a in m.accept_states)
    return Machine(m.num_states + 1, accepts, table)


def force_choice_prefix(m: Machine, prefix: Path) -> Machine:
    """Constrain the first ``len(prefix)`` branch choices of every run.

    Layered product construction: state (q, j) is q at step-depth j.  While
    j < len(prefix) only the prefix[j]-th branch of each transition set
    survives; at the final layer the machine runs free.  Step counts are
    preserved, so the result accepts within t steps exactly when ``m`` has
    an accepting run within t whose first choices follow ``prefix``.
    """
    k = len(prefix)
    if k == 0:
        return m
    n = m.num_states
    table: TransitionTable = {}
    for j in range(k):
        c = prefix[j]
        for (q, s), entries in m.transitions.items():
            if c < len(entries):
                nxt, w, mv = entries[c]
                table[(j * n + q, s)] = (((j + 1) * n + nxt, w, mv),)
    for (q, s), entries in m.transitions.items():
        table[(k * n + q, s)] = tuple((k * n + nxt, w, mv) for nxt, w, mv in entries)
    accepts = frozenset(j * n + a for j in range(k + 1) for a in m.accept_states)
    return Machine(n * (k + 1), accepts, table)


# ---------------------------------------------------------------------------
# Canonical enumeration (shortlex over encodings)
# ---------------------------------------------------------------------------

def _entry_length(e: tuple[int, int, int, int, int]) -> int:
    q, s, nxt, w, mv = e
    return q + s + nxt + w + mv + 5


def _all_entries(num_states: int) -> list[tuple[int, int, int, int, int]]:
    out = []
    for q in range(num_states):
        for s in SYMBOLS:
            for nxt in range(num_states):
                for w in SYMBOLS:
                    for mv in MOVES:
                        out.append((q, s, nxt, w, mv))
    out.sort()
    return out


def _accept_sets(n: int, first: int, budget: int) -> Iterator[tuple[tuple[int, ...], int]]:
    yield (), budget
    for a in range(first, n):
        cost = a + 1
        if cost > budget:
            break
        for rest, rem in _accept_sets(n, a + 1, budget - cost):
            yield (a,) + rest, rem


def _entry_seqs(
    cands: list[tuple[int, int, int, int, int]],
    count: int,
    budget: int,
    min_key: tuple[int, int],
    used: frozenset,
) -> Iterator[tuple[tuple, int]]:
    if count == 0:
        yield (), budget
        return
    if budget < 5 * count:
        return
    for e in cands:
        key = (e[0], e[1])
        if key < min_key or (key, e[2:]) in used:
            continue
        cost = _entry_length(e)
        if cost > budget:
            continue
        for rest, rem in _entry_seqs(
            cands, count - 1, budget - cost, key, used | {(key, e[2:])}
        ):
            yield (e,) + rest, rem


def _machines_of_length(length: int) -> Iterator[tuple[str, Machine]]:
    for n in range(1, length):
        rem_n = length - (n + 1)
        if rem_n < 2:
            continue
        cands = _all_entries(n)
        for accepts, rem_a in _accept_sets(n, 0, rem_n):
            rem_after_k = rem_a - (len(accepts) + 1)
            if rem_after_k < 1:
                continue
            max_e = rem_after_k // 5
            for e_count in range(0, max_e + 1):
                rem_after_e = rem_after_k - (e_count + 1)
                if rem_after_e < 0:
                    continue
                for entries, rem in _entry_seqs(
                    cands, e_count, rem_after_e, (0, 0), frozenset()
                ):
                    if rem != 0:
                        continue
                    table: TransitionTable = {}
                    for q, s, nxt, w, mv in entries:
                        table[(q, s)] = table.get((q, s), ()) + ((nxt, w, mv),)
                    m = Machine(n, frozenset(accepts), table)
                    yield encode_machine(m), m


def enumerate_machines() -> Iterator[tuple[str, Machine]]:
    """All machines in canonical (length, lexicographic) encoding order."""
    length = 4
    while True:
        yield from sorted(_machines_of_length(length), key=lambda p: p[0])
        length += 1


# ---------------------------------------------------------------------------
# JSON mirror (human-authorable machine format)
# ---------------------------------------------------------------------------

_MOVE_NAMES = {LEFT: "L", RIGHT: "R"}
_MOVE_VALUES = {"L": LEFT, "R": RIGHT}


def machine_to_json(m: Machine) -> dict:
    rules = []
    for (q, s), entries in sorted(m.transitions.items()):
        rules.append(
            {
                "state": q,
                "symbol": s,
                "branches": [[nxt, w, _MOVE_NAMES[mv]] for nxt, w, mv in entries],
            }
        )
    return {
        "numStates": m.num_states,
        "acceptStates": sorted(m.accept_states),
        "transitions": rules,
    }


def machine_from_json(obj: dict) -> Machine:
    table: TransitionTable = {}
    for rule in obj.get("transitions", []):
        key = (rule["state"], rule["symbol"])
        entries = tuple(
            (nxt, w, _MOVE_VALUES[mv] if isinstance(mv, str) else mv)
            for nxt, w, mv in rule["branches"]
        )
        if key in table:
            raise ValueError(f"duplicate transition block for {key}")
        table[key] = entries
    return Machine(
        obj["numStates"], frozenset(obj.get("acceptStates", [])), table
    )


def instance_to_json(i: Instance) -> dict:
    return {
        "machine": machine_to_json(i.machine),
        "input": i.input,
        "bound": i.bound,
    }


def instance_from_json(obj: dict) -> Instance:
    return make_instance(
        machine_from_json(obj["machine"]), obj.get("input", ""), obj.get("bound", 0)
    )
