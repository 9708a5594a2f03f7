"""Hardwiring transform, runtime-cap detection, and speedup certification.

The transform takes an acceptor and one provably non-accepting pair and
special-cases that pair's instances: it compares the input against the
hardwired machine/input prefix, and on a full match followed by a one or
the end of input it accepts on the spot.  Members of the pair's instance
family therefore cost a fixed constant regardless of the pad length, while
everything else is delegated to the original acceptor at the price of the
prefix reads.

``check_b_speedup`` measures both acceptors and certifies the two-sided
evidence: unbounded-versus-constant on the hardwired family, and a bounded
additive overhead off it.  Certificates re-validate from raw measurement
rows, independently of the code that produced them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .acceptor_runtime import (
    PAST_END,
    Acceptor,
    Outcome,
    RunContext,
    run_measured,
)
from .languages import HaltingPair, pair_from_json, pair_to_json, validate_pair
from .tm_core import (
    Instance,
    Machine,
    MalformedEncoding,
    decode_instance,
    encode_input,
    encode_instance,
    encode_machine,
    make_instance,
)


class CorpusOutsideL(Exception):
    """A dominance corpus member was rejected by one of the acceptors."""


class ReductionFailure(Exception):
    """A reduction produced an instance that fails validation."""


def hardwired_prefix(pair: HaltingPair) -> str:
    """The machine-and-input prefix shared by every instance of the pair."""
    return encode_machine(pair.machine) + encode_input(pair.input)


def hardwire_transform(a: Acceptor, pair: HaltingPair) -> Acceptor:
    """Special-case one non-accepting pair; delegate everything else to ``a``.

    On the pair's instances the result accepts after reading the prefix plus
    one cell, for a constant p + 2 steps (p prefix reads, one probe, one
    decision op).  On a prefix mismatch, or when the cell after the prefix
    is a zero, control passes to ``a`` from scratch; re-reads cost one op
    each, so the off-family overhead is at most p + 2.
    """
    validate_pair(pair)  # raises InvalidPair if the proof tag fails recheck
    prefix = hardwired_prefix(pair)
    p = len(prefix)

    def behavior(ctx: RunContext) -> Outcome:
        for i in range(p):
            want = 1 if prefix[i] == "1" else 0
            if ctx.read_at(i) != want:
                return a.behavior(ctx)
        probe = ctx.read_at(p)
        if probe == 1 or probe == PAST_END:
            ctx.charge(1)
            return Outcome.ACCEPT
        return a.behavior(ctx)

    return Acceptor(
        name=f"hardwired({a.name},{pair.name})",
        behavior=behavior,
        provenance="transformed",
    )


# ---------------------------------------------------------------------------
# Runtime-cap detection
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CapResult:
    """Outcome of scanning pad lengths for a sub-pad-length answer."""

    capped: bool
    t_max: int
    t0: int | None = None
    steps: int | None = None
    confirmations: tuple[int, ...] = ()

    def to_json(self) -> dict:
        return {
            "capped": self.capped,
            "tMax": self.t_max,
            "t0": self.t0,
            "steps": self.steps,
            "confirmedAt": list(self.confirmations),
        }


def detect_runtime_cap(
    a: Acceptor,
    pair: tuple[Machine, str],
    t_max: int,
    step_budget: int = 10**7,
) -> CapResult:
    """First pad length the acceptor answers in fewer steps than the pad.

    When a cap is found at t0, the run is replayed on longer pads to confirm
    the behaviour is frozen: an acceptor that answered without reaching the
    pad's end cannot distinguish longer pads.
    """
    if t_max < 1:
        raise ValueError("t_max must be >= 1")
    machine, x = pair
    for t in range(1, t_max + 1):
        base = run_measured(a, encode_instance(machine, x, t), step_budget)
        if base.outcome is Outcome.BUDGET:
            continue
        if base.steps < t:
            confirmed = []
            for t_bigger in (t + 1, 2 * t, t_max):
                if t_bigger <= t:
                    continue
                again = run_measured(
                    a, encode_instance(machine, x, t_bigger), step_budget
                )
                if (
                    again.outcome == base.outcome
                    and again.steps == base.steps
                    and again.transcript == base.transcript
                ):
                    confirmed.append(t_bigger)
            return CapResult(
                capped=True,
                t_max=t_max,
                t0=t,
                steps=base.steps,
                confirmations=tuple(confirmed),
            )
    return CapResult(capped=False, t_max=t_max)


def find_hard_pair(
    a: Acceptor,
    pool: Sequence[HaltingPair],
    t_max: int,
    step_budget: int = 10**7,
) -> HaltingPair | None:
    """First pool pair on which ``a`` never answers below the pad length."""
    for pair in pool:
        result = detect_runtime_cap(a, (pair.machine, pair.input), t_max, step_budget)
        if not result.capped:
            return pair
    return None


# ---------------------------------------------------------------------------
# Speedup certification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    condition: str
    detail: str

    def to_json(self) -> dict:
        return {"condition": self.condition, "detail": self.detail}


@dataclass(frozen=True)
class SpeedupCertificate:
    """Measured evidence that ``transformed`` beats ``base`` on one family.

    Every on-family row must show base steps at least the pad length and
    transformed steps exactly equal to ``constant_c``; every off-family row
    must show overhead at most ``additive_cs``.
    """

    base_acceptor: str
    transformed_acceptor: str
    pair: HaltingPair
    t_min: int
    t_max: int
    on_s: tuple[tuple[int, int, int], ...]  # (t, steps_base, steps_transformed)
    off_s: tuple[tuple[str, int, int], ...]  # (instance id, base, transformed)
    constant_c: int
    additive_cs: int

    MIN_T_VALUES = 32
    MIN_OFF_ROWS = 100

    def validate(self) -> None:
        if len({t for t, _, _ in self.on_s}) < self.MIN_T_VALUES:
            raise ValueError(
                f"certificate needs >= {self.MIN_T_VALUES} distinct pad lengths"
            )
        if len(self.off_s) < self.MIN_OFF_ROWS:
            raise ValueError(
                f"certificate needs >= {self.MIN_OFF_ROWS} off-family rows"
            )
        for t, sb, st in self.on_s:
            if sb < t:
                raise ValueError(f"base ran below the pad length at t={t}")
            if st != self.constant_c:
                raise ValueError(f"transformed not constant at t={t}: {st}")
        for iid, sb, st in self.off_s:
            if st - sb > self.additive_cs:
                raise ValueError(f"overhead bound exceeded on {iid}")

    def to_json(self) -> dict:
        return {
            "baseAcceptor": self.base_acceptor,
            "transformedAcceptor": self.transformed_acceptor,
            "pair": pair_to_json(self.pair),
            "tRange": [self.t_min, self.t_max],
            "onS": [list(row) for row in self.on_s],
            "offS": [list(row) for row in self.off_s],
            "constantC": self.constant_c,
            "additiveCs": self.additive_cs,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SpeedupCertificate":
        return cls(
            base_acceptor=obj["baseAcceptor"],
            transformed_acceptor=obj["transformedAcceptor"],
            pair=pair_from_json(obj["pair"]),
            t_min=obj["tRange"][0],
            t_max=obj["tRange"][1],
            on_s=tuple((t, sb, st) for t, sb, st in obj["onS"]),
            off_s=tuple((iid, sb, st) for iid, sb, st in obj["offS"]),
            constant_c=obj["constantC"],
            additive_cs=obj["additiveCs"],
        )


def check_b_speedup(
    base: Acceptor,
    transformed: Acceptor,
    pair: HaltingPair,
    t_range: Iterable[int],
    off_corpus: Sequence[tuple[str, str]],
    step_budget: int = 10**7,
) -> SpeedupCertificate | Violation:
    """Measure both acceptors and certify, or name the failed condition.

    ``off_corpus`` is a sequence of (instance id, encoded string) pairs,
    well-formed and disjoint from the hardwired family.  Budget-flagged runs
    on the family are violations; flagged off-family rows are dropped, since
    a truncated measurement is not a runtime value.
    """
    ts = sorted(set(t_range))
    prefix = hardwired_prefix(pair)
    on_rows = []
    for t in ts:
        encoded = encode_instance(pair.machine, pair.input, t)
        rb = run_measured(base, encoded, step_budget)
        rt = run_measured(transformed, encoded, step_budget)
        if rb.outcome is Outcome.BUDGET or rt.outcome is Outcome.BUDGET:
            return Violation("measurement", f"budget flag on the family at t={t}")
        if rb.outcome != rt.outcome:
            return Violation(
                "agreement", f"outcomes differ on the family at t={t}"
            )
        if rb.outcome is not Outcome.ACCEPT:
            return Violation("membership", f"family instance rejected at t={t}")
        on_rows.append((t, rb.steps, rt.steps))

    transformed_steps = {st for _, _, st in on_rows}
    if len(transformed_steps) != 1:
        return Violation(
            "constant-on-family",
            f"transformed steps take {len(transformed_steps)} values across pads",
        )
    constant_c = transformed_steps.pop()
    for t, sb, _ in on_rows:
        if sb < t:
            return Violation(
                "unbounded-on-family",
                f"base answered below the pad length at t={t} ({sb} < {t})",
            )

    off_rows = []
    for iid, encoded in off_corpus:
        try:
            inst = decode_instance(encoded)
        except MalformedEncoding as e:
            return Violation("corpus", f"{iid} is not well-formed: {e}")
        if encoded.startswith(prefix) and set(encoded[len(prefix):]) <= {"1"}:
            return Violation("corpus", f"{iid} belongs to the hardwired family")
        rb = run_measured(base, encoded, step_budget)
        rt = run_measured(transformed, encoded, step_budget)
        if rb.outcome is Outcome.BUDGET or rt.outcome is Outcome.BUDGET:
            continue
        if rb.outcome != rt.outcome:
            return Violation("agreement", f"outcomes differ on {iid}")
        off_rows.append((iid, rb.steps, rt.steps))

    additive = max((st - sb for _, sb, st in off_rows), default=0)
    cert = SpeedupCertificate(
        base_acceptor=base.name,
        transformed_acceptor=transformed.name,
        pair=pair,
        t_min=ts[0],
        t_max=ts[-1],
        on_s=tuple(on_rows),
        off_s=tuple(off_rows),
        constant_c=constant_c,
        additive_cs=max(additive, 0),
    )
    cert.validate()
    return cert


# ---------------------------------------------------------------------------
# Polynomial-envelope checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DominanceResult:
    dominates: bool
    degree: int | None = None
    constant: int | None = None
    max_degree_tried: int | None = None

    def to_json(self) -> dict:
        return {
            "dominates": self.dominates,
            "degree": self.degree,
            "constant": self.constant,
            "maxDegreeTried": self.max_degree_tried,
        }


def check_p_dominance(
    a: Acceptor,
    b: Acceptor,
    corpus: Sequence[tuple[str, str]],
    max_degree: int,
    step_budget: int = 10**7,
    constant_cap: int = 2**20,
) -> DominanceResult:
    """Smallest degree and doubling-found constant with
    steps_a(x) <= c * (|x| + steps_b(x))^d over the corpus.

    This is an empirical corpus statement, nothing more: it quantifies over
    the measured inputs only.  Corpus members must be accepted by both
    acceptors.
    """
    points = []
    for iid, encoded in corpus:
        ra = run_measured(a, encoded, step_budget)
        rb = run_measured(b, encoded, step_budget)
        if ra.outcome is not Outcome.ACCEPT or rb.outcome is not Outcome.ACCEPT:
            raise CorpusOutsideL(f"{iid} not accepted by both acceptors")
        points.append((ra.steps, len(encoded) + rb.steps))
    for d in range(0, max_degree + 1):
        c = 1
        while c <= constant_cap:
            if all(sa <= c * (base**d) for sa, base in points):
                return DominanceResult(True, degree=d, constant=c)
            c *= 2
    return DominanceResult(False, max_degree_tried=max_degree)


@dataclass(frozen=True)
class EnvelopeFit:
    degree: int
    constant: int  # least c with f(t) <= c * max(t,1)^degree over the range
    reference_constant: int  # same fit on the first half of the range
    first_violation: int | None  # first t where the reference constant fails

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "constant": self.constant,
            "referenceConstant": self.reference_constant,
            "firstViolation": self.first_violation,
        }


@dataclass(frozen=True)
class StarProbeReport:
    acceptor: str
    pair_name: str
    rows: tuple[tuple[int, int], ...]  # (t, steps)
    fits: tuple[EnvelopeFit, ...]

    def to_json(self) -> dict:
        return {
            "acceptor": self.acceptor,
            "pair": self.pair_name,
            "rows": [list(r) for r in self.rows],
            "fits": [f.to_json() for f in self.fits],
        }


def star_condition_probe(
    a: Acceptor,
    pair: HaltingPair,
    t_range: Iterable[int],
    degrees: Iterable[int] = (0, 1, 2),
    step_budget: int = 10**7,
) -> StarProbeReport:
    """Tabulate f(t) = steps on the pair's instances and fit envelopes.

    Purely descriptive: the fits say what the measured range shows, and the
    reference constant (fitted on the first half) flags growth that escapes
    the half-range envelope later on.  No claim beyond the range is made.
    """
    ts = sorted(set(t_range))
    rows = []
    for t in ts:
        r = run_measured(a, encode_instance(pair.machine, pair.input, t), step_budget)
        if r.outcome is not Outcome.BUDGET:
            rows.append((t, r.steps))
    fits = []
    for d in sorted(set(degrees)):
        if not rows:
            continue
        ratios = [math.ceil(steps / max(t, 1) ** d) for t, steps in rows]
        c_full = max(ratios)
        half = max(1, len(rows) // 2)
        c_ref = max(ratios[:half])
        violation = None
        for t, steps in rows[half:]:
            if steps > c_ref * max(t, 1) ** d:
                violation = t
                break
        fits.append(EnvelopeFit(d, c_full, c_ref, violation))
    return StarProbeReport(
        acceptor=a.name,
        pair_name=pair.name,
        rows=tuple(rows),
        fits=tuple(fits),
    )


# ---------------------------------------------------------------------------
# Reductions and composition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Reduction:
    """A total instance-to-instance mapping with a cost-degree tag."""

    name: str
    mapping: Callable[[Instance], Instance]
    cost_degree: int = 1


class _MappedReader:
    """Reader over a reduction's output; every access is an internal op."""

    __slots__ = ("_bits", "_ctx")

    def __init__(self, bits: str, ctx: RunContext):
        self._bits = bits
        self._ctx = ctx

    def read_at(self, pos: int) -> int:
        self._ctx.charge(1)
        if pos < len(self._bits):
            return 1 if self._bits[pos] == "1" else 0
        return PAST_END

    def charge(self, n: int = 1) -> None:
        self._ctx.charge(n)


def compose_with_reduction(a: Acceptor, f: Reduction) -> Acceptor:
    """The acceptor x -> a(f(x)).

    Reads and decodes the whole input, applies the mapping (charged in
    proportion to the output length), then runs ``a`` against the mapped
    string through an internal reader.
    """

    def behavior(ctx: RunContext) -> Outcome:
        bits = []
        pos = 0
        while True:
            sym = ctx.read_at(pos)
            if sym == PAST_END:
                break
            bits.append("1" if sym else "0")
            pos += 1
        try:
            inst = decode_instance("".join(bits))
        except MalformedEncoding:
            return Outcome.REJECT
        mapped = f.mapping(inst)
        try:
            decode_instance(mapped.encoded)
        except MalformedEncoding as e:
            raise ReductionFailure(f"{f.name} emitted a malformed instance: {e}")
        ctx.charge(len(mapped.encoded))
        return a.behavior(_MappedReader(mapped.encoded, ctx))

    return Acceptor(
        name=f"compose({a.name},{f.name})", behavior=behavior, provenance="transformed"
    )


def reduction_dbhp_to_bhp() -> Reduction:
    """Deterministic instances are already instances of the general problem."""
    return Reduction(name="dbhp-as-bhp", mapping=lambda inst: inst, cost_degree=1)


def identity_reduction() -> Reduction:
    return Reduction(name="identity", mapping=lambda inst: inst, cost_degree=1)


def padding_self_reduction() -> Reduction:
    """Append one unreachable state: a real encoding change, same membership."""

    def mapping(inst: Instance) -> Instance:
        m = inst.machine
        padded = Machine(m.num_states + 1, m.accept_states, dict(m.transitions))
        return make_instance(padded, inst.input, inst.bound)

    return Reduction(name="pad-one-state", mapping=mapping, cost_degree=1)


def stripping_self_reduction() -> Reduction:
    """Inverse-direction partner: drop a trailing inert state when present."""

    def removable(m: Machine) -> bool:
        last = m.num_states - 1
        if m.num_states == 1 or last in m.accept_states:
            return False
        for (q, _s), entries in m.transitions.items():
            if q == last or any(nxt == last for nxt, _, _ in entries):
                return False
        return True

    def mapping(inst: Instance) -> Instance:
        m = inst.machine
        if not removable(m):
            return inst
        stripped = Machine(m.num_states - 1, m.accept_states, dict(m.transitions))
        return make_instance(stripped, inst.input, inst.bound)

    return Reduction(name="strip-one-state", mapping=mapping, cost_degree=1)


def validate_reduction(
    f: Reduction,
    corpus: Sequence[Instance],
    decider: Callable[[Instance], bool],
) -> None:
    """Check membership preservation on a corpus against a reference decider."""
    for inst in corpus:
        mapped = f.mapping(inst)
        try:
            decode_instance(mapped.encoded)
        except MalformedEncoding as e:
            raise ReductionFailure(f"{f.name} emitted a malformed instance: {e}")
        if decider(inst) != decider(mapped):
            raise ReductionFailure(
                f"{f.name} changed membership on {inst.encoded[:40]}..."
            )
