"""Deterministic multi-tape Turing machine interpreter.

Machines have a read-only input tape (tape 0), k >= 1 read/write work
tapes, and a separate one-way output tape that only ever grows: a
transition either emits exactly one symbol (the output head advances) or
emits nothing.  One step is one transition application.

Machine files are line-oriented text::

    machine <name>
    tapes <k>
    start <state>
    halt <state> [<state> ...]
    ; transitions: <state> <s0>,...,<sk> -> <state'> <w1>,...,<wk> <m0>,...,<mk> <out>

with s_i, w_i in {0,1,#,_}, m_i in {L,R,S} and out in {0,1,#,-} where
'-' means no emission.  Comments start with ';'.  Declarations may come
in any order; transitions must come after all declarations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .trace import (
    BLANK,
    DEFAULT_BUDGET,
    EMITTABLE,
    ExecutionTrace,
    TAPE_SYMBOLS,
    encode_natural,
)

MOVES = ("L", "R", "S")
_MOVE_DELTA = {"L": -1, "R": 1, "S": 0}


class MachineError(Exception):
    """Base class for machine definition and execution errors."""


class MachineSyntaxError(MachineError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class DeterminismError(MachineError):
    pass


class UndeclaredStateError(MachineError):
    pass


class MissingTransitionError(MachineError):
    """No transition defined for a reachable (state, symbols) pair."""

    def __init__(self, state: str, symbols: tuple[str, ...], step: int):
        super().__init__(
            f"no transition from state {state!r} on symbols "
            f"({','.join(symbols)}) at step {step}"
        )


@dataclass(frozen=True)
class Transition:
    next_state: str
    writes: tuple[str, ...]
    moves: tuple[str, ...]
    out: str | None


@dataclass(frozen=True)
class MachineSpec:
    """Immutable parsed machine; safe to share between runs."""

    name: str
    work_tapes: int
    start: str
    halting: frozenset[str]
    states: frozenset[str]
    transitions: Mapping[tuple[str, tuple[str, ...]], Transition]


@dataclass(frozen=True)
class Configuration:
    """Snapshot of a running machine, for inspection and tests."""

    state: str
    tapes: tuple[dict[int, str], ...]
    heads: tuple[int, ...]
    output: str
    steps: int


def parse_machine(text: str) -> MachineSpec:
    """Parse a machine file, rejecting duplicates and dangling states."""
    name = None
    work_tapes = None
    start = None
    halting: list[str] = []
    transitions: dict[tuple[str, tuple[str, ...]], Transition] = {}
    targets: set[str] = set()
    seen_transition = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head = tokens[0]
        if head in ("machine", "tapes", "start", "halt"):
            if seen_transition:
                raise MachineSyntaxError(
                    f"declaration {head!r} after transitions", lineno
                )
            if head == "machine":
                if name is not None:
                    raise MachineSyntaxError("duplicate machine declaration", lineno)
                if len(tokens) != 2:
                    raise MachineSyntaxError("machine takes one name", lineno)
                name = tokens[1]
            elif head == "tapes":
                if work_tapes is not None:
                    raise MachineSyntaxError("duplicate tapes declaration", lineno)
                try:
                    work_tapes = int(tokens[1])
                except (IndexError, ValueError):
                    raise MachineSyntaxError("tapes takes one integer", lineno)
                if work_tapes < 1:
                    raise MachineSyntaxError("need at least one work tape", lineno)
            elif head == "start":
                if start is not None:
                    raise MachineSyntaxError("duplicate start declaration", lineno)
                if len(tokens) != 2:
                    raise MachineSyntaxError("start takes one state", lineno)
                start = tokens[1]
            else:
                if halting:
                    raise MachineSyntaxError("duplicate halt declaration", lineno)
                if len(tokens) < 2:
                    raise MachineSyntaxError("halt needs at least one state", lineno)
                halting = tokens[1:]
            continue

        # transition line
        if work_tapes is None or start is None or not halting:
            raise MachineSyntaxError(
                "transition before machine/tapes/start/halt declarations", lineno
            )
        seen_transition = True
        if len(tokens) != 7 or tokens[2] != "->":
            raise MachineSyntaxError(
                "expected: <state> <syms> -> <state'> <writes> <moves> <out>", lineno
            )
        state = tokens[0]
        syms = tuple(tokens[1].split(","))
        next_state = tokens[3]
        writes = tuple(tokens[4].split(","))
        moves = tuple(tokens[5].split(","))
        out = tokens[6]
        if len(syms) != work_tapes + 1:
            raise MachineSyntaxError(
                f"expected {work_tapes + 1} read symbols, got {len(syms)}", lineno
            )
        if len(writes) != work_tapes:
            raise MachineSyntaxError(
                f"expected {work_tapes} write symbols, got {len(writes)}", lineno
            )
        if len(moves) != work_tapes + 1:
            raise MachineSyntaxError(
                f"expected {work_tapes + 1} moves, got {len(moves)}", lineno
            )
        for s in syms + writes:
            if s not in TAPE_SYMBOLS:
                raise MachineSyntaxError(f"bad tape symbol {s!r}", lineno)
        for mv in moves:
            if mv not in MOVES:
                raise MachineSyntaxError(f"bad move {mv!r}", lineno)
        if out != "-" and out not in EMITTABLE:
            raise MachineSyntaxError(f"bad output action {out!r}", lineno)
        if state in halting:
            raise MachineSyntaxError(
                f"transition from halting state {state!r}", lineno
            )
        key = (state, syms)
        if key in transitions:
            raise DeterminismError(
                f"line {lineno}: duplicate transition from state {state!r} "
                f"on symbols ({','.join(syms)})"
            )
        transitions[key] = Transition(
            next_state=next_state,
            writes=writes,
            moves=moves,
            out=None if out == "-" else out,
        )
        targets.add(next_state)

    if name is None:
        raise MachineError("missing machine declaration")
    if work_tapes is None:
        raise MachineError("missing tapes declaration")
    if start is None:
        raise MachineError("missing start declaration")
    if not halting:
        raise MachineError("missing halt declaration")

    sources = {state for state, _ in transitions}
    declared = sources | set(halting)
    for target in sorted(targets | {start}):
        if target not in declared:
            raise UndeclaredStateError(
                f"reference to undeclared state {target!r} "
                "(neither a transition source nor halting)"
            )
    states = frozenset(declared | targets | {start})
    return MachineSpec(
        name=name,
        work_tapes=work_tapes,
        start=start,
        halting=frozenset(halting),
        states=states,
        transitions=dict(transitions),
    )


def input_symbols(value) -> str:
    """Tape-0 content for a run input.

    Naturals use the canonical binary encoding; strings are written
    verbatim (this is how word inputs such as palindrome candidates are
    supplied).
    """
    if isinstance(value, str):
        for ch in value:
            if ch not in (TAPE_SYMBOLS):
                raise ValueError(f"bad input symbol {ch!r}")
        return value
    return encode_natural(int(value))


def run_machine(spec: MachineSpec, value, budget: int = DEFAULT_BUDGET) -> ExecutionTrace:
    """Run to halt or budget; budget exhaustion is not an error."""
    if budget <= 0:
        raise ValueError("budget must be positive")
    k = spec.work_tapes
    tapes: list[dict[int, str]] = [dict() for _ in range(k + 1)]
    for pos, ch in enumerate(input_symbols(value)):
        tapes[0][pos] = ch
    heads = [0] * (k + 1)
    state = spec.start
    transitions = spec.transitions
    halting = spec.halting
    events: list[tuple[int, str]] = []
    steps = 0

    halted = state in halting
    while not halted and steps < budget:
        syms = tuple(tapes[i].get(heads[i], BLANK) for i in range(k + 1))
        trans = transitions.get((state, syms))
        if trans is None:
            raise MissingTransitionError(state, syms, steps + 1)
        steps += 1
        for i in range(k):
            tapes[i + 1][heads[i + 1]] = trans.writes[i]
        for i in range(k + 1):
            heads[i] += _MOVE_DELTA[trans.moves[i]]
        if trans.out is not None:
            events.append((steps, trans.out))
        state = trans.next_state
        halted = state in halting

    return ExecutionTrace(
        input=value,
        events=tuple(events),
        total_steps=steps if halted else budget,
        halted=halted,
    )


def step_through(spec: MachineSpec, value, budget: int = DEFAULT_BUDGET):
    """Yield Configuration snapshots, one per applied transition.

    Slow inspection path; run_machine is the measurement path.
    """
    k = spec.work_tapes
    tapes: list[dict[int, str]] = [dict() for _ in range(k + 1)]
    for pos, ch in enumerate(input_symbols(value)):
        tapes[0][pos] = ch
    heads = [0] * (k + 1)
    state = spec.start
    output: list[str] = []
    steps = 0
    yield Configuration(
        state=state,
        tapes=tuple(dict(t) for t in tapes),
        heads=tuple(heads),
        output="",
        steps=0,
    )
    while state not in spec.halting and steps < budget:
        syms = tuple(tapes[i].get(heads[i], BLANK) for i in range(k + 1))
        trans = spec.transitions.get((state, syms))
        if trans is None:
            raise MissingTransitionError(state, syms, steps + 1)
        steps += 1
        for i in range(k):
            tapes[i + 1][heads[i + 1]] = trans.writes[i]
        for i in range(k + 1):
            heads[i] += _MOVE_DELTA[trans.moves[i]]
        if trans.out is not None:
            output.append(trans.out)
        state = trans.next_state
        yield Configuration(
            state=state,
            tapes=tuple(dict(t) for t in tapes),
            heads=tuple(heads),
            output="".join(output),
            steps=steps,
        )
