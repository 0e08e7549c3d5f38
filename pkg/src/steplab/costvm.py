"""Cost-model virtual machine: host-implemented programs with charged steps.

Hand-writing Turing machines for big-number arithmetic, cellular automata
rows, or Game of Life sweeps is impractical, so this second backend runs
ordinary Python procedures against a declared cost table and counts
charged steps instead of transitions.  The claims this laboratory checks
are order-of-growth claims and are robust under simulation between
machine models up to constant and polynomial factors, so conclusions
drawn from charged steps transfer to the Turing machine model at the
same order of growth.  Wall-clock time is never measured.

Cost table (every charge is a strictly positive integer):

    add / sub / cmp / shl / shr   total bit length of the two operands
    mul / divmod                  product of the operand bit lengths
    load / store                  bit length of the value moved
    emit                          1 per emitted symbol
    tick (control flow)           1

Operands of bit length zero are charged as length one.  Values are
arbitrary-precision; charges always follow actual bit lengths, never a
machine word size, because several of the bounds under test hinge on the
cost of writing numbers down.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Callable

from .trace import (
    DEFAULT_BUDGET,
    EMITTABLE,
    HASH,
    ExecutionTrace,
    RecordStructureError,
    encode_natural,
)


class BudgetExceeded(Exception):
    """The run hit its step budget; reported as halted=False, not an error."""


class ChargeError(Exception):
    """A primitive tried to charge a non-positive cost."""


def primitive_cost(name: str, widths: tuple[int, ...]) -> int:
    """Recompute the charge for a logged primitive from the cost table."""
    if name in ("add", "sub", "cmp", "shl", "shr"):
        return max(1, widths[0] + widths[1])
    if name in ("mul", "div"):
        return max(1, widths[0]) * max(1, widths[1])
    if name in ("load", "store"):
        return max(1, widths[0])
    if name in ("emit", "tick", "loop"):
        return 1
    if name == "run":
        # replayed steps of a sub-machine; the chunk size is the charge
        return widths[0]
    raise ChargeError(f"unknown primitive {name!r}")


_AUDIT_METER: "Meter | None" = None


class AuditedInt(int):
    """Value wrapper handed out by an auditing meter.

    Raw Python arithmetic on these records an uncharged-primitive
    violation; all arithmetic is supposed to flow through the meter.
    Equality, hashing and truthiness stay silent so values can still be
    used as dict keys and in assertions.
    """

    def _flag(self, op: str):
        if _AUDIT_METER is not None:
            _AUDIT_METER.violations.append(op)

    def _binop(self, other, op, fn):
        self._flag(op)
        return AuditedInt(fn(int(self), int(other)))

    def __add__(self, other):
        return self._binop(other, "add", lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binop(other, "sub", lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binop(other, "sub", lambda a, b: b - a)

    def __mul__(self, other):
        return self._binop(other, "mul", lambda a, b: a * b)

    __rmul__ = __mul__

    def __floordiv__(self, other):
        return self._binop(other, "div", lambda a, b: a // b)

    def __rfloordiv__(self, other):
        return self._binop(other, "div", lambda a, b: b // a)

    def __mod__(self, other):
        return self._binop(other, "div", lambda a, b: a % b)

    def __rmod__(self, other):
        return self._binop(other, "div", lambda a, b: b % a)

    def __lshift__(self, other):
        return self._binop(other, "shl", lambda a, b: a << b)

    def __rshift__(self, other):
        return self._binop(other, "shr", lambda a, b: a >> b)

    def __pow__(self, other, mod=None):
        self._flag("mul")
        return AuditedInt(pow(int(self), int(other), mod))

    def __lt__(self, other):
        self._flag("cmp")
        return int(self) < int(other)

    def __le__(self, other):
        self._flag("cmp")
        return int(self) <= int(other)

    def __gt__(self, other):
        self._flag("cmp")
        return int(self) > int(other)

    def __ge__(self, other):
        self._flag("cmp")
        return int(self) >= int(other)


class Meter:
    """Charge accounting plus the output tape for one run.

    Emitted events are (step, symbol) with step equal to the charged
    total at emission time, so event steps are strictly increasing.
    """

    def __init__(self, budget: int = DEFAULT_BUDGET, audit: bool = False):
        if budget <= 0:
            raise ValueError("budget must be positive")
        self.budget = budget
        self.charged = 0
        self.events: list[tuple[int, str]] = []
        self.audit = audit
        self.log: list[tuple[str, tuple[int, ...], int]] = []
        self.violations: list[str] = []
        self._sinks: list[Callable[[int, str], None]] = []

    # -- accounting ----------------------------------------------------

    def _spend(self, name: str, widths: tuple[int, ...] = ()) -> None:
        cost = primitive_cost(name, widths)
        if cost < 1:
            raise ChargeError(f"{name} charged {cost}")
        if self.audit:
            self.log.append((name, widths, cost))
        if self.charged + cost > self.budget:
            self.charged = self.budget
            raise BudgetExceeded(f"budget {self.budget} exhausted")
        self.charged += cost

    def _wrap(self, value: int) -> int:
        return AuditedInt(value) if self.audit else value

    # -- arithmetic primitives ------------------------------------------

    def add(self, a, b) -> int:
        a, b = int(a), int(b)
        self._spend("add", (a.bit_length(), b.bit_length()))
        return self._wrap(a + b)

    def sub(self, a, b) -> int:
        a, b = int(a), int(b)
        self._spend("sub", (a.bit_length(), b.bit_length()))
        return self._wrap(a - b)

    def cmp(self, a, b) -> int:
        a, b = int(a), int(b)
        self._spend("cmp", (a.bit_length(), b.bit_length()))
        return (a > b) - (a < b)

    def shl(self, a, k) -> int:
        a, k = int(a), int(k)
        self._spend("shl", (a.bit_length(), k.bit_length()))
        return self._wrap(a << k)

    def shr(self, a, k) -> int:
        a, k = int(a), int(k)
        self._spend("shr", (a.bit_length(), k.bit_length()))
        return self._wrap(a >> k)

    def mul(self, a, b) -> int:
        a, b = int(a), int(b)
        self._spend("mul", (a.bit_length(), b.bit_length()))
        return self._wrap(a * b)

    def divmod(self, a, b) -> tuple[int, int]:
        a, b = int(a), int(b)
        self._spend("div", (a.bit_length(), b.bit_length()))
        q, r = divmod(a, b)
        return self._wrap(q), self._wrap(r)

    def load(self, value) -> int:
        value = int(value)
        self._spend("load", (value.bit_length(),))
        return self._wrap(value)

    def store(self, value) -> int:
        value = int(value)
        self._spend("store", (value.bit_length(),))
        return self._wrap(value)

    def tick(self) -> None:
        self._spend("tick")

    def count(self, lo: int, hi: int):
        """Charged counting loop: one flat charge per round plus one for
        the final bound check, so driver overhead is affine in the trip
        count and independent of operand sizes."""
        i = int(lo)
        hi = int(hi)
        while True:
            self._spend("loop")
            if i > hi:
                return
            yield i
            i += 1

    # -- output ----------------------------------------------------------

    def emit(self, sym: str) -> None:
        if sym not in EMITTABLE:
            raise ValueError(f"cannot emit {sym!r}")
        self._spend("emit")
        event = (self.charged, sym)
        if self._sinks:
            self._sinks[-1](*event)
        else:
            self.events.append(event)

    def emit_record(self, value) -> None:
        """Emit '#' then the canonical encoding, one charge per symbol."""
        self.emit(HASH)
        for bit in encode_natural(int(value)):
            self.emit(bit)

    @contextmanager
    def redirect(self, sink: Callable[[int, str], None]):
        """Route emissions to sink; charges are unaffected."""
        self._sinks.append(sink)
        try:
            yield
        finally:
            self._sinks.pop()

    @contextmanager
    def suspended_redirect(self):
        """Temporarily lift the innermost redirect (for interleaved output)."""
        sink = self._sinks.pop()
        try:
            yield
        finally:
            self._sinks.append(sink)

    def fallthrough(self) -> Callable[[int, str], None]:
        """Where emissions currently land; for tee-style sinks."""
        if self._sinks:
            return self._sinks[-1]
        return lambda step, sym: self.events.append((step, sym))

    # -- sub-machine replay ----------------------------------------------

    def replay(self, trace: ExecutionTrace) -> None:
        """Fold a finished machine trace into this run, step for step.

        The sub-run's emissions land at exactly their original offsets
        relative to the charge total at call time, and the total charge
        added equals the sub-run's total_steps.
        """
        progress = 0
        for step, sym in trace.events:
            if step - 1 > progress:
                self._spend("run", (step - 1 - progress,))
                progress = step - 1
            self.emit(sym)
            progress += 1
        if trace.total_steps > progress:
            self._spend("run", (trace.total_steps - progress,))
        if not trace.halted:
            raise BudgetExceeded("sub-machine exhausted the remaining budget")

    @property
    def remaining(self) -> int:
        return self.budget - self.charged


class RecordAssembler:
    """Sink that reassembles '#'-separated records from routed emissions.

    on_record fires for each interior record as soon as the '#' opening
    the next one arrives; the final record is only collected by
    finish(), since it closes at halt.  With passthrough set, events are
    also delivered onward, so the output stays visible while being read.
    """

    def __init__(self, on_record=None, passthrough=None):
        self.on_record = on_record
        self.passthrough = passthrough
        self.records: list[str] = []
        self._bits: list[str] | None = None

    def __call__(self, step: int, sym: str) -> None:
        if self.passthrough is not None:
            self.passthrough(step, sym)
        if sym == HASH:
            if self._bits is not None:
                bits = "".join(self._bits)
                self.records.append(bits)
                if self.on_record is not None:
                    self.on_record(len(self.records), bits)
            self._bits = []
        else:
            if self._bits is None:
                raise RecordStructureError("bit emitted before any record separator")
            self._bits.append(sym)

    def finish(self) -> None:
        if self._bits is not None:
            self.records.append("".join(self._bits))
            self._bits = None

    @property
    def count(self) -> int:
        return len(self.records)


@dataclass(frozen=True)
class CostedProgram:
    """A host procedure with declared purpose, run against the cost table.

    body(meter, *inputs) must route every primitive through the meter and
    return the computed natural number; results are also emitted as
    output records where the program's contract says so.
    """

    name: str
    body: Callable[..., int]
    purpose: str = ""
    arity: int = 1
    domain: Callable[[int], bool] | None = None
    domain_label: str = "all"

    def accepts(self, value: int) -> bool:
        return self.domain is None or self.domain(value)


@dataclass(frozen=True)
class CostedRun:
    trace: ExecutionTrace
    value: int | None


def _as_inputs(value) -> tuple:
    return value if isinstance(value, tuple) else (value,)


def run_costed(
    program: CostedProgram, value, budget: int = DEFAULT_BUDGET
) -> CostedRun:
    """Run a costed program; budget exhaustion yields halted=False."""
    meter = Meter(budget)
    halted = True
    result: int | None = None
    try:
        result = program.body(meter, *_as_inputs(value))
        if result is not None:
            result = int(result)
    except BudgetExceeded:
        halted = False
    trace = ExecutionTrace(
        input=value,
        events=tuple(meter.events),
        total_steps=meter.charged if halted else budget,
        halted=halted,
    )
    return CostedRun(trace=trace, value=result)


@dataclass(frozen=True)
class AuditEntry:
    input: object
    charged: int
    recomputed: int
    uncharged: tuple[str, ...]

    @property
    def clean(self) -> bool:
        return self.charged == self.recomputed and not self.uncharged


@dataclass
class AuditReport:
    program: str
    entries: list[AuditEntry] = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return all(e.clean for e in self.entries)

    def violations(self) -> list[str]:
        out = []
        for e in self.entries:
            for op in e.uncharged:
                out.append(f"input {e.input}: uncharged {op}")
            if e.charged != e.recomputed:
                out.append(
                    f"input {e.input}: charged {e.charged} != recomputed {e.recomputed}"
                )
        return out


def charge_audit(
    program: CostedProgram, inputs, budget: int = DEFAULT_BUDGET
) -> AuditReport:
    """Replay the primitive log against the cost table and flag raw ops.

    For every sample input the program runs with an auditing meter: the
    meter logs each primitive with its operand widths, the charged total
    is compared with an independent recomputation from the table, and
    any arithmetic performed on metered values without a charge is
    reported by primitive name.  Audit runs are single-threaded.
    """
    global _AUDIT_METER
    report = AuditReport(program=program.name)
    for value in inputs:
        meter = Meter(budget, audit=True)
        _AUDIT_METER = meter
        try:
            program.body(meter, *_as_inputs(value))
        finally:
            _AUDIT_METER = None
        recomputed = sum(primitive_cost(name, widths) for name, widths, _ in meter.log)
        report.entries.append(
            AuditEntry(
                input=value,
                charged=meter.charged,
                recomputed=recomputed,
                uncharged=tuple(meter.violations),
            )
        )
    return report
