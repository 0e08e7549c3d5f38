"""Program handles, reference oracles, and the named-program registry.

A ProgramHandle is an immutable reference to something runnable on one
of the two backends.  Handles share the trace model, so verifiers and
the measurement harness never care which backend is underneath.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .costvm import BudgetExceeded, CostedProgram, Meter, run_costed
from .trace import DEFAULT_BUDGET, ExecutionTrace, final_value, split_records
from .turing import MachineSpec, run_machine


class UnknownNameError(KeyError):
    pass


class Oracle:
    """Independent slow reference for a function on the naturals (n >= 1).

    Results are cached; repeated evaluations agree by construction.
    """

    def __init__(self, name: str, fn):
        self.name = name
        self._fn = fn
        self._cache: dict[int, int] = {}

    def __call__(self, n: int) -> int:
        n = int(n)
        if n < 1:
            raise ValueError(f"oracle {self.name} defined for n >= 1, got {n}")
        if n not in self._cache:
            self._cache[n] = int(self._fn(n))
        return self._cache[n]

    def __repr__(self):
        return f"Oracle({self.name})"


@dataclass(frozen=True)
class CompletedRun:
    trace: ExecutionTrace
    value: int | None

    @property
    def steps(self) -> int:
        return self.trace.total_steps


@dataclass(frozen=True)
class ProgramHandle:
    """Immutable reference to a runnable program on either backend."""

    name: str
    function: str
    kind: str  # direct | enumerator | step | shortcut | helper
    backend: str  # "cost" | "tm"
    program: CostedProgram | None = None
    machine: MachineSpec | None = None

    def __post_init__(self):
        if self.backend == "cost" and self.program is None:
            raise ValueError("cost handle needs a program")
        if self.backend == "tm" and self.machine is None:
            raise ValueError("tm handle needs a machine")

    def accepts(self, value: int) -> bool:
        if self.backend == "cost":
            return self.program.accepts(value)
        return True

    @property
    def label(self) -> str:
        """Registry-style display name, e.g. "factorial.incremental"."""
        if self.name.startswith(self.function) or self.function == "helper":
            return self.name
        return f"{self.function}.{self.name}"

    @property
    def domain_label(self) -> str:
        if self.backend == "cost":
            return self.program.domain_label
        return "all"

    def compute(self, value, budget: int = DEFAULT_BUDGET) -> CompletedRun:
        if self.backend == "cost":
            run = run_costed(self.program, value, budget)
            return CompletedRun(trace=run.trace, value=run.value)
        trace = run_machine(self.machine, value, budget)
        result = final_value(trace) if (trace.halted and trace.events) else None
        return CompletedRun(trace=trace, value=result)

    def run(self, value, budget: int = DEFAULT_BUDGET) -> ExecutionTrace:
        return self.compute(value, budget).trace

    def steps(self, value, budget: int = DEFAULT_BUDGET) -> int:
        done = self.compute(value, budget)
        if not done.trace.halted:
            raise BudgetExceeded(
                f"{self.name} did not halt on {value} within {budget} steps"
            )
        return done.trace.total_steps

    def value(self, value, budget: int = DEFAULT_BUDGET) -> int:
        done = self.compute(value, budget)
        if not done.trace.halted:
            raise BudgetExceeded(
                f"{self.name} did not halt on {value} within {budget} steps"
            )
        if done.value is None:
            raise ValueError(f"{self.name} produced no result on {value}")
        return done.value


def cost_handle(
    name: str,
    function: str,
    kind: str,
    body,
    purpose: str = "",
    arity: int = 1,
    domain=None,
    domain_label: str = "all",
) -> ProgramHandle:
    return ProgramHandle(
        name=name,
        function=function,
        kind=kind,
        backend="cost",
        program=CostedProgram(
            name=name,
            body=body,
            purpose=purpose,
            arity=arity,
            domain=domain,
            domain_label=domain_label,
        ),
    )


def tm_handle(name: str, function: str, kind: str, machine: MachineSpec) -> ProgramHandle:
    return ProgramHandle(
        name=name, function=function, kind=kind, backend="tm", machine=machine
    )


def call_program(meter: Meter, handle: ProgramHandle, *inputs) -> int:
    """Run a component program inside an enclosing costed run.

    Cost programs share the meter, so their charges and emissions accrue
    exactly as in a standalone run.  Machine runs are replayed step for
    step: the charge added equals the machine's step count and each
    emission lands at its original offset.
    """
    if handle.backend == "cost":
        return int(handle.program.body(meter, *inputs))
    if meter.remaining <= 0:
        raise BudgetExceeded("no budget left for sub-machine call")
    trace = run_machine(handle.machine, inputs[0], meter.remaining)
    meter.replay(trace)
    return final_value(trace)


@dataclass
class Registry:
    """Named oracles and programs addressable as `<function>.<program>`."""

    oracles: dict[str, Oracle] = field(default_factory=dict)
    programs: dict[str, ProgramHandle] = field(default_factory=dict)
    checked_n_max: dict[str, int] = field(default_factory=dict)

    def add_oracle(self, oracle: Oracle) -> Oracle:
        self.oracles[oracle.name] = oracle
        return oracle

    def add_program(self, handle: ProgramHandle, checked_n_max: int = 0) -> ProgramHandle:
        key = f"{handle.function}.{handle.name}"
        self.programs[key] = handle
        if checked_n_max:
            self.checked_n_max[key] = checked_n_max
        return handle

    def oracle(self, function: str) -> Oracle:
        try:
            return self.oracles[function]
        except KeyError:
            raise UnknownNameError(f"no oracle for function {function!r}")

    def program(self, name: str) -> ProgramHandle:
        try:
            return self.programs[name]
        except KeyError:
            raise UnknownNameError(f"no program named {name!r}")

    def programs_for(self, function: str, kind: str | None = None) -> list[ProgramHandle]:
        out = [
            h
            for key, h in sorted(self.programs.items())
            if h.function == function and (kind is None or h.kind == kind)
        ]
        return out

    def functions(self) -> list[str]:
        return sorted(self.oracles)


def record_values(trace: ExecutionTrace) -> list[int]:
    """Decoded values of all closed-or-final records of a trace."""
    return [r.value() for r in split_records(trace)]
