"""Machine combinators: drivers that build enumerators from components.

Components run inside the enclosing charged run, so a sub-program
contributes exactly its standalone step count; driver bookkeeping is
charged at a flat per-round rate (the counting loop), which a machine
can realize with a unary countdown tape.  Glue constants are therefore
affine in the trip count and measured, never assumed.
"""

from __future__ import annotations

from .approximation import ApproximationWitness, WitnessError
from .costvm import Meter, RecordAssembler
from .programs import ProgramHandle, call_program, cost_handle
from .trace import DEFAULT_BUDGET, decode_bits, encode_natural


def restart_enumerator(inner: ProgramHandle, name: str | None = None) -> ProgramHandle:
    """Enumerate f by calling a program for f on 1, 2, ..., n in turn.

    Every value is recomputed from scratch, so the step count is the sum
    of the component's standalone counts plus flat per-call glue.  Works
    for any halting program; the component emits its own "#f(i)" record.
    """

    def body(m: Meter, n):
        m.tick()
        last = None
        for i in m.count(1, n):
            last = call_program(m, inner, i)
        return last

    return cost_handle(
        name or f"restart({inner.name})",
        inner.function,
        "enumerator",
        body,
        purpose=f"enumerate {inner.function} by restarting {inner.name} per value",
    )


def incremental_enumerator(
    base_value: int,
    step: ProgramHandle,
    function: str | None = None,
    name: str | None = None,
) -> ProgramHandle:
    """Enumerate f from f(1) and a step program computing f(i) from (i, f(i-1)).

    The value stays in place between rounds; only the step program's own
    charges and the record emissions accrue, so commit steps do not
    depend on the target n.
    """
    fn = function or step.function

    def body(m: Meter, n):
        m.tick()
        v = m.store(base_value)
        m.emit_record(v)
        for i in m.count(2, n):
            v = call_program(m, step, i, int(v))
            m.emit_record(v)
        return int(v)

    return cost_handle(
        name or f"incremental({fn})",
        fn,
        "enumerator",
        body,
        purpose=f"enumerate {fn} by stepping from each value to the next",
    )


def compose_serial(outer: ProgramHandle, inner: ProgramHandle, name: str | None = None) -> ProgramHandle:
    """Run inner, then outer on inner's result.

    The step count is the sum of the two standalone counts plus a one
    tick handoff; the result value is outer's.  Both components' record
    streams appear in the output, inner's first.
    """

    def body(m: Meter, n):
        m.tick()
        v = call_program(m, inner, n)
        return int(call_program(m, outer, int(v)))

    return cost_handle(
        name or f"{outer.name}.after.{inner.name}",
        f"{outer.function}_of_{inner.function}",
        "direct",
        body,
        purpose=f"feed {inner.name}'s result to {outer.name}",
    )


def daughter_machine(witness: ApproximationWitness, name: str | None = None) -> ProgramHandle:
    """Build an enumerator from an approximation witness.

    The machine M runs with its emissions suppressed (still charged);
    whenever a designated record completes, the helper decodes it and
    the canonical "#f(i)" is emitted in its place, so the output is the
    canonical record stream.  Per interleave the charge is exactly the
    helper's standalone cost plus the canonical emission; the dispatch
    itself is free, so the total satisfies

        T(daughter(n)) = T(M(n)) + sum_i interleave_cost(n, i) + c

    with c the one-tick setup constant.  daughter_interleave_costs
    recomputes the per-i terms independently for the exactness check.
    """

    def body(m: Meter, n):
        n = int(n)
        m.tick()
        state = {"next_i": 1, "result": None}

        def fire(i: int, bits: str) -> None:
            r = decode_bits(bits)
            with m.suspended_redirect():
                v = int(witness.helper.program.body(m, n, i, r))
                m.emit_record(v)
            if i == n:
                state["result"] = v

        def on_record(idx: int, bits: str) -> None:
            while state["next_i"] <= n and witness.rho.interior_match(
                n, state["next_i"], idx
            ):
                fire(state["next_i"], bits)
                state["next_i"] += 1

        asm = RecordAssembler(on_record=on_record)
        with m.redirect(asm):
            call_program(m, witness.machine, n)
            asm.finish()
            if not asm.records:
                raise WitnessError(f"{witness.machine.name} emitted no records")
            total = asm.count
            while state["next_i"] <= n and witness.rho.final_match(
                n, state["next_i"], total
            ):
                fire(state["next_i"], asm.records[-1])
                state["next_i"] += 1
        if state["next_i"] <= n:
            raise WitnessError(
                f"designation rule never reached i={state['next_i']} "
                f"(machine emitted {total} records)"
            )
        return state["result"]

    return cost_handle(
        name or f"daughter({witness.name})",
        witness.function,
        "enumerator",
        body,
        purpose=f"enumerate {witness.function} through the {witness.name} witness",
    )


def daughter_interleave_costs(
    witness: ApproximationWitness, n: int, budget: int = DEFAULT_BUDGET
) -> list[int]:
    """Independent per-i interleave costs: helper standalone + emission.

    Computed from a fresh run of M and fresh helper meters, not from the
    daughter itself, so the timing identity check is two-sided.
    """
    from .trace import split_records

    done = witness.machine.compute(n, budget)
    records = split_records(done.trace)
    total = len(records)
    costs = []
    for i in range(1, n + 1):
        idx = witness.rho.designate(n, i, total)
        r = records[idx - 1].value()
        meter = Meter(budget)
        v = int(witness.helper.program.body(meter, n, i, r))
        costs.append(meter.charged + 1 + len(encode_natural(v)))
    return costs


def interleave_trivial(
    inner: ProgramHandle, function: str | None = None
) -> tuple[ProgramHandle, ProgramHandle]:
    """Stretch an enumerator for f into one for g with trivial even values:
    g(2i-1) = f(i) and g(2i) = 1.

    Returns (enumerator for g, shortcut): the enumerator replays the f
    enumeration up to ceil(n/2), re-emitting each value canonically and
    injecting "#1" after it; the shortcut computes g at even arguments
    in O(log n) charged steps (one parity division plus the emission).
    Requires inner's i-th record to decode to f(i), which holds for all
    combinator-built enumerators.
    """
    fn = function or f"interleave_{inner.function}"

    def gbody(m: Meter, n):
        n = int(n)
        m.tick()
        last = {"v": None}

        def put(value: int) -> None:
            m.emit_record(value)
            last["v"] = int(value)

        def on_record(idx: int, bits: str) -> None:
            with m.suspended_redirect():
                put(decode_bits(bits))
                if 2 * idx <= n:
                    put(1)

        asm = RecordAssembler(on_record=on_record)
        with m.redirect(asm):
            call_program(m, inner, (n + 1) // 2)
        asm.finish()
        idx = asm.count
        put(decode_bits(asm.records[-1]))
        if 2 * idx <= n:
            put(1)
        return last["v"]

    enumerator = cost_handle(
        f"interleave({inner.name})",
        fn,
        "enumerator",
        gbody,
        purpose=f"enumerate {fn}: odd positions from {inner.function}, even positions 1",
    )

    def shortcut_body(m: Meter, n):
        _, r = m.divmod(n, 2)
        if int(r) != 0:
            raise ValueError(f"{fn} shortcut is defined on even inputs only")
        m.emit_record(1)
        return 1

    shortcut = cost_handle(
        f"{fn}.even_shortcut",
        fn,
        "shortcut",
        shortcut_body,
        purpose=f"compute {fn} at even arguments directly",
        domain=lambda v: v % 2 == 0,
        domain_label="even",
    )
    return enumerator, shortcut
