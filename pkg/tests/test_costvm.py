import pytest

from steplab.costvm import (
    BudgetExceeded,
    CostedProgram,
    Meter,
    charge_audit,
    primitive_cost,
    run_costed,
)
from steplab.programs import record_values
from steplab.trace import final_value


def test_constant_program_has_small_fixed_cost():
    def body(m, n):
        m.tick()
        m.emit_record(1)
        return 1

    prog = CostedProgram(name="const1", body=body)
    runs = [run_costed(prog, n, 100) for n in (1, 5, 9)]
    assert {r.trace.total_steps for r in runs} == {3}  # tick + '#' + '1'
    assert all(final_value(r.trace) == 1 for r in runs)


def test_multiplication_charges_bit_product():
    m = Meter(10**6)
    m.mul(2**10 - 1, 2**10 - 1)
    assert m.charged == 100
    m = Meter(10**6)
    m.mul(0, 0)  # zero-width operands still cost one step
    assert m.charged == 1


def test_arithmetic_charges_total_width():
    m = Meter(10**6)
    m.add(0b1111, 0b111)
    assert m.charged == 7
    m.cmp(1, 1)
    assert m.charged == 9
    m.shl(0b1111, 1)
    assert m.charged == 14


def test_factorial_incremental_records(registry):
    trace = registry.program("factorial.incremental").run(6)
    assert record_values(trace) == [1, 2, 6, 24, 120, 720]


def test_budget_exhaustion_truncates_cleanly(registry):
    handle = registry.program("factorial.direct")
    full = handle.run(9)
    cut = handle.run(9, budget=full.total_steps // 2)
    assert not cut.halted
    assert cut.total_steps == full.total_steps // 2
    assert full.events[: len(cut.events)] == cut.events
    assert all(step <= cut.total_steps for step, _ in cut.events)


def test_emit_steps_strictly_increase(registry):
    trace = registry.program("bitsum3.enumerator").run(12)
    steps = [s for s, _ in trace.events]
    assert steps == sorted(steps)
    assert len(set(steps)) == len(steps)


def test_charge_audit_clean_on_zoo_factorial(registry):
    prog = registry.program("factorial.direct").program
    report = charge_audit(prog, range(1, 21))
    assert report.clean
    assert report.violations() == []


def test_charge_audit_flags_uncharged_multiply():
    def body(m, n):
        m.tick()
        a = m.store(3)
        b = a * a  # raw arithmetic on metered values
        m.emit_record(b)
        return int(b)

    report = charge_audit(CostedProgram(name="cheat", body=body), [2])
    assert not report.clean
    assert any("mul" in v for v in report.violations())


def test_charge_audit_recomputes_from_log(registry):
    prog = registry.program("pow3.shortcut").program
    report = charge_audit(prog, [5, 9, 17])
    assert report.clean
    for entry in report.entries:
        assert entry.charged == entry.recomputed


def test_audit_log_costs_are_positive(registry):
    from steplab.costvm import Meter

    meter = Meter(10**8, audit=True)
    registry.program("eca30.direct").program.body(meter, 6)
    assert meter.log
    assert all(cost >= 1 for _, _, cost in meter.log)
    assert sum(cost for _, _, cost in meter.log) == meter.charged


def test_primitive_cost_rejects_unknown():
    with pytest.raises(Exception):
        primitive_cost("frobnicate", (3,))


def test_backend_agreement_on_increment(registry):
    tm = registry.program("increment.tm")
    cost = registry.program("increment.cost")
    ratios = []
    for n in range(0, 129):
        t1, t2 = tm.run(n), cost.run(n)
        assert final_value(t1) == final_value(t2) == n + 1
        ratios.append(t1.total_steps / t2.total_steps)
    # step counts agree within a constant factor; reported, not assumed
    spread = max(ratios) / min(ratios)
    print(f"increment tm/cost step ratio spread: {spread:.2f} "
          f"(min {min(ratios):.2f}, max {max(ratios):.2f})")
    assert spread < 50


def test_replay_preserves_exact_offsets(registry):
    from steplab.programs import call_program

    tm = registry.program("increment.tm")
    standalone = tm.run(7)
    m = Meter(10**6)
    m.tick()
    base = m.charged
    call_program(m, tm, 7)
    assert m.charged == base + standalone.total_steps
    assert tuple(m.events) == tuple(
        (s + base, sym) for s, sym in standalone.events
    )


def test_sub_call_budget_exhaustion_propagates(registry):
    from steplab.programs import call_program

    m = Meter(20)
    with pytest.raises(BudgetExceeded):
        call_program(m, registry.program("factorial.direct"), 12)
    assert m.charged == 20


def test_exact_budget_boundary(registry):
    handle = registry.program("factorial.direct")
    needed = handle.steps(8)
    assert handle.run(8, budget=needed).halted
    assert not handle.run(8, budget=needed - 1).halted
