import pytest
from hypothesis import given, settings, strategies as st

from steplab.trace import final_value
from steplab.turing import (
    DeterminismError,
    MachineSyntaxError,
    MissingTransitionError,
    UndeclaredStateError,
    parse_machine,
    run_machine,
    step_through,
)
from steplab.zoo import builtin_machine

# two states suffice for "#1": a work-tape mark distinguishes the phases
TINY = """
machine tiny
tapes 1
start q0
halt H
q0 0,_ -> q0 1 S,S #
q0 1,_ -> q0 1 S,S #
q0 _,_ -> q0 1 S,S #
q0 0,1 -> H 1 S,S 1
q0 1,1 -> H 1 S,S 1
q0 _,1 -> H 1 S,S 1
"""


def test_parse_minimal_machine():
    spec = parse_machine(TINY)
    assert spec.work_tapes == 1
    assert spec.start == "q0"
    assert spec.halting == {"H"}
    assert len({s for s, _ in spec.transitions}) == 1  # one live state


def test_tiny_emits_record_one_for_any_input():
    spec = parse_machine(TINY)
    for n in (0, 1, 5, 77):
        trace = run_machine(spec, n, 100)
        assert trace.halted
        assert trace.events == ((1, "#"), (2, "1"))
        assert final_value(trace) == 1


def test_duplicate_transition_is_determinism_error():
    text = TINY + "\nq0 0,_ -> H 1 S,S -\n"
    with pytest.raises(DeterminismError):
        parse_machine(text)


def test_undeclared_target_state_rejected():
    text = """
machine bad
tapes 1
start q0
halt H
q0 0,_ -> ghost _ S,S -
q0 1,_ -> H _ S,S -
q0 _,_ -> H _ S,S -
"""
    with pytest.raises(UndeclaredStateError):
        parse_machine(text)


def test_transition_from_halting_state_rejected():
    text = """
machine bad
tapes 1
start q0
halt H
q0 0,_ -> H _ S,S -
H 0,_ -> q0 _ S,S -
"""
    with pytest.raises(MachineSyntaxError):
        parse_machine(text)


def test_syntax_error_carries_line_number():
    with pytest.raises(MachineSyntaxError) as err:
        parse_machine("machine x\ntapes 1\nstart a\nhalt h\nbogus line here\n")
    assert "line 5" in str(err.value)


def test_missing_transition_is_loud():
    text = """
machine stuck
tapes 1
start q0
halt H
q0 0,_ -> H _ S,S -
q0 _,_ -> H _ S,S -
"""
    spec = parse_machine(text)
    with pytest.raises(MissingTransitionError):
        run_machine(spec, 1, 100)  # input "1" is not covered


def test_palindrome_file_shape():
    spec = builtin_machine("palindrome1")
    assert spec.work_tapes == 1
    assert spec.halting == {"ACC", "REJ"}


@pytest.mark.parametrize("word,expected", [
    ("", 1), ("0", 1), ("0110", 1), ("10", 0), ("0101", 0), ("1001001", 1),
])
def test_palindrome_machines_decide(word, expected):
    for name in ("palindrome1", "palindrome2"):
        trace = run_machine(builtin_machine(name), word, 10**6)
        assert trace.halted
        assert final_value(trace) == expected


def test_palindrome_one_tape_is_quadratic_two_tape_linear():
    p1, p2 = builtin_machine("palindrome1"), builtin_machine("palindrome2")
    t1 = {L: run_machine(p1, "1" * L, 10**7).total_steps for L in (64, 128, 256)}
    t2 = {L: run_machine(p2, "1" * L, 10**7).total_steps for L in (64, 128, 256)}
    # doubling the input roughly quadruples one-tape cost, doubles two-tape
    assert 3.5 <= t1[128] / t1[64] <= 4.5
    assert 3.5 <= t1[256] / t1[128] <= 4.5
    assert 1.8 <= t2[128] / t2[64] <= 2.2


@pytest.mark.parametrize("n", [0, 1, 7, 12, 255, 2**20 - 1])
def test_increment_machine_against_arithmetic(n):
    trace = run_machine(builtin_machine("increment"), n, 10**6)
    assert trace.halted
    assert final_value(trace) == n + 1


@given(st.integers(min_value=0, max_value=10**6), st.integers(min_value=1, max_value=400))
@settings(max_examples=40, deadline=None)
def test_determinism_and_budget_monotonicity(n, budget):
    spec = builtin_machine("increment")
    a = run_machine(spec, n, budget)
    b = run_machine(spec, n, budget)
    assert a == b
    bigger = run_machine(spec, n, budget + 50)
    if a.halted:
        assert bigger == a
    else:
        assert a.total_steps == budget
        assert bigger.events[: len(a.events)] == a.events


def test_monotone_output_grows_at_most_one_per_step():
    spec = builtin_machine("increment")
    previous = ""
    for config in step_through(spec, 11, 10**4):
        assert config.output.startswith(previous)
        assert len(config.output) - len(previous) <= 1
        previous = config.output
    assert previous == "#1100"


def test_budget_exhaustion_is_not_an_error():
    spec = builtin_machine("palindrome1")
    trace = run_machine(spec, "1" * 64, 100)
    assert not trace.halted
    assert trace.total_steps == 100
