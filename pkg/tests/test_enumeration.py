import math

import pytest
from hypothesis import given, settings, strategies as st

from steplab.costvm import Meter
from steplab.enumeration import (
    EnumerationViolation,
    NoCommitWitness,
    commit_steps,
    halt_slack,
    nlogn_evidence,
    profile_independence,
    profiles_to_csv,
    verify_enumerator,
)
from steplab.programs import Oracle, cost_handle
from steplab.trace import ExecutionTrace, encode_natural

FACT = Oracle("fact", math.factorial)


def trace_of(symbols, halted=True, gaps=None):
    """Events at consecutive steps unless a per-symbol gap list is given."""
    events = []
    step = 0
    for i, sym in enumerate(symbols):
        step += 1 + (gaps[i] if gaps else 0)
        events.append((step, sym))
    return ExecutionTrace(input=0, events=tuple(events), total_steps=step, halted=halted)


def test_commit_steps_at_final_bit_of_each_record():
    trace = trace_of("#1#10#110")
    assert commit_steps(trace, FACT, 3) == (2, 5, 9)


def test_commit_steps_missing_first_value():
    trace = trace_of("#110")
    with pytest.raises(NoCommitWitness) as err:
        commit_steps(trace, FACT, 3)
    assert err.value.i == 1


def test_single_commit():
    assert commit_steps(trace_of("#1"), FACT, 1) == (2,)


def test_commits_can_reuse_a_quiet_stretch():
    ones = Oracle("ones", lambda n: 1)
    # one record "#1" then five silent steps: commits may sit inside them
    trace = trace_of("#1", gaps=[0, 0])
    trace = ExecutionTrace(trace.input, trace.events, total_steps=7, halted=True)
    assert commit_steps(trace, ones, 3) == (2, 3, 4)


@given(
    st.lists(st.integers(min_value=0, max_value=40), min_size=1, max_size=8),
    st.data(),
)
@settings(max_examples=60, deadline=None)
def test_greedy_finds_planted_witness(values, data):
    """Traces built around a planted valid commit sequence always verify."""
    oracle = Oracle("planted", lambda n: values[n - 1])
    symbols = []
    for v in values:
        # junk records use values beyond the planted range, so the planted
        # sequence remains a valid witness
        for _ in range(data.draw(st.integers(min_value=0, max_value=2))):
            symbols.extend("#" + encode_natural(41 + data.draw(st.integers(0, 9))))
        symbols.extend("#" + encode_natural(v))
    trace = trace_of("".join(symbols))
    commits = commit_steps(trace, oracle, len(values))
    assert list(commits) == sorted(commits)
    assert len(set(commits)) == len(values)


def test_verify_enumerator_passes_factorial(registry):
    handle = registry.program("factorial.incremental")
    profiles = verify_enumerator(handle, registry.oracle("factorial"), 12)
    assert [p.n for p in profiles] == list(range(1, 13))
    for p in profiles:
        assert list(p.commit_steps) == sorted(p.commit_steps)
        assert all(t >= 1 for t in p.deltas)
        assert sum(p.deltas) == p.commit_steps[-1] <= p.total
        assert p.total >= p.n  # at least one step per enumerated value


def test_verify_rejects_direct_computer(registry):
    handle = registry.program("factorial.direct")
    with pytest.raises(EnumerationViolation) as err:
        verify_enumerator(handle, registry.oracle("factorial"), 3)
    assert err.value.kind == "no-commit-witness"


def test_verify_rejects_wrong_final_value(registry):
    wrong = Oracle("wrong", lambda n: math.factorial(n) + 1)
    with pytest.raises(EnumerationViolation) as err:
        verify_enumerator(registry.program("factorial.incremental"), wrong, 4)
    assert err.value.kind in ("final-value", "no-commit-witness")


def test_profile_independence_of_combinator_enumerators(registry):
    for name in ("factorial.incremental", "factorial.restart"):
        profiles = verify_enumerator(
            registry.program(name), registry.oracle("factorial"), 10
        )
        assert profile_independence(profiles).independent


def test_adversarial_padding_breaks_independence():
    oracle = Oracle("ident", lambda n: n)

    def body(m: Meter, n):
        m.tick()
        if int(n) % 2 == 0:
            m.tick()  # extra work only when the target is even
        for i in m.count(1, n):
            m.emit_record(i)
        return int(n)

    handle = cost_handle("padded", "ident", "enumerator", body)
    profiles = verify_enumerator(handle, oracle, 6)
    report = profile_independence(profiles)
    assert not report.independent
    assert report.mismatch is not None


def test_halt_slack_constant_for_drivers(registry):
    for name in ("factorial.incremental", "factorial.restart"):
        profiles = verify_enumerator(
            registry.program(name), registry.oracle("factorial"), 10
        )
        assert len(set(halt_slack(profiles))) == 1


def test_nlogn_evidence_positive_for_growing_values(registry):
    profiles = verify_enumerator(
        registry.program("factorial.incremental"), registry.oracle("factorial"), 64
    )
    evidence = nlogn_evidence(profiles)
    assert evidence.tail_min > 0
    assert not evidence.vanishing


def test_nlogn_evidence_flags_constant_values(registry):
    profiles = verify_enumerator(
        registry.program("one.enumerator"), registry.oracle("one"), 64
    )
    evidence = nlogn_evidence(profiles)
    assert evidence.vanishing  # f(n) = 1 breaks the f(n) >= n premise


def test_nlogn_requires_range_to_64(registry):
    profiles = verify_enumerator(
        registry.program("factorial.incremental"), registry.oracle("factorial"), 12
    )
    with pytest.raises(ValueError):
        nlogn_evidence(profiles)


def test_profiles_csv_shape(registry):
    profiles = verify_enumerator(
        registry.program("factorial.incremental"), registry.oracle("factorial"), 4
    )
    csv = profiles_to_csv(profiles)
    lines = csv.strip().splitlines()
    assert lines[0] == "n,i,k_n_i,t_i,total"
    assert len(lines) == 1 + 1 + 2 + 3 + 4
