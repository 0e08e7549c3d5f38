"""Acceptance suite: one test per criterion, each printing a verdict line.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines.
"""

import math

import pytest

from steplab.analogy import builtin_witnesses, compose_witness, reflexive_witness, timing_audit, verify_analogy
from steplab.analysis import convex_sum_bound, registry_best, PreconditionError
from steplab.approximation import CONSISTENT, FALSIFIED, based_machine, verify_approximation
from steplab.bounds import Bound
from steplab.combinators import daughter_interleave_costs, daughter_machine
from steplab.enumeration import halt_slack, profile_independence, verify_enumerator
from steplab.experiments import (
    builtin_approximations,
    eca_cost_fit,
    growth_floor,
    interleave_demo,
    palindrome_gap,
)
from steplab.programs import record_values
from steplab.zoo import builtin_pattern, oracle_bitsum3, zoo_entries
from steplab.automata import life_step, normalized


def ok(num, text):
    print(f"ACCEPTANCE {num:>2} PASS: {text}")


def test_criterion_01_palindrome_model_gap():
    gap = palindrome_gap()
    e1 = gap["palindrome1"][1].exponent
    e2 = gap["palindrome2"][1].exponent
    assert 1.8 <= e1 <= 2.2
    assert 0.85 <= e2 <= 1.2
    ok(1, f"palindrome exponents: one-tape {e1:.2f} in [1.8,2.2], "
          f"two-tape {e2:.2f} in [0.85,1.2]")


def test_criterion_02_enumerator_verification(registry):
    oracle = registry.oracle("factorial")
    slacks = {}
    for name in ("factorial.restart", "factorial.incremental"):
        profiles = verify_enumerator(registry.program(name), oracle, 12)
        assert profile_independence(profiles).independent
        slack = set(halt_slack(profiles))
        assert len(slack) == 1 and max(slack) <= 32
        for p in profiles:
            assert sum(p.deltas) == p.commit_steps[-1]
        slacks[name] = slack.pop()
    ok(2, f"restart and incremental factorial enumerators verified to n=12, "
          f"independent profiles, halt slack {slacks} <= 32")


def test_criterion_03_interleaved_composition_timing_exact(registry):
    for name, witness in builtin_approximations(registry).items():
        daughter = daughter_machine(witness)
        residuals = set()
        for n in range(2, 13):
            lhs = daughter.steps(n)
            rhs = witness.machine.steps(n) + sum(daughter_interleave_costs(witness, n))
            residuals.add(abs(lhs - rhs))
        assert len(residuals) == 1, f"{name}: residuals {residuals}"
    ok(3, "daughter timing identity exact with one constant per witness over n=2..12")


def test_criterion_04_daughter_ratio_bounded(registry):
    worst = 0.0
    for witness in builtin_approximations(registry).values():
        daughter = daughter_machine(witness)
        for n in range(4, 13):
            ratio = daughter.steps(n) / witness.machine.steps(n)
            assert 1.0 <= ratio <= 4.0
            worst = max(worst, ratio)
    ok(4, f"daughter/machine step ratio within [1, 4] (worst {worst:.2f})")


def test_criterion_05_based_machine_sandwich(registry):
    oracle = registry.oracle("factorial")
    for name, witness in builtin_approximations(registry).items():
        verify_approximation(witness, oracle, 12)
        based = based_machine(witness)
        for n in range(1, 13):
            t_m = witness.machine.steps(n)
            t_b = based.steps(n)
            assert t_m <= t_b <= t_m + witness.bound(n) + 8, (name, n)
    ok(5, "T(M(n)) <= T(based(n)) <= T(M(n)) + F(n) + c at every n <= 12, both witnesses")


def test_criterion_06_nlogn_floor_evidence(registry):
    mins = {}
    for program in ("factorial.incremental", "pow3.incremental"):
        evidence = growth_floor(registry, program, 8, 64)
        assert evidence.tail_min > 0
        assert evidence.tail_slope >= -1e-9  # non-decreasing tail trend
        mins[program] = evidence.tail_min
    ok(6, f"T(n)/(n log2 n) tail minima positive with non-decreasing trend: "
          f"{ {k: round(v, 2) for k, v in mins.items()} }")


def test_criterion_07_weighted_sum_bound():
    linear = convex_sum_bound(Bound.of("c*n", 1), 10000)
    assert linear.max_ratio == 1.0 and linear.ratio_at_max == 1.0
    square = convex_sum_bound(Bound.of("c*n^2", 1), 10000)
    assert abs(square.ratio_at_max - 0.5) / 0.5 <= 0.01
    with pytest.raises(PreconditionError) as err:
        convex_sum_bound(Bound.of("c*log", 1), 10000)
    assert err.value.condition == "convexity"
    ok(7, f"sum bound: F=n ratio exactly 1, F=n^2 ratio {square.ratio_at_max:.5f} "
          f"within 1% of 1/2, concave form rejected")


def test_criterion_08_eca_cost_exponent(registry):
    _, fit = eca_cost_fit(registry, "eca30", 16, 256)
    assert 1.8 <= fit.exponent <= 2.2
    ok(8, f"rule-30 row cost exponent {fit.exponent:.2f} in [1.8, 2.2] over n=16..256")


def test_criterion_09_analogy_properties(registry):
    for function in registry.functions():
        witness = reflexive_witness(function)
        n_max = 6 if function in ("life", "eca30", "eca110") else 10
        verify_analogy(witness, registry.oracle(function), registry.oracle(function), n_max)
    ws = builtin_witnesses()
    composed = compose_witness(ws["factorial~factorial2"], ws["factorial2~factorial4"])
    verify_analogy(
        composed, registry.oracle("factorial"), registry.oracle("factorial4"), 10
    )
    audit = timing_audit(ws["factorial~factorial2"], registry, list(range(4, 17)), 4.0)
    assert audit["any"].theta_consistent
    assert audit["enumerator"].theta_consistent
    ok(9, f"reflexive witnesses verified for all {len(registry.functions())} functions, "
          f"composed chain verified, factorial-vs-doubled timing ratio-bounded at 4x")


def test_criterion_10_strong_falsification_demo(registry):
    shortcut = registry.program("interleave_factorial.even_shortcut")
    best_enum = registry_best(
        registry, "interleave_factorial", list(range(4, 25)), "enumerator"
    ).winner
    for m in (4, 16, 256, 2**19):
        n = 2 * m
        assert shortcut.steps(n) <= 4 * math.log2(n)
        if m <= 16:
            assert best_enum.steps(n) >= n
    demo = interleave_demo(registry)
    assert demo.even.verdict == FALSIFIED
    assert demo.odd.verdict == CONSISTENT
    assert demo.verdict == "strong form falsified, CIR-consistent pattern on odd indices"
    ok(10, f"even shortcut within 4*log2(n) steps vs enumerator >= n; verdict: {demo.verdict}")


def test_criterion_11_zoo_oracle_agreement(registry):
    # brute-force bit oracle for the bit-sum function
    def brute(n):
        total = 0
        for k in range(1, n + 1):
            total += (3**k >> (k - 1)) & 1
        return total & 1

    assert all(oracle_bitsum3(n) == brute(n) for n in range(1, 65))
    values = record_values(registry.program("bitsum3.enumerator").run(64))
    assert values == [brute(n) for n in range(1, 65)]

    counts = record_values(registry.program("palcount.enumerator").run(1024))
    assert counts == [registry.oracle("palcount")(n) for n in range(1, 1025)]

    life = registry.program("life.direct")
    assert all(life.value(n) == registry.oracle("life")(n) for n in range(1, 9))

    block = builtin_pattern("block")
    assert life_step(block) == block
    blinker = builtin_pattern("blinker")
    assert normalized(life_step(blinker)) != normalized(blinker)
    assert life_step(life_step(blinker)) == blinker

    for entry in zoo_entries(registry):
        for handle, n_max in entry.programs:
            if handle.kind == "enumerator":
                n = min(n_max, 32)
                assert record_values(handle.run(n)) == [
                    entry.oracle(i) for i in range(1, n + 1)
                ]
    ok(11, "zoo programs match their oracles on declared ranges "
           "(bitsum3<=64, langcount<=1024, life<=8, pattern corpus)")
