import pytest

from steplab.analogy import (
    AnalogyViolation,
    ClassLedger,
    builtin_witnesses,
    compose_witness,
    lift_approximation,
    reflexive_witness,
    timing_audit,
    verify_analogy,
)
from steplab.approximation import verify_approximation
from steplab.experiments import builtin_approximations


def test_builtin_witnesses_verify(registry):
    for witness in builtin_witnesses().values():
        report = verify_analogy(
            witness,
            registry.oracle(witness.f),
            registry.oracle(witness.g),
            10,
            registry=registry,
        )
        assert report.max_forward_steps >= 1
        assert report.forward_admissibility


def test_reflexive_witness_for_every_function(registry):
    for function in registry.functions():
        witness = reflexive_witness(function)
        n_max = 6 if function in ("life", "eca30", "eca110") else 10
        verify_analogy(witness, registry.oracle(function), registry.oracle(function), n_max)


def test_symmetry_by_swapping(registry):
    witness = builtin_witnesses()["factorial~factorial2"].swapped()
    verify_analogy(
        witness, registry.oracle("factorial2"), registry.oracle("factorial"), 10
    )


def test_mismatched_pair_fails(registry):
    witness = reflexive_witness("factorial")
    bad = type(witness)(
        name="factorial-vs-bitsum3",
        f="factorial",
        g="bitsum3",
        forward=witness.forward,
        backward=witness.backward,
        forward_bound=witness.forward_bound,
        backward_bound=witness.backward_bound,
    )
    with pytest.raises(AnalogyViolation) as err:
        verify_analogy(bad, registry.oracle("factorial"), registry.oracle("bitsum3"), 6)
    assert err.value.kind == "forward-value"


def test_compose_witness_chain(registry):
    ws = builtin_witnesses()
    composed = compose_witness(ws["factorial~factorial2"], ws["factorial2~factorial4"])
    assert (composed.f, composed.g) == ("factorial", "factorial4")
    verify_analogy(
        composed, registry.oracle("factorial"), registry.oracle("factorial4"), 10
    )


def test_compose_with_reflexive_is_behaviorally_same(registry):
    ws = builtin_witnesses()["factorial~factorial2"]
    composed = compose_witness(reflexive_witness("factorial"), ws)
    oracle_f, oracle_g = registry.oracle("factorial"), registry.oracle("factorial2")
    verify_analogy(composed, oracle_f, oracle_g, 10)
    from steplab.costvm import Meter

    for n in range(1, 8):
        m = Meter(10**6)
        assert composed.forward.program.body(m, n, oracle_f(n)) == oracle_g(n)


def test_compose_rejects_middle_mismatch():
    ws = builtin_witnesses()
    with pytest.raises(ValueError):
        compose_witness(ws["factorial2~factorial4"], ws["factorial~factorial2"])


def test_lift_approximation_along_analogy(registry):
    ws = builtin_witnesses()["factorial~factorial2"]
    identity = builtin_approximations(registry)["identity-factorial"]
    lifted = lift_approximation(ws, identity)
    assert lifted.function == "factorial2"
    assert lifted.machine is identity.machine
    report = verify_approximation(lifted, registry.oracle("factorial2"), 10)
    assert report.checks == 55


def test_lift_along_reflexive_matches_original(registry):
    identity = builtin_approximations(registry)["identity-factorial"]
    lifted = lift_approximation(reflexive_witness("factorial"), identity)
    report = verify_approximation(lifted, registry.oracle("factorial"), 8)
    assert report.checks == 36


def test_lift_rejects_wrong_source(registry):
    ws = builtin_witnesses()["factorial2~factorial4"]
    identity = builtin_approximations(registry)["identity-factorial"]
    with pytest.raises(ValueError):
        lift_approximation(ws, identity)


def test_timing_audit_factorial_pair(registry):
    audit = timing_audit(
        builtin_witnesses()["factorial~factorial2"], registry, list(range(4, 17))
    )
    assert set(audit) == {"any", "enumerator"}
    assert audit["any"].theta_consistent
    assert audit["enumerator"].theta_consistent


def test_timing_audit_unrelated_pair_diverges(registry):
    from steplab.analysis import measure, theta_compare
    from steplab.experiments import geometric_range

    # the ratio grows like n log^2 n, so the tail window must span a few
    # octaves before the divergence clears the 4x tolerance
    ns = geometric_range(8, 256)
    fact = measure(registry.program("factorial.incremental"), ns)
    one = measure(registry.program("one.enumerator"), ns)
    assert not theta_compare(fact, one, tolerance=4.0).theta_consistent


def test_class_ledger_partition(registry):
    ledger = ClassLedger()
    for function in ("factorial", "factorial2", "factorial4", "bitsum3", "pow3"):
        ledger.add_function(function)
    ws = builtin_witnesses()
    ledger.add_verified(ws["factorial~factorial2"], 10)
    ledger.add_verified(ws["factorial2~factorial4"], 10)
    classes = ledger.classes()
    assert ["factorial", "factorial2", "factorial4"] in classes
    assert ["bitsum3"] in classes and ["pow3"] in classes
    payload = ledger.to_json_dict()
    assert payload["witnesses"][0]["verified_n_max"] == 10
