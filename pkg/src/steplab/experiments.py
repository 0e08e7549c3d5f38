"""Pre-packaged experiments: the standard battery behind the CLI report.

Everything here is built from the library surface so the test suite can
drive the same experiments the command line does.
"""

from __future__ import annotations

from dataclasses import dataclass

from .analogy import builtin_witnesses, timing_audit, verify_analogy
from .analysis import FitReport, TimingSeries, fit_powerlaw, measure, registry_best
from .approximation import (
    ApproximationWitness,
    FalsifierReport,
    RecordByIndex,
    cir_falsifier,
    identity_witness,
)
from .bounds import Bound
from .costvm import Meter
from .enumeration import GrowthEvidence, nlogn_evidence, verify_enumerator
from .programs import ProgramHandle, Registry, cost_handle, tm_handle
from .trace import DEFAULT_BUDGET
from .zoo import builtin_machine


def geometric_range(lo: int, hi: int, factor: float = 2**0.5) -> list[int]:
    """Distinct integer sizes from lo to hi, roughly factor apart."""
    out = []
    x = float(lo)
    while x < hi:
        n = round(x)
        if not out or n > out[-1]:
            out.append(n)
        x *= factor
    if not out or out[-1] != hi:
        out.append(hi)
    return out


# -- palindrome model gap ----------------------------------------------------


def palindrome_handles() -> tuple[ProgramHandle, ProgramHandle]:
    return (
        tm_handle("palindrome1", "palindrome", "direct", builtin_machine("palindrome1")),
        tm_handle("palindrome2", "palindrome", "direct", builtin_machine("palindrome2")),
    )


def palindrome_gap(
    lengths: list[int] | None = None, budget: int = DEFAULT_BUDGET
) -> dict[str, tuple[TimingSeries, FitReport]]:
    """Measure both palindrome deciders on all-ones words and fit each.

    The single-head shuttle comes out near exponent 2, the two-head
    sweep near exponent 1: the cost of the same problem in the one-tape
    versus two-tape discipline.
    """
    lengths = lengths or geometric_range(16, 512)
    one_tape, two_tape = palindrome_handles()
    words = ["1" * n for n in lengths]
    out = {}
    for handle in (one_tape, two_tape):
        series = measure(handle, words, budget)
        out[handle.name] = (series, fit_powerlaw(series))
    return out


# -- enumerator growth floor ---------------------------------------------------


def growth_floor(
    registry: Registry,
    program: str,
    n_lo: int = 8,
    n_hi: int = 64,
    budget: int = DEFAULT_BUDGET,
) -> GrowthEvidence:
    """T(n)/(n log2 n) evidence for an enumerator over [n_lo, n_hi]."""
    handle = registry.program(program)
    oracle = registry.oracle(handle.function)
    profiles = verify_enumerator(handle, oracle, n_hi, budget)
    return nlogn_evidence([p for p in profiles if p.n >= n_lo])


# -- witness corpus -----------------------------------------------------------


def doubled_records_witness(registry: Registry) -> ApproximationWitness:
    """Approximation of factorial whose records run doubled.

    The machine enumerates 2 * i!; the helper halves the designated
    record.  Halving costs the record's bit length, so the bound is the
    linear-log form, which still sits far under computing factorial
    outright.
    """

    def halve(m: Meter, n, i, r):
        q, _ = m.divmod(r, 2)
        return int(q)

    helper = cost_handle(
        "halve", "helper", "helper", halve, arity=3,
        purpose="halve the designated record",
    )
    return ApproximationWitness(
        name="doubled-factorial",
        function="factorial",
        machine=registry.program("factorial2.incremental"),
        helper=helper,
        bound=Bound.of("c*n*log", 8),
        rho=RecordByIndex(),
    )


def builtin_approximations(registry: Registry) -> dict[str, ApproximationWitness]:
    return {
        "identity-factorial": identity_witness(
            registry.program("factorial.incremental"), name="identity-factorial"
        ),
        "doubled-factorial": doubled_records_witness(registry),
    }


# -- irreducibility falsification demo ----------------------------------------


@dataclass(frozen=True)
class InterleaveDemo:
    even: FalsifierReport
    odd: FalsifierReport
    verdict: str


def interleave_demo(
    registry: Registry,
    ns: list[int] | None = None,
    budget: int = DEFAULT_BUDGET,
) -> InterleaveDemo:
    """The interleave function splits: fast at even arguments, not at odd.

    The even-index shortcut answers in logarithmically many steps while
    any enumerator needs at least n, so the strong claim is falsified on
    the even positions; at odd positions the ratio against a direct
    factorial stays bounded.
    """
    ns = ns or list(range(4, 29))
    oracle = registry.oracle("interleave_factorial")
    enumerator = registry.program("interleave_factorial.enumerator")
    even = cir_falsifier(
        oracle, registry.program("interleave_factorial.even_shortcut"),
        enumerator, ns, budget,
    )
    odd = cir_falsifier(
        oracle, registry.program("interleave_factorial.odd_direct"),
        enumerator, ns, budget,
    )
    from .approximation import CONSISTENT, FALSIFIED

    if even.verdict == FALSIFIED and odd.verdict == CONSISTENT:
        verdict = "strong form falsified, CIR-consistent pattern on odd indices"
    else:
        verdict = f"even: {even.verdict}; odd: {odd.verdict}"
    return InterleaveDemo(even=even, odd=odd, verdict=verdict)


# -- analogy battery -----------------------------------------------------------


def analogy_battery(
    registry: Registry,
    n_max: int = 10,
    ns: list[int] | None = None,
    tolerance: float = 4.0,
    budget: int = DEFAULT_BUDGET,
) -> dict:
    """Verify the shipped analogy witnesses and audit their timings."""
    ns = ns or list(range(4, 17))
    witnesses = builtin_witnesses()
    reports = {}
    for name, witness in witnesses.items():
        reports[name] = verify_analogy(
            witness,
            registry.oracle(witness.f),
            registry.oracle(witness.g),
            n_max,
            budget,
            registry,
        )
    audit = timing_audit(witnesses["factorial~factorial2"], registry, ns, tolerance, budget)
    return {"reports": reports, "audit": audit}


# -- model-gap comparison for eca ----------------------------------------------


def eca_cost_fit(
    registry: Registry,
    rule_function: str = "eca30",
    n_lo: int = 16,
    n_hi: int = 256,
    budget: int = DEFAULT_BUDGET,
) -> tuple[TimingSeries, FitReport]:
    handle = registry.program(f"{rule_function}.direct")
    series = measure(handle, geometric_range(n_lo, n_hi), budget)
    return series, fit_powerlaw(series)


def best_vs_best(
    registry: Registry,
    function: str,
    ns: list[int],
    tolerance: float = 4.0,
    budget: int = DEFAULT_BUDGET,
):
    """Theta-compare the best any-program against the best enumerator."""
    from .analysis import theta_compare

    best_any = registry_best(registry, function, ns, None, budget)
    best_enum = registry_best(registry, function, ns, "enumerator", budget)
    return theta_compare(
        measure(best_any.winner, ns, budget),
        measure(best_enum.winner, ns, budget),
        tolerance,
    )
