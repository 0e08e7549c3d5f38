"""Approximation witnesses: near-enumerations with a fast record decoder.

An approximation witness packages a program M, a helper P, an explicit
step bound F, and a record designation rule: running M on n produces a
record stream such that P, given (n, i, designated record), returns f(i)
within F(i) charged steps.  Every enumerator is its own witness with a
pass-through helper.  Witnesses are verified on finite ranges only.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bounds import Bound, parse_bound
from .costvm import Meter, RecordAssembler
from .programs import Oracle, ProgramHandle, Registry, call_program, cost_handle
from .trace import DEFAULT_BUDGET, decode_bits, split_records


class WitnessError(Exception):
    """A witness is structurally unusable (bad shapes, bad designation)."""


class ApproximationViolation(Exception):
    """A range-bounded witness check failed."""

    def __init__(self, kind: str, n: int, i: int | None, detail: str):
        at = f"n={n}" if i is None else f"(n={n}, i={i})"
        super().__init__(f"{kind} at {at}: {detail}")
        self.kind = kind
        self.n = n
        self.i = i


# -- record designation rules -------------------------------------------


@dataclass(frozen=True)
class FinalRecordSoFar:
    """Designate record i while records keep coming, the final one after."""

    label = "final-record-so-far"

    def designate(self, n: int, i: int, total_records: int) -> int:
        return min(i, total_records)

    def interior_match(self, n: int, i: int, idx: int) -> bool:
        return i == idx

    def final_match(self, n: int, i: int, total_records: int) -> bool:
        return i >= total_records


@dataclass(frozen=True)
class RecordByIndex:
    """Designate record i for value i; requires one record per value."""

    label = "record-i"

    def designate(self, n: int, i: int, total_records: int) -> int:
        return i

    def interior_match(self, n: int, i: int, idx: int) -> bool:
        return i == idx

    def final_match(self, n: int, i: int, total_records: int) -> bool:
        return i == total_records


@dataclass(frozen=True)
class RecordTable:
    """Explicit (n, i) -> record index designation."""

    table: tuple[tuple[tuple[int, int], int], ...]

    label = "table"

    def _lookup(self, n: int, i: int) -> int:
        for (tn, ti), idx in self.table:
            if tn == n and ti == i:
                return idx
        raise WitnessError(f"designation table has no entry for (n={n}, i={i})")

    def designate(self, n: int, i: int, total_records: int) -> int:
        return self._lookup(n, i)

    def interior_match(self, n: int, i: int, idx: int) -> bool:
        return self._lookup(n, i) == idx

    def final_match(self, n: int, i: int, total_records: int) -> bool:
        return self._lookup(n, i) == total_records


def parse_rho(tokens: list[str]):
    if tokens[0] == "final-record-so-far":
        return FinalRecordSoFar()
    if tokens[0] == "record-i":
        return RecordByIndex()
    if tokens[0] == "table":
        entries = []
        for item in tokens[1:]:
            left, idx = item.split("=")
            n, i = left.split(":")
            entries.append(((int(n), int(i)), int(idx)))
        return RecordTable(table=tuple(entries))
    raise WitnessError(f"unknown designation rule {tokens[0]!r}")


# -- the witness itself ---------------------------------------------------


@dataclass(frozen=True)
class ApproximationWitness:
    """(program M, helper P, bound F, record designation rho) for f."""

    name: str
    function: str
    machine: ProgramHandle
    helper: ProgramHandle  # cost-backed, body(meter, n, i, r) -> f(i); no emissions
    bound: Bound
    rho: object

    def __post_init__(self):
        if self.helper.backend != "cost":
            raise WitnessError("helper must be a cost-backend program")


def identity_helper() -> ProgramHandle:
    """Pass the designated record through; the value is already in place."""

    def body(m: Meter, n, i, r):
        m.tick()
        return int(r)

    return cost_handle(
        "pass-through", "helper", "helper", body, arity=3,
        purpose="return the designated record unchanged",
    )


def identity_witness(enumerator: ProgramHandle, name: str | None = None) -> ApproximationWitness:
    """Every enumerator is an approximation of itself."""
    return ApproximationWitness(
        name=name or f"identity({enumerator.name})",
        function=enumerator.function,
        machine=enumerator,
        helper=identity_helper(),
        bound=Bound.of("c*log", 4),
        rho=RecordByIndex(),
    )


@dataclass(frozen=True)
class ApproximationReport:
    witness: str
    n_max: int
    checks: int
    max_helper_steps: int
    admissibility: tuple[tuple[int, float], ...]  # (n, F(n)*n / T_best(n))


def _best_known_steps(registry: Registry, function: str, n: int, budget: int) -> int | None:
    best = None
    for handle in registry.programs_for(function):
        if handle.kind in ("step", "helper") or not handle.accepts(n):
            continue
        steps = handle.steps(n, budget)
        if best is None or steps < best:
            best = steps
    return best


def verify_approximation(
    witness: ApproximationWitness,
    oracle: Oracle,
    n_max: int,
    budget: int = DEFAULT_BUDGET,
    registry: Registry | None = None,
) -> ApproximationReport:
    """Check values and step bounds for every (n, i) with i <= n <= n_max.

    The helper runs standalone on a fresh meter per (n, i): its result
    must equal f(i) and its charge must stay within F(i).  When a
    registry is supplied, the report carries the admissibility ratio
    F(n)*n / T_best(n) against the best-known program for f; the
    asymptotically optimal machine this bound nominally references is
    not constructible, so best-known is an explicit proxy, reported and
    never asserted.
    """
    checks = 0
    max_helper = 0
    admissibility = []
    for n in range(1, n_max + 1):
        done = witness.machine.compute(n, budget)
        if not done.trace.halted:
            raise ApproximationViolation("budget", n, None, "machine did not halt")
        records = split_records(done.trace)
        total = len(records)
        if total == 0:
            raise ApproximationViolation("no-records", n, None, "machine emitted nothing")
        designations = []
        prev_idx = 0
        for i in range(1, n + 1):
            idx = witness.rho.designate(n, i, total)
            if idx < prev_idx:
                raise ApproximationViolation(
                    "rho-monotonicity", n, i, f"record {idx} after {prev_idx}"
                )
            if not 1 <= idx <= total:
                raise ApproximationViolation(
                    "rho-range", n, i, f"record {idx} of {total}"
                )
            if i == n and idx != total:
                raise ApproximationViolation(
                    "rho-final", n, i, f"designates record {idx}, final is {total}"
                )
            prev_idx = idx
            designations.append(idx)
        for i in range(1, n + 1):
            idx = designations[i - 1]
            r_value = records[idx - 1].value()
            meter = Meter(budget)
            value = int(witness.helper.program.body(meter, n, i, r_value))
            if value != oracle(i):
                raise ApproximationViolation(
                    "value-mismatch", n, i, f"helper returned {value}, f(i)={oracle(i)}"
                )
            allowed = witness.bound(i)
            if meter.charged > allowed:
                raise ApproximationViolation(
                    "step-bound", n, i,
                    f"helper charged {meter.charged} > F(i)={allowed}",
                )
            max_helper = max(max_helper, meter.charged)
            checks += 1
        if registry is not None:
            best = _best_known_steps(registry, witness.function, n, budget)
            if best:
                admissibility.append((n, witness.bound(n) * n / best))
    return ApproximationReport(
        witness=witness.name,
        n_max=n_max,
        checks=checks,
        max_helper_steps=max_helper,
        admissibility=tuple(admissibility),
    )


def based_machine(witness: ApproximationWitness) -> ProgramHandle:
    """The program that runs M, then the helper on the final record.

    Charged steps are exactly T(M(n)) plus the helper's standalone charge
    plus a one-tick setup, which keeps the timing sandwich
    T(M(n)) <= T(based(n)) <= T(M(n)) + F(n) + c exact.  The helper's
    return value is the machine's result; M's record stream passes
    through unchanged.
    """

    def body(m: Meter, n):
        m.tick()
        asm = RecordAssembler(passthrough=m.fallthrough())
        with m.redirect(asm):
            call_program(m, witness.machine, n)
        asm.finish()
        if not asm.records:
            raise WitnessError(f"{witness.machine.name} emitted no records")
        r_n = decode_bits(asm.records[-1])
        return int(witness.helper.program.body(m, int(n), int(n), r_n))

    return cost_handle(
        f"based({witness.name})",
        witness.function,
        "direct",
        body,
        purpose=f"compute {witness.function} by running {witness.machine.name} then the helper",
    )


# -- irreducibility falsification -----------------------------------------

FALSIFIED = "strong-CIR falsified on range"
CONSISTENT = "CIR-consistent"
INCONCLUSIVE = "inconclusive"

RANGE_CAVEAT = (
    "range evidence only: a finite range can falsify the strong claim "
    "but can never prove irreducibility"
)


@dataclass(frozen=True)
class FalsifierReport:
    function: str
    challenger: str
    domain: str
    points: tuple[tuple[int, int, int], ...]  # (n, T_eff, T_challenger)
    verdict: str
    caveat: str = RANGE_CAVEAT

    def ratios(self) -> list[tuple[int, float]]:
        return [(n, eff / chal) for n, eff, chal in self.points]


def cir_falsifier(
    oracle: Oracle,
    challenger: ProgramHandle,
    best_enumerator: ProgramHandle,
    ns,
    budget: int = DEFAULT_BUDGET,
    growth_factor: float = 2.0,
    bounded_tolerance: float = 4.0,
) -> FalsifierReport:
    """Compare the best-known enumerator against a challenger program.

    A ratio T_eff(n) / T_challenger(n) that keeps growing through the
    tail of the range is range evidence against the strong form of
    irreducibility (the challenger outruns every enumeration-shaped
    computation); a ratio that stays bounded is consistent with the
    claim.  Challenger correctness is checked against the oracle first.
    """
    points = []
    for n in ns:
        n = int(n)
        if not challenger.accepts(n):
            continue
        value = challenger.value(n, budget)
        if value != oracle(n):
            raise ApproximationViolation(
                "challenger-incorrect", n, None,
                f"{challenger.name} returned {value}, f(n)={oracle(n)}",
            )
        points.append((n, best_enumerator.steps(n, budget), challenger.steps(n, budget)))
    if len(points) < 4:
        raise ValueError("need at least 4 in-domain points")
    ratios = [eff / chal for _, eff, chal in points]
    tail = ratios[len(ratios) // 2 :]
    increasing = all(b > a for a, b in zip(tail, tail[1:]))
    if increasing and tail[-1] >= growth_factor * tail[0]:
        verdict = FALSIFIED
    elif max(tail) <= bounded_tolerance * min(tail):
        verdict = CONSISTENT
    else:
        verdict = INCONCLUSIVE
    return FalsifierReport(
        function=oracle.name,
        challenger=challenger.name,
        domain=challenger.domain_label,
        points=tuple(points),
        verdict=verdict,
    )


# -- witness manifest files ------------------------------------------------


def parse_witness_manifest(text: str, registry: Registry) -> ApproximationWitness:
    """Load a witness from its manifest.

    Format, one declaration per line ('; ' comments allowed)::

        witness <name>
        function <oracle name>
        machine <registry program name>
        helper <registry program name>
        bound <form> <constant>
        rho final-record-so-far | record-i | table n:i=idx ...
    """
    fields: dict[str, list[str]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        key = tokens[0]
        if key not in ("witness", "function", "machine", "helper", "bound", "rho"):
            raise WitnessError(f"line {lineno}: unknown field {key!r}")
        if key in fields:
            raise WitnessError(f"line {lineno}: duplicate field {key!r}")
        fields[key] = tokens[1:]
    missing = {"witness", "function", "machine", "helper", "bound", "rho"} - set(fields)
    if missing:
        raise WitnessError(f"missing fields: {sorted(missing)}")
    return ApproximationWitness(
        name=fields["witness"][0],
        function=fields["function"][0],
        machine=registry.program(fields["machine"][0]),
        helper=registry.program(fields["helper"][0]),
        bound=parse_bound(fields["bound"][0], fields["bound"][1]),
        rho=parse_rho(fields["rho"]),
    )
