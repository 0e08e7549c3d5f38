"""Verification of enumerator machines and their timing bookkeeping.

An enumerator (E-machine) for f is a program that, while computing f(n),
writes every f(i) for i <= n on its output tape, each at the right of a
'#'.  Verification on a finite range extracts, per run, the commit steps
k_n(i): the earliest strictly increasing steps at which the content to
the right of the last '#' decodes to f(i).  All of this is range-bounded
evidence, never a proof for all n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .programs import Oracle, ProgramHandle
from .trace import (
    DEFAULT_BUDGET,
    ExecutionTrace,
    RecordStructureError,
    encode_natural,
    split_records,
)


class EnumerationViolation(Exception):
    """A range-bounded enumerator check failed."""

    def __init__(self, kind: str, n: int, detail: str):
        super().__init__(f"{kind} at n={n}: {detail}")
        self.kind = kind
        self.n = n


class NoCommitWitness(Exception):
    """No qualifying commit step exists for index i."""

    def __init__(self, i: int):
        super().__init__(f"no qualifying commit step for i={i}")
        self.i = i


@dataclass(frozen=True)
class EnumerationProfile:
    """Commit steps, their deltas, and the run total for one input n.

    deltas[i-1] is the time between the appearance of f(i-1) and f(i),
    with the first delta counted from the start of the run, so the
    deltas always telescope to the last commit step.
    """

    n: int
    commit_steps: tuple[int, ...]
    total: int

    @property
    def deltas(self) -> tuple[int, ...]:
        prev = 0
        out = []
        for k in self.commit_steps:
            out.append(k - prev)
            prev = k
        return tuple(out)


def _commit_windows(trace: ExecutionTrace) -> list[tuple[int, int, str]]:
    """(start, end, bits) step windows during which each record sits
    complete to the right of the last '#'.

    A value only counts as written once its record has received its last
    bit: transient prefixes of a record mid-write do not commit.  The
    window runs from the record's final bit to the step before the next
    '#' (or to the end of the run for the last record).
    """
    windows: list[tuple[int, int, str]] = []
    bits: list[str] = []
    last_bit_step = None
    open_record = False
    for step, sym in trace.events:
        if sym == "#":
            if open_record and bits and last_bit_step is not None:
                windows.append((last_bit_step, step - 1, "".join(bits)))
            open_record = True
            bits = []
            last_bit_step = None
        else:
            bits.append(sym)
            last_bit_step = step
    if open_record and bits and last_bit_step is not None:
        windows.append((last_bit_step, trace.total_steps, "".join(bits)))
    return [(a, b, s) for a, b, s in windows if a <= b]


def commit_steps(
    trace: ExecutionTrace, oracle: Oracle, n: int
) -> tuple[int, ...]:
    """Greedy earliest-match commit sequence for f(1)..f(n).

    Greedy matching is complete: any witness sequence can only be moved
    earlier without conflict, so the greedy scan succeeds exactly when
    some witness exists.  Raises NoCommitWitness at the first index with
    no qualifying step.
    """
    windows = _commit_windows(trace)
    commits: list[int] = []
    prev = 0
    j = 0
    for i in range(1, n + 1):
        target = encode_natural(oracle(i))
        found = None
        k = j
        while k < len(windows):
            a, b, bits = windows[k]
            lo = max(a, prev + 1)
            if lo <= b and bits == target:
                found = lo
                j = k
                break
            k += 1
        if found is None:
            raise NoCommitWitness(i)
        commits.append(found)
        prev = found
    return tuple(commits)


def verify_enumerator(
    handle: ProgramHandle,
    oracle: Oracle,
    n_max: int,
    budget: int = DEFAULT_BUDGET,
) -> list[EnumerationProfile]:
    """Check the enumerator contract for every n <= n_max.

    Condition (i): at halt, the final record is exactly the canonical
    encoding of f(n).  Condition (ii): a commit sequence for f(1)..f(n)
    exists.  Returns the per-n profiles on success.
    """
    profiles = []
    for n in range(1, n_max + 1):
        done = handle.compute(n, budget)
        trace = done.trace
        if not trace.halted:
            raise EnumerationViolation(
                "budget", n, f"did not halt within {budget} steps"
            )
        try:
            records = split_records(trace)
        except RecordStructureError as exc:
            raise EnumerationViolation("record-structure", n, str(exc))
        if not records:
            raise EnumerationViolation("final-value", n, "no output records")
        expected = encode_natural(oracle(n))
        if records[-1].bits != expected:
            raise EnumerationViolation(
                "final-value",
                n,
                f"final record {records[-1].bits!r} != {expected!r}",
            )
        try:
            commits = commit_steps(trace, oracle, n)
        except NoCommitWitness as exc:
            raise EnumerationViolation(
                "no-commit-witness", n, f"first failing index i={exc.i}"
            )
        profiles.append(
            EnumerationProfile(n=n, commit_steps=commits, total=trace.total_steps)
        )
    return profiles


@dataclass(frozen=True)
class IndependenceReport:
    independent: bool
    mismatch: tuple[int, int, int] | None  # (n, n', i)


def profile_independence(profiles: list[EnumerationProfile]) -> IndependenceReport:
    """Whether k_n(i) agrees across all profiles on shared indices.

    Expected for combinator-built enumerators, whose work for the first
    i values does not depend on the target n; not required in general.
    """
    for a in profiles:
        for b in profiles:
            if a.n >= b.n:
                continue
            for i in range(min(a.n, b.n)):
                if a.commit_steps[i] != b.commit_steps[i]:
                    return IndependenceReport(False, (a.n, b.n, i + 1))
    return IndependenceReport(True, None)


def halt_slack(profiles: list[EnumerationProfile]) -> list[int]:
    """total - k_n(n) per profile: the cleanup steps after the last commit.

    The deltas telescope to k_n(n) exactly, so this slack is the whole
    gap in the sum-of-deltas bookkeeping; it is measured per machine and
    expected constant."""
    return [p.total - p.commit_steps[-1] for p in profiles]


@dataclass(frozen=True)
class GrowthEvidence:
    """T(n) / (n log2 n) over a range, with a tail window summary."""

    points: tuple[tuple[int, float], ...]
    tail_min: float
    tail_slope: float
    vanishing: bool


def nlogn_evidence(profiles: list[EnumerationProfile]) -> GrowthEvidence:
    """Evidence for T(n) growing at least like n log n.

    Reports c(n) = T(n) / (n log2 n) and flags series whose tail trend
    decreases toward zero (the expected picture when the enumerated
    values stop growing).  Requires a contiguous range up to n >= 64.
    """
    ns = [p.n for p in profiles]
    if not ns or max(ns) < 64:
        raise ValueError("need profiles up to n >= 64")
    if ns != list(range(min(ns), max(ns) + 1)):
        raise ValueError("need a contiguous range of n")
    points = tuple(
        (p.n, p.total / (p.n * math.log2(p.n))) for p in profiles if p.n >= 2
    )
    tail = points[len(points) // 2 :]
    tail_min = min(c for _, c in tail)
    xs = [n for n, _ in tail]
    ys = [c for _, c in tail]
    mx = sum(xs) / len(xs)
    my = sum(ys) / len(ys)
    denom = sum((x - mx) ** 2 for x in xs)
    slope = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / denom if denom else 0.0
    vanishing = slope < 0 and ys[-1] < ys[0]
    return GrowthEvidence(
        points=points, tail_min=tail_min, tail_slope=slope, vanishing=vanishing
    )


def profiles_to_csv(profiles: list[EnumerationProfile]) -> str:
    lines = ["n,i,k_n_i,t_i,total"]
    for p in profiles:
        deltas = p.deltas
        for i, k in enumerate(p.commit_steps, start=1):
            lines.append(f"{p.n},{i},{k},{deltas[i - 1]},{p.total}")
    return "\n".join(lines) + "\n"
