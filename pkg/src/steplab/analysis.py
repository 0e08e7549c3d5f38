"""Measurement and empirical asymptotics.

Charged steps are the only notion of time here; wall-clock never enters.
Order-of-growth predicates are evaluated as explicit-window range
evidence: a fit, a tail ratio, a trend, never a proof.  Where a claim
refers to an asymptotically optimal program, the registry's best-known
program stands in for it, and reports say so.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .bounds import Bound
from .programs import ProgramHandle, Registry
from .trace import DEFAULT_BUDGET

BEST_KNOWN_CAVEAT = (
    "best-known proxy: ranked among registered programs only; an "
    "asymptotically optimal machine is assumed, not constructed"
)


@dataclass(frozen=True)
class TimingSeries:
    """Exact charged step counts per input size."""

    name: str
    points: tuple[tuple[int, int], ...]
    truncated: tuple[int, ...] = ()

    def ns(self) -> list[int]:
        return [n for n, _ in self.points]

    def steps_at(self, n: int) -> int:
        for x, t in self.points:
            if x == n:
                return t
        raise KeyError(f"no measurement at n={n}")

    def to_csv(self) -> str:
        lines = ["n,steps"]
        for n, t in self.points:
            lines.append(f"{n},{t}")
        return "\n".join(lines) + "\n"


def _size_of(value) -> int:
    return len(value) if isinstance(value, str) else int(value)


def measure(
    handle: ProgramHandle, inputs, budget: int = DEFAULT_BUDGET
) -> TimingSeries:
    """Run the program on each input and record exact charged steps.

    String inputs (machine words) are keyed by their length.  Runs that
    exhaust the budget are listed as truncated instead of contributing a
    point.
    """
    points = []
    truncated = []
    for value in inputs:
        trace = handle.run(value, budget)
        if trace.halted:
            points.append((_size_of(value), trace.total_steps))
        else:
            truncated.append(_size_of(value))
    return TimingSeries(
        name=handle.label, points=tuple(points), truncated=tuple(truncated)
    )


@dataclass(frozen=True)
class FitReport:
    """Least-squares power-law fit on (log n, log T)."""

    series: str
    model: str  # "n^a" or "n^a*log"
    exponent: float
    constant: float
    residual: float
    window: tuple[int, int]

    def to_json_dict(self) -> dict:
        return {
            "series": self.series,
            "model": self.model,
            "exponent": self.exponent,
            "constant": self.constant,
            "residual": self.residual,
            "window": list(self.window),
        }


def _linear_fit(xs: list[float], ys: list[float]) -> tuple[float, float, float]:
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    if sxx == 0:
        return 0.0, my, 0.0
    slope = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sxx
    intercept = my - slope * mx
    sse = sum((y - (slope * x + intercept)) ** 2 for x, y in zip(xs, ys))
    return slope, intercept, sse


def fit_powerlaw(
    series: TimingSeries, window: tuple[int, int] | None = None
) -> FitReport:
    """Fit T = C * n^a and T = C * n^a * log2(n); keep the better model.

    The residual is reported, never thresholded here; callers decide
    what counts as a good fit.
    """
    points = [
        (n, t)
        for n, t in series.points
        if window is None or window[0] <= n <= window[1]
    ]
    if len(points) < 8:
        raise ValueError(f"need at least 8 points in window, got {len(points)}")
    used = (points[0][0], points[-1][0])
    if len({t for _, t in points}) == 1:
        return FitReport(series.name, "n^a", 0.0, float(points[0][1]), 0.0, used)
    xs = [math.log(n) for n, _ in points]
    ys = [math.log(t) for _, t in points]
    a1, b1, sse1 = _linear_fit(xs, ys)
    loggable = [(n, t) for n, t in points if n >= 2]
    best = FitReport(series.name, "n^a", a1, math.exp(b1), sse1, used)
    if len(loggable) >= 8:
        xs2 = [math.log(n) for n, _ in loggable]
        ys2 = [math.log(t) - math.log(math.log2(n)) for n, t in loggable]
        a2, b2, sse2 = _linear_fit(xs2, ys2)
        if sse2 < sse1:
            best = FitReport(series.name, "n^a*log", a2, math.exp(b2), sse2, used)
    return best


@dataclass(frozen=True)
class ThetaComparison:
    """Tail-window ratio evidence that two series grow alike."""

    left: str
    right: str
    ratios: tuple[tuple[int, float], ...]
    tail_min: float
    tail_max: float
    tolerance: float

    @property
    def theta_consistent(self) -> bool:
        return self.tail_max <= self.tolerance * self.tail_min

    def to_json_dict(self) -> dict:
        return {
            "left": self.left,
            "right": self.right,
            "ratios": [[n, r] for n, r in self.ratios],
            "tail_min": self.tail_min,
            "tail_max": self.tail_max,
            "tolerance": self.tolerance,
            "theta_consistent": self.theta_consistent,
        }


def theta_compare(
    s1: TimingSeries, s2: TimingSeries, tolerance: float = 4.0
) -> ThetaComparison:
    """Ratio series T1/T2 with a verdict over the upper half of the range.

    The default tolerance of 4 absorbs measured combinator glue while
    still rejecting genuine growth; override per experiment.
    """
    common = sorted(set(s1.ns()) & set(s2.ns()))
    if not common:
        raise ValueError("series share no inputs")
    ratios = tuple((n, s1.steps_at(n) / s2.steps_at(n)) for n in common)
    tail = ratios[len(ratios) // 2 :]
    values = [r for _, r in tail]
    return ThetaComparison(
        left=s1.name,
        right=s2.name,
        ratios=ratios,
        tail_min=min(values),
        tail_max=max(values),
        tolerance=tolerance,
    )


class PreconditionError(Exception):
    """A named precondition of an analysis operation failed."""

    def __init__(self, condition: str, detail: str):
        super().__init__(f"{condition}: {detail}")
        self.condition = condition


@dataclass(frozen=True)
class SumRatioReport:
    """Behaviour of (sum_{i<=n} F(i)/i) / F(n) over 1..n_max."""

    bound: str
    n_max: int
    ratio_at_max: float
    max_ratio: float
    tail_nonincreasing: bool
    sample: tuple[tuple[int, float], ...]


def convex_sum_bound(bound: Bound, n_max: int) -> SumRatioReport:
    """Check that the weighted partial sums of F stay within a constant of F.

    Preconditions, verified numerically and named on failure: F convex
    on the range (second differences nonnegative) and F at least
    logarithmic (F(n)/log2 n must not trend to zero on the tail).  A
    bounded, eventually non-increasing ratio supports treating the sum
    as O(F(n)).
    """
    if n_max < 8:
        raise ValueError("need n_max >= 8")
    values = [bound.as_float(i) for i in range(1, n_max + 1)]
    for i in range(1, n_max - 1):
        second = values[i + 1] + values[i - 1] - 2 * values[i]
        if second < -1e-9:
            raise PreconditionError(
                "convexity", f"second difference at n={i + 1} is {second:.3g}"
            )
    # F must be at least logarithmic: F(n)/log2 n may not trend to zero.
    # The decay of a sub-logarithmic F is slow, so compare the end of the
    # range against its start rather than within the tail window.
    logs = [(i, values[i - 1] / math.log2(i)) for i in range(2, n_max + 1)]
    if logs[-1][1] < 0.5 * logs[0][1]:
        raise PreconditionError(
            "log-lower-bound",
            f"F(n)/log2 n falls from {logs[0][1]:.3g} to {logs[-1][1]:.3g} over the range",
        )
    running = 0.0
    ratios: list[tuple[int, float]] = []
    for i in range(1, n_max + 1):
        running += values[i - 1] / i
        if values[i - 1] > 0:
            ratios.append((i, running / values[i - 1]))
    max_ratio = max(r for _, r in ratios)
    tail_ratios = [r for _, r in ratios[len(ratios) // 2 :]]
    tail_nonincreasing = all(
        b <= a + 1e-12 for a, b in zip(tail_ratios, tail_ratios[1:])
    )
    keep = {1, 2, 4, 8}
    k = 8
    while k < n_max:
        k *= 2
        keep.add(min(k, n_max))
    keep.add(n_max)
    sample = tuple((n, r) for n, r in ratios if n in keep)
    return SumRatioReport(
        bound=bound.describe(),
        n_max=n_max,
        ratio_at_max=ratios[-1][1],
        max_ratio=max_ratio,
        tail_nonincreasing=tail_nonincreasing,
        sample=sample,
    )


@dataclass(frozen=True)
class BestReport:
    """Best-known program for a function, ranked by tail-window steps."""

    function: str
    kind: str
    winner: ProgramHandle
    tail_steps: tuple[tuple[str, int], ...]
    series: tuple[TimingSeries, ...]
    caveat: str = BEST_KNOWN_CAVEAT


def registry_best(
    registry: Registry,
    function: str,
    ns,
    kind: str | None = None,
    budget: int = DEFAULT_BUDGET,
) -> BestReport:
    """Measure every registered contender and pick the tail-window winner.

    kind=None ranks all runnable programs (the stand-in for the best
    possible machine); kind="enumerator" ranks enumerators only (the
    stand-in for the best enumeration-shaped machine).
    """
    ns = [int(n) for n in ns]
    contenders = [
        h
        for h in registry.programs_for(function, kind)
        if h.kind not in ("step", "helper") and all(h.accepts(n) for n in ns)
    ]
    if not contenders:
        raise PreconditionError("empty-registry", f"no {kind or 'any'}-kind programs for {function}")
    tail = ns[len(ns) // 2 :]
    scored = []
    series = []
    for handle in contenders:
        ts = measure(handle, ns, budget)
        series.append(ts)
        scored.append((sum(ts.steps_at(n) for n in tail), handle.name, handle))
    scored.sort(key=lambda item: (item[0], item[1]))
    return BestReport(
        function=function,
        kind=kind or "any",
        winner=scored[0][2],
        tail_steps=tuple((name, steps) for steps, name, _ in scored),
        series=tuple(series),
    )


def dump_json(payload: dict) -> str:
    """Stable JSON for byte-identical report files."""
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"
