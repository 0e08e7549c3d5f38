"""Analogy witnesses: mutual fast inter-translation between functions.

Two functions are computationally analog when each value f(n) converts
to g(n) and back within per-value step budgets that are small next to
the cost of computing either function outright.  A witness packages the
two translator programs with their bounds; verification is range
bounded.  Verified witnesses compose across a shared middle function,
so the relation partitions the registered functions into classes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .analysis import ThetaComparison, measure, registry_best, theta_compare
from .approximation import ApproximationWitness
from .bounds import Bound
from .costvm import Meter
from .programs import Oracle, ProgramHandle, Registry, cost_handle
from .trace import DEFAULT_BUDGET


class AnalogyViolation(Exception):
    def __init__(self, kind: str, n: int, detail: str):
        super().__init__(f"{kind} at n={n}: {detail}")
        self.kind = kind
        self.n = n


@dataclass(frozen=True)
class AnalogyWitness:
    """Both translation directions, each with its explicit bound."""

    name: str
    f: str
    g: str
    forward: ProgramHandle  # body(meter, n, f(n)) -> g(n)
    backward: ProgramHandle  # body(meter, n, g(n)) -> f(n)
    forward_bound: Bound
    backward_bound: Bound

    def __post_init__(self):
        if self.forward.backend != "cost" or self.backward.backend != "cost":
            raise ValueError("translators must be cost-backend programs")

    def swapped(self) -> "AnalogyWitness":
        return AnalogyWitness(
            name=f"swap({self.name})",
            f=self.g,
            g=self.f,
            forward=self.backward,
            backward=self.forward,
            forward_bound=self.backward_bound,
            backward_bound=self.forward_bound,
        )


def _passthrough(name: str) -> ProgramHandle:
    def body(m: Meter, n, v):
        m.tick()
        return int(v)

    return cost_handle(name, "helper", "helper", body, arity=2)


def reflexive_witness(function: str) -> AnalogyWitness:
    bound = Bound.of("c", 2)
    return AnalogyWitness(
        name=f"reflexive({function})",
        f=function,
        g=function,
        forward=_passthrough(f"{function}.id_fwd"),
        backward=_passthrough(f"{function}.id_bwd"),
        forward_bound=bound,
        backward_bound=bound,
    )


@dataclass(frozen=True)
class AnalogyReport:
    witness: str
    n_max: int
    max_forward_steps: int
    max_backward_steps: int
    forward_admissibility: tuple[tuple[int, float], ...]
    backward_admissibility: tuple[tuple[int, float], ...]


def verify_analogy(
    witness: AnalogyWitness,
    oracle_f: Oracle,
    oracle_g: Oracle,
    n_max: int,
    budget: int = DEFAULT_BUDGET,
    registry: Registry | None = None,
) -> AnalogyReport:
    """Check both translation directions for every n <= n_max.

    Each direction runs on a fresh meter: the result must match the
    target oracle and the charge must stay within the declared bound.
    With a registry, the report carries the admissibility ratios
    bound(n) * n / T_best(n) against the best-known program of the
    target function (explicitly a proxy).
    """
    from .approximation import _best_known_steps

    max_fwd = 0
    max_bwd = 0
    fwd_adm = []
    bwd_adm = []
    for n in range(1, n_max + 1):
        fv, gv = oracle_f(n), oracle_g(n)
        meter = Meter(budget)
        out = int(witness.forward.program.body(meter, n, fv))
        if out != gv:
            raise AnalogyViolation(
                "forward-value", n, f"{witness.forward.name} returned {out}, g(n)={gv}"
            )
        allowed = witness.forward_bound(n)
        if meter.charged > allowed:
            raise AnalogyViolation(
                "forward-bound", n, f"charged {meter.charged} > F(n)={allowed}"
            )
        max_fwd = max(max_fwd, meter.charged)
        meter = Meter(budget)
        out = int(witness.backward.program.body(meter, n, gv))
        if out != fv:
            raise AnalogyViolation(
                "backward-value", n, f"{witness.backward.name} returned {out}, f(n)={fv}"
            )
        allowed = witness.backward_bound(n)
        if meter.charged > allowed:
            raise AnalogyViolation(
                "backward-bound", n, f"charged {meter.charged} > G(n)={allowed}"
            )
        max_bwd = max(max_bwd, meter.charged)
        if registry is not None:
            best_g = _best_known_steps(registry, witness.g, n, budget)
            best_f = _best_known_steps(registry, witness.f, n, budget)
            if best_g:
                fwd_adm.append((n, witness.forward_bound(n) * n / best_g))
            if best_f:
                bwd_adm.append((n, witness.backward_bound(n) * n / best_f))
    return AnalogyReport(
        witness=witness.name,
        n_max=n_max,
        max_forward_steps=max_fwd,
        max_backward_steps=max_bwd,
        forward_admissibility=tuple(fwd_adm),
        backward_admissibility=tuple(bwd_adm),
    )


def compose_witness(w_fg: AnalogyWitness, w_gh: AnalogyWitness) -> AnalogyWitness:
    """Chain two witnesses across their shared middle function.

    Bounds add; the composed witness is expected to verify on the common
    range, which is the transitivity evidence the class partition rests
    on.
    """
    if w_fg.g != w_gh.f:
        raise ValueError(
            f"middle function mismatch: {w_fg.name} ends at {w_fg.g!r}, "
            f"{w_gh.name} starts at {w_gh.f!r}"
        )

    def fwd_body(m: Meter, n, v):
        u = w_fg.forward.program.body(m, n, v)
        return int(w_gh.forward.program.body(m, n, int(u)))

    def bwd_body(m: Meter, n, v):
        u = w_gh.backward.program.body(m, n, v)
        return int(w_fg.backward.program.body(m, n, int(u)))

    name = f"{w_fg.name}*{w_gh.name}"
    return AnalogyWitness(
        name=name,
        f=w_fg.f,
        g=w_gh.g,
        forward=cost_handle(f"{name}.fwd", "helper", "helper", fwd_body, arity=2),
        backward=cost_handle(f"{name}.bwd", "helper", "helper", bwd_body, arity=2),
        forward_bound=w_fg.forward_bound.plus(w_gh.forward_bound),
        backward_bound=w_gh.backward_bound.plus(w_fg.backward_bound),
    )


def lift_approximation(
    ca: AnalogyWitness, approx: ApproximationWitness
) -> ApproximationWitness:
    """Turn an approximation witness for f into one for g along f-g analogy.

    The machine and its record designation stay put; the helper becomes
    translate-after-decode and the bounds add.
    """
    if approx.function != ca.f:
        raise ValueError(
            f"witness {approx.name} is for {approx.function!r}, analogy starts at {ca.f!r}"
        )

    def body(m: Meter, n, i, r):
        fv = approx.helper.program.body(m, n, i, r)
        return int(ca.forward.program.body(m, int(i), int(fv)))

    helper = cost_handle(
        f"lift({approx.helper.name})", "helper", "helper", body, arity=3
    )
    return ApproximationWitness(
        name=f"lift({approx.name})->{ca.g}",
        function=ca.g,
        machine=approx.machine,
        helper=helper,
        bound=approx.bound.plus(ca.forward_bound),
        rho=approx.rho,
    )


def timing_audit(
    witness: AnalogyWitness,
    registry: Registry,
    ns,
    tolerance: float = 4.0,
    budget: int = DEFAULT_BUDGET,
) -> dict[str, ThetaComparison]:
    """Compare best-known programs of the two functions, both rankings.

    Verified witnesses should come out ratio-bounded in both the
    any-program and the enumerator-only ranking.
    """
    out = {}
    for kind in (None, "enumerator"):
        best_f = registry_best(registry, witness.f, ns, kind, budget)
        best_g = registry_best(registry, witness.g, ns, kind, budget)
        out[kind or "any"] = theta_compare(
            measure(best_f.winner, ns, budget),
            measure(best_g.winner, ns, budget),
            tolerance,
        )
    return out


@dataclass
class ClassLedger:
    """Verified pairs and the class partition they generate."""

    functions: set = field(default_factory=set)
    entries: list = field(default_factory=list)  # (f, g, witness name, n_max)

    def add_function(self, name: str) -> None:
        self.functions.add(name)

    def add_verified(self, witness: AnalogyWitness, n_max: int) -> None:
        self.functions.add(witness.f)
        self.functions.add(witness.g)
        self.entries.append((witness.f, witness.g, witness.name, n_max))

    def classes(self) -> list[list[str]]:
        """Connected components over verified pairs, recomputed fresh."""
        parent = {f: f for f in self.functions}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for f, g, _, _ in self.entries:
            rf, rg = find(f), find(g)
            if rf != rg:
                parent[max(rf, rg)] = min(rf, rg)
        groups: dict[str, list[str]] = {}
        for f in self.functions:
            groups.setdefault(find(f), []).append(f)
        return sorted(sorted(members) for members in groups.values())

    def to_json_dict(self) -> dict:
        return {
            "classes": self.classes(),
            "witnesses": [
                {"f": f, "g": g, "witness": name, "verified_n_max": n_max}
                for f, g, name, n_max in self.entries
            ],
        }


# -- the shipped witness corpus ---------------------------------------------


def _scale_witness(f: str, g: str, up: int) -> AnalogyWitness:
    """f and g = up * f, translated by one shift each way."""

    shift = up.bit_length() - 1
    if 1 << shift != up:
        raise ValueError("scale must be a power of two")

    def fwd(m: Meter, n, v):
        return int(m.shl(v, shift))

    def bwd(m: Meter, n, v):
        q, _ = m.divmod(v, 1 << shift)
        return int(q)

    bound = Bound.of("c*n*log", 8)
    return AnalogyWitness(
        name=f"{f}~{g}",
        f=f,
        g=g,
        forward=cost_handle(f"{f}->{g}", "helper", "helper", fwd, arity=2),
        backward=cost_handle(f"{g}->{f}", "helper", "helper", bwd, arity=2),
        forward_bound=bound,
        backward_bound=bound,
    )


def builtin_witnesses() -> dict[str, AnalogyWitness]:
    return {
        "factorial~factorial2": _scale_witness("factorial", "factorial2", 2),
        "factorial2~factorial4": _scale_witness("factorial2", "factorial4", 2),
    }
