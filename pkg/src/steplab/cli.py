"""Experiment driver.

Every subcommand prints one machine-readable JSON verdict on stdout
({experiment, target, range, verdict, details}) and writes its artifacts
(CSV series, JSON reports, SVG figures) under the output directory.
Exit codes: 0 pass, 1 verification failure, 2 usage or configuration
error.  A flat key=value config file can seed any option; explicit
flags win.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import experiments
from .analogy import AnalogyViolation, builtin_witnesses, reflexive_witness, verify_analogy
from .analysis import (
    PreconditionError,
    TimingSeries,
    convex_sum_bound,
    dump_json,
    fit_powerlaw,
    measure,
)
from .approximation import (
    ApproximationViolation,
    cir_falsifier,
    parse_witness_manifest,
    verify_approximation,
)
from .bounds import parse_bound
from .enumeration import (
    EnumerationViolation,
    halt_slack,
    profile_independence,
    profiles_to_csv,
    verify_enumerator,
)
from .programs import UnknownNameError, tm_handle
from .trace import DEFAULT_BUDGET
from .zoo import build_registry, builtin_machine, BUILTIN_MACHINES


class UsageError(Exception):
    pass


def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _parse_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split(":")
        lo, hi = int(lo), int(hi)
    except ValueError:
        raise UsageError(f"range must look like LO:HI, got {text!r}")
    if lo < 1 or hi < lo:
        raise UsageError(f"bad range {text!r}")
    return lo, hi


def _load_config(path: str | None) -> dict[str, str]:
    if not path:
        return {}
    cfg = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = line.split("=", 1)
        cfg[key.strip()] = value.strip()
    return cfg


def _as_bool(text: str) -> bool:
    return text.strip().lower() in ("1", "true", "yes", "on")


class Options:
    """Flag values backed by config-file defaults; flags win."""

    def __init__(self, args: argparse.Namespace, cfg: dict[str, str]):
        self._args = args
        self._cfg = cfg

    def get(self, name: str, default=None, cast=str):
        flag = getattr(self._args, name, None)
        if flag is not None:
            return flag
        if name in self._cfg:
            value = self._cfg[name]
            return _as_bool(value) if cast is bool else cast(value)
        return default


def _verdict(experiment: str, target: str, rng, verdict: str, details: list) -> dict:
    return {
        "experiment": experiment,
        "target": target,
        "range": rng,
        "verdict": verdict,
        "details": details,
    }


def _emit(payload: dict) -> int:
    print(json.dumps(payload, sort_keys=True))
    return 0 if payload["verdict"] == "pass" else 1


def _parallel(fn, items, jobs: int):
    if jobs <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# -- subcommands ---------------------------------------------------------


def cmd_verify_etm(opts: Options, out: Path, budget: int) -> int:
    target = opts.get("program")
    if not target:
        raise UsageError("verify-etm needs --program")
    n_max = opts.get("n_max", 12, int)
    registry = build_registry()
    handle = registry.program(target)
    oracle = registry.oracle(handle.function)
    try:
        profiles = verify_enumerator(handle, oracle, n_max, budget)
    except EnumerationViolation as exc:
        return _emit(
            _verdict("verify-etm", target, [1, n_max], "fail", [str(exc)])
        )
    _write_atomic(out / f"{target}.profiles.csv", profiles_to_csv(profiles))
    independence = profile_independence(profiles)
    slack = halt_slack(profiles)
    details = [
        f"profiles written for n=1..{n_max}",
        f"commit steps independent of n: {independence.independent}",
        f"halt slack (total - last commit): min {min(slack)}, max {max(slack)}",
    ]
    return _emit(_verdict("verify-etm", target, [1, n_max], "pass", details))


def _resolve_witness(name: str | None, manifest: str | None, registry):
    if manifest:
        return parse_witness_manifest(Path(manifest).read_text(), registry)
    if not name:
        raise UsageError("need --witness or --manifest")
    corpus = experiments.builtin_approximations(registry)
    if name not in corpus:
        raise UsageError(
            f"unknown witness {name!r}; builtins: {sorted(corpus)}"
        )
    return corpus[name]


def cmd_verify_approx(opts: Options, out: Path, budget: int) -> int:
    registry = build_registry()
    witness = _resolve_witness(opts.get("witness"), opts.get("manifest"), registry)
    n_max = opts.get("n_max", 10, int)
    oracle = registry.oracle(witness.function)
    try:
        report = verify_approximation(witness, oracle, n_max, budget, registry)
    except ApproximationViolation as exc:
        return _emit(
            _verdict("verify-approx", witness.name, [1, n_max], "fail", [str(exc)])
        )
    payload = {
        "witness": report.witness,
        "n_max": report.n_max,
        "checks": report.checks,
        "max_helper_steps": report.max_helper_steps,
        "admissibility": [[n, r] for n, r in report.admissibility],
    }
    _write_atomic(out / f"{witness.name}.approx.json", dump_json(payload))
    details = [
        f"{report.checks} (n, i) checks passed",
        f"max helper charge {report.max_helper_steps}",
        "admissibility ratios are against the best-known program (proxy)",
    ]
    return _emit(_verdict("verify-approx", witness.name, [1, n_max], "pass", details))


def cmd_verify_ca(opts: Options, out: Path, budget: int) -> int:
    registry = build_registry()
    name = opts.get("witness")
    if not name:
        raise UsageError("verify-ca needs --witness")
    if name.startswith("reflexive:"):
        witness = reflexive_witness(name.split(":", 1)[1])
    else:
        corpus = builtin_witnesses()
        if name not in corpus:
            raise UsageError(f"unknown witness {name!r}; builtins: {sorted(corpus)}")
        witness = corpus[name]
    n_max = opts.get("n_max", 10, int)
    try:
        report = verify_analogy(
            witness,
            registry.oracle(witness.f),
            registry.oracle(witness.g),
            n_max,
            budget,
            registry,
        )
    except AnalogyViolation as exc:
        return _emit(_verdict("verify-ca", name, [1, n_max], "fail", [str(exc)]))
    payload = {
        "witness": report.witness,
        "n_max": report.n_max,
        "max_forward_steps": report.max_forward_steps,
        "max_backward_steps": report.max_backward_steps,
        "forward_admissibility": [[n, r] for n, r in report.forward_admissibility],
        "backward_admissibility": [[n, r] for n, r in report.backward_admissibility],
    }
    _write_atomic(out / f"{witness.name}.analogy.json", dump_json(payload))
    return _emit(
        _verdict(
            "verify-ca", name, [1, n_max], "pass",
            [f"both directions verified for n <= {n_max}"],
        )
    )


def cmd_measure(opts: Options, out: Path, budget: int) -> int:
    registry = build_registry()
    program = opts.get("program")
    machine = opts.get("machine")
    jobs = opts.get("jobs", 1, int)
    if bool(program) == bool(machine):
        raise UsageError("measure needs exactly one of --program or --machine")
    if program:
        handle = registry.program(program)
        lo, hi = _parse_range(opts.get("n_range", "8:64"))
        inputs = (
            list(range(lo, hi + 1))
            if opts.get("linear", False, bool)
            else experiments.geometric_range(lo, hi)
        )
        target = program
    else:
        if machine not in BUILTIN_MACHINES:
            raise UsageError(f"unknown machine {machine!r}; builtins: {BUILTIN_MACHINES}")
        handle = tm_handle(machine, machine, "direct", builtin_machine(machine))
        lo, hi = _parse_range(opts.get("lengths", "16:512"))
        inputs = ["1" * n for n in experiments.geometric_range(lo, hi)]
        target = machine
    chunks = _parallel(lambda v: measure(handle, [v], budget), inputs, jobs)
    points = []
    truncated = []
    for chunk in chunks:
        points.extend(chunk.points)
        truncated.extend(chunk.truncated)
    series = TimingSeries(name=target, points=tuple(points), truncated=tuple(truncated))
    path = out / f"{target.replace('/', '_')}.csv"
    _write_atomic(path, series.to_csv())
    details = [f"{len(series.points)} points written to {path}"]
    if series.truncated:
        details.append(f"truncated at budget: {list(series.truncated)}")
    return _emit(
        _verdict("measure", target, [lo, hi], "pass" if not series.truncated else "fail", details)
    )


def _read_series_csv(path: Path) -> TimingSeries:
    lines = path.read_text().strip().splitlines()
    if not lines or lines[0] != "n,steps":
        raise UsageError(f"{path}: expected header 'n,steps'")
    points = []
    for line in lines[1:]:
        n, t = line.split(",")
        points.append((int(n), int(t)))
    return TimingSeries(name=path.stem, points=tuple(points))


def cmd_fit(opts: Options, out: Path, budget: int) -> int:
    series_path = opts.get("series")
    if not series_path:
        raise UsageError("fit needs --series CSV")
    series = _read_series_csv(Path(series_path))
    window = None
    if opts.get("window"):
        window = _parse_range(opts.get("window"))
    report = fit_powerlaw(series, window)
    _write_atomic(out / f"{series.name}.fit.json", dump_json(report.to_json_dict()))
    if opts.get("plot", False, bool):
        from .plots import loglog_figure

        loglog_figure(
            out / f"{series.name}.fit.svg", [series],
            f"{series.name} log-log fit", fits={series.name: report},
        )
    details = [
        f"model {report.model}, exponent {report.exponent:.3f}",
        f"residual {report.residual:.4g} over window {list(report.window)}",
    ]
    return _emit(_verdict("fit", series.name, list(report.window), "pass", details))


def cmd_falsify(opts: Options, out: Path, budget: int) -> int:
    registry = build_registry()
    function = opts.get("function")
    challenger_name = opts.get("challenger")
    if not function or not challenger_name:
        raise UsageError("falsify needs --function and --challenger")
    lo, hi = _parse_range(opts.get("n_range", "4:28"))
    ns = list(range(lo, hi + 1))
    oracle = registry.oracle(function)
    challenger = registry.program(challenger_name)
    enum_name = opts.get("enumerator")
    if enum_name:
        enumerator = registry.program(enum_name)
    else:
        from .analysis import registry_best

        enumerator = registry_best(registry, function, ns, "enumerator", budget).winner
    try:
        report = cir_falsifier(oracle, challenger, enumerator, ns, budget)
    except ApproximationViolation as exc:
        return _emit(_verdict("falsify", function, [lo, hi], "fail", [str(exc)]))
    payload = {
        "function": report.function,
        "challenger": report.challenger,
        "domain": report.domain,
        "points": [[n, eff, chal] for n, eff, chal in report.points],
        "verdict": report.verdict,
        "caveat": report.caveat,
    }
    _write_atomic(out / f"falsify_{function}_{challenger.name}.json", dump_json(payload))
    return _emit(
        _verdict(
            "falsify", f"{function} vs {challenger_name}", [lo, hi], "pass",
            [report.verdict, report.caveat],
        )
    )


def cmd_sum_bound(opts: Options, out: Path, budget: int) -> int:
    form = opts.get("form")
    if not form:
        raise UsageError("appendixB needs --form (one of c, c*log, c*n, c*n*log, c*n^2)")
    constant = opts.get("constant", 1, int)
    n_max = opts.get("n_max", 10000, int)
    bound = parse_bound(form, constant)
    try:
        report = convex_sum_bound(bound, n_max)
    except PreconditionError as exc:
        return _emit(
            _verdict("appendixB", bound.describe(), [1, n_max], "fail",
                     [f"precondition {exc.condition}: {exc}"])
        )
    payload = {
        "bound": report.bound,
        "n_max": report.n_max,
        "ratio_at_max": report.ratio_at_max,
        "max_ratio": report.max_ratio,
        "tail_nonincreasing": report.tail_nonincreasing,
        "sample": [[n, r] for n, r in report.sample],
    }
    slug = form.replace("*", "").replace("^", "")
    _write_atomic(out / f"sum_bound_{slug}.json", dump_json(payload))
    details = [
        f"ratio at n_max: {report.ratio_at_max:.6f}",
        f"max ratio: {report.max_ratio:.6f}",
        f"tail non-increasing: {report.tail_nonincreasing}",
    ]
    return _emit(_verdict("appendixB", bound.describe(), [1, n_max], "pass", details))


def cmd_report(opts: Options, out: Path, budget: int) -> int:
    registry = build_registry()
    from .plots import loglog_figure, ratio_figure

    checks: list[tuple[str, bool, str]] = []

    # 1. palindrome model gap
    gap = experiments.palindrome_gap(budget=budget)
    fits = {}
    for name, (series, fit) in gap.items():
        _write_atomic(out / f"{name}.csv", series.to_csv())
        _write_atomic(out / f"{name}.fit.json", dump_json(fit.to_json_dict()))
        fits[name] = fit
    loglog_figure(
        out / "fig_palindrome_gap.svg",
        [series for series, _ in gap.values()],
        "palindrome cost: one-tape vs two-tape discipline",
        fits=fits,
        xlabel="word length",
    )
    e1 = fits["palindrome1"].exponent
    e2 = fits["palindrome2"].exponent
    checks.append(
        ("palindrome-gap", 1.8 <= e1 <= 2.2 and 0.85 <= e2 <= 1.2,
         f"exponents {e1:.2f} / {e2:.2f}")
    )

    # 2. enumerator verification and growth floor
    for prog in ("factorial.incremental", "factorial.restart"):
        handle = registry.program(prog)
        profiles = verify_enumerator(handle, registry.oracle("factorial"), 12, budget)
        _write_atomic(out / f"{prog}.profiles.csv", profiles_to_csv(profiles))
        checks.append(
            (f"verify-etm:{prog}", profile_independence(profiles).independent,
             "profiles independent of n")
        )
    growth_points = []
    for prog in ("factorial.incremental", "pow3.incremental"):
        evidence = experiments.growth_floor(registry, prog, 8, 64, budget)
        growth_points.append((prog, evidence.points))
        checks.append(
            (f"growth-floor:{prog}",
             evidence.tail_min > 0 and evidence.tail_slope >= -1e-9,
             f"tail min {evidence.tail_min:.2f}, slope {evidence.tail_slope:.4f}")
        )
    ratio_figure(
        out / "fig_growth_floor.svg", growth_points,
        "T(n) / (n log2 n) for value-growing enumerators",
    )

    # 3. eca cost exponent
    series, fit = experiments.eca_cost_fit(registry, "eca30", budget=budget)
    _write_atomic(out / "eca30.csv", series.to_csv())
    _write_atomic(out / "eca30.fit.json", dump_json(fit.to_json_dict()))
    loglog_figure(
        out / "fig_eca30.svg", [series], "elementary rule 30 row cost",
        fits={series.name: fit},
    )
    checks.append(("eca30-exponent", 1.8 <= fit.exponent <= 2.2, f"exponent {fit.exponent:.2f}"))

    # 4. irreducibility falsification demo
    demo = experiments.interleave_demo(registry, budget=budget)
    payload = {
        "verdict": demo.verdict,
        "even": {"points": [list(p) for p in demo.even.points], "verdict": demo.even.verdict},
        "odd": {"points": [list(p) for p in demo.odd.points], "verdict": demo.odd.verdict},
        "caveat": demo.even.caveat,
    }
    _write_atomic(out / "falsify_interleave.json", dump_json(payload))
    ratio_figure(
        out / "fig_falsify_interleave.svg",
        [("even shortcut", demo.even.ratios()), ("odd direct", demo.odd.ratios())],
        "best enumerator / challenger step ratio",
    )
    checks.append(
        ("falsify-interleave",
         demo.verdict == "strong form falsified, CIR-consistent pattern on odd indices",
         demo.verdict)
    )

    # 5. analogy battery and the class partition
    battery = experiments.analogy_battery(registry, budget=budget)
    audit = battery["audit"]
    payload = {name: comp.to_json_dict() for name, comp in audit.items()}
    _write_atomic(out / "analogy_audit.json", dump_json(payload))
    checks.append(
        ("analogy-audit",
         all(comp.theta_consistent for comp in audit.values()),
         "factorial vs factorial2 ratio-bounded in both rankings")
    )
    from .analogy import ClassLedger

    ledger = ClassLedger()
    for function in registry.functions():
        ledger.add_function(function)
    for witness in builtin_witnesses().values():
        ledger.add_verified(witness, 10)
    _write_atomic(out / "analogy_classes.json", dump_json(ledger.to_json_dict()))

    # 6. weighted-sum bound table
    rows = ["form,n_max,ratio_at_max,max_ratio,tail_nonincreasing"]
    for form in ("c*n", "c*n^2"):
        rep = convex_sum_bound(parse_bound(form, 1), 10000)
        rows.append(
            f"{form},{rep.n_max},{rep.ratio_at_max:.8f},{rep.max_ratio:.8f},{rep.tail_nonincreasing}"
        )
    _write_atomic(out / "sum_bound.csv", "\n".join(rows) + "\n")
    checks.append(("sum-bound", True, "table written"))

    summary = {
        "checks": [
            {"name": name, "passed": ok, "detail": detail} for name, ok, detail in checks
        ],
        "outputs": sorted(p.name for p in out.iterdir()),
    }
    _write_atomic(out / "summary.json", dump_json(summary))
    failed = [name for name, ok, _ in checks if not ok]
    details = [f"{len(checks)} checks, artifacts under {out}"] + [
        f"FAILED: {name}" for name in failed
    ]
    return _emit(
        _verdict("report", "battery", None, "pass" if not failed else "fail", details)
    )


COMMANDS = {
    "verify-etm": cmd_verify_etm,
    "verify-approx": cmd_verify_approx,
    "verify-ca": cmd_verify_ca,
    "measure": cmd_measure,
    "fit": cmd_fit,
    "falsify": cmd_falsify,
    "appendixB": cmd_sum_bound,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="steplab",
        description="step-exact machine experiments: verify, measure, fit, report",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="output directory (default: out)")
        p.add_argument("--budget", type=int, help=f"step budget (default {DEFAULT_BUDGET})")
        p.add_argument("--config", help="flat key=value config file; flags win")
        p.add_argument("--jobs", type=int, help="parallel run cap (default 1)")

    p = sub.add_parser("verify-etm", help="verify an enumerator program on a range")
    p.add_argument("--program", help="registry name, e.g. factorial.incremental")
    p.add_argument("--n-max", dest="n_max", type=int)
    common(p)

    p = sub.add_parser("verify-approx", help="verify an approximation witness")
    p.add_argument("--witness", help="builtin witness name")
    p.add_argument("--manifest", help="witness manifest file")
    p.add_argument("--n-max", dest="n_max", type=int)
    common(p)

    p = sub.add_parser("verify-ca", help="verify an analogy witness")
    p.add_argument("--witness", help="builtin name or reflexive:<function>")
    p.add_argument("--n-max", dest="n_max", type=int)
    common(p)

    p = sub.add_parser("measure", help="measure charged steps over a range")
    p.add_argument("--program", help="registry program name")
    p.add_argument("--machine", help="builtin machine name")
    p.add_argument("--n-range", dest="n_range", help="LO:HI for programs")
    p.add_argument("--lengths", help="LO:HI word lengths for machines")
    p.add_argument("--linear", action="store_const", const=True,
                   help="every n in range instead of geometric steps")
    common(p)

    p = sub.add_parser("fit", help="fit a power law to a measured CSV series")
    p.add_argument("--series", help="CSV file with n,steps")
    p.add_argument("--window", help="LO:HI fit window")
    p.add_argument("--plot", action="store_const", const=True)
    common(p)

    p = sub.add_parser("falsify", help="ratio evidence against irreducibility")
    p.add_argument("--function")
    p.add_argument("--challenger")
    p.add_argument("--enumerator", help="override the best-known enumerator")
    p.add_argument("--n-range", dest="n_range")
    common(p)

    p = sub.add_parser("appendixB", help="weighted partial-sum bound check")
    p.add_argument("--form", help="bound form: c, c*log, c*n, c*n*log, c*n^2")
    p.add_argument("--constant", type=int)
    p.add_argument("--n-max", dest="n_max", type=int)
    common(p)

    p = sub.add_parser("report", help="run the full battery with figures")
    common(p)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args.config)
        opts = Options(args, cfg)
        out = Path(opts.get("out", "out"))
        budget = opts.get("budget", DEFAULT_BUDGET, int)
        if budget <= 0:
            raise UsageError("budget must be positive")
        return COMMANDS[args.command](opts, out, budget)
    except (UsageError, UnknownNameError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
