"""Command-line experiment runner.

Every subcommand reads an optional JSON config (``--config``), applies flag
overrides, validates the result against ``config_schema.json`` and writes
its artifacts plus a ``manifest.json`` into ``--out``.  Exit status is 0 on
success or pass, 1 on a failed verdict and 2 on a usage or config error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import re
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path

import jsonschema

from . import __version__
from .poset import PosetError, parse_poset, transitive_closure

TASKS = ("simulate", "check-invariance", "check-dlr", "diagnose", "verify-bounds", "count-linext")


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------------------
# config loading and validation


def load_schema() -> dict:
    return json.loads(resources.files("causetlab").joinpath("config_schema.json").read_text())


def _line_of(text: str, path) -> int | None:
    """Best-effort line number of a JSON path inside ``text``."""
    offset = 0
    found = None
    for part in path:
        if isinstance(part, int):
            continue
        m = re.compile(r'"%s"\s*:' % re.escape(str(part))).search(text, offset)
        if not m:
            break
        offset = m.end()
        found = text.count("\n", 0, m.start()) + 1
    return found


def validate(config: dict, text: str | None = None, source: str = "config"):
    validator = jsonschema.Draft202012Validator(load_schema())
    errors = sorted(validator.iter_errors(config), key=lambda e: list(e.absolute_path))
    if not errors:
        return
    lines = []
    for err in errors:
        where = "/".join(str(p) for p in err.absolute_path) or "(root)"
        line = _line_of(text, err.absolute_path) if text is not None else None
        prefix = f"{source}:{line}" if line else source
        lines.append(f"{prefix}: {where}: {err.message}")
    raise ConfigError("\n".join(lines))


def load_config(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read: {exc.strerror}") from exc
    try:
        config = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(config, dict):
        raise ConfigError(f"{path}:1: top level must be an object")
    validate(config, text, path)
    return config


def resolve(args: argparse.Namespace) -> dict:
    config = load_config(args.config) if args.config else {}
    if config.get("task", args.task) != args.task:
        raise ConfigError(f"{args.config}: task {config['task']!r} does not match subcommand {args.task!r}")
    config["task"] = args.task
    if args.seed is not None:
        config["seed"] = args.seed
    config.setdefault("seed", 0)
    if args.kernel:
        try:
            config["kernel"] = json.loads(args.kernel)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"--kernel:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if args.model:
        config["model"] = args.model
    if getattr(args, "poset", None):
        config["poset"] = args.poset
    params = config.setdefault("params", {})
    for key in PARAM_FLAGS:
        value = getattr(args, key, None)
        if value is not None:
            params[key] = value
    for item in args.set or []:
        key, _, raw = item.partition("=")
        try:
            params[key] = json.loads(raw)
        except json.JSONDecodeError:
            params[key] = raw
    validate(config, source="arguments")
    return config


# ---------------------------------------------------------------------------
# helpers


def dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n"


def _jsonable(value):
    if isinstance(value, Fraction):
        return str(value)
    if hasattr(value, "a") and hasattr(value, "b"):
        return str(value)
    if isinstance(value, (set, frozenset)):
        return sorted(value)
    raise TypeError(f"cannot serialise {type(value).__name__}")


def kernel_of(config: dict):
    from .growth import kernel_from_config

    if "kernel" not in config:
        raise ConfigError("this task needs a kernel block (config 'kernel' or --kernel)")
    try:
        return kernel_from_config(config["kernel"])
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"kernel: {exc}") from exc


def event_of(spec: dict, kernel):
    from .invariance import BasicEvent, Interval, stem_event

    if "stem" in spec:
        if not hasattr(kernel, "gen"):
            raise ConfigError("params/event/stem needs a fixed-poset kernel")
        stem = [i - 1 for i in spec["stem"]]
        from .models import is_ordered_stem

        if not is_ordered_stem(kernel.gen, stem):
            raise ConfigError("params/event/stem is not an ordered stem")
        return stem_event(kernel.gen, stem)
    if "bins" in spec:
        bins = tuple(Interval(Fraction(str(lo)), Fraction(str(hi))) for lo, hi in spec["bins"])
        pairs = [tuple(int(v) - 1 for v in r.split("<")) for r in spec.get("relations", [])]
        order = transitive_closure(pairs, len(bins))
        return BasicEvent(bins, order)
    raise ConfigError("params/event needs 'stem' or 'bins'")


def poset_of(config: dict, n: int | None):
    from .models import parse_model

    if "poset" in config:
        try:
            return parse_poset(Path(config["poset"]).read_text())
        except OSError as exc:
            raise ConfigError(f"{config['poset']}: cannot read: {exc.strerror}") from exc
    if "model" not in config:
        raise ConfigError("need --model or --poset")
    gen = parse_model(config["model"])
    if n is None:
        if gen.size is None:
            raise ConfigError("infinite model needs --n")
        n = gen.size
    return gen.prefix(n).with_labels(None)


# ---------------------------------------------------------------------------
# tasks; each returns (exit status, {file name: text}, summary)


def task_simulate(config, jobs):
    from .growth import trajectory
    from .seeding import parallel_map

    kernel = kernel_of(config)
    p = config["params"]
    n, count, seed = p.get("n", 20), p.get("count", 1), config["seed"]
    if count == 1:
        text = trajectory(kernel, n, seed).to_text(seed, kernel.config())
        return 0, {"trajectory.txt": text}, f"simulated 1 trajectory of length {n}\n"
    parts = parallel_map(_simulate_one, [(kernel, n, seed, i) for i in range(count)], jobs)
    header = f"# causetlab trajectories\n# seed={seed}\n# kernel={json.dumps(kernel.config(), sort_keys=True)}\n"
    return 0, {"trajectories.txt": header + "".join(parts)}, f"simulated {count} trajectories of length {n}\n"


def _simulate_one(task):
    from .growth import trajectory
    from .seeding import seed_stream

    kernel, n, seed, index = task
    body = trajectory(kernel, n, seed_stream(seed, index)).to_text()
    return f"# trajectory {index}\n" + "".join(line + "\n" for line in body.splitlines()[1:])


def task_check_invariance(config, jobs):
    from .growth import FixedPosetKernel
    from .invariance import check_invariance_binned, check_invariance_exact, check_order_markov, \
        event_battery, stem_events

    kernel = kernel_of(config)
    p = config["params"]
    method = p.get("method", "auto")
    atomic = isinstance(kernel, FixedPosetKernel)
    if method == "auto":
        method = "exact" if atomic else "binned"
    reports = []
    if method == "exact":
        if not atomic:
            raise ConfigError("params/method: exact needs an atomic fixed-poset kernel")
        reports.append(check_invariance_exact(kernel, p.get("k_max", 6), p.get("mode", "transpositions")))
    else:
        k = p.get("event_k", 3)
        events = stem_events(kernel, k) if atomic else event_battery(k, Fraction(str(p.get("width", "1/2"))))
        reports.append(check_invariance_binned(kernel, events, p.get("samples", 10**5), config["seed"], jobs))
    if atomic and p.get("order_markov", True):
        reports.append(check_order_markov(kernel, p.get("k_max", 6)))
    failed = reports[0].verdict == "fail"
    body = {"kernel": kernel.config(), "seed": config["seed"], "reports": [r.to_dict() for r in reports]}
    table = "".join(r.table() for r in reports)
    return int(failed), {"report.json": dump(body), "report.txt": table}, table


def task_check_dlr(config, jobs):
    from .growth import FixedPosetKernel, reachable_stems
    from .invariance import InvarianceReport, check_dlr, event_battery, stem_event

    kernel = kernel_of(config)
    p = config["params"]
    ks = p.get("k", [1, 2, 3])
    ks = [ks] if isinstance(ks, int) else ks
    atomic = isinstance(kernel, FixedPosetKernel)
    method = p.get("method", "auto")
    mode = ("exact" if atomic else "mc") if method == "auto" else ("exact" if method == "exact" else "mc")
    if mode == "exact" and not atomic:
        raise ConfigError("params/method: exact needs an atomic fixed-poset kernel")
    if "event" in p:
        events = [event_of(p["event"], kernel)]
    elif mode == "exact":
        events = [stem_event(kernel.gen, s) for m in range(1, p.get("stem_max", 6) + 1)
                  for s, _ in sorted(reachable_stems(kernel, m))]
    else:
        events = event_battery(p.get("event_k", 2), Fraction(str(p.get("width", "1/2"))))
    rows, failed = [], 0
    tables: dict = {}
    for event in events:
        for k in ks:
            r = check_dlr(kernel, event, k, mode, p.get("samples", 10**5), config["seed"], jobs, tables)
            w = r.witnesses[0].to_dict() if r.witnesses else None
            rows.append({"event": str(event), "k": k, "verdict": r.verdict, "witness": w})
            failed += r.verdict == "fail"
    summary = InvarianceReport(f"dlr[{mode}]", "fail" if failed else "pass", comparisons=len(rows))
    body = {"kernel": kernel.config(), "seed": config["seed"], "verdict": summary.verdict,
            "failures": failed, "checks": rows}
    text = f"{summary.check}: {summary.verdict} ({len(rows)} event/k pairs, {failed} failing)\n"
    return int(bool(failed)), {"dlr.json": dump(body)}, text


def task_diagnose(config, jobs):
    from .diagnostics import essentiality_trace, persistence_profile, polya_limit_test, structure_check
    from .growth import trajectory

    p = config["params"]
    probe = p.get("probe", "trace")
    seed = config["seed"]
    if probe == "polya":
        rep = polya_limit_test(p.get("n_traj", 10**4), p.get("traj_len", 1000), seed, p.get("q"), jobs)
        d = rep.to_dict()
        return int(not rep.passed), {"ks.json": dump(d)}, \
            f"polya-limit: {d['verdict']} (KS={rep.statistic:.4g}, p={rep.pvalue:.3g})\n"
    kernel = kernel_of(config)
    if probe == "trace":
        if "event" not in p:
            raise ConfigError("params/event is required for the trace probe")
        event = event_of(p["event"], kernel)
        trace = essentiality_trace(kernel, event, p.get("k", event.k), p.get("n_max", 18), seed)
        err = trace.final_error()
        tail = f", final |error|={err:.3g}" if err is not None else ""
        return 0, {"trace.csv": trace.to_csv()}, f"trace of {trace.event}: {len(trace.values)} checkpoints{tail}\n"
    if probe == "persistence":
        omega = trajectory(kernel, p.get("n", 256), seed)
        prof = persistence_profile(omega, p.get("k", 4), p.get("threshold", 0.05), p.get("candidates"))
        summary = {"k": prof.k, "threshold": prof.threshold, "checkpoints": prof.checkpoints,
                   "candidates": sorted(prof.curves), "persistent": sorted(prof.persistent), "seed": seed}
        return 0, {"persistence.csv": prof.to_csv(), "persistence.json": dump(summary)}, \
            f"persistence: {len(prof.persistent)} of {len(prof.curves)} candidates persistent\n"
    rep = structure_check(kernel, p.get("k", 3), p.get("eps", 0.1), p.get("samples", 10**4), seed, jobs=jobs)
    d = rep.to_dict()
    return int(not rep.passed), {"structure.json": dump(d)}, \
        f"structure: {d['verdict']} (frequency {rep.frequency:.4g}, eps {rep.eps})\n"


def task_verify_bounds(config, jobs):
    from .bounds import exhaustive_suite, lowdownset_suite, qformula_suite, random_suite

    p = config["params"]
    suite = p.get("suite", "all")
    per_poset = [s for s in ("fishburn", "correlation", "stanley") if suite in (s, "all")]
    reports, files, extra = [], {}, {}
    if per_poset:
        ex = exhaustive_suite(p.get("max_n", 6), per_poset)
        count = p.get("random_count", 1000)
        rnd = random_suite(count, p.get("random_n", 10), config["seed"], per_poset,
                           p.get("pair_sample", 20), jobs, keep_margins=True) if count else {}
        for s in per_poset:
            merged = ex[s]
            if rnd:
                merged.merge(rnd[s])
            reports.append(merged)
    if suite in ("lowdownset", "all"):
        reports.append(lowdownset_suite())
    if suite in ("qformula", "all"):
        rep, rows = qformula_suite()
        reports.append(rep)
        extra["qformula"] = rows
    failed = any(not r.passed for r in reports)
    body = {"seed": config["seed"], "suites": [r.to_dict() for r in reports], **extra}
    files["bounds.json"] = dump(body)
    files["margins.csv"] = "suite,instance,lhs,rhs,margin\n" + "".join(
        r.margins_csv().split("\n", 1)[1] for r in reports)
    text = "".join(f"{r.suite}: {'pass' if r.passed else 'fail'} ({r.instances} instances, "
                   f"{len(r.violations)} violations)\n" for r in reports)
    return int(failed), files, text


def task_count_linext(config, jobs):
    from .linext import count_extensions

    P = poset_of(config, config["params"].get("n"))
    e = count_extensions(P)
    body = {"n": P.n, "extensions": str(e), "model": config.get("model"), "poset": config.get("poset")}
    return 0, {"count.json": dump(body)}, f"{e}\n"


RUNNERS = {
    "simulate": task_simulate,
    "check-invariance": task_check_invariance,
    "check-dlr": task_check_dlr,
    "diagnose": task_diagnose,
    "verify-bounds": task_verify_bounds,
    "count-linext": task_count_linext,
}


def run(config: dict, jobs: int = 1) -> tuple[int, dict[str, str], str]:
    """Execute a validated config; artifacts are returned, not written."""
    status, files, summary = RUNNERS[config["task"]](config, jobs)
    manifest = {"artifact": "causetlab", "version": __version__, "config": config, "seed": config["seed"],
                "status": status,
                "files": {name: hashlib.sha256(text.encode()).hexdigest() for name, text in sorted(files.items())}}
    files = dict(files)
    files["manifest.json"] = dump(manifest)
    return status, files, summary


# ---------------------------------------------------------------------------
# argument parsing

PARAM_FLAGS = ("n", "count", "k", "k_max", "method", "mode", "samples", "event_k", "probe", "n_max",
               "eps", "n_traj", "traj_len", "q", "suite", "max_n", "random_count", "random_n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="causetlab", description="Causal-set growth process laboratory.")
    parser.add_argument("--version", action="version", version=f"causetlab {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON experiment config")
    common.add_argument("--seed", type=int, help="master seed (default 0)")
    common.add_argument("--out", help="directory for artifacts and manifest.json")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for Monte Carlo work")
    common.add_argument("--kernel", help='kernel block as JSON, e.g. \'{"kind": "rgo", "p": 0.5}\'')
    common.add_argument("--model", help="ladder | two-chains | grid | chains:m,t | dary:d | file:<path>")
    common.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one params entry")
    sub = parser.add_subparsers(dest="task", required=True)
    p = sub.add_parser("simulate", parents=[common], help="sample trajectories")
    p.add_argument("--n", type=int)
    p.add_argument("--count", type=int)
    p = sub.add_parser("check-invariance", parents=[common], help="order-invariance and order-Markov checks")
    p.add_argument("--k-max", dest="k_max", type=int)
    p.add_argument("--method", choices=["auto", "exact", "binned"])
    p.add_argument("--mode", choices=["all", "transpositions"])
    p.add_argument("--samples", type=int)
    p.add_argument("--event-k", dest="event_k", type=int)
    p = sub.add_parser("check-dlr", parents=[common], help="mu(E) = E nu^k(E)")
    p.add_argument("--k", type=int)
    p.add_argument("--method", choices=["auto", "exact", "mc"])
    p.add_argument("--samples", type=int)
    p = sub.add_parser("diagnose", parents=[common], help="traces, persistence, structure, Polya limit")
    p.add_argument("--probe", choices=["trace", "persistence", "structure", "polya"])
    p.add_argument("--k", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--samples", type=int)
    p.add_argument("--n-traj", dest="n_traj", type=int)
    p.add_argument("--traj-len", dest="traj_len", type=int)
    p.add_argument("--q", type=float)
    p = sub.add_parser("verify-bounds", parents=[common], help="inequality suites")
    p.add_argument("--suite", choices=["fishburn", "correlation", "stanley", "lowdownset", "qformula", "all"])
    p.add_argument("--max-n", dest="max_n", type=int)
    p.add_argument("--random-count", dest="random_count", type=int)
    p.add_argument("--random-n", dest="random_n", type=int)
    p = sub.add_parser("count-linext", parents=[common], help="count linear extensions")
    p.add_argument("--n", type=int)
    p.add_argument("--poset", help="poset file in the n=/i<j text format")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = resolve(args)
        status, files, summary = run(config, max(1, args.jobs))
    except (ConfigError, PosetError, ValueError) as exc:
        print(f"causetlab: error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(summary)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for name, text in files.items():
            (out / name).write_text(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
