"""Command-line verification harness.

    jetcheck --n 2 --mode auto --suite th1 --suite palatini --report out.json
    jetcheck --expr palatini --n 2

Exit status is 0 exactly when no record failed; 2 for usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone

from . import connections as cn
from . import lagrangians as lg
from .charts import SPACES, ChartSpec, chart_json
from .suites import FAULTS, SUITES, Record, run_one
from .symexpr import CheckOptions, to_prefix

SCHEMA = "jetcheck-report/1"
MAX_SEED = 2**64 - 1


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    n: int = 2
    signature: tuple = ()
    mode: str = "auto"
    trials: int = 20
    seed: int = 0
    coeff_bound: int = 1000
    suites: tuple = SUITES
    faults: tuple = ()

    def __post_init__(self):
        if self.n not in (2, 3, 4):
            raise UsageError(f"--n must be 2, 3 or 4 (got {self.n})")
        sig = tuple(self.signature) or (self.n, 0)
        if len(sig) != 2 or min(sig) < 0 or sum(sig) != self.n:
            raise UsageError(f"signature {sig} must be (n+, n-) with n+ + n- = {self.n}")
        object.__setattr__(self, "signature", sig)
        if self.mode not in ("symbolic", "randomized", "auto"):
            raise UsageError(f"unknown mode {self.mode!r}")
        if self.trials < 1:
            raise UsageError("--trials must be >= 1")
        if not 0 <= self.seed <= MAX_SEED:
            raise UsageError("--seed must be a 64-bit unsigned integer")
        if self.coeff_bound < 2:
            raise UsageError("--coeff-bound must be >= 2")
        unknown = [s for s in self.suites if s not in SUITES]
        if unknown:
            raise UsageError(f"unknown suite(s) {unknown}; choose from {', '.join(SUITES)}")
        bad = [f for f in self.faults if f not in FAULTS]
        if bad:
            raise UsageError(f"unknown fault(s) {bad}; choose from {', '.join(FAULTS)}")
        # keep a canonical order so the report does not depend on flag order
        object.__setattr__(self, "suites", tuple(s for s in SUITES if s in self.suites))
        object.__setattr__(self, "faults", tuple(f for f in FAULTS if f in self.faults))

    @property
    def effective_mode(self) -> str:
        if self.mode == "auto":
            return "symbolic" if self.n == 2 else "randomized"
        return self.mode

    def options(self) -> CheckOptions:
        return CheckOptions(self.effective_mode, self.trials, self.seed, self.coeff_bound)

    def to_json(self) -> dict:
        d = asdict(self)
        d["signature"] = list(self.signature)
        d["suites"] = list(self.suites)
        d["faults"] = list(self.faults)
        d["effective_mode"] = self.effective_mode
        return d


@dataclass
class VerificationReport:
    config: RunConfig
    records: list[Record] = field(default_factory=list)
    started: float = 0.0
    elapsed: float = 0.0

    @property
    def failures(self) -> list[Record]:
        return [r for r in self.records if not r.passed]

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def exit_code(self) -> int:
        return 0 if self.ok else 1

    def summary(self) -> dict:
        by_suite: dict = {}
        for r in self.records:
            s = by_suite.setdefault(r.id.split(":", 1)[0], {"pass": 0, "fail": 0})
            s["pass" if r.passed else "fail"] += 1
        return {"total": len(self.records), "passed": len(self.records) - len(self.failures), "failed": len(self.failures), "suites": by_suite}

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "config": self.config.to_json(),
            "summary": self.summary(),
            "records": [r.to_json() for r in self.records],
            # the only nondeterministic field
            "timing": {
                "generated_at": datetime.fromtimestamp(self.started, timezone.utc).isoformat(timespec="seconds"),
                "total_seconds": round(self.elapsed, 3),
                "records": {r.id: round(r.seconds, 3) for r in self.records},
            },
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"

    def text(self) -> str:
        width = max((len(r.id) for r in self.records), default=10)
        lines = []
        for r in self.records:
            mark = "PASS" if r.passed else "FAIL"
            lines.append(f"{mark}  {r.id:<{width}}  {r.seconds:8.2f}s  {r.anchor}")
            if not r.passed:
                lines.append(f"      {json.dumps(r.detail, sort_keys=True)[:400]}")
        s = self.summary()
        c = self.config
        lines.append(
            f"n={c.n} signature={c.signature} mode={c.effective_mode} seed={c.seed}: "
            f"{s['passed']}/{s['total']} passed, {s['failed']} failed in {self.elapsed:.1f}s"
        )
        return "\n".join(lines)


def _task(args):
    return run_one(*args)


def default_jobs() -> int:
    env = os.environ.get("JETCHECK_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"JETCHECK_JOBS must be an integer (got {env!r})") from None
    return 1


def run_suite(config: RunConfig, jobs: int | None = None) -> VerificationReport:
    """Run every enabled suite (plus injected faults) and merge the records."""
    jobs = default_jobs() if jobs is None else max(1, jobs)
    opts = config.options()
    tasks = [(s, config.n, config.signature, opts, ()) for s in config.suites]
    if config.faults:
        tasks.append(("faults", config.n, config.signature, opts, config.faults))
    report = VerificationReport(config, started=time.time())
    t0 = time.perf_counter()
    if jobs == 1 or len(tasks) <= 1:
        results = [_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as ex:
            results = list(ex.map(_task, tasks))
    for recs in results:
        report.records.extend(recs)
    report.records.sort(key=lambda r: r.id)
    report.elapsed = time.perf_counter() - t0
    return report


# ---------------------------------------------------------------------------


EXPR_OBJECTS = lg.NAMED + ("connection", "connection-sym") + tuple(f"chart:{s}" for s in SPACES)


def expr_object(name: str, n: int) -> dict:
    if name in lg.NAMED:
        L = lg.named(name, n)
        return {"name": name, "chart": L.chart.space, "n": n, "expr": to_prefix(L.expr)}
    if name in ("connection", "connection-sym"):
        variant = "sym" if name.endswith("sym") else "full"
        return {"name": name, "n": n, **cn.canonical_connection(n, variant).to_json()}
    if name.startswith("chart:"):
        return chart_json(ChartSpec(n, name[6:]))
    raise UsageError(f"unknown object {name!r}; choose from {', '.join(EXPR_OBJECTS)}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="jetcheck", description="Verify natural-Lagrangian identities on jet bundles of metrics and connections.")
    p.add_argument("--n", type=int, default=2, help="base dimension (2, 3 or 4)")
    p.add_argument("--signature", default=None, help="metric signature 'p,q' (default n,0)")
    p.add_argument("--mode", default="auto", choices=("symbolic", "randomized", "auto"))
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--coeff-bound", type=int, default=1000)
    p.add_argument("--suite", action="append", choices=SUITES, help="suite to run (repeatable; default all)")
    p.add_argument("--report", default=None, help="write the JSON report here")
    p.add_argument("--expr", default=None, metavar="NAME", help="print a named object and exit")
    p.add_argument("--jobs", type=int, default=None, help="parallel suites (default $JETCHECK_JOBS or 1)")
    p.add_argument(
        "--fault-inject",
        nargs="?",
        const="all",
        default=None,
        metavar="CASES",
        help=f"test only: add deliberately broken objects ({', '.join(FAULTS)}; comma separated, default all)",
    )
    p.add_argument("--quiet", action="store_true", help="only print the summary line")
    return p


def _parse_signature(text, n):
    if text is None:
        return ()
    try:
        return tuple(int(t) for t in text.replace("(", "").replace(")", "").split(","))
    except ValueError:
        raise UsageError(f"bad --signature {text!r}; expected 'p,q'") from None


def config_from_args(args) -> RunConfig:
    faults = ()
    if args.fault_inject is not None:
        faults = FAULTS if args.fault_inject == "all" else tuple(f.strip() for f in args.fault_inject.split(",") if f.strip())
    return RunConfig(
        n=args.n,
        signature=_parse_signature(args.signature, args.n),
        mode=args.mode,
        trials=args.trials,
        seed=args.seed,
        coeff_bound=args.coeff_bound,
        suites=tuple(args.suite) if args.suite else SUITES,
        faults=faults,
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
        if args.expr is not None:
            print(json.dumps(expr_object(args.expr, config.n), indent=2, sort_keys=True))
            return 0
        report = run_suite(config, args.jobs)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"jetcheck: error: {exc}", file=sys.stderr)
        return 2
    text = report.text()
    print(text.splitlines()[-1] if args.quiet else text)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as f:
            f.write(report.dumps())
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
