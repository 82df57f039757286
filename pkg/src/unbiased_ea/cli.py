"""Command-line experiment runner driven by a single JSON document.

Example::

    {"cmd": "batch", "n": 100, "trials": 1000, "master_seed": 7, "workers": 4,
     "distribution": {"kind": "sbm", "c": 1.0}, "objective": {"kind": "onemax"},
     "out": "runs.csv"}

Subcommands: ``run``, ``batch``, ``drift``, ``bound``, ``oracle``,
``audit``, ``verify`` and ``sweep``. CSV goes to ``out`` (stdout when
absent); JSON reports carry ``config_hash`` and ``master_seed``.
Exit codes: 0 ok, 2 configuration error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import itertools
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from . import distributions as dist
from . import drift, engine, objectives, oracle, stats, verify
from .errors import ConfigError, ConfigParse, SchemaViolation, UnreachableOptimum

log = logging.getLogger(__name__)

COMMANDS = ("run", "batch", "drift", "bound", "oracle", "audit", "verify", "sweep")
SWEEP_COLUMNS = ("n", "dist_kind", "dist_param", "mean_iterations", "std_error", "ratio_to_nlogn_over_p1")
DRIFT_COLUMNS = ("d", "h_tilde", "h", "inv_h_cumsum")
SWEEP_PARAM = {"sbm": "c", "power_law": "beta", "point": "k"}

EXIT_OK, EXIT_CONFIG, EXIT_VERIFY = 0, 2, 3


class VerificationFailed(Exception):
    pass


def config_hash(cfg: Mapping[str, Any]) -> str:
    canonical = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def load_config(source: str) -> dict:
    try:
        text = sys.stdin.read() if source == "-" else Path(source).read_text()
    except OSError as exc:
        raise ConfigParse(f"cannot read {source}: {exc}") from None
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParse(f"invalid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigParse("the experiment document must be a JSON object")
    return cfg


def _int_field(cfg, key, default, lo=0):
    v = cfg.get(key, default)
    if not isinstance(v, int) or isinstance(v, bool) or v < lo:
        raise SchemaViolation(f"'{key}' must be an integer >= {lo}")
    return v


def _validate(cfg: Mapping[str, Any]) -> None:
    if cfg.get("cmd") not in COMMANDS:
        raise SchemaViolation(f"'cmd' must be one of {', '.join(COMMANDS)}")
    if "trials" in cfg:
        _int_field(cfg, "trials", 1, lo=1)
    _int_field(cfg, "workers", 1, lo=1)
    seed = _int_field(cfg, "master_seed", 0)
    if seed > engine.MASK64:
        raise SchemaViolation("'master_seed' must fit in 64 bits")
    _int_field(cfg, "max_evals", engine.DEFAULT_MAX_EVALUATIONS, lo=1)


def _size(cfg) -> int | None:
    n = cfg.get("n")
    if n is not None and (not isinstance(n, int) or isinstance(n, bool) or n < 1):
        raise SchemaViolation("'n' must be a positive integer")
    return n


def _distribution(cfg, n=None) -> dist.FlipDistribution:
    if "distribution" not in cfg:
        raise SchemaViolation("missing 'distribution'")
    return dist.from_dict(cfg["distribution"], n if n is not None else _size(cfg))


def _objective(cfg, n=None) -> objectives.Objective:
    doc = cfg.get("objective", {"kind": "onemax"})
    return objectives.from_dict(doc, n if n is not None else _size(cfg))


def _start(cfg, n):
    s = cfg.get("start", "uniform")
    if s == "uniform":
        return s
    if isinstance(s, Mapping) and "distance" in s:
        return int(s["distance"])
    if isinstance(s, str) and len(s) == n and set(s) <= {"0", "1"}:
        return objectives.BitString.from_str(s)
    raise SchemaViolation("'start' must be \"uniform\", a bit string of length n or {\"distance\": d}")


def _engine_config(cfg, n, seed=None) -> engine.EngineConfig:
    return engine.EngineConfig(
        start=_start(cfg, n),
        max_evaluations=_int_field(cfg, "max_evals", engine.DEFAULT_MAX_EVALUATIONS, lo=1),
        record_trace=bool(cfg.get("record_trace", False)),
        seed=_int_field(cfg, "master_seed", 0) if seed is None else seed,
    )


def _finite(x):
    x = float(x)
    return x if math.isfinite(x) else None


def _json_report(cfg, body: dict) -> str:
    doc = {"config_hash": config_hash(cfg), "master_seed": cfg.get("master_seed", 0), **body}
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def cmd_run(cfg) -> dict[str, str]:
    f = _objective(cfg)
    d = _distribution(cfg, f.n)
    rec = engine.run(f, d, _engine_config(cfg, f.n))
    out = {"": engine.records_to_csv([rec])}
    if rec.trace is not None:
        rows = [(int(t), engine.fmt_float(v), int(p)) for t, v, p in rec.trace]
        out[".trace.csv"] = _csv(("t", "fitness", "potential"), rows)
    return out


def cmd_batch(cfg) -> dict[str, str]:
    f = _objective(cfg)
    d = _distribution(cfg, f.n)
    recs = engine.run_batch(f, d, _engine_config(cfg, f.n), cfg.get("trials", 1), cfg.get("workers", 1))
    return {"": engine.records_to_csv(recs)}


def cmd_drift(cfg) -> dict[str, str]:
    table = drift.drift_table(_distribution(cfg))
    ff = engine.fmt_float
    rows = [(d, ff(table.h_tilde[d]), ff(table.h[d]), ff(table.inv_h_cumsum[d])) for d in range(table.h.size)]
    return {"": _csv(DRIFT_COLUMNS, rows)}


def cmd_bound(cfg) -> dict[str, str]:
    d = _distribution(cfg)
    alpha = float(cfg.get("alpha", 2.0))
    r = float(cfg.get("r", 1.0))
    b, tail = drift.upper_bound_b(d, alpha, r)
    prof = drift.variable_drift_lower_bound(d)
    body = {
        "n": d.n,
        "distribution": d.to_dict(),
        "alpha": alpha,
        "r": r,
        "b_r": b,
        "failure_probability_bound": tail,
        "headline": _finite(prof.headline),
        "sum_inverse_h": prof.sum_inverse_h,
        "d0": prof.d0,
        "variable_drift_failure_p": prof.failure_p,
        "corrected_lower_bound": prof.corrected,
    }
    return {"": _json_report(cfg, body)}


def _times(sol: oracle.ChainSolution) -> list:
    return [_finite(v) for v in sol.expected_time]


def cmd_oracle(cfg) -> dict[str, str]:
    scenario = cfg.get("scenario", "level")
    body: dict[str, Any] = {"scenario": scenario}
    if scenario == "no_domination":
        n = _size(cfg) or 20
        probs = np.zeros(n + 1)
        probs[1], probs[2] = n**-2, 1 - n**-2
        sol = oracle.level_chain(objectives.make_onemax(n), dist.make_custom(n, probs))
        body.update(n=n, expected_time_by_state=_times(sol), E_T1=sol.time_from(n - 1), E_T2=sol.time_from(n - 2))
    elif scenario == "onemax_not_easiest":
        n = _size(cfg) or 14
        probs = np.zeros(n + 1)
        probs[1], probs[2] = n**-3, 1 / n
        probs[3] = 1 - probs[1] - probs[2]
        d = dist.make_custom(n, probs)
        a = float(cfg.get("anchor_weight", 3.0))
        anch = oracle.compressed_anchored_chain(a, n, d)
        om = oracle.level_chain(objectives.make_onemax(n), d)
        # start (0, 1, ..., 1): anchor wrong, every other bit right
        body.update(
            n=n,
            expected_time_by_state=_times(anch),
            E_anchored=anch.time_from(n - 1),
            E_onemax=om.time_from(n - 1),
        )
    elif scenario in ("level", "full", "anchored"):
        f = _objective(cfg)
        d = _distribution(cfg, f.n)
        if scenario == "level":
            sol = oracle.level_chain(f, d)
        elif scenario == "full":
            sol = oracle.full_chain(f, d)
        else:
            if f.kind != "anchored":
                raise SchemaViolation("scenario 'anchored' needs an anchored objective")
            sol = oracle.compressed_anchored_chain(f.anchor_weight, f.n, d)
        body.update(n=f.n, space=sol.space, expected_time_by_state=_times(sol))
        start = cfg.get("start", "uniform")
        if start == "uniform":
            body["uniform_start_mean"] = sol.uniform_start_mean()
        else:
            x = _start(cfg, f.n)
            if not isinstance(x, objectives.BitString):
                raise SchemaViolation("oracle 'start' must be \"uniform\" or a bit string")
            state = {"level": x.ones, "full": oracle._encode(x), "anchored": oracle.anchored_state(x)}[sol.space]
            body["start"] = str(x)
            body["expected_time_from_start"] = sol.time_from(state)
    else:
        raise SchemaViolation(f"unknown oracle scenario {scenario!r}")
    return {"": _json_report(cfg, body)}


def cmd_audit(cfg) -> dict[str, str]:
    d = _distribution(cfg)
    rows = drift.audit(d, int(cfg.get("r0", 12)))
    return {"": _json_report(cfg, {"n": d.n, "distribution": d.to_dict(), "rows": rows})}


def cmd_verify(cfg) -> dict[str, str]:
    level = cfg.get("level", "quick")
    if level not in ("quick", "full"):
        raise SchemaViolation("'level' must be 'quick' or 'full'")
    results = verify.verify_suite(level, cfg.get("workers", 1))
    for r in results:
        log.info(r.line())
    body = {
        "level": level,
        "passed": all(r.passed for r in results),
        "criteria": [r.to_dict() for r in results],
    }
    report = _json_report(cfg, body)
    if not body["passed"]:
        raise VerificationFailed(report)
    return {"": report}


def _sweep_cells(cfg):
    ns = cfg.get("ns")
    specs = cfg.get("distributions")
    if not isinstance(ns, list) or not ns or not isinstance(specs, list) or not specs:
        raise SchemaViolation("sweep needs non-empty 'ns' and 'distributions' lists")
    for n in ns:
        if not isinstance(n, int) or isinstance(n, bool) or n < 2:
            raise SchemaViolation("every entry of 'ns' must be an integer >= 2")
    cells = []
    for entry in specs:
        kind = entry.get("kind") if isinstance(entry, Mapping) else None
        if kind not in SWEEP_PARAM:
            raise SchemaViolation(f"sweep distribution kind must be one of {sorted(SWEEP_PARAM)}")
        key = SWEEP_PARAM[kind]
        values = entry.get(key)
        values = values if isinstance(values, list) else [values]
        if any(v is None for v in values):
            raise SchemaViolation(f"sweep over {kind!r} needs '{key}'")
        cells.extend((kind, key, v) for v in values)
    return list(itertools.product(ns, cells))


def cmd_sweep(cfg) -> dict[str, str]:
    master = _int_field(cfg, "master_seed", 0)
    trials = cfg.get("trials", 1)
    if trials < 2:
        raise SchemaViolation("sweep needs at least two trials per cell")
    rows = []
    for idx, (n, (kind, key, value)) in enumerate(_sweep_cells(cfg)):
        f = _objective(cfg, n)
        d = dist.from_dict({"kind": kind, key: value}, n)
        ecfg = _engine_config(cfg, n, seed=engine.trial_seed(master, idx))
        it = engine.iterations(engine.run_batch(f, d, ecfg, trials, cfg.get("workers", 1)))
        s = stats.summarize(it)
        ratio = s.mean * d.p1 / (n * math.log(n))
        ff = engine.fmt_float
        rows.append((n, kind, ff(value), ff(s.mean), ff(s.std_error), ff(ratio)))
    return {"": _csv(SWEEP_COLUMNS, rows)}


HANDLERS = {
    "run": cmd_run,
    "batch": cmd_batch,
    "drift": cmd_drift,
    "bound": cmd_bound,
    "oracle": cmd_oracle,
    "audit": cmd_audit,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
}


def _write(cfg, outputs: dict[str, str]) -> list[Path]:
    out = cfg.get("out")
    if out is None:
        for text in outputs.values():
            sys.stdout.write(text)
        return []
    written = []
    for suffix, text in outputs.items():
        path = Path(str(out) + suffix)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            fh.write(text)
        written.append(path)
    return written


def run_experiment(cfg: Mapping[str, Any]) -> list[Path]:
    """Validate ``cfg``, run its subcommand and write the report(s).

    Returns the written paths (empty when printing to stdout). Library
    ``ValueError``s raised while building objects from the document are
    re-raised as :class:`SchemaViolation`.
    """
    _validate(cfg)
    try:
        outputs = HANDLERS[cfg["cmd"]](cfg)
    except VerificationFailed as exc:
        _write(cfg, {"": str(exc)})
        raise
    except ConfigError:
        raise
    except ValueError as exc:
        raise SchemaViolation(f"{type(exc).__name__}: {exc}") from exc
    return _write(cfg, outputs)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="unbiased-ea", description=__doc__.split("\n")[0])
    parser.add_argument("config", help="experiment JSON document, or - for stdin")
    parser.add_argument("-v", "--verbose", action="store_true")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        run_experiment(load_config(args.config))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except VerificationFailed:
        print("verification failed", file=sys.stderr)
        return EXIT_VERIFY
    except UnreachableOptimum as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
