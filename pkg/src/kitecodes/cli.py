"""Command-line experiments: ``kitecodes {build,ber,harq,optimize} --config FILE``.

Every output embeds the master seed and the SHA-256 digest of the mother
code, and contains no timestamps, so identical configs give identical bytes.
Exit codes: 0 success, 1 configuration error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

import jsonschema

from . import alist
from .channel import constellation
from .construction import CodeSpec, build_mother_code
from .harq import throughput_curve, write_csv
from .optimizer import ObjectiveConfig, greedy_design, write_trace_csv
from .profile import QProfile, formula_profile, q_from_table
from .simulation import simulate_ber

THREADS_ENV = "KITECODES_THREADS"

_num = {"type": "number"}
SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["code"],
    "properties": {
        "code": {
            "type": "object",
            "additionalProperties": False,
            "required": ["k"],
            "properties": {
                "k": {"type": "integer", "minimum": 20},
                "variant": {"enum": ["original", "improved"]},
            },
        },
        "q_source": {"enum": ["table", "formula", "custom"]},
        "q": {"type": "array", "items": _num, "minItems": 19, "maxItems": 19},
        "modulation": {"enum": ["bpsk", "qpsk", "16qam", "64qam"]},
        "snr_type": {"enum": ["ebn0", "esn0"]},
        "snr_db": {"type": "array", "items": {"anyOf": [_num, {"const": "inf"}]}, "minItems": 1},
        "rates": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0.05, "maximum": 1},
                  "minItems": 1},
        "frames": {"type": "integer", "minimum": 1},
        "max_iterations": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "threads": {"type": "integer", "minimum": 1},
        "output": {"type": "string"},
        "harq": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "step": {"type": ["integer", "null"], "minimum": 1},
                "start_length": {"type": ["integer", "null"], "minimum": 1},
                "schedule": {"enum": ["fixed", "boundary"]},
            },
        },
        "optimizer": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "frames": {"type": "integer", "minimum": 1},
                "margin_db": _num,
                "bracket": {"type": "array", "items": _num, "minItems": 2, "maxItems": 2},
                "tolerance": {"type": "number", "exclusiveMinimum": 0},
                "max_evals": {"type": "integer", "minimum": 1},
            },
        },
    },
}

DEFAULT_OUTPUT = {"build": "code.alist", "ber": "ber.csv", "harq": "harq.csv", "optimize": "profile.json"}


class ConfigError(Exception):
    pass


def load_config(path) -> dict:
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    try:
        jsonschema.validate(cfg, SCHEMA)
    except jsonschema.ValidationError as e:
        raise ConfigError(f"schema error at {list(e.absolute_path)}: {e.message}") from e
    if cfg.get("q_source") == "custom" and "q" not in cfg:
        raise ConfigError("q_source 'custom' requires a 'q' list")
    return cfg


def _profile(cfg: dict, k: int) -> QProfile:
    source = cfg.get("q_source", "formula")
    try:
        if source == "table":
            return q_from_table(k)
        if source == "custom":
            return QProfile(k, tuple(cfg["q"]), "custom")
        return formula_profile(k)
    except ValueError as e:
        raise ConfigError(str(e)) from e


def _code(cfg: dict, seed: int):
    k = cfg["code"]["k"]
    spec = CodeSpec(k, cfg["code"].get("variant", "improved"), seed)
    profile = _profile(cfg, k)
    return spec, profile, build_mother_code(spec, profile)


def _header(fh, seed: int, digest: str, cfg: dict) -> None:
    fh.write(f"# seed={seed}\n# digest={digest}\n")
    fh.write("# config=" + json.dumps(cfg, sort_keys=True) + "\n")


def _snr_list(cfg: dict) -> list[float]:
    return [math.inf if x == "inf" else float(x) for x in cfg.get("snr_db", [0.0])]


def cmd_build(cfg: dict, seed: int, threads: int, out: Path) -> None:
    spec, profile, H = _code(cfg, seed)
    alist.write(H, out)
    meta = {
        "seed": seed,
        "code": spec.to_dict(),
        "profile": profile.to_dict(),
        "digest": H.digest(),
        "rows": H.r,
        "columns": H.n,
    }
    Path(str(out) + ".json").write_text(json.dumps(meta, indent=2) + "\n")


def cmd_ber(cfg: dict, seed: int, threads: int, out: Path) -> None:
    if cfg.get("snr_type", "ebn0") != "ebn0":
        raise ConfigError("ber sweeps are specified in Eb/N0")
    spec, _, H = _code(cfg, seed)
    const = constellation(cfg.get("modulation", "bpsk"))
    buf = io.StringIO()
    _header(buf, seed, H.digest(), cfg)
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("rate", "n", "ebn0_db", "frames", "bit_errors", "ber", "ci_low", "ci_high",
                "frame_errors", "mean_iterations"))
    for rate in cfg.get("rates", [0.5]):
        n = math.floor(spec.k / Fraction(str(rate)))
        if not spec.k <= n <= H.n:
            raise ConfigError(f"rate {rate} is outside the mother code")
        pts = simulate_ber(H.prefix(n), _snr_list(cfg), cfg.get("frames", 100), seed, const,
                           cfg.get("max_iterations", 50), threads)
        for p in pts:
            w.writerow((rate, n, p.ebn0_db, p.frames, p.bit_errors, repr(p.ber), repr(p.ci_low),
                        repr(p.ci_high), p.frame_errors, repr(p.mean_iterations)))
    out.write_text(buf.getvalue())


def cmd_harq(cfg: dict, seed: int, threads: int, out: Path) -> None:
    if cfg.get("snr_type", "esn0") != "esn0":
        raise ConfigError("harq sweeps are specified in Es/N0")
    _, _, H = _code(cfg, seed)
    const = constellation(cfg.get("modulation", "bpsk"))
    h = cfg.get("harq", {})
    points, traces = throughput_curve(
        H, const, _snr_list(cfg), cfg.get("frames", 100), seed, threads,
        h.get("start_length"), h.get("step"), h.get("schedule", "fixed"),
        cfg.get("max_iterations", 50))
    buf = io.StringIO()
    _header(buf, seed, H.digest(), cfg)
    write_csv(buf, points, traces, seed, const.b)
    out.write_text(buf.getvalue())


def cmd_optimize(cfg: dict, seed: int, threads: int, out: Path) -> None:
    k = cfg["code"]["k"]
    o = cfg.get("optimizer", {})
    ocfg = ObjectiveConfig(
        frames=o.get("frames", 20),
        margin_db=o.get("margin_db", 1.0),
        bracket=tuple(o["bracket"]) if "bracket" in o else None,
        tolerance=o.get("tolerance"),
        max_evals=o.get("max_evals"),
        max_iter=cfg.get("max_iterations", 50),
        seed=seed,
    )
    res = greedy_design(k, ocfg, cfg["code"].get("variant", "improved"))
    doc = res.profile.to_dict() | {"seed": seed, "budget_exhausted": res.exhausted}
    out.write_text(json.dumps(doc, indent=2) + "\n")
    trace = io.StringIO()
    trace.write(f"# seed={seed}\n")
    write_trace_csv(trace, res)
    out.with_suffix(".trace.csv").write_text(trace.getvalue())


COMMANDS = {"build": cmd_build, "ber": cmd_ber, "harq": cmd_harq, "optimize": cmd_optimize}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kitecodes", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", required=True, help="JSON experiment config")
        s.add_argument("--seed", type=int, help="master seed (overrides config)")
        s.add_argument("--threads", type=int, help=f"worker threads (default ${THREADS_ENV} or 1)")
        s.add_argument("--out", help="output path (overrides config)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        seed = args.seed if args.seed is not None else cfg.get("seed", 0)
        if not 0 <= seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        threads = args.threads or int(os.environ.get(THREADS_ENV, cfg.get("threads", 1)))
        out = Path(args.out or cfg.get("output") or DEFAULT_OUTPUT[args.command])
        COMMANDS[args.command](cfg, seed, threads, out)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1
    except Exception as e:  # noqa: BLE001
        print(f"error: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
