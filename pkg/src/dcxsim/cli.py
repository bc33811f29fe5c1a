"""Configuration-driven experiment runner.

Config files are YAML with top-level keys:
  seed        integer master seed
  output_dir  directory for the emitted reports
  workers     optional worker-thread count (default 1)
  scenarios   list of {id: <scenario id>, ...scenario parameters...}

Each scenario produces <output_dir>/<id>.json and <output_dir>/<id>.csv.
Exit codes: 0 clean, 1 a verdict was VIOLATION/fail, 2 configuration error,
3 runtime failure.
"""
from __future__ import annotations

import json
import sys
import time
from pathlib import Path

import click
import numpy as np
import yaml

from .geometry import make_stream
from .scenarios import SCENARIOS, ScenarioResult, run_scenario

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

_BAD_VERDICTS = ("VIOLATION", "fail")


class ConfigError(Exception):
    pass


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def _load_config(config_path: str) -> dict:
    path = Path(config_path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {config_path}")
    try:
        cfg = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"config does not parse as YAML: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a mapping")
    for key in ("seed", "output_dir", "scenarios"):
        if key not in cfg:
            raise ConfigError(f"missing required config key: {key}")
    if not isinstance(cfg["seed"], int):
        raise ConfigError("config key 'seed' must be an integer")
    if not isinstance(cfg["scenarios"], list) or not cfg["scenarios"]:
        raise ConfigError("config key 'scenarios' must be a non-empty list")
    workers = cfg.get("workers", 1)
    if not isinstance(workers, int) or workers < 1:
        raise ConfigError("config key 'workers' must be a positive integer")
    for entry in cfg["scenarios"]:
        if not isinstance(entry, dict) or "id" not in entry:
            raise ConfigError("each scenario entry must be a mapping with an 'id' key")
        if entry["id"] not in SCENARIOS:
            raise ConfigError(f"unknown scenario id: {entry['id']}")
    return cfg


def _write_reports(out_dir: Path, result: ScenarioResult, seed: int, params: dict, runtime: float):
    report = {
        "scenario_id": result.scenario_id,
        "seed": seed,
        "params_echo": params,
        "verdict": result.verdict,
        "per_function": result.per_function,
        "mean_equality": result.mean_equality,
        "details": result.details,
        "runtime_seconds": runtime,
    }
    (out_dir / f"{result.scenario_id}.json").write_text(
        json.dumps(report, indent=2, sort_keys=True) + "\n"
    )
    lines = [",".join(result.csv_header)]
    for row in result.csv_rows:
        lines.append(",".join(_fmt(v) for v in row))
    (out_dir / f"{result.scenario_id}.csv").write_text("\n".join(lines) + "\n")


@click.group()
def main():
    """Stochastic-order simulation experiments for spatial processes."""


@main.command("run")
@click.argument("config_path", type=str)
def run_cmd(config_path: str):
    """Run the scenarios named in CONFIG_PATH and write JSON/CSV reports."""
    try:
        cfg = _load_config(config_path)
        out_dir = Path(cfg["output_dir"])
        out_dir.mkdir(parents=True, exist_ok=True)
        probe = out_dir / ".write-probe"
        probe.write_text("")
        probe.unlink()
    except (ConfigError, OSError) as exc:
        click.echo(f"configuration error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)

    seed = cfg["seed"]
    workers = cfg.get("workers", 1)
    any_bad = False
    for k, entry in enumerate(cfg["scenarios"]):
        params = {key: v for key, v in entry.items() if key != "id"}
        sid = entry["id"]
        stream = make_stream(seed, k)
        t0 = time.perf_counter()
        try:
            result = run_scenario(sid, params, stream, workers=workers)
        except (np.linalg.LinAlgError, FloatingPointError) as exc:
            click.echo(f"runtime failure in scenario {sid}: {exc}", err=True)
            sys.exit(EXIT_RUNTIME)
        except (ValueError, KeyError, TypeError) as exc:
            click.echo(f"configuration error in scenario {sid}: {exc}", err=True)
            sys.exit(EXIT_CONFIG)
        except Exception as exc:  # noqa: BLE001 - runtime failures map to exit 3
            click.echo(f"runtime failure in scenario {sid}: {exc}", err=True)
            sys.exit(EXIT_RUNTIME)
        runtime = time.perf_counter() - t0
        try:
            _write_reports(out_dir, result, seed, params, runtime)
        except OSError as exc:
            click.echo(f"configuration error: cannot write reports: {exc}", err=True)
            sys.exit(EXIT_CONFIG)
        click.echo(f"{sid}: {result.verdict} ({runtime:.2f}s)")
        any_bad = any_bad or result.verdict in _BAD_VERDICTS
    sys.exit(EXIT_VIOLATION if any_bad else EXIT_OK)


@main.command("list-scenarios")
def list_scenarios_cmd():
    """Print the scenario ids with one-line descriptions."""
    width = max(len(sid) for sid in SCENARIOS)
    for sid, (desc, _) in SCENARIOS.items():
        click.echo(f"{sid.ljust(width)}  {desc}")


if __name__ == "__main__":
    main()
