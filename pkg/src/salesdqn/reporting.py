"""Plot-ready CSV/JSON export of a training run plus the saved agent."""
from __future__ import annotations

import csv
import io
import json
import os
import shutil
import tempfile
from pathlib import Path

import numpy as np
import yaml

from .trainer import TrainingReport

MODEL_FILE = "model.txt"
CONFIG_FILE = "config_echo.yaml"
MANIFEST_FILE = "manifest.json"


def _num(x) -> str:
    return repr(float(x))


def _csv(header, rows) -> tuple[str, int]:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    n = 0
    for row in rows:
        w.writerow(row)
        n += 1
    return buf.getvalue(), n


def _is_supply(report: TrainingReport) -> bool:
    if "scenario" in report.config:
        return report.config["scenario"] == "supply"
    return any(m.trace is not None for m in report.episodes)


def render_files(report: TrainingReport) -> dict[str, tuple[str, int | None]]:
    """Map file name -> (text, data row count); row count is None for non-CSV files."""
    eps = report.episodes
    n_actions = report.agent.config.n_actions
    files: dict[str, tuple[str, int | None]] = {}

    files["metrics.csv"] = _csv(
        ["episode", "mean_reward", "total_reward", "epsilon", "mean_loss", "steps"],
        ([m.episode, _num(m.mean_reward), _num(m.total_reward), _num(m.epsilon),
          _num(m.mean_loss), m.steps] for m in eps))
    files["actions.csv"] = _csv(
        ["episode", "action_index", "count"],
        ([m.episode, a, int(m.action_counts[a])] for m in eps for a in range(n_actions)))

    def timeline():
        step = 0
        for m in eps:
            for a in m.actions:
                yield [step, m.episode, a]
                step += 1
    files["actions_timeline.csv"] = _csv(["global_step", "episode", "action_index"], timeline())

    if _is_supply(report):
        total = np.zeros((7, n_actions), dtype=np.int64)
        for m in eps:
            total += m.weekday_action
        files["weekday_action.csv"] = _csv(
            ["weekday", "action_index", "count"],
            ([wd, a, int(total[wd, a])] for wd in range(7) for a in range(n_actions) if eps))
        tr = eps[-1].trace if eps else None
        rows = [] if tr is None else [
            [t, _num(tr.demand[t]), _num(tr.supply[t]), _num(tr.sales[t]), _num(tr.stock[t]),
             _num(tr.shortage[t])] for t in range(len(tr))]
        files["trace_last.csv"] = _csv(["t", "demand", "supply", "sales", "stock", "shortage"], rows)

    model = {"seed": report.seed, "agent": report.agent.to_dict()}
    files[MODEL_FILE] = (json.dumps(model, indent=1) + "\n", None)

    files[CONFIG_FILE] = (yaml.safe_dump(report.config, sort_keys=False), None)
    return files


def write_report(report: TrainingReport, out_dir) -> dict:
    """Write every output file and ``manifest.json``; returns the manifest.

    Files are staged in a sibling temporary directory and moved into place
    only once all of them were written.
    """
    out_dir = Path(out_dir)
    out_dir.parent.mkdir(parents=True, exist_ok=True)
    files = render_files(report)
    manifest = {"files": []}
    for name, (text, rows) in files.items():
        entry = {"name": name, "lines": text.count("\n")}
        if rows is not None:
            entry["rows"] = rows
        manifest["files"].append(entry)
    if report.error:
        manifest["error"] = report.error
    manifest_text = json.dumps(manifest, indent=1) + "\n"

    staging = Path(tempfile.mkdtemp(prefix=".staging-", dir=out_dir.parent))
    try:
        for name, (text, _) in files.items():
            (staging / name).write_text(text, encoding="utf-8", newline="\n")
        (staging / MANIFEST_FILE).write_text(manifest_text, encoding="utf-8", newline="\n")
        out_dir.mkdir(exist_ok=True)
        if not os.access(out_dir, os.W_OK):
            raise PermissionError(f"output directory {out_dir} is not writable")
        for p in sorted(staging.iterdir()):
            os.replace(p, out_dir / p.name)
    finally:
        shutil.rmtree(staging, ignore_errors=True)
    return manifest


def read_manifest(out_dir) -> dict:
    return json.loads((Path(out_dir) / MANIFEST_FILE).read_text(encoding="utf-8"))
