"""Experiment orchestration: sweeps over (ansatz, qubits, repetitions).

Each cell builds the logical circuit, measures its gradient variance,
transpiles it, re-parameterizes, measures again on the physical cost
qubit, and records structural deltas alongside the trainability shift.
Cells run in a thread pool capped by the VQCLAB_THREADS environment
variable; per-cell seeding makes parallel and serial runs emit identical
results. Failures are captured per cell and never abort the sweep.
"""

from __future__ import annotations

import json
import math
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, Sequence

from .ansatz import build_ansatz
from .backend import BackendModel, resolve_backend
from .circuit import Circuit, structural_metrics
from .grad import GradStats, ReparamMode, grad_variance, reparameterize
from .transpiler import check_constraints, transpile

CELL_SEED_STRIDE = 1000003

CSV_HEADER = (
    "ansatz,n,reps,P_log,P_phys,g1q_log,g1q_phys,g2q_log,g2q_phys,"
    "depth_log,depth_phys,delta_g1q,delta_g2q,delta_depth_dag,delta_depth_paper,"
    "gradvar_log,gradvar_phys,delta_gradvar,stderr_log,stderr_phys,seed"
)


@dataclass
class SweepConfig:
    ansatz: list[str]
    qubits: list[int]
    reps: list[int]
    samples: int = 200
    base_seed: int = 42
    backend: str = "heavy-hex:5,11"
    mode: str = ReparamMode.ALL_ANGLES.value
    meta_seeds: int = 1
    out_csv: str | None = None
    out_dir: str | None = None
    out_jsonl: str | None = None

    def __post_init__(self) -> None:
        if not self.ansatz or not self.qubits or not self.reps:
            raise ValueError("ansatz, qubits and reps lists must be non-empty")
        if any(n < 2 for n in self.qubits):
            raise ValueError("qubit counts must be >= 2")
        if any(r < 1 for r in self.reps):
            raise ValueError("repetition counts must be >= 1")
        if self.samples < 2:
            raise ValueError("samples must be >= 2")
        if self.meta_seeds < 1:
            raise ValueError("meta_seeds must be >= 1")
        ReparamMode(self.mode)


def default_sweep_config(**overrides) -> SweepConfig:
    """The stock sweep: all three families over a heavy-hex device."""
    base = dict(
        ansatz=["efficient_su2", "ttn", "real_amplitudes"],
        qubits=[2, 4, 6, 8, 10],
        reps=[1, 2, 4, 6, 8, 10],
        samples=200,
        base_seed=42,
        backend="heavy-hex:5,11",
    )
    base.update(overrides)
    return SweepConfig(**base)


@dataclass
class SweepRecord:
    ansatz: str
    n: int
    reps: int
    p_log: int = 0
    p_phys: int = 0
    g1q_log: int = 0
    g1q_phys: int = 0
    g2q_log: int = 0
    g2q_phys: int = 0
    depth_log: int = 0
    depth_phys: int = 0
    delta_g1q: int = 0
    delta_g2q: int = 0
    delta_depth_dag: int = 0
    delta_depth_paper: int = 0
    gradvar_log: float = 0.0
    gradvar_phys: float = 0.0
    delta_gradvar: float = 0.0
    stderr_log: float = 0.0
    stderr_phys: float = 0.0
    seed: int = 0
    wall_time: float = 0.0
    error: str | None = None


def _gradvar_with_meta(
    circuit: Circuit, samples: int, seed: int, cost_qubit: int, meta_seeds: int
) -> tuple[float, float, GradStats]:
    """GradVar and its standard error, averaging over meta seeds when asked.

    With one meta seed the stderr falls back to the analytic
    grad_var * sqrt(2/(samples-1)) approximation; with several it is the
    empirical standard error of the per-seed GradVar values.
    """
    stats = grad_variance(circuit, samples, seed, cost_qubit)
    if meta_seeds == 1:
        return stats.grad_var, stats.stderr, stats
    values = [stats.grad_var]
    values += [
        grad_variance(circuit, samples, seed + r, cost_qubit).grad_var for r in range(1, meta_seeds)
    ]
    mean = sum(values) / len(values)
    var = sum((v - mean) ** 2 for v in values) / (len(values) - 1)
    return mean, math.sqrt(var / len(values)), stats


def cell_seed(base_seed: int, cell_index: int) -> int:
    return base_seed + CELL_SEED_STRIDE * cell_index


def enumerate_cells(config: SweepConfig) -> list[tuple[int, str, int, int, int]]:
    """Canonical cell order: ansatz-major, then qubits, then reps."""
    cells = []
    index = 0
    for kind in config.ansatz:
        for n in config.qubits:
            for reps in config.reps:
                cells.append((index, kind, n, reps, cell_seed(config.base_seed, index)))
                index += 1
    return cells


def run_cell(config: SweepConfig, backend: BackendModel, kind: str, n: int, reps: int, seed: int) -> SweepRecord:
    start = time.perf_counter()
    try:
        logical = build_ansatz(kind, n, reps)
        gv_log, se_log, _ = _gradvar_with_meta(logical, config.samples, seed, 0, config.meta_seeds)
        t = transpile(logical, backend)
        check_constraints(t, backend)
        physical = reparameterize(t, ReparamMode(config.mode))
        gv_phys, se_phys, _ = _gradvar_with_meta(
            physical, config.samples, seed, t.cost_qubit, config.meta_seeds
        )
        before = structural_metrics(logical)
        after = t.metrics_after
        return SweepRecord(
            ansatz=kind,
            n=n,
            reps=reps,
            p_log=before.num_symbols,
            p_phys=physical.num_symbols,
            g1q_log=before.g1q,
            g1q_phys=after.g1q,
            g2q_log=before.g2q,
            g2q_phys=after.g2q,
            depth_log=before.dag_depth,
            depth_phys=after.dag_depth,
            delta_g1q=after.g1q - before.g1q,
            delta_g2q=after.g2q - before.g2q,
            delta_depth_dag=after.dag_depth - before.dag_depth,
            delta_depth_paper=after.dag_depth - reps,
            gradvar_log=gv_log,
            gradvar_phys=gv_phys,
            delta_gradvar=gv_phys - gv_log,
            stderr_log=se_log,
            stderr_phys=se_phys,
            seed=seed,
            wall_time=time.perf_counter() - start,
        )
    except Exception as e:  # noqa: BLE001 - cell isolation is the contract
        return SweepRecord(
            ansatz=kind, n=n, reps=reps, seed=seed, wall_time=time.perf_counter() - start, error=str(e)
        )


def _worker_count(num_cells: int) -> int:
    env = os.environ.get("VQCLAB_THREADS")
    cap = int(env) if env else min(8, os.cpu_count() or 1)
    return max(1, min(cap, num_cells))


def _checkpoint_key(config: SweepConfig, record: SweepRecord) -> tuple:
    return (record.ansatz, record.n, record.reps, record.seed, config.samples, config.mode, config.backend)


def _load_checkpoints(config: SweepConfig) -> dict[tuple, SweepRecord]:
    loaded: dict[tuple, SweepRecord] = {}
    path = config.out_jsonl
    if not path or not Path(path).exists():
        return loaded
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        payload = json.loads(line)
        if payload.get("samples") != config.samples or payload.get("mode") != config.mode:
            continue
        if payload.get("backend") != config.backend:
            continue
        record = SweepRecord(**payload["record"])
        if record.error is None:
            loaded[_checkpoint_key(config, record)] = record
    return loaded


def run_sweep(
    config: SweepConfig,
    *,
    resume: bool = False,
    progress: Callable[[SweepRecord, int, int], None] | None = None,
) -> list[SweepRecord]:
    """Run every cell of the sweep and return records in canonical order."""
    backend = resolve_backend(config.backend)
    cells = enumerate_cells(config)
    done: dict[tuple, SweepRecord] = _load_checkpoints(config) if resume else {}

    lock = threading.Lock()
    results: dict[int, SweepRecord] = {}
    completed = 0
    jsonl = open(config.out_jsonl, "a", encoding="utf-8") if config.out_jsonl else None

    def finish(index: int, record: SweepRecord, fresh: bool) -> None:
        nonlocal completed
        with lock:
            results[index] = record
            completed += 1
            if fresh and jsonl is not None:
                payload = {
                    "record": asdict(record),
                    "samples": config.samples,
                    "mode": config.mode,
                    "backend": config.backend,
                }
                jsonl.write(json.dumps(payload, sort_keys=True) + "\n")
                jsonl.flush()
            if progress is not None:
                progress(record, completed, len(cells))

    def work(cell: tuple[int, str, int, int, int]) -> None:
        index, kind, n, reps, seed = cell
        probe = SweepRecord(ansatz=kind, n=n, reps=reps, seed=seed)
        cached = done.get(_checkpoint_key(config, probe))
        if cached is not None:
            finish(index, cached, fresh=False)
            return
        finish(index, run_cell(config, backend, kind, n, reps, seed), fresh=True)

    try:
        workers = _worker_count(len(cells))
        if workers == 1:
            for cell in cells:
                work(cell)
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                list(pool.map(work, cells))
    finally:
        if jsonl is not None:
            jsonl.close()
    return [results[i] for i in sorted(results)]


# ---------------------------------------------------------------------------
# CSV


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def emit_csv(records: Sequence[SweepRecord], path: str | Path) -> None:
    """Write records as CSV (canonical order, 9 significant digits).

    Error records carry no numbers and are omitted; they stay visible in
    the JSONL checkpoint stream.
    """
    lines = [CSV_HEADER]
    for r in records:
        if r.error is not None:
            continue
        lines.append(
            ",".join(
                [
                    r.ansatz,
                    str(r.n),
                    str(r.reps),
                    str(r.p_log),
                    str(r.p_phys),
                    str(r.g1q_log),
                    str(r.g1q_phys),
                    str(r.g2q_log),
                    str(r.g2q_phys),
                    str(r.depth_log),
                    str(r.depth_phys),
                    str(r.delta_g1q),
                    str(r.delta_g2q),
                    str(r.delta_depth_dag),
                    str(r.delta_depth_paper),
                    _fmt(r.gradvar_log),
                    _fmt(r.gradvar_phys),
                    _fmt(r.delta_gradvar),
                    _fmt(r.stderr_log),
                    _fmt(r.stderr_phys),
                    str(r.seed),
                ]
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_csv(path: str | Path) -> list[SweepRecord]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"{path}: unexpected CSV header")
    records = []
    for line in lines[1:]:
        if not line.strip():
            continue
        f = line.split(",")
        records.append(
            SweepRecord(
                ansatz=f[0],
                n=int(f[1]),
                reps=int(f[2]),
                p_log=int(f[3]),
                p_phys=int(f[4]),
                g1q_log=int(f[5]),
                g1q_phys=int(f[6]),
                g2q_log=int(f[7]),
                g2q_phys=int(f[8]),
                depth_log=int(f[9]),
                depth_phys=int(f[10]),
                delta_g1q=int(f[11]),
                delta_g2q=int(f[12]),
                delta_depth_dag=int(f[13]),
                delta_depth_paper=int(f[14]),
                gradvar_log=float(f[15]),
                gradvar_phys=float(f[16]),
                delta_gradvar=float(f[17]),
                stderr_log=float(f[18]),
                stderr_phys=float(f[19]),
                seed=int(f[20]),
            )
        )
    return records


# ---------------------------------------------------------------------------
# Heatmap SVG


def _diverging_color(value: float, vmax: float) -> str:
    """Blue below zero, white at zero, red above; symmetric scale."""
    t = 0.0 if vmax <= 0 else max(-1.0, min(1.0, value / vmax))
    mid = (247, 247, 247)
    end = (33, 102, 172) if t < 0 else (178, 24, 43)
    a = abs(t)
    rgb = tuple(round(m + (e - m) * a) for m, e in zip(mid, end))
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def emit_heatmap_svg(records: Sequence[SweepRecord], ansatz: str, path: str | Path) -> None:
    """Render the trainability-shift grid for one ansatz family.

    Repetitions run along x, qubit counts along y; each cell is colored on
    a diverging scale centered at zero (blue = suppression, red =
    amplification) and annotated with its value. The grid must be
    complete; missing cells raise with an explicit list.
    """
    recs = [r for r in records if r.ansatz == ansatz and r.error is None]
    if not recs:
        raise ValueError(f"no records for ansatz {ansatz!r}")
    ns = sorted({r.n for r in recs})
    ls = sorted({r.reps for r in recs})
    by_cell = {(r.n, r.reps): r for r in recs}
    missing = [(n, l) for n in ns for l in ls if (n, l) not in by_cell]
    if missing:
        raise ValueError(f"incomplete grid for ansatz {ansatz!r}; missing cells (n, reps): {missing}")

    vmax = max(abs(r.delta_gradvar) for r in recs)
    cell_w, cell_h = 86, 48
    left, top, right, bottom = 84, 56, 24, 72
    width = left + cell_w * len(ls) + right
    height = top + cell_h * len(ns) + bottom

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif">',
        f'<text x="{width / 2:.1f}" y="24" text-anchor="middle" font-size="15">'
        f"delta GradVar (physical - logical): {ansatz}</text>",
    ]
    for yi, n in enumerate(ns):
        for xi, l in enumerate(ls):
            r = by_cell[(n, l)]
            x, y = left + xi * cell_w, top + yi * cell_h
            color = _diverging_color(r.delta_gradvar, vmax)
            strong = vmax > 0 and abs(r.delta_gradvar) / vmax > 0.6
            text_color = "#ffffff" if strong else "#000000"
            parts.append(
                f'<rect x="{x}" y="{y}" width="{cell_w}" height="{cell_h}" '
                f'fill="{color}" stroke="#888888"/>'
            )
            parts.append(
                f'<text x="{x + cell_w / 2:.1f}" y="{y + cell_h / 2 + 4:.1f}" text-anchor="middle" '
                f'font-size="12" fill="{text_color}">{r.delta_gradvar:.3g}</text>'
            )
    for yi, n in enumerate(ns):
        parts.append(
            f'<text x="{left - 10}" y="{top + yi * cell_h + cell_h / 2 + 4:.1f}" '
            f'text-anchor="end" font-size="12">{n}</text>'
        )
    for xi, l in enumerate(ls):
        parts.append(
            f'<text x="{left + xi * cell_w + cell_w / 2:.1f}" y="{top + cell_h * len(ns) + 18}" '
            f'text-anchor="middle" font-size="12">{l}</text>'
        )
    parts.append(
        f'<text x="{left + cell_w * len(ls) / 2:.1f}" y="{height - 34}" text-anchor="middle" '
        f'font-size="13">repetitions</text>'
    )
    parts.append(
        f'<text x="20" y="{top + cell_h * len(ns) / 2:.1f}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 20 {top + cell_h * len(ns) / 2:.1f})">qubits</text>'
    )
    parts.append(
        f'<text x="{left}" y="{height - 12}" font-size="11">scale: +-{vmax:.3g} '
        f"(blue = suppression, red = amplification)</text>"
    )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")
