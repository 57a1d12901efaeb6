"""Seeded experiment runner, ground-truth verdicts and CSV output."""
from __future__ import annotations

import csv
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .bsr import binary_search_ranking
from .duel import _check_eps_delta
from .maxsel import knockout
from .mergerank import rank3, seq_error
from .oracle import Oracle, PreferenceModel, make_model

ALGORITHMS = ("knockout", "merge-rank", "bsr")
COLUMNS = (
    "run_id", "algorithm", "model", "n", "eps", "delta", "gamma", "x",
    "seed", "comparisons", "output_head", "correct", "wall_ms",
)


def is_eps_maximum(e: int, model: PreferenceModel, eps: float) -> bool:
    """True iff the best element beats ``e`` by at most ``eps``."""
    if e == model.best:
        return True
    return model.margin(model.best, e) <= eps


def eval_err(seq: Sequence[int], model: PreferenceModel) -> float:
    """Largest advantage of an earlier over a later item (see ``seq_error``)."""
    if len(seq) == 0:
        raise ValueError("cannot score an empty ranking")
    return seq_error(seq, model)


@dataclass
class ExperimentSpec:
    algorithm: str
    model: str
    n: int | None = None
    eps: float = 0.05
    delta: float = 0.1
    gamma: float = 1.0
    x: float = 3.0
    anchors: int | None = None
    runs: int = 1
    seed: int = 0
    timing: bool = False

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if self.runs < 1:
            raise ValueError(f"runs must be >= 1, got {self.runs}")
        _check_eps_delta(self.eps, self.delta)
        if self.gamma < 1:
            raise ValueError(f"gamma must be >= 1, got {self.gamma}")
        if self.x <= 0:
            raise ValueError(f"x must be positive, got {self.x}")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")

    def build_model(self) -> PreferenceModel:
        return make_model(self.model, self.n)


@dataclass
class ExperimentRecord:
    run_id: int
    algorithm: str
    model: str
    n: int
    eps: float
    delta: float
    gamma: float
    x: float
    seed: int
    comparisons: int
    output: int | list
    correct: bool
    wall_ms: float | None = None
    phases: dict = field(default_factory=dict, compare=False)


def run_seed(root: int, run_id: int) -> int:
    ss = np.random.SeedSequence(root, spawn_key=(run_id,))
    return int(ss.generate_state(1)[0])


def run_once(spec: ExperimentSpec, model: PreferenceModel, run_id: int) -> ExperimentRecord:
    seed = run_seed(spec.seed, run_id)
    oracle = Oracle(model, seed=seed)
    elements = list(range(1, model.n + 1))
    t0 = time.perf_counter()
    if spec.algorithm == "knockout":
        out = knockout(elements, spec.eps, spec.delta, oracle, gamma=spec.gamma)
    elif spec.algorithm == "merge-rank":
        out = rank3(elements, spec.eps, spec.delta, oracle) if model.n > 1 else elements
    else:
        out = binary_search_ranking(elements, spec.eps, oracle, x=spec.x, n_anchors=spec.anchors)
    wall = (time.perf_counter() - t0) * 1000.0 if spec.timing else None
    # verdicts read the model only; the oracle is not touched past this point
    if spec.algorithm == "knockout":
        correct = is_eps_maximum(out, model, spec.eps)
    else:
        correct = eval_err(out, model) <= spec.eps
    return ExperimentRecord(
        run_id, spec.algorithm, spec.model, model.n, spec.eps, spec.delta,
        spec.gamma, spec.x, seed, oracle.tally.total, out, bool(correct), wall,
        dict(oracle.tally.phases),
    )


def run_experiment(spec: ExperimentSpec, n_jobs: int = 1, first_run_id: int = 0) -> list[ExperimentRecord]:
    """Execute ``spec.runs`` independently seeded runs, ordered by run id.

    Run ``k`` is seeded from ``(spec.seed, k)`` alone, so the worker count
    never changes the records (timings aside).
    """
    model = spec.build_model()
    ids = range(first_run_id, first_run_id + spec.runs)

    def one(run_id):
        return run_once(spec, model, run_id)

    if n_jobs > 1 and spec.runs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            return list(pool.map(one, ids))
    return [one(k) for k in ids]


def summarize(records: Sequence[ExperimentRecord]) -> dict:
    if not records:
        return {"runs": 0, "mean_comparisons": math.nan, "std_comparisons": math.nan, "success_rate": math.nan}
    comps = np.array([r.comparisons for r in records], dtype=float)
    return {
        "runs": len(records),
        "mean_comparisons": float(comps.mean()),
        "std_comparisons": float(comps.std(ddof=1)) if len(comps) > 1 else 0.0,
        "success_rate": float(np.mean([r.correct for r in records])),
    }


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit_csv(records: Iterable[ExperimentRecord], destination: str | Path) -> None:
    """Write one row per record; rankings go to a sidecar directory.

    Sidecars live in ``<stem>_rankings/run_<id>.txt`` next to the CSV, one
    id per line, weakest first, and ``output_head`` holds the relative path.
    """
    dest = Path(destination)
    records = list(records)
    try:
        side = dest.parent / f"{dest.stem}_rankings"
        with open(dest, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(COLUMNS)
            for r in records:
                if isinstance(r.output, list):
                    side.mkdir(parents=True, exist_ok=True)
                    rel = f"{side.name}/run_{r.run_id:05d}.txt"
                    (dest.parent / rel).write_text("".join(f"{e}\n" for e in r.output))
                    head = rel
                else:
                    head = str(r.output)
                w.writerow([
                    _fmt(r.run_id), r.algorithm, r.model, _fmt(r.n), _fmt(r.eps),
                    _fmt(r.delta), _fmt(r.gamma), _fmt(r.x), _fmt(r.seed),
                    _fmt(r.comparisons), head, _fmt(r.correct), _fmt(r.wall_ms),
                ])
    except OSError as exc:
        raise OSError(f"cannot write results to {dest}: {exc}") from exc


def read_csv(source: str | Path) -> list[ExperimentRecord]:
    """Parse a file written by ``emit_csv``, loading ranking sidecars."""
    src = Path(source)
    out = []
    with open(src, newline="") as fh:
        for row in csv.DictReader(fh):
            head = row["output_head"]
            if head.lstrip("-").isdigit():
                output = int(head)
            else:
                output = [int(t) for t in (src.parent / head).read_text().split()]
            out.append(ExperimentRecord(
                run_id=int(row["run_id"]), algorithm=row["algorithm"], model=row["model"],
                n=int(row["n"]), eps=float(row["eps"]), delta=float(row["delta"]),
                gamma=float(row["gamma"]), x=float(row["x"]), seed=int(row["seed"]),
                comparisons=int(row["comparisons"]), output=output,
                correct=row["correct"] == "true",
                wall_ms=float(row["wall_ms"]) if row["wall_ms"] else None,
            ))
    return out
