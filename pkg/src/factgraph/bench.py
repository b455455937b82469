"""Convergence experiment: damping sweeps on small-world graphs.

Generates a connected Watts-Strogatz graph, runs the ranking power iteration
for a list of damping factors over a uniform relevance vector, and records
iteration counts next to the spectral factor d*|lambda2(P)| that governs the
geometric rate. Results land in CSV files for plotting.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import networkx as nx
import numpy as np

from . import topicrank
from .centrality import SentenceGraph
from .errors import ConvergenceError, FactGraphError

DEFAULT_DS = (0.6, 0.7, 0.8, 0.85, 0.9, 0.95)
CONNECT_ATTEMPTS = 10


@dataclass(frozen=True)
class WSConfig:
    """Watts-Strogatz parameters: ring degree k must be even and below n."""

    n: int
    k: int
    p_rewire: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("need at least 3 vertices")
        if self.k % 2 != 0 or not 0 < self.k < self.n:
            raise ValueError("k must be even and 0 < k < n")
        if not 0.0 <= self.p_rewire <= 1.0:
            raise ValueError("p_rewire must lie in [0, 1]")


def watts_strogatz(cfg: WSConfig) -> SentenceGraph:
    """Connected small-world graph with unit edge weights.

    Each ring edge is rewired independently with probability ``p_rewire``
    (no self-loops or duplicate edges), which preserves the edge count
    n*k/2. Disconnected draws are regenerated with seed+1, seed+2, ... up
    to 10 attempts.
    """
    for attempt in range(CONNECT_ATTEMPTS):
        g = nx.watts_strogatz_graph(cfg.n, cfg.k, cfg.p_rewire, seed=cfg.seed + attempt)
        if nx.is_connected(g):
            weights = nx.to_numpy_array(g, nodelist=range(cfg.n), dtype=float)
            return SentenceGraph(weights=weights)
    raise FactGraphError(
        f"no connected graph within {CONNECT_ATTEMPTS} attempts from seed {cfg.seed}")


@dataclass
class SweepRow:
    d: float
    iterations: int | None  # None marks non-convergence within max_iter
    lambda2: float | None
    factor: float | None
    converged: bool


@dataclass
class SweepResult:
    rows: list
    reports: dict  # damping factor -> ConvergenceReport


def run_sweep(graph: SentenceGraph, relevance=None, ds=DEFAULT_DS,
              tol: float = topicrank.DEFAULT_TOL, max_iter: int = topicrank.DEFAULT_MAX_ITER,
              dense_bound: int = topicrank.DEFAULT_DENSE_BOUND) -> SweepResult:
    """Power-iterate the graph's chain for each damping factor.

    With a uniform relevance vector the weight adjustment is a constant
    rescaling, so P depends only on the graph; lambda2 is computed once
    (when n is within the dense bound) and shared across rows.
    Non-convergence is recorded in the row, not raised.
    """
    ds = list(ds)
    if any(not 0.0 < d < 1.0 for d in ds):
        raise ValueError("every damping factor must lie in (0, 1)")
    n = graph.n
    u = np.full(n, 1.0 / n) if relevance is None else np.asarray(relevance, dtype=float)
    adjusted = topicrank.adjust_weights(graph.weights, u)
    p = topicrank.build_transition(adjusted, u)
    lam = topicrank.lambda2(p, dense_bound) if n <= dense_bound else None

    rows = []
    reports = {}
    for d in ds:
        try:
            _, report = topicrank.power_iterate(p, u, d=d, tol=tol, max_iter=max_iter)
            iterations, converged = report.iterations, True
        except ConvergenceError as exc:
            report = exc.report
            iterations, converged = None, False
        if lam is not None:
            report.attach_spectrum(lam, d)
        rows.append(SweepRow(d=d, iterations=iterations, lambda2=lam,
                             factor=None if lam is None else d * lam, converged=converged))
        reports[d] = report
    return SweepResult(rows=rows, reports=reports)


def emit_csv(result: SweepResult, out_dir) -> list[Path]:
    """Write summary.csv plus one per-iteration residual file per damping factor.

    Values use 6-decimal fixed formatting; a non-converged row leaves the
    iterations column empty and sets converged=false.
    """
    if not result.rows:
        raise ValueError("sweep result is empty")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    summary = out / "summary.csv"
    with open(summary, "w", encoding="utf-8") as fh:
        fh.write("d,iterations,converged,lambda2,factor\n")
        for row in result.rows:
            iterations = "" if row.iterations is None else str(row.iterations)
            converged = "true" if row.converged else "false"
            lam = "" if row.lambda2 is None else f"{row.lambda2:.6f}"
            factor = "" if row.factor is None else f"{row.factor:.6f}"
            fh.write(f"{row.d:.6f},{iterations},{converged},{lam},{factor}\n")
    written.append(summary)

    for d, report in sorted(result.reports.items()):
        path = out / f"residuals_d{d:g}.csv"
        report.write_csv(path)
        written.append(path)
    return written


def parse_summary(path) -> list[SweepRow]:
    """Read back an emitted summary.csv; used for round-trip checks."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "d,iterations,converged,lambda2,factor":
            raise ValueError(f"unexpected header: {header}")
        for line in fh:
            d, iterations, converged, lam, factor = line.rstrip("\n").split(",")
            rows.append(SweepRow(
                d=float(d),
                iterations=None if iterations == "" else int(iterations),
                lambda2=None if lam == "" else float(lam),
                factor=None if factor == "" else float(factor),
                converged=converged == "true",
            ))
    return rows
