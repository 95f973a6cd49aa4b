"""All-pairs distance matrices: parallel computation, CSV format, and the
lag-profile periodicity report.

Work is split over (i, j) pairs; every result lands in its preassigned cell,
so the written matrix is byte-identical for any worker count.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .mergetree import StabilizationConfig, deserialize_tree, serialize_tree
from .ted import ted

_WORKER = {}


@dataclass(eq=False)
class DistanceMatrix:
    labels: list
    values: np.ndarray

    def __post_init__(self):
        self.labels = [str(l) for l in self.labels]
        self.values = np.asarray(self.values, dtype=float)
        n = len(self.labels)
        if self.values.shape != (n, n):
            raise ValueError(
                f"matrix shape {self.values.shape} does not match {n} labels")

    @property
    def n(self):
        return len(self.labels)

    def validate(self, sym_tol=1e-12):
        if np.any(np.diag(self.values) != 0.0):
            raise ValueError("nonzero diagonal")
        if np.any(self.values < 0):
            raise ValueError("negative entry")
        asym = np.max(np.abs(self.values - self.values.T), initial=0.0)
        if asym > sym_tol:
            raise ValueError(f"asymmetry {asym} exceeds {sym_tol}")


def _worker_init(texts, model, eps, add_fixed, fixed):
    _WORKER["trees"] = [deserialize_tree(t) for t in texts]
    _WORKER["model"] = model
    _WORKER["stab"] = StabilizationConfig(eps, add_fixed, fixed)


def _worker_pair(pair):
    i, j = pair
    trees = _WORKER["trees"]
    r = ted(trees[i], trees[j], _WORKER["model"], _WORKER["stab"])
    return i, j, r.distance


def compute_matrix(trees, labels, model, stab=None, threads=1):
    """Upper triangle over worker pool, mirrored; deterministic output."""
    stab = stab or StabilizationConfig()
    n = len(trees)
    if n != len(labels):
        raise ValueError("label count does not match tree count")
    orientations = {t.orientation for t in trees}
    if len(orientations) > 1:
        raise ValueError(f"mixed orientations: {sorted(orientations)}")
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    values = np.zeros((n, n))
    if threads <= 1 or len(pairs) < 2:
        for i, j in pairs:
            try:
                values[i, j] = ted(trees[i], trees[j], model, stab).distance
            except ValueError as exc:
                raise ValueError(
                    f"pair ({labels[i]}, {labels[j]}) failed: {exc}") from exc
            values[j, i] = values[i, j]
    else:
        texts = [serialize_tree(t) for t in trees]
        init = (texts, model, stab.epsilon_fraction,
                stab.add_fixed_cost, stab.fixed_cost)
        chunk = max(1, len(pairs) // (threads * 8))
        with ProcessPoolExecutor(max_workers=threads, initializer=_worker_init,
                                 initargs=init) as pool:
            for i, j, d in pool.map(_worker_pair, pairs, chunksize=chunk):
                values[i, j] = d
                values[j, i] = d
    return DistanceMatrix(list(labels), values)


# ---------------------------------------------------------------------------
# CSV format: first row is the label row, each data row is label-prefixed,
# the full mirrored matrix is written for plotting convenience.

def save_matrix_csv(dm, path):
    with open(path, "w") as fh:
        fh.write("label," + ",".join(dm.labels) + "\n")
        for lbl, row in zip(dm.labels, dm.values):
            fh.write(lbl + "," + ",".join(repr(float(x)) for x in row) + "\n")


def load_matrix_csv(path):
    with open(path) as fh:
        header = fh.readline().rstrip("\n").split(",")
        if len(header) < 2 or header[0] != "label":
            raise ValueError(f"{path}: malformed matrix header")
        labels = header[1:]
        rows = []
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            toks = line.rstrip("\n").split(",")
            if len(toks) != len(labels) + 1:
                raise ValueError(f"{path}:{lineno}: expected {len(labels) + 1} fields")
            rows.append([float(t) for t in toks[1:]])
    if len(rows) != len(labels):
        raise ValueError(f"{path}: {len(rows)} rows for {len(labels)} labels")
    return DistanceMatrix(labels, np.array(rows))


# ---------------------------------------------------------------------------
# Periodicity: mean distance at each frame lag; dips mark candidate periods.

@dataclass
class PeriodicityReport:
    lags: np.ndarray
    means: np.ndarray
    best_lag: int | None
    local_minima: list
    significant: bool


def periodicity_report(dm):
    n = dm.n
    if n < 8:
        raise ValueError(f"matrix too small for a lag profile ({n} < 8)")
    values = dm.values
    lags = np.arange(2, n // 2 + 1)
    means = np.array([np.mean(np.diag(values, k=int(l))) for l in lags])
    spread = float(means.max() - means.min())
    significant = spread > 1e-9 * max(1.0, float(np.abs(means).max()))
    if not significant:
        return PeriodicityReport(lags, means, None, [], False)
    best = int(lags[int(np.argmin(means))])
    minima = []
    for k in range(len(lags)):
        left = means[k - 1] if k > 0 else np.inf
        right = means[k + 1] if k + 1 < len(lags) else np.inf
        if means[k] < left and means[k] < right:
            minima.append(int(lags[k]))
    return PeriodicityReport(lags, means, best, minima, True)
