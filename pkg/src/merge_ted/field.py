"""Scalar fields on regular grids, and their graph form used by the sweep.

Grids are 1, 2, or 3 dimensional with row-major flat storage. Converting a
grid to a graph uses a Freudenthal-style connectivity (one consistent
diagonal per cell), which keeps level-set merges unambiguous. Ties between
equal sample values are broken by vertex index, so every graph carries a
strict total order on its vertices.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np

# Positive neighbor offsets of the Freudenthal triangulation per dimension.
_FREUDENTHAL_OFFSETS = {
    1: [(1,)],
    2: [(1, 0), (0, 1), (1, 1)],
    3: [(1, 0, 0), (0, 1, 0), (0, 0, 1),
        (1, 1, 0), (1, 0, 1), (0, 1, 1), (1, 1, 1)],
}


@dataclass(eq=False)
class ScalarGrid:
    """Regular grid of real samples; ``values`` is flat, row-major."""

    dims: tuple
    values: np.ndarray

    def __post_init__(self):
        self.dims = tuple(int(d) for d in self.dims)
        if not 1 <= len(self.dims) <= 3:
            raise ValueError(f"grid must have 1-3 dimensions, got {len(self.dims)}")
        if any(d <= 0 for d in self.dims):
            raise ValueError(f"grid dimensions must be positive, got {self.dims}")
        self.values = np.asarray(self.values, dtype=float).ravel()
        expected = math.prod(self.dims)
        if self.values.size != expected:
            raise ValueError(
                f"value count mismatch: dims {self.dims} need {expected} values, "
                f"got {self.values.size}")
        bad = np.flatnonzero(~np.isfinite(self.values))
        if bad.size:
            raise ValueError(f"non-finite value at index {bad[0]}")

    @property
    def size(self):
        return self.values.size

    def reshaped(self):
        return self.values.reshape(self.dims)

    def __eq__(self, other):
        if not isinstance(other, ScalarGrid):
            return NotImplemented
        return self.dims == other.dims and np.array_equal(self.values, other.values)


@dataclass(eq=False)
class ScalarGraph:
    """Graph carrier of a scalar field: one scalar per vertex, undirected edges."""

    vertex_count: int
    scalars: np.ndarray
    edges: list

    def __post_init__(self):
        self.vertex_count = int(self.vertex_count)
        self.scalars = np.asarray(self.scalars, dtype=float).ravel()
        if self.scalars.size != self.vertex_count:
            raise ValueError(
                f"expected {self.vertex_count} scalars, got {self.scalars.size}")
        if not np.all(np.isfinite(self.scalars)):
            raise ValueError("non-finite scalar value")
        seen = set()
        norm = []
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise ValueError(f"edge ({u},{v}) out of range")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise ValueError(f"duplicate edge ({key[0]},{key[1]})")
            seen.add(key)
            norm.append(key)
        self.edges = norm

    def order_key(self, v):
        """Total-order key of a vertex: scalar first, index breaks ties."""
        return (float(self.scalars[v]), int(v))

    def __eq__(self, other):
        if not isinstance(other, ScalarGraph):
            return NotImplemented
        return (self.vertex_count == other.vertex_count
                and np.array_equal(self.scalars, other.scalars)
                and self.edges == other.edges)


@dataclass(frozen=True)
class GaussianSpec:
    """One gaussian bump: center in grid-index coordinates, peak amplitude, width."""

    center: tuple
    amplitude: float
    sigma: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")


def gen_gaussian_sum(dims, specs):
    """Evaluate a sum of gaussians on the grid: sum_k a_k exp(-|x-c_k|^2 / 2 s_k^2)."""
    dims = tuple(int(d) for d in dims)
    if not dims:
        raise ValueError("empty dims")
    if any(d <= 0 for d in dims):
        raise ValueError(f"grid dimensions must be positive, got {dims}")
    for s in specs:
        if len(s.center) != len(dims):
            raise ValueError(
                f"center {s.center} has {len(s.center)} coordinates, grid has {len(dims)}")
        for c, d in zip(s.center, dims):
            if not 0.0 <= c <= d - 1:
                raise ValueError(f"center {s.center} outside grid {dims}")
    coords = np.indices(dims, dtype=float)
    acc = np.zeros(dims, dtype=float)
    for s in specs:
        d2 = np.zeros(dims, dtype=float)
        for ax in range(len(dims)):
            d2 += (coords[ax] - s.center[ax]) ** 2
        acc += s.amplitude * np.exp(-d2 / (2.0 * s.sigma ** 2))
    return ScalarGrid(dims, acc.ravel())


def subsample(grid, step):
    """Keep every step-th sample per axis, starting at index 0."""
    step = int(step)
    if step < 1:
        raise ValueError(f"step must be >= 1, got {step}")
    if step > 1 and any(d <= step for d in grid.dims):
        raise ValueError(f"step {step} too large for dims {grid.dims}")
    arr = grid.reshaped()[tuple(slice(None, None, step) for _ in grid.dims)]
    return ScalarGrid(arr.shape, arr.ravel())


def resample_nearest(grid, new_dims):
    """Resample to new per-axis sizes by nearest-index selection (endpoints kept)."""
    new_dims = tuple(int(d) for d in new_dims)
    if len(new_dims) != len(grid.dims):
        raise ValueError(f"dimension count mismatch: {new_dims} vs {grid.dims}")
    sel = []
    for m, n in zip(new_dims, grid.dims):
        if not 1 <= m <= n:
            raise ValueError(f"target size {m} invalid for axis of size {n}")
        sel.append(np.rint(np.linspace(0.0, n - 1, m)).astype(int))
    arr = grid.reshaped()[np.ix_(*sel)]
    return ScalarGrid(new_dims, arr.ravel())


def subsample_schedule(grid, reduce_per_iter, iterations):
    """Iterated nearest-index downsampling, shrinking every axis by a fixed count.

    Returns iterations+1 grids; entry 0 is the input. Each iteration resamples
    the previous one, so the surviving sample sets are nested.
    """
    reduce_per_iter = int(reduce_per_iter)
    iterations = int(iterations)
    if reduce_per_iter < 1 or iterations < 0:
        raise ValueError("reduce_per_iter must be >= 1 and iterations >= 0")
    out = [grid]
    cur = grid
    for _ in range(iterations):
        target = tuple(d - reduce_per_iter for d in cur.dims)
        if any(t < 1 for t in target):
            raise ValueError(f"schedule exhausts axis: {cur.dims} -> {target}")
        cur = resample_nearest(cur, target)
        out.append(cur)
    return out


def smooth_laplacian(grid, iterations):
    """Average each sample with its axis-aligned neighbors, repeatedly.

    Boundary samples average over the neighbors they have. The operation is a
    contraction: the value range never grows.
    """
    iterations = int(iterations)
    if iterations < 0:
        raise ValueError(f"iterations must be >= 0, got {iterations}")
    arr = grid.reshaped().copy()
    for _ in range(iterations):
        total = arr.copy()
        count = np.ones(arr.shape)
        for ax in range(arr.ndim):
            lo = tuple(slice(0, -1) if a == ax else slice(None) for a in range(arr.ndim))
            hi = tuple(slice(1, None) if a == ax else slice(None) for a in range(arr.ndim))
            total[lo] += arr[hi]
            count[lo] += 1
            total[hi] += arr[lo]
            count[hi] += 1
        arr = total / count
    return ScalarGrid(grid.dims, arr.ravel())


def grid_to_graph(grid):
    """Freudenthal connectivity: path (1D), 6-neighborhood (2D), 14-neighborhood (3D)."""
    dims = grid.dims
    idx = np.arange(grid.size).reshape(dims)
    cols = []
    for off in _FREUDENTHAL_OFFSETS[len(dims)]:
        src = idx[tuple(slice(0, d - o if o else None) for d, o in zip(dims, off))]
        dst = idx[tuple(slice(o, None) for o in off)]
        cols.append(np.stack([src.ravel(), dst.ravel()], axis=1))
    pairs = np.concatenate(cols, axis=0) if cols else np.empty((0, 2), int)
    edges = [(int(u), int(v)) for u, v in pairs]
    edges.sort()
    return ScalarGraph(grid.size, grid.values, edges)


# ---------------------------------------------------------------------------
# File formats

def save_grid(grid, path, fmt="text"):
    if fmt == "text":
        with open(path, "w") as fh:
            fh.write("dims " + " ".join(str(d) for d in grid.dims) + "\n")
            arr = grid.reshaped()
            flat2d = arr.reshape(-1, grid.dims[-1])
            for row in flat2d:
                fh.write(" ".join(repr(float(x)) for x in row) + "\n")
    elif fmt == "binary":
        with open(path, "wb") as fh:
            fh.write(struct.pack("<Q", len(grid.dims)))
            fh.write(struct.pack(f"<{len(grid.dims)}Q", *grid.dims))
            fh.write(grid.values.astype("<f8").tobytes())
    else:
        raise ValueError(f"unknown grid format {fmt!r}")


def load_grid(path, fmt="auto"):
    if fmt == "auto":
        with open(path, "rb") as fh:
            head = fh.read(4)
        fmt = "text" if head.startswith(b"dims") else "binary"
    if fmt == "text":
        with open(path) as fh:
            header = fh.readline().split()
            if not header or header[0] != "dims":
                raise ValueError(f"{path}: malformed header (expected 'dims d1 [d2 [d3]]')")
            try:
                dims = tuple(int(t) for t in header[1:])
            except ValueError:
                raise ValueError(f"{path}: malformed header: non-integer dimension") from None
            if not 1 <= len(dims) <= 3:
                raise ValueError(f"{path}: malformed header: {len(dims)} dimensions")
            values = []
            for lineno, line in enumerate(fh, start=2):
                for tok in line.split():
                    try:
                        values.append(float(tok))
                    except ValueError:
                        raise ValueError(
                            f"{path}:{lineno}: bad value {tok!r}") from None
        expected = math.prod(dims)
        if len(values) != expected:
            raise ValueError(
                f"{path}: value count mismatch: dims {dims} need {expected} values, "
                f"got {len(values)}")
        arr = np.array(values)
        bad = np.flatnonzero(~np.isfinite(arr))
        if bad.size:
            raise ValueError(f"{path}: non-finite value at index {bad[0]}")
        return ScalarGrid(dims, arr)
    if fmt == "binary":
        with open(path, "rb") as fh:
            raw = fh.read()
        if len(raw) < 8:
            raise ValueError(f"{path}: truncated binary grid")
        (ndim,) = struct.unpack_from("<Q", raw, 0)
        if not 1 <= ndim <= 3:
            raise ValueError(f"{path}: malformed header: {ndim} dimensions")
        if len(raw) < 8 + 8 * ndim:
            raise ValueError(f"{path}: truncated binary grid")
        dims = struct.unpack_from(f"<{ndim}Q", raw, 8)
        expected = math.prod(dims)
        body = raw[8 + 8 * ndim:]
        if len(body) != 8 * expected:
            raise ValueError(
                f"{path}: value count mismatch: dims {dims} need {expected} values, "
                f"got {len(body) // 8}")
        values = np.frombuffer(body, dtype="<f8").astype(float)
        bad = np.flatnonzero(~np.isfinite(values))
        if bad.size:
            raise ValueError(f"{path}: non-finite value at index {bad[0]}")
        return ScalarGrid(tuple(int(d) for d in dims), values)
    raise ValueError(f"unknown grid format {fmt!r}")


def save_graph(graph, path):
    with open(path, "w") as fh:
        fh.write(f"vertices {graph.vertex_count}\n")
        for s in graph.scalars:
            fh.write(repr(float(s)) + "\n")
        fh.write(f"edges {len(graph.edges)}\n")
        for u, v in graph.edges:
            fh.write(f"{u} {v}\n")


def load_graph(path):
    with open(path) as fh:
        toks = fh.readline().split()
        if len(toks) != 2 or toks[0] != "vertices":
            raise ValueError(f"{path}: malformed header (expected 'vertices n')")
        n = int(toks[1])
        scalars = []
        for _ in range(n):
            line = fh.readline()
            if not line:
                raise ValueError(f"{path}: truncated scalar section")
            scalars.append(float(line))
        toks = fh.readline().split()
        if len(toks) != 2 or toks[0] != "edges":
            raise ValueError(f"{path}: malformed edge header (expected 'edges m')")
        m = int(toks[1])
        edges = []
        for _ in range(m):
            line = fh.readline()
            if not line:
                raise ValueError(f"{path}: truncated edge section")
            u, v = line.split()
            edges.append((int(u), int(v)))
    return ScalarGraph(n, np.array(scalars), edges)
