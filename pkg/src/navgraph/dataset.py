"""Point sets, distance oracles, and on-disk formats.

A distance function here only needs symmetry, zero on the diagonal, and
positive values off it; the triangle inequality is never assumed.  All
comparisons between distances go through a strict total order that breaks
exact ties by point index, so every dataset behaves as if it were in general
position without perturbing the data.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

MAGIC_MATRIX = b"NGDM"

# Full n x n distance cache is only materialized below this size.
PAIRWISE_CACHE_LIMIT = 1 << 14

METRIC_KINDS = ("euclidean", "squared-euclidean", "manhattan", "explicit-matrix")


class FormatError(ValueError):
    """A file failed to parse or violated a structural invariant."""


@dataclass(frozen=True)
class PointSet:
    """A dataset of ``n`` points with ids ``0..n-1``.

    ``coords`` is an ``n x dim`` float64 matrix for vector data, or ``None``
    when distances come from an explicit matrix.
    """

    n: int
    coords: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"point set needs n >= 1, got {self.n}")
        if self.coords is not None:
            if self.coords.ndim != 2 or self.coords.shape[0] != self.n:
                raise ValueError(f"coords must be {self.n} x dim, got {self.coords.shape}")
            if self.coords.shape[1] < 1:
                raise ValueError("coords need dim >= 1")

    @property
    def dim(self) -> int | None:
        return None if self.coords is None else self.coords.shape[1]


class DistanceOracle:
    """Evaluates one of the supported distance kinds plus the tie-broken order.

    The comparison order used everywhere downstream is lexicographic on
    ``(distance, point id)``, which is a strict total order for each fixed
    query point even when raw distances collide.
    """

    def __init__(self, kind: str, points: PointSet, matrix: np.ndarray | None = None):
        if kind not in METRIC_KINDS:
            raise ValueError(f"unknown metric kind {kind!r}")
        if kind == "explicit-matrix":
            if matrix is None:
                raise ValueError("explicit-matrix oracle needs a matrix")
            validate_matrix(matrix)
            if matrix.shape[0] != points.n:
                raise ValueError(f"matrix is {matrix.shape[0]} x _ but point set has n={points.n}")
        elif points.coords is None:
            raise ValueError(f"metric {kind!r} needs vector data")
        self.kind = kind
        self.points = points
        self.matrix = matrix

    @property
    def n(self) -> int:
        return self.points.n

    def distance(self, i: int, j: int) -> float:
        """Distance between points ``i`` and ``j``."""
        n = self.n
        if not (0 <= i < n and 0 <= j < n):
            raise IndexError(f"point id out of range: ({i}, {j}) with n={n}")
        if self.kind == "explicit-matrix":
            return float(self.matrix[i, j])
        a = self.points.coords[i]
        b = self.points.coords[j]
        if self.kind == "manhattan":
            return float(np.abs(a - b).sum())
        if a.shape[0] == 1:
            d = float(abs(a[0] - b[0]))
            return d * d if self.kind == "squared-euclidean" else d
        sq = float(((a - b) ** 2).sum())
        return sq if self.kind == "squared-euclidean" else float(np.sqrt(sq))

    def column(self, j: int) -> np.ndarray:
        """Vector of distances from every point to point ``j``."""
        if not 0 <= j < self.n:
            raise IndexError(f"point id out of range: {j}")
        if self.kind == "explicit-matrix":
            return self.matrix[:, j].astype(np.float64, copy=True)
        coords = self.points.coords
        diff = coords - coords[j]
        if self.kind == "manhattan":
            return np.abs(diff).sum(axis=1)
        if coords.shape[1] == 1:
            # 1-D separately: squaring huge coordinates would overflow float64.
            d = np.abs(diff[:, 0])
            return d * d if self.kind == "squared-euclidean" else d
        sq = (diff * diff).sum(axis=1)
        return sq if self.kind == "squared-euclidean" else np.sqrt(sq)

    def pairwise(self) -> np.ndarray:
        """Full distance matrix; refused above PAIRWISE_CACHE_LIMIT points."""
        if self.n > PAIRWISE_CACHE_LIMIT:
            raise ValueError(f"n={self.n} exceeds pairwise cache limit {PAIRWISE_CACHE_LIMIT}")
        if self.kind == "explicit-matrix":
            return self.matrix.astype(np.float64, copy=True)
        out = np.empty((self.n, self.n), dtype=np.float64)
        for j in range(self.n):
            out[:, j] = self.column(j)
        return out

    def closer(self, query: int, a: int, b: int) -> bool:
        """True iff ``a`` strictly precedes ``b`` in the order around ``query``.

        Ties in raw distance are broken by comparing point ids, so for a fixed
        query this is a strict total order (irreflexive, antisymmetric,
        transitive).
        """
        da = self.distance(query, a)
        db = self.distance(query, b)
        return (da, a) < (db, b)


def validate_matrix(matrix: np.ndarray) -> None:
    """Check an explicit distance table: square, symmetric, zero diagonal,
    positive finite off-diagonal."""
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise FormatError(f"distance matrix must be square, got {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise FormatError("distance matrix contains NaN or infinite entries")
    if np.any(np.diagonal(matrix) != 0.0):
        raise FormatError("distance matrix diagonal must be all zeros")
    if matrix.shape[0] > 1:
        off = matrix[~np.eye(matrix.shape[0], dtype=bool)]
        if np.any(off <= 0.0):
            raise FormatError("off-diagonal distances must be positive")
    asym = np.argwhere(matrix != matrix.T)
    if asym.size:
        i, j = asym[0]
        raise FormatError(f"matrix not symmetric: d({i},{j}) != d({j},{i})")


@dataclass
class SearchGraph:
    """Directed graph as per-node sorted out-neighbor lists."""

    n: int
    out: list[np.ndarray] = field(default_factory=list)

    @staticmethod
    def from_neighbor_lists(n: int, lists: list) -> "SearchGraph":
        out = []
        for i, nbrs in enumerate(lists):
            arr = np.unique(np.asarray(nbrs, dtype=np.int64))
            arr = arr[arr != i]
            if arr.size and (arr[0] < 0 or arr[-1] >= n):
                raise ValueError(f"out-neighbor id out of range for node {i}")
            out.append(arr)
        return SearchGraph(n=n, out=out)

    @property
    def edge_count(self) -> int:
        return int(sum(a.size for a in self.out))

    @property
    def avg_degree(self) -> float:
        return self.edge_count / self.n

    @property
    def max_degree(self) -> int:
        return int(max((a.size for a in self.out), default=0))

    def degree_histogram(self) -> dict[int, int]:
        hist: dict[int, int] = {}
        for a in self.out:
            hist[a.size] = hist.get(a.size, 0) + 1
        return dict(sorted(hist.items()))

    def to_bytes(self) -> bytes:
        lines = []
        for i, arr in enumerate(self.out):
            for j in arr:
                lines.append(f"{i} {int(j)}\n")
        return "".join(lines).encode("ascii")


def load_points(path: str, header: bool = False) -> PointSet:
    """Load a CSV of points, one point per line, decimal floats."""
    rows: list[list[float]] = []
    dim = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if header and lineno == 1:
                continue
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            try:
                row = [float(x) for x in parts]
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: bad float: {exc}") from exc
            if dim is None:
                dim = len(row)
            elif len(row) != dim:
                raise FormatError(f"{path}:{lineno}: expected {dim} columns, got {len(row)}")
            rows.append(row)
    if not rows:
        raise FormatError(f"{path}: no points")
    return PointSet(n=len(rows), coords=np.asarray(rows, dtype=np.float64))


def save_points(path: str, ps: PointSet) -> None:
    if ps.coords is None:
        raise ValueError("point set has no coordinates to save")
    with open(path, "w", encoding="utf-8") as fh:
        for row in ps.coords:
            fh.write(",".join(repr(float(x)) for x in row) + "\n")


def load_matrix(path: str) -> np.ndarray:
    """Load a distance matrix: binary (NGDM magic) or CSV, sniffed by magic."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
    if magic == MAGIC_MATRIX:
        return _load_matrix_binary(path)
    return _load_matrix_csv(path)


def _load_matrix_binary(path: str) -> np.ndarray:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != MAGIC_MATRIX:
            raise FormatError(f"{path}: bad magic {magic!r}")
        (n,) = struct.unpack("<Q", fh.read(8))
        data = np.fromfile(fh, dtype="<f8", count=n * n)
    if data.size != n * n:
        raise FormatError(f"{path}: truncated matrix, expected {n * n} floats, got {data.size}")
    matrix = data.reshape(n, n)
    validate_matrix(matrix)
    return matrix


def _load_matrix_csv(path: str) -> np.ndarray:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rows.append([float(x) for x in line.split(",")])
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: bad float: {exc}") from exc
    if not rows:
        raise FormatError(f"{path}: empty matrix")
    n = len(rows)
    for lineno, row in enumerate(rows, start=1):
        if len(row) != n:
            raise FormatError(f"{path}:{lineno}: expected {n} columns, got {len(row)}")
    matrix = np.asarray(rows, dtype=np.float64)
    validate_matrix(matrix)
    return matrix


def save_matrix(path: str, matrix: np.ndarray, binary: bool = True) -> None:
    validate_matrix(matrix)
    if binary:
        with open(path, "wb") as fh:
            fh.write(MAGIC_MATRIX)
            fh.write(struct.pack("<Q", matrix.shape[0]))
            matrix.astype("<f8").tofile(fh)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            for row in matrix:
                fh.write(",".join(repr(float(x)) for x in row) + "\n")


def load_graph(path: str, n: int | None = None) -> SearchGraph:
    """Load a text edge list, lines ``i j``; blank lines ignored."""
    edges: list[tuple[int, int]] = []
    max_id = -1
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise FormatError(f"{path}:{lineno}: expected 'i j', got {line!r}")
            try:
                i, j = int(parts[0]), int(parts[1])
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: bad node id: {exc}") from exc
            if i < 0 or j < 0:
                raise FormatError(f"{path}:{lineno}: negative node id")
            edges.append((i, j))
            max_id = max(max_id, i, j)
    if n is None:
        n = max_id + 1
    elif max_id >= n:
        raise FormatError(f"{path}: edge references node {max_id} but n={n}")
    lists: list[list[int]] = [[] for _ in range(n)]
    for i, j in edges:
        lists[i].append(j)
    return SearchGraph.from_neighbor_lists(n, lists)


def save_graph(path: str, g: SearchGraph) -> None:
    with open(path, "wb") as fh:
        fh.write(g.to_bytes())
