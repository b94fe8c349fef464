"""Symmetric TSP instances: representation, TSPLIB95 I/O and generators.

Edge weights live in a flat triangular array: the unordered pair ``u < v``
is stored at ``v * (v - 1) // 2 + u``.  Every instance is immutable after
construction.

Random Euclidean instances draw their points from numpy's PCG64 bit
generator (``numpy.random.Generator(PCG64(seed)).random``), which is
documented, platform independent and yields doubles from 53 random bits.
Distances in the unit square are scaled by ``2**14`` and rounded half away
from zero.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

SCALE = 2**14
SOURCES = ("tsplib", "random_euclidean", "mesh", "explicit")

_GEO_RRR = 6378.388
_GEO_PI = 3.141592


class TsplibError(ValueError):
    """Raised for TSPLIB text that cannot be read bit-exactly."""


def num_edges(n: int) -> int:
    return n * (n - 1) // 2


def edge_index(u: int, v: int) -> int:
    """Triangular index of the unordered pair ``{u, v}``."""
    if u == v:
        raise ValueError(f"no edge from vertex {u} to itself")
    if u > v:
        u, v = v, u
    return v * (v - 1) // 2 + u


def edge_endpoints(idx: int) -> tuple[int, int]:
    """Inverse of :func:`edge_index`; returns ``(u, v)`` with ``u < v``."""
    if idx < 0:
        raise ValueError(f"negative edge index {idx}")
    v = (1 + math.isqrt(1 + 8 * idx)) // 2
    # isqrt rounding can overshoot by one at exact triangular boundaries
    while v * (v - 1) // 2 > idx:
        v -= 1
    while (v + 1) * v // 2 <= idx:
        v += 1
    return idx - v * (v - 1) // 2, v


@dataclass(frozen=True, eq=False)
class Instance:
    """A complete graph on ``n`` vertices with integer edge weights."""

    n: int
    weights: np.ndarray
    name: str = "instance"
    source: str = "explicit"
    coords: np.ndarray | None = None
    _endpoints: tuple = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.n < 3:
            raise ValueError(f"an instance needs at least 3 vertices, got {self.n}")
        if self.source not in SOURCES:
            raise ValueError(f"unknown instance source {self.source!r}")
        w = np.array(self.weights, dtype=np.int64)
        if w.shape != (num_edges(self.n),):
            raise ValueError(
                f"expected {num_edges(self.n)} weights for n={self.n}, got shape {w.shape}"
            )
        if (w < 0).any():
            raise ValueError("edge weights must be nonnegative")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        if self.coords is not None:
            c = np.array(self.coords, dtype=float)
            c.setflags(write=False)
            object.__setattr__(self, "coords", c)
        ends = tuple((u, v) for _, u, v in iter_edges(self.n))
        object.__setattr__(self, "_endpoints", ends)

    @property
    def m(self) -> int:
        return num_edges(self.n)

    def weight(self, u: int, v: int) -> int:
        return edge_weight(self, u, v)

    def endpoints(self, idx: int) -> tuple[int, int]:
        return self._endpoints[idx]

    def matrix(self) -> np.ndarray:
        """Full symmetric distance matrix (zero diagonal)."""
        d = np.zeros((self.n, self.n), dtype=np.int64)
        iu = np.array(self._endpoints, dtype=np.int64).reshape(-1, 2)
        d[iu[:, 0], iu[:, 1]] = self.weights
        d[iu[:, 1], iu[:, 0]] = self.weights
        return d

    def tour_length(self, order: Sequence[int]) -> int:
        k = len(order)
        return sum(edge_weight(self, order[i], order[(i + 1) % k]) for i in range(k))

    def subinstance(self, vertices: Sequence[int], name: str | None = None) -> "Instance":
        """Induced instance on ``vertices``; local id ``i`` is ``vertices[i]``."""
        vs = list(vertices)
        k = len(vs)
        w = [edge_weight(self, vs[u], vs[v]) for v in range(k) for u in range(v)]
        coords = None if self.coords is None else self.coords[vs]
        return Instance(k, np.array(w, dtype=np.int64), name or f"{self.name}[{k}]",
                        self.source, coords)


def edge_weight(inst: Instance, u: int, v: int) -> int:
    if u == v:
        raise ValueError(f"no edge from vertex {u} to itself")
    if not (0 <= u < inst.n and 0 <= v < inst.n):
        raise ValueError(f"vertex out of range for n={inst.n}: ({u}, {v})")
    return int(inst.weights[edge_index(u, v)])


def iter_edges(n: int) -> Iterator[tuple[int, int, int]]:
    """Yield ``(idx, u, v)`` in index order."""
    idx = 0
    for v in range(1, n):
        for u in range(v):
            yield idx, u, v
            idx += 1


# --- scaling / rounding -------------------------------------------------------


def scaled_euclidean_weights(points: np.ndarray, scale: int = SCALE) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    u, v = _triangular_pairs(len(pts))
    dx = pts[u, 0] - pts[v, 0]
    dy = pts[u, 1] - pts[v, 1]
    # distances are nonnegative, so floor(x + 0.5) rounds half away from zero
    return np.floor(scale * np.sqrt(dx * dx + dy * dy) + 0.5).astype(np.int64)


def _triangular_pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    v, u = np.tril_indices(n, -1)
    return u, v


def from_points(points, name: str = "points", source: str = "explicit",
                scale: int = SCALE) -> Instance:
    """Instance over 2D points with ``scale``-d, rounded Euclidean weights."""
    pts = np.asarray(points, dtype=float)
    return Instance(len(pts), scaled_euclidean_weights(pts, scale), name, source, pts)


def gen_random_euclidean(n: int, seed: int, name: str | None = None) -> Instance:
    if n < 3:
        raise ValueError(f"n must be at least 3, got {n}")
    rng = np.random.Generator(np.random.PCG64(seed))
    pts = rng.random((n, 2))
    return from_points(pts, name or f"RE_{seed}_{n}", "random_euclidean")


def gen_mesh(cols: int) -> Instance:
    """3 x ``cols`` grid with unit spacing; vertex ``r * cols + c`` sits at (c, r)."""
    if cols < 4 or cols % 2:
        raise ValueError(f"mesh needs an even column count >= 4, got {cols}")
    pts = [(c, r) for r in range(3) for c in range(cols)]
    return from_points(pts, f"mesh_3x{cols}", "mesh")


# --- TSPLIB95 -----------------------------------------------------------------


def _nint(x: float) -> int:
    return int(x + 0.5)


def _euc_2d(a, b) -> int:
    return _nint(math.sqrt((a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2))


def _ceil_2d(a, b) -> int:
    return math.ceil(math.sqrt((a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2))


def _att(a, b) -> int:
    xd = a[0] - b[0]
    yd = a[1] - b[1]
    r = math.sqrt((xd * xd + yd * yd) / 10.0)
    t = _nint(r)
    return t + 1 if t < r else t


def _geo_rad(x: float) -> float:
    deg = int(x)
    minutes = x - deg
    return _GEO_PI * (deg + 5.0 * minutes / 3.0) / 180.0


def _geo(a, b) -> int:
    lat1, lon1 = _geo_rad(a[0]), _geo_rad(a[1])
    lat2, lon2 = _geo_rad(b[0]), _geo_rad(b[1])
    q1 = math.cos(lon1 - lon2)
    q2 = math.cos(lat1 - lat2)
    q3 = math.cos(lat1 + lat2)
    arg = 0.5 * ((1.0 + q1) * q2 - (1.0 - q1) * q3)
    return int(_GEO_RRR * math.acos(min(1.0, max(-1.0, arg))) + 1.0)


_COORD_METRICS = {"EUC_2D": _euc_2d, "CEIL_2D": _ceil_2d, "ATT": _att, "GEO": _geo}
_MATRIX_FORMATS = ("FULL_MATRIX", "UPPER_ROW", "LOWER_ROW", "UPPER_DIAG_ROW", "LOWER_DIAG_ROW")
_IGNORED_KEYS = ("NAME", "COMMENT", "NODE_COORD_TYPE", "DISPLAY_DATA_TYPE")
_KEY_RE = re.compile(r"^\s*([A-Z_]+)\s*(?::\s*(.*?))?\s*$")


def _matrix_pairs(fmt: str, n: int) -> Iterator[tuple[int, int]]:
    """Cell order of an explicit weight section."""
    if fmt == "FULL_MATRIX":
        for i in range(n):
            for j in range(n):
                yield i, j
    elif fmt == "UPPER_ROW":
        for i in range(n):
            for j in range(i + 1, n):
                yield i, j
    elif fmt == "LOWER_ROW":
        for i in range(n):
            for j in range(i):
                yield i, j
    elif fmt == "UPPER_DIAG_ROW":
        for i in range(n):
            for j in range(i, n):
                yield i, j
    elif fmt == "LOWER_DIAG_ROW":
        for i in range(n):
            for j in range(i + 1):
                yield i, j


def parse_tsplib(text: str, name: str | None = None) -> Instance:
    """Read a symmetric TSPLIB95 ``TYPE: TSP`` entry."""
    spec: dict[str, str] = {}
    coords: dict[int, tuple[float, float]] = {}
    numbers: list[float] = []
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line == "EOF":
            break
        head = _KEY_RE.match(line)
        if head and (head.group(2) is not None or head.group(1).endswith("SECTION")):
            key, value = head.group(1), head.group(2)
            if key == "NODE_COORD_SECTION":
                section = "coords"
                continue
            if key == "EDGE_WEIGHT_SECTION":
                section = "weights"
                continue
            if key.endswith("SECTION"):
                raise TsplibError(f"line {lineno}: unsupported section {key}")
            if key not in ("TYPE", "DIMENSION", "EDGE_WEIGHT_TYPE",
                           "EDGE_WEIGHT_FORMAT") + _IGNORED_KEYS:
                raise TsplibError(f"line {lineno}: unsupported keyword {key}")
            spec[key] = value
            section = None
            continue
        if section == "coords":
            parts = line.split()
            if len(parts) != 3:
                raise TsplibError(f"line {lineno}: expected 'id x y', got {line!r}")
            coords[int(parts[0])] = (float(parts[1]), float(parts[2]))
        elif section == "weights":
            numbers.extend(float(t) for t in line.split())
        else:
            raise TsplibError(f"line {lineno}: unexpected data {line!r}")

    kind = spec.get("TYPE", "TSP").split()[0]
    if kind != "TSP":
        raise TsplibError(f"unsupported TYPE {kind}")
    if "DIMENSION" not in spec:
        raise TsplibError("missing DIMENSION")
    n = int(spec["DIMENSION"])
    wtype = spec.get("EDGE_WEIGHT_TYPE")
    name = name or spec.get("NAME", "tsplib")

    if wtype in _COORD_METRICS:
        if len(coords) != n:
            raise TsplibError(f"DIMENSION is {n} but {len(coords)} coordinates given")
        ids = sorted(coords)
        pts = [coords[i] for i in ids]
        metric = _COORD_METRICS[wtype]
        w = np.array([metric(pts[u], pts[v]) for _, u, v in iter_edges(n)], dtype=np.int64)
        return Instance(n, w, name, "tsplib", np.array(pts))
    if wtype == "EXPLICIT":
        fmt = spec.get("EDGE_WEIGHT_FORMAT")
        if fmt not in _MATRIX_FORMATS:
            raise TsplibError(f"unsupported EDGE_WEIGHT_FORMAT {fmt}")
        cells = list(_matrix_pairs(fmt, n))
        if len(numbers) != len(cells):
            raise TsplibError(
                f"{fmt} with DIMENSION {n} needs {len(cells)} weights, got {len(numbers)}"
            )
        w = np.zeros(num_edges(n), dtype=np.int64)
        for (i, j), x in zip(cells, numbers):
            if i != j:
                w[edge_index(i, j)] = int(x)
        return Instance(n, w, name, "tsplib")
    raise TsplibError(f"unsupported EDGE_WEIGHT_TYPE {wtype}")


def render_tsplib(inst: Instance) -> str:
    """Write ``inst`` as an EXPLICIT / LOWER_ROW TSPLIB entry."""
    lines = [
        f"NAME: {inst.name}",
        "TYPE: TSP",
        f"DIMENSION: {inst.n}",
        "EDGE_WEIGHT_TYPE: EXPLICIT",
        "EDGE_WEIGHT_FORMAT: LOWER_ROW",
        "EDGE_WEIGHT_SECTION",
    ]
    for i in range(1, inst.n):
        lines.append(" ".join(str(edge_weight(inst, i, j)) for j in range(i)))
    lines.append("EOF")
    return "\n".join(lines) + "\n"


def load_tsplib(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return parse_tsplib(fh.read())
