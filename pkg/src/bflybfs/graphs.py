"""Graph ingestion, CSR construction, synthetic generation, and 1D partitioning."""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

# Vertex-id width. uint32 supports 2**32 - 1 vertices; switch to uint64 for more
# (the compiled kernels are built for uint32 and fall back to numpy otherwise).
VID = np.uint32
MAX_VID = int(np.iinfo(VID).max)

# Distance sentinel for unreachable vertices; same width as vertex ids.
UNREACHED = MAX_VID

# Default quadrant probabilities (A, B, C, D) for the recursive-matrix
# generator, the Graph500 convention.
RMAT_PROBS = (0.57, 0.19, 0.19, 0.05)


class ParseError(ValueError):
    """Malformed graph input; carries the 1-based line number."""

    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass
class EdgeList:
    """Directed edge pairs as an (m, 2) array, plus the vertex count.

    May contain duplicates and self-loops until passed through symmetrize().
    """

    edges: np.ndarray
    num_vertices: int

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=VID).reshape(-1, 2)
        if e.size and int(e.max()) >= self.num_vertices:
            raise ValueError("edge endpoint exceeds num_vertices")
        self.edges = e

    @property
    def num_edges(self) -> int:
        return len(self.edges)


@dataclass
class Graph:
    """Immutable compressed-adjacency graph: symmetrized, deduplicated, sorted."""

    num_vertices: int
    num_edges: int  # directed edge count after symmetrization
    offsets: np.ndarray  # int64, len num_vertices + 1
    adjacency: np.ndarray  # VID, len num_edges

    def __post_init__(self):
        self.offsets.flags.writeable = False
        self.adjacency.flags.writeable = False

    def neighbors(self, v: int) -> np.ndarray:
        return self.adjacency[self.offsets[v]:self.offsets[v + 1]]

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.offsets)

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.num_vertices else 0


@dataclass(frozen=True)
class Partition:
    """Contiguous vertex-id ranges assigning each vertex to one compute node."""

    num_parts: int
    boundaries: np.ndarray  # int64, len num_parts + 1, ascending

    def owner_of(self, v: int) -> int:
        return int(np.searchsorted(self.boundaries[1:], v, side="right"))

    def part_range(self, g: int) -> tuple[int, int]:
        return int(self.boundaries[g]), int(self.boundaries[g + 1])

    def edge_counts(self, graph: Graph) -> np.ndarray:
        """Directed edges owned by each part."""
        return np.diff(graph.offsets[self.boundaries])


def _text_lines(source):
    if isinstance(source, (str, Path)):
        return open(source, "rt", encoding="ascii", errors="replace")
    if isinstance(source, io.TextIOBase):
        return source
    return io.TextIOWrapper(source, encoding="ascii", errors="replace")


def _check_id(value: int, line_no: int) -> int:
    if value > MAX_VID:
        raise ParseError(f"vertex id {value} exceeds the representable range", line_no)
    return value


def _parse_edges_text(lines) -> EdgeList:
    src, dst = [], []
    max_id = -1
    for line_no, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped[0] in "#%":
            continue
        parts = stripped.split()
        if len(parts) != 2:
            raise ParseError(f"expected 'src dst', got {stripped!r}", line_no)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer vertex id in {stripped!r}", line_no) from None
        if u < 0 or v < 0:
            raise ParseError(f"negative vertex id in {stripped!r}", line_no)
        _check_id(u, line_no)
        _check_id(v, line_no)
        src.append(u)
        dst.append(v)
        if u > max_id:
            max_id = u
        if v > max_id:
            max_id = v
    edges = np.column_stack([np.asarray(src, dtype=VID), np.asarray(dst, dtype=VID)]) \
        if src else np.empty((0, 2), dtype=VID)
    return EdgeList(edges, max_id + 1)


def _parse_matrix_market(lines) -> EdgeList:
    header = lines.readline() if hasattr(lines, "readline") else None
    if header is None:  # got an iterator, not a file
        it = iter(lines)
        header = next(it, "")
        lines = it
    tokens = header.strip().lower().split()
    if len(tokens) < 4 or tokens[0] != "%%matrixmarket" or tokens[1] != "matrix" \
            or tokens[2] != "coordinate":
        raise ParseError("expected '%%MatrixMarket matrix coordinate' header", 1)

    line_no = 1
    rows = cols = nnz = None
    src, dst = [], []
    for line in lines:
        line_no += 1
        stripped = line.strip()
        if not stripped or stripped[0] == "%":
            continue
        parts = stripped.split()
        if rows is None:
            if len(parts) != 3:
                raise ParseError("expected 'rows cols nnz' size line", line_no)
            try:
                rows, cols, nnz = (int(p) for p in parts)
            except ValueError:
                raise ParseError("non-integer size line", line_no) from None
            continue
        if len(parts) < 2:
            raise ParseError(f"expected coordinate entry, got {stripped!r}", line_no)
        try:
            i, j = int(parts[0]), int(parts[1])  # any trailing value is ignored
        except ValueError:
            raise ParseError(f"non-integer coordinate in {stripped!r}", line_no) from None
        if not (1 <= i <= rows and 1 <= j <= cols):
            raise ParseError(f"coordinate ({i}, {j}) outside {rows}x{cols}", line_no)
        src.append(i - 1)
        dst.append(j - 1)

    if rows is None:
        raise ParseError("missing size line", line_no + 1)
    if len(src) != nnz:
        raise ParseError(f"declared {nnz} entries, found {len(src)}", line_no + 1)
    num_vertices = _check_id(max(rows, cols) - 1, 1) + 1 if max(rows, cols) else 0
    edges = np.column_stack([np.asarray(src, dtype=VID), np.asarray(dst, dtype=VID)]) \
        if src else np.empty((0, 2), dtype=VID)
    return EdgeList(edges, num_vertices)


def load_edge_list(source, fmt: str = "edges") -> EdgeList:
    """Read directed edges from a stream or path.

    fmt "edges": one 'src dst' pair per line, '#'/'%' comment lines ignored,
    0-based ids, num_vertices = 1 + max id. fmt "mtx": Matrix Market
    coordinate file read as a pattern (values ignored, 1-based ids shifted),
    num_vertices from the header. Edges are returned exactly as stored;
    symmetrize() handles mirroring and cleanup.
    """
    lines = _text_lines(source)
    if fmt == "edges":
        return _parse_edges_text(lines)
    if fmt == "mtx":
        return _parse_matrix_market(lines)
    raise ValueError(f"unknown format {fmt!r}")


def write_edge_list(el: EdgeList, path) -> None:
    """Write edges as 'src dst' text lines (deterministic byte-for-byte)."""
    with open(path, "wt", encoding="ascii", newline="\n") as fh:
        for u, v in el.edges:
            fh.write(f"{u} {v}\n")


def _encode(src: np.ndarray, dst: np.ndarray, num_vertices: int) -> np.ndarray:
    # pack (src, dst) into one uint64 key; num_vertices <= 2**32 so no overflow
    n = np.uint64(num_vertices)
    return src.astype(np.uint64) * n + dst.astype(np.uint64)


def symmetrize(el: EdgeList) -> EdgeList:
    """Mirror every edge, drop self-loops and duplicates, sort by (src, dst)."""
    if el.num_edges == 0 or el.num_vertices == 0:
        return EdgeList(np.empty((0, 2), dtype=VID), el.num_vertices)
    src, dst = el.edges[:, 0], el.edges[:, 1]
    keep = src != dst
    src, dst = src[keep], dst[keep]
    n = el.num_vertices
    codes = np.unique(np.concatenate([_encode(src, dst, n), _encode(dst, src, n)]))
    out = np.empty((codes.size, 2), dtype=VID)
    out[:, 0] = codes // np.uint64(n)
    out[:, 1] = codes % np.uint64(n)
    return EdgeList(out, n)


def build_csr(el: EdgeList) -> Graph:
    """Build the compressed adjacency structure from a symmetrized edge list."""
    n, m = el.num_vertices, el.num_edges
    src = el.edges[:, 0]
    dst = el.edges[:, 1]
    if m:
        if (src == dst).any():
            raise ValueError("input is not symmetrized: self-edge present")
        codes = _encode(src, dst, n)
        codes.sort()
        if codes.size > 1 and (codes[1:] == codes[:-1]).any():
            raise ValueError("input is not symmetrized: duplicate edge present")
        mirrored = np.sort(_encode(dst, src, n))
        if not np.array_equal(codes, mirrored):
            raise ValueError("input is not symmetrized: missing reverse edge")
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=offsets[1:])
    order = np.lexsort((dst, src))
    return Graph(n, m, offsets, np.ascontiguousarray(dst[order]))


def generate_rmat(scale: int, edge_factor: int, seed: int,
                  probs: tuple[float, float, float, float] = RMAT_PROBS) -> EdgeList:
    """Sample edge_factor * 2**scale directed edges by recursive quadrant splits.

    Deterministic for a fixed (scale, edge_factor, seed, probs). Output is raw:
    duplicates and self-loops survive until symmetrize().
    """
    if scale < 1 or edge_factor < 1:
        raise ValueError("scale and edge_factor must be >= 1")
    if (1 << scale) - 1 > MAX_VID:
        raise ValueError(f"scale {scale} overflows the vertex-id range")
    a, b, c, d = probs
    if min(a, b, c, d) < 0 or abs(a + b + c + d - 1.0) > 1e-9:
        raise ValueError("quadrant probabilities must be non-negative and sum to 1")

    m = edge_factor << scale
    rng = np.random.default_rng(seed)
    src = np.zeros(m, dtype=np.uint64)
    dst = np.zeros(m, dtype=np.uint64)
    p_bottom = c + d
    p_right_top = b / (a + b)
    p_right_bottom = d / (c + d)
    for bit in range(scale - 1, -1, -1):
        sbit = rng.random(m) < p_bottom
        thresh = np.where(sbit, p_right_bottom, p_right_top)
        dbit = rng.random(m) < thresh
        src |= sbit.astype(np.uint64) << np.uint64(bit)
        dst |= dbit.astype(np.uint64) << np.uint64(bit)
    edges = np.empty((m, 2), dtype=VID)
    edges[:, 0] = src
    edges[:, 1] = dst
    return EdgeList(edges, 1 << scale)


def partition_1d(g: Graph, num_parts: int) -> Partition:
    """Split vertex ids into contiguous, edge-balanced ranges.

    Boundary k is the first vertex at which the cumulative degree reaches
    round(|E| * k / num_parts); heavily skewed degrees can leave a part empty,
    which downstream consumers must tolerate.
    """
    if num_parts < 1:
        raise ValueError("num_parts must be >= 1")
    if g.num_vertices and num_parts > g.num_vertices:
        raise ValueError("num_parts exceeds the number of vertices")
    boundaries = np.zeros(num_parts + 1, dtype=np.int64)
    if num_parts > 1:
        ks = np.arange(1, num_parts, dtype=np.int64)
        targets = (2 * g.num_edges * ks + num_parts) // (2 * num_parts)  # round half up
        boundaries[1:num_parts] = np.searchsorted(g.offsets, targets, side="left")
    boundaries[num_parts] = g.num_vertices
    return Partition(num_parts, boundaries)
