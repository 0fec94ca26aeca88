"""Incidence model of a truncated diagram.

Removing every vertex of degree > 2 leaves free ends; cutting the remaining
curves at under-passages yields the strands.  Each crossing then has one
over-strand and two under-strands (the strand arriving at the under-passage
and the one leaving it, in traversal order).
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field

from .gauss import LinkGaussCode, SpatialGaussCode

__all__ = [
    "NormalizationError",
    "Path",
    "Strand",
    "Crossing",
    "Diagram",
    "FREE_TO_UNDER",
    "UNDER_TO_UNDER",
    "FREE_TO_FREE",
    "CLOSED",
    "normalize",
    "build_diagram",
    "pods",
]

FREE_TO_UNDER = "free-to-under"
UNDER_TO_UNDER = "under-to-under"
FREE_TO_FREE = "free-to-free"
CLOSED = "closed"


class NormalizationError(ValueError):
    pass


@dataclass(frozen=True)
class Path:
    """An edge between two vertices, or a closed curve (``start is None``)."""

    start: int | None
    passages: tuple[int, ...]
    end: int | None

    @property
    def closed(self) -> bool:
        return self.start is None

    def reversed(self) -> Path:
        return Path(self.end, self.passages[::-1], self.start)


@dataclass(frozen=True)
class Strand:
    id: int
    passages: tuple[int, ...]
    kind: str
    start: int | None  # vertex at a free starting end, else None
    end: int | None
    path: int

    @property
    def end_vertices(self) -> tuple[int, ...]:
        return tuple(v for v in (self.start, self.end) if v is not None)


@dataclass(frozen=True)
class Crossing:
    label: int
    over: int
    under_in: int
    under_out: int


@dataclass(frozen=True)
class Diagram:
    strands: tuple[Strand, ...]
    crossings: tuple[Crossing, ...]
    vertices: tuple[int, ...]
    pods: dict[int, tuple[int, ...]]
    degrees: dict[int, int]
    paths: tuple[Path, ...]
    loops: dict[int, int] = field(default_factory=dict)

    @property
    def n_edges(self) -> int:
        return sum(1 for p in self.paths if not p.closed)

    @property
    def euler_characteristic(self) -> int:
        """Vertices minus edges; closed curves contribute zero."""
        return len(self.vertices) - self.n_edges

    def crossing(self, label: int) -> Crossing:
        return self._by_label[label]

    @property
    def _by_label(self) -> dict[int, Crossing]:
        cache = self.__dict__.get("_label_cache")
        if cache is None:
            cache = {c.label: c for c in self.crossings}
            object.__setattr__(self, "_label_cache", cache)
        return cache

    def strand_of(self, passages) -> int:
        """Id of the strand whose passage list is exactly ``passages``."""
        target = tuple(passages)
        for s in self.strands:
            if s.passages == target:
                return s.id
        raise KeyError(f"no strand with passages {target}")

    def to_json(self) -> dict:
        return {
            "strands": [
                {
                    "id": s.id,
                    "kind": s.kind,
                    "passages": list(s.passages),
                    "end_vertices": list(s.end_vertices),
                }
                for s in self.strands
            ],
            "crossings": [
                {"label": c.label, "over": c.over, "under_in": c.under_in, "under_out": c.under_out}
                for c in self.crossings
            ],
            "pods": {str(v): list(ids) for v, ids in self.pods.items()},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def _fuse_degree_two(edges: list[Path]) -> tuple[list[Path], list[Path]]:
    """Merge edge pairs through degree-2 vertices; returns (edges, new closed curves)."""
    edges = list(edges)
    closed: list[Path] = []
    while True:
        deg: defaultdict[int, int] = defaultdict(int)
        for e in edges:
            deg[e.start] += 1
            deg[e.end] += 1
        v = next((v for v in sorted(deg) if deg[v] == 2), None)
        if v is None:
            return edges, closed
        at = [i for i, e in enumerate(edges) if v in (e.start, e.end)]
        if len(at) == 1:
            # a lone loop through a degree-2 vertex is just a closed curve
            closed.append(Path(None, edges[at[0]].passages, None))
            del edges[at[0]]
            continue
        i, j = at
        a, b = edges[i], edges[j]
        if a.end == v:
            b = b if b.start == v else b.reversed()
            merged = Path(a.start, a.passages + b.passages, b.end)
        else:
            b = b if b.end == v else b.reversed()
            merged = Path(b.start, b.passages + a.passages, a.end)
        edges[i] = merged
        del edges[j]


def normalize(code: LinkGaussCode | SpatialGaussCode) -> list[Path]:
    """Edges (degree-2 vertices fused away) followed by closed curves."""
    if isinstance(code, LinkGaussCode):
        return [Path(None, tuple(c), None) for c in code.components]
    edges = [Path(e.start.vertex, e.passages, e.end.vertex) for e in code.edges]
    edges, closed = _fuse_degree_two(edges)
    deg: defaultdict[int, int] = defaultdict(int)
    for e in edges:
        deg[e.start] += 1
        deg[e.end] += 1
    ones = sorted(v for v, d in deg.items() if d == 1)
    if ones:
        raise NormalizationError(f"degree-one vertices {ones}")
    return edges + closed


def _cut_open(path: Path):
    unders = [i for i, p in enumerate(path.passages) if p < 0]
    if not unders:
        yield path.passages, FREE_TO_FREE, path.start, path.end
        return
    ps = path.passages
    yield ps[: unders[0] + 1], FREE_TO_UNDER, path.start, None
    for a, b in zip(unders, unders[1:]):
        yield ps[a : b + 1], UNDER_TO_UNDER, None, None
    yield ps[unders[-1] :], FREE_TO_UNDER, None, path.end


def _cut_closed(path: Path):
    ps = path.passages
    unders = [i for i, p in enumerate(ps) if p < 0]
    if not unders:
        yield ps, CLOSED, None, None
        return
    n = len(ps)
    for j, a in enumerate(unders):
        b = unders[(j + 1) % len(unders)]
        length = (b - a) % n or n
        yield tuple(ps[(a + t) % n] for t in range(length + 1)), UNDER_TO_UNDER, None, None


def build_diagram(code: LinkGaussCode | SpatialGaussCode) -> Diagram:
    """Strands, crossings and pods of the truncated diagram of ``code``.

    Strand ids follow input order: edges first (in order, then position along
    the edge), then closed curves.
    """
    paths = normalize(code)
    strands: list[Strand] = []
    for pi, path in enumerate(paths):
        pieces = _cut_closed(path) if path.closed else _cut_open(path)
        for passages, kind, start, end in pieces:
            strands.append(Strand(len(strands), tuple(passages), kind, start, end, pi))

    over: dict[int, int] = {}
    into: dict[int, int] = {}
    out_of: dict[int, int] = {}
    for s in strands:
        ps = s.passages
        if s.kind == CLOSED:
            interior = ps
        elif s.kind == FREE_TO_FREE:
            interior = ps
        else:
            lo = 1 if ps and ps[0] < 0 and s.start is None else 0
            hi = len(ps) - 1 if ps and ps[-1] < 0 and s.end is None else len(ps)
            interior = ps[lo:hi]
            if lo:
                out_of[-ps[0]] = s.id
            if hi < len(ps):
                into[-ps[-1]] = s.id
        for p in interior:
            if p > 0:
                over[p] = s.id
    crossings = tuple(
        Crossing(k, over[k], into[k], out_of[k]) for k in sorted(over)
    )

    pod_sets: defaultdict[int, list[int]] = defaultdict(list)
    degrees: defaultdict[int, int] = defaultdict(int)
    loops: defaultdict[int, int] = defaultdict(int)
    for s in strands:
        for v in s.end_vertices:
            if s.id not in pod_sets[v]:
                pod_sets[v].append(s.id)
    for p in paths:
        if not p.closed:
            degrees[p.start] += 1
            degrees[p.end] += 1
            if p.start == p.end:
                loops[p.start] += 1
    vertices = tuple(sorted(degrees))
    return Diagram(
        strands=tuple(strands),
        crossings=crossings,
        vertices=vertices,
        pods={v: tuple(pod_sets[v]) for v in vertices},
        degrees={v: degrees[v] for v in vertices},
        paths=tuple(paths),
        loops=dict(loops),
    )


def pods(d: Diagram) -> dict[int, frozenset[int]]:
    """Vertex -> set of strands with a free end there."""
    return {v: frozenset(ids) for v, ids in d.pods.items()}
