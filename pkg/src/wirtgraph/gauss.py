"""Gauss codes for links and spatial graphs.

Two text formats are understood::

    [[1,-2,3,-1,2,-3]]                      # link, one list per component
    [[]]                                    # crossingless unknot
    [[a1, 3, -4, a2], [b1, -3, 4, b2], ...]  # spatial graph, one list per edge

Positive integers are over-passages, negative integers under-passages.  An
edge list starts and ends with an endpoint symbol: a lowercase slot letter
followed by the vertex number.
"""

from __future__ import annotations

import json
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field

__all__ = [
    "Endpoint",
    "Edge",
    "LinkGaussCode",
    "SpatialGaussCode",
    "ValidationReport",
    "Issue",
    "GaussSyntaxError",
    "ValidationError",
    "parse",
    "parse_link_gauss",
    "parse_spatial_gauss",
    "validate",
    "serialize",
    "to_json",
    "from_json",
]


class GaussSyntaxError(ValueError):
    """Malformed Gauss code text."""


class ValidationError(ValueError):
    """A syntactically fine code that breaks a structural invariant."""

    def __init__(self, report):
        self.report = report
        super().__init__("; ".join(issue.message for issue in report.issues))


@dataclass(frozen=True)
class Endpoint:
    letter: str
    vertex: int

    def __str__(self):
        return f"{self.letter}{self.vertex}"


@dataclass(frozen=True)
class Edge:
    start: Endpoint
    passages: tuple[int, ...]
    end: Endpoint


@dataclass(frozen=True)
class LinkGaussCode:
    components: tuple[tuple[int, ...], ...]

    @property
    def labels(self) -> set[int]:
        return {abs(p) for comp in self.components for p in comp}


@dataclass(frozen=True)
class SpatialGaussCode:
    edges: tuple[Edge, ...]

    @property
    def labels(self) -> set[int]:
        return {abs(p) for e in self.edges for p in e.passages}

    @property
    def vertices(self) -> list[int]:
        return sorted({v for e in self.edges for v in (e.start.vertex, e.end.vertex)})

    def degrees(self) -> dict[int, int]:
        deg: Counter[int] = Counter()
        for e in self.edges:
            deg[e.start.vertex] += 1
            deg[e.end.vertex] += 1
        return dict(sorted(deg.items()))


@dataclass(frozen=True)
class Issue:
    code: str
    message: str
    location: str = ""


@dataclass
class ValidationReport:
    issues: list[Issue] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues

    def add(self, code: str, message: str, location: str = "") -> None:
        self.issues.append(Issue(code, message, location))


# --------------------------------------------------------------------------
# tokenizing / parsing

_TOKEN = re.compile(r"\s*(?:(\[)|(\])|(,)|([a-z])(\d+)|([+-]?\d+)|(\S))")
_PREFIX = re.compile(r"^\s*[A-Za-z_][A-Za-z0-9_]*\s*=")


def _tokens(text: str):
    pos = 0
    text = _PREFIX.sub("", text, count=1)
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break  # trailing whitespace only
        pos = m.end()
        if m.group(1):
            yield "[", None, m.start(1)
        elif m.group(2):
            yield "]", None, m.start(2)
        elif m.group(3):
            continue
        elif m.group(4):
            yield "sym", Endpoint(m.group(4), int(m.group(5))), m.start(4)
        elif m.group(6):
            yield "int", int(m.group(6)), m.start(6)
        else:
            raise GaussSyntaxError(f"unexpected character {m.group(7)!r} at offset {m.start(7)}")


def _parse_nested(text: str) -> list[list]:
    """Parse ``[[...], [...]]`` into a list of flat lists of ints/endpoints."""
    toks = list(_tokens(text))
    if not toks:
        raise GaussSyntaxError("empty input")
    if toks[0][0] != "[":
        raise GaussSyntaxError("code must start with '['")
    lists: list[list] = []
    depth = 0
    current: list | None = None
    closed = False
    for kind, value, offset in toks:
        if closed:
            raise GaussSyntaxError(f"trailing data at offset {offset}")
        if kind == "[":
            depth += 1
            if depth > 2:
                raise GaussSyntaxError(f"nesting too deep at offset {offset}")
            if depth == 2:
                current = []
        elif kind == "]":
            depth -= 1
            if depth < 0:
                raise GaussSyntaxError(f"unbalanced ']' at offset {offset}")
            if depth == 1:
                lists.append(current)
                current = None
            elif depth == 0:
                closed = True
        else:
            if depth != 2:
                raise GaussSyntaxError(f"value outside an inner list at offset {offset}")
            current.append(value)
    if depth != 0:
        raise GaussSyntaxError("unbalanced '['")
    return lists


def _is_spatial(lists) -> bool:
    return any(isinstance(x, Endpoint) for lst in lists for x in lst)


def _link_from_lists(lists) -> LinkGaussCode:
    for i, lst in enumerate(lists):
        for x in lst:
            if isinstance(x, Endpoint):
                raise GaussSyntaxError(f"endpoint symbol {x} in link component {i}")
    return LinkGaussCode(tuple(tuple(lst) for lst in lists))


def _spatial_from_lists(lists) -> SpatialGaussCode:
    edges = []
    for i, lst in enumerate(lists):
        if len(lst) < 2 or not isinstance(lst[0], Endpoint) or not isinstance(lst[-1], Endpoint):
            raise GaussSyntaxError(f"edge {i} must start and end with an endpoint symbol")
        inner = lst[1:-1]
        bad = [x for x in inner if isinstance(x, Endpoint)]
        if bad:
            raise GaussSyntaxError(f"endpoint symbol {bad[0]} inside edge {i}")
        edges.append(Edge(lst[0], tuple(inner), lst[-1]))
    return SpatialGaussCode(tuple(edges))


def _checked(code):
    report = validate(code)
    if not report.ok:
        raise ValidationError(report)
    return code


def parse_link_gauss(text: str) -> LinkGaussCode:
    """Parse and validate a link Gauss code such as ``[[1,-2,3,-1,2,-3]]``."""
    return _checked(_link_from_lists(_parse_nested(text)))


def parse_spatial_gauss(text: str) -> SpatialGaussCode:
    """Parse and validate a spatial graph Gauss code.

    A leading ``name =`` assignment is ignored, so Python-style listings can
    be pasted verbatim.
    """
    return _checked(_spatial_from_lists(_parse_nested(text)))


def parse(text: str) -> LinkGaussCode | SpatialGaussCode:
    """Parse either format, deciding by the presence of endpoint symbols."""
    lists = _parse_nested(text)
    if _is_spatial(lists):
        return _checked(_spatial_from_lists(lists))
    return _checked(_link_from_lists(lists))


# --------------------------------------------------------------------------
# validation


def _check_pairing(passages, report: ValidationReport) -> None:
    over: Counter[int] = Counter()
    under: Counter[int] = Counter()
    for where, p in passages:
        if p == 0:
            report.add("zero", "zero is not a crossing label", where)
        elif p > 0:
            over[p] += 1
        else:
            under[-p] += 1
    labels = sorted(set(over) | set(under))
    unpaired = [k for k in labels if over[k] == 0 or under[k] == 0]
    if unpaired:
        report.add(
            "unpaired",
            "unpaired crossing " + ",".join(map(str, unpaired)),
            ",".join(map(str, unpaired)),
        )
    for k in labels:
        if over[k] > 1:
            report.add("duplicate-over", f"crossing {k} over-passage duplicated", str(k))
        if under[k] > 1:
            report.add("duplicate-under", f"crossing {k} under-passage duplicated", str(k))


def _validate_link(code: LinkGaussCode, report: ValidationReport) -> None:
    if not code.components:
        report.add("empty", "link has no components")
    _check_pairing(
        ((f"component {i}", p) for i, comp in enumerate(code.components) for p in comp),
        report,
    )


def _validate_spatial(code: SpatialGaussCode, report: ValidationReport) -> None:
    if not code.edges:
        report.add("empty", "spatial graph has no edges")
    _check_pairing(
        ((f"edge {i}", p) for i, e in enumerate(code.edges) for p in e.passages),
        report,
    )
    vertices = set(code.vertices)
    for v in vertices:
        if v <= 0:
            report.add("vertex-number", f"vertex number {v} is not positive", f"vertex {v}")
    clash = sorted(vertices & code.labels)
    for k in clash:
        report.add("vertex-collision", f"crossing label {k} equals a vertex number", str(k))

    # each slot symbol is used once, or twice by the two ends of one loop edge
    uses: defaultdict[Endpoint, list[int]] = defaultdict(list)
    for i, e in enumerate(code.edges):
        uses[e.start].append(i)
        uses[e.end].append(i)
    for sym, where in sorted(uses.items(), key=lambda kv: (kv[0].vertex, kv[0].letter)):
        if len(where) == 1:
            continue
        if len(where) == 2 and where[0] == where[1]:
            continue
        report.add(
            "endpoint-duplicate",
            f"endpoint {sym} used by edges {sorted(set(where))}",
            str(sym),
        )
    for v, d in code.degrees().items():
        if d == 1:
            report.add("degree-one", f"vertex {v} has degree one", f"vertex {v}")


def validate(code: LinkGaussCode | SpatialGaussCode) -> ValidationReport:
    """Collect every structural violation of ``code`` without raising."""
    report = ValidationReport()
    if isinstance(code, LinkGaussCode):
        _validate_link(code, report)
    elif isinstance(code, SpatialGaussCode):
        _validate_spatial(code, report)
    else:
        raise TypeError(f"not a Gauss code: {type(code).__name__}")
    return report


# --------------------------------------------------------------------------
# serialization


def serialize(code: LinkGaussCode | SpatialGaussCode) -> str:
    """Canonical text form; ``parse(serialize(c)) == c``."""
    if isinstance(code, LinkGaussCode):
        return "[" + ",".join("[" + ",".join(map(str, c)) + "]" for c in code.components) + "]"
    parts = []
    for e in code.edges:
        items = [str(e.start), *map(str, e.passages), str(e.end)]
        parts.append("[" + ", ".join(items) + "]")
    return "[" + ", ".join(parts) + "]"


def to_json(code: LinkGaussCode | SpatialGaussCode) -> dict:
    if isinstance(code, LinkGaussCode):
        return {"components": [list(c) for c in code.components]}
    return {
        "edges": [
            {"start": str(e.start), "passages": list(e.passages), "end": str(e.end)}
            for e in code.edges
        ]
    }


def _endpoint(s: str) -> Endpoint:
    m = re.fullmatch(r"([a-z])(\d+)", s)
    if m is None:
        raise GaussSyntaxError(f"bad endpoint symbol {s!r}")
    return Endpoint(m.group(1), int(m.group(2)))


def from_json(obj: dict | str) -> LinkGaussCode | SpatialGaussCode:
    if isinstance(obj, str):
        obj = json.loads(obj)
    if "components" in obj:
        return _checked(LinkGaussCode(tuple(tuple(int(p) for p in c) for c in obj["components"])))
    edges = tuple(
        Edge(_endpoint(e["start"]), tuple(int(p) for p in e["passages"]), _endpoint(e["end"]))
        for e in obj["edges"]
    )
    return _checked(SpatialGaussCode(edges))
