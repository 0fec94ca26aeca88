"""Diagram builders for tests: braid closures and H-replaced knots.

Both produce codes of genuine planar diagrams, unlike random label shuffles.
"""

from __future__ import annotations

from wirtgraph.gauss import Edge, Endpoint, LinkGaussCode, SpatialGaussCode


def braid_closure(word: list[int], n_strands: int) -> LinkGaussCode:
    """Gauss code of the closure of a braid word.

    Generator ``i`` (or ``-i``) crosses positions i-1 and i; for a positive
    letter the strand moving right passes over.  Crossings are numbered by
    their index in the word, starting at 1.
    """
    passes: dict[int, list[tuple[int, int]]] = {p: [] for p in range(n_strands)}
    pos_of = list(range(n_strands))  # position -> strand started there
    for j, g in enumerate(word, start=1):
        i = abs(g) - 1
        left, right = pos_of[i], pos_of[i + 1]
        # left strand moves right
        over_left = g > 0
        passes[left].append((j, 1 if over_left else -1))
        passes[right].append((j, -1 if over_left else 1))
        pos_of[i], pos_of[i + 1] = right, left
    end_pos = {strand: p for p, strand in enumerate(pos_of)}
    seen: set[int] = set()
    components = []
    for start in range(n_strands):
        if start in seen:
            continue
        comp: list[int] = []
        p = start
        while p not in seen:
            seen.add(p)
            comp.extend(j * s for j, s in passes[p])
            p = end_pos[p]
        components.append(tuple(comp))
    return LinkGaussCode(tuple(components))


def theta_from_knot(knot: LinkGaussCode, x: int) -> SpatialGaussCode:
    """Replace crossing ``x`` of a knot diagram by an H: two trivalent vertices
    joined by a crossing-free edge.  Remaining labels are shifted past 2."""
    (comp,) = knot.components
    p, q = comp.index(x), comp.index(-x)
    n = len(comp)

    def between(i, j):
        return [comp[(i + 1 + t) % n] for t in range((j - i - 1) % n)]

    def shift(ps):
        return tuple(v + 2 if v > 0 else v - 2 for v in ps)

    # vertex 1 joins over-in and under-in, vertex 2 over-out and under-out
    return SpatialGaussCode(
        (
            Edge(Endpoint("a", 2), shift(between(p, q)), Endpoint("a", 1)),
            Edge(Endpoint("b", 2), shift(between(q, p)), Endpoint("b", 1)),
            Edge(Endpoint("c", 1), (), Endpoint("c", 2)),
        )
    )


def bubble(knot: LinkGaussCode, start: int = 0) -> SpatialGaussCode:
    """Theta-graph made of a knot diagram cut open at position ``start`` plus a
    crossing-free edge running parallel to the cut point."""
    (comp,) = knot.components
    n = len(comp)
    rot = tuple(comp[(start + t) % n] for t in range(n))
    shifted = tuple(v + 2 if v > 0 else v - 2 for v in rot)
    return SpatialGaussCode(
        (
            Edge(Endpoint("a", 1), (), Endpoint("a", 2)),
            Edge(Endpoint("b", 2), shifted, Endpoint("b", 1)),
            Edge(Endpoint("c", 1), (), Endpoint("c", 2)),
        )
    )


def random_two_component_links(seed: int, count: int, max_len: int = 24) -> list[LinkGaussCode]:
    """Closures of random braids on 2-4 strands that have exactly two components."""
    import random

    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(2, 4)
        length = rng.randint(4, max_len)
        word = [rng.choice([1, -1]) * rng.randint(1, n - 1) for _ in range(length)]
        link = braid_closure(word, n)
        if len(link.components) == 2 and all(link.components):
            out.append(link)
    return out


def vertex_sum(g: SpatialGaussCode, h: SpatialGaussCode, gv: int, hv: int, match) -> SpatialGaussCode:
    """Remove vertex ``gv`` of ``g`` and ``hv`` of ``h`` and splice their edges.

    ``match[i]`` is the index (among edges at ``hv``) joined to the i-th edge at
    ``gv``.  Labels and vertices of ``h`` are shifted past those of ``g``.
    """
    off = max([abs(p) for e in g.edges for p in e.passages] + g.vertices) + 1

    def shift(e):
        return Edge(
            Endpoint(e.start.letter, e.start.vertex + off),
            tuple(p + off if p > 0 else p - off for p in e.passages),
            Endpoint(e.end.letter, e.end.vertex + off),
        )

    hv += off
    h_edges = [shift(e) for e in h.edges]

    def toward(e, v):
        return e if e.end.vertex == v else Edge(e.end, e.passages[::-1], e.start)

    def away(e, v):
        return e if e.start.vertex == v else Edge(e.end, e.passages[::-1], e.start)

    into = [toward(e, gv) for e in g.edges if gv in (e.start.vertex, e.end.vertex)]
    out = [away(e, hv) for e in h_edges if hv in (e.start.vertex, e.end.vertex)]
    if len(into) != len(out):
        raise ValueError("vertices of different degree")
    rest = [e for e in g.edges if gv not in (e.start.vertex, e.end.vertex)]
    rest += [e for e in h_edges if hv not in (e.start.vertex, e.end.vertex)]
    joined = [Edge(a.start, a.passages + out[match[i]].passages, out[match[i]].end) for i, a in enumerate(into)]
    letters = "abcdefghijklmnopqrstuvwxyz"
    return SpatialGaussCode(
        tuple(
            Edge(Endpoint(letters[i], e.start.vertex), e.passages, Endpoint(letters[i], e.end.vertex))
            for i, e in enumerate(rest + joined)
        )
    )
