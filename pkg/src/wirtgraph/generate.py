"""Theta_4-graph codes from two-component links by singularizing crossing pairs.

A pair of crossings (x, y) is singularizable when +x and +y lie on one
component and -x, -y on the other.  Replacing both crossings by 4-valent
vertices cuts each component into two arcs, which become the four edges.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .gauss import Edge, Endpoint, LinkGaussCode, SpatialGaussCode

__all__ = ["ArityError", "SingularizablePair", "singularizable_pairs", "singularize"]


class ArityError(ValueError):
    pass


@dataclass(frozen=True)
class SingularizablePair:
    x: int
    y: int
    # component holding +x, +y; positions are indices into their components
    over_component: int
    positions: tuple[int, int, int, int]  # +x, +y, -x, -y
    arc_lengths: tuple[int, int, int, int]  # x->y, y->x on each component


def _cyclic_gap(i: int, j: int, n: int) -> int:
    """Entries strictly between positions i and j going forward."""
    return (j - i - 1) % n


def singularizable_pairs(link: LinkGaussCode, min_arc: int = 4) -> list[SingularizablePair]:
    """All singularizable pairs whose four arcs each hold at least ``min_arc`` passages."""
    if len(link.components) != 2:
        raise ArityError(f"need a 2-component link, got {len(link.components)} components")
    where: dict[int, tuple[int, int]] = {}
    for ci, comp in enumerate(link.components):
        for pos, p in enumerate(comp):
            where[p] = (ci, pos)
    inter = sorted(
        k for k in link.labels if where[k][0] != where[-k][0]
    )
    out = []
    for x, y in combinations(inter, 2):
        (cx, px), (cy, py) = where[x], where[y]
        if cx != cy:
            continue
        (_, nx), (_, ny) = where[-x], where[-y]
        a = len(link.components[cx])
        b = len(link.components[1 - cx])
        lengths = (
            _cyclic_gap(px, py, a),
            _cyclic_gap(py, px, a),
            _cyclic_gap(nx, ny, b),
            _cyclic_gap(ny, nx, b),
        )
        if min(lengths) < min_arc:
            continue
        out.append(SingularizablePair(x, y, cx, (px, py, nx, ny), lengths))
    return out


def _arc(comp: tuple[int, ...], i: int, j: int) -> list[int]:
    n = len(comp)
    return [comp[(i + 1 + t) % n] for t in range(_cyclic_gap(i, j, n))]


def singularize(link: LinkGaussCode, pair: SingularizablePair) -> SpatialGaussCode:
    """Four-edge code with crossing ``pair.x`` as vertex 1 and ``pair.y`` as vertex 2.

    Edges a, b come from the component carrying the over-passages, c, d from
    the other; each keeps its component's orientation.  Surviving crossings
    are renumbered from 3 in order of first appearance.
    """
    px, py, nx, ny = pair.positions
    top = link.components[pair.over_component]
    bottom = link.components[1 - pair.over_component]
    raw = [
        ("a", 1, _arc(top, px, py), 2),
        ("b", 2, _arc(top, py, px), 1),
        ("c", 1, _arc(bottom, nx, ny), 2),
        ("d", 2, _arc(bottom, ny, nx), 1),
    ]
    relabel: dict[int, int] = {}
    for _, _, passages, _ in raw:
        for p in passages:
            if abs(p) not in relabel:
                relabel[abs(p)] = len(relabel) + 3
    edges = tuple(
        Edge(
            Endpoint(letter, u),
            tuple(relabel[abs(p)] * (1 if p > 0 else -1) for p in passages),
            Endpoint(letter, v),
        )
        for letter, u, passages, v in raw
    )
    return SpatialGaussCode(edges)
