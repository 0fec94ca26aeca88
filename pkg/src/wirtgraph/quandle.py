"""Finite quandles and coloring counts of diagrams.

A coloring assigns an element to every strand so that all strands at a
vertex agree and at each crossing ``out = in ▷ over`` (in/out following the
traversal direction of the under-strand).  For a diagram with Wirtinger
number w there are at most |X|**w colorings, which turns a count into a
lower bound for the bridge index.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from functools import cached_property, reduce
from pathlib import Path

import numpy as np

from .diagram import Diagram
from .wirt import propagate, wirtinger_number

__all__ = [
    "FiniteQuandle",
    "AxiomReport",
    "ColoringCount",
    "Homogeneity",
    "ShapeError",
    "BudgetExceeded",
    "QuandleError",
    "check_quandle",
    "n_quandle_order",
    "is_homogeneous",
    "dihedral",
    "alexander4",
    "trivial",
    "from_csv",
    "from_spec",
    "count_colorings",
    "count_colorings_backtrack",
    "coloring_bound",
    "vertex_sum_check",
]


class ShapeError(ValueError):
    pass


class QuandleError(ValueError):
    """Table violates a quandle axiom."""


class BudgetExceeded(RuntimeError):
    def __init__(self, message: str, partial):
        super().__init__(message)
        self.partial = partial


@dataclass
class AxiomReport:
    """Per-axiom outcome; each failure carries a witnessing tuple."""

    idempotent: tuple[bool, tuple | None]
    right_invertible: tuple[bool, tuple | None]
    self_distributive: tuple[bool, tuple | None]

    @property
    def ok(self) -> bool:
        return self.idempotent[0] and self.right_invertible[0] and self.self_distributive[0]


def _as_table(table) -> np.ndarray:
    t = np.asarray(table, dtype=np.int64)
    if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] == 0:
        raise ShapeError(f"quandle table must be square and nonempty, got shape {t.shape}")
    n = t.shape[0]
    if t.min() < 0 or t.max() >= n:
        raise ShapeError(f"entries must lie in 0..{n - 1}")
    return t


def check_quandle(table) -> AxiomReport:
    """Check idempotence, right invertibility and right self-distributivity."""
    t = _as_table(table)
    n = t.shape[0]
    idem = (True, None)
    for x in range(n):
        if t[x, x] != x:
            idem = (False, (x,))
            break
    inv = (True, None)
    for y in range(n):
        col = t[:, y]
        if len(set(col.tolist())) != n:
            seen: dict[int, int] = {}
            for x, z in enumerate(col.tolist()):
                if z in seen:
                    inv = (False, (seen[z], x, y))
                    break
                seen[z] = x
            break
    dist = (True, None)
    # (x▷y)▷z vs (x▷z)▷(y▷z), vectorized over x
    for y in range(n):
        for z in range(n):
            lhs = t[t[:, y], z]
            rhs = t[t[:, z], t[y, z]]
            bad = np.nonzero(lhs != rhs)[0]
            if bad.size:
                dist = (False, (int(bad[0]), y, z))
                break
        if not dist[0]:
            break
    return AxiomReport(idem, inv, dist)


class FiniteQuandle:
    """An order-n operation table, ``table[x, y] = x ▷ y``."""

    def __init__(self, table, name: str = ""):
        self.table = _as_table(table)
        self.table.setflags(write=False)
        self.name = name

    def __repr__(self):
        return f"FiniteQuandle({self.name or self.table.tolist()!r})"

    def __eq__(self, other):
        return isinstance(other, FiniteQuandle) and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash(self.table.tobytes())

    @property
    def order(self) -> int:
        return self.table.shape[0]

    def op(self, x: int, y: int) -> int:
        return int(self.table[x, y])

    @cached_property
    def inverse(self) -> np.ndarray:
        """``inverse[z, y]`` is the x with ``x ▷ y = z``."""
        if not self.axioms.right_invertible[0]:
            raise QuandleError("operation is not right invertible")
        inv = np.empty_like(self.table)
        for y in range(self.order):
            inv[self.table[:, y], y] = np.arange(self.order)
        return inv

    @cached_property
    def axioms(self) -> AxiomReport:
        return check_quandle(self.table)

    @cached_property
    def n_order(self) -> int | None:
        return n_quandle_order(self)

    @cached_property
    def homogeneity(self) -> Homogeneity:
        return is_homogeneous(self)

    def conjugate(self, perm) -> FiniteQuandle:
        """Isomorphic copy with element x renamed perm[x]."""
        p = np.asarray(perm)
        t = np.empty_like(self.table)
        t[np.ix_(p, p)] = p[self.table]
        return FiniteQuandle(t, f"{self.name}^perm" if self.name else "")


def _perm_order(perm: list[int]) -> int:
    seen = [False] * len(perm)
    order = 1
    for i in range(len(perm)):
        if seen[i]:
            continue
        length = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        order = math.lcm(order, length)
    return order


def n_quandle_order(q: FiniteQuandle) -> int | None:
    """Least n with x ▷ y ▷ ... ▷ y (n times) = x for all x, y.

    This is the lcm of the orders of the column permutations; ``None`` when
    some column is not a permutation.
    """
    if not q.axioms.right_invertible[0]:
        return None
    return reduce(math.lcm, (_perm_order(q.table[:, y].tolist()) for y in range(q.order)), 1)


@dataclass
class Homogeneity:
    homogeneous: bool
    automorphisms: int | None
    exhaustive: bool

    def __bool__(self):
        return self.homogeneous


def _inner_orbit(q: FiniteQuandle, start: int = 0) -> set[int]:
    t = q.table
    orbit = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for y in range(q.order):
            for z in (int(t[x, y]), int(q.inverse[x, y])):
                if z not in orbit:
                    orbit.add(z)
                    stack.append(z)
    return orbit


def _automorphisms(q: FiniteQuandle, budget: int | None):
    """Yield automorphisms as lists; raises _Exhausted when the node budget runs out."""
    n = q.order
    t = q.table.tolist()
    nodes = [0]

    def extend(h: list[int | None], used: set[int]) -> bool:
        # force h on everything generated by the assigned elements
        queue = [(a, b) for a in range(n) if h[a] is not None for b in range(n) if h[b] is not None]
        while queue:
            a, b = queue.pop()
            z, hz = t[a][b], t[h[a]][h[b]]
            if h[z] is None:
                if hz in used:
                    return False
                h[z] = hz
                used.add(hz)
                queue.extend((z, c) for c in range(n) if h[c] is not None)
                queue.extend((c, z) for c in range(n) if h[c] is not None)
            elif h[z] != hz:
                return False
        return True

    def search(h, used):
        nodes[0] += 1
        if budget is not None and nodes[0] > budget:
            raise _Exhausted
        try:
            x = h.index(None)
        except ValueError:
            yield list(h)
            return
        for img in range(n):
            if img in used:
                continue
            h2, used2 = list(h), set(used)
            h2[x] = img
            used2.add(img)
            if extend(h2, used2):
                yield from search(h2, used2)

    yield from search([None] * n, set())


class _Exhausted(Exception):
    pass


EXHAUSTIVE_ORDER = 8


def is_homogeneous(q: FiniteQuandle, budget: int | None = None) -> Homogeneity:
    """Whether the automorphism group acts transitively.

    Up to order 8 all automorphisms are enumerated.  Larger quandles first try
    the inner automorphisms (the column maps), which settle transitivity when
    they already act transitively; otherwise the search runs under ``budget``
    nodes (default 10**6) and :class:`BudgetExceeded` reports the orbit found
    so far.
    """
    if not q.axioms.ok:
        raise QuandleError("not a quandle")
    n = q.order
    if budget is None and n > EXHAUSTIVE_ORDER:
        budget = 10**6
    inner_transitive = len(_inner_orbit(q)) == n
    orbit: set[int] = set()
    count = 0
    try:
        for h in _automorphisms(q, budget):
            count += 1
            orbit.add(h[0])
    except _Exhausted:
        if inner_transitive:
            return Homogeneity(True, None, False)
        raise BudgetExceeded(
            f"automorphism search exceeded {budget} nodes", sorted(orbit | _inner_orbit(q))
        ) from None
    return Homogeneity(len(orbit) == n, count, True)


# --------------------------------------------------------------------------
# built-ins


def dihedral(n: int) -> FiniteQuandle:
    """x ▷ y = 2y - x (mod n)."""
    x, y = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    return FiniteQuandle((2 * y - x) % n, f"dihedral:{n}")


# rows indexed by x, columns by y; transcribed from the printed product table
_ALEXANDER4 = [
    [0, 2, 3, 1],
    [3, 1, 0, 2],
    [1, 3, 2, 0],
    [2, 0, 1, 3],
]


def alexander4() -> FiniteQuandle:
    """Alexander quandle of order four (GF(4) with t a primitive element)."""
    return FiniteQuandle(_ALEXANDER4, "alexander:4")


def trivial(n: int) -> FiniteQuandle:
    return FiniteQuandle(np.repeat(np.arange(n)[:, None], n, axis=1), f"trivial:{n}")


def from_csv(source: str | Path) -> FiniteQuandle:
    """Read a table with one row per element; accepts a path or CSV text."""
    if isinstance(source, Path) or ("\n" not in source and "," not in source):
        text = Path(source).read_text()
    else:
        text = source
    rows = [[int(v) for v in row if v.strip()] for row in csv.reader(io.StringIO(text)) if row]
    return FiniteQuandle(rows, str(source) if isinstance(source, Path) else "")


BUILTINS = {"dihedral": dihedral, "alexander": lambda n: alexander4() if n == 4 else None, "trivial": trivial}


def from_spec(spec: str) -> FiniteQuandle:
    """``dihedral:N``, ``alexander:4``, ``trivial:N`` or a CSV path."""
    name, _, arg = spec.partition(":")
    if name in BUILTINS and arg.isdigit():
        q = BUILTINS[name](int(arg))
        if q is None:
            raise ValueError(f"no built-in {spec!r}")
        return q
    path = Path(spec)
    if path.exists():
        return from_csv(path)
    raise ValueError(f"unknown quandle {spec!r}")


# --------------------------------------------------------------------------
# colorings


@dataclass
class ColoringCount:
    count: int
    order: int
    bound: int

    def to_json(self) -> dict:
        return {"count": self.count, "order": self.order, "bound": self.bound}


def coloring_bound(count: int, order: int) -> int:
    """Smallest b with order**b >= count (exact integer arithmetic)."""
    if order <= 1:
        raise ValueError("order must be at least 2")
    b, p = 0, 1
    while p < count:
        p *= order
        b += 1
    return b


def _signs(d: Diagram, signs) -> dict[int, int]:
    if signs is None:
        return {c.label: 1 for c in d.crossings}
    return {c.label: signs.get(c.label, 1) for c in d.crossings}


def _ready(q: FiniteQuandle) -> None:
    if not q.axioms.ok:
        raise QuandleError("table fails the quandle axioms")


def count_colorings(
    d: Diagram,
    q: FiniteQuandle,
    witness=None,
    signs: dict[int, int] | None = None,
) -> ColoringCount:
    """Exact number of colorings of ``d`` by ``q``.

    All |X|**w assignments to a complete seed set are pushed through the
    coloring moves at once (one numpy array per strand); an assignment counts
    when the result satisfies every crossing and vertex relation.  ``signs``
    maps a crossing label to -1 where the relation reads ``out = in ▷⁻¹ over``.
    Without ``witness`` the canonical Wirtinger witness is used; an incomplete
    witness falls back to backtracking.
    """
    _ready(q)
    if witness is None:
        witness = wirtinger_number(d).witness
    witness = tuple(witness)
    state = propagate(d, witness)
    if not state.complete:
        return count_colorings_backtrack(d, q, signs)

    sign = _signs(d, signs)
    n = q.order
    w = len(witness)
    total = n**w
    t, inv = q.table, q.inverse
    grid = np.indices((n,) * w).reshape(w, total) if w else np.zeros((0, 1), dtype=np.int64)
    vals: list[np.ndarray | None] = [None] * len(d.strands)
    for s, col in enumerate(state.color):
        if state.stage[s] == 0:
            vals[s] = grid[col]
    for label, new, src in state.moves:
        c = d.crossing(label)
        fwd, back = (t, inv) if sign[label] > 0 else (inv, t)
        if new == c.under_out:
            vals[new] = fwd[vals[src], vals[c.over]]
        else:
            vals[new] = back[vals[src], vals[c.over]]

    ok = np.ones(total, dtype=bool)
    for c in d.crossings:
        rel = t if sign[c.label] > 0 else inv
        ok &= rel[vals[c.under_in], vals[c.over]] == vals[c.under_out]
    for members in d.pods.values():
        first = vals[members[0]]
        for s in members[1:]:
            ok &= vals[s] == first
    count = int(ok.sum())
    return ColoringCount(count, n, coloring_bound(count, n))


def count_colorings_backtrack(d: Diagram, q: FiniteQuandle, signs: dict[int, int] | None = None) -> ColoringCount:
    """Plain backtracking over strands; strands sharing a vertex share a variable."""
    _ready(q)
    sign = _signs(d, signs)
    n = q.order
    t = q.table.tolist()
    parent = list(range(len(d.strands)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for members in d.pods.values():
        for s in members[1:]:
            parent[find(s)] = find(members[0])
    var_of = [find(s) for s in range(len(d.strands))]
    variables = sorted(set(var_of))
    position = {v: i for i, v in enumerate(variables)}
    # each constraint checked once its last variable is assigned
    checks: list[list] = [[] for _ in variables]
    for c in d.crossings:
        vs = [position[var_of[s]] for s in (c.under_in, c.over, c.under_out)]
        checks[max(vs)].append((vs, sign[c.label]))
    value = [0] * len(variables)

    def holds(vs, sg):
        a, y, b = (value[v] for v in vs)
        return t[a][y] == b if sg > 0 else t[b][y] == a

    def search(i):
        if i == len(variables):
            return 1
        total = 0
        for x in range(n):
            value[i] = x
            if all(holds(vs, sg) for vs, sg in checks[i]):
                total += search(i + 1)
        return total

    count = search(0)
    return ColoringCount(count, n, coloring_bound(count, n))


def vertex_sum_check(count_g: int, count_h: int, count_sum: int, n: int) -> bool:
    """Whether a vertex-sum count is consistent with the product formula."""
    return count_sum * n == count_g * count_h
