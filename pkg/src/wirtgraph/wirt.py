"""Wirtinger number by seed enumeration and coloring-move propagation.

A seed is either a whole pod (every strand with a free end at one removed
vertex, all in one color) or a single strand.  The coloring move fires at a
crossing whose over-strand is colored and exactly one of whose two
under-strands is colored; the other under-strand takes that color.

Which strands end up colored depends only on the seed set, not on the order
moves are applied, so the search runs a color-blind closure and only the
reported witness is re-propagated with colors and stage numbers.
"""

from __future__ import annotations

import logging
import math
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations, islice
from typing import Iterable, Union

from .diagram import CLOSED, Diagram

log = logging.getLogger(__name__)

__all__ = [
    "Pod",
    "Arc",
    "SeedItem",
    "ColoringState",
    "WirtingerResult",
    "TangleReport",
    "EmbeddingCertificate",
    "BudgetExceeded",
    "NotFoundWithinBound",
    "ConsistencyError",
    "LemmaViolation",
    "MONOTONE",
    "MINIMUM_MULTI",
    "MINIMUM_SAME",
    "seed_items",
    "propagate",
    "colored_set",
    "is_k_colorable",
    "wirtinger_number",
    "tangle_report",
    "embedding_certificate",
    "check_connectivity",
]

MONOTONE = "MONOTONE"
MINIMUM_MULTI = "MINIMUM_MULTI"
MINIMUM_SAME = "MINIMUM_SAME"


class BudgetExceeded(RuntimeError):
    def __init__(self, tried: int, k: int):
        self.tried = tried
        self.k = k
        super().__init__(f"node budget exhausted after {tried} seed sets (k={k})")


class NotFoundWithinBound(RuntimeError):
    pass


class ConsistencyError(RuntimeError):
    pass


class LemmaViolation(RuntimeError):
    pass


@dataclass(frozen=True)
class Pod:
    vertex: int

    def __str__(self):
        return f"Pod({self.vertex})"


@dataclass(frozen=True)
class Arc:
    strand: int

    def __str__(self):
        return f"Arc({self.strand})"


SeedItem = Union[Pod, Arc]


def _item_key(item: SeedItem) -> tuple[int, int]:
    return (0, item.vertex) if isinstance(item, Pod) else (1, item.strand)


def seed_items(d: Diagram) -> list[SeedItem]:
    """All seed items in enumeration order: pods by vertex, then strands by id."""
    return [Pod(v) for v in d.vertices] + [Arc(s.id) for s in d.strands]


def _members(d: Diagram, item: SeedItem) -> tuple[int, ...]:
    if isinstance(item, Pod):
        return d.pods[item.vertex]
    return (item.strand,)


@dataclass
class ColoringState:
    """Colors and stages of a propagation run.

    ``color[s]`` is the index of the seed whose color strand ``s`` carries
    (``None`` if uncolored); ``stage[s]`` is 0 for seeds and ``j`` for the
    strand colored by the j-th move.  ``moves`` lists ``(crossing, new,
    source)`` in firing order.
    """

    color: list[int | None]
    stage: list[int | None]
    moves: list[tuple[int, int, int]] = field(default_factory=list)

    @property
    def colored(self) -> frozenset[int]:
        return frozenset(i for i, c in enumerate(self.color) if c is not None)

    @property
    def complete(self) -> bool:
        return all(c is not None for c in self.color)

    def restricted(self, upto: int) -> ColoringState:
        """The state as it was right after move ``upto``."""
        keep = [st is not None and st <= upto for st in self.stage]
        return ColoringState(
            [c if k else None for c, k in zip(self.color, keep)],
            [st if k else None for st, k in zip(self.stage, keep)],
            self.moves[:upto],
        )


class _Engine:
    """Flat arrays for the hot loop; picklable for worker processes."""

    def __init__(self, d: Diagram):
        self.n = len(d.strands)
        self.labels = [c.label for c in d.crossings]
        self.over = [c.over for c in d.crossings]
        self.uin = [c.under_in for c in d.crossings]
        self.uout = [c.under_out for c in d.crossings]
        incident: list[list[int]] = [[] for _ in range(self.n)]
        for ci, c in enumerate(d.crossings):
            for s in {c.over, c.under_in, c.under_out}:
                incident[s].append(ci)
        self.incident = [tuple(sorted(x)) for x in incident]
        self.items = seed_items(d)
        self.members = [_members(d, it) for it in self.items]

    def closure_size(self, seeds: Iterable[int]) -> int:
        """Number of strands colored at the fixpoint of the given seed items."""
        colored = bytearray(self.n)
        queue: list[int] = []
        count = 0
        for it in seeds:
            for s in self.members[it]:
                if not colored[s]:
                    colored[s] = 1
                    count += 1
                    queue.extend(self.incident[s])
        over, uin, uout, incident = self.over, self.uin, self.uout, self.incident
        while queue:
            c = queue.pop()
            if not colored[over[c]]:
                continue
            a, b = colored[uin[c]], colored[uout[c]]
            if a == b:
                continue
            new = uout[c] if a else uin[c]
            colored[new] = 1
            count += 1
            queue.extend(incident[new])
        return count

    def colors_all(self, seeds: Iterable[int]) -> bool:
        return self.closure_size(seeds) == self.n


def colored_set(d: Diagram, seeds: Iterable[SeedItem]) -> frozenset[int]:
    """Strands colored at the fixpoint, ignoring which color each carries."""
    return propagate(d, seeds).colored


def propagate(d: Diagram, seeds: Iterable[SeedItem], rng: random.Random | None = None) -> ColoringState:
    """Apply coloring moves from ``seeds`` until none applies.

    Moves run in rounds; each round visits the pending crossings in ascending
    label order.  With ``rng`` the pending crossing is instead drawn at random
    each time (used to exercise order independence).
    """
    seeds = list(seeds)
    if not seeds:
        raise ValueError("empty seed set")
    if len(set(seeds)) != len(seeds):
        raise ValueError("repeated seed item")
    n = len(d.strands)
    color: list[int | None] = [None] * n
    stage: list[int | None] = [None] * n
    pending: set[int] = set()
    crossings = d.crossings
    incident: list[list[int]] = [[] for _ in range(n)]
    for ci, c in enumerate(crossings):
        for s in {c.over, c.under_in, c.under_out}:
            incident[s].append(ci)

    for ci, item in enumerate(seeds):
        for s in _members(d, item):
            if color[s] is None:
                color[s] = ci
                stage[s] = 0
                pending.update(incident[s])

    moves: list[tuple[int, int, int]] = []

    def fire(ci: int) -> None:
        c = crossings[ci]
        if color[c.over] is None:
            return
        a, b = color[c.under_in], color[c.under_out]
        if (a is None) == (b is None):
            return
        new, src = (c.under_out, c.under_in) if b is None else (c.under_in, c.under_out)
        color[new] = color[src]
        moves.append((c.label, new, src))
        stage[new] = len(moves)
        pending.update(incident[new])

    if rng is None:
        while pending:
            current = sorted(pending, key=lambda ci: crossings[ci].label)
            pending.clear()
            for ci in current:
                fire(ci)
    else:
        while pending:
            ci = rng.choice(sorted(pending))
            pending.discard(ci)
            fire(ci)
    return ColoringState(color, stage, moves)


# --------------------------------------------------------------------------
# search


def _forced(d: Diagram, items: list[SeedItem]) -> list[int]:
    """Indices of items every complete seed set must contain (closed strands)."""
    closed = {s.id for s in d.strands if s.kind == CLOSED}
    return [i for i, it in enumerate(items) if isinstance(it, Arc) and it.strand in closed]


def _candidates(d: Diagram, engine: _Engine, k: int, require_pod_seed: bool):
    """Seed index tuples of size k, lexicographic, skipping hopeless ones.

    Sets missing a forced item never color everything; dropping them keeps the
    relative lexicographic order of the rest.
    """
    items = engine.items
    forced = _forced(d, items)
    if k < len(forced):
        return
    free = [i for i in range(len(items)) if i not in set(forced)]
    n_pods = len(d.vertices)
    for rest in combinations(free, k - len(forced)):
        combo = tuple(sorted(rest + tuple(forced)))
        if require_pod_seed and not (combo and combo[0] < n_pods):
            continue
        yield combo


_WORKER: _Engine | None = None


def _init_worker(engine: _Engine) -> None:
    global _WORKER
    _WORKER = engine


def _scan_chunk(chunk: list[tuple[int, ...]]) -> int | None:
    engine = _WORKER
    for pos, combo in enumerate(chunk):
        if engine.colors_all(combo):
            return pos
    return None


# below this many seed sets a process pool costs more than it saves
PARALLEL_MIN = 20_000


def _default_threads() -> int:
    env = os.environ.get("WIRTGRAPH_THREADS")
    if env:
        return max(1, int(env))
    return 1


def is_k_colorable(
    d: Diagram,
    k: int,
    require_pod_seed: bool = False,
    budget: int | None = None,
    threads: int | None = None,
    _engine: _Engine | None = None,
    _spent: list[int] | None = None,
) -> tuple[SeedItem, ...] | None:
    """First seed set of size ``k`` (in enumeration order) coloring every strand.

    ``budget`` caps the number of seed sets examined (shared across calls via
    ``_spent``); exceeding it raises :class:`BudgetExceeded`.  The witness does
    not depend on ``threads``.
    """
    engine = _engine or _Engine(d)
    spent = _spent if _spent is not None else [0]
    threads = threads or _default_threads()
    if k < 1 or k > len(engine.items):
        return None
    candidates = _candidates(d, engine, k, require_pod_seed)
    n_forced = len(_forced(d, engine.items))
    n_sets = math.comb(len(engine.items) - n_forced, max(k - n_forced, 0))

    if threads <= 1 or n_sets < PARALLEL_MIN:
        for combo in candidates:
            if budget is not None and spent[0] >= budget:
                raise BudgetExceeded(spent[0], k)
            spent[0] += 1
            if engine.colors_all(combo):
                return tuple(engine.items[i] for i in combo)
        return None

    chunk_size = 512
    with ProcessPoolExecutor(threads, initializer=_init_worker, initargs=(engine,)) as pool:
        while True:
            wave = []
            for _ in range(threads * 4):
                chunk = list(islice(candidates, chunk_size))
                if not chunk:
                    break
                wave.append(chunk)
            if not wave:
                return None
            size = sum(map(len, wave))
            if budget is not None and spent[0] + size > budget:
                raise BudgetExceeded(spent[0], k)
            spent[0] += size
            # earlier chunks come first in enumeration order, so the first hit
            # in wave order is the global minimum
            for chunk, hit in zip(wave, pool.map(_scan_chunk, wave)):
                if hit is not None:
                    return tuple(engine.items[i] for i in chunk[hit])


@dataclass
class WirtingerResult:
    omega: int
    witness: tuple[SeedItem, ...]
    final_state: ColoringState
    fully_colored: bool
    multicolored_crossings: list[int]
    non_seed_pods: int
    degenerate_minima: int
    tau2: int

    def to_json(self) -> dict:
        return {
            "omega": self.omega,
            "witness": [str(it) for it in self.witness],
            "fully_colored": self.fully_colored,
            "multicolored_crossings": self.multicolored_crossings,
            "non_seed_pods": self.non_seed_pods,
            "degenerate_minima": self.degenerate_minima,
            "tau2": self.tau2,
            "stage": self.final_state.stage,
            "color": self.final_state.color,
        }


def _multicolored(d: Diagram, state: ColoringState) -> list[int]:
    return [
        c.label
        for c in d.crossings
        if state.color[c.under_in] is not None
        and state.color[c.under_out] is not None
        and state.color[c.under_in] != state.color[c.under_out]
    ]


def result_for(d: Diagram, witness: Iterable[SeedItem]) -> WirtingerResult:
    """Assemble the result record for a given (complete) seed set."""
    witness = tuple(sorted(witness, key=_item_key))
    state = propagate(d, witness)
    multi = _multicolored(d, state)
    seeded = {it.vertex for it in witness if isinstance(it, Pod)}
    non_seed = len(d.vertices) - len(seeded)
    degenerate = 0
    if state.complete:
        classes = _classify(d, state)
        profile = _profile(d, state, witness, classes)
        degenerate = profile.flat_minima + sum(1 for v in classes.values() if v == MINIMUM_SAME)
    return WirtingerResult(
        omega=len(witness),
        witness=witness,
        final_state=state,
        fully_colored=state.complete,
        multicolored_crossings=multi,
        non_seed_pods=non_seed,
        degenerate_minima=degenerate,
        tau2=len(multi) + non_seed + degenerate,
    )


def wirtinger_number(
    d: Diagram,
    max_k: int | None = None,
    require_pod_seed: bool = False,
    budget: int | None = None,
    threads: int | None = None,
) -> WirtingerResult:
    """Smallest k admitting a complete seed set, with the canonical witness."""
    engine = _Engine(d)
    total = len(engine.items)
    max_k = total if max_k is None else max_k
    if max_k < 1:
        raise ValueError("max_k must be positive")
    spent = [0]
    start = max(1, len(_forced(d, engine.items)))
    for k in range(start, min(max_k, total) + 1):
        log.debug("trying k=%d", k)
        witness = is_k_colorable(d, k, require_pod_seed, budget, threads, engine, spent)
        if witness is not None:
            return result_for(d, witness)
    raise NotFoundWithinBound(f"no complete seed set with at most {max_k} items")


# --------------------------------------------------------------------------
# certificates


def _classify(d: Diagram, state: ColoringState) -> dict[int, str]:
    height = [-st for st in state.stage]
    out = {}
    for c in d.crossings:
        if state.color[c.under_in] != state.color[c.under_out]:
            out[c.label] = MINIMUM_MULTI
        elif height[c.over] > min(height[c.under_in], height[c.under_out]):
            out[c.label] = MONOTONE
        else:
            out[c.label] = MINIMUM_SAME
    return out


@dataclass
class _Profile:
    flat_minima: int
    peaks: int


_UP = float("inf")
_DOWN = float("-inf")


def _runs(values: list[float]) -> list[float]:
    out: list[float] = []
    for v in values:
        if not out or out[-1] != v:
            out.append(v)
    return out


def _profile(d: Diagram, state: ColoringState, witness, classes: dict[int, str]) -> _Profile:
    """Count flat local minima and peaks of the lifted height profile.

    Each strand lifts to a level arc at height ``-stage``.  Crossings of a
    minimum class become a dip (a V between the two levels); monotone
    crossings join levels directly.  A seed pod's vertex sits above
    everything, a non-seed pod's vertex below everything.  Flat minima are
    level runs lower than both neighbours, which happens only when a single
    color closes up a whole loop.
    """
    seeded = {it.vertex for it in witness if isinstance(it, Pod)}
    height = [-st for st in state.stage]
    by_path: dict[int, list] = {}
    for s in d.strands:
        by_path.setdefault(s.path, []).append(s)
    flat = peaks = 0
    for pi, strands in by_path.items():
        path = d.paths[pi]
        seq: list[float] = []
        for i, s in enumerate(strands):
            seq.append(height[s.id])
            last = s.passages[-1] if s.passages else 0
            closing = i + 1 < len(strands) or path.closed
            if closing and last < 0 and classes[-last] != MONOTONE:
                seq.append(_DOWN)  # dip: counted through the crossing class
        if path.closed:
            runs = _runs(seq)
            if len(runs) > 1 and runs[0] == runs[-1]:
                runs.pop()
            if len(runs) == 1:
                flat += 1
                peaks += 1
                continue
            m = len(runs)
            for i, v in enumerate(runs):
                if v == _DOWN:
                    continue
                left, right = runs[i - 1], runs[(i + 1) % m]
                flat += left > v and right > v
                peaks += left < v and right < v
        else:
            head = _UP if path.start in seeded else _DOWN
            tail = _UP if path.end in seeded else _DOWN
            runs = _runs([head, *seq, tail])
            for i in range(1, len(runs) - 1):
                v = runs[i]
                if v == _DOWN:
                    continue
                flat += runs[i - 1] > v and runs[i + 1] > v
                peaks += runs[i - 1] < v and runs[i + 1] < v
    return _Profile(flat, peaks)


@dataclass
class TangleReport:
    tau1: int
    tau2: int
    degrees: list[int]
    euler_characteristic: int

    def to_json(self) -> dict:
        return {
            "tau1": self.tau1,
            "tau2": self.tau2,
            "degrees": self.degrees,
            "euler_characteristic": self.euler_characteristic,
        }


def tangle_report(d: Diagram, r: WirtingerResult) -> TangleReport:
    """Component counts of the two tangles, checked against the Euler identity.

    Closed curves count as graphs with Euler characteristic zero, so a link
    with Wirtinger number k must give a lower tangle of k arcs.
    """
    if not r.fully_colored:
        raise ValueError("tangle report needs a complete coloring")
    degs = [d.degrees[it.vertex] if isinstance(it, Pod) else 2 for it in r.witness]
    chi = d.euler_characteristic
    if chi != r.omega + r.tau2 - sum(degs):
        raise ConsistencyError(
            f"Euler identity fails: chi={chi}, tau1={r.omega}, tau2={r.tau2}, sum(d)={sum(degs)}"
        )
    return TangleReport(r.omega, r.tau2, degs, chi)


@dataclass
class EmbeddingCertificate:
    height: dict[int, int]
    crossing_class: dict[int, str]
    upper_pods: int
    maxima: int
    minima: int
    lower_pods: int
    flat_minima: int = 0

    def to_json(self) -> dict:
        return {
            "height": {str(k): v for k, v in self.height.items()},
            "crossing_class": {str(k): v for k, v in self.crossing_class.items()},
            "upper_pods": self.upper_pods,
            "maxima": self.maxima,
            "minima": self.minima,
            "lower_pods": self.lower_pods,
            "flat_minima": self.flat_minima,
        }


def embedding_certificate(d: Diagram, r: WirtingerResult) -> EmbeddingCertificate:
    """Heights and crossing classes realizing a bridge position with ``omega`` maxima.

    Raises :class:`LemmaViolation` if some color has more same-color minimum
    crossings than it has closed loops to account for them.
    """
    if not r.fully_colored:
        raise ValueError("certificate needs a complete coloring")
    state = r.final_state
    classes = _classify(d, state)
    profile = _profile(d, state, r.witness, classes)

    same_per_color: dict[int, int] = {}
    for c in d.crossings:
        if classes[c.label] == MINIMUM_SAME:
            col = state.color[c.under_in]
            same_per_color[col] = same_per_color.get(col, 0) + 1
    for col, count in same_per_color.items():
        item = r.witness[col]
        allowed = d.loops.get(item.vertex, 0) if isinstance(item, Pod) else 1
        if count > allowed:
            raise LemmaViolation(
                f"color of {item} has {count} same-color minimum crossings (allowed {allowed})"
            )

    upper = sum(1 for it in r.witness if isinstance(it, Pod))
    maxima = len(r.witness) - upper
    if profile.peaks != maxima:
        raise ConsistencyError(f"{profile.peaks} peaks in the lift but {maxima} arc seeds")
    dips = sum(1 for v in classes.values() if v != MONOTONE)
    return EmbeddingCertificate(
        height={s: -st for s, st in enumerate(state.stage)},
        crossing_class=classes,
        upper_pods=upper,
        maxima=maxima,
        minima=dips + profile.flat_minima,
        lower_pods=len(d.vertices) - upper,
        flat_minima=profile.flat_minima,
    )


def check_connectivity(d: Diagram, state: ColoringState, witness) -> bool:
    """Each color is one chain of strands (arc seed) or chains hanging off its pod."""
    adj: dict[int, set[int]] = {s.id: set() for s in d.strands}
    for c in d.crossings:
        adj[c.under_in].add(c.under_out)
        adj[c.under_out].add(c.under_in)
    classes: dict[int, set[int]] = {}
    for s, col in enumerate(state.color):
        if col is not None:
            classes.setdefault(col, set()).add(s)
    for col, members in classes.items():
        item = witness[col]
        anchors = set(_members(d, item)) & members
        seen = set(anchors)
        stack = list(anchors)
        while stack:
            s = stack.pop()
            for t in adj[s] & members:
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        if seen != members:
            return False
    return True
