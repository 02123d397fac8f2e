"""Shape multigraph of a chain of height-constrained walkers.

A chain of K+1 walkers on the integer line, each forced to sit at distance
one from the next, is described up to translation by the word of its K
successive height differences, an element of {-1,+1}^K.  One synchronous
move of all walkers acts on that word: the reachable words differ from the
current one on a set of positions whose digits alternate in sign, and the
digit at the first changed position tells whether the lead walker moved up
(+1) or down (-1).  Staying on the same word is possible in two ways (all
walkers up, all walkers down), so every vertex carries one loop of each
sign.

This module materializes the resulting signed multigraph: vertex
enumeration, edge classification, deterministic adjacency, digit-change
degree profiles, and an inductive builder that grows level K+1 out of
level K.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

from .errors import CapacityError, DimensionError

#: Largest chain length built without an explicit override.  Edge count
#: grows like 2*3^K, so K=14 already means ~9.6M edge records.
DEFAULT_MAX_K = 14

#: Absolute cap; beyond this the graph cannot reasonably be materialized.
HARD_MAX_K = 20


@dataclass(frozen=True, slots=True)
class Shape:
    """A relative configuration of the chain: a word in {-1,+1}^K.

    Stored as a bitmask (bit i-1 set  <=>  digit i equals +1).  The mask is
    an internal detail; all constructors and accessors speak explicit +-1
    entries, and serialized forms never expose the bit convention.
    """

    k: int
    mask: int

    def __post_init__(self) -> None:
        if self.k < 1:
            raise DimensionError(f"word length must be >= 1, got {self.k}")
        if not 0 <= self.mask < (1 << self.k):
            raise ValueError(f"mask {self.mask:#x} out of range for k={self.k}")

    @classmethod
    def from_entries(cls, entries: Sequence[int]) -> "Shape":
        """Build a shape from an explicit sequence of +-1 digits."""
        entries = tuple(entries)
        if not entries:
            raise DimensionError("a shape needs at least one digit")
        mask = 0
        for i, digit in enumerate(entries):
            if digit == 1:
                mask |= 1 << i
            elif digit != -1:
                raise ValueError(f"digit {i + 1} is {digit!r}, expected -1 or +1")
        return cls(len(entries), mask)

    @classmethod
    def from_string(cls, text: str) -> "Shape":
        """Parse a compact sign string such as ``'+--+'``."""
        try:
            return cls.from_entries(tuple({"+": 1, "-": -1}[c] for c in text))
        except KeyError as exc:
            raise ValueError(f"invalid shape character {exc.args[0]!r}") from None

    @property
    def entries(self) -> tuple[int, ...]:
        return tuple(1 if (self.mask >> i) & 1 else -1 for i in range(self.k))

    def to_string(self) -> str:
        return "".join("+" if (self.mask >> i) & 1 else "-" for i in range(self.k))

    def flip(self, positions: Iterable[int]) -> "Shape":
        """Return the shape with the digits at the given 0-based positions negated."""
        mask = self.mask
        for p in positions:
            mask ^= 1 << p
        return Shape(self.k, mask)

    def prepend(self, digit: int) -> "Shape":
        """Return the (K+1)-digit shape obtained by writing ``digit`` in front."""
        if digit not in (-1, 1):
            raise ValueError(f"digit must be -1 or +1, got {digit!r}")
        return Shape(self.k + 1, (self.mask << 1) | (1 if digit == 1 else 0))

    def __str__(self) -> str:
        return self.to_string()


@dataclass(frozen=True, slots=True)
class SignedEdge:
    """One directed edge of the multigraph.

    ``step`` is the height increment of the lead walker along the edge:
    +1 on positive edges and loops, -1 on negative ones.  Loops are the
    edges with ``tail == head``; each vertex has exactly one of each sign.
    """

    tail: Shape
    head: Shape
    step: int

    @property
    def is_loop(self) -> bool:
        return self.tail == self.head

    @property
    def flipped_digits(self) -> int:
        """Number of digit positions on which tail and head differ."""
        return (self.tail.mask ^ self.head.mask).bit_count()

    def reverse(self) -> "SignedEdge":
        """The companion edge traversed the other way (opposite sign)."""
        return SignedEdge(self.head, self.tail, -self.step)


def edge_sign(a: Shape, b: Shape) -> Optional[int]:
    """Classify the ordered pair (a, b) of distinct shapes as a move.

    Returns +1 when b - a has nonzero entries of alternating signs starting
    negative, -1 when it starts positive, and None when the pair is not an
    edge (no digit changes, or the changed digits fail to alternate).
    """
    if a.k != b.k:
        raise DimensionError(f"length mismatch: {a.k} vs {b.k}")
    changed = a.mask ^ b.mask
    if changed == 0:
        return None
    sign = None
    prev = 0
    for i in range(a.k):
        if not (changed >> i) & 1:
            continue
        digit = 1 if (a.mask >> i) & 1 else -1
        if sign is None:
            # b - a is -2*digit at the first changed position, so the edge
            # is positive exactly when that digit is +1.
            sign = digit
        elif digit == prev:
            return None
        prev = digit
    return sign


def _alternating_flip_sets(entries: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """All nonempty position sets i1 < i2 < ... whose digits alternate."""
    k = len(entries)
    stack = [((i,), entries[i]) for i in range(k - 1, -1, -1)]
    while stack:
        positions, last = stack.pop()
        yield positions
        for j in range(positions[-1] + 1, k):
            if entries[j] == -last:
                stack.append((positions + (j,), entries[j]))


class ShapeGraph:
    """The full signed multigraph on all 2^K shapes.

    Immutable once built: every query is read-only and safe to call from
    concurrent threads.  Vertices are kept in lexicographic order of their
    +-1 entries, and each adjacency list is ordered deterministically:
    positive loop, negative loop, then moves by lexicographic head.
    """

    __slots__ = (
        "k",
        "vertices",
        "_index",
        "_adj",
        "_crossings",
        "_canonical",
        "_canon_offsets",
        "_pos_heads",
    )

    def __init__(self, k: int, adjacency: Sequence[Sequence[SignedEdge]]):
        vertices = _lex_vertices(k)
        self.k = k
        self.vertices = vertices
        self._index = {s.mask: i for i, s in enumerate(vertices)}
        self._adj = tuple(tuple(edges) for edges in adjacency)
        self._crossings = sum(
            1
            for edges in self._adj
            for e in edges
            if e.step == 1
            and not e.is_loop
            and e.tail.entries[0] == 1
            and e.head.entries[0] == -1
        )
        self._canonical: Optional[tuple[SignedEdge, ...]] = None
        self._canon_offsets: Optional[list[int]] = None
        self._pos_heads: Optional[list[list[int]]] = None

    # -- basic queries ---------------------------------------------------

    def index_of(self, shape: Shape) -> int:
        if shape.k != self.k:
            raise DimensionError(f"shape has {shape.k} digits, graph has {self.k}")
        return self._index[shape.mask]

    def neighbors(self, a: Shape) -> tuple[SignedEdge, ...]:
        """Every edge with tail ``a``: both loops first, then moves by head."""
        return self._adj[self.index_of(a)]

    def degree(self, a: Shape) -> int:
        """Number of outgoing edges, both loops included."""
        return len(self.neighbors(a))

    @property
    def total_directed_edges(self) -> int:
        return sum(len(edges) for edges in self._adj)

    @property
    def crossing_count(self) -> int:
        """Positive non-loop edges whose first digit goes from +1 to -1."""
        return self._crossings

    @property
    def all_ones(self) -> Shape:
        return self.vertices[-1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ShapeGraph):
            return NotImplemented
        return self.k == other.k and self._adj == other._adj

    def __repr__(self) -> str:
        return f"ShapeGraph(k={self.k}, vertices={len(self.vertices)}, edges={self.total_directed_edges})"

    # -- canonical edge storage ------------------------------------------
    #
    # A field on the graph only ever stores values on the canonical edges:
    # the positive loop of each vertex plus each positive move.  Every
    # other edge is the reverse of exactly one canonical edge and carries
    # the negated value.

    def _ensure_canonical(self) -> None:
        if self._canonical is not None:
            return
        canonical: list[SignedEdge] = []
        offsets: list[int] = []
        pos_heads: list[list[int]] = []
        for edges in self._adj:
            offsets.append(len(canonical))
            canonical.append(edges[0])  # the positive loop
            heads = []
            for e in edges[2:]:
                if e.step == 1:
                    canonical.append(e)
                    heads.append(self._index[e.head.mask])
            pos_heads.append(heads)
        self._canonical = tuple(canonical)
        self._canon_offsets = offsets
        self._pos_heads = pos_heads

    @property
    def canonical_edges(self) -> tuple[SignedEdge, ...]:
        self._ensure_canonical()
        assert self._canonical is not None
        return self._canonical

    def canonical_location(self, edge: SignedEdge) -> tuple[int, int]:
        """Locate ``edge`` in canonical storage.

        Returns ``(index, orientation)`` where orientation is +1 if the
        edge is canonical itself and -1 if it is the reverse of the
        canonical edge at ``index``.
        """
        self._ensure_canonical()
        assert self._canon_offsets is not None and self._pos_heads is not None
        if edge.is_loop:
            v = self.index_of(edge.tail)
            return self._canon_offsets[v], edge.step
        if edge.step == 1:
            t, h, orient = self.index_of(edge.tail), self.index_of(edge.head), 1
        else:
            t, h, orient = self.index_of(edge.head), self.index_of(edge.tail), -1
        heads = self._pos_heads[t]
        lo = _bisect(heads, h)
        if lo is None:
            raise ValueError(f"{edge.tail}->{edge.head} is not an edge of this graph")
        return self._canon_offsets[t] + 1 + lo, orient


def _bisect(sorted_list: list[int], value: int) -> Optional[int]:
    lo, hi = 0, len(sorted_list)
    while lo < hi:
        mid = (lo + hi) // 2
        if sorted_list[mid] < value:
            lo = mid + 1
        else:
            hi = mid
    if lo < len(sorted_list) and sorted_list[lo] == value:
        return lo
    return None


def _lex_vertices(k: int) -> tuple[Shape, ...]:
    return tuple(sorted((Shape(k, m) for m in range(1 << k)), key=lambda s: s.entries))


def _check_capacity(k: int, max_k: int) -> None:
    if k < 1:
        raise CapacityError(f"chain length must be >= 1, got {k}")
    if k > HARD_MAX_K:
        raise CapacityError(f"k={k} exceeds the hard cap {HARD_MAX_K}")
    if k > max_k:
        raise CapacityError(
            f"k={k} exceeds the configured cap {max_k}; pass max_k explicitly to override"
        )


def build_graph(k: int, *, max_k: int = DEFAULT_MAX_K) -> ShapeGraph:
    """Materialize the level-K multigraph directly from the edge rule.

    Out-moves of a vertex are exactly the digit sets whose entries
    alternate in sign; the step of such a move is the digit at its first
    flipped position.
    """
    _check_capacity(k, max_k)
    adjacency = []
    for a in _lex_vertices(k):
        entries = a.entries
        moves = [
            SignedEdge(a, a.flip(flips), entries[flips[0]])
            for flips in _alternating_flip_sets(entries)
        ]
        moves.sort(key=lambda e: e.head.entries)
        adjacency.append([SignedEdge(a, a, 1), SignedEdge(a, a, -1)] + moves)
    return ShapeGraph(k, adjacency)


def build_graph_inductive(k: int, *, max_k: int = DEFAULT_MAX_K) -> ShapeGraph:
    """Materialize the level-K multigraph by the level-to-level recurrence.

    Each positive edge of level K yields two positive edges of level K+1
    (the same edge written on either facet) and each negative edge yields
    one positive crossing edge from the +1 facet to the -1 facet.  Loops
    participate: positive loops reproduce the loops one level up, negative
    loops yield the crossings that flip only the first digit.  The result
    is edge-for-edge identical to :func:`build_graph`.
    """
    _check_capacity(k, max_k)
    # Positive non-loop moves as (tail_mask, head_mask); level 1 has one.
    plus: set[tuple[int, int]] = {(1, 0)}
    for level in range(1, k):
        nxt: set[tuple[int, int]] = set()
        for t, h in plus:
            nxt.add(((t << 1) | 1, (h << 1) | 1))
            nxt.add((t << 1, h << 1))
            # (h, t) is a negative edge, so it crosses as (+1 h, -1 t).
            nxt.add(((h << 1) | 1, t << 1))
        for m in range(1 << level):
            # the negative loop at m crosses as (+1 m, -1 m)
            nxt.add(((m << 1) | 1, m << 1))
        plus = nxt

    out_moves: dict[int, list[tuple[int, int]]] = {m: [] for m in range(1 << k)}
    for t, h in plus:
        out_moves[t].append((h, 1))
        out_moves[h].append((t, -1))

    adjacency = []
    for a in _lex_vertices(k):
        moves = [SignedEdge(a, Shape(k, h), s) for h, s in out_moves[a.mask]]
        moves.sort(key=lambda e: e.head.entries)
        adjacency.append([SignedEdge(a, a, 1), SignedEdge(a, a, -1)] + moves)
    return ShapeGraph(k, adjacency)


@dataclass(frozen=True)
class DegreeProfile:
    """Outgoing edges of one vertex, grouped by sign and digit-change count.

    ``plus_by_flips[j]`` counts positive out-edges changing exactly j
    digits (the positive loop sits at j=0), and likewise for
    ``minus_by_flips``.  Even aggregates include the loops.
    """

    plus_by_flips: tuple[int, ...]
    minus_by_flips: tuple[int, ...]

    @property
    def plus_total(self) -> int:
        return sum(self.plus_by_flips)

    @property
    def minus_total(self) -> int:
        return sum(self.minus_by_flips)

    @property
    def plus_even(self) -> int:
        return sum(self.plus_by_flips[::2])

    @property
    def plus_odd(self) -> int:
        return sum(self.plus_by_flips[1::2])

    @property
    def minus_even(self) -> int:
        return sum(self.minus_by_flips[::2])

    @property
    def minus_odd(self) -> int:
        return sum(self.minus_by_flips[1::2])


def degree_profile(g: ShapeGraph, a: Shape) -> DegreeProfile:
    """Count the outgoing edges of ``a`` by sign and digit-change count."""
    plus = [0] * (g.k + 1)
    minus = [0] * (g.k + 1)
    for e in g.neighbors(a):
        if e.step == 1:
            plus[e.flipped_digits] += 1
        else:
            minus[e.flipped_digits] += 1
    return DegreeProfile(tuple(plus), tuple(minus))


def graph_to_json_dict(g: ShapeGraph) -> dict:
    """The graph as a JSON-ready document, in deterministic order."""
    edges = []
    for a in g.vertices:
        for e in g.neighbors(a):
            edges.append(
                {
                    "tail": list(e.tail.entries),
                    "head": list(e.head.entries),
                    "a": e.step,
                    "loop": e.is_loop,
                }
            )
    return {
        "k": g.k,
        "vertices": [list(s.entries) for s in g.vertices],
        "edges": edges,
        "d_k": g.total_directed_edges,
        "delta_k": g.crossing_count,
    }
