"""Simulation of the constrained walker chain and its graph-walk twin.

Two equivalent representations are exposed.  The walker representation
carries the K+1 integer heights with every coordinate forced to move by
+-1 at each step; the graph representation carries only the shape (the
word of height differences) together with the running height of the lead
walker, advanced by the uniform walk on the shape multigraph.  Their
transition kernels over (shape, height increment) outcomes are identical,
which is what :func:`transition_kernel` lets tests check exactly.

The Monte Carlo estimator targets the per-step variance of the lead
walker's displacement; simulations start from the degree-proportional
stationary shape law so small-step moments have exact reference values.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .errors import CapacityError, DimensionError
from .fields import EXACT, EdgeField, Potential, divergence, gradient, step_field
from .graph import Shape, ShapeGraph, build_graph

#: Trials per RNG stream: reproducibility is per block of this size, so a
#: given trial's randomness does not depend on the total trial count.
STREAM_BLOCK = 1024

#: Uniform draws requested from a stream at a time (fixed so that results
#: do not depend on internal chunking).
_DRAW_CHUNK = 4096

#: Largest K for which the (shape, increment) kernel is materialized.
KERNEL_MAX_K = 6


@dataclass(frozen=True)
class WalkerState:
    """Heights of the K+1 walkers; consecutive heights differ by one."""

    heights: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.heights) < 2:
            raise DimensionError("a chain needs at least two walkers")
        for i in range(len(self.heights) - 1):
            if abs(self.heights[i + 1] - self.heights[i]) != 1:
                raise ValueError(
                    f"walkers {i + 1} and {i + 2} are not at distance one: "
                    f"{self.heights[i]} vs {self.heights[i + 1]}"
                )

    @property
    def k(self) -> int:
        return len(self.heights) - 1

    def shifted(self, constant: int) -> "WalkerState":
        return WalkerState(tuple(h + constant for h in self.heights))


@dataclass(frozen=True)
class GraphWalkState:
    """Current shape plus the accumulated height of the lead walker."""

    shape: Shape
    height: int


def shape_of(z: WalkerState) -> Shape:
    """The word of consecutive height differences; translation-invariant."""
    h = z.heights
    return Shape.from_entries(tuple(h[i + 1] - h[i] for i in range(len(h) - 1)))


def walker_from_shape(shape: Shape, lead_height: int = 0) -> WalkerState:
    """The walker configuration with the given shape and lead height."""
    heights = [lead_height]
    for d in shape.entries:
        heights.append(heights[-1] + d)
    return WalkerState(tuple(heights))


def walker_successors(z: WalkerState) -> tuple[WalkerState, ...]:
    """All states reachable in one step, by brute-force enumeration.

    Every coordinate moves by +-1 simultaneously; a candidate survives iff
    it still is a valid chain.  Exponential in K; meant as the independent
    reference for :func:`chain_step` and the walker kernel.
    """
    n = len(z.heights)
    out = []
    for bits in range(1 << n):
        cand = tuple(
            h + (1 if (bits >> i) & 1 else -1) for i, h in enumerate(z.heights)
        )
        if all(abs(cand[i + 1] - cand[i]) == 1 for i in range(n - 1)):
            out.append(WalkerState(cand))
    return tuple(out)


def chain_step(g: ShapeGraph, z: WalkerState, rng: np.random.Generator) -> WalkerState:
    """Advance the walker chain one step, uniformly over its successors.

    Successors are enumerated through the shape graph's adjacency (one per
    outgoing edge of the current shape) instead of scanning all 2^(K+1)
    coordinate moves.
    """
    edges = g.neighbors(shape_of(z))
    e = edges[int(rng.integers(len(edges)))]
    return walker_from_shape(e.head, z.heights[0] + e.step)


def graph_walk_step(
    g: ShapeGraph, s: GraphWalkState, rng: np.random.Generator
) -> GraphWalkState:
    """Advance the uniform walk on the shape graph by one edge."""
    edges = g.neighbors(s.shape)
    e = edges[int(rng.integers(len(edges)))]
    return GraphWalkState(e.head, s.height + e.step)


def stationary_distribution(g: ShapeGraph) -> tuple[Fraction, ...]:
    """The degree-proportional shape law, exactly.

    Invariant for the shape marginal of either representation; under it
    the law of a traversed edge is uniform over all directed edges.
    """
    total = g.total_directed_edges
    return tuple(Fraction(len(g.neighbors(a)), total) for a in g.vertices)


# -- exact transition kernels -------------------------------------------------

KernelRow = dict[tuple[Shape, int], Fraction]
Kernel = dict[Shape, KernelRow]


def transition_kernel(
    k: int, representation: str, *, graph: Optional[ShapeGraph] = None
) -> Kernel:
    """The exact one-step law over (next shape, lead-height increment).

    Rows are indexed by the current shape; entries are rationals and each
    row sums to one.  The ``walker`` kernel is built from brute-force
    successor enumeration, the ``graph`` kernel from adjacency, so their
    equality is a genuine two-route check.
    """
    if representation not in ("walker", "graph"):
        raise ValueError(f"unknown representation {representation!r}")
    if k > KERNEL_MAX_K:
        raise CapacityError(f"kernel materialization capped at k={KERNEL_MAX_K}")
    g = graph if graph is not None else build_graph(k)
    kernel: Kernel = {}
    for a in g.vertices:
        row: KernelRow = {}
        if representation == "graph":
            edges = g.neighbors(a)
            p = Fraction(1, len(edges))
            for e in edges:
                key = (e.head, e.step)
                row[key] = row.get(key, Fraction(0)) + p
        else:
            z = walker_from_shape(a)
            successors = walker_successors(z)
            p = Fraction(1, len(successors))
            for z2 in successors:
                key = (shape_of(z2), z2.heights[0] - z.heights[0])
                row[key] = row.get(key, Fraction(0)) + p
        kernel[a] = row
    return kernel


def martingale_residuals(g: ShapeGraph, f: Potential) -> Potential:
    """Per shape, the mean compensated increment over outgoing edges.

    The compensated increment along an edge is the step minus the change of
    ``f``; averaging over the full out-star (loops included) gives the
    divergence of the compensated field divided by the degree, which
    vanishes identically exactly when ``f`` is the decomposition potential
    of the step field.  Adding a constant to ``f`` changes nothing.
    """
    A = step_field(g, f.mode)
    div = divergence(A - gradient(f))
    values = tuple(
        v / len(g.neighbors(a)) for v, a in zip(div.values, g.vertices)
    )
    return Potential(g, values, f.mode, f.tol)


# -- Monte Carlo --------------------------------------------------------------


@dataclass(frozen=True)
class SimEstimate:
    """Monte Carlo estimate of the per-step displacement variance.

    ``point_estimate`` is the mean squared total displacement over trials
    divided by the number of steps (the displacement has exact mean zero
    under the stationary start); ``std_error`` comes from the sample
    fourth moment.  Deterministic given (k, steps, trials, seed).
    """

    k: int
    steps_per_trial: int
    trials: int
    point_estimate: float
    std_error: float
    seed: int
    elapsed: float


class _SimTables:
    """Padded adjacency tables for vectorized stepping."""

    __slots__ = ("deg", "heads", "steps", "start_cdf")

    def __init__(self, g: ShapeGraph):
        n = len(g.vertices)
        degrees = [len(g.neighbors(a)) for a in g.vertices]
        maxdeg = max(degrees)
        self.deg = np.array(degrees, dtype=np.int64)
        self.heads = np.zeros((n, maxdeg), dtype=np.int32)
        self.steps = np.zeros((n, maxdeg), dtype=np.int8)
        for vi, a in enumerate(g.vertices):
            for j, e in enumerate(g.neighbors(a)):
                self.heads[vi, j] = g.index_of(e.head)
                self.steps[vi, j] = e.step
        cdf = np.cumsum(self.deg.astype(np.float64))
        cdf /= cdf[-1]
        cdf[-1] = 1.0
        self.start_cdf = cdf


def _advance(
    tables: _SimTables,
    state: np.ndarray,
    height: np.ndarray,
    uniforms: np.ndarray,
) -> np.ndarray:
    """One synchronous step for a vector of walks; returns the new states."""
    d = tables.deg[state]
    idx = (uniforms * d).astype(np.int64)
    np.minimum(idx, d - 1, out=idx)  # guard the measure-zero rounding edge
    height += tables.steps[state, idx]
    return tables.heads[state, idx]


def estimate_sigma2(
    k: int,
    steps: int,
    trials: int,
    seed: int,
    *,
    graph: Optional[ShapeGraph] = None,
) -> SimEstimate:
    """Estimate the per-step variance of the lead walker's displacement.

    Runs ``trials`` independent walks of ``steps`` steps from the
    stationary shape law and averages the squared total displacement.
    Trials are grouped into fixed blocks of :data:`STREAM_BLOCK`, each
    driven by its own RNG stream spawned from the master seed, so results
    are reproducible and blocks could run in parallel.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if trials < 2:
        raise ValueError("trials must be >= 2")
    g = graph if graph is not None else build_graph(k)
    tables = _SimTables(g)
    t0 = time.perf_counter()

    totals = np.empty(trials, dtype=np.float64)
    n_blocks = (trials + STREAM_BLOCK - 1) // STREAM_BLOCK
    children = np.random.SeedSequence(seed).spawn(n_blocks)
    for b in range(n_blocks):
        lo = b * STREAM_BLOCK
        width = min(trials - lo, STREAM_BLOCK)
        rng = np.random.Generator(np.random.PCG64(children[b]))
        # Full-block draws keep trial streams independent of the totals.
        u0 = rng.random(STREAM_BLOCK)[:width]
        state = np.searchsorted(tables.start_cdf, u0, side="right").astype(np.int64)
        height = np.zeros(width, dtype=np.int64)
        done = 0
        while done < steps:
            chunk = rng.random((STREAM_BLOCK, _DRAW_CHUNK))
            use = min(_DRAW_CHUNK, steps - done)
            for j in range(use):
                state = _advance(tables, state, height, chunk[:width, j])
            done += use
        totals[lo : lo + width] = height

    sq = totals * totals
    m2 = float(sq.mean())
    m4 = float((sq * sq).mean())
    point = m2 / steps
    std_error = (max(m4 - m2 * m2, 0.0) / trials) ** 0.5 / steps
    return SimEstimate(
        k=k,
        steps_per_trial=steps,
        trials=trials,
        point_estimate=point,
        std_error=std_error,
        seed=seed,
        elapsed=time.perf_counter() - t0,
    )


# -- trajectories --------------------------------------------------------------


@dataclass(frozen=True)
class Trajectory:
    """A full (shape, height) record, one entry per visited state."""

    k: int
    representation: str
    seed: int
    shapes: tuple[Shape, ...]
    heights: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.shapes)


def simulate_trajectory(
    k: int,
    steps: int,
    seed: int,
    representation: str = "graph",
    *,
    graph: Optional[ShapeGraph] = None,
    start: Union[WalkerState, GraphWalkState, None] = None,
) -> Trajectory:
    """Emit the full state sequence of one simulated walk.

    With no explicit ``start``, the initial shape is drawn from the
    stationary law and the height starts at zero.  Output is a
    deterministic function of the arguments.  The two representations
    agree in law but not path-for-path under a common seed (they consume
    randomness against differently ordered outcome spaces).
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    if representation not in ("walker", "graph"):
        raise ValueError(f"unknown representation {representation!r}")
    g = graph if graph is not None else build_graph(k)
    tables = _SimTables(g)
    rng = np.random.default_rng(seed)

    if start is None:
        vi = int(np.searchsorted(tables.start_cdf, rng.random(), side="right"))
        initial_shape, initial_height = g.vertices[vi], 0
    elif representation == "walker":
        if not isinstance(start, WalkerState):
            raise TypeError("walker trajectories start from a WalkerState")
        initial_shape, initial_height = shape_of(start), start.heights[0]
    else:
        if not isinstance(start, GraphWalkState):
            raise TypeError("graph trajectories start from a GraphWalkState")
        initial_shape, initial_height = start.shape, start.height

    shapes = [initial_shape]
    heights = [initial_height]
    if representation == "graph":
        s = GraphWalkState(initial_shape, initial_height)
        for _ in range(steps):
            s = graph_walk_step(g, s, rng)
            shapes.append(s.shape)
            heights.append(s.height)
    else:
        z = walker_from_shape(initial_shape, initial_height)
        for _ in range(steps):
            z = chain_step(g, z, rng)
            shapes.append(shape_of(z))
            heights.append(z.heights[0])
    return Trajectory(k, representation, seed, tuple(shapes), tuple(heights))


def trajectory_csv(trajectory: Trajectory) -> str:
    """CSV rendering: ``step,height,shape`` with shapes as sign strings."""
    lines = ["step,height,shape"]
    for i, (h, s) in enumerate(zip(trajectory.heights, trajectory.shapes)):
        lines.append(f"{i},{h},{s.to_string()}")
    return "\n".join(lines) + "\n"


def estimate_to_json_dict(est: SimEstimate, *, include_elapsed: bool = False) -> dict:
    """JSON-ready record of an estimate.

    The elapsed time is excluded by default so that identical
    configurations yield byte-identical documents.
    """
    doc = {
        "k": est.k,
        "steps_per_trial": est.steps_per_trial,
        "trials": est.trials,
        "point_estimate": est.point_estimate,
        "std_error": est.std_error,
        "seed": est.seed,
    }
    if include_elapsed:
        doc["elapsed_seconds"] = est.elapsed
    return doc
