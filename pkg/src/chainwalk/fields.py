"""Vector-field calculus on the shape multigraph.

An edge field assigns a number to every directed edge, antisymmetrically:
reversing a move negates the value, and the two loops of a vertex carry
opposite values.  Only one representative per pair is stored (the positive
loop and the positive moves); everything else is implied.

The central objects are the signed step field (+1 on positive edges, -1 on
negative ones, so that its running sum along a walk is the height of the
lead walker), its splitting into a gradient part and a divergence-free
part, and the exact diffusivity that splitting yields.  Two numeric modes
are supported: ``exact`` (rationals, no rounding anywhere) and ``float``
(IEEE doubles with an iterative solve).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np
from scipy.sparse import csr_matrix

from .errors import CapacityError, FieldMismatchError, SolverError
from .graph import DEFAULT_MAX_K, Shape, ShapeGraph, SignedEdge, build_graph

try:  # pragma: no cover - exercised implicitly when gmpy2 is present
    from gmpy2 import mpq as _rat  # much faster rational core for the solver
except ImportError:  # pragma: no cover
    _rat = Fraction

Scalar = Union[Fraction, float]

EXACT = "exact"
FLOAT = "float"

#: Equality tolerance used by float-mode comparisons.
DEFAULT_TOLERANCE = 1e-10

#: Exact elimination beyond this order is possible but slow; callers must
#: raise the cap explicitly to go further.
DEFAULT_MAX_EXACT_K = 8


def _check_mode(mode: str) -> None:
    if mode not in (EXACT, FLOAT):
        raise ValueError(f"mode must be {EXACT!r} or {FLOAT!r}, got {mode!r}")


def _zero(mode: str) -> Scalar:
    return Fraction(0) if mode == EXACT else 0.0


def _compatible(x: "EdgeField | Potential", y: "EdgeField | Potential") -> None:
    if x.graph.k != y.graph.k:
        raise FieldMismatchError(f"graphs differ: k={x.graph.k} vs k={y.graph.k}")
    if x.mode != y.mode:
        raise FieldMismatchError(f"modes differ: {x.mode} vs {y.mode}")


@dataclass(frozen=True, eq=False)
class Potential:
    """A number per vertex (values aligned with ``graph.vertices``)."""

    graph: ShapeGraph
    values: tuple[Scalar, ...]
    mode: str = EXACT
    tol: float = DEFAULT_TOLERANCE

    def __post_init__(self) -> None:
        _check_mode(self.mode)
        if len(self.values) != len(self.graph.vertices):
            raise ValueError("one value per vertex required")

    @classmethod
    def from_callable(
        cls,
        g: ShapeGraph,
        fn: Callable[[Shape], Scalar],
        mode: str = EXACT,
        tol: float = DEFAULT_TOLERANCE,
    ) -> "Potential":
        return cls(g, tuple(fn(s) for s in g.vertices), mode, tol)

    def __call__(self, shape: Shape) -> Scalar:
        return self.values[self.graph.index_of(shape)]

    def shifted(self, constant: Scalar) -> "Potential":
        return Potential(self.graph, tuple(v + constant for v in self.values), self.mode, self.tol)

    def as_float(self) -> "Potential":
        if self.mode == FLOAT:
            return self
        return Potential(self.graph, tuple(float(v) for v in self.values), FLOAT, self.tol)


@dataclass(frozen=True, eq=False)
class EdgeField:
    """An antisymmetric function on edges, stored on canonical edges only.

    ``values[i]`` belongs to ``graph.canonical_edges[i]``; the value of any
    other edge is the negation of its canonical partner, which makes
    antisymmetry (and the opposite-loops convention) a property of the
    representation rather than a runtime obligation.
    """

    graph: ShapeGraph
    values: tuple[Scalar, ...]
    mode: str = EXACT
    tol: float = DEFAULT_TOLERANCE

    def __post_init__(self) -> None:
        _check_mode(self.mode)
        if len(self.values) != len(self.graph.canonical_edges):
            raise ValueError("one value per canonical edge required")

    @classmethod
    def from_callable(
        cls,
        g: ShapeGraph,
        fn: Callable[[SignedEdge], Scalar],
        mode: str = EXACT,
        tol: float = DEFAULT_TOLERANCE,
    ) -> "EdgeField":
        return cls(g, tuple(fn(e) for e in g.canonical_edges), mode, tol)

    def value(self, edge: SignedEdge) -> Scalar:
        index, orientation = self.graph.canonical_location(edge)
        v = self.values[index]
        return v if orientation == 1 else -v

    def __neg__(self) -> "EdgeField":
        return EdgeField(self.graph, tuple(-v for v in self.values), self.mode, self.tol)

    def __add__(self, other: "EdgeField") -> "EdgeField":
        _compatible(self, other)
        vals = tuple(a + b for a, b in zip(self.values, other.values))
        return EdgeField(self.graph, vals, self.mode, self.tol)

    def __sub__(self, other: "EdgeField") -> "EdgeField":
        _compatible(self, other)
        vals = tuple(a - b for a, b in zip(self.values, other.values))
        return EdgeField(self.graph, vals, self.mode, self.tol)

    def scaled(self, factor: Scalar) -> "EdgeField":
        return EdgeField(self.graph, tuple(factor * v for v in self.values), self.mode, self.tol)

    def as_float(self) -> "EdgeField":
        if self.mode == FLOAT:
            return self
        return EdgeField(self.graph, tuple(float(v) for v in self.values), FLOAT, self.tol)


# -- first-order operators -------------------------------------------------


def step_field(g: ShapeGraph, mode: str = EXACT) -> EdgeField:
    """The +-1 field whose running sum along a walk is the lead walker's height.

    Every canonical edge carries +1 (so negative edges carry the implied
    -1), and its norm is exactly 1 under the uniform edge inner product.
    """
    one = Fraction(1) if mode == EXACT else 1.0
    return EdgeField(g, (one,) * len(g.canonical_edges), mode)


def gradient(f: Potential) -> EdgeField:
    """The edge field ``(a, b) -> f(b) - f(a)``; zero on loops."""
    g = f.graph
    fv = f.values
    zero = _zero(f.mode)
    vals = []
    for e in g.canonical_edges:
        if e.is_loop:
            vals.append(zero)
        else:
            vals.append(fv[g.index_of(e.head)] - fv[g.index_of(e.tail)])
    return EdgeField(g, tuple(vals), f.mode, f.tol)


def divergence(S: EdgeField) -> Potential:
    """Per vertex, the sum of ``S`` over all outgoing edges.

    The two loops always cancel by the opposite-loops convention, so only
    moves contribute.
    """
    g = S.graph
    out = [_zero(S.mode)] * len(g.vertices)
    for e, v in zip(g.canonical_edges, S.values):
        if e.is_loop:
            continue
        t = g.index_of(e.tail)
        h = g.index_of(e.head)
        out[t] += v
        out[h] -= v
    return Potential(g, tuple(out), S.mode, S.tol)


def inner_product(S: EdgeField, T: EdgeField) -> Scalar:
    """Uniform inner product over all directed edges, loops included.

    Each canonical edge and its reverse contribute the same product, hence
    the factor 2 over canonical storage.
    """
    _compatible(S, T)
    d_k = S.graph.total_directed_edges
    if S.mode == EXACT:
        return Fraction(2, d_k) * sum(a * b for a, b in zip(S.values, T.values))
    return 2.0 / d_k * math.fsum(a * b for a, b in zip(S.values, T.values))


def flux(S: EdgeField, sources: Iterable[Shape], targets: Iterable[Shape]) -> Scalar:
    """Sum of ``S`` over the edges leading from ``sources`` into ``targets``.

    The two vertex sets must be disjoint (so loops never participate).
    """
    src = set(sources)
    tgt = set(targets)
    if src & tgt:
        raise ValueError("flux requires disjoint vertex sets")
    total = _zero(S.mode)
    g = S.graph
    for a in src:
        for e in g.neighbors(a):
            if not e.is_loop and e.head in tgt:
                total += S.value(e)
    return total


def is_stationary(S: EdgeField) -> bool:
    """True when the value of every move depends only on its displacement.

    The displacement of a move is the entrywise difference head - tail;
    loops are excluded (a constant-per-sign-class convention holds for them
    by construction).
    """
    seen: dict[tuple[int, int], Scalar] = {}
    exact = S.mode == EXACT
    for e, v in zip(S.graph.canonical_edges, S.values):
        if e.is_loop:
            continue
        changed = e.tail.mask ^ e.head.mask
        key = (changed, e.tail.mask & changed)
        if key not in seen:
            seen[key] = v
        elif exact:
            if seen[key] != v:
                return False
        elif abs(seen[key] - v) > S.tol:
            return False
    return True


# -- linear solvers ----------------------------------------------------------


def _exact_gaussian_solve(aug: list[list]) -> list:
    """Solve a square augmented system in place over exact rationals."""
    n = len(aug)
    for col in range(n):
        pivot_row = None
        for r in range(col, n):
            if aug[r][col]:
                pivot_row = r
                break
        if pivot_row is None:
            raise SolverError(f"singular system at column {col}")
        aug[col], aug[pivot_row] = aug[pivot_row], aug[col]
        prow = aug[col]
        pivot = prow[col]
        for r in range(col + 1, n):
            factor = aug[r][col]
            if not factor:
                continue
            factor = factor / pivot
            row = aug[r]
            for c in range(col, n + 1):
                if prow[c]:
                    row[c] -= factor * prow[c]
    solution = [None] * n
    for r in range(n - 1, -1, -1):
        acc = aug[r][n]
        row = aug[r]
        for c in range(r + 1, n):
            if row[c]:
                acc -= row[c] * solution[c]
        solution[r] = acc / row[r]
    return solution


def _solve_poisson_exact(g: ShapeGraph, rhs: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Exact solution f of  div(grad f) = rhs  with f(all-ones) = 0.

    Assembles the vertex equations and replaces the (redundant) row of the
    all-ones vertex by the gauge condition, then eliminates over rationals.
    """
    n = len(g.vertices)
    gauge = n - 1  # all-ones is last in lexicographic order
    zero = _rat(0)
    aug = [[zero] * (n + 1) for _ in range(n)]
    for vi, a in enumerate(g.vertices):
        row = aug[vi]
        if vi == gauge:
            row[vi] = _rat(1)
            continue
        edges = g.neighbors(a)
        row[vi] = _rat(2 - len(edges))  # -(number of non-loop out-edges)
        for e in edges[2:]:
            row[g.index_of(e.head)] += 1
        v = rhs[vi]
        row[n] = _rat(v.numerator, v.denominator)
    solution = _exact_gaussian_solve(aug)
    return tuple(Fraction(int(x.numerator), int(x.denominator)) for x in solution)


def _laplacian_csr(g: ShapeGraph) -> csr_matrix:
    n = len(g.vertices)
    rows: list[int] = []
    cols: list[int] = []
    data: list[float] = []
    for vi, a in enumerate(g.vertices):
        edges = g.neighbors(a)
        rows.append(vi)
        cols.append(vi)
        data.append(float(len(edges) - 2))
        for e in edges[2:]:
            rows.append(vi)
            cols.append(g.index_of(e.head))
            data.append(-1.0)
    return csr_matrix((data, (rows, cols)), shape=(n, n))


def _solve_poisson_float(
    g: ShapeGraph,
    rhs: Sequence[float],
    rel_tol: float,
    max_iterations: Optional[int],
) -> tuple[float, ...]:
    """Conjugate-gradient solve of  div(grad f) = rhs  on the mean-zero
    subspace, re-gauged so that f(all-ones) = 0."""
    lap = _laplacian_csr(g)
    b = -np.asarray(rhs, dtype=float)
    b = b - b.mean()
    n = b.size
    norm_b = float(np.linalg.norm(b))
    if norm_b == 0.0:
        return (0.0,) * n
    limit = max_iterations if max_iterations is not None else 20 * n
    x = np.zeros(n)
    r = b.copy()
    p = r.copy()
    rr = float(r @ r)
    for _ in range(limit):
        if math.sqrt(rr) <= rel_tol * norm_b:
            break
        lp = lap @ p
        alpha = rr / float(p @ lp)
        x += alpha * p
        r -= alpha * lp
        r -= r.mean()  # keep the iteration inside the mean-zero subspace
        rr_next = float(r @ r)
        p = r + (rr_next / rr) * p
        rr = rr_next
    else:
        raise SolverError(
            f"conjugate gradient did not converge: relative residual "
            f"{math.sqrt(rr) / norm_b:.3e} after {limit} iterations"
        )
    x -= x[n - 1]  # gauge: all-ones vertex is last
    return tuple(float(v) for v in x)


def hodge_decompose(
    S: EdgeField,
    *,
    max_exact_k: int = DEFAULT_MAX_EXACT_K,
    rel_tol: float = 1e-12,
    max_iterations: Optional[int] = None,
) -> tuple[Potential, EdgeField]:
    """Split ``S`` into a gradient part and a divergence-free part.

    Returns ``(f, B)`` with ``S = grad f + B`` edge-wise, ``div B = 0``,
    and ``<grad f, B> = 0``; the potential is gauged by f(all-ones) = 0.
    Exact mode solves the vertex system over rationals (capped at
    ``max_exact_k``, since cost grows with the cube of 2^K); float mode
    runs conjugate gradients down to ``rel_tol`` relative residual.
    """
    g = S.graph
    d = divergence(S)
    if S.mode == EXACT:
        if g.k > max_exact_k:
            raise CapacityError(
                f"exact elimination capped at k={max_exact_k}; "
                f"raise max_exact_k or use float mode"
            )
        f = Potential(g, _solve_poisson_exact(g, d.values), EXACT, S.tol)
    else:
        f = Potential(
            g, _solve_poisson_float(g, d.values, rel_tol, max_iterations), FLOAT, S.tol
        )
    return f, S - gradient(f)


# -- closed-form potentials --------------------------------------------------


def closed_form_increments(k: int) -> tuple[Fraction, ...]:
    """The per-digit gradient increments (3 + 2(K-i)) / (K+2), i = 1..K."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return tuple(Fraction(3 + 2 * (k - i), k + 2) for i in range(1, k + 1))


def closed_form_potential(g: ShapeGraph) -> Potential:
    """The explicit potential whose gradient part the step field carries.

    Each digit equal to -1 at position i contributes (3 + 2(K-i))/(K+2);
    the all-ones vertex gets 0, matching the solver gauge.
    """
    inc = closed_form_increments(g.k)
    values = []
    for s in g.vertices:
        values.append(sum((f for f, d in zip(inc, s.entries) if d == -1), Fraction(0)))
    return Potential(g, tuple(values), EXACT)


def base_potentials(g: ShapeGraph) -> tuple[Potential, Potential, Potential]:
    """The digit-sum potential f1, the position-weighted potential f2, and
    their combination f = -(f1/2 + f2/(K+2)) + K/2.

    The combination coincides vertex-for-vertex with
    :func:`closed_form_potential`.
    """
    k = g.k
    f1_vals = []
    f2_vals = []
    f_vals = []
    for s in g.vertices:
        e = s.entries
        f1 = Fraction(sum(e))
        f2 = Fraction(sum(d * (1 + k - 2 * (i + 1)) for i, d in enumerate(e)), 2)
        f1_vals.append(f1)
        f2_vals.append(f2)
        f_vals.append(-(f1 / 2 + f2 / (k + 2)) + Fraction(k, 2))
    return (
        Potential(g, tuple(f1_vals), EXACT),
        Potential(g, tuple(f2_vals), EXACT),
        Potential(g, tuple(f_vals), EXACT),
    )


def phi_profiles(g: ShapeGraph) -> tuple[Potential, Potential]:
    """Per-vertex sums of f2 increments over the positive and negative stars.

    The first profile sums f2(head) - f2(tail) over positive out-edges, the
    second over negative ones; together they add up to div(grad f2).
    """
    _, f2, _ = base_potentials(g)
    fv = f2.values
    pos = [Fraction(0)] * len(g.vertices)
    neg = [Fraction(0)] * len(g.vertices)
    for vi, a in enumerate(g.vertices):
        for e in g.neighbors(a):
            if e.is_loop:
                continue
            diff = fv[g.index_of(e.head)] - fv[vi]
            if e.step == 1:
                pos[vi] += diff
            else:
                neg[vi] += diff
    return Potential(g, tuple(pos), EXACT), Potential(g, tuple(neg), EXACT)


# -- the facet-flux system ----------------------------------------------------


@dataclass(frozen=True)
class FacetFluxSystem:
    """The K x K integer system whose solution is the gradient increments.

    Row i balances, for a stationary gradient field orthogonal to the
    divergence-free part of the step field, the flux across the cut
    between the vertices with digit i equal to +1 and those with -1:
    diagonal 3^(K-1), off-diagonal -3^(K-1-|i-j|), right-hand side 3^(K-i).
    """

    k: int
    matrix: tuple[tuple[int, ...], ...]
    rhs: tuple[int, ...]


def facet_flux_system(k: int) -> FacetFluxSystem:
    if k < 1:
        raise ValueError("k must be >= 1")
    matrix = tuple(
        tuple(
            3 ** (k - 1) if i == j else -(3 ** (k - 1 - abs(i - j)))
            for j in range(k)
        )
        for i in range(k)
    )
    rhs = tuple(3 ** (k - 1 - i) for i in range(k))
    return FacetFluxSystem(k, matrix, rhs)


def solve_facet_flux_system(system: FacetFluxSystem) -> tuple[Fraction, ...]:
    """Exact solution of the facet-flux system; equals
    :func:`closed_form_increments` for every K."""
    aug = [
        [_rat(v) for v in row] + [_rat(b)]
        for row, b in zip(system.matrix, system.rhs)
    ]
    solution = _exact_gaussian_solve(aug)
    return tuple(Fraction(int(x.numerator), int(x.denominator)) for x in solution)


# -- exact diffusivity ---------------------------------------------------------


@dataclass(frozen=True)
class SigmaSquared:
    """Exact diffusivity of the lead walker, with its ingredients.

    ``sigma_squared`` is 1 - <A, grad f> where A is the step field and f
    its gradient potential; ``b_norm_squared`` is the squared norm of the
    divergence-free part and always agrees with it.
    """

    k: int
    sigma_squared: Fraction
    a_dot_grad_f: Fraction
    b_norm_squared: Fraction
    method: str


def sigma_squared_closed_form(k: int) -> Fraction:
    """The closed-form limit diffusivity 2/(K+2) that the exact
    graph computation reproduces."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return Fraction(2, k + 2)


def sigma_squared_exact(
    k: int,
    *,
    graph: Optional[ShapeGraph] = None,
    method: str = "auto",
    max_k: int = DEFAULT_MAX_K,
) -> SigmaSquared:
    """Compute the diffusivity exactly from the materialized graph.

    ``method='solve'`` runs the exact decomposition solver; with
    ``'closed_form'`` the explicit potential is used instead and its
    divergence-free complement is verified on every vertex, which scales
    to larger K.  ``'auto'`` picks the solver up to the exact cap and the
    verified closed form beyond it.
    """
    if method not in ("auto", "solve", "closed_form"):
        raise ValueError(f"unknown method {method!r}")
    g = graph if graph is not None else build_graph(k, max_k=max_k)
    if g.k != k:
        raise FieldMismatchError(f"graph has k={g.k}, requested k={k}")
    if method == "auto":
        method = "solve" if k <= DEFAULT_MAX_EXACT_K else "closed_form"

    A = step_field(g)
    if method == "solve":
        f, B = hodge_decompose(A, max_exact_k=g.k)
    else:
        f = closed_form_potential(g)
        B = A - gradient(f)
        bad = [v for v in divergence(B).values if v != 0]
        if bad:
            raise SolverError("closed-form potential failed the divergence check")

    grad_f = gradient(f)
    a_dot = inner_product(A, grad_f)
    return SigmaSquared(
        k=k,
        sigma_squared=Fraction(1) - a_dot,
        a_dot_grad_f=a_dot,
        b_norm_squared=inner_product(B, B),
        method=method,
    )


# -- serialization -------------------------------------------------------------


def scalar_to_json(v: Scalar) -> Union[str, float]:
    """Exact rationals as strings (no precision loss), floats as numbers."""
    if isinstance(v, Fraction):
        return str(v)
    return float(v)


def potential_values_json(f: Potential) -> dict[str, Union[str, float]]:
    """Vertex sign-string -> value, in deterministic vertex order."""
    return {
        s.to_string(): scalar_to_json(v) for s, v in zip(f.graph.vertices, f.values)
    }


def field_values_json(S: EdgeField) -> list[dict]:
    """Canonical edges with their values, in deterministic order."""
    return [
        {
            "tail": list(e.tail.entries),
            "head": list(e.head.entries),
            "loop": e.is_loop,
            "value": scalar_to_json(v),
        }
        for e, v in zip(S.graph.canonical_edges, S.values)
    ]


def fields_table_csv(g: ShapeGraph) -> str:
    """CSV table of the exact potentials and step-field divergence.

    Columns: vertex, f, f1, f2, div_a - one row per vertex in
    lexicographic order.
    """
    f1, f2, f = base_potentials(g)
    div_a = divergence(step_field(g))
    lines = ["vertex,f,f1,f2,div_a"]
    for i, s in enumerate(g.vertices):
        lines.append(
            f"{s.to_string()},{f.values[i]},{f1.values[i]},{f2.values[i]},{div_a.values[i]}"
        )
    return "\n".join(lines) + "\n"
