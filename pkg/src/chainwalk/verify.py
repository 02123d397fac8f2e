"""Self-contained invariant suite over the whole library.

Each check covers one named structural or analytic property, swept over a
range of chain lengths, and reports a single pass/fail line.  The suite is
what the command-line ``verify`` subcommand runs; tests call into it as
well.  Expensive shared artifacts (graphs, exact decompositions) are
cached per run.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .fields import (
    FLOAT,
    EdgeField,
    Potential,
    base_potentials,
    closed_form_increments,
    closed_form_potential,
    divergence,
    facet_flux_system,
    flux,
    gradient,
    hodge_decompose,
    inner_product,
    is_stationary,
    phi_profiles,
    sigma_squared_exact,
    solve_facet_flux_system,
    step_field,
)
from .graph import (
    ShapeGraph,
    build_graph,
    build_graph_inductive,
    degree_profile,
    edge_sign,
)
from .sim import (
    estimate_sigma2,
    martingale_residuals,
    simulate_trajectory,
    stationary_distribution,
    transition_kernel,
    walker_from_shape,
    walker_successors,
)

DEFAULT_SEED = 20260810


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


class _Cache:
    def __init__(self) -> None:
        self._graphs: dict[int, ShapeGraph] = {}
        self._hodge: dict[int, tuple[EdgeField, Potential, EdgeField]] = {}

    def graph(self, k: int) -> ShapeGraph:
        if k not in self._graphs:
            self._graphs[k] = build_graph(k)
        return self._graphs[k]

    def hodge(self, k: int) -> tuple[EdgeField, Potential, EdgeField]:
        """(step field, exact potential, divergence-free part) at level k."""
        if k not in self._hodge:
            g = self.graph(k)
            A = step_field(g)
            f, B = hodge_decompose(A)
            self._hodge[k] = (A, f, B)
        return self._hodge[k]


def _bucket(counts: tuple[int, ...], j: int) -> int:
    return counts[j] if j < len(counts) else 0


# -- graph checks ---------------------------------------------------------


def _check_structural_counts(cache: _Cache, k_max: int, seed: int) -> CheckResult:
    top = min(k_max, 10)
    for k in range(1, top + 1):
        g = cache.graph(k)
        if g.total_directed_edges != 2 * 3**k:
            return CheckResult("structural-counts", False, f"edge count wrong at k={k}")
        if g.crossing_count != 3 ** (k - 1):
            return CheckResult("structural-counts", False, f"crossing count wrong at k={k}")
        for a in g.vertices:
            loops = [e for e in g.neighbors(a) if e.is_loop]
            if len(loops) != 2 or {e.step for e in loops} != {1, -1}:
                return CheckResult("structural-counts", False, f"loops wrong at {a} (k={k})")
        if g.degree(g.all_ones) != k + 2:
            return CheckResult("structural-counts", False, f"all-ones degree wrong at k={k}")
    return CheckResult("structural-counts", True, f"k=1..{top}")


def _check_classification_antisymmetry(cache: _Cache, k_max: int, seed: int) -> CheckResult:
    top = min(k_max, 7)
    for k in range(1, top + 1):
        vertices = cache.graph(k).vertices
        for a in vertices:
            for b in vertices:
                if a == b:
                    continue
                s_ab = edge_sign(a, b)
                s_ba = edge_sign(b, a)
                ok = (s_ab is None and s_ba is None) or (
                    s_ab is not None and s_ba == -s_ab
                )
                if not ok:
                    return CheckResult(
                        "classification-antisymmetry", False, f"{a}->{b} at k={k}"
                    )
    return CheckResult("classification-antisymmetry", True, f"all pairs, k=1..{top}")


def _check_adjacency_matches_classification(cache: _Cache, k_max: int, seed: int) -> CheckResult:
    top = min(k_max, 5)
    for k in range(1, top + 1):
        g = cache.graph(k)
        from_adj = {
            (e.tail, e.head, e.step)
            for a in g.vertices
            for e in g.neighbors(a)
            if not e.is_loop
        }
        from_pairs = set()
        for a in g.vertices:
            for b in g.vertices:
                if a == b:
                    continue
                s = edge_sign(a, b)
                if s is not None:
                    from_pairs.add((a, b, s))
        if from_adj != from_pairs:
            return CheckResult("adjacency-matches-classification", False, f"k={k}")
    return CheckResult("adjacency-matches-classification", True, f"k=1..{top}")


def _check_inductive_construction(cache: _Cache, k_max: int, seed: int) -> CheckResult:
    top = min(k_max, 10)
    for k in range(1, top + 1):
        if build_graph_inductive(k) != cache.graph(k):
            return CheckResult("inductive-construction", False, f"k={k}")
    return CheckResult("inductive-construction", True, f"k=1..{top}")


def _check_degree_handshake(cache: _Cache, k_max: int, seed: int) -> CheckResult:
    top = min(k_max, 10)
    for k in range(1, top + 1):
        g = cache.graph(k)
        total = sum(
            degree_profile(g, a).plus_total + degree_profile(g, a).minus_total
            for a in g.vertices
        )
        if total != 2 * 3**k:
            return CheckResult("degree-handshake", False, f"k={k}: sum={total}")
    return CheckResult("degree-handshake", True, f"k=1..{top}")


def _check_digit_profiles(cache: _Cache, k_max: int, seed: int) -> CheckResult:
    top = min(k_max, 8)
    for k in range(1, top + 1):
        g = cache.graph(k)
        for a in g.vertices:
            p = degree_profile(g, a)
            ups = sum(1 for d in a.entries if d == 1)
            if _bucket(p.plus_by_flips, 1) + _bucket(p.minus_by_flips, 1) != k:
                return CheckResult("digit-profiles", False, f"one-flip sum at {a} (k={k})")
            if _bucket(p.plus_by_flips, 1) != ups:
                return CheckResult("digit-profiles", False, f"one-flip ups at {a} (k={k})")
            if p.plus_by_flips[0] != 1 or p.minus_by_flips[0] != 1:
                return CheckResult("digit-profiles", False, f"loop buckets at {a} (k={k})")
            if p.plus_total + p.minus_total != g.degree(a):
                return CheckResult("digit-profiles", False, f"totals at {a} (k={k})")
    return CheckResult("digit-profiles", True, f"all vertices, k=1..{top}")


# -- field checks ----------------------------------------------------------


def _check_step_field_norm(cache: _Cache, k_max: int, seed: int) -> CheckResult:
    top = min(k_max, 10)
    for k in range(1, top + 1):
        g = cache.graph(k)
        A = step_field(g)
        if inner_product(A, A) != 1:
            return CheckResult("step-field-norm", False, f"k={k}")
    return CheckResult("step-field-norm", True, f"k=1..{top}")


def _check_decomposition_identities(cache: _Cache, k_max: int, seed: int) -> CheckResult:
    top = min(k_max, 8)
    for k in range(1, top + 1):
        A, f, B = cache.hodge(k)
        grad_f = gradient(f)
        if any(a != gv + bv for a, gv, bv in zip(A.values, grad_f.values, B.values)):
            return CheckResult("decomposition-identities", False, f"sum differs at k={k}")
        if any(v != 0 for v in divergence(B).values):
            return CheckResult("decomposition-identities", False, f"div B != 0 at k={k}")
        if inner_product(grad_f, B) != 0:
            return CheckResult("decomposition-identities", False, f"<grad f, B> != 0 at k={k}")
    return CheckResult("decomposition-identities", True, f"exact, k=1..{top}")


def _check_closed_form_agreement(cache: _Cache, k_max: int, seed: int) -> CheckResult:
    top = min(k_max, 8)
    for k in range(1, top + 1):
        g = cache.graph(k)
        _, f, _ = cache.hodge(k)
        if f.values != closed_form_potential(g).values:
            return CheckResult("closed-form-agreement", False, f"solver vs formula at k={k}")
        _, _, combined = base_potentials(g)
        if combined.values != f.values:
            return CheckResult("closed-form-agreement", False, f"combination differs at k={k}")
    return CheckResult("closed-form-agreement", True, f"k=1..{top}")


def _check_gauge_independence(cache: _Cache, k_max: int, seed: int) -> CheckResult:
    top = min(k_max, 6)
    shift = Fraction(7, 3)
    for k in range(1, top + 1):
        A, f, B = cache.hodge(k)
        shifted = f.shifted(shift)
        if gradient(shifted).values != gradient(f).values:
            return CheckResult("gauge-independence", False, f"gradient moved at k={k}")
        if (A - gradient(shifted)).values != B.values:
            return CheckResult("gauge-independence", False, f"B moved at k={k}")
        if inner_product(A, gradient(shifted)) != Fraction(k, k + 2):
            return CheckResult("gauge-independence", False, f"sigma moved at k={k}")
    return CheckResult("gauge-independence", True, f"shift {shift}, k=1..{top}")


def _check_divergence_identity_f1(cache: _Cache, k_max: int, seed: int) -> CheckResult:
    top = min(k_max, 8)
    for k in range(1, top + 1):
        g = cache.graph(k)
        f1, _, _ = base_potentials(g)
        d = divergence(gradient(f1))
        for vi, a in enumerate(g.vertices):
            p = degree_profile(g, a)
            if d.values[vi] != -2 * (p.plus_odd - p.minus_odd):
                return CheckResult("divergence-identity-f1", False, f"{a} (k={k})")
    return CheckResult("divergence-identity-f1", True, f"vertex-wise, k=1..{top}")


def _check_divergence_identity_f2(cache: _Cache, k_max: int, seed: int) -> CheckResult:
    top = min(k_max, 8)
    for k in range(1, top + 1):
        g = cache.graph(k)
        _, f2, _ = base_potentials(g)
        d = divergence(gradient(f2))
        for vi, a in enumerate(g.vertices):
            p = degree_profile(g, a)
            if d.values[vi] != -(k + 2) * (p.plus_even - p.minus_even):
                return CheckResult("divergence-identity-f2", False, f"{a} (k={k})")
            if f2.values[vi] != _bucket(p.plus_by_flips, 2) - _bucket(p.minus_by_flips, 2):
                return CheckResult("divergence-identity-f2", False, f"two-flip form {a} (k={k})")
    return CheckResult("divergence-identity-f2", True, f"vertex-wise, k=1..{top}")


def _check_phi_closed_forms(cache: _Cache, k_max: int, seed: int) -> CheckResult:
    top = min(k_max, 8)
    for k in range(1, top + 1):
        g = cache.graph(k)
        pos, neg = phi_profiles(g)
        _, f2, _ = base_potentials(g)
        d2 = divergence(gradient(f2))
        for vi, a in enumerate(g.vertices):
            p = degree_profile(g, a)
            want_pos = p.minus_even - (k + 1) * p.plus_even + p.plus_odd + p.minus_odd
            want_neg = -p.plus_even + (k + 1) * p.minus_even - p.minus_odd - p.plus_odd
            if pos.values[vi] != want_pos or neg.values[vi] != want_neg:
                return CheckResult("phi-closed-forms", False, f"{a} (k={k})")
            if pos.values[vi] + neg.values[vi] != d2.values[vi]:
                return CheckResult("phi-closed-forms", False, f"sum at {a} (k={k})")
    return CheckResult("phi-closed-forms", True, f"vertex-wise, k=1..{top}")


def _check_prepend_recurrences(cache: _Cache, k_max: int, seed: int) -> CheckResult:
    top = min(k_max, 7)
    for k in range(1, top + 1):
        g = cache.graph(k)
        g_up = cache.graph(k + 1)
        f1, f2, _ = base_potentials(g)
        f1u, f2u, _ = base_potentials(g_up)
        for vi, a in enumerate(g.vertices):
            p = degree_profile(g, a)
            up = g_up.index_of(a.prepend(1))
            dn = g_up.index_of(a.prepend(-1))
            ok = (
                f1u.values[up] == f1.values[vi] + 1
                and f1u.values[dn] == f1.values[vi] - 1
                and f2u.values[up] == f2.values[vi] + _bucket(p.minus_by_flips, 1)
                and f2u.values[dn] == f2.values[vi] - _bucket(p.plus_by_flips, 1)
            )
            if not ok:
                return CheckResult("prepend-recurrences", False, f"{a} (k={k})")
    return CheckResult("prepend-recurrences", True, f"k=1..{top} vs level above")


def _check_facet_system(cache: _Cache, k_max: int, seed: int) -> CheckResult:
    top = min(k_max, 10)
    for k in range(1, top + 1):
        if solve_facet_flux_system(facet_flux_system(k)) != closed_form_increments(k):
            return CheckResult("facet-system", False, f"k={k}")
    return CheckResult("facet-system", True, f"solution matches increments, k=1..{top}")


def _check_digit_cut_fluxes(cache: _Cache, k_max: int, seed: int) -> CheckResult:
    top = min(k_max, 8)
    for k in range(1, top + 1):
        g = cache.graph(k)
        _, _, B = cache.hodge(k)
        for i in range(k):
            plus_side = [s for s in g.vertices if s.entries[i] == 1]
            minus_side = [s for s in g.vertices if s.entries[i] == -1]
            if flux(B, plus_side, minus_side) != 0:
                return CheckResult("digit-cut-fluxes", False, f"digit {i + 1} (k={k})")
    return CheckResult("digit-cut-fluxes", True, f"all digit cuts, k=1..{top}")


def _check_random_cut_fluxes(cache: _Cache, k_max: int, seed: int) -> CheckResult:
    top = min(k_max, 8)
    rng = np.random.default_rng(seed)
    for k in range(1, top + 1):
        g = cache.graph(k)
        _, _, B = cache.hodge(k)
        for trial in range(200):
            mask = rng.integers(0, 2, size=len(g.vertices)).astype(bool)
            inside = [s for s, m in zip(g.vertices, mask) if m]
            outside = [s for s, m in zip(g.vertices, mask) if not m]
            if flux(B, inside, outside) != 0:
                return CheckResult("random-cut-fluxes", False, f"trial {trial} (k={k})")
    return CheckResult("random-cut-fluxes", True, f"200 cuts per k, k=1..{top}")


def _check_stationarity(cache: _Cache, k_max: int, seed: int) -> CheckResult:
    top = min(k_max, 8)
    for k in range(1, top + 1):
        A, f, B = cache.hodge(k)
        if not (is_stationary(A) and is_stationary(gradient(f)) and is_stationary(B)):
            return CheckResult("stationarity", False, f"k={k}")
    # negative control: a one-vertex bump is not stationary
    g = cache.graph(2)
    bump = Potential.from_callable(
        g, lambda s: Fraction(1) if s == g.all_ones else Fraction(0)
    )
    if is_stationary(gradient(bump)):
        return CheckResult("stationarity", False, "bump gradient wrongly stationary")
    return CheckResult("stationarity", True, f"A, grad f, B for k=1..{top}; control rejected")


def _check_facet_sum_identity(cache: _Cache, k_max: int, seed: int) -> CheckResult:
    top = min(k_max, 8)
    for k in range(2, top + 1):
        A, f, _ = cache.hodge(k)
        lhs = inner_product(A, gradient(f))
        d_k = 2 * 3**k
        first = closed_form_increments(k)[0]
        rhs = Fraction(4 * 3 ** (k - 1), d_k) * first - Fraction(2 * 3 ** (k - 1), d_k)
        if lhs != rhs:
            return CheckResult("facet-sum-identity", False, f"k={k}: {lhs} vs {rhs}")
    return CheckResult("facet-sum-identity", True, f"k=2..{top}")


def _check_float_agreement(cache: _Cache, k_max: int, seed: int) -> CheckResult:
    top = min(k_max, 8)
    worst = 0.0
    for k in range(1, top + 1):
        g = cache.graph(k)
        _, f, B = cache.hodge(k)
        f_float, b_float = hodge_decompose(step_field(g, FLOAT))
        df = max(abs(float(x) - y) for x, y in zip(f.values, f_float.values))
        db = max(abs(float(x) - y) for x, y in zip(B.values, b_float.values))
        worst = max(worst, df, db)
        if df > 1e-10 or db > 1e-10:
            return CheckResult("float-agreement", False, f"k={k}: |diff|={max(df, db):.2e}")
    return CheckResult("float-agreement", True, f"k=1..{top}, worst |diff|={worst:.2e}")


def _check_sigma_exact(cache: _Cache, k_max: int, seed: int) -> CheckResult:
    top = min(k_max, 8)
    for k in range(1, top + 1):
        g = cache.graph(k)
        result = sigma_squared_exact(k, graph=g)
        ok = (
            result.sigma_squared == Fraction(2, k + 2)
            and result.a_dot_grad_f == Fraction(k, k + 2)
            and result.b_norm_squared == result.sigma_squared
        )
        if not ok:
            return CheckResult("sigma-exact", False, f"k={k}: {result}")
        verified = sigma_squared_exact(k, graph=g, method="closed_form")
        if verified.sigma_squared != result.sigma_squared:
            return CheckResult("sigma-exact", False, f"methods disagree at k={k}")
    return CheckResult("sigma-exact", True, f"2/(k+2) for k=1..{top}, both methods")


# -- simulation checks -------------------------------------------------------


def _check_kernel_equivalence(cache: _Cache, k_max: int, seed: int) -> CheckResult:
    top = min(k_max, 4)
    for k in range(1, top + 1):
        g = cache.graph(k)
        walker = transition_kernel(k, "walker", graph=g)
        graphk = transition_kernel(k, "graph", graph=g)
        if walker != graphk:
            return CheckResult("kernel-equivalence", False, f"k={k}")
        for a, row in graphk.items():
            if sum(row.values()) != 1:
                return CheckResult("kernel-equivalence", False, f"row sum at {a} (k={k})")
    return CheckResult("kernel-equivalence", True, f"walker == graph, k=1..{top}")


def _check_stationary_shape_law(cache: _Cache, k_max: int, seed: int) -> CheckResult:
    top = min(k_max, 4)
    for k in range(1, top + 1):
        g = cache.graph(k)
        pi = stationary_distribution(g)
        kernel = transition_kernel(k, "graph", graph=g)
        for b in g.vertices:
            mass = sum(
                pi[g.index_of(a)] * p
                for a, row in kernel.items()
                for (head, _), p in row.items()
                if head == b
            )
            if mass != pi[g.index_of(b)]:
                return CheckResult("stationary-shape-law", False, f"{b} (k={k})")
        uniform = Fraction(1, g.total_directed_edges)
        for a in g.vertices:
            if pi[g.index_of(a)] * Fraction(1, g.degree(a)) != uniform:
                return CheckResult("stationary-shape-law", False, f"edge law at {a} (k={k})")
    return CheckResult("stationary-shape-law", True, f"invariance + uniform edges, k=1..{top}")


def _check_martingale_mean_zero(cache: _Cache, k_max: int, seed: int) -> CheckResult:
    top = min(k_max, 8)
    for k in range(1, top + 1):
        g = cache.graph(k)
        _, f, _ = cache.hodge(k)
        if any(v != 0 for v in martingale_residuals(g, f).values):
            return CheckResult("martingale-mean-zero", False, f"k={k}")
        shifted = martingale_residuals(g, f.shifted(Fraction(9, 7)))
        if any(v != 0 for v in shifted.values):
            return CheckResult("martingale-mean-zero", False, f"gauge shift broke k={k}")
    return CheckResult("martingale-mean-zero", True, f"exact zero, k=1..{top}")


def _check_martingale_empirical(cache: _Cache, k_max: int, seed: int) -> CheckResult:
    top = min(k_max, 3)
    steps = 100_000
    for k in range(1, top + 1):
        g = cache.graph(k)
        _, f, B = cache.hodge(k)
        b_float = B.as_float()
        b_table = [
            [b_float.value(e) for e in g.neighbors(a)] for a in g.vertices
        ]
        head_table = [
            [g.index_of(e.head) for e in g.neighbors(a)] for a in g.vertices
        ]
        cdf = np.cumsum([g.degree(a) for a in g.vertices]).astype(float)
        cdf /= cdf[-1]
        rng = np.random.default_rng(seed + k)
        state = int(np.searchsorted(cdf, rng.random(), side="right"))
        uniforms = rng.random(steps)
        n = len(g.vertices)
        sums = [0.0] * n
        sq_sums = [0.0] * n
        counts = [0] * n
        for t in range(steps):
            deg = len(head_table[state])
            j = min(int(uniforms[t] * deg), deg - 1)
            b = b_table[state][j]
            sums[state] += b
            sq_sums[state] += b * b
            counts[state] += 1
            state = head_table[state][j]
        for vi in range(n):
            c = counts[vi]
            mean = sums[vi] / c
            var = max(sq_sums[vi] / c - mean * mean, 0.0)
            if var == 0.0:
                if abs(mean) > 1e-12:
                    return CheckResult("martingale-empirical", False, f"vertex {vi} (k={k})")
                continue
            if abs(mean) > 4.0 * (var / c) ** 0.5:
                return CheckResult(
                    "martingale-empirical",
                    False,
                    f"vertex {vi} (k={k}): mean {mean:.4g} vs se {(var / c) ** 0.5:.4g}",
                )
    return CheckResult("martingale-empirical", True, f"{steps} steps, 4 se, k=1..{top}")


def _check_quadratic_variation(cache: _Cache, k_max: int, seed: int) -> CheckResult:
    top = min(k_max, 8)
    for k in range(1, top + 1):
        g = cache.graph(k)
        _, _, B = cache.hodge(k)
        total = Fraction(0)
        for a in g.vertices:
            for e in g.neighbors(a):
                total += Fraction(B.value(e)) ** 2
        mean_square = total / g.total_directed_edges
        if mean_square != sigma_squared_exact(k, graph=g).sigma_squared:
            return CheckResult("quadratic-variation", False, f"k={k}: {mean_square}")
    return CheckResult("quadratic-variation", True, f"uniform-edge mean of B^2, k=1..{top}")


def _check_two_step_moment(cache: _Cache, k_max: int, seed: int) -> CheckResult:
    g = cache.graph(1)
    pi = stationary_distribution(g)
    exact = Fraction(0)
    for a in g.vertices:
        start = pi[g.index_of(a)] * Fraction(1, g.degree(a))
        for e0 in g.neighbors(a):
            for e1 in g.neighbors(e0.head):
                p = start * Fraction(1, g.degree(e0.head))
                exact += p * (e0.step + e1.step) ** 2
    if exact != Fraction(16, 9):
        return CheckResult("two-step-moment", False, f"enumeration gave {exact}")
    est = estimate_sigma2(1, steps=2, trials=200_000, seed=seed, graph=g)
    empirical = est.point_estimate * 2
    se = est.std_error * 2
    if abs(empirical - float(exact)) > 4 * se:
        return CheckResult(
            "two-step-moment", False, f"simulator {empirical:.5f} vs {float(exact):.5f}"
        )
    return CheckResult(
        "two-step-moment", True, f"enumeration = 16/9; simulator within {abs(empirical - float(exact)) / se:.2f} se"
    )


def _check_monte_carlo_sigma(cache: _Cache, k_max: int, seed: int) -> CheckResult:
    top = min(k_max, 3)
    details = []
    for k in range(1, top + 1):
        est = estimate_sigma2(k, steps=10_000, trials=10_000, seed=seed, graph=cache.graph(k))
        target = float(Fraction(2, k + 2))
        pull = abs(est.point_estimate - target) / est.std_error
        details.append(f"k={k}: {pull:.2f} se")
        if pull > 3.0:
            return CheckResult(
                "monte-carlo-sigma",
                False,
                f"k={k}: {est.point_estimate:.5f} vs {target:.5f} ({pull:.2f} se)",
            )
    return CheckResult("monte-carlo-sigma", True, "; ".join(details))


def _check_trajectory_contract(cache: _Cache, k_max: int, seed: int) -> CheckResult:
    top = min(k_max, 3)
    for k in range(1, top + 1):
        g = cache.graph(k)
        for rep in ("graph", "walker"):
            t1 = simulate_trajectory(k, 200, seed, rep, graph=g)
            t2 = simulate_trajectory(k, 200, seed, rep, graph=g)
            if t1 != t2:
                return CheckResult("trajectory-contract", False, f"nondeterministic {rep} (k={k})")
            if any(
                abs(t1.heights[i + 1] - t1.heights[i]) != 1 for i in range(len(t1) - 1)
            ):
                return CheckResult("trajectory-contract", False, f"bad increment {rep} (k={k})")
        base = walker_from_shape(g.vertices[0], 0)
        t_base = simulate_trajectory(k, 200, seed, "walker", graph=g, start=base)
        t_shift = simulate_trajectory(k, 200, seed, "walker", graph=g, start=base.shifted(5))
        if t_shift.shapes != t_base.shapes or any(
            hs != hb + 5 for hs, hb in zip(t_shift.heights, t_base.heights)
        ):
            return CheckResult("trajectory-contract", False, f"translation broke (k={k})")
    return CheckResult("trajectory-contract", True, f"determinism + translation, k=1..{top}")


def _check_successor_enumeration(cache: _Cache, k_max: int, seed: int) -> CheckResult:
    top = min(k_max, 4)
    for k in range(1, top + 1):
        g = cache.graph(k)
        for a in g.vertices:
            z = walker_from_shape(a)
            brute = {s.heights for s in walker_successors(z)}
            via_graph = set()
            for e in g.neighbors(a):
                succ = walker_from_shape(e.head, z.heights[0] + e.step)
                via_graph.add(succ.heights)
            if brute != via_graph:
                return CheckResult("successor-enumeration", False, f"{a} (k={k})")
    return CheckResult("successor-enumeration", True, f"adjacency == brute force, k=1..{top}")


_CHECKS: tuple[tuple[str, Callable[[_Cache, int, int], CheckResult]], ...] = (
    ("structural-counts", _check_structural_counts),
    ("classification-antisymmetry", _check_classification_antisymmetry),
    ("adjacency-matches-classification", _check_adjacency_matches_classification),
    ("inductive-construction", _check_inductive_construction),
    ("degree-handshake", _check_degree_handshake),
    ("digit-profiles", _check_digit_profiles),
    ("step-field-norm", _check_step_field_norm),
    ("decomposition-identities", _check_decomposition_identities),
    ("closed-form-agreement", _check_closed_form_agreement),
    ("gauge-independence", _check_gauge_independence),
    ("divergence-identity-f1", _check_divergence_identity_f1),
    ("divergence-identity-f2", _check_divergence_identity_f2),
    ("phi-closed-forms", _check_phi_closed_forms),
    ("prepend-recurrences", _check_prepend_recurrences),
    ("facet-system", _check_facet_system),
    ("digit-cut-fluxes", _check_digit_cut_fluxes),
    ("random-cut-fluxes", _check_random_cut_fluxes),
    ("stationarity", _check_stationarity),
    ("facet-sum-identity", _check_facet_sum_identity),
    ("float-agreement", _check_float_agreement),
    ("sigma-exact", _check_sigma_exact),
    ("kernel-equivalence", _check_kernel_equivalence),
    ("stationary-shape-law", _check_stationary_shape_law),
    ("successor-enumeration", _check_successor_enumeration),
    ("martingale-mean-zero", _check_martingale_mean_zero),
    ("martingale-empirical", _check_martingale_empirical),
    ("quadratic-variation", _check_quadratic_variation),
    ("two-step-moment", _check_two_step_moment),
    ("monte-carlo-sigma", _check_monte_carlo_sigma),
    ("trajectory-contract", _check_trajectory_contract),
)


def check_names() -> tuple[str, ...]:
    return tuple(name for name, _ in _CHECKS)


def run_checks(
    k_max: int = 8,
    *,
    seed: int = DEFAULT_SEED,
    names: Optional[set[str]] = None,
) -> list[CheckResult]:
    """Run the invariant suite up to chain length ``k_max``.

    Every check clamps ``k_max`` to the range it is specified for.  Pass
    ``names`` to run a subset.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    cache = _Cache()
    results = []
    for name, fn in _CHECKS:
        if names is not None and name not in names:
            continue
        results.append(fn(cache, k_max, seed))
    return results
