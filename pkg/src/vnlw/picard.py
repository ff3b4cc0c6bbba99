"""Duhamel integral operator, tree-indexed Picard iterates, and solvers.

The Duhamel operator acts on k time-dependent fields:

    I_k(u_1, ..., u_k)(t) = - integral_0^t W(t - t') prod_j u_j(t') dt'

with W the damped sine propagator and the product dealiased in frequency.
Iterating the mild formulation produces the levels

    Xi_0(t) = V(t) (u0, u1),
    Xi_j   = sum over l_1 + ... + l_k = j - 1 of I_k(Xi_{l_1}, ..., Xi_{l_k}),

which is the production path; ordered k-ary trees enumerate the same sum
term by term and serve as the independent test oracle (each tree replaces
internal nodes by the Duhamel operator and leaves by the linear flow).

Numerical design
----------------
Integrands carry a boundary layer of width ~ 1/|xi|_max at t' = 0 (the
damping kills high-frequency content in a few multiples of that scale), so
panels are laid out geometrically from that scale up to t, Gauss-Legendre
of fixed order inside each panel, and every panel is split in half
repeatedly until two successive refinements agree.  Trajectories are
stored on a geometric master grid matched to the same layer and evaluated
in between with sliding-window barycentric interpolation; level-0 is kept
as an exact closure, never sampled.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .config import DEFAULT, RunConfig
from .errors import AccuracyError, ConfigurationError, DivergenceError, RegimeError
from .estimates import thresholds
from .spectral import (
    FieldPair,
    FrequencyLattice,
    SpectralField,
    apply_linear_flow,
    fl_norm,
    hs_norm,
    multiplier_profile,
    pair_fl1_norm,
    pointwise_product,
    xt_norm,
)


# ---------------------------------------------------------------------------
# ordered k-ary trees
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Tree:
    """Ordered tree whose internal nodes have exactly k children."""

    children: tuple["Tree", ...] = ()

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def internal_count(self) -> int:
        if self.is_leaf:
            return 0
        return 1 + sum(c.internal_count for c in self.children)

    @property
    def node_count(self) -> int:
        return 1 + sum(c.node_count for c in self.children)


LEAF = Tree()


def fuss_catalan(j: int, k: int) -> int:
    """Number of ordered k-ary trees with j internal nodes."""
    if j < 0 or k < 2:
        raise ValueError(f"need j >= 0 and k >= 2, got j={j}, k={k}")
    return comb(k * j + 1, j) // (k * j + 1)


def compositions(total: int, parts: int):
    """Ordered tuples of nonnegative ints of given length summing to total."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in compositions(total - head, parts - 1):
            yield (head,) + rest


def enumerate_trees(j: int, k: int, *, cap: int = 200_000) -> list[Tree]:
    """All ordered k-ary trees with j internal nodes.

    Distinct orderings of children count as distinct trees.  Refuses when
    the Fuss-Catalan count exceeds ``cap``.
    """
    count = fuss_catalan(j, k)
    if count > cap:
        raise ConfigurationError(f"{count} trees with j={j}, k={k} exceeds the cap {cap}")
    memo: dict[int, list[Tree]] = {}

    def build(n: int) -> list[Tree]:
        if n in memo:
            return memo[n]
        if n == 0:
            memo[0] = [LEAF]
            return memo[0]
        out = []
        for combo in compositions(n - 1, k):
            for children in itertools.product(*(build(c) for c in combo)):
                out.append(Tree(children))
        memo[n] = out
        return out

    trees = build(j)
    assert len(trees) == count
    return trees


# ---------------------------------------------------------------------------
# trajectories
# ---------------------------------------------------------------------------

class LinearFlowTrajectory:
    """Exact linear-flow evolution of an initial pair; evaluated on demand."""

    def __init__(self, pair: FieldPair):
        self.pair = pair
        self.lattice = pair.lattice

    def values(self, t: float) -> np.ndarray:
        return apply_linear_flow(t, self.pair).coeffs


class SampledTrajectory:
    """Field trajectory stored on a time grid, interpolated in between.

    Interpolation is barycentric over a sliding window of grid nodes,
    which is linear in the stored values (so sums of trajectories
    interpolate to sums of interpolants, up to roundoff).
    """

    def __init__(self, times: np.ndarray, values: np.ndarray, lattice: FrequencyLattice, *, stencil: int = 8):
        self.times = np.asarray(times, dtype=float)
        self.stored = np.asarray(values)
        self.lattice = lattice
        self.stencil = min(stencil, len(self.times))
        if self.stored.shape[0] != len(self.times):
            raise ValueError("one stored field per grid time required")

    def values(self, t: float) -> np.ndarray:
        ts = self.times
        exact = np.searchsorted(ts, t)
        if exact < len(ts) and ts[exact] == t:
            return self.stored[exact]
        if t < ts[0] or t > ts[-1] * (1 + 1e-12):
            raise ValueError(f"evaluation time {t} outside stored range [{ts[0]}, {ts[-1]}]")
        w = self.stencil
        lo = int(np.clip(exact - w // 2, 0, len(ts) - w))
        window = ts[lo : lo + w]
        # barycentric weights for the window nodes
        diffs = window[:, None] - window[None, :]
        np.fill_diagonal(diffs, 1.0)
        bary = 1.0 / np.prod(diffs, axis=1)
        gaps = t - window
        coeffs = bary / gaps
        coeffs /= coeffs.sum()
        return np.tensordot(coeffs, self.stored[lo : lo + w], axes=(0, 0))

    def field(self, index: int) -> SpectralField:
        return SpectralField(self.lattice, self.stored[index], copy=False)


def time_grid(T: float, *, per_octave: int = 3, floor: float | None = None) -> np.ndarray:
    """Geometric grid on [0, T], refined toward t = 0 down to ``floor``."""
    if T <= 0:
        raise ValueError(f"horizon must be positive, got {T}")
    if floor is None:
        floor = T / 256.0
    floor = min(max(floor, T * 1e-12), T / 8.0)
    octaves = math.ceil(math.log2(T / floor))
    count = octaves * per_octave
    exponents = np.arange(count + 1, dtype=float) / per_octave
    points = T * 2.0 ** (-exponents[::-1])
    return np.concatenate(([0.0], points))


def oscillation_scale(lattice: FrequencyLattice, k: int) -> float:
    """Fastest time scale of degree-k products on the lattice."""
    max_abs = math.sqrt(lattice.d) * lattice.cutoff
    return k * max_abs * 1.4 + 1.0


# ---------------------------------------------------------------------------
# the Duhamel operator
# ---------------------------------------------------------------------------

_gl_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl_nodes(order: int):
    if order not in _gl_cache:
        nodes, weights = np.polynomial.legendre.leggauss(order)
        _gl_cache[order] = (nodes, weights)
    return _gl_cache[order]


def _panel_edges(t: float, scale: float) -> np.ndarray:
    """Geometric panel edges on [0, t] resolving the exp layer near 0."""
    if t * scale <= 2.0:
        return np.array([0.0, t])
    depth = min(60, math.ceil(math.log2(t * scale)))
    inner = t * 2.0 ** (-np.arange(depth, -1, -1, dtype=float))
    return np.concatenate(([0.0], inner))


def _product_at(trajs, t: float, max_points: int) -> SpectralField:
    lattice = trajs[0].lattice
    seen: dict[int, SpectralField] = {}
    fields = []
    for traj in trajs:
        key = id(traj)
        if key not in seen:
            seen[key] = SpectralField(lattice, traj.values(t), copy=False)
        fields.append(seen[key])
    return pointwise_product(fields, max_points=max_points)


def _duhamel_with_error(trajs, t: float, config: RunConfig) -> tuple[SpectralField, float]:
    trajs = list(trajs)
    if not trajs:
        raise ValueError("need at least one trajectory")
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    lattice = trajs[0].lattice
    for traj in trajs[1:]:
        if traj.lattice != lattice:
            raise ValueError("lattice mismatch between trajectories")
    if t == 0:
        return SpectralField.zeros(lattice), 0.0
    k = len(trajs)
    scale = oscillation_scale(lattice, k)
    edges = _panel_edges(t, scale)
    nodes, weights = _gl_nodes(config.quad_order)

    def evaluate(splits: int) -> np.ndarray:
        total = np.zeros(lattice.shape, dtype=np.complex128)
        for left, right in zip(edges[:-1], edges[1:]):
            sub = np.linspace(left, right, splits + 1)
            for a, b in zip(sub[:-1], sub[1:]):
                mid = 0.5 * (a + b)
                half = 0.5 * (b - a)
                for node, weight in zip(nodes, weights):
                    tp = mid + half * node
                    prod = _product_at(trajs, tp, config.max_padded_points)
                    total += (half * weight) * multiplier_profile("W", t - tp, lattice) * prod.coeffs
        return total

    prev = evaluate(1)
    achieved = math.inf
    for refine in range(1, config.quad_max_refine + 1):
        cur = evaluate(2 ** refine)
        diff = SpectralField(lattice, cur - prev, copy=False)
        ref_norm = max(1.0, fl_norm(SpectralField(lattice, cur, copy=False), 0.0, 1.0))
        achieved = fl_norm(diff, 0.0, 1.0) / ref_norm
        if achieved <= config.quad_tol:
            return SpectralField(lattice, -cur, copy=False), achieved
        prev = cur
    raise AccuracyError(
        f"Duhamel quadrature did not reach tol {config.quad_tol} "
        f"within {config.quad_max_refine} refinements",
        achieved=achieved,
    )


def duhamel_Ik(
    trajs,
    t: float,
    config: RunConfig = DEFAULT,
) -> SpectralField:
    """Duhamel integral of k field trajectories at time t.

    Composite Gauss-Legendre on geometric panels; each refinement halves
    every panel, and the integration stops once two successive refinements
    agree within the configured tolerance (measured in the Wiener norm,
    relative to the result).  Raises AccuracyError with the achieved
    estimate if the refinement cap is hit first.
    """
    field, _ = _duhamel_with_error(trajs, t, config)
    return field


# ---------------------------------------------------------------------------
# Picard iterates
# ---------------------------------------------------------------------------

def _composition_multisets(total: int, parts: int):
    """Sorted compositions with their multinomial multiplicities.

    The Duhamel integrand only sees the pointwise product of its
    arguments, which is permutation invariant, so ordered compositions
    collapse onto sorted ones with a counting factor.
    """
    groups: dict[tuple, int] = {}
    for combo in compositions(total, parts):
        key = tuple(sorted(combo))
        groups[key] = groups.get(key, 0) + 1
    return sorted(groups.items())


@dataclass
class IterateTrajectory:
    """Per-level Picard trajectories on a shared master time grid."""

    lattice: FrequencyLattice
    k: int
    times: np.ndarray
    levels: list = field(repr=False)
    level_values: list = field(repr=False)
    quad_errors: list = field(default_factory=list)

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def level_field(self, j: int, time_index: int) -> SpectralField:
        return SpectralField(self.lattice, self.level_values[j][time_index], copy=False)

    def partial_sum_values(self, through: int | None = None) -> np.ndarray:
        through = self.depth if through is None else through
        return sum(self.level_values[j] for j in range(through + 1))

    def partial_sum_trajectory(self, through: int | None = None) -> SampledTrajectory:
        return SampledTrajectory(self.times, self.partial_sum_values(through), self.lattice)

    def level_norms(self, s: float, *, kind: str = "hs") -> list[list[tuple[float, float]]]:
        out = []
        for values in self.level_values:
            rows = []
            for t, coeffs in zip(self.times, values):
                f = SpectralField(self.lattice, coeffs, copy=False)
                norm = hs_norm(f, s) if kind == "hs" else fl_norm(f, 0.0, 1.0)
                rows.append((float(t), norm))
            out.append(rows)
        return out


def master_grid(lattice: FrequencyLattice, k: int, T: float, config: RunConfig) -> np.ndarray:
    floor = 0.5 / oscillation_scale(lattice, 1)
    return time_grid(T, per_octave=config.grid_per_octave, floor=floor)


def _append_level(iterates: "IterateTrajectory", config: RunConfig) -> None:
    """Compute the next Picard level in place from the stored lower levels."""
    j = iterates.depth + 1
    lattice = iterates.lattice
    times = iterates.times
    stack = np.zeros((len(times),) + lattice.shape, dtype=np.complex128)
    worst = 0.0
    for combo, multiplicity in _composition_multisets(j - 1, iterates.k):
        trajs = [iterates.levels[l] for l in combo]
        for qi, t in enumerate(times):
            if t == 0.0:
                continue
            try:
                term, err = _duhamel_with_error(trajs, float(t), config)
            except AccuracyError as exc:
                raise AccuracyError(
                    f"level {j} quadrature failed at t={t}: {exc}", achieved=exc.achieved
                ) from exc
            worst = max(worst, err)
            stack[qi] += multiplicity * term.coeffs
    iterates.levels.append(SampledTrajectory(times, stack, lattice))
    iterates.level_values.append(stack)
    iterates.quad_errors.append(worst)


def xi_iterates(
    pair: FieldPair,
    T: float,
    J_max: int,
    k: int,
    config: RunConfig = DEFAULT,
    times: np.ndarray | None = None,
) -> IterateTrajectory:
    """Compute Picard levels 0..J_max of the data pair on [0, T].

    Level j is assembled from the composition recursion over lower levels;
    level 0 stays an exact linear-flow closure so that inner quadrature
    never interpolates it.
    """
    if J_max < 0:
        raise ValueError(f"J_max must be >= 0, got {J_max}")
    lattice = pair.lattice
    if times is None:
        times = master_grid(lattice, k, T, config)
    times = np.asarray(times, dtype=float)
    base = LinearFlowTrajectory(pair)
    iterates = IterateTrajectory(
        lattice=lattice,
        k=k,
        times=times,
        levels=[base],
        level_values=[np.stack([base.values(t) for t in times])],
        quad_errors=[0.0],
    )
    for _ in range(J_max):
        _append_level(iterates, config)
    return iterates


def eval_tree(
    tree: Tree,
    pair: FieldPair,
    T: float,
    k: int,
    config: RunConfig = DEFAULT,
    times: np.ndarray | None = None,
):
    """Trajectory of one tree term: leaves are the linear flow, internal
    nodes apply the Duhamel operator to their children."""
    lattice = pair.lattice
    if times is None:
        times = master_grid(lattice, k, T, config)
    if tree.is_leaf:
        return LinearFlowTrajectory(pair)
    if len(tree.children) != k:
        raise ValueError(f"internal nodes must have {k} children")
    children = [eval_tree(child, pair, T, k, config, times) for child in tree.children]
    stack = np.zeros((len(times),) + lattice.shape, dtype=np.complex128)
    for qi, t in enumerate(times):
        if t == 0.0:
            continue
        stack[qi] = duhamel_Ik(children, float(t), config).coeffs
    return SampledTrajectory(times, stack, lattice)


def sum_tree_level(
    j: int,
    pair: FieldPair,
    T: float,
    k: int,
    config: RunConfig = DEFAULT,
    times: np.ndarray | None = None,
) -> np.ndarray:
    """Sum of all tree terms with j internal nodes, on the master grid.

    Test oracle for the composition recursion of :func:`xi_iterates`.
    """
    lattice = pair.lattice
    if times is None:
        times = master_grid(lattice, k, T, config)
    total = np.zeros((len(times),) + lattice.shape, dtype=np.complex128)
    for tree in enumerate_trees(j, k):
        traj = eval_tree(tree, pair, T, k, config, times)
        if isinstance(traj, LinearFlowTrajectory):
            total += np.stack([traj.values(t) for t in times])
        else:
            total += traj.stored
    return total


# ---------------------------------------------------------------------------
# series solver (Wiener-algebra regime)
# ---------------------------------------------------------------------------

@dataclass
class SeriesSolution:
    iterates: IterateTrajectory
    T: float
    levels_used: int
    level_fl_norms: list[float]
    tail_ratio: float
    tail_estimate: float
    converged: bool
    residual: float

    def solution_field(self, time_index: int = -1) -> SpectralField:
        values = self.iterates.partial_sum_values()
        return SpectralField(self.iterates.lattice, values[time_index], copy=False)


def solve_series(
    pair: FieldPair,
    k: int,
    T: float | None = None,
    tol: float = 1e-8,
    J_cap: int = 12,
    config: RunConfig = DEFAULT,
) -> SeriesSolution:
    """Truncated power-series solution in the Wiener algebra.

    The horizon defaults to ``safety * min(M^{-(k-1)/2}, 1)`` where M is
    the Wiener size of the data.  Levels are added until the estimated
    tail in FL^{0,1} drops below ``tol`` or the cap is reached; level
    norms that stop decaying raise DivergenceError with the history.
    """
    M = pair_fl1_norm(pair)
    if M == 0.0:
        lattice = pair.lattice
        times = master_grid(lattice, k, T if T else 1.0, config)
        iterates = xi_iterates(pair, T if T else 1.0, 0, k, config, times)
        return SeriesSolution(iterates, T if T else 1.0, 0, [0.0], 0.0, 0.0, True, 0.0)
    if T is None:
        T = config.series_time_safety * min(M ** (-(k - 1) / 2.0), 1.0)
    lattice = pair.lattice
    times = master_grid(lattice, k, T, config)
    iterates = xi_iterates(pair, T, 0, k, config, times)
    level_fl = [fl_norm(iterates.level_field(0, len(times) - 1), 0.0, 1.0)]
    tail = math.inf
    ratio = math.inf
    j = 0
    while j < J_cap:
        j += 1
        _append_level(iterates, config)
        level_fl.append(fl_norm(iterates.level_field(j, len(times) - 1), 0.0, 1.0))
        if level_fl[-2] > 0:
            ratio = level_fl[-1] / level_fl[-2]
        if j >= 2 and level_fl[-1] >= level_fl[-2] and level_fl[-2] >= level_fl[-3] > 0:
            raise DivergenceError(
                f"level norms stopped decaying at level {j}", history=level_fl
            )
        tail = level_fl[-1] * ratio / (1.0 - ratio) if ratio < 1.0 else math.inf
        if tail <= tol:
            break
    converged = tail <= tol
    total = iterates.partial_sum_trajectory()
    last = len(times) - 1
    flow = apply_linear_flow(float(times[last]), pair)
    nonlinear = duhamel_Ik([total] * k, float(times[last]), config)
    residual_field = SpectralField(
        lattice,
        total.stored[last] - flow.coeffs - nonlinear.coeffs,
        copy=False,
    )
    residual = fl_norm(residual_field, 0.0, 1.0)
    return SeriesSolution(
        iterates=iterates,
        T=T,
        levels_used=j,
        level_fl_norms=level_fl,
        tail_ratio=ratio,
        tail_estimate=tail,
        converged=converged,
        residual=residual,
    )


# ---------------------------------------------------------------------------
# contraction solver (negative-Sobolev well-posedness regime)
# ---------------------------------------------------------------------------

ADMISSIBLE_CONTRACTION = ((1, 2), (2, 2), (3, 2), (1, 3))


@dataclass
class ContractionResult:
    times: np.ndarray
    values: np.ndarray
    iterations: int
    distances: list[float]
    ratios: list[float]
    converged: bool
    residual: float
    s: float
    k: int

    def trajectory(self, lattice: FrequencyLattice) -> SampledTrajectory:
        return SampledTrajectory(self.times, self.values, lattice)

    def samples(self, lattice: FrequencyLattice):
        return [
            (float(t), SpectralField(lattice, v, copy=False))
            for t, v in zip(self.times, self.values)
        ]


def solve_contraction(
    pair: FieldPair,
    T: float,
    s: float,
    k: int,
    tol: float = 1e-8,
    max_iter: int = 60,
    config: RunConfig = DEFAULT,
) -> ContractionResult:
    """Fixed-point iteration of the mild formulation in the X(T) norm.

    Admissible for (d, k) in {(1,2), (2,2), (3,2), (1,3)} and regularity
    strictly between the viscous threshold and zero.  Divergence (X-norm
    distance growing over three consecutive iterations) is reported, not
    raised, so callers can inspect the history.
    """
    d = pair.lattice.d
    if (d, k) not in ADMISSIBLE_CONTRACTION:
        raise RegimeError(
            f"(d, k) = ({d}, {k}) outside the admissible contraction range "
            f"{ADMISSIBLE_CONTRACTION}"
        )
    th = thresholds(d, k)
    if not (float(th.s_vis) < s <= 0.0):
        raise RegimeError(
            f"regularity s = {s} outside the contraction window ({float(th.s_vis)}, 0]"
        )
    if not 0 < T < 1:
        raise RegimeError(f"horizon must satisfy 0 < T < 1, got {T}")
    lattice = pair.lattice
    times = master_grid(lattice, k, T, config)
    flow = np.stack([apply_linear_flow(float(t), pair).coeffs for t in times])
    current = flow.copy()
    distances: list[float] = []
    ratios: list[float] = []
    converged = False
    iterations = 0
    for iteration in range(1, max_iter + 1):
        iterations = iteration
        traj = SampledTrajectory(times, current, lattice)
        updated = flow.copy()
        for qi, t in enumerate(times):
            if t == 0.0:
                continue
            updated[qi] += duhamel_Ik([traj] * k, float(t), config).coeffs
        diff_samples = [
            (float(t), SpectralField(lattice, u - c, copy=False))
            for t, u, c in zip(times, updated, current)
        ]
        c_part, y_part = xt_norm(diff_samples, T, s, k)
        dist = c_part + y_part
        distances.append(dist)
        if len(distances) >= 2 and distances[-2] > 0:
            ratios.append(distances[-1] / distances[-2])
        current = updated
        if dist <= tol:
            converged = True
            break
        if len(distances) >= 4 and all(
            distances[-i] > distances[-i - 1] for i in (1, 2, 3)
        ):
            break
    traj = SampledTrajectory(times, current, lattice)
    last = len(times) - 1
    nonlinear = duhamel_Ik([traj] * k, float(times[last]), config)
    residual_field = SpectralField(
        lattice, current[last] - flow[last] - nonlinear.coeffs, copy=False
    )
    residual = fl_norm(residual_field, 0.0, 1.0)
    return ContractionResult(
        times=times,
        values=current,
        iterations=iterations,
        distances=distances,
        ratios=ratios,
        converged=converged,
        residual=residual,
        s=s,
        k=k,
    )


# ---------------------------------------------------------------------------
# trajectory export
# ---------------------------------------------------------------------------

def export_trajectory_csv(iterates: IterateTrajectory, s: float, path: str) -> None:
    """Write per-level norms as CSV with columns (j, t, hs_norm, fl01_norm)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["j", "t", f"hs_norm(s={s})", "fl01_norm"])
        for j, values in enumerate(iterates.level_values):
            for t, coeffs in zip(iterates.times, values):
                f = SpectralField(iterates.lattice, coeffs, copy=False)
                writer.writerow([j, f"{t!r}", f"{hs_norm(f, s)!r}", f"{fl_norm(f, 0.0, 1.0)!r}"])
