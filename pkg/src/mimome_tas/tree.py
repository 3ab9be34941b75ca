"""Depth-first, best-first branch-and-bound over increasing index chains.

The search tree has one level per selected antenna. A node at level ``a``
holds an antenna index, and every root-to-leaf path is a strictly increasing
chain of ``L`` indices (so each size-``L`` subset appears exactly once).

A scenario driver supplies three things:

* ``level_bounds[a]``: the constant subtracted when the ``(a+1)``-th antenna is
  picked, chosen so that ``delta <= level_bounds[a]`` for every candidate at
  that level. The adjusted objective ``c`` is then non-increasing along a path,
  so a complete path's value is a valid lower bound for pruning.
* ``deltas(state, lo, hi)``: objective increments for 0-based candidates
  ``lo..hi-1`` given the state of the current path.
* ``advance(state, k, z)``: the state after appending antenna ``k``; its
  ``c_tilde`` is ``state.c_tilde + delta_k - z``.

A node counts as visited once its score has been computed. That includes
leaves, which are scored in one batch per parent.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Any, Callable, Protocol, Sequence

import numpy as np

from .errors import ProblemError


class ScenarioDriver(Protocol):
    n_total: int
    subset_size: int
    level_bounds: np.ndarray

    def root(self) -> Any: ...

    def deltas(self, state: Any, lo: int, hi: int) -> np.ndarray: ...

    def advance(self, state: Any, k: int, z: float) -> Any: ...

    def objective(self, indices: Sequence[int]) -> float: ...


# observer(depth, k, delta, z, parent_c, child_c); depth is the parent's, k is 1-based
Observer = Callable[[int, int, float, float, float, float], None]


@dataclass
class BabOptions:
    """Knobs for :func:`run_bab`.

    ``epsilon`` widens the pruning test to ``score > bound + epsilon``.
    ``warm_start`` seeds the incumbent with the norm-based subset instead of
    minus infinity. ``engine`` is ``"compiled"``, ``"python"`` or ``"auto"``
    (compiled unless an observer is attached); both visit the same nodes.
    """

    warm_start: bool = False
    epsilon: float = 0.0
    observer: Observer | None = None
    engine: str = "auto"

    def use_compiled(self) -> bool:
        if self.engine not in ("auto", "compiled", "python"):
            raise ProblemError(f"unknown engine {self.engine!r}")
        if self.engine == "compiled" and self.observer is not None:
            raise ProblemError("observers need the python engine")
        return self.engine == "compiled" or (self.engine == "auto" and self.observer is None)


@dataclass(frozen=True)
class SelectionResult:
    indices: tuple[int, ...]
    objective: float
    adjusted_objective: float
    visited_nodes: int
    scenario: str
    secrecy_capacity: float | None = None


@dataclass(frozen=True)
class SearchOutcome:
    indices: tuple[int, ...]  # 1-based, ascending
    adjusted_objective: float
    visited_nodes: int


def check_shape(n_total: int, subset_size: int) -> None:
    if not 1 <= subset_size <= n_total:
        raise ProblemError(
            f"cannot select L={subset_size} antennas out of Nt={n_total}"
        )


def level_candidates(a: int, n_total: int, subset_size: int) -> range:
    """1-based antenna indices that may appear at level ``a`` of the tree."""
    check_shape(n_total, subset_size)
    if not 1 <= a <= subset_size:
        raise ProblemError(f"level {a} outside 1..{subset_size}")
    return range(a, n_total - subset_size + a + 1)


def child_candidates(K: int, n: int, n_total: int, subset_size: int) -> range:
    """Children of a node holding antenna ``K`` at depth ``n`` (``K=0`` is the root)."""
    return range(K + 1, max(K + 1, n_total - subset_size + n + 2))


def tree_node_count(n_total: int, subset_size: int) -> int:
    """Number of non-root nodes in the full search tree."""
    check_shape(n_total, subset_size)
    return sum(comb(n_total - subset_size + a, a) for a in range(1, subset_size + 1))


def level_windows(values: np.ndarray, subset_size: int, reduce=np.max) -> np.ndarray:
    """Reduce ``values`` over each level's candidate window (length ``L``)."""
    n_total = values.shape[0]
    width = n_total - subset_size + 1
    windows = np.lib.stride_tricks.sliding_window_view(values, width)
    return reduce(windows, axis=1)


def run_bab(
    driver: ScenarioDriver,
    options: BabOptions | None = None,
    initial: Sequence[int] | None = None,
) -> SearchOutcome:
    """Run the search; ``initial`` (1-based) is the warm-start subset, if any."""
    options = options or BabOptions()
    n_total, L = driver.n_total, driver.subset_size
    check_shape(n_total, L)
    Z = np.asarray(driver.level_bounds, dtype=np.float64)
    eps = float(options.epsilon)
    observer = options.observer

    bound = -np.inf
    best: list[int] | None = None
    if initial is not None:
        best = [i - 1 for i in initial]
        bound = driver.objective(best) - float(Z.sum())
    visited = 0
    path: list[int] = []

    def expand(state, depth: int, last: int) -> None:
        nonlocal bound, best, visited
        lo, hi = last + 1, n_total - L + depth + 1
        z = Z[depth]
        c = state.c_tilde
        delta = driver.deltas(state, lo, hi)
        scores = c + delta - z
        visited += hi - lo
        if observer is not None:
            for i in range(hi - lo):
                observer(depth, lo + i + 1, float(delta[i]), float(z), float(c), float(scores[i]))

        if depth == L - 1:
            i = int(np.argmax(scores))
            if scores[i] > bound:
                bound = float(scores[i])
                best = path + [lo + i]
            return

        # stable sort keeps ascending antenna order among equal scores
        for i in np.argsort(-scores, kind="stable"):
            if not scores[i] > bound + eps:
                break
            k = lo + int(i)
            path.append(k)
            expand(driver.advance(state, k, z), depth + 1, k)
            path.pop()

    expand(driver.root(), 0, -1)
    assert best is not None
    return SearchOutcome(tuple(i + 1 for i in best), float(bound), visited)
