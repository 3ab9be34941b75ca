"""Exhaustive-search oracle and the norm-based heuristic."""
from __future__ import annotations

from itertools import combinations, islice
from math import comb

import numpy as np

from .capacity import link_capacity_many
from .channel import as_channel
from .errors import BudgetError, DimensionError, ProblemError
from .tree import SelectionResult, check_shape, tree_node_count

DEFAULT_ES_CAP = 10**7
_CHUNK = 8192


def check_es_budget(n_total: int, subset_size: int, cap: int = DEFAULT_ES_CAP) -> int:
    n_subsets = comb(n_total, subset_size)
    if n_subsets > cap:
        raise BudgetError(
            f"exhaustive search over C({n_total},{subset_size})={n_subsets} subsets "
            f"exceeds the cap of {cap}"
        )
    return n_subsets


def exhaustive_select(
    Hm,
    L: int,
    rho_m: float,
    He=None,
    rho_e: float | None = None,
    scenario: str = "ncsie",
    cap: int = DEFAULT_ES_CAP,
) -> SelectionResult:
    """Evaluate every size-``L`` subset in lexicographic order.

    The objective is the legitimate capacity (``ncsie``) or the unclamped
    secrecy gap (``csie``). Ties keep the lexicographically first subset.
    """
    Hm = as_channel(Hm, "Hm")
    n_total = Hm.shape[1]
    check_shape(n_total, L)
    if scenario not in ("ncsie", "csie"):
        raise ProblemError(f"unknown scenario {scenario!r}")
    if scenario == "csie":
        if He is None or rho_e is None:
            raise ProblemError("csie exhaustive search needs He and rho_e")
        He = as_channel(He, "He")
        if He.shape[1] != n_total:
            raise DimensionError(
                f"dimension mismatch: Hm has {n_total} transmit antennas, He has {He.shape[1]}"
            )
    check_es_budget(n_total, L, cap)

    best_val = -np.inf
    best_idx: tuple[int, ...] | None = None
    subsets = combinations(range(n_total), L)
    while True:
        chunk = np.array(list(islice(subsets, _CHUNK)), dtype=np.intp)
        if chunk.size == 0:
            break
        vals = link_capacity_many(Hm[:, chunk].transpose(1, 0, 2), rho_m)
        if scenario == "csie":
            vals = vals - link_capacity_many(He[:, chunk].transpose(1, 0, 2), rho_e)
        i = int(np.argmax(vals))
        if vals[i] > best_val:
            best_val = float(vals[i])
            best_idx = tuple(int(k) + 1 for k in chunk[i])

    return SelectionResult(
        indices=best_idx,
        objective=best_val,
        adjusted_objective=float("nan"),
        visited_nodes=tree_node_count(n_total, L),
        scenario=scenario,
        secrecy_capacity=max(0.0, best_val) if scenario == "csie" else None,
    )


def norm_based_select(Hm, L: int) -> tuple[int, ...]:
    """1-based indices of the ``L`` largest column norms, ascending."""
    Hm = as_channel(Hm, "Hm")
    n_total = Hm.shape[1]
    check_shape(n_total, L)
    norms = (Hm.real**2 + Hm.imag**2).sum(axis=0)
    # primary key: descending norm; secondary: ascending index
    order = np.lexsort((np.arange(n_total), -norms))
    return tuple(sorted(int(k) + 1 for k in order[:L]))
