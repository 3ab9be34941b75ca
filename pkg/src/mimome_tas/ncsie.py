"""Antenna selection without eavesdropper CSI: maximize the legitimate capacity.

The path state keeps ``T = (I + rho H_n H_n^H)^-1`` for the columns chosen so
far and the quadratic forms ``phi[k] = h_k^H T h_k``. Appending antenna ``k``
raises the capacity by ``log2(1 + rho * phi[k])``, and both caches are
downdated in O(Nt * Nr) with a rank-one Sherman-Morrison step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .capacity import link_capacity
from .channel import as_channel
from .errors import NumericalError
from .tree import (
    BabOptions,
    SelectionResult,
    check_shape,
    level_windows,
    SearchOutcome,
    run_bab,
)

PHI_CLAMP = 1e-12
_LOG2E = 1.0 / math.log(2.0)


@dataclass(frozen=True)
class LevelBounds:
    zeta_sq: np.ndarray
    Z: np.ndarray


@dataclass(frozen=True)
class NcsieState:
    T: np.ndarray
    phi: np.ndarray
    c_tilde: float = 0.0


def column_sq_norms(H: np.ndarray) -> np.ndarray:
    return (H.real**2 + H.imag**2).sum(axis=0)


def log2_gain(rho: float, phi) -> np.ndarray:
    return np.log1p(rho * phi) * _LOG2E


def rank_one_downdate(T, phi, H, Hh, K: int, rho: float):
    """Append column ``K`` (0-based) to the path; returns the new ``(T, phi)``.

    Only ``phi[K+1:]`` is refreshed; entries at or below ``K`` can never be
    picked again on this path and are left as they were.
    """
    t = (T @ H[:, K]) / math.sqrt(1.0 / rho + phi[K])
    T_next = T - np.outer(t, t.conj())
    xi = Hh[K + 1:] @ t
    phi_next = phi.copy()
    tail = phi_next[K + 1:]
    tail -= xi.real**2 + xi.imag**2
    if tail.size and tail.min() < 0.0:
        if tail.min() < -PHI_CLAMP:
            raise NumericalError(f"quadratic-form cache drifted to {tail.min():.3e}")
        np.maximum(tail, 0.0, out=tail)
    return T_next, phi_next


def precompute_bounds_ncsie(H, rho_m: float, L: int) -> LevelBounds:
    """Per-level maxima of the column squared norms and the matching ``Z``."""
    H = as_channel(H)
    check_shape(H.shape[1], L)
    zeta_sq = level_windows(column_sq_norms(H), L, np.max)
    return LevelBounds(zeta_sq, log2_gain(rho_m, zeta_sq))


def initial_state_ncsie(H) -> NcsieState:
    H = np.asarray(H, dtype=np.complex128)
    return NcsieState(np.eye(H.shape[0], dtype=np.complex128), column_sq_norms(H))


def delta_ncsie(state: NcsieState, k: int, rho_m: float) -> float:
    """Capacity gain from appending 1-based antenna ``k``."""
    return float(log2_gain(rho_m, state.phi[k - 1]))


def advance_ncsie(state: NcsieState, H, K: int, rho_m: float, z: float = 0.0) -> NcsieState:
    """State after appending 1-based antenna ``K``; ``z`` is the level constant."""
    H = np.asarray(H, dtype=np.complex128)
    k = K - 1
    gain = log2_gain(rho_m, state.phi[k])
    T, phi = rank_one_downdate(state.T, state.phi, H, H.conj().T, k, rho_m)
    return NcsieState(T, phi, state.c_tilde + gain - z)


class NcsieDriver:
    scenario = "ncsie"

    def __init__(self, H, L: int, rho_m: float):
        self.H = as_channel(H, "Hm")
        self.Hh = np.ascontiguousarray(self.H.conj().T)
        self.rho_m = float(rho_m)
        self.n_total = self.H.shape[1]
        self.subset_size = L
        self.bounds = precompute_bounds_ncsie(self.H, self.rho_m, L)
        self.level_bounds = self.bounds.Z

    def root(self) -> NcsieState:
        return initial_state_ncsie(self.H)

    def deltas(self, state: NcsieState, lo: int, hi: int) -> np.ndarray:
        return log2_gain(self.rho_m, state.phi[lo:hi])

    def advance(self, state: NcsieState, k: int, z: float) -> NcsieState:
        c = state.c_tilde + log2_gain(self.rho_m, state.phi[k]) - z
        T, phi = rank_one_downdate(state.T, state.phi, self.H, self.Hh, k, self.rho_m)
        return NcsieState(T, phi, c)

    def objective(self, indices) -> float:
        return link_capacity(self.H[:, list(indices)], self.rho_m)


def select_ncsie(H, L: int, rho_m: float, options: BabOptions | None = None) -> SelectionResult:
    """Pick the ``L`` columns of ``H`` maximizing ``log2 det(I + rho_m H~ H~^H)``."""
    driver = NcsieDriver(H, L, rho_m)
    options = options or BabOptions()
    initial = None
    if options.warm_start:
        from .baselines import norm_based_select

        initial = norm_based_select(driver.H, L)
    if options.use_compiled():
        from ._kernel import run_kernel

        init_bound = -np.inf if initial is None else driver.objective([i - 1 for i in initial]) - float(driver.level_bounds.sum())
        indices, adjusted, visited = run_kernel(
            driver.H, None, driver.rho_m, None, driver.level_bounds, L,
            options.epsilon, initial, init_bound,
        )
        out = SearchOutcome(indices, adjusted, visited)
    else:
        out = run_bab(driver, options, initial)
    return SelectionResult(
        indices=out.indices,
        objective=driver.objective([i - 1 for i in out.indices]),
        adjusted_objective=out.adjusted_objective,
        visited_nodes=out.visited_nodes,
        scenario="ncsie",
    )
