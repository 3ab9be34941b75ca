"""Antenna selection with full eavesdropper CSI: maximize ``C_m - C_e``.

Both links carry their own ``(T, phi)`` caches. The per-level constant uses
the largest legitimate column norm and the smallest eavesdropper quadratic
form under the all-antenna inverse ``(I + rho_e He He^H)^-1``. Any partial
path's eavesdropper quadratic form is at least that large, which keeps the
increment below the constant even though ``C_m - C_e`` itself is not monotone.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cholesky, solve_triangular

from .capacity import link_capacity
from .channel import as_channel
from .errors import DimensionError
from .ncsie import column_sq_norms, log2_gain, rank_one_downdate
from .tree import (
    BabOptions,
    SearchOutcome,
    SelectionResult,
    check_shape,
    level_windows,
    run_bab,
)


@dataclass(frozen=True)
class CsieLevelBounds:
    zeta_sq: np.ndarray
    eta: np.ndarray
    Z: np.ndarray


@dataclass(frozen=True)
class CsieState:
    T_m: np.ndarray
    T_e: np.ndarray
    phi_m: np.ndarray
    phi_e: np.ndarray
    c_tilde: float = 0.0


def full_selection_inverse(He, rho_e: float) -> np.ndarray:
    """``(I + rho_e He He^H)^-1`` over all transmit antennas."""
    He = np.asarray(He, dtype=np.complex128)
    G = np.eye(He.shape[0]) + rho_e * (He @ He.conj().T)
    Lc = cholesky(G, lower=True)
    Linv = solve_triangular(Lc, np.eye(He.shape[0]), lower=True)
    return Linv.conj().T @ Linv


def eavesdropper_quadratic_forms(He, rho_e: float) -> np.ndarray:
    """``h_k^H (I + rho_e He He^H)^-1 h_k`` for every column, via Cholesky."""
    He = np.asarray(He, dtype=np.complex128)
    G = np.eye(He.shape[0]) + rho_e * (He @ He.conj().T)
    W = solve_triangular(cholesky(G, lower=True), He, lower=True)
    return (W.real**2 + W.imag**2).sum(axis=0)


def eavesdropper_eta(He, rho_e: float, L: int) -> np.ndarray:
    He = as_channel(He, "He")
    check_shape(He.shape[1], L)
    return level_windows(eavesdropper_quadratic_forms(He, rho_e), L, np.min)


def precompute_bounds_csie(Hm, He, rho_m: float, rho_e: float, L: int) -> CsieLevelBounds:
    Hm = as_channel(Hm, "Hm")
    He = as_channel(He, "He")
    _check_pair(Hm, He)
    check_shape(Hm.shape[1], L)
    zeta_sq = level_windows(column_sq_norms(Hm), L, np.max)
    eta = eavesdropper_eta(He, rho_e, L)
    Z = log2_gain(rho_m, zeta_sq) - log2_gain(rho_e, eta)
    return CsieLevelBounds(zeta_sq, eta, Z)


def _check_pair(Hm, He) -> None:
    if Hm.shape[1] != He.shape[1]:
        raise DimensionError(
            f"dimension mismatch: Hm has {Hm.shape[1]} transmit antennas, He has {He.shape[1]}"
        )


def initial_state_csie(Hm, He) -> CsieState:
    Hm = np.asarray(Hm, dtype=np.complex128)
    He = np.asarray(He, dtype=np.complex128)
    return CsieState(
        np.eye(Hm.shape[0], dtype=np.complex128),
        np.eye(He.shape[0], dtype=np.complex128),
        column_sq_norms(Hm),
        column_sq_norms(He),
    )


def delta_csie(state: CsieState, k: int, rho_m: float, rho_e: float) -> float:
    """Secrecy-gap increment from appending 1-based antenna ``k``; may be negative."""
    i = k - 1
    return float(log2_gain(rho_m, state.phi_m[i]) - log2_gain(rho_e, state.phi_e[i]))


def advance_csie(state: CsieState, Hm, He, K: int, rho_m: float, rho_e: float,
                 z: float = 0.0) -> CsieState:
    Hm = np.asarray(Hm, dtype=np.complex128)
    He = np.asarray(He, dtype=np.complex128)
    gain = delta_csie(state, K, rho_m, rho_e)
    k = K - 1
    T_m, phi_m = rank_one_downdate(state.T_m, state.phi_m, Hm, Hm.conj().T, k, rho_m)
    T_e, phi_e = rank_one_downdate(state.T_e, state.phi_e, He, He.conj().T, k, rho_e)
    return CsieState(T_m, T_e, phi_m, phi_e, state.c_tilde + gain - z)


class CsieDriver:
    scenario = "csie"

    def __init__(self, Hm, He, L: int, rho_m: float, rho_e: float):
        self.Hm = as_channel(Hm, "Hm")
        self.He = as_channel(He, "He")
        _check_pair(self.Hm, self.He)
        self.Hmh = np.ascontiguousarray(self.Hm.conj().T)
        self.Heh = np.ascontiguousarray(self.He.conj().T)
        self.rho_m = float(rho_m)
        self.rho_e = float(rho_e)
        self.n_total = self.Hm.shape[1]
        self.subset_size = L
        self.bounds = precompute_bounds_csie(self.Hm, self.He, self.rho_m, self.rho_e, L)
        self.level_bounds = self.bounds.Z

    def root(self) -> CsieState:
        return initial_state_csie(self.Hm, self.He)

    def deltas(self, state: CsieState, lo: int, hi: int) -> np.ndarray:
        return log2_gain(self.rho_m, state.phi_m[lo:hi]) - log2_gain(self.rho_e, state.phi_e[lo:hi])

    def advance(self, state: CsieState, k: int, z: float) -> CsieState:
        gain = log2_gain(self.rho_m, state.phi_m[k]) - log2_gain(self.rho_e, state.phi_e[k])
        T_m, phi_m = rank_one_downdate(state.T_m, state.phi_m, self.Hm, self.Hmh, k, self.rho_m)
        T_e, phi_e = rank_one_downdate(state.T_e, state.phi_e, self.He, self.Heh, k, self.rho_e)
        return CsieState(T_m, T_e, phi_m, phi_e, state.c_tilde + gain - z)

    def objective(self, indices) -> float:
        idx = list(indices)
        return link_capacity(self.Hm[:, idx], self.rho_m) - link_capacity(self.He[:, idx], self.rho_e)


def select_csie(Hm, He, L: int, rho_m: float, rho_e: float,
                options: BabOptions | None = None) -> SelectionResult:
    driver = CsieDriver(Hm, He, L, rho_m, rho_e)
    options = options or BabOptions()
    initial = None
    if options.warm_start:
        from .baselines import norm_based_select

        initial = norm_based_select(driver.Hm, L)
    if options.use_compiled():
        from ._kernel import run_kernel

        init_bound = -np.inf if initial is None else driver.objective([i - 1 for i in initial]) - float(driver.level_bounds.sum())
        indices, adjusted, visited = run_kernel(
            driver.Hm, driver.He, driver.rho_m, driver.rho_e, driver.level_bounds, L,
            options.epsilon, initial, init_bound,
        )
        out = SearchOutcome(indices, adjusted, visited)
    else:
        out = run_bab(driver, options, initial)
    objective = driver.objective([i - 1 for i in out.indices])
    return SelectionResult(
        indices=out.indices,
        objective=objective,
        adjusted_objective=out.adjusted_objective,
        visited_nodes=out.visited_nodes,
        scenario="csie",
        secrecy_capacity=max(0.0, objective),
    )
