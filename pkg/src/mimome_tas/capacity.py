"""Log-det link capacity and secrecy capacity of a MIMO wiretap channel.

All SNR arguments are *normalized* linear SNRs, i.e. the per-receive-antenna
SNR already divided by the number of selected transmit antennas.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import DimensionError, NumericalError

_LOG2E = 1.0 / math.log(2.0)


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (float(x_db) / 10.0)


def _check_rho(rho: float) -> float:
    rho = float(rho)
    if not (rho > 0.0 and math.isfinite(rho)):
        raise ValueError(f"normalized SNR must be positive and finite, got {rho}")
    return rho


def link_capacity(H, rho: float) -> float:
    """log2 det(I + rho H H^H) in bits/s/Hz, via Cholesky of the Gram form."""
    H = np.asarray(H, dtype=np.complex128)
    rho = _check_rho(rho)
    if H.ndim != 2:
        raise DimensionError(f"expected a 2-D channel, got shape {H.shape}")
    if H.shape[1] == 0:
        return 0.0
    return float(link_capacity_many(H[np.newaxis], rho)[0])


def link_capacity_many(Hs, rho: float) -> np.ndarray:
    """Vectorized :func:`link_capacity` over a stack of shape ``(M, rows, cols)``."""
    Hs = np.asarray(Hs, dtype=np.complex128)
    rows = Hs.shape[1]
    G = rho * (Hs @ Hs.conj().transpose(0, 2, 1))
    G[:, np.arange(rows), np.arange(rows)] += 1.0
    try:
        chol = np.linalg.cholesky(G)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("Gram matrix is not positive definite") from exc
    diag = np.diagonal(chol, axis1=1, axis2=2).real
    caps = 2.0 * _LOG2E * np.log(diag).sum(axis=1)
    if not np.all(np.isfinite(caps)):
        raise NumericalError("non-finite capacity")
    # det >= 1 exactly; guard tiny negative rounding on all-zero channels
    return np.maximum(caps, 0.0)


def secrecy_gap(Hm_sub, He_sub, rho_m: float, rho_e: float) -> float:
    """Unclamped ``C_m - C_e`` for one selected antenna set."""
    Hm_sub = np.asarray(Hm_sub)
    He_sub = np.asarray(He_sub)
    if Hm_sub.shape[1] != He_sub.shape[1]:
        raise DimensionError(
            f"dimension mismatch: legitimate link has {Hm_sub.shape[1]} columns, "
            f"eavesdropper link has {He_sub.shape[1]}"
        )
    return link_capacity(Hm_sub, rho_m) - link_capacity(He_sub, rho_e)


def secrecy_capacity_direct(Hm_sub, He_sub, rho_m: float, rho_e: float) -> float:
    return max(0.0, secrecy_gap(Hm_sub, He_sub, rho_m, rho_e))
