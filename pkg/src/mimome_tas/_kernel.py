"""Compiled branch-and-bound kernel covering both scenarios.

Mirrors :func:`mimome_tas.tree.run_bab` with the rank-one recursions inlined
and an explicit per-depth stack instead of recursion. With ``use_e`` false the
eavesdropper arrays are ignored and the search is the no-CSIE one.
"""
from __future__ import annotations

import math

import numba as nb
import numpy as np

from .errors import NumericalError

_LOG2E = 1.0 / math.log(2.0)
PHI_CLAMP = 1e-12


@nb.njit(cache=True)
def _downdate(T_src, T_dst, phi_src, phi_dst, Hh, k, rho, n_total):
    """Write the state after appending column ``k`` into the ``*_dst`` buffers.

    Returns the most negative cache value seen before clamping (0.0 if none).
    """
    n = T_src.shape[0]
    t = np.empty(n, dtype=np.complex128)
    scale = 1.0 / math.sqrt(1.0 / rho + phi_src[k])
    for r in range(n):
        acc = 0j
        for c in range(n):
            acc += T_src[r, c] * Hh[k, c].conjugate()
        t[r] = acc * scale
    for r in range(n):
        for c in range(n):
            T_dst[r, c] = T_src[r, c] - t[r] * t[c].conjugate()
    worst = 0.0
    for a in range(k + 1):
        phi_dst[a] = phi_src[a]
    for a in range(k + 1, n_total):
        xi = 0j
        for r in range(n):
            xi += Hh[a, r] * t[r]
        v = phi_src[a] - (xi.real * xi.real + xi.imag * xi.imag)
        if v < 0.0:
            if v < worst:
                worst = v
            v = 0.0
        phi_dst[a] = v
    return worst


@nb.njit(cache=True)
def bab_kernel(Hmh, Heh, rho_m, rho_e, use_e, Z, L, eps, bound, init_path):
    n_total, nr = Hmh.shape
    ne = Heh.shape[1]
    log2e = 1.0 / math.log(2.0)

    Tm = np.zeros((L, nr, nr), dtype=np.complex128)
    Te = np.zeros((L, ne, ne), dtype=np.complex128)
    phim = np.zeros((L, n_total))
    phie = np.zeros((L, n_total))
    ctil = np.zeros(L)
    scores = np.zeros((L, n_total))
    order = np.zeros((L, n_total), dtype=np.int64)
    ptr = np.zeros(L, dtype=np.int64)
    cnt = np.zeros(L, dtype=np.int64)
    lo_at = np.zeros(L, dtype=np.int64)
    path = np.zeros(L, dtype=np.int64)
    best = init_path.copy()
    visited = 0
    worst = 0.0

    for r in range(nr):
        Tm[0, r, r] = 1.0
    for r in range(ne):
        Te[0, r, r] = 1.0
    for a in range(n_total):
        s = 0.0
        for r in range(nr):
            z = Hmh[a, r]
            s += z.real * z.real + z.imag * z.imag
        phim[0, a] = s
        s = 0.0
        for r in range(ne):
            z = Heh[a, r]
            s += z.real * z.real + z.imag * z.imag
        phie[0, a] = s

    d = 0
    entering = True
    while d >= 0:
        if entering:
            entering = False
            lo = path[d - 1] + 1 if d > 0 else 0
            hi = n_total - L + d + 1
            m = hi - lo
            visited += m
            for i in range(m):
                g = math.log1p(rho_m * phim[d, lo + i]) * log2e
                if use_e:
                    g -= math.log1p(rho_e * phie[d, lo + i]) * log2e
                scores[d, i] = ctil[d] + g - Z[d]
            if d == L - 1:
                bi = 0
                for i in range(1, m):
                    if scores[d, i] > scores[d, bi]:
                        bi = i
                if scores[d, bi] > bound:
                    bound = scores[d, bi]
                    for j in range(d):
                        best[j] = path[j]
                    best[d] = lo + bi
                d -= 1
                continue
            order[d, :m] = np.argsort(-scores[d, :m], kind="mergesort")
            ptr[d] = 0
            cnt[d] = m
            lo_at[d] = lo

        if ptr[d] >= cnt[d]:
            d -= 1
            continue
        i = order[d, ptr[d]]
        ptr[d] += 1
        s = scores[d, i]
        if not (s > bound + eps):
            d -= 1
            continue
        k = lo_at[d] + i
        path[d] = k
        w = _downdate(Tm[d], Tm[d + 1], phim[d], phim[d + 1], Hmh, k, rho_m, n_total)
        if w < worst:
            worst = w
        if use_e:
            w = _downdate(Te[d], Te[d + 1], phie[d], phie[d + 1], Heh, k, rho_e, n_total)
            if w < worst:
                worst = w
        ctil[d + 1] = s
        d += 1
        entering = True

    return best, bound, visited, worst


def run_kernel(Hm, He, rho_m, rho_e, Z, L, eps=0.0, initial=None, initial_bound=-np.inf):
    """Call the compiled search; ``initial`` is a 1-based warm-start subset."""
    Hmh = np.ascontiguousarray(np.asarray(Hm, dtype=np.complex128).conj().T)
    use_e = He is not None
    if use_e:
        Heh = np.ascontiguousarray(np.asarray(He, dtype=np.complex128).conj().T)
    else:
        Heh = np.zeros((Hmh.shape[0], 1), dtype=np.complex128)
        rho_e = 1.0
    init = np.full(L, -1, dtype=np.int64)
    if initial is not None:
        init[:] = [i - 1 for i in initial]
    best, bound, visited, worst = bab_kernel(
        Hmh, Heh, float(rho_m), float(rho_e), use_e,
        np.ascontiguousarray(Z, dtype=np.float64), int(L), float(eps),
        float(initial_bound), init,
    )
    if worst < -PHI_CLAMP:
        raise NumericalError(f"quadratic-form cache drifted to {worst:.3e}")
    return tuple(int(k) + 1 for k in best), float(bound), int(visited)
