import itertools

import numpy as np
import pytest

from mimome_tas.capacity import db_to_linear
from mimome_tas.channel import generate_rayleigh
from mimome_tas.csie import select_csie
from mimome_tas.errors import ProblemError
from mimome_tas.ncsie import NcsieDriver, select_ncsie
from mimome_tas.tree import (
    BabOptions,
    child_candidates,
    level_candidates,
    run_bab,
    tree_node_count,
)

from conftest import brute_best

PY = BabOptions(engine="python")


def test_level_candidates_fig1_tree():
    assert list(level_candidates(1, 6, 2)) == [1, 2, 3, 4, 5]
    assert list(level_candidates(2, 6, 2)) == [2, 3, 4, 5, 6]
    assert list(level_candidates(1, 4, 4)) == [1]
    with pytest.raises(ProblemError):
        level_candidates(3, 6, 2)


def test_child_candidates():
    assert list(child_candidates(1, 1, 6, 2)) == [2, 3, 4, 5, 6]
    assert list(child_candidates(5, 1, 6, 2)) == [6]
    assert list(child_candidates(0, 0, 6, 2)) == [1, 2, 3, 4, 5]
    assert list(child_candidates(6, 1, 6, 2)) == []
    assert list(child_candidates(4, 1, 6, 3)) == [5]
    assert list(child_candidates(5, 1, 6, 3)) == []


def _enumerate_tree(n_total, L):
    """Walk the increasing-index tree by brute force and count non-root nodes."""
    count = 0
    stack = [(0, 0)]
    while stack:
        K, n = stack.pop()
        if n == L:
            continue
        for k in range(K + 1, n_total + 1):
            if n_total - k >= L - n - 1:
                count += 1
                stack.append((k, n + 1))
    return count


@pytest.mark.parametrize("nt,L", [(6, 2), (4, 4), (10, 3), (12, 4), (7, 1)])
def test_tree_node_count(nt, L):
    assert tree_node_count(nt, L) == _enumerate_tree(nt, L)


def test_fig1_tree_size():
    assert tree_node_count(6, 2) == 20


def test_infeasible_shape():
    with pytest.raises(ProblemError):
        select_ncsie(generate_rayleigh(2, 3, 0), 4, 1.0)
    with pytest.raises(ProblemError):
        select_ncsie(generate_rayleigh(2, 3, 0), 0, 1.0)


@pytest.mark.parametrize("engine", ["python", "compiled"])
def test_full_selection_is_single_chain(engine):
    H = generate_rayleigh(3, 5, 4)
    res = select_ncsie(H, 5, 2.0, BabOptions(engine=engine))
    assert res.indices == (1, 2, 3, 4, 5)
    assert res.visited_nodes == 5


@pytest.mark.parametrize("engine", ["python", "compiled"])
def test_single_antenna_is_best_column(engine):
    H = generate_rayleigh(4, 9, 5)
    res = select_ncsie(H, 1, 3.0, BabOptions(engine=engine))
    norms = (np.abs(H) ** 2).sum(axis=0)
    assert res.indices == (int(np.argmax(norms)) + 1,)
    assert res.visited_nodes == 9


def test_matches_brute_force_nt10_l3():
    for seed in range(10):
        H = generate_rayleigh(4, 10, seed)
        res = select_ncsie(H, 3, 2.0, PY)
        assert res.objective == pytest.approx(brute_best(H, 3, 2.0), abs=1e-9)


def test_pruning_soundness_by_replay():
    # no subset's adjusted objective beats the final incumbent
    for seed in range(8):
        H = generate_rayleigh(4, 9, seed)
        driver = NcsieDriver(H, 3, 3.0)
        out = run_bab(driver, PY)
        zsum = driver.level_bounds.sum()
        for S in itertools.combinations(range(9), 3):
            assert driver.objective(S) - zsum <= out.adjusted_objective + 1e-9


def test_incumbent_matches_best_path():
    H = generate_rayleigh(4, 12, 3)
    driver = NcsieDriver(H, 4, 2.0)
    out = run_bab(driver, PY)
    adjusted = driver.objective([i - 1 for i in out.indices]) - driver.level_bounds.sum()
    assert out.adjusted_objective == pytest.approx(adjusted, abs=1e-9)


def test_observer_sees_every_scored_node():
    H = generate_rayleigh(4, 10, 9)
    seen = []
    res = select_ncsie(H, 3, 2.0, BabOptions(observer=lambda *a: seen.append(a)))
    assert len(seen) == res.visited_nodes
    for depth, k, delta, z, parent_c, child_c in seen:
        assert 1 <= k <= 10 and 0 <= depth < 3
        assert child_c <= parent_c + 1e-9
        assert delta <= z + 1e-9


def test_observer_rejected_on_compiled_engine():
    with pytest.raises(ProblemError):
        select_ncsie(generate_rayleigh(2, 4, 0), 2, 1.0,
                     BabOptions(engine="compiled", observer=lambda *a: None))


@pytest.mark.parametrize("scenario", ["ncsie", "csie"])
def test_engines_agree(scenario):
    for seed in range(60):
        nt = (8, 12, 16, 24)[seed % 4]
        L = 1 + seed % 4
        Hm = generate_rayleigh(4, nt, 2 * seed)
        He = generate_rayleigh(4 + 4 * (seed % 2), nt, 2 * seed + 1)
        rm, re = db_to_linear((-5, 0, 5, 9, 15)[seed % 5]), db_to_linear((1, 5)[seed % 2])
        for warm in (False, True):
            runs = []
            for engine in ("python", "compiled"):
                opts = BabOptions(engine=engine, warm_start=warm)
                if scenario == "ncsie":
                    runs.append(select_ncsie(Hm, L, rm, opts))
                else:
                    runs.append(select_csie(Hm, He, L, rm, re, opts))
            a, b = runs
            assert a.indices == b.indices
            assert a.visited_nodes == b.visited_nodes
            assert a.adjusted_objective == pytest.approx(b.adjusted_objective, abs=1e-12)


def test_determinism_and_node_bound():
    H = generate_rayleigh(4, 14, 77)
    a = select_ncsie(H, 4, 5.0)
    b = select_ncsie(H, 4, 5.0)
    assert a == b
    assert 14 <= a.visited_nodes <= tree_node_count(14, 4)


def test_warm_start_keeps_optimum_and_never_costs_more():
    for seed in range(20):
        Hm = generate_rayleigh(4, 16, 2 * seed)
        He = generate_rayleigh(4, 16, 2 * seed + 1)
        cold = select_csie(Hm, He, 4, 3.0, 1.3)
        warm = select_csie(Hm, He, 4, 3.0, 1.3, BabOptions(warm_start=True))
        assert warm.objective == pytest.approx(cold.objective, abs=1e-9)
        assert warm.visited_nodes <= cold.visited_nodes


def test_epsilon_only_prunes_more():
    H = generate_rayleigh(4, 16, 5)
    base = select_ncsie(H, 4, 3.0)
    loose = select_ncsie(H, 4, 3.0, BabOptions(epsilon=0.5))
    assert loose.visited_nodes <= base.visited_nodes
    assert loose.objective <= base.objective + 1e-12
