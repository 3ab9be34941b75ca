import itertools
from math import comb

import numpy as np
import pytest

from mimome_tas.baselines import exhaustive_select, norm_based_select
from mimome_tas.capacity import link_capacity, secrecy_gap
from mimome_tas.channel import generate_rayleigh
from mimome_tas.errors import BudgetError, ProblemError
from mimome_tas.ncsie import select_ncsie


def test_full_set():
    res = exhaustive_select(generate_rayleigh(2, 4, 0), 4, 1.0)
    assert res.indices == (1, 2, 3, 4)
    assert res.visited_nodes == 4


def test_fig1_tree_node_count():
    res = exhaustive_select(generate_rayleigh(2, 6, 0), 2, 1.0)
    assert comb(6, 2) == 15
    assert res.visited_nodes == 20


def test_self_consistency_over_all_subsets():
    Hm = generate_rayleigh(4, 12, 1)
    He = generate_rayleigh(4, 12, 2)
    ncs = exhaustive_select(Hm, 3, 2.0)
    cs = exhaustive_select(Hm, 3, 2.0, He, 1.5, "csie")
    for S in itertools.combinations(range(12), 3):
        assert ncs.objective >= link_capacity(Hm[:, S], 2.0) - 1e-12
        assert cs.objective >= secrecy_gap(Hm[:, S], He[:, S], 2.0, 1.5) - 1e-12


def test_lexicographic_first_on_ties():
    H = np.ones((2, 5)) + 0j
    assert exhaustive_select(H, 2, 1.0).indices == (1, 2)


def test_budget_cap():
    H = generate_rayleigh(2, 30, 0)
    with pytest.raises(BudgetError, match="27405"):
        exhaustive_select(H, 4, 1.0, cap=10**4)
    assert len(exhaustive_select(H, 4, 1.0, cap=10**5).indices) == 4


def test_csie_requires_eavesdropper():
    with pytest.raises(ProblemError):
        exhaustive_select(generate_rayleigh(2, 4, 0), 2, 1.0, scenario="csie")


def test_norm_based_examples():
    H = np.sqrt(np.array([[1.0, 5.0, 3.0, 2.0]])) + 0j
    assert norm_based_select(H, 2) == (2, 3)
    assert norm_based_select(np.ones((3, 4)), 2) == (1, 2)


def test_norm_based_independent_sort():
    H = generate_rayleigh(4, 32, 9)
    norms = [float(np.vdot(H[:, k], H[:, k]).real) for k in range(32)]
    top = sorted(range(32), key=lambda k: (-norms[k], k))[:4]
    assert norm_based_select(H, 4) == tuple(sorted(k + 1 for k in top))


def test_norm_based_depends_only_on_column_norms():
    H = np.asarray(generate_rayleigh(4, 16, 3))
    phases = np.exp(1j * np.linspace(0, 6, 16))
    rng = np.random.default_rng(0)
    Q, _ = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
    assert norm_based_select(Q @ (H * phases), 5) == norm_based_select(H, 5)


def test_exhaustive_dominates_norm_and_equals_bab():
    for seed in range(10):
        H = generate_rayleigh(4, 12, seed)
        es = exhaustive_select(H, 4, 3.0)
        nb = norm_based_select(H, 4)
        assert es.objective >= link_capacity(H[:, [i - 1 for i in nb]], 3.0) - 1e-12
        assert abs(es.objective - select_ncsie(H, 4, 3.0).objective) <= 1e-9
