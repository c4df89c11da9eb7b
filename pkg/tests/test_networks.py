import collections
import math

import numpy as np
import pytest

from permlab.core import SwapWord, is_sorting_network, process_from_word
from permlab.networks import (
    NotANetworkError,
    StaircaseTableau,
    bubble_network,
    edelman_greene,
    enumerate_networks,
    sample_cycle_rotation,
    sample_interchange,
    sample_rsn,
    sample_rsn_batch,
    sample_tableau,
    stanley_count,
    stretchable_network,
    swap_histogram,
)


def brute_tableaux(n):
    """All standard fillings of the staircase (n-1, ..., 1), by placing 1, 2, ... at addable cells."""
    cells = [(i, j) for i in range(n - 1) for j in range(n - 1 - i)]
    out = []

    def grow(filled, k):
        if k > len(cells):
            out.append(dict(filled))
            return
        for i, j in cells:
            if (i, j) in filled:
                continue
            if (i == 0 or (i - 1, j) in filled) and (j == 0 or (i, j - 1) in filled):
                filled[(i, j)] = k
                grow(filled, k + 1)
                del filled[(i, j)]

    grow({}, 1)
    return out


@pytest.mark.parametrize("n, count", [(2, 1), (3, 2), (4, 16), (5, 768), (6, 292864)])
def test_stanley_count(n, count):
    assert stanley_count(n) == count


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_enumeration_matches_count_and_is_valid(n):
    words = enumerate_networks(n)
    assert len(words) == stanley_count(n)
    assert len({w.positions for w in words}) == len(words)
    assert all(is_sorting_network(w) for w in words)


def test_enumeration_n3_words():
    assert sorted(w.positions for w in enumerate_networks(3)) == [(1, 2, 1), (2, 1, 2)]


@pytest.mark.parametrize("n", [4, 5])
def test_edelman_greene_is_a_bijection(n):
    tabs = brute_tableaux(n)
    assert len(tabs) == stanley_count(n)
    words = set()
    for filled in tabs:
        e = np.zeros((n - 1, n - 1), dtype=np.int64)
        for (i, j), v in filled.items():
            e[i, j] = v
        words.add(edelman_greene(StaircaseTableau(n, e)).positions)
    assert words == {w.positions for w in enumerate_networks(n)}


def test_tableau_validation():
    with pytest.raises(ValueError):
        StaircaseTableau(3, np.array([[2, 1], [3, 0]]))


@pytest.mark.parametrize("n", [2, 3, 10, 50])
def test_sampled_tableau_is_standard(n):
    tab = sample_tableau(n, seed=n)
    assert tab.entries.max() == n * (n - 1) // 2


@pytest.mark.parametrize("n", [2, 3, 7, 40, 120])
def test_samples_are_sorting_networks(n):
    for w in sample_rsn_batch(n, 5, seed=n):
        assert is_sorting_network(w)


def test_rsn_determinism():
    assert sample_rsn(30, seed=4) == sample_rsn(30, seed=4)
    assert sample_rsn(30, seed=4) != sample_rsn(30, seed=5)


def test_rsn_n5_support():
    counts = collections.Counter(w.positions for w in sample_rsn_batch(5, 20000, seed=11))
    assert set(counts) == {w.positions for w in enumerate_networks(5)}


def test_rsn_symmetry_first_swap():
    # the reflection k -> n - k preserves the uniform law, so first swaps are symmetric
    words = sample_rsn_batch(12, 2000, seed=3)
    first = np.array([w.positions[0] for w in words])
    hist = np.bincount(first, minlength=12)[1:]
    np.testing.assert_allclose(hist / hist.sum(), (hist / hist.sum())[::-1], atol=0.04)


@pytest.mark.parametrize("n", [2, 3, 6, 25])
def test_bubble_network(n):
    w = bubble_network(n)
    assert is_sorting_network(w)
    assert len(w) == n * (n - 1) // 2


def test_bubble_small():
    assert bubble_network(3).positions == (1, 2, 1)


def test_interchange_steps_are_adjacent_swaps():
    proc = sample_interchange(8, 500, seed=2)
    diff = proc.array[1:] != proc.array[:-1]
    assert np.all(diff.sum(axis=1) == 2)
    rows, cols = np.nonzero(diff)
    assert np.all(cols[1::2] - cols[::2] == 1)


def test_cycle_rotation():
    proc = sample_cycle_rotation(5, 30, seed=1)
    for prev, cur in zip(proc.array[:-1], proc.array[1:]):
        assert np.array_equal(cur, np.roll(prev, 1)) or np.array_equal(cur, np.roll(prev, -1))


def test_stretchable_two_points():
    assert stretchable_network(np.array([[-0.5, 0.5], [0.5, -0.5]])).positions == (1,)


def test_stretchable_reverse_samples():
    rng = np.random.default_rng(1)
    x = rng.uniform(-1, 1, 200)
    with pytest.warns(RuntimeWarning):
        w = stretchable_network(np.column_stack([x, -x]))
    assert len(w) == 200 * 199 // 2
    assert is_sorting_network(w)


def test_stretchable_generic_reverse_compatible_cloud():
    # points on a decreasing curve cross pairwise at distinct angles
    rng = np.random.default_rng(3)
    x = np.sort(rng.uniform(-1, 1, 60))
    y = -(x**3) - 0.3 * x
    w = stretchable_network(np.column_stack([x, y / np.max(np.abs(y))]))
    assert is_sorting_network(w)


def test_stretchable_identity_is_not_a_network():
    rng = np.random.default_rng(2)
    x = rng.uniform(-1, 1, 200)
    with pytest.raises(NotANetworkError) as info:
        stretchable_network(np.column_stack([x, x]))
    assert len(info.value.pair) == 2


def test_swap_histogram():
    w = bubble_network(4)
    np.testing.assert_array_equal(swap_histogram(w), [3, 2, 1])
    np.testing.assert_array_equal(swap_histogram(w, (0.0, 0.5)), [2, 1, 0])
    with pytest.raises(ValueError):
        swap_histogram(w, (0.5, 0.5))


def test_histogram_total():
    w = sample_rsn(20, seed=0)
    assert swap_histogram(w).sum() == len(w)
    assert math.isclose(swap_histogram(w, (0, 0.5)).sum() + swap_histogram(w, (0.5, 1)).sum(), len(w))


def test_rsn_n2_is_unique():
    assert all(w == SwapWord(2, (1,)) for w in sample_rsn_batch(2, 10, seed=0))


def test_interchange_rejects_zero_steps():
    with pytest.raises(ValueError):
        sample_interchange(5, 0, seed=0)


def test_interchange_single_step_choices():
    seen = {tuple(sample_interchange(4, 1, seed=s).array[1]) for s in range(60)}
    assert seen == {(2, 1, 3, 4), (1, 3, 2, 4), (1, 2, 4, 3)}


def test_cycle_keeps_circular_gaps():
    n = 7
    proc = sample_cycle_rotation(n, 40, seed=9)
    pos = proc.positions()
    gaps = (pos[:, 1:] - pos[:, :1]) % n
    assert np.all(gaps == gaps[0])


def test_bubble_matches_process_reverse():
    proc = process_from_word(bubble_network(5))
    assert proc.snapshot(proc.t_max).one_line == (5, 4, 3, 2, 1)


def test_rsn_histogram_symmetric_unimodal():
    hist = sum(swap_histogram(w) for w in sample_rsn_batch(200, 3, seed=8)).astype(float)
    hist /= hist.sum()
    np.testing.assert_allclose(hist, hist[::-1], atol=2e-3)
    smooth = np.convolve(hist, np.ones(21) / 21, mode="valid")
    peak = np.argmax(smooth)
    assert abs(peak + 10 - 99) < 15
