"""Compiled inner loops.  Everything here works on plain integer arrays, 0-based."""

import numpy as np
from numba import njit


@njit(cache=True)
def word_snapshots(n, positions):
    steps = positions.shape[0]
    out = np.empty((steps + 1, n), dtype=np.int32)
    for i in range(n):
        out[0, i] = i + 1
    for t in range(steps):
        k = positions[t] - 1
        for i in range(n):
            out[t + 1, i] = out[t, i]
        out[t + 1, k] = out[t, k + 1]
        out[t + 1, k + 1] = out[t, k]
    return out


@njit(cache=True)
def _hook_walk_staircase(n):
    """
    Uniform standard filling of the staircase (n-1, n-2, ..., 1).

    Entries N, N-1, ..., 1 are placed in turn at the corner where a hook walk
    started from a uniformly random remaining cell comes to rest.
    """
    size = n * (n - 1) // 2
    tab = np.zeros((n - 1, n - 1), dtype=np.int64)
    row_len = np.empty(n - 1, dtype=np.int64)
    col_len = np.empty(n - 1, dtype=np.int64)
    for i in range(n - 1):
        row_len[i] = n - 1 - i
        col_len[i] = n - 1 - i
    cells = np.empty((size, 2), dtype=np.int64)
    where = np.full((n - 1, n - 1), -1, dtype=np.int64)
    c = 0
    for i in range(n - 1):
        for j in range(n - 1 - i):
            cells[c, 0] = i
            cells[c, 1] = j
            where[i, j] = c
            c += 1
    remaining = size
    for value in range(size, 0, -1):
        pick = np.random.randint(0, remaining)
        i = cells[pick, 0]
        j = cells[pick, 1]
        while True:
            arm = row_len[i] - j - 1
            leg = col_len[j] - i - 1
            if arm + leg == 0:
                break
            step = np.random.randint(1, arm + leg + 1)
            if step <= arm:
                j += step
            else:
                i += step - arm
        tab[i, j] = value
        row_len[i] -= 1
        col_len[j] -= 1
        # swap-remove (i, j) from the cell list
        slot = where[i, j]
        last = remaining - 1
        li = cells[last, 0]
        lj = cells[last, 1]
        cells[slot, 0] = li
        cells[slot, 1] = lj
        where[li, lj] = slot
        where[i, j] = -1
        remaining -= 1
    return tab


@njit(cache=True)
def _edelman_greene(tab, n, transpose):
    """
    Swap word of a staircase tableau: repeatedly record the corner holding the
    current maximum, empty it, slide the hole back to the origin (larger
    neighbour fills the hole), and put a fresh minimum at the origin.
    """
    size = n * (n - 1) // 2
    t = tab.astype(np.int32)
    # corner i is cell (i, n - 2 - i); only the emptied corner changes per step
    corner = np.empty(n - 1, dtype=np.int32)
    for i in range(n - 1):
        corner[i] = t[i, n - 2 - i]
    word = np.empty(size, dtype=np.int64)
    fresh = 0
    for step in range(size):
        v = size - step
        i = 0
        while corner[i] != v:
            i += 1
        j = n - 2 - i
        word[step] = (i + 1) if transpose else (j + 1)
        ci = i
        while i > 0 or j > 0:
            if i == 0:
                ni, nj = i, j - 1
            elif j == 0:
                ni, nj = i - 1, j
            elif t[i - 1, j] > t[i, j - 1]:
                ni, nj = i - 1, j
            else:
                ni, nj = i, j - 1
            t[i, j] = t[ni, nj]
            i, j = ni, nj
        t[0, 0] = fresh
        fresh -= 1
        corner[ci] = t[ci, n - 2 - ci]
    return word


@njit(cache=True)
def staircase_tableau(n, seed):
    np.random.seed(seed)
    return _hook_walk_staircase(n)


@njit(cache=True)
def edelman_greene_word(tab, n, transpose):
    return _edelman_greene(tab, n, transpose)


@njit(cache=True)
def rsn_words(n, count, seed, transpose):
    np.random.seed(seed)
    size = n * (n - 1) // 2
    out = np.empty((count, size), dtype=np.int64)
    for r in range(count):
        tab = _hook_walk_staircase(n)
        out[r] = _edelman_greene(tab, n, transpose)
    return out


@njit(cache=True)
def holder_pairs(times, values, knots, scale, delta):
    """Count knot pairs (a < b) with |v_b - v_a| > scale * sqrt(t_b - t_a) + delta."""
    bad = 0
    pairs = 0
    for a in range(knots.shape[0]):
        ta = times[knots[a]]
        va = values[knots[a]]
        for b in range(a + 1, knots.shape[0]):
            d = values[knots[b]] - va
            if d < 0:
                d = -d
            if d > scale * np.sqrt(times[knots[b]] - ta) + delta:
                bad += 1
            pairs += 1
    return bad, pairs


@njit(cache=True)
def rows_are_permutations(a):
    """True when every row of ``a`` is a one-line word of 1..n."""
    n = a.shape[1]
    seen = np.zeros(n + 1, dtype=np.int64)
    for r in range(a.shape[0]):
        for i in range(n):
            v = a[r, i]
            if v < 1 or v > n or seen[v] == r + 1:
                return False
            seen[v] = r + 1
    return True
