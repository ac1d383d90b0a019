"""Sort-free reference for the BH rejection count.

p_(k) <= c holds exactly when at least k p-values are <= c, so k_hat can be
found by counting, without ordering the input.
"""


def brute_force_k_hat(pvalues, alpha):
    m = len(pvalues)
    best = 0
    for k in range(1, m + 1):
        c = alpha * k / m
        if sum(1 for p in pvalues if p <= c) >= k:
            best = k
    return best


def brute_force_k_hat_rows(values, rows, alpha):
    """Counting oracle over stacked instances.

    ``rows`` holds indices into ``values`` (one instance per row).  For each
    candidate k the number of p-values <= alpha k / m is counted directly.
    """
    import numpy as np

    n, m = rows.shape
    ks = np.arange(1, m + 1)
    # cut[k-1] = how many grid values are <= alpha k / m, so that for ascending
    # ``values`` the test p <= alpha k / m becomes index < cut[k-1]
    cut = [int(np.count_nonzero(values <= alpha * k / m)) for k in ks]
    cols = [np.ascontiguousarray(rows[:, j]) for j in range(m)]
    best = np.zeros(n, dtype=np.intp)
    below = {}
    for k, c in zip(ks, cut):
        if c not in below:
            cnt = np.zeros(n, dtype=np.uint8)
            for col in cols:
                cnt += col < c
            below[c] = cnt
        best[below[c] >= k] = k
    return best


def grid_multisets(n_values, m, suffix_len=8, chunk=400_000):
    """Yield every nondecreasing length-m index row over range(n_values), chunked.

    Rows are built as prefix + suffix, where the suffix table holds all
    nondecreasing sequences of length min(m, suffix_len).
    """
    import itertools

    import numpy as np

    b = min(m, suffix_len)
    a = m - b
    flat = np.fromiter(itertools.chain.from_iterable(
        itertools.combinations_with_replacement(range(n_values), b)), dtype=np.uint8)
    table = flat.reshape(-1, b) if b else np.zeros((1, 0), dtype=np.uint8)
    firsts = table[:, 0] if b else None
    for prefix in itertools.combinations_with_replacement(range(n_values), a):
        start = 0
        if a and b:
            start = int(np.searchsorted(firsts, prefix[-1], side="left"))
        tail = table[start:]
        for lo in range(0, tail.shape[0], chunk):
            block = tail[lo:lo + chunk]
            pre = np.broadcast_to(np.asarray(prefix, dtype=np.uint8), (block.shape[0], a))
            yield np.hstack([pre, block])
