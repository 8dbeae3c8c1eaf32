"""Pure-Python q-permanent kernels (fallback for the compiled ``_kernels``).

Both modules expose the same four functions. Words are rows of an integer
array; the bra row ``b`` stands for ``a_{b[-1]} ... a_{b[0]}`` and the ket
row for ``a+_{k[0]} ... a+_{k[-1]}``.  The weight of a mode-matching
bijection is ``q**inversions``, accumulated by a subset DP over the ket
positions already used.
"""


def _popcount(x):
    return bin(x).count("1")


def qperm_coeffs(bra, ket):
    """Coefficient list of the vacuum overlap as a polynomial in q."""
    n = len(bra)
    if len(ket) != n:
        return [0]
    if n == 0:
        return [1]
    deg = n * (n - 1) // 2 + 1
    dp = {0: [1] + [0] * (deg - 1)}
    for k in range(n):
        b = bra[k]
        nxt = {}
        for mask, poly in dp.items():
            for p in range(n):
                bit = 1 << p
                if mask & bit or ket[p] != b:
                    continue
                shift = _popcount(mask >> (p + 1))
                tgt = nxt.get(mask | bit)
                if tgt is None:
                    tgt = nxt[mask | bit] = [0] * deg
                for e in range(deg - shift):
                    c = poly[e]
                    if c:
                        tgt[e + shift] += c
        if not nxt:
            return [0]
        dp = nxt
    (poly,) = dp.values()
    return poly


def qperm_value(bra, ket, q):
    n = len(bra)
    if len(ket) != n:
        return 0.0
    powers = [q ** e for e in range(max(n, 1))]
    dp = {0: 1.0}
    for k in range(n):
        b = bra[k]
        nxt = {}
        for mask, val in dp.items():
            for p in range(n):
                bit = 1 << p
                if mask & bit or ket[p] != b:
                    continue
                w = val * powers[_popcount(mask >> (p + 1))]
                nxt[mask | bit] = nxt.get(mask | bit, 0.0) + w
        if not nxt:
            return 0.0
        dp = nxt
    return next(iter(dp.values()))


def fill_gram_coeffs(words, out, row_start, row_stop):
    """Fill rows ``[row_start, row_stop)`` of ``out[i, j, e]`` in place."""
    rows = [list(w) for w in words]
    for i in range(row_start, row_stop):
        for j in range(len(rows)):
            c = qperm_coeffs(rows[i], rows[j])
            out[i, j, : len(c)] = c


def fill_gram_float(words, q, out, row_start, row_stop):
    rows = [list(w) for w in words]
    for i in range(row_start, row_stop):
        for j in range(len(rows)):
            out[i, j] = qperm_value(rows[i], rows[j], q)
