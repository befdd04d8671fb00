"""Pure-Python implementations of the hot kernels.

Every function here has a twin of the same name and semantics in
``_ckernels.pyx``.  Closure tables store permutations packed as ``bytes``
(one byte per entry, values 1..n); "marked" quotients additionally set the
high bit (0x80) on entries that are inflated by the long pattern.
"""

MARK = 0x80
VALUE = 0x7F


def flatten(word):
    """Return the permutation (values 1..n) order-isomorphic to ``word``."""
    ranks = {v: i for i, v in enumerate(sorted(word), 1)}
    return tuple(ranks[v] for v in word)


def find_occurrence(host, pattern):
    """Lexicographically least 0-based occurrence of ``pattern`` in ``host``.

    Backtracking places pattern entries left to right; a host entry is
    accepted only if its value lies strictly between the host values already
    matched to the pattern's nearest smaller and nearest larger values.
    """
    k = len(pattern)
    n = len(host)
    if k == 0:
        return ()
    if k > n:
        return None
    below = [-1] * k
    above = [-1] * k
    for i in range(k):
        pi = pattern[i]
        lo = hi = -1
        for j in range(i):
            pj = pattern[j]
            if pj < pi and (lo < 0 or pj > pattern[lo]):
                lo = j
            elif pj > pi and (hi < 0 or pj < pattern[hi]):
                hi = j
        below[i] = lo
        above[i] = hi

    pos = [0] * k
    i = 0
    start = 0
    while True:
        limit = n - k + i
        lo = below[i]
        hi = above[i]
        p = start
        found = False
        while p <= limit:
            v = host[p]
            if (lo < 0 or v > host[pos[lo]]) and (hi < 0 or v < host[pos[hi]]):
                found = True
                break
            p += 1
        if found:
            pos[i] = p
            if i == k - 1:
                return tuple(pos)
            i += 1
            start = p + 1
        else:
            i -= 1
            if i < 0:
                return None
            start = pos[i] + 1


def deletions(p):
    """All distinct one-point deletions of a packed permutation."""
    out = set()
    for i in range(len(p)):
        d = p[i]
        out.add(bytes(v - (v > d) for j, v in enumerate(p) if j != i))
    return out


def marked_children(layer, out):
    """Delete each entry of every marked quotient in ``layer``.

    ``layer`` maps packed marked permutations to the least oscillation length
    they came from; children are merged into ``out`` keeping the minimum.
    """
    for p, m in layer.items():
        n = len(p)
        for i in range(n):
            d = p[i] & VALUE
            child = bytes(
                (v - 1 if (v & VALUE) > d else v) for j, v in enumerate(p) if j != i
            )
            prev = out.get(child)
            if prev is None or m < prev:
                out[child] = m


def inflate_marked(rho, fills, ends, budget, n_max, outs):
    """Add every admissible inflation of the marked quotient ``rho`` to ``outs``.

    Unmarked entries take a block from ``fills`` (a list of ``(block, cost)``
    pairs), marked entries a block from ``ends``.  Inflations whose total
    length exceeds ``n_max`` or whose summed cost exceeds ``budget`` are
    skipped; the rest go into ``outs[length]``.  Returns the number of
    inflations emitted (with repetition).
    """
    j = len(rho)
    if j == 0 or j > n_max:
        return 0
    vals = [v & VALUE for v in rho]
    marked = [bool(v & MARK) for v in rho]
    order = sorted(range(j), key=vals.__getitem__)
    end_opts = [(b, 0) for b in ends]
    choice = [b""] * j
    emitted = 0

    def rec(i, total, extra):
        nonlocal emitted
        if i == j:
            offs = [0] * j
            acc = 0
            for q in order:
                offs[q] = acc
                acc += len(choice[q])
            buf = bytearray()
            for q in range(j):
                o = offs[q]
                buf.extend(o + v for v in choice[q])
            outs[total].add(bytes(buf))
            emitted += 1
            return
        rest = j - i - 1
        for block, cost in (end_opts if marked[i] else fills):
            t = total + len(block)
            if t + rest > n_max:
                continue
            e = extra + cost
            if e > budget:
                continue
            choice[i] = block
            rec(i + 1, t, e)

    rec(0, 0, 0)
    return emitted


def sum_into(left, right, out):
    """Add ``a (+) b`` to ``out`` for every packed ``a`` in left, ``b`` in right."""
    right = list(right)
    for a in left:
        s = len(a)
        for b in right:
            out.add(a + bytes(v + s for v in b))


def first_unclosed(members, lower, excluded):
    """First ``(member, child)`` whose one-point deletion is missing below.

    ``child`` counts as present when it lies in one of the sets in ``lower``
    and not in ``excluded``.  Entries are deleted left to right.  Returns
    ``None`` if every deletion is present.
    """
    for p in members:
        for i in range(len(p)):
            d = p[i]
            child = bytes(v - (v > d) for j, v in enumerate(p) if j != i)
            if child in excluded or not any(child in s for s in lower):
                return p, child
    return None


def inflate(quotient, blocks):
    """Inflate ``quotient`` entry by entry with ``blocks`` (tuples)."""
    m = len(quotient)
    base = [0] * m
    acc = 0
    for i in sorted(range(m), key=quotient.__getitem__):
        base[i] = acc
        acc += len(blocks[i])
    out = []
    for i in range(m):
        b = base[i]
        out.extend(b + v for v in blocks[i])
    return tuple(out)
