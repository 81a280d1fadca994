"""Bulk algorithms over ordered maps and sets.

All operations are persistent: callers keep their input handles, results are
freshly owned trees sharing structure with the inputs.  Key collisions are
resolved by a ``combine(existing_value, incoming_value)`` callback; the
default keeps the incoming value.

The set algebra follows the split/recurse/join scheme driven by the second
tree's root, with a flatten-merge-rebuild base case once the two sides
together fall under ``kappa`` entries.  ``union_efficient`` is the variant
with the tighter unfold bound: blocks are expanded the first time they are
touched, the whole recursion runs in expanded mode (joins never fold), and
one final refold repairs the expanded regions.
"""

from bisect import bisect_left, bisect_right

from .core import (_claim, _decode, _destructure, _expose, _join, _join2,
                   _make_flat, _make_regular, _node, _rebuild, _refold,
                   _settle, _split, _unfold, flatten)
from .errors import ContractError
from .nodes import is_flat, release, retain, size
from .parallel import fork2

_RIGHT = lambda a, b: b


def _normalize(batch, combine):
    """Stable-sort a batch by key and fold duplicates through combine."""
    arr = sorted(batch, key=lambda e: e[0])
    out = []
    for k, v in arr:
        if out and out[-1][0] == k:
            out[-1] = (k, combine(out[-1][1], v))
        else:
            out.append((k, v))
    return out


def build(ctx, pairs, combine=_RIGHT):
    """Tree over an unsorted entry sequence; duplicate keys combined."""
    return _rebuild(ctx, _normalize(pairs, combine))


def from_sorted(ctx, entries):
    """Tree over strictly increasing entries."""
    entries = list(entries)
    for i in range(1, len(entries)):
        if not entries[i - 1][0] < entries[i][0]:
            raise ContractError("from_sorted requires strictly increasing keys")
    return _rebuild(ctx, entries)


def tree_size(t):
    return size(t)


# ---------------------------------------------------------------------------
# point queries (read-only)


def get_entry(ctx, t, k):
    while t is not None:
        if is_flat(t):
            if k < t.first_key or k > t.last_key:
                return None
            entries = _decode(ctx, t)
            pos = bisect_left(entries, k, key=lambda e: e[0])
            if pos < len(entries) and entries[pos][0] == k:
                return entries[pos]
            return None
        if k == t.key:
            return (t.key, t.value)
        t = t.left if k < t.key else t.right
    return None


def find(ctx, t, k):
    e = get_entry(ctx, t, k)
    return None if e is None else e[1]


def contains(ctx, t, k):
    return get_entry(ctx, t, k) is not None


def rank(ctx, t, k):
    """Number of keys strictly below k."""
    n = 0
    while t is not None:
        if is_flat(t):
            if k <= t.first_key:
                return n
            if k > t.last_key:
                return n + t.count
            entries = _decode(ctx, t)
            return n + bisect_left(entries, k, key=lambda e: e[0])
        if k <= t.key:
            t = t.left
        else:
            n += size(t.left) + 1
            t = t.right
    return n


def next_entry(ctx, t, k):
    """Smallest entry with key strictly greater than k, or None."""
    best = None
    while t is not None:
        if is_flat(t):
            if t.last_key > k:
                entries = _decode(ctx, t)
                pos = bisect_right(entries, k, key=lambda e: e[0])
                if pos < len(entries):
                    best = entries[pos]
            return best
        if t.key > k:
            best = (t.key, t.value)
            t = t.left
        else:
            t = t.right
    return best


def previous_entry(ctx, t, k):
    """Largest entry with key strictly less than k, or None."""
    best = None
    while t is not None:
        if is_flat(t):
            if t.first_key < k:
                entries = _decode(ctx, t)
                pos = bisect_left(entries, k, key=lambda e: e[0])
                if pos > 0:
                    best = entries[pos - 1]
            return best
        if t.key < k:
            best = (t.key, t.value)
            t = t.right
        else:
            t = t.left
    return best


# ---------------------------------------------------------------------------
# point updates


def _insert(ctx, t, k, v, combine):
    if t is None:
        return _node(ctx, None, (k, v), None)
    if is_flat(t):
        entries = _decode(ctx, t)
        release(t)
        pos = bisect_left(entries, k, key=lambda e: e[0])
        if pos < len(entries) and entries[pos][0] == k:
            entries[pos] = (k, combine(entries[pos][1], v))
        else:
            entries.insert(pos, (k, v))
        return _rebuild(ctx, entries)
    l, e, r = _destructure(ctx, t)
    if k == e[0]:
        return _join(ctx, l, (k, combine(e[1], v)), r)
    if k < e[0]:
        return _join(ctx, _insert(ctx, l, k, v, combine), e, r)
    return _join(ctx, l, e, _insert(ctx, r, k, v, combine))


def insert(ctx, t, k, v, combine=_RIGHT):
    return _settle(ctx, _insert(ctx, _claim(t), k, v, combine))


def _remove(ctx, t, k):
    if t is None:
        return None
    if is_flat(t):
        if k < t.first_key or k > t.last_key:
            return t
        entries = _decode(ctx, t)
        pos = bisect_left(entries, k, key=lambda e: e[0])
        if pos == len(entries) or entries[pos][0] != k:
            return t
        release(t)
        del entries[pos]
        if not entries:
            return None
        return _make_flat(ctx, entries)
    l, e, r = _destructure(ctx, t)
    if k == e[0]:
        return _join2(ctx, l, r)
    if k < e[0]:
        return _join(ctx, _remove(ctx, l, k), e, r)
    return _join(ctx, l, e, _remove(ctx, r, k))


def remove(ctx, t, k):
    return _settle(ctx, _remove(ctx, _claim(t), k))


# ---------------------------------------------------------------------------
# set algebra


def _merge_union(a, b, combine):
    out = []
    i = j = 0
    na, nb = len(a), len(b)
    while i < na and j < nb:
        ka, kb = a[i][0], b[j][0]
        if ka < kb:
            out.append(a[i]); i += 1
        elif kb < ka:
            out.append(b[j]); j += 1
        else:
            out.append((ka, combine(a[i][1], b[j][1]))); i += 1; j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return out


def _merge_intersect(a, b, combine):
    out = []
    i = j = 0
    na, nb = len(a), len(b)
    while i < na and j < nb:
        ka, kb = a[i][0], b[j][0]
        if ka < kb:
            i += 1
        elif kb < ka:
            j += 1
        else:
            out.append((ka, combine(a[i][1], b[j][1]))); i += 1; j += 1
    return out


def _merge_difference(a, b):
    out = []
    i = j = 0
    na, nb = len(a), len(b)
    while i < na and j < nb:
        ka, kb = a[i][0], b[j][0]
        if ka < kb:
            out.append(a[i]); i += 1
        elif kb < ka:
            j += 1
        else:
            i += 1; j += 1
    out.extend(a[i:])
    return out


def _flatten_consume(ctx, t):
    entries = flatten(ctx, t)
    release(t)
    return entries


def _union(ctx, t1, t2, combine):
    if t1 is None:
        return t2
    if t2 is None:
        return t1
    if size(t1) + size(t2) < ctx.config.kappa:
        merged = _merge_union(_flatten_consume(ctx, t1),
                              _flatten_consume(ctx, t2), combine)
        return _rebuild(ctx, merged)
    l2, e2, r2 = _expose(ctx, t2)
    l1, b, r1 = _split(ctx, t1, e2[0])
    e = (e2[0], combine(b[1], e2[1])) if b is not None else e2
    tl, tr = fork2(ctx, size(l1) + size(l2) + size(r1) + size(r2),
                   lambda: _union(ctx, l1, l2, combine),
                   lambda: _union(ctx, r1, r2, combine))
    return _join(ctx, tl, e, tr)


def union(ctx, t1, t2, combine=_RIGHT):
    return _settle(ctx, _union(ctx, _claim(t1), _claim(t2), combine))


def _intersection(ctx, t1, t2, combine):
    if t1 is None or t2 is None:
        release(t1)
        release(t2)
        return None
    if size(t1) + size(t2) < ctx.config.kappa:
        merged = _merge_intersect(_flatten_consume(ctx, t1),
                                  _flatten_consume(ctx, t2), combine)
        return _rebuild(ctx, merged)
    l2, e2, r2 = _expose(ctx, t2)
    l1, b, r1 = _split(ctx, t1, e2[0])
    tl, tr = fork2(ctx, size(l1) + size(l2) + size(r1) + size(r2),
                   lambda: _intersection(ctx, l1, l2, combine),
                   lambda: _intersection(ctx, r1, r2, combine))
    if b is not None:
        return _join(ctx, tl, (e2[0], combine(b[1], e2[1])), tr)
    return _join2(ctx, tl, tr)


def intersection(ctx, t1, t2, combine=_RIGHT):
    return _settle(ctx, _intersection(ctx, _claim(t1), _claim(t2), combine))


def _difference(ctx, t1, t2):
    if t1 is None:
        release(t2)
        return None
    if t2 is None:
        return t1
    if size(t1) + size(t2) < ctx.config.kappa:
        merged = _merge_difference(_flatten_consume(ctx, t1),
                                   _flatten_consume(ctx, t2))
        return _rebuild(ctx, merged)
    l2, e2, r2 = _expose(ctx, t2)
    l1, b, r1 = _split(ctx, t1, e2[0])
    tl, tr = fork2(ctx, size(l1) + size(l2) + size(r1) + size(r2),
                   lambda: _difference(ctx, l1, l2),
                   lambda: _difference(ctx, r1, r2))
    return _join2(ctx, tl, tr)


def difference(ctx, t1, t2):
    """Entries of t1 whose keys are absent from t2 (t1 keeps its values)."""
    return _settle(ctx, _difference(ctx, _claim(t1), _claim(t2)))


def _split_expanded(ctx, t, k):
    if t is None:
        return None, None, None
    if is_flat(t):
        t = _unfold(ctx, t)
    l, e, r = _destructure(ctx, t)
    if k == e[0]:
        return l, e, r
    if k < e[0]:
        ll, b, lr = _split_expanded(ctx, l, k)
        return ll, b, _join(ctx, lr, e, r, expanded=True)
    rl, b, rr = _split_expanded(ctx, r, k)
    return _join(ctx, l, e, rl, expanded=True), b, rr


def _union_base(ctx, t1, t2, combine):
    if t1 is None:
        return t2
    if t2 is None:
        return t1
    if is_flat(t1):
        t1 = _unfold(ctx, t1)
    if is_flat(t2):
        t2 = _unfold(ctx, t2)
    l2, e2, r2 = _destructure(ctx, t2)
    l1, b, r1 = _split_expanded(ctx, t1, e2[0])
    e = (e2[0], combine(b[1], e2[1])) if b is not None else e2
    tl, tr = fork2(ctx, size(l1) + size(l2) + size(r1) + size(r2),
                   lambda: _union_base(ctx, l1, l2, combine),
                   lambda: _union_base(ctx, r1, r2, combine))
    return _join(ctx, tl, e, tr, expanded=True)


def union_efficient(ctx, t1, t2, combine=_RIGHT):
    """Union with the tighter unfold bound: expand on first touch, join in
    expanded mode, repair once with refold."""
    out = _refold(ctx, _union_base(ctx, _claim(t1), _claim(t2), combine))
    return _settle(ctx, out)


# ---------------------------------------------------------------------------
# batch updates


def _mins(ctx, t, arr, lo, hi, combine):
    if t is None:
        return _rebuild(ctx, arr, lo, hi)
    if lo >= hi:
        return t
    if size(t) + (hi - lo) < ctx.config.kappa:
        merged = _merge_union(_flatten_consume(ctx, t), arr[lo:hi], combine)
        return _rebuild(ctx, merged)
    l, e, r = _expose(ctx, t)
    pos = bisect_left(arr, e[0], lo, hi, key=lambda x: x[0])
    hit = pos < hi and arr[pos][0] == e[0]
    if hit:
        e = (e[0], combine(e[1], arr[pos][1]))
    tl, tr = fork2(ctx, size(l) + size(r) + (hi - lo),
                   lambda: _mins(ctx, l, arr, lo, pos, combine),
                   lambda: _mins(ctx, r, arr, pos + (1 if hit else 0), hi, combine))
    return _join(ctx, tl, e, tr)


def multi_insert(ctx, t, batch, combine=_RIGHT):
    arr = _normalize(batch, combine)
    return _settle(ctx, _mins(ctx, _claim(t), arr, 0, len(arr), combine))


def _mdel(ctx, t, keys, lo, hi):
    if t is None or lo >= hi:
        return t
    if size(t) + (hi - lo) < ctx.config.kappa:
        entries = _flatten_consume(ctx, t)
        drop = keys[lo:hi]
        kept = _merge_difference(entries, [(k, None) for k in drop])
        return _rebuild(ctx, kept)
    l, e, r = _expose(ctx, t)
    pos = bisect_left(keys, e[0], lo, hi)
    hit = pos < hi and keys[pos] == e[0]
    tl, tr = fork2(ctx, size(l) + size(r) + (hi - lo),
                   lambda: _mdel(ctx, l, keys, lo, pos),
                   lambda: _mdel(ctx, r, keys, pos + (1 if hit else 0), hi))
    if hit:
        return _join2(ctx, tl, tr)
    return _join(ctx, tl, e, tr)


def multi_delete(ctx, t, keys):
    arr = sorted(set(keys))
    return _settle(ctx, _mdel(ctx, _claim(t), arr, 0, len(arr)))


# ---------------------------------------------------------------------------
# traversals


def _filter_tree(ctx, t, keep, prune=None):
    """Entries satisfying ``keep``; borrows t, returns an owned tree.

    Unchanged subtrees are returned shared rather than copied, so dropping a
    few entries touches O(depth) nodes.  ``prune`` short-circuits whole
    subtrees (used by the augmented filter).
    """
    if t is None:
        return None
    if prune is not None and not prune(t):
        return None
    if is_flat(t):
        entries = _decode(ctx, t)
        kept = [e for e in entries if keep(e)]
        if len(kept) == len(entries):
            return retain(t)
        if not kept:
            return None
        return _make_flat(ctx, kept)
    fl, fr = fork2(ctx, t.size,
                   lambda: _filter_tree(ctx, t.left, keep, prune),
                   lambda: _filter_tree(ctx, t.right, keep, prune))
    if keep((t.key, t.value)):
        if fl is t.left and fr is t.right:
            release(fl)
            release(fr)
            return retain(t)
        return _join(ctx, fl, (t.key, t.value), fr)
    return _join2(ctx, fl, fr)


def filter(ctx, t, pred):
    """Entries for which pred((key, value)) holds, as a fresh tree."""
    return _settle(ctx, _filter_tree(ctx, t, pred))


def map_values(ctx, t, f):
    """Apply f to every value, preserving keys and shape."""
    if t is None:
        return None
    if is_flat(t):
        return _make_flat(ctx, [(k, f(v)) for k, v in _decode(ctx, t)])
    fl, fr = fork2(ctx, t.size,
                   lambda: map_values(ctx, t.left, f),
                   lambda: map_values(ctx, t.right, f))
    # shape and sizes are preserved, so the node rules need not rerun
    return _make_regular(ctx, fl, (t.key, f(t.value)), fr)


def reduce(ctx, t, f, identity):
    """Fold of in-order values under an associative f with identity."""
    if t is None:
        return identity
    if is_flat(t):
        acc = identity
        for _, v in _decode(ctx, t):
            acc = f(acc, v)
        return acc
    xl, xr = fork2(ctx, t.size,
                   lambda: reduce(ctx, t.left, f, identity),
                   lambda: reduce(ctx, t.right, f, identity))
    return f(f(xl, t.value), xr)


def key_range(ctx, t, lo, hi):
    """Entries with lo <= key <= hi, as a fresh tree."""
    if lo > hi:
        raise ContractError("key_range requires lo <= hi")
    left, b_lo, rest = _split(ctx, _claim(t), lo)
    release(left)
    mid, b_hi, right = _split(ctx, rest, hi)
    release(right)
    if b_hi is not None:
        mid = _join(ctx, mid, b_hi, None)
    if b_lo is not None:
        mid = _join(ctx, None, b_lo, mid)
    return _settle(ctx, mid)
