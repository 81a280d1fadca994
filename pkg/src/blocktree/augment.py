"""User-defined subtree aggregates and the queries that exploit them.

An ``AugSpec`` is a monoid over entries: ``identity``, ``lift(entry)`` and an
associative ``combine``.  Trees built with an augmented context cache the
fold of ``lift`` over every subtree at each regular node and one value per
block, so ``aug_val`` is O(1) and range/filter queries can prune whole
subtrees without decoding them.
"""

from dataclasses import dataclass
from bisect import bisect_left, bisect_right

from .core import _decode, _settle
from .errors import ContractError
from .nodes import is_flat
from .ordmap import _filter_tree


@dataclass(frozen=True)
class AugSpec:
    identity: object
    lift: object       # entry -> aug value
    combine: object    # (aug, aug) -> aug, associative


def aug_val(ctx, t):
    """Aggregate over the whole tree, read from the root."""
    if ctx.aug is None:
        raise ContractError("tree context has no augmentation")
    if t is None:
        return ctx.aug.identity
    return t.aug


def aug_range(ctx, t, lo, hi):
    """Aggregate over entries with lo <= key <= hi.

    Fully covered subtrees contribute their cached value; at most the two
    boundary blocks are decoded.
    """
    spec = ctx.aug
    if spec is None:
        raise ContractError("tree context has no augmentation")
    if lo > hi:
        return spec.identity
    return _rng(ctx, spec, t, lo, hi)


def _block_part(ctx, spec, t, lo, hi):
    entries = _decode(ctx, t)
    keys = [e[0] for e in entries]
    acc = spec.identity
    for i in range(bisect_left(keys, lo), bisect_right(keys, hi)):
        acc = spec.combine(acc, spec.lift(entries[i]))
    return acc


def _rng(ctx, spec, t, lo, hi):
    if t is None:
        return spec.identity
    if is_flat(t):
        if lo <= t.first_key and t.last_key <= hi:
            return t.aug
        if t.last_key < lo or hi < t.first_key:
            return spec.identity
        return _block_part(ctx, spec, t, lo, hi)
    k = t.key
    if k < lo:
        return _rng(ctx, spec, t.right, lo, hi)
    if k > hi:
        return _rng(ctx, spec, t.left, lo, hi)
    mid = spec.combine(spec.lift((k, t.value)), _below(ctx, spec, t.right, hi))
    return spec.combine(_above(ctx, spec, t.left, lo), mid)


def _above(ctx, spec, t, lo):
    """Aggregate over entries with key >= lo."""
    if t is None:
        return spec.identity
    if is_flat(t):
        if lo <= t.first_key:
            return t.aug
        if t.last_key < lo:
            return spec.identity
        return _block_part(ctx, spec, t, lo, t.last_key)
    if t.key < lo:
        return _above(ctx, spec, t.right, lo)
    rest = spec.combine(spec.lift((t.key, t.value)),
                        t.right.aug if t.right is not None else spec.identity)
    return spec.combine(_above(ctx, spec, t.left, lo), rest)


def _below(ctx, spec, t, hi):
    """Aggregate over entries with key <= hi."""
    if t is None:
        return spec.identity
    if is_flat(t):
        if t.last_key <= hi:
            return t.aug
        if hi < t.first_key:
            return spec.identity
        return _block_part(ctx, spec, t, t.first_key, hi)
    if t.key > hi:
        return _below(ctx, spec, t.left, hi)
    rest = spec.combine(t.left.aug if t.left is not None else spec.identity,
                        spec.lift((t.key, t.value)))
    return spec.combine(rest, _below(ctx, spec, t.right, hi))


def aug_filter(ctx, t, h):
    """Entries whose lifted value satisfies ``h``.

    ``h`` must be subset-monotone over the combine (if h holds for a
    combined value it holds for at least one operand, as with "max >= x"),
    which lets whole subtrees whose aggregate fails ``h`` be dropped without
    descending into them or decoding their blocks.
    """
    spec = ctx.aug
    if spec is None:
        raise ContractError("tree context has no augmentation")
    keep = lambda e: h(spec.lift(e))
    prune = lambda node: h(node.aug)
    return _settle(ctx, _filter_tree(ctx, t, keep, prune))
