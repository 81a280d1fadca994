import random

import pytest
from hypothesis import given, strategies as st

import blocktree as bt
from blocktree import ordmap
from blocktree.augment import AugSpec, aug_filter, aug_range, aug_val
from blocktree.core import make_context
from blocktree.counters import counters
from blocktree.errors import ContractError
from blocktree.inspect import check_tree

from oracles import brute_aug

SUM_KEYS = AugSpec(identity=0, lift=lambda e: e[0], combine=lambda a, b: a + b)
MAX_VAL = AugSpec(identity=-1, lift=lambda e: e[1], combine=max)


def sum_ctx(B=8):
    return make_context(block_size=B, encoding="identity", aug=SUM_KEYS)


@given(st.tuples(st.integers(), st.integers(), st.integers()))
def test_augspec_monoid_laws_for_shipped_specs(triple):
    a, b, c = triple
    assert SUM_KEYS.combine(SUM_KEYS.combine(a, b), c) == \
        SUM_KEYS.combine(a, SUM_KEYS.combine(b, c))
    assert SUM_KEYS.combine(SUM_KEYS.identity, a) == a
    assert SUM_KEYS.combine(a, SUM_KEYS.identity) == a
    assert max(max(a, b), c) == max(a, max(b, c))


def test_aug_val_examples():
    ctx = sum_ctx(3)
    assert aug_val(ctx, None) == 0
    t = ordmap.build(ctx, [(k, 0) for k in range(16)])
    assert aug_val(ctx, t) == 120


def test_aug_val_requires_augmented_context():
    ctx = make_context(block_size=3, encoding="identity")
    with pytest.raises(ContractError):
        aug_val(ctx, None)


def test_aug_val_random_vs_brute_force():
    rng = random.Random(0)
    for B in (1, 4, 64):
        ctx = sum_ctx(B)
        for _ in range(60):
            ks = rng.sample(range(10 ** 5), rng.randrange(0, 800))
            t = ordmap.build(ctx, [(k, 0) for k in ks])
            want = brute_aug([(k, 0) for k in ks], 0, lambda e: e[0],
                             lambda a, b: a + b)
            assert aug_val(ctx, t) == want
            check_tree(ctx, t)


def test_aug_range_examples():
    ctx = sum_ctx(3)
    t = ordmap.build(ctx, [(k, 0) for k in range(16)])
    assert aug_range(ctx, t, 0, 15) == aug_val(ctx, t)
    assert aug_range(ctx, t, 3, 5) == 12


def test_aug_range_random_vs_brute_force():
    rng = random.Random(1)
    for B in (2, 16, 128):
        ctx = sum_ctx(B)
        for _ in range(150):
            ks = sorted(rng.sample(range(5000), rng.randrange(1, 600)))
            t = ordmap.from_sorted(ctx, [(k, 0) for k in ks])
            lo = rng.randrange(5200)
            hi = lo + rng.randrange(1500)
            assert aug_range(ctx, t, lo, hi) == sum(k for k in ks if lo <= k <= hi)


def test_aug_range_equals_reduce_over_key_range():
    rng = random.Random(2)
    ctx = sum_ctx(8)
    ks = sorted(rng.sample(range(3000), 500))
    t = ordmap.from_sorted(ctx, [(k, k) for k in ks])
    for _ in range(100):
        lo = rng.randrange(3200)
        hi = lo + rng.randrange(900)
        sub = ordmap.key_range(ctx, t, lo, hi)
        assert aug_range(ctx, t, lo, hi) == ordmap.reduce(
            ctx, ordmap.map_values(ctx, sub, lambda v: v),
            lambda a, b: a + b, 0)


def test_aug_range_decodes_at_most_two_blocks():
    ctx = sum_ctx(16)
    t = ordmap.from_sorted(ctx, [(k, 0) for k in range(5000)])
    rng = random.Random(3)
    for _ in range(100):
        lo = rng.randrange(5000)
        hi = lo + rng.randrange(2000)
        d0 = counters.decodes
        aug_range(ctx, t, lo, hi)
        assert counters.decodes - d0 <= 2


def test_aug_filter_always_true():
    ctx = sum_ctx(4)
    t = ordmap.build(ctx, [(k, 0) for k in range(50)])
    f = aug_filter(ctx, t, lambda a: True)
    assert bt.to_list(ctx, f) == bt.to_list(ctx, t)


def test_aug_filter_interval_stabbing():
    # intervals as left -> right entries, aggregate = max right coordinate;
    # stabbing at q keeps right >= q then filters left <= q
    rng = random.Random(4)
    ctx = make_context(block_size=8, encoding="identity", aug=MAX_VAL)
    for _ in range(120):
        ivs = {}
        for _ in range(rng.randrange(1, 250)):
            left = rng.randrange(2000)
            ivs[left] = left + rng.randrange(150)
        t = ordmap.build(ctx, sorted(ivs.items()))
        q = rng.randrange(2300)
        right_ok = aug_filter(ctx, t, lambda a: a >= q)
        stabbed = ordmap.filter(ctx, right_ok, lambda e: e[0] <= q)
        want = sorted((l, r) for l, r in ivs.items() if l <= q <= r)
        assert bt.to_list(ctx, stabbed) == want
        check_tree(ctx, stabbed)


def test_aug_filter_random_vs_brute_force():
    rng = random.Random(5)
    ctx = make_context(block_size=4, encoding="identity", aug=MAX_VAL)
    for _ in range(150):
        pairs = [(k, rng.randrange(100)) for k in
                 rng.sample(range(2000), rng.randrange(0, 300))]
        t = ordmap.build(ctx, pairs)
        cut = rng.randrange(110)
        f = aug_filter(ctx, t, lambda a: a >= cut)
        assert bt.to_list(ctx, f) == sorted((k, v) for k, v in pairs if v >= cut)


def test_aug_filter_skips_failing_blocks():
    # every value below the cut: no block may be decoded
    ctx = make_context(block_size=16, encoding="identity", aug=MAX_VAL)
    t = ordmap.build(ctx, [(k, k % 50) for k in range(4000)])
    d0 = counters.decodes
    f = aug_filter(ctx, t, lambda a: a >= 100)
    assert f is None
    assert counters.decodes == d0


def test_stored_aggregates_checked_by_validator():
    from blocktree.errors import InvariantViolation
    ctx = sum_ctx(2)
    t = ordmap.build(ctx, [(k, 0) for k in range(40)])
    t.aug += 1
    with pytest.raises(InvariantViolation):
        check_tree(ctx, t)
    t.aug -= 1
    check_tree(ctx, t)
