"""Two-level graph store: a vertex map whose values are neighbor sets.

The vertex tree maps vertex id to an edge tree and is augmented with the
total edge count, so ``edge_count`` is an O(1) root read.  Edge trees are
sets of neighbor ids with gap-compressed blocks.  Both levels default to
64-entry blocks.

Graphs are immutable snapshots: batch updates return a new ``Graph`` sharing
almost all structure with the old one, so readers on earlier snapshots are
never disturbed by writers.  Vertices persist once created (batch inserts
add both endpoints); deletions remove edges, never vertices.  Self-loops are
kept, duplicate edges within a batch are dropped.

Edge trees live inside vertex-tree payloads as plain values; their node
lifetime is managed by the host garbage collector rather than the owner
counts (values are opaque to the reclamation protocol).
"""

from dataclasses import dataclass

from . import ordmap
from .augment import AugSpec
from .core import items, make_context
from .encoding import DeltaCodec
from .errors import GraphParseError
from .nodes import size


def _edge_count_spec():
    return AugSpec(identity=0,
                   lift=lambda e: size(e[1]),
                   combine=lambda a, b: a + b)


@dataclass(frozen=True)
class Graph:
    vertices: object
    vctx: object
    ectx: object


def graph_contexts(block_size=64):
    vctx = make_context(block_size=block_size, encoding="object",
                        aug=_edge_count_spec())
    ectx = make_context(block_size=block_size,
                        encoding=DeltaCodec(value_width=0))
    return vctx, ectx


def _normalize_batch(pairs):
    """Sorted, deduplicated (src, dst) list."""
    return sorted(set((int(s), int(d)) for s, d in pairs))


def _group_by_src(edges):
    groups = []
    i = 0
    n = len(edges)
    while i < n:
        src = edges[i][0]
        j = i
        while j < n and edges[j][0] == src:
            j += 1
        groups.append((src, [d for _, d in edges[i:j]]))
        i = j
    return groups


def from_edge_list(pairs, block_size=64, symmetric=False):
    """Graph over the distinct directed edges; both endpoints become vertices."""
    vctx, ectx = graph_contexts(block_size)
    pairs = list(pairs)
    if symmetric:
        pairs += [(d, s) for s, d in pairs]
    edges = _normalize_batch(pairs)
    groups = dict(_group_by_src(edges))
    vids = sorted(set(groups) | {d for _, d in edges})
    entries = []
    for v in vids:
        dsts = groups.get(v)
        etree = ordmap.from_sorted(ectx, [(d, None) for d in dsts]) if dsts else None
        entries.append((v, etree))
    return Graph(ordmap.from_sorted(vctx, entries), vctx, ectx)


def _merge_edge_trees(ectx):
    def combine(old, new):
        if new is None:
            return old
        if old is None:
            return new
        return ordmap.union(ectx, old, new)
    return combine


def insert_edges(g, batch):
    """New snapshot with the batch's edges added; input graph unchanged."""
    edges = _normalize_batch(batch)
    if not edges:
        return g
    additions = {src: ordmap.from_sorted(g.ectx, [(d, None) for d in dsts])
                 for src, dsts in _group_by_src(edges)}
    for _, d in edges:
        additions.setdefault(d, None)
    entries = sorted(additions.items())
    vertices = ordmap.multi_insert(g.vctx, g.vertices, entries,
                                   combine=_merge_edge_trees(g.ectx))
    return Graph(vertices, g.vctx, g.ectx)


def delete_edges(g, batch):
    """New snapshot with the batch's edges removed; vertices are kept."""
    edges = _normalize_batch(batch)
    removals = []
    for src, dsts in _group_by_src(edges):
        if not ordmap.contains(g.vctx, g.vertices, src):
            continue
        removals.append((src, sorted(dsts)))
    if not removals:
        return g
    ectx = g.ectx

    def combine(old, incoming_keys):
        if old is None:
            return None
        return ordmap.multi_delete(ectx, old, incoming_keys)

    vertices = ordmap.multi_insert(g.vctx, g.vertices, removals, combine=combine)
    return Graph(vertices, g.vctx, g.ectx)


def degree(g, v):
    etree = ordmap.find(g.vctx, g.vertices, v)
    return size(etree)


def has_vertex(g, v):
    return ordmap.contains(g.vctx, g.vertices, v)


def neighbors(g, v):
    etree = ordmap.find(g.vctx, g.vertices, v)
    return [d for d, _ in items(g.ectx, etree)]


def vertex_ids(g):
    return [v for v, _ in items(g.vctx, g.vertices)]


def edge_count(g):
    """Total directed edges, read from the vertex tree's root aggregate."""
    if g.vertices is None:
        return 0
    return g.vertices.aug


def adjacency(g):
    """{vertex: sorted neighbor list} over the whole graph (test oracle aid)."""
    return {v: [d for d, _ in items(g.ectx, et)]
            for v, et in items(g.vctx, g.vertices)}


def graphs_equal(g1, g2):
    return adjacency(g1) == adjacency(g2)


def bfs(g, src):
    """Unweighted shortest-path hop counts from src; unreachable ids absent."""
    if not has_vertex(g, src):
        raise KeyError(f"vertex {src} not in graph")
    dist = {src: 0}
    frontier = [src]
    d = 0
    while frontier:
        d += 1
        nxt = []
        for u in frontier:
            etree = ordmap.find(g.vctx, g.vertices, u)
            if etree is None:
                continue
            for nb, _ in items(g.ectx, etree):
                if nb not in dist:
                    dist[nb] = d
                    nxt.append(nb)
        frontier = nxt
    return dist


def load_edge_list(path):
    """Parse a whitespace-separated edge list; '#' lines are comments."""
    pairs = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise GraphParseError(path, lineno,
                                      f"expected 'u v', got {line!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise GraphParseError(path, lineno,
                                      f"non-integer vertex id in {line!r}") from None
            if u < 0 or v < 0:
                raise GraphParseError(path, lineno, "vertex ids must be nonnegative")
            pairs.append((u, v))
    return pairs
