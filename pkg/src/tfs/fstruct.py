"""
Feature-structure graphs, subsumption between them and graph unification.

A :class:`FeatureGraph` is rooted, deterministic (at most one arc per feature
per node) and may contain reentrancies and cycles.  Node labels are species
bit-sets.  Graphs are always stored in canonical form: nodes are numbered in
depth-first preorder from the root (node 0), children visited in feature-name
order.  Two graphs are therefore isomorphic iff they compare equal, and they
can be put in sets and used as dict keys.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .errors import TfsError
from .hierarchy import CompiledSignature, popcount

Arcs = Tuple[Tuple[str, int], ...]


def canonical_order(out: Sequence[Mapping[str, int]], root: int = 0) -> List[int]:
    """Old node ids in canonical DFS preorder; unreachable nodes are dropped."""
    order = []
    seen = set()
    stack = [root]
    while stack:
        n = stack.pop()
        if n in seen:
            continue
        seen.add(n)
        order.append(n)
        for f in sorted(out[n], reverse=True):
            m = out[n][f]
            if m not in seen:
                stack.append(m)
    return order


@dataclass(frozen=True)
class FeatureGraph:
    labels: Tuple[int, ...]
    arcs: Tuple[Arcs, ...]

    @classmethod
    def build(cls, labels: Sequence[int], out: Sequence[Mapping[str, int]],
              root: int = 0) -> "FeatureGraph":
        return cls.build_with_order(labels, out, root)[0]

    @classmethod
    def build_with_order(cls, labels, out, root=0):
        """Canonicalize; also return the old ids in new order."""
        order = canonical_order(out, root)
        new = {old: i for i, old in enumerate(order)}
        new_labels = []
        new_arcs = []
        for old in order:
            if not labels[old]:
                raise TfsError("empty node label: inconsistent feature structure")
            new_labels.append(labels[old])
            new_arcs.append(tuple(sorted((f, new[m]) for f, m in out[old].items())))
        return cls(tuple(new_labels), tuple(new_arcs)), order

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def root(self) -> int:
        return 0

    def out(self, n: int) -> Dict[str, int]:
        return dict(self.arcs[n])

    def target(self, n: int, feature: str) -> Optional[int]:
        for f, m in self.arcs[n]:
            if f == feature:
                return m
        return None

    def arc_list(self) -> List[Tuple[int, str, int]]:
        return [(n, f, m) for n, arcs in enumerate(self.arcs) for f, m in arcs]

    def indegree(self) -> List[int]:
        deg = [0] * len(self.labels)
        for _, _, m in self.arc_list():
            deg[m] += 1
        return deg

    def is_resolved(self) -> bool:
        return all(popcount(l) == 1 for l in self.labels)

    def relabel(self, labels: Sequence[int]) -> "FeatureGraph":
        """Same graph, new labels (node numbering is unaffected)."""
        if len(labels) != len(self.labels) or not all(labels):
            raise TfsError("relabelling must give every node a nonempty label")
        return FeatureGraph(tuple(labels), self.arcs)


def fs_subsumes(sig: CompiledSignature, general: FeatureGraph,
                specific: FeatureGraph) -> bool:
    """True iff there is a root-preserving arc morphism from ``general`` into
    ``specific`` under which every label can only shrink.

    Graphs are deterministic, so the morphism, when it exists, is forced by
    following arcs from the root.
    """
    h = {0: 0}
    stack = [0]
    while stack:
        n = stack.pop()
        n2 = h[n]
        if specific.labels[n2] & ~general.labels[n]:
            return False
        for f, m in general.arcs[n]:
            m2 = specific.target(n2, f)
            if m2 is None:
                return False
            if m in h:
                if h[m] != m2:
                    return False
            else:
                h[m] = m2
                stack.append(m)
    return True


class _UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> int:
        a, b = self.find(a), self.find(b)
        if a != b:
            self.parent[b] = a
        return a


def merge_nodes(labels: Sequence[int], out: Sequence[Mapping[str, int]],
                pairs: Sequence[Tuple[int, int]], root: int = 0):
    """Close ``pairs`` of node identifications under arc congruence.

    Returns ``(graph, classes)`` where ``classes[i]`` is the canonical node of
    the result that old node ``i`` ended up in (``None`` if unreachable), or
    ``None`` when some merged label becomes empty.
    """
    uf = _UnionFind(len(labels))
    label = list(labels)
    arcs = [dict(o) for o in out]
    queue = list(pairs)
    while queue:
        a, b = queue.pop()
        a, b = uf.find(a), uf.find(b)
        if a == b:
            continue
        keep = uf.union(a, b)
        gone = b if keep == a else a
        label[keep] &= label[gone]
        if not label[keep]:
            return None
        for f, m in arcs[gone].items():
            if f in arcs[keep]:
                queue.append((arcs[keep][f], m))
            else:
                arcs[keep][f] = m
        arcs[gone] = {}
    reps = sorted({uf.find(i) for i in range(len(labels))})
    ix = {r: k for k, r in enumerate(reps)}
    q_labels = [label[r] for r in reps]
    q_out = [{f: ix[uf.find(m)] for f, m in arcs[r].items()} for r in reps]
    graph, order = FeatureGraph.build_with_order(q_labels, q_out, ix[uf.find(root)])
    pos = {old: new for new, old in enumerate(order)}
    classes = [pos.get(ix[uf.find(i)]) for i in range(len(labels))]
    return graph, classes


def disjoint_union(a: FeatureGraph, b: FeatureGraph):
    """Labels and arc maps of ``a`` followed by ``b`` (b's ids offset by len(a))."""
    k = len(a)
    labels = list(a.labels) + list(b.labels)
    out = [dict(x) for x in a.arcs] + [{f: m + k for f, m in x} for x in b.arcs]
    return labels, out, k


def graph_unify_with_classes(a: FeatureGraph, b: FeatureGraph):
    labels, out, k = disjoint_union(a, b)
    return merge_nodes(labels, out, [(0, k)], root=0)


def graph_unify(sig: CompiledSignature, a: FeatureGraph,
                b: FeatureGraph) -> Optional[FeatureGraph]:
    """Most general common extension of ``a`` and ``b``, or ``None`` on clash.

    Root-aligned nodes are merged with union-find, labels are intersected.
    No occurs check: the result may be cyclic.
    """
    merged = graph_unify_with_classes(a, b)
    return None if merged is None else merged[0]
