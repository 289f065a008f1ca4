"""
Unfilling: dropping arcs whose values the appropriateness table already
predicts, and filling them back in on demand.

An arc ``n --f--> m`` is redundant when ``m`` is a leaf reached by no other
arc and re-filling ``f`` on ``n`` rebuilds exactly the same compact value.
Filling gives the new target every species appropriate for ``f`` on the
chosen species of ``n``, independently of everything else, so redundancy is
a purely local property of the block ``n`` lives in.
"""

from __future__ import annotations

from typing import List, Optional, Tuple

from .drfs import CompactDRFS, from_blocks, remap
from .errors import TfsError
from .fstruct import FeatureGraph
from .hierarchy import CompiledSignature, iter_bits


def fill_node(sig: CompiledSignature, D: CompactDRFS, node: int,
              feature: str) -> Optional[CompactDRFS]:
    """Add a fresh ``feature`` arc on ``node``; ``None`` if no species of
    ``node`` has ``feature`` appropriate."""
    graph = D.graph
    if graph.target(node, feature) is not None:
        raise TfsError(f"node {node} already has feature {feature!r}")
    new = len(graph)
    spec = sig.spec_approp
    blocks = []
    new_label = 0
    for nodes, rows in D.blocks():
        if node in nodes:
            i = nodes.index(node)
            grown = set()
            for r in rows:
                for x in iter_bits(spec[r[i]].get(feature, 0)):
                    grown.add(r + (x,))
                    new_label |= 1 << x
            if not grown:
                return None
            blocks.append((nodes + (new,), frozenset(grown)))
        else:
            blocks.append((nodes, rows))
    out = [graph.out(n) for n in range(len(graph))] + [{}]
    out[node][feature] = new
    labels = list(graph.labels) + [new_label]
    g2, order = FeatureGraph.build_with_order(labels, out)
    return from_blocks(sig, g2, remap(blocks, order))


def remove_arc(sig: CompiledSignature, D: CompactDRFS, node: int,
               feature: str) -> Tuple[CompactDRFS, List[int]]:
    """Drop an arc and whatever becomes unreachable.

    Returns the new value and the old node ids in new order.
    """
    graph = D.graph
    out = [graph.out(n) for n in range(len(graph))]
    del out[node][feature]
    g2, order = FeatureGraph.build_with_order(graph.labels, out)
    return from_blocks(sig, g2, remap(D.blocks(), order)), order


def is_redundant(sig: CompiledSignature, D: CompactDRFS, node: int,
                 feature: str) -> bool:
    target = D.graph.target(node, feature)
    if target is None or target == 0 or D.graph.arcs[target]:
        return False
    if D.graph.indegree()[target] != 1:
        return False
    smaller, order = remove_arc(sig, D, node, feature)
    return fill_node(sig, smaller, order.index(node), feature) == D


def _finishing_order(graph: FeatureGraph) -> List[int]:
    post: List[int] = []
    seen = {0}
    stack = [(0, iter(graph.arcs[0]))]
    while stack:
        n, it = stack[-1]
        step = next(it, None)
        if step is None:
            post.append(n)
            stack.pop()
            continue
        m = step[1]
        if m not in seen:
            seen.add(m)
            stack.append((m, iter(graph.arcs[m])))
    return post


def unfill_trace(sig: CompiledSignature, D: CompactDRFS):
    """Unfill ``D`` and record each removal.

    Returns ``(result, steps)`` with steps ``(before, node, feature, after)``,
    where ``node`` is numbered as in ``after``.
    """
    steps = []
    while True:
        for m in _finishing_order(D.graph):
            hit = None
            for n, f, t in D.graph.arc_list():
                if t == m and is_redundant(sig, D, n, f):
                    hit = (n, f)
                    break
            if hit:
                break
        else:
            return D, steps
        n, f = hit
        after, order = remove_arc(sig, D, n, f)
        steps.append((D, order.index(n), f, after))
        D = after


def unfill(sig: CompiledSignature, D: CompactDRFS) -> CompactDRFS:
    """Remove redundant arcs bottom-up until none is left."""
    return unfill_trace(sig, D)[0]
