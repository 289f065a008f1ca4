"""
Type resolution and the weaker well-typedness checks it is contrasted with.

``resolve(sig, F)`` computes every species labelling of ``F``'s graph that
refines ``F``'s labels and is well-typed at species level, i.e. the set of
resolvents of ``F``.  ``F`` is satisfiable iff that set is nonempty.

``is_well_typed`` / ``is_well_typable`` implement the type-level notions
used by type-inferencing systems.  A structure can be well-typed and still
have no resolvents, because well-typedness never looks below the type a node
is labelled with.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

from .errors import ResolutionBoundError
from .fstruct import FeatureGraph
from .hierarchy import CompiledSignature, iter_bits, popcount

DEFAULT_BOUND = 10**6


@dataclass(frozen=True)
class LabellingRelation:
    """A set of species labellings of one graph; tuple position = node id."""

    nodes: Tuple[int, ...]
    tuples: FrozenSet[Tuple[int, ...]]

    def __len__(self) -> int:
        return len(self.tuples)

    def __iter__(self) -> Iterator[Tuple[int, ...]]:
        return iter(sorted(self.tuples))

    def __bool__(self) -> bool:
        return bool(self.tuples)

    def named(self, sig: CompiledSignature):
        return {tuple(sig.species[s] for s in t) for t in self.tuples}


def materialize(graph: FeatureGraph, labelling: Sequence[int]) -> FeatureGraph:
    """The resolved structure assigning species ``labelling[n]`` to node ``n``."""
    return graph.relabel([1 << s for s in labelling])


def resolvents(graph: FeatureGraph, rel: LabellingRelation) -> set:
    return {materialize(graph, t) for t in rel.tuples}


# -- well-typedness (type level) --------------------------------------------

def check_well_typed(sig: CompiledSignature, graph: FeatureGraph) -> List[str]:
    """Diagnostics explaining why ``graph`` is not well-typed; empty if it is.

    A node's label must equal the species set of some declared type.  When
    several types denote the same set, the node is well-typed if any one of
    them makes all of its outgoing arcs well-typed.
    """
    problems = []
    for n, label in enumerate(graph.labels):
        cands = sig.denoting_types(label)
        if not cands:
            problems.append(f"node {n}: label {{{','.join(sorted(sig.names(label)))}}}"
                            " is not denoted by any type")
            continue
        if not graph.arcs[n]:
            continue
        bad = [_bad_arc(sig, t, graph, n) for t in cands]
        if all(bad):
            t = sig.types[cands[0]]
            f = bad[0]
            if f in sig.approp[cands[0]]:
                problems.append(f"node {n} ({t}): value of {f} is not of type "
                                f"{sig.types[sig.approp[cands[0]][f]]}")
            else:
                problems.append(f"node {n} ({t}): feature {f} is not appropriate")
    return problems


def _bad_arc(sig, t, graph, n) -> Optional[str]:
    """First outgoing feature of ``n`` that is ill-typed if ``n`` has type ``t``."""
    for f, m in graph.arcs[n]:
        v = sig.approp[t].get(f)
        if v is None or graph.labels[m] & ~sig.species_masks[v]:
            return f
    return None


def is_well_typed(sig: CompiledSignature, graph: FeatureGraph) -> bool:
    return not check_well_typed(sig, graph)


def _typable_domains(sig, graph):
    return [[t for t, m in enumerate(sig.species_masks) if m & ~label == 0]
            for label in graph.labels]


def _typable_arc_ok(sig, t, f, u) -> bool:
    v = sig.approp[t].get(f)
    return v is not None and sig.species_masks[u] & ~sig.species_masks[v] == 0


def is_well_typable(sig: CompiledSignature, graph: FeatureGraph) -> bool:
    """True iff some same-graph relabelling by types, each no more general than
    the original label, is well-typed.

    Solved as a CSP over per-node type choices: arc consistency, then
    backtracking.
    """
    doms = _typable_domains(sig, graph)
    arcs = graph.arc_list()
    changed = True
    while changed:
        changed = False
        for n, f, m in arcs:
            if n == m:
                keep_n = keep_m = [t for t in doms[n] if _typable_arc_ok(sig, t, f, t)]
            else:
                keep_n = [t for t in doms[n]
                          if any(_typable_arc_ok(sig, t, f, u) for u in doms[m])]
                keep_m = [u for u in doms[m]
                          if any(_typable_arc_ok(sig, t, f, u) for t in keep_n)]
            if len(keep_n) != len(doms[n]) or len(keep_m) != len(doms[m]):
                changed = True
            doms[n], doms[m] = keep_n, keep_m
            if not keep_n or not keep_m:
                return False

    order = sorted(range(len(doms)), key=lambda n: (len(doms[n]), n))
    choice: Dict[int, int] = {}

    def consistent(n, t):
        for a, f, b in arcs:
            if a == n or b == n:
                ta = t if a == n else choice.get(a)
                tb = t if b == n else choice.get(b)
                if ta is not None and tb is not None and not _typable_arc_ok(sig, ta, f, tb):
                    return False
        return True

    def search(i):
        if i == len(order):
            return True
        n = order[i]
        for t in doms[n]:
            if consistent(n, t):
                choice[n] = t
                if search(i + 1):
                    return True
                del choice[n]
        return False

    return search(0)


# -- type resolution ----------------------------------------------------------

Table = Tuple[Tuple[int, ...], FrozenSet[Tuple[int, ...]]]


def solve(sig: CompiledSignature, graph: FeatureGraph,
          domains: Optional[Sequence[int]] = None,
          tables: Sequence[Table] = ()) -> FrozenSet[Tuple[int, ...]]:
    """All species labellings within ``domains`` (default: the graph labels)
    that are well-typed at species level and agree with every table.

    A table ``(nodes, allowed)`` demands that the labelling restricted to
    ``nodes`` is one of the ``allowed`` tuples; a node may repeat in ``nodes``.
    """
    doms = list(graph.labels if domains is None else domains)
    arcs = graph.arc_list()
    spec = sig.spec_approp
    for nodes, allowed in tables:
        for i, n in enumerate(nodes):
            col = 0
            for row in allowed:
                col |= 1 << row[i]
            doms[n] &= col
    if not all(doms):
        return frozenset()
    if not _arc_consistency(spec, doms, arcs):
        return frozenset()

    size = len(doms)
    out_by = [[] for _ in range(size)]
    in_by = [[] for _ in range(size)]
    for n, f, m in arcs:
        out_by[n].append((f, m))
        in_by[m].append((n, f))
    node_tables = [[] for _ in range(size)]
    for k, (nodes, _) in enumerate(tables):
        for n in set(nodes):
            node_tables[n].append(k)
    live = [set(allowed) for _, allowed in tables]

    order = sorted(range(size), key=lambda n: (popcount(doms[n]), n))
    labelling = [-1] * size
    found = set()

    def candidates(n):
        mask = doms[n]
        for src, f in in_by[n]:
            s = labelling[src]
            if s >= 0 and src != n:
                mask &= spec[s].get(f, 0)
        return mask

    def fits(n, s):
        for f, m in out_by[n]:
            allowed = spec[s].get(f)
            if allowed is None:
                return False
            t = s if m == n else labelling[m]
            if t >= 0 and not allowed >> t & 1:
                return False
        return True

    def search(i):
        if i == size:
            found.add(tuple(labelling))
            return
        n = order[i]
        for s in iter_bits(candidates(n)):
            if not fits(n, s):
                continue
            labelling[n] = s
            saved = []
            ok = True
            for k in node_tables[n]:
                nodes = tables[k][0]
                rows = {r for r in live[k]
                        if all(r[j] == labelling[x] for j, x in enumerate(nodes)
                               if labelling[x] >= 0)}
                saved.append((k, live[k]))
                live[k] = rows
                if not rows:
                    ok = False
                    break
            if ok:
                search(i + 1)
            for k, rows in saved:
                live[k] = rows
            labelling[n] = -1

    search(0)
    return frozenset(found)


def _arc_consistency(spec, doms, arcs) -> bool:
    """Prune species without support along some arc, in both directions.

    Mutates ``doms``; returns False as soon as a domain empties.
    """
    touching: Dict[int, List[int]] = {}
    for k, (n, _, m) in enumerate(arcs):
        touching.setdefault(n, []).append(k)
        touching.setdefault(m, []).append(k)
    queue = deque(range(len(arcs)))
    queued = set(queue)
    while queue:
        k = queue.popleft()
        queued.discard(k)
        n, f, m = arcs[k]
        src = 0
        reach = 0
        for s in iter_bits(doms[n]):
            allowed = spec[s].get(f)
            if allowed is None:
                continue
            if n == m:
                if allowed >> s & 1:
                    src |= 1 << s
                    reach |= 1 << s
            elif allowed & doms[m]:
                src |= 1 << s
                reach |= allowed
        tgt = doms[m] & reach
        for node, new in ((n, src), (m, tgt)):
            if new != doms[node]:
                doms[node] = new
                if not new:
                    return False
                for j in touching[node]:
                    if j not in queued:
                        queue.append(j)
                        queued.add(j)
    return True


def resolve(sig: CompiledSignature, graph: FeatureGraph) -> LabellingRelation:
    """The set of all resolvents of ``graph``, as a labelling relation."""
    return LabellingRelation(tuple(range(len(graph))), solve(sig, graph))


def is_satisfiable(sig: CompiledSignature, graph: FeatureGraph) -> bool:
    return bool(resolve(sig, graph))


def labelling_ok(sig: CompiledSignature, graph: FeatureGraph,
                 labelling: Sequence[int]) -> bool:
    """The species-level arc condition, checked literally."""
    for n, f, m in graph.arc_list():
        allowed = sig.spec_approp[labelling[n]].get(f)
        if allowed is None or not allowed >> labelling[m] & 1:
            return False
    return True


def brute_force_resolve(sig: CompiledSignature, graph: FeatureGraph,
                        bound: int = DEFAULT_BOUND) -> LabellingRelation:
    """Resolution by enumerating the whole product of per-node label choices."""
    size = 1
    for label in graph.labels:
        size *= popcount(label)
    if size > bound:
        raise ResolutionBoundError(size, bound)
    choices = [list(iter_bits(label)) for label in graph.labels]
    tuples = frozenset(t for t in itertools.product(*choices)
                       if labelling_ok(sig, graph, t))
    return LabellingRelation(tuple(range(len(graph))), tuples)
