"""
Compact disjunctive resolved feature structures.

All resolvents of a structure share one graph and differ only in their node
labels, so the whole set is a relation over nodes.  :func:`compact` factors
that relation into independent blocks:

* a node whose species never varies is ``Fixed``;
* a node that varies independently of everything else is ``Free``;
* every other block of mutually dependent nodes becomes one *named
  disjunction*: each node gets a ``Column`` of species, and alternative ``i``
  is chosen jointly across all columns carrying that name.

The factorization is the finest product decomposition of the relation, so
it is unique.  Names are numbered by first occurrence in canonical node order
and alternatives are sorted, which makes equal relations compact to equal
values.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from .errors import TfsError
from .fstruct import FeatureGraph, disjoint_union, merge_nodes
from .hierarchy import CompiledSignature, iter_bits
from .resolve import LabellingRelation, materialize, solve

Row = Tuple[int, ...]
Block = Tuple[Tuple[int, ...], FrozenSet[Row]]

# beyond this many dependency components the finest grouping search is skipped
# and the components are kept together as one name
MAX_COMPONENT_SEARCH = 12


@dataclass(frozen=True)
class Fixed:
    species: int


@dataclass(frozen=True)
class Free:
    mask: int


@dataclass(frozen=True)
class Column:
    name: int
    values: Tuple[int, ...]


Binding = Union[Fixed, Free, Column]


class CompactDRFS:
    """One feature graph plus per-node bindings encoding a set of resolvents.

    Instances are canonical: two values denote the same set of resolved
    structures iff they compare equal.
    """

    __slots__ = ("sig", "graph", "bindings")

    def __init__(self, sig: CompiledSignature, graph: FeatureGraph,
                 bindings: Sequence[Binding]):
        self.sig = sig
        self.graph = graph
        self.bindings = tuple(bindings)

    @property
    def disjunctions(self) -> Dict[int, int]:
        """Name -> arity."""
        out = {}
        for b in self.bindings:
            if isinstance(b, Column):
                out[b.name] = len(b.values)
        return out

    def blocks(self) -> List[Block]:
        """Independent factors of the denoted relation, in node order."""
        blocks = []
        names: Dict[int, List[int]] = {}
        for n, b in enumerate(self.bindings):
            if isinstance(b, Fixed):
                blocks.append(((n,), frozenset({(b.species,)})))
            elif isinstance(b, Free):
                blocks.append(((n,), frozenset((s,) for s in iter_bits(b.mask))))
            else:
                if b.name not in names:
                    names[b.name] = []
                    blocks.append((b.name, None))
                names[b.name].append(n)
        result = []
        for nodes, rows in blocks:
            if rows is None:
                members = tuple(names[nodes])
                cols = [self.bindings[n].values for n in members]
                rows = frozenset(zip(*cols))
                nodes = members
            result.append((nodes, rows))
        return result

    def __eq__(self, other):
        if not isinstance(other, CompactDRFS):
            return NotImplemented
        return self.graph == other.graph and self.bindings == other.bindings

    def __hash__(self):
        return hash((self.graph, self.bindings))

    def __len__(self):
        return len(self.graph)

    def __repr__(self):
        from .textio import print_drfs
        return f"CompactDRFS({print_drfs(self)!r})"


def _project(rows: Iterable[Row], positions: Sequence[int]) -> set:
    return {tuple(r[p] for p in positions) for r in rows}


def factorize(nodes: Sequence[int], rows: Iterable[Row]) -> List[Block]:
    """Finest decomposition of ``rows`` (over ``nodes``) into a product of
    independent blocks.  Every returned block lists its nodes in increasing
    order.
    """
    rows = set(rows)
    if not rows:
        raise TfsError("cannot factor an empty relation")
    order = sorted(range(len(nodes)), key=lambda i: nodes[i])
    width = len(order)
    values = [_project(rows, [p]) for p in range(width)]
    blocks: List[List[int]] = []
    varying = []
    for p in order:
        (blocks.append([p]) if len(values[p]) == 1 else varying.append(p))

    # pairwise dependence: a pair is independent iff its projection is the
    # full product of its marginals
    parent = {p: p for p in varying}

    def find(p):
        while parent[p] != p:
            parent[p] = parent[parent[p]]
            p = parent[p]
        return p

    for a, b in itertools.combinations(varying, 2):
        if find(a) == find(b):
            continue
        if len(_project(rows, [a, b])) != len(values[a]) * len(values[b]):
            parent[find(b)] = find(a)
    comps: Dict[int, List[int]] = {}
    for p in varying:
        comps.setdefault(find(p), []).append(p)
    components = sorted(comps.values())

    if components:
        all_pos = [p for c in components for p in c]
        size = 1
        for c in components:
            size *= len(_project(rows, c))
        if size == len(_project(rows, all_pos)):
            blocks.extend(components)
        else:
            blocks.extend(_group(rows, components))

    result = []
    for positions in blocks:
        positions = sorted(positions, key=lambda p: nodes[p])
        result.append((tuple(nodes[p] for p in positions),
                       frozenset(_project(rows, positions))))
    result.sort(key=lambda b: b[0][0])
    return result


def _group(rows, components: List[List[int]]) -> List[List[int]]:
    """Coarsest-to-finest split of pairwise-independent components that are
    jointly dependent (e.g. parity constraints)."""
    if len(components) == 1:
        return [components[0]]
    if len(components) > MAX_COMPONENT_SEARCH:
        return [[p for c in components for p in c]]
    flat = lambda cs: [p for c in cs for p in c]
    whole = len(_project(rows, flat(components)))
    first, others = components[0], components[1:]
    for k in range(0, len(others)):
        for extra in itertools.combinations(range(len(others)), k):
            chosen = [first] + [others[i] for i in extra]
            rest = [c for i, c in enumerate(others) if i not in extra]
            if not rest:
                continue
            if len(_project(rows, flat(chosen))) * len(_project(rows, flat(rest))) == whole:
                return [flat(chosen)] + _group(rows, rest)
    return [flat(components)]


def from_blocks(sig: CompiledSignature, graph: FeatureGraph,
                blocks: Sequence[Block]) -> CompactDRFS:
    """Assemble a canonical value from a canonical graph and its blocks.

    Blocks are re-factored; the graph's labels are replaced by the
    per-node projections of the blocks.
    """
    refined: List[Block] = []
    for nodes, rows in blocks:
        refined.extend(factorize(nodes, rows))
    refined.sort(key=lambda b: b[0][0])
    bindings: List[Optional[Binding]] = [None] * len(graph)
    labels = [0] * len(graph)
    name = 0
    for nodes, rows in refined:
        if len(nodes) == 1:
            mask = 0
            for (s,) in rows:
                mask |= 1 << s
            n = nodes[0]
            labels[n] = mask
            bindings[n] = Fixed(next(iter(rows))[0]) if len(rows) == 1 else Free(mask)
            continue
        name += 1
        alts = sorted(rows)
        for i, n in enumerate(nodes):
            col = tuple(r[i] for r in alts)
            bindings[n] = Column(name, col)
            for s in col:
                labels[n] |= 1 << s
    if any(b is None for b in bindings):
        raise TfsError("blocks do not cover every node")
    return CompactDRFS(sig, graph.relabel(labels), bindings)


def compact(sig: CompiledSignature, graph: FeatureGraph,
            rel: Union[LabellingRelation, Iterable[Row]]) -> CompactDRFS:
    """Collapse a nonempty set of same-graph labellings into a CompactDRFS."""
    rows = rel.tuples if isinstance(rel, LabellingRelation) else frozenset(rel)
    if not rows:
        raise TfsError("cannot compact an empty relation")
    return from_blocks(sig, graph, [(tuple(range(len(graph))), frozenset(rows))])


def relation(D: CompactDRFS) -> FrozenSet[Row]:
    """The explicit labelling relation denoted by ``D``."""
    blocks = D.blocks()
    size = len(D.graph)
    out = set()
    for combo in itertools.product(*[sorted(rows) for _, rows in blocks]):
        row = [0] * size
        for (nodes, _), part in zip(blocks, combo):
            for n, s in zip(nodes, part):
                row[n] = s
        out.add(tuple(row))
    return frozenset(out)


def expand(D: CompactDRFS) -> set:
    """Every resolved structure denoted by ``D``."""
    return {materialize(D.graph, row) for row in relation(D)}


def expansion_size(D: CompactDRFS) -> int:
    size = 1
    for _, rows in D.blocks():
        size *= len(rows)
    return size


def remap(D_blocks: Sequence[Block], order: Sequence[int]) -> List[Block]:
    """Renumber block nodes after a graph was re-canonicalized.

    ``order`` lists old ids in new order; nodes missing from it are projected
    out of their blocks.
    """
    new = {old: i for i, old in enumerate(order)}
    out = []
    for nodes, rows in D_blocks:
        keep = [i for i, n in enumerate(nodes) if n in new]
        if not keep:
            continue
        out.append((tuple(new[nodes[i]] for i in keep),
                    frozenset(tuple(r[i] for i in keep) for r in rows)))
    return out


def drfs_unify(sig: CompiledSignature, a: CompactDRFS,
               b: CompactDRFS) -> Optional[CompactDRFS]:
    """Unify two compact values; ``None`` when no pair of their resolvents
    unifies into a well-typed resolved structure.

    The graphs are merged from the roots.  An arc present on one side only is
    constrained by the other side's species exactly as if it had been filled
    in on demand: the merged structure must be well-typed at species level.
    Named disjunctions of both inputs become table constraints on the merged
    nodes; the surviving joint relation is compacted afresh.
    """
    labels, out, k = disjoint_union(a.graph, b.graph)
    merged = merge_nodes(labels, out, [(0, k)])
    if merged is None:
        return None
    graph, classes = merged
    tables = []
    for offset, D in ((0, a), (k, b)):
        for nodes, rows in D.blocks():
            if len(nodes) > 1:
                tables.append((tuple(classes[n + offset] for n in nodes), rows))
    rows = solve(sig, graph, tables=tables)
    if not rows:
        return None
    return compact(sig, graph, rows)


def check_invariants(D: CompactDRFS) -> None:
    """Assert the structural invariants of a compact value."""
    arity: Dict[int, int] = {}
    for n, b in enumerate(D.bindings):
        if isinstance(b, Column):
            assert len(set(b.values)) > 1, "constant column"
            assert arity.setdefault(b.name, len(b.values)) == len(b.values)
        elif isinstance(b, Free):
            assert bin(b.mask).count("1") >= 2, "Free set with fewer than two members"
        mask = (1 << b.species) if isinstance(b, Fixed) else (
            b.mask if isinstance(b, Free) else sum(1 << s for s in set(b.values)))
        assert D.graph.labels[n] == mask
    for nodes, rows in D.blocks():
        if len(nodes) > 1:
            assert len(rows) == len(D.bindings[nodes[0]].values), "duplicate alternative"
            assert len(factorize(nodes, rows)) == 1, "name factors further"
