"""Random instance generators and brute-force oracles for the test suite.

The oracles here are deliberately naive and share no code with the library's
search paths beyond the data types.
"""

import itertools
import random

from tfs import SignatureDecls, SignatureError, compile_signature
from tfs.fstruct import FeatureGraph
from tfs.hierarchy import iter_bits


def random_signature(rng: random.Random, max_species=8, max_features=4, faithful=False):
    """A random signature with at most ``max_species`` species.

    With ``faithful`` the declared order coincides with species-set inclusion
    (no two types share a species set, and inclusion implies an edge).
    """
    while True:
        ns = rng.randint(2, max_species)
        species = [f"s{i}" for i in range(ns)]
        feats = [f"f{i}" for i in range(rng.randint(1, max_features))]
        groups = {}
        for _ in range(rng.randint(1, 4)):
            members = frozenset(rng.sample(species, rng.randint(2, ns)))
            groups.setdefault(members, f"T{len(groups)}")
        types = species + list(groups.values())
        edges = [(name, s) for members, name in groups.items() for s in sorted(members)]
        if faithful:
            for m1, n1 in groups.items():
                for m2, n2 in groups.items():
                    if m2 < m1:
                        edges.append((n1, n2))
        approp = []
        for s in species:
            for f in feats:
                if rng.random() < 0.45:
                    approp.append((s, f, rng.choice(types)))
        for members, name in groups.items():
            if rng.random() < 0.5:
                f = rng.choice(feats)
                v = rng.choice(types)
                approp.append((name, f, v))
                # members that declare f must refine v, others inherit it
                approp = [(t, g, w) if not (g == f and t in members) else (t, g, v)
                          for t, g, w in approp]
        approp = list({(t, f): (t, f, v) for t, f, v in approp}.values())
        if rng.random() < 0.3:
            rng.shuffle(types)
        try:
            sig = compile_signature(SignatureDecls(types, edges, approp))
        except SignatureError:
            continue
        if sig.features:
            return sig


def random_graph(rng: random.Random, sig, max_nodes=6):
    """Arbitrary graph: random tree plus a few extra arcs, random labels."""
    n = rng.randint(1, max_nodes)
    out = [{} for _ in range(n)]
    for i in range(1, n):
        for _ in range(20):
            p = rng.randrange(i)
            f = rng.choice(sig.features)
            if f not in out[p]:
                out[p][f] = i
                break
        else:
            return random_graph(rng, sig, max_nodes)
    for _ in range(rng.randint(0, 2)):
        p = rng.randrange(n)
        f = rng.choice(sig.features)
        if f not in out[p]:
            out[p][f] = rng.randrange(n)
    labels = [random_label(rng, sig) for _ in range(n)]
    return FeatureGraph.build(labels, out)


def random_label(rng, sig, containing=None):
    masks = [m for m in sig.species_masks
             if containing is None or m >> containing & 1]
    if rng.random() < 0.8:
        return rng.choice(masks)
    mask = 0
    while not mask:
        mask = rng.getrandbits(len(sig.species))
    if containing is not None:
        mask |= 1 << containing
    return mask


def satisfiable_graph(rng: random.Random, sig, max_nodes=6, root_species=None):
    """A graph built around a well-typed resolved structure, then generalized."""
    spec = sig.spec_approp
    root = rng.randrange(len(sig.species)) if root_species is None else root_species
    species = [root]
    out = [{}]
    frontier = [0]
    while frontier and len(species) < max_nodes:
        n = frontier.pop(0)
        feats = list(spec[species[n]])
        rng.shuffle(feats)
        for f in feats[:rng.randint(0, len(feats))]:
            if len(species) >= max_nodes:
                break
            if rng.random() < 0.2:
                ok = [m for m, s in enumerate(species) if spec[species[n]][f] >> s & 1]
                if ok:
                    out[n][f] = rng.choice(ok)
                    continue
            child = rng.choice(list(iter_bits(spec[species[n]][f])))
            species.append(child)
            out.append({})
            out[n][f] = len(species) - 1
            frontier.append(len(species) - 1)
    labels = [random_label(rng, sig, containing=s) if rng.random() < 0.7 else 1 << s
              for s in species]
    return FeatureGraph.build(labels, out)


def mixed_graph(rng, sig, max_nodes=6, **kw):
    if rng.random() < 0.6:
        return satisfiable_graph(rng, sig, max_nodes, **kw)
    return random_graph(rng, sig, max_nodes)


def graph_pair(rng, sig, max_nodes=6):
    """Two graphs likely to share their root species and some features."""
    if rng.random() < 0.7:
        root = rng.randrange(len(sig.species))
        return (mixed_graph(rng, sig, max_nodes, root_species=root)
                if rng.random() < 0.9 else random_graph(rng, sig, max_nodes),
                satisfiable_graph(rng, sig, max_nodes, root_species=root))
    return mixed_graph(rng, sig, max_nodes), mixed_graph(rng, sig, max_nodes)


# -- oracles ------------------------------------------------------------------

def morphism_exists(general, specific):
    """Exhaustive search over every node map; the definition, literally."""
    n, m = len(general), len(specific)
    for h in itertools.product(range(m), repeat=n):
        if h[0] != 0:
            continue
        ok = True
        for a in range(n):
            if specific.labels[h[a]] & ~general.labels[a]:
                ok = False
                break
            for f, b in general.arcs[a]:
                if specific.target(h[a], f) != h[b]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return True
    return False


def set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def unify_by_partitions(a, b):
    """Most general common extension by enumerating congruences on the
    disjoint union.  Returns the quotient graph of the finest consistent
    congruence, or None."""
    k = len(a)
    labels = list(a.labels) + list(b.labels)
    out = [dict(x) for x in a.arcs] + [{f: m + k for f, m in x} for x in b.arcs]
    best = None
    for part in set_partitions(list(range(len(labels)))):
        cls = {}
        for i, block in enumerate(part):
            for x in block:
                cls[x] = i
        if cls[0] != cls[k]:
            continue
        ok = True
        for block in part:
            lab = -1
            for x in block:
                lab &= labels[x]
            if not lab:
                ok = False
                break
        if not ok:
            continue
        arcs = [dict() for _ in part]
        for x in range(len(labels)):
            for f, y in out[x].items():
                c = arcs[cls[x]].get(f)
                if c is not None and c != cls[y]:
                    ok = False
                    break
                arcs[cls[x]][f] = cls[y]
            if not ok:
                break
        if not ok:
            continue
        if best is None or len(part) > len(best[0]):
            best = (part, arcs)
    if best is None:
        return None
    part, arcs = best
    qlabels = []
    for block in part:
        lab = -1
        for x in block:
            lab &= labels[x]
        qlabels.append(lab)
    root = next(i for i, block in enumerate(part) if 0 in block)
    return FeatureGraph.build(qlabels, arcs, root)


def brute_well_typable(sig, graph):
    doms = [[t for t, m in enumerate(sig.species_masks) if m & ~label == 0]
            for label in graph.labels]
    for choice in itertools.product(*doms):
        good = True
        for n, f, m in graph.arc_list():
            v = sig.approp[choice[n]].get(f)
            if v is None or sig.species_masks[choice[m]] & ~sig.species_masks[v]:
                good = False
                break
        if good:
            return True
    return False


def set_unify_oracle(sig, F, G):
    """Unify every pair of resolvents of F and G, keeping the well-typed results."""
    from tfs import brute_force_resolve, graph_unify, materialize
    from tfs.resolve import labelling_ok
    left = [materialize(F, t) for t in brute_force_resolve(sig, F)]
    right = [materialize(G, t) for t in brute_force_resolve(sig, G)]
    result = set()
    for A in left:
        for B in right:
            U = graph_unify(sig, A, B)
            if U is None:
                continue
            species = [next(iter_bits(l)) for l in U.labels]
            if labelling_ok(sig, U, species):
                result.add(U)
    return result


def resolvent_set(sig, F):
    from tfs import brute_force_resolve, materialize
    return {materialize(F, t) for t in brute_force_resolve(sig, F)}
