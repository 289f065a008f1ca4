"""
Type signatures: a finite partial order of types under subsumption plus an
appropriateness partial function ``(type, feature) -> value type``.

A signature is declared as a :class:`SignatureDecls` (usually produced by
:func:`tfs.textio.parse_signature`) and compiled once into an immutable
:class:`CompiledSignature`.  Compilation closes the subtype edges into a
reflexive-transitive subsumption relation, identifies the *species* (types
with no proper subtypes) and pushes appropriateness declarations down to
every type, so that the rest of the package can work purely with
species sets.

Species sets are Python ``int`` bit-sets: bit ``i`` stands for the species
with dense id ``i``.  Type, species and feature ids are assigned in sorted
name order, which makes compilation independent of declaration order.

Appropriateness inheritance: a declaration ``Approp(t, f) = v`` applies to
every type below ``t``.  A declaration on a subtype ``t2`` overrides it only
when its value is subsumed by ``v``; anything else is a compile error.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Tuple

from .errors import SignatureError


def iter_bits(mask: int) -> Iterator[int]:
    """Yield the indices of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return bin(mask).count("1")


@dataclass
class SignatureDecls:
    """Raw declarations of a signature.

    ``edges`` are ``(general, specific)`` pairs.  When ``strict`` is true
    (as for parsed signature files) each edge claims a *proper* subtype, so a
    self-edge is a cycle; otherwise a self-edge is a harmless reflexive pair.
    ``spans`` optionally maps ``("type", t)``, ``("edge", g, s)`` and
    ``("approp", t, f)`` keys to source spans used in diagnostics.
    """

    types: List[str] = field(default_factory=list)
    edges: List[Tuple[str, str]] = field(default_factory=list)
    approp: List[Tuple[str, str, str]] = field(default_factory=list)
    strict: bool = False
    spans: dict = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class CompiledSignature:
    types: Tuple[str, ...]
    type_index: Dict[str, int]
    # per type: bit-set over *types* of everything it subsumes (reflexive)
    below: Tuple[int, ...]
    species: Tuple[str, ...]
    species_index: Dict[str, int]
    # per type: bit-set over species
    species_masks: Tuple[int, ...]
    features: Tuple[str, ...]
    feature_index: Dict[str, int]
    # per type: feature -> value type id, after inheritance
    approp: Tuple[Dict[str, int], ...]
    # per species: feature -> species bit-set of the value type
    spec_approp: Tuple[Dict[str, int], ...]
    # species bit-set -> type ids denoting exactly that set
    denoters: Dict[int, Tuple[int, ...]]

    @property
    def all_species(self) -> int:
        return (1 << len(self.species)) - 1

    def type_id(self, name: str) -> int:
        try:
            return self.type_index[name]
        except KeyError:
            raise KeyError(f"unknown type {name!r}") from None

    def species_type(self, s: int) -> int:
        """Type id of species ``s``."""
        return self.type_index[self.species[s]]

    def names(self, mask: int) -> frozenset:
        """Species names in a bit-set."""
        return frozenset(self.species[i] for i in iter_bits(mask))

    def mask_of(self, names: Iterable[str]) -> int:
        mask = 0
        for n in names:
            mask |= 1 << self.species_index[n]
        return mask

    def denoting_types(self, mask: int) -> Tuple[int, ...]:
        return self.denoters.get(mask, ())

    def most_general_name(self, mask: int) -> Optional[str]:
        """Name of the most general type whose species set is ``mask``.

        Ties between incomparable types go to the smallest name.
        """
        cands = self.denoters.get(mask, ())
        if not cands:
            return None
        tops = [c for c in cands
                if not any(d != c and self.below[d] >> c & 1 for d in cands)]
        return self.types[min(tops)]

    def spec_approp_of(self, s: int, feature: str) -> Optional[int]:
        return self.spec_approp[s].get(feature)

    def __repr__(self):
        return (f"CompiledSignature({len(self.types)} types, "
                f"{len(self.species)} species, {len(self.features)} features)")


def _span(decls: SignatureDecls, *key):
    return decls.spans.get(key)


def compile_signature(decls: SignatureDecls) -> CompiledSignature:
    """Validate ``decls`` and compile them into a :class:`CompiledSignature`.

    Raises :class:`SignatureError` on an empty signature, undeclared
    identifiers, subtype cycles, duplicate appropriateness entries and
    inheritance conflicts.
    """
    declared = set(decls.types)
    if not declared:
        raise SignatureError("signature declares no types")
    for g, s in decls.edges:
        for name in (g, s):
            if name not in declared:
                raise SignatureError(f"undeclared type {name!r} in subtype edge",
                                     _span(decls, "edge", g, s))
    seen_approp = {}
    for t, f, v in decls.approp:
        if t not in declared:
            raise SignatureError(f"undeclared type {t!r} in appropriateness entry",
                                 _span(decls, "approp", t, f))
        if v not in declared:
            raise SignatureError(f"undeclared value type {v!r} for {t}:{f}",
                                 _span(decls, "approp", t, f))
        if (t, f) in seen_approp:
            raise SignatureError(f"duplicate appropriateness entry for {t}:{f}",
                                 _span(decls, "approp", t, f))
        seen_approp[t, f] = v

    types = tuple(sorted(declared))
    tix = {t: i for i, t in enumerate(types)}
    n = len(types)
    children: List[List[int]] = [[] for _ in range(n)]
    for g, s in decls.edges:
        if g == s:
            if decls.strict:
                raise SignatureError(f"subtype cycle through {g!r}",
                                     _span(decls, "edge", g, s))
            continue
        children[tix[g]].append(tix[s])

    # iterative DFS: cycle check and closure in one pass
    below = [0] * n
    state = [0] * n  # 0 new, 1 on stack, 2 done
    for start in range(n):
        if state[start]:
            continue
        stack = [(start, iter(children[start]))]
        state[start] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                stack.pop()
                mask = 1 << node
                for c in children[node]:
                    mask |= below[c]
                below[node] = mask
                state[node] = 2
            elif state[nxt] == 1:
                raise SignatureError(f"subtype cycle through {types[nxt]!r}")
            elif state[nxt] == 0:
                state[nxt] = 1
                stack.append((nxt, iter(children[nxt])))

    species_ids = [i for i in range(n) if below[i] == 1 << i]
    species = tuple(types[i] for i in species_ids)
    six = {name: k for k, name in enumerate(species)}
    species_masks = []
    for i in range(n):
        m = 0
        for t in iter_bits(below[i]):
            if below[t] == 1 << t:
                m |= 1 << six[types[t]]
        assert m, f"type {types[i]} subsumes no species"
        species_masks.append(m)

    def subsumes(a: int, b: int) -> bool:
        return bool(below[a] >> b & 1)

    by_feature: Dict[str, List[Tuple[int, int]]] = {}
    for (t, f), v in seen_approp.items():
        by_feature.setdefault(f, []).append((tix[t], tix[v]))
    features = tuple(sorted(by_feature))

    for f, entries in by_feature.items():
        for a, va in entries:
            for b, vb in entries:
                if a != b and subsumes(a, b) and not subsumes(va, vb):
                    raise SignatureError(
                        f"{types[b]}:{f}={types[vb]} does not refine inherited "
                        f"{types[a]}:{f}={types[va]}",
                        _span(decls, "approp", types[b], f))

    approp: List[Dict[str, int]] = [dict() for _ in range(n)]
    for f in features:
        entries = by_feature[f]
        for x in range(n):
            decl = [(d, v) for d, v in entries if subsumes(d, x)]
            if not decl:
                continue
            most = [(d, v) for d, v in decl
                    if not any(e != d and subsumes(d, e) for e, _ in decl)]
            values = {v for _, v in most}
            best = [v for v in values if all(subsumes(w, v) for w in values)]
            if not best:
                raise SignatureError(
                    f"type {types[x]!r} inherits incompatible values for {f}: "
                    + ", ".join(sorted(types[v] for v in values)))
            approp[x][f] = best[0]

    spec_approp = tuple(
        {f: species_masks[v] for f, v in approp[tix[name]].items()}
        for name in species)
    denoters: Dict[int, List[int]] = {}
    for i, m in enumerate(species_masks):
        denoters.setdefault(m, []).append(i)

    return CompiledSignature(
        types=types,
        type_index=tix,
        below=tuple(below),
        species=species,
        species_index=six,
        species_masks=tuple(species_masks),
        features=features,
        feature_index={f: i for i, f in enumerate(features)},
        approp=tuple(approp),
        spec_approp=spec_approp,
        denoters={m: tuple(v) for m, v in denoters.items()},
    )


def species_set(sig: CompiledSignature, type_name: str) -> int:
    """Bit-set of the species subsumed by ``type_name``."""
    return sig.species_masks[sig.type_id(type_name)]


def subsumes_type(sig: CompiledSignature, general: str, specific: str) -> bool:
    """True iff ``general`` subsumes ``specific`` (every ``specific`` object is a ``general`` one)."""
    a, b = sig.type_id(general), sig.type_id(specific)
    by_closure = bool(sig.below[a] >> b & 1)
    # the converse fails for types with equal species sets (u sub {s})
    assert not by_closure or sig.species_masks[b] & ~sig.species_masks[a] == 0
    return by_closure


def describe(sig: CompiledSignature) -> str:
    """Human-readable species list and per-species appropriateness table."""
    lines = ["species: " + " ".join(sig.species)]
    for s, name in enumerate(sig.species):
        feats = sig.approp[sig.species_type(s)]
        body = " ".join(f"{f}:{sig.types[v]}" for f, v in sorted(feats.items()))
        lines.append(f"  {name}" + (f"  {body}" if body else ""))
    return "\n".join(lines)
