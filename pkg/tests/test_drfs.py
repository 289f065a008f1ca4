import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from helpers import graph_pair, mixed_graph, random_signature, resolvent_set
from tfs import (Column, Fixed, Free, TfsError, brute_force_resolve, compact,
                 drfs_unify, expand, graph_unify, parse_avm, print_drfs, relation,
                 resolve)
from tfs.drfs import check_invariants, factorize
from tfs.unfill import unfill


def compacted(sig, text):
    F = parse_avm(sig, text)
    return compact(sig, F, resolve(sig, F))


def test_rho_compaction(rho):
    D = compacted(rho, "t(f:bool, g:bool)")
    t1, t2 = rho.species_index["t'"], rho.species_index["t''"]
    plus, minus = rho.species_index["+"], rho.species_index["-"]
    assert D.bindings == (Column(1, (t1, t2)), Column(1, (plus, minus)),
                          Column(1, (plus, minus)))
    assert D.disjunctions == {1: 2}
    assert expand(D) == resolvent_set(rho, D.graph)


def test_singleton_relation_is_all_fixed(rho):
    D = compacted(rho, "t(f:+)")
    assert all(isinstance(b, Fixed) for b in D.bindings)
    assert D.disjunctions == {}
    assert len(expand(D)) == 1


def test_independent_substructures_get_separate_names(rho2):
    F = parse_avm(rho2, "pair(a:t(f:bool, g:bool), b:t(f:bool, g:bool))")
    rel = brute_force_resolve(rho2, F)
    assert len(rel) == 4
    # the oracle relation is the product of its two halves
    left = {r[1:4] for r in rel.tuples}
    right = {r[4:7] for r in rel.tuples}
    assert len(left) * len(right) == len(rel)
    D = compact(rho2, F, rel)
    assert D.disjunctions == {1: 2, 2: 2}
    names_a = {D.bindings[n].name for n in (1, 2, 3)}
    names_b = {D.bindings[n].name for n in (4, 5, 6)}
    assert names_a == {1} and names_b == {2}
    assert isinstance(D.bindings[0], Fixed)


def test_free_binding_expansion(rho2):
    F = parse_avm(rho2, "pair(a:t, b:t)")
    D = compact(rho2, F, resolve(rho2, F))
    assert [type(b) for b in D.bindings] == [Fixed, Free, Free]
    assert len(expand(D)) == 4 == len(resolve(rho2, F))


def test_compact_rejects_empty(rho):
    with pytest.raises(TfsError):
        compact(rho, parse_avm(rho, "t(f:+, g:-)"), [])


def test_parity_relation_stays_one_name():
    # pairwise independent but jointly dependent: must not split into Free
    rows = {(a, b, a ^ b) for a in (0, 1) for b in (0, 1)}
    blocks = factorize((0, 1, 2), rows)
    assert len(blocks) == 1 and blocks[0][1] == frozenset(rows)


def test_factorize_finds_product_of_groups():
    parity = [(a, b, a ^ b) for a in (0, 1) for b in (0, 1)]
    rows = {p + q for p in parity for q in [(2, 2), (3, 3)]}
    blocks = factorize(tuple(range(5)), rows)
    assert [b[0] for b in blocks] == [(0, 1, 2), (3, 4)]


@pytest.mark.parametrize("width", [1, 2, 3])
def test_factorize_product_is_free(width):
    rows = set(itertools.product((0, 1), repeat=width))
    blocks = factorize(tuple(range(width)), rows)
    assert [len(b[0]) for b in blocks] == [1] * width


def test_unify_unfilled_t_with_t2(rho):
    D = unfill(rho, compacted(rho, "t(f:bool, g:bool)"))
    E = compacted(rho, "t(g:-)")
    assert print_drfs(E) == "t''(g:-)"
    assert drfs_unify(rho, D, E) == E


def test_unify_idempotent(rho):
    D = compacted(rho, "t(f:bool, g:bool)")
    assert drfs_unify(rho, D, D) == D


def test_unify_reproduces_counterexample_failure(rho):
    assert drfs_unify(rho, compacted(rho, "t(f:+)"), compacted(rho, "t(g:-)")) is None


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_round_trip(seed):
    rng = random.Random(seed)
    sig = random_signature(rng)
    F = mixed_graph(rng, sig)
    rel = resolve(sig, F)
    if not rel:
        return
    D = compact(sig, F, rel)
    check_invariants(D)
    assert relation(D) == rel.tuples
    assert expand(D) == resolvent_set(sig, F)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_unification_closure(seed):
    rng = random.Random(seed)
    sig = random_signature(rng)
    F, G = graph_pair(rng, sig)
    RF, RG = resolve(sig, F), resolve(sig, G)
    if not RF or not RG:
        return
    result = drfs_unify(sig, compact(sig, F, RF), compact(sig, G, RG))
    U = graph_unify(sig, F, G)
    expected = set() if U is None else resolvent_set(sig, U)
    if result is None:
        assert expected == set()
    else:
        check_invariants(result)
        assert expand(result) == expected
