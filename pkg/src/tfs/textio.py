"""
Surface syntax for signatures and attribute-value matrices.

Signature files::

    % comment
    type bool sub {+ -}.
    type + .
    type - .
    type t sub {t' t''} approp {f:bool g:bool}.
    type t' approp {f:+ g:+}.

AVMs::

    t(f:+, g:-)                      plain structure
    X1=t(f:X2=bool, g:X2)            reentrancy through tags (also #1=..., #1)
    $1<t'|t''>(f:$1<+|->, g:$1<+|->) named disjunction
    {t' t''}                         explicit species set

Identifiers are runs of letters, digits, ``_``, ``+``, ``-`` and ``'`` that do
not start with a digit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .drfs import CompactDRFS, Fixed, Free, compact
from .errors import ParseError
from .fstruct import FeatureGraph, merge_nodes
from .hierarchy import CompiledSignature, SignatureDecls, iter_bits
from .resolve import solve

PUNCT = set("(),:={}<>|.")


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int
    line: int
    column: int


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT, TAG, NAME, punctuation char, EOF
    text: str
    span: SourceSpan


def _ident_char(c: str) -> bool:
    return c.isalnum() or c in "_+-'"


def tokenize(text: str) -> List[Token]:
    tokens = []
    i, line, line_start = 0, 1, 0
    n = len(text)

    def span(a, b):
        return SourceSpan(a, b, line, a - line_start + 1)

    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            line_start = i + 1
            i += 1
        elif c.isspace():
            i += 1
        elif c == "%":
            while i < n and text[i] != "\n":
                i += 1
        elif c in PUNCT:
            tokens.append(Token(c, c, span(i, i + 1)))
            i += 1
        elif c == "$":
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            if j == i + 1:
                raise ParseError("expected a number after '$'", span(i, j))
            tokens.append(Token("NAME", text[i + 1:j], span(i, j)))
            i = j
        elif c == "#":
            j = i + 1
            while j < n and _ident_char(text[j]):
                j += 1
            if j == i + 1:
                raise ParseError("expected a tag after '#'", span(i, j))
            tokens.append(Token("TAG", text[i:j], span(i, j)))
            i = j
        elif _ident_char(c):
            if c.isdigit():
                raise ParseError("identifier may not start with a digit", span(i, i + 1))
            j = i
            while j < n and _ident_char(text[j]):
                j += 1
            tokens.append(Token("IDENT", text[i:j], span(i, j)))
            i = j
        else:
            raise ParseError(f"unexpected character {c!r}", span(i, i + 1))
    tokens.append(Token("EOF", "", span(n, n)))
    return tokens


class _Cursor:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def take(self, kind: Optional[str] = None, what: str = "") -> Token:
        tok = self.tok
        if kind is not None and tok.kind != kind:
            want = what or repr(kind)
            got = "end of input" if tok.kind == "EOF" else repr(tok.text)
            raise ParseError(f"expected {want}, found {got}", tok.span)
        self.pos += 1
        return tok


# -- signatures ---------------------------------------------------------------

def parse_signature(text: str) -> SignatureDecls:
    """Parse signature source into declarations (not yet validated)."""
    cur = _Cursor(text)
    decls = SignatureDecls(strict=True)
    while cur.tok.kind != "EOF":
        kw = cur.take("IDENT", "'type'")
        if kw.text != "type":
            raise ParseError(f"expected 'type', found {kw.text!r}", kw.span)
        name_tok = cur.take("IDENT", "a type name")
        name = name_tok.text
        if name in decls.types:
            raise ParseError(f"duplicate declaration of type {name!r}", name_tok.span)
        decls.types.append(name)
        decls.spans["type", name] = name_tok.span
        if cur.tok.kind == "IDENT" and cur.tok.text == "sub":
            cur.take()
            cur.take("{")
            if cur.tok.kind != "IDENT":
                raise ParseError("empty subtype list", cur.tok.span)
            while cur.tok.kind == "IDENT":
                sub = cur.take()
                decls.edges.append((name, sub.text))
                decls.spans["edge", name, sub.text] = sub.span
            cur.take("}")
        if cur.tok.kind == "IDENT" and cur.tok.text == "approp":
            cur.take()
            cur.take("{")
            if cur.tok.kind != "IDENT":
                raise ParseError("empty appropriateness list", cur.tok.span)
            while cur.tok.kind == "IDENT":
                feat = cur.take()
                cur.take(":")
                value = cur.take("IDENT", "a value type")
                decls.approp.append((name, feat.text, value.text))
                decls.spans.setdefault(("approp", name, feat.text), feat.span)
            cur.take("}")
        cur.take(".", "'.'")
    return decls


def format_signature(decls: SignatureDecls) -> str:
    subs: Dict[str, List[str]] = {}
    for g, s in decls.edges:
        subs.setdefault(g, []).append(s)
    approp: Dict[str, List[str]] = {}
    for t, f, v in decls.approp:
        approp.setdefault(t, []).append(f"{f}:{v}")
    lines = []
    for t in decls.types:
        line = f"type {t}"
        if t in subs:
            line += " sub {" + " ".join(subs[t]) + "}"
        if t in approp:
            line += " approp {" + " ".join(approp[t]) + "}"
        lines.append(line + ".")
    return "\n".join(lines)


# -- AVMs -----------------------------------------------------------------------

class _RawAVM:
    """Nodes as written, before tag merging."""

    def __init__(self, sig: CompiledSignature):
        self.sig = sig
        self.labels: List[int] = []
        self.out: List[Dict[str, int]] = []
        self.columns: Dict[int, List[Tuple[int, Tuple[int, ...], SourceSpan]]] = {}
        self.tag_nodes: Dict[str, List[int]] = {}
        self.tag_defined: Dict[str, bool] = {}
        self.tag_spans: Dict[str, SourceSpan] = {}

    def new_node(self, label: int) -> int:
        self.labels.append(label)
        self.out.append({})
        return len(self.labels) - 1


def _type_mask(sig: CompiledSignature, tok: Token) -> int:
    idx = sig.type_index.get(tok.text)
    if idx is None:
        raise ParseError(f"unknown type {tok.text!r}", tok.span)
    return sig.species_masks[idx]


def _parse_typeexpr(cur: _Cursor, raw: _RawAVM) -> Tuple[int, Optional[tuple]]:
    sig = raw.sig
    tok = cur.tok
    if tok.kind == "IDENT":
        cur.take()
        return _type_mask(sig, tok), None
    if tok.kind == "{":
        cur.take()
        mask = 0
        if cur.tok.kind != "IDENT":
            raise ParseError("empty species set", cur.tok.span)
        while cur.tok.kind == "IDENT":
            mask |= _type_mask(sig, cur.take())
            if cur.tok.kind == ",":
                cur.take()
        cur.take("}")
        return mask, None
    if tok.kind == "NAME":
        cur.take()
        cur.take("<")
        values = []
        while True:
            alt = cur.take("IDENT", "a species")
            m = _type_mask(sig, alt)
            if m & (m - 1):
                raise ParseError(f"{alt.text!r} is not a single species", alt.span)
            values.append(m.bit_length() - 1)
            if cur.tok.kind != "|":
                break
            cur.take()
        cur.take(">")
        if len(values) < 2:
            raise ParseError("a named disjunction needs at least two alternatives", tok.span)
        mask = 0
        for s in values:
            mask |= 1 << s
        return mask, (int(tok.text), tuple(values), tok.span)
    got = "end of input" if tok.kind == "EOF" else repr(tok.text)
    raise ParseError(f"expected a type, found {got}", tok.span)


def _parse_avm(cur: _Cursor, raw: _RawAVM) -> int:
    tok = cur.tok
    tag = None
    if tok.kind == "TAG" or (tok.kind == "IDENT" and cur.peek().kind == "="):
        if cur.peek().kind == "=":
            tag = cur.take().text
            cur.take("=")
        else:
            cur.take()
            return _tag_ref(raw, tok)
    elif tok.kind == "IDENT" and tok.text in raw.tag_nodes:
        cur.take()
        return _tag_ref(raw, tok)

    mask, column = _parse_typeexpr(cur, raw)
    node = raw.new_node(mask)
    if column is not None:
        raw.columns.setdefault(column[0], []).append((node, column[1], column[2]))
    if tag is not None:
        raw.tag_nodes.setdefault(tag, []).append(node)
        raw.tag_defined[tag] = True
        raw.tag_spans.setdefault(tag, tok.span)
    if cur.tok.kind == "(":
        cur.take()
        while True:
            feat = cur.take("IDENT", "a feature")
            if feat.text not in raw.sig.feature_index:
                raise ParseError(f"unknown feature {feat.text!r}", feat.span)
            if feat.text in raw.out[node]:
                raise ParseError(f"duplicate feature {feat.text!r}", feat.span)
            cur.take(":")
            raw.out[node][feat.text] = _parse_avm(cur, raw)
            if cur.tok.kind == ",":
                cur.take()
                continue
            break
        cur.take(")", "',' or ')'")
    return node


def _tag_ref(raw: _RawAVM, tok: Token) -> int:
    node = raw.new_node(raw.sig.all_species)
    raw.tag_nodes.setdefault(tok.text, []).append(node)
    raw.tag_defined.setdefault(tok.text, False)
    raw.tag_spans.setdefault(tok.text, tok.span)
    return node


def _parse_raw(sig: CompiledSignature, text: str):
    cur = _Cursor(text)
    raw = _RawAVM(sig)
    _parse_avm(cur, raw)
    if cur.tok.kind != "EOF":
        raise ParseError(f"unexpected {cur.tok.text!r} after structure", cur.tok.span)
    pairs = []
    for tag, nodes in raw.tag_nodes.items():
        if not raw.tag_defined[tag]:
            raise ParseError(f"dangling tag {tag!r}", raw.tag_spans[tag])
        pairs.extend((nodes[0], other) for other in nodes[1:])
    merged = merge_nodes(raw.labels, raw.out, pairs, root=0)
    if merged is None:
        raise ParseError("inconsistent tag definitions: a node has an empty label")
    return raw, merged


def parse_avm(sig: CompiledSignature, text: str) -> FeatureGraph:
    """Parse an AVM into a graph.  Named disjunctions only contribute their
    species sets here; use :func:`parse_drfs` to keep them."""
    return _parse_raw(sig, text)[1][0]


def parse_drfs(sig: CompiledSignature, text: str) -> CompactDRFS:
    """Parse an AVM, keeping named disjunctions, into a compact value.

    The result denotes the well-typed resolved labellings consistent with the
    written types and the joint choice of every named disjunction.
    """
    raw, (graph, classes) = _parse_raw(sig, text)
    tables = []
    for name, cols in sorted(raw.columns.items()):
        arity = {len(v) for _, v, _ in cols}
        if len(arity) != 1:
            raise ParseError(f"named disjunction ${name} used with different arities",
                             cols[0][2])
        nodes = tuple(classes[n] for n, _, _ in cols)
        rows = frozenset(zip(*[v for _, v, _ in cols]))
        tables.append((nodes, rows))
    rows = solve(sig, graph, tables=tables)
    if not rows:
        raise ParseError("structure has no well-typed resolvent")
    return compact(sig, graph, rows)


# -- printing -------------------------------------------------------------------

def _species_text(sig: CompiledSignature, mask: int) -> str:
    name = sig.most_general_name(mask)
    if name is not None:
        return name
    return "{" + ",".join(sig.species[s] for s in iter_bits(mask)) + "}"


def _render(graph: FeatureGraph, node_text) -> str:
    indeg = graph.indegree()
    tags: Dict[int, int] = {}
    parts: List[str] = []

    def visit(n):
        if n in tags:
            parts.append(f"#{tags[n]}")
            return
        if indeg[n] > 1 or (n == 0 and indeg[n] > 0):
            tags[n] = len(tags) + 1
            parts.append(f"#{tags[n]}=")
        parts.append(node_text(n))
        arcs = graph.arcs[n]
        if arcs:
            parts.append("(")
            for i, (f, m) in enumerate(arcs):
                if i:
                    parts.append(", ")
                parts.append(f"{f}:")
                visit(m)
            parts.append(")")

    # recursion depth is bounded by graph depth; fine for hand-written AVMs
    visit(0)
    return "".join(parts)


def print_fs(sig: CompiledSignature, graph: FeatureGraph) -> str:
    """Canonical text of a plain feature graph."""
    return _render(graph, lambda n: _species_text(sig, graph.labels[n]))


def print_drfs(D: CompactDRFS) -> str:
    """Canonical text of a compact value, names renumbered by first use."""
    sig = D.sig
    renumber: Dict[int, int] = {}

    def node_text(n):
        b = D.bindings[n]
        if isinstance(b, Fixed):
            return sig.species[b.species]
        if isinstance(b, Free):
            return _species_text(sig, b.mask)
        name = renumber.setdefault(b.name, len(renumber) + 1)
        return f"${name}<" + "|".join(sig.species[s] for s in b.values) + ">"

    return _render(D.graph, node_text)


def drfs_to_json(D: CompactDRFS) -> dict:
    sig = D.sig
    nodes = []
    for n, b in enumerate(D.bindings):
        if isinstance(b, Fixed):
            binding = {"kind": "fixed", "species": sig.species[b.species]}
        elif isinstance(b, Free):
            binding = {"kind": "free", "species": sorted(sig.names(b.mask))}
        else:
            binding = {"kind": "column", "name": b.name,
                       "values": [sig.species[s] for s in b.values]}
        nodes.append({"id": n, "binding": binding,
                      "arcs": {f: m for f, m in D.graph.arcs[n]}})
    return {"text": print_drfs(D), "root": 0, "nodes": nodes,
            "disjunctions": {str(k): v for k, v in sorted(D.disjunctions.items())}}


def fs_to_json(sig: CompiledSignature, graph: FeatureGraph) -> dict:
    nodes = [{"id": n, "species": sorted(sig.names(label)),
              "arcs": {f: m for f, m in graph.arcs[n]}}
             for n, label in enumerate(graph.labels)]
    return {"text": print_fs(sig, graph), "root": 0, "nodes": nodes}
