"""Plain-text formats.

Undirected (``.hgr``)::

    hgr <n> <m> <w>
    [weight] v1 v2 ... vk

Directed (``.dhgr``)::

    dhgr <n> <m> <w>
    [weight] t1 ... tk | h1 ... hj

``w`` is 1 when every edge line starts with a weight.  Lines starting with
``#`` are comments. Vertex ids are 0-based.
"""

from __future__ import annotations

import os
from typing import TextIO

from .hypercore import DirectedHypergraph, Hypergraph, HypergraphError


class ParseError(HypergraphError):
    def __init__(self, msg: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


def _fmt_weight(w: float) -> str:
    return repr(float(w))


def _content_lines(text: str):
    for no, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if not s or s.startswith("#"):
            continue
        yield no, s


def _header(lines, magic: str):
    try:
        no, s = next(lines)
    except StopIteration:
        raise ParseError("empty file") from None
    parts = s.split()
    if len(parts) != 4 or parts[0] != magic:
        raise ParseError(f"expected header '{magic} <n> <m> <w>', got {s!r}", no)
    try:
        n, m, w = int(parts[1]), int(parts[2]), int(parts[3])
    except ValueError:
        raise ParseError(f"non-integer header field in {s!r}", no) from None
    if n < 0 or m < 0 or w not in (0, 1):
        raise ParseError(f"bad header values n={n} m={m} w={w}", no)
    return n, m, bool(w)


def _ids(tokens, n, no):
    out = []
    for tok in tokens:
        try:
            v = int(tok)
        except ValueError:
            raise ParseError(f"bad vertex id {tok!r}", no) from None
        if v < 0 or v >= n:
            raise ParseError(f"vertex id {v} outside 0..{n - 1}", no)
        out.append(v)
    return out


def _weight(tok, no):
    try:
        w = float(tok)
    except ValueError:
        raise ParseError(f"bad weight {tok!r}", no) from None
    if not (w > 0 and w != float("inf")):
        raise ParseError(f"weight must be finite and positive, got {tok}", no)
    return w


def parse_hgr(text: str) -> Hypergraph:
    lines = _content_lines(text)
    n, m, weighted = _header(lines, "hgr")
    edges, weights = [], []
    for no, s in lines:
        toks = s.split()
        if weighted:
            weights.append(_weight(toks[0], no))
            toks = toks[1:]
        if not toks:
            raise ParseError("edge with no vertices", no)
        edges.append(_ids(toks, n, no))
    if len(edges) != m:
        raise ParseError(f"header declares {m} edges, found {len(edges)}")
    return Hypergraph(n, edges, weights if weighted else None, weighted=weighted)


def parse_dhgr(text: str) -> DirectedHypergraph:
    lines = _content_lines(text)
    n, m, weighted = _header(lines, "dhgr")
    arcs, weights = [], []
    for no, s in lines:
        if s.count("|") != 1:
            raise ParseError("arc line needs exactly one '|'", no)
        left, right = s.split("|")
        toks = left.split()
        if weighted:
            if not toks:
                raise ParseError("missing weight", no)
            weights.append(_weight(toks[0], no))
            toks = toks[1:]
        arcs.append((_ids(toks, n, no), _ids(right.split(), n, no)))
    if len(arcs) != m:
        raise ParseError(f"header declares {m} arcs, found {len(arcs)}")
    try:
        return DirectedHypergraph(n, arcs, weights if weighted else None, weighted=weighted)
    except HypergraphError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc)) from None


def format_hgr(h: Hypergraph, weighted: bool | None = None) -> str:
    weighted = h.weighted if weighted is None else weighted
    out = [f"hgr {h.n} {h.m} {int(weighted)}"]
    for e, w in zip(h.edges, h.weights):
        body = " ".join(str(v) for v in e)
        out.append(f"{_fmt_weight(w)} {body}" if weighted else body)
    return "\n".join(out) + "\n"


def format_dhgr(d: DirectedHypergraph, weighted: bool | None = None) -> str:
    weighted = d.weighted if weighted is None else weighted
    out = [f"dhgr {d.n} {d.m} {int(weighted)}"]
    for t, h, w in zip(d.tails, d.heads, d.weights):
        body = " ".join(map(str, t)) + " | " + " ".join(map(str, h))
        out.append(f"{_fmt_weight(w)} {body}" if weighted else body)
    return "\n".join(out) + "\n"


def read_hypergraph(path: str | os.PathLike) -> Hypergraph:
    with open(path) as fh:
        return parse_hgr(fh.read())


def read_directed(path: str | os.PathLike) -> DirectedHypergraph:
    with open(path) as fh:
        return parse_dhgr(fh.read())


def read_any(path: str | os.PathLike):
    """Dispatch on the header magic."""
    with open(path) as fh:
        text = fh.read()
    for _, s in _content_lines(text):
        if s.split()[0] == "dhgr":
            return parse_dhgr(text)
        return parse_hgr(text)
    raise ParseError("empty file")


def write_hypergraph(h: Hypergraph, path_or_file: str | os.PathLike | TextIO, weighted=None) -> None:
    _write(format_hgr(h, weighted), path_or_file)


def write_directed(d: DirectedHypergraph, path_or_file, weighted=None) -> None:
    _write(format_dhgr(d, weighted), path_or_file)


def _write(text, target):
    if hasattr(target, "write"):
        target.write(text)
    else:
        with open(target, "w") as fh:
            fh.write(text)
