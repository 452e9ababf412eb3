"""Language-constrained reachability on propagation graphs.

``reachable`` decides whether some walk from ``u`` to ``w`` is labelled by a
string in ``L_sys(start)``.  Because every rule has a single-character left
side, this is a context-free-language reachability problem; it is solved by
saturating facts ``(u, X, w)`` over a binarised grammar.  The procedure is
exact and runs in time cubic in the number of vertices.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Hashable, Iterable, Mapping

from .grammar import BWD, FWD, Char, SigmaSystem
from .syntax import Term, format_term

__all__ = [
    "PropGraph", "Language", "reachable", "reach_relation", "reachable_oracle",
    "to_dot", "walk_strings", "derivable_strings",
]


@dataclass(frozen=True)
class PropGraph:
    """Vertices, labelled edges (both directions of each tree edge) and vertex labels."""

    vertices: tuple[str, ...]
    edges: frozenset[tuple[str, Char, str]]
    labels: Mapping[str, tuple[Term, ...]] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self) -> None:
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise ValueError("duplicate vertex")
        for u, c, w in self.edges:
            if u not in vs or w not in vs:
                raise ValueError(f"edge ({u},{c.value},{w}) leaves the vertex set")
            if (w, c.converse, u) not in self.edges:
                raise ValueError(f"edge ({u},{c.value},{w}) lacks its converse")

    @classmethod
    def from_tree_edges(cls, vertices: Iterable[str], tree_edges: Iterable[tuple[str, str]],
                        labels: Mapping[str, tuple[Term, ...]] | None = None) -> "PropGraph":
        edges = set()
        for u, w in tree_edges:
            edges.add((u, FWD, w))
            edges.add((w, BWD, u))
        return cls(tuple(vertices), frozenset(edges), dict(labels or {}))

    def out_edges(self, u: str) -> list[tuple[Char, str]]:
        return sorted(((c, w) for (x, c, w) in self.edges if x == u), key=lambda e: (e[0].value, e[1]))


@dataclass(frozen=True)
class Language:
    """``L_sys(start)`` for each start symbol, optionally closed under concatenation (Kleene star)."""

    system: SigmaSystem
    starts: tuple[Char, ...] = (FWD,)
    star: bool = False


_STAR = ("star",)


def _grammar(lang: Language) -> tuple[list[Hashable], list[tuple[Hashable, Hashable]],
                                       list[tuple[Hashable, Hashable, Hashable]], Hashable]:
    """Binarise: returns (epsilon lhs, unary rules, binary rules, goal symbol)."""
    eps: list[Hashable] = []
    unary: list[tuple[Hashable, Hashable]] = []
    binary: list[tuple[Hashable, Hashable, Hashable]] = []
    for idx, (lhs, rhs) in enumerate(lang.system):
        if len(rhs) == 0:
            eps.append(lhs)
        elif len(rhs) == 1:
            unary.append((lhs, rhs[0]))
        else:
            # lhs -> c0 N1, N1 -> c1 N2, ..., N_{m-2} -> c_{m-2} c_{m-1}
            cur: Hashable = lhs
            for j in range(len(rhs) - 2):
                nxt = ("bin", idx, j)
                binary.append((cur, rhs[j], nxt))
                cur = nxt
            binary.append((cur, rhs[-2], rhs[-1]))
    if lang.star:
        eps.append(_STAR)
        binary.append((_STAR, _STAR, _STAR))
        for s in lang.starts:
            unary.append((_STAR, s))
        return eps, unary, binary, _STAR
    if len(lang.starts) == 1:
        return eps, unary, binary, lang.starts[0]
    goal = ("union",)
    for s in lang.starts:
        unary.append((goal, s))
    return eps, unary, binary, goal


def _saturate(vertices: tuple[str, ...], edges: frozenset, lang: Language) -> frozenset[tuple[str, str]]:
    eps, unary, binary, goal = _grammar(lang)
    by_unary: dict[Hashable, list[Hashable]] = defaultdict(list)
    by_first: dict[Hashable, list[tuple[Hashable, Hashable]]] = defaultdict(list)
    by_second: dict[Hashable, list[tuple[Hashable, Hashable]]] = defaultdict(list)
    for a, b in unary:
        by_unary[b].append(a)
    for a, b, c in binary:
        by_first[b].append((a, c))
        by_second[c].append((a, b))

    facts: set[tuple[str, Hashable, str]] = set()
    out_idx: dict[tuple[str, Hashable], set[str]] = defaultdict(set)
    in_idx: dict[tuple[str, Hashable], set[str]] = defaultdict(set)
    work: deque = deque()

    def add(u: str, sym: Hashable, w: str) -> None:
        f = (u, sym, w)
        if f not in facts:
            facts.add(f)
            out_idx[(u, sym)].add(w)
            in_idx[(w, sym)].add(u)
            work.append(f)

    for u, c, w in edges:
        add(u, c, w)
    for a in eps:
        for v in vertices:
            add(v, a, v)
    while work:
        u, b, v = work.popleft()
        for a in by_unary.get(b, ()):
            add(u, a, v)
        for a, c in by_first.get(b, ()):
            for w in list(out_idx.get((v, c), ())):
                add(u, a, w)
        for a, c in by_second.get(b, ()):
            for t in list(in_idx.get((u, c), ())):
                add(t, a, v)
    return frozenset((u, w) for (u, s, w) in facts if s == goal)


@lru_cache(maxsize=4096)
def _cached(vertices: tuple[str, ...], edges: frozenset, lang: Language) -> frozenset[tuple[str, str]]:
    return _saturate(vertices, edges, lang)


def reach_relation(graph: PropGraph, lang: Language | SigmaSystem, start: Char = FWD) -> frozenset[tuple[str, str]]:
    """All pairs ``(u, w)`` such that ``u ->L w``."""
    if isinstance(lang, SigmaSystem):
        lang = Language(lang, (start,))
    return _cached(graph.vertices, graph.edges, lang)


def reachable(graph: PropGraph, system: SigmaSystem | Language, start: Char, u: str, w: str) -> bool:
    """Exact test for ``u ->L w`` with ``L = L_system(start)``."""
    for v in (u, w):
        if v not in graph.vertices:
            raise KeyError(f"unknown vertex {v!r}")
    lang = system if isinstance(system, Language) else Language(system, (start,))
    return (u, w) in reach_relation(graph, lang)


# ----------------------------------------------------------------- oracle

def walk_strings(graph: PropGraph, u: str, w: str, bound: int) -> set[tuple[Char, ...]]:
    """Label strings of all walks from u to w with at most ``bound`` edges."""
    out: set[tuple[Char, ...]] = set()
    layer = {(u, ())}
    for step in range(bound + 1):
        for v, s in layer:
            if v == w:
                out.add(s)
        if step == bound:
            break
        layer = {(x, s + (c,)) for v, s in layer for c, x in graph.out_edges(v)}
    return out


def derivable_strings(system: SigmaSystem, start: Char, steps: int, max_len: int) -> set[tuple[Char, ...]]:
    """Strings of length <= max_len derivable from ``start`` in at most ``steps`` rewrites."""
    shrink = max([1 - len(rhs) for _, rhs in system] + [0])
    seen = {(start,)}
    layer = {(start,)}
    for depth in range(steps):
        remaining = steps - depth - 1
        nxt = set()
        for s in layer:
            for t in system.successors(s):
                if t in seen or len(t) - remaining * shrink > max_len:
                    continue
                seen.add(t)
                nxt.add(t)
        layer = nxt
    return {s for s in seen if len(s) <= max_len}


def reachable_oracle(graph: PropGraph, system: SigmaSystem, start: Char, u: str, w: str, bound: int) -> bool:
    """Brute-force semi-decision: ``True`` means a witness exists within ``bound``.

    Enumerates walks of length <= bound and strings derivable in <= bound
    rewrite steps; ``False`` only means no witness within the bound.
    """
    walks = walk_strings(graph, u, w, bound)
    if not walks:
        return False
    return bool(walks & derivable_strings(system, start, bound, bound))


def to_dot(graph: PropGraph, highlight: Iterable[tuple[str, str]] = ()) -> str:
    """Graphviz rendering; fwd edges solid, bwd edges dashed."""
    hl = set(highlight)
    lines = ["digraph prop {", "  rankdir=TB;"]
    for v in graph.vertices:
        lab = ", ".join(format_term(t) for t in graph.labels.get(v, ()))
        lines.append(f'  "{v}" [label="{v}\\n{{{lab}}}"];')
    for u, c, w in sorted(graph.edges, key=lambda e: (e[0], e[1].value, e[2])):
        style = "solid" if c is FWD else "dashed"
        lines.append(f'  "{u}" -> "{w}" [label="{c.value}", style={style}];')
    for u, w in sorted(hl):
        lines.append(f'  "{u}" -> "{w}" [color=red, constraint=false];')
    lines.append("}")
    return "\n".join(lines) + "\n"


