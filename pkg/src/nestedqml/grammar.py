"""Semi-Thue systems over the two-letter alphabet {fwd, bwd}.

A path condition G(n, k) contributes the rules ``fwd -> bwd^n fwd^k`` and
``bwd -> bwd^k fwd^n``.  Every left-hand side is a single character, so
derivations are context-free and the derivable strings from a character
form a context-free language.
"""

from __future__ import annotations

import enum
import re
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator

__all__ = [
    "Char", "FWD", "BWD", "SigmaSystem", "build_sigma_system", "s4", "s5",
    "converse_string", "derives", "Derivation", "Extension",
    "classify_extension", "parse_path_condition", "format_string",
    "parse_string", "bounded_language",
]


class Char(enum.Enum):
    FWD = "fwd"
    BWD = "bwd"

    @property
    def converse(self) -> "Char":
        return Char.BWD if self is Char.FWD else Char.FWD

    def __repr__(self) -> str:
        return self.value


FWD = Char.FWD
BWD = Char.BWD

String = tuple[Char, ...]


def converse_string(s: Iterable[Char]) -> String:
    """Reverse the string and swap fwd/bwd."""
    return tuple(c.converse for c in reversed(tuple(s)))


def format_string(s: Iterable[Char]) -> str:
    s = tuple(s)
    return " ".join(c.value for c in s) if s else "eps"


def parse_string(text: str) -> String:
    words = text.replace(",", " ").split()
    if words in (["eps"], ["ε"]):
        return ()
    try:
        return tuple(Char(w) for w in words)
    except ValueError:
        raise ValueError(f"bad string over {{fwd,bwd}}: {text!r}") from None


@dataclass(frozen=True)
class SigmaSystem:
    """A finite set of rules ``lhs -> rhs`` with single-character left sides."""

    rules: frozenset[tuple[Char, String]] = frozenset()

    def __post_init__(self) -> None:
        for lhs, rhs in self.rules:
            if not isinstance(lhs, Char) or not all(isinstance(c, Char) for c in rhs):
                raise TypeError("rules must map a Char to a tuple of Chars")

    def __or__(self, other: "SigmaSystem") -> "SigmaSystem":
        return SigmaSystem(self.rules | other.rules)

    def __iter__(self) -> Iterator[tuple[Char, String]]:
        return iter(sorted(self.rules, key=lambda r: (r[0].value, len(r[1]), [c.value for c in r[1]])))

    def __len__(self) -> int:
        return len(self.rules)

    def rhs_for(self, c: Char) -> list[String]:
        return [rhs for lhs, rhs in self if lhs is c]

    def successors(self, s: String) -> Iterator[String]:
        """All strings obtained by one rewrite step."""
        for i, c in enumerate(s):
            for rhs in self.rhs_for(c):
                yield s[:i] + rhs + s[i + 1:]

    def __str__(self) -> str:
        return "{" + ", ".join(f"{l.value} -> {format_string(r)}" for l, r in self) + "}"


def build_sigma_system(conditions: Iterable[tuple[int, int]]) -> SigmaSystem:
    rules = set()
    for n, k in conditions:
        if n < 0 or k < 0:
            raise ValueError(f"path condition G({n},{k}) needs non-negative indices")
        rules.add((FWD, (BWD,) * n + (FWD,) * k))
        rules.add((BWD, (BWD,) * k + (FWD,) * n))
    return SigmaSystem(frozenset(rules))


def s4() -> SigmaSystem:
    return SigmaSystem(frozenset({(FWD, ()), (BWD, ()), (FWD, (FWD, FWD)), (BWD, (BWD, BWD))}))


def s5() -> SigmaSystem:
    return SigmaSystem(frozenset({(FWD, ()), (BWD, ()), (FWD, (BWD, FWD)), (BWD, (BWD, FWD))}))


class Derivation(enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


def derives(system: SigmaSystem, src: Iterable[Char], dst: Iterable[Char], budget: int) -> Derivation:
    """Breadth-first search for ``src ->* dst`` exploring at most ``budget`` rewrites.

    ``NO`` is only reported when the reachable set is exhausted.  Without
    erasing rules string length never decreases, so strings longer than
    ``dst`` are discarded; with erasing rules nothing is pruned.
    """
    src, dst = tuple(src), tuple(dst)
    if src == dst:
        return Derivation.YES
    monotone = all(len(rhs) >= 1 for _, rhs in system)
    seen = {src}
    queue = deque([src])
    used = 0
    while queue:
        s = queue.popleft()
        for t in system.successors(s):
            if used >= budget:
                return Derivation.UNKNOWN
            used += 1
            if t == dst:
                return Derivation.YES
            if t in seen or (monotone and len(t) > len(dst)):
                continue
            seen.add(t)
            queue.append(t)
    return Derivation.NO


class Extension(enum.Enum):
    S4_EQUIVALENT = "S4"
    S5_EQUIVALENT = "S5"


def classify_extension(conditions: Iterable[tuple[int, int]]) -> Extension:
    """S5-like iff some rule of S(G) mentions the converse of its left side."""
    for lhs, rhs in build_sigma_system(conditions):
        if lhs.converse in rhs:
            return Extension.S5_EQUIVALENT
    return Extension.S4_EQUIVALENT


def bounded_language(system: SigmaSystem, start: Char, max_len: int, work_len: int) -> frozenset[String]:
    """Strings of length <= max_len derivable from ``start`` through strings of length <= work_len.

    An under-approximation of the language restricted to short strings;
    exact whenever no derivation needs to pass through longer strings.
    """
    seen = {(start,)}
    queue = deque(seen)
    while queue:
        s = queue.popleft()
        for t in system.successors(s):
            if len(t) <= work_len and t not in seen:
                seen.add(t)
                queue.append(t)
    return frozenset(s for s in seen if len(s) <= max_len)


_PATH = re.compile(r"^\s*G\s*\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*$")


def parse_path_condition(text: str) -> tuple[int, int]:
    m = _PATH.match(text)
    if not m:
        raise ValueError(f"bad path condition {text!r}; expected G(n,k)")
    return int(m.group(1)), int(m.group(2))
