"""Naming conventions for constructed objects.

Identifiers are plain strings.  Constructions derive new names so that
every derived object is deterministic and its parts are recoverable:

* sum types carry a component tag, ``tagged("0", "alpha") == "0.alpha"``;
* sum instances are pairs, ``paired("x", "y") == "(x,y)"``;
* quotient classes are named by their lexicographically least member.
"""
from __future__ import annotations

from typing import Iterable

from .errors import ValidationError


def check_name(name: str, context: str) -> str:
    if not name or any(ch.isspace() for ch in name):
        raise ValidationError(f"bad identifier {name!r} in {context}: must be non-empty without whitespace")
    return name


def tagged(tag: str, name: str) -> str:
    return f"{tag}.{name}"


def paired(left: str, right: str) -> str:
    return f"({left},{right})"


def split_pair(name: str) -> tuple[str, str] | None:
    """Invert ``paired``; returns None when the name is not a pair."""
    if not (name.startswith("(") and name.endswith(")")):
        return None
    depth = 0
    for i, ch in enumerate(name):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 1:
            return name[1:i], name[i + 1 : -1]
    return None


def flatten_pair(name: str) -> tuple[str, ...]:
    """Unfold left-nested pair names into the underlying component tuple."""
    parts = split_pair(name)
    if parts is None:
        return (name,)
    return flatten_pair(parts[0]) + (parts[1],)


def equivalence_classes(universe: Iterable[str], pairs: Iterable[tuple[str, str]]) -> dict[str, str]:
    """Reflexive-symmetric-transitive closure of ``pairs`` over ``universe``.

    Returns the map member -> class name, where each class is named by its
    lexicographically least member.
    """
    parent: dict[str, str] = {name: name for name in universe}

    def find(x: str) -> str:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    return {name: find(name) for name in parent}
