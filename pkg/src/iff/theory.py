"""Sequent theories with formal-instance semantics.

A theory is a finite type set plus a set of sequent constraints
``antecedent |- succedent``, read "anything with all antecedent types
has some succedent type".  Entailment is semantic: a sequent follows
from a theory when every formal instance (a two-sided partition of the
type set satisfying all constraints) satisfies it.  The regular closure
of a theory is the set of all entailed sequents; it is exactly the
closure of the presentation under identity, weakening, and the global
partition (cut) rule.

Partitions are enumerated with the sorted type list as digit positions,
most significant first, absent before present; "lexicographic order of
the positive side" below always means that order.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping

from .classification import Classification, Infomorphism, StateDescription
from .errors import CapExceededError, Diagnostic, UnknownIdentifierError, ValidationError
from .names import check_name, equivalence_classes, tagged

__all__ = [
    "Sequent",
    "Theory",
    "FormalInstance",
    "Interpretation",
    "DEFAULT_ENUM_CAP",
    "DEFAULT_CLOSURE_CAP",
    "sequent_satisfied",
    "formal_instances",
    "entails",
    "counterexample",
    "regular_closure",
    "is_regular",
    "theory_of",
    "holds_in",
    "check_interpretation",
    "identity_interpretation",
    "compose_interpretations",
    "cla_of_theory",
    "cla_of_interpretation",
    "formal_instance_name",
    "sum_theory",
    "quotient_theory",
    "factor_interpretation",
]

DEFAULT_ENUM_CAP = 16
DEFAULT_CLOSURE_CAP = 8

FormalInstance = StateDescription


@dataclass(frozen=True)
class Sequent:
    """One constraint: if all antecedent types hold, some succedent type holds."""

    antecedent: frozenset[str]
    succedent: frozenset[str]

    def __init__(self, antecedent: Iterable[str], succedent: Iterable[str]):
        object.__setattr__(self, "antecedent", frozenset(antecedent))
        object.__setattr__(self, "succedent", frozenset(succedent))

    def sort_key(self) -> tuple[tuple[str, ...], tuple[str, ...]]:
        return tuple(sorted(self.antecedent)), tuple(sorted(self.succedent))

    def __str__(self) -> str:
        ant = ",".join(sorted(self.antecedent))
        suc = ",".join(sorted(self.succedent))
        return f"{ant} |- {suc}".strip()


@dataclass(frozen=True)
class Theory:
    """A finite type set with a deduplicated presentation of constraints."""

    types: tuple[str, ...]
    constraints: frozenset[Sequent]

    def __init__(self, types: Iterable[str], constraints: Iterable[Sequent] = ()):
        typ = tuple(sorted({check_name(t, "theory types") for t in types}))
        cons = frozenset(constraints)
        universe = set(typ)
        for s in cons:
            for t in sorted(s.antecedent | s.succedent):
                if t not in universe:
                    raise UnknownIdentifierError(t, "constraint")
        object.__setattr__(self, "types", typ)
        object.__setattr__(self, "constraints", cons)

    def sorted_constraints(self) -> list[Sequent]:
        return sorted(self.constraints, key=Sequent.sort_key)


def sequent_satisfied(positives: Iterable[str], s: Sequent) -> bool:
    """A set of held types satisfies a sequent unless it contains the whole
    antecedent and misses the succedent entirely."""
    pos = frozenset(positives)
    return not (s.antecedent <= pos and not (s.succedent & pos))


# -- mask machinery -----------------------------------------------------------
#
# Subsets of a theory's (sorted) type list are packed into ints: the i-th
# type occupies bit (n-1-i), so ascending ints enumerate positive sides in
# the canonical order (empty set first, full set last).


def _mask_of(types: tuple[str, ...], subset: Iterable[str]) -> int:
    n = len(types)
    index = {t: n - 1 - i for i, t in enumerate(types)}
    mask = 0
    for t in subset:
        mask |= 1 << index[t]
    return mask


def _set_of(types: tuple[str, ...], mask: int) -> frozenset[str]:
    n = len(types)
    return frozenset(t for i, t in enumerate(types) if mask >> (n - 1 - i) & 1)


def _constraint_masks(t: Theory) -> list[tuple[int, int]]:
    return [
        (_mask_of(t.types, s.antecedent), _mask_of(t.types, s.succedent))
        for s in t.sorted_constraints()
    ]


def _satisfying_masks(t: Theory) -> list[int]:
    masks = _constraint_masks(t)
    out = []
    for m in range(1 << len(t.types)):
        if all(not (ant & m == ant and suc & m == 0) for ant, suc in masks):
            out.append(m)
    return out


def _require_cap(n: int, cap: int, cap_name: str) -> None:
    if n > cap:
        raise CapExceededError(cap_name, cap, n)


def formal_instances(t: Theory, cap: int = DEFAULT_ENUM_CAP) -> tuple[FormalInstance, ...]:
    """All partitions of the type set satisfying every constraint, in
    lexicographic order of the positive side."""
    _require_cap(len(t.types), cap, "enumeration")
    full = (1 << len(t.types)) - 1
    return tuple(
        StateDescription(_set_of(t.types, m), _set_of(t.types, full & ~m))
        for m in _satisfying_masks(t)
    )


def _check_sequent_typing(t: Theory, s: Sequent) -> None:
    universe = set(t.types)
    for name in sorted(s.antecedent | s.succedent):
        if name not in universe:
            raise UnknownIdentifierError(name, "sequent")


def counterexample(t: Theory, s: Sequent) -> FormalInstance | None:
    """The least formal instance violating s, or None when s is entailed.

    Backtracking search: types are decided in sorted order, absent before
    present; a branch dies as soon as some constraint has its antecedent
    fully decided in and its succedent fully decided out.
    """
    _check_sequent_typing(t, s)
    if s.antecedent & s.succedent:
        return None
    types = t.types
    n = len(types)
    ant_s = _mask_of(types, s.antecedent)
    suc_s = _mask_of(types, s.succedent)
    constraints = _constraint_masks(t)
    full = (1 << n) - 1

    def search(i: int, inside: int, outside: int) -> int | None:
        for ant, suc in constraints:
            if ant & inside == ant and suc & outside == suc:
                return None
        if i == n:
            return inside
        bit = 1 << (n - 1 - i)
        if bit & ant_s:
            return search(i + 1, inside | bit, outside)
        if bit & suc_s:
            return search(i + 1, inside, outside | bit)
        found = search(i + 1, inside, outside | bit)
        if found is not None:
            return found
        return search(i + 1, inside | bit, outside)

    witness = search(0, 0, 0)
    if witness is None:
        return None
    return StateDescription(_set_of(types, witness), _set_of(types, full & ~witness))


def entails(t: Theory, s: Sequent) -> bool:
    """True iff every formal instance of the theory satisfies the sequent."""
    return counterexample(t, s) is None


def _all_sequents(types: tuple[str, ...]) -> Iterable[tuple[int, int]]:
    size = 1 << len(types)
    return itertools.product(range(size), repeat=2)


def regular_closure(t: Theory, cap: int = DEFAULT_CLOSURE_CAP) -> Theory:
    """The theory presenting every entailed sequent explicitly."""
    _require_cap(len(t.types), cap, "closure")
    satisfying = _satisfying_masks(t)
    kept = []
    for ant, suc in _all_sequents(t.types):
        if all(not (ant & m == ant and suc & m == 0) for m in satisfying):
            kept.append(Sequent(_set_of(t.types, ant), _set_of(t.types, suc)))
    return Theory(t.types, kept)


def is_regular(t: Theory, cap: int = DEFAULT_CLOSURE_CAP) -> list[Diagnostic]:
    """Diagnostics for every missing identity, weakening, or partition-rule
    sequent; empty iff the presented constraint set is closed under all three."""
    _require_cap(len(t.types), cap, "closure")
    types = t.types
    n = len(types)
    present = {(_mask_of(types, s.antecedent), _mask_of(types, s.succedent)) for s in t.constraints}
    problems = []

    def describe(ant: int, suc: int) -> str:
        return str(Sequent(_set_of(types, ant), _set_of(types, suc)))

    for t_name in types:
        bit = _mask_of(types, (t_name,))
        if (bit, bit) not in present:
            problems.append(Diagnostic("identity", (t_name,), f"{t_name} |- {t_name} missing"))

    full = (1 << n) - 1
    for ant, suc in sorted(present):
        free_ant = full & ~ant
        free_suc = full & ~suc
        sup_a = free_ant
        while True:
            sup_s = free_suc
            while True:
                candidate = (ant | sup_a, suc | sup_s)
                if candidate not in present:
                    problems.append(
                        Diagnostic(
                            "weakening",
                            (describe(ant, suc),),
                            f"weakened form {describe(*candidate)} missing",
                        )
                    )
                if sup_s == 0:
                    break
                sup_s = (sup_s - 1) & free_suc
            if sup_a == 0:
                break
            sup_a = (sup_a - 1) & free_ant

    for ant, suc in _all_sequents(types):
        if (ant, suc) in present:
            continue
        if ant & suc:
            # No partition extends an overlapping pair, so the rule demands it
            # unconditionally.
            problems.append(
                Diagnostic("partition", (describe(ant, suc),), "overlapping sequent missing")
            )
            continue
        free = full & ~(ant | suc)
        extensions = []
        sub = free
        while True:
            extensions.append((ant | sub, suc | (free & ~sub)))
            if sub == 0:
                break
            sub = (sub - 1) & free
        if all(e in present for e in extensions):
            problems.append(
                Diagnostic(
                    "partition",
                    (describe(ant, suc),),
                    "every total partition extending it is present but the sequent is missing",
                )
            )
    return problems


def holds_in(a: Classification, s: Sequent) -> bool:
    """Oracle form of the generated theory: does every instance satisfy s?

    No enumeration involved, so no cap applies.
    """
    universe = set(a.types)
    for name in sorted(s.antecedent | s.succedent):
        if name not in universe:
            raise UnknownIdentifierError(name, "sequent")
    return all(sequent_satisfied(a.row(x), s) for x in a.instances)


def theory_of(a: Classification, cap: int = DEFAULT_CLOSURE_CAP) -> Theory:
    """The theory generated by a classification: every sequent satisfied by
    every instance, materialized explicitly (use holds_in beyond the cap)."""
    _require_cap(len(a.types), cap, "closure")
    types = tuple(a.types)
    rows = {_mask_of(types, a.row(x)) for x in a.instances}
    kept = []
    for ant, suc in _all_sequents(types):
        if all(not (ant & m == ant and suc & m == 0) for m in rows):
            kept.append(Sequent(_set_of(types, ant), _set_of(types, suc)))
    return Theory(types, kept)


@dataclass(frozen=True)
class Interpretation:
    """A type function between theories expected to preserve constraints."""

    source: Theory
    target: Theory
    type_map: Mapping[str, str]

    def __init__(self, source, target, type_map):
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "type_map", dict(type_map))

    def image(self, s: Sequent) -> Sequent:
        return Sequent(
            (self.type_map[t] for t in s.antecedent),
            (self.type_map[t] for t in s.succedent),
        )


def _check_interp_totality(g: Interpretation) -> None:
    missing = [t for t in g.source.types if t not in g.type_map]
    if missing:
        raise ValidationError(f"non-total type map: missing {missing}")
    universe = set(g.target.types)
    for t in g.source.types:
        if g.type_map[t] not in universe:
            raise ValidationError(f"type map sends {t!r} to undeclared {g.type_map[t]!r}")


def check_interpretation(g: Interpretation) -> list[Diagnostic]:
    """Empty iff the image of every source constraint is entailed by the target."""
    _check_interp_totality(g)
    problems = []
    for s in g.source.sorted_constraints():
        image = g.image(s)
        if not entails(g.target, image):
            problems.append(
                Diagnostic("constraint-preservation", (str(s),), f"image {image} not entailed by target")
            )
    return problems


def identity_interpretation(t: Theory) -> Interpretation:
    return Interpretation(t, t, {name: name for name in t.types})


def compose_interpretations(first: Interpretation, second: Interpretation) -> Interpretation:
    if first.target != second.source:
        raise ValidationError("interpretations do not compose: middle theory differs")
    return Interpretation(
        first.source,
        second.target,
        {t: second.type_map[first.type_map[t]] for t in first.source.types},
    )


def formal_instance_name(types: tuple[str, ...], positive: frozenset[str]) -> str:
    """Canonical instance name for a partition: 'fi' plus its membership
    bitstring over the sorted type list."""
    return "fi" + "".join("1" if t in positive else "0" for t in types)


def cla_of_theory(t: Theory, cap: int = DEFAULT_ENUM_CAP) -> Classification:
    """The classification whose instances are the theory's formal instances."""
    fis = formal_instances(t, cap)
    instances = []
    incidence = []
    for fi in fis:
        name = formal_instance_name(t.types, fi.positive)
        instances.append(name)
        incidence.extend((name, typ) for typ in fi.positive)
    return Classification(instances, t.types, incidence)


def cla_of_interpretation(
    g: Interpretation, cap: int = DEFAULT_ENUM_CAP
) -> Infomorphism:
    """Lift an interpretation to the formal-instance classifications: the
    type map is g, the instance map takes preimages of both sides."""
    problems = check_interpretation(g)
    if problems:
        raise ValidationError("not a constraint-preserving interpretation", tuple(problems))
    source_cla = cla_of_theory(g.source, cap)
    target_cla = cla_of_theory(g.target, cap)
    inst_map = {}
    for fi in formal_instances(g.target, cap):
        preimage = frozenset(t for t in g.source.types if g.type_map[t] in fi.positive)
        inst_map[formal_instance_name(g.target.types, fi.positive)] = formal_instance_name(
            g.source.types, preimage
        )
    return Infomorphism(source_cla, target_cla, dict(g.type_map), inst_map)


def sum_theory(
    t0: Theory, t1: Theory, tags: tuple[str, str] = ("0", "1")
) -> tuple[Theory, Interpretation, Interpretation]:
    """Binary sum: tagged disjoint union of types, union of tagged constraints."""
    if tags[0] == tags[1]:
        raise ValidationError(f"sum component tags must differ, got {tags!r} twice")
    types = [tagged(tags[0], t) for t in t0.types] + [tagged(tags[1], t) for t in t1.types]
    constraints = []
    for tag, part in ((tags[0], t0), (tags[1], t1)):
        for s in part.sorted_constraints():
            constraints.append(
                Sequent(
                    (tagged(tag, t) for t in s.antecedent),
                    (tagged(tag, t) for t in s.succedent),
                )
            )
    total = Theory(types, constraints)
    in0 = Interpretation(t0, total, {t: tagged(tags[0], t) for t in t0.types})
    in1 = Interpretation(t1, total, {t: tagged(tags[1], t) for t in t1.types})
    return total, in0, in1


def quotient_theory(
    t: Theory, relation: Iterable[tuple[str, str]]
) -> tuple[Theory, Interpretation]:
    """Collapse related types; constraints are the images of the presentation."""
    pairs = frozenset(tuple(p) for p in relation)
    universe = set(t.types)
    for a, b in sorted(pairs):
        for name in (a, b):
            if name not in universe:
                raise UnknownIdentifierError(name, "quotient type relation")
    classes = equivalence_classes(t.types, pairs)
    quotient = Theory(
        sorted(set(classes.values())),
        (
            Sequent((classes[x] for x in s.antecedent), (classes[x] for x in s.succedent))
            for s in t.constraints
        ),
    )
    return quotient, Interpretation(t, quotient, classes)


def factor_interpretation(
    t: Theory, relation: Iterable[tuple[str, str]], g: Interpretation
) -> Interpretation:
    """Factor g : T -> T' through the canonical map of T/relation."""
    if g.source != t:
        raise ValidationError("interpretation to factor must start at the quotiented theory")
    _check_interp_totality(g)
    pairs = frozenset(tuple(p) for p in relation)
    for a, b in sorted(pairs):
        if g.type_map[a] != g.type_map[b]:
            raise ValidationError(
                f"interpretation does not respect the relation: ({a}, {b}) map to "
                f"{g.type_map[a]} and {g.type_map[b]}"
            )
    classes = equivalence_classes(t.types, pairs)
    quotient, _ = quotient_theory(t, pairs)
    return Interpretation(quotient, g.target, {classes[x]: g.type_map[x] for x in t.types})
