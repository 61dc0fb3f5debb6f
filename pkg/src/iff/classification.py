"""Finite classifications and their morphism algebra.

A classification relates a finite set of instances to a finite set of
types through an incidence relation.  Infomorphisms connect two
classifications contravariantly: types map forward, instances map
backward, tied together by the fundamental biconditional

    inst_map(a) is of type t in the source  iff  a is of type type_map(t) in the target.

The module also provides sums (instances multiply, types add), dual
quotients (keep a subset of instances, collapse a compatible type
relation), and the mediating morphisms both constructions come with.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import Diagnostic, UnknownIdentifierError, ValidationError
from .names import check_name, equivalence_classes, paired, split_pair, tagged

__all__ = [
    "Classification",
    "StateDescription",
    "Infomorphism",
    "DualInvariant",
    "check_infomorphism",
    "identity_infomorphism",
    "compose_infomorphisms",
    "sum_classification",
    "mediate_coproduct",
    "check_cls_invariant",
    "quotient_classification",
    "factor_through_quotient",
]


@dataclass(frozen=True)
class StateDescription:
    """The partition of a type set into the types an instance has and lacks."""

    positive: frozenset[str]
    negative: frozenset[str]

    def __post_init__(self):
        if self.positive & self.negative:
            raise ValidationError(f"state description sides overlap: {sorted(self.positive & self.negative)}")

    def __str__(self) -> str:
        pos = ",".join(sorted(self.positive))
        neg = ",".join(sorted(self.negative))
        return f"<{{{pos}}},{{{neg}}}>"


@dataclass(frozen=True)
class Classification:
    """Finite instances, finite types, and an incidence relation between them.

    Instances and types are kept sorted by name; that order is the
    iteration order everywhere, so all derived constructions are
    deterministic.
    """

    instances: tuple[str, ...]
    types: tuple[str, ...]
    incidence: frozenset[tuple[str, str]]

    def __init__(
        self,
        instances: Iterable[str],
        types: Iterable[str],
        incidence: Iterable[tuple[str, str]] = (),
    ):
        inst = tuple(sorted({check_name(a, "instances") for a in instances}))
        typ = tuple(sorted({check_name(t, "types") for t in types}))
        inc = frozenset((a, t) for a, t in incidence)
        inst_set, typ_set = set(inst), set(typ)
        for a, t in sorted(inc):
            if a not in inst_set:
                raise UnknownIdentifierError(a, "incidence (instance)")
            if t not in typ_set:
                raise UnknownIdentifierError(t, "incidence (type)")
        object.__setattr__(self, "instances", inst)
        object.__setattr__(self, "types", typ)
        object.__setattr__(self, "incidence", inc)

    def classifies(self, instance: str, type_: str) -> bool:
        """Whether the instance is of the given type."""
        if instance not in self._instance_set():
            raise UnknownIdentifierError(instance, "classifies (instance)")
        if type_ not in self._type_set():
            raise UnknownIdentifierError(type_, "classifies (type)")
        return (instance, type_) in self.incidence

    def row(self, instance: str) -> frozenset[str]:
        """The set of types the instance has."""
        if instance not in self._instance_set():
            raise UnknownIdentifierError(instance, "row")
        return frozenset(t for a, t in self.incidence if a == instance)

    def state_description(self, instance: str) -> StateDescription:
        positive = self.row(instance)
        return StateDescription(positive, frozenset(self.types) - positive)

    def is_separated(self) -> bool:
        """True when no two instances have identical state descriptions."""
        rows = [self.row(a) for a in self.instances]
        return len(set(rows)) == len(rows)

    def _instance_set(self) -> frozenset[str]:
        return frozenset(self.instances)

    def _type_set(self) -> frozenset[str]:
        return frozenset(self.types)


@dataclass(frozen=True)
class Infomorphism:
    """A contravariant pair of maps between two classifications."""

    source: Classification
    target: Classification
    type_map: Mapping[str, str]
    inst_map: Mapping[str, str]

    def __init__(self, source, target, type_map, inst_map):
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "type_map", dict(type_map))
        object.__setattr__(self, "inst_map", dict(inst_map))


def _check_totality(m: Infomorphism) -> None:
    missing_types = [t for t in m.source.types if t not in m.type_map]
    if missing_types:
        raise ValidationError(f"non-total type map: missing {missing_types}")
    missing_insts = [a for a in m.target.instances if a not in m.inst_map]
    if missing_insts:
        raise ValidationError(f"non-total instance map: missing {missing_insts}")
    src_types = set(m.target.types)
    for t in m.source.types:
        if m.type_map[t] not in src_types:
            raise ValidationError(f"type map sends {t!r} to undeclared {m.type_map[t]!r}")
    src_insts = set(m.source.instances)
    for a in m.target.instances:
        if m.inst_map[a] not in src_insts:
            raise ValidationError(f"instance map sends {a!r} to undeclared {m.inst_map[a]!r}")


def check_infomorphism(m: Infomorphism) -> list[Diagnostic]:
    """Empty iff the fundamental property holds on every (instance, type) pair."""
    _check_totality(m)
    problems = []
    for a in m.target.instances:
        back = m.inst_map[a]
        for t in m.source.types:
            left = m.source.classifies(back, t)
            right = m.target.classifies(a, m.type_map[t])
            if left != right:
                problems.append(
                    Diagnostic(
                        "fundamental-property",
                        (a, t),
                        f"inst_map({a})={back} {'|=' if left else '|/='} {t} "
                        f"but {a} {'|=' if right else '|/='} {m.type_map[t]}",
                    )
                )
    return problems


def identity_infomorphism(a: Classification) -> Infomorphism:
    return Infomorphism(a, a, {t: t for t in a.types}, {i: i for i in a.instances})


def compose_infomorphisms(first: Infomorphism, second: Infomorphism) -> Infomorphism:
    """Compose first: A <-> B with second: B <-> C into A <-> C."""
    if first.target != second.source:
        raise ValidationError("infomorphisms do not compose: middle classification differs")
    return Infomorphism(
        first.source,
        second.target,
        {t: second.type_map[first.type_map[t]] for t in first.source.types},
        {a: first.inst_map[second.inst_map[a]] for a in second.target.instances},
    )


def sum_classification(
    a0: Classification, a1: Classification, tags: tuple[str, str] = ("0", "1")
) -> tuple[Classification, Infomorphism, Infomorphism]:
    """Binary sum: instances are pairs, types a tagged disjoint union.

    Returns the sum with its two injections (type injection, instance
    projection).  Pair (x, y) is of a tagged type exactly when the
    corresponding component instance is of the untagged type.
    """
    if tags[0] == tags[1]:
        raise ValidationError(f"sum component tags must differ, got {tags!r} twice")
    components = ((tags[0], a0), (tags[1], a1))
    types = [tagged(tag, t) for tag, a in components for t in a.types]
    instances = []
    incidence = []
    for x in a0.instances:
        row0 = a0.row(x)
        for y in a1.instances:
            name = paired(x, y)
            instances.append(name)
            incidence.extend((name, tagged(tags[0], t)) for t in row0)
            incidence.extend((name, tagged(tags[1], t)) for t in a1.row(y))
    total = Classification(instances, types, incidence)
    injections = []
    for k, (tag, a) in enumerate(components):
        inst_map = {}
        for name in total.instances:
            left, right = split_pair(name)
            inst_map[name] = left if k == 0 else right
        injections.append(Infomorphism(a, total, {t: tagged(tag, t) for t in a.types}, inst_map))
    return total, injections[0], injections[1]


def mediate_coproduct(
    m0: Infomorphism, m1: Infomorphism, tags: tuple[str, str] = ("0", "1")
) -> Infomorphism:
    """The unique morphism from the sum of the two sources through which
    m0 and m1 factor.  Both morphisms must share the target."""
    if m0.target != m1.target:
        raise ValidationError("coproduct mediator needs a common target classification")
    for m in (m0, m1):
        bad = check_infomorphism(m)
        if bad:
            raise ValidationError("coproduct leg is not an infomorphism", tuple(bad))
    total, _, _ = sum_classification(m0.source, m1.source, tags)
    type_map = {tagged(tags[0], t): m0.type_map[t] for t in m0.source.types}
    type_map.update({tagged(tags[1], t): m1.type_map[t] for t in m1.source.types})
    inst_map = {b: paired(m0.inst_map[b], m1.inst_map[b]) for b in m0.target.instances}
    return Infomorphism(total, m0.target, type_map, inst_map)


@dataclass(frozen=True)
class DualInvariant:
    """Kept-instance subset plus a type relation compatible with incidence."""

    kept_instances: frozenset[str]
    type_relation: frozenset[tuple[str, str]]

    def __init__(self, kept_instances: Iterable[str], type_relation: Iterable[tuple[str, str]]):
        object.__setattr__(self, "kept_instances", frozenset(kept_instances))
        object.__setattr__(self, "type_relation", frozenset(tuple(p) for p in type_relation))


def check_cls_invariant(a: Classification, j: DualInvariant) -> list[Diagnostic]:
    """Empty iff every related type pair classifies every kept instance identically."""
    typ = set(a.types)
    for x in sorted(j.kept_instances):
        if x not in set(a.instances):
            raise UnknownIdentifierError(x, "invariant kept instances")
    for alpha, beta in sorted(j.type_relation):
        for t in (alpha, beta):
            if t not in typ:
                raise UnknownIdentifierError(t, "invariant type relation")
    problems = []
    for alpha, beta in sorted(j.type_relation):
        for x in sorted(j.kept_instances):
            has_a, has_b = a.classifies(x, alpha), a.classifies(x, beta)
            if has_a != has_b:
                problems.append(
                    Diagnostic(
                        "invariant",
                        (x, alpha, beta),
                        f"{x} {'|=' if has_a else '|/='} {alpha} but {'|=' if has_b else '|/='} {beta}",
                    )
                )
    return problems


def quotient_classification(
    a: Classification, j: DualInvariant
) -> tuple[Classification, Infomorphism]:
    """Restrict to the kept instances and collapse related types.

    The type relation is closed to an equivalence first; each class is
    named by its least member.  Returns the quotient and the canonical
    morphism into it.
    """
    problems = check_cls_invariant(a, j)
    if problems:
        raise ValidationError("dual invariant does not hold", tuple(problems))
    classes = equivalence_classes(a.types, j.type_relation)
    kept = sorted(j.kept_instances)
    incidence = [(x, classes[t]) for x in kept for t in a.row(x)]
    quotient = Classification(kept, sorted(set(classes.values())), incidence)
    canonical = Infomorphism(a, quotient, classes, {x: x for x in kept})
    return quotient, canonical


def factor_through_quotient(
    a: Classification, j: DualInvariant, m: Infomorphism
) -> Infomorphism:
    """Factor m : A <-> A' through the canonical morphism of A/J.

    Requires m to respect J: its instance map must land in the kept
    subset, and its type map must identify related types.
    """
    if m.source != a:
        raise ValidationError("morphism to factor must start at the quotiented classification")
    _check_totality(m)
    for b in m.target.instances:
        if m.inst_map[b] not in j.kept_instances:
            raise ValidationError(
                f"morphism does not respect the invariant: inst_map({b})={m.inst_map[b]} is not kept"
            )
    for alpha, beta in sorted(j.type_relation):
        if m.type_map[alpha] != m.type_map[beta]:
            raise ValidationError(
                f"morphism does not respect the invariant: related types ({alpha}, {beta}) "
                f"map to {m.type_map[alpha]} and {m.type_map[beta]}"
            )
    classes = equivalence_classes(a.types, j.type_relation)
    by_class = {classes[t]: m.type_map[t] for t in a.types}
    quotient, _ = quotient_classification(a, j)
    return Infomorphism(quotient, m.target, by_class, dict(m.inst_map))
