"""Sound logics: classification plus theory over one type set.

A sound logic couples a classification and a theory with the same types,
with every instance satisfying every constraint.  A local logic relaxes
this by designating a normal subset of instances; its sound part keeps
only those.  Logic morphisms are simultaneously infomorphisms of the
classifications and interpretations of the theories.

Two free constructions produce sound logics: from a classification (pair
it with its generated theory) and from a theory (pair it with its formal
instances).  The second is adjoint to taking the underlying theory; the
transposition between interpretations into th(L) and morphisms out of
the free logic is what the sharing pipeline uses to lift specification
links.  Sums, dual quotients, and their composition -- fusion over a
common center -- all preserve soundness.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .classification import (
    Classification,
    DualInvariant,
    Infomorphism,
    check_cls_invariant,
    check_infomorphism,
    compose_infomorphisms,
    factor_through_quotient,
    mediate_coproduct,
    quotient_classification,
    sum_classification,
)
from .errors import Diagnostic, SoundnessError, ValidationError
from .names import paired, split_pair, tagged
from .theory import (
    DEFAULT_CLOSURE_CAP,
    DEFAULT_ENUM_CAP,
    Interpretation,
    Sequent,
    Theory,
    check_interpretation,
    cla_of_theory,
    compose_interpretations,
    factor_interpretation,
    formal_instance_name,
    formal_instances,
    quotient_theory,
    sequent_satisfied,
    sum_theory,
    theory_of,
)

__all__ = [
    "SoundLogic",
    "LocalLogic",
    "LogicMorphism",
    "SoundnessReport",
    "FusionResult",
    "soundness_report",
    "sound_part",
    "log_of_classification",
    "log_of_theory",
    "check_logic_morphism",
    "identity_logic_morphism",
    "compose_logic_morphisms",
    "transpose",
    "counit",
    "sum_logic",
    "mediate_coproduct_logic",
    "quotient_logic",
    "fusion",
    "mediate_pushout",
]


@dataclass(frozen=True)
class SoundnessReport:
    """Partition of instances into normal ones and violators with evidence."""

    normal: tuple[str, ...]
    abnormal: tuple[tuple[str, tuple[Sequent, ...]], ...]

    @property
    def all_normal(self) -> bool:
        return not self.abnormal

    def abnormal_instances(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.abnormal)


def _check_same_types(c: Classification, t: Theory) -> None:
    if tuple(c.types) != tuple(t.types):
        diff = sorted(set(c.types) ^ set(t.types))
        raise ValidationError(f"classification and theory type sets differ by {diff}")


def soundness_report(c: Classification, t: Theory) -> SoundnessReport:
    """Which instances satisfy all constraints, and which violate which."""
    _check_same_types(c, t)
    normal = []
    abnormal = []
    ordered = t.sorted_constraints()
    for a in c.instances:
        row = c.row(a)
        violated = tuple(s for s in ordered if not sequent_satisfied(row, s))
        if violated:
            abnormal.append((a, violated))
        else:
            normal.append(a)
    return SoundnessReport(tuple(normal), tuple(abnormal))


@dataclass(frozen=True)
class SoundLogic:
    """A classification and a theory over the same types, every instance normal."""

    classification: Classification
    theory: Theory

    def __post_init__(self):
        report = soundness_report(self.classification, self.theory)
        if not report.all_normal:
            raise SoundnessError(
                f"logic is not sound; abnormal: {', '.join(report.abnormal_instances())}",
                report,
            )

    @property
    def types(self) -> tuple[str, ...]:
        return self.classification.types

    @property
    def instances(self) -> tuple[str, ...]:
        return self.classification.instances


@dataclass(frozen=True)
class LocalLogic:
    """A logic with a designated normal subset; possibly unsound as a whole."""

    classification: Classification
    theory: Theory
    normal: frozenset[str]

    def __init__(self, classification, theory, normal: Iterable[str]):
        _check_same_types(classification, theory)
        normal_set = frozenset(normal)
        undeclared = normal_set - set(classification.instances)
        if undeclared:
            raise ValidationError(f"normal instances not declared: {sorted(undeclared)}")
        for a in sorted(normal_set):
            row = classification.row(a)
            bad = [s for s in theory.sorted_constraints() if not sequent_satisfied(row, s)]
            if bad:
                raise ValidationError(
                    f"designated normal instance {a} violates {bad[0]}"
                )
        object.__setattr__(self, "classification", classification)
        object.__setattr__(self, "theory", theory)
        object.__setattr__(self, "normal", normal_set)

    @property
    def is_sound(self) -> bool:
        return self.normal == set(self.classification.instances)


def sound_part(logic: LocalLogic) -> SoundLogic:
    """Throw away the abnormal instances and restrict the incidence relation."""
    c = logic.classification
    kept = sorted(logic.normal)
    kept_set = logic.normal
    restricted = Classification(
        kept, c.types, [(a, t) for a, t in c.incidence if a in kept_set]
    )
    return SoundLogic(restricted, logic.theory)


def log_of_classification(a: Classification, cap: int = DEFAULT_CLOSURE_CAP) -> SoundLogic:
    """Pair a classification with its generated theory; sound by construction."""
    return SoundLogic(a, theory_of(a, cap))


def log_of_theory(t: Theory, cap: int = DEFAULT_ENUM_CAP) -> SoundLogic:
    """Pair a theory with the classification of its formal instances."""
    return SoundLogic(cla_of_theory(t, cap), t)


@dataclass(frozen=True)
class LogicMorphism:
    """A map of sound logics: one type function, one instance function."""

    source: SoundLogic
    target: SoundLogic
    type_map: Mapping[str, str]
    inst_map: Mapping[str, str]

    def __init__(self, source, target, type_map, inst_map):
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "type_map", dict(type_map))
        object.__setattr__(self, "inst_map", dict(inst_map))

    def infomorphism(self) -> Infomorphism:
        return Infomorphism(
            self.source.classification, self.target.classification, self.type_map, self.inst_map
        )

    def interpretation(self) -> Interpretation:
        return Interpretation(self.source.theory, self.target.theory, self.type_map)


def check_logic_morphism(m: LogicMorphism) -> list[Diagnostic]:
    """Union of the infomorphism and interpretation diagnostics."""
    return check_infomorphism(m.infomorphism()) + check_interpretation(m.interpretation())


def identity_logic_morphism(L: SoundLogic) -> LogicMorphism:
    return LogicMorphism(L, L, {t: t for t in L.types}, {a: a for a in L.instances})


def compose_logic_morphisms(first: LogicMorphism, second: LogicMorphism) -> LogicMorphism:
    if first.target != second.source:
        raise ValidationError("logic morphisms do not compose: middle logic differs")
    return LogicMorphism(
        first.source,
        second.target,
        {t: second.type_map[first.type_map[t]] for t in first.source.types},
        {a: first.inst_map[second.inst_map[a]] for a in second.target.instances},
    )


def transpose(g: Interpretation, L: SoundLogic, cap: int = DEFAULT_ENUM_CAP) -> LogicMorphism:
    """Turn an interpretation into th(L) into a morphism out of the free logic.

    The type map is g itself; each target instance goes back to the formal
    instance carved out by the preimage of its state description.  That
    instance map is the only one satisfying the fundamental property, and
    it lands among the formal instances because L is sound and g preserves
    constraints.
    """
    if g.target != L.theory:
        raise ValidationError("interpretation must land in the logic's theory")
    problems = check_interpretation(g)
    if problems:
        raise ValidationError("specification link does not preserve constraints", tuple(problems))
    free = log_of_theory(g.source, cap)
    inst_map = {}
    for a in L.instances:
        row = L.classification.row(a)
        preimage = frozenset(t for t in g.source.types if g.type_map[t] in row)
        inst_map[a] = formal_instance_name(g.source.types, preimage)
    return LogicMorphism(free, L, dict(g.type_map), inst_map)


def counit(L: SoundLogic, cap: int = DEFAULT_ENUM_CAP) -> LogicMorphism:
    """The morphism from the free logic over th(L) back to L: identity on
    types, state description on instances."""
    return transpose(
        Interpretation(L.theory, L.theory, {t: t for t in L.types}), L, cap
    )


def sum_logic(
    l0: SoundLogic, l1: SoundLogic, tags: tuple[str, str] = ("0", "1")
) -> tuple[SoundLogic, LogicMorphism, LogicMorphism]:
    """Binary sum: sum classification over the sum theory, with injections."""
    total_cla, c0, c1 = sum_classification(l0.classification, l1.classification, tags)
    total_th, _, _ = sum_theory(l0.theory, l1.theory, tags)
    total = SoundLogic(total_cla, total_th)
    inj0 = LogicMorphism(l0, total, c0.type_map, c0.inst_map)
    inj1 = LogicMorphism(l1, total, c1.type_map, c1.inst_map)
    return total, inj0, inj1


def mediate_coproduct_logic(
    m0: LogicMorphism, m1: LogicMorphism, tags: tuple[str, str] = ("0", "1")
) -> LogicMorphism:
    """The unique logic morphism from the sum of the two sources through
    which m0 and m1 factor."""
    if m0.target != m1.target:
        raise ValidationError("coproduct mediator needs a common target logic")
    for m, what in ((m0, "first cone leg"), (m1, "second cone leg")):
        _validated(m, what)
    total, _, _ = sum_logic(m0.source, m1.source, tags)
    cls_mediator = mediate_coproduct(m0.infomorphism(), m1.infomorphism(), tags)
    return _validated(
        LogicMorphism(total, m0.target, cls_mediator.type_map, cls_mediator.inst_map),
        "coproduct mediator",
    )


def quotient_logic(
    L: SoundLogic, j: DualInvariant
) -> tuple[SoundLogic, LogicMorphism]:
    """Dual quotient: restrict instances, collapse types, take constraint images."""
    quotient_cla, canonical_cla = quotient_classification(L.classification, j)
    quotient_th, _ = quotient_theory(L.theory, j.type_relation)
    quotient = SoundLogic(quotient_cla, quotient_th)
    canonical = LogicMorphism(L, quotient, canonical_cla.type_map, canonical_cla.inst_map)
    return quotient, canonical


@dataclass(frozen=True)
class FusionResult:
    """The fusion of two logics over a center, with all construction data."""

    logic: SoundLogic
    e0: LogicMorphism
    e1: LogicMorphism
    center: SoundLogic
    leg0: LogicMorphism
    leg1: LogicMorphism
    sum: SoundLogic
    inj0: LogicMorphism
    inj1: LogicMorphism
    invariant: DualInvariant
    canonical: LogicMorphism
    tags: tuple[str, str]

    @property
    def kept_pairs(self) -> tuple[tuple[str, str], ...]:
        return tuple(split_pair(name) for name in self.logic.instances)

    def type_classes(self) -> dict[str, frozenset[str]]:
        """Fusion type -> the sum types it collapses."""
        classes: dict[str, set[str]] = {t: set() for t in self.logic.types}
        for t in self.sum.types:
            classes[self.canonical.type_map[t]].add(t)
        return {rep: frozenset(members) for rep, members in classes.items()}


def _validated(m: LogicMorphism, what: str) -> LogicMorphism:
    problems = check_logic_morphism(m)
    if problems:
        raise ValidationError(f"{what} is not a logic morphism", tuple(problems))
    return m


def fusion(
    center: SoundLogic,
    m0: LogicMorphism,
    m1: LogicMorphism,
    tags: tuple[str, str] = ("0", "1"),
) -> FusionResult:
    """Fuse the targets of two morphisms out of a common center.

    Sum the targets, keep the instance pairs whose components agree on the
    center, and collapse each pair of types that shares a center preimage.
    The embeddings are the injections followed by the canonical quotient
    morphism.
    """
    for m, what in ((m0, "first leg"), (m1, "second leg")):
        if m.source != center:
            raise ValidationError(f"{what} does not start at the center logic")
        _validated(m, what)
    l0, l1 = m0.target, m1.target
    total, inj0, inj1 = sum_logic(l0, l1, tags)
    kept = [
        paired(a0, a1)
        for a0 in l0.instances
        for a1 in l1.instances
        if m0.inst_map[a0] == m1.inst_map[a1]
    ]
    linkage = [
        (tagged(tags[0], m0.type_map[t]), tagged(tags[1], m1.type_map[t]))
        for t in center.types
    ]
    invariant = DualInvariant(kept, linkage)
    conflicts = check_cls_invariant(total.classification, invariant)
    if conflicts:
        raise ValidationError("linkage invariant fails on the sum", tuple(conflicts))
    fused, canonical = quotient_logic(total, invariant)
    e0 = compose_logic_morphisms(inj0, canonical)
    e1 = compose_logic_morphisms(inj1, canonical)
    return FusionResult(
        fused, e0, e1, center, m0, m1, total, inj0, inj1, invariant, canonical, tags
    )


def mediate_pushout(
    fused: FusionResult, n0: LogicMorphism, n1: LogicMorphism
) -> LogicMorphism:
    """The unique morphism out of the fusion commuting with both embeddings.

    n0 and n1 must form a cocone: share a target and agree when composed
    with the center legs.
    """
    if n0.target != n1.target:
        raise ValidationError("pushout mediator needs a common target logic")
    if n0.source != fused.e0.source or n1.source != fused.e1.source:
        raise ValidationError("cocone legs must start at the fused logics")
    _validated(n0, "first cocone leg")
    _validated(n1, "second cocone leg")
    via0 = compose_logic_morphisms(fused.leg0, n0)
    via1 = compose_logic_morphisms(fused.leg1, n1)
    for t in fused.center.types:
        if via0.type_map[t] != via1.type_map[t]:
            raise ValidationError(
                f"cocone does not commute on center type {t}: "
                f"{via0.type_map[t]} != {via1.type_map[t]}"
            )
    for b in n0.target.instances:
        if via0.inst_map[b] != via1.inst_map[b]:
            raise ValidationError(
                f"cocone does not commute on instance {b}: "
                f"{via0.inst_map[b]} != {via1.inst_map[b]}"
            )
    cls_mediator = mediate_coproduct(n0.infomorphism(), n1.infomorphism(), fused.tags)
    factored = factor_through_quotient(
        fused.sum.classification, fused.invariant, cls_mediator
    )
    interp = factor_interpretation(
        fused.sum.theory,
        fused.invariant.type_relation,
        Interpretation(fused.sum.theory, n0.target.theory, cls_mediator.type_map),
    )
    mediator = LogicMorphism(fused.logic, n0.target, interp.type_map, factored.inst_map)
    return _validated(mediator, "pushout mediator")
