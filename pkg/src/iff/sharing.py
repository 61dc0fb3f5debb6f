"""The two-step community-ontology sharing pipeline.

A sharing specification names a common theory, at least two participant
logics with their synonymy relations, and a specification link from the
common theory into each participant.  Step one lifts the common theory
to its free logic and transposes every link into a logic morphism.  Step
two fuses the participants over that center: sum, then quotient by the
linkage invariant.  The result is the virtual logic of community
connections: its instances are the cross-community instance tuples that
agree on the inherited common types, and its types are the linkage
classes of the participant types.

Participants must be sound.  A participant supplied with designated
normal instances (or found unsound) is rejected unless the specification
opts into sound parts, in which case the discarded instances are
reported.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .classification import DualInvariant, StateDescription
from .errors import SoundnessError, SynonymyConflictError, ValidationError
from .logic import (
    LocalLogic,
    LogicMorphism,
    SoundLogic,
    SoundnessReport,
    compose_logic_morphisms,
    fusion,
    log_of_theory,
    quotient_logic,
    sound_part,
    soundness_report,
    transpose,
)
from .names import paired, flatten_pair, tagged
from .theory import (
    DEFAULT_ENUM_CAP,
    Interpretation,
    Theory,
    check_interpretation,
    compose_interpretations,
)

__all__ = [
    "Participant",
    "SharingSpec",
    "Connection",
    "SharingResult",
    "LiftedDiagram",
    "ProjectionReport",
    "apply_synonymy",
    "step1_lift",
    "step2_fuse",
    "run_sharing",
    "project",
]

FOLD_TAG = "fused"


@dataclass(frozen=True)
class Participant:
    """One community: its logic, its synonymy, and its specification link.

    The link is an interpretation from the common theory into either the
    participant's theory or its synonymy quotient; links into the plain
    theory are pushed through the canonical quotient map automatically.
    """

    name: str
    logic: SoundLogic | LocalLogic
    synonymy: frozenset[tuple[str, str]]
    link: Interpretation

    def __init__(self, name, logic, synonymy: Iterable[tuple[str, str]], link):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "logic", logic)
        object.__setattr__(self, "synonymy", frozenset(tuple(p) for p in synonymy))
        object.__setattr__(self, "link", link)


@dataclass(frozen=True)
class SharingSpec:
    common: Theory
    participants: tuple[Participant, ...]
    allow_sound_part: bool = False

    def __post_init__(self):
        object.__setattr__(self, "participants", tuple(self.participants))
        if len(self.participants) < 2:
            raise ValidationError("sharing needs at least two participants")
        names = [p.name for p in self.participants]
        if len(set(names)) != len(names):
            raise ValidationError(f"participant names must be unique, got {names}")
        for p in self.participants:
            missing = [t for t in self.common.types if t not in p.link.type_map]
            if missing:
                raise ValidationError(
                    f"participant {p.name!r}: link misses common types {missing}"
                )


def apply_synonymy(logic: SoundLogic, synonymy: Iterable[tuple[str, str]]) -> SoundLogic:
    """Collapse declared synonyms; they must classify every instance alike."""
    quotient, _ = _synonymy_quotient(logic, synonymy)
    return quotient


def _synonymy_quotient(
    logic: SoundLogic, synonymy: Iterable[tuple[str, str]]
) -> tuple[SoundLogic, LogicMorphism]:
    invariant = DualInvariant(logic.instances, synonymy)
    try:
        return quotient_logic(logic, invariant)
    except ValidationError as err:
        raise SynonymyConflictError(
            "synonymy conflict: instances distinguish the alleged synonyms",
            err.diagnostics,
        ) from err


@dataclass(frozen=True)
class PreparedParticipant:
    """A participant after the soundness gate and synonymy quotient."""

    name: str
    logic: SoundLogic
    canonical: LogicMorphism
    link: Interpretation
    report: SoundnessReport
    discarded: tuple[str, ...]


@dataclass(frozen=True)
class LiftedDiagram:
    """Step-one output: the free center logic and the transposed links."""

    center: SoundLogic
    participants: tuple[PreparedParticipant, ...]
    links: tuple[LogicMorphism, ...]
    common: Theory


@dataclass(frozen=True)
class Connection:
    """A cross-community instance tuple and the common state it agrees on."""

    instances: tuple[str, ...]
    common: StateDescription

    def name(self) -> str:
        joined = self.instances[0]
        for part in self.instances[1:]:
            joined = paired(joined, part)
        return joined


@dataclass(frozen=True)
class SharingResult:
    virtual: SoundLogic
    embeddings: tuple[LogicMorphism, ...]
    connections: tuple[Connection, ...]
    type_classes: tuple[tuple[str, frozenset[str]], ...]
    soundness_reports: tuple[tuple[str, SoundnessReport, tuple[str, ...]], ...]
    lifted: LiftedDiagram
    folded: bool

    def merged_type_classes(self) -> tuple[tuple[str, frozenset[str]], ...]:
        return tuple((name, members) for name, members in self.type_classes if len(members) > 1)


def _gate_soundness(
    spec: SharingSpec,
) -> list[tuple[str, SoundLogic, SoundnessReport, tuple[str, ...]]]:
    failures = []
    prepared = []
    for p in spec.participants:
        logic = p.logic
        if isinstance(logic, SoundLogic):
            report = soundness_report(logic.classification, logic.theory)
            prepared.append((p.name, logic, report, ()))
            continue
        report = soundness_report(logic.classification, logic.theory)
        discarded = tuple(a for a in logic.classification.instances if a not in logic.normal)
        if not discarded:
            prepared.append((p.name, sound_part(logic), report, ()))
        elif spec.allow_sound_part:
            prepared.append((p.name, sound_part(logic), report, discarded))
        else:
            failures.append((p.name, discarded))
    if failures:
        listing = "; ".join(f"participant {name!r} abnormal: {', '.join(bad)}" for name, bad in failures)
        raise SoundnessError(f"unsound participants (enable allow_sound_part to discard): {listing}")
    return prepared


def step1_lift(spec: SharingSpec, enum_cap: int = DEFAULT_ENUM_CAP) -> LiftedDiagram:
    """Quotient each participant by its synonymy, lift the common theory to
    its free logic, and transpose every specification link."""
    gated = _gate_soundness(spec)
    prepared = []
    conflicts = []
    for participant, (name, sound, report, discarded) in zip(spec.participants, gated):
        try:
            quotient, canonical = _synonymy_quotient(sound, participant.synonymy)
        except SynonymyConflictError as err:
            conflicts.append(f"participant {name!r}: {err}")
            continue
        link = participant.link
        if link.source != spec.common:
            conflicts.append(f"participant {name!r}: link does not start at the common theory")
            continue
        if link.target == quotient.theory:
            pass
        elif link.target == sound.theory:
            link = compose_interpretations(link, canonical.interpretation())
        else:
            conflicts.append(
                f"participant {name!r}: link lands neither in the participant theory "
                "nor in its synonymy quotient"
            )
            continue
        prepared.append(PreparedParticipant(name, quotient, canonical, link, report, discarded))
    if conflicts:
        raise ValidationError("; ".join(conflicts))
    bad_links = []
    for prep in prepared:
        try:
            problems = check_interpretation(prep.link)
        except ValidationError as err:
            bad_links.append(f"participant {prep.name!r}: {err}")
            continue
        if problems:
            bad_links.append(
                f"participant {prep.name!r}: link does not preserve the common constraints: "
                + "; ".join(str(d) for d in problems)
            )
    if bad_links:
        raise ValidationError("; ".join(bad_links))
    center = log_of_theory(spec.common, enum_cap)
    morphisms = tuple(transpose(prep.link, prep.logic, enum_cap) for prep in prepared)
    return LiftedDiagram(center, tuple(prepared), morphisms, spec.common)


def step2_fuse(lifted: LiftedDiagram, allow_fold: bool = False) -> SharingResult:
    """Fuse the lifted diagram: sum the participants and quotient by linkage."""
    n = len(lifted.links)
    if n > 2 and not allow_fold:
        raise ValidationError(
            f"{n} participants require the fold extension (binary fusion folded left)"
        )
    names = [p.name for p in lifted.participants]
    result = fusion(lifted.center, lifted.links[0], lifted.links[1], tags=(names[0], names[1]))
    embeddings = [result.e0, result.e1]
    for k in range(2, n):
        center_leg = compose_logic_morphisms(lifted.links[0], embeddings[0])
        step = fusion(lifted.center, center_leg, lifted.links[k], tags=(FOLD_TAG, names[k]))
        embeddings = [compose_logic_morphisms(e, step.e0) for e in embeddings]
        embeddings.append(step.e1)
        result = step
    virtual = result.logic
    back = compose_logic_morphisms(lifted.links[0], embeddings[0])
    connections = tuple(
        Connection(
            flatten_pair(name),
            lifted.center.classification.state_description(back.inst_map[name]),
        )
        for name in virtual.instances
    )
    classes: dict[str, set[str]] = {t: set() for t in virtual.types}
    for name, embedding in zip(names, embeddings):
        for t in embedding.source.types:
            classes[embedding.type_map[t]].add(tagged(name, t))
    type_classes = tuple(sorted((rep, frozenset(members)) for rep, members in classes.items()))
    reports = tuple((p.name, p.report, p.discarded) for p in lifted.participants)
    return SharingResult(
        virtual, tuple(embeddings), connections, type_classes, reports, lifted, n > 2
    )


def run_sharing(
    spec: SharingSpec,
    enum_cap: int = DEFAULT_ENUM_CAP,
    allow_fold: bool = False,
) -> SharingResult:
    """The whole pipeline: soundness gate, synonymy, lift, fuse."""
    return step2_fuse(step1_lift(spec, enum_cap), allow_fold)


@dataclass(frozen=True)
class ProjectionReport:
    """How one participant sits inside the virtual logic."""

    participant: str
    index: int
    instance_projection: tuple[tuple[str, str], ...]
    type_members: tuple[tuple[str, tuple[str, ...]], ...]
    embedding_consistent: bool


def project(result: SharingResult, k: int) -> ProjectionReport:
    """Recover participant k from the virtual logic as a pair of tables."""
    if not 0 <= k < len(result.embeddings):
        raise ValidationError(f"participant index {k} out of range")
    name = result.lifted.participants[k].name
    embedding = result.embeddings[k]
    instance_projection = tuple((c.name(), c.instances[k]) for c in result.connections)
    prefix = name + "."
    type_members = tuple(
        (class_name, tuple(sorted(m[len(prefix):] for m in members if m.startswith(prefix))))
        for class_name, members in result.type_classes
    )
    consistent = all(
        embedding.inst_map[virtual_name] == component
        for virtual_name, component in instance_projection
    )
    return ProjectionReport(name, k, instance_projection, type_members, consistent)
