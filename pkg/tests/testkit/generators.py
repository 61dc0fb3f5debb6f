"""Seeded random generation of valid-by-construction objects.

The same seed and bounds always reproduce the same stream.  Morphisms
are generated by choosing type maps first and then forcing the instance
maps through the fundamental property; logics are generated sound by
sampling instance rows from satisfying partitions; sharing
specifications are generated with links that preserve the common
constraints by construction.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from iff import ifo
from iff.classification import (
    Classification,
    DualInvariant,
    Infomorphism,
    check_cls_invariant,
)
from iff.logic import (
    LogicMorphism,
    SoundLogic,
    compose_logic_morphisms,
    fusion,
    log_of_theory,
    quotient_logic,
    sum_logic,
    transpose,
)
from iff.sharing import Participant, SharingSpec
from iff.theory import Interpretation, Sequent, Theory

from .oracles import satisfies


@dataclass
class Generator:
    seed: int
    max_instances: int = 4
    max_types: int = 4
    max_constraints: int = 6
    rng: random.Random = field(init=False, repr=False)

    def __post_init__(self):
        self.rng = random.Random(self.seed)

    # -- basic pieces ---------------------------------------------------------

    def _subset(self, pool: list[str], p: float = 0.5) -> list[str]:
        return [x for x in pool if self.rng.random() < p]

    def type_names(self, at_least: int = 0) -> list[str]:
        return [f"t{i}" for i in range(self.rng.randint(at_least, self.max_types))]

    def sequent(self, types: list[str]) -> Sequent:
        return Sequent(self._subset(types, 0.35), self._subset(types, 0.35))

    def theory(self, types: list[str] | None = None, max_constraints: int | None = None) -> Theory:
        if types is None:
            types = self.type_names()
        limit = self.max_constraints if max_constraints is None else max_constraints
        count = self.rng.randint(0, limit)
        return Theory(types, (self.sequent(types) for _ in range(count)))

    def classification(self) -> Classification:
        types = self.type_names()
        instances = [f"a{i}" for i in range(self.rng.randint(0, self.max_instances))]
        incidence = [(a, t) for a in instances for t in types if self.rng.random() < 0.5]
        return Classification(instances, types, incidence)

    def separated_classification(self) -> Classification:
        types = self.type_names()
        rows = list(itertools.product((0, 1), repeat=len(types)))
        count = self.rng.randint(0, min(self.max_instances, len(rows)))
        chosen = self.rng.sample(rows, count)
        instances = [f"a{i}" for i in range(count)]
        incidence = [
            (a, t) for a, bits in zip(instances, chosen) for t, bit in zip(types, bits) if bit
        ]
        return Classification(instances, types, incidence)

    def non_separated_classification(self) -> Classification:
        while True:
            base = self.classification()
            if len(base.instances) >= 2:
                break
        first, second = base.instances[0], base.instances[1]
        merged = [(a, t) for a, t in base.incidence if a != second]
        merged.extend((second, t) for t in base.row(first))
        return Classification(base.instances, base.types, merged)

    # -- logics ---------------------------------------------------------------

    def _satisfying_rows(self, theory: Theory) -> list[frozenset[str]]:
        rows = []
        for bits in itertools.product((0, 1), repeat=len(theory.types)):
            positives = {t for t, bit in zip(theory.types, bits) if bit}
            if all(satisfies(positives, c.antecedent, c.succedent) for c in theory.constraints):
                rows.append(frozenset(positives))
        return rows

    def sound_logic(self, theory: Theory | None = None) -> SoundLogic:
        if theory is None:
            theory = self.theory()
        rows = self._satisfying_rows(theory)
        count = self.rng.randint(0, self.max_instances) if rows else 0
        instances = [f"a{i}" for i in range(count)]
        incidence = []
        for a in instances:
            row = self.rng.choice(rows)
            incidence.extend((a, t) for t in row)
        return SoundLogic(Classification(instances, theory.types, incidence), theory)

    def infomorphism_from(self, source: Classification) -> Infomorphism:
        """A valid morphism out of ``source``: injective fresh type images
        plus extras, instance rows pulled back through chosen preimages."""
        type_map = {t: f"b.{t}" for t in source.types}
        extra_types = [f"x{i}" for i in range(self.rng.randint(0, 2))]
        target_types = list(type_map.values()) + extra_types
        count = self.rng.randint(0, self.max_instances) if source.instances else 0
        instances = [f"b{i}" for i in range(count)]
        inst_map = {}
        incidence = []
        for b in instances:
            back = self.rng.choice(source.instances)
            inst_map[b] = back
            incidence.extend((b, type_map[t]) for t in source.row(back))
            incidence.extend((b, t) for t in extra_types if self.rng.random() < 0.5)
        target = Classification(instances, target_types, incidence)
        return Infomorphism(source, target, type_map, inst_map)

    def valid_invariant(self, c: Classification) -> DualInvariant:
        """Kept instances plus type pairs with identical columns on them."""
        kept = self._subset(list(c.instances), 0.7)
        columns: dict[frozenset[str], list[str]] = {}
        for t in c.types:
            column = frozenset(a for a in kept if c.classifies(a, t))
            columns.setdefault(column, []).append(t)
        pairs = []
        for group in columns.values():
            for left, right in zip(group, group[1:]):
                if self.rng.random() < 0.6:
                    pairs.append((left, right))
        return DualInvariant(kept, pairs)

    # -- linked systems -------------------------------------------------------

    def linked_logic(
        self, common: Theory, prefix: str, extra_types: int = 2, extra_constraints: int = 2
    ) -> tuple[SoundLogic, Interpretation]:
        """A sound logic with a constraint-preserving link from ``common``.

        The participant inherits the images of all common constraints, so
        the link is an interpretation by construction; extra constraints
        are only added when every chosen instance row satisfies them.
        """
        own = [f"{prefix}{i}" for i in range(self.rng.randint(1, extra_types + 1))]
        link_map = {t: self.rng.choice(own) for t in common.types}
        inherited = [
            Sequent((link_map[t] for t in c.antecedent), (link_map[t] for t in c.succedent))
            for c in common.constraints
        ]
        theory = Theory(own, inherited)
        logic = self.sound_logic(theory)
        for _ in range(self.rng.randint(0, extra_constraints)):
            candidate = self.sequent(own)
            rows = [logic.classification.row(a) for a in logic.instances]
            if all(satisfies(set(r), candidate.antecedent, candidate.succedent) for r in rows):
                theory = Theory(own, list(theory.constraints) + [candidate])
                logic = SoundLogic(logic.classification, theory)
        return logic, Interpretation(common, logic.theory, link_map)

    def sharing_spec(self, participants: int = 2, with_synonymy: bool = True) -> SharingSpec:
        common = self.theory([f"c{i}" for i in range(self.rng.randint(1, 3))], 2)
        parts = []
        for k in range(participants):
            logic, link = self.linked_logic(common, prefix=f"p{k}_")
            synonymy: list[tuple[str, str]] = []
            if with_synonymy:
                candidate = self.valid_invariant(logic.classification)
                everywhere = DualInvariant(logic.instances, candidate.type_relation)
                if not check_cls_invariant(logic.classification, everywhere):
                    synonymy = sorted(candidate.type_relation)
            parts.append(Participant(f"c{k}", logic, synonymy, link))
        return SharingSpec(common, tuple(parts))

    def coproduct_diagram(self) -> dict:
        """Sum of two sound logics with a cone it must mediate for."""
        l0 = self.sound_logic()
        l1 = self.sound_logic()
        total, inj0, inj1 = sum_logic(l0, l1)
        invariant = self.valid_invariant(total.classification)
        target, canonical = quotient_logic(total, invariant)
        return {
            "l0": l0,
            "l1": l1,
            "sum": total,
            "inj0": inj0,
            "inj1": inj1,
            "target": target,
            "leg0": compose_logic_morphisms(inj0, canonical),
            "leg1": compose_logic_morphisms(inj1, canonical),
        }

    def pushout_diagram(self) -> dict:
        """A center with two transposed legs, plus a cocone over its fusion."""
        common = self.theory([f"c{i}" for i in range(self.rng.randint(1, 2))], 2)
        l0, g0 = self.linked_logic(common, "p0_", extra_types=1, extra_constraints=1)
        l1, g1 = self.linked_logic(common, "p1_", extra_types=1, extra_constraints=1)
        center = log_of_theory(common)
        m0 = transpose(g0, l0)
        m1 = transpose(g1, l1)
        fused = fusion(center, m0, m1)
        invariant = self.valid_invariant(fused.logic.classification)
        target, canonical = quotient_logic(fused.logic, invariant)
        return {
            "center": center,
            "m0": m0,
            "m1": m1,
            "fused": fused,
            "target": target,
            "n0": compose_logic_morphisms(fused.e0, canonical),
            "n1": compose_logic_morphisms(fused.e1, canonical),
        }

    # -- documents ------------------------------------------------------------

    def document(self) -> ifo.Document:
        """A random structurally well-formed document."""
        decls = []
        classifications = []
        theories = []
        for k in range(self.rng.randint(1, 3)):
            c = self.classification()
            classifications.append((f"C{k}", c))
            decls.append(ifo.classification_decl(f"C{k}", c))
        for k in range(self.rng.randint(1, 3)):
            t = self.theory()
            theories.append((f"T{k}", t))
            decls.append(ifo.theory_decl(f"T{k}", t))
        logic_count = 0
        for cname, c in classifications:
            for tname, t in theories:
                if tuple(c.types) == tuple(t.types) and self.rng.random() < 0.5:
                    normal = None
                    if self.rng.random() < 0.5:
                        normal = tuple(sorted(self._subset(list(c.instances), 0.5)))
                    decls.append(ifo.logic_decl(f"L{logic_count}", cname, tname, normal))
                    logic_count += 1
        for k, ((sname, s), (tname, t)) in enumerate(itertools.product(theories, theories)):
            if t.types and self.rng.random() < 0.3:
                mapping = {x: self.rng.choice(list(t.types)) for x in s.types}
                decls.append(ifo.interpretation_decl(f"G{k}", sname, tname, mapping))
        return ifo.Document(tuple(decls))

    def noisy_source(self, document: ifo.Document) -> str:
        """Render a document with insignificant noise: shuffled lists, split
        rows, duplicate sequents, comments, and random line endings."""
        rng = self.rng

        def shuffled(items):
            out = list(items)
            rng.shuffle(out)
            return out

        def idlist(items):
            items = shuffled(items)
            return ", ".join(items) if items else "none"

        lines = []
        for decl in document.declarations:
            if rng.random() < 0.3:
                lines.append("# noise")
            if isinstance(decl, ifo.ClassificationDecl):
                lines.append(f"classification {decl.name} {{")
                lines.append(f"  instances : {idlist(decl.instances)} ;")
                lines.append(f"  types:{idlist(decl.types)};")
                if decl.rows or rng.random() < 0.3:
                    lines.append("  table:")
                    for inst, row in shuffled(decl.rows):
                        chunks = [list(row)]
                        if len(row) > 1 and rng.random() < 0.5:
                            cut = rng.randint(1, len(row) - 1)
                            chunks = [list(row[:cut]), list(row[cut:])]
                        for chunk in chunks:
                            lines.append(f"    {inst} |= {idlist(chunk)};")
                    if decl.instances and rng.random() < 0.3:
                        lines.append(f"    {rng.choice(decl.instances)} |= none;")
                lines.append("}")
            elif isinstance(decl, ifo.TheoryDecl):
                lines.append(f"theory {decl.name} {{")
                lines.append(f"  types: {idlist(decl.types)};")
                if decl.sequents:
                    lines.append("  constraints:")
                    sequents = shuffled(decl.sequents)
                    if rng.random() < 0.4:
                        sequents.append(rng.choice(sequents))
                    for antecedent, succedent in sequents:
                        left = idlist(antecedent) if antecedent else ("none" if rng.random() < 0.4 else "")
                        right = idlist(succedent) if succedent else ("none" if rng.random() < 0.4 else "")
                        lines.append(f"    {left} |- {right};")
                lines.append("}")
            elif isinstance(decl, ifo.LogicDecl):
                lines.append(f"logic {decl.name} {{ classification: {decl.classification};")
                lines.append(f"  theory: {decl.theory};")
                if decl.normal is not None:
                    lines.append(f"  normal: {idlist(decl.normal)};")
                lines.append("}")
            elif isinstance(decl, ifo.InterpretationDecl):
                lines.append(f"interpretation {decl.name}: {decl.source} -> {decl.target} {{")
                for frm, to in shuffled(decl.mappings):
                    lines.append(f"  {frm}=>{to};")
                lines.append("}")
            elif isinstance(decl, ifo.SharingDecl):
                lines.append(f"sharing {decl.name} {{")
                lines.append(f"  common: {decl.common};")
                for p in decl.participants:
                    clause = f"  participant: {p.logic} via {p.via}"
                    if p.synonymy:
                        pairs = " ".join(
                            f"{b} ~ {a};" if rng.random() < 0.5 else f"{a} ~ {b};"
                            for a, b in shuffled(p.synonymy)
                        )
                        clause += f" synonymy {{ {pairs} }}"
                    lines.append(clause + ";")
                lines.append("}")
            if rng.random() < 0.3:
                lines.append("")
        ending = "\r\n" if rng.random() < 0.3 else "\n"
        return ending.join(lines) + ending
