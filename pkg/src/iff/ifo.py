"""Parser, serializer, and resolver for the `.ifo` declaration format.

Grammar (whitespace and ``#`` line comments are insignificant; input may
use LF or CRLF, output is LF)::

    file        := decl*
    decl        := classification | theory | logic | interp | sharing
    classification := "classification" NAME "{" "instances" ":" idlist ";"
                        "types" ":" idlist ";" ("table" ":" row*)? "}"
    row         := IDENT "|=" idlist ";"
    theory      := "theory" NAME "{" "types" ":" idlist ";"
                        ("constraints" ":" sequent*)? "}"
    sequent     := idlist? "|-" idlist? ";"
    logic       := "logic" NAME "{" "classification" ":" NAME ";"
                        "theory" ":" NAME ";" ("normal" ":" idlist ";")? "}"
    interp      := "interpretation" NAME ":" NAME "->" NAME "{" (NAME "=>" NAME ";")* "}"
    sharing     := "sharing" NAME "{" "common" ":" NAME ";" participant participant+ "}"
    participant := "participant" ":" NAME "via" NAME
                        ("synonymy" "{" (NAME "~" NAME ";")* "}")? ";"
    idlist      := "none" | IDENT ("," IDENT)*
    IDENT       := NAME | "(" IDENT "," IDENT ")"
    NAME        := [A-Za-z_][A-Za-z0-9_.]*

Parenthesized identifiers name the pair instances of sum and fusion
classifications, so every emitted document re-parses.  Empty identifier
lists are written ``none``; empty sequent sides are written by omission
(``|- alpha;`` and ``alpha |-;``).

Serialization is canonical: declarations keep their order, identifier
lists are sorted, incidence rows are sorted by instance, sequents by
antecedent then succedent, and serializing is byte-idempotent.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .classification import Classification
from .errors import (
    ParseError,
    ResolutionError,
    SourcePosition,
    UnknownIdentifierError,
    ValidationError,
)
from .logic import LocalLogic, SoundLogic, SoundnessReport, soundness_report
from .sharing import Participant, SharingSpec
from .theory import Interpretation, Sequent, Theory

__all__ = [
    "Document",
    "ClassificationDecl",
    "TheoryDecl",
    "LogicDecl",
    "InterpretationDecl",
    "SharingDecl",
    "ParticipantDecl",
    "ResolvedGraph",
    "ResolvedLogic",
    "ResolvedSharing",
    "parse",
    "serialize",
    "resolve",
    "classification_decl",
    "theory_decl",
    "logic_decl",
    "interpretation_decl",
]


# -- declarations -------------------------------------------------------------


@dataclass(frozen=True)
class ClassificationDecl:
    name: str
    instances: tuple[str, ...]
    types: tuple[str, ...]
    rows: tuple[tuple[str, tuple[str, ...]], ...]
    position: SourcePosition = field(default=SourcePosition(0, 0), compare=False)

    kind = "classification"


@dataclass(frozen=True)
class TheoryDecl:
    name: str
    types: tuple[str, ...]
    sequents: tuple[tuple[tuple[str, ...], tuple[str, ...]], ...]
    position: SourcePosition = field(default=SourcePosition(0, 0), compare=False)

    kind = "theory"


@dataclass(frozen=True)
class LogicDecl:
    name: str
    classification: str
    theory: str
    normal: tuple[str, ...] | None
    position: SourcePosition = field(default=SourcePosition(0, 0), compare=False)

    kind = "logic"


@dataclass(frozen=True)
class InterpretationDecl:
    name: str
    source: str
    target: str
    mappings: tuple[tuple[str, str], ...]
    position: SourcePosition = field(default=SourcePosition(0, 0), compare=False)

    kind = "interpretation"


@dataclass(frozen=True)
class ParticipantDecl:
    logic: str
    via: str
    synonymy: tuple[tuple[str, str], ...]
    position: SourcePosition = field(default=SourcePosition(0, 0), compare=False)


@dataclass(frozen=True)
class SharingDecl:
    name: str
    common: str
    participants: tuple[ParticipantDecl, ...]
    position: SourcePosition = field(default=SourcePosition(0, 0), compare=False)

    kind = "sharing"


Decl = ClassificationDecl | TheoryDecl | LogicDecl | InterpretationDecl | SharingDecl


@dataclass(frozen=True)
class Document:
    declarations: tuple[Decl, ...]


# -- tokenizer ----------------------------------------------------------------

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.]*")
_SYMBOLS = ("|=", "|-", "->", "=>", "{", "}", "(", ")", ":", ";", ",", "~")


@dataclass(frozen=True)
class _Token:
    text: str
    kind: str  # "name", "symbol", "eof"
    position: SourcePosition


def _tokenize(text: str) -> list[_Token]:
    text = text.replace("\r\n", "\n")
    tokens = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        pos = SourcePosition(line, col)
        two = text[i : i + 2]
        if two in _SYMBOLS:
            tokens.append(_Token(two, "symbol", pos))
            i += 2
            col += 2
            continue
        if ch in _SYMBOLS:
            tokens.append(_Token(ch, "symbol", pos))
            i += 1
            col += 1
            continue
        m = _NAME_RE.match(text, i)
        if m:
            tokens.append(_Token(m.group(), "name", pos))
            col += m.end() - i
            i = m.end()
            continue
        raise ParseError(pos, "identifier or punctuation", f"unexpected character {ch!r}")
    tokens.append(_Token("", "eof", SourcePosition(line, col)))
    return tokens


# -- parser -------------------------------------------------------------------


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.at = 0

    def peek(self) -> _Token:
        return self.tokens[self.at]

    def next(self) -> _Token:
        token = self.tokens[self.at]
        self.at += 1
        return token

    def fail(self, expected: str) -> ParseError:
        token = self.peek()
        found = token.text or "end of input"
        return ParseError(token.position, expected, f"found {found!r}")

    def expect(self, text: str) -> _Token:
        token = self.peek()
        if token.text != text or token.kind == "eof":
            raise self.fail(repr(text))
        return self.next()

    def expect_name(self, what: str = "identifier") -> _Token:
        token = self.peek()
        if token.kind != "name":
            raise self.fail(what)
        return self.next()

    def ident(self) -> str:
        token = self.peek()
        if token.text == "(":
            self.next()
            left = self.ident()
            self.expect(",")
            right = self.ident()
            self.expect(")")
            return f"({left},{right})"
        if token.kind == "name":
            return self.next().text
        raise self.fail("identifier")

    def idlist(self) -> tuple[str, ...]:
        if self.peek().text == "none":
            self.next()
            return ()
        items = [self.ident()]
        while self.peek().text == ",":
            self.next()
            items.append(self.ident())
        return tuple(items)

    def document(self) -> Document:
        decls = []
        while self.peek().kind != "eof":
            decls.append(self.declaration())
        return Document(tuple(decls))

    def declaration(self) -> Decl:
        token = self.peek()
        handlers = {
            "classification": self.classification,
            "theory": self.theory,
            "logic": self.logic,
            "interpretation": self.interpretation,
            "sharing": self.sharing,
        }
        handler = handlers.get(token.text)
        if handler is None or token.kind != "name":
            raise self.fail("a declaration keyword")
        return handler()

    def classification(self) -> ClassificationDecl:
        pos = self.next().position
        name = self.expect_name("classification name").text
        self.expect("{")
        self.expect("instances")
        self.expect(":")
        instances = self.idlist()
        self.expect(";")
        self.expect("types")
        self.expect(":")
        types = self.idlist()
        self.expect(";")
        rows = []
        if self.peek().text == "table":
            self.next()
            self.expect(":")
            while self.peek().text != "}":
                inst = self.ident()
                self.expect("|=")
                row_types = self.idlist()
                self.expect(";")
                rows.append((inst, row_types))
        self.expect("}")
        merged: dict[str, set[str]] = {}
        for inst, row_types in rows:
            merged.setdefault(inst, set()).update(row_types)
        canonical_rows = tuple(
            (inst, tuple(sorted(merged[inst]))) for inst in sorted(merged) if merged[inst]
        )
        return ClassificationDecl(
            name, tuple(sorted(set(instances))), tuple(sorted(set(types))), canonical_rows, pos
        )

    def theory(self) -> TheoryDecl:
        pos = self.next().position
        name = self.expect_name("theory name").text
        self.expect("{")
        self.expect("types")
        self.expect(":")
        types = self.idlist()
        self.expect(";")
        sequents = []
        if self.peek().text == "constraints":
            self.next()
            self.expect(":")
            while self.peek().text != "}":
                antecedent = () if self.peek().text == "|-" else self.idlist()
                self.expect("|-")
                succedent = () if self.peek().text == ";" else self.idlist()
                self.expect(";")
                sequents.append((antecedent, succedent))
        self.expect("}")
        canonical = tuple(
            sorted({(tuple(sorted(set(a))), tuple(sorted(set(s)))) for a, s in sequents})
        )
        return TheoryDecl(name, tuple(sorted(set(types))), canonical, pos)

    def logic(self) -> LogicDecl:
        pos = self.next().position
        name = self.expect_name("logic name").text
        self.expect("{")
        self.expect("classification")
        self.expect(":")
        classification = self.expect_name("classification reference").text
        self.expect(";")
        self.expect("theory")
        self.expect(":")
        theory = self.expect_name("theory reference").text
        self.expect(";")
        normal = None
        if self.peek().text == "normal":
            self.next()
            self.expect(":")
            normal = self.idlist()
            self.expect(";")
        self.expect("}")
        if normal is not None:
            normal = tuple(sorted(set(normal)))
        return LogicDecl(name, classification, theory, normal, pos)

    def interpretation(self) -> InterpretationDecl:
        pos = self.next().position
        name = self.expect_name("interpretation name").text
        self.expect(":")
        source = self.expect_name("source theory").text
        self.expect("->")
        target = self.expect_name("target theory").text
        self.expect("{")
        mappings = []
        while self.peek().text != "}":
            frm = self.expect_name("source type").text
            self.expect("=>")
            to = self.expect_name("target type").text
            self.expect(";")
            mappings.append((frm, to))
        self.expect("}")
        return InterpretationDecl(name, source, target, tuple(sorted(set(mappings))), pos)

    def sharing(self) -> SharingDecl:
        pos = self.next().position
        name = self.expect_name("sharing name").text
        self.expect("{")
        self.expect("common")
        self.expect(":")
        common = self.expect_name("common theory").text
        self.expect(";")
        participants = []
        while self.peek().text == "participant":
            participants.append(self.participant())
        if len(participants) < 2:
            raise self.fail("at least two participant clauses")
        self.expect("}")
        return SharingDecl(name, common, tuple(participants), pos)

    def participant(self) -> ParticipantDecl:
        pos = self.expect("participant").position
        self.expect(":")
        logic = self.expect_name("participant logic").text
        self.expect("via")
        via = self.expect_name("link interpretation").text
        synonymy = []
        if self.peek().text == "synonymy":
            self.next()
            self.expect("{")
            while self.peek().text != "}":
                left = self.expect_name("synonym").text
                self.expect("~")
                right = self.expect_name("synonym").text
                self.expect(";")
                synonymy.append((left, right))
            self.expect("}")
        self.expect(";")
        pairs = tuple(sorted({(min(a, b), max(a, b)) for a, b in synonymy}))
        return ParticipantDecl(logic, via, pairs, pos)


def parse(text: str) -> Document:
    """Parse a document; the first syntax error wins."""
    return _Parser(_tokenize(text)).document()


# -- serializer ---------------------------------------------------------------


def _render_idlist(items: Iterable[str]) -> str:
    ordered = sorted(items)
    return ", ".join(ordered) if ordered else "none"


def _render_sequent(antecedent: Iterable[str], succedent: Iterable[str]) -> str:
    ant = ", ".join(sorted(antecedent))
    suc = ", ".join(sorted(succedent))
    left = f"{ant} |-" if ant else "|-"
    return f"{left} {suc};" if suc else f"{left};"


def serialize(document: Document) -> str:
    """Canonical text for a document; idempotent on its own output."""
    chunks = []
    for decl in document.declarations:
        if isinstance(decl, ClassificationDecl):
            lines = [
                f"classification {decl.name} {{",
                f"  instances: {_render_idlist(decl.instances)};",
                f"  types: {_render_idlist(decl.types)};",
            ]
            incidence: dict[str, set[str]] = {}
            for inst, row_types in decl.rows:
                incidence.setdefault(inst, set()).update(row_types)
            filled = {inst: row for inst, row in incidence.items() if row}
            if filled:
                lines.append("  table:")
                for inst in sorted(filled):
                    lines.append(f"    {inst} |= {_render_idlist(filled[inst])};")
            lines.append("}")
            chunks.append("\n".join(lines))
        elif isinstance(decl, TheoryDecl):
            lines = [
                f"theory {decl.name} {{",
                f"  types: {_render_idlist(decl.types)};",
            ]
            unique = sorted(
                {(tuple(sorted(set(a))), tuple(sorted(set(s)))) for a, s in decl.sequents}
            )
            if unique:
                lines.append("  constraints:")
                for antecedent, succedent in unique:
                    lines.append(f"    {_render_sequent(antecedent, succedent)}")
            lines.append("}")
            chunks.append("\n".join(lines))
        elif isinstance(decl, LogicDecl):
            lines = [
                f"logic {decl.name} {{",
                f"  classification: {decl.classification};",
                f"  theory: {decl.theory};",
            ]
            if decl.normal is not None:
                lines.append(f"  normal: {_render_idlist(decl.normal)};")
            lines.append("}")
            chunks.append("\n".join(lines))
        elif isinstance(decl, InterpretationDecl):
            lines = [f"interpretation {decl.name} : {decl.source} -> {decl.target} {{"]
            for frm, to in sorted(decl.mappings):
                lines.append(f"  {frm} => {to};")
            lines.append("}")
            chunks.append("\n".join(lines))
        elif isinstance(decl, SharingDecl):
            lines = [
                f"sharing {decl.name} {{",
                f"  common: {decl.common};",
            ]
            for p in decl.participants:
                clause = f"  participant: {p.logic} via {p.via}"
                if p.synonymy:
                    pairs = sorted((min(a, b), max(a, b)) for a, b in p.synonymy)
                    inner = " ".join(f"{a} ~ {b};" for a, b in sorted(set(pairs)))
                    clause += f" synonymy {{ {inner} }}"
                lines.append(clause + ";")
            lines.append("}")
            chunks.append("\n".join(lines))
        else:
            raise ValidationError(f"cannot serialize {type(decl).__name__}")
    return "\n\n".join(chunks) + ("\n" if chunks else "")


# -- decl builders from core objects -------------------------------------------


def classification_decl(name: str, c: Classification) -> ClassificationDecl:
    rows = tuple(
        (inst, tuple(sorted(c.row(inst)))) for inst in c.instances if c.row(inst)
    )
    return ClassificationDecl(name, c.instances, c.types, rows)


def theory_decl(name: str, t: Theory) -> TheoryDecl:
    sequents = tuple(
        (tuple(sorted(s.antecedent)), tuple(sorted(s.succedent)))
        for s in t.sorted_constraints()
    )
    return TheoryDecl(name, t.types, sequents)


def logic_decl(
    name: str, classification: str, theory: str, normal: tuple[str, ...] | None = None
) -> LogicDecl:
    return LogicDecl(name, classification, theory, normal)


def interpretation_decl(
    name: str, source: str, target: str, type_map: Mapping[str, str]
) -> InterpretationDecl:
    return InterpretationDecl(name, source, target, tuple(sorted(type_map.items())))


# -- resolver -----------------------------------------------------------------


@dataclass(frozen=True)
class ResolvedLogic:
    """A logic declaration bound to its parts, soundness not yet enforced."""

    name: str
    classification: Classification
    theory: Theory
    normal: tuple[str, ...] | None
    position: SourcePosition
    classification_name: str = ""
    theory_name: str = ""

    def report(self) -> SoundnessReport:
        return soundness_report(self.classification, self.theory)

    def well_formed(self) -> bool:
        """Sound when claimed sound; honest normal list when local."""
        report = self.report()
        if self.normal is None:
            return report.all_normal
        return set(self.normal) <= set(report.normal)

    def as_participant_logic(self) -> SoundLogic | LocalLogic:
        if self.normal is not None:
            return LocalLogic(self.classification, self.theory, self.normal)
        report = self.report()
        if report.all_normal:
            return SoundLogic(self.classification, self.theory)
        return LocalLogic(self.classification, self.theory, report.normal)


@dataclass(frozen=True)
class ResolvedParticipant:
    name: str
    logic: ResolvedLogic
    synonymy: tuple[tuple[str, str], ...]
    link: Interpretation


@dataclass(frozen=True)
class ResolvedSharing:
    name: str
    common: Theory
    participants: tuple[ResolvedParticipant, ...]
    position: SourcePosition

    def to_spec(self, allow_sound_part: bool = False) -> SharingSpec:
        return SharingSpec(
            self.common,
            tuple(
                Participant(p.name, p.logic.as_participant_logic(), p.synonymy, p.link)
                for p in self.participants
            ),
            allow_sound_part=allow_sound_part,
        )


@dataclass(frozen=True)
class ResolvedGraph:
    classifications: dict[str, Classification]
    theories: dict[str, Theory]
    logics: dict[str, ResolvedLogic]
    interpretations: dict[str, Interpretation]
    interpretation_decls: dict[str, InterpretationDecl]
    sharings: dict[str, ResolvedSharing]
    order: tuple[tuple[str, str], ...]  # (kind, name) in declaration order


def resolve(document: Document, imports: Iterable[Document] = ()) -> ResolvedGraph:
    """Bind every declaration, checking references, totality, and type fit."""
    graph = ResolvedGraph({}, {}, {}, {}, {}, {}, ())
    order: list[tuple[str, str]] = []
    for doc in [*imports, document]:
        for decl in doc.declarations:
            _resolve_decl(decl, graph)
            order.append((decl.kind, decl.name))
    object.__setattr__(graph, "order", tuple(order))
    return graph


def _declare(table: dict, decl, what: str) -> None:
    if decl.name in table:
        raise ResolutionError(f"duplicate {what} name {decl.name!r}", decl.position)


def _resolve_decl(decl: Decl, graph: ResolvedGraph) -> None:
    if isinstance(decl, ClassificationDecl):
        _declare(graph.classifications, decl, "classification")
        incidence = [(inst, t) for inst, row in decl.rows for t in row]
        try:
            built = Classification(decl.instances, decl.types, incidence)
        except (UnknownIdentifierError, ValidationError) as err:
            raise ResolutionError(str(err), decl.position) from err
        graph.classifications[decl.name] = built
    elif isinstance(decl, TheoryDecl):
        _declare(graph.theories, decl, "theory")
        try:
            built = Theory(decl.types, (Sequent(a, s) for a, s in decl.sequents))
        except (UnknownIdentifierError, ValidationError) as err:
            raise ResolutionError(str(err), decl.position) from err
        graph.theories[decl.name] = built
    elif isinstance(decl, LogicDecl):
        _declare(graph.logics, decl, "logic")
        if decl.classification not in graph.classifications:
            raise ResolutionError(
                f"logic {decl.name!r} references unknown classification {decl.classification!r}",
                decl.position,
            )
        if decl.theory not in graph.theories:
            raise ResolutionError(
                f"logic {decl.name!r} references unknown theory {decl.theory!r}", decl.position
            )
        c = graph.classifications[decl.classification]
        t = graph.theories[decl.theory]
        if tuple(c.types) != tuple(t.types):
            diff = sorted(set(c.types) ^ set(t.types))
            raise ResolutionError(
                f"logic {decl.name!r}: classification and theory type sets differ by {diff}",
                decl.position,
            )
        if decl.normal is not None:
            undeclared = sorted(set(decl.normal) - set(c.instances))
            if undeclared:
                raise ResolutionError(
                    f"logic {decl.name!r}: normal instances not declared: {undeclared}",
                    decl.position,
                )
        graph.logics[decl.name] = ResolvedLogic(
            decl.name, c, t, decl.normal, decl.position, decl.classification, decl.theory
        )
    elif isinstance(decl, InterpretationDecl):
        _declare(graph.interpretations, decl, "interpretation")
        for ref in (decl.source, decl.target):
            if ref not in graph.theories:
                raise ResolutionError(
                    f"interpretation {decl.name!r} references unknown theory {ref!r}",
                    decl.position,
                )
        source = graph.theories[decl.source]
        target = graph.theories[decl.target]
        mapping = dict(decl.mappings)
        if len(mapping) != len(decl.mappings):
            dupes = sorted({f for f, _ in decl.mappings if sum(1 for g, _ in decl.mappings if g == f) > 1})
            raise ResolutionError(
                f"interpretation {decl.name!r}: conflicting mappings for {dupes}", decl.position
            )
        missing = [t for t in source.types if t not in mapping]
        if missing:
            raise ResolutionError(
                f"interpretation {decl.name!r}: non-total map, missing {missing}", decl.position
            )
        unknown_from = [t for t, _ in decl.mappings if t not in set(source.types)]
        unknown_to = [to for _, to in decl.mappings if to not in set(target.types)]
        if unknown_from or unknown_to:
            raise ResolutionError(
                f"interpretation {decl.name!r}: unknown types {unknown_from + unknown_to}",
                decl.position,
            )
        graph.interpretations[decl.name] = Interpretation(source, target, mapping)
        graph.interpretation_decls[decl.name] = decl
    elif isinstance(decl, SharingDecl):
        _declare(graph.sharings, decl, "sharing")
        if decl.common not in graph.theories:
            raise ResolutionError(
                f"sharing {decl.name!r} references unknown theory {decl.common!r}", decl.position
            )
        common = graph.theories[decl.common]
        participants = []
        for p in decl.participants:
            if p.logic not in graph.logics:
                raise ResolutionError(
                    f"sharing {decl.name!r} references unknown logic {p.logic!r}", p.position
                )
            if p.via not in graph.interpretations:
                raise ResolutionError(
                    f"sharing {decl.name!r} references unknown interpretation {p.via!r}",
                    p.position,
                )
            logic = graph.logics[p.logic]
            link = graph.interpretations[p.via]
            if link.source != common:
                raise ResolutionError(
                    f"sharing {decl.name!r}: link {p.via!r} does not start at {decl.common!r}",
                    p.position,
                )
            if link.target != logic.theory:
                raise ResolutionError(
                    f"sharing {decl.name!r}: link {p.via!r} does not land in the theory "
                    f"of logic {p.logic!r}",
                    p.position,
                )
            universe = set(logic.theory.types)
            bad = [f"{a} ~ {b}" for a, b in p.synonymy if a not in universe or b not in universe]
            if bad:
                raise ResolutionError(
                    f"sharing {decl.name!r}: synonymy over unknown types: {bad}", p.position
                )
            participants.append(ResolvedParticipant(p.logic, logic, p.synonymy, link))
        graph.sharings[decl.name] = ResolvedSharing(
            decl.name, common, tuple(participants), decl.position
        )
    else:
        raise ResolutionError(f"unknown declaration kind {type(decl).__name__}")
