"""Command-line driver.

Subcommands: validate, entails, close, instances, sum, quotient, log,
check, share, project.  Inputs are ``.ifo`` files sharing one namespace
in argument order.  Data goes to standard output (or ``-o``),
diagnostics to standard error.  Exit codes: 0 success, 1 semantic or
validation failure, 2 parse or resolution error, 3 cap exceeded,
4 usage error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import ifo
from .classification import DualInvariant, quotient_classification, sum_classification
from .errors import (
    CapExceededError,
    IffError,
    ParseError,
    ResolutionError,
    SoundnessError,
    SynonymyConflictError,
    UnknownIdentifierError,
    ValidationError,
)
from .logic import log_of_classification, log_of_theory, quotient_logic, sum_logic
from .sharing import SharingResult, project, run_sharing
from .theory import (
    Sequent,
    check_interpretation,
    cla_of_theory,
    counterexample,
    quotient_theory,
    regular_closure,
    sum_theory,
)

EXIT_OK = 0
EXIT_SEMANTIC = 1
EXIT_PARSE = 2
EXIT_CAP = 3
EXIT_USAGE = 4


class _UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _positive(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _build_parser() -> _ArgumentParser:
    parser = _ArgumentParser(prog="iff", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", metavar="FILE", help="write data here instead of stdout")
    common.add_argument("--max-enum-types", type=_positive, default=16, metavar="N")
    common.add_argument("--max-closure-types", type=_positive, default=8, metavar="N")
    common.add_argument("--allow-sound-part", action="store_true")
    common.add_argument("--fold", action="store_true", help="enable n-ary sharing as a left fold")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check every declaration")
    p.add_argument("files", nargs="+")

    p = sub.add_parser("entails", parents=[common], help="decide a sequent against a theory")
    p.add_argument("theory")
    p.add_argument("sequent", help="e.g. 'alpha, beta |- gamma'")
    p.add_argument("files", nargs="+")

    p = sub.add_parser("close", parents=[common], help="materialize the regular closure")
    p.add_argument("theory")
    p.add_argument("files", nargs="+")

    p = sub.add_parser("instances", parents=[common], help="classification of formal instances")
    p.add_argument("theory")
    p.add_argument("files", nargs="+")

    p = sub.add_parser("sum", parents=[common], help="binary sum with injections")
    p.add_argument("kind", choices=["classification", "theory", "logic"])
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("files", nargs="+")

    p = sub.add_parser("quotient", parents=[common], help="dual quotient with canonical morphism")
    p.add_argument("kind", choices=["classification", "theory", "logic"])
    p.add_argument("name")
    p.add_argument("--keep", metavar="A,B", help="kept instances (default: all)")
    p.add_argument(
        "--pair", action="append", default=[], metavar="X~Y", help="related type pair (repeatable)"
    )
    p.add_argument("files", nargs="+")

    p = sub.add_parser("log", parents=[common], help="free logic over a classification or theory")
    p.add_argument("kind", choices=["classification", "theory"])
    p.add_argument("name")
    p.add_argument("files", nargs="+")

    p = sub.add_parser("check", parents=[common], help="detailed diagnostics for one declaration")
    p.add_argument("name")
    p.add_argument("files", nargs="+")

    p = sub.add_parser("share", parents=[common], help="run the two-step sharing pipeline")
    p.add_argument("sharing")
    p.add_argument("files", nargs="+")

    p = sub.add_parser("project", parents=[common], help="recover one participant from a sharing")
    p.add_argument("sharing")
    p.add_argument("index", type=int)
    p.add_argument("files", nargs="+")
    return parser


def _load(files: list[str]) -> ifo.ResolvedGraph:
    documents = []
    for name in files:
        try:
            text = Path(name).read_text(encoding="utf-8")
        except OSError as err:
            raise _UsageError(f"cannot read {name}: {err}") from err
        documents.append(ifo.parse(text))
    return ifo.resolve(documents[-1], documents[:-1])


def _emit(args, text: str) -> None:
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _lookup(table: dict, name: str, what: str):
    if name not in table:
        raise UnknownIdentifierError(name, what)
    return table[name]


def _parse_sequent_text(text: str, what: str = "sequent") -> tuple[tuple[str, ...], tuple[str, ...]]:
    wrapped = f"theory _q {{ types: none; constraints: {text.strip().rstrip(';')}; }}"
    try:
        doc = ifo.parse(wrapped)
    except ParseError as err:
        raise ValidationError(f"cannot parse {what} {text!r}: {err}") from err
    decl = doc.declarations[0]
    constraints = decl.sequents  # type: ignore[union-attr]
    if len(constraints) != 1:
        raise ValidationError(f"expected exactly one {what}, got {text!r}")
    return constraints[0]


# -- commands -------------------------------------------------------------------


def _cmd_validate(args) -> int:
    graph = _load(args.files)
    lines = []
    failed = False
    for kind, name in graph.order:
        if kind == "logic":
            logic = graph.logics[name]
            report = logic.report()
            bad = report.abnormal_instances()
            ok = logic.well_formed()
            status = "OK" if ok else "FAIL"
            detail = f"({len(bad)} abnormal" + (f": {', '.join(bad)})" if bad else ")")
            lines.append(f"{name} logic {status} {detail}")
            failed = failed or not ok
        elif kind == "interpretation":
            problems = check_interpretation(graph.interpretations[name])
            if problems:
                failed = True
                lines.append(f"{name} interpretation FAIL ({len(problems)} constraint violations)")
            else:
                lines.append(f"{name} interpretation OK")
        elif kind == "sharing":
            problem = _sharing_problem(graph.sharings[name], args.allow_sound_part)
            if problem:
                failed = True
                lines.append(f"{name} sharing FAIL ({problem})")
            else:
                lines.append(f"{name} sharing OK")
        else:
            lines.append(f"{name} {kind} OK")
    _emit(args, "".join(line + "\n" for line in lines))
    return EXIT_SEMANTIC if failed else EXIT_OK


def _sharing_problem(resolved: ifo.ResolvedSharing, allow_sound_part: bool) -> str | None:
    from .sharing import step1_lift

    try:
        step1_lift(resolved.to_spec(allow_sound_part))
    except (ValidationError, SoundnessError, SynonymyConflictError, CapExceededError) as err:
        return str(err)
    return None


def _cmd_entails(args) -> int:
    graph = _load(args.files)
    theory = _lookup(graph.theories, args.theory, "theory")
    antecedent, succedent = _parse_sequent_text(args.sequent)
    witness = counterexample(theory, Sequent(antecedent, succedent))
    if witness is None:
        _emit(args, "entailed\n")
    else:
        pos = ",".join(sorted(witness.positive))
        neg = ",".join(sorted(witness.negative))
        _emit(args, f"not entailed\nwitness: pos={{{pos}}} neg={{{neg}}}\n")
    return EXIT_OK


def _cmd_close(args) -> int:
    graph = _load(args.files)
    theory = _lookup(graph.theories, args.theory, "theory")
    closure = regular_closure(theory, cap=args.max_closure_types)
    doc = ifo.Document((ifo.theory_decl(f"{args.theory}.closure", closure),))
    _emit(args, ifo.serialize(doc))
    return EXIT_OK


def _cmd_instances(args) -> int:
    graph = _load(args.files)
    theory = _lookup(graph.theories, args.theory, "theory")
    built = cla_of_theory(theory, cap=args.max_enum_types)
    doc = ifo.Document((ifo.classification_decl(f"{args.theory}.cla", built),))
    _emit(args, ifo.serialize(doc))
    return EXIT_OK


def _comment_map(label: str, mapping: dict[str, str]) -> list[str]:
    pairs = ", ".join(f"{k} -> {v}" for k, v in sorted(mapping.items()))
    return [f"# {label}: {pairs if pairs else '(empty)'}"]


def _dedupe(decls: list) -> tuple:
    seen = set()
    kept = []
    for decl in decls:
        key = (decl.kind, decl.name)
        if key not in seen:
            seen.add(key)
            kept.append(decl)
    return tuple(kept)


def _cmd_sum(args) -> int:
    graph = _load(args.files)
    out = f"{args.left}.plus.{args.right}"
    decls: list = []
    comments: list[str] = []
    if args.kind == "classification":
        c0 = _lookup(graph.classifications, args.left, "classification")
        c1 = _lookup(graph.classifications, args.right, "classification")
        total, in0, in1 = sum_classification(c0, c1)
        decls.append(ifo.classification_decl(out, total))
        comments += _comment_map(f"injection 0 of {args.left}: types", in0.type_map)
        comments += _comment_map("injection 0: instances", in0.inst_map)
        comments += _comment_map(f"injection 1 of {args.right}: types", in1.type_map)
        comments += _comment_map("injection 1: instances", in1.inst_map)
    elif args.kind == "theory":
        t0 = _lookup(graph.theories, args.left, "theory")
        t1 = _lookup(graph.theories, args.right, "theory")
        total, in0, in1 = sum_theory(t0, t1)
        decls.append(ifo.theory_decl(args.left, t0))
        decls.append(ifo.theory_decl(args.right, t1))
        decls.append(ifo.theory_decl(out, total))
        decls.append(ifo.interpretation_decl(f"{out}.in0", args.left, out, in0.type_map))
        decls.append(ifo.interpretation_decl(f"{out}.in1", args.right, out, in1.type_map))
    else:
        l0 = _resolved_sound_logic(graph, args.left)
        l1 = _resolved_sound_logic(graph, args.right)
        total, in0, in1 = sum_logic(l0, l1)
        decls.append(ifo.classification_decl(f"{out}.cla", total.classification))
        decls.append(ifo.theory_decl(f"{out}.th", total.theory))
        decls.append(ifo.logic_decl(out, f"{out}.cla", f"{out}.th"))
        left_th = graph.logics[args.left].theory_name
        right_th = graph.logics[args.right].theory_name
        decls.insert(0, ifo.theory_decl(left_th, l0.theory))
        decls.insert(1, ifo.theory_decl(right_th, l1.theory))
        decls.append(ifo.interpretation_decl(f"{out}.in0", left_th, f"{out}.th", in0.type_map))
        decls.append(ifo.interpretation_decl(f"{out}.in1", right_th, f"{out}.th", in1.type_map))
        comments += _comment_map("injection 0: instances", in0.inst_map)
        comments += _comment_map("injection 1: instances", in1.inst_map)
    text = ifo.serialize(ifo.Document(_dedupe(decls)))
    if comments:
        text += "\n" + "\n".join(comments) + "\n"
    _emit(args, text)
    return EXIT_OK


def _resolved_sound_logic(graph: ifo.ResolvedGraph, name: str):
    from .logic import SoundLogic

    logic = _lookup(graph.logics, name, "logic")
    built = logic.as_participant_logic()
    if not isinstance(built, SoundLogic):
        report = logic.report()
        raise SoundnessError(
            f"logic {name!r} is not sound; abnormal: {', '.join(report.abnormal_instances())}",
            report,
        )
    return built


def _quotient_inputs(args, instances) -> DualInvariant:
    kept = instances if args.keep is None else tuple(x for x in args.keep.split(",") if x)
    pairs = []
    for chunk in args.pair:
        left, sep, right = chunk.partition("~")
        if not sep or not left.strip() or not right.strip():
            raise _UsageError(f"--pair needs the form X~Y, got {chunk!r}")
        pairs.append((left.strip(), right.strip()))
    return DualInvariant(kept, pairs)


def _cmd_quotient(args) -> int:
    graph = _load(args.files)
    out = f"{args.name}.q"
    decls: list = []
    comments: list[str] = []
    if args.kind == "classification":
        c = _lookup(graph.classifications, args.name, "classification")
        invariant = _quotient_inputs(args, c.instances)
        quotient, canonical = quotient_classification(c, invariant)
        decls.append(ifo.classification_decl(out, quotient))
        comments += _comment_map("canonical: types", canonical.type_map)
        comments += _comment_map("canonical: instances", canonical.inst_map)
    elif args.kind == "theory":
        t = _lookup(graph.theories, args.name, "theory")
        invariant = _quotient_inputs(args, ())
        quotient, canonical = quotient_theory(t, invariant.type_relation)
        decls.append(ifo.theory_decl(args.name, t))
        decls.append(ifo.theory_decl(out, quotient))
        decls.append(ifo.interpretation_decl(f"{out}.map", args.name, out, canonical.type_map))
    else:
        logic = _resolved_sound_logic(graph, args.name)
        invariant = _quotient_inputs(args, logic.instances)
        quotient, canonical = quotient_logic(logic, invariant)
        th_name = graph.logics[args.name].theory_name
        decls.append(ifo.theory_decl(th_name, logic.theory))
        decls.append(ifo.classification_decl(f"{out}.cla", quotient.classification))
        decls.append(ifo.theory_decl(f"{out}.th", quotient.theory))
        decls.append(ifo.logic_decl(out, f"{out}.cla", f"{out}.th"))
        decls.append(
            ifo.interpretation_decl(f"{out}.map", th_name, f"{out}.th", canonical.type_map)
        )
        comments += _comment_map("canonical: instances", canonical.inst_map)
    text = ifo.serialize(ifo.Document(_dedupe(decls)))
    if comments:
        text += "\n" + "\n".join(comments) + "\n"
    _emit(args, text)
    return EXIT_OK


def _cmd_log(args) -> int:
    graph = _load(args.files)
    decls: list = []
    if args.kind == "classification":
        c = _lookup(graph.classifications, args.name, "classification")
        built = log_of_classification(c, cap=args.max_closure_types)
        decls.append(ifo.classification_decl(args.name, c))
        decls.append(ifo.theory_decl(f"{args.name}.th", built.theory))
        decls.append(ifo.logic_decl(f"{args.name}.log", args.name, f"{args.name}.th"))
    else:
        t = _lookup(graph.theories, args.name, "theory")
        built = log_of_theory(t, cap=args.max_enum_types)
        decls.append(ifo.classification_decl(f"{args.name}.cla", built.classification))
        decls.append(ifo.theory_decl(args.name, t))
        decls.append(ifo.logic_decl(f"{args.name}.log", f"{args.name}.cla", args.name))
    _emit(args, ifo.serialize(ifo.Document(tuple(decls))))
    return EXIT_OK


def _cmd_check(args) -> int:
    graph = _load(args.files)
    lines = []
    failed = False
    found = False
    if args.name in graph.classifications:
        found = True
        lines.append(f"classification {args.name}: OK")
    if args.name in graph.theories:
        found = True
        lines.append(f"theory {args.name}: OK")
    if args.name in graph.logics:
        found = True
        logic = graph.logics[args.name]
        report = logic.report()
        if logic.well_formed():
            lines.append(f"logic {args.name}: OK ({len(report.abnormal)} abnormal)")
        else:
            failed = True
            lines.append(f"logic {args.name}: FAIL")
            for instance, violated in report.abnormal:
                for s in violated:
                    lines.append(f"  abnormal: {instance} violates {s}")
    if args.name in graph.interpretations:
        found = True
        problems = check_interpretation(graph.interpretations[args.name])
        if problems:
            failed = True
            lines.append(f"interpretation {args.name}: FAIL")
            lines.extend(f"  {d}" for d in problems)
        else:
            lines.append(f"interpretation {args.name}: OK")
    if args.name in graph.sharings:
        found = True
        problem = _sharing_problem(graph.sharings[args.name], args.allow_sound_part)
        if problem:
            failed = True
            lines.append(f"sharing {args.name}: FAIL")
            lines.append(f"  {problem}")
        else:
            lines.append(f"sharing {args.name}: OK")
    if not found:
        raise UnknownIdentifierError(args.name, "check")
    _emit(args, "".join(line + "\n" for line in lines))
    return EXIT_SEMANTIC if failed else EXIT_OK


def _run_share(args) -> tuple[ifo.ResolvedGraph, SharingResult]:
    graph = _load(args.files)
    resolved = _lookup(graph.sharings, args.sharing, "sharing")
    spec = resolved.to_spec(allow_sound_part=args.allow_sound_part)
    if args.fold and len(spec.participants) > 2:
        print(
            f"notice: folding {len(spec.participants)} participants through binary fusion "
            "(extension beyond the binary construction)",
            file=sys.stderr,
        )
    result = run_sharing(spec, enum_cap=args.max_enum_types, allow_fold=args.fold)
    return graph, result


def _cmd_share(args) -> int:
    _, result = _run_share(args)
    name = args.sharing
    decls: list = [
        ifo.classification_decl(f"{name}.virtual.cla", result.virtual.classification),
        ifo.theory_decl(f"{name}.virtual.th", result.virtual.theory),
        ifo.logic_decl(f"{name}.virtual", f"{name}.virtual.cla", f"{name}.virtual.th"),
    ]
    for prepared, embedding in zip(result.lifted.participants, result.embeddings):
        base = f"{name}.{prepared.name}"
        decls.append(ifo.classification_decl(f"{base}.cla", prepared.logic.classification))
        decls.append(ifo.theory_decl(f"{base}.th", prepared.logic.theory))
        decls.append(ifo.logic_decl(base, f"{base}.cla", f"{base}.th"))
        decls.append(
            ifo.interpretation_decl(
                f"{base}.embed", f"{base}.th", f"{name}.virtual.th", embedding.type_map
            )
        )
    summary = _share_summary(name, result)
    _emit(args, ifo.serialize(ifo.Document(tuple(decls))) + "\n" + summary)
    return EXIT_OK


def _share_summary(name: str, result: SharingResult) -> str:
    merged = result.merged_type_classes()
    lines = [
        f"# sharing {name}: connections: {len(result.connections)}; merged classes: {len(merged)}"
    ]
    participant_names = [p.name for p in result.lifted.participants]
    for connection in result.connections:
        paired_up = " ".join(
            f"{p}={a}" for p, a in zip(participant_names, connection.instances)
        )
        pos = ",".join(sorted(connection.common.positive))
        lines.append(f"# connection {connection.name()}: {paired_up}; common: {{{pos}}}")
    for class_name, members in merged:
        lines.append(f"# merged class {class_name} = {{{', '.join(sorted(members))}}}")
    for prepared, embedding in zip(result.lifted.participants, result.embeddings):
        pairs = ", ".join(
            f"{v} -> {embedding.inst_map[v]}" for v in result.virtual.instances
        )
        lines.append(f"# embed {prepared.name}: {pairs if pairs else '(no instances)'}")
    for participant_name, report, discarded in result.soundness_reports:
        line = (
            f"# soundness {participant_name}: {len(report.normal)} normal, "
            f"{len(report.abnormal)} abnormal"
        )
        if discarded:
            line += f"; discarded: {', '.join(discarded)}"
        lines.append(line)
    return "".join(line + "\n" for line in lines)


def _cmd_project(args) -> int:
    _, result = _run_share(args)
    report = project(result, args.index)
    lines = [f"projection {args.sharing} participant {args.index} ({report.participant})"]
    for virtual_name, component in report.instance_projection:
        lines.append(f"instance {virtual_name} -> {component}")
    for class_name, members in report.type_members:
        lines.append(f"type {class_name} -> {{{', '.join(members)}}}")
    lines.append(f"embedding-consistent: {'yes' if report.embedding_consistent else 'no'}")
    _emit(args, "".join(line + "\n" for line in lines))
    return EXIT_OK


_COMMANDS = {
    "validate": _cmd_validate,
    "entails": _cmd_entails,
    "close": _cmd_close,
    "instances": _cmd_instances,
    "sum": _cmd_sum,
    "quotient": _cmd_quotient,
    "log": _cmd_log,
    "check": _cmd_check,
    "share": _cmd_share,
    "project": _cmd_project,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except _UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, ResolutionError) as err:
        print(str(err), file=sys.stderr)
        return EXIT_PARSE
    except CapExceededError as err:
        print(str(err), file=sys.stderr)
        return EXIT_CAP
    except IffError as err:
        print(str(err), file=sys.stderr)
        return EXIT_SEMANTIC


if __name__ == "__main__":
    sys.exit(main())
