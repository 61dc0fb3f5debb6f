"""Exhaustive-enumeration oracles.

Everything here recomputes from first principles: partitions are listed
one by one, candidate morphisms are enumerated as raw function pairs,
and the defining conditions are checked directly on the data.
"""
from __future__ import annotations

import itertools
from typing import Iterable, Iterator


def satisfies(positives: set[str], antecedent: Iterable[str], succedent: Iterable[str]) -> bool:
    return not (set(antecedent) <= positives and not (set(succedent) & positives))


def _formal_partitions(theory) -> Iterator[set[str]]:
    types = list(theory.types)
    for bits in itertools.product((0, 1), repeat=len(types)):
        positives = {t for t, bit in zip(types, bits) if bit}
        if all(satisfies(positives, c.antecedent, c.succedent) for c in theory.constraints):
            yield positives


def oracle_entails(theory, sequent) -> bool:
    """Full enumeration, no pruning: every partition satisfying all the
    constraints must satisfy the sequent."""
    return all(
        satisfies(p, sequent.antecedent, sequent.succedent) for p in _formal_partitions(theory)
    )


def all_functions(domain: Iterable[str], codomain: Iterable[str]) -> Iterator[dict[str, str]]:
    domain = list(domain)
    codomain = list(codomain)
    if not domain:
        yield {}
        return
    for images in itertools.product(codomain, repeat=len(domain)):
        yield dict(zip(domain, images))


def _fundamental_property(source, target, type_map, inst_map) -> bool:
    return all(
        ((inst_map[b], t) in source.incidence) == ((b, type_map[t]) in target.incidence)
        for b in target.instances
        for t in source.types
    )


def _preserves_constraints(source_theory, target_theory, type_map) -> bool:
    for c in source_theory.constraints:
        image_ant = [type_map[t] for t in c.antecedent]
        image_suc = [type_map[t] for t in c.succedent]
        ok = all(
            satisfies(p, image_ant, image_suc) for p in _formal_partitions(target_theory)
        )
        if not ok:
            return False
    return True


def _candidate_maps(source_cla, target_cla, type_filter, inst_filter):
    type_maps = [
        tm for tm in all_functions(source_cla.types, target_cla.types) if type_filter(tm)
    ]
    inst_maps = [
        im for im in all_functions(target_cla.instances, source_cla.instances) if inst_filter(im)
    ]
    for tm in type_maps:
        for im in inst_maps:
            yield tm, im


def oracle_universal(kind: str, **diagram) -> list[tuple[dict[str, str], dict[str, str]]]:
    """All (type_map, inst_map) pairs solving a universal-property diagram.

    kind "coproduct": diagram has sum/inj0/inj1 (classifications and the
    two injections) plus leg0/leg1 (the cone) and target; candidates run
    from the sum to the target and must commute with both injections.
    Pass theories (sum_theory, target_theory) to require constraint
    preservation as well.

    kind "pushout": diagram has fused/e0/e1 plus cocone legs n0/n1 and
    target (all logics); candidates run from the fusion to the target.

    kind "quotient": diagram has quotient/canonical plus the morphism to
    factor; candidates run from the quotient to the morphism's target.
    """
    if kind == "coproduct":
        source, target = diagram["sum"], diagram["target"]
        pieces = [
            (diagram["inj0"], diagram["leg0"]),
            (diagram["inj1"], diagram["leg1"]),
        ]

        def type_ok(tm):
            return all(
                tm[inj.type_map[t]] == leg.type_map[t]
                for inj, leg in pieces
                for t in inj.source.types
            )

        def inst_ok(im):
            return all(
                inj.inst_map[im[b]] == leg.inst_map[b]
                for inj, leg in pieces
                for b in target.instances
            )

        source_theory = diagram.get("sum_theory")
        target_theory = diagram.get("target_theory")
    elif kind == "pushout":
        fused = diagram["fused"]
        source, target = fused.logic.classification, diagram["target"].classification
        pieces = [(fused.e0, diagram["n0"]), (fused.e1, diagram["n1"])]

        def type_ok(tm):
            return all(
                tm[e.type_map[t]] == n.type_map[t]
                for e, n in pieces
                for t in e.source.types
            )

        def inst_ok(im):
            return all(
                e.inst_map[im[b]] == n.inst_map[b] for e, n in pieces for b in target.instances
            )

        source_theory = fused.logic.theory
        target_theory = diagram["target"].theory
    elif kind == "quotient":
        source, target = diagram["quotient"], diagram["morphism"].target
        canonical, morphism = diagram["canonical"], diagram["morphism"]

        def type_ok(tm):
            return all(
                tm[canonical.type_map[t]] == morphism.type_map[t]
                for t in canonical.source.types
            )

        def inst_ok(im):
            return all(
                canonical.inst_map[im[b]] == morphism.inst_map[b] for b in target.instances
            )

        source_theory = target_theory = None
    else:
        raise ValueError(f"unknown diagram kind {kind!r}")

    witnesses = []
    for tm, im in _candidate_maps(source, target, type_ok, inst_ok):
        if not _fundamental_property(source, target, tm, im):
            continue
        if source_theory is not None and not _preserves_constraints(
            source_theory, target_theory, tm
        ):
            continue
        witnesses.append((tm, im))
    return witnesses
