from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from iff.classification import (
    Classification,
    DualInvariant,
    Infomorphism,
    StateDescription,
    check_cls_invariant,
    check_infomorphism,
    compose_infomorphisms,
    factor_through_quotient,
    identity_infomorphism,
    mediate_coproduct,
    quotient_classification,
    sum_classification,
)
from iff.errors import UnknownIdentifierError, ValidationError

from .testkit import Generator, all_functions, oracle_universal


@pytest.fixture
def sample() -> Classification:
    return Classification(
        ["a1", "a2"], ["alpha", "beta"], [("a1", "alpha"), ("a1", "beta"), ("a2", "beta")]
    )


class TestClassifies:
    def test_present_pair(self, sample):
        assert sample.classifies("a1", "alpha")

    def test_absent_pair(self, sample):
        assert not sample.classifies("a2", "alpha")

    def test_undeclared_instance(self, sample):
        with pytest.raises(UnknownIdentifierError, match="a3"):
            sample.classifies("a3", "alpha")

    def test_undeclared_type(self, sample):
        with pytest.raises(UnknownIdentifierError, match="gamma"):
            sample.classifies("a1", "gamma")


class TestStateDescription:
    def test_full_row(self, sample):
        assert sample.state_description("a1") == StateDescription(
            frozenset({"alpha", "beta"}), frozenset()
        )

    def test_partial_row(self, sample):
        assert sample.state_description("a2") == StateDescription(
            frozenset({"beta"}), frozenset({"alpha"})
        )

    def test_no_types(self):
        degenerate = Classification(["a"], [])
        assert degenerate.state_description("a") == StateDescription(frozenset(), frozenset())


class TestSeparated:
    def test_distinct_rows(self, sample):
        assert sample.is_separated()

    def test_identical_rows(self):
        dup = Classification(["a1", "a2"], ["alpha"], [("a1", "alpha"), ("a2", "alpha")])
        assert not dup.is_separated()

    def test_no_instances(self):
        assert Classification([], ["alpha"]).is_separated()


class TestCheckInfomorphism:
    def test_identity(self, sample):
        assert check_infomorphism(identity_infomorphism(sample)) == []

    def test_fundamental_property_violation(self, sample):
        # alpha is pushed to beta: a2 has beta but its preimage lacks alpha.
        m = Infomorphism(
            sample, sample, {"alpha": "beta", "beta": "beta"}, {"a1": "a1", "a2": "a2"}
        )
        problems = check_infomorphism(m)
        assert [(d.subject, d.kind) for d in problems] == [(("a2", "alpha"), "fundamental-property")]

    def test_non_total_type_map(self, sample):
        m = Infomorphism(sample, sample, {"alpha": "alpha"}, {"a1": "a1", "a2": "a2"})
        with pytest.raises(ValidationError, match="non-total type map"):
            check_infomorphism(m)

    def test_non_total_instance_map(self, sample):
        m = Infomorphism(sample, sample, {"alpha": "alpha", "beta": "beta"}, {"a1": "a1"})
        with pytest.raises(ValidationError, match="non-total instance map"):
            check_infomorphism(m)


class TestSum:
    def test_cardinalities(self):
        left = Classification(["a", "b"], ["t", "u"])
        right = Classification(["x", "y", "z"], ["v"])
        total, _, _ = sum_classification(left, right)
        assert len(total.instances) == 6
        assert len(total.types) == 3

    def test_sum_with_empty_instances(self, sample):
        total, _, _ = sum_classification(sample, Classification([], ["t"]))
        assert total.instances == ()

    def test_incidence_clauses(self, sample):
        total, _, _ = sample_sum = sum_classification(sample, sample)
        assert total.classifies("(a1,a2)", "0.alpha")
        assert not total.classifies("(a1,a2)", "1.alpha")

    def test_injections_are_infomorphisms(self, sample):
        _, inj0, inj1 = sum_classification(sample, sample)
        assert check_infomorphism(inj0) == []
        assert check_infomorphism(inj1) == []

    def test_equal_tags_rejected(self, sample):
        with pytest.raises(ValidationError, match="tags"):
            sum_classification(sample, sample, tags=("0", "0"))

    def test_cardinalities_random(self):
        gen = Generator(13)
        for _ in range(25):
            left, right = gen.classification(), gen.classification()
            total, inj0, inj1 = sum_classification(left, right)
            assert len(total.instances) == len(left.instances) * len(right.instances)
            assert len(total.types) == len(left.types) + len(right.types)
            assert check_infomorphism(inj0) == []
            assert check_infomorphism(inj1) == []


class TestMediateCoproduct:
    def test_diagonal(self, sample):
        ident = identity_infomorphism(sample)
        mediator = mediate_coproduct(ident, ident)
        assert mediator.inst_map == {"a1": "(a1,a1)", "a2": "(a2,a2)"}
        assert check_infomorphism(mediator) == []

    def test_composition_recovers_legs(self, sample):
        other = Classification(["b"], ["t", "u"], [("b", "t")])
        m0 = Infomorphism(sample, other, {"alpha": "t", "beta": "t"}, {"b": "a1"})
        assert check_infomorphism(m0) == []
        m1 = identity_infomorphism(sample)
        m1 = Infomorphism(sample, other, {"alpha": "t", "beta": "t"}, {"b": "a1"})
        _, inj0, inj1 = sum_classification(sample, sample)
        mediator = mediate_coproduct(m0, m1)
        for leg, inj in ((m0, inj0), (m1, inj1)):
            composed = compose_infomorphisms(inj, mediator)
            assert composed.type_map == leg.type_map
            assert composed.inst_map == leg.inst_map

    def test_uniqueness_small_scale(self):
        gen = Generator(5, max_instances=2, max_types=2)
        checked = 0
        for _ in range(40):
            a0, a1 = gen.classification(), gen.classification()
            if not (a0.instances and a1.instances):
                continue
            m0 = gen.infomorphism_from(a0)
            # rebuild the second leg into the same target when possible
            target = m0.target
            candidates = [
                im
                for im in all_functions(target.instances, a1.instances)
                for tm in [None]
            ]
            total, inj0, inj1 = sum_classification(a0, a1)
            legs = None
            for tm in all_functions(a1.types, target.types):
                for im in all_functions(target.instances, a1.instances):
                    m1 = Infomorphism(a1, target, tm, im)
                    try:
                        if check_infomorphism(m1) == []:
                            legs = m1
                            break
                    except ValidationError:
                        continue
                if legs:
                    break
            if legs is None:
                continue
            mediator = mediate_coproduct(m0, legs)
            witnesses = oracle_universal(
                "coproduct",
                sum=total,
                inj0=inj0,
                inj1=inj1,
                leg0=m0,
                leg1=legs,
                target=target,
            )
            assert witnesses == [(mediator.type_map, mediator.inst_map)]
            checked += 1
        assert checked >= 5


class TestDualInvariant:
    def test_holds(self, sample):
        assert check_cls_invariant(sample, DualInvariant(["a1"], [("alpha", "beta")])) == []

    def test_violation(self, sample):
        problems = check_cls_invariant(sample, DualInvariant(["a2"], [("alpha", "beta")]))
        assert [d.subject for d in problems] == [("a2", "alpha", "beta")]

    def test_empty_relation_vacuous(self, sample):
        assert check_cls_invariant(sample, DualInvariant(sample.instances, [])) == []

    def test_unknown_identifiers(self, sample):
        with pytest.raises(UnknownIdentifierError):
            check_cls_invariant(sample, DualInvariant(["zz"], []))
        with pytest.raises(UnknownIdentifierError):
            check_cls_invariant(sample, DualInvariant([], [("alpha", "zz")]))


class TestQuotient:
    def test_collapse_and_restrict(self, sample):
        quotient, canonical = quotient_classification(
            sample, DualInvariant(["a1"], [("alpha", "beta")])
        )
        assert quotient.instances == ("a1",)
        assert quotient.types == ("alpha",)
        assert quotient.classifies("a1", "alpha")
        assert check_infomorphism(canonical) == []

    def test_identity_quotient(self, sample):
        quotient, canonical = quotient_classification(
            sample, DualInvariant(sample.instances, [])
        )
        assert quotient.instances == sample.instances
        assert quotient.types == sample.types
        assert quotient.incidence == sample.incidence
        assert check_infomorphism(canonical) == []

    def test_total_relation_uniform_rows(self):
        uniform = Classification(
            ["a", "b"], ["t", "u"], [("a", "t"), ("a", "u"), ("b", "t"), ("b", "u")]
        )
        quotient, _ = quotient_classification(
            uniform, DualInvariant(["a", "b"], [("t", "u")])
        )
        assert quotient.types == ("t",)
        assert quotient.classifies("a", "t") and quotient.classifies("b", "t")

    def test_refuses_invalid_invariant(self, sample):
        with pytest.raises(ValidationError, match="invariant"):
            quotient_classification(sample, DualInvariant(["a2"], [("alpha", "beta")]))


class TestFactorThroughQuotient:
    def test_factor_canonical_is_identity(self, sample):
        invariant = DualInvariant(["a1"], [("alpha", "beta")])
        quotient, canonical = quotient_classification(sample, invariant)
        factored = factor_through_quotient(sample, invariant, canonical)
        assert factored.type_map == {t: t for t in quotient.types}
        assert factored.inst_map == {a: a for a in quotient.instances}

    def test_identity_quotient_recovers_morphism(self, sample):
        gen = Generator(21)
        invariant = DualInvariant(sample.instances, [])
        m = gen.infomorphism_from(sample)
        factored = factor_through_quotient(sample, invariant, m)
        assert factored.type_map == m.type_map
        assert factored.inst_map == m.inst_map
        assert check_infomorphism(factored) == []

    def test_composition_equals_original(self):
        gen = Generator(22, max_instances=3, max_types=3)
        checked = 0
        for _ in range(60):
            a = gen.classification()
            if not a.instances:
                continue
            invariant = gen.valid_invariant(a)
            m = gen.infomorphism_from(a)
            if any(m.inst_map[b] not in invariant.kept_instances for b in m.target.instances):
                continue
            if any(
                m.type_map[x] != m.type_map[y] for x, y in invariant.type_relation
            ):
                continue
            _, canonical = quotient_classification(a, invariant)
            factored = factor_through_quotient(a, invariant, m)
            assert check_infomorphism(factored) == []
            composed = compose_infomorphisms(canonical, factored)
            assert composed.type_map == m.type_map
            assert composed.inst_map == m.inst_map
            checked += 1
        assert checked >= 5

    def test_uniqueness_small_scale(self, sample):
        invariant = DualInvariant(["a1"], [("alpha", "beta")])
        quotient, canonical = quotient_classification(sample, invariant)
        factored = factor_through_quotient(sample, invariant, canonical)
        witnesses = oracle_universal(
            "quotient", quotient=quotient, canonical=canonical, morphism=canonical
        )
        assert witnesses == [(factored.type_map, factored.inst_map)]

    def test_rejects_disrespectful_morphism(self, sample):
        invariant = DualInvariant(["a1"], [("alpha", "beta")])
        bad = identity_infomorphism(sample)
        with pytest.raises(ValidationError, match="respect"):
            factor_through_quotient(sample, invariant, bad)


class TestConstruction:
    def test_incidence_must_be_declared(self):
        with pytest.raises(UnknownIdentifierError):
            Classification(["a"], ["t"], [("a", "u")])

    def test_names_validated(self):
        with pytest.raises(ValidationError):
            Classification(["a b"], [])

    @given(st.sets(st.sampled_from(["p", "q", "r", "s"])))
    def test_state_description_partitions_types(self, row):
        types = ["p", "q", "r", "s"]
        c = Classification(["a"], types, [("a", t) for t in row])
        described = c.state_description("a")
        assert described.positive | described.negative == frozenset(types)
        assert not described.positive & described.negative
        assert described.positive == frozenset(row)
