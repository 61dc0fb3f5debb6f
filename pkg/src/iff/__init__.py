"""Finite classifications, sequent theories, sound logics, and their algebra.

The layers build on each other:

* :mod:`iff.classification` -- classifications, infomorphisms, sums,
  dual quotients;
* :mod:`iff.theory` -- sequent theories, semantic entailment, regular
  closure, interpretations, the formal-instance classification;
* :mod:`iff.logic` -- sound logics, logic morphisms, free logics, the
  transposition between links and morphisms, fusion (sum + quotient);
* :mod:`iff.sharing` -- the two-step community-ontology sharing
  pipeline producing the virtual logic of community connections;
* :mod:`iff.ifo` -- the ``.ifo`` text format (parse, serialize,
  resolve);
* :mod:`iff.cli` -- the ``iff`` command-line driver.
"""
from .classification import (
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
from .errors import (
    CapExceededError,
    Diagnostic,
    IffError,
    ParseError,
    ResolutionError,
    SoundnessError,
    SynonymyConflictError,
    UnknownIdentifierError,
    ValidationError,
)
from .logic import (
    FusionResult,
    LocalLogic,
    LogicMorphism,
    SoundLogic,
    SoundnessReport,
    check_logic_morphism,
    compose_logic_morphisms,
    counit,
    fusion,
    identity_logic_morphism,
    log_of_classification,
    log_of_theory,
    mediate_coproduct_logic,
    mediate_pushout,
    quotient_logic,
    sound_part,
    soundness_report,
    sum_logic,
    transpose,
)
from .sharing import (
    Connection,
    Participant,
    ProjectionReport,
    SharingResult,
    SharingSpec,
    apply_synonymy,
    project,
    run_sharing,
    step1_lift,
    step2_fuse,
)
from .theory import (
    DEFAULT_CLOSURE_CAP,
    DEFAULT_ENUM_CAP,
    FormalInstance,
    Interpretation,
    Sequent,
    Theory,
    check_interpretation,
    cla_of_interpretation,
    cla_of_theory,
    compose_interpretations,
    counterexample,
    entails,
    factor_interpretation,
    formal_instances,
    holds_in,
    identity_interpretation,
    is_regular,
    quotient_theory,
    regular_closure,
    sequent_satisfied,
    sum_theory,
    theory_of,
)

__version__ = "0.1.0"
