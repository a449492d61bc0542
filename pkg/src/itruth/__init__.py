"""Supervaluational truth over intuitionistic Kripke structures.

A desk-scale workbench: formula syntax with stable coding, finitely
presented Kripke structures with standard and global forcing, embedding
search and exhaustive bounded structure classes, four supervaluation
schemes with jump operators and fixed points, compositional supervaluations,
the fixed-frame variant, and the modal companion machinery with a bounded
validity oracle.
"""

from .compositional import (
    CsvVerdict,
    check_lemma_embedding_stability,
    check_shrinking_refutation,
    csv_forces,
    diagnose_fixed_point_csv,
    jump_csv,
    jump_svi2,
    lfp_csv,
)
from .fixedframe import (
    FrameInterpretation,
    ff_forces,
    ff_transparency,
    check_intersection_theorem,
    check_svi_m_matches_ff,
    frame_jump_svi,
    jump_ff,
    lfp_ff,
    svi_m_forces,
)
from .kripke import (
    Diagnostic,
    ForcingVerdict,
    KripkeStructure,
    add_root,
    dump_structure,
    forces,
    forces_all,
    forces_global,
    load_structure,
    satisfies,
    satisfies_global,
    truncate,
    validate,
)
from .search import (
    ClassSpec,
    WorldMap,
    canonical_form,
    enumerate_ei,
    enumerate_pointed,
    enumerate_structures,
    is_embeddable,
    is_ei_map,
    naively_extends,
    search_discrepancy,
)
from .superval import (
    AuditReport,
    CheckReport,
    CheckRow,
    ExclusionWitness,
    JumpReport,
    LfpResult,
    SCHEMES,
    audit_axioms,
    check_fixed_point_transparency,
    check_transparent_oneworld,
    completeness_sentence,
    consistency_sentence,
    jump,
    jump_prime,
    lfp,
    scheme_forces,
    transparency_pairs,
)
from .syntax import (
    BOT,
    And,
    Bottom,
    Eq,
    Exists,
    FnApp,
    Forall,
    Formula,
    Imp,
    Num,
    Or,
    Term,
    Tr,
    Universe,
    Var,
    code,
    code_formula,
    code_term,
    decode,
    decode_formula,
    decode_term,
    eval_term,
    free_vars,
    iff,
    is_sentence,
    neg,
    parse,
    parse_term,
    pretty,
    quote,
    substitute,
)

__version__ = "0.1.0"
