import pytest

from itruth.engine import context
from itruth.kripke import KripkeStructure, forces
from itruth.search import ClassSpec, enumerate_pointed, enumerate_structures
from itruth.superval import (
    SCHEMES,
    SchemeError,
    SeedError,
    audit_axioms,
    check_fixed_point_transparency,
    check_transparent_oneworld,
    completeness_sentence,
    consistency_sentence,
    hat_axiom_candidates,
    jump,
    jump_prime,
    lfp,
    scheme_forces,
    transparency_pairs,
)
from itruth.syntax import (
    FnApp,
    Imp,
    Num,
    Or,
    Tr,
    Universe,
    code,
    code_formula,
    neg,
    parse,
)

A = parse("0=0")
CA = code(A)
TRA = Tr(Num(CA))
CTRA = code(TRA)
B = parse("0 = S(0)")  # false atom
CB = code(B)
EM = Or(TRA, neg(TRA))


def one_world(codes, bound=2):
    return KripkeStructure(("w0",), frozenset({("w0", "w0")}), (frozenset(codes),), bound)


class TestSchemeForces:
    def test_reflexive_implication_supervaluated(self, spec_u4):
        m = one_world([])
        assert scheme_forces("svi", m, "w0", Imp(TRA, TRA), spec_u4).holds

    def test_excluded_middle_fails_without_commitment(self, spec_u5):
        # the distinguished set omits both the code and its negation
        m = one_world([])
        assert not scheme_forces("svi", m, "w0", EM, spec_u5).holds

    def test_scheme_implies_plain_forcing(self, u4):
        spec = ClassSpec(2, u4, 2)
        u = spec.universe
        for m in enumerate_structures(spec):
            for w in m.worlds:
                for c in u.codes:
                    f = u.formula(c)
                    if scheme_forces("svi", m, w, f, spec).holds:
                        assert forces(m, w, f).holds

    def test_restricted_schemes_sound_where_identity_admissible(self, u4):
        # consistent cones make the identity embedding vbi/vci-admissible;
        # mci additionally needs maximally consistent cones
        spec = ClassSpec(2, u4, 2)
        ctx = context(spec)
        for si, m in enumerate(ctx.structures):
            consistent = all(ctx.cone_consistent[si])
            maximal = all(ctx.cone_mcx[si])
            if maximal:
                schemes = ("vbi", "vci", "mci")
            elif consistent:
                schemes = ("vbi", "vci")
            else:
                schemes = ()
            for w in m.worlds:
                for c in u4.codes:
                    f = u4.formula(c)
                    for scheme in schemes:
                        if scheme_forces(scheme, m, w, f, spec).holds:
                            assert forces(m, w, f).holds

    def test_mci_not_plainly_sound_without_maximal_cones(self, u4, em_chain):
        # the canonical chain has no maximally consistent cone at its root,
        # so mci-forcing there outruns plain forcing
        spec = ClassSpec(2, u4, 2)
        chain = KripkeStructure.build(["w0", "w1"], [("w0", "w1")], {"w1": [CA]}, 2)
        assert scheme_forces("mci", chain, "w0", TRA, spec).holds
        assert not forces(chain, "w0", TRA).holds

    def test_vacuous_truth_on_inconsistent_structure(self, u4):
        # no consistent cone exists above a contradictory interpretation, so
        # vci-forcing is the empty universal while plain forcing still fails
        spec = ClassSpec(2, u4, 2)
        from itruth.syntax import BOT

        m = one_world([CA, code(neg(A))])
        assert scheme_forces("vci", m, "w0", BOT, spec).holds
        assert not forces(m, "w0", BOT).holds

    def test_unknown_scheme(self, spec_u4):
        with pytest.raises(SchemeError):
            scheme_forces("sv", one_world([]), "w0", A, spec_u4)

    def test_mci_needs_negation_closure(self, u5):
        spec = ClassSpec(2, u5, 2)
        assert not u5.mci_ready
        with pytest.raises(SchemeError):
            scheme_forces("mci", one_world([]), "w0", A, spec)


class TestJump:
    def test_reflexive_implication_member(self, u4):
        spec = ClassSpec(2, Universe.from_formulas([A, TRA, Imp(TRA, TRA)]), 2)
        rep = jump("svi", [], spec)
        assert code(Imp(TRA, TRA)) in rep.output_codes

    def test_section_example_with_chain_witness(self, spec_u5):
        rep = jump("svi", [], spec_u5)
        cem = code(EM)
        assert cem not in rep.output_codes
        wit = rep.witnesses[cem]
        # the witness is the two-world chain whose root omits the code and
        # whose top adds exactly it
        assert wit.structure.worlds == ("w0", "w1")
        assert wit.structure.le("w0", "w1")
        assert wit.structure.interp_of("w0") == frozenset()
        assert wit.structure.interp_of("w1") == frozenset({CA})
        assert wit.world == "w0"
        assert not forces(wit.structure, wit.world, EM).holds

    def test_monotone_all_schemes(self, u4):
        spec = ClassSpec(2, u4, 2)
        n = len(u4)
        values = {
            s: [jump(s, u4.codes_of(m), spec).output_codes for m in range(1 << n)]
            for s in SCHEMES
        }
        for xm in range(1 << n):
            for ym in range(1 << n):
                if xm & ym == xm:
                    for s in SCHEMES:
                        assert values[s][xm] <= values[s][ym]

    def test_scheme_chain(self, u4):
        spec = ClassSpec(2, u4, 2)
        for xm in range(1 << len(u4)):
            x = u4.codes_of(xm)
            js = jump("svi", x, spec).output_codes
            jb = jump("vbi", x, spec).output_codes
            jc = jump("vci", x, spec).output_codes
            jm = jump("mci", x, spec).output_codes
            assert js <= jb <= jc <= jm

    def test_jump_prime_contained_in_jump(self, u4):
        spec = ClassSpec(2, u4, 2)
        for xm in range(1 << len(u4)):
            x = u4.codes_of(xm)
            assert jump_prime(x, spec).output_codes <= jump("svi", x, spec).output_codes

    def test_jump_prime_monotone_and_valid(self):
        refl = Imp(TRA, TRA)
        u = Universe.from_formulas([A, TRA, refl])
        spec = ClassSpec(2, u, 2)
        base = jump_prime([], spec).output_codes
        assert CA in base  # an arithmetic truth is forced from any superset
        assert code(refl) in base  # and so is an intuitionistic validity
        for xm in range(1 << len(u)):
            for ym in range(1 << len(u)):
                if xm & ym == xm:
                    assert (
                        jump_prime(u.codes_of(xm), spec).output_codes
                        <= jump_prime(u.codes_of(ym), spec).output_codes
                    )

    def test_witness_replays(self, spec_u4):
        rep = jump("svi", [], spec_u4)
        for c, wit in rep.witnesses.items():
            assert not forces(wit.structure, wit.world, wit.formula).holds
            assert wit.pointed is not None
            assert wit.pointed.interp_of(wit.pointed.worlds[0]) == rep.input_codes

    def test_monotone_at_five_member_universe(self, u5):
        # exhaustive over all ordered subset pairs of the five-member universe
        spec = ClassSpec(2, u5, 2)
        n = len(u5)
        for scheme in SCHEMES:
            if scheme == "mci":
                continue  # needs a negation-closed universe; covered at u4
            outs = [jump(scheme, u5.codes_of(m), spec).output_codes for m in range(1 << n)]
            for xm in range(1 << n):
                for ym in range(1 << n):
                    if xm & ym == xm:
                        assert outs[xm] <= outs[ym]


class TestJumpDefinitionalRoute:
    """The jump scan must equal the literal intersection over the pointed
    class of the embedding-based scheme forcing."""

    @pytest.mark.parametrize("scheme", ["svi", "vbi", "vci"])
    def test_pointwise_equality(self, scheme):
        u2 = Universe.from_formulas([A, TRA])
        spec = ClassSpec(2, u2, 2)
        for xm in range(1 << len(u2)):
            x = u2.codes_of(xm)
            fast = jump(scheme, x, spec).output_codes
            slow = set(u2.codes)
            for m, w in enumerate_pointed(spec, x):
                for c in list(slow):
                    if not scheme_forces(scheme, m, w, u2.formula(c), spec).holds:
                        slow.discard(c)
            assert fast == frozenset(slow)

    def test_mci_pointwise_equality(self):
        un = Universe.from_formulas([A, neg(A)])
        spec = ClassSpec(2, un, 2)
        for xm in range(1 << len(un)):
            x = un.codes_of(xm)
            fast = jump("mci", x, spec).output_codes
            slow = set(un.codes)
            for m, w in enumerate_pointed(spec, x):
                for c in list(slow):
                    if not scheme_forces("mci", m, w, un.formula(c), spec).holds:
                        slow.discard(c)
            assert fast == frozenset(slow)

    def test_jump_prime_pointwise_equality(self):
        u2 = Universe.from_formulas([A, TRA])
        spec = ClassSpec(2, u2, 2)
        for xm in range(1 << len(u2)):
            x = u2.codes_of(xm)
            fast = jump_prime(x, spec).output_codes
            slow = set(u2.codes)
            for m, w in enumerate_pointed(spec, x, superset=True):
                for c in list(slow):
                    if not scheme_forces("svi", m, w, u2.formula(c), spec).holds:
                        slow.discard(c)
            assert fast == frozenset(slow)


class TestIntersectionProperty:
    def test_plain_forcing_everywhere_enters_jump(self, u4):
        # bases keep one world of headroom so the root construction stays in class
        spec = ClassSpec(3, u4, 2)
        base = ClassSpec(2, u4, 2)
        for xm in range(1 << len(u4)):
            x = u4.codes_of(xm)
            plain = set(u4.codes)
            for m, w in enumerate_pointed(base, x):
                for c in list(plain):
                    if not forces(m, w, u4.formula(c)).holds:
                        plain.discard(c)
            jumped = jump("svi", x, spec).output_codes
            assert frozenset(plain) <= jumped


class TestLfp:
    def test_stabilises_with_validities(self, spec_u5):
        res = lfp("svi", spec_u5)
        assert res.fixed == res.final_report.output_codes
        assert CA in res.fixed
        assert res.steps <= len(spec_u5.universe) + 1

    def test_universe_internal_validities_in_lfp(self):
        refl = Imp(TRA, TRA)
        weaken = Imp(A, Imp(TRA, A))
        spec = ClassSpec(2, Universe.from_formulas([A, TRA, refl, weaken]), 2)
        fixed = lfp("svi", spec).fixed
        assert code(refl) in fixed and code(weaken) in fixed

    def test_transparency_pairs(self, spec_u5):
        res = lfp("svi", spec_u5)
        assert check_fixed_point_transparency(res.fixed, spec_u5).ok
        assert transparency_pairs(spec_u5)  # non-vacuous

    def test_oneworld_transparency(self, spec_u5):
        res = lfp("svi", spec_u5)
        rep = check_transparent_oneworld(res.fixed, spec_u5)
        assert rep.ok
        assert any(r.check == "bottom-not-member" for r in rep.rows)

    def test_vci_internal_consistency_sentence(self):
        sigma = consistency_sentence(CA)
        spec = ClassSpec(2, Universe.from_formulas([A, TRA, sigma]), 2)
        res = lfp("vci", spec)
        assert code(sigma) in res.fixed

    def test_mci_internal_completeness_sentence(self):
        mu = completeness_sentence(CB)
        spec = ClassSpec(2, Universe.from_formulas([B, neg(B), mu, neg(mu)]), 2)
        res = lfp("mci", spec)
        assert code(mu) in res.fixed
        assert res.final_report.admissible > 0

    def test_vbi_internal_facts(self):
        # a true sentence excludes the truth of its negation; a refuted one
        # excludes its own truth
        part1 = neg(Tr(FnApp("dot_neg", (Num(CA),))))
        part2 = neg(Tr(Num(CB)))
        u = Universe.from_formulas([A, neg(A), B, neg(B), part1, part2])
        spec = ClassSpec(2, u, 2)
        res = lfp("vbi", spec)
        assert code(part1) in res.fixed
        assert code(part2) in res.fixed
        svi_fixed = lfp("svi", spec).fixed
        assert code(part1) not in svi_fixed  # the admissibility condition works

    def test_inflationary_seed_accepted(self, spec_u5):
        fixed = lfp("svi", spec_u5).fixed
        res = lfp("svi", spec_u5, fixed)
        assert res.fixed == fixed

    def test_non_inflationary_seed_rejected(self, spec_u5):
        with pytest.raises(SeedError):
            lfp("svi", spec_u5, [code(neg(A))])

    def test_seed_outside_universe_rejected(self, spec_u5):
        with pytest.raises(SeedError):
            lfp("svi", spec_u5, [code(parse("1=1"))])

    def test_fixed_points_non_degenerate(self, u4):
        # admissible extensions always exist (the pointed structure itself
        # qualifies), so least fixed points are never the whole universe
        spec = ClassSpec(2, u4, 2)
        for scheme in SCHEMES:
            res = lfp(scheme, spec)
            assert res.final_report.admissible > 0
            assert res.fixed < frozenset(u4.codes)
            assert CA in res.fixed

    def test_inconsistent_input_set_is_vacuous_for_vci(self, u4):
        # no extension cone is consistent above a contradictory pair, so the
        # jump is the vacuous universal and the report says so
        rep = jump("vci", [CA, code(neg(A))], ClassSpec(2, u4, 2))
        assert rep.vacuous
        assert rep.output_codes == frozenset(u4.codes)


def _all_labeled_structures(codes, bound):
    """Every labeled persistent structure on at most two worlds, built from
    first principles (independent of the enumeration and canonicalisation
    machinery)."""
    import itertools as it

    subsets = [frozenset(s) for r in range(len(codes) + 1)
               for s in it.combinations(codes, r)]
    out = []
    for s in subsets:
        out.append(KripkeStructure(("a",), frozenset({("a", "a")}), (s,), bound))
    orders = [
        frozenset({("a", "a"), ("b", "b")}),
        frozenset({("a", "a"), ("b", "b"), ("a", "b")}),
        frozenset({("a", "a"), ("b", "b"), ("b", "a")}),
    ]
    for order in orders:
        for sa in subsets:
            for sb in subsets:
                if ("a", "b") in order and not sa <= sb:
                    continue
                if ("b", "a") in order and not sb <= sa:
                    continue
                out.append(KripkeStructure(("a", "b"), order, (sa, sb), bound))
    return out


def _brute_jump(codes, universe, x, bound, admissible):
    """Definitional jump over labeled structures: intersect, over every
    pointed structure interpreting x, the sentences plainly forced at the
    image of the point under every admissible embedding."""
    import itertools as it

    structures = _all_labeled_structures(codes, bound)
    out = set(codes)
    for m in structures:
        for w in m.worlds:
            if m.interp_of(w) != frozenset(x):
                continue
            for n in structures:
                if len(n.worlds) < len(m.worlds):
                    continue
                for targets in it.permutations(n.worlds, len(m.worlds)):
                    f = dict(zip(m.worlds, targets))
                    if not all(
                        m.le(u, v) == n.le(f[u], f[v])
                        for u in m.worlds
                        for v in m.worlds
                    ):
                        continue
                    if not all(m.interp_of(u) <= n.interp_of(f[u]) for u in m.worlds):
                        continue
                    if not admissible(m, w, n, f):
                        continue
                    for c in list(out):
                        if not forces(n, f[w], universe.formula(c)).holds:
                            out.discard(c)
    return frozenset(out)


class TestIndependentOracle:
    """A from-scratch rebuild of the jump at micro scale: labeled structures,
    inline embedding conditions, plain forcing only."""

    def test_svi_jump_matches_brute_force(self):
        u2 = Universe.from_formulas([A, TRA])
        spec = ClassSpec(2, u2, 2)
        for xm in range(1 << len(u2)):
            x = u2.codes_of(xm)
            slow = _brute_jump(u2.codes, u2, x, 2, lambda m, w, n, f: True)
            assert jump("svi", x, spec).output_codes == slow

    def test_vbi_jump_matches_brute_force(self):
        un = Universe.from_formulas([A, neg(A)])
        spec = ClassSpec(2, un, 2)

        from itruth.syntax import BOT, decode

        def neg_closure(codes):
            out = set()
            for c in codes:
                g = decode(c)
                out.add(code(neg(g)))
                if isinstance(g, Imp) and g.right == BOT:
                    out.add(code_formula(g.left))
            return out

        def admissible(m, w, n, f):
            bad = neg_closure(m.interp_of(w))
            return all(
                not (n.interp_of(v) & bad)
                for v in n.worlds
                if n.le(f[w], v)
            )

        for xm in range(1 << len(un)):
            x = un.codes_of(xm)
            slow = _brute_jump(un.codes, un, x, 2, admissible)
            assert jump("vbi", x, spec).output_codes == slow

    def test_vci_jump_matches_brute_force(self):
        un = Universe.from_formulas([A, neg(A)])
        spec = ClassSpec(2, un, 2)

        from itruth.syntax import decode

        def consistent(codes):
            return not any(code(neg(decode(c))) in codes for c in codes)

        def admissible(m, w, n, f):
            return all(
                consistent(n.interp_of(v)) for v in n.worlds if n.le(f[w], v)
            )

        for xm in range(1 << len(un)):
            x = un.codes_of(xm)
            slow = _brute_jump(un.codes, un, x, 2, admissible)
            assert jump("vci", x, spec).output_codes == slow


class TestRecordedFindings:
    def test_svi_and_csv_jumps_coincide_at_bounds(self, u4):
        # a corollary of the recorded finding that standard and global
        # forcing agree on persistent constant-domain structures; asserted
        # only at these bounds, not as a theorem
        spec = ClassSpec(2, u4, 2)
        from itruth.compositional import jump_csv

        for xm in range(1 << len(u4)):
            x = u4.codes_of(xm)
            assert jump("svi", x, spec).output_codes == jump_csv(x, spec).output_codes


AUDIT_UNIVERSES = {}


def _audit_setup(theory):
    if theory in AUDIT_UNIVERSES:
        return AUDIT_UNIVERSES[theory]
    hat = hat_axiom_candidates()[0]
    if theory == "ISV":
        forms = [A, B, neg(B), TRA, hat]
    elif theory == "IVB":
        forms = [A, B, neg(B), Tr(Num(CB)), neg(Tr(Num(CB))), hat]
    elif theory == "IVF":
        forms = [A, B, neg(B), Tr(Num(CB)), neg(Tr(Num(CB))), consistency_sentence(CA)]
    else:  # IMC
        from itruth.superval import imc8_sentence

        imc = imc8_sentence(CB)
        forms = [B, neg(B), Tr(Num(CB)), neg(Tr(Num(CB))), imc, neg(imc)]
    u = Universe.from_formulas(forms)
    spec = ClassSpec(2, u, 2)
    from itruth.superval import THEORY_SCHEME

    fixed = lfp(THEORY_SCHEME[theory], spec).fixed
    AUDIT_UNIVERSES[theory] = (spec, fixed)
    return spec, fixed


class TestAudits:
    @pytest.mark.parametrize("theory", ["ISV", "IVB", "IVF", "IMC"])
    def test_audit_passes_on_fixed_point(self, theory):
        spec, fixed = _audit_setup(theory)
        m = one_world(fixed)
        rep = audit_axioms(theory, m, spec)
        assert rep.precondition_ok
        assert rep.ok, [str(r) for r in rep.failures()]
        checks = {r.check for r in rep.rows}
        assert "ISV1" in checks and "consistency" in checks
        if theory == "IVB":
            assert "IVB8" in checks
        if theory == "IVF":
            assert "IVF9" in checks
        if theory == "IMC":
            assert "IMC8" in checks and "ISV7" not in checks
        else:
            assert "ISV7" in checks

    def test_isv7_instances_hold(self):
        spec, fixed = _audit_setup("ISV")
        m = one_world(fixed)
        rep = audit_axioms("ISV", m, spec)
        isv7 = [r for r in rep.rows if r.check == "ISV7"]
        assert isv7 and all(r.ok for r in isv7)

    def test_ivf9_on_vci_fixed_point(self):
        spec, fixed = _audit_setup("IVF")
        rep = audit_axioms("IVF", one_world(fixed), spec)
        rows = [r for r in rep.rows if r.check == "IVF9"]
        assert rows and all(r.ok for r in rows)

    def test_stacked_fixed_point_structure(self):
        spec, fixed = _audit_setup("ISV")
        chain = KripkeStructure.build(
            ["w0", "w1"], [("w0", "w1")], {"w0": fixed, "w1": fixed}, 2
        )
        rep = audit_axioms("ISV", chain, spec)
        assert rep.ok

    @pytest.mark.parametrize("theory", ["ISV", "IVB", "IVF", "IMC"])
    def test_single_code_mutations_caught(self, theory):
        spec, fixed = _audit_setup(theory)
        faults = [CB]  # a refuted arithmetic sentence asserted true
        if CTRA in spec.universe.codes:
            faults.append(CTRA)  # truth ascription without its ground
        for fault in faults:
            if fault in fixed:
                continue
            m = one_world(fixed | {fault})
            rep = audit_axioms(theory, m, spec, check_precondition=False)
            assert rep.failures(), f"{theory}: injected {fault} went unnoticed"

    def test_isv2_uses_curated_axioms(self):
        spec, fixed = _audit_setup("ISV")
        rep = audit_axioms("ISV", one_world(fixed), spec)
        rows = [r for r in rep.rows if r.check == "ISV2"]
        assert rows and all(r.ok for r in rows)

    def test_isv3_universal_instance(self):
        hat = hat_axiom_candidates()[0]  # a universally quantified sentence
        u = Universe.from_formulas([A, hat])
        spec = ClassSpec(2, u, 2)
        fixed = lfp("svi", spec).fixed
        assert code_formula(hat) in fixed
        rep = audit_axioms("ISV", one_world(fixed), spec)
        rows = [r for r in rep.rows if r.check == "ISV3"]
        assert rows and all(r.ok for r in rows)
