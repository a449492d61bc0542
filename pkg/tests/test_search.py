import itertools
import random

from itruth.kripke import KripkeStructure, validate
from itruth.search import (
    ClassSpec,
    canonical_form,
    enumerate_ei,
    enumerate_pointed,
    enumerate_structures,
    is_embeddable,
    is_ei_map,
    naively_extends,
    search_discrepancy,
)
from itruth.kripke import add_root, truncate
from itruth.syntax import Tr, Universe, code, parse, quote

A = parse("0=0")
CA = code(A)
TRA = Tr(quote(A))
CTRA = code(TRA)


def brute_force_ei(m, n):
    """Independent oracle: filter every injective world map by the three
    conditions."""
    out = []
    for targets in itertools.permutations(n.worlds, len(m.worlds)):
        mapping = dict(zip(m.worlds, targets))
        if is_ei_map(m, n, mapping):
            out.append(mapping)
    return out


class TestEmbeddings:
    def test_identity_present(self, em_chain):
        maps = enumerate_ei(em_chain, em_chain)
        assert {w: w for w in em_chain.worlds} in [m.as_dict() for m in maps]

    def test_one_world_into_dominating_world(self):
        one = KripkeStructure.build(["v"], [], {"v": [CA]}, 2)
        two = KripkeStructure.build(["x", "y"], [("x", "y")], {"x": [CA], "y": [CA, CTRA]}, 2)
        images = {m.image("v") for m in enumerate_ei(one, two)}
        assert images == {"x", "y"}

    def test_count_matches_brute_force(self):
        m = KripkeStructure.build(["a", "b"], [("a", "b")], {"b": [CA]}, 2)
        n = KripkeStructure.build(["c", "d"], [("c", "d")], {"c": [CA], "d": [CA, CTRA]}, 2)
        fast = [wm.as_dict() for wm in enumerate_ei(m, n)]
        slow = brute_force_ei(m, n)
        assert len(fast) == len(slow)
        assert {tuple(sorted(d.items())) for d in fast} == {
            tuple(sorted(d.items())) for d in slow
        }

    def test_brute_force_agreement_over_class(self, spec_small):
        structures = list(enumerate_structures(spec_small))
        for m in structures:
            for n in structures:
                fast = {tuple(sorted(wm.as_dict().items())) for wm in enumerate_ei(m, n)}
                slow = {tuple(sorted(d.items())) for d in brute_force_ei(m, n)}
                assert fast == slow

    def test_embeddable_reflexive(self, spec_small):
        for m in enumerate_structures(spec_small):
            assert is_embeddable(m, m)

    def test_embeddable_transitive_sampled(self, spec_small):
        structures = list(enumerate_structures(spec_small))
        rng = random.Random(7)
        triples = [tuple(rng.choices(structures, k=3)) for _ in range(60)]
        for a, b, c in triples:
            if is_embeddable(a, b) and is_embeddable(b, c):
                assert is_embeddable(a, c)

    def test_injectivity_forces_growth(self, em_chain):
        one = KripkeStructure.build(["v"], [], {"v": [CA]}, 2)
        assert not is_embeddable(em_chain, one)

    def test_naive_extension_yields_inclusion_map(self, em_chain):
        bigger = KripkeStructure.build(
            ["w0", "w1", "z"], [("w0", "w1")], {"w1": [CA], "z": [CA]}, 2
        )
        assert naively_extends(em_chain, bigger)
        incl = {w: w for w in em_chain.worlds}
        assert incl in [m.as_dict() for m in enumerate_ei(em_chain, bigger)]

    def test_naive_extension_requires_same_restricted_order(self, em_chain):
        # adding an order pair between old worlds breaks the restriction
        n = KripkeStructure.build(
            ["w0", "w1", "z"], [("w0", "w1"), ("w1", "z"), ("z", "w1")], {"w1": [CA]}, 2
        )
        reordered = KripkeStructure.build(["w1", "w0"], [("w1", "w0")], {"w0": [CA]}, 2)
        assert not naively_extends(em_chain, reordered)


class TestEnumeration:
    def test_one_world_counts(self, u4):
        spec = ClassSpec(1, u4, 2)
        assert sum(1 for _ in enumerate_structures(spec)) == 2 ** len(u4)

    def test_two_world_single_atom_count(self, u1):
        # independent combinatorial oracle: enumerate labelled structures and
        # dedupe by canonical form
        spec = ClassSpec(2, u1, 2)
        labelled = set()
        codes = list(u1.codes)
        orders = [
            [],
            [("a", "b")],
            [("b", "a")],
        ]
        for worlds in (["a"], ["a", "b"]):
            for order in orders if len(worlds) == 2 else [[]]:
                for assign in itertools.product([(), tuple(codes)], repeat=len(worlds)):
                    m = KripkeStructure.build(
                        worlds, order, dict(zip(worlds, assign)), 2
                    )
                    if validate(m):
                        continue
                    labelled.add(canonical_form(m))
        enumerated = list(enumerate_structures(spec))
        assert len(enumerated) == len(labelled) == 8
        assert set(enumerated) == labelled

    def test_emitted_structures_valid_and_unique(self, spec_u4):
        seen = set()
        for m in itertools.islice(enumerate_structures(spec_u4), 400):
            assert validate(m) == []
            assert m not in seen
            seen.add(m)

    def test_pointed_enumeration(self, spec_small, u1):
        empty_pairs = list(enumerate_pointed(spec_small, []))
        assert any(
            len(m.worlds) == 1 and m.interp_of(w) == frozenset()
            for m, w in empty_pairs
        )
        target = frozenset({CA})
        for m, w in enumerate_pointed(spec_small, target):
            assert m.interp_of(w) == target
        sup = list(enumerate_pointed(spec_small, target, superset=True))
        assert len(sup) >= len(list(enumerate_pointed(spec_small, target)))

    def test_pointed_outside_universe_is_empty(self, spec_small):
        assert list(enumerate_pointed(spec_small, [CTRA + 1])) == []

    def test_pointed_count_small_universe(self, u4):
        # brute-force count at a two-element universe, two worlds
        u2 = Universe.from_formulas([A, TRA])
        spec = ClassSpec(2, u2, 2)
        pairs = list(enumerate_pointed(spec, [code(A)]))
        structures = list(enumerate_structures(spec))
        slow = sum(
            1
            for m in structures
            for w in m.worlds
            if m.interp_of(w) == frozenset({code(A)})
        )
        assert len(pairs) == slow > 0


class TestCanonicalisation:
    def test_relabelling_invariance(self, spec_u4):
        rng = random.Random(3)
        for m in itertools.islice(enumerate_structures(spec_u4), 150):
            names = list(m.worlds)
            shuffled = names[:]
            rng.shuffle(shuffled)
            ren = dict(zip(names, shuffled))
            relabelled = KripkeStructure(
                tuple(ren[w] for w in m.worlds),
                frozenset((ren[u], ren[v]) for u, v in m.order),
                m.interp,
                m.numeral_bound,
            )
            assert canonical_form(relabelled) == canonical_form(m) == m

    def test_closure_headroom(self, u1):
        spec = ClassSpec(2, u1, 2)
        members = set(enumerate_structures(spec))
        for m in members:
            for w in m.worlds:
                assert canonical_form(truncate(m, w)) in members
            if spec.headroom(m) >= 1:
                assert canonical_form(add_root(m, [])) in members

    def test_headroom_value(self, spec_small, em_chain):
        assert spec_small.headroom(em_chain) == 0


class TestDiscrepancySearch:
    def test_standard_and_global_agree_on_constant_domain(self, spec_small):
        # a recorded finding, not a theorem asserted by the workbench: within
        # these bounds the two relations coincide on persistent structures
        assert search_discrepancy(spec_small) == []

    def test_result_shape(self, u1):
        spec = ClassSpec(1, u1, 2)
        out = search_discrepancy(spec, [Imp_like()])
        assert out == []


def Imp_like():
    return parse("0=0 -> 0=0")
