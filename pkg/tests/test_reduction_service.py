import pytest

from app.models.digraph import build_digraph
from app.models.schemas import AssignmentConstraints, Matching, ManyToOneMatching, Verdict
from app.services.idua_service import run_idua
from app.services.market_service import validate_instance
from app.services.reduction_service import merge_matching, reduce_constraints, split_firms, split_matching
from conftest import M_STAR, MU_STAR, one_based


def _single_firm_market():
    return validate_instance({
        "workers": ["w1", "w2"],
        "firms": [{"name": "f", "quota": 3}],
        "worker_prefs": {"w1": ["f"], "w2": ["f"]},
        "firm_prefs": {"f": ["w2", "w1"]},
    })


class TestSplitFirms:
    """Test cases for splitting firms into positions."""

    def test_example_market_split(self, example1_split):
        """Test f4 becomes two consecutive copies ranked in copy order."""
        split = example1_split
        assert split.cols == 5
        assert [split.column_label(c) for c in range(split.cols)] == ["f1", "f2", "f3", "f4#1", "f4#2"]
        # w2: f2, f1, f4#1, f4#2, f3
        assert split.worker_prefs_expanded[1] == (1, 0, 3, 4, 2)
        assert split.column_prefs[3] == split.column_prefs[4]

    def test_unit_quotas_split_is_identity(self, cyclic, cyclic_split):
        """Test quota-one firms map to a single unchanged column."""
        assert [c.firm for c in cyclic_split.columns] == ["f1", "f2", "f3"]
        for r, w in enumerate(cyclic.workers):
            expected = tuple(cyclic.firm_index(f) for f in cyclic.worker_prefs[w])
            assert cyclic_split.worker_prefs_expanded[r] == expected

    def test_copies_are_ranked_in_order(self):
        """Test every worker ranks (f,1), (f,2), (f,3) in that order."""
        split = split_firms(_single_firm_market())
        assert split.cols == 3
        assert split.worker_prefs_expanded == ((0, 1, 2), (0, 1, 2))
        assert split.columns_of("f") == (0, 1, 2)


class TestMergeMatching:
    """Test cases for collapsing copies back to firms."""

    def test_first_solution(self, example1_split):
        """Test the first constrained solution merges to its many-to-one form."""
        assert merge_matching(example1_split, Matching(pairs=M_STAR[0])) == MU_STAR[0]

    def test_third_solution(self, example1_split):
        """Test the third constrained solution merges to its many-to-one form."""
        assert merge_matching(example1_split, Matching(pairs=M_STAR[2])) == MU_STAR[2]

    def test_empty_matching(self, example1_split):
        """Test an empty matching merges to an empty assignment."""
        assert merge_matching(example1_split, Matching()) == ManyToOneMatching()

    @pytest.mark.parametrize("index", range(3))
    def test_split_matching_is_stable_preimage(self, example1_split, index):
        """Test the best worker of f4 takes the first copy."""
        assert split_matching(example1_split, MU_STAR[index]).pairs == M_STAR[index]


class TestReduceConstraints:
    """Test cases for compiling assignment constraints."""

    def test_designer_question(self, example1_split, example1_nf, question1):
        """Test the question reduces to one forced and one forbidden vertex."""
        reduction = reduce_constraints(example1_split, example1_nf.digraph, question1)
        assert reduction.verdict == Verdict.FEASIBLE
        assert reduction.pair_constraints.v_in == one_based((1, 2))
        assert reduction.pair_constraints.v_out == one_based((4, 1))
        assert set(reduction.dropped_redundant) == {"w_in f2: w6", "w_out f4: w6"}

    def test_empty_constraints(self, example1_split, example1_nf):
        """Test no constraints compile to nothing."""
        reduction = reduce_constraints(example1_split, example1_nf.digraph, AssignmentConstraints())
        assert reduction.feasible
        assert not reduction.pair_constraints.v_in
        assert not reduction.pair_constraints.v_out

    def test_never_employed_worker_required(self, example1_split, example1_nf):
        """Test requiring employment for w6 is infeasible."""
        ac = AssignmentConstraints(f_in={"w6": frozenset({"f2"})})
        reduction = reduce_constraints(example1_split, example1_nf.digraph, ac)
        assert reduction.verdict == Verdict.INFEASIBLE
        assert "w6" in reduction.reason
        assert not reduction.pair_constraints.v_in and not reduction.pair_constraints.v_out

    def test_contradiction_is_infeasible(self, example1_split, example1_nf):
        """Test requiring and forbidding the same firm."""
        ac = AssignmentConstraints(
            f_in={"w1": frozenset({"f1", "f2"})},
            f_out={"w1": frozenset({"f2"})},
        )
        reduction = reduce_constraints(example1_split, example1_nf.digraph, ac)
        assert reduction.verdict == Verdict.INFEASIBLE
        assert reduction.reason.startswith("infeasible by contradiction")

    def test_required_firms_become_forbidden_complement(self, example1_split, example1_nf):
        """Test F_in(w1) = {f1, f2} forbids w1's other surviving columns."""
        ac = AssignmentConstraints(f_in={"w1": frozenset({"f1", "f2"})})
        reduction = reduce_constraints(example1_split, example1_nf.digraph, ac)
        assert reduction.pair_constraints.v_in == frozenset()
        assert reduction.pair_constraints.v_out == one_based((1, 3), (1, 5))

    def test_lone_surviving_column_is_forced(self, example1_split, example1_nf):
        """Test F_in(w1) = {f4} pins w1 to the only copy of f4 left in its row."""
        ac = AssignmentConstraints(f_in={"w1": frozenset({"f4"})})
        reduction = reduce_constraints(example1_split, example1_nf.digraph, ac)
        assert reduction.pair_constraints.v_in == one_based((1, 5))

    def test_unfillable_required_set(self, example1_split, example1_nf):
        """Test W_in(f3) = {w6} forbids every surviving worker of f3."""
        ac = AssignmentConstraints(w_in={"f3": frozenset({"w6"})})
        reduction = reduce_constraints(example1_split, example1_nf.digraph, ac)
        assert reduction.feasible
        assert reduction.pair_constraints.v_out == one_based((1, 3), (2, 3), (3, 3), (4, 3))
        assert reduction.dropped_redundant == ("w_in f3: w6",)

    def test_two_forced_vertices_in_one_row(self, example1_split, example1_nf):
        """Test forcing w1 into both f2 and f4 is infeasible."""
        ac = AssignmentConstraints(
            w_in={"f2": frozenset({"w1", "w6"})},
            f_in={"w1": frozenset({"f4"})},
        )
        reduction = reduce_constraints(example1_split, example1_nf.digraph, ac)
        assert reduction.verdict == Verdict.INFEASIBLE

    def test_output_stays_inside_normal_form(self, random_markets):
        """Test compiled vertices are always live in the normal form."""
        for inst in random_markets(40, seed=7):
            split = split_firms(inst)
            nf = run_idua(build_digraph(split))
            ac = AssignmentConstraints(
                f_out={w: frozenset(inst.worker_prefs[w][:1]) for w in inst.workers[:2]},
                w_in={f: frozenset(inst.firm_prefs[f][:2]) for f in inst.firm_names[:1]},
            )
            reduction = reduce_constraints(split, nf.digraph, ac)
            pc = reduction.pair_constraints
            assert all(nf.digraph.is_live(v) for v in pc.v_in | pc.v_out)
