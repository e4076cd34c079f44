import pytest

from app.core.exceptions import DigraphContractError
from app.models.digraph import FLAG_IN, FLAG_OUT, build_digraph
from app.services.market_service import validate_instance
from app.services.reduction_service import split_firms


@pytest.fixture
def single_vertex():
    inst = validate_instance({
        "workers": ["w1"],
        "firms": [{"name": "f1"}],
        "worker_prefs": {"w1": ["f1"]},
        "firm_prefs": {"f1": ["w1"]},
    })
    return build_digraph(split_firms(inst))


def explicit_out_degrees(split, live):
    """Out-degrees from arcs materialized straight from the preference lists."""
    arcs_w, arcs_f = {}, {}
    for (r, c) in live:
        prefs = split.worker_prefs_expanded[r]
        arcs_w[(r, c)] = sum(
            1 for c2 in prefs[:prefs.index(c)] if (r, c2) in live
        )
        col = split.column_prefs[c]
        arcs_f[(r, c)] = sum(
            1 for r2 in col[:col.index(r)] if (r2, c) in live
        )
    return arcs_w, arcs_f


class TestBuildDigraph:
    """Test cases for constructing the matching digraph."""

    def test_example_market(self, example1_split):
        """Test the split six-worker market gives 29 vertices on a 6x5 grid."""
        digraph = build_digraph(example1_split)
        assert digraph.shape == (6, 5)
        assert digraph.live_count == 29
        assert not digraph.is_live((5, 2))

    def test_single_vertex(self, single_vertex):
        """Test a 1x1 market has one vertex that is both pointers."""
        assert single_vertex.live_count == 1
        assert single_vertex.best_col(0) == 0
        assert single_vertex.best_row(0) == 0

    def test_cyclic_market(self, cyclic_split):
        """Test the complete 3x3 market keeps all nine vertices."""
        digraph = build_digraph(cyclic_split)
        assert digraph.live_count == 9
        assert [digraph.best_col(r) for r in range(3)] == [2, 0, 1]
        assert [digraph.best_row(c) for c in range(3)] == [0, 1, 2]


class TestOutDegrees:
    """Test cases for implicit arc counting."""

    def test_top_choice_has_no_horizontal_arc(self, example1_split):
        """Test w5 ranks f4#1 first."""
        digraph = build_digraph(example1_split)
        assert digraph.out_degree_w((4, 3)) == 0

    def test_pointer_vertices_have_zero_out_degree(self, example1_split):
        """Test zero out-degree matches the pointer on every live vertex."""
        digraph = build_digraph(example1_split)
        for r, c in digraph.live_vertices():
            assert (digraph.out_degree_w((r, c)) == 0) == (digraph.best_col(r) == c)
            assert (digraph.out_degree_f((r, c)) == 0) == (digraph.best_row(c) == r)

    def test_best_surviving_worker_in_normal_form(self, example1_nf):
        """Test w4 has no vertical arc out of (4,1) once w5 has left f1."""
        assert example1_nf.digraph.out_degree_f((3, 0)) == 0

    def test_dead_vertex_query_is_contract_violation(self, example1_split):
        """Test asking about an unacceptable pair raises."""
        digraph = build_digraph(example1_split)
        with pytest.raises(DigraphContractError):
            digraph.out_degree_w((5, 2))

    def test_matches_explicit_arcs(self, random_markets):
        """Test implicit degrees equal counts over materialized arcs."""
        for inst in random_markets(30, seed=11, max_workers=5, max_positions=5):
            split = split_firms(inst)
            digraph = build_digraph(split)
            # knock out a few vertices so degrees are checked on partial grids too
            for v in digraph.live_vertices()[::3]:
                digraph.delete_vertex(v)
            live = set(digraph.live_vertices())
            arcs_w, arcs_f = explicit_out_degrees(split, live)
            for v in live:
                assert digraph.out_degree_w(v) == arcs_w[v]
                assert digraph.out_degree_f(v) == arcs_f[v]


class TestDeleteVertex:
    """Test cases for vertex deletion."""

    def test_pointer_moves_to_next_choice(self, example1_split):
        """Test deleting (1,1) promotes f2 for w1."""
        digraph = build_digraph(example1_split)
        digraph.delete_vertex((0, 0))
        assert digraph.best_col(0) == 1
        assert digraph.live_count == 28

    def test_delete_only_vertex(self, single_vertex):
        """Test deleting the last vertex empties its row and column."""
        single_vertex.delete_vertex((0, 0))
        assert single_vertex.best_col(0) is None
        assert single_vertex.best_row(0) is None
        assert single_vertex.nonempty_rows() == []

    def test_column_pointer_recomputed(self, example1_nf):
        """Test deleting (2,3) leaves w1 as f3's best surviving worker."""
        digraph = example1_nf.digraph.snapshot()
        assert digraph.best_row(2) == 1
        digraph.delete_vertex((1, 2))
        assert digraph.best_row(2) == 0

    def test_only_the_vertex_dies(self, example1_split):
        """Test deletion leaves every other vertex alone."""
        digraph = build_digraph(example1_split)
        before = set(digraph.live_vertices())
        digraph.delete_vertex((2, 3))
        assert set(digraph.live_vertices()) == before - {(2, 3)}

    def test_delete_dead_vertex_raises(self, single_vertex):
        """Test a vertex cannot be deleted twice."""
        single_vertex.delete_vertex((0, 0))
        with pytest.raises(DigraphContractError):
            single_vertex.delete_vertex((0, 0))

    def test_flag_cleared_on_delete(self, example1_split):
        """Test a deleted vertex loses its marker."""
        digraph = build_digraph(example1_split)
        digraph.set_flag((0, 0), FLAG_OUT)
        digraph.delete_vertex((0, 0))
        assert digraph.flag((0, 0)) == 0


class TestSnapshot:
    """Test cases for independent copies."""

    def test_copy_then_delete_leaves_original(self, example1_split):
        """Test changes to a snapshot do not leak back."""
        digraph = build_digraph(example1_split)
        clone = digraph.snapshot()
        clone.delete_vertex((0, 0))
        clone.set_flag((1, 1), FLAG_IN)
        assert digraph.is_live((0, 0))
        assert digraph.best_col(0) == 0
        assert digraph.flag((1, 1)) == 0

    def test_empty_snapshot(self, single_vertex):
        """Test snapshot of an empty digraph is empty."""
        single_vertex.delete_vertex((0, 0))
        assert single_vertex.snapshot().live_count == 0

    def test_equality_is_structural(self, example1_split):
        """Test snapshots compare by live set and markers."""
        digraph = build_digraph(example1_split)
        clone = digraph.snapshot()
        assert clone == digraph
        clone.set_flag((0, 0), FLAG_IN)
        assert clone != digraph


class TestDotExport:
    """Test cases for rendering."""

    def test_markers_and_hasse_arcs(self, example1_split, example1_nf):
        """Test forced and forbidden vertices are coloured and arcs are not transitive."""
        digraph = example1_nf.digraph.snapshot()
        digraph.set_flag((0, 1), FLAG_IN)
        digraph.set_flag((3, 0), FLAG_OUT)
        dot = digraph.to_dot(example1_split)
        source = dot.source
        assert source.count("fillcolor=palegreen") == 1
        assert source.count("fillcolor=lightcoral") == 1
        assert "(w4, f4#2)" in source
        # one arc per adjacent pair of survivors in each row and column
        expected = sum(len(digraph.row_live(r)) - 1 for r in digraph.nonempty_rows())
        expected += sum(len(digraph.col_live(c)) - 1 for c in digraph.nonempty_cols())
        assert source.count("->") == expected

    def test_plain_labels_without_split(self, single_vertex):
        """Test vertices fall back to 1-based coordinates."""
        assert "(1,1)" in single_vertex.to_dot().source
