import json
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from ramseylab.builder import (
    ABParams,
    build_AB,
    build_EF,
    extend_generic,
    glue_lines,
    triangle_vertices,
    verify_AB,
    write_fixture,
)
from ramseylab.errors import InfeasiblePattern, ParameterError, PreconditionFailed
from ramseylab.predim import (
    GOLDEN_CONJUGATE,
    SQRT2_MINUS_1,
    DeltaValue,
    Graph,
    complete_graph,
    delta,
    empty_graph,
    is_closed,
    kalpha_member,
    min_delta_over,
    parse_alpha,
    read_graph,
    rel_delta,
)

A_ = SQRT2_MINUS_1


def indexed(G: Graph):
    """Relabel to 0..n-1 for the bitmask oracles."""
    idx = {v: i for i, v in enumerate(G.vertices)}
    return len(G), [(idx[u], idx[v]) for u, v in G.edges()]


# --- EF -----------------------------------------------------------------------


def test_ef_reference_fixture():
    F = empty_graph(4)
    EF, p, rep = build_EF(A_, 10, F)
    assert rep.ok, rep.failures()
    assert (p.r, p.s) == (7, 17)
    E = set(p.E)
    # count E's vertices and the edges touching E directly
    touching = sum(1 for u, v in EF.edges() if u in E or v in E)
    assert (len(E), touching) == (7, 17)
    d = rel_delta(EF, p.E, p.F, A_)
    assert str(d) == "24-17√2"
    assert oracles.sign_quad(Fraction(24), Fraction(-17), 2) < 0
    assert oracles.sign_quad(Fraction(24) + Fraction(1, 10), Fraction(-17), 2) > 0
    n, edges = indexed(EF)
    assert n == 11
    assert oracles.brute_kalpha(n, oracles.subset_stats(n, edges), oracles.SQRT2)
    assert oracles.count_triangles(n, edges) == 0


def test_ef_preconditions():
    with pytest.raises(PreconditionFailed):
        build_EF(A_, 10, empty_graph(3))
    with pytest.raises(PreconditionFailed):
        build_EF(A_, 10, complete_graph(4))  # no two disjoint non-edges
    with pytest.raises(PreconditionFailed):
        build_EF(A_, 10, Graph(range(10), [(u, v) for u, v in combinations(range(6), 2)]))  # K6 leaves K_alpha
    with pytest.raises(ParameterError):
        build_EF(A_, 0, empty_graph(4))


@st.composite
def sparse_bases(draw):
    n = draw(st.integers(4, 6))
    pairs = list(combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=n))
    return Graph(range(n), chosen)


@settings(max_examples=12)
@given(sparse_bases())
def test_ef_keeps_triangle_count(F):
    try:
        EF, p, rep = build_EF(A_, 10, F)
    except PreconditionFailed:
        return
    assert rep.ok, rep.failures()
    n, edges = indexed(EF)
    fn, fedges = indexed(F)
    assert oracles.count_triangles(n, edges) == oracles.count_triangles(fn, fedges)


# --- (A; B) ---------------------------------------------------------------------


def test_ab_reference_fixture(ab):
    A, B, p, rep = ab
    assert rep.ok, rep.failures()
    assert (len(B), B.n_edges()) == (37, 85)
    assert delta(B, A_) == DeltaValue(37, 85, A_)
    n, edges = indexed(B)
    assert oracles.count_triangles(n, edges) == 3
    tri = [frozenset(triangle_vertices(j)) for j in range(3)]
    # closedness by two independent engines
    for t in tri:
        assert is_closed(t, B, A_, engine="pieces")
        assert is_closed(t, B, A_, engine="mincut")
    # delta(B/A) = 34 - 82 alpha < delta(A)/2, decided by the oracle sign rule
    assert rel_delta(B, B.vertices, tri[0], A_) == DeltaValue(34, 82, A_)
    # (34 - 82a) - (3 - 3a)/2 with a = sqrt2 - 1 equals 113 - (161/2) sqrt2
    assert oracles.sign_quad(Fraction(113), Fraction(-161, 2), 2) < 0


def test_ab_conditions_by_mincut(ab):
    A, B, p, _ = ab
    tri = [frozenset(triangle_vertices(j)) for j in range(3)]
    dB = delta(B, A_)
    for t in tri:
        assert delta(B.induced(t), A_) <= dB  # no copy outweighs B
    for s, t in combinations(tri, 2):
        cl, val = min_delta_over(s | t, B, A_, engine="mincut")
        assert cl == frozenset(B.vertices) and val == dB  # B is the unique minimizer above any two copies


def test_ab_parameter_checks():
    with pytest.raises(PreconditionFailed):
        build_AB(A_, 2, 17)
    with pytest.raises(ParameterError):
        build_AB(A_, 3, 8)


@pytest.mark.parametrize("n,C", [(4, 23), (4, 30)])
def test_ab_larger_n(n, C):
    A, B, p, rep = build_AB(A_, n, C)
    assert rep.ok, rep.failures()
    assert len(p.pieces) == 2**n - n - 1


def test_ab_golden_alpha():
    A, B, p, rep = build_AB(GOLDEN_CONJUGATE, 3, 17)
    assert rep.ok, rep.failures()


def test_verify_ab_catches_a_tampered_graph(ab):
    A, B, p, _ = ab
    x = p.pieces[0][1][0]
    extra = next(v for v in B.vertices if v != x and not B.has_edge(x, v) and v >= 9)
    tampered = Graph(B.vertices, B.edges() + [(x, extra)])
    assert not verify_AB(A, tampered, p).ok


def test_fixture_round_trip(tmp_path, ab):
    A, B, p, rep = ab
    pj = p.to_json()
    paths = write_fixture(tmp_path, "ab", B, pj, rep)
    assert [q.name for q in paths] == ["ab.graph.json", "ab.params.json", "ab.report.json"]
    B2 = read_graph(tmp_path / "ab.graph.json")
    assert B2 == B and B2.decomposition == B.decomposition
    data = json.loads((tmp_path / "ab.params.json").read_text())
    p2 = ABParams(
        parse_alpha(data["alpha"]),
        data["n"],
        data["C"],
        data["r_u"],
        data["s_u"],
        tuple((tuple(q["u"]), tuple(q["vertices"])) for q in data["pieces"]),
    )
    assert verify_AB(A, B2, p2).to_json() == json.loads((tmp_path / "ab.report.json").read_text())


# --- gluing and extension -----------------------------------------------------------


def test_chain_and_star_amalgams(chain3, star3, ab):
    A, B, _, _ = ab
    for g, _ in (chain3, star3):
        assert len(g.graph) == 3 * 37 - 2 * 3
        assert kalpha_member(g.graph, A_)[0]
        for m in g.copies:
            assert is_closed(set(m.values()), g.graph, A_)


def test_cycle_of_three_is_infeasible(ab):
    A, B, _, _ = ab
    with pytest.raises(InfeasiblePattern):
        glue_lines(B, A, "cycle", 3, A_)


@pytest.mark.parametrize("pattern,count", [("zigzag", 3), ("chain", 0), ("cycle", 2)])
def test_glue_rejects_bad_patterns(ab, pattern, count):
    A, B, _, _ = ab
    with pytest.raises(InfeasiblePattern):
        glue_lines(B, A, pattern, count, A_)


def test_extend_generic_from_a_triangle(ab):
    A, B, _, _ = ab
    M = complete_graph(3)
    M1 = extend_generic(M, M.vertices, B, A, A_)
    assert len(M1) == 37
    M2 = extend_generic(M1, set(M.vertices), B, A, A_)
    assert len(M2) == 37 + 34
    assert kalpha_member(M2, A_)[0]
    assert is_closed(M1.vertices, M2, A_)


def test_extend_generic_needs_closed_base(ab):
    A, B, _, _ = ab
    # in K4 the fourth vertex adds 1 - 3 alpha < 0 to any triangle
    M = complete_graph(4)
    with pytest.raises(PreconditionFailed):
        extend_generic(M, {0, 1, 2}, B, A, A_)
