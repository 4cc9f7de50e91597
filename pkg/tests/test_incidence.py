import random
from itertools import combinations, product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ramseylab.errors import InvalidInput, NoMatchingRow, NotFree, PartialColoring, PreconditionFailed
from ramseylab.incidence import (
    Coloring,
    IncidenceStructure,
    consistent_coloring,
    fano_plane,
    find_cycle,
    is_free_k_pseudoplane,
    is_k_pseudoplane,
    line_distance,
    peel_to_fixpoint,
    verify_coloring,
)
from ramseylab.matrices import BinaryMatrix, k_config_check

FULL3 = BinaryMatrix.from_rows(list(product((0, 1), repeat=3)))


@st.composite
def structures(draw):
    n_points = draw(st.integers(3, 9))
    triples = list(combinations(range(n_points), 3))
    lines = draw(st.lists(st.sampled_from(triples), unique=True, min_size=1, max_size=7))
    shuffled = [tuple(draw(st.permutations(ln))) for ln in lines]
    return IncidenceStructure.abstract({i: ln for i, ln in enumerate(shuffled)}, points=range(n_points))


def adversarial_candidates():
    rows = list(product((0, 1), repeat=3))
    for r0 in rows:
        for c, v in product(range(3), (0, 1)):
            rest = [r for r in rows if r != r0 and r[c] != v]
            yield BinaryMatrix.from_rows([r0] + rest)


# --- Fano plane -------------------------------------------------------------------


def test_fano_is_a_pseudoplane_but_not_free():
    I = fano_plane()
    assert is_k_pseudoplane(I, 2)
    with pytest.raises(InvalidInput):
        is_k_pseudoplane(I, 1)
    free, state = is_free_k_pseudoplane(I, 2)
    assert not free and state.alive_points(I)


def test_fano_verdict_is_order_independent():
    I = fano_plane()
    rnd = random.Random(0)
    assert all(not is_free_k_pseudoplane(I, 2, random.Random(rnd.random()))[0] for _ in range(10))


def test_fano_has_a_triangle_of_lines():
    cyc = find_cycle(fano_plane(), 3)
    assert cyc is not None
    lines, meets = cyc
    assert len(set(lines)) == 3 and len(set(meets)) == 3


def test_coloring_refuses_fano():
    with pytest.raises(NotFree):
        consistent_coloring(fano_plane(), FULL3, 2)


def test_find_cycle_needs_three_lines():
    with pytest.raises(InvalidInput):
        find_cycle(fano_plane(), 2)


# --- extracted structures ---------------------------------------------------------------


def test_chain_structure(chain3):
    _, I = chain3
    assert len(I.points) == 7 and len(I.lines) == 3
    assert all(len(ln.points) == 3 and ln.extra_mass == 28 for ln in I.lines)
    assert is_k_pseudoplane(I, 2)
    ids = [ln.id for ln in I.lines]
    dist = sorted(line_distance(I, a, b) for a, b in combinations(ids, 2))
    assert dist == [1, 1, 2]
    assert find_cycle(I, 3) is None


def test_star_structure(star3):
    _, I = star3
    shared = set.intersection(*(set(ln.points) for ln in I.lines))
    assert len(shared) == 1
    assert is_k_pseudoplane(I, 2)


@pytest.mark.parametrize("which", ["chain3", "star3"])
def test_amalgams_are_free_in_every_order(which, request):
    _, I = request.getfixturevalue(which)
    verdicts = {is_free_k_pseudoplane(I, 2, random.Random(s))[0] for s in range(10)}
    assert verdicts == {True}


def test_coloring_the_chain(chain3):
    _, I = chain3
    f = consistent_coloring(I, FULL3, 2)
    assert verify_coloring(I, FULL3, f)


def test_adversarial_matrix(chain3):
    _, I = chain3
    hits = []
    for M in adversarial_candidates():
        try:
            consistent_coloring(I, M, 2, check=False)
        except NoMatchingRow:
            hits.append(M)
    assert hits
    for M in hits:
        assert not k_config_check(M, 2).holds
        with pytest.raises(PreconditionFailed):
            consistent_coloring(I, M, 2, check=True)


def test_width_mismatch(chain3):
    _, I = chain3
    with pytest.raises(PreconditionFailed):
        consistent_coloring(I, BinaryMatrix.from_rows(list(product((0, 1), repeat=4))), 2)


def test_partial_coloring_is_rejected(chain3):
    _, I = chain3
    with pytest.raises(PartialColoring):
        verify_coloring(I, FULL3, Coloring({0: 1}))


def test_json_round_trips(chain3):
    _, I = chain3
    J = IncidenceStructure.from_json(I.to_json())
    assert [ln.points for ln in J.lines] == [ln.points for ln in I.lines]
    f = consistent_coloring(J, FULL3, 2)
    assert Coloring.from_json(f.to_json(), J) == f


def test_structure_validation():
    with pytest.raises(InvalidInput):
        IncidenceStructure.abstract({0: (0, 1), 1: (1, 9)}, points=[0, 1])
    with pytest.raises(InvalidInput):
        IncidenceStructure.abstract({0: (0, 0)})


def test_peel_log_records_removals(chain3):
    _, I = chain3
    state = peel_to_fixpoint(I, 2)
    assert sorted(state.removed) == [0, 1, 2]
    assert state.to_json()["removed"] == list(state.removed)


# --- properties ---------------------------------------------------------------------------


@given(structures(), st.integers(0, 2**16))
def test_free_verdict_does_not_depend_on_order(I, seed):
    a = is_free_k_pseudoplane(I, 2)[0]
    b = is_free_k_pseudoplane(I, 2, random.Random(seed))[0]
    assert a == b


@given(structures(), st.data())
def test_free_structures_color_from_any_two_config_matrix(I, data):
    if not is_free_k_pseudoplane(I, 2)[0]:
        return
    rows = data.draw(st.sets(st.sampled_from(list(product((0, 1), repeat=3))), min_size=4))
    M = BinaryMatrix.from_rows(sorted(rows))
    if not k_config_check(M, 2).holds:
        return
    assert verify_coloring(I, M, consistent_coloring(I, M, 2))
