from grid_oracle import FIGURE_EIGHT, TREFOIL, UNKNOT, empty_rectangles, gradings, hfk_hat


def euler(ranks):
    out = {}
    for (m, a), r in ranks.items():
        out[a] = out.get(a, 0) + (-1) ** (m % 2) * r
    return {a: c for a, c in out.items() if c}


def test_unknot_grid_has_rank_one():
    assert hfk_hat(*UNKNOT) == {(0, 0): 1}


def test_trefoil_grid_ranks_and_euler():
    ranks = hfk_hat(*TREFOIL)
    assert sorted(ranks.values()) == [1, 1, 1]
    assert sorted(a for _, a in ranks) == [-1, 0, 1]
    assert euler(ranks) == {-1: 1, 0: -1, 1: 1}


def test_figure_eight_grid_ranks_and_euler():
    ranks = hfk_hat(*FIGURE_EIGHT)
    assert sum(ranks.values()) == 5
    assert euler(ranks) == {-1: -1, 0: 3, 1: -1}


def test_grid_rectangles_lower_maslov_by_one():
    O, X = TREFOIL
    x = (0, 1, 2, 3, 4)
    m, a = gradings(x, O, X)
    for y in empty_rectangles(x, O, X):
        assert gradings(y, O, X) == (m - 1, a)
