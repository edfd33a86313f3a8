"""Smoke test for the Python bindings: one game, the oracle, the enumerator."""

import edgegame_py as eg

STAR = "5\n0 1\n0 2\n0 3\n0 4\n"
P6 = "6\n0 1\n1 2\n2 3\n3 4\n4 5\n"
TREE = "12\n0 1\n0 2\n0 3\n0 4\n1 5\n1 6\n1 7\n2 8\n2 9\n3 10\n10 11\n"


def play(tree):
    g = eg.Game(tree)
    while g.winner == "ongoing":
        if g.turn == "alice":
            g.alice_move()
            continue
        # Bob: largest feasible colour on the last uncoloured edge
        edge = g.uncoloured[-1]
        options = g.feasible(edge)
        if options:
            g.bob_colour(edge, options[-1])
        else:
            g.bob_skip()
    return g


def main():
    g = play(TREE)
    assert g.winner == "alice_wins", g.winner
    assert isinstance(g.colours, list) and all(c > 0 for c in g.colours)
    assert isinstance(g.report(), dict)

    g = eg.Game(STAR, k=5)
    g.alice_move()
    assert isinstance(g.feasible(g.uncoloured[0]), list)
    try:
        used = max(g.colours)
        g.bob_colour(g.uncoloured[0], used)
        raise SystemExit("improper colour accepted")
    except ValueError as e:
        assert "improper" in str(e)

    assert eg.index(P6) == 3
    assert eg.index(STAR) == 4
    assert eg.solve(P6, 2) == "bob_wins"
    assert [len(eg.enumerate(n)) - len(eg.enumerate(n - 1)) for n in range(2, 9)] == [1, 1, 2, 3, 6, 11, 23]
    print("python smoke test ok")


if __name__ == "__main__":
    main()
