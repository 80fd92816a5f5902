import pytest

from tourpart import tournament_from_edges
from tourpart.generators import paley_tournament, random_tournament, transitive_tournament


@pytest.fixture
def c3():
    return tournament_from_edges(3, [(0, 1), (1, 2), (2, 0)])


@pytest.fixture
def t4():
    return transitive_tournament(4)


@pytest.fixture
def paley7():
    return paley_tournament(7)


@pytest.fixture
def rand():
    return random_tournament
