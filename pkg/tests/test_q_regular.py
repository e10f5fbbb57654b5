import pytest

from errors import InconclusiveError, UnsupportedAlgebraError
from q_regular import (candidate_from_names, check_q_regular, default_truncation,
                       koszul_transfer_check, root_vectors_typeA, skew_candidate)


@pytest.fixture(scope="module")
def a2():
    return root_vectors_typeA(2, 3)


def test_root_vectors_are_ordered_by_height(a2):
    assert a2.names[-1] == 'E13'
    assert sorted(a2.names) == ['E12', 'E13', 'E23']
    assert a2.extras['lex_order'] == ['E12', 'E13', 'E23']


def test_character_of_highest_root(a2):
    j = a2.names.index('E13')
    assert a2.characters[j] == (1, 2)
    # exponents of zeta, with q = zeta^2 at l = 3
    assert a2.character_values(j) == [2, 1]


def test_root_vectors_of_a2_are_q_regular(a2):
    report = check_q_regular(a2)
    assert report['passed']
    assert report['truncation'] == default_truncation(a2)
    assert report['violations'] == []
    assert 'certified up to height' in report['note']


def test_koszul_transfer_of_a2(a2):
    report = koszul_transfer_check(a2, workers=2)
    assert report['exterior_central']
    assert report['exterior_generators'] == 3
    assert report['koszul_acyclic']
    assert report['koszul_h0'][:3] == [1, 2, 4]
    assert sum(report['koszul_h0']) == 27
    assert report['koszul_resolves_fiber']
    assert report['passed']


def test_skew_generators_of_quantum_complete_intersection(qci):
    cand = skew_candidate(qci)
    assert cand.names == ['x1', 'x2']
    assert check_q_regular(cand)['passed']
    transfer = koszul_transfer_check(cand)
    assert transfer['passed']
    assert sum(transfer['koszul_h0']) == 9


def test_truncation_below_first_products_is_inconclusive(qci):
    with pytest.raises(InconclusiveError):
        check_q_regular(skew_candidate(qci), truncation=1)


def test_unknown_generators_and_non_skew_algebras(qci, heisenberg):
    with pytest.raises(UnsupportedAlgebraError):
        candidate_from_names(qci, ['x3'])
    with pytest.raises(UnsupportedAlgebraError):
        skew_candidate(heisenberg)


def test_rank_four_is_not_built():
    with pytest.raises(UnsupportedAlgebraError):
        root_vectors_typeA(4, 3)
