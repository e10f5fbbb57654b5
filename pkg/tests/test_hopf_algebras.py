import pytest

from errors import HopfStructureError, InvalidFieldError
from hopf_algebras import (build_group_scheme_functions, build_qci, build_quantum_borel_A,
                           build_restricted_enveloping, hopf_axioms_check, type_a_roots)
from module_catalog import build_algebra, get_named_algebra


@pytest.mark.parametrize("name, dimension, simples", [
    ('truncated-p3', 3, 1),
    ('functions-p3-n2', 9, 1),
    ('no-tpp', 18, 2),
    ('qci-l3-n1', 9, 3),
    ('qci-l3-n2-standard', 81, 9),
    ('qci-l3-n2-extended', 729, 81),
    ('heisenberg-p3', 27, 1),
])
def test_named_algebra_dimensions(name, dimension, simples):
    H = build_algebra(get_named_algebra(name))
    info = H.describe()
    assert info['dimension'] == dimension
    assert info['simples'] == simples


@pytest.mark.parametrize("name", ['truncated-p3', 'functions-p3-n2', 'no-tpp', 'qci-l3-n1',
                                  'qci-l3-n2-standard', 'heisenberg-p3', 'borel-a1-l5'])
def test_hopf_axioms_hold(name):
    H = build_algebra(get_named_algebra(name))
    report = hopf_axioms_check(H)
    assert report['passed'], report['checks']
    assert all(entry.get('witness') is None for entry in report['checks'].values())


@pytest.mark.slow
def test_hopf_axioms_hold_for_extended_qci_and_borel_a2():
    for name in ('qci-l3-n2-extended', 'borel-a2-l5'):
        assert hopf_axioms_check(build_algebra(get_named_algebra(name)))['passed']


def test_primitive_coproduct_breaks_bialgebra_compatibility():
    H = build_qci(3, [[1, 1], [-1, 1]], primitive_coproduct=True)
    report = hopf_axioms_check(H)
    assert not report['passed']
    assert not report['checks']['bialgebra_compatibility']['passed']
    assert report['checks']['associativity']['passed']
    compatibility = report['checks']['bialgebra_compatibility']
    assert compatibility['first_failure'] is not None
    # the first basis pair of u (x) u where Delta of the relation survives
    assert len(compatibility['witness']['basis']) == 2
    assert all(isinstance(name, str) for name in compatibility['witness']['basis'])
    assert compatibility['witness']['coefficient'] != '0'
    assert report['checks']['coassociativity']['witness'] is None


def test_qci_rejects_bad_parameters():
    with pytest.raises(InvalidFieldError):
        build_qci(4, [[1]])
    with pytest.raises(HopfStructureError):
        build_qci(3, [[1, 1], [1, 1]])
    with pytest.raises(HopfStructureError):
        build_qci(3, [[2]])
    with pytest.raises(HopfStructureError):
        build_qci(3, [[1]], grouplikes='twisted')


def test_group_scheme_rejects_p_dividing_group_order():
    with pytest.raises(HopfStructureError):
        build_group_scheme_functions(2, 2, [[1, 0]])


def test_no_tpp_deformation_base_is_not_hopf(no_tpp, functions):
    assert no_tpp.kind == 'blocks'
    assert not no_tpp.z_is_hopf
    assert functions.kind == 'local'
    assert functions.z_is_hopf


def test_restricted_enveloping_checks_jacobi_and_nilpotency():
    with pytest.raises(HopfStructureError):
        # [x, y] = x is solvable, not nilpotent
        build_restricted_enveloping(3, {(0, 1): {0: 1}}, 2)
    H = build_restricted_enveloping(3, {(0, 1): {2: 1}}, 3)
    assert H.extras['lcs_basis'][0] == 'z'
    assert H.pbw.heights == [1, 1, 2]


def test_borel_a2_root_vectors():
    H = build_quantum_borel_A(2, 5)
    assert type_a_roots(2) == [(1, 2), (1, 3), (2, 3)]
    assert H.pbw.names == ['E12', 'E13', 'E23']
    assert H.pbw.dimension == 125
    assert H.group.order == 75
    assert H.pbw.heights == [1, 2, 1]
    assert set(H.pbw.definitions) == {1}


def test_borel_a1_is_the_rank_one_quantum_complete_intersection():
    qci = build_qci(3, [[1]])
    ad = build_quantum_borel_A(1, 3, 'ad')
    assert ad.dimension == qci.dimension == 9
    assert ad.group.order == qci.group.order == 3
    K, K0 = ad.grouplike_of[0], qci.grouplike_of[0]
    assert ad.kappa(K, ad.gen_labels[0]) == qci.kappa(K0, qci.gen_labels[0]) == 1
    assert ad.pbw.nilpotency == qci.pbw.nilpotency == [3]
    assert hopf_axioms_check(ad)['passed']


def test_borel_a1_simply_connected_adds_a_central_grouplike():
    sc = build_quantum_borel_A(1, 3, 'sc')
    assert sc.group.order == 6
    assert sc.dimension == 18
    K = sc.grouplike_of[0]
    assert sc.kappa(K, sc.gen_labels[0]) == 1
    assert sc.kappa((3,), sc.gen_labels[0]) == 0
