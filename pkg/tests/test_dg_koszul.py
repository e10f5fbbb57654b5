import pytest

from dg_koszul import (ContractionComplex, TwistedProduct, e1_bound, exterior_contraction_complex,
                       ext_q_bounded, hom_complex, koszul_duality_check, q_koszul_resolution,
                       verify_twtt)
from errors import UnsupportedAlgebraError
from fd_modules import simples_module, trivial_module
from hopf_algebras import build_truncated_polynomial


def test_q_koszul_resolution_ranks_and_identities(qci):
    K = q_koszul_resolution(qci)
    assert K.ranks == [1, 2, 1]
    assert K.checks == {'square_zero': True, 'homotopy': True, 'left_twist': True}


def test_q_koszul_resolution_in_rank_three():
    K = q_koszul_resolution(build_truncated_polynomial(3, 3))
    assert K.ranks == [1, 3, 3, 1]
    assert all(K.checks.values())


def test_q_koszul_needs_skew_polynomial_integration(heisenberg, no_tpp):
    with pytest.raises(UnsupportedAlgebraError):
        q_koszul_resolution(heisenberg)
    with pytest.raises(UnsupportedAlgebraError):
        q_koszul_resolution(no_tpp)


def test_hom_complex_against_trivial_module(qci):
    K = q_koszul_resolution(qci)
    k = trivial_module(qci)
    assert hom_complex(K, k, equivariant=False).cohomology_dims() == [1, 2, 1]
    assert hom_complex(K, k).cohomology_dims() == [1, 0, 0]


@pytest.mark.parametrize("n", [1, 2])
def test_koszul_duality(qci, n):
    report = koszul_duality_check(qci.fieldspec, n, 6)
    assert report['square_zero']
    assert report['dims'] == [1] + [0] * 6
    assert report['passed']


def test_twisted_product_degrees(qci):
    product = TwistedProduct(exterior_contraction_complex(qci.fieldspec, 2), 2, 4)
    assert product.components(0) == [(0, 0)]
    assert product.components(3) == [(1, 1)]
    assert product.dimension(2) == 3


def test_twisted_product_agrees_with_ext_for_trivial_module(qci, shared_cache):
    k = trivial_module(qci)
    report = verify_twtt(k, k, 5, cache=shared_cache)
    assert report['passed']
    assert [row['ext'] for row in report['degrees']] == [1, 0, 2, 0, 3, 0]
    assert report['ext_q_bounded']
    assert all(t <= b for t, b in zip([row['twisted'] for row in report['degrees']], report['e1_bound']))


def test_twisted_product_agrees_with_ext_into_simples(qci, shared_cache):
    report = verify_twtt(trivial_module(qci), simples_module(qci), 4, cache=shared_cache)
    assert report['passed']


def test_e1_bound_counts_polynomial_times_exterior():
    assert e1_bound([1, 2, 1], 2, 4) == [1, 2, 3, 4, 5]


def test_ext_q_bound_rejects_inconsistent_data(qci):
    F = qci.fieldspec
    C = exterior_contraction_complex(F, 2)
    assert ext_q_bounded(C, [1, 0, 0, 0, 0], 2)
    assert not ext_q_bounded(C, [1, 2, 3, 4, 6], 2)
    # three cochain degrees cannot come from a rank one resolution
    assert not ext_q_bounded(C, [1], 1)
    broken = ContractionComplex(fieldspec=F, dims=[1, 1, 1],
                                delta=[F.identity(1), F.identity(1), F.zeros(0, 1)],
                                contractions=[])
    assert not ext_q_bounded(broken, [0, 0, 0], 2)
