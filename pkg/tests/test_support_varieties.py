import pytest

from errors import (InconclusiveError, InvalidDeformationError, InvalidHalfBraidingError,
                    UnsupportedAlgebraError)
from fd_modules import (canonical_half_braiding, equivariant_induction, free_module, simples_module,
                        trivial_half_braiding, trivial_module)
from homology import ext_table, rebased_theta
from module_catalog import parse_module
from support_varieties import (ProjPoint, centralized_tpp_check, cohom_support, deformation_presentation,
                               enumerate_points, hypersurface_member, perfection_invariance_check,
                               rank_variety_oracle, tpp_check)

D = 10
S = 4


def points(*coords, order=3):
    return {str(ProjPoint.make(c, order)) for c in coords}


def test_enumerate_points_counts():
    assert len(enumerate_points(3, 1, 2)) == 4
    assert len(enumerate_points(3, 2, 2)) == 10
    assert [str(c) for c in enumerate_points(3, 1, 2)] == ['[1:0]', '[1:1]', '[1:2]', '[0:1]']


def test_projective_points_are_normalized():
    assert str(ProjPoint.make([2, 1], 3)) == '[1:2]'
    assert ProjPoint.make([0, 2], 9) == ProjPoint.make([0, 1], 9)
    with pytest.raises(ValueError):
        ProjPoint.make([0, 0], 3)


def test_frobenius_degree():
    assert ProjPoint.make([1, 2], 9).degree() == 1
    assert all(c.degree() in (1, 2) for c in enumerate_points(3, 2, 2))


def test_hypersurface_membership_of_cyclic_quotient(qci, shared_cache):
    V = parse_module(qci, 'cyclic:x1')
    order = qci.fieldspec.p
    member, window = hypersurface_member(V, ProjPoint.make([1, 0], order), D, S, cache=shared_cache)
    assert member
    assert window == list(range(D - S + 1, D + 1))
    member, _ = hypersurface_member(V, ProjPoint.make([0, 1], order), D, S, cache=shared_cache)
    assert not member


def test_stability_window_must_fit_degree_bound(qci, shared_cache):
    V = parse_module(qci, 'cyclic:x1')
    with pytest.raises(InconclusiveError):
        hypersurface_member(V, ProjPoint.make([1, 0], qci.fieldspec.p), 4, 8, cache=shared_cache)


def test_support_of_trivial_and_free_modules(functions, shared_cache):
    k = cohom_support(trivial_module(functions), D, S, extension=1, cache=shared_cache)
    assert k.is_everything()
    assert all(k.checks.values())
    P = cohom_support(free_module(functions), D, S, extension=1, sigma_check=False,
                      with_ideal=False, cache=shared_cache)
    assert P.is_empty()


def test_support_agrees_with_rank_variety(functions, shared_cache):
    V = parse_module(functions, 'cyclic:x1')
    support = cohom_support(V, D, S, extension=1, cache=shared_cache)
    oracle = rank_variety_oracle(V, extension=1)
    assert support.point_set() == oracle.point_set()
    assert {str(c) for c in support.points} == points([1, 0])
    assert support.checks['sigma_agrees']
    assert support.describe()['field'] == 'F_3^1'


def test_rank_variety_needs_restricted_polynomial_algebra(qci):
    with pytest.raises(UnsupportedAlgebraError):
        rank_variety_oracle(trivial_module(qci))


@pytest.mark.slow
def test_no_tpp_supports_and_failing_tensor_product_property(no_tpp, shared_cache):
    V = parse_module(no_tpp, 'truncated:x2:3')
    W = parse_module(no_tpp, 'lambda')
    memo = {}
    report = tpp_check(V, W, D, S, extension=1, cache=shared_cache, memo=memo)
    assert report['rhs_points'] == ['[1:0]']
    assert report['lhs_points'] == sorted(points([1, 0], [0, 1]))
    assert report['verdict'] == 'lhs_proper_superset'
    assert not report['weak_inclusion_expected']
    assert len(memo) == 3
    assert memo[W.content_hash()].is_everything()


@pytest.mark.slow
def test_centralized_tpp_holds_for_induced_half_braiding(no_tpp, shared_cache):
    V = parse_module(no_tpp, 'truncated:x2:3')
    braiding = equivariant_induction(V)
    report = centralized_tpp_check(braiding, parse_module(no_tpp, 'lambda'), D, S, extension=1,
                                   cache=shared_cache)
    assert report['verdict'] == 'equal'
    assert report['braiding'] == braiding.kind


def test_tpp_holds_for_quantum_complete_intersection(qci, shared_cache):
    V = parse_module(qci, 'cyclic:x1')
    W = parse_module(qci, 'cyclic:x2')
    report = tpp_check(V, W, D, S, extension=1, cache=shared_cache)
    assert report['weak_inclusion_expected']
    assert report['weak_inclusion_holds']
    assert report['verdict'] == 'equal'


def test_centralized_tpp_with_canonical_braiding(qci, shared_cache):
    braiding = canonical_half_braiding(parse_module(qci, 'cyclic:x1'))
    report = centralized_tpp_check(braiding, trivial_module(qci), D, S, extension=1, cache=shared_cache)
    assert report['verdict'] == 'equal'


def test_invalid_half_braiding_is_rejected(qci, shared_cache):
    braiding = trivial_half_braiding(parse_module(qci, 'cyclic:x1'))
    with pytest.raises(InvalidHalfBraidingError):
        centralized_tpp_check(braiding, trivial_module(qci), D, S, extension=1, cache=shared_cache)


def test_perfection_is_invariant_under_nonlinear_terms(functions, shared_cache):
    V = parse_module(functions, 'cyclic:x1')
    report = perfection_invariance_check(V, 'f1', 'f1 + f2**2', D, S, cache=shared_cache)
    assert report['passed']
    assert report['linear_part'] == [1, 0]
    assert report['verdicts'] == [True, True]
    assert report['higher_terms'][0] < report['higher_terms'][1]


def test_deformations_need_matching_nonzero_linear_parts(functions, shared_cache):
    V = parse_module(functions, 'cyclic:x1')
    with pytest.raises(InvalidDeformationError):
        perfection_invariance_check(V, 'f1**2', 'f2**2', D, S, cache=shared_cache)
    with pytest.raises(InvalidDeformationError):
        perfection_invariance_check(V, 'f1', 'f2', D, S, cache=shared_cache)


def test_support_ideal_cuts_out_exactly_the_members(functions, shared_cache):
    V = parse_module(functions, 'cyclic:x1')
    support = cohom_support(V, D, S, extension=1, sigma_check=False, cache=shared_cache)
    assert support.ideal
    assert {str(c) for c in support.points} == points([1, 0])
    assert support.checks['ideal_consistent']


def test_rebased_presentations_differ_in_higher_terms_only(functions, shared_cache):
    V = parse_module(functions, 'cyclic:x1')
    table = ext_table(V, simples_module(functions), D, cache=shared_cache)
    plain, linear = deformation_presentation(table, 'f1')
    curved, curved_linear = deformation_presentation(table, 'f1 + f2**2')
    assert linear == curved_linear == [1, 0]
    assert plain.parameters == curved.parameters == [1]
    assert plain.full != curved.full
    assert curved.higher_terms > plain.higher_terms
    F = functions.fieldspec
    for a, b in zip(rebased_theta(table, plain)[0], rebased_theta(table, curved)[0]):
        assert F.equal(a, b)


def test_rebased_verdict_matches_point_membership(functions, shared_cache):
    V = parse_module(functions, 'cyclic:x1')
    report = perfection_invariance_check(V, 'f1 + f2', 'f1 + f2 + f1*f2', D, S, cache=shared_cache)
    member, _ = hypersurface_member(V, ProjPoint.make([1, 1], 3), D, S, cache=shared_cache)
    assert report['passed']
    assert report['operators_agree']
    assert report['verdicts'] == [member, member]
    assert not member


def test_deformation_parameter_must_vanish_at_origin(functions, shared_cache):
    V = parse_module(functions, 'cyclic:x1')
    with pytest.raises(InvalidDeformationError):
        perfection_invariance_check(V, '1 + f1', 'f1', D, S, cache=shared_cache)
    with pytest.raises(InvalidDeformationError):
        perfection_invariance_check(V, 'f1 + sin(f2)', 'f1', D, S, cache=shared_cache)
