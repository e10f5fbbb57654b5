import pytest

from errors import ResolutionError
from fd_modules import free_module, trivial_module
from homology import (expected_dims, ext_ring_polynomial_check, ext_table, lift_independence_check,
                      minimal_resolution, naturality_check, q_lift)
from module_catalog import parse_module


def test_resolution_of_k_over_truncated_polynomial(truncated, shared_cache):
    res = minimal_resolution(trivial_module(truncated), 6, cache=shared_cache)
    assert res.ranks == [1] * 7
    assert res.degree == 6
    assert res.get_stats()['ranks'] == [1] * 7


def test_resolution_of_k_over_quantum_complete_intersection(qci, shared_cache):
    res = minimal_resolution(trivial_module(qci), 6, cache=shared_cache)
    assert res.ranks == [1, 2, 3, 4, 5, 6, 7]


def test_free_module_resolves_in_degree_zero(qci):
    res = minimal_resolution(free_module(qci), 3)
    assert res.ranks == [1, 0, 0, 0]


def test_negative_degree_bound_is_rejected(truncated):
    with pytest.raises(ResolutionError):
        minimal_resolution(trivial_module(truncated), -1)


def test_resolution_is_served_from_cache(truncated, shared_cache):
    k = trivial_module(truncated)
    first = minimal_resolution(k, 4, cache=shared_cache)
    second = minimal_resolution(k, 4, cache=shared_cache)
    assert first is second


def test_ext_dims_truncated_polynomial(truncated, shared_cache):
    k = trivial_module(truncated)
    table = ext_table(k, k, 6, cache=shared_cache)
    assert table.dims == [1] * 7
    assert table.generation_degree() == 1


def test_ext_dims_quantum_complete_intersection(qci, shared_cache):
    k = trivial_module(qci)
    equivariant = ext_table(k, k, 4, cache=shared_cache)
    assert equivariant.dims == [1, 0, 2, 0, 3]
    plain = ext_table(k, k, 4, equivariant=False, cache=shared_cache)
    assert plain.dims == [1, 2, 3, 4, 5]


def test_ext_dims_function_algebra(functions, shared_cache):
    k = trivial_module(functions)
    table = ext_table(k, k, 4, cache=shared_cache)
    assert table.dims == [1, 2, 3, 4, 5]


def test_theta_operators_commute_and_are_lift_independent(qci, shared_cache):
    k = trivial_module(qci)
    table = ext_table(k, k, 6, cache=shared_cache)
    assert table.theta_commute()['passed']
    assert lift_independence_check(k, k, 4, cache=shared_cache)['passed']


def test_theta_cokernel_of_cyclic_module(qci, shared_cache):
    V = parse_module(qci, 'cyclic:x1')
    table = ext_table(V, trivial_module(qci), 5, equivariant=False, cache=shared_cache)
    rows = table.to_rows()
    assert [row['degree'] for row in rows] == list(range(6))
    assert all(row['theta_cokernel'] <= row['dim'] for row in rows)


def test_naturality_of_identity_map(truncated, shared_cache):
    V = parse_module(truncated, 'truncated:x1:2')
    table = ext_table(V, trivial_module(truncated), 4, cache=shared_cache)
    identity = V.fieldspec.identity(V.dim)
    assert naturality_check(identity, table, table)['passed']


def test_expected_dims_series():
    assert expected_dims(0, 2, 4) == [1, 0, 2, 0, 3]
    assert expected_dims(1, 1, 5) == [1, 1, 1, 1, 1, 1]
    assert expected_dims(2, 2, 3) == [1, 2, 3, 4]


def test_ext_ring_polynomial_for_quantum_complete_intersection(qci, shared_cache):
    report = ext_ring_polynomial_check(qci, 6, cache=shared_cache)
    assert report['passed']
    assert report['polynomial_rank'] == 2
    assert report['exterior_rank'] == 0


def test_ext_ring_polynomial_for_truncated_polynomial(truncated, shared_cache):
    report = ext_ring_polynomial_check(truncated, 6, cache=shared_cache)
    assert report['passed']
    assert report['dims'] == [1] * 7


@pytest.mark.slow
def test_ext_ring_of_heisenberg_is_not_polynomial_on_theta(heisenberg, shared_cache):
    report = ext_ring_polynomial_check(heisenberg, 4, cache=shared_cache)
    assert not report['passed']


def test_lift_of_truncated_resolution(truncated, shared_cache):
    res = minimal_resolution(trivial_module(truncated), 4, cache=shared_cache)
    lifted = q_lift(truncated, res)
    F = truncated.fieldspec
    assert lifted.first_nonzero_degree(0) == 2
    assert not F.is_zero(lifted.theta_constant(0, 0, 0, 0))
    assert len(lifted.theta_rows(0, 0)) == res.ranks[2]
    perturbed = q_lift(truncated, res, seed=3)
    assert perturbed.seed == 3
    assert perturbed.bound != lifted.bound
