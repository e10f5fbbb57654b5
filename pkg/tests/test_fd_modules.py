import numpy as np
import pytest

from errors import AlgebraMismatchError, ModuleRelationError, UnsupportedAlgebraError
from fd_modules import (FdModule, adjoint_twist, canonical_half_braiding, carlson_module,
                        check_half_braiding, cyclic_quotient, direct_sum, dual, equivariant_induction,
                        free_module, isomorphism_invariants, one_dimensional, radical_series,
                        random_module, simples_module, tensor, trivial_module, truncated_module)
from module_catalog import parse_module


def test_standard_modules(qci):
    assert trivial_module(qci).dim == 1
    assert simples_module(qci).dim == 9
    assert free_module(qci).dim == 9
    assert cyclic_quotient(qci, [[0]]).dim == 3
    assert cyclic_quotient(qci, [[0], [1]]).dim == 1


def test_truncated_module_radical_layers(truncated, no_tpp):
    V = truncated_module(truncated, 0, 2)
    assert V.dim == 2
    assert radical_series(V) == [1, 1]
    W = truncated_module(no_tpp, 1, 3)
    assert W.dim == 3
    assert radical_series(W) == [1, 1, 1]


def test_truncated_module_needs_local_or_block_algebra(qci):
    with pytest.raises(UnsupportedAlgebraError):
        truncated_module(qci, 0, 2)


def test_action_matrices_are_validated(truncated):
    F = truncated.fieldspec
    with pytest.raises(ModuleRelationError):
        FdModule(truncated, [truncated.label_zero], [F.identity(1)])
    with pytest.raises(ModuleRelationError):
        FdModule(truncated, [truncated.label_zero], [F.identity(2)])


def test_tensor_and_dual_dimensions(qci):
    V = cyclic_quotient(qci, [[0]])
    W = free_module(qci)
    assert tensor(V, W).dim == 27
    assert dual(V).dim == 3
    assert isomorphism_invariants(dual(trivial_module(qci)))['dim'] == 1


def test_tensor_with_free_module_is_free(functions):
    V = parse_module(functions, 'cyclic:x1')
    P = free_module(functions)
    product = tensor(V, P)
    assert product.dim == 27
    assert isomorphism_invariants(product)['top'] == {str(functions.label_zero): 3}


def test_tensor_across_algebras_is_rejected(qci, truncated):
    with pytest.raises(AlgebraMismatchError):
        tensor(trivial_module(qci), trivial_module(truncated))


def test_random_modules_are_seeded(qci):
    a = random_module(qci, np.random.default_rng(5), max_dim=12)
    b = random_module(qci, np.random.default_rng(5), max_dim=12)
    assert 0 < a.dim <= 12
    assert a.content_hash() == b.content_hash()


def test_canonical_half_braiding_is_valid(qci):
    for spec in ('k', 'cyclic:x1', 'free'):
        report = check_half_braiding(canonical_half_braiding(parse_module(qci, spec)))
        assert report['passed'], report['checks']


def test_canonical_half_braiding_needs_smash_product(no_tpp):
    with pytest.raises(UnsupportedAlgebraError):
        canonical_half_braiding(trivial_module(no_tpp))


def test_equivariant_induction_over_blocks(no_tpp):
    V = parse_module(no_tpp, 'truncated:x2:3')
    b = equivariant_induction(V)
    assert b.module.dim == 6
    assert b.kind == 'equivariant'
    assert check_half_braiding(b)['passed']


def test_carlson_modules(functions, shared_cache):
    L = carlson_module(functions, 2, theta_coefficients=[1, 0], cache=shared_cache)
    assert L.dim == 9
    assert not L.flags['degenerate']
    omega = carlson_module(functions, 2, theta_coefficients=[0, 0], cache=shared_cache)
    assert omega.dim == 10
    assert omega.flags['degenerate']


def test_carlson_module_arguments(functions, shared_cache):
    with pytest.raises(UnsupportedAlgebraError):
        carlson_module(functions, 3, theta_coefficients=[1, 0], cache=shared_cache)
    with pytest.raises(ModuleRelationError):
        carlson_module(functions, 2, cocycle=[1], cache=shared_cache)
    with pytest.raises(ModuleRelationError):
        carlson_module(functions, 2, cache=shared_cache)


def test_tensor_is_associative_on_random_triples(qci):
    F = qci.fieldspec
    rng = np.random.default_rng(23)
    for _ in range(100):
        U, V, W = (random_module(qci, rng, max_dim=3) for _ in range(3))
        left = tensor(tensor(U, V), W)
        right = tensor(U, tensor(V, W))
        # both sides order the basis u (x) v (x) w lexicographically
        assert left.labels == right.labels
        assert all(F.equal(a, b) for a, b in zip(left.actions, right.actions))
        assert isomorphism_invariants(left) == isomorphism_invariants(right)


def test_tensor_with_both_blocks_splits_into_twisted_copies(no_tpp):
    sigma = next(g for g in no_tpp.label_elements() if g != no_tpp.label_zero)
    V = truncated_module(no_tpp, 1, 3)
    V_prime = truncated_module(no_tpp, 0, 3)
    assert isomorphism_invariants(adjoint_twist(V, sigma)) == isomorphism_invariants(V_prime)
    k_sigma = one_dimensional(no_tpp, sigma)
    product = tensor(V, direct_sum([k_sigma, trivial_module(no_tpp)]))
    expected = direct_sum([tensor(k_sigma, V_prime), V])
    assert product.dim == 6
    assert isomorphism_invariants(product) == isomorphism_invariants(expected)
