import pytest

from errors import InconsistentSystemError, InvalidFieldError
from fields import default_prime, make_field


@pytest.fixture
def F():
    return make_field('prime', 3)


def test_default_prime_is_one_mod_l():
    assert default_prime(3) == 7
    assert default_prime(5) == 11
    assert default_prime(1, minimum=2) == 2


def test_prime_field_root_of_unity(F):
    assert F.p == 7
    assert not F.eq(F.zeta, F.one)
    assert F.eq(F.power(F.zeta, 3), F.one)
    assert F.eq(F.zeta_power(4), F.zeta)


@pytest.mark.parametrize("p", [11, 9])
def test_prime_field_rejects_bad_characteristic(p):
    with pytest.raises(InvalidFieldError):
        make_field('prime', 3, p=p)


def test_unknown_and_inconsistent_kinds():
    with pytest.raises(InvalidFieldError):
        make_field('padic', 3)
    with pytest.raises(InvalidFieldError):
        make_field('cyclotomic', 3, p=7)


def test_rank_and_nullspace(F):
    A = F.matrix([[1, 2], [2, 4]])
    assert F.rank(A) == 1
    N = F.nullspace(A)
    assert F.shape(N) == (2, 1)
    assert F.is_zero_matrix(F.matmul(A, N))
    assert F.shape(F.nullspace(F.identity(3))) == (3, 0)


def test_solve_and_inconsistent_system(F):
    A = F.matrix([[1, 1], [0, 1]])
    B = F.matrix([[3], [1]])
    X = F.solve(A, B)
    assert F.equal(F.matmul(A, X), B)
    with pytest.raises(InconsistentSystemError):
        F.solve(F.matrix([[1, 0], [0, 0]]), F.matrix([[0], [1]]))


def test_stacking_and_kron(F):
    A = F.identity(2)
    assert F.shape(F.hstack([A, A], 2)) == (2, 4)
    assert F.shape(F.vstack([A, A], 2)) == (4, 2)
    assert F.rank(F.kron(A, F.identity(3))) == 6
    assert F.shape(F.hstack([], 3)) == (3, 0)


def test_cyclotomic_field_agrees_on_ranks():
    C = make_field('cyclotomic', 3)
    assert C.eq(C.power(C.zeta, 3), C.one)
    assert C.rank(C.matrix([[1, 2], [2, 4]])) == 1
    M = C.matrix([[C.zeta, C.one], [C.one, C.inv(C.zeta)]])
    assert C.rank(M) == 1
