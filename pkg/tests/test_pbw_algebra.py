import numpy as np
import pytest

from errors import DegreeOverflowError, PresentationError
from fields import make_field
from module_catalog import build_algebra, get_named_algebra
from pbw_algebra import PBWPresentation, confluence_certificate, elements_equal, project_to_fiber


@pytest.fixture
def F():
    return make_field('prime', 3)


@pytest.fixture
def skew(F):
    """a, b with b a = zeta a b and a^3 = b^3 = 0."""
    return PBWPresentation(F, ['a', 'b'], {(1, 0): (F.zeta, {})}, [3, 3])


def test_dimension_and_basis(skew):
    assert skew.dimension == 9
    assert len(skew.monomials()) == 9
    assert skew.monomials()[0] == skew.unit()
    assert skew.is_skew_polynomial()
    assert skew.simple_generators == [0, 1]


def test_normal_form_straightens(F, skew):
    fiber = skew.fiber
    assert fiber.normal_form([1, 0]) == {(1, 1): F.zeta}
    assert fiber.normal_form([0, 1]) == {(1, 1): F.one}
    assert fiber.normal_form([0, 0, 0]) == {}
    scaled = fiber.normal_form([1, 0], coeff=F.element(2))
    assert scaled == {(1, 1): F.mul(F.element(2), F.zeta)}


def test_normal_form_rejects_unknown_generator(skew):
    with pytest.raises(PresentationError):
        skew.fiber.normal_form([2])


def test_integration_keeps_powers_and_overflows(F, skew):
    ring = skew.integration([4, 4])
    assert ring.normal_form([0, 0, 0]) == {(3, 0): F.one}
    with pytest.raises(DegreeOverflowError):
        ring.normal_form([0] * 5)


def test_split_and_projection(F, skew):
    ring = skew.integration([6, 6])
    assert ring.split((4, 2)) == ((1, 0), (1, 2))
    a = {(3, 0): F.one, (1, 1): F.one}
    assert project_to_fiber(skew, a) == {(1, 1): F.one}


def test_confluence_certificate_passes(skew):
    cert = confluence_certificate(skew, check_centrality=True)
    assert cert['passed']
    assert cert['first_failure'] is None
    assert cert['checked'] > 0


def test_confluence_certificate_catches_bad_definition(F):
    bad = PBWPresentation(F, ['a', 'b'], {}, [3, 3], definitions={1: [(1, (0,))]})
    cert = confluence_certificate(bad)
    assert not cert['passed']
    assert cert['first_failure']['check'] == 'definition'


def test_presentation_validation(F):
    with pytest.raises(PresentationError):
        PBWPresentation(F, ['a', 'b'], {(0, 1): (1, {})}, [3, 3])
    with pytest.raises(PresentationError):
        PBWPresentation(F, ['a'], {}, [3, 3])
    with pytest.raises(PresentationError):
        PBWPresentation(F, ['a'], {}, [0])


@pytest.mark.parametrize("name", ['heisenberg-p3', 'qci-l3-n2-standard'])
def test_random_words_reduce_the_same_from_either_end(name):
    pbw = build_algebra(get_named_algebra(name)).pbw
    fiber = pbw.fiber
    rng = np.random.default_rng(11)
    for _ in range(1000):
        word = [int(g) for g in rng.integers(0, pbw.n, size=int(rng.integers(1, 9)))]
        from_left = fiber.normal_form(word)
        from_right = fiber.one()
        for g in reversed(word):
            from_right = fiber.mul(fiber.generator(g), from_right)
        assert elements_equal(pbw.fieldspec, from_left, from_right), word
