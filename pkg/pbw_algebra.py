"""
PBW Presentations and Normal Forms
==================================

An algebra is presented by ordered generators g_0 < g_1 < ... < g_{n-1} and
straightening relations

    g_j g_i = q_ji g_i g_j + r_ji        (j > i)

so every element has a unique expansion in ordered monomials
g_0^{c_0} ... g_{n-1}^{c_{n-1}}. Monomials are exponent tuples and elements
are dicts {monomial: scalar} with zero coefficients removed.

The same presentation serves two rings:

- the fiber: monomials with c_i >= N_i vanish (the f_i = g_i^{N_i} are killed)
- the integration: exponents are unbounded up to a declared truncation and
  exceeding it raises DegreeOverflowError, never truncates silently

Generators may carry a defining expression in other generators (root
vectors, commutators); modules use it to compute their action.
"""

import itertools
import logging
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from sympy.utilities.iterables import multiset_permutations

from errors import DegreeOverflowError, PresentationError
from fields import FieldSpec, Scalar

LOGGER = logging.getLogger(__name__)

Monomial = Tuple[int, ...]
Element = Dict[Monomial, Scalar]
Word = Tuple[int, ...]
FreeElement = Dict[Word, Scalar]


# ============================================================================
# ELEMENT ARITHMETIC
# ============================================================================

def accumulate(F: FieldSpec, acc: Dict, elem: Dict, coeff: Scalar) -> Dict:
    """acc += coeff * elem, in place, dropping zero coefficients."""
    if F.is_zero(coeff):
        return acc
    for key, value in elem.items():
        new = F.add(acc.get(key, F.zero), F.mul(coeff, value))
        if F.is_zero(new):
            acc.pop(key, None)
        else:
            acc[key] = new
    return acc


def combine(F: FieldSpec, terms: Iterable[Tuple[Scalar, Dict]]) -> Dict:
    """Linear combination of dict-elements."""
    acc: Dict = {}
    for coeff, elem in terms:
        accumulate(F, acc, elem, coeff)
    return acc


def elements_equal(F: FieldSpec, a: Dict, b: Dict) -> bool:
    return not combine(F, [(F.one, a), (F.neg(F.one), b)])


# ============================================================================
# PRESENTATION
# ============================================================================

class PBWPresentation:
    """
    Ordered generators with straightening relations and nilpotency orders.

    Attributes:
        fieldspec: coefficient field
        names: generator names in PBW order
        relations: {(j, i): (q_ji, r_ji)} for every j > i
        nilpotency: N_i, with f_i = g_i^{N_i} central in the integration
        heights: positive integer grading of the generators
        definitions: {k: [(coeff, word)]} expressing generator k through
            earlier-defined generators
        integration_bound: per-variable exponent bound of the integration
    """

    def __init__(self, fieldspec: FieldSpec, names: Sequence[str],
                 relations: Dict[Tuple[int, int], Tuple[Scalar, Element]],
                 nilpotency: Sequence[int],
                 heights: Optional[Sequence[int]] = None,
                 definitions: Optional[Dict[int, List[Tuple[Scalar, Word]]]] = None,
                 integration_bound: Optional[Sequence[int]] = None):
        self.fieldspec = fieldspec
        self.names = list(names)
        n = len(self.names)
        if len(nilpotency) != n:
            raise PresentationError("one nilpotency order per generator is required")
        if any(N < 1 for N in nilpotency):
            raise PresentationError("nilpotency orders must be positive")
        self.nilpotency = list(nilpotency)
        self.heights = list(heights) if heights is not None else [1] * n
        if len(self.heights) != n or any(h < 1 for h in self.heights):
            raise PresentationError("heights must be positive, one per generator")

        self.relations: Dict[Tuple[int, int], Tuple[Scalar, Element]] = {}
        for (j, i), (q, r) in relations.items():
            if not 0 <= i < j < n:
                raise PresentationError(f"relation key ({j}, {i}) must satisfy n > j > i >= 0")
            for mono in r:
                if len(mono) != n:
                    raise PresentationError(f"monomial {mono} has wrong length")
            self.relations[(j, i)] = (fieldspec.element(q), dict(r))
        for j in range(n):
            for i in range(j):
                self.relations.setdefault((j, i), (fieldspec.one, {}))

        self.definitions = dict(definitions or {})
        for k, expr in self.definitions.items():
            for _, word in expr:
                if any(not 0 <= g < n or g == k for g in word):
                    raise PresentationError(f"definition of {self.names[k]} uses an invalid generator")
        if integration_bound is None:
            integration_bound = [3 * N for N in self.nilpotency]
        self.integration_bound = list(integration_bound)
        self._rings: Dict[Tuple, 'PBWRing'] = {}

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def dimension(self) -> int:
        dim = 1
        for N in self.nilpotency:
            dim *= N
        return dim

    @property
    def simple_generators(self) -> List[int]:
        return [k for k in range(self.n) if k not in self.definitions]

    def monomials(self) -> List[Monomial]:
        """Fiber basis in lexicographic order of exponent tuples."""
        return [tuple(c) for c in itertools.product(*(range(N) for N in self.nilpotency))]

    def unit(self) -> Monomial:
        return (0,) * self.n

    def unit_vector(self, i: int, times: int = 1) -> Monomial:
        c = [0] * self.n
        c[i] = times
        return tuple(c)

    def height(self, c: Monomial) -> int:
        return sum(h * e for h, e in zip(self.heights, c))

    def is_skew_polynomial(self) -> bool:
        return all(not r for _, r in self.relations.values())

    @property
    def fiber(self) -> 'PBWRing':
        return self.ring('fiber')

    def integration(self, bound: Optional[Sequence[int]] = None) -> 'PBWRing':
        return self.ring('integration', bound)

    def ring(self, mode: str, bound: Optional[Sequence[int]] = None) -> 'PBWRing':
        if mode not in ('fiber', 'integration'):
            raise PresentationError(f"unknown ring mode '{mode}'")
        if mode == 'integration':
            bound = tuple(bound) if bound is not None else tuple(self.integration_bound)
        key = (mode, bound)
        if key not in self._rings:
            self._rings[key] = PBWRing(self, mode, bound)
        return self._rings[key]

    def word_of(self, c: Monomial) -> Word:
        return tuple(i for i, e in enumerate(c) for _ in range(e))

    def format_monomial(self, c: Monomial) -> str:
        parts = []
        for name, e in zip(self.names, c):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts) or "1"

    def format_element(self, a: Element) -> str:
        if not a:
            return "0"
        return " + ".join(f"{a[c]}*{self.format_monomial(c)}" for c in sorted(a))

    def ideal_pair_violations(self, removed: Iterable[int]) -> List[Tuple[int, int]]:
        """
        Relations that break the span of monomials containing a removed
        generator as a two-sided ideal: some r_ji has a monomial with no
        removed letter while g_i or g_j is removed.
        """
        removed = set(removed)
        bad = []
        for (j, i), (_, r) in sorted(self.relations.items()):
            if i in removed or j in removed:
                for mono in r:
                    if not any(mono[k] for k in removed):
                        bad.append((j, i))
                        break
        return bad


# ============================================================================
# RINGS
# ============================================================================

class PBWRing:
    """Multiplication in the fiber or the truncated integration, memoized."""

    def __init__(self, presentation: PBWPresentation, mode: str, bound: Optional[Tuple[int, ...]]):
        self.presentation = presentation
        self.fieldspec = presentation.fieldspec
        self.mode = mode
        self.bound = bound
        self._gen_memo: Dict[Tuple[Monomial, int], Element] = {}
        self._mono_memo: Dict[Tuple[Monomial, Monomial], Element] = {}

    def _monomial(self, c: Monomial) -> Element:
        if self.mode == 'fiber':
            if any(e >= N for e, N in zip(c, self.presentation.nilpotency)):
                return {}
        else:
            for k, (e, b) in enumerate(zip(c, self.bound)):
                if e > b:
                    raise DegreeOverflowError(k, e, b)
        return {c: self.fieldspec.one}

    def one(self) -> Element:
        return {self.presentation.unit(): self.fieldspec.one}

    def generator(self, i: int) -> Element:
        return self._monomial(self.presentation.unit_vector(i))

    def mul_mono_gen(self, c: Monomial, i: int) -> Element:
        key = (c, i)
        hit = self._gen_memo.get(key)
        if hit is not None:
            return hit
        F = self.fieldspec
        j = max((k for k, e in enumerate(c) if e), default=-1)
        if j <= i:
            d = list(c)
            d[i] += 1
            result = self._monomial(tuple(d))
        else:
            # c g_i = c' g_j g_i = q_ji (c' g_i) g_j + c' r_ji
            q, r = self.presentation.relations[(j, i)]
            prefix = list(c)
            prefix[j] -= 1
            prefix = tuple(prefix)
            result: Element = {}
            for m, a in self.mul_mono_gen(prefix, i).items():
                accumulate(F, result, self.mul_mono_gen(m, j), F.mul(q, a))
            for m, a in r.items():
                accumulate(F, result, self.mul_mono_mono(prefix, m), a)
        self._gen_memo[key] = result
        return result

    def mul_elem_gen(self, a: Element, i: int) -> Element:
        result: Element = {}
        for c, coeff in a.items():
            accumulate(self.fieldspec, result, self.mul_mono_gen(c, i), coeff)
        return result

    def mul_mono_mono(self, c: Monomial, d: Monomial) -> Element:
        key = (c, d)
        hit = self._mono_memo.get(key)
        if hit is not None:
            return hit
        current = self._monomial(c)
        for letter in self.presentation.word_of(d):
            if not current:
                break
            current = self.mul_elem_gen(current, letter)
        self._mono_memo[key] = current
        return current

    def mul(self, a: Element, b: Element) -> Element:
        F = self.fieldspec
        result: Element = {}
        for c, x in a.items():
            for d, y in b.items():
                accumulate(F, result, self.mul_mono_mono(c, d), F.mul(x, y))
        return result

    def add(self, a: Element, b: Element) -> Element:
        return combine(self.fieldspec, [(self.fieldspec.one, a), (self.fieldspec.one, b)])

    def scale(self, coeff: Scalar, a: Element) -> Element:
        return combine(self.fieldspec, [(coeff, a)])

    def normal_form(self, word: Sequence[int], coeff: Optional[Scalar] = None) -> Element:
        """Expansion of coeff * g_{w_0} g_{w_1} ... in the monomial basis."""
        n = self.presentation.n
        for g in word:
            if not 0 <= g < n:
                raise PresentationError(f"unknown generator index {g}")
        current = self.one()
        for g in word:
            if not current:
                break
            current = self.mul_elem_gen(current, g)
        if coeff is not None:
            current = self.scale(coeff, current)
        return current

    def evaluate(self, expression: Sequence[Tuple[Scalar, Sequence[int]]]) -> Element:
        """Normal form of a linear combination of words."""
        result: Element = {}
        for coeff, word in expression:
            accumulate(self.fieldspec, result, self.normal_form(word), self.fieldspec.element(coeff))
        return result

    def power(self, a: Element, k: int) -> Element:
        result = self.one()
        for _ in range(k):
            result = self.mul(result, a)
        return result

    def split(self, c: Monomial) -> Tuple[Monomial, Monomial]:
        """g^c = f^a * g^b with a = c // N and b = c % N (the f_i are central)."""
        N = self.presentation.nilpotency
        return (tuple(e // m for e, m in zip(c, N)), tuple(e % m for e, m in zip(c, N)))

    def cache_info(self) -> Dict:
        return {'mode': self.mode, 'generator_products': len(self._gen_memo),
                'monomial_products': len(self._mono_memo)}


def project_to_fiber(presentation: PBWPresentation, a: Element) -> Element:
    """Drop monomials in the ideal generated by the f_i."""
    N = presentation.nilpotency
    return {c: x for c, x in a.items() if all(e < m for e, m in zip(c, N))}


# ============================================================================
# CONFLUENCE CERTIFICATE
# ============================================================================

def confluence_certificate(presentation: PBWPresentation, check_centrality: bool = False) -> Dict:
    """
    Check every overlap (m g_j) g_i = q_ji (m g_i) g_j + m r_ji over the fiber
    basis, m g_i^{N_i} = 0 in the fiber, the generator definitions, and
    optionally centrality of the f_i in the integration on generators.
    """
    F = presentation.fieldspec
    fiber = presentation.fiber
    checked = 0
    failure = None
    for m in presentation.monomials():
        base = {m: F.one}
        for (j, i), (q, r) in sorted(presentation.relations.items()):
            lhs = fiber.mul_elem_gen(fiber.mul_elem_gen(base, j), i)
            rhs = combine(F, [(q, fiber.mul_elem_gen(fiber.mul_elem_gen(base, i), j)),
                              (F.one, fiber.mul(base, r))])
            checked += 1
            if not elements_equal(F, lhs, rhs):
                failure = {'check': 'overlap', 'monomial': m, 'pair': (j, i)}
                break
        if failure:
            break
        for i, N in enumerate(presentation.nilpotency):
            checked += 1
            if fiber.mul(base, fiber.normal_form([i] * N)):
                failure = {'check': 'nilpotency', 'monomial': m, 'generator': i}
                break
        if failure:
            break

    if failure is None:
        for k, expr in sorted(presentation.definitions.items()):
            checked += 1
            if not elements_equal(F, fiber.evaluate(expr), fiber.generator(k)):
                failure = {'check': 'definition', 'generator': k}
                break

    if failure is None and check_centrality:
        bound = [2 * N + 2 for N in presentation.nilpotency]
        ring = presentation.integration(bound)
        for i, N in enumerate(presentation.nilpotency):
            for j in range(presentation.n):
                checked += 1
                if not elements_equal(F, ring.normal_form([i] * N + [j]),
                                      ring.normal_form([j] + [i] * N)):
                    failure = {'check': 'centrality', 'generator': i, 'against': j}
                    break
            if failure:
                break

    if failure:
        LOGGER.debug("confluence certificate failed: %s", failure)
    return {'passed': failure is None, 'checked': checked, 'first_failure': failure}


# ============================================================================
# FREE ALGEBRA HELPERS
# ============================================================================

def free_mul(F: FieldSpec, a: FreeElement, b: FreeElement) -> FreeElement:
    result: FreeElement = {}
    for u, x in a.items():
        for v, y in b.items():
            accumulate(F, result, {u + v: F.one}, F.mul(x, y))
    return result


def free_expand(F: FieldSpec, expression: Sequence[Tuple[Scalar, Word]],
                letters: Dict[int, FreeElement]) -> FreeElement:
    """Substitute free expansions for the generators in a word expression."""
    result: FreeElement = {}
    for coeff, word in expression:
        term: FreeElement = {(): F.one}
        for g in word:
            term = free_mul(F, term, letters[g])
        accumulate(F, result, term, F.element(coeff))
    return result


def weight_of(word: Word, num_letters: int) -> Tuple[int, ...]:
    w = [0] * num_letters
    for letter in word:
        w[letter] += 1
    return tuple(w)


def words_of_weight(weight: Sequence[int]) -> List[Word]:
    letters = [a for a, k in enumerate(weight) for _ in range(k)]
    if not letters:
        return [()]
    return sorted(tuple(w) for w in multiset_permutations(letters))


def ordered_monomials_of_weight(gen_weights: Sequence[Tuple[int, ...]],
                                weight: Tuple[int, ...]) -> List[Monomial]:
    """Exponent vectors c with sum c_k * weight_k = weight."""
    n = len(gen_weights)
    found: List[Monomial] = []

    def extend(k: int, remaining: Tuple[int, ...], prefix: List[int]):
        if k == n:
            if not any(remaining):
                found.append(tuple(prefix))
            return
        e = 0
        rest = remaining
        while all(x >= 0 for x in rest):
            extend(k + 1, rest, prefix + [e])
            e += 1
            rest = tuple(x - y for x, y in zip(rest, gen_weights[k]))

    extend(0, tuple(weight), [])
    return sorted(found)


def derive_relations(F: FieldSpec, num_letters: int, serre: Sequence[FreeElement],
                     gen_free: Sequence[FreeElement],
                     gen_weights: Sequence[Tuple[int, ...]]) -> Dict[Tuple[int, int], Tuple[Scalar, Element]]:
    """
    Straightening relations of a presentation whose generators are given as
    free-algebra expressions in ``num_letters`` letters modulo the two-sided
    ideal spanned by the ``serre`` relations.

    For each pair j > i, g_j g_i is written in the ordered monomials of its
    weight modulo the span of u*s*v; the coefficient of g_i g_j is q_ji and
    the rest is r_ji. A rank check confirms the ordered monomials are
    independent modulo the ideal in that weight.
    """
    n = len(gen_free)
    serre = [(weight_of(next(iter(s)), num_letters), s) for s in serre if s]
    relations: Dict[Tuple[int, int], Tuple[Scalar, Element]] = {}
    free_monomials: Dict[Monomial, FreeElement] = {}

    def free_of(c: Monomial) -> FreeElement:
        if c not in free_monomials:
            term: FreeElement = {(): F.one}
            for k, e in enumerate(c):
                for _ in range(e):
                    term = free_mul(F, term, gen_free[k])
            free_monomials[c] = term
        return free_monomials[c]

    for j in range(n):
        for i in range(j):
            weight = tuple(a + b for a, b in zip(gen_weights[i], gen_weights[j]))
            words = words_of_weight(weight)
            index = {w: k for k, w in enumerate(words)}
            candidates = ordered_monomials_of_weight(gen_weights, weight)

            ideal_cols: List[FreeElement] = []
            for sw, s in serre:
                rest = tuple(a - b for a, b in zip(weight, sw))
                if any(x < 0 for x in rest):
                    continue
                for t in words_of_weight(rest):
                    for cut in range(len(t) + 1):
                        u, v = t[:cut], t[cut:]
                        ideal_cols.append(free_mul(F, free_mul(F, {u: F.one}, s), {v: F.one}))

            def column_matrix(cols: List[FreeElement]):
                values = {}
                for k, col in enumerate(cols):
                    for w, x in col.items():
                        values[(index[w], k)] = x
                return F.from_sparse(len(words), len(cols), values)

            mono_mat = column_matrix([free_of(c) for c in candidates])
            ideal_mat = column_matrix(ideal_cols)
            joined = F.hstack([mono_mat, ideal_mat], len(words))
            if F.rank(joined) - F.rank(ideal_mat) != len(candidates):
                raise PresentationError(
                    f"ordered monomials of weight {weight} are dependent modulo the relations")
            target = column_matrix([free_mul(F, gen_free[j], gen_free[i])])
            solution = F.entries(F.solve(joined, target))
            q = F.zero
            r: Element = {}
            pair = tuple(1 if k in (i, j) else 0 for k in range(n))
            for k, c in enumerate(candidates):
                x = solution[k][0]
                if F.is_zero(x):
                    continue
                if c == pair:
                    q = x
                else:
                    r[c] = x
            if F.is_zero(q):
                raise PresentationError(f"g_{j} g_{i} has no g_{i} g_{j} term; order is not PBW")
            relations[(j, i)] = (q, r)
    return relations
