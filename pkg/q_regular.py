"""
q-Regular Sequences
===================

Certifies that an ordered sequence x_1..x_n in the integration of a Hopf
algebra is q-regular: each x_j is homogeneous, and modulo the ideal
I_j = (x_{j+1}, ..., x_n) it is chi_j-central,

    b x_j = zeta^{(deg b, chi_j)} x_j b,

and a nonzerodivisor. Everything is exact linear algebra on the graded
pieces of the integration up to a declared height truncation; nothing is
claimed beyond it.

I_j is spanned by the left multiples m x_k (k > j) once x_{j+1}, ..., x_n
are known to be normal, so the checks run from x_n down to x_1.
"""

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from errors import InconclusiveError, UnsupportedAlgebraError
from fields import Matrix
from hopf_algebras import HopfAlgebra, build_quantum_borel_A, type_a_roots
from pbw_algebra import Element, accumulate

LOGGER = logging.getLogger(__name__)

Monomial = Tuple[int, ...]


@dataclass
class QRegularCandidate:
    """
    An ordered sequence with its claimed characters.

    Attributes:
        algebra: HopfAlgebra whose integration is the ambient algebra
        names: display name of each sequence element
        sequence: the elements x_1..x_n, in PBW normal form
        characters: chi_j as integer vectors
        form: (deg b, chi) = deg(b)^T form chi, an exponent of zeta
        degrees: character degree of every PBW generator
        extras: construction data (lex order, root data, ...)
    """
    algebra: HopfAlgebra
    names: List[str]
    sequence: List[Element]
    characters: List[Tuple[int, ...]]
    form: List[List[int]]
    degrees: List[Tuple[int, ...]]
    extras: Dict = field(default_factory=dict)

    def degree_of(self, c: Monomial) -> Tuple[int, ...]:
        width = len(self.degrees[0]) if self.degrees else 0
        total = [0] * width
        for k, e in enumerate(c):
            for a in range(width):
                total[a] += e * self.degrees[k][a]
        return tuple(total)

    def exponent(self, degree: Sequence[int], j: int) -> int:
        chi = self.characters[j]
        value = sum(degree[a] * self.form[a][b] * chi[b]
                    for a in range(len(degree)) for b in range(len(chi)))
        return value % self.algebra.fieldspec.l

    def character_values(self, j: int) -> List[int]:
        """Exponents of chi_j on the simple generators' degrees."""
        simple = self.algebra.pbw.simple_generators
        return [self.exponent(self.degrees[k], j) for k in simple]


# ============================================================================
# CANDIDATES
# ============================================================================

def _generator(H: HopfAlgebra, k: int) -> Element:
    return {H.pbw.unit_vector(k): H.fieldspec.one}


def _type_a_character(H: HopfAlgebra, k: int) -> Tuple[int, ...]:
    """
    chi_gamma = sum over simple alpha before E_gamma of (alpha, gamma) omega_alpha
    minus the same sum over simple alpha after it, in lex order.
    """
    C = H.extras['cartan']
    weights = H.extras['root_weights']
    simple = H.extras['simple_indices']
    l = H.fieldspec.l
    n = len(C)
    gamma = weights[k]
    chi = [0] * n
    for a in range(n):
        s = simple[a]
        if s == k:
            continue
        pairing = sum(C[a][v] * gamma[v] for v in range(n))
        chi[a] += pairing if s < k else -pairing
    return tuple(x % l for x in chi)


def default_characters(H: HopfAlgebra) -> Tuple[List[List[int]], List[Tuple[int, ...]], List[Tuple[int, ...]]]:
    """(form, generator degrees, character of each generator) for the built-in families."""
    n = H.n
    unit = [tuple(1 if a == k else 0 for a in range(n)) for k in range(n)]
    if 'root_weights' in H.extras:
        rank = len(H.extras['cartan'])
        h = H.extras.get('q_power', 1)
        form = [[h if a == b else 0 for b in range(rank)] for a in range(rank)]
        return form, [tuple(w) for w in H.extras['root_weights']], [_type_a_character(H, k) for k in range(n)]
    if 'alt' in H.extras:
        return [list(row) for row in H.extras['alt']], unit, unit
    F = H.fieldspec
    if all(F.eq(q, F.one) for q, _ in H.pbw.relations.values()):
        zero = [[0] * n for _ in range(n)]
        return zero, unit, [(0,) * n] * n
    raise UnsupportedAlgebraError(f"{H.name}: no default characters for this algebra")


def candidate_from_names(H: HopfAlgebra, names: Sequence[str]) -> QRegularCandidate:
    """Sequence of PBW generators given by name, with the default characters."""
    index = {name: k for k, name in enumerate(H.pbw.names)}
    unknown = [name for name in names if name not in index]
    if unknown:
        raise UnsupportedAlgebraError(f"{H.name} has no generators {unknown}")
    form, degrees, chars = default_characters(H)
    order = [index[name] for name in names]
    return QRegularCandidate(algebra=H, names=list(names), sequence=[_generator(H, k) for k in order],
                             characters=[chars[k] for k in order], form=form, degrees=degrees,
                             extras={'order': order})


def skew_candidate(H: HopfAlgebra) -> QRegularCandidate:
    """(x_1, ..., x_n) in a skew polynomial integration."""
    if not H.pbw.is_skew_polynomial():
        raise UnsupportedAlgebraError(f"{H.name}: integration is not a skew polynomial algebra")
    return candidate_from_names(H, H.pbw.names)


def restricted_candidate(H: HopfAlgebra) -> QRegularCandidate:
    """Generators of a restricted enveloping algebra, most central last."""
    if 'lcs_basis' not in H.extras:
        raise UnsupportedAlgebraError(f"{H.name}: not a restricted enveloping algebra")
    return candidate_from_names(H, list(reversed(H.extras['lcs_basis'])))


def root_vectors_typeA(n: int, l: int, lattice: str = 'sc', fieldspec=None) -> QRegularCandidate:
    """
    Root vectors of U^DK(n) in type A_n, ordered compatibly with height
    (lex order inside a height), each with its character chi_gamma.
    """
    if n not in (1, 2, 3):
        raise UnsupportedAlgebraError(f"type A root vectors are built for rank 1, 2 or 3, got {n}")
    H = build_quantum_borel_A(n, l, lattice, fieldspec)
    roots = type_a_roots(n)
    order = sorted(range(len(roots)), key=lambda k: (roots[k][1] - roots[k][0], k))
    candidate = candidate_from_names(H, [H.pbw.names[k] for k in order])
    candidate.extras.update({
        'lex_order': list(H.pbw.names),
        'expansions': {H.pbw.names[k]: [(str(c), [H.pbw.names[g] for g in word]) for c, word in expr]
                       for k, expr in H.pbw.definitions.items()},
    })
    LOGGER.info("type A_%d root vectors at l = %d: %s", n, l, candidate.names)
    return candidate


# ============================================================================
# GRADED PIECES
# ============================================================================

class _TruncatedAlgebra:
    """Homogeneous pieces of the integration up to height ``truncation``."""

    def __init__(self, cand: QRegularCandidate, truncation: int):
        pbw = cand.algebra.pbw
        self.cand = cand
        self.F = cand.algebra.fieldspec
        self.truncation = truncation
        self.heights = list(pbw.heights)
        self.ring = pbw.integration([truncation] * pbw.n)
        self.monomials: Dict[int, List[Monomial]] = {h: [] for h in range(truncation + 1)}
        self._collect([], 0)
        self.index = {h: {c: r for r, c in enumerate(monos)} for h, monos in self.monomials.items()}
        self._ideals: Dict[Tuple[int, int], Matrix] = {}

    def _collect(self, prefix: List[int], height: int):
        k = len(prefix)
        if k == len(self.heights):
            self.monomials[height].append(tuple(prefix))
            return
        e = 0
        while height + e * self.heights[k] <= self.truncation:
            self._collect(prefix + [e], height + e * self.heights[k])
            e += 1

    def dim(self, h: int) -> int:
        return len(self.monomials[h])

    def height_of(self, a: Element) -> Optional[int]:
        heights = {sum(e * t for e, t in zip(c, self.heights)) for c in a}
        return heights.pop() if len(heights) == 1 else None

    def coordinates(self, a: Element, h: int) -> List:
        F = self.F
        vec = [F.zero] * self.dim(h)
        for c, x in a.items():
            vec[self.index[h][c]] = x
        return vec

    def columns(self, elements: Sequence[Element], h: int) -> Matrix:
        F = self.F
        if not elements:
            return F.zeros(self.dim(h), 0)
        return F.transpose(F.matrix([self.coordinates(a, h) for a in elements], self.dim(h)))

    def ideal(self, j: int, h: int) -> Matrix:
        """Columns spanning the degree-h part of the left ideal generated by x_k, k > j."""
        key = (j, h)
        if key not in self._ideals:
            products = []
            for k in range(j + 1, len(self.cand.sequence)):
                xk = self.cand.sequence[k]
                t = self.height_of(xk)
                if t is None or t > h:
                    continue
                for c in self.monomials[h - t]:
                    prod = self.ring.mul({c: self.F.one}, xk)
                    if prod:
                        products.append(prod)
            self._ideals[key] = self.columns(products, h)
        return self._ideals[key]

    def in_span(self, span: Matrix, vector: List) -> bool:
        F = self.F
        if all(F.is_zero(x) for x in vector):
            return True
        v = F.transpose(F.matrix([vector], len(vector)))
        return F.rank(F.hstack([span, v], len(vector))) == F.rank(span)


# ============================================================================
# CHECKS
# ============================================================================

def default_truncation(cand: QRegularCandidate) -> int:
    """2 * (top generator height) * l, with l at least 2."""
    return 2 * max(cand.algebra.pbw.heights) * max(cand.algebra.fieldspec.l, 2)


def _centrality_violations(alg: _TruncatedAlgebra, j: int, t: int) -> List[Dict]:
    cand = alg.cand
    F = alg.F
    xj = cand.sequence[j]
    violations = []
    for i in range(cand.algebra.n):
        gi = _generator(cand.algebra, i)
        h = alg.heights[i] + t
        c = F.zeta_power(cand.exponent(cand.degrees[i], j))
        diff = dict(alg.ring.mul(gi, xj))
        accumulate(F, diff, alg.ring.mul(xj, gi), F.neg(c))
        if not alg.in_span(alg.ideal(j, h), alg.coordinates(diff, h)):
            violations.append({'kind': 'centrality', 'element': cand.names[j],
                               'b': cand.algebra.pbw.names[i], 'height': h})
    return violations


def _injective_in_degree(alg: _TruncatedAlgebra, j: int, t: int, h: int) -> bool:
    """Left multiplication by x_j from (A/I_j)_h to (A/I_j)_{h+t}."""
    F = alg.F
    span = alg.ideal(j, h)
    complement = F.complement_pivots(span, F.identity(alg.dim(h))) if alg.dim(h) else []
    if not complement:
        return True
    xj = alg.cand.sequence[j]
    images = [alg.ring.mul({alg.monomials[h][r]: F.one}, xj) for r in complement]
    target = alg.ideal(j, h + t)
    joined = F.hstack([target, alg.columns(images, h + t)], alg.dim(h + t))
    return F.rank(joined) - F.rank(target) == len(complement)


def _check(cand: QRegularCandidate, truncation: Optional[int], workers: int) -> Dict:
    T = truncation if truncation is not None else default_truncation(cand)
    alg = _TruncatedAlgebra(cand, T)
    heights = [alg.height_of(x) for x in cand.sequence]
    report: Dict = {
        'algebra': cand.algebra.name,
        'sequence': list(cand.names),
        'characters': [list(chi) for chi in cand.characters],
        'truncation': T,
        'note': f"nonzerodivisor property certified up to height {T} only",
        'violations': [],
    }
    homogeneous = all(t is not None for t in heights) and all(
        len({cand.degree_of(c) for c in x}) == 1 for x in cand.sequence)
    report['homogeneous'] = homogeneous
    if not homogeneous:
        report['violations'].append({'kind': 'homogeneity'})
        report['passed'] = False
        return report
    needed = max(heights) + max(alg.heights)
    if T < needed:
        raise InconclusiveError(f"truncation {T} is below {needed}, the height of the first products")

    central, injective = True, True
    for j in reversed(range(len(cand.sequence))):
        violations = _centrality_violations(alg, j, heights[j])
        if violations:
            report['violations'].extend(violations)
            central = False
            break
        degrees = list(range(T - heights[j] + 1))
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as executor:
                verdicts = list(executor.map(lambda h: _injective_in_degree(alg, j, heights[j], h),
                                             degrees))
        else:
            verdicts = [_injective_in_degree(alg, j, heights[j], h) for h in degrees]
        bad = [h for h, ok in zip(degrees, verdicts) if not ok]
        if bad:
            report['violations'].append({'kind': 'zero divisor', 'element': cand.names[j], 'height': bad[0]})
            injective = False
            break
        LOGGER.debug("%s: %s passes up to height %d", cand.algebra.name, cand.names[j], T)
    report['central'] = central
    report['nonzerodivisor'] = injective and central

    F = alg.F
    augmentation = all(F.rank(alg.ideal(-1, h)) == alg.dim(h) for h in range(1, T + 1))
    report['augmentation_ideal'] = augmentation
    report['passed'] = central and injective and augmentation
    return report


def check_q_regular(cand: QRegularCandidate, truncation: Optional[int] = None, workers: int = 1) -> Dict:
    """
    Verify homogeneity, chi_j-centrality modulo the later ideal on the PBW
    generators (they generate the algebra) and the nonzerodivisor property
    degree by degree up to the truncation. The report also records whether
    the sequence generates the augmentation ideal in every checked degree.
    """
    report = _check(cand, truncation, workers)
    LOGGER.info("q-regularity of %s in %s: %s", cand.names, cand.algebra.name,
                "passed" if report['passed'] else "failed")
    return report


def _koszul_homology(alg: _TruncatedAlgebra, T: int) -> Tuple[List[List[int]], List[int]]:
    """
    Homology of Q (x) exterior(d_1..d_m), d(d_i) = f_i, per height h <= T.

    Returns the homology dimensions H_k for every height and the number of
    fiber monomials of every height.
    """
    cand = alg.cand
    pbw = cand.algebra.pbw
    F = alg.F
    m = pbw.n
    f_heights = [N * t for N, t in zip(pbw.nilpotency, alg.heights)]
    f_elems = [{pbw.unit_vector(i, N): F.one} for i, N in enumerate(pbw.nilpotency)]

    def basis(k: int, h: int) -> List[Tuple[Tuple[int, ...], Monomial]]:
        out = []
        for S in itertools.combinations(range(m), k):
            rest = h - sum(f_heights[i] for i in S)
            if rest >= 0:
                out.extend((S, c) for c in alg.monomials[rest])
        return out

    homology, fiber = [], []
    for h in range(T + 1):
        bases = [basis(k, h) for k in range(m + 1)]
        ranks = [0] * (m + 2)
        for k in range(1, m + 1):
            position = {key: r for r, key in enumerate(bases[k - 1])}
            values = {}
            for col, (S, c) in enumerate(bases[k]):
                for sign_pos, i in enumerate(S):
                    face = S[:sign_pos] + S[sign_pos + 1:]
                    coeff = F.one if sign_pos % 2 == 0 else F.neg(F.one)
                    for d, x in alg.ring.mul(f_elems[i], {c: F.one}).items():
                        values[(position[(face, d)], col)] = F.mul(coeff, x)
            ranks[k] = F.rank(F.from_sparse(len(bases[k - 1]), len(bases[k]), values)) if values else 0
        homology.append([len(bases[k]) - ranks[k] - ranks[k + 1] for k in range(m + 1)])
        fiber.append(sum(1 for c in alg.monomials[h] if all(e < N for e, N in zip(c, pbw.nilpotency))))
    return homology, fiber


def koszul_transfer_check(cand: QRegularCandidate, truncation: Optional[int] = None,
                          workers: int = 1) -> Dict:
    """
    The checks carried to K_Q = Q (x) exterior(d_1..d_m) with d(d_i) = f_i.

    K_Q resolves the fiber algebra: its homology is checked to vanish above
    degree 0 and to match the fiber monomials in degree 0, height by height.
    The d_i commute with Q, so x_j stays chi_j-central in K_Q exactly when
    chi_j vanishes on the degree of every f_i; the left ideal of x_{j+1}..x_n
    in K_Q is exterior (x) I_j, so the nonzerodivisor test reduces to Q.
    """
    H = cand.algebra
    pbw = H.pbw
    m = H.n
    T = truncation if truncation is not None else default_truncation(cand)
    report = _check(cand, T, workers)
    ext_degrees = [tuple(N * x for x in cand.degrees[i]) for i, N in enumerate(pbw.nilpotency)]
    twists = [[cand.exponent(ext_degrees[i], j) for j in range(len(cand.sequence))] for i in range(m)]
    report['exterior_generators'] = m
    report['exterior_twists'] = twists
    report['exterior_central'] = all(e == 0 for row in twists for e in row)
    if not report['exterior_central']:
        bad = next((i, j) for i, row in enumerate(twists) for j, e in enumerate(row) if e)
        report['violations'].append({'kind': 'exterior centrality', 'element': cand.names[bad[1]],
                                     'b': f"d{bad[0] + 1}"})

    homology, fiber = _koszul_homology(_TruncatedAlgebra(cand, T), T)
    report['koszul_h0'] = [row[0] for row in homology]
    report['koszul_acyclic'] = all(not any(row[1:]) for row in homology)
    report['koszul_resolves_fiber'] = report['koszul_h0'] == fiber
    if not report['koszul_acyclic']:
        h = next(h for h, row in enumerate(homology) if any(row[1:]))
        report['violations'].append({'kind': 'koszul homology', 'height': h, 'dims': homology[h]})
    report['passed'] = (report['passed'] and report['exterior_central'] and report['koszul_acyclic']
                        and report['koszul_resolves_fiber'])
    LOGGER.info("Koszul transfer for %s in %s: %s", cand.names, H.name,
                "passed" if report['passed'] else "failed")
    return report
