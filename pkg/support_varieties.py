"""
Support Varieties
=================

Hypersurface membership, cohomological support, the rank-variety oracle
and the tensor product property checks.

Points live in the projective space on the deformation parameters and are
enumerated over F_{p^e} for a declared extension degree e. A point c is in
the support of V exactly when V fails to be perfect over the hypersurface
Q / (sum c_i f_i); this is read off Ext^*(V, Lambda) by specializing the
theta operators along theta_i -> c_i t and watching whether the quotient by
the kernel of that specialization dies in high degree.

Every verdict needs a stability window of s degrees at the top of the
computed range. A window that neither vanishes nor carries an injective
t-action raises InconclusiveError; it is never turned into a verdict.
"""

import functools
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import galois
import numpy as np
import sympy
from sympy.polys.polyerrors import BasePolynomialError

from errors import (InconclusiveError, InvalidDeformationError, InvalidHalfBraidingError,
                    UnsupportedAlgebraError)
from fd_modules import FdModule, HalfBraiding, check_half_braiding, simples_module, tensor, trivial_module
from fields import FieldSpec
from homology import ExtTable, RebasedLift, ext_table, rebase_lift, rebased_theta

LOGGER = logging.getLogger(__name__)


@functools.lru_cache(maxsize=None)
def _gf(order: int):
    return galois.GF(order)


def _require_prime_field(F: FieldSpec):
    if F.kind != 'prime':
        raise UnsupportedAlgebraError("supports are enumerated over finite fields only")


# ============================================================================
# POINTS
# ============================================================================

@dataclass(frozen=True)
class ProjPoint:
    """
    A point [c_1 : ... : c_n] with coordinates in F_q, first nonzero coordinate 1.

    Attributes:
        coords: integer representations of the coordinates in galois.GF(order)
        order: q = p^e
    """
    coords: Tuple[int, ...]
    order: int

    @classmethod
    def make(cls, coords: Sequence[int], order: int) -> 'ProjPoint':
        GF = _gf(order)
        vec = GF([int(c) % order for c in coords])
        nonzero = np.flatnonzero(vec)
        if nonzero.size == 0:
            raise ValueError("the zero vector is not a projective point")
        vec = vec / vec[int(nonzero[0])]
        return cls(tuple(int(c) for c in vec), order)

    @property
    def pivot(self) -> int:
        return next(k for k, c in enumerate(self.coords) if c)

    def vector(self):
        return _gf(self.order)(list(self.coords))

    def frobenius(self) -> 'ProjPoint':
        GF = _gf(self.order)
        return ProjPoint.make([int(x) for x in self.vector() ** GF.characteristic], self.order)

    def degree(self) -> int:
        """Degree over F_p of the field generated by the coordinates."""
        point, e = self.frobenius(), 1
        while point != self:
            point, e = point.frobenius(), e + 1
        return e

    def __str__(self):
        return "[" + ":".join(str(c) for c in self.coords) + "]"


def enumerate_points(p: int, extension: int, n: int) -> List[ProjPoint]:
    """All points of P^{n-1}(F_{p^e}), e = extension, in lexicographic order."""
    order = p ** extension
    points = []
    for pivot in range(n):
        for tail in itertools.product(range(order), repeat=n - pivot - 1):
            points.append(ProjPoint((0,) * pivot + (1,) + tail, order))
    return points


# ============================================================================
# SUPPORT SETS
# ============================================================================

@dataclass
class SupportSet:
    """
    Support of a module as a point set over F_{p^e}.

    Attributes:
        provenance: module the support belongs to
        characteristic: p
        extension: e, points are enumerated over F_{p^e}
        n: number of deformation parameters
        points: members
        witnesses: point -> degrees that decided the verdict
        ideal: annihilator generators in theta_1..theta_n (empty when not computed)
        sigma_points: members under the sigma-variant, when computed
        checks: consistency checks run on the set
    """
    provenance: str
    characteristic: int
    extension: int
    n: int
    points: List[ProjPoint] = field(default_factory=list)
    witnesses: Dict[str, List[int]] = field(default_factory=dict)
    ideal: List[str] = field(default_factory=list)
    sigma_points: Optional[List[ProjPoint]] = None
    checks: Dict[str, bool] = field(default_factory=dict)

    @property
    def order(self) -> int:
        return self.characteristic ** self.extension

    def __contains__(self, point: ProjPoint) -> bool:
        return point in set(self.points)

    def point_set(self) -> set:
        return set(self.points)

    def is_empty(self) -> bool:
        return not self.points

    def is_everything(self) -> bool:
        q = self.order
        return len(self.points) == sum(q ** k for k in range(self.n))

    def intersection(self, other: 'SupportSet') -> List[ProjPoint]:
        theirs = other.point_set()
        return [c for c in self.points if c in theirs]

    def describe(self) -> Dict:
        return {'module': self.provenance, 'field': f"F_{self.characteristic}^{self.extension}",
                'points': [str(c) for c in self.points], 'ideal': self.ideal,
                'witnesses': self.witnesses, 'checks': self.checks}


# ============================================================================
# MEMBERSHIP
# ============================================================================

class _ThetaAction:
    """theta matrices of an Ext table, or other operators on it, carried over to F_q."""

    def __init__(self, table: ExtTable, order: int, operators: Optional[List[List]] = None):
        F = table.fieldspec
        operators = table.theta if operators is None else operators
        self.GF = _gf(order)
        self.dims = list(table.dims)
        self.bound = table.bound
        self.n = len(operators)
        self.theta = [[self.GF(F.as_int_array(M) % order) for M in mats] for mats in operators]

    def combination(self, form: Sequence[int], d: int):
        """sum_i form_i theta_i : Ext^d -> Ext^{d+2}."""
        out = self.GF.Zeros((self.dims[d + 2], self.dims[d]))
        for i, c in enumerate(form):
            if c:
                out = out + self.GF(int(c)) * self.theta[i][d]
        return out

    def image(self, forms: Sequence[Sequence[int]], d: int):
        """Columns spanning sum over the forms of form * Ext^{d-2} in Ext^d."""
        if d < 2 or not forms or self.dims[d - 2] == 0:
            return self.GF.Zeros((self.dims[d], 0))
        return np.hstack([self.combination(form, d - 2) for form in forms])


def _rank(M) -> int:
    return 0 if M.size == 0 else int(np.linalg.matrix_rank(M))


def _membership(action: _ThetaAction, forms: Sequence[Sequence[int]], pivot: Sequence[int],
                s: int) -> Tuple[bool, List[int]]:
    """
    Verdict for the quotient of Ext by the ideal spanned by ``forms``, with
    ``pivot`` acting as the specialization parameter t.
    """
    D = action.bound
    if s < 3 or s > D + 1:
        raise InconclusiveError(f"stability window {s} does not fit degrees 0..{D}")
    window = list(range(D - s + 1, D + 1))
    images = {d: action.image(forms, d) for d in range(max(0, D - s - 1), D + 1)}
    quotient = {d: action.dims[d] - _rank(images[d]) for d in images}
    if all(quotient[d] == 0 for d in window):
        return False, window
    injective = True
    for d in window:
        if d + 2 > D:
            continue
        if quotient[d] == 0:
            continue
        I = images[d + 2]
        P = action.combination(pivot, d)
        joined = np.hstack([I, P]) if I.shape[1] else P
        if _rank(joined) - _rank(I) != quotient[d]:
            injective = False
            break
    if injective and any(quotient[d] for d in window):
        return True, window
    raise InconclusiveError("quotient neither vanishes nor grows in the stability window; raise D",
                            witnesses=window)


def _point_forms(point: ProjPoint) -> Tuple[List[List[int]], List[int]]:
    """theta_i - c_i theta_r for i != r, and theta_r, with r the pivot of c."""
    GF = _gf(point.order)
    r = point.pivot
    forms = []
    for i, c in enumerate(point.coords):
        if i == r:
            continue
        form = [0] * len(point.coords)
        form[i] = 1
        form[r] = int(-GF(c))
        forms.append(form)
    pivot = [0] * len(point.coords)
    pivot[r] = 1
    return forms, pivot


def hypersurface_member(V: FdModule, c: ProjPoint, D: int, s: int = 4,
                        table: Optional[ExtTable] = None, cache=None) -> Tuple[bool, List[int]]:
    """
    Whether V is outside the perfect modules over the hypersurface at c,
    with the degrees that decided it. ``table`` is Ext(V, Lambda) if already computed.
    """
    _require_prime_field(V.fieldspec)
    if table is None:
        table = ext_table(V, simples_module(V.algebra), D, cache=cache)
    action = _ThetaAction(table, c.order)
    forms, pivot = _point_forms(c)
    return _membership(action, forms, pivot, s)


def _support_points(table: ExtTable, points: Sequence[ProjPoint], s: int,
                    workers: int = 1) -> Tuple[List[ProjPoint], Dict[str, List[int]]]:
    if not points:
        return [], {}
    action = _ThetaAction(table, points[0].order)

    def decide(point: ProjPoint):
        forms, pivot = _point_forms(point)
        return _membership(action, forms, pivot, s)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            verdicts = list(executor.map(decide, points))
    else:
        verdicts = [decide(point) for point in points]
    members, witnesses = [], {}
    for point, (member, degrees) in zip(points, verdicts):
        LOGGER.debug("point %s: %s (degrees %s)", point, "member" if member else "not member", degrees)
        if member:
            members.append(point)
        witnesses[str(point)] = degrees
    return members, witnesses


# ============================================================================
# ANNIHILATOR IDEALS
# ============================================================================

def _theta_monomial_matrix(table: ExtTable, word: Sequence[int], d: int):
    F = table.fieldspec
    M = F.identity(table.dims[d])
    for step, i in enumerate(reversed(word)):
        M = F.matmul(table.theta[i][d + 2 * step], M)
    return M


def annihilator_generators(table: ExtTable) -> List[Dict[Tuple[int, ...], int]]:
    """
    Homogeneous polynomials in theta killing Ext^d for every d with
    d + 2 * degree <= bound, reduced to those not generated by lower degrees.
    """
    F = table.fieldspec
    n = len(table.theta)
    D = table.bound
    generators: List[Dict[Tuple[int, ...], int]] = []
    lower: Dict[int, List[Dict[Tuple[int, ...], int]]] = {}
    for j in range(1, D // 2 + 1):
        words = list(itertools.combinations_with_replacement(range(n), j))
        exponents = [tuple(w.count(i) for i in range(n)) for w in words]
        index = {e: k for k, e in enumerate(exponents)}
        blocks = []
        for d in range(D - 2 * j + 1):
            if table.dims[d] == 0 or table.dims[d + 2 * j] == 0:
                continue
            flat = [[x for row in F.entries(_theta_monomial_matrix(table, w, d)) for x in row] for w in words]
            blocks.append(F.transpose(F.matrix(flat, table.dims[d] * table.dims[d + 2 * j])))
        stacked = F.vstack(blocks, len(words))
        kernel = F.nullspace(stacked)
        elements = []
        for col in zip(*F.entries(kernel)) if F.shape(kernel)[1] else []:
            elements.append({exponents[k]: x for k, x in enumerate(col) if not F.is_zero(x)})
        lower[j] = elements
        # multiples of lower-degree annihilators by single thetas
        spanned = []
        for element in lower.get(j - 1, []):
            for i in range(n):
                shifted = {tuple(e + (1 if t == i else 0) for t, e in enumerate(mono)): x
                           for mono, x in element.items()}
                spanned.append([shifted.get(e, F.zero) for e in exponents])
        span = F.transpose(F.matrix(spanned, len(words))) if spanned else F.zeros(len(words), 0)
        for k in F.complement_pivots(span, kernel) if elements else []:
            generators.append(elements[k])
    return generators


def format_polynomial(poly: Dict[Tuple[int, ...], int], n: int) -> str:
    thetas = sympy.symbols(f"theta1:{n + 1}")
    expr = sum(int(x) * sympy.Mul(*[t ** e for t, e in zip(thetas, mono)]) for mono, x in poly.items())
    return str(sympy.expand(expr))


def _vanishes_at(poly: Dict[Tuple[int, ...], int], point: ProjPoint) -> bool:
    GF = _gf(point.order)
    vec = point.vector()
    total = GF(0)
    for mono, x in poly.items():
        term = GF(int(x) % GF.characteristic)
        for c, e in zip(vec, mono):
            term = term * c ** e
        total = total + term
    return int(total) == 0


# ============================================================================
# SUPPORTS
# ============================================================================

def cohom_support(V: FdModule, D: int, s: int = 4, extension: int = 2, sigma_check: bool = True,
                  with_ideal: bool = True, workers: int = 1, cache=None) -> SupportSet:
    """
    Support of V over P^{n-1}(F_{p^e}): the points where V is not perfect
    over the hypersurface, the annihilator ideal of Ext(V, V) and, with
    ``sigma_check``, the same point set computed through Ext(Lambda (x) V, k).
    """
    H = V.algebra
    F = H.fieldspec
    _require_prime_field(F)
    Lam = simples_module(H)
    points = enumerate_points(F.p, extension, H.n)
    table = ext_table(V, Lam, D, cache=cache)
    members, witnesses = _support_points(table, points, s, workers)
    support = SupportSet(provenance=V.provenance, characteristic=F.p, extension=extension, n=H.n,
                         points=members, witnesses=witnesses)

    member_set = set(members)
    if with_ideal:
        generators = annihilator_generators(ext_table(V, V, D, cache=cache))
        support.ideal = [format_polynomial(g, H.n) for g in generators]
        # zero locus of the ideal and the member set coincide
        support.checks['ideal_consistent'] = all(
            all(_vanishes_at(g, c) for g in generators) == (c in member_set) for c in points)
    if sigma_check:
        sigma_table = ext_table(tensor(Lam, V), trivial_module(H), D, cache=cache)
        support.sigma_points, _ = _support_points(sigma_table, points, s, workers)
        support.checks['sigma_agrees'] = set(support.sigma_points) == member_set
    support.checks['galois_stable'] = all(c.frobenius() in member_set for c in members)
    LOGGER.info("support of %s over %s: %d of %d points", V.provenance, H.name, len(members), len(points))
    return support


def rank_variety_oracle(V: FdModule, extension: int = 2) -> SupportSet:
    """
    Non-free locus of V over the one-parameter subalgebras k[u_c]/(u_c^p),
    u_c = sum_i c_i^{1/p} x_i, for V over k[x_1..x_n]/(x_i^p).
    """
    H = V.algebra
    F = H.fieldspec
    pbw = H.pbw
    if H.kind != 'local' or F.kind != 'prime' or not pbw.is_skew_polynomial() \
            or any(N != F.p for N in pbw.nilpotency) \
            or any(not F.eq(q, F.one) for q, _ in pbw.relations.values()):
        raise UnsupportedAlgebraError("the rank variety is defined for k[x_1..x_n]/(x_i^p)")
    p = F.p
    order = p ** extension
    GF = _gf(order)
    actions = [GF(F.as_int_array(A) % p) for A in V.actions]
    free_rank = V.dim * (p - 1) // p
    members = []
    witnesses = {}
    for point in enumerate_points(p, extension, H.n):
        roots = point.vector() ** (p ** (extension - 1))
        U = GF.Zeros((V.dim, V.dim))
        for r, A in zip(roots, actions):
            U = U + r * A
        rank = _rank(U)
        witnesses[str(point)] = [rank]
        if V.dim % p or rank != free_rank:
            members.append(point)
    LOGGER.info("rank variety of %s: %d points", V.provenance, len(members))
    return SupportSet(provenance=V.provenance, characteristic=p, extension=extension, n=H.n,
                      points=members, witnesses=witnesses)


# ============================================================================
# TENSOR PRODUCT PROPERTY
# ============================================================================

def _compare(lhs: set, rhs: set) -> str:
    if lhs == rhs:
        return 'equal'
    if lhs < rhs:
        return 'lhs_proper_subset'
    if lhs > rhs:
        return 'lhs_proper_superset'
    return 'incomparable'


def _memo_support(V: FdModule, memo: Optional[Dict[str, SupportSet]], options: Dict) -> SupportSet:
    if memo is None:
        return cohom_support(V, **options)
    key = V.content_hash()
    if key not in memo:
        memo[key] = cohom_support(V, **options)
    return memo[key]


def tpp_check(V: FdModule, W: FdModule, D: int, s: int = 4, extension: int = 2,
              workers: int = 1, cache=None, memo: Optional[Dict[str, SupportSet]] = None) -> Dict:
    """
    Compare supp(V (x) W) with supp(V) intersected with supp(W).

    ``memo`` maps module content hashes to supports already computed with
    the same D, s and extension.
    """
    H = V.algebra
    options = dict(D=D, s=s, extension=extension, sigma_check=False, with_ideal=False,
                   workers=workers, cache=cache)
    sv = _memo_support(V, memo, options)
    sw = _memo_support(W, memo, options)
    svw = _memo_support(tensor(V, W), memo, options)
    lhs = svw.point_set()
    rhs = set(sv.intersection(sw))
    report = {
        'algebra': H.name,
        'left': V.provenance,
        'right': W.provenance,
        'lhs_points': sorted(str(c) for c in lhs),
        'rhs_points': sorted(str(c) for c in rhs),
        'only_lhs': sorted(str(c) for c in lhs - rhs),
        'only_rhs': sorted(str(c) for c in rhs - lhs),
        'verdict': _compare(lhs, rhs),
        'weak_inclusion_expected': H.z_is_hopf,
        'weak_inclusion_holds': lhs <= rhs,
    }
    LOGGER.info("TPP for (%s, %s) over %s: %s", V.provenance, W.provenance, H.name, report['verdict'])
    return report


def centralized_tpp_check(b: HalfBraiding, W: FdModule, D: int, s: int = 4, extension: int = 2,
                          workers: int = 1, cache=None, memo: Optional[Dict[str, SupportSet]] = None) -> Dict:
    """tpp_check for the underlying module of a validated half-braiding."""
    validation = check_half_braiding(b)
    if not validation['passed']:
        failed = [name for name, entry in validation['checks'].items() if not entry['passed']]
        raise InvalidHalfBraidingError(f"half-braiding of {b.module.provenance} fails {failed}")
    report = tpp_check(b.module, W, D, s, extension, workers, cache, memo)
    report['braiding'] = b.kind
    return report


# ============================================================================
# PERFECTION INVARIANCE
# ============================================================================

def _parameter_polynomial(text: str, symbols, p: int) -> sympy.Poly:
    local = {str(x): x for x in symbols}
    try:
        return sympy.Poly(sympy.sympify(text, locals=local), *symbols, modulus=p)
    except (sympy.SympifyError, BasePolynomialError) as exc:
        names = ", ".join(str(x) for x in symbols)
        raise InvalidDeformationError(f"'{text}' is not a polynomial in {names} over F_{p}") from exc


class _Elimination:
    """f_r as a series in the other parameters on f = 0, truncated at ``weight``."""

    def __init__(self, poly: sympy.Poly, r: int, weight: int):
        self.gens = poly.gens
        self.p = int(poly.get_modulus())
        self.r = r
        self.weight = weight
        x_r = self.gens[r]
        lead = int(poly.coeff_monomial(x_r)) % self.p
        rest = poly - sympy.Poly(lead * x_r, *self.gens, modulus=self.p)
        inverse = pow(lead, -1, self.p)
        series = self._zero()
        for _ in range(weight):
            substituted = sympy.Poly(rest.as_expr().subs(x_r, series.as_expr()), *self.gens, modulus=self.p)
            series = self._truncate(substituted * (-inverse))
        self.series = series
        self._powers: Dict[Tuple[int, ...], Dict[Tuple[int, ...], int]] = {}

    def _zero(self) -> sympy.Poly:
        return sympy.Poly(0, *self.gens, modulus=self.p)

    def _truncate(self, poly: sympy.Poly) -> sympy.Poly:
        kept = {m: c for m, c in poly.as_dict().items() if sum(m) <= self.weight}
        return sympy.Poly.from_dict(kept, *self.gens, modulus=self.p) if kept else self._zero()

    def expand(self, e: Tuple[int, ...]) -> Dict[Tuple[int, ...], int]:
        """f^e with f_r replaced by the series."""
        if e not in self._powers:
            poly = sympy.Poly(1, *self.gens, modulus=self.p)
            for i, power in enumerate(e):
                factor = self.series if i == self.r else sympy.Poly(self.gens[i], *self.gens, modulus=self.p)
                for _ in range(power):
                    poly = self._truncate(poly * factor)
            self._powers[e] = {m: int(c) % self.p for m, c in poly.as_dict().items() if int(c) % self.p}
        return self._powers[e]


def deformation_presentation(table: ExtTable, f: str) -> Tuple[RebasedLift, List[int]]:
    """
    Rebase the lift behind ``table`` onto the hypersurface Z/(f).

    f is a polynomial in f1..fn without constant term. The parameter with
    the first nonzero linear coefficient is solved for on f = 0 and
    substituted, higher-order terms included, into the squared lift.
    Returns the rebased lift and the linear part of f.
    """
    H = table.source.algebra
    F = H.fieldspec
    _require_prime_field(F)
    symbols = sympy.symbols(f"f1:{H.n + 1}")
    poly = _parameter_polynomial(f, symbols, F.p)
    if int(poly.coeff_monomial(1)) % F.p:
        raise InvalidDeformationError(f"{poly.as_expr()} does not vanish at the origin")
    linear = [int(poly.coeff_monomial(x)) % F.p for x in symbols]
    if not any(linear):
        raise InvalidDeformationError(f"{poly.as_expr()} has zero linear part")
    r = next(k for k, c in enumerate(linear) if c)
    weight = max(2, sum(B // m for B, m in zip(table.lifted.bound, H.pbw.nilpotency)))
    elimination = _Elimination(poly, r, weight)
    return rebase_lift(H, table.lifted, r, elimination.expand), linear


def _presentation_verdict(table: ExtTable, rebased: RebasedLift, operators: List[List],
                          s: int) -> Tuple[bool, List[int]]:
    """Quotient by the kept parameters of Z/(f), with theta_r as t."""
    m = len(operators)
    action = _ThetaAction(table, table.fieldspec.p, operators + [table.theta[rebased.eliminated]])
    forms = [[1 if i == j else 0 for i in range(m + 1)] for j in range(m)]
    return _membership(action, forms, [0] * m + [1], s)


def perfection_invariance_check(V: FdModule, f: str, g: str, D: int, s: int = 4,
                                cache=None) -> Dict:
    """
    Membership verdicts for the hypersurfaces Z/(f) and Z/(g), with f and g
    polynomials in f1..fn sharing their linear part. Each verdict runs
    through the lift rebased onto its own presentation.
    """
    H = V.algebra
    F = H.fieldspec
    _require_prime_field(F)
    table = ext_table(V, simples_module(H), D, cache=cache)
    presentations = [deformation_presentation(table, text) for text in (f, g)]
    if presentations[0][1] != presentations[1][1]:
        raise InvalidDeformationError("f and g have different linear parts")
    operators = [rebased_theta(table, rebased) for rebased, _ in presentations]
    agree = all(F.equal(a, b) for left, right in zip(*operators) for a, b in zip(left, right))
    verdicts = [_presentation_verdict(table, rebased, ops, s)[0]
                for (rebased, _), ops in zip(presentations, operators)]
    LOGGER.info("perfection of %s over Z/(%s) and Z/(%s): %s", V.provenance, f, g, verdicts)
    return {'module': V.provenance, 'f': f, 'g': g,
            'linear_part': presentations[0][1],
            'higher_terms': [rebased.higher_terms for rebased, _ in presentations],
            'operators_agree': agree,
            'verdicts': verdicts, 'passed': agree and verdicts[0] == verdicts[1]}
