"""
q-Koszul Complexes and Twisted Products
=======================================

When the integration is a skew polynomial algebra Q = k_q[x_1..x_n], the
trivial module has the finite free resolution F = Q (x) Lambda_q(d_1..d_n)
with

    d(a (x) d_S) = sum_j (-1)^{j+1} c(S, j) a x_{s_j} (x) d_{S - s_j}

where c(S, j) undoes the commutation of x_{s_j} past the earlier x_{s_t}.
Multiplication by the central f_i = x_i^{N_i} is null-homotopic through
sigma_i(a (x) d_S) = kappa(S, i) a x_i^{N_i - 1} (x) d_{S + i}.

Against an R-module M (R = Q / (f_i)) the homotopies become contraction
operators y_i on Hom_Q(F, M), and the twisted product
k[y^1..y^n] (x) Hom_Q(F, M) with differential 1 (x) delta + sum y^i (x) y_i
computes Ext_R(k, M). verify_twtt compares it with the minimal resolution
computation of homology.py.
"""

import itertools
import logging
from math import comb
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from errors import ResolutionError, UnsupportedAlgebraError
from fd_modules import FdModule, dual, tensor
from fields import FieldSpec, Matrix, Scalar
from hopf_algebras import HopfAlgebra
from homology import ext_table
from pbw_algebra import Element, accumulate

LOGGER = logging.getLogger(__name__)

Subset = Tuple[int, ...]
QVector = Dict[Subset, Element]


# ============================================================================
# THE q-KOSZUL RESOLUTION
# ============================================================================

@dataclass
class QKoszulComplex:
    """
    Koszul resolution of k over a skew polynomial integration.

    Attributes:
        algebra: the HopfAlgebra whose integration is resolved
        subsets: subsets[r] = sorted r-element subsets S indexing d_S
        terms: d(d_S) = sum coeff * x_s (x) d_T, stored as S -> [(coeff, s, T)]
        homotopy: (S, i) -> kappa(S, i) for i not in S
        twist: twist[s][k] = beta(s, k) with x_s x_k = beta(s, k) x_k x_s
        checks: results of the construction-time identities
    """
    algebra: HopfAlgebra
    subsets: List[List[Subset]]
    terms: Dict[Subset, List[Tuple[Scalar, int, Subset]]]
    homotopy: Dict[Tuple[Subset, int], Scalar]
    twist: List[List[Scalar]]
    checks: Dict[str, bool] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.algebra.n

    @property
    def ranks(self) -> List[int]:
        return [len(level) for level in self.subsets]

    def label(self, S: Subset):
        H = self.algebra
        return H.label_of_monomial(tuple(1 if i in S else 0 for i in range(H.n)))

    # -- operators on Q-combinations of the d_S ---------------------------

    def _ring(self):
        return self.algebra.pbw.integration()

    def apply_d(self, vec: QVector) -> QVector:
        Q = self._ring()
        F = self.algebra.fieldspec
        out: QVector = {}
        for S, a in vec.items():
            for coeff, s, T in self.terms[S]:
                prod = Q.mul(a, {self.algebra.pbw.unit_vector(s): coeff})
                accumulate(F, out.setdefault(T, {}), prod, F.one)
        return {T: a for T, a in out.items() if a}

    def apply_sigma(self, i: int, vec: QVector) -> QVector:
        Q = self._ring()
        F = self.algebra.fieldspec
        pbw = self.algebra.pbw
        power = {pbw.unit_vector(i, pbw.nilpotency[i] - 1): F.one}
        out: QVector = {}
        for S, a in vec.items():
            if i in S:
                continue
            target = tuple(sorted(S + (i,)))
            prod = Q.mul(a, power)
            accumulate(F, out.setdefault(target, {}), prod, self.homotopy[(S, i)])
        return {T: a for T, a in out.items() if a}

    def apply_right(self, k: int, vec: QVector) -> QVector:
        """Twisted right action (a (x) d_S) x_k = beta(S, k) a x_k (x) d_S."""
        Q = self._ring()
        F = self.algebra.fieldspec
        xk = {self.algebra.pbw.unit_vector(k): F.one}
        out: QVector = {}
        for S, a in vec.items():
            coeff = F.one
            for s in S:
                coeff = F.mul(coeff, self.twist[s][k])
            prod = Q.mul(a, xk)
            if prod:
                out[S] = {c: F.mul(coeff, x) for c, x in prod.items()}
        return out


def _commutation(H: HopfAlgebra, s: int, k: int) -> Scalar:
    """beta(s, k) with x_s x_k = beta(s, k) x_k x_s."""
    F = H.fieldspec
    if s == k:
        return F.one
    if s > k:
        return H.pbw.relations[(s, k)][0]
    return F.inv(H.pbw.relations[(k, s)][0])


def _q_vectors_equal(F: FieldSpec, a: QVector, b: QVector) -> bool:
    for S in set(a) | set(b):
        diff = dict(a.get(S, {}))
        accumulate(F, diff, b.get(S, {}), F.neg(F.one))
        if diff:
            return False
    return True


def q_koszul_resolution(H: HopfAlgebra) -> QKoszulComplex:
    """
    Koszul resolution of k over the integration of H, with d^2 = 0, the
    homotopy identities d sigma_i + sigma_i d = f_i and the left-twist
    identity verified exactly.
    """
    pbw = H.pbw
    F = H.fieldspec
    if not pbw.is_skew_polynomial():
        raise UnsupportedAlgebraError(f"{H.name}: integration is not a skew polynomial algebra")
    if H.kind == 'blocks':
        raise UnsupportedAlgebraError(f"{H.name}: block algebras are resolved per block in homology")
    n = H.n
    twist = [[_commutation(H, s, k) for k in range(n)] for s in range(n)]
    for i in range(n):
        N = pbw.nilpotency[i]
        if H.label_of_monomial(pbw.unit_vector(i, N)) != H.label_zero:
            raise UnsupportedAlgebraError(f"f_{i + 1} is not of trivial label")
        for k in range(n):
            if not F.eq(F.power(twist[i][k], N), F.one):
                raise UnsupportedAlgebraError(f"f_{i + 1} is not central in the integration")

    subsets = [list(itertools.combinations(range(n), r)) for r in range(n + 1)]
    terms: Dict[Subset, List[Tuple[Scalar, int, Subset]]] = {}
    homotopy: Dict[Tuple[Subset, int], Scalar] = {}
    for level in subsets:
        for S in level:
            entries = []
            for j, s in enumerate(S):
                coeff = F.one if j % 2 == 0 else F.neg(F.one)
                for t in S[:j]:
                    coeff = F.mul(coeff, F.inv(twist[s][t]))
                entries.append((coeff, s, S[:j] + S[j + 1:]))
            terms[S] = entries
            for i in range(n):
                if i in S:
                    continue
                before = [t for t in S if t < i]
                kappa = F.one if len(before) % 2 == 0 else F.neg(F.one)
                for t in before:
                    kappa = F.mul(kappa, twist[i][t])
                homotopy[(S, i)] = kappa

    K = QKoszulComplex(algebra=H, subsets=subsets, terms=terms, homotopy=homotopy, twist=twist)
    K.checks['square_zero'] = all(not K.apply_d(K.apply_d({S: {pbw.unit(): F.one}}))
                                  for level in subsets for S in level)
    if not K.checks['square_zero']:
        raise ResolutionError(f"{H.name}: q-Koszul differential does not square to zero")
    K.checks['homotopy'] = _homotopy_identities(K)
    K.checks['left_twist'] = _left_twist_identities(K)
    LOGGER.info("q-Koszul resolution of k over %s: ranks %s, checks %s", H.name, K.ranks, K.checks)
    return K


def _homotopy_identities(K: QKoszulComplex) -> bool:
    """d sigma_i + sigma_i d = f_i on every d_S."""
    pbw = K.algebra.pbw
    F = K.algebra.fieldspec
    for level in K.subsets:
        for S in level:
            basis = {S: {pbw.unit(): F.one}}
            for i in range(K.n):
                lhs = K.apply_d(K.apply_sigma(i, basis))
                for T, a in K.apply_sigma(i, K.apply_d(basis)).items():
                    accumulate(F, lhs.setdefault(T, {}), a, F.one)
                expected = {S: {pbw.unit_vector(i, pbw.nilpotency[i]): F.one}}
                if not _q_vectors_equal(F, lhs, expected):
                    return False
    return True


def _left_twist_identities(K: QKoszulComplex) -> bool:
    """d commutes with the twisted right action of every generator."""
    pbw = K.algebra.pbw
    F = K.algebra.fieldspec
    for level in K.subsets:
        for S in level:
            basis = {S: {pbw.unit(): F.one}}
            for k in range(K.n):
                if not _q_vectors_equal(F, K.apply_d(K.apply_right(k, basis)),
                                        K.apply_right(k, K.apply_d(basis))):
                    return False
    return True


# ============================================================================
# COCHAIN COMPLEXES WITH CONTRACTIONS
# ============================================================================

@dataclass
class ContractionComplex:
    """
    Finite cochain complex C^0..C^n with operators y_i of degree -1.

    Attributes:
        fieldspec: coefficient field
        dims: dim C^r
        delta: delta[r] : C^r -> C^{r+1}
        contractions: contractions[i][r] : C^r -> C^{r-1} (r >= 1; index 0 unused)
    """
    fieldspec: FieldSpec
    dims: List[int]
    delta: List[Matrix]
    contractions: List[List[Optional[Matrix]]]

    @property
    def length(self) -> int:
        return len(self.dims) - 1

    def square_zero(self) -> bool:
        F = self.fieldspec
        return all(F.is_zero_matrix(F.matmul(self.delta[r + 1], self.delta[r]))
                   for r in range(self.length - 1))

    def cohomology_dims(self) -> List[int]:
        F = self.fieldspec
        out = []
        for r, dim in enumerate(self.dims):
            kernel = dim - (F.rank(self.delta[r]) if r < self.length else 0)
            image = F.rank(self.delta[r - 1]) if r >= 1 else 0
            out.append(kernel - image)
        return out


def hom_complex(K: QKoszulComplex, M: FdModule, equivariant: bool = True) -> ContractionComplex:
    """Hom_Q(F, M) with delta phi = phi o d and y_i phi = phi o sigma_i."""
    H = K.algebra
    F = H.fieldspec
    pbw = H.pbw
    rows = {S: (M.label_indices(K.label(S)) if equivariant else list(range(M.dim)))
            for level in K.subsets for S in level}
    offsets = {}
    dims = []
    for level in K.subsets:
        total = 0
        for S in level:
            offsets[S] = total
            total += len(rows[S])
        dims.append(total)

    def place(values, block: Matrix, S_out: Subset, S_in: Subset, coeff: Scalar):
        sub = F.entries(F.take(block, rows[S_out], rows[S_in]))
        for r, line in enumerate(sub):
            for c, x in enumerate(line):
                if not F.is_zero(x):
                    key = (offsets[S_out] + r, offsets[S_in] + c)
                    values[key] = F.add(values.get(key, F.zero), F.mul(coeff, x))

    delta = []
    for r in range(K.n):
        values: Dict[Tuple[int, int], Scalar] = {}
        for S in K.subsets[r + 1]:
            for coeff, s, T in K.terms[S]:
                if rows[S] and rows[T]:
                    place(values, M.actions[s], S, T, coeff)
        delta.append(F.from_sparse(dims[r + 1], dims[r], values))
    delta.append(F.zeros(0, dims[K.n]))

    contractions: List[List[Optional[Matrix]]] = []
    for i in range(H.n):
        power = M.act_monomial(pbw.unit_vector(i, pbw.nilpotency[i] - 1))
        per_degree: List[Optional[Matrix]] = [None]
        for r in range(1, K.n + 1):
            values = {}
            for T in K.subsets[r - 1]:
                if i in T:
                    continue
                S = tuple(sorted(T + (i,)))
                if rows[T] and rows[S]:
                    place(values, power, T, S, K.homotopy[(T, i)])
            per_degree.append(F.from_sparse(dims[r - 1], dims[r], values))
        contractions.append(per_degree)
    return ContractionComplex(fieldspec=F, dims=dims, delta=delta, contractions=contractions)


def exterior_contraction_complex(F: FieldSpec, n: int) -> ContractionComplex:
    """Lambda(k^n) with zero differential and y_i the contraction by the i-th basis vector."""
    subsets = [list(itertools.combinations(range(n), r)) for r in range(n + 1)]
    index = {S: k for level in subsets for k, S in enumerate(level)}
    dims = [len(level) for level in subsets]
    delta = [F.zeros(dims[r + 1], dims[r]) for r in range(n)] + [F.zeros(0, dims[n])]
    contractions: List[List[Optional[Matrix]]] = []
    for i in range(n):
        per_degree: List[Optional[Matrix]] = [None]
        for r in range(1, n + 1):
            values = {}
            for S in subsets[r]:
                if i in S:
                    pos = S.index(i)
                    sign = F.one if pos % 2 == 0 else F.neg(F.one)
                    values[(index[S[:pos] + S[pos + 1:]], index[S])] = sign
            per_degree.append(F.from_sparse(dims[r - 1], dims[r], values))
        contractions.append(per_degree)
    return ContractionComplex(fieldspec=F, dims=dims, delta=delta, contractions=contractions)


# ============================================================================
# TWISTED PRODUCTS
# ============================================================================

def _symmetric_monomials(n: int, p: int) -> List[Tuple[int, ...]]:
    return sorted((tuple(word.count(i) for i in range(n))
                   for word in itertools.combinations_with_replacement(range(n), p)), reverse=True)


class TwistedProduct:
    """
    k[y^1..y^n] (x) C with differential 1 (x) delta + sum_i y^i (x) y_i,
    truncated to polynomial degree ``poly_bound``. Total degree is
    2 * (polynomial degree) + (cochain degree).
    """

    def __init__(self, complex_: ContractionComplex, n: int, bound: int,
                 poly_bound: Optional[int] = None):
        self.complex = complex_
        self.F = complex_.fieldspec
        self.n = n
        self.bound = bound
        self.poly_bound = (bound + 1) // 2 + 1 if poly_bound is None else poly_bound
        self.monomials = [_symmetric_monomials(n, p) for p in range(self.poly_bound + 1)]
        self._differentials: Dict[int, Matrix] = {}

    def components(self, m: int) -> List[Tuple[int, int]]:
        out = []
        for r in range(self.complex.length + 1):
            if (m - r) >= 0 and (m - r) % 2 == 0 and (m - r) // 2 <= self.poly_bound:
                out.append(((m - r) // 2, r))
        return out

    def _layout(self, m: int) -> Tuple[Dict[Tuple[int, int], int], int]:
        offsets, total = {}, 0
        for p, r in self.components(m):
            offsets[(p, r)] = total
            total += len(self.monomials[p]) * self.complex.dims[r]
        return offsets, total

    def dimension(self, m: int) -> int:
        return self._layout(m)[1]

    def _multiplication(self, p: int, i: int) -> Dict[int, int]:
        """Sym^p -> Sym^{p+1}, multiplication by y^i, as an index map."""
        target = {mono: k for k, mono in enumerate(self.monomials[p + 1])}
        out = {}
        for k, mono in enumerate(self.monomials[p]):
            bumped = list(mono)
            bumped[i] += 1
            out[k] = target[tuple(bumped)]
        return out

    def differential(self, m: int) -> Matrix:
        """D : T^m -> T^{m+1}."""
        if m in self._differentials:
            return self._differentials[m]
        F, C = self.F, self.complex
        src, nsrc = self._layout(m)
        dst, ndst = self._layout(m + 1)
        values: Dict[Tuple[int, int], Scalar] = {}

        def add_block(block: Matrix, mono_map: Dict[int, int], p_in: int, r_in: int, p_out: int, r_out: int):
            entries = F.entries(block)
            din, dout = C.dims[r_in], C.dims[r_out]
            for a, b in mono_map.items():
                for row, line in enumerate(entries):
                    for col, x in enumerate(line):
                        if not F.is_zero(x):
                            key = (dst[(p_out, r_out)] + b * dout + row, src[(p_in, r_in)] + a * din + col)
                            values[key] = F.add(values.get(key, F.zero), x)

        for p, r in src:
            if r < C.length and (p, r + 1) in dst:
                identity = {k: k for k in range(len(self.monomials[p]))}
                add_block(C.delta[r], identity, p, r, p, r + 1)
            if r >= 1 and (p + 1, r - 1) in dst:
                for i in range(self.n):
                    add_block(C.contractions[i][r], self._multiplication(p, i), p, r, p + 1, r - 1)
        D = F.from_sparse(ndst, nsrc, values)
        self._differentials[m] = D
        return D

    def square_zero(self) -> bool:
        F = self.F
        for m in range(self.bound + 1):
            if not F.is_zero_matrix(F.matmul(self.differential(m + 1), self.differential(m))):
                return False
        return True

    def cohomology_dims(self) -> List[int]:
        F = self.F
        dims = []
        for m in range(self.bound + 1):
            kernel = self.dimension(m) - F.rank(self.differential(m))
            image = F.rank(self.differential(m - 1)) if m >= 1 else 0
            dims.append(kernel - image)
        return dims


# ============================================================================
# VERIFICATION
# ============================================================================

def e1_bound(q_dims: List[int], n: int, D: int) -> List[int]:
    """dim of k[y^1..y^n] (x) Ext_Q in total degrees 0..D, y^i in degree 2."""
    out = []
    for m in range(D + 1):
        out.append(sum(comb((m - r) // 2 + n - 1, n - 1) * d
                       for r, d in enumerate(q_dims) if r <= m and (m - r) % 2 == 0))
    return out


def ext_q_bounded(C: ContractionComplex, twisted: List[int], n: int) -> bool:
    """
    Ext_Q from C lives in degrees 0..n with nonnegative dimensions, and the
    twisted product stays below k[y] (x) Ext_Q degree by degree.
    """
    if not C.square_zero() or C.length > n:
        return False
    q_dims = C.cohomology_dims()
    if any(d < 0 for d in q_dims):
        return False
    bound = e1_bound(q_dims, n, len(twisted) - 1)
    return all(t <= b for t, b in zip(twisted, bound))


def verify_twtt(V: FdModule, W: FdModule, D: int, equivariant: bool = True, cache=None) -> Dict:
    """
    Compare Ext^i_R(V, W) from the twisted product over the q-Koszul
    resolution with the minimal-resolution computation, for i <= D.
    """
    H = V.algebra
    K = q_koszul_resolution(H)
    M = tensor(W, dual(V))
    C = hom_complex(K, M, equivariant=equivariant)
    product = TwistedProduct(C, H.n, D)
    if not product.square_zero():
        raise ResolutionError("twisted differential does not square to zero")
    twisted = product.cohomology_dims()
    table = ext_table(V, W, D, equivariant=equivariant, cache=cache)
    rows = [{'degree': i, 'twisted': twisted[i], 'ext': table.dims[i], 'equal': twisted[i] == table.dims[i]}
            for i in range(D + 1)]
    q_dims = C.cohomology_dims()
    bounded = ext_q_bounded(C, twisted, H.n)
    report = {
        'algebra': H.name,
        'source': V.provenance,
        'target': W.provenance,
        'bound': D,
        'degrees': rows,
        'ext_q_dims': q_dims,
        'ext_q_bounded': bounded,
        'e1_bound': e1_bound(q_dims, H.n, D),
        'generation_degree': table.generation_degree(),
        'koszul_checks': dict(K.checks),
        'passed': all(row['equal'] for row in rows) and bounded,
    }
    LOGGER.info("twisted product vs Ext for (%s, %s) over %s: %s", V.provenance, W.provenance,
                H.name, "equal" if report['passed'] else "unequal")
    return report


def koszul_duality_check(F: FieldSpec, n: int, D: int) -> Dict:
    """k[y^1..y^n] (x)^t Lambda(k^n) has cohomology k in degree 0 and nothing else up to D."""
    product = TwistedProduct(exterior_contraction_complex(F, n), n, D)
    dims = product.cohomology_dims()
    expected = [1] + [0] * D
    return {'n': n, 'bound': D, 'dims': dims, 'square_zero': product.square_zero(),
            'passed': dims == expected and product.square_zero()}
