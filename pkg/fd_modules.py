"""
Finite-Dimensional Modules
==========================

A module is given by one action matrix per PBW generator (left action,
column vectors) and a label per basis vector: a character of the grouplikes
for smash products, a block for function algebras, and the empty label for
local algebras. Labels are how the group part acts, so every action matrix
must shift labels exactly by the degree of its generator.

This module also builds the standard test modules (free and cyclic modules,
simples, random quotients, Carlson modules), tensor products and duals
through the Hopf structure, and half-braidings against the simples of the
group part.
"""

import hashlib
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from errors import (AlgebraMismatchError, InconsistentSystemError, ModuleRelationError,
                    UnsupportedAlgebraError)
from fields import FieldSpec, Matrix, Scalar
from hopf_algebras import FullElement, HopfAlgebra, Key
from pbw_algebra import Element

LOGGER = logging.getLogger(__name__)


# ============================================================================
# MODULES
# ============================================================================

class FdModule:
    """
    Module over a HopfAlgebra given by action matrices.

    Attributes:
        algebra: the HopfAlgebra acted on
        labels: label of each basis vector
        actions: one dim x dim matrix per PBW generator
        provenance: how the module was built (kept in reports)
        flags: construction remarks such as a degenerate Carlson class
    """

    def __init__(self, algebra: HopfAlgebra, labels: Sequence[Any], actions: Sequence[Matrix],
                 provenance: str = "", validate: bool = True, flags: Optional[Dict] = None):
        self.algebra = algebra
        self.labels = list(labels)
        self.actions = list(actions)
        self.provenance = provenance
        self.flags = dict(flags or {})
        self._mono_memo: Dict[Tuple[int, ...], Matrix] = {}
        F = self.fieldspec
        if len(self.actions) != algebra.n:
            raise ModuleRelationError(f"expected {algebra.n} action matrices, got {len(self.actions)}")
        for A in self.actions:
            if F.shape(A) != (self.dim, self.dim):
                raise ModuleRelationError(f"action matrix of shape {F.shape(A)} on a module of dim {self.dim}")
        if validate:
            failures = self.relation_failures()
            if failures:
                raise ModuleRelationError(f"{provenance or 'module'}: " + "; ".join(failures[:3]))

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def fieldspec(self) -> FieldSpec:
        return self.algebra.fieldspec

    def __repr__(self):
        return f"FdModule(dim={self.dim}, algebra={self.algebra.name}, provenance={self.provenance!r})"

    # ------------------------------------------------------------------
    # actions
    # ------------------------------------------------------------------

    def act_monomial(self, c: Tuple[int, ...]) -> Matrix:
        hit = self._mono_memo.get(c)
        if hit is not None:
            return hit
        F = self.fieldspec
        result = F.identity(self.dim)
        for letter in self.algebra.pbw.word_of(c):
            result = F.matmul(result, self.actions[letter])
        self._mono_memo[c] = result
        return result

    def act_element(self, a: Element) -> Matrix:
        F = self.fieldspec
        result = F.zeros(self.dim, self.dim)
        for c, x in a.items():
            result = F.madd(result, F.mscale(x, self.act_monomial(c)))
        return result

    def group_matrix(self, g) -> Matrix:
        """Action of K_g (smash) or of the block idempotent e_g (blocks)."""
        H, F = self.algebra, self.fieldspec
        if H.kind == 'smash':
            return F.diag([F.zeta_power(H.kappa(g, lam)) for lam in self.labels])
        if H.kind == 'blocks':
            return F.diag([F.one if lam == g else F.zero for lam in self.labels])
        return F.identity(self.dim)

    def act_key(self, key: Key) -> Matrix:
        g, m = key
        return self.fieldspec.matmul(self.group_matrix(g), self.act_monomial(m))

    def act_full(self, a: FullElement) -> Matrix:
        F = self.fieldspec
        result = F.zeros(self.dim, self.dim)
        for key, x in a.items():
            result = F.madd(result, F.mscale(x, self.act_key(key)))
        return result

    def label_indices(self, label) -> List[int]:
        return [k for k, lam in enumerate(self.labels) if lam == label]

    def distinct_labels(self) -> List:
        seen = []
        for lam in self.labels:
            if lam not in seen:
                seen.append(lam)
        return seen

    # ------------------------------------------------------------------
    # validation
    # ------------------------------------------------------------------

    def relation_failures(self) -> List[str]:
        F = self.fieldspec
        H = self.algebra
        pbw = H.pbw
        failures = []
        A = self.actions
        for (j, i), (q, r) in sorted(pbw.relations.items()):
            lhs = F.msub(F.matmul(A[j], A[i]), F.mscale(q, F.matmul(A[i], A[j])))
            if not F.equal(lhs, self.act_element(r)):
                failures.append(f"relation {pbw.names[j]}{pbw.names[i]} violated")
        for i, N in enumerate(pbw.nilpotency):
            power = F.identity(self.dim)
            for _ in range(N):
                power = F.matmul(power, A[i])
            if not F.is_zero_matrix(power):
                failures.append(f"{pbw.names[i]}^{N} does not act by zero")
        for k, expr in sorted(pbw.definitions.items()):
            if not F.equal(A[k], _evaluate_words(F, self.dim, A, expr)):
                failures.append(f"definition of {pbw.names[k]} violated")
        for i, M in enumerate(A):
            rows = F.entries(M)
            for r_idx, row in enumerate(rows):
                for c_idx, x in enumerate(row):
                    if F.is_zero(x):
                        continue
                    expected = H.label_add(self.labels[c_idx], H.gen_labels[i]) if H.kind == 'smash' \
                        else self.labels[c_idx]
                    if self.labels[r_idx] != expected:
                        failures.append(f"{pbw.names[i]} does not respect labels at ({r_idx}, {c_idx})")
                        break
                else:
                    continue
                break
        return failures

    def content_hash(self) -> str:
        F = self.fieldspec
        digest = hashlib.sha256()
        digest.update(self.algebra.content_hash().encode())
        digest.update(repr(self.labels).encode())
        for A in self.actions:
            digest.update(repr(F.matrix_key(A)).encode())
        return digest.hexdigest()

    def describe(self) -> Dict:
        return {'dim': self.dim, 'provenance': self.provenance,
                'labels': sorted({str(lam) for lam in self.labels}), 'flags': self.flags}


def _evaluate_words(F: FieldSpec, dim: int, actions: Dict, expression) -> Matrix:
    result = F.zeros(dim, dim)
    for coeff, word in expression:
        term = F.identity(dim)
        for g in word:
            term = F.matmul(term, actions[g])
        result = F.madd(result, F.mscale(F.element(coeff), term))
    return result


def _complete_actions(H: HopfAlgebra, dim: int, partial: Dict[int, Matrix]) -> List[Matrix]:
    """Fill in the generators that are defined through other generators."""
    F = H.fieldspec
    actions = dict(partial)

    def resolve(k: int) -> Matrix:
        if k not in actions:
            expr = H.pbw.definitions[k]
            for _, word in expr:
                for g in word:
                    resolve(g)
            actions[k] = _evaluate_words(F, dim, actions, expr)
        return actions[k]

    return [resolve(k) for k in range(H.n)]


def _same_algebra(V: FdModule, W: FdModule):
    if V.algebra is not W.algebra and V.algebra.content_hash() != W.algebra.content_hash():
        raise AlgebraMismatchError(f"modules over {V.algebra.name} and {W.algebra.name}")


# ============================================================================
# TENSOR PRODUCTS AND DUALS
# ============================================================================

def tensor(V: FdModule, W: FdModule) -> FdModule:
    """V (x) W through the coproduct; basis v_a (x) w_b at index a * dim W + b."""
    _same_algebra(V, W)
    H, F = V.algebra, V.fieldspec
    dim = V.dim * W.dim
    partial = {}
    for i in H.pbw.simple_generators:
        M = F.zeros(dim, dim)
        for coeff, left, right in H.coproducts[i]:
            M = F.madd(M, F.mscale(coeff, F.kron(V.act_key(left), W.act_key(right))))
        partial[i] = M
    actions = _complete_actions(H, dim, partial)
    labels = [H.label_add(a, b) for a in V.labels for b in W.labels]
    return FdModule(H, labels, actions, provenance=f"({V.provenance}) (x) ({W.provenance})")


def dual(V: FdModule) -> FdModule:
    """V* with (x f)(v) = f(S(x) v)."""
    H, F = V.algebra, V.fieldspec
    partial = {i: F.transpose(V.act_full(H.antipodes[i])) for i in H.pbw.simple_generators}
    actions = _complete_actions(H, V.dim, partial)
    labels = [H.label_neg(lam) for lam in V.labels]
    return FdModule(H, labels, actions, provenance=f"({V.provenance})*")


def direct_sum(modules: Sequence[FdModule], provenance: str = "") -> FdModule:
    if not modules:
        raise ModuleRelationError("direct sum of no modules")
    for W in modules[1:]:
        _same_algebra(modules[0], W)
    H, F = modules[0].algebra, modules[0].fieldspec
    actions = [F.block_diag([W.actions[i] for W in modules]) for i in range(H.n)]
    labels = [lam for W in modules for lam in W.labels]
    provenance = provenance or " + ".join(f"({W.provenance})" for W in modules)
    return FdModule(H, labels, actions, provenance=provenance, validate=False)


# ============================================================================
# STANDARD MODULES
# ============================================================================

def one_dimensional(H: HopfAlgebra, label, provenance: str = "") -> FdModule:
    F = H.fieldspec
    return FdModule(H, [label], [F.zeros(1, 1) for _ in range(H.n)],
                    provenance=provenance or f"k_{label}")


def trivial_module(H: HopfAlgebra) -> FdModule:
    return one_dimensional(H, H.label_zero, provenance="k")


def simples(H: HopfAlgebra) -> List[FdModule]:
    """
    The one-dimensional simples, one per label. Every algebra built here is
    basic with all PBW generators in the radical.
    """
    return [one_dimensional(H, lam) for lam in H.label_elements()]


def simples_module(H: HopfAlgebra) -> FdModule:
    """Lambda = direct sum of all simples."""
    module = direct_sum(simples(H), provenance="Lambda")
    module.flags['components'] = len(module.labels)
    return module


def regular_actions(H: HopfAlgebra) -> List[Matrix]:
    """Left multiplication by each generator on the monomial basis of u+."""
    if 'regular' in H.derived:
        return H.derived['regular']
    F = H.fieldspec
    monos = H.pbw.monomials()
    index = {c: k for k, c in enumerate(monos)}
    fiber = H.pbw.fiber
    actions = []
    for i in range(H.n):
        values = {}
        for col, c in enumerate(monos):
            for d, x in fiber.mul_mono_mono(H.pbw.unit_vector(i), c).items():
                values[(index[d], col)] = x
        actions.append(F.from_sparse(len(monos), len(monos), values))
    H.derived['regular'] = actions
    return actions


def shift_label(H: HopfAlgebra, label, c: Tuple[int, ...]):
    return H.label_add(label, H.label_of_monomial(c)) if H.kind == 'smash' else label


def free_module(H: HopfAlgebra, label=None) -> FdModule:
    """u+ generated in the given label: the projective cover of that simple."""
    label = H.label_zero if label is None else label
    labels = [shift_label(H, label, c) for c in H.pbw.monomials()]
    return FdModule(H, labels, regular_actions(H), provenance=f"P({label})", validate=False)


def element_vector(H: HopfAlgebra, a: Element) -> List[Scalar]:
    F = H.fieldspec
    index = {c: k for k, c in enumerate(H.pbw.monomials())}
    vec = [F.zero] * len(index)
    for c, x in a.items():
        vec[index[c]] = x
    return vec


def column(F: FieldSpec, values: Sequence[Scalar]) -> Matrix:
    return F.matrix([[x] for x in values], 1)


def generated_submodule(V: FdModule, vectors: Matrix) -> Matrix:
    """Columns spanning the smallest submodule containing the given columns."""
    F = V.fieldspec
    basis = _independent_columns(F, vectors, V.dim)
    frontier = basis
    while F.shape(frontier)[1]:
        images = F.hstack([F.matmul(A, frontier) for A in V.actions], V.dim)
        joined = F.hstack([basis, images], V.dim)
        _, pivots = F.rref(joined)
        base = F.shape(basis)[1]
        new_cols = [c - base for c in pivots if c >= base]
        frontier = F.take(images, list(range(V.dim)), new_cols)
        basis = F.hstack([basis, frontier], V.dim)
    return basis


def _independent_columns(F: FieldSpec, M: Matrix, nrows: int) -> Matrix:
    if F.shape(M)[1] == 0:
        return F.zeros(nrows, 0)
    _, pivots = F.rref(M)
    return F.take(M, list(range(nrows)), pivots)


def submodule(V: FdModule, S: Matrix, provenance: str = "") -> FdModule:
    """Restriction of V to an invariant subspace spanned by label-homogeneous columns."""
    F = V.fieldspec
    k = F.shape(S)[1]
    actions = [F.solve(S, F.matmul(A, S)) for A in V.actions]
    labels = []
    for col in zip(*F.entries(S)) if k else []:
        idx = next(r for r, x in enumerate(col) if not F.is_zero(x))
        labels.append(V.labels[idx])
    return FdModule(V.algebra, labels, actions, provenance=provenance or f"sub({V.provenance})")


def quotient(V: FdModule, S: Matrix, provenance: str = "") -> FdModule:
    """V / S for an invariant subspace spanned by label-homogeneous columns."""
    F = V.fieldspec
    comp = F.complement_pivots(S, F.identity(V.dim))
    E = F.take(F.identity(V.dim), list(range(V.dim)), comp)
    joined = F.hstack([S, E], V.dim)
    s = F.shape(S)[1]
    actions = []
    for A in V.actions:
        X = F.solve(joined, F.matmul(A, E))
        actions.append(F.take(X, list(range(s, s + len(comp))), list(range(len(comp)))))
    labels = [V.labels[c] for c in comp]
    return FdModule(V.algebra, labels, actions, provenance=provenance or f"{V.provenance}/S")


def cyclic_quotient(H: HopfAlgebra, words: Sequence[Sequence[int]], label=None) -> FdModule:
    """u+ / (left ideal generated by the given words), generated in ``label``."""
    F = H.fieldspec
    P = free_module(H, label)
    vectors = [element_vector(H, H.pbw.fiber.normal_form(w)) for w in words]
    vectors = [v for v in vectors if any(not F.is_zero(x) for x in v)]
    names = ",".join("".join(H.pbw.names[g] for g in w) for w in words)
    label_txt = "" if label is None else f"@{label}"
    provenance = f"u+/({names}){label_txt}"
    if not vectors:
        return FdModule(H, P.labels, P.actions, provenance=provenance, validate=False)
    S = generated_submodule(P, F.hstack([column(F, v) for v in vectors], P.dim))
    return quotient(P, S, provenance=provenance)


def random_module(H: HopfAlgebra, rng: np.random.Generator, max_dim: int = 12,
                  max_rank: int = 2, tag: str = "") -> FdModule:
    """
    Random quotient of a random free module: rank, generator labels and
    relation vectors come from ``rng``; draws larger than ``max_dim`` (or
    zero) are discarded and redrawn.
    """
    F = H.fieldspec
    labels = H.label_elements()
    for attempt in range(200):
        rank = int(rng.integers(1, max_rank + 1))
        gens = [labels[int(rng.integers(0, len(labels)))] for _ in range(rank)]
        P = direct_sum([free_module(H, g) for g in gens])
        relations = []
        for _ in range(int(rng.integers(1, 4))):
            target = P.labels[int(rng.integers(0, P.dim))]
            idx = P.label_indices(target)
            vec = [F.zero] * P.dim
            for k in idx:
                if rng.random() < 0.5:
                    vec[k] = F.random_element(rng)
            if any(not F.is_zero(x) for x in vec):
                relations.append(column(F, vec))
        if not relations:
            continue
        S = generated_submodule(P, F.hstack(relations, P.dim))
        dim = P.dim - F.shape(S)[1]
        if 0 < dim <= max_dim:
            return quotient(P, S, provenance=f"random({tag}#{attempt})")
    raise ModuleRelationError(f"no random module of dimension <= {max_dim} found")


def truncated_module(H: HopfAlgebra, generator: int, length: int, label=None) -> FdModule:
    """k[x_g]/(x_g^length) with the other generators acting by zero (local/blocks algebras)."""
    if H.kind == 'smash':
        raise UnsupportedAlgebraError("use cyclic_quotient for smash-product algebras")
    words = [[i] for i in range(H.n) if i != generator] + [[generator] * length]
    module = cyclic_quotient(H, words, label)
    module.provenance = f"k[{H.pbw.names[generator]}]/({H.pbw.names[generator]}^{length})"
    return module


# ============================================================================
# ISOMORPHISM INVARIANTS
# ============================================================================

def radical_series(V: FdModule) -> List[int]:
    """Dimensions of the radical layers rad^k V / rad^{k+1} V."""
    F = V.fieldspec
    layers = []
    current = F.identity(V.dim)
    dim = V.dim
    while dim:
        image = F.hstack([F.matmul(A, current) for A in V.actions], V.dim)
        nxt = _independent_columns(F, image, V.dim)
        layers.append(dim - F.shape(nxt)[1])
        current, dim = nxt, F.shape(nxt)[1]
    return layers


def top_and_socle(V: FdModule) -> Dict[str, Dict[str, int]]:
    """Multiplicity of each simple in the top V/rad V and in the socle."""
    F = V.fieldspec
    top: Dict[str, int] = {}
    soc: Dict[str, int] = {}
    rad = _independent_columns(F, F.hstack(V.actions, V.dim), V.dim)
    socle_rows = F.vstack(V.actions, V.dim)
    for lam in V.distinct_labels():
        idx = V.label_indices(lam)
        rad_rows = F.take(rad, idx, list(range(F.shape(rad)[1])))
        top[str(lam)] = len(idx) - F.rank(rad_rows)
        soc_cols = F.take(socle_rows, list(range(F.shape(socle_rows)[0])), idx)
        soc[str(lam)] = len(idx) - F.rank(soc_cols)
    return {'top': top, 'socle': soc}


def isomorphism_invariants(V: FdModule) -> Dict:
    """Hom dimensions against the simples plus radical layers."""
    ts = top_and_socle(V)
    labels: Dict[str, int] = {}
    for lam in V.labels:
        labels[str(lam)] = labels.get(str(lam), 0) + 1
    return {'dim': V.dim, 'labels': labels, 'top': ts['top'], 'socle': ts['socle'],
            'radical_layers': radical_series(V)}


# ============================================================================
# BLOCK TWISTS
# ============================================================================

def adjoint_twist(V: FdModule, g) -> FdModule:
    """Ad_g(V) = k_g (x) V (x) k_{g^{-1}} for block algebras."""
    H = V.algebra
    if H.kind != 'blocks':
        raise UnsupportedAlgebraError("adjoint twists are defined for block algebras")
    twisted = tensor(tensor(one_dimensional(H, g), V), one_dimensional(H, H.group.inv(g)))
    twisted.provenance = f"Ad_{g}({V.provenance})"
    return twisted


# ============================================================================
# HALF-BRAIDINGS
# ============================================================================

@dataclass
class HalfBraiding:
    """
    Isomorphisms V (x) L -> L (x) V against the simples L of the group part.

    Attributes:
        module: the underlying module V
        maps: label of L -> dim V x dim V matrix (both sides identified with V)
        kind: how the braiding was produced
    """
    module: FdModule
    maps: Dict[Any, Matrix]
    kind: str = "explicit"


def trivial_half_braiding(V: FdModule) -> HalfBraiding:
    F = V.fieldspec
    return HalfBraiding(V, {lam: F.identity(V.dim) for lam in V.algebra.label_elements()}, kind="identity")


def canonical_half_braiding(V: FdModule) -> HalfBraiding:
    """v (x) w -> q^{(deg v, deg w)} w (x) v for smash products of a group and a graded algebra."""
    H, F = V.algebra, V.fieldspec
    if H.kind != 'smash':
        raise UnsupportedAlgebraError("the canonical braiding needs a smash-product algebra")
    maps = {ell: F.diag([F.zeta_power(H.chars.pairing(lam, ell)) for lam in V.labels])
            for ell in H.label_elements()}
    return HalfBraiding(V, maps, kind="canonical")


def equivariant_induction(W: FdModule) -> HalfBraiding:
    """
    V = sum over g of Ad_g(W) for block algebras, with the braiding sending
    the summand of g to the summand of l^{-1} g by the identity.
    """
    H, F = W.algebra, W.fieldspec
    if H.kind != 'blocks':
        raise UnsupportedAlgebraError("equivariant induction is defined for block algebras")
    elements = list(H.group.elements)
    pos = {g: k for k, g in enumerate(elements)}
    V = direct_sum([adjoint_twist(W, g) for g in elements], provenance=f"Ind({W.provenance})")
    d = W.dim
    maps = {}
    for ell in elements:
        values = {}
        inv = H.group.inv(ell)
        for g in elements:
            src, dst = pos[g], pos[H.group.mul(inv, g)]
            for a in range(d):
                values[(dst * d + a, src * d + a)] = F.one
        maps[ell] = F.from_sparse(V.dim, V.dim, values)
    return HalfBraiding(V, maps, kind="equivariant")


def _token_matrices(H: HopfAlgebra, module: FdModule) -> List[Tuple[str, Matrix]]:
    out = [(H.pbw.names[i], module.actions[i]) for i in range(H.n)]
    if H.kind != 'local':
        gens = H.group.generators() if H.kind == 'smash' else H.group.elements
        out += [(f"g{g}", module.group_matrix(g)) for g in gens]
    return out


def check_half_braiding(b: HalfBraiding) -> Dict:
    """
    Intertwiner, label and invertibility checks for every simple L, plus the
    braid condition Phi_{l l'} = Phi_{l'} Phi_l.
    """
    V = b.module
    H, F = V.algebra, V.fieldspec
    report: Dict[str, Any] = {'kind': b.kind, 'module': V.provenance, 'checks': {}}
    failure = {'intertwiner': None, 'labels': None, 'invertible': None, 'braid': None}
    for ell in H.label_elements():
        Phi = b.maps.get(ell)
        if Phi is None or F.shape(Phi) != (V.dim, V.dim):
            failure['intertwiner'] = failure['intertwiner'] or f"missing map for {ell}"
            continue
        L = one_dimensional(H, ell)
        VL, LV = tensor(V, L), tensor(L, V)
        if failure['intertwiner'] is None:
            for (name, A), (_, B) in zip(_token_matrices(H, VL), _token_matrices(H, LV)):
                if not F.equal(F.matmul(Phi, A), F.matmul(B, Phi)):
                    failure['intertwiner'] = f"{name} against {ell}"
                    break
        if failure['labels'] is None:
            for r, row in enumerate(F.entries(Phi)):
                if any(not F.is_zero(x) and LV.labels[r] != VL.labels[c] for c, x in enumerate(row)):
                    failure['labels'] = f"row {r} against {ell}"
                    break
        if failure['invertible'] is None and F.rank(Phi) != V.dim:
            failure['invertible'] = str(ell)
    if failure['intertwiner'] is None:
        for ell in H.label_elements():
            for ell2 in H.label_elements():
                combined = b.maps[H.label_add(ell, ell2)]
                if not F.equal(combined, F.matmul(b.maps[ell2], b.maps[ell])):
                    failure['braid'] = f"({ell}, {ell2})"
                    break
            if failure['braid']:
                break
    for name, what in failure.items():
        report['checks'][name] = {'passed': what is None, 'first_failure': what}
    report['passed'] = all(entry['passed'] for entry in report['checks'].values())
    return report


# ============================================================================
# CARLSON MODULES
# ============================================================================

def carlson_module(H: HopfAlgebra, degree: int, cocycle: Optional[Sequence[Any]] = None,
                   theta_coefficients: Optional[Sequence[Any]] = None,
                   cache=None) -> FdModule:
    """
    L_zeta = ker(zeta: Omega^d k -> k) for a class in Ext^d(k, k).

    The class is a vector on the generators of P_d, or a combination
    sum c_i theta_i applied to the unit class, in which case ``degree``
    must be 2. A zero class is degenerate: the result is Omega^d k with
    ``flags['degenerate']`` set.
    """
    from homology import free_cover_module, minimal_resolution, q_lift

    F = H.fieldspec
    k = trivial_module(H)
    res = minimal_resolution(k, degree + 1, cache=cache)
    if theta_coefficients is not None:
        if degree != 2:
            raise UnsupportedAlgebraError("theta combinations define degree-2 classes")
        lifted = q_lift(H, res)
        cocycle = [F.zero] * res.ranks[2]
        for i, c in enumerate(theta_coefficients):
            for h in range(res.ranks[2]):
                cocycle[h] = F.add(cocycle[h], F.mul(F.element(c), lifted.theta_constant(i, 0, h, 0)))
    if cocycle is None:
        raise ModuleRelationError("a cocycle or theta coefficients are required")
    cocycle = [F.element(x) for x in cocycle]
    gens = res.gen_labels[degree]
    if len(cocycle) != len(gens):
        raise ModuleRelationError(f"cocycle has {len(cocycle)} entries, P_{degree} has {len(gens)} generators")
    for h, x in enumerate(cocycle):
        if not F.is_zero(x) and gens[h] != H.label_zero:
            raise ModuleRelationError("cocycle is nonzero on a generator of nontrivial label")

    Pd = free_cover_module(H, gens)
    size = H.pbw.dimension
    unit_index = H.pbw.monomials().index(H.pbw.unit())
    functional = [[F.zero] * Pd.dim]
    for h, x in enumerate(cocycle):
        functional[0][h * size + unit_index] = x
    kernel = F.nullspace(F.matrix(functional, Pd.dim))
    degenerate = all(F.is_zero(x) for x in cocycle)

    # kernel of a label-graded functional: replace the basis by homogeneous columns
    kernel = _homogeneous_basis(Pd, kernel)
    K = submodule(Pd, kernel, provenance="ker")
    images = res.image_vectors(H, degree + 1)
    if images:
        in_kernel = F.solve(kernel, F.hstack([column(F, v) for v in images], Pd.dim))
        S = generated_submodule(K, in_kernel)
    else:
        S = F.zeros(K.dim, 0)
    name = "Omega^%d k" % degree if degenerate else f"L_zeta(d={degree})"
    module = quotient(K, S, provenance=name)
    module.flags['degenerate'] = degenerate
    if degenerate:
        LOGGER.warning("zero class in degree %d: returning Omega^%d k", degree, degree)
    return module


def _homogeneous_basis(V: FdModule, columns: Matrix) -> Matrix:
    """Split a column space spanned by (possibly mixed) vectors into label-homogeneous pieces."""
    F = V.fieldspec
    k = F.shape(columns)[1]
    if k == 0:
        return columns
    pieces = []
    for lam in V.distinct_labels():
        mask = F.diag([F.one if V.labels[r] == lam else F.zero for r in range(V.dim)])
        pieces.append(F.matmul(mask, columns))
    joined = F.hstack(pieces, V.dim)
    basis = _independent_columns(F, joined, V.dim)
    if F.shape(basis)[1] != k:
        raise InconsistentSystemError("column space is not label-graded")
    return basis
