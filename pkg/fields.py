"""
Exact Coefficient Fields
========================

Every computation in the engine is exact. A FieldSpec bundles scalar
arithmetic, a verified primitive l-th root of unity, and the dense linear
algebra the resolutions and support computations need:

- PrimeFieldSpec: F_p with p = 1 mod l, matrices are ``galois.GF(p)`` arrays
- CyclotomicFieldSpec: Q(zeta_l), matrices are sympy ``DomainMatrix`` objects

Callers never touch the backend matrix type directly; they go through the
FieldSpec methods so the cyclotomic backend can cross-check the prime one.
"""

import logging
from abc import ABC, abstractmethod
from typing import Any, Dict, List, Sequence, Tuple

import galois
import numpy as np
import sympy
from sympy.polys.matrices import DomainMatrix

from errors import InconsistentSystemError, InvalidFieldError

LOGGER = logging.getLogger(__name__)

Scalar = Any
Matrix = Any


def default_prime(l: int, minimum: int = 7) -> int:
    """Smallest prime p >= minimum with p = 1 (mod l)."""
    if l < 1:
        raise InvalidFieldError(f"root order must be positive, got {l}")
    p = max(minimum, 2)
    while True:
        if (p - 1) % l == 0 and galois.is_prime(p):
            return p
        p += 1


class FieldSpec(ABC):
    """
    Exact field carrying a primitive l-th root of unity.

    Attributes:
        kind: 'prime' or 'cyclotomic'
        p: characteristic (0 for cyclotomic)
        l: order of the distinguished root of unity
        zeta: the root itself, as a field element
    """

    kind: str = ""

    def __init__(self, p: int, l: int):
        self.p = p
        self.l = l
        self.zeta: Scalar = None

    # ====================================================================
    # SCALARS
    # ====================================================================

    @abstractmethod
    def element(self, value: Any) -> Scalar:
        """Coerce an integer (or a field element) into the field."""

    @property
    def zero(self) -> Scalar:
        return self.element(0)

    @property
    def one(self) -> Scalar:
        return self.element(1)

    @abstractmethod
    def add(self, a: Scalar, b: Scalar) -> Scalar:
        pass

    @abstractmethod
    def mul(self, a: Scalar, b: Scalar) -> Scalar:
        pass

    @abstractmethod
    def neg(self, a: Scalar) -> Scalar:
        pass

    @abstractmethod
    def inv(self, a: Scalar) -> Scalar:
        pass

    @abstractmethod
    def is_zero(self, a: Scalar) -> bool:
        pass

    @abstractmethod
    def key(self, a: Scalar) -> Any:
        """Hashable canonical form of a scalar."""

    def sub(self, a: Scalar, b: Scalar) -> Scalar:
        return self.add(a, self.neg(b))

    def power(self, a: Scalar, k: int) -> Scalar:
        if k < 0:
            a, k = self.inv(a), -k
        result = self.one
        base = a
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def zeta_power(self, k: int) -> Scalar:
        """zeta^k for any integer k."""
        return self.power(self.zeta, int(k) % self.l)

    def eq(self, a: Scalar, b: Scalar) -> bool:
        return self.is_zero(self.sub(a, b))

    def random_element(self, rng: np.random.Generator, nonzero: bool = False) -> Scalar:
        """Small random scalar (integers in [0, p) or [-2, 2] for Q(zeta))."""
        bound = self.p if self.p else 5
        while True:
            value = int(rng.integers(0, bound))
            if not self.p:
                value -= 2
            x = self.element(value)
            if not (nonzero and self.is_zero(x)):
                return x

    def describe(self) -> Dict:
        return {'kind': self.kind, 'p': self.p, 'l': self.l, 'zeta': str(self.zeta)}

    # ====================================================================
    # MATRICES
    # ====================================================================

    @abstractmethod
    def matrix(self, rows: Sequence[Sequence[Any]], ncols: int = 0) -> Matrix:
        """Matrix from a list of rows; ``ncols`` fixes the shape when rows is empty."""

    @abstractmethod
    def zeros(self, m: int, n: int) -> Matrix:
        pass

    @abstractmethod
    def identity(self, n: int) -> Matrix:
        pass

    @abstractmethod
    def shape(self, A: Matrix) -> Tuple[int, int]:
        pass

    @abstractmethod
    def entries(self, A: Matrix) -> List[List[Scalar]]:
        pass

    @abstractmethod
    def matmul(self, A: Matrix, B: Matrix) -> Matrix:
        pass

    @abstractmethod
    def madd(self, A: Matrix, B: Matrix) -> Matrix:
        pass

    @abstractmethod
    def mscale(self, c: Scalar, A: Matrix) -> Matrix:
        pass

    @abstractmethod
    def transpose(self, A: Matrix) -> Matrix:
        pass

    @abstractmethod
    def rank(self, A: Matrix) -> int:
        pass

    @abstractmethod
    def rref(self, A: Matrix) -> Tuple[Matrix, List[int]]:
        """Reduced row echelon form and the pivot columns."""

    @abstractmethod
    def take(self, A: Matrix, rows: Sequence[int], cols: Sequence[int]) -> Matrix:
        """Submatrix on the listed rows and columns."""

    def msub(self, A: Matrix, B: Matrix) -> Matrix:
        return self.madd(A, self.mscale(self.neg(self.one), B))

    def from_sparse(self, m: int, n: int, values: Dict[Tuple[int, int], Scalar]) -> Matrix:
        rows = [[self.zero] * n for _ in range(m)]
        for (i, j), v in values.items():
            rows[i][j] = self.add(rows[i][j], v)
        return self.matrix(rows, n)

    def diag(self, values: Sequence[Scalar]) -> Matrix:
        n = len(values)
        return self.from_sparse(n, n, {(i, i): v for i, v in enumerate(values)})

    def is_zero_matrix(self, A: Matrix) -> bool:
        return all(self.is_zero(x) for row in self.entries(A) for x in row)

    def equal(self, A: Matrix, B: Matrix) -> bool:
        if self.shape(A) != self.shape(B):
            return False
        return self.is_zero_matrix(self.msub(A, B))

    def hstack(self, mats: Sequence[Matrix], nrows: int = 0) -> Matrix:
        mats = [M for M in mats if self.shape(M)[1] > 0]
        if not mats:
            return self.zeros(nrows, 0)
        rows = [sum((self.entries(M)[i] for M in mats), []) for i in range(self.shape(mats[0])[0])]
        return self.matrix(rows, sum(self.shape(M)[1] for M in mats))

    def vstack(self, mats: Sequence[Matrix], ncols: int = 0) -> Matrix:
        mats = [M for M in mats if self.shape(M)[0] > 0]
        if not mats:
            return self.zeros(0, ncols)
        rows = [row for M in mats for row in self.entries(M)]
        return self.matrix(rows, self.shape(mats[0])[1])

    def kron(self, A: Matrix, B: Matrix) -> Matrix:
        (ma, na), (mb, nb) = self.shape(A), self.shape(B)
        ea, eb = self.entries(A), self.entries(B)
        rows = [[self.mul(ea[i][j], eb[k][m]) for j in range(na) for m in range(nb)]
                for i in range(ma) for k in range(mb)]
        return self.matrix(rows, na * nb)

    def block_diag(self, mats: Sequence[Matrix]) -> Matrix:
        m = sum(self.shape(M)[0] for M in mats)
        n = sum(self.shape(M)[1] for M in mats)
        values: Dict[Tuple[int, int], Scalar] = {}
        r0 = c0 = 0
        for M in mats:
            for i, row in enumerate(self.entries(M)):
                for j, x in enumerate(row):
                    if not self.is_zero(x):
                        values[(r0 + i, c0 + j)] = x
            r0 += self.shape(M)[0]
            c0 += self.shape(M)[1]
        return self.from_sparse(m, n, values)

    def nullspace(self, A: Matrix) -> Matrix:
        """Basis of {x : A x = 0} as the columns of the returned matrix."""
        m, n = self.shape(A)
        if n == 0:
            return self.zeros(0, 0)
        if m == 0:
            return self.identity(n)
        R, pivots = self.rref(A)
        rows = self.entries(R)
        free = [j for j in range(n) if j not in set(pivots)]
        values: Dict[Tuple[int, int], Scalar] = {}
        for k, f in enumerate(free):
            values[(f, k)] = self.one
            for r, pc in enumerate(pivots):
                if not self.is_zero(rows[r][f]):
                    values[(pc, k)] = self.neg(rows[r][f])
        return self.from_sparse(n, len(free), values)

    def solve(self, A: Matrix, B: Matrix) -> Matrix:
        """Some X with A X = B; InconsistentSystemError when none exists."""
        m, n = self.shape(A)
        k = self.shape(B)[1]
        if n == 0 or m == 0:
            if not self.is_zero_matrix(B):
                raise InconsistentSystemError("right-hand side outside the column space")
            return self.zeros(n, k)
        R, pivots = self.rref(self.hstack([A, B], m))
        if any(c >= n for c in pivots):
            raise InconsistentSystemError("right-hand side outside the column space")
        rows = self.entries(R)
        values = {}
        for r, c in enumerate(pivots):
            for j in range(k):
                if not self.is_zero(rows[r][n + j]):
                    values[(c, j)] = rows[r][n + j]
        return self.from_sparse(n, k, values)

    def complement_pivots(self, span: Matrix, candidates: Matrix) -> List[int]:
        """
        Indices of candidate columns that extend the column span of ``span``
        to the span of both, chosen greedily in order.
        """
        m = self.shape(span)[0] if self.shape(span)[1] else self.shape(candidates)[0]
        base = self.shape(span)[1]
        joined = self.hstack([span, candidates], m)
        if self.shape(joined)[1] == 0 or m == 0:
            return []
        _, pivots = self.rref(joined)
        return [c - base for c in pivots if c >= base]

    def matrix_key(self, A: Matrix) -> Tuple:
        return (self.shape(A), tuple(self.key(x) for row in self.entries(A) for x in row))


# ============================================================================
# PRIME FIELDS
# ============================================================================

class PrimeFieldSpec(FieldSpec):
    """F_p with p = 1 mod l; matrices live in ``galois.GF(p)``."""

    kind = 'prime'

    def __init__(self, p: int, l: int):
        super().__init__(p, l)
        if not galois.is_prime(p):
            raise InvalidFieldError(f"{p} is not prime")
        if l < 1 or (p - 1) % l:
            raise InvalidFieldError(f"p = {p} is not 1 mod l = {l}")
        self.GF = galois.GF(p)
        if l == 1:
            self.zeta = 1
        else:
            g = int(galois.primitive_root(p))
            self.zeta = pow(g, (p - 1) // l, p)
        self._verify_root()
        LOGGER.debug("prime field F_%d with zeta = %d of order %d", p, self.zeta, l)

    def _verify_root(self):
        for m in range(1, self.l):
            if pow(self.zeta, m, self.p) == 1:
                raise InvalidFieldError(f"zeta = {self.zeta} has order {m} < {self.l}")
        if pow(self.zeta, self.l, self.p) != 1:
            raise InvalidFieldError("zeta^l != 1")

    def element(self, value: Any) -> int:
        return int(value) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p)

    def power(self, a, k):
        if k < 0:
            return pow(self.inv(a), -k, self.p)
        return pow(a, k, self.p)

    def is_zero(self, a) -> bool:
        return a % self.p == 0

    def key(self, a):
        return int(a) % self.p

    # -- matrices ---------------------------------------------------------

    def _wrap(self, arr) -> Matrix:
        return self.GF(np.asarray(arr, dtype=np.int64) % self.p)

    def as_int_array(self, A: Matrix) -> np.ndarray:
        return np.asarray(A.view(np.ndarray), dtype=np.int64)

    def matrix(self, rows, ncols: int = 0):
        rows = [[int(x) for x in row] for row in rows]
        if not rows:
            return self.zeros(0, ncols)
        return self._wrap(np.array(rows, dtype=np.int64).reshape(len(rows), len(rows[0])))

    def zeros(self, m, n):
        return self.GF.Zeros((m, n))

    def identity(self, n):
        return self.GF.Identity(n)

    def shape(self, A):
        return tuple(A.shape)

    def entries(self, A):
        return self.as_int_array(A).tolist()

    def matmul(self, A, B):
        (m, k), (k2, n) = A.shape, B.shape
        if k != k2:
            raise ValueError(f"shape mismatch {A.shape} @ {B.shape}")
        if m == 0 or n == 0 or k == 0:
            return self.zeros(m, n)
        return A @ B

    def madd(self, A, B):
        return A + B

    def msub(self, A, B):
        return A - B

    def mscale(self, c, A):
        return A * self.GF(int(c) % self.p)

    def transpose(self, A):
        return self._wrap(self.as_int_array(A).T)

    def hstack(self, mats, nrows: int = 0):
        mats = [M for M in mats if M.shape[1] > 0]
        if not mats:
            return self.zeros(nrows, 0)
        return self._wrap(np.hstack([self.as_int_array(M) for M in mats]))

    def vstack(self, mats, ncols: int = 0):
        mats = [M for M in mats if M.shape[0] > 0]
        if not mats:
            return self.zeros(0, ncols)
        return self._wrap(np.vstack([self.as_int_array(M) for M in mats]))

    def kron(self, A, B):
        return self._wrap(np.kron(self.as_int_array(A), self.as_int_array(B)))

    def take(self, A, rows, cols):
        arr = self.as_int_array(A)
        return self._wrap(arr[np.ix_(list(rows), list(cols))].reshape(len(rows), len(cols)))

    def is_zero_matrix(self, A):
        return not np.any(self.as_int_array(A))

    def equal(self, A, B):
        return A.shape == B.shape and np.array_equal(self.as_int_array(A), self.as_int_array(B))

    def rank(self, A):
        if A.size == 0:
            return 0
        return int(np.linalg.matrix_rank(A))

    def rref(self, A):
        m, n = A.shape
        if m == 0 or n == 0:
            return A, []
        R = A.row_reduce()
        arr = self.as_int_array(R)
        pivots = []
        for r in range(m):
            nz = np.flatnonzero(arr[r])
            if nz.size == 0:
                break
            pivots.append(int(nz[0]))
        return R, pivots

    def nullspace(self, A):
        m, n = A.shape
        if n == 0:
            return self.zeros(0, 0)
        if m == 0:
            return self.identity(n)
        # galois returns the basis as rows
        return self.transpose(A.null_space())

    def matrix_key(self, A):
        return (tuple(A.shape), self.as_int_array(A).tobytes())


# ============================================================================
# CYCLOTOMIC FIELDS
# ============================================================================

class CyclotomicFieldSpec(FieldSpec):
    """Q(zeta_l) through sympy's algebraic number field domain."""

    kind = 'cyclotomic'

    def __init__(self, l: int):
        super().__init__(0, l)
        if l < 1:
            raise InvalidFieldError(f"root order must be positive, got {l}")
        if l == 1:
            self.K = sympy.QQ
            self.zeta = self.K.one
        else:
            root = sympy.exp(2 * sympy.pi * sympy.I / l)
            self.K = sympy.QQ.algebraic_field(root)
            self.zeta = self.K.from_sympy(root)
        for m in range(1, l):
            if self.K.is_one(super().power(self.zeta, m)):
                raise InvalidFieldError(f"zeta has order {m} < {l}")
        if not self.K.is_one(super().power(self.zeta, l)):
            raise InvalidFieldError("zeta^l != 1")

    def element(self, value):
        if isinstance(value, int):
            return self.K.convert(value)
        return self.K.convert(value)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if self.K.is_zero(a):
            raise ZeroDivisionError("inverse of zero")
        return self.K.one / a

    def is_zero(self, a):
        return self.K.is_zero(a)

    def key(self, a):
        return str(self.K.to_sympy(a))

    def describe(self):
        info = super().describe()
        info['zeta'] = str(self.K.to_sympy(self.zeta))
        return info

    # -- matrices ---------------------------------------------------------

    def matrix(self, rows, ncols: int = 0):
        rows = [[self.K.convert(x) for x in row] for row in rows]
        if not rows:
            return self.zeros(0, ncols)
        return DomainMatrix(rows, (len(rows), len(rows[0])), self.K)

    def zeros(self, m, n):
        return DomainMatrix.zeros((m, n), self.K)

    def identity(self, n):
        return DomainMatrix.eye(n, self.K)

    def shape(self, A):
        return tuple(A.shape)

    def entries(self, A):
        m, n = A.shape
        if m == 0 or n == 0:
            return [[] for _ in range(m)]
        return [list(row) for row in A.to_list()]

    def matmul(self, A, B):
        (m, k), (k2, n) = A.shape, B.shape
        if k != k2:
            raise ValueError(f"shape mismatch {A.shape} @ {B.shape}")
        if m == 0 or n == 0 or k == 0:
            return self.zeros(m, n)
        return A.matmul(B)

    def madd(self, A, B):
        return A + B

    def msub(self, A, B):
        return A - B

    def mscale(self, c, A):
        m, n = A.shape
        if m == 0 or n == 0:
            return A
        return A.scalarmul(self.K.convert(c))

    def transpose(self, A):
        return A.transpose()

    def take(self, A, rows, cols):
        if not rows or not cols:
            return self.zeros(len(rows), len(cols))
        return A.extract(list(rows), list(cols))

    def rank(self, A):
        m, n = A.shape
        if m == 0 or n == 0:
            return 0
        return A.rank()

    def rref(self, A):
        m, n = A.shape
        if m == 0 or n == 0:
            return A, []
        R, pivots = A.rref()
        return R, list(pivots)


# ============================================================================
# FACTORY
# ============================================================================

def make_field(kind: str, l: int, p: int = 0) -> FieldSpec:
    """
    Build the coefficient field named by a config.

    ``p = 0`` with kind 'prime' picks the smallest prime p >= 7 with
    p = 1 mod l.
    """
    if kind == 'prime':
        return PrimeFieldSpec(p or default_prime(l), l)
    if kind == 'cyclotomic':
        if p:
            raise InvalidFieldError("cyclotomic fields have characteristic 0")
        return CyclotomicFieldSpec(l)
    raise InvalidFieldError(f"unknown field kind '{kind}'")
