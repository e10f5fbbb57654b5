"""
Algebra and Module Catalog
==========================

Named algebra configurations and the module catalogs the reproduction
suites iterate over: cyclic quotients of u+ by monomials, Carlson modules
of degree-2 classes, seeded random modules, simples and free modules.

A module spec is a short string, the form the CLI accepts:

    k                      trivial module
    lambda                 direct sum of all simples
    simple:<i>             i-th one-dimensional simple
    free[:<i>]             u+ generated in the i-th label
    cyclic:<w1>;<w2>       u+ / (w1, w2), words as generator names joined by '*'
    truncated:<x>:<m>      k[x]/(x^m), other generators acting by zero
    carlson:<c1>,...,<cn>  Carlson module of sum c_i theta_i
    random:<seed>          seeded random quotient of a free module
    induced:<spec>         equivariant induction of a module (block algebras)
    dual:<spec> / tensor:<spec>|<spec>
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from errors import ConfigError, SupportEngineError
from fd_modules import (FdModule, carlson_module, cyclic_quotient, dual, equivariant_induction,
                        free_module, one_dimensional, random_module, simples_module, tensor,
                        trivial_module, truncated_module)
from fields import make_field
from hopf_algebras import (HopfAlgebra, build_group_scheme_functions, build_qci,
                           build_quantum_borel_A, build_restricted_enveloping,
                           build_truncated_polynomial)

LOGGER = logging.getLogger(__name__)


# ============================================================================
# NAMED ALGEBRAS
# ============================================================================

NAMED_ALGEBRAS: Dict[str, Dict[str, Any]] = {
    'truncated-p3': {'kind': 'truncated', 'p': 3, 'rank': 1},
    'functions-p3-n2': {'kind': 'group_scheme', 'p': 3, 'rank': 2, 'permutations': []},
    'no-tpp': {'kind': 'group_scheme', 'p': 3, 'rank': 2, 'permutations': [[1, 0]]},
    'qci-l3-n1': {'kind': 'qci', 'l': 3, 'matrix': [[1]], 'grouplikes': 'standard'},
    'qci-l3-n2-standard': {'kind': 'qci', 'l': 3, 'matrix': [[1, 1], [-1, 1]], 'grouplikes': 'standard'},
    'qci-l3-n2-extended': {'kind': 'qci', 'l': 3, 'matrix': [[1, 1], [-1, 1]], 'grouplikes': 'extended'},
    'heisenberg-p3': {'kind': 'restricted', 'p': 3, 'dim': 3, 'brackets': [[0, 1, [[2, 1]]]]},
    'borel-a1-l5': {'kind': 'borel', 'rank': 1, 'l': 5, 'lattice': 'sc'},
    'borel-a2-l5': {'kind': 'borel', 'rank': 2, 'l': 5, 'lattice': 'sc'},
}


def _field(spec: Dict[str, Any], l: int):
    kind = spec.get('field', 'prime')
    return make_field(kind, l, int(spec.get('p', 0)) if kind == 'prime' else 0)


def _brackets(raw) -> Dict:
    """[[a, b, [[k, c], ...]], ...] -> {(a, b): {k: c}}"""
    brackets = {}
    for a, b, terms in raw:
        brackets[(int(a), int(b))] = {int(k): int(c) for k, c in terms}
    return brackets


def build_algebra(spec: Dict[str, Any]) -> HopfAlgebra:
    """Build the HopfAlgebra described by a config object."""
    try:
        kind = spec['kind']
        if kind == 'qci':
            l = int(spec['l'])
            return build_qci(l, spec['matrix'], spec.get('grouplikes', 'standard'), _field(spec, l),
                             primitive_coproduct=bool(spec.get('primitive_coproduct', False)))
        if kind == 'group_scheme':
            return build_group_scheme_functions(int(spec['p']), int(spec['rank']),
                                                spec.get('permutations', []))
        if kind == 'truncated':
            return build_truncated_polynomial(int(spec['p']), int(spec.get('rank', 1)))
        if kind == 'restricted':
            return build_restricted_enveloping(int(spec['p']), _brackets(spec['brackets']), int(spec['dim']))
        if kind == 'borel':
            l = int(spec['l'])
            return build_quantum_borel_A(int(spec['rank']), l, spec['lattice'], _field(spec, l))
    except KeyError as exc:
        raise ConfigError(f"algebra config is missing {exc}") from exc
    raise ConfigError(f"unknown algebra kind '{spec.get('kind')}'")


def get_named_algebra(name: str) -> Dict[str, Any]:
    if name not in NAMED_ALGEBRAS:
        raise ConfigError(f"unknown algebra '{name}'; known: {', '.join(sorted(NAMED_ALGEBRAS))}")
    return dict(NAMED_ALGEBRAS[name])


# ============================================================================
# MODULE SPECS
# ============================================================================

def _word(H: HopfAlgebra, text: str) -> List[int]:
    index = {name: k for k, name in enumerate(H.pbw.names)}
    letters = [t for t in text.split('*') if t]
    unknown = [t for t in letters if t not in index]
    if unknown:
        raise ConfigError(f"unknown generators {unknown} in word '{text}'")
    return [index[t] for t in letters]


def parse_module(H: HopfAlgebra, text: str, cache=None) -> FdModule:
    """Build the module named by a spec string (see the module docstring)."""
    text = text.strip()
    head, _, rest = text.partition(':')
    try:
        if text == 'k':
            return trivial_module(H)
        if text == 'lambda':
            return simples_module(H)
        if head == 'simple':
            return one_dimensional(H, H.label_elements()[int(rest)])
        if head == 'free':
            return free_module(H, H.label_elements()[int(rest)] if rest else None)
        if head == 'cyclic':
            return cyclic_quotient(H, [_word(H, w) for w in rest.split(';') if w])
        if head == 'truncated':
            name, length = rest.split(':')
            return truncated_module(H, _word(H, name)[0], int(length))
        if head == 'carlson':
            coefficients = [int(c) for c in rest.split(',')]
            return carlson_module(H, 2, theta_coefficients=coefficients, cache=cache)
        if head == 'random':
            return random_module(H, np.random.default_rng(int(rest)), tag=f"seed {rest}")
        if head == 'induced':
            return equivariant_induction(parse_module(H, rest, cache)).module
        if head == 'dual':
            return dual(parse_module(H, rest, cache))
        if head == 'tensor':
            left, right = rest.split('|')
            return tensor(parse_module(H, left, cache), parse_module(H, right, cache))
    except (ValueError, IndexError) as exc:
        raise ConfigError(f"malformed module spec '{text}': {exc}") from exc
    raise ConfigError(f"unknown module spec '{text}'")


# ============================================================================
# CATALOGS
# ============================================================================

@dataclass
class CatalogEntry:
    """
    One catalog module.

    Attributes:
        name: spec string that rebuilds the module
        family: trivial, simple, cyclic, carlson, random or free
        module: the module itself
        metadata: family-specific data (generators, seed, class)
    """
    name: str
    family: str
    module: FdModule
    metadata: Dict = field(default_factory=dict)


def _monomial_words(H: HopfAlgebra) -> List[List[int]]:
    pbw = H.pbw
    return [list(pbw.word_of(c)) for c in pbw.monomials() if c != pbw.unit()]


def _spec_word(H: HopfAlgebra, word: Sequence[int]) -> str:
    return '*'.join(H.pbw.names[g] for g in word)


def cyclic_catalog(H: HopfAlgebra, max_generators: int = 2,
                   max_length: Optional[int] = None) -> List[CatalogEntry]:
    """
    u+ modulo every set of at most ``max_generators`` non-unit monomials,
    optionally only monomials of length at most ``max_length``.
    """
    entries = []
    words = _monomial_words(H)
    if max_length is not None:
        words = [w for w in words if len(w) <= max_length]
    for r in range(1, max_generators + 1):
        for combo in itertools.combinations(words, r):
            module = cyclic_quotient(H, combo)
            name = 'cyclic:' + ';'.join(_spec_word(H, w) for w in combo)
            entries.append(CatalogEntry(name, 'cyclic', module, {'generators': len(combo)}))
    return entries


def carlson_catalog(H: HopfAlgebra, cache=None) -> List[CatalogEntry]:
    """Carlson modules of sum c_i theta_i, one per point c of P^{n-1}(F_p)."""
    from support_varieties import enumerate_points

    F = H.fieldspec
    if F.kind != 'prime':
        return []
    entries = []
    for point in enumerate_points(F.p, 1, H.n):
        coefficients = list(point.coords)
        module = carlson_module(H, 2, theta_coefficients=coefficients, cache=cache)
        if module.flags.get('degenerate'):
            continue
        name = 'carlson:' + ','.join(str(c) for c in coefficients)
        entries.append(CatalogEntry(name, 'carlson', module, {'class': coefficients}))
    return entries


def random_catalog(H: HopfAlgebra, count: int, seed: int, max_dim: int = 12) -> List[CatalogEntry]:
    """``count`` random modules; entry i uses the seed ``seed + i``."""
    entries = []
    for i in range(count):
        s = seed + i
        module = random_module(H, np.random.default_rng(s), max_dim=max_dim, tag=f"seed {s}")
        entries.append(CatalogEntry(f"random:{s}", 'random', module, {'seed': s}))
    return entries


def build_catalog(H: HopfAlgebra, seed: int, random_count: int = 3, max_generators: int = 1,
                  include_carlson: bool = True, include_simples: bool = False,
                  max_dim: int = 12, max_length: Optional[int] = None, cache=None) -> List[CatalogEntry]:
    """
    k, cyclic quotients, Carlson modules and random modules, deduplicated
    by content hash in that order.
    """
    entries = [CatalogEntry('k', 'trivial', trivial_module(H))]
    if include_simples:
        entries += [CatalogEntry(f"simple:{i}", 'simple', one_dimensional(H, lam))
                    for i, lam in enumerate(H.label_elements()) if lam != H.label_zero]
    entries += cyclic_catalog(H, max_generators, max_length)
    if include_carlson:
        try:
            entries += carlson_catalog(H, cache)
        except SupportEngineError as exc:
            LOGGER.warning("skipping Carlson modules over %s: %s", H.name, exc)
    entries += random_catalog(H, random_count, seed, max_dim)
    seen = set()
    unique = []
    for entry in entries:
        key = entry.module.content_hash()
        if key in seen or entry.module.dim == 0:
            continue
        seen.add(key)
        unique.append(entry)
    LOGGER.info("catalog over %s: %d modules", H.name, len(unique))
    return unique
