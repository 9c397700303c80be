"""Irreducible complex Clifford algebra representations of R^n.

Conventions
-----------
Generators are anti-Hermitian, ``G_i^H = -G_i``, and satisfy

    G_i G_j + G_j G_i = -2 delta_ij I,

so every generator squares to ``-I`` and the momentum-space Dirac symbol
``i * sum_j xi_j G_j`` is Hermitian with eigenvalues ``+-|xi|``.

The spinor dimension is ``N = 2^floor(n/2)``.  Generators are built by the
standard recursion ``n -> n+2`` from Pauli-matrix seeds, which is
deterministic: the same ``n`` always yields identical matrices.  For odd
``n`` there are two inequivalent irreducible representations (differing by
an overall sign of the generators); this module fixes the one grown from
``(i s1, i s2, i s3)`` at ``n = 3``.  All quantities computed downstream
(densities, Dirac quadratic forms) are invariant under that choice.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

_PAULI1 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_PAULI2 = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
_PAULI3 = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


@dataclass(frozen=True)
class CliffordAlgebra:
    """Generators of an irreducible complex Clifford module of R^n."""

    n: int
    N: int
    gammas: tuple[np.ndarray, ...] = field(repr=False)

    @property
    def gamma_stack(self) -> np.ndarray:
        """All generators as one (n, N, N) array."""
        return np.stack(self.gammas)


def build_clifford(n: int) -> CliffordAlgebra:
    """Construct the Clifford representation of R^n, n >= 2.

    Raises ValueError for n < 2.  Deterministic: repeated calls return
    identical matrices.
    """
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise ValueError(f"Clifford construction needs integer dimension n >= 2, got {n!r}")
    gammas = [g.copy() for g in _generators(int(n))]
    N = 2 ** (n // 2)
    for g in gammas:
        g.flags.writeable = False
    return CliffordAlgebra(n=int(n), N=N, gammas=tuple(gammas))


@lru_cache(maxsize=None)
def _generators(n: int) -> tuple[np.ndarray, ...]:
    if n == 2:
        return (1j * _PAULI1, 1j * _PAULI2)
    if n == 3:
        return (1j * _PAULI1, 1j * _PAULI2, 1j * _PAULI3)
    # n -> n+2 step: toss each old generator into the sigma_3 block and
    # append two fresh anti-Hermitian generators acting on the new factor.
    prev = _generators(n - 2)
    N_prev = prev[0].shape[0]
    eye = np.eye(N_prev, dtype=complex)
    grown = [np.kron(g, _PAULI3) for g in prev]
    grown.append(np.kron(eye, 1j * _PAULI1))
    grown.append(np.kron(eye, 1j * _PAULI2))
    return tuple(grown)


@lru_cache(maxsize=None)
def get_clifford(n: int) -> CliffordAlgebra:
    """Cached algebra per dimension; the canonical instance used by operators."""
    return build_clifford(n)


def clifford_mul(C: CliffordAlgebra, v: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Clifford multiplication (sum_i v_i G_i) s.

    ``v`` has shape (..., n) and ``s`` shape (..., N) or (N,); leading axes
    broadcast, so a whole grid of vectors can act on a spinor field at once.
    Linear in both arguments; |v . s| = |v| |s| pointwise.
    """
    v = np.asarray(v)
    s = np.asarray(s)
    if v.shape[-1] != C.n:
        raise ValueError(f"vector has {v.shape[-1]} components, algebra has n={C.n}")
    if s.shape[-1] != C.N:
        raise ValueError(f"spinor has {s.shape[-1]} components, algebra has N={C.N}")
    return np.einsum("...i,iab,...b->...a", v, C.gamma_stack, s, optimize=True)
