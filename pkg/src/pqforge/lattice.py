"""Small integer lattices and exhaustive short-vector enumeration."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .errors import CapabilityError, ValidationError

MAX_BASIS_DIM = 8
MAX_ENUM_DIM = 6


def _exact_det(rows: Sequence[Sequence[int]]) -> int:
    """Determinant by fraction-exact Gaussian elimination."""
    m = [[Fraction(v) for v in row] for row in rows]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return 0
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        det *= m[col][col]
        for r in range(col + 1, n):
            f = m[r][col] / m[col][col]
            if f:
                for c in range(col, n):
                    m[r][c] -= f * m[col][c]
    return int(det)


@dataclass(frozen=True)
class IntegerLattice:
    """Full-rank lattice spanned by the rows of a square integer matrix."""

    basis: tuple[tuple[int, ...], ...]

    def __init__(self, basis: Sequence[Sequence[int]]):
        rows = tuple(tuple(int(v) for v in row) for row in basis)
        if not rows or any(len(r) != len(rows) for r in rows):
            raise ValidationError("basis must be a non-empty square matrix")
        for row, src in zip(rows, basis):
            if any(float(a) != float(b) for a, b in zip(row, src)):
                raise ValidationError("basis entries must be integers")
        if len(rows) > MAX_BASIS_DIM:
            raise CapabilityError(f"basis dimension {len(rows)} exceeds {MAX_BASIS_DIM}")
        if _exact_det(rows) == 0:
            raise ValidationError("basis rows are linearly dependent")
        object.__setattr__(self, "basis", rows)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def det(self) -> int:
        """Lattice volume |det B| (exact)."""
        return abs(_exact_det(self.basis))

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.basis, dtype=np.int64)

    def max_row_norm(self) -> float:
        return max(math.sqrt(sum(v * v for v in row)) for row in self.basis)

    def default_radius(self) -> float:
        return 2.0 * self.max_row_norm()

    def scaled(self, s: int) -> "IntegerLattice":
        return IntegerLattice([[s * v for v in row] for row in self.basis])

    def transformed(self, unimodular: Sequence[Sequence[int]]) -> "IntegerLattice":
        """Basis ``U @ B``; the same lattice when ``U`` is unimodular."""
        u = np.array(unimodular, dtype=object)
        b = np.array(self.basis, dtype=object)
        return IntegerLattice((u @ b).tolist())

    def gram_schmidt(self) -> tuple[np.ndarray, np.ndarray]:
        """Return (mu, squared GS norms) for the row basis."""
        b = np.array(self.basis, dtype=float)
        n = self.dim
        bstar = np.zeros_like(b)
        mu = np.eye(n)
        for i in range(n):
            v = b[i].copy()
            for j in range(i):
                mu[i, j] = b[i] @ bstar[j] / (bstar[j] @ bstar[j])
                v -= mu[i, j] * bstar[j]
            bstar[i] = v
        return mu, np.einsum("ij,ij->i", bstar, bstar)


def enumerate_short_vectors(lat: IntegerLattice, radius: float) -> Iterator[tuple[tuple[int, ...], int]]:
    """Yield ``(vector, squared_norm)`` for every nonzero lattice vector with norm <= radius.

    Fincke-Pohst enumeration over coefficient vectors with per-level bounds
    from the Gram-Schmidt norms. The float bounds are widened slightly and
    every candidate is re-checked with exact integer arithmetic.
    """
    if lat.dim > MAX_ENUM_DIM:
        raise CapabilityError(f"enumeration is limited to dimension {MAX_ENUM_DIM}")
    if radius <= 0:
        return
    n = lat.dim
    mu, bsq = lat.gram_schmidt()
    r2 = radius * radius
    r2_exact = Fraction(radius) ** 2
    budget = r2 * (1 + 1e-9) + 1e-9
    basis = lat.basis
    x = [0] * n

    def level(k: int, used: float) -> Iterator[tuple[tuple[int, ...], int]]:
        center = -sum(mu[i, k] * x[i] for i in range(k + 1, n))
        width = math.sqrt(max(budget - used, 0.0) / bsq[k])
        lo, hi = math.ceil(center - width), math.floor(center + width)
        for xk in range(lo, hi + 1):
            part = used + (xk - center) ** 2 * bsq[k]
            if part > budget:
                continue
            x[k] = xk
            if k == 0:
                if any(x):
                    vec = tuple(sum(x[i] * basis[i][c] for i in range(n)) for c in range(n))
                    sq = sum(v * v for v in vec)
                    if sq <= r2_exact:
                        yield vec, sq
            else:
                yield from level(k - 1, part)
        x[k] = 0

    yield from level(n - 1, 0.0)
