"""Exact arithmetic in Z[zeta_e] via reduction modulo the e-th cyclotomic polynomial.

Character values are carried around as eigenvalue-multiplicity vectors of
length e (integer multiplicities of the e-th roots of unity).  Equality and
zero tests reduce those vectors to the canonical power basis
zeta^0..zeta^{phi(e)-1}; the reduction matrix is computed once per e by exact
polynomial division of x^e - 1.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

__all__ = ["CyclotomicContext", "cyclotomic_polynomial", "CyclotomicValue"]


def _divisors(e: int) -> list[int]:
    return [d for d in range(1, e + 1) if e % d == 0]


def _poly_divide_exact(num: list[int], den: list[int]) -> list[int]:
    """Exact quotient of integer polynomials (ascending coefficients)."""
    num = list(num)
    dn = len(den) - 1
    out = [0] * (len(num) - dn)
    for i in range(len(num) - 1, dn - 1, -1):
        c = num[i]
        if c % den[dn] != 0:
            raise ArithmeticError("non-exact polynomial division")
        q = c // den[dn]
        out[i - dn] = q
        if q:
            for t in range(dn + 1):
                num[i - dn + t] -= q * den[t]
    if any(num):
        raise ArithmeticError("non-exact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(e: int) -> tuple[int, ...]:
    """Coefficients of Phi_e, ascending, via iterated division of x^e - 1."""
    if e == 1:
        return (-1, 1)
    num = [0] * (e + 1)
    num[0], num[e] = -1, 1
    for d in _divisors(e):
        if d < e:
            num = _poly_divide_exact(num, list(cyclotomic_polynomial(d)))
    return tuple(num)


def _euler_phi(e: int) -> int:
    return len(cyclotomic_polynomial(e)) - 1


def _prime_power_base(e: int):
    if e < 2:
        return None
    q = min(d for d in range(2, e + 1) if e % d == 0)
    m = e
    while m % q == 0:
        m //= q
    return q if m == 1 else None


class CyclotomicContext:
    """Reduction data for one conductor e."""

    def __init__(self, e: int):
        self.e = e
        self.phi = _euler_phi(e)
        coeffs = cyclotomic_polynomial(e)
        # rows: x^s mod Phi_e in the power basis, s = 0..e-1
        red = np.zeros((e, self.phi), dtype=np.int64)
        row = np.zeros(self.phi, dtype=np.int64)
        row[0] = 1
        red[0] = row
        # multiplication by x with reduction: top coefficient folds back
        top = np.array(coeffs[: self.phi], dtype=np.int64)
        for s in range(1, e):
            nxt = np.zeros(self.phi, dtype=np.int64)
            nxt[1:] = row[:-1]
            if row[-1]:
                nxt -= row[-1] * top
            red[s] = nxt
            row = nxt
        self.reduction = red
        self.reduction.setflags(write=False)
        self._prime_power_base = _prime_power_base(e)

    def reduce(self, mult: np.ndarray) -> np.ndarray:
        """Reduce multiplicity vectors (..., e) to power-basis coefficients (..., phi)."""
        mult = np.asarray(mult, dtype=np.int64)
        q = self._prime_power_base
        if q is not None and self.e > 1:
            # zeta^s for s >= phi folds back with coefficient -1 onto the classes
            # s mod e/q, so the reduction is a tiled subtraction
            tail = mult[..., self.phi :]
            folded = np.concatenate([tail] * (q - 1), axis=-1)
            return mult[..., : self.phi] - folded
        return mult @ self.reduction

    def reduce_is_zero(self, mult: np.ndarray) -> np.ndarray:
        return ~np.any(self.reduce(mult), axis=-1)

    def integer(self, v: int) -> np.ndarray:
        out = np.zeros(self.phi, dtype=np.int64)
        out[0] = v
        return out


@lru_cache(maxsize=None)
def get_context(e: int) -> CyclotomicContext:
    return CyclotomicContext(e)


class CyclotomicValue:
    """Canonical element of Z[zeta_e]; equal iff coefficient vectors are equal."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: CyclotomicContext, coeffs: np.ndarray):
        self.ctx = ctx
        self.coeffs = np.asarray(coeffs, dtype=np.int64)

    @staticmethod
    def from_mult_vector(ctx: CyclotomicContext, mult: np.ndarray) -> "CyclotomicValue":
        return CyclotomicValue(ctx, ctx.reduce(np.asarray(mult)))

    @staticmethod
    def from_int(ctx: CyclotomicContext, v: int) -> "CyclotomicValue":
        return CyclotomicValue(ctx, ctx.integer(v))

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CyclotomicValue):
            return NotImplemented
        return self.ctx.e == other.ctx.e and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self) -> int:
        return hash((self.ctx.e, self.coeffs.tobytes()))

    def __add__(self, other: "CyclotomicValue") -> "CyclotomicValue":
        return CyclotomicValue(self.ctx, self.coeffs + other.coeffs)

    def __sub__(self, other: "CyclotomicValue") -> "CyclotomicValue":
        return CyclotomicValue(self.ctx, self.coeffs - other.coeffs)

    def __mul__(self, other: "CyclotomicValue") -> "CyclotomicValue":
        conv = np.convolve(self.coeffs, other.coeffs)
        e, phi = self.ctx.e, self.ctx.phi
        out = np.zeros(phi, dtype=np.int64)
        out += conv[:phi]
        # fold the overflow degrees back down; zeta^s = zeta^(s mod e)
        for s in range(phi, conv.size):
            if conv[s]:
                out += conv[s] * self.ctx.reduction[s % e]
        return CyclotomicValue(self.ctx, out)

    def __repr__(self) -> str:
        return f"CyclotomicValue(e={self.ctx.e}, coeffs={self.coeffs.tolist()})"
