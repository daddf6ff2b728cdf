"""Finite fields GF(p) and GF(2^m) with numpy-vectorised arithmetic.

Elements are plain integers in ``[0, q)``: residues for prime fields and
coefficient bit-vectors for binary extension fields.  Every arithmetic method
accepts Python ints or integer numpy arrays and broadcasts like numpy.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ParameterError

# Primitive polynomials, one per degree; bit i is the coefficient of x^i.
DEFAULT_POLYNOMIALS = {
    1: 0x3,
    2: 0x7,
    3: 0xB,
    4: 0x13,
    5: 0x25,
    6: 0x43,
    7: 0x89,
    8: 0x11D,
    9: 0x211,
    10: 0x409,
    11: 0x805,
    12: 0x1053,
    13: 0x201B,
    14: 0x4443,
    15: 0x8003,
    16: 0x1100B,
}

MAX_BINARY_DEGREE = 16
MAX_PRIME = 2**31 - 1


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of ``n`` in ascending order."""
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def _poly_degree(a: int) -> int:
    return a.bit_length() - 1


def _poly_mod(a: int, b: int) -> int:
    db = _poly_degree(b)
    while a and _poly_degree(a) >= db:
        a ^= b << (_poly_degree(a) - db)
    return a


def is_irreducible_gf2(poly: int) -> bool:
    """Trial division by every polynomial of degree 1..deg/2 over GF(2)."""
    m = _poly_degree(poly)
    if m < 1:
        return False
    for d in range(1, m // 2 + 1):
        for f in range(1 << d, 1 << (d + 1)):
            if _poly_mod(poly, f) == 0:
                return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    kind: str  # "prime" or "binary"
    p: int | None = None
    m: int | None = None
    polynomial: int | None = None

    @classmethod
    def prime(cls, p: int) -> "FieldSpec":
        return cls("prime", p=p)

    @classmethod
    def binary(cls, m: int, polynomial: int | None = None) -> "FieldSpec":
        if polynomial is None:
            if m not in DEFAULT_POLYNOMIALS:
                raise ParameterError(f"no default polynomial for m={m}", "1 <= m <= 16")
            polynomial = DEFAULT_POLYNOMIALS[m]
        return cls("binary", m=m, polynomial=polynomial)

    @classmethod
    def parse(cls, text: str) -> "FieldSpec":
        """Parse ``prime:29``, ``gf2:8`` or ``gf2:8:0x11d``."""
        parts = text.strip().lower().split(":")
        try:
            if parts[0] in ("prime", "p", "gfp") and len(parts) == 2:
                return cls.prime(int(parts[1], 0))
            if parts[0] in ("gf2", "binary") and len(parts) in (2, 3):
                poly = int(parts[2], 0) if len(parts) == 3 else None
                return cls.binary(int(parts[1], 0), poly)
        except ValueError:
            pass
        raise ParameterError(f"cannot parse field descriptor {text!r}", "field syntax")

    @property
    def order(self) -> int:
        if self.kind == "prime":
            return self.p
        return 1 << self.m

    def __str__(self) -> str:
        if self.kind == "prime":
            return f"prime:{self.p}"
        return f"gf2:{self.m}:{self.polynomial:#x}"


class Field:
    """Common interface; use :func:`make_field` to construct one."""

    spec: FieldSpec
    order: int
    characteristic: int

    def __eq__(self, other):
        return isinstance(other, Field) and self.spec == other.spec

    def __hash__(self):
        return hash(self.spec)

    def __repr__(self):
        return f"GF({self.order}; {self.spec})"

    @property
    def symbol_bytes(self) -> int:
        """Bytes needed to store one element big-endian."""
        return max(1, ((self.order - 1).bit_length() + 7) // 8)

    @property
    def data_bits(self) -> int:
        """Largest b with 2^b <= q: raw bits carried by one data symbol."""
        return self.order.bit_length() - 1

    def elements(self) -> np.ndarray:
        return np.arange(self.order, dtype=np.int64)

    def asarray(self, a) -> np.ndarray:
        arr = np.asarray(a, dtype=np.int64)
        if arr.size and (arr.min() < 0 or arr.max() >= self.order):
            raise ValueError(f"values outside [0, {self.order})")
        return arr

    def zeros(self, shape) -> np.ndarray:
        return np.zeros(shape, dtype=np.int64)

    def eye(self, n: int) -> np.ndarray:
        return np.eye(n, dtype=np.int64)

    def random(self, shape, rng: np.random.Generator) -> np.ndarray:
        return rng.integers(0, self.order, size=shape, dtype=np.int64)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def embed(self, n: int) -> int:
        """The element n * 1_F."""
        return n % self.characteristic

    def dot(self, a, b) -> int:
        return int(self.matmul(np.asarray(a).reshape(1, -1), np.asarray(b).reshape(-1, 1))[0, 0])

    @cached_property
    def primitive(self) -> int:
        return find_primitive(self)


class PrimeField(Field):
    def __init__(self, spec: FieldSpec):
        p = spec.p
        if p is None or not is_prime(p):
            raise ParameterError(f"{p} is not prime", "p prime")
        if p > MAX_PRIME:
            raise ParameterError(f"prime {p} exceeds 2^31-1", "p < 2^31")
        self.spec = spec
        self.order = p
        self.characteristic = p
        # inner-product block size keeping int64 accumulation exact
        self._block = max(1, (2**63 - 1) // max(1, (p - 1) ** 2))

    def add(self, a, b):
        return (np.asarray(a, dtype=np.int64) + b) % self.order

    def sub(self, a, b):
        return (np.asarray(a, dtype=np.int64) - b) % self.order

    def neg(self, a):
        return (-np.asarray(a, dtype=np.int64)) % self.order

    def mul(self, a, b):
        return (np.asarray(a, dtype=np.int64) * b) % self.order

    def pow(self, a, e: int):
        p = self.order
        a = np.asarray(a, dtype=np.int64)
        if e < 0:
            a = self.inv(a)
            e = -e
        result = np.ones_like(a)
        base = a % p
        while e:
            if e & 1:
                result = (result * base) % p
            base = (base * base) % p
            e >>= 1
        return result

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a % self.order == 0):
            raise ZeroDivisionError("inverse of zero")
        return self.pow(a, self.order - 2)

    def matmul(self, A, B):
        A = np.asarray(A, dtype=np.int64)
        B = np.asarray(B, dtype=np.int64)
        inner = A.shape[1]
        if inner <= self._block:
            return (A @ B) % self.order
        out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
        for s in range(0, inner, self._block):
            out = (out + A[:, s:s + self._block] @ B[s:s + self._block]) % self.order
        return out


class BinaryField(Field):
    """GF(2^m) with log/antilog tables built from the smallest primitive element."""

    def __init__(self, spec: FieldSpec):
        m, poly = spec.m, spec.polynomial
        if m is None or not 1 <= m <= MAX_BINARY_DEGREE:
            raise ParameterError(f"binary degree {m} unsupported", "1 <= m <= 16")
        if poly is None or _poly_degree(poly) != m:
            raise ParameterError(f"polynomial {poly!r} does not have degree {m}", "deg(poly) = m")
        if not is_irreducible_gf2(poly):
            raise ParameterError(f"polynomial {poly:#x} is reducible", "irreducible polynomial")
        self.spec = spec
        self.order = 1 << m
        self.characteristic = 2
        self.m = m
        self.polynomial = poly
        self._build_tables()

    def _clmul(self, a: int, b: int) -> int:
        r = 0
        while b:
            if b & 1:
                r ^= a
            b >>= 1
            a <<= 1
            if a >> self.m:
                a ^= self.polynomial
        return r

    def _slow_pow(self, a: int, e: int) -> int:
        r = 1
        while e:
            if e & 1:
                r = self._clmul(r, a)
            a = self._clmul(a, a)
            e >>= 1
        return r

    def _build_tables(self):
        q1 = self.order - 1
        factors = prime_factors(q1) if q1 > 1 else []
        gen = next(
            g for g in range(1, self.order)
            if all(self._slow_pow(g, q1 // r) != 1 for r in factors)
        )
        exp = np.zeros(2 * q1 + 1, dtype=np.int64)
        log = np.zeros(self.order, dtype=np.int64)
        x = 1
        for i in range(q1):
            exp[i] = x
            log[x] = i
            x = self._clmul(x, gen)
        exp[q1:2 * q1] = exp[:q1]
        exp[2 * q1] = exp[0]
        self._exp = exp
        self._log = log
        self._mul_table = None
        if self.order <= 256:
            a = np.arange(self.order)
            self._mul_table = self.mul(a[:, None], a[None, :])

    def add(self, a, b):
        return np.bitwise_xor(np.asarray(a, dtype=np.int64), b)

    sub = add

    def neg(self, a):
        return np.asarray(a, dtype=np.int64)

    def mul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        prod = self._exp[self._log[a] + self._log[b]]
        return np.where((a == 0) | (b == 0), 0, prod)

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of zero")
        return self._exp[(self.order - 1 - self._log[a]) % (self.order - 1)]

    def pow(self, a, e: int):
        a = np.asarray(a, dtype=np.int64)
        if e < 0:
            a = self.inv(a)
            e = -e
        if e == 0:
            return np.ones_like(a)
        out = self._exp[(self._log[a] * e) % (self.order - 1)]
        return np.where(a == 0, 0, out)

    def matmul(self, A, B):
        A = np.asarray(A, dtype=np.int64)
        B = np.asarray(B, dtype=np.int64)
        out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
        for t in range(A.shape[1]):
            col = A[:, t, None]
            row = B[None, t, :]
            if self._mul_table is not None:
                out ^= self._mul_table[col, row]
            else:
                out ^= self.mul(col, row)
        return out


def make_field(spec: FieldSpec) -> Field:
    """Construct a field; rejects non-prime p and reducible polynomials."""
    if spec.kind == "prime":
        return PrimeField(spec)
    if spec.kind == "binary":
        return BinaryField(spec)
    raise ParameterError(f"unknown field kind {spec.kind!r}", "kind in {prime, binary}")


def prime_field(p: int) -> Field:
    return make_field(FieldSpec.prime(p))


def binary_field(m: int, polynomial: int | None = None) -> Field:
    return make_field(FieldSpec.binary(m, polynomial))


def element_order(field: Field, a: int) -> int:
    """Multiplicative order of a nonzero element, by repeated multiplication."""
    if a == 0:
        raise ZeroDivisionError("zero has no multiplicative order")
    x, k = a, 1
    while x != 1:
        x = int(field.mul(x, a))
        k += 1
    return k


def find_primitive(field: Field) -> int:
    """Smallest-repr element of multiplicative order q - 1."""
    q1 = field.order - 1
    factors = prime_factors(q1) if q1 > 1 else []
    for g in range(1, field.order):
        if all(int(field.pow(g, q1 // r)) != 1 for r in factors):
            return g
    raise AssertionError("finite field without primitive element")


def unity_root(field: Field, u: int) -> int:
    """eta = xi^((q-1)/u), an element of multiplicative order exactly u."""
    if u < 1 or (field.order - 1) % u:
        raise ParameterError(f"u={u} does not divide q-1={field.order - 1}", "u | q-1")
    return int(field.pow(field.primitive, (field.order - 1) // u))


def char_sum(field: Field, u: int, x: int) -> int:
    """sum_{g<u} eta^(g x), evaluated term by term."""
    eta = unity_root(field, u)
    total = 0
    for g in range(u):
        total = int(field.add(total, field.pow(eta, g * x)))
    return total


def default_field(n: int, u: int) -> Field:
    """GF(2^8) when u | 255 and n < 256, else the smallest prime q > n with u | q-1."""
    if 255 % u == 0 and n < 256:
        return binary_field(8)
    q = n + 1
    while not (is_prime(q) and (q - 1) % u == 0):
        q += 1
    return prime_field(q)


def check_code_field(field: Field, n: int, u: int) -> None:
    """Field constraints of both constructions: q > n, u | q-1, char(F) does not divide u."""
    if field.order <= n:
        raise ParameterError(f"field order {field.order} must exceed n={n}", "q > n")
    if (field.order - 1) % u:
        raise ParameterError(f"u={u} must divide q-1={field.order - 1}", "u | q-1")
    assert u % field.characteristic != 0
