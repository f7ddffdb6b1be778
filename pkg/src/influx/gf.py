"""Prime fields Z_p for large random primes, and the seeded RNG plumbing."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

MR_ROUNDS = 64
_SMALL_PRIMES = (3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97)


class DivisionByZero(ZeroDivisionError):
    pass


class PrimeSizeWarning(UserWarning):
    pass


def make_rng(seed: int | np.random.SeedSequence | np.random.Generator) -> np.random.Generator:
    """Counter-based (Philox) generator; children come from ``spawn_rngs``."""
    if isinstance(seed, np.random.Generator):
        return seed
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(seed))


def spawn_rngs(rng: np.random.Generator, n: int) -> list[np.random.Generator]:
    return [np.random.Generator(np.random.Philox(s)) for s in rng.bit_generator.seed_seq.spawn(n)]


def random_below(rng: np.random.Generator, bound: int) -> int:
    """Uniform integer in ``[0, bound)`` for arbitrarily large ``bound``."""
    if bound <= 0:
        raise ValueError("bound must be positive")
    nbits = bound.bit_length()
    nbytes = (nbits + 7) // 8
    excess = 8 * nbytes - nbits
    while True:
        x = int.from_bytes(rng.bytes(nbytes), "little") >> excess
        if x < bound:
            return x


def is_probable_prime(n: int, rng: np.random.Generator | None = None, rounds: int = MR_ROUNDS) -> bool:
    """Miller-Rabin with ``rounds`` random bases (error < 4**-rounds)."""
    if n < 2:
        return False
    if n in (2, 3):
        return True
    if n % 2 == 0:
        return False
    for q in _SMALL_PRIMES:
        if n == q:
            return True
        if n % q == 0:
            return False
    if rng is None:
        rng = make_rng(n)
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for _ in range(rounds):
        a = 2 + random_below(rng, n - 3)
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def inverse_mod(a: int, p: int) -> int:
    """Inverse of ``a`` modulo ``p`` by the extended Euclidean algorithm."""
    a %= p
    if a == 0:
        raise DivisionByZero("zero has no inverse")
    r0, r1 = p, a
    s0, s1 = 0, 1
    while r1:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if r0 != 1:
        raise DivisionByZero(f"{a} is not invertible modulo {p}")
    return s0 % p


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self):
        if self.p <= 2:
            raise ValueError("modulus must be an odd prime")

    def __call__(self, value: int) -> FieldElement:
        return FieldElement(value % self.p, self)

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        return a * b % self.p

    def neg(self, a: int) -> int:
        return -a % self.p

    def inv(self, a: int) -> int:
        return inverse_mod(a, self.p)

    def random_element(self, rng: np.random.Generator, nonzero: bool = False) -> int:
        if nonzero:
            return 1 + random_below(rng, self.p - 1)
        return random_below(rng, self.p)

    @property
    def bits(self) -> int:
        return self.p.bit_length()


@dataclass(frozen=True)
class FieldElement:
    value: int
    field: PrimeField

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError("elements of different fields")
            return other.value
        if isinstance(other, int):
            return other % self.field.p
        return NotImplemented

    def __add__(self, other):
        b = self._coerce(other)
        return FieldElement((self.value + b) % self.field.p, self.field)

    __radd__ = __add__

    def __sub__(self, other):
        b = self._coerce(other)
        return FieldElement((self.value - b) % self.field.p, self.field)

    def __rsub__(self, other):
        b = self._coerce(other)
        return FieldElement((b - self.value) % self.field.p, self.field)

    def __mul__(self, other):
        b = self._coerce(other)
        return FieldElement(self.value * b % self.field.p, self.field)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.value % self.field.p, self.field)

    def inverse(self) -> FieldElement:
        return FieldElement(inverse_mod(self.value, self.field.p), self.field)

    def __truediv__(self, other):
        b = self._coerce(other)
        return self * FieldElement(inverse_mod(b, self.field.p), self.field)

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return FieldElement(pow(self.value, e, self.field.p), self.field)

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value


def random_prime(bit_width: int, rng: np.random.Generator) -> PrimeField:
    """Uniformly random prime in ``[2**bit_width, 2**(bit_width + 1))``."""
    if bit_width < 8:
        raise ValueError("bit_width must be at least 8")
    lo = 1 << bit_width
    while True:
        candidate = lo + random_below(rng, lo)
        if candidate % 2 == 0:
            continue
        if is_probable_prime(candidate, rng):
            return PrimeField(candidate)


@dataclass(frozen=True)
class PrimeSizeReport:
    bound: float
    log2_bound: float
    p: int
    margin_bits: float

    @property
    def sufficient(self) -> bool:
        return self.margin_bits >= 40


def check_prime_size(net, p: int | PrimeField = 1 << 127, *, warn: bool = True) -> PrimeSizeReport:
    """Compare ``p`` against the unlucky-prime bound ``E (E+M)^2 log(1 + max_j |S_j|_1)``.

    The prime is considered safe when it exceeds the bound by at least 2**40.
    """
    from .network import stoich_matrix

    if isinstance(p, PrimeField):
        p = p.p
    S = stoich_matrix(net)
    M, E = S.shape
    max_col = int(np.abs(S).sum(axis=0).max()) if E else 0
    bound = E * (E + M) ** 2 * math.log(1 + max_col)
    log2_bound = math.log2(bound) if bound > 0 else -math.inf
    margin = math.log2(p) - log2_bound
    report = PrimeSizeReport(bound, log2_bound, p, margin)
    if warn and not report.sufficient:
        warnings.warn(
            f"prime of {p.bit_length()} bits exceeds the unlucky-prime bound {bound:.3g} "
            f"by only 2**{margin:.1f}; use a larger prime",
            PrimeSizeWarning,
            stacklevel=2,
        )
    return report
