"""Classical reference algorithms used as ground truth for the formula terms.

These deliberately avoid ``math.gcd``/``math.isqrt``/``math.factorial`` and the
term evaluator so that every check is between two independent routes.
"""

from __future__ import annotations

import gmpy2

from .errors import PreconditionError


def gcd_euclid(a: int, b: int) -> int:
    if a < 0 or b < 0:
        raise PreconditionError("gcd_euclid takes non-negative integers")
    if a == 0 and b == 0:
        raise PreconditionError("gcd(0, 0) is undefined")
    while b:
        a, b = b, a % b
    return a


def isqrt(n: int) -> int:
    """Largest r with r*r <= n, by Newton iteration from above."""
    if n < 0:
        raise PreconditionError("isqrt of a negative number")
    if n < 2:
        return n
    x = 1 << ((n.bit_length() + 1) // 2)  # >= sqrt(n)
    while True:
        y = (x + n // x) // 2
        if y >= x:
            return x
        x = y


def is_square(n: int) -> bool:
    r = isqrt(n)
    return r * r == n


def factorial(k: int) -> int:
    if k < 0:
        raise PreconditionError("factorial of a negative number")
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


def binomial(r: int, k: int) -> int:
    """C(r, k) by the product formula; each partial product is itself a binomial, so every division is exact."""
    if k < 0 or r < k:
        raise PreconditionError(f"binomial({r}, {k}) needs 0 <= k <= r")
    k = min(k, r - k)
    out = 1
    for i in range(1, k + 1):
        out = out * (r - k + i) // i
    return out


def factorial_matiyasevich(k: int) -> int:
    """k! as floor(r^k / C(r, k)) with r = (k+1)^(k+2)."""
    if k < 2:
        raise PreconditionError("factorial_matiyasevich needs k >= 2")
    r = (k + 1) ** (k + 2)
    return r ** k // binomial(r, k)


def trial_division(n: int) -> list[int]:
    """Prime factors of n in non-decreasing order, with multiplicity."""
    if n < 2:
        raise PreconditionError("trial_division needs n >= 2")
    factors = []
    while n % 2 == 0:
        factors.append(2)
        n //= 2
    d = 3
    while d * d <= n:
        while n % d == 0:
            factors.append(d)
            n //= d
        d += 2
    if n > 1:
        factors.append(n)
    return factors


def is_prime(n: int) -> bool:
    return n >= 2 and trial_division(n) == [n]


def is_semiprime(n: int) -> bool:
    return n >= 2 and len(trial_division(n)) == 2


def totient(n: int) -> int:
    if n < 1:
        raise PreconditionError("totient needs n >= 1")
    if n == 1:
        return 1
    out = 1
    prev = None
    for p in trial_division(n):
        out *= p - 1 if p != prev else p
        prev = p
    return out


def non_square_semiprimes(lo: int, hi: int) -> list[int]:
    return [n for n in range(max(lo, 2), hi + 1) if is_semiprime(n) and not is_square(n)]


def pow_bit_length(base: int, exp: int) -> int:
    """Bit length of base**exp without materializing the power.

    Uses log2 at a working precision comfortably above the size of the
    exponent; exact for powers of two.
    """
    base = abs(base)
    if exp < 0:
        raise PreconditionError("negative exponent")
    if exp == 0 or base == 1:
        return 1
    if base == 0:
        return 0
    if base & (base - 1) == 0:
        return (base.bit_length() - 1) * exp + 1
    precision = exp.bit_length() + base.bit_length() + 96
    with gmpy2.context(gmpy2.get_context(), precision=precision):
        return int(gmpy2.floor(exp * gmpy2.log2(gmpy2.mpfr(base)))) + 1
