"""Integer lacunary sequences: construction, gap certification and Diophantine counts.

Terms are stored as Python integers so that sequences with thousands of bits
(superlacunary growth) are handled exactly.  All comparisons involving the gap
ratio ``q`` use :class:`fractions.Fraction`.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional


class SequenceError(ValueError):
    """Raised for malformed sequences or out-of-range indices."""


@dataclass(frozen=True)
class LacunarySequence:
    """Finite prefix ``M_s, M_{s+1}, ...`` of an integer gap sequence.

    ``start_index`` is the index of ``terms[0]`` (0 or 1).  ``certified_q`` is the
    largest ``q`` with ``M_{n+1} >= q * M_n`` over the stored range; ``None`` for a
    single-term sequence.
    """

    start_index: int
    terms: tuple
    certified_q: Optional[Fraction] = None

    def __post_init__(self):
        if self.start_index not in (0, 1):
            raise SequenceError("start_index must be 0 or 1")
        if not self.terms:
            raise SequenceError("a sequence needs at least one term")
        if any((not isinstance(t, int)) or t <= 0 for t in self.terms):
            raise SequenceError("terms must be positive integers")
        for a, b in zip(self.terms, self.terms[1:]):
            if b <= a:
                raise SequenceError("terms must be strictly increasing")
        if self.certified_q is None and len(self.terms) >= 2:
            object.__setattr__(self, "certified_q", check_hadamard(self))

    def __len__(self):
        return len(self.terms)

    @property
    def last_index(self) -> int:
        return self.start_index + len(self.terms) - 1

    def covers(self, lo: int, hi: int) -> bool:
        return self.start_index <= lo and hi <= self.last_index

    def term(self, n: int) -> int:
        """Return ``M_n``."""
        k = n - self.start_index
        if k < 0 or k >= len(self.terms):
            raise SequenceError(
                f"index {n} outside stored range {self.start_index}..{self.last_index}")
        return self.terms[k]

    def ratio(self, n: int) -> Fraction:
        """Exact consecutive ratio ``M_{n+1} / M_n``."""
        return Fraction(self.term(n + 1), self.term(n))

    def max_bits(self) -> int:
        return self.terms[-1].bit_length()

    # text format: header line, then one hex integer per line (hex avoids the
    # decimal conversion limit on terms with thousands of digits)
    def dumps(self) -> str:
        q = self.certified_q if self.certified_q is not None else Fraction(0)
        lines = [f"# start_index={self.start_index} q={q.numerator}/{q.denominator}"]
        lines.extend(hex(t) for t in self.terms)
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "LacunarySequence":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("#"):
            raise SequenceError("missing header line")
        header = dict(tok.split("=", 1) for tok in lines[0][1:].split())
        start = int(header["start_index"])
        num, den = header["q"].split("/")
        terms = tuple(int(ln, 16) for ln in lines[1:])
        seq = cls(start, terms)
        q = Fraction(int(num), int(den))
        if len(terms) >= 2 and q != seq.certified_q:
            raise SequenceError(f"header q={q} disagrees with recomputed {seq.certified_q}")
        return seq


def check_hadamard(seq: LacunarySequence) -> Fraction:
    """Return ``min_n M_{n+1}/M_n`` exactly; raise if it is not above 1."""
    terms = seq.terms
    if len(terms) < 2:
        raise SequenceError("need at least two terms to certify a gap ratio")
    q = min(Fraction(b, a) for a, b in zip(terms, terms[1:]))
    if q <= 1:
        raise SequenceError(f"Hadamard gap condition fails (min ratio {q})")
    return q


def make_geometric(base: int, start_index: int, count: int) -> LacunarySequence:
    """``M_n = base**n`` for ``n = start_index .. start_index + count - 1``."""
    if base < 2:
        raise SequenceError("base must be at least 2")
    if count < 1:
        raise SequenceError("count must be positive")
    terms = tuple(base ** (start_index + k) for k in range(count))
    return LacunarySequence(start_index, terms, Fraction(base) if count >= 2 else None)


def make_superlacunary(count: int, start_index: int = 1) -> LacunarySequence:
    """``M_n = 2**(n(n+1)/2)``; consecutive ratios ``2**(n+1)`` grow without bound.

    With ``start_index=0`` the sequence also defines ``M_0 = 1`` and the certified
    ratio drops to 2.
    """
    if count < 1:
        raise SequenceError("count must be positive")
    terms = tuple(1 << (n * (n + 1) // 2) for n in range(start_index, start_index + count))
    return LacunarySequence(start_index, terms)


def make_pow2_minus1(count: int) -> LacunarySequence:
    """``M_n = 2**n - 1`` for ``n = 1..count`` (the Erdos-Fortet sequence)."""
    if count < 1:
        raise SequenceError("count must be positive")
    return LacunarySequence(1, tuple((1 << n) - 1 for n in range(1, count + 1)))


# --------------------------------------------------------------------------
# Diophantine solution counts
# --------------------------------------------------------------------------

@dataclass
class DiophantineReport:
    """Counts of index pairs ``(n, n')`` admitting ``M_n j +- M_n' j' = nu``.

    ``nu_table`` holds every achieved ``nu`` (including 0); ``L_star_table`` the same
    restricted to ``n != n'``.
    """

    N: int
    G: int
    nu_table: dict = field(default_factory=dict)
    L_star_table: dict = field(default_factory=dict)

    @property
    def L_sup(self) -> int:
        return max((c for nu, c in self.nu_table.items() if nu != 0), default=0)

    def L(self, nu: int) -> int:
        return self.nu_table.get(nu, 0)

    def L_star(self, nu: int) -> int:
        return self.L_star_table.get(nu, 0)


def diophantine_counts(seq: LacunarySequence, N: int, G: int) -> DiophantineReport:
    """Exhaustive ``L(N, G, nu)`` and ``L*(N, G, nu)`` for indices ``1..N``.

    ``j`` and ``j'`` range over ``1 <= |j|, |j'| <= G``; since ``j'`` takes both signs
    the ``+-`` in the relation adds nothing beyond symmetry.
    """
    if N < 1 or not seq.covers(1, N):
        raise SequenceError(f"N={N} is not covered by the sequence")
    if G < 1:
        raise SequenceError("G must be at least 1")
    coeffs = [j for j in range(-G, G + 1) if j != 0]
    nu_table: Counter = Counter()
    star: Counter = Counter()
    for n in range(1, N + 1):
        a = seq.term(n)
        left = [a * j for j in coeffs]
        for n2 in range(1, N + 1):
            b = seq.term(n2)
            right = [b * j for j in coeffs]
            achieved = {u + v for u in left for v in right}
            nu_table.update(achieved)
            if n != n2:
                star.update(achieved)
    return DiophantineReport(N, G, dict(nu_table), dict(star))


# --------------------------------------------------------------------------
# condition (251) and the superlacunary majorant
# --------------------------------------------------------------------------

def _window_exponent(N: int, C: float, eps: float) -> int:
    # rounding up only shrinks the window
    return math.ceil(C * N ** (1.0 - eps))


def condition251_sum(seq: LacunarySequence, N: int, K: int, C: float = 1.0,
                     eps: float = 0.5) -> float:
    """Weighted count of near-coincidences ``j M_n ~ j' M_n'`` over ``n > n'`` in ``1..2N``.

    Each hit ``(j, j')`` with ``j, j' <= N**K`` and
    ``|j M_n - j' M_n'| < q**(-E) M_n' / 2``, ``E = ceil(C N**(1-eps))``, adds
    ``1/(j j')``.  The inequality is decided in exact integer arithmetic.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    if C <= 0:
        raise ValueError("C must be positive")
    if N < 1 or K < 1:
        raise ValueError("N and K must be positive")
    if not seq.covers(1, 2 * N):
        raise SequenceError(f"sequence must store indices 1..{2 * N}")
    q = seq.certified_q
    E = _window_exponent(N, C, eps)
    qnum_E = q.numerator ** E
    qden_E = q.denominator ** E
    jmax = N ** K
    total = Fraction(0)
    for n in range(2, 2 * N + 1):
        mn = seq.term(n)
        for n2 in range(1, n):
            mn2 = seq.term(n2)
            bound = mn2 * qden_E
            for j in range(1, jmax + 1):
                # nearest j' to j * M_n / M_n'
                jp = (2 * j * mn + mn2) // (2 * mn2)
                if jp < 1:
                    continue
                if jp > jmax:
                    break
                if 2 * abs(j * mn - jp * mn2) * qnum_E < bound:
                    total += Fraction(1, j * jp)
    return float(total)


def superlacunary_bound(seq: LacunarySequence, N: int) -> float:
    """``sum_{n > n'} min((q_n'**(n-n') - 1/2)**(-1/2), 1)`` over ``n, n'`` in ``1..2N``."""
    if N < 1 or not seq.covers(1, 2 * N):
        raise SequenceError(f"sequence must store indices 1..{2 * N}")
    ratios = {}
    for n in range(1, 2 * N):
        r = seq.ratio(n)
        if r <= Fraction(3, 2):
            raise ValueError(f"ratio M_{n + 1}/M_{n} = {r} <= 3/2; bound degenerates")
        ratios[n] = float(r)
    total = 0.0
    for n in range(2, 2 * N + 1):
        for n2 in range(1, n):
            # q**k overflows float quickly; the min() then saturates at ~0 anyway
            logpow = (n - n2) * math.log(ratios[n2])
            if logpow > 700:
                term = 0.0
            else:
                term = min((math.exp(logpow) - 0.5) ** -0.5, 1.0)
            total += term
    return total


def ratios_list(seq: LacunarySequence) -> list:
    return [Fraction(b, a) for a, b in zip(seq.terms, seq.terms[1:])]


def from_terms(terms: Iterable[int], start_index: int = 1) -> LacunarySequence:
    return LacunarySequence(start_index, tuple(int(t) for t in terms))
