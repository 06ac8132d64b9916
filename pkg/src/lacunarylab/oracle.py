"""Exact expectations for trigonometric-polynomial entries by frequency matching.

Writing ``f(y) = sum_j c_j e(<j, y>)`` with ``e(t) = exp(2 pi i t)``, the mean of a
product ``prod_k f(A_k x1, B_k x2)`` over uniform ``x`` is the sum of
``prod_k c_{j_k}`` over all tuples with ``sum_k j_{k,1} A_k = 0`` and
``sum_k j_{k,2} B_k = 0``.  The dilations ``A_k, B_k`` are sequence terms, kept
as exact Python integers, so cancellations are detected without rounding.
"""

from __future__ import annotations

import itertools
import math
import time
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .ensemble import EnsembleSpec
from .fourier import TrigPolynomial
from .sequences import LacunarySequence

DEFAULT_BUDGET = 2 ** 28
IMAG_TOL = 1e-12


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class ExpPolynomial:
    """Complex exponential coefficients on the full lattice (both signs of ``j``)."""

    dimension: int
    coeffs: dict

    @classmethod
    def from_trig(cls, f: TrigPolynomial) -> "ExpPolynomial":
        out = {}
        if f.constant != 0:
            out[(0,) * f.dimension] = complex(f.constant)
        for j, (a, b) in f.coeffs.items():
            a, b = float(a), float(b)
            out[j] = complex(a / 2, -b / 2)
            out[tuple(-c for c in j)] = complex(a / 2, b / 2)
        return cls(f.dimension, out)

    def to_trig(self) -> TrigPolynomial:
        zero = (0,) * self.dimension
        coeffs = {}
        for j, c in self.coeffs.items():
            if j == zero or j[next(i for i, v in enumerate(j) if v)] < 0:
                continue
            coeffs[j] = (2 * c.real, -2 * c.imag)
        const = self.coeffs.get(zero, 0j).real
        return TrigPolynomial(self.dimension, coeffs, const)

    def is_hermitian(self, tol: float = 0.0) -> bool:
        for j, c in self.coeffs.items():
            other = self.coeffs.get(tuple(-v for v in j), 0j)
            if abs(other - c.conjugate()) > tol:
                return False
        return True

    @property
    def items(self) -> list:
        return sorted(self.coeffs.items())


def _real(z: complex, what: str) -> float:
    if abs(z.imag) > IMAG_TOL * max(1.0, abs(z.real)):
        raise ArithmeticError(f"{what}: imaginary part {z.imag!r} does not vanish")
    return z.real


def product_expectation(support: list, dilations: list) -> complex:
    """``E[prod_k f(A_k x1, B_k x2)]`` for ``dilations = [(A_k, B_k), ...]`` (meet in the middle)."""
    return _mitm(support, dilations)[0]


def _half_sums(support, dilations):
    table = defaultdict(complex)
    counts = defaultdict(int)
    for combo in itertools.product(support, repeat=len(dilations)):
        s1 = s2 = 0
        w = 1 + 0j
        for (j, c), (A, B) in zip(combo, dilations):
            s1 += j[0] * A
            s2 += j[1] * B
            w *= c
        table[(s1, s2)] += w
        counts[(s1, s2)] += 1
    return table, counts


def _mitm(support, dilations):
    h = len(dilations) // 2
    left, lcount = _half_sums(support, dilations[:h])
    right, rcount = _half_sums(support, dilations[h:])
    total = 0j
    tuples = 0
    for (s1, s2), w in left.items():
        key = (-s1, -s2)
        if key in right:
            total += w * right[key]
            tuples += lcount[(s1, s2)] * rcount[key]
    return total, tuples


def _zero_pairs(support, u, v):
    out = []
    for (j, c), (jj, cc) in itertools.product(support, repeat=2):
        if j[0] * u[0] + jj[0] * v[0] == 0 and j[1] * u[1] + jj[1] * v[1] == 0:
            out.append((j, jj, c * cc))
    return out


def _pair_classification(support, dil):
    """Split a 4-cycle's matched sum into adjacent-pairing parts.

    Returns ``(P12*P34 + P14*P23, overlap)`` where ``overlap`` is the weight of
    tuples satisfying both adjacent pairings (counted twice in the first value).
    """
    z12 = _zero_pairs(support, dil[0], dil[1])
    z34 = _zero_pairs(support, dil[2], dil[3])
    p12 = sum((w for _, _, w in z12), 0j)
    p34 = sum((w for _, _, w in z34), 0j)
    p14 = sum((w for _, _, w in _zero_pairs(support, dil[0], dil[3])), 0j)
    p23 = sum((w for _, _, w in _zero_pairs(support, dil[1], dil[2])), 0j)
    both = 0j
    u1, u4 = dil[0], dil[3]
    for j1, _, w12 in z12:
        for _, j4, w34 in z34:
            if j1[0] * u1[0] + j4[0] * u4[0] == 0 and j1[1] * u1[1] + j4[1] * u4[1] == 0:
                both += w12 * w34
    return p12 * p34 + p14 * p23, both


def _canonical_cycles(N: int, K: int):
    """Distinct cycles up to rotation and reflection, with multiplicities.

    Yields ``(edges, count)`` where ``edges`` lists ``(n_k + n_{k+1}, |n_k - n_{k+1}|)``.
    """
    grids = np.meshgrid(*([np.arange(1, N + 1)] * K), indexing="ij")
    cyc = np.stack([g.ravel() for g in grids], axis=1)
    nxt = np.roll(cyc, -1, axis=1)
    a = cyc + nxt
    b = np.abs(cyc - nxt)
    ids = (a - 2) * N + b  # < (2N - 1) N
    base = (2 * N - 1) * N
    variants = []
    for r in range(K):
        rot = np.roll(ids, -r, axis=1)
        variants.append(rot)
        variants.append(rot[:, ::-1])
    if K * math.log2(base) < 62:
        weights = np.array([base ** (K - 1 - k) for k in range(K)], dtype=np.int64)
        keys = np.min(np.stack([v @ weights for v in variants]), axis=0)
        uniq, counts = np.unique(keys, return_counts=True)
        for key, cnt in zip(uniq.tolist(), counts.tolist()):
            digits = []
            for _ in range(K):
                key, r = divmod(key, base)
                digits.append(r)
            digits.reverse()
            yield [(d // N + 2, d % N) for d in digits], cnt
    else:
        stacked = np.stack(variants)  # (2K, rows, K)
        # lexicographic min across variants, row by row
        best = stacked[0].copy()
        for v in stacked[1:]:
            for row in range(best.shape[0]):
                if tuple(v[row]) < tuple(best[row]):
                    best[row] = v[row]
        uniq, counts = np.unique(best, axis=0, return_counts=True)
        for row, cnt in zip(uniq.tolist(), counts.tolist()):
            yield [(d // N + 2, d % N) for d in row], cnt


@dataclass
class ExactTrace:
    N: int
    K: int
    value: float
    tuples_counted: int
    wall_time: float
    paired: float = math.nan   # K = 4: adjacent-pairing contributions (overlap counted twice)
    overlap: float = math.nan  # K = 4: tuples satisfying both adjacent pairings
    extras: dict = field(default_factory=dict)

    @property
    def dropped(self) -> float:
        """``value - paired``: non-paired tuples minus the doubly counted overlap."""
        return self.value - self.paired

    def to_record(self, with_time: bool = True) -> dict:
        rec = {"N": self.N, "K": self.K, "value": self.value,
               "tuples_counted": self.tuples_counted}
        if self.K == 4 and not math.isnan(self.paired):
            rec.update(paired=self.paired, overlap=self.overlap, dropped=self.dropped)
        if with_time:
            rec["wall_time"] = self.wall_time
        return rec


def exact_mean_trace(spec: EnsembleSpec, K: int, budget: int = DEFAULT_BUDGET,
                     classify: bool = False) -> ExactTrace:
    """``E[Tr(X^K)/N]`` computed exactly over all cycles and frequency tuples."""
    if K < 1:
        raise ValueError("K must be positive")
    t0 = time.perf_counter()
    N = spec.N
    support = ExpPolynomial.from_trig(spec.f).items
    work = (len(support) * N) ** K
    if work > budget:
        raise BudgetExceeded(f"(s N)^K = {work} exceeds budget {budget}")
    if classify and K != 4:
        raise ValueError("pairing classification is defined for K = 4")
    s1, s2 = spec.seq1, spec.seq2
    total = 0j
    tuples = 0
    paired = overlap = 0j
    for edges, mult in _canonical_cycles(N, K):
        dil = [(s1.term(a), s2.term(b)) for a, b in edges]
        val, cnt = _mitm(support, dil)
        total += mult * val
        tuples += mult * cnt
        if classify:
            p, o = _pair_classification(support, dil)
            paired += mult * p
            overlap += mult * o
    norm = N ** (K / 2 + 1)
    res = ExactTrace(N, K, _real(total, "exact_mean_trace") / norm, tuples,
                     time.perf_counter() - t0)
    if classify:
        res.paired = _real(paired, "paired") / norm
        res.overlap = _real(overlap, "overlap") / norm
    return res


# ------------------------------------------------------------ the 2^n example

def _pair_expectation_2d(f: TrigPolynomial, u: tuple, v: tuple) -> float:
    """``E[f(u1 x1, u2 x2) f(v1 x1, v2 x2)]`` by direct matching of cos/sin terms."""
    sup = ExpPolynomial.from_trig(f).coeffs
    acc = 0j
    for j, c in sup.items():
        # the partner frequency is forced: jj * v = -j * u coordinate-wise
        jj = []
        for i in range(2):
            num = -j[i] * u[i]
            if num % v[i]:
                break
            jj.append(num // v[i])
        else:
            cc = sup.get(tuple(jj))
            if cc is not None:
                acc += c * cc
    return _real(acc, "pair expectation")


def counterexample_inner_sum(N: int, n1: int, n3: int, f: TrigPolynomial = None) -> float:
    """``sum_n E[f(2^a x1, 2^b x2) f(2^a' x1, 2^b' x2)]`` after removing the common dilation.

    ``a = (n3 - n1) v 0``, ``b = (|n - n3| - |n1 - n|) v 0`` and primed exponents
    with the roles of ``n1`` and ``n3`` exchanged.
    """
    from .fourier import paper_2d_counterexample
    f = f or paper_2d_counterexample()
    total = 0.0
    for n in range(1, N + 1):
        u = (1 << max(n3 - n1, 0), 1 << max(abs(n - n3) - abs(n1 - n), 0))
        v = (1 << max(n1 - n3, 0), 1 << max(abs(n1 - n) - abs(n - n3), 0))
        total += _pair_expectation_2d(f, u, v)
    return total


def counterexample_fourth_moment(N: int, f: TrigPolynomial = None) -> dict:
    """``(2/N^3) sum_{n1,n3} inner(n1, n3)^2`` split into the ``n1 = n3`` part and the rest."""
    inner = {(n1, n3): counterexample_inner_sum(N, n1, n3, f)
             for n1 in range(1, N + 1) for n3 in range(1, N + 1)}
    diag = 2.0 / N ** 3 * math.fsum(inner[(n, n)] ** 2 for n in range(1, N + 1))
    off = 2.0 / N ** 3 * math.fsum(v * v for (a, b), v in inner.items() if a != b)
    return {"N": N, "value": diag + off, "diagonal": diag, "off_diagonal": off}


# ------------------------------------------------------------ 1-D variances

def _exp_1d(f: TrigPolynomial) -> dict:
    if f.dimension != 1:
        raise ValueError("expected a one-dimensional function")
    return {j[0]: c for j, c in ExpPolynomial.from_trig(f).coeffs.items()}


def exact_variance_sigma2(f: TrigPolynomial, seq: LacunarySequence, N: int) -> float:
    """``int (sum_{n<=N} f(M_n x))^2 dx``: aggregate coefficients per frequency, then Parseval."""
    if not seq.covers(1, N):
        raise ValueError(f"sequence must cover 1..{N}")
    sup = _exp_1d(f)
    agg = defaultdict(complex)
    for n in range(1, N + 1):
        M = seq.term(n)
        for j, c in sup.items():
            agg[j * M] += c
    return math.fsum(abs(c) ** 2 for c in agg.values())


def _cross_expectation_1d(f: TrigPolynomial, m: int) -> float:
    """``E[f(x) f(m x)]``."""
    sup = _exp_1d(f)
    acc = 0j
    for j, c in sup.items():
        if j % m == 0 or j == 0:
            cc = sup.get(-j // m) if j % m == 0 else None
            if cc is not None:
                acc += c * cc
    return _real(acc, "cross expectation")


def kac_sigma2(f: TrigPolynomial, terms: int = None) -> float:
    """``||f||^2 + 2 sum_{n=1}^{T} E[f(x) f(2^n x)]``.

    With ``terms=None`` the series is summed until ``2^n`` exceeds the largest
    frequency, after which every term of a mean-zero polynomial vanishes.
    """
    if terms is None:
        terms = max(f.degree(), 1).bit_length()
    norm = float(f.l2_norm_sq())
    return norm + 2 * math.fsum(_cross_expectation_1d(f, 1 << n) for n in range(1, terms + 1))
