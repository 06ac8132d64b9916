"""Trigonometric polynomials on the torus ``[0,1)^d`` (d = 1 or 2).

A polynomial is stored as a constant plus, for each canonical frequency ``j``
(first nonzero component positive), a pair ``(a_j, b_j)`` meaning
``a_j cos(2 pi <j,x>) + b_j sin(2 pi <j,x>)``.  Coefficients may be floats or
:class:`fractions.Fraction`; truncations and Fejer damping keep exact types
exact.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np


def canonical(j) -> tuple:
    """Return ``(key, sign)`` with ``key`` in the canonical half-space and ``j = sign*key``."""
    j = tuple(int(c) for c in j)
    for c in j:
        if c > 0:
            return j, 1
        if c < 0:
            return tuple(-c for c in j), -1
    return j, 0


def _is_zero(x) -> bool:
    return x == 0


@dataclass(frozen=True)
class TrigPolynomial:
    dimension: int
    coeffs: Mapping  # canonical freq tuple -> (a, b)
    constant: object = 0

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise ValueError("only d = 1 and d = 2 are supported")
        clean = {}
        for j, (a, b) in self.coeffs.items():
            key, sign = canonical(j)
            if len(key) != self.dimension:
                raise ValueError(f"frequency {j} has wrong dimension")
            if sign == 0:
                raise ValueError("zero frequency belongs in `constant`")
            if sign < 0:
                b = -b
            if key in clean:
                a0, b0 = clean[key]
                a, b = a0 + a, b0 + b
            clean[key] = (a, b)
        clean = {k: v for k, v in sorted(clean.items())
                 if not (_is_zero(v[0]) and _is_zero(v[1]))}
        object.__setattr__(self, "coeffs", clean)

    # ---------------------------------------------------------------- algebra
    def __add__(self, other: "TrigPolynomial") -> "TrigPolynomial":
        self._check_dim(other)
        out = dict(self.coeffs)
        for j, (a, b) in other.coeffs.items():
            a0, b0 = out.get(j, (0, 0))
            out[j] = (a0 + a, b0 + b)
        return TrigPolynomial(self.dimension, out, self.constant + other.constant)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "TrigPolynomial":
        return TrigPolynomial(self.dimension,
                              {j: (c * a, c * b) for j, (a, b) in self.coeffs.items()},
                              c * self.constant)

    def _check_dim(self, other):
        if other.dimension != self.dimension:
            raise ValueError("dimension mismatch")

    # ---------------------------------------------------------------- queries
    def mean(self):
        return self.constant

    def l2_norm_sq(self):
        """Parseval: ``c**2 + (1/2) sum (a_j**2 + b_j**2)``."""
        s = sum(a * a + b * b for a, b in self.coeffs.values())
        return self.constant * self.constant + s / 2

    def degree(self) -> int:
        return max((max(abs(c) for c in j) for j in self.coeffs), default=0)

    def support(self) -> list:
        return list(self.coeffs)

    def eval(self, *x):
        """Evaluate at a point (or broadcastable arrays), one argument per coordinate."""
        if len(x) == 1 and self.dimension > 1 and np.ndim(x[0]) == 1 and len(x[0]) == self.dimension:
            x = tuple(x[0])
        if len(x) != self.dimension:
            raise ValueError(f"expected {self.dimension} coordinates, got {len(x)}")
        xs = [np.asarray(xi, dtype=float) for xi in x]
        out = np.zeros(np.broadcast(*xs).shape) + float(self.constant)
        for j, (a, b) in self.coeffs.items():
            phase = 2.0 * np.pi * sum(jc * xc for jc, xc in zip(j, xs) if jc)
            if a:
                out = out + float(a) * np.cos(phase)
            if b:
                out = out + float(b) * np.sin(phase)
        return float(out) if out.ndim == 0 else out

    __call__ = eval

    # ------------------------------------------------------------ truncations
    def dirichlet_partial_sum(self, Gamma) -> "TrigPolynomial":
        """Keep coefficients with ``|j_i| <= Gamma_i`` for every coordinate."""
        if isinstance(Gamma, int):
            Gamma = (Gamma,) * self.dimension
        if len(Gamma) != self.dimension:
            raise ValueError("Gamma has wrong dimension")
        kept = {j: v for j, v in self.coeffs.items()
                if all(abs(c) <= g for c, g in zip(j, Gamma))}
        return TrigPolynomial(self.dimension, kept, self.constant)

    def fejer_weight(self, j, G: int):
        w = Fraction(1)
        for c in j:
            w *= Fraction(G + 1 - abs(c), G + 1)
        return w

    def fejer_mean(self, G: int) -> "TrigPolynomial":
        """Coefficients damped by ``prod_i (G+1-|j_i|)/(G+1)``; dropped when ``||j||_inf > G``."""
        if G < 0:
            raise ValueError("G must be nonnegative")
        out = {}
        for j, (a, b) in self.coeffs.items():
            if max(abs(c) for c in j) > G:
                continue
            w = self.fejer_weight(j, G)
            out[j] = (_mul(a, w), _mul(b, w))
        return TrigPolynomial(self.dimension, out, self.constant)

    def remainder(self, G: int) -> "TrigPolynomial":
        return self - self.fejer_mean(G)

    def marginals_zero(self) -> bool:
        """True iff both one-dimensional marginal integrals vanish identically (d = 2)."""
        if self.dimension != 2:
            raise ValueError("marginals are defined for d = 2 only")
        return _is_zero(self.constant) and all(all(c != 0 for c in j) for j in self.coeffs)

    # ----------------------------------------------------------- serialization
    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "constant": _num_out(self.constant),
            "terms": [{"freq": list(j), "a": _num_out(a), "b": _num_out(b)}
                      for j, (a, b) in self.coeffs.items()],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrigPolynomial":
        coeffs = {tuple(t["freq"]): (_num_in(t["a"]), _num_in(t["b"])) for t in d["terms"]}
        return cls(int(d["dimension"]), coeffs, _num_in(d.get("constant", 0)))

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def loads(cls, text: str) -> "TrigPolynomial":
        return cls.from_dict(json.loads(text))


def _mul(a, w: Fraction):
    if isinstance(a, (int, Fraction)):
        return a * w
    return a * float(w)


def _num_out(x):
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return x
    return float(x)


def _num_in(x):
    if isinstance(x, str):
        return Fraction(x)
    return x


# ----------------------------------------------------------------- builders

def from_cosine(j, amplitude) -> TrigPolynomial:
    """``amplitude * cos(2 pi <j, x>)``."""
    key, sign = canonical(j)
    if sign == 0:
        raise ValueError("zero frequency")
    return TrigPolynomial(len(key), {key: (amplitude, 0)})


def erdos_fortet_1d() -> TrigPolynomial:
    """``cos(2 pi x) + cos(4 pi x)``."""
    return TrigPolynomial(1, {(1,): (1, 0), (2,): (1, 0)})


def paper_2d_counterexample(literal: bool = False) -> TrigPolynomial:
    """``cos(2 pi (x1+x2)) + cos(4 pi (x1+x2))``, which has unit L2 norm.

    ``literal=True`` returns the same shape scaled by ``1/sqrt(2)`` (L2 norm 1/2).
    """
    c = 1 / math.sqrt(2) if literal else 1
    return TrigPolynomial(2, {(1, 1): (c, 0), (2, 2): (c, 0)})


def cos11() -> TrigPolynomial:
    """``sqrt(2) cos(2 pi (x1 + x2))``."""
    return from_cosine((1, 1), math.sqrt(2))


def prodcos() -> TrigPolynomial:
    """``2 cos(2 pi x1) cos(2 pi x2) = cos(2 pi (x1+x2)) + cos(2 pi (x1-x2))``."""
    return TrigPolynomial(2, {(1, 1): (1, 0), (1, -1): (1, 0)})


def hk_test_family(truncation: int = 32) -> TrigPolynomial:
    """Exact-coefficient family ``a_j = 1/(j1 j2)`` on ``1 <= j1, j2 <= truncation``.

    Not normalized; divide norms by :meth:`TrigPolynomial.l2_norm_sq` to stay exact.
    """
    coeffs = {(j1, j2): (Fraction(1, j1 * j2), Fraction(0))
              for j1 in range(1, truncation + 1) for j2 in range(1, truncation + 1)}
    return TrigPolynomial(2, coeffs)


# --------------------------------------------------------------- checks

@dataclass
class CoefficientBoundReport:
    ratios: dict  # freq -> |coef| / (prod 1/(2 pi |j_i|) * V_J)
    C: float

    @property
    def max_ratio(self) -> float:
        return max(self.ratios.values(), default=0.0)

    @property
    def flagged(self) -> list:
        return [j for j, r in self.ratios.items() if r > self.C]

    @property
    def passed(self) -> bool:
        return not self.flagged


def coefficient_bound_check(f: TrigPolynomial, V: Mapping, C: float = 2.0) -> CoefficientBoundReport:
    """Compare each coefficient against the Hardy-Krause bound with variations ``V``.

    ``V`` maps a subset of coordinates (tuple of 0-based indices, sorted) to a
    variation bound ``V_J(f)``.
    """
    ratios = {}
    for j, (a, b) in f.coeffs.items():
        J = tuple(i for i, c in enumerate(j) if c != 0)
        if J not in V:
            raise KeyError(f"no variation bound supplied for coordinate subset {J}")
        bound = float(V[J])
        for c in j:
            if c:
                bound /= 2 * math.pi * abs(c)
        mag = max(abs(float(a)), abs(float(b)))
        ratios[j] = mag / bound if bound > 0 else math.inf
    return CoefficientBoundReport(ratios, C)


def _subsets(d):
    for r in range(1, d + 1):
        yield from itertools.combinations(range(d), r)


def hk_variation_upper(f: TrigPolynomial, grid: int, anchors: int = 8) -> float:
    """Ladder estimate of the Hardy-Krause variation on the uniform ``grid``.

    For each nonempty coordinate subset ``J`` the alternating-difference sum over
    the uniform ladder is maximized over ``anchors`` equispaced values of the
    frozen coordinates; the subset maxima are summed.  The result never exceeds
    ``V_HK(f)`` and does not decrease when the grid is refined by an integer factor.
    """
    deg = f.degree()
    if grid < 4 * max(deg, 1):
        raise ValueError(f"grid {grid} too coarse for degree {deg}")
    d = f.dimension
    y = np.arange(grid + 1) / grid  # successor of the top rung is 1
    zs = np.arange(anchors) / anchors
    total = 0.0
    for J in _subsets(d):
        frozen = [i for i in range(d) if i not in J]
        best = 0.0
        for z in itertools.product(zs, repeat=len(frozen)):
            axes = []
            zi = iter(z)
            for i in range(d):
                axes.append(y if i in J else np.array([next(zi)]))
            mesh = np.meshgrid(*axes, indexing="ij")
            vals = f.eval(*mesh)
            for i in J:
                vals = np.diff(vals, axis=i)
            best = max(best, float(np.abs(vals).sum()))
        total += best
    return total
