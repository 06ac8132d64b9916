"""Partial sums ``S_N(x) = sum_{n<=N} f(M_n x)`` of one-dimensional lacunary systems."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special, stats

from .ensemble import _map_samples
from .fourier import TrigPolynomial, erdos_fortet_1d
from .oracle import exact_variance_sigma2
from .sampling import frac_mul, precision_for, sample_unit, stream, to_real
from .sequences import LacunarySequence, make_pow2_minus1

LOW_POWER_SAMPLES = 10


@dataclass(frozen=True)
class SumExperiment:
    f: TrigPolynomial
    seq: LacunarySequence
    N: int
    samples: int
    normalization: str = "sigma"  # "sigma": divide by sigma_N; "sqrt": divide by sqrt(N)

    def __post_init__(self):
        if self.f.dimension != 1:
            raise ValueError("sums are defined for one-dimensional f")
        if not self.seq.covers(1, self.N):
            raise ValueError(f"sequence must cover 1..{self.N}")
        if self.normalization not in ("sigma", "sqrt"):
            raise ValueError("normalization must be 'sigma' or 'sqrt'")
        if self.normalization == "sigma" and self.sigma_N() <= 0:
            raise ValueError("sigma_N vanishes; cannot normalize by it")

    def sigma_N(self) -> float:
        return math.sqrt(exact_variance_sigma2(self.f, self.seq, self.N))

    def scale(self) -> float:
        return self.sigma_N() if self.normalization == "sigma" else math.sqrt(self.N)


def _sum_chunk(args):
    f, terms, bits, scale, indices, seed = args
    out = []
    for i in indices:
        x = sample_unit(stream(seed, i), bits)
        u = np.array([to_real(frac_mul(x, M)) for M in terms])
        out.append(math.fsum(f.eval(u)) / scale)
    return out


def run_sums(exp: SumExperiment, master_seed: int, workers: int = 1) -> np.ndarray:
    """Normalized sums for ``exp.samples`` independent uniform ``x``, in sample order."""
    terms = [exp.seq.term(n) for n in range(1, exp.N + 1)]
    bits = precision_for(terms[-1])
    scale = exp.scale()
    vals = _map_samples(_sum_chunk,
                        lambda idx: (exp.f, terms, bits, scale, idx, master_seed),
                        exp.samples, workers)
    return np.array(vals)


# ---------------------------------------------------------------- limit laws

_GL_NODES = 1024


@lru_cache(maxsize=1)
def _gauss_legendre_half():
    # |cos(pi s)| is symmetric about 1/2, so integrate over [0, 1/2] and double
    x, w = np.polynomial.legendre.leggauss(_GL_NODES)
    return 0.25 * (x + 1.0), 0.25 * w


def erdos_fortet_limit_cdf(t: float) -> float:
    """Gaussian mixture ``int_0^1 Phi(t / (sqrt(2) |cos(pi s)|)) ds``.

    The inner integral ``pi^{-1/2} int_{-inf}^{a} exp(-u^2) du`` equals
    ``(1 + erf(a)) / 2`` with ``a = t / (2 |cos(pi s)|)``.
    """
    if math.isinf(t):
        return 1.0 if t > 0 else 0.0
    s, w = _gauss_legendre_half()
    c = np.abs(np.cos(np.pi * s))
    a = t / (2.0 * c)
    return float(2.0 * np.sum(w * 0.5 * (1.0 + special.erf(a))))


class MixtureCDF:
    """Tabulated :func:`erdos_fortet_limit_cdf` with linear interpolation."""

    def __init__(self, lo: float = -8.0, hi: float = 8.0, step: float = 0.01):
        n = int(round((hi - lo) / step)) + 1
        self.grid = np.linspace(lo, hi, n)
        self.values = np.array([erdos_fortet_limit_cdf(t) for t in self.grid])

    def __call__(self, t):
        return np.interp(t, self.grid, self.values, left=0.0, right=1.0)


@lru_cache(maxsize=1)
def mixture_cdf() -> MixtureCDF:
    return MixtureCDF()


def ks_distance(samples, cdf) -> float:
    return float(stats.kstest(np.asarray(samples), cdf).statistic)


def ks_to_normal(samples) -> float:
    return ks_distance(samples, stats.norm.cdf)


def ks_to_best_gaussian(samples) -> float:
    s = np.asarray(samples)
    return ks_distance(s, stats.norm(loc=s.mean(), scale=s.std(ddof=1)).cdf)


def erdos_fortet_experiment(N: int, samples: int, master_seed: int, workers: int = 1) -> dict:
    """``f = cos 2 pi x + cos 4 pi x`` along ``M_n = 2^n - 1``, normalized by ``sqrt(N)``."""
    exp = SumExperiment(erdos_fortet_1d(), make_pow2_minus1(N), N, samples, "sqrt")
    vals = run_sums(exp, master_seed, workers)
    return {
        "N": N,
        "samples": samples,
        "ks_to_mixture": ks_distance(vals, mixture_cdf()),
        "ks_to_gaussian": ks_to_best_gaussian(vals),
        "low_power": samples <= LOW_POWER_SAMPLES,
        "values": vals,
    }


def cdf_table(samples, ts) -> str:
    """CSV of ``t, empirical CDF, Phi(t), mixture(t)``."""
    s = np.sort(np.asarray(samples))
    mix = mixture_cdf()
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "ecdf", "phi", "mixture"])
    for t in ts:
        ecdf = np.searchsorted(s, t, side="right") / len(s)
        w.writerow([repr(float(t)), repr(float(ecdf)), repr(float(stats.norm.cdf(t))),
                    repr(float(mix(t)))])
    return buf.getvalue()
