"""Random symmetric matrices with entries ``f(M_{n+n',1} x1, M_{|n-n'|,2} x2) / sqrt(N)``.

Monte Carlo drivers draw ``x = (x1, x2)`` exactly (see :mod:`lacunarylab.sampling`),
so the reduction mod 1 of ``M x`` is exact even for terms with tens of thousands
of bits.  Every sample index owns its own random stream; per-sample results are
combined with :func:`math.fsum`, which is exactly rounded and therefore
independent of the order in which workers return.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .fourier import TrigPolynomial
from .linalg import jacobi_eigenvalues
from .sampling import UnitSample, frac_mul, precision_for, sample_unit, stream, to_real
from .sequences import LacunarySequence, SequenceError
from .spectra import MomentReport, compare_moments, semicircle_cdf

COMPLIANCE_TOL = 1e-12


@dataclass(frozen=True)
class EnsembleSpec:
    N: int
    seq1: LacunarySequence
    seq2: LacunarySequence
    f: TrigPolynomial
    name: str = ""

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be positive")
        if self.f.dimension != 2:
            raise ValueError("the entry function must be two-dimensional")
        if not self.seq1.covers(2, 2 * self.N):
            raise SequenceError(f"seq1 must cover indices 2..{2 * self.N}")
        if not self.seq2.covers(0, self.N - 1):
            raise SequenceError(f"seq2 must cover indices 0..{self.N - 1}")

    @property
    def compliant(self) -> bool:
        """Mean 0, unit L2 norm and vanishing marginals."""
        f = self.f
        return (abs(float(f.mean())) <= COMPLIANCE_TOL
                and abs(float(f.l2_norm_sq()) - 1.0) <= COMPLIANCE_TOL
                and f.marginals_zero())

    @property
    def precision_bits(self) -> int:
        return precision_for(max(self.seq1.term(2 * self.N), self.seq2.term(self.N - 1)))

    def with_f(self, f: TrigPolynomial) -> "EnsembleSpec":
        return EnsembleSpec(self.N, self.seq1, self.seq2, f, self.name)

    def with_n(self, N: int) -> "EnsembleSpec":
        return EnsembleSpec(N, self.seq1, self.seq2, self.f, self.name)

    def digest(self) -> str:
        payload = json.dumps({
            "N": self.N,
            "seq1": self.seq1.dumps(),
            "seq2": self.seq2.dumps(),
            "f": self.f.to_dict(),
        }, sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


def draw_point(spec: EnsembleSpec, master_seed: int, index: int) -> tuple:
    rng = stream(master_seed, index)
    B = spec.precision_bits
    return sample_unit(rng, B), sample_unit(rng, B)


def build_matrix(spec: EnsembleSpec, x: Sequence[UnitSample]) -> np.ndarray:
    """Dense symmetric ``N x N`` matrix for the sample ``x = (x1, x2)``.

    Each entry depends on ``n + n'`` and ``|n - n'|`` only, so the ``3N - 1``
    exact reductions are done once and the matrix is filled by indexing; the
    mirrored entries are the same float, hence bit-equal.
    """
    x1, x2 = x
    N = spec.N
    u1 = np.array([to_real(frac_mul(x1, spec.seq1.term(s))) for s in range(2, 2 * N + 1)])
    u2 = np.array([to_real(frac_mul(x2, spec.seq2.term(d))) for d in range(N)])
    idx = np.arange(1, N + 1)
    s = idx[:, None] + idx[None, :] - 2
    d = np.abs(idx[:, None] - idx[None, :])
    iu = np.triu_indices(N)
    vals = spec.f.eval(u1[s[iu]], u2[d[iu]]) / math.sqrt(N)
    m = np.empty((N, N))
    m[iu] = vals
    m[(iu[1], iu[0])] = vals
    return m


def eigenvalues(m: np.ndarray) -> np.ndarray:
    return jacobi_eigenvalues(m)


def trace_power(m: np.ndarray, K: int, method: str = "power") -> float:
    """``Tr(m**K) / N`` by repeated multiplication or from the spectrum."""
    if K < 1:
        raise ValueError("K must be positive")
    N = m.shape[0]
    if method == "eig":
        lam = eigenvalues(m)
        return math.fsum(lam ** K) / N
    if method != "power":
        raise ValueError(f"unknown method {method!r}")
    return _trace_powers(m, [K])[K]


def _trace_powers(m: np.ndarray, Ks) -> dict:
    # Tr(m^K) = <m^a, m^b> with a + b = K, a = ceil(K/2)
    N = m.shape[0]
    kmax = max(Ks)
    powers = {1: m}
    half = (kmax + 1) // 2
    for p in range(2, half + 1):
        powers[p] = powers[p - 1] @ m
    out = {}
    for K in Ks:
        if K == 1:
            out[K] = float(np.trace(m)) / N
            continue
        a = (K + 1) // 2
        b = K - a
        out[K] = float(np.sum(powers[a] * powers[b])) / N
    return out


# ------------------------------------------------------------------ Monte Carlo

def _moment_chunk(args) -> list:
    spec, Ks, indices, seed = args
    rows = []
    for i in indices:
        m = build_matrix(spec, draw_point(spec, seed, i))
        tp = _trace_powers(m, Ks)
        rows.append([tp[K] for K in Ks])
    return rows


def _eig_chunk(args) -> list:
    spec, indices, seed = args
    return [eigenvalues(build_matrix(spec, draw_point(spec, seed, i))) for i in indices]


def _map_samples(fn, make_args, samples: int, workers: int) -> list:
    indices = list(range(samples))
    if workers <= 1 or samples < 2:
        return fn(make_args(indices))
    chunks = [indices[k::workers] for k in range(workers)]
    chunks = [c for c in chunks if c]
    with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
        parts = list(pool.map(fn, [make_args(c) for c in chunks]))
    by_index = {}
    for c, part in zip(chunks, parts):
        by_index.update(zip(c, part))
    return [by_index[i] for i in indices]


def mean_and_se(values) -> tuple:
    vals = [float(v) for v in values]
    n = len(vals)
    mean = math.fsum(vals) / n
    if n < 2:
        return mean, math.inf
    var = math.fsum((v - mean) ** 2 for v in vals) / (n - 1)
    return mean, math.sqrt(var / n)


def mc_trace_samples(spec: EnsembleSpec, Ks, samples: int, master_seed: int,
                     workers: int = 1) -> dict:
    """Per-sample ``Tr(X^K)/N`` values, keyed by ``K``."""
    Ks = sorted(set(int(k) for k in Ks))
    rows = _map_samples(_moment_chunk, lambda idx: (spec, Ks, idx, master_seed),
                        samples, workers)
    return {K: [r[i] for r in rows] for i, K in enumerate(Ks)}


def mc_mean_moments(spec: EnsembleSpec, Ks, samples: int, master_seed: int,
                    workers: int = 1, k_sigma: float = 4.0, abs_floor=0.0) -> MomentReport:
    """Monte Carlo estimate of ``E[Tr(X^K)/N]`` with standard errors, compared to Catalan."""
    if samples < 2:
        raise ValueError("need at least two samples")
    per_k = mc_trace_samples(spec, Ks, samples, master_seed, workers)
    estimates = {K: mean_and_se(v) for K, v in per_k.items()}
    meta = {"N": spec.N, "samples": samples, "seed": master_seed,
            "spec_digest": spec.digest(), "name": spec.name}
    return compare_moments(estimates, k_sigma=k_sigma, abs_floor=abs_floor, metadata=meta)


@dataclass
class ESDHistogram:
    """Mean empirical spectral distribution on uniform bins over ``[-R, R]``.

    Eigenvalues below ``-R`` / above ``R`` are tallied in ``underflow`` /
    ``overflow``; ``masses`` plus both tails sum to one.
    """

    bin_edges: np.ndarray
    counts: np.ndarray
    underflow: int = 0
    overflow: int = 0
    samples_accumulated: int = 0

    @property
    def total(self) -> int:
        return int(self.counts.sum()) + self.underflow + self.overflow

    @property
    def masses(self) -> np.ndarray:
        return self.counts / self.total

    @property
    def tail_masses(self) -> tuple:
        return self.underflow / self.total, self.overflow / self.total

    def cdf_at_edges(self) -> np.ndarray:
        """Empirical CDF at every bin edge (right-edge convention)."""
        cum = np.concatenate([[0], np.cumsum(self.counts)]) + self.underflow
        return cum / self.total

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["left", "right", "count", "mass"])
        lo, hi = self.tail_masses
        w.writerow(["-inf", repr(float(self.bin_edges[0])), self.underflow, repr(lo)])
        for a, b, c in zip(self.bin_edges[:-1], self.bin_edges[1:], self.counts):
            w.writerow([repr(float(a)), repr(float(b)), int(c), repr(int(c) / self.total)])
        w.writerow([repr(float(self.bin_edges[-1])), "inf", self.overflow, repr(hi)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, samples_accumulated: int = 0) -> "ESDHistogram":
        rows = list(csv.DictReader(io.StringIO(text)))
        under, over = int(rows[0]["count"]), int(rows[-1]["count"])
        body = rows[1:-1]
        edges = np.array([float(r["left"]) for r in body] + [float(body[-1]["right"])])
        counts = np.array([int(r["count"]) for r in body], dtype=np.int64)
        return cls(edges, counts, under, over, samples_accumulated)


def accumulate_histogram(eigs: list, bins: int, R: float) -> ESDHistogram:
    edges = np.linspace(-R, R, bins + 1)
    counts = np.zeros(bins, dtype=np.int64)
    under = over = 0
    for lam in eigs:
        lam = np.asarray(lam)
        under += int(np.sum(lam < -R))
        over += int(np.sum(lam > R))
        inside = lam[(lam >= -R) & (lam <= R)]
        counts += np.histogram(inside, bins=edges)[0]
    return ESDHistogram(edges, counts, under, over, len(eigs))


def mc_eigenvalues(spec: EnsembleSpec, samples: int, master_seed: int, workers: int = 1) -> list:
    return _map_samples(_eig_chunk, lambda idx: (spec, idx, master_seed), samples, workers)


def mc_mean_esd(spec: EnsembleSpec, samples: int, bins: int = 60, R: float = 3.0,
                master_seed: int = 0, workers: int = 1) -> ESDHistogram:
    if samples < 1:
        raise ValueError("need at least one sample")
    if R <= 0 or bins < 1:
        raise ValueError("R and bins must be positive")
    eigs = mc_eigenvalues(spec, samples, master_seed, workers)
    return accumulate_histogram(eigs, bins, R)


def ks_to_semicircle(hist: ESDHistogram) -> float:
    """Sup distance between the histogram CDF at bin edges and the semicircle CDF."""
    emp = hist.cdf_at_edges()
    ref = np.array([semicircle_cdf(float(t)) for t in hist.bin_edges])
    return float(np.max(np.abs(emp - ref)))
