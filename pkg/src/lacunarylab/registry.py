"""One-word names for the built-in sequences, entry functions and ensembles."""

from __future__ import annotations

from .ensemble import EnsembleSpec
from .fourier import cos11, erdos_fortet_1d, from_cosine, paper_2d_counterexample, prodcos
from .sequences import (LacunarySequence, SequenceError, make_geometric, make_pow2_minus1,
                        make_superlacunary)

SEQUENCES = ("pow2", "pow2minus1", "pow3", "superlacunary")

FUNCTIONS = {
    "cos11": cos11,
    "prodcos": prodcos,
    "ef2d": paper_2d_counterexample,
    "ef1d": erdos_fortet_1d,
    "cos1": lambda: from_cosine((1,), 1),
}

# (seq1, seq2, f)
BUILTIN_SPECS = {
    "superlacunary-cos11": ("superlacunary", "superlacunary", "cos11"),
    "superlacunary-prodcos": ("superlacunary", "superlacunary", "prodcos"),
    "pow2-cos11": ("pow2", "pow2", "cos11"),
    "pow2-ef2d": ("pow2", "pow2", "ef2d"),
    "pow3-prodcos": ("pow3", "pow3", "prodcos"),
}


def make_sequence(name: str, start_index: int, last_index: int) -> LacunarySequence:
    """Named sequence storing indices ``start_index .. last_index``."""
    count = last_index - start_index + 1
    if name == "pow2":
        return make_geometric(2, start_index, count)
    if name == "pow3":
        return make_geometric(3, start_index, count)
    if name == "superlacunary":
        return make_superlacunary(count, start_index)
    if name == "pow2minus1":
        if start_index != 1:
            raise SequenceError("pow2minus1 has no term at index 0")
        return make_pow2_minus1(count)
    raise KeyError(f"unknown sequence {name!r}; choose from {', '.join(SEQUENCES)}")


def make_function(name: str):
    try:
        return FUNCTIONS[name]()
    except KeyError:
        raise KeyError(f"unknown function {name!r}; choose from {', '.join(FUNCTIONS)}") from None


def make_spec(seq1: str, seq2: str, f: str, N: int) -> EnsembleSpec:
    return EnsembleSpec(N, make_sequence(seq1, 1, 2 * N), make_sequence(seq2, 0, max(N - 1, 0)),
                        make_function(f), name=f"{seq1}/{seq2}/{f}")


def builtin_spec(name: str, N: int) -> EnsembleSpec:
    s1, s2, f = BUILTIN_SPECS[name]
    return make_spec(s1, s2, f, N)
