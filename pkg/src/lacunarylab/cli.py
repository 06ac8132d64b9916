"""Command-line entry point.

Every command writes its artifacts plus a ``manifest.json`` into the output
directory (``--out``, else ``$LACUNARYLAB_OUT``, else ``./runs``).  The manifest
holds the exact configuration, so ``lacunarylab replay <manifest>`` regenerates
byte-identical files.  Exit codes: 0 pass, 1 fail, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .ensemble import ks_to_semicircle, mc_mean_esd, mc_mean_moments
from .oracle import (BudgetExceeded, counterexample_fourth_moment, exact_mean_trace)
from .registry import FUNCTIONS, SEQUENCES, make_function, make_sequence, make_spec
from .sequences import (SequenceError, check_hadamard, condition251_sum, diophantine_counts,
                        superlacunary_bound)
from .sumslab import (SumExperiment, cdf_table, erdos_fortet_experiment, ks_to_best_gaussian,
                      ks_to_normal, run_sums)

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
ENV_OUT = "LACUNARYLAB_OUT"
# settings that must not influence output bytes
_VOLATILE = {"out", "workers", "func", "manifest"}


class UsageError(Exception):
    pass


def _int_list(text: str) -> list:
    try:
        return [int(t) for t in str(text).split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _floors(text: str) -> dict:
    out = {}
    for item in str(text).split(","):
        if item.strip():
            k, v = item.split(":")
            out[int(k)] = float(v)
    return out


def _write(out: Path, name: str, text: str) -> Path:
    path = out / name
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write_manifest(out: Path, command: str, args: argparse.Namespace):
    config = {k: v for k, v in sorted(vars(args).items()) if k not in _VOLATILE}
    _write(out, "manifest.json", _dump_json({
        "command": command, "config": config, "seed": getattr(args, "seed", None),
        "version": __version__,
    }))


def _positive(name, value):
    if value is None or value < 1:
        raise UsageError(f"--{name} must be a positive integer")


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


# ---------------------------------------------------------------- commands

def cmd_esd(args, out: Path) -> int:
    _positive("n", args.n)
    _positive("samples", args.samples)
    spec = make_spec(args.seq1, args.seq2, args.f, args.n)
    hist = mc_mean_esd(spec, args.samples, args.bins, args.R, args.seed, args.workers)
    report = mc_mean_moments(spec, args.ks, max(args.samples, 2), args.seed, args.workers,
                             k_sigma=args.k_sigma, abs_floor=_floors(args.floors))
    ks = ks_to_semicircle(hist)
    _write(out, "esd_hist.csv", hist.to_csv())
    _write(out, "moments.csv", report.to_csv())
    _write(out, "report.json", _dump_json({
        "spec_digest": spec.digest(), "master_seed": args.seed, "samples": args.samples,
        "results": {"moments": report.to_dict()["rows"], "ks_to_semicircle": ks,
                    "underflow": hist.underflow, "overflow": hist.overflow,
                    "compliant": spec.compliant},
    }))
    for r in report.rows:
        print(f"K={r.K}: {r.estimate:.5f} +- {r.std_error:.5f} (ref {r.reference:g}) "
              f"{'pass' if r.passed else 'FAIL'}")
    print(f"KS to semicircle: {ks:.5f}")
    return EXIT_PASS if report.passed else EXIT_FAIL


def cmd_moments_exact(args, out: Path) -> int:
    records = []
    for N in args.n:
        _positive("n", N)
        spec = make_spec(args.seq1, args.seq2, args.f, N)
        for K in args.k:
            res = exact_mean_trace(spec, K, budget=args.budget, classify=(K == 4 and args.classify))
            print(f"N={N} K={K}: {res.value!r}  ({res.wall_time:.2f}s)", file=sys.stderr)
            records.append(res.to_record(with_time=False))
    _write(out, "moments_exact.json", _dump_json({"seq1": args.seq1, "seq2": args.seq2,
                                                  "f": args.f, "records": records}))
    for rec in records:
        print(f"N={rec['N']} K={rec['K']} value={rec['value']!r}")
    return EXIT_PASS


def cmd_seq_check(args, out: Path) -> int:
    _positive("n", args.n)
    _positive("g", args.g)
    seq = make_sequence(args.seq, 1, max(args.n, 2))
    q = check_hadamard(seq)
    rep = diophantine_counts(seq, args.n, args.g)
    _write(out, "sequence.txt", seq.dumps())
    result = {"seq": args.seq, "N": args.n, "G": args.g,
              "certified_q": f"{q.numerator}/{q.denominator}",
              "L_star_0": rep.L_star(0), "L_0": rep.L(0), "L_sup": rep.L_sup}
    _write(out, "seq_check.json", _dump_json(result))
    print(f"certified q = {q}")
    print(f"L*({args.n},{args.g},0) = {rep.L_star(0)}")
    print(f"L({args.n},{args.g}) = {rep.L_sup}")
    return EXIT_PASS


def cmd_diophantine(args, out: Path) -> int:
    _positive("n", args.n)
    _positive("g", args.g)
    seq = make_sequence(args.seq, 1, max(args.n, 2))
    rep = diophantine_counts(seq, args.n, args.g)
    rows = [(nu, rep.L(nu), rep.L_star(nu)) for nu in sorted(rep.nu_table)]
    _write(out, "diophantine.csv", _csv(rows, ["nu", "L", "L_star"]))
    print(f"achieved nu: {len(rows)}; L(N,G) = {rep.L_sup}; L*(N,G,0) = {rep.L_star(0)}")
    return EXIT_PASS


def cmd_condition251(args, out: Path) -> int:
    rows = []
    for N in args.n:
        _positive("n", N)
        seq = make_sequence(args.seq, 1, 2 * N)
        val = condition251_sum(seq, N, args.k, args.c, args.eps)
        try:
            bound = superlacunary_bound(seq, N)
        except ValueError:
            bound = float("nan")
        rows.append((N, val, val / N, bound))
        print(f"N={N}: sum={val:.6f} sum/N={val / N:.6f} majorant={bound:.6f}")
    _write(out, "condition251.csv", _csv(rows, ["N", "sum", "sum_over_N", "majorant"]))
    return EXIT_PASS


def cmd_counterexample(args, out: Path) -> int:
    rows = []
    ok = True
    for N in args.n:
        _positive("n", N)
        spec = make_spec("pow2", "pow2", "ef2d", N)
        ex = exact_mean_trace(spec, 4, budget=args.budget, classify=True)
        disp = counterexample_fourth_moment(N)
        k2 = exact_mean_trace(spec, 2).value
        gap = ex.value - disp["value"]
        rows.append((N, k2, ex.value, ex.paired, ex.overlap, ex.dropped, disp["value"],
                     disp["diagonal"], disp["off_diagonal"], gap))
        ok &= ex.value > 2 + args.margin
        print(f"N={N}: E[Tr X^4/N]={ex.value!r}  display={disp['value']!r}  "
              f"dropped={ex.dropped!r}  gap={gap!r}")
    header = ["N", "k2_exact", "k4_exact", "paired", "overlap", "dropped", "display",
              "display_diagonal", "display_off_diagonal", "exact_minus_display"]
    _write(out, "counterexample.csv", _csv(rows, header))
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_sums(args, out: Path) -> int:
    _positive("n", args.n)
    _positive("samples", args.samples)
    ts = np.round(np.arange(-4.0, 4.0 + 1e-9, 0.05), 10)
    if args.erdos_fortet:
        res = erdos_fortet_experiment(args.n, args.samples, args.seed, args.workers)
        vals = res["values"]
        summary = {k: v for k, v in res.items() if k != "values"}
        summary["mixture_beats_gaussian"] = res["ks_to_mixture"] < res["ks_to_gaussian"]
        passed = summary["mixture_beats_gaussian"]
    else:
        seq = make_sequence(args.seq, 1, args.n)
        exp = SumExperiment(make_function(args.f), seq, args.n, args.samples, args.normalization)
        vals = run_sums(exp, args.seed, args.workers)
        summary = {"N": args.n, "samples": args.samples, "seq": args.seq, "f": args.f,
                   "normalization": args.normalization, "sigma_N": exp.sigma_N(),
                   "ks_to_normal": ks_to_normal(vals), "ks_to_gaussian": ks_to_best_gaussian(vals),
                   "low_power": args.samples <= 10}
        passed = True
    _write(out, "sums_cdf.csv", cdf_table(vals, ts))
    _write(out, "sums.json", _dump_json(summary))
    for k, v in summary.items():
        print(f"{k}: {v}")
    return EXIT_PASS if passed else EXIT_FAIL


COMMANDS = {
    "esd": cmd_esd,
    "moments-exact": cmd_moments_exact,
    "seq-check": cmd_seq_check,
    "diophantine": cmd_diophantine,
    "condition251": cmd_condition251,
    "counterexample": cmd_counterexample,
    "sums": cmd_sums,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lacunarylab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=True):
        sp.add_argument("--out", default=None, help=f"output directory (default ${ENV_OUT} or ./runs)")
        sp.add_argument("--workers", type=int, default=1)
        if seed:
            sp.add_argument("--seed", type=int, default=0)

    seqs = list(SEQUENCES)
    funcs = list(FUNCTIONS)

    sp = sub.add_parser("esd", help="Monte Carlo mean ESD and moments")
    sp.add_argument("--seq1", choices=seqs, default="superlacunary")
    sp.add_argument("--seq2", choices=seqs, default="superlacunary")
    sp.add_argument("--f", choices=funcs, default="cos11")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--samples", type=int, default=200)
    sp.add_argument("--bins", type=int, default=60)
    sp.add_argument("--R", type=float, default=3.0)
    sp.add_argument("--ks", type=_int_list, default=[2, 3, 4, 5, 6])
    sp.add_argument("--k-sigma", type=float, default=4.0)
    sp.add_argument("--floors", default="2:0.03,4:0.15,6:0.6")
    common(sp)

    sp = sub.add_parser("moments-exact", help="exact E[Tr X^K / N] by frequency matching")
    sp.add_argument("--seq1", choices=seqs, default="superlacunary")
    sp.add_argument("--seq2", choices=seqs, default="superlacunary")
    sp.add_argument("--f", choices=funcs, default="cos11")
    sp.add_argument("--n", type=_int_list, required=True)
    sp.add_argument("--k", type=_int_list, default=[2, 3, 4])
    sp.add_argument("--budget", type=int, default=2 ** 28)
    sp.add_argument("--classify", action="store_true")
    common(sp, seed=False)

    for name, helptext in (("seq-check", "gap ratio and L*(N,G,0)"),
                           ("diophantine", "full L(N,G,nu) table")):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--seq", choices=seqs, default="pow2")
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--g", type=int, default=1)
        common(sp, seed=False)

    sp = sub.add_parser("condition251", help="weighted near-coincidence sum")
    sp.add_argument("--seq", choices=seqs, default="superlacunary")
    sp.add_argument("--n", type=_int_list, required=True)
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--c", type=float, default=1.0)
    sp.add_argument("--eps", type=float, default=0.5)
    common(sp, seed=False)

    sp = sub.add_parser("counterexample", help="fourth moment for M_n = 2^n")
    sp.add_argument("--n", type=_int_list, default=[8, 16, 32])
    sp.add_argument("--margin", type=float, default=0.0)
    sp.add_argument("--budget", type=int, default=2 ** 28)
    common(sp, seed=False)

    sp = sub.add_parser("sums", help="1-D lacunary sums vs Gaussian / Erdos-Fortet mixture")
    sp.add_argument("--erdos-fortet", action="store_true")
    sp.add_argument("--seq", choices=seqs, default="superlacunary")
    sp.add_argument("--f", choices=funcs, default="ef1d")
    sp.add_argument("--normalization", choices=["sigma", "sqrt"], default="sigma")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--samples", type=int, default=2000)
    common(sp)

    sp = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    sp.add_argument("manifest")
    sp.add_argument("--out", default=None)
    sp.add_argument("--workers", type=int, default=1)
    return p


def _run(command: str, args: argparse.Namespace, out: Path) -> int:
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    code = COMMANDS[command](args, out)
    _write_manifest(out, command, args)
    print(f"wrote {out} in {time.perf_counter() - t0:.1f}s", file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "replay":
            manifest = json.loads(Path(args.manifest).read_text())
            out = Path(args.out) if args.out else Path(args.manifest).parent
            ns = argparse.Namespace(**manifest["config"], workers=args.workers)
            return _run(manifest["command"], ns, out)
        out = Path(args.out or os.environ.get(ENV_OUT, "runs"))
        return _run(args.command, args, out)
    except (UsageError, SequenceError, KeyError, BudgetExceeded, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
