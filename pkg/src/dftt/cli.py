"""Command-line entry point: ``dftt <subcommand> ...``.

Exit status is 0 on success, 1 for input/usage errors and 2 for domain or
internal errors.  Randomized subcommands require ``--seed``; identical
arguments give byte-identical output for any ``--workers``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from dftt import __version__, experiments, simplex, theory
from dftt.bitseq import read_file, signed
from dftt.dfttest import ThresholdRule, VarianceModel, run_test
from dftt.errors import DomainError, InputError
from dftt.spectrum import dft_fast, parseval_energy

TOOL = "dftt"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.format_usage()}{self.prog}: error: {message}\n")


def _u32(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v <= 0xFFFFFFFF:
        raise argparse.ArgumentTypeError(f"{text} is not an unsigned 32-bit value")
    return v


def _positive(text: str) -> int:
    v = int(text, 0)
    if v < 1:
        raise argparse.ArgumentTypeError(f"{text} must be a positive integer")
    return v


# ---------------------------------------------------------------------------
# Report rendering
# ---------------------------------------------------------------------------

class Report:
    """Header metadata plus a table; rendered as JSON, CSV or plain text."""

    def __init__(self, subcommand: str, config: dict, summary: dict, columns=None, rows=None):
        self.meta = {"tool": TOOL, "version": __version__, "subcommand": subcommand, "config": config}
        self.summary = summary
        self.columns = columns or []
        self.rows = rows or []

    def _table_is_summary(self) -> bool:
        return len(self.rows) == 1 and all(
            self.summary.get(c, object()) == v for c, v in zip(self.columns, self.rows[0])
        )

    def json(self) -> str:
        obj = dict(self.meta)
        obj.update(self.summary)
        if self.columns and not self._table_is_summary():
            obj["table"] = [dict(zip(self.columns, r)) for r in self.rows]
        return json.dumps(obj, indent=2, default=_jsonable) + "\n"

    def csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# {TOOL} {__version__} {self.meta['subcommand']}\n")
        buf.write(f"# config: {json.dumps(self.meta['config'], default=_jsonable)}\n")
        for k, v in self.summary.items():
            buf.write(f"# {k}: {json.dumps(v, default=_jsonable)}\n")
        w = csv.writer(buf, lineterminator="\n")
        if self.columns:
            w.writerow(self.columns)
            w.writerows([[_cell(c) for c in r] for r in self.rows])
        return buf.getvalue()

    def plain(self) -> str:
        lines = [f"{TOOL} {__version__} {self.meta['subcommand']}"]
        lines += [f"config.{k}: {v}" for k, v in self.meta["config"].items()]
        lines += [f"{k}: {_cell(v)}" for k, v in self.summary.items()]
        if self.columns and not self._table_is_summary():
            lines.append("  ".join(self.columns))
            lines += ["  ".join(_cell(c) for c in r) for r in self.rows]
        return "\n".join(lines) + "\n"


def _jsonable(obj):
    if hasattr(obj, "tolist"):
        return obj.tolist()
    if isinstance(obj, ThresholdRule):
        return obj.code
    if isinstance(obj, VarianceModel):
        return obj.value
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _cell(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else str(v)
    return str(v)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _load(args):
    return read_file(args.input, args.format, args.n)


def cmd_test(args) -> Report:
    seq = _load(args)
    rule = ThresholdRule(args.threshold)
    model = VarianceModel(args.model)
    out = run_test(seq, rule, model).to_dict()
    cfg = {"input": args.input, "format": args.format, "threshold": rule, "model": model}
    return Report("test", cfg, out, list(out), [list(out.values())])


def cmd_spectrum(args) -> Report:
    seq = _load(args)
    spec = dft_fast(signed(seq))
    mags = spec.full_index()
    summary = {"n": seq.n, "parseval_energy": parseval_energy(spec)}
    cfg = {"input": args.input, "format": args.format}
    return Report("spectrum", cfg, summary, ["j", "magnitude"], [[j, float(v)] for j, v in enumerate(mags)])


def _theory_row(m: int) -> list:
    q = theory.quantities(theory.TheoryParams.log005(m))
    return [m, q.a, q.vF, q.corrFF, q.varN1]


def cmd_theory(args) -> Report:
    cols = ["m", "a", "vF", "corr", "varN1"]
    if args.m is not None:
        row = _theory_row(args.m)
        return Report("theory", {"m": args.m}, dict(zip(cols, row)), cols, [row])
    parts = args.m_grid.split(":")
    if len(parts) not in (3, 4):
        raise InputError(f"--m-grid expects start:stop:log|lin[:points], got {args.m_grid!r}")
    try:
        start, stop = int(float(parts[0])), int(float(parts[1]))
        points = int(parts[3]) if len(parts) == 4 else None
    except ValueError as exc:
        raise InputError(f"bad --m-grid {args.m_grid!r}") from exc
    grid = theory.m_grid(start, stop, parts[2], points)
    summary = {"limit_a": theory.limit_a(), "limit_m": theory.LIMIT_M}
    return Report("theory", {"m_grid": args.m_grid}, summary, cols, [_theory_row(m) for m in grid])


def cmd_simplex(args) -> Report:
    params = theory.TheoryParams.log005(args.m) if args.t2 is None else theory.TheoryParams(args.m, args.t2)
    st = simplex.indicator_stats(args.m, params.t2, args.samples, args.seed, args.batches, args.workers)
    closed = {
        "mean_F": 1.0 - theory.survival(params.t2, args.m),
        "var_F": theory.indicator_variance(params),
        "corr_FF": theory.indicator_correlation(params),
        "var_N1": theory.var_n1(params),
    }
    rows = []
    for name, est in zip(closed, (st.mean, st.variance, st.correlation, st.var_n)):
        z = (est.estimate - closed[name]) / est.stderr if est.stderr else math.nan
        rows.append([name, est.estimate, est.stderr, closed[name], z])
    cfg = {"m": args.m, "t2": params.t2, "samples": args.samples, "batches": args.batches, "seed": args.seed}
    return Report("simplex", cfg, {"seed": args.seed}, ["quantity", "empirical", "stderr", "closed_form", "z"], rows)


def _mc_config(args) -> experiments.McConfig:
    return experiments.McConfig(n=args.n, n_sequences=args.sequences, master_seed=args.seed, batches=args.batches)


def _mc_report(name: str, rep: experiments.McReport, extra_cfg: dict) -> Report:
    cfg = {**vars(rep.config), **extra_cfg}
    summary = {
        "seed": rep.config.master_seed,
        "quantity": rep.quantity,
        "estimate": rep.estimate,
        "stderr": rep.stderr,
        "reference": rep.reference,
        "z_score": rep.z_score,
        "warnings": rep.warnings,
    }
    rows = [[f"batch_{k + 1}", v, "", ""] for k, v in enumerate(rep.per_batch)]
    rows.append(["total", rep.estimate, rep.stderr, "" if rep.reference is None else rep.reference])
    return Report(name, cfg, summary, ["row", "value", "stderr", "reference"], rows)


def cmd_mc_variance(args) -> Report:
    rep = experiments.experiment_variance(_mc_config(args), args.source, args.workers)
    return _mc_report("mc-variance", rep, {"source": args.source})


def cmd_mc_correlation(args) -> Report:
    rep = experiments.experiment_correlation(_mc_config(args), args.i, args.j, args.workers)
    return _mc_report("mc-correlation", rep, {"i": args.i, "j": args.j})


def cmd_exhaustive(args) -> Report:
    res = experiments.exhaustive_moments(args.n)
    summary = {k: v for k, v in res.to_dict().items() if k not in ("mean_energy", "var_energy")}
    rows = [[j, e, v] for j, (e, v) in enumerate(zip(res.mean_energy, res.var_energy))]
    return Report("exhaustive", {"n": args.n, "threshold": "log005"}, summary, ["j", "mean_energy", "var_energy"], rows)


def cmd_normality(args) -> Report:
    cfg = _mc_config(args)
    rep = experiments.normality_check(cfg, args.R, args.workers)
    labels = [f"{k}{r}" for k, r in rep.coefficients]
    rows = []
    for idx, lab in enumerate(labels):
        rows.append(
            [lab, rep.means[idx], rep.variances[idx], rep.excess_kurtoses[idx], rep.ks_statistics[idx]]
            + rep.correlations[idx]
        )
    summary = {"seed": cfg.master_seed, "max_abs_correlation": rep.max_abs_offdiag_correlation()}
    cols = ["coefficient", "mean", "variance", "excess_kurtosis", "ks"] + [f"corr_{lab}" for lab in labels]
    return Report("normality", {**vars(cfg), "R": args.R}, summary, cols, rows)


def cmd_lemma_a1(args) -> Report:
    res = experiments.lemma_a1_check(args.x_max, args.c, args.grid).to_dict()
    return Report("lemma-a1", {"x_max": args.x_max, "c": args.c, "grid": args.grid}, res, list(res), [list(res.values())])


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_output(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--json", dest="fmt", action="store_const", const="json")
    g.add_argument("--csv", dest="fmt", action="store_const", const="csv")
    g.add_argument("--plain", dest="fmt", action="store_const", const="plain")
    p.set_defaults(fmt="plain")


def _add_input(p):
    p.add_argument("--input", required=True, help="sequence file")
    p.add_argument("--format", choices=["ascii", "packed"], required=True)
    p.add_argument("--n", type=_positive, help="bit count for packed input (default: whole file)")


def _add_mc(p, n, sequences, batches=10):
    p.add_argument("--n", type=_positive, default=n, help=f"bits per sequence (default {n})")
    p.add_argument("--sequences", type=_positive, default=sequences)
    p.add_argument("--batches", type=_positive, default=batches)
    p.add_argument("--seed", type=_u32, required=True)
    p.add_argument("--workers", type=_positive, default=1)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog=TOOL, description="DFT spectral randomness test and its variance theory")
    ap.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("test", help="run the spectral test on one sequence")
    _add_input(p)
    p.add_argument("--threshold", choices=[r.code for r in ThresholdRule], default="log005")
    p.add_argument("--model", choices=[m.value for m in VarianceModel], default="limit")
    _add_output(p)
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("spectrum", help="emit |f_j| for j = 0 .. floor(n/2)")
    _add_input(p)
    _add_output(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("theory", help="closed-form a, V[F], C[F_i,F_j], V[N1]")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--m", type=_positive)
    g.add_argument("--m-grid", help="start:stop:log|lin[:points], e.g. 10:1000000:log")
    _add_output(p)
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("simplex", help="simplex sampler vs closed forms")
    p.add_argument("--m", type=_positive, required=True)
    p.add_argument("--samples", type=_positive, default=100_000)
    p.add_argument("--batches", type=_positive, default=20)
    p.add_argument("--t2", type=float, help="squared threshold (default -2m ln 0.05)")
    p.add_argument("--seed", type=_u32, required=True)
    p.add_argument("--workers", type=_positive, default=1)
    _add_output(p)
    p.set_defaults(func=cmd_simplex)

    p = sub.add_parser("mc-variance", help="Monte Carlo estimate of the divisor a")
    _add_mc(p, 2**13, 200_000)
    p.add_argument("--source", choices=["dft", "simplex"], default="dft")
    _add_output(p)
    p.set_defaults(func=cmd_mc_variance)

    p = sub.add_parser("mc-correlation", help="Monte Carlo estimate of C[F_i, F_j]")
    _add_mc(p, 2**13, 100_000)
    p.add_argument("--i", type=_positive, default=1)
    p.add_argument("--j", type=_positive, default=2)
    _add_output(p)
    p.set_defaults(func=cmd_mc_correlation)

    p = sub.add_parser("exhaustive", help="exact moments over all 2^n sequences")
    p.add_argument("--n", type=int, required=True)
    _add_output(p)
    p.set_defaults(func=cmd_exhaustive)

    p = sub.add_parser("normality", help="normality of normalized sine/cosine coefficients")
    _add_mc(p, 4096, 100_000)
    p.add_argument("--R", type=_positive, default=3)
    _add_output(p)
    p.set_defaults(func=cmd_normality)

    p = sub.add_parser("lemma-a1", help="bound |log cos x + x^2/2| < c x^4 on a grid")
    p.add_argument("--x-max", type=float, default=0.5)
    p.add_argument("--c", type=float, default=0.1)
    p.add_argument("--grid", type=_positive, default=10_000)
    _add_output(p)
    p.set_defaults(func=cmd_lemma_a1)
    return ap


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        report = args.func(args)
    except _UsageError as exc:
        stderr.write(str(exc))
        return 1
    except InputError as exc:
        stderr.write(f"{TOOL}: input error: {exc}\n")
        return 1
    except DomainError as exc:
        stderr.write(f"{TOOL}: domain error: {exc}\n")
        return 2
    except Exception as exc:  # noqa: BLE001
        stderr.write(f"{TOOL}: internal error: {type(exc).__name__}: {exc}\n")
        return 2
    stdout.write(getattr(report, args.fmt)())
    return 0


if __name__ == "__main__":
    sys.exit(main())
