"""Run orchestration and table emission.

Subcommands: ``solve`` (one transient run), ``converge-h`` (spatial
refinement study), ``converge-dt`` (time-step study at fixed level) and
``stability`` (zero-source energy decay log).  Configuration comes from
defaults, an optional ``key = value`` config file and command-line flags,
in increasing precedence.
"""

from __future__ import annotations

import argparse
import io
import sys

import numpy as np

from .config import CASES, FORMATS, PENALTY_MODES, ProblemConfig
from .errors import ErrorRecord, energy_norm, l2_errors, rate
from .manufactured import get_case
from .timestepper import build_operators, run_backward_euler


class StabilityViolation(RuntimeError):
    pass


def _fmt(x: float) -> str:
    return f"{x:.6e}"


def _fmt_rate(r) -> str:
    return "" if r is None else f"{r:.2f}"


def _emit_table(header: list[str], rows: list[list[str]], fmt: str, out) -> None:
    if fmt == "csv":
        out.write(",".join(header) + "\n")
        for row in rows:
            out.write(",".join(row) + "\n")
    else:
        cells = [h or "-" for h in header]
        out.write("| " + " | ".join(cells) + " |\n")
        out.write("|" + "|".join(["---"] * len(header)) + "|\n")
        for row in rows:
            out.write("| " + " | ".join(c if c else "-" for c in row) + " |\n")


def _write_output(text: str, config: ProblemConfig) -> None:
    if config.out:
        with open(config.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _transient_errors(config: ProblemConfig, case) -> ErrorRecord:
    """One transient run with accumulated energy error."""
    ops = build_operators(config)
    acc = [0.0]

    def on_step(k, t, u):
        if k == 0:
            return
        e = energy_norm(ops.mesh, ops.edges, ops.space, ops.params, u_h=u, exact=case, t=t)
        acc[0] += config.dt * e * e

    res = run_backward_euler(config, case.f, case.g, case.u0, on_step=on_step, ops=ops)
    dom, g1, _ = l2_errors(
        ops.mesh, ops.edges, ops.space, config.lam, res.coeffs, case, t=config.t_final
    )
    return ErrorRecord(
        h=ops.mesh.h, dt=config.dt, l2_domain=dom, l2_gamma1=g1, energy=float(np.sqrt(acc[0]))
    )


def _attach_rates(records: list[ErrorRecord], factor: float = 2.0) -> None:
    for prev, rec in zip(records, records[1:]):
        rec.rate_l2_domain = rate(prev.l2_domain, rec.l2_domain, factor)
        rec.rate_l2_gamma1 = rate(prev.l2_gamma1, rec.l2_gamma1, factor)
        if prev.energy > 0 and rec.energy > 0:
            rec.rate_energy = rate(prev.energy, rec.energy, factor)


CONVERGE_H_HEADER = [
    "h",
    "l2_domain",
    "rate_l2_domain",
    "l2_gamma1",
    "rate_l2_gamma1",
    "energy",
    "rate_energy",
]


def run_converge_h(config: ProblemConfig) -> list[ErrorRecord]:
    """Transient convergence study over a level range; rows in Table order
    (h, L2 domain error, rate, L2 boundary error, rate, energy error, rate)."""
    case = get_case(config.case)
    levels = config.levels or (2, 3, 4, 5)
    records = [_transient_errors(config.with_(level=lv, levels=None), case) for lv in levels]
    _attach_rates(records)
    buf = io.StringIO()
    rows = [
        [
            _fmt(r.h),
            _fmt(r.l2_domain),
            _fmt_rate(r.rate_l2_domain),
            _fmt(r.l2_gamma1),
            _fmt_rate(r.rate_l2_gamma1),
            _fmt(r.energy),
            _fmt_rate(r.rate_energy),
        ]
        for r in records
    ]
    _emit_table(CONVERGE_H_HEADER, rows, config.fmt, buf)
    _write_output(buf.getvalue(), config)
    return records


CONVERGE_DT_HEADER = ["dt", "l2_domain", "rate_l2_domain", "l2_gamma1", "rate_l2_gamma1"]


def run_converge_dt(config: ProblemConfig) -> list[ErrorRecord]:
    """Halving-dt study at a fixed spatial level; operators are assembled
    once and reused across the dt sequence."""
    case = get_case(config.case)
    ops = build_operators(config)
    records = []
    for j in range(config.dt_steps):
        dt = config.dt * 0.5**j
        cfg = config.with_(dt=dt)
        res = run_backward_euler(cfg, case.f, case.g, case.u0, ops=ops)
        dom, g1, _ = l2_errors(
            ops.mesh, ops.edges, ops.space, config.lam, res.coeffs, case, t=config.t_final
        )
        records.append(ErrorRecord(h=ops.mesh.h, dt=dt, l2_domain=dom, l2_gamma1=g1, energy=0.0))
    _attach_rates(records)
    buf = io.StringIO()
    rows = [
        [
            _fmt(r.dt),
            _fmt(r.l2_domain),
            _fmt_rate(r.rate_l2_domain),
            _fmt(r.l2_gamma1),
            _fmt_rate(r.rate_l2_gamma1),
        ]
        for r in records
    ]
    _emit_table(CONVERGE_DT_HEADER, rows, config.fmt, buf)
    _write_output(buf.getvalue(), config)
    return records


def run_stability(config: ProblemConfig) -> list[tuple[int, float, float]]:
    """Zero-source run; logs k, t_k, the lambda-weighted L2 norm, and checks
    the step-wise energy decay."""
    case = get_case(config.case)
    res = run_backward_euler(config, None, None, case.u0)
    norms = res.l2lambda_norms
    rows = [(k, k * config.dt, norms[k]) for k in range(len(norms))]
    slack = 1e-12 * max(norms[0], 1.0)
    for k in range(1, len(norms)):
        if norms[k] > norms[k - 1] + slack:
            raise StabilityViolation(
                f"energy increased at step {k}: {norms[k - 1]:.15e} -> {norms[k]:.15e}"
            )
    buf = io.StringIO()
    _emit_table(
        ["k", "t", "l2_lambda_norm"],
        [[str(k), _fmt(t), _fmt(n)] for k, t, n in rows],
        config.fmt,
        buf,
    )
    _write_output(buf.getvalue(), config)
    return rows


def run_solve(config: ProblemConfig) -> ErrorRecord:
    """Single transient run; emits one row of final errors."""
    case = get_case(config.case)
    rec = _transient_errors(config, case)
    buf = io.StringIO()
    _emit_table(
        ["h", "dt", "l2_domain", "l2_gamma1", "energy"],
        [[_fmt(rec.h), _fmt(rec.dt), _fmt(rec.l2_domain), _fmt(rec.l2_gamma1), _fmt(rec.energy)]],
        config.fmt,
        buf,
    )
    _write_output(buf.getvalue(), config)
    return rec


# ---------------------------------------------------------------------------
# argument and config-file handling


def parse_levels(text: str) -> tuple[int, ...]:
    if ".." in text:
        lo, hi = text.split("..")
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(tok) for tok in text.replace(",", " ").split())


def read_config_file(path: str) -> dict:
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, _, val = line.partition("=")
            values[key.strip().replace("-", "_")] = val.strip()
    return values


_FIELD_PARSERS = {
    "case": str,
    "mode": str,
    "p": int,
    "level": int,
    "levels": parse_levels,
    "gamma": float,
    "alpha": float,
    "beta": float,
    "lam": float,
    "dt": float,
    "t_final": float,
    "penalty_mode": str,
    "bc_mode": str,
    "dt_steps": int,
    "out": str,
    "fmt": str,
}

_MODE_OF_COMMAND = {
    "solve": "transient",
    "converge-h": "converge_h",
    "converge-dt": "converge_dt",
    "stability": "stability",
}


def _add_common_flags(sub):
    sub.add_argument("--config", help="key = value configuration file")
    sub.add_argument("--case", choices=CASES)
    sub.add_argument("--p", type=int)
    sub.add_argument("--level", type=int)
    sub.add_argument("--levels", type=parse_levels, help="range like 2..5 or list 2,3,4")
    sub.add_argument("--gamma", type=float)
    sub.add_argument("--alpha", type=float)
    sub.add_argument("--beta", type=float)
    sub.add_argument("--lambda", dest="lam", type=float)
    sub.add_argument("--dt", type=float)
    sub.add_argument("--t-final", dest="t_final", type=float)
    sub.add_argument("--penalty-mode", dest="penalty_mode", choices=PENALTY_MODES)
    sub.add_argument("--dt-steps", dest="dt_steps", type=int)
    sub.add_argument("--out")
    sub.add_argument("--format", dest="fmt", choices=FORMATS)


def build_config(args: argparse.Namespace) -> ProblemConfig:
    values: dict = {}
    if args.config:
        raw = read_config_file(args.config)
        for key, text in raw.items():
            if key not in _FIELD_PARSERS:
                raise ValueError(f"unknown config key {key!r}")
            values[key] = _FIELD_PARSERS[key](text)
    for key in _FIELD_PARSERS:
        flag_val = getattr(args, key, None)
        if flag_val is not None:
            values[key] = flag_val
    values["mode"] = _MODE_OF_COMMAND[args.command]
    case = values.get("case", "example1")
    values.setdefault("bc_mode", get_case(case).bc_mode)
    return ProblemConfig(**values).validate()


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="dgdyn", description=__doc__)
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("solve", "single transient run, report final errors"),
        ("converge-h", "spatial convergence study over a level range"),
        ("converge-dt", "temporal convergence study at a fixed level"),
        ("stability", "zero-source energy decay log"),
    ):
        sub = subparsers.add_parser(name, help=help_text)
        _add_common_flags(sub)
    args = parser.parse_args(argv)
    config = build_config(args)
    runner = {
        "solve": run_solve,
        "converge-h": run_converge_h,
        "converge-dt": run_converge_dt,
        "stability": run_stability,
    }[args.command]
    runner(config)
    return 0


if __name__ == "__main__":
    sys.exit(main())
