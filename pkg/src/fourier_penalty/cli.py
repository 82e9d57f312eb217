"""
Command-line front end: ``fpmaxwell <subcommand> ...``.

Subcommands
-----------
run <case>          one run; writes diagnostics.csv, errors.csv and field_<t>.csv
converge <case>     grid sweep; writes errors.csv with fitted rates
pollution           fixed points-per-wavelength sweep with FD comparators
stability <case>    dense spectrum of the semi-discrete operator; writes eigs.csv
list-cases          registered case ids

A ``--config FILE`` of ``key = value`` lines (CaseSpec field names, optional
``[case]`` header) sets case fields; explicit flags override the file.
``--h`` is in units of dx and ``--eta`` in units of dt.
"""

from __future__ import annotations

import argparse
import ast
import configparser
import csv
import dataclasses
import os
import sys

import numpy as np

from . import cases
from .stability import assemble_operator, check_rk4_containment, spectrum, write_eigs_csv

_FLAG_FIELDS = {"N": "N", "m": "m", "dt_coeff": "dt_coeff", "eta": "eta_dt", "h": "h_dx", "L": "L", "T": "T", "c_f": "c_f"}


def read_config(path: str) -> dict:
    """Parse a ``key = value`` file into CaseSpec overrides."""
    with open(path) as fh:
        text = fh.read()
    if not text.lstrip().startswith("["):
        text = "[case]\n" + text
    cp = configparser.ConfigParser()
    cp.optionxform = str
    cp.read_string(text)
    names = {f.name for f in dataclasses.fields(cases.CaseSpec)}
    out = {}
    for section in cp.sections():
        for key, raw in cp[section].items():
            key = _FLAG_FIELDS.get(key, key)
            if key not in names:
                raise ValueError(f"{path}: unknown field {key!r}")
            try:
                val = ast.literal_eval(raw)
            except (ValueError, SyntaxError):
                val = raw
            out[key] = val
    return out


def _overrides(args) -> dict:
    ov = read_config(args.config) if getattr(args, "config", None) else {}
    for flag, name in _FLAG_FIELDS.items():
        v = getattr(args, flag, None)
        if v is not None:
            ov[name] = v
    return ov


def _spec(args):
    ov = _overrides(args)
    case_id = ov.pop("case_id", None) or args.case
    return cases.get_case(case_id, **ov)


def _add_case_flags(p):
    p.add_argument("--config", help="key = value file of CaseSpec fields")
    p.add_argument("--N", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--dt-coeff", dest="dt_coeff", type=float, help="dt = coeff * dx")
    p.add_argument("--eta", type=float, help="eta in units of dt")
    p.add_argument("--h", type=float, help="h in units of dx")
    p.add_argument("--L", type=float)
    p.add_argument("--T", type=float)
    p.add_argument("--c-f", dest="c_f", type=float)


def _csv_list(text, cast):
    return [cast(x) for x in text.split(",") if x.strip()]


def cmd_list(args) -> int:
    for cid, spec in cases.CASES.items():
        print(f"{cid:20s} {spec.mode:7s} N={spec.N:<5d} {spec.description}")
    return 0


def cmd_run(args) -> int:
    spec = _spec(args)
    res = cases.run_case(spec, out_dir=args.out, snapshot_every=args.snapshot_every)
    print(f"{spec.case_id} N={res.N} m={spec.m} t={res.trajectory.t:.6g} steps={res.trajectory.steps} "
          f"Linf_E={res.err_E:.6e} Linf_H={res.err_H:.6e}")
    return 0


def cmd_converge(args) -> int:
    spec = _spec(args)
    Ns = _csv_list(args.grids, int) if args.grids else None
    rep = cases.convergence_study(spec, Ns=Ns, out_dir=args.out, verbose=True)
    for N, a, b, c in rep.rows():
        print(f"N={N:5d} Linf_E={a:.6e} Linf_H={b:.6e} Linf_u={c:.6e}")
    print(f"rate_E={rep.rate_E:.4f} rate_H={rep.rate_H:.4f} rate_u={rep.rate_u:.4f} residual={rep.residual_u:.4f}")
    if not rep.monotone:
        print("warning: error sequence is not monotone", file=sys.stderr)
    return 0


def cmd_pollution(args) -> int:
    omegas = _csv_list(args.omegas, float)
    schemes = _csv_list(args.schemes, str)
    rows = cases.pollution_study(args.ppwl, omegas, args.m, schemes, verbose=True)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "errors.csv"), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["scheme", "omega0", "N", "Linf_u"])
            for r in rows:
                w.writerow([r[0], repr(r[1]), r[2], repr(r[3])])
    return 0


def cmd_stability(args) -> int:
    spec = _spec(args)
    setup = cases.setup_case(spec)
    op = assemble_operator(setup.problem)
    eigs = spectrum(op)
    _, dt = setup.run.resolve(setup.grid.dx)
    rep = check_rk4_containment(eigs, dt)
    print(f"{spec.case_id} N={setup.grid.N} m={spec.m} unknowns={op.n} max Re(lambda)={np.max(eigs.real):.6e}")
    print(rep.summary())
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        write_eigs_csv(os.path.join(args.out, "eigs.csv"), eigs, rep)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fpmaxwell", description="Active Fourier penalty Maxwell solver")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("list-cases", help="list registered cases")
    s.set_defaults(func=cmd_list)

    s = sub.add_parser("run", help="run one case")
    s.add_argument("case")
    _add_case_flags(s)
    s.add_argument("--out", default=None, help="output directory")
    s.add_argument("--snapshot-every", type=int, default=0)
    s.set_defaults(func=cmd_run)

    s = sub.add_parser("converge", help="grid convergence study")
    s.add_argument("case")
    _add_case_flags(s)
    s.add_argument("--grids", help="comma-separated grid sizes")
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_converge)

    s = sub.add_parser("pollution", help="fixed-ppwl dispersion sweep")
    s.add_argument("--ppwl", type=float, default=20)
    s.add_argument("--omegas", default="10,20,40,80")
    s.add_argument("--m", type=int, default=1)
    s.add_argument("--schemes", default="spectral,fd2,fd4")
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_pollution)

    s = sub.add_parser("stability", help="operator spectrum and RK4 containment")
    s.add_argument("case")
    _add_case_flags(s)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_stability)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
