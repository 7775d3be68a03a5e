"""Command-line front end.

Subcommands: eval, chain, measure, hankel, verify. Data goes to stdout (or
``--out``), diagnostics to stderr. ``QSW_FORMAT`` and ``QSW_EPS`` set the
default output format and series tolerance; flags override both.

Exit status: 0 success, 2 usage error, 3 numeric range exhausted,
4 verification failure, 5 other numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import chains, gsw, modified, spectrum
from .qseries import LogReal, QParams
from .verify import run_suite

SCHEMA = 1
EXIT_OK, EXIT_USAGE, EXIT_RANGE, EXIT_VERIFY, EXIT_NUMERIC = 0, 2, 3, 4, 5

FAMILIES = ("gsw-monic", "gsw-orthonormal", "modified", "dfunction", "density")

CSV_HEADERS = {
    "eval": ["quantity", "index", "value"],
    "chain": ["n", "beta", "m", "M", "h"],
    "measure": ["n", "tau", "rho", "log10_rho"],
    "hankel": ["n", "D", "sign", "log10_D", "D_modified", "sign_modified", "log10_D_modified"],
    "verify": ["module", "check", "status", "observed", "bound"],
}

EPILOG = """CSV headers (fixed per subcommand):
  eval     quantity,index,value   (quantity is 'coeff' with index k, or 'eval' with index x)
  chain    n,beta,m,M,h
  measure  n,tau,rho,log10_rho
  hankel   n,D,sign,log10_D,D_modified,sign_modified,log10_D_modified
  verify   module,check,status,observed,bound
JSON output always carries "schema": 1.
exit status: 0 ok, 2 usage, 3 range exhausted, 4 verification failed, 5 numerical failure"""


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    params: QParams
    fmt: str
    out: str | None
    n: int | None = None
    count: int | None = None
    depth: int | None = None
    k: int = 0
    x: float | None = None
    family: str | None = None
    inject_fault: bool = False


def num(v) -> float | dict:
    """Round to 15 significant digits; non-finite values become an explicit marker."""
    v = float(v)
    if math.isfinite(v):
        return float(f"{v:.15g}")
    if math.isnan(v):
        return {"nan": True}
    return {"overflow": True, "sign": 1 if v > 0 else -1}


def logreal_fields(x: LogReal) -> dict:
    return {"value": num(float(x)), "sign": x.sign, "log10": num(x.log10) if x.sign else None}


def _csv_cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.15g}" if math.isfinite(v) else ("inf" if v > 0 else "-inf") if not math.isnan(v) else "nan"
    if isinstance(v, dict):
        return "overflow" if v.get("overflow") else "nan"
    return "" if v is None else str(v)


# ----------------------------------------------------------------- commands


def cmd_eval(cfg: RunConfig) -> tuple[dict, list[list]]:
    P = cfg.params
    fam = cfg.family
    if fam not in FAMILIES:
        raise UsageError(f"unknown family {fam!r}; choose from {', '.join(FAMILIES)}")
    coeffs: list[float] = []
    value = None
    if fam in ("gsw-monic", "gsw-orthonormal", "modified"):
        if cfg.n is None or cfg.n < 0:
            raise UsageError(f"--n (nonnegative) is required for family {fam}")
        poly = {
            "gsw-monic": gsw.gsw_monic,
            "gsw-orthonormal": gsw.gsw_orthonormal,
            "modified": modified.modified_poly,
        }[fam](P, cfg.n)
        coeffs = [float(c) for c in poly.coeffs]
        if cfg.x is not None:
            value = poly(cfg.x)
    else:
        if cfg.x is None:
            raise UsageError(f"--x is required for family {fam}")
        if fam == "dfunction":
            value = spectrum.dfunction(P, cfg.x)
        else:
            if cfg.x <= 0:
                raise UsageError("density needs --x > 0")
            value = gsw.density(P, cfg.x)
    doc = {"schema": SCHEMA, "family": fam, "p": P.p, "q": P.q, "n": cfg.n, "coeffs": [num(c) for c in coeffs]}
    rows = [["coeff", k, num(c)] for k, c in enumerate(coeffs)]
    if value is not None:
        doc["eval"] = {"x": num(cfg.x), "value": num(value)}
        rows.append(["eval", num(cfg.x), num(value)])
    return doc, rows


def cmd_chain(cfg: RunConfig) -> tuple[dict, list[list]]:
    P = cfg.params
    count = cfg.count if cfg.count is not None else 10
    depth = cfg.depth if cfg.depth is not None else 200
    if count < 1 or depth < 1:
        raise UsageError("--count and --depth must be positive")
    beta = chains.gsw_chain(P, max(count, depth + cfg.k))
    mn, mx, bt = chains.parameter_sequences(P, count + 1)
    table = []
    for n in range(1, count + 1):
        table.append([n, num(beta.beta[n - 1]), num(mn.h[n]), num(mx.h[n]), num(bt.h[n])])
    cf = chains.continued_fraction(beta.tail(cfg.k), depth)
    closed = chains.cf_closed_form(P, cfg.k)
    L, G = chains.lg_series(P, 300)
    doc = {
        "schema": SCHEMA,
        "p": P.p,
        "q": P.q,
        "h0": {"m": num(mn.h[0]), "M": num(mx.h[0]), "h": num(bt.h[0])},
        "table": [dict(zip(CSV_HEADERS["chain"], row)) for row in table],
        "continued_fraction": {
            "k": cfg.k,
            "depth": depth,
            "value": num(cf),
            "closed_form": num(closed),
            "difference": num(cf - closed),
        },
        "series": {"one_plus_L": num(L), "one_plus_G": num(G)},
    }
    return doc, table


def cmd_measure(cfg: RunConfig) -> tuple[dict, list[list]]:
    P = cfg.params
    count = cfg.count if cfg.count is not None else 30
    if count < 1:
        raise UsageError("--count must be positive")
    nu, _ = spectrum.build_measures(P, count)
    b = spectrum.hayman_coefficients(P)
    s = gsw.gsw_moments(P, 7).floats()
    rows = []
    for i, (t, lm) in enumerate(zip(nu.points, nu.log_masses), start=1):
        rows.append([i, num(t), num(math.exp(lm)), num(lm / math.log(10))])
    moments = []
    for m in range(7):
        rec = nu.moment(m)
        moments.append({"m": m, "reconstructed": num(rec), "exact": num(s[m]), "rel_error": num(abs(rec - s[m]) / s[m])})
    doc = {
        "schema": SCHEMA,
        "p": P.p,
        "q": P.q,
        "atoms": [dict(zip(CSV_HEADERS["measure"], r)) for r in rows],
        "atom_at_zero": num(nu.atom_at_zero),
        "hayman": {"b1": num(b[0]), "b2": num(b[1]), "b3": num(b[2]), "b4": num(b[3])},
        "moments": moments,
        "truncation": {
            "atom_count": nu.atom_count,
            "tail_mass_bound": num(nu.tail_mass_bound),
            "total_mass_rel_error": num(nu.reconstruction_error),
        },
    }
    return doc, rows


def cmd_hankel(cfg: RunConfig) -> tuple[dict, list[list]]:
    P = cfg.params
    n_max = cfg.n if cfg.n is not None else 5
    if n_max < 0:
        raise UsageError("--n must be nonnegative")
    rows, entries = [], []
    for n in range(n_max + 1):
        D = gsw.hankel_det(P, n)
        Dm = modified.modified_hankel(P, n)
        f, fm = logreal_fields(D), logreal_fields(Dm)
        rows.append([n, f["value"], f["sign"], f["log10"], fm["value"], fm["sign"], fm["log10"]])
        entries.append({"n": n, "D": f, "D_modified": fm})
    return {"schema": SCHEMA, "p": P.p, "q": P.q, "determinants": entries}, rows


def cmd_verify(cfg: RunConfig) -> tuple[dict, list[list], bool]:
    checks = run_suite(cfg.params, inject_fault=cfg.inject_fault)
    rows = [[c.module, c.name, "pass" if c.passed else "FAIL", num(c.observed), num(c.bound)] for c in checks]
    ok = all(c.passed for c in checks)
    doc = {
        "schema": SCHEMA,
        "p": cfg.params.p,
        "q": cfg.params.q,
        "passed": ok,
        "checks": [dict(zip(CSV_HEADERS["verify"], r)) for r in rows],
    }
    return doc, rows, ok


# ------------------------------------------------------------------ plumbing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=float, default=None, help="parameter p in [0, 1)")
    common.add_argument("--q", type=float, default=None, help="parameter q in (0, 1)")
    common.add_argument("--eps", type=float, default=None, help="series tolerance (env QSW_EPS, default 1e-15)")
    common.add_argument("--format", choices=("json", "csv"), default=None, help="output format (env QSW_FORMAT)")
    common.add_argument("--out", default=None, help="output file (default stdout)")

    parser = argparse.ArgumentParser(
        prog="qsw",
        description="Generalized Stieltjes-Wigert moment problem: polynomials, chains, spectrum.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    kw = dict(parents=[common], epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)

    e = sub.add_parser("eval", help="coefficients or point values", **kw)
    e.add_argument("--family", required=True, help=f"one of {', '.join(FAMILIES)}")
    e.add_argument("--n", type=int, default=None)
    e.add_argument("--x", type=float, default=None)

    c = sub.add_parser("chain", help="chain and parameter sequences, continued fraction", **kw)
    c.add_argument("--count", type=int, default=None)
    c.add_argument("--depth", type=int, default=None)
    c.add_argument("--k", type=int, default=0, help="tail index of the continued fraction")

    m = sub.add_parser("measure", help="zeros, masses and moment reconstruction", **kw)
    m.add_argument("--count", type=int, default=None, help="number of atoms (default 30)")

    h = sub.add_parser("hankel", help="Hankel determinants D_n and modified D~_n", **kw)
    h.add_argument("--n", type=int, default=None)

    v = sub.add_parser("verify", help="run the invariant suite", **kw)
    v.add_argument("--inject-fault", action="store_true", help="corrupt one closed form (harness self-test)")
    return parser


def make_config(ns: argparse.Namespace, env) -> RunConfig:
    default_p, default_q = (0.3, 0.4) if ns.command == "verify" else (0.0, 0.5)
    p = default_p if ns.p is None else ns.p
    q = default_q if ns.q is None else ns.q
    fmt = ns.format or env.get("QSW_FORMAT", "json")
    if fmt not in ("json", "csv"):
        raise UsageError(f"QSW_FORMAT must be json or csv, got {fmt!r}")
    eps = ns.eps if ns.eps is not None else float(env.get("QSW_EPS", 1e-15))
    if not (0 <= p < 1) or not (0 < q < 1):
        raise UsageError(f"invalid parameters p={p}, q={q}: need 0 <= p < 1 and 0 < q < 1")
    if not eps > 0:
        raise UsageError("--eps must be positive")
    return RunConfig(
        command=ns.command,
        params=QParams(p, q, eps),
        fmt=fmt,
        out=ns.out,
        n=getattr(ns, "n", None),
        count=getattr(ns, "count", None),
        depth=getattr(ns, "depth", None),
        k=getattr(ns, "k", 0),
        x=getattr(ns, "x", None),
        family=getattr(ns, "family", None),
        inject_fault=getattr(ns, "inject_fault", False),
    )


def render(cfg: RunConfig, doc: dict, rows: list[list]) -> str:
    if cfg.fmt == "json":
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADERS[cfg.command])
    for r in rows:
        w.writerow([_csv_cell(v) for v in r])
    return buf.getvalue()


def main(argv=None, env=None) -> int:
    env = os.environ if env is None else env
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = make_config(ns, env)
        ok = True
        if cfg.command == "verify":
            doc, rows, ok = cmd_verify(cfg)
        else:
            doc, rows = {"eval": cmd_eval, "chain": cmd_chain, "measure": cmd_measure, "hankel": cmd_hankel}[
                cfg.command
            ](cfg)
    except UsageError as exc:
        print(f"qsw {ns.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except spectrum.RangeExhaustedError as exc:
        print(f"qsw {ns.command}: range exhausted: {exc}", file=sys.stderr)
        return EXIT_RANGE
    except (ArithmeticError, spectrum.BracketError) as exc:
        print(f"qsw {ns.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    text = render(cfg, doc, rows)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if not ok:
        for c in doc["checks"]:
            if c["status"] != "pass":
                print(f"FAIL {c['module']}: {c['check']}: observed {c['observed']} > bound {c['bound']}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
