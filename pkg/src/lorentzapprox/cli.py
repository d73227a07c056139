"""Command line front end.

Every command builds a report: a header (tool, version, schema, config and
its hash) and a list of rows, written as an aligned table, TSV or JSON.
The exit status is 1 when a checked property is refuted and 2 on errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from . import norms as _norms
from .errors import LorentzApproxError
from .fspace.continuity import continuity_experiment, property_s_probe, two_point
from .fspace.grid import GridFunction, GridSpace
from .fspace.norms import FNormSpec, fnorm
from .fspace.projection import (ConstraintClass, Interval, metric_projection_set,
                                minimizing_sequence_probe)
from .norms import lorentz_norm
from .presets import PRESETS, get
from .projection import projection_interval, strong_unicity_estimate
from .selection import (admits_continuous_selection, build_witnesses,
                        oscillation_subsequence, search_certificate, verify_chebyshev_certificate,
                        verify_separation)
from .seq import Seq
from .weights import Weight

SCHEMA = 1


# -- reports --------------------------------------------------------------------
def _plain(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (list, tuple)):
        return [_plain(u) for u in v]
    if isinstance(v, dict):
        return {k: _plain(u) for k, u in v.items()}
    return v


def make_report(command: str, config: dict, rows: list[dict], ok: bool, **extra) -> dict:
    cfg = _plain(config)
    digest = hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()[:16]
    rep = {"tool": "lorentzapprox", "version": __version__, "schema": SCHEMA,
           "command": command, "config": cfg, "config_hash": digest,
           "rows": _plain(rows), "ok": bool(ok)}
    rep.update(_plain(extra))
    return rep


def _cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.10g}"
    if isinstance(v, (list, dict)):
        return json.dumps(v)
    return str(v)


def render(rep: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rep, indent=2, sort_keys=True) + "\n"
    rows = rep["rows"]
    cols: list[str] = []
    for r in rows:
        cols.extend(k for k in r if k not in cols)
    head = f"# lorentzapprox {rep['version']} {rep['command']} config={rep['config_hash']}"
    if fmt == "tsv":
        lines = [head, "\t".join(cols)]
        lines += ["\t".join(_cell(r.get(c, "")) for c in cols) for r in rows]
        return "\n".join(lines) + "\n"
    cells = [[_cell(r.get(c, "")) for c in cols] for r in rows]
    width = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(cols)]
    fmt_row = lambda vals: "  ".join(v.ljust(n) for v, n in zip(vals, width)).rstrip()
    lines = [head, fmt_row(cols), fmt_row(["-" * n for n in width])]
    lines += [fmt_row(r) for r in cells]
    lines.append(f"# {'ok' if rep['ok'] else 'REFUTED'}")
    return "\n".join(lines) + "\n"


# -- inputs ---------------------------------------------------------------------
def _load_json(text: str | None):
    if text is None:
        return None
    s = text.strip()
    if s[:1] in "{[" or s[:1].isdigit() or s[:1] == "-":
        return json.loads(s)
    return json.loads(Path(text).read_text())


def _load_seq(text: str) -> Seq:
    d = _load_json(text)
    if isinstance(d, list):
        return Seq([Fraction(v) if isinstance(v, str) else v for v in d])
    return Seq.from_json(d)


def _weight(name: str) -> Weight:
    if name == "w1":
        return Weight([Fraction(1)], 1, 1, name="w1")
    return Weight.from_name(name)


# -- section 5 ------------------------------------------------------------------
def example_row(name: str, weight: str = "harmonic", wtol: float = 1e-7, K: int = 4) -> dict:
    """One verdict row; ``wtol`` is the margin for witness separation."""
    pr = get(name, weight)
    w, y = pr.w, pr.y
    row = {"example": name, "weight": weight}
    if name == "example1":
        r = strong_unicity_estimate(pr.x, y, w)
        P = projection_interval(pr.x, y, w)
        cert = search_certificate(y, w)
        row.update(chebyshev="Chebyshev" if cert is None else "non-Chebyshev",
                   selection="yes", result="strongly-unique" if r > 0 and P.singleton else "not unique",
                   detail=f"P = {{{float(P.lo):.12g}}}, r = {float(r):.6g}")
        row["ok"] = bool(r > 0 and P.singleton)
        return row
    ch = verify_chebyshev_certificate(y, pr.cert, w, tol=1e-9)
    sel = admits_continuous_selection(y, pr.cert)
    row.update(chebyshev="non-Chebyshev" if ch.verdict == "certified-non-Chebyshev" else ch.verdict,
               selection=sel.verdict)
    ok = ch.verdict == "certified-non-Chebyshev" and sel.verdict == pr.expected["selection"]
    if sel.verdict == "no":
        y1 = pr.cert.transport(y)
        n_k = oscillation_subsequence(y1, 2 * K + 1)
        pack = build_witnesses(y, pr.cert, n_k, K)
        rep = verify_separation(pack, w, wtol)
        row["result"] = "witnesses separated" if rep.separated else "witnesses overlap"
        row["detail"] = f"I1 = [{rep.I1[0]:.9g}, {rep.I1[1]:.9g}], I2 = [{rep.I2[0]:.9g}, {rep.I2[1]:.9g}]"
        ok = ok and rep.separated
    else:
        row["result"] = f"selection yes (n_o = {sel.n_o})"
        row["detail"] = sel.reason
    row["ok"] = bool(ok)
    return row


def cmd_examples(args) -> dict:
    if args.paper != "section5":
        raise ValueError("only --paper section5 is bundled")
    weights = ["harmonic", "w1"] if args.weight == "both" else [args.weight]
    rows = []
    for wname in weights:
        for name in sorted(PRESETS):
            rows.append(example_row(name, wname, args.wtol, args.k))
    return make_report("examples", _config(args), rows, all(r["ok"] for r in rows))


def cmd_project(args) -> dict:
    x = _load_seq(args.x) if args.x else Seq([3, 1])
    y = _load_seq(args.y) if args.y else Seq([1, -2])
    w = _weight(args.weight)
    P = projection_interval(x, y, w, args.tol, args.mode)
    d = P.to_json()
    row = {"lo": d["lo"], "hi": d["hi"], "dist": d["dist"], "err": d["err"], "mode": d["mode"],
           "outer": d["outer"]}
    return make_report("project", _config(args), [row], True, certificate=d["certificate"])


def cmd_selection(args) -> dict:
    if args.action == "witness":
        return cmd_witness(args)
    pr = get(args.preset, args.weight)
    rows = []
    if pr.cert is None:
        cert = search_certificate(pr.y, pr.w)
        verdict = "no certificate found" if cert is None else "certificate found"
        sel = admits_continuous_selection(pr.y, cert, chebyshev=cert is None)
        rows.append({"preset": args.preset, "chebyshev": verdict, "selection": sel.verdict,
                     "n_o": sel.n_o, "reason": sel.reason, "scope": sel.scope})
        ok = sel.verdict == pr.expected["selection"]
    else:
        ch = verify_chebyshev_certificate(pr.y, pr.cert, pr.w, tol=args.tol)
        sel = admits_continuous_selection(pr.y, pr.cert)
        rows.append({"preset": args.preset, "chebyshev": ch.verdict,
                     "alignment": float(ch.alignment.value) if ch.alignment else None,
                     "selection": sel.verdict, "n_o": sel.n_o, "reason": sel.reason,
                     "scope": sel.scope, "oscillation": sel.oscillation})
        ok = ch.verdict == "certified-non-Chebyshev" and sel.verdict == pr.expected["selection"]
    return make_report("selection check", _config(args), rows, ok)


def cmd_witness(args) -> dict:
    pr = get(args.preset, args.weight)
    if pr.cert is None:
        raise ValueError(f"{args.preset} has no selection certificate")
    K = args.k
    y1 = pr.cert.transport(pr.y)
    n_k = oscillation_subsequence(y1, 2 * K + 1)
    if n_k is None:
        raise ValueError(f"{args.preset}: y1 has no oscillating differences")
    pack = build_witnesses(pr.y, pr.cert, n_k, K)
    sep = verify_separation(pack, pr.w, args.wtol)
    rows = []
    for k in range(K):
        n = pack.x_index[k]
        dist = lorentz_norm(pack.x[k] - pack.z, pr.w, 1e-12)
        bound = float(pr.w(n)) * float(pack.spikes[k][0])  # 2 w(n) |y1(n) - y1(n+1)|
        rows.append({"k": k + 1, "x_index": n, "w_index": pack.w_index[k],
                     "x_interval": list(sep.x_intervals[k]), "w_interval": list(sep.w_intervals[k]),
                     "dist_x_z": float(dist.value), "bound": bound,
                     "within_bound": bool(float(dist.value) <= bound + dist.error)})
    return make_report("selection witness", _config(args), rows, sep.separated,
                       separated=sep.separated, I1=list(sep.I1), I2=list(sep.I2))


# -- function spaces ------------------------------------------------------------
def _fspace_inputs(args):
    grid = GridSpace.from_json(_load_json(args.grid)) if args.grid else GridSpace.uniform(2, 2.0)
    spec = FNormSpec.from_json(_load_json(args.spec)) if args.spec else FNormSpec.l1()
    f = GridFunction(grid, _load_json(args.f)) if args.f else GridFunction(grid, [2.0, 1.0])
    return grid, spec, f


def cmd_fspace(args) -> dict:
    if args.action == "continuity":
        return cmd_continuity(args)
    if args.action == "property-s":
        spec = FNormSpec.from_json(_load_json(args.spec)) if args.spec else FNormSpec.lambda_phi("log1p")
        cells = [int(c) for c in args.cells.split(",")]
        reps = property_s_probe(spec, args.p_exp, cells)
        rows = [{"cells": r.cells, "bumps": len(r.h), "h_min": float(r.h[-1]),
                 "r_last": float(r.r[-1]), "decreasing": r.decreasing, "C": r.fitted_C}
                for r in reps]
        Cs = [r.fitted_C for r in reps]
        stable = (max(Cs) - min(Cs)) <= 0.05 * max(Cs)
        ok = all(r.decreasing for r in reps) and stable
        return make_report("fspace property-s", _config(args), rows, ok, C_stable=stable)
    grid, spec, f = _fspace_inputs(args)
    if args.action == "norm":
        return make_report("fspace norm", _config(args),
                           [{"variant": spec.variant, "value": fnorm(f, spec)}], True)
    C = ConstraintClass.from_json(_load_json(args.cls)) if args.cls else ConstraintClass("increasing")
    levels = _load_json(args.levels)
    P = metric_projection_set(f, C, spec, levels)
    rows = [{"dist": P.dist, "method": P.method, "minimizer": m.tolist()} for m in P.minimizers]
    ok = True
    extra = {}
    if C.kind != "blockwise":
        pr = minimizing_sequence_probe(f, C, spec, levels=levels)
        ok = pr.converged and abs(pr.dist - P.dist) <= 1e-8
        extra = {"probe": pr.to_json()}
    return make_report("fspace project", _config(args), rows, ok, **extra)


def _strong_unicity_continuity(n_max: int):
    pr = get("example1")
    x, y, w = pr.x, pr.y, pr.w

    def project(u):
        P = projection_interval(u, y, w, mode="exact", certificate=False)
        return [Interval(float(P.lo), float(P.hi))]

    f_seq = [x + Seq([Fraction(1, 10 * n), Fraction(-1, 20 * n)]) for n in range(1, n_max + 1)]
    return continuity_experiment(x, f_seq, project=project, eps_grid=(0.1, 0.05, 0.02),
                                 size=lambda u: lorentz_norm(u - x, w).value)


def cmd_continuity(args) -> dict:
    if args.preset == "two-point":
        rep = two_point(args.n)
    elif args.preset == "strong-unicity":
        rep = _strong_unicity_continuity(args.n)
    else:
        raise ValueError(f"unknown continuity preset {args.preset!r}")
    ok = {"two-point": bool(np.all(rep.reverse == 2.0) and np.all(rep.forward == 0.0)),
          "strong-unicity": rep.verdict == "continuous"}[args.preset]
    return make_report("continuity", _config(args), rep.rows(), ok, verdict=rep.verdict,
                       eps=rep.eps.tolist(), ball_ok=rep.ball_ok.tolist())


def cmd_fuzz(args) -> dict:
    from .fuzz import run_suite
    res = run_suite(args.cases, args.seed)
    rows = [r.to_json() for r in res]
    return make_report("fuzz", _config(args), rows, all(r.ok for r in res))


# -- parser ---------------------------------------------------------------------
def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items())
            if k not in ("func", "out", "fmt") and not callable(v)}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-7, help="target accuracy")
    common.add_argument("--trunc", type=int, default=None,
                        help="largest truncation index for certified sums")
    common.add_argument("--seed", type=int, default=0)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json")
    fmt.add_argument("--tsv", dest="fmt", action="store_const", const="tsv")
    common.add_argument("--out", default=None,
                        help="output path; 'table', 'json' or 'tsv' select a format instead")

    p = argparse.ArgumentParser(prog="lorentzapprox", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"lorentzapprox {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("examples", parents=[common], help="worked examples in d(w,1)")
    s.add_argument("--paper", default="section5")
    s.add_argument("--weight", default="harmonic", choices=["harmonic", "w1", "both"])
    s.add_argument("--k", type=int, default=4, help="witness pairs for the oscillating example")
    s.add_argument("--wtol", type=float, default=1e-7, help="witness separation margin")
    s.set_defaults(func=cmd_examples)

    s = sub.add_parser("project", parents=[common], help="projection onto span[y] in d(w,1)")
    s.add_argument("--x", help="sequence JSON (file or literal)")
    s.add_argument("--y", help="sequence JSON (file or literal)")
    s.add_argument("--weight", default="harmonic")
    s.add_argument("--mode", default="auto", choices=["auto", "exact", "certified"])
    s.set_defaults(func=cmd_project)

    for name, help_ in (("selection", "Chebyshev and selection checks"),
                        ("witness", "discontinuity witnesses")):
        s = sub.add_parser(name, parents=[common], help=help_)
        if name == "selection":
            s.add_argument("action", choices=["check", "witness"])
        else:
            s.set_defaults(action="witness")
        s.add_argument("--preset", default="example3", choices=sorted(PRESETS))
        s.add_argument("--weight", default="harmonic", choices=["harmonic", "w1"])
        s.add_argument("--k", type=int, default=4)
        s.add_argument("--wtol", type=float, default=1e-7, help="separation tolerance")
        s.set_defaults(func=cmd_selection)

    s = sub.add_parser("fspace", parents=[common], help="function-space laboratory")
    s.add_argument("action", choices=["norm", "property-s", "project", "continuity"])
    s.add_argument("--spec", help="norm JSON")
    s.add_argument("--grid", help="grid JSON: {'mu': [...], 'blocks': [...]}")
    s.add_argument("--f", help="cell values JSON")
    s.add_argument("--class", dest="cls", help="constraint class JSON")
    s.add_argument("--levels", help="level grid JSON")
    s.add_argument("--p-exp", type=float, default=1.0)
    s.add_argument("--cells", default="64,128,256,512,1024,2048,4096")
    s.add_argument("--preset", default="two-point", choices=["two-point", "strong-unicity"])
    s.add_argument("--n", type=int, default=10)
    s.set_defaults(func=cmd_fspace)

    s = sub.add_parser("continuity", parents=[common], help="continuity of metric projections")
    s.add_argument("--preset", default="two-point", choices=["two-point", "strong-unicity"])
    s.add_argument("--n", type=int, default=10)
    s.set_defaults(func=cmd_continuity)

    s = sub.add_parser("fuzz", parents=[common], help="norm-axiom and rearrangement suites")
    s.add_argument("--cases", type=int, default=10_000)
    s.set_defaults(func=cmd_fuzz)
    return p


def run(argv=None) -> tuple[int, str]:
    args = build_parser().parse_args(argv)
    out_fmt = args.fmt or "table"
    path = args.out
    if path in ("table", "json", "tsv"):
        out_fmt, path = path, None
    if args.tol <= 0:
        raise ValueError("--tol must be positive")
    saved = _norms.MAX_TRUNC
    if args.trunc is not None:
        if args.trunc < 1024:
            raise ValueError("--trunc below 1024 is too small for the bundled presets")
        _norms.MAX_TRUNC = args.trunc
    try:
        rep = args.func(args)
    finally:
        _norms.MAX_TRUNC = saved
    text = render(rep, out_fmt)
    if path:
        Path(path).write_text(text, encoding="utf-8")
    return (0 if rep["ok"] else 1), text


def main(argv=None) -> int:
    try:
        code, text = run(argv)
    except (LorentzApproxError, ValueError, KeyError, OSError) as exc:
        print(f"lorentzapprox: error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
