"""Command-line entry point: ``gflattice <command> [options]``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from . import genfunc, infinite, io, oracle, solvers, sweeps, topology
from .errors import ConfigError, NumericalFailure
from .models import Kind, ModelSpec
from .poly import ComplexPoly

MODEL_FLAGS = {"model": "kind", "bc": "bc", "tl": "tL", "tr": "tR", "tlp": "tLp", "trp": "tRp", "n": "N"}


def _complex_arg(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")


def _model_options(p: argparse.ArgumentParser):
    g = p.add_argument_group("model")
    g.add_argument("--model", choices=["hn", "ssh"])
    g.add_argument("--bc", choices=["obc", "pbc"])
    g.add_argument("--tl", type=_complex_arg, help="leftward hopping tL (complex allowed, e.g. 1+0.2j)")
    g.add_argument("--tr", type=_complex_arg, help="rightward hopping tR")
    g.add_argument("--tlp", type=_complex_arg, help="SSH intercell hopping tL'")
    g.add_argument("--trp", type=_complex_arg, help="SSH intercell hopping tR'")
    g.add_argument("--n", type=int, help="number of sites (HN) or cells (SSH)")
    g.add_argument("--v", type=_complex_arg, help="impurity strength")
    g.add_argument("--site", type=int, help="impurity site (1-based)")
    g.add_argument("--lam", type=float, help="SSH family: tL=1.25*lam, tR=lam/1.25, tL'=tR'=1")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration; flags override its values")
    common.add_argument("--seed", type=int)
    common.add_argument("--format", choices=io.FORMATS)
    common.add_argument("--output", "-o", help="write here instead of stdout")
    common.add_argument("--jobs", type=int, help="worker threads for sweeps")
    common.add_argument("--tol", type=float, help="solver acceptance tolerance")

    p = argparse.ArgumentParser(prog="gflattice", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", parents=[common], help="all eigenpairs of a chain")
    _model_options(s)
    s.add_argument("--no-pairing", action="store_true", help="skip the P/Q zero pairing report")

    s = sub.add_parser("zeros", parents=[common], help="zero scatter of P and Q for one eigenpair")
    _model_options(s)
    s.add_argument("--state", type=int, help="eigenpair index (default 0)")
    s.add_argument("--energy", type=_complex_arg, help="pick the eigenpair nearest this energy")

    s = sub.add_parser("sweep-impurity", parents=[common], help="track a state while V varies")
    _model_options(s)
    s.add_argument("--v-range", default=None, help="start:stop:count or comma list (default 0:0.8:33)")

    s = sub.add_parser("ssh-phase", parents=[common], help="winding and edge pairs along the SSH family")
    s.add_argument("--lambda", dest="lams", default=None, help="start:stop:count (default 0.7:1.3:50)")
    s.add_argument("--n", dest="cells", type=int, help="cells per chain (default 20)")
    s.add_argument("--rc", type=float, help="fixed GBZ radius of the family (default 1.25)")

    s = sub.add_parser("winding", parents=[common], help="W(E) for HN, nu_A for SSH")
    _model_options(s)
    s.add_argument("--energy", type=_complex_arg)
    s.add_argument("--radius", type=float)

    s = sub.add_parser("oracle", parents=[common], help="reference spectrum from the dense matrix")
    _model_options(s)

    s = sub.add_parser("compare", parents=[common], help="solver versus oracle")
    _model_options(s)

    s = sub.add_parser("demo-2d", parents=[common], help="regularized plane-wave residual table")
    s.add_argument("--k", default=None, help="kx,ky (default 0.7,1.9)")
    s.add_argument("--t", type=float)
    s.add_argument("--energy", type=float, help="default: 2t(cos kx + cos ky)")
    s.add_argument("--rho", default=None, help="comma list (default 0.9,0.99,0.999)")
    s.add_argument("--dim", type=int, choices=[1, 2])

    s = sub.add_parser("fib", parents=[common], help="Fibonacci generating function demo")
    s.add_argument("--terms", type=int, help="highest coefficient index (default 20)")
    return p


def make_config(args: argparse.Namespace) -> io.RunConfig:
    base: dict = {}
    if args.config:
        try:
            base = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {args.config} is not valid JSON: {exc}") from exc
        if base.get("command", args.command) != args.command:
            raise ConfigError(f"config is for '{base['command']}', not '{args.command}'")
    model_d = dict(base.get("model") or {})
    flag_model = {MODEL_FLAGS[k]: getattr(args, k) for k in MODEL_FLAGS if getattr(args, k, None) is not None}
    if "N" in flag_model and flag_model["N"] is not None:
        flag_model["N"] = int(flag_model["N"])
    model_d.update({k: ([v.real, v.imag] if isinstance(v, complex) else v) for k, v in flag_model.items()})
    lam = getattr(args, "lam", None)
    if lam is not None:
        fam = ModelSpec.ssh_family(lam, int(model_d.get("N", 20))).to_dict()
        model_d.update({k: fam[k] for k in ("kind", "tL", "tR", "tLp", "tRp")})
    v, site = getattr(args, "v", None), getattr(args, "site", None)
    if v is not None or site is not None:
        imp = dict(model_d.get("impurity") or {})
        if v is not None:
            imp["V"] = [v.real, v.imag]
        if site is not None:
            imp["site"] = site
        model_d["impurity"] = imp
    model = None
    if "kind" in model_d or any(k in model_d for k in ("tL", "tR", "N")):
        model_d.setdefault("kind", "hn")
        if model_d["kind"] == "ssh":
            model_d.setdefault("tLp", 1.0)
            model_d.setdefault("tRp", 1.0)
        imp = model_d.get("impurity")
        if imp is not None:
            if "V" not in imp:
                raise ConfigError("impurity needs a strength (--v)")
            imp.setdefault("site", 1 if model_d.get("bc") == "pbc" else int(model_d.get("N", 2)) // 2)
        missing = [k for k in ("tL", "tR", "N") if k not in model_d]
        if missing:
            raise ConfigError(f"model needs {', '.join('--' + m.lower() for m in missing)}")
        model = ModelSpec.from_dict(model_d)
    options = dict(base.get("options") or {})
    skip = set(MODEL_FLAGS) | {"command", "config", "seed", "format", "output", "jobs", "v", "site", "lam"}
    for k, val in vars(args).items():
        if k not in skip and val is not None and val is not False:
            options[k] = [val.real, val.imag] if isinstance(val, complex) else val
    return io.RunConfig(
        args.command, model, options,
        seed=args.seed if args.seed is not None else int(base.get("seed", 0)),
        format=args.format or base.get("format", "json"),
        output=args.output or base.get("output"),
        jobs=args.jobs if args.jobs is not None else int(base.get("jobs", 1)),
    )


def _need_model(cfg: io.RunConfig) -> ModelSpec:
    if cfg.model is None:
        raise ConfigError(f"'{cfg.command}' needs a model (--model, --tl, --tr, --n ...)")
    return cfg.model


def _opt_c(cfg, key, default=None):
    v = cfg.options.get(key, default)
    if isinstance(v, list):
        return complex(v[0], v[1])
    return v


def _header(cfg: io.RunConfig) -> dict:
    return {"command": cfg.command, "model": None if cfg.model is None else cfg.model.to_dict(),
            "seed": cfg.seed}


def cmd_solve(cfg: io.RunConfig):
    model = _need_model(cfg)
    tol = cfg.options.get("tol", solvers.SOLVER_TOL)
    res = solvers.solve(model, tol=tol, seed=cfg.seed, pairing=not cfg.options.get("no_pairing", False))
    payload = io.result_to_dict(res)
    payload["diagnostics"] = dict(payload["diagnostics"],
                                  edge_tagged=sum("edge" in p.tags for p in res.pairs))
    return payload, io.csv_text(*io.wavefunction_rows(res))


def cmd_zeros(cfg: io.RunConfig):
    model = _need_model(cfg)
    res = solvers.solve(model, seed=cfg.seed)
    E_pick = _opt_c(cfg, "energy")
    if E_pick is not None:
        idx = int(np.argmin(np.abs(res.eigenvalues - E_pick)))
    else:
        idx = int(cfg.options.get("state", 0))
        if not 0 <= idx < len(res.pairs):
            raise ConfigError(f"--state must lie in 0..{len(res.pairs) - 1}")
    pair = res.pairs[idx]
    rep = solvers.verify_cancellation(model, pair, seed=cfg.seed)
    rows = []
    for row in rep["pairing"]:
        rows.append({"which": "Q", "z": row["q_zero"], "paired_with": row["p_zero"], "distance": row["distance"]})
    for z, owner in zip(rep["p_zeros"], rep["p_zero_owner"]):
        q = rep["q_zeros"][np.argmin(np.abs(rep["q_zeros"] - z))]
        close = abs(q - z) <= 1e-6 * max(1.0, abs(q))
        rows.append({"which": owner, "z": z, "paired_with": q if close else None,
                     "distance": float(abs(q - z))})
    payload = dict(_header(cfg), state=idx, E=pair.E, gbz_radius=res.gbz_radius,
                   cancellation_residual=rep["residual"], zeros=rows)
    csv_rows = [[float(r["z"].real), float(r["z"].imag), r["which"],
                 "" if r["paired_with"] is None else "%.17g%+.17gj" % (r["paired_with"].real, r["paired_with"].imag)]
                for r in rows]
    return payload, io.csv_text(["re", "im", "which", "paired_with"], csv_rows)


def cmd_sweep_impurity(cfg: io.RunConfig):
    model = _need_model(cfg)
    if model.kind is not Kind.HN:
        raise ConfigError("sweep-impurity needs an HN model")
    Vs = sweeps.parse_range(cfg.options.get("v_range") or "0:0.8:33")
    rows, _ = sweeps.impurity_sweep(model, Vs, jobs=cfg.jobs, seed=cfg.seed)
    recs = [r.to_dict() for r in rows]
    payload = dict(_header(cfg), site=(model.impurity.site if model.impurity else model.N // 2), rows=recs)
    return payload, io.records_csv(recs)


def cmd_ssh_phase(cfg: io.RunConfig):
    lams = sweeps.parse_range(cfg.options.get("lams") or "0.7:1.3:50")
    N = int(cfg.options.get("cells") or 20)
    rc = float(cfg.options.get("rc") or 1.25)
    rows = sweeps.ssh_phase_scan(lams, N, rc, jobs=cfg.jobs, seed=cfg.seed)
    recs = [r.to_dict() for r in rows]
    return dict(command=cfg.command, N=N, r_c=rc, seed=cfg.seed, rows=recs), io.records_csv(recs)


def cmd_winding(cfg: io.RunConfig):
    model = _need_model(cfg)
    out = dict(_header(cfg), gbz_radius=topology.gbz_radius(model))
    if model.kind is Kind.SSH:
        out["nu_A"] = topology.winding_nuA(model).to_dict()
    E = _opt_c(cfg, "energy")
    if model.kind is Kind.HN or E is not None:
        E = 0.0 if E is None else E
        rep = topology.winding_W(model, E, float(cfg.options.get("radius") or 1.0))
        out["E"] = complex(E)
        out["W"] = rep.to_dict()
    recs = [dict(name=k, **v) for k, v in out.items() if k in ("W", "nu_A")]
    return out, io.records_csv(recs)


def cmd_oracle(cfg: io.RunConfig):
    model = _need_model(cfg)
    orc = oracle.oracle_spectrum(model, seed=cfg.seed)
    payload = dict(_header(cfg), eigenvalues=orc.eigenvalues, certificates=orc.certificates,
                   charpoly=orc.charpoly.coeffs, sample_radius=orc.radius,
                   samples=[{"E": e, "det": d} for e, d in zip(orc.samples, orc.dets)])
    return payload, io.records_csv([{"index": i, "E": e} for i, e in enumerate(orc.eigenvalues)])


def cmd_compare(cfg: io.RunConfig):
    model = _need_model(cfg)
    res = solvers.solve(model, seed=cfg.seed)
    c = oracle.compare(res, seed=cfg.seed)
    rec = {"max_dE": c.max_dE, "diameter": c.diameter, "rel_dE": c.rel_dE, "min_overlap": c.min_overlap,
           "simple_states": len(c.overlaps)}
    return dict(_header(cfg), **rec), io.records_csv([rec])


def cmd_demo2d(cfg: io.RunConfig):
    o = cfg.options
    k = tuple(float(x) for x in (o.get("k") or "0.7,1.9").split(","))
    dim = int(o.get("dim") or (1 if len(k) == 1 else 2))
    if dim == 2 and len(k) != 2:
        raise ConfigError("--k needs kx,ky for dim 2")
    t = float(o.get("t") if o.get("t") is not None else 1.0)
    E = o.get("energy")
    if E is None:
        E = 2 * t * float(np.sum(np.cos(k[:dim])))
    rhos = [float(x) for x in (o.get("rho") or "0.9,0.99,0.999").split(",")]
    try:
        table = infinite.residual_table(k[0] if dim == 1 else k[:2], t, float(E), rhos, dim)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    recs = [{"rho": r, "residual": v} for r, v in table]
    return dict(command=cfg.command, dim=dim, k=list(k[:dim]), t=t, E=float(E), rows=recs), io.records_csv(recs)


def cmd_fib(cfg: io.RunConfig):
    m_max = int(cfg.options.get("terms") or 20)
    Q = ComplexPoly([1.0, -1.0, -1.0])
    g = genfunc.RationalGF(ComplexPoly([0.0, 1.0]), Q)
    b = genfunc.coefficients(g, m_max).coeffs.real
    imp = genfunc.RationalGF(ComplexPoly([0.0, 1.0] + [0.0] * 8 + [1.0]), Q)
    bi = genfunc.coefficients(imp, m_max).coeffs.real
    z = np.sort(Q.roots().roots.real)
    recs = [{"m": m, "fib": int(round(x)), "impurity_variant": int(round(y))} for m, (x, y) in enumerate(zip(b, bi))]
    payload = {"command": cfg.command, "coefficients": [r["fib"] for r in recs],
               "impurity_variant": [r["impurity_variant"] for r in recs],
               "kernel_roots": [float(z[1]), float(z[0])]}
    return payload, io.records_csv(recs)


COMMANDS = {"solve": cmd_solve, "zeros": cmd_zeros, "sweep-impurity": cmd_sweep_impurity,
            "ssh-phase": cmd_ssh_phase, "winding": cmd_winding, "oracle": cmd_oracle,
            "compare": cmd_compare, "demo-2d": cmd_demo2d, "fib": cmd_fib}


def run(cfg: io.RunConfig) -> str:
    payload, csv_body = COMMANDS[cfg.command](cfg)
    return io.dumps(payload) if cfg.format == "json" else csv_body


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = make_config(args)
        text = run(cfg)
    except ConfigError as exc:
        print(f"gflattice: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except NumericalFailure as exc:
        print(f"gflattice: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    if cfg.output:
        Path(cfg.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
