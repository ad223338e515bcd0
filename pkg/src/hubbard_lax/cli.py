"""Command-line front end.

Subcommands: verify, ness, oracle, observe, commute, sweep. Every command
writes machine-readable JSON (and CSV where appropriate) into an output
directory and echoes the main JSON document to stdout. Outputs embed the full
parameter set, seed, cutoff, tolerance, and a schema_version field; identical
inputs produce bit-identical outputs.

Config precedence: command-line flags override entries of a JSON config file
(--config); built-in defaults fill the rest (tol 1e-10, seed 42, cutoff
auto-selected from the chain length).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .algebra_verifier import check_xk_structure, sample_params, verify_family, verify_suite
from .lindblad_oracle import fixed_point_oracle, fixed_point_residual, make_spec, apply_lindbladian
from .ness_engine import (
    DrivingConfig,
    build_double_lax,
    build_ness,
    check_boundary_conditions,
    check_telescoping,
    dump_rho,
    k_exact,
    map_driving_to_params,
)
from .observables import (
    cosine_profile_fit,
    current_series,
    current_uniformity,
    profile_and_currents,
    profile_and_currents_mpo,
    scaling_fit,
)
from .transfer_commutativity import check_commutativity, sample_pairs

SCHEMA_VERSION = 1
DEFAULTS = {"tol": 1e-10, "seed": 42}


def _jsonable(obj):
    """Recursively convert numpy scalars and complex numbers ([re, im])."""
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _dump_json(doc, path):
    text = json.dumps(_jsonable(doc), sort_keys=True, indent=2)
    with open(path, "w") as fh:
        fh.write(text + "\n")
    return text


def _outdir(args) -> str:
    d = args.out
    os.makedirs(d, exist_ok=True)
    return d


def _load_config(path):
    if not path:
        return {}
    with open(path) as fh:
        return json.load(fh)


def _merged(args, key, default=None):
    """flag > config file > default."""
    val = getattr(args, key, None)
    if val is not None:
        return val
    cfg = getattr(args, "_config", {})
    if key in cfg:
        return cfg[key]
    return DEFAULTS.get(key, default)


def _driving_from_args(args, n_required=True) -> DrivingConfig:
    def need(key, default=None):
        v = _merged(args, key, default)
        if v is None:
            raise ValueError(f"missing required parameter --{key}")
        return v

    return DrivingConfig(
        gamma_L=float(need("gammaL", 1.0)),
        gamma_R=float(need("gammaR", 1.0)),
        mu_L=float(_merged(args, "muL", 0.0)),
        mu_R=float(_merged(args, "muR", 0.0)),
        u=float(need("u")),
        n_sites=int(need("n")),
    )


# ---------------------------------------------------------------------------
# subcommands

def cmd_verify(args) -> int:
    tol = float(_merged(args, "tol"))
    seed = int(_merged(args, "seed"))
    samples = int(_merged(args, "samples", 5))
    if args.K is not None:
        cutoffs = (int(args.K),)
    else:
        cutoffs = tuple(_merged(args, "cutoffs", (3, 4, 5)))
    if args.u is not None:
        from .lax_builder import LaxParams

        pts = [LaxParams(p.lam, p.omega, float(args.u))
               for p in sample_params(samples, seed=seed)]
        reports = []
        for K in cutoffs:
            for p in pts:
                reports.extend(verify_family(p, K, tol=tol))
    else:
        pts = sample_params(samples, seed=seed)
        reports = verify_suite(num_samples=samples, cutoffs=cutoffs, tol=tol, seed=seed)
    xk = [check_xk_structure(p) for p in pts]
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "verify",
        "seed": seed,
        "tolerance": tol,
        "cutoffs": list(cutoffs),
        "reports": [r.as_dict() for r in reports],
        "interaction_blocks": xk,
        "all_passed": all(r.passed for r in reports) and all(x["passed"] for x in xk),
    }
    text = _dump_json(doc, os.path.join(_outdir(args), "verify.json"))
    print(text)
    return 0 if doc["all_passed"] else 1


def cmd_ness(args) -> int:
    cfg = _driving_from_args(args)
    tol = float(_merged(args, "tol"))
    K = int(args.K) if args.K is not None else k_exact(cfg.n_sites)
    res = build_ness(cfg, cutoff_K=K)
    lam, om, eta = map_driving_to_params(cfg)
    dlax = build_double_lax(cfg, cutoff_K=max(K, 2))
    bc = check_boundary_conditions(dlax, tol=tol)
    tele_res, tele_scale = check_telescoping(dlax, cfg.n_sites)
    diag = dict(res.diagnostics)
    diag["boundary_left_residual"] = bc["left_residual"] / bc["scale"]
    diag["boundary_right_residual"] = bc["right_residual"] / bc["scale"]
    diag["telescoping_residual"] = tele_res / tele_scale
    if args.lindblad_residual:
        diag["lindblad_residual"] = fixed_point_residual(cfg, res.rho)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "ness",
        "driving": _jsonable(vars_of(cfg)),
        "cutoff_K": K,
        "tolerance": tol,
        "map": {"lambda": lam, "omega": om, "eta": eta},
        "diagnostics": diag,
    }
    ok = (
        diag["hermiticity"] <= 1e-10
        and diag["trace_deviation"] <= 1e-12
        and diag.get("positivity_min_eig", 0.0) >= -1e-10
        and bc["left_passed"] and bc["right_passed"]
    )
    doc["passed"] = bool(ok)
    if args.dump_rho:
        dump_rho(args.dump_rho, res.rho)
        doc["rho_dump"] = args.dump_rho
    text = _dump_json(doc, os.path.join(_outdir(args), "ness.json"))
    print(text)
    return 0 if ok else 1


def vars_of(cfg: DrivingConfig) -> dict:
    return {
        "gamma_L": cfg.gamma_L, "gamma_R": cfg.gamma_R,
        "mu_L": cfg.mu_L, "mu_R": cfg.mu_R, "u": cfg.u, "n_sites": cfg.n_sites,
    }


def cmd_oracle(args) -> int:
    cfg = _driving_from_args(args)
    if cfg.n_sites > 3:
        print("error: the dense oracle is limited to n <= 3", file=sys.stderr)
        return 2
    tol = float(_merged(args, "tol", 1e-9))
    rho_oracle = fixed_point_oracle(cfg)
    res = build_ness(cfg)
    dist = float(np.linalg.norm(res.rho - rho_oracle))
    spec = make_spec(cfg)
    mpo_residual = float(
        np.linalg.norm(apply_lindbladian(spec, res.rho)) / np.linalg.norm(res.rho)
    )
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "oracle",
        "driving": _jsonable(vars_of(cfg)),
        "frobenius_distance": dist,
        "mpo_fixed_point_residual": mpo_residual,
        "tolerance": tol,
        "passed": bool(dist <= tol),
    }
    text = _dump_json(doc, os.path.join(_outdir(args), "oracle.json"))
    print(text)
    return 0 if doc["passed"] else 1


def cmd_observe(args) -> int:
    cfg = _driving_from_args(args)
    out = _outdir(args)
    if cfg.n_sites <= 5:
        res = build_ness(cfg, compute_spectrum=False)
        obs = profile_and_currents(res)
    else:
        obs = profile_and_currents_mpo(cfg)
    uni = current_uniformity(obs)

    with open(os.path.join(out, "densities.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["site", "sz", "tz"])
        for j in range(cfg.n_sites):
            w.writerow([j + 1, repr(obs.densities_sigma[j]), repr(obs.densities_tau[j])])
    with open(os.path.join(out, "currents.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["bond", "J_sigma", "J_tau"])
        for j in range(cfg.n_sites - 1):
            w.writerow([j + 1, repr(obs.currents_sigma[j]), repr(obs.currents_tau[j])])

    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "observe",
        "driving": _jsonable(vars_of(cfg)),
        "densities_sigma": obs.densities_sigma,
        "densities_tau": obs.densities_tau,
        "currents_sigma": obs.currents_sigma,
        "currents_tau": obs.currents_tau,
        "current_uniformity": uni,
        "cosine_fit": cosine_profile_fit(obs.densities_sigma),
    }
    if args.scaling:
        ns = [int(x) for x in args.scaling.split(",")]
        series = current_series(cfg, ns)
        doc["scaling"] = {
            "series": [[n, J] for n, J in series],
            "fit": scaling_fit(series),
        }
    if args.gnuplot:
        with open(os.path.join(out, "profile.dat"), "w") as fh:
            fh.write("# site sz tz\n")
            for j in range(cfg.n_sites):
                fh.write(f"{j + 1} {obs.densities_sigma[j]:.16e} {obs.densities_tau[j]:.16e}\n")
        if "scaling" in doc:
            with open(os.path.join(out, "scaling.dat"), "w") as fh:
                fh.write("# n J\n")
                for n, J in doc["scaling"]["series"]:
                    fh.write(f"{n} {J:.16e}\n")
    doc["passed"] = bool(uni <= 1e-9)
    text = _dump_json(doc, os.path.join(out, "observe.json"))
    print(text)
    return 0 if doc["passed"] else 1


def cmd_commute(args) -> int:
    seed = int(_merged(args, "seed"))
    u = float(_merged(args, "u", 1.0))
    npairs = int(_merged(args, "pairs", 20))
    ns = [int(x) for x in (args.n or "2,3,4").split(",")]
    pairs = sample_pairs(npairs, seed=seed)
    all_reports = {}
    for n in ns:
        reps = check_commutativity(n, u, pairs)
        all_reports[str(n)] = [r.as_dict() for r in reps]
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "commute",
        "tier": "conjecture",
        "seed": seed,
        "u": u,
        "reports": all_reports,
        "all_within_tolerance": all(
            r["passed"] for reps in all_reports.values() for r in reps
        ),
    }
    text = _dump_json(doc, os.path.join(_outdir(args), "commute.json"))
    print(text)
    # conjecture tier never gates
    return 0


def _sweep_one(payload):
    kwargs, K = payload
    cfg = DrivingConfig(**kwargs)
    res = build_ness(cfg, cutoff_K=K, compute_spectrum=cfg.n_sites <= 5)
    obs = profile_and_currents(res) if cfg.n_sites <= 5 else profile_and_currents_mpo(cfg)
    return cfg.key(), {
        "driving": kwargs,
        "diagnostics": res.diagnostics,
        "currents_sigma": obs.currents_sigma,
        "densities_sigma": obs.densities_sigma,
        "current_uniformity": current_uniformity(obs),
    }


def cmd_sweep(args) -> int:
    def values(flag, default):
        raw = _merged(args, flag, default)
        if isinstance(raw, str):
            return [float(x) for x in raw.split(",")]
        if isinstance(raw, (list, tuple)):
            return [float(x) for x in raw]
        return [float(raw)]

    ns = [int(x) for x in values("n", "2,3")]
    gLs = values("gammaL", "1.0")
    gRs = values("gammaR", "1.0")
    muLs = values("muL", "0.0")
    muRs = values("muR", "0.0")
    us = values("u", "1.0")
    jobs = []
    for n in ns:
        for gL in gLs:
            for gR in gRs:
                for mL in muLs:
                    for mR in muRs:
                        for u in us:
                            kwargs = dict(gamma_L=gL, gamma_R=gR, mu_L=mL,
                                          mu_R=mR, u=u, n_sites=n)
                            jobs.append((kwargs, k_exact(n)))
    workers = int(_merged(args, "workers", 1))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_sweep_one, jobs))
    else:
        results = [_sweep_one(j) for j in jobs]
    results.sort(key=lambda kv: kv[0])
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "sweep",
        "configurations": [{"key": k, **v} for k, v in results],
        "passed": all(
            v["diagnostics"]["hermiticity"] <= 1e-10
            and v["current_uniformity"] <= 1e-9
            for _, v in results
        ),
    }
    text = _dump_json(doc, os.path.join(_outdir(args), "sweep.json"))
    print(text)
    return 0 if doc["passed"] else 1


# ---------------------------------------------------------------------------

def _add_driving_flags(p, need_n=True):
    p.add_argument("--n", type=int, default=None, help="chain length")
    p.add_argument("--gammaL", type=float, default=None)
    p.add_argument("--gammaR", type=float, default=None)
    p.add_argument("--muL", type=float, default=None)
    p.add_argument("--muR", type=float, default=None)
    p.add_argument("--u", type=float, default=None)
    p.add_argument("--K", type=int, default=None, help="auxiliary cutoff")
    p.add_argument("--tol", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="hubbard-lax",
        description="Lax-family identity checks and exact steady states of "
                    "the boundary-driven Hubbard ladder",
    )
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    common = dict(out="output directory for JSON/CSV artifacts")

    p = sub.add_parser("verify", help="run the operator-identity residual suite")
    p.add_argument("--u", type=float, default=None, help="fix the interaction")
    p.add_argument("--K", type=int, default=None, help="single cutoff instead of 3,4,5")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("ness", help="build the steady state and its diagnostics")
    _add_driving_flags(p)
    p.add_argument("--dump-rho", default=None, help="binary dump path for rho")
    p.add_argument("--lindblad-residual", action="store_true",
                   help="also evaluate the Lindblad fixed-point residual")
    p.set_defaults(func=cmd_ness)

    p = sub.add_parser("oracle", help="cross-check against the dense fixed point (n <= 3)")
    _add_driving_flags(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("observe", help="densities, currents, scaling")
    _add_driving_flags(p)
    p.add_argument("--scaling", default=None,
                   help="comma-separated chain lengths for the current scaling fit")
    p.add_argument("--gnuplot", action="store_true", help="emit plain .dat files")
    p.set_defaults(func=cmd_observe)

    p = sub.add_parser("commute", help="transfer-family commutation probe (conjecture tier)")
    p.add_argument("--n", default=None, help="comma-separated chain lengths (default 2,3,4)")
    p.add_argument("--u", type=float, default=None)
    p.add_argument("--pairs", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_commute)

    p = sub.add_parser("sweep", help="grid of driving configurations")
    p.add_argument("--n", default=None)
    p.add_argument("--gammaL", default=None)
    p.add_argument("--gammaR", default=None)
    p.add_argument("--muL", default=None)
    p.add_argument("--muR", default=None)
    p.add_argument("--u", default=None)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_sweep)

    for sp in sub.choices.values():
        sp.add_argument("--out", default="hlx_out", help=common["out"])
        sp.add_argument("--config", default=None,
                        help="JSON config file; flags take precedence")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        args._config = _load_config(args.config)
    except (OSError, json.JSONDecodeError) as e:
        print(f"error: cannot read config: {e}", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (ValueError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except MemoryError as e:
        print(f"error: problem size exceeds the dense-route limits: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: cannot write output: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
