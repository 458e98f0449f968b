"""Experiment orchestration: subcommands, config files, seeds, and reports.

Every subcommand wraps module operations and emits a report; no numeric is
computed in this layer.  Reports are byte-identical for identical
(config, seed, build) regardless of worker count: wall time is printed to
stderr, never into a report.  JSON reports carry the envelope
{version, config, seed, report} with sorted keys; CSV uses comma separators,
'.' decimals, a header row, and LF line endings, with version and seed as
leading columns on every row.

Config files are flat key=value text (keys match the long option names,
'#' starts a comment); command-line flags override file values.  --seed is
mandatory on every stochastic subcommand: there is no silent entropy.

Exit codes: 0 success, 1 usage error, 2 validation/precondition failure,
3 resource-cap refusal.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__, rng
from .algolab import (
    baseline_constant,
    baseline_diagonal,
    baseline_greedy,
    baseline_hash_control,
    chi_concentration_check,
    chi_estimate,
    grid_tau_select,
    rarity_report,
)
from .disorder import sample_null, sample_planted, save_tensor
from .errors import AccuracyError, DomainError, ResourceCapError
from .landscape import MAX_SITES, enumerate_table, log_partition, save_table
from .mixture import MixtureSpec, format_mixture, parse_mixture, xi
from .ogp import (
    exceptional_mass,
    exceptional_membership,
    sf_bound,
    sf_empirical,
    soft_ogp_estimate,
    tau1_probability,
)
from .shattering import ShatterParams, build_clusters, regular_set, verify_decomposition
from .thresholds import (
    OgpBand,
    bar_beta_d,
    bar_beta_d_spherical,
    beta_c_bounds,
    beta_d,
    beta_d_spherical,
    e_alg,
    large_p_constants,
    ogp_band_pure_p,
)

__all__ = ["main"]

_STOCHASTIC = {"disorder", "enumerate", "shatter", "ogp", "chi", "rarity"}

# Flags that must be present after the config file and the command line are
# merged.  argparse-level requiredness would reject values supplied by
# --config, so presence is enforced post-parse instead.
_REQUIRED = {
    "thresholds": ("mixture",),
    "disorder": ("mixture", "n"),
    "enumerate": ("mixture", "n"),
    "shatter": ("mixture", "n", "beta"),
    "ogp": ("mode", "mixture", "n"),
    "chi": ("algorithm", "mixture", "n"),
    "rarity": ("algorithm", "mixture", "n", "beta", "beta_prime", "band"),
}


class _Parser(argparse.ArgumentParser):
    """argparse subclass whose usage errors exit 1 instead of 2."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _mixture(text: str) -> MixtureSpec:
    return parse_mixture(text)


def _band_pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected q_low,q_high, got {text!r}")
    return float(parts[0]), float(parts[1])


def _auto_band_pair(text: str) -> tuple[int, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected p,eps_prime, got {text!r}")
    return int(parts[0]), float(parts[1])


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(","))


_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _load_config(path: str) -> dict[str, str]:
    out: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(f"{path}:{lineno}: expected key=value, got {raw!r}")
            key, val = line.split("=", 1)
            out[key.strip().replace("-", "_")] = val.strip()
    return out


def _apply_config(sub: argparse.ArgumentParser, cfg: dict[str, str]) -> None:
    """Coerce file values through each option's declared type, then set them
    as defaults so that explicit flags still win."""
    dests = {}
    for action in sub._actions:
        dests[action.dest] = action
    coerced = {}
    for key, val in cfg.items():
        if key not in dests:
            raise DomainError(f"unknown config key: {key}")
        action = dests[key]
        if isinstance(
            action, (argparse._StoreTrueAction, argparse._StoreFalseAction)
        ):
            low = val.lower()
            if low in _TRUE:
                coerced[key] = isinstance(action, argparse._StoreTrueAction)
            elif low in _FALSE:
                coerced[key] = not isinstance(action, argparse._StoreTrueAction)
            else:
                raise DomainError(f"config key {key}: not a boolean: {val!r}")
        elif action.type is not None:
            try:
                coerced[key] = action.type(val)
            except (TypeError, ValueError, argparse.ArgumentTypeError) as exc:
                raise DomainError(f"config key {key}: {exc}") from exc
        else:
            coerced[key] = val
    sub.set_defaults(**coerced)


def _jsonable(obj):
    if isinstance(obj, MixtureSpec):
        return format_mixture(obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {
            f.name: _jsonable(getattr(obj, f.name))
            for f in dataclasses.fields(obj)
        }
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, np.ndarray):
        if obj.dtype == np.bool_:
            return obj.astype(int).tolist()
        return obj.tolist()
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _config_echo(args: argparse.Namespace) -> dict:
    # workers is an execution detail: reports must be byte-identical across
    # worker counts, so it never enters the echo.
    skip = {"func", "config", "workers"}
    return {
        k: _jsonable(v) for k, v in sorted(vars(args).items()) if k not in skip
    }


def _flatten_row(report: dict) -> dict:
    row = {}
    for key, val in report.items():
        if isinstance(val, (int, float, str, bool)) or val is None:
            row[key] = val
    return row


def _emit(args: argparse.Namespace, report: dict, rows: list[dict] | None) -> None:
    seed = getattr(args, "seed", None)
    if args.format == "json":
        envelope = {
            "version": __version__,
            "config": _config_echo(args),
            "seed": seed,
            "report": report,
        }
        text = json.dumps(envelope, sort_keys=True, indent=2) + "\n"
    else:
        if rows is None:
            rows = [_flatten_row(report)]
        keys: list[str] = []
        for row in rows:
            for key in row:
                if key not in keys:
                    keys.append(key)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["version", "seed"] + keys)
        for row in rows:
            writer.writerow(
                [__version__, seed] + [_csv_cell(row.get(k)) for k in keys]
            )
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    return v


def _workers(args: argparse.Namespace) -> int | None:
    if getattr(args, "workers", None) is not None:
        return args.workers
    env = os.environ.get("PSPINLAB_WORKERS")
    return int(env) if env else None


def _warn_beta(spec: MixtureSpec, beta: float | None) -> None:
    """Static-threshold sanity warning for pure mixtures (stderr only)."""
    if beta is None or len(spec.terms) != 1 or spec.terms[0][1] != 1.0:
        return
    low, high = beta_c_bounds(spec.terms[0][0])
    if beta > high:
        print(
            f"warning: beta={beta:g} exceeds the static upper bound "
            f"{high:.6f} (bounds [{low:.6f}, {high:.6f}])",
            file=sys.stderr,
        )


def _require_seed(args: argparse.Namespace) -> int:
    if args.seed is None:
        raise DomainError(
            "--seed is required for stochastic subcommands (no silent entropy)"
        )
    return args.seed


def _check_sites(n: int) -> None:
    if n > MAX_SITES:
        raise ResourceCapError(
            f"N={n} exceeds the exact-enumeration cap {MAX_SITES}", size=n
        )


# --------------------------------------------------------------------------
# subcommand runners


def _run_thresholds(args: argparse.Namespace):
    spec = args.mixture
    which = args.which
    is_pure = len(spec.terms) == 1 and spec.terms[0][1] == 1.0
    p = spec.terms[0][0] if is_pure else args.p
    report: dict = {"mixture": format_mixture(spec)}
    if which in ("all", "beta_d"):
        rep = beta_d(spec)
        report["beta_d"] = rep.value
        report["beta_d_minimizer"] = rep.minimizer
    if which in ("all", "bar_beta_d"):
        report["bar_beta_d"] = bar_beta_d(spec).value
        report["bar_beta_d_spherical"] = bar_beta_d_spherical(spec).value
    if which in ("all", "e_alg"):
        report["e_alg"] = e_alg(spec)
    if which in ("all", "constants"):
        consts = large_p_constants()
        report["w_limit"] = consts.limit
        report["lambda_star"] = consts.lambda_star
        report["level"] = consts.level
        report["lambda2"] = consts.lambda2
        report["lambda1"] = consts.lambda1
    if p is not None:
        if which in ("all", "beta_d"):
            report["beta_d_spherical"] = beta_d_spherical(p)
        if which in ("all", "constants"):
            low, high = beta_c_bounds(p)
            report["beta_c_low"] = low
            report["beta_c_high"] = high
        if which in ("all", "band"):
            band_rep = ogp_band_pure_p(p, args.eps_prime, rate_c=args.rate_c)
            report["band"] = _jsonable(band_rep)
    elif which == "band":
        raise DomainError("band construction needs a pure mixture or --p")
    return report, None


def _run_disorder(args: argparse.Namespace):
    seed = _require_seed(args)
    spec = args.mixture
    if args.planted_beta is not None:
        _warn_beta(spec, args.planted_beta)
        inst = sample_planted(args.n, spec, args.planted_beta, seed)
        g = inst.tensor
    else:
        g = sample_null(args.n, spec, seed)
    if args.save:
        save_tensor(g, args.save)
    rows = []
    for k in sorted(g.couplings):
        block = g.couplings[k]
        rows.append(
            {
                "degree": k,
                "count": int(block.size),
                "mean": float(block.mean()),
                "std": float(block.std(ddof=1)),
            }
        )
    report = {
        "mixture": format_mixture(spec),
        "n": g.n,
        "kind": g.kind,
        "model_covariance_at_1": float(
            args.n * xi(spec, 1.0)
        ),
        "degrees": rows,
    }
    if args.planted_beta is not None:
        report["planted_beta"] = args.planted_beta
    return report, rows


def _run_enumerate(args: argparse.Namespace):
    seed = _require_seed(args)
    _check_sites(args.n)
    spec = args.mixture
    _warn_beta(spec, args.beta)
    g = sample_null(args.n, spec, seed)
    table = enumerate_table(g, workers=_workers(args))
    if args.save:
        save_table(table, args.save)
    idx_max = int(np.argmax(table.energies))
    report = {
        "mixture": format_mixture(spec),
        "n": table.n,
        "configurations": int(table.energies.size),
        "max_energy": float(table.energies[idx_max]),
        "max_energy_per_site": float(table.energies[idx_max] / table.n),
        "argmax_config": idx_max,
        "min_energy": float(table.energies.min()),
    }
    if args.beta is not None:
        report["beta"] = args.beta
        report["log_partition"] = log_partition(table, args.beta)
    return report, None


def _run_shatter(args: argparse.Namespace):
    seed = _require_seed(args)
    _check_sites(args.n)
    spec = args.mixture
    _warn_beta(spec, args.beta)
    if (args.band is None) == (args.auto_band is None):
        raise DomainError("exactly one of --band or --auto-band is required")
    if args.auto_band is not None:
        p, eps_prime = args.auto_band
        band_rep = ogp_band_pure_p(p, eps_prime)
        if not band_rep.feasible:
            report = {
                "feasible": False,
                "p": p,
                "eps_prime": eps_prime,
                "reasons": list(band_rep.reasons),
            }
            return report, [
                {"feasible": False, "p": p, "eps_prime": eps_prime,
                 "reason": "; ".join(band_rep.reasons)}
            ]
        band = band_rep.band
    else:
        q_low, q_high = args.band
        band = OgpBand(q_low=q_low, q_high=q_high)
    params = ShatterParams(beta=args.beta, eps=args.eps, band=band)
    g = sample_null(args.n, spec, seed)
    table = enumerate_table(g, workers=_workers(args))
    regular = regular_set(table, params)
    dec = build_clusters(regular, band, args.n, params=params)
    rep = verify_decomposition(dec, table, beta=args.beta)
    report = _jsonable(rep)
    report["feasible"] = True
    report["regular_size"] = int(len(regular))
    rows = [
        {
            "cluster": i,
            "size": dec.sizes[i],
            "representative": dec.representatives[i],
            "mass": rep.cluster_masses[i],
            "diameter": rep.cluster_diameters[i],
            "num_clusters": rep.num_clusters,
            "coverage": rep.coverage,
        }
        for i in range(dec.num_clusters)
    ]
    return report, rows


def _run_ogp(args: argparse.Namespace):
    seed = _require_seed(args)
    spec = args.mixture
    mode = args.mode
    if mode == "sf":
        if args.q is None:
            raise DomainError("--q is required for sf mode")
        _check_sites(args.n)
        mean, se = sf_empirical(spec, args.n, args.q, args.replicas, seed)
        bound = sf_bound(spec, args.n, args.q)
        report = {
            "mode": "sf", "n": args.n, "q": args.q, "replicas": args.replicas,
            "mean": mean, "std_error": se, "bound": bound,
            "within_bound": bool(mean <= bound),
        }
        return report, None
    if mode in ("soft-null", "soft-planted"):
        _check_sites(args.n)
        _need(args, "beta", "beta_prime", "band", "tau")
        _warn_beta(spec, args.beta)
        q_low, q_high = args.band
        est = soft_ogp_estimate(
            mode="null_model" if mode == "soft-null" else "planted_model",
            n=args.n, spec=spec, beta=args.beta, beta_prime=args.beta_prime,
            band=OgpBand(q_low=q_low, q_high=q_high), tau=args.tau,
            outer_replicas=args.replicas, inner_samples=args.inner,
            seed=seed, workers=_workers(args),
        )
        return _jsonable(est), None
    if mode == "tau1":
        _check_sites(args.n)
        _need(args, "beta", "q_low")
        _warn_beta(spec, args.beta)
        est, se = tau1_probability(
            args.n, spec, args.beta, args.q_low, args.replicas, seed,
            workers=_workers(args),
        )
        report = {
            "mode": "tau1", "n": args.n, "beta": args.beta,
            "q_low": args.q_low, "replicas": args.replicas,
            "estimate": est, "std_error": se,
        }
        return report, None
    if mode == "membership":
        _check_sites(args.n)
        _need(args, "beta_prime", "band", "tau", "c")
        q_low, q_high = args.band
        g = sample_null(args.n, spec, rng.derive(seed, rng.TAG_COUPLING))
        res = exceptional_membership(
            args.sigma, g, args.beta_prime,
            OgpBand(q_low=q_low, q_high=q_high), args.tau, args.c,
            args.inner, rng.derive(seed, rng.TAG_WITNESS),
            workers=_workers(args),
        )
        report = _jsonable(res)
        report["mode"] = "membership"
        report["sigma"] = args.sigma
        return report, None
    if mode == "mass":
        _check_sites(args.n)
        _need(args, "beta", "beta_prime", "band", "c")
        _warn_beta(spec, args.beta)
        q_low, q_high = args.band
        tensors = [
            sample_null(args.n, spec, rng.derive(seed, rng.TAG_COUPLING, i))
            for i in range(args.tensors)
        ]
        est = exceptional_mass(
            tensors, args.beta, args.beta_prime,
            OgpBand(q_low=q_low, q_high=q_high), args.grid_k, args.c,
            args.replicas, rng.derive(seed, rng.TAG_GIBBS),
            workers=_workers(args), detail=True,
        )
        report = {
            "mode": "mass", "n": args.n, "beta": args.beta,
            "beta_prime": args.beta_prime, "grid_k": args.grid_k,
            "c": args.c, "tensors": args.tensors, "replicas": args.replicas,
            "mass": est.mass, "std_error": est.std_error,
            "threshold": est.threshold, "grid": list(est.grid),
        }
        return report, None
    raise DomainError(f"unknown ogp mode: {mode}")


def _need(args: argparse.Namespace, *names: str) -> None:
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise DomainError(f"mode {args.mode}: missing {flags}")


def _build_algorithm(args: argparse.Namespace, n: int):
    name = args.algorithm
    if name == "constant":
        return baseline_constant(np.ones(n))
    if name == "diagonal":
        return baseline_diagonal(args.scale)
    if name == "greedy":
        return baseline_greedy(args.sweeps)
    if name == "hash":
        return baseline_hash_control(args.claimed_lipschitz)
    raise DomainError(f"unknown algorithm: {name}")


def _run_chi(args: argparse.Namespace):
    seed = _require_seed(args)
    spec = args.mixture
    alg = _build_algorithm(args, args.n)
    curve = chi_estimate(alg, args.n, spec, args.tau_grid, args.replicas, seed)
    report = {
        "algorithm": alg.name,
        "n": args.n,
        "mixture": format_mixture(spec),
        "replicas": args.replicas,
        "taus": list(curve.taus),
        "estimates": list(curve.estimates),
        "std_errors": list(curve.std_errors),
    }
    rows = [
        {"tau": t, "chi": v, "std_error": s}
        for t, v, s in zip(curve.taus, curve.estimates, curve.std_errors)
    ]
    if args.check_tau is not None:
        check = chi_concentration_check(
            alg, args.n, spec, args.check_tau, args.replicas, args.t_grid,
            rng.derive(seed, rng.TAG_REPLICA, 0xC0C),
        )
        report["concentration"] = _jsonable(check)
    if args.band is not None:
        q_low, q_high = args.band
        sel = grid_tau_select(
            curve, OgpBand(q_low=q_low, q_high=q_high),
            delta=args.delta, L=alg.lipschitz,
        )
        report["selection"] = _jsonable(sel)
    return report, rows


def _run_rarity(args: argparse.Namespace):
    seed = _require_seed(args)
    _check_sites(args.n)
    spec = args.mixture
    _warn_beta(spec, args.beta)
    q_low, q_high = args.band
    alg = _build_algorithm(args, args.n)
    rep = rarity_report(
        alg, args.n, spec, args.beta, args.beta_prime,
        OgpBand(q_low=q_low, q_high=q_high), args.grid_k, args.c,
        args.replicas, seed, inner_replicas=args.inner,
        mass_tensors=args.mass_tensors, mass_samples=args.mass_samples,
        workers=_workers(args),
    )
    report = _jsonable(rep)
    rows = [
        {
            "algorithm": rep.algorithm,
            "n": rep.n,
            "beta": rep.beta,
            "beta_prime": rep.beta_prime,
            "p_not_in_s_beta": rep.p_not_in_s_beta,
            "p_not_in_s_beta_prime": rep.p_not_in_s_beta_prime,
            "p_in_exceptional": rep.p_in_exceptional,
            "gibbs_exceptional_mass": rep.gibbs_exceptional_mass,
            "combined_lhs": rep.combined_lhs,
        }
    ]
    return report, rows


# --------------------------------------------------------------------------
# parser assembly


def _add_common(sub: argparse.ArgumentParser, stochastic: bool) -> None:
    sub.add_argument("--config", help="flat key=value config file")
    sub.add_argument("--format", choices=("json", "csv"), default="json")
    sub.add_argument("--out", help="output path (default stdout)")
    sub.add_argument("--workers", type=int, default=None,
                     help="worker count (default: PSPINLAB_WORKERS)")
    if stochastic:
        sub.add_argument("--seed", type=int, default=None,
                         help="master seed (required; no silent entropy)")


def _build_parser() -> tuple[_Parser, dict[str, argparse.ArgumentParser]]:
    parser = _Parser(prog="pspinlab", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    subparsers = parser.add_subparsers(dest="subcommand", required=True,
                                       parser_class=_Parser)
    table: dict[str, argparse.ArgumentParser] = {}

    s = subparsers.add_parser("thresholds", help="replica and large-p scalars")
    s.add_argument("--mixture", type=_mixture, default=None)
    s.add_argument("--which", default="all",
                   choices=("all", "beta_d", "bar_beta_d", "e_alg",
                            "constants", "band"))
    s.add_argument("--p", type=int, default=None,
                   help="degree for pure-p scalars when the mixture is not pure")
    s.add_argument("--eps-prime", type=float, default=0.5)
    s.add_argument("--rate-c", type=float, default=0.1)
    s.set_defaults(func=_run_thresholds)
    table["thresholds"] = s

    s = subparsers.add_parser("disorder", help="sample coupling tensors")
    s.add_argument("--mixture", type=_mixture, default=None)
    s.add_argument("--n", type=int, default=None)
    s.add_argument("--planted-beta", type=float, default=None)
    s.add_argument("--save", help="write the tensor to this path")
    s.set_defaults(func=_run_disorder)
    table["disorder"] = s

    s = subparsers.add_parser("enumerate", help="exact energy tables")
    s.add_argument("--mixture", type=_mixture, default=None)
    s.add_argument("--n", type=int, default=None)
    s.add_argument("--beta", type=float, default=None,
                   help="also report log Z at this inverse temperature")
    s.add_argument("--save", help="write the table to this path")
    s.set_defaults(func=_run_enumerate)
    table["enumerate"] = s

    s = subparsers.add_parser("shatter", help="cluster decompositions")
    s.add_argument("--mixture", type=_mixture, default=None)
    s.add_argument("--n", type=int, default=None)
    s.add_argument("--beta", type=float, default=None)
    s.add_argument("--eps", type=float, default=0.2,
                   help="energy band width (eps/2 on each side)")
    s.add_argument("--band", type=_band_pair, default=None,
                   help="q_low,q_high overlap window")
    s.add_argument("--auto-band", type=_auto_band_pair, default=None,
                   help="p,eps_prime: construct the window from the pure-p recipe")
    s.set_defaults(func=_run_shatter)
    table["shatter"] = s

    s = subparsers.add_parser("ogp", help="overlap-gap probes")
    s.add_argument("--mode", default=None,
                   choices=("sf", "soft-null", "soft-planted", "tau1",
                            "membership", "mass"))
    s.add_argument("--mixture", type=_mixture, default=None)
    s.add_argument("--n", type=int, default=None)
    s.add_argument("--q", type=float, default=None, help="slice overlap (sf)")
    s.add_argument("--q-low", type=float, default=None, help="threshold (tau1)")
    s.add_argument("--beta", type=float, default=None)
    s.add_argument("--beta-prime", type=float, default=None)
    s.add_argument("--band", type=_band_pair, default=None)
    s.add_argument("--tau", type=float, default=None)
    s.add_argument("--c", type=float, default=None, help="exceptional rate")
    s.add_argument("--grid-k", type=int, default=8, help="tau grid size (mass)")
    s.add_argument("--sigma", type=int, default=0,
                   help="configuration index to test (membership)")
    s.add_argument("--replicas", type=int, default=100)
    s.add_argument("--inner", type=int, default=32)
    s.add_argument("--tensors", type=int, default=8,
                   help="number of disorders (mass)")
    s.set_defaults(func=_run_ogp)
    table["ogp"] = s

    s = subparsers.add_parser("chi", help="algorithm stability curves")
    s.add_argument("--algorithm", default=None,
                   choices=("constant", "diagonal", "greedy", "hash"))
    s.add_argument("--mixture", type=_mixture, default=None)
    s.add_argument("--n", type=int, default=None)
    s.add_argument("--tau-grid", type=_float_list,
                   default=(0.0, 0.25, 0.5, 0.75, 1.0))
    s.add_argument("--replicas", type=int, default=100)
    s.add_argument("--scale", type=float, default=0.05,
                   help="diagonal baseline gain")
    s.add_argument("--sweeps", type=int, default=100,
                   help="greedy baseline sweep cap")
    s.add_argument("--claimed-lipschitz", type=float, default=0.01,
                   help="hash control's (false) claim")
    s.add_argument("--check-tau", type=float, default=None,
                   help="also run the concentration check at this tau")
    s.add_argument("--t-grid", type=_float_list, default=(0.05, 0.1, 0.2))
    s.add_argument("--band", type=_band_pair, default=None,
                   help="also run grid selection against this window")
    s.add_argument("--delta", type=float, default=None)
    s.set_defaults(func=_run_chi)
    table["chi"] = s

    s = subparsers.add_parser("rarity", help="algorithm vs Gibbs geometry")
    s.add_argument("--algorithm", default=None,
                   choices=("constant", "diagonal", "greedy", "hash"))
    s.add_argument("--mixture", type=_mixture, default=None)
    s.add_argument("--n", type=int, default=None)
    s.add_argument("--beta", type=float, default=None)
    s.add_argument("--beta-prime", type=float, default=None)
    s.add_argument("--band", type=_band_pair, default=None)
    s.add_argument("--grid-k", type=int, default=4)
    s.add_argument("--c", type=float, default=1.0)
    s.add_argument("--replicas", type=int, default=20)
    s.add_argument("--inner", type=int, default=64)
    s.add_argument("--mass-tensors", type=int, default=None)
    s.add_argument("--mass-samples", type=int, default=16)
    s.add_argument("--scale", type=float, default=0.05)
    s.add_argument("--sweeps", type=int, default=100)
    s.add_argument("--claimed-lipschitz", type=float, default=0.01)
    s.set_defaults(func=_run_rarity)
    table["rarity"] = s

    for name, sub in table.items():
        _add_common(sub, stochastic=name in _STOCHASTIC)
    return parser, table


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, table = _build_parser()
    try:
        if "--config" in argv:
            idx = argv.index("--config")
            if idx + 1 >= len(argv):
                parser.error("--config needs a path")
            if not argv or argv[0] not in table:
                parser.error("--config requires a subcommand")
            _apply_config(table[argv[0]], _load_config(argv[idx + 1]))
        args = parser.parse_args(argv)
        for dest in _REQUIRED[args.subcommand]:
            if getattr(args, dest) is None:
                table[args.subcommand].error(
                    f"argument --{dest.replace('_', '-')} is required"
                )
        start = time.perf_counter()
        report, rows = args.func(args)
        _emit(args, report, rows)
        print(f"wall_time_s={time.perf_counter() - start:.3f}", file=sys.stderr)
        return 0
    except ResourceCapError as exc:
        print(f"pspinlab: resource cap: {exc}", file=sys.stderr)
        return 3
    except AccuracyError as exc:
        print(f"pspinlab: accuracy failure: {exc}", file=sys.stderr)
        return 2
    except (DomainError, ValueError) as exc:
        print(f"pspinlab: invalid input: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"pspinlab: i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
