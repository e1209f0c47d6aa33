"""Command-line front end: ``mcelab <subcommand> [--key value ...]``.

Every subcommand reads its parameters from built-in defaults, then an
optional flat ``key=value`` file (``--config``), then command-line flags.
Exit status: 0 when every check passes, 1 on a verification failure,
2 on a usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import exponents, inequality_lab, liouville, morrey, stability
from .errors import DomainError, EigenSolveError, QuadratureError, SolverError
from .nonlinearity import Constant, Zero, parse_nonlinearity
from .numerics import Interval
from .radial_solver import SlabProfile, cap_profile, residual_radial, solve_radial_ivp
from .reports import jsonable, output_dir, write_csv, write_json

DEFAULT_SEED = 42

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _int_range(text: str) -> tuple[int, int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return int(lo), int(hi)
    return int(text), int(text)


def _float_list(text: str) -> list[float]:
    return [float(t) for t in str(text).split(",") if t.strip()]


_NL_KEYS = {
    "family": (str, "constant"),
    "lambda": (float, None),
    "coeffs": (str, None),
    "a": (float, None),
}

# subcommand -> {key: (parser, default)}
PARAMS: dict[str, dict[str, tuple[Callable, object]]] = {
    "exponents": {"n": (_int_range, (2, 12))},
    "solve-radial": {**_NL_KEYS, "n": (int, 3), "u0": (float, 0.0), "R": (float, 1.0),
                     "tol": (float, 1e-10)},
    "stability": {**_NL_KEYS, "mode": (str, "radial"), "n": (int, 3), "u0": (float, 0.0),
                  "R": (float, 1.0), "lo": (float, 0.0), "hi": (float, None), "m": (int, 1000),
                  "tol": (float, 1e-10)},
    "morrey": {"profile": (str, "slab"), "a": (float, 0.75), "n": (int, 3), "p": (float, None),
               "diam": (float, None), "lambda": (float, None), "center_grid": (int, 33),
               "radius_grid": (int, 13)},
    "counterexample": {"a": (float, 0.75), "n": (int, 3), "b": (float, 0.5), "trials": (int, 200),
                       "mesh": (int, 2000)},
    "hardy": {"beta": (_float_list, [1.5, 2.0, 3.0, 4.0]), "trials": (int, 1000), "degree": (int, 8)},
    "key-estimate": {"n": (int, 3), "a": (float, None), "rho": (_float_list, [0.05, 0.1, 0.2]),
                     "R": (_float_list, [0.3, 0.4])},
    "liouville": {"n": (int, 3), "rho": (float, 0.1), "R": (float, 0.4), "regime": (str, "radial"),
                  "R_list": (_float_list, None)},
}


@dataclass
class RunConfig:
    subcommand: str
    params: dict
    out_dir: Path
    seed: int = DEFAULT_SEED
    tolerances: dict = field(default_factory=dict)


def read_config_file(path) -> dict[str, str]:
    """Flat ``key=value`` lines; ``#`` starts a comment."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def build_config(sub: str, ns: argparse.Namespace) -> RunConfig:
    spec = PARAMS[sub]
    raw: dict[str, object] = {}
    seed = DEFAULT_SEED
    if ns.config:
        for key, value in read_config_file(ns.config).items():
            if key == "seed":
                seed = int(value)
                continue
            if key not in spec:
                raise UsageError(f"unknown config key {key!r} for {sub}")
            raw[key] = value
    for key in spec:
        value = getattr(ns, key, None)
        if value is not None:
            raw[key] = value
    if ns.seed is not None:
        seed = ns.seed
    params = {}
    for key, (conv, default) in spec.items():
        if key in raw:
            value = raw[key]
            try:
                params[key] = conv(value) if isinstance(value, str) else value
            except ValueError as exc:
                raise UsageError(f"bad value for {key}: {value!r} ({exc})") from None
        else:
            params[key] = default
    return RunConfig(sub, params, output_dir(ns.out), seed)


def _nonlinearity(params):
    cfg = {k: params[k] for k in _NL_KEYS if params.get(k) is not None}
    return parse_nonlinearity(cfg)


def _emit(cfg: RunConfig, name: str, payload: dict, csv_text: Optional[str] = None) -> None:
    write_json(cfg.out_dir / f"{name}.json", {"subcommand": cfg.subcommand, "seed": cfg.seed,
                                               "params": cfg.params, **payload})
    if csv_text is not None:
        write_csv(cfg.out_dir / f"{name}.csv", csv_text)


def run_exponents(cfg: RunConfig) -> int:
    lo, hi = cfg.params["n"]
    text = exponents.table_csv(exponents.table(lo, hi))
    write_csv(cfg.out_dir / "exponents.csv", text)
    sys.stdout.write(text)
    return EXIT_OK


def run_solve_radial(cfg: RunConfig) -> int:
    p = cfg.params
    nl = _nonlinearity(p)
    prof = solve_radial_ivp(nl, p["n"], p["u0"], p["R"], tol=p["tol"])
    res = residual_radial(prof, nl)
    ok = res <= 1e-6
    _emit(cfg, "solve_radial", {"stop_reason": prof.stop_reason, "r_max": prof.r_max,
                                "residual": res, "passed": ok}, prof.to_csv())
    print(f"stop_reason={prof.stop_reason} r_max={prof.r_max:.6g} residual={res:.3e}")
    return EXIT_OK if ok else EXIT_FAIL


def run_stability(cfg: RunConfig) -> int:
    p = cfg.params
    if p["mode"] == "slab":
        if p["a"] is None:
            raise UsageError("slab mode needs a=")
        a = p["a"]
        r0 = inequality_lab.compute_r0(a, inequality_lab.lambda_star(a))[1]
        from .nonlinearity import CounterexampleF

        rep = stability.min_eigenvalue_slab(SlabProfile(p["n"], a), CounterexampleF(a),
                                            p["hi"] or r0, m=p["m"])
    elif p["mode"] == "radial":
        nl = _nonlinearity(p)
        prof = solve_radial_ivp(nl, p["n"], p["u0"], p["R"], tol=p["tol"])
        hi = p["hi"] if p["hi"] is not None else prof.r_max
        rep = stability.min_eigenvalue_radial(prof, nl, Interval(p["lo"], hi), m=p["m"])
    else:
        raise UsageError(f"unknown stability mode {p['mode']!r}")
    _emit(cfg, "stability", rep.to_dict())
    print(f"{rep.label}: min_eigenvalue={rep.min_eigenvalue:.9g}")
    # an unstable verdict is a result, not a failure
    return EXIT_OK


def run_morrey(cfg: RunConfig) -> int:
    p = cfg.params
    n = p["n"]
    if p["profile"] == "slab":
        prof = SlabProfile(n, p["a"])
        pexp = p["p"] if p["p"] is not None else n / p["a"]
    elif p["profile"] == "cap":
        lam = p["lambda"] if p["lambda"] is not None else float(n)
        prof = cap_profile(n, lam, 0.0, np.linspace(0.0, 0.99 * n / lam, 200))
        pexp = p["p"] if p["p"] is not None else float(n)
    elif p["profile"] == "constant":
        prof = morrey.RadialDensity(n, lambda r: np.ones_like(r))
        pexp = p["p"] if p["p"] is not None else float(n)
        if p["diam"] is None:
            raise UsageError("constant profile needs diam=")
    else:
        raise UsageError(f"unknown morrey profile {p['profile']!r}")
    rep = morrey.morrey_constant(prof, pexp, diam=p["diam"], center_grid=p["center_grid"],
                                 radius_grid=p["radius_grid"])
    _emit(cfg, "morrey", rep.to_dict(), rep.to_csv())
    print(f"K={rep.K:.9g} worst_center={rep.worst_center:.6g} worst_radius={rep.worst_radius:.6g} "
          f"scaling_slope={rep.scaling_slope:.6g} growth_rate={rep.growth_rate:.6g}")
    return EXIT_OK


def run_counterexample(cfg: RunConfig) -> int:
    p = cfg.params
    rep = inequality_lab.counterexample_verify(p["a"], p["n"], report_detail=True, b=p["b"],
                                               trials=p["trials"], seed=cfg.seed, mesh=p["mesh"])
    _emit(cfg, "counterexample", rep.to_dict())
    for c in rep.checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.check_id} margin={c.margin:.3e}")
    return EXIT_OK if rep.passed else EXIT_FAIL


def run_hardy(cfg: RunConfig) -> int:
    p = cfg.params
    reps = inequality_lab.hardy_fuzz(betas=p["beta"], trials=p["trials"], seed=cfg.seed, degree=p["degree"])
    bad = [r for r in reps if r.margin < -1e-8 * (1 + r.rhs)]
    lines = ["beta,trial,lhs,rhs,margin"]
    lines += [f"{r.params['beta']!r},{r.params['trial']},{r.lhs!r},{r.rhs!r},{r.margin!r}" for r in reps]
    worst = min(reps, key=lambda r: r.margin / (1 + r.rhs))
    _emit(cfg, "hardy", {"cases": len(reps), "failures": len(bad), "worst": worst.to_dict(),
                         "passed": not bad}, "\n".join(lines) + "\n")
    print(f"cases={len(reps)} failures={len(bad)} worst_margin={worst.margin:.3e}")
    return EXIT_OK if not bad else EXIT_FAIL


def run_key_estimate(cfg: RunConfig) -> int:
    p = cfg.params
    n = p["n"]
    a_values = [p["a"]] if p["a"] is not None else [exponents.a_liouville(n, radial=True), (n - 1 + 0.5) / 2]
    prof = cap_profile(n, float(n), 0.0, np.linspace(0.0, 0.99, 200))
    rows, out, ok = ["n,a,rho,R,lhs,rhs,margin"], [], True
    for a in a_values:
        for rho in p["rho"]:
            for R in p["R"]:
                rep = inequality_lab.key_estimate_radial(prof, Constant(float(n)), n, a, rho, R)
                ok &= rep.margin >= -1e-6
                out.append(rep.to_dict())
                rows.append(f"{n},{a!r},{rho!r},{R!r},{rep.lhs!r},{rep.rhs!r},{rep.margin!r}")
    _emit(cfg, "key_estimate", {"reports": out, "passed": ok}, "\n".join(rows) + "\n")
    print(f"cases={len(out)} min_margin={min(r['margin'] for r in out):.6g}")
    return EXIT_OK if ok else EXIT_FAIL


def run_liouville(cfg: RunConfig) -> int:
    p = cfg.params
    n = p["n"]
    prof = cap_profile(n, float(n), 0.0, np.linspace(0.0, 0.99, 200))
    ineq = liouville.liouville_inequality_radial(prof, n, p["rho"], p["R"])
    R_list = p["R_list"] or liouville.default_R_list(0.99 / 64)
    verdict = liouville.growth_classify(prof, n, p["regime"], R_list)
    csv_text = liouville.annulus_sweep_csv(prof, R_list, "z_weighted")
    _emit(cfg, "liouville", {"inequality": ineq.to_dict(), "growth": verdict.to_dict()}, csv_text)
    print(f"required_C={ineq.params['required_C']:.6g} verdict={verdict.verdict}")
    return EXIT_OK


HANDLERS = {
    "exponents": run_exponents,
    "solve-radial": run_solve_radial,
    "stability": run_stability,
    "morrey": run_morrey,
    "counterexample": run_counterexample,
    "hardy": run_hardy,
    "key-estimate": run_key_estimate,
    "liouville": run_liouville,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mcelab", description="Numerical experiments for stable solutions "
                                                "of the prescribed mean curvature equation.")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    for name, spec in PARAMS.items():
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="flat key=value file")
        sp.add_argument("--out", help="output directory (default: $MCELAB_OUT or ./mcelab_out)")
        sp.add_argument("--seed", type=int, default=None, help=f"corpus seed (default {DEFAULT_SEED})")
        for key, (_, default) in spec.items():
            flag = "--" + key.replace("_", "-")
            sp.add_argument(flag, dest=key, default=None, help=f"default: {default}")
    return parser


def main(argv=None) -> int:
    try:
        ns = make_parser().parse_args(argv)
        cfg = build_config(ns.subcommand, ns)
        return HANDLERS[ns.subcommand](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QuadratureError, SolverError, EigenSolveError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
