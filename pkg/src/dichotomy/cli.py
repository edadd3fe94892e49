"""Command-line surface.

Commands: analyze | green | project | solve | bounds | torus | scan.
Exit statuses: 0 success (verdicts, including "not hyperbolic" from
``analyze``, are successes), 2 contract violation, 3 numerical failure,
4 refusal because spectrum obstructs a construction whose precondition
is hyperbolicity (or lattice/line spectrum freeness).

A JSON config file may mirror the flags (flags win); unknown keys are
rejected.  All randomness (probe forcing, probe vectors) flows from the
single seed, and JSON outputs are byte-deterministic for a fixed config.
"""

import argparse
import json
import sys
from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from . import bounds as bounds_mod
from . import green as green_mod
from . import io as io_mod
from . import multiplier as mult_mod
from . import perron as perron_mod
from .errors import DichotomyError, InputError
from .operator_core import spectral_analysis
from .summation import QuadratureParams

COMMANDS = ("analyze", "green", "project", "solve", "bounds", "torus", "scan")

_CONFIG_KEYS = {
    "command", "input", "output", "alpha", "rho", "p",
    "trunc_s", "grid_h", "fejer_n", "seed", "tolerance",
    # artifact plumbing beyond the flag set:
    "forcing",   # path to a GridFunction CSV used by `solve`
    "times",     # sample times used by `green`
}


@dataclass
class RunConfig:
    command: str
    input: str
    output: str
    alpha: float = 0.0
    rho: float = 0.0
    p: float = 2.0
    trunc_s: Optional[float] = None
    grid_h: Optional[float] = None
    fejer_n: Optional[float] = None
    seed: int = 0
    tolerance: float = 1e-3
    forcing: Optional[str] = None
    times: Optional[list] = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}; expected one of {COMMANDS}")

    def quadrature(self, default):
        s = self.trunc_s if self.trunc_s is not None else default.truncation
        h = self.grid_h if self.grid_h is not None else default.spacing
        n = self.fejer_n if self.fejer_n is not None else min(default.fejer_n, s)
        ladder = [(s / 4.0, h, n / 4.0), (s / 2.0, h, n / 2.0), (s, h, n)]
        return QuadratureParams.from_ladder(ladder, tolerance=self.tolerance)


def _load_config_file(path):
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise InputError("config file must hold a JSON object")
    unknown = set(doc) - _CONFIG_KEYS
    if unknown:
        raise InputError(f"unknown config keys: {sorted(unknown)}")
    return doc


def parse_args(argv):
    ap = argparse.ArgumentParser(
        prog="dichotomy",
        description="Hyperbolicity, Green's functions, and growth bounds of matrix semigroups",
    )
    ap.add_argument("command", nargs="?", choices=COMMANDS)
    ap.add_argument("--config", help="JSON config file mirroring the flags (flags win)")
    ap.add_argument("--input", help="matrix JSON path")
    ap.add_argument("--output", help="output artifact path")
    ap.add_argument("--alpha", type=float, help="smoothing exponent (bounds)")
    ap.add_argument("--rho", type=float, help="vertical-line shift")
    ap.add_argument("--p", type=float, help="Lebesgue exponent for multiplier estimates")
    ap.add_argument("--trunc-S", dest="trunc_s", type=float, help="integration truncation radius")
    ap.add_argument("--grid-h", dest="grid_h", type=float, help="integration grid spacing")
    ap.add_argument("--fejer-N", dest="fejer_n", type=float, help="Fejer averaging parameter")
    ap.add_argument("--seed", type=int, help="seed for every probe/corpus draw")
    ap.add_argument("--tolerance", type=float, help="ladder stabilization tolerance")
    ns = ap.parse_args(argv)

    merged = {}
    if ns.config:
        merged.update(_load_config_file(ns.config))
    for name in ("command", "input", "output", "alpha", "rho", "p", "trunc_s",
                 "grid_h", "fejer_n", "seed", "tolerance"):
        val = getattr(ns, name)
        if val is not None:
            merged[name] = val
    missing = [k for k in ("command", "input", "output") if not merged.get(k)]
    if missing:
        raise InputError(f"missing required settings: {missing}")
    known = {f.name for f in fields(RunConfig)}
    return RunConfig(**{k: v for k, v in merged.items() if k in known})


def _report_dict(report):
    return {
        "is_hyperbolic": report.is_hyperbolic,
        "gap": report.gap,
        "projection": None if report.projection is None
        else io_mod.matrix_to_json_dict(report.projection),
        "constant_K": report.constant,
        "rate_omega": report.rate,
        "provenance": report.provenance,
        "oracle_discrepancy": report.oracle_discrepancy,
        "projection_defect": report.projection_defect,
        "cesaro_converged": report.converged,
        "sup_green_norm": report.sup_green_norm,
    }


def _cmd_analyze(cfg, gen):
    report = green_mod.splitting_projection(gen)
    io_mod.atomic_write_text(cfg.output, io_mod.canonical_json(_report_dict(report)))
    return 0


def _cmd_project(cfg, gen):
    report = green_mod.splitting_projection(gen)
    if report.projection is None:
        doc = {"projection": None, "oracle_discrepancy": report.oracle_discrepancy,
               "is_hyperbolic": report.is_hyperbolic}
    else:
        doc = io_mod.matrix_to_json_dict(report.projection)
        doc["oracle_discrepancy"] = report.oracle_discrepancy
        doc["is_hyperbolic"] = report.is_hyperbolic
    io_mod.atomic_write_text(cfg.output, io_mod.canonical_json(doc))
    return 0


def _cmd_green(cfg, gen):
    times = cfg.times
    if times is None:
        times = [t for k in range(1, 13) for t in (0.25 * k, -0.25 * k)]
    params = cfg.quadrature(QuadratureParams.default_green())
    samples = green_mod.green_samples(gen, times, params=params)
    io_mod.green_samples_to_csv(samples, cfg.output)
    return 0


def _default_forcing(cfg, gen):
    spec = spectral_analysis(gen)
    gap = max(spec.gap, 0.2)
    half = 5.0 + 10.0 / gap
    h = cfg.grid_h if cfg.grid_h is not None else 0.02
    rng = np.random.default_rng(cfg.seed)
    v = rng.standard_normal(gen.n) + 1j * rng.standard_normal(gen.n)
    v /= np.linalg.norm(v)
    return mult_mod.GridFunction.centered(
        lambda s: np.exp(-(s**2))[:, None] * v[None, :], half, h
    )


def _cmd_solve(cfg, gen):
    if cfg.forcing:
        g = io_mod.gridfunction_from_csv(cfg.forcing)
    else:
        g = _default_forcing(cfg, gen)
    sol = perron_mod.solve_mild(gen, g)
    io_mod.gridfunction_to_csv(sol.u, cfg.output)
    residuals = {
        "max_residual": sol.max_residual,
        "pairs": [{"theta": th, "tau": ta, "residual": r} for th, ta, r in sol.residual_table],
    }
    io_mod.atomic_write_text(cfg.output + ".residuals.json", io_mod.canonical_json(residuals))
    return 0


def _cmd_bounds(cfg, gen):
    probes = mult_mod.ProbeFamily(seed=cfg.seed, widths=(2.0, 8.0), n_random_vectors=1,
                                  halfwidth=120.0, spacing=0.05)
    report = bounds_mod.compute_bounds(gen, cfg.alpha, p=cfg.p, probes=probes)
    doc = {
        "alpha": report.alpha,
        "s0": report.s0,
        "s_alpha": report.s_alpha,
        "omega_alpha_decay": report.omega_alpha_decay,
        "omega_alpha_multiplier": report.omega_alpha_multiplier,
    }
    io_mod.atomic_write_text(cfg.output, io_mod.canonical_json(doc))
    return 0


def _cmd_torus(cfg, gen):
    rng = np.random.default_rng(cfg.seed)
    m = 6
    coeffs = (rng.standard_normal((2 * m + 1, gen.n))
              + 1j * rng.standard_normal((2 * m + 1, gen.n)))
    coeffs /= np.linalg.norm(coeffs)
    f = mult_mod.TorusFunction(coeffs, m)
    klt = mult_mod.check_klt_identity(gen, f)
    rng_vec = rng.standard_normal(gen.n) + 1j * rng.standard_normal(gen.n)
    rng_vec /= np.linalg.norm(rng_vec)
    ces = mult_mod.cesaro_resolvent_sum(gen, rng_vec, tolerance=cfg.tolerance)
    doc = {
        "klt_residual": klt,
        "f_norm": f.norm(),
        "cesaro": {
            "converged": ces.converged,
            "residual_estimate": ces.residual_estimate,
            "identity_residual": ces.identity_residual,
        },
    }
    io_mod.atomic_write_text(cfg.output, io_mod.canonical_json(doc))
    return 0


def _cmd_scan(cfg, gen):
    result = mult_mod.annulus_scan(gen)
    lines = ["re_z,im_z,norm,flagged"]
    for z, norm, flagged in result.table:
        lines.append(
            f"{format(z.real, '.17g')},{format(z.imag, '.17g')},"
            f"{format(norm, '.17g')},{int(flagged)}"
        )
    io_mod.atomic_write_text(cfg.output, "\n".join(lines) + "\n")
    return 0


_DISPATCH = {
    "analyze": _cmd_analyze,
    "green": _cmd_green,
    "project": _cmd_project,
    "solve": _cmd_solve,
    "bounds": _cmd_bounds,
    "torus": _cmd_torus,
    "scan": _cmd_scan,
}


def run(cfg: RunConfig):
    """Execute one command; returns the process exit status."""
    try:
        gen = io_mod.load_matrix_json(cfg.input)
        return _DISPATCH[cfg.command](cfg, gen)
    except DichotomyError as exc:
        print(f"dichotomy {cfg.command}: {exc}", file=sys.stderr)
        return exc.exit_status
    except FileNotFoundError as exc:
        print(f"dichotomy {cfg.command}: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"dichotomy {cfg.command}: invalid JSON input: {exc}", file=sys.stderr)
        return 2


def main(argv=None):
    try:
        cfg = parse_args(sys.argv[1:] if argv is None else argv)
    except DichotomyError as exc:
        print(f"dichotomy: {exc}", file=sys.stderr)
        return 2
    status = run(cfg)
    sys.exit(status)


if __name__ == "__main__":
    main()
