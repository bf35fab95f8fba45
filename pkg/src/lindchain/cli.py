"""Config-driven experiment runner and command line interface.

Verbs:
    lindchain run <config.yaml> [-o DIR]     execute an experiment
    lindchain validate <config.yaml>         check a config, list violations
    lindchain presets list                   bundled experiment names
    lindchain presets export <name> [-o F]   copy a bundled preset

Exit codes: 0 success, 2 configuration error, 3 numeric/runtime failure.
The environment variable ``LINDCHAIN_OUTPUT_DIR`` overrides the output
directory.  Identical config plus seed produces byte-identical outputs.
"""

import argparse
import hashlib
import itertools
import json
import os
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import kernels
from .config import ExperimentConfig, load_config, parse_config
from .errors import ConfigError, LindchainError
from .dynamics import CorrelationKind, CorrelationState, propagate
from .mpemba import (_CurveContext, DistanceCurve, detect_crossings,
                     fit_exponential_rate, fit_power_law, model_fingerprint,
                     rescaled_curve, resolve_steady_state)
from .model import Boundary, build_chain_model, effective_hamiltonian
from .oracle import (MAX_ORACLE_SITES, build_fock_operators,
                     build_liouvillian, correlation_from_rho,
                     evolve_trajectory, liouvillian_spectrum,
                     product_state_rho, steady_state_rho)
from .spectral import biorthogonal_eigensystem, localization_profile

_ENV_OUTPUT = "LINDCHAIN_OUTPUT_DIR"


def _fmt(x: float) -> str:
    return format(float(x), ".17e")


def _csv_bytes(header, columns) -> bytes:
    lines = [",".join(header)]
    n = len(columns[0])
    for i in range(n):
        lines.append(",".join(_fmt(col[i]) for col in columns))
    return ("\n".join(lines) + "\n").encode()


def _json_bytes(obj) -> bytes:
    return (json.dumps(obj, sort_keys=True, indent=2) + "\n").encode()


def _build_model(config: ExperimentConfig):
    m = config.model
    return build_chain_model(m.J, m.gamma_g, m.gamma_l, m.L,
                             boundary=m.boundary,
                             edge_compensation=m.edge_compensation)


def _spectrum_csv(model):
    heff = effective_hamiltonian(model)
    es = biorthogonal_eigensystem(heff)
    loc = localization_profile(es, chain=model.chain)
    idx = np.arange(es.size, dtype=float)
    return _csv_bytes(
        ["index", "re_lambda", "im_lambda", "mean_position",
         "envelope_slope"],
        [idx, es.eigenvalues.real, es.eigenvalues.imag,
         loc.mean_positions, loc.envelope_slopes])


def _oracle_block(config, model, steady, files):
    """Brute-force cross-check payload; small systems only."""
    L = model.size
    if L > MAX_ORACLE_SITES:
        return {"error": f"oracle check needs L <= {MAX_ORACLE_SITES}, "
                         f"got {L}"}
    fock = build_fock_operators(L)
    liou = build_liouvillian(model, fock)
    eps, gap = liouvillian_spectrum(liou)
    files["liouvillian_spectrum.csv"] = _csv_bytes(
        ["index", "re_eps", "im_eps"],
        [np.arange(eps.shape[0], dtype=float), eps.real, eps.imag])

    rho_ss = steady_state_rho(liou)
    css_dev = float(np.abs(correlation_from_rho(rho_ss, fock).matrix
                           - steady.matrix).max())

    t_max = min(float(config.time.t_max), 5.0)
    times = np.linspace(0.0, t_max, 16)
    patterns = [
        [float((i + 1) % 2) for i in range(L)],          # alternating
        [1.0 if i < (L + 1) // 2 else 0.0 for i in range(L)],
    ]
    heff = effective_hamiltonian(model)
    worst = 0.0
    trace_dev = 0.0
    herm_dev = 0.0
    for occ in patterns:
        rho0 = product_state_rho(occ)
        rhos = evolve_trajectory(rho0, liou, times[1:])
        delta0 = CorrelationState(
            matrix=np.diag(np.array(occ, dtype=complex)) - steady.matrix,
            kind=CorrelationKind.DEVIATION)
        for t, rho in zip(times[1:], rhos):
            trace_dev = max(trace_dev, abs(np.trace(rho).real - 1.0))
            herm_dev = max(herm_dev,
                           float(np.abs(rho - rho.conj().T).max()))
            c_oracle = correlation_from_rho(rho, fock).matrix
            c_engine = steady.matrix + propagate(delta0, heff, float(t)).matrix
            worst = max(worst, float(np.abs(c_oracle - c_engine).max()))
    return {
        "gap": gap,
        "max_re_eps": float(eps.real.max()),
        "steady_state_max_dev": css_dev,
        "equivalence_max_dev": worst,
        "trace_preservation_dev": trace_dev,
        "hermiticity_dev": herm_dev,
        "grid_t_max": t_max,
        "patterns": len(patterns),
    }


def run_experiment(config: ExperimentConfig, output_dir=None) -> dict:
    """Execute an experiment config; returns the output manifest.

    Per-state propagation errors are recorded in the report without
    aborting the remaining states.  All files are written with fixed
    formatting so identical configs yield identical bytes.
    """
    outdir = Path(os.environ.get(_ENV_OUTPUT) or output_dir
                  or config.output.directory)
    outdir.mkdir(parents=True, exist_ok=True)

    model = _build_model(config)
    heff = effective_hamiltonian(model)
    t_grid = config.time.build_grid()
    gamma = model.chain.Gamma

    report = {
        "schema_version": config.canonical_dict()["schema_version"],
        "config_hash": config.content_hash(),
        "model_fingerprint": model_fingerprint(model),
        "kernel_backend": kernels.backend_name(),
        "states": {},
        "errors": {},
        "crossings": [],
        "fits": [],
    }
    files: dict[str, bytes] = {}

    try:
        steady = resolve_steady_state(model, heff=heff)
        report["imposed_steady_state"] = bool(
            model.boundary is Boundary.PBC)
    except LindchainError as exc:
        raise LindchainError(f"steady state unavailable: {exc}") from exc

    contexts = {}
    curves = {}
    for spec in config.states:
        label = spec.label
        try:
            ctx = _CurveContext(model, spec, steady=steady,
                                fast_path=config.analysis.fast_path)
            distances = ctx.norms(t_grid)
            curve = DistanceCurve(times=t_grid, distances=distances,
                                  label=label,
                                  fingerprint=report["model_fingerprint"])
            contexts[label] = ctx
            curves[label] = curve
            report["states"][label] = {
                "initial_distance": float(distances[0]),
                "final_distance": float(distances[-1]),
                "fast_path": ctx.circulant is not None,
            }
            resc = rescaled_curve(curve, gamma)
            files[f"curve_{label}.csv"] = _csv_bytes(
                ["t", "distance", "rescaled_distance"],
                [curve.times, curve.distances, resc.distances])
            if config.output.deviations and ctx.circulant is None:
                header = ["t"]
                L = model.size
                for i in range(L):
                    for j in range(L):
                        header += [f"re_dc_{i}_{j}", f"im_dc_{i}_{j}"]
                cols = [t_grid]
                flat = np.empty((t_grid.shape[0], 2 * L * L))
                for n, t in enumerate(t_grid):
                    d = (ctx.delta0 if t == 0.0 else
                         propagate(ctx.delta0, heff, float(t),
                                   method=ctx.method))
                    flat[n, 0::2] = d.matrix.real.reshape(-1)
                    flat[n, 1::2] = d.matrix.imag.reshape(-1)
                cols += [flat[:, k] for k in range(2 * L * L)]
                files[f"deviations_{label}.csv"] = _csv_bytes(header, cols)
        except LindchainError as exc:
            report["errors"][label] = str(exc)

    if config.analysis.crossings:
        for la, lb in itertools.combinations(sorted(curves), 2):
            evals = ((contexts[la].at, contexts[lb].at)
                     if config.analysis.refine else None)
            rep = detect_crossings(curves[la], curves[lb], evaluators=evals)
            report["crossings"].append({
                "pair": [la, lb],
                "times": [float(x) for x in rep.crossing_times],
                "initial_ordering": rep.initial_ordering,
                "verdict": rep.verdict.value,
            })

    for fit in config.analysis.fits:
        entry = {"state": fit.state, "kind": fit.kind}
        try:
            curve = curves[fit.state]
            f = (fit_power_law if fit.kind == "power_law"
                 else fit_exponential_rate)
            res = f(curve, window=fit.window)
            entry.update(window=[res.window[0], res.window[1]],
                         value=res.value, residual=res.residual,
                         n_points=res.n_points)
        except (KeyError, LindchainError) as exc:
            entry["error"] = (f"no curve for state '{fit.state}'"
                              if isinstance(exc, KeyError) else str(exc))
        report["fits"].append(entry)

    if config.analysis.spectra:
        for boundary in (Boundary.OBC, Boundary.PBC):
            variant = build_chain_model(
                model.chain.J, model.chain.gamma_g, model.chain.gamma_l,
                model.size, boundary=boundary,
                edge_compensation=model.edge_compensation)
            files[f"spectrum_{boundary.value}.csv"] = _spectrum_csv(variant)

    if config.analysis.oracle_check:
        try:
            report["oracle"] = _oracle_block(config, model, steady, files)
        except LindchainError as exc:
            report["oracle"] = {"error": str(exc)}

    if "json" in config.output.formats:
        files["report.json"] = _json_bytes(report)
    if "csv" not in config.output.formats:
        files = {k: v for k, v in files.items() if not k.endswith(".csv")}

    manifest = {
        "config_hash": config.content_hash(),
        "files": [],
    }
    for name in sorted(files):
        data = files[name]
        (outdir / name).write_bytes(data)
        manifest["files"].append({
            "name": name,
            "sha256": hashlib.sha256(data).hexdigest(),
            "bytes": len(data),
        })
    (outdir / "manifest.json").write_bytes(_json_bytes(manifest))
    return manifest


def _preset_root():
    return resources.files("lindchain") / "presets"


def preset_names() -> list[str]:
    return sorted(p.name[:-5] for p in _preset_root().iterdir()
                  if p.name.endswith(".yaml"))


def preset_text(name: str) -> str:
    path = _preset_root() / f"{name}.yaml"
    if not path.is_file():
        raise ConfigError([f"unknown preset '{name}'; available: "
                           + ", ".join(preset_names())])
    return path.read_text(encoding="utf-8")


def load_preset(name: str) -> ExperimentConfig:
    return parse_config(preset_text(name))


_CSV_SCHEMA = """\
output files (full round-trip precision, locale independent):
  curve_<label>.csv          t, distance, rescaled_distance
                             (rescaled = exp(4*Gamma*t) * distance)
  deviations_<label>.csv     t, re_dc_i_j, im_dc_i_j ... (on request)
  spectrum_obc.csv /
  spectrum_pbc.csv           index, re_lambda, im_lambda, mean_position,
                             envelope_slope
  liouvillian_spectrum.csv   index, re_eps, im_eps
  report.json                crossings, fits, per-state errors
  manifest.json              sha256 and size of every written file
environment:
  LINDCHAIN_OUTPUT_DIR       overrides the output directory
"""


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="lindchain",
        description="Relaxation experiments for dissipative fermion chains",
        epilog=_CSV_SCHEMA,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config", help="path to a YAML config, or a preset "
                                      "name prefixed with 'preset:'")
    p_run.add_argument("-o", "--output", default=None,
                       help="output directory (overrides the config)")

    p_val = sub.add_parser("validate", help="validate a config file")
    p_val.add_argument("config")

    p_pre = sub.add_parser("presets", help="list or export bundled presets")
    pre_sub = p_pre.add_subparsers(dest="preset_command", required=True)
    pre_sub.add_parser("list")
    p_exp = pre_sub.add_parser("export")
    p_exp.add_argument("name")
    p_exp.add_argument("-o", "--output", default=None,
                       help="write to a file instead of stdout")

    args = parser.parse_args(argv)

    if args.command == "presets":
        if args.preset_command == "list":
            for name in preset_names():
                print(name)
            return 0
        try:
            text = preset_text(args.name)
        except ConfigError as exc:
            print(exc, file=sys.stderr)
            return 2
        if args.output:
            Path(args.output).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
        return 0

    try:
        if args.command == "run" and args.config.startswith("preset:"):
            config = load_preset(args.config[len("preset:"):])
        else:
            config = load_config(args.config)
    except ConfigError as exc:
        print(exc, file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return 2

    if args.command == "validate":
        print("configuration is valid")
        return 0

    try:
        manifest = run_experiment(config, output_dir=args.output)
    except LindchainError as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return 3
    outdir = (os.environ.get(_ENV_OUTPUT) or args.output
              or config.output.directory)
    print(f"wrote {len(manifest['files']) + 1} files to {outdir}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
