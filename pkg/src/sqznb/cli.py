"""Command-line front end.

Exit codes: 0 on success, 2 for usage or configuration errors, 3 for
numerical failures (non-finite spectral values).  All outputs are
deterministic for fixed flags, config, and seed.
"""

from __future__ import annotations

import dataclasses
import functools
import json
import math
import re
from pathlib import Path

import click

from .budget import (
    compose,
    equivalent_power_increase,
    improvement_db,
    ingest_asd,
    resample,
    write_asd_csv,
)
from .config import LOW_BAND, RunConfig, load_run_config
from .estimate import MeasurementWithUncertainty, fit_efficiency, mc_uncertainty, optimal_inject_db
from .interferometer import NumericalRangeError, SqueezerSetup, quantum_noise_curve
from .states import LossChain, PhaseNoise, propagate
from .svgplot import write_loglog_svg


class _NumericalFailure(click.ClickException):
    exit_code = 3


def _lib_errors(fn):
    """Map library errors onto the documented exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except NumericalRangeError as exc:
            raise _NumericalFailure(str(exc)) from exc
        except (ValueError, OSError) as exc:
            raise click.UsageError(str(exc)) from exc

    return wrapper


def _emit_json(payload: dict) -> None:
    click.echo(json.dumps(payload, indent=2, sort_keys=True))


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _parse_loss_flags(loss_flags) -> LossChain:
    elements = []
    for flag in loss_flags:
        label, sep, value = flag.partition("=")
        if not sep or not label:
            raise click.UsageError(f"--loss expects LABEL=EFFICIENCY, got {flag!r}")
        try:
            elements.append((label, float(value)))
        except ValueError:
            raise click.UsageError(f"--loss {flag!r}: efficiency is not a number") from None
    return LossChain(tuple(elements))


def _state_dict(state) -> dict:
    return {"v_plus": float(state.v_plus), "v_minus": float(state.v_minus)}


@click.group()
def main():
    """Squeezed-light noise budget toolkit."""


@main.command("propagate")
@click.option("--inject-db", type=float, required=True, help="Injected squeezing level [dB].")
@click.option("--eta", type=float, default=None, help="Total detection efficiency in [0, 1].")
@click.option(
    "--loss",
    "loss_flags",
    multiple=True,
    metavar="LABEL=EFF",
    help="Named power-transmission efficiency in (0, 1]; repeatable, efficiencies multiply.",
)
@click.option("--phase-mrad", type=float, default=0.0, show_default=True, help="RMS phase jitter [mrad].")
@click.option(
    "--exact-gaussian",
    is_flag=True,
    help="Average phase jitter over an exact Gaussian instead of substituting the RMS angle.",
)
@_lib_errors
def propagate_cmd(inject_db, eta, loss_flags, phase_mrad, exact_gaussian):
    """Propagate a squeezed state through loss and phase jitter."""
    if eta is not None and loss_flags:
        raise click.UsageError("--eta and --loss are mutually exclusive")
    if eta is None and not loss_flags:
        raise click.UsageError("give either --eta or at least one --loss LABEL=EFF")
    if eta is not None:
        losses = float(eta)
        breakdown = [{"label": "total", "efficiency": float(eta)}]
    else:
        chain = _parse_loss_flags(loss_flags)
        losses = chain
        breakdown = [{"label": label, "efficiency": float(e)} for label, e in chain]
    noise = PhaseNoise(phase_mrad * 1e-3)
    result = propagate(inject_db, losses, noise, exact_gaussian=exact_gaussian)
    _emit_json(
        {
            "inject_db": float(inject_db),
            "efficiency": float(result.efficiency),
            "loss_chain": breakdown,
            "phase_noise_mrad": float(phase_mrad),
            "phase_noise_model": "gaussian-exact" if exact_gaussian else "rms-substitution",
            "variances": {
                "injected": _state_dict(result.injected),
                "after_loss": _state_dict(result.after_loss),
                "detected": _state_dict(result.state),
            },
            "detected_db": float(result.detected_db),
        }
    )


@main.command("fit")
@click.option("--injected", type=float, required=True, help="Injected squeezing level [dB].")
@click.option("--detected", type=float, required=True, help="Measured squeezing level [dB].")
@click.option("--phase-mrad", type=float, default=0.0, show_default=True, help="RMS phase jitter [mrad].")
@_lib_errors
def fit_cmd(injected, detected, phase_mrad):
    """Fit the detection efficiency behind a measured squeezing level."""
    result = fit_efficiency(injected, detected, PhaseNoise(phase_mrad * 1e-3))
    _emit_json(
        {
            "inject_db": float(injected),
            "target_db": float(detected),
            "phase_noise_mrad": float(phase_mrad),
            "efficiency": float(result.estimate),
            "residual_db": float(result.residual),
            "iterations": int(result.iterations),
            "bracket": [float(result.bracket[0]), float(result.bracket[1])],
        }
    )


@main.command("uncertainty")
@click.option("--inject-db", type=float, default=10.3, show_default=True, help="Injected level [dB].")
@click.option("--inject-sigma-db", type=float, default=0.2, show_default=True)
@click.option("--eta", type=float, default=0.44, show_default=True, help="Detection efficiency.")
@click.option("--eta-sigma", type=float, default=0.02, show_default=True)
@click.option("--phase-mrad", type=float, default=37.0, show_default=True, help="RMS phase jitter [mrad].")
@click.option("--phase-sigma-mrad", type=float, default=6.0, show_default=True)
@click.option("--mc-samples", type=int, default=100_000, show_default=True)
@click.option("--seed", type=int, default=42, show_default=True)
@_lib_errors
def uncertainty_cmd(inject_db, inject_sigma_db, eta, eta_sigma, phase_mrad, phase_sigma_mrad, mc_samples, seed):
    """Monte Carlo propagation of input uncertainties to detected dB."""
    result = mc_uncertainty(
        MeasurementWithUncertainty(inject_db, inject_sigma_db),
        MeasurementWithUncertainty(eta, eta_sigma),
        MeasurementWithUncertainty(phase_mrad * 1e-3, phase_sigma_mrad * 1e-3),
        samples=mc_samples,
        seed=seed,
    )
    _emit_json(
        {
            "inputs": {
                "inject_db": {"value": float(inject_db), "sigma": float(inject_sigma_db)},
                "efficiency": {"value": float(eta), "sigma": float(eta_sigma)},
                "phase_noise_mrad": {"value": float(phase_mrad), "sigma": float(phase_sigma_mrad)},
            },
            "samples": int(result.samples),
            "seed": int(result.seed),
            "mean_db": float(result.mean_db),
            "sigma_db": float(result.sigma_db),
            "first_order_sigma_db": float(result.first_order_sigma_db),
            "clamped": {key: int(n) for key, n in result.clamped.items()},
        }
    )


@main.command("optimize")
@click.option("--eta", type=float, required=True, help="Detection efficiency in [0, 1].")
@click.option("--phase-mrad", type=float, required=True, help="RMS phase jitter [mrad].")
@click.option("--max-db", type=float, default=60.0, show_default=True, help="Search ceiling [dB].")
@_lib_errors
def optimize_cmd(eta, phase_mrad, max_db):
    """Injection level that maximizes detected squeezing under jitter."""
    result = optimal_inject_db(eta, PhaseNoise(phase_mrad * 1e-3), max_db=max_db)
    _emit_json(
        {
            "efficiency": float(eta),
            "phase_noise_mrad": float(phase_mrad),
            "optimal_inject_db": float(result.inject_db),
            "detected_db": float(result.detected_db),
            "iterations": int(result.iterations),
        }
    )


def _safe_name(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "-", label)


def _prefix_path(prefix: str) -> Path:
    path = Path(prefix)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _build_budget(cfg: RunConfig, setup: SqueezerSetup, tables):
    grid = cfg.grid.frequencies()
    curve = quantum_noise_curve(cfg.interferometer, setup, grid)
    components = [("quantum", curve.asd)]
    components.extend((label, resample(table, grid)) for label, table in tables)
    return compose(grid, components)


def _load_tables(cfg: RunConfig):
    return [(label, ingest_asd(path, label=label)) for label, path in cfg.components]


def _improvement_dict(imp) -> dict:
    return {"median": float(imp.median_db), "max": float(imp.max_db)}


def _power_increase_or_none(value_db: float):
    return equivalent_power_increase(value_db) if value_db >= 0.0 else None


@main.command("budget")
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "prefix", required=True, help="Output path prefix for emitted files.")
@click.option("--svg", "with_svg", is_flag=True, help="Also write a log-log overview plot.")
@_lib_errors
def budget_cmd(config_path, prefix, with_svg):
    """Compose the noise budget for a config, with and without squeezing."""
    cfg = load_run_config(config_path)
    tables = _load_tables(cfg)
    squeezed = _build_budget(cfg, cfg.squeezer, tables)
    reference = _build_budget(cfg, dataclasses.replace(cfg.squeezer, angle_policy="none"), tables)

    imp = improvement_db(reference, squeezed, cfg.band)
    grid = squeezed.grid
    low = None
    if grid[0] <= LOW_BAND[0] and LOW_BAND[1] <= grid[-1]:
        low = improvement_db(reference, squeezed, LOW_BAND)

    if cfg.squeezer.angle_policy == "none":
        detected = 0.0
    else:
        detected = propagate(
            cfg.squeezer.inject_db, cfg.squeezer.chain, cfg.squeezer.phase_noise
        ).detected_db

    out = _prefix_path(prefix)
    files = {}

    def _curve_file(tag: str, values, comment: str) -> str:
        target = Path(f"{out}-{tag}.csv")
        write_asd_csv(target, grid, values, comments=[comment])
        files[tag] = target.name
        return target.name

    _curve_file("total", squeezed.total, f"total, squeezer as configured ({cfg.label})")
    _curve_file("total-reference", reference.total, f"total, squeezer off ({cfg.label})")
    for label, values in squeezed.components.items():
        _curve_file(_safe_name(label), values, f"component {label} ({cfg.label})")

    summary = {
        "label": cfg.label,
        "band_hz": [float(cfg.band[0]), float(cfg.band[1])],
        "improvement_db": _improvement_dict(imp),
        "equivalent_power_increase": {
            "from_median": _power_increase_or_none(imp.median_db),
            "from_max": _power_increase_or_none(imp.max_db),
        },
        "low_band_hz": [float(LOW_BAND[0]), float(LOW_BAND[1])] if low else None,
        "low_band_improvement_db": _improvement_dict(low) if low else None,
        "detected_squeezing_db": float(detected),
        "angle_policy": cfg.squeezer.angle_policy,
        "components": sorted(squeezed.components),
        "grid": {
            "f_min_hz": float(cfg.grid.f_min),
            "f_max_hz": float(cfg.grid.f_max),
            "points": int(cfg.grid.points),
            "spacing": cfg.grid.spacing,
        },
        "files": files,
    }
    summary_path = Path(f"{out}-summary.json")
    _write_json(summary_path, summary)

    if with_svg:
        curves = [(label, grid, values) for label, values in squeezed.components.items()]
        curves.append(("total (squeezed)", grid, squeezed.total))
        curves.append(("total (no squeezing)", grid, reference.total))
        write_loglog_svg(Path(f"{out}.svg"), curves, title=cfg.label or "noise budget")


@main.command("project")
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False))
@click.option(
    "--mode",
    type=click.Choice(["none", "fixed", "fd-optimal", "all"]),
    default="all",
    show_default=True,
    help="Which squeeze-angle policy to project; 'all' emits the three of them.",
)
@click.option("--out", "prefix", required=True, help="Output path prefix for emitted files.")
@_lib_errors
def project_cmd(config_path, mode, prefix):
    """Project quantum-noise and total curves for squeeze-angle policies."""
    cfg = load_run_config(config_path)
    tables = _load_tables(cfg)
    grid = cfg.grid.frequencies()
    modes = ["none", "fixed", "fd-optimal"] if mode == "all" else [mode]

    out = _prefix_path(prefix)
    resampled = [(label, resample(table, grid)) for label, table in tables]
    curves_for_svg = [(label, grid, values) for label, values in resampled]

    for policy in modes:
        setup = dataclasses.replace(cfg.squeezer, angle_policy=policy)
        curve = quantum_noise_curve(cfg.interferometer, setup, grid)
        total = compose(grid, [("quantum", curve.asd)] + resampled)
        write_asd_csv(
            Path(f"{out}-quantum-{policy}.csv"),
            grid,
            curve.asd,
            comments=[f"quantum noise, angle policy {policy} ({cfg.label})"],
        )
        write_asd_csv(
            Path(f"{out}-total-{policy}.csv"),
            grid,
            total.total,
            comments=[f"total noise, angle policy {policy} ({cfg.label})"],
        )
        curves_for_svg.append((f"quantum ({policy})", grid, curve.asd))
        curves_for_svg.append((f"total ({policy})", grid, total.total))

    write_loglog_svg(Path(f"{out}.svg"), curves_for_svg, title=cfg.label or "projection")


if __name__ == "__main__":
    main()
