"""Command-line interface for magnon-entangle."""

from __future__ import annotations

import logging
import sys
from collections.abc import Iterator, Sequence
from contextlib import contextmanager
from pathlib import Path

import pandas as pd
import typer
from pydantic import ValidationError

from magnon_entangle.config import load_config, resolve_log_level
from magnon_entangle.entanglement import analyze
from magnon_entangle.errors import ConfigError, NumericalError
from magnon_entangle.export import (
    frame_to_csv,
    frame_to_pgm,
    key_value_csv,
    records_to_frame,
)
from magnon_entangle.model import (
    HP_VALIDITY_THRESHOLD,
    bare_state_resonance,
    condition_residuals,
    hp_validity,
    steady_state,
)
from magnon_entangle.presets import FIGURES, figure_job
from magnon_entangle.selftest import render, run_selftest
from magnon_entangle.sweep import MEASURES, Axis, SweepJob, condition_curve, map2d

logger = logging.getLogger(__name__)

cli = typer.Typer(
    help="Steady-state entanglement maps for a cavity with two magnon modes",
    no_args_is_help=True,
)

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

CURVES = {"hyper": "delta_c", "antidiag": "delta_c", "tri": "phi"}

ConfigOpt = typer.Option(None, "--config", "-c", help="JSON config file")
OutOpt = typer.Option(None, "--out", "-o", help="Write CSV here instead of stdout")
ThreadsOpt = typer.Option(None, "--threads", "-j", help="Worker processes, 0 for all")
PgmOpt = typer.Option(None, "--pgm", help="Also write an 8-bit graymap heatmap")
PgmQuantityOpt = typer.Option(
    None, "--pgm-quantity", help="Quantity drawn in the graymap (default: first)"
)
PgmLogOpt = typer.Option(False, "--pgm-log", help="Scale the graymap by log10")

DeltaCOpt = typer.Option(None, "--delta-c", help="Cavity detuning / kappa")
DeltaM1Opt = typer.Option(None, "--delta-m1", help="Magnon 1 detuning / kappa")
DeltaM2Opt = typer.Option(None, "--delta-m2", help="Magnon 2 detuning / kappa")
DeltaMOpt = typer.Option(None, "--delta-m", help="Mean magnon detuning / kappa")
PhiOpt = typer.Option(None, "--phi", help="Half magnon splitting / kappa")
GOpt = typer.Option(None, "--g", help="Coupling g1 = g2 / kappa")
OmegaOpt = typer.Option(None, "--omega-nl", help="Two-photon nonlinearity / kappa")
EpsOpt = typer.Option(None, "--eps-p", help="Probe amplitude / kappa")
GammaOpt = typer.Option(None, "--gamma", help="Magnon decay gamma1 = gamma2 / kappa")
KappaOpt = typer.Option(None, "--kappa", help="Cavity decay (the unit, default 1)")


@contextmanager
def _exit_codes() -> Iterator[None]:
    """Map library errors onto the documented exit codes."""
    try:
        yield
    except ConfigError as exc:
        logger.error("configuration error: %s", exc)
        typer.echo(f"error: {exc}", err=True)
        raise typer.Exit(EXIT_CONFIG) from exc
    except NumericalError as exc:
        logger.error("numerical failure (%s): %s", type(exc).__name__, exc)
        typer.echo(f"error: {type(exc).__name__}: {exc}", err=True)
        raise typer.Exit(EXIT_NUMERICAL) from exc


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        typer.echo(text, nl=False)
    else:
        out.write_text(text, encoding="utf-8")
        logger.info("wrote %s", out)


def _run_job(
    job: SweepJob,
    *,
    threads: int | None,
    out: Path | None,
    pgm: Path | None,
    pgm_quantity: str | None,
    pgm_log: bool,
) -> None:
    records = map2d(job, threads=threads)
    frame = records_to_frame(records, job.x.name, job.y.name)
    _emit(frame_to_csv(frame), out)
    if pgm is not None:
        quantity = pgm_quantity or job.quantities[0]
        try:
            image = frame_to_pgm(
                frame, quantity, job.x.steps, job.y.steps, log_scale=pgm_log
            )
        except KeyError as exc:
            raise ConfigError(f"cannot draw {quantity!r}: {exc}") from exc
        pgm.write_bytes(image)
        logger.info("wrote graymap of %s to %s", quantity, pgm)


@cli.callback()
def _configure(
    log_level: str = typer.Option(
        None, "--log-level", help="DEBUG, INFO, WARNING or ERROR"
    ),
) -> None:
    """Configure stderr logging before any subcommand runs."""
    with _exit_codes():
        level = resolve_log_level(log_level)
    logging.basicConfig(
        level=getattr(logging, level),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )


@cli.command()
def point(
    config: Path = ConfigOpt,
    delta_c: float = DeltaCOpt,
    delta_m1: float = DeltaM1Opt,
    delta_m2: float = DeltaM2Opt,
    delta_m: float = DeltaMOpt,
    phi: float = PhiOpt,
    g: float = GOpt,
    omega_nl: float = OmegaOpt,
    eps_p: float = EpsOpt,
    gamma: float = GammaOpt,
    kappa: float = KappaOpt,
    out: Path = OutOpt,
) -> None:
    """Analyze one parameter point and print a key,value report."""
    with _exit_codes():
        cfg = load_config(
            config,
            {
                "delta_c": delta_c,
                "delta_m1": delta_m1,
                "delta_m2": delta_m2,
                "delta_m": delta_m,
                "phi": phi,
                "g": g,
                "omega_nl": omega_nl,
                "eps_p": eps_p,
                "gamma": gamma,
                "kappa": kappa,
            },
        )
        p = cfg.params
        report = analyze(p)
        s = steady_state(p)
        ratio = hp_validity(p, s, cfg.material)
        resonance = bare_state_resonance(p)

        pairs: list[tuple[str, object]] = [
            ("stable", report.stable),
            ("margin", report.margin),
        ]
        # unstable points carry no measures
        pairs += [
            (name, getattr(report, name) if report.stable else None)
            for name in MEASURES
        ]
        for name in ("a", "m1", "m2"):
            amplitude: complex = getattr(s, name)
            pairs += [(f"{name}_re", amplitude.real), (f"{name}_im", amplitude.imag)]
        pairs += [("n_c", s.n_c), ("n_m1", s.n_m1), ("n_m2", s.n_m2)]
        pairs += list(condition_residuals(p)._asdict().items())
        pairs += [("r_antidiag_1", resonance[0]), ("r_antidiag_2", resonance[1])]
        pairs += [
            ("hp_ratio", ratio),
            ("hp_valid", ratio < HP_VALIDITY_THRESHOLD),
            ("spin_count", cfg.material.spin_count),
        ]
        _emit(key_value_csv(pairs), out)


@cli.command(name="map")
def map_(
    config: Path = typer.Option(..., "--config", "-c", help="JSON config with a job"),
    threads: int = ThreadsOpt,
    out: Path = OutOpt,
    pgm: Path = PgmOpt,
    pgm_quantity: str = PgmQuantityOpt,
    pgm_log: bool = PgmLogOpt,
) -> None:
    """Run the sweep described by the config's ``job`` block."""
    with _exit_codes():
        cfg = load_config(config)
        if cfg.job is None:
            raise ConfigError(f"config {config} has no 'job' section")
        _run_job(
            cfg.job.to_job(cfg.params),
            threads=threads,
            out=out,
            pgm=pgm,
            pgm_quantity=pgm_quantity,
            pgm_log=pgm_log,
        )


@cli.command()
def figure(
    name: str = typer.Argument(..., help=f"One of: {', '.join(FIGURES)}"),
    config: Path = ConfigOpt,
    steps: int = typer.Option(None, "--steps", help="Outer grid points per axis"),
    inner_steps: int = typer.Option(
        None, "--inner-steps", help="Inner scan points (fig4b, fig5b)"
    ),
    delta_c: float = DeltaCOpt,
    g: float = GOpt,
    omega_nl: float = OmegaOpt,
    eps_p: float = EpsOpt,
    gamma: float = GammaOpt,
    kappa: float = KappaOpt,
    threads: int = ThreadsOpt,
    out: Path = OutOpt,
    pgm: Path = PgmOpt,
    pgm_quantity: str = PgmQuantityOpt,
    pgm_log: bool = PgmLogOpt,
) -> None:
    """Regenerate one of the published parameter maps."""
    with _exit_codes():
        cfg = load_config(
            config,
            {
                "delta_c": delta_c,
                "g": g,
                "omega_nl": omega_nl,
                "eps_p": eps_p,
                "gamma": gamma,
                "kappa": kappa,
            },
        )
        job = figure_job(name, cfg.params, steps=steps, inner_steps=inner_steps)
        logger.info("figure %s: %s", name, FIGURES[name].description)
        _run_job(
            job,
            threads=threads,
            out=out,
            pgm=pgm,
            pgm_quantity=pgm_quantity,
            pgm_log=pgm_log,
        )


@cli.command()
def curve(
    name: str = typer.Argument(..., help="hyper, antidiag or tri"),
    lo: float = typer.Option(-10.0, "--lo", help="Start of the sampled axis"),
    hi: float = typer.Option(10.0, "--hi", help="End of the sampled axis"),
    steps: int = typer.Option(201, "--steps", help="Samples along the axis"),
    config: Path = ConfigOpt,
    g: float = GOpt,
    out: Path = OutOpt,
) -> None:
    """Sample an analytic condition curve for plot overlays."""
    with _exit_codes():
        if name not in CURVES:
            raise ConfigError(f"unknown curve {name!r}; choose from {sorted(CURVES)}")
        cfg = load_config(config, {"g": g})
        try:
            axis = Axis(name=CURVES[name], lo=lo, hi=hi, steps=steps)
        except ValidationError as exc:
            raise ConfigError(f"invalid curve axis: {exc}") from exc
        points = condition_curve(name, cfg.params, axis)  # type: ignore[arg-type]
        frame = pd.DataFrame(points, columns=[axis.name, "delta_m"], dtype="float64")
        _emit(frame_to_csv(frame), out)


@cli.command()
def selftest() -> None:
    """Run the built-in closed-form checks."""
    results = run_selftest()
    typer.echo(render(results))
    failed = [r.name for r in results if not r.passed]
    if failed:
        typer.echo(f"{len(failed)} check(s) failed: {', '.join(failed)}", err=True)
        raise typer.Exit(EXIT_NUMERICAL)
    typer.echo(f"all {len(results)} checks passed")


def run(argv: Sequence[str] | None = None) -> int:
    """Run the CLI on ``argv`` and return the exit code instead of exiting."""
    command = typer.main.get_command(cli)
    try:
        # standalone mode reports usage errors itself and always exits
        command.main(
            args=list(sys.argv[1:] if argv is None else argv),
            prog_name="magnon-entangle",
            standalone_mode=True,
        )
    except SystemExit as exc:
        if exc.code is None or isinstance(exc.code, int):
            return exc.code or 0
        typer.echo(exc.code, err=True)
        return 1
    return 0


def main() -> None:  # entry-point for console_scripts
    sys.exit(run())


if __name__ == "__main__":
    main()
