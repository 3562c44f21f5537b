"""Command-line entry point: ``recalldrift <command> --config run.json``.

Exit status is 0 on success, 1 when ``prov check`` detects widening and 2
on configuration or parameter errors.
"""

from __future__ import annotations

import csv
import functools
import io
import math
import sys
from datetime import date
from pathlib import Path

import click

from .calibration import calibration_report
from .config import RunConfig, load_run_config
from .errors import ConfigError, ParameterError, ProvenanceParseError
from .events import read_log, write_log
from .lattice import AudienceOntology, AudienceScope, map_scope
from .provenance import (
    Activity,
    ProvenanceRecord,
    attach_record,
    detect_scope_widening,
    read_record,
    render_badge,
    serialize_record,
    sidecar_path,
)
from .replay import collect_counters, dominance_check, replay_policy, score_events, select_events, sensitivity_sweep
from .risk import operating_points, per_event_risk
from .simgen import generate_log, sample_outcomes

EXIT_WIDENING = 1
EXIT_CONFIG = 2


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "nan" if math.isnan(value) else repr(value)
    return str(value)


def _write_csv(path: Path, header: list[str], rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    path.write_text(buf.getvalue(), encoding="utf-8")


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_CONFIG)


def handles_config_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ConfigError, ParameterError, ProvenanceParseError) as exc:
            _fail(str(exc))
    return wrapper


def _load(config: str, seed: int | None, out: str | None) -> tuple[RunConfig, int, Path]:
    cfg = load_run_config(config)
    out_dir = Path(out) if out else cfg.resolve(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    return cfg, cfg.seed if seed is None else seed, out_dir


def _log_for(cfg: RunConfig, log: str | None):
    if log:
        return read_log(log)
    if cfg.log is None:
        raise ConfigError("no event log given (use --log or set 'log')", field="log")
    path = cfg.resolve(cfg.log)
    if not path.exists():
        raise ConfigError(f"file not found: {path}", field="log")
    return read_log(path)


config_option = click.option("--config", "config", required=True, type=click.Path(dir_okay=False),
                             help="Run configuration (JSON).")
seed_option = click.option("--seed", type=click.IntRange(0, 2 ** 64 - 1), default=None,
                           help="Override the config seed.")
out_option = click.option("--out", type=click.Path(file_okay=False), default=None,
                          help="Output directory (default: config 'out').")
log_option = click.option("--log", type=click.Path(dir_okay=False, exists=True), default=None,
                          help="Event log (JSONL); overrides config 'log'.")
policy_option = click.option("--policy", default=None,
                             help="never | always | threshold | rule[:u] | greedy:B")


@click.group()
def main():
    """Overexposure risk modeling and intervention-policy replay."""


@main.command()
@config_option
@seed_option
@out_option
@click.option("--no-outcomes", is_flag=True, help="Leave outgoing scopes unrealized.")
@handles_config_errors
def simulate(config, seed, out, no_outcomes):
    """Generate a synthetic event log (events.jsonl)."""
    cfg, seed, out_dir = _load(config, seed, out)
    log = generate_log(cfg.sim_config(seed))
    if not no_outcomes:
        sampled = sample_outcomes(log, cfg.recall_model(), seed)
        if sampled.skipped:
            click.echo(f"skipped {len(sampled.skipped)} events without provenance", err=True)
        log = sampled.log
    path = out_dir / "events.jsonl"
    write_log(log, path)
    click.echo(f"wrote {len(log)} events to {path}")


@main.command()
@config_option
@log_option
@policy_option
@seed_option
@out_option
@click.option("--bins", type=click.IntRange(min=1), default=None, help="Counter window width in days.")
@click.option("--noise-scale", type=click.FloatRange(min=0), default=None, help="Laplace noise scale for counters.")
@handles_config_errors
def replay(config, log, policy, seed, out, bins, noise_scale):
    """Replay a log under a policy; write report.txt, report.csv, counters.csv."""
    cfg, seed, out_dir = _load(config, seed, out)
    events = _log_for(cfg, log)
    report = replay_policy(events, cfg.run_policy(policy), cfg.recall_model(), cfg.intervention(),
                           cfg.cost_model())
    text = report.to_text()
    (out_dir / "report.txt").write_text(text, encoding="utf-8")
    _write_csv(out_dir / "report.csv", ["metric", "value"], report.as_rows())

    counters = collect_counters(events, bins or cfg.bins,
                                cfg.noise_scale if noise_scale is None else noise_scale, seed)
    _write_csv(
        out_dir / "counters.csv",
        ["start_day", "end_day", "events", "widening_count", "missing_provenance",
         "broaden_overrides", "narrow_overrides", "completion_rate", "median_time_to_post"],
        ([b.start_day, b.end_day, b.events, b.widening_count, b.missing_provenance, b.broaden_overrides,
          b.narrow_overrides, b.completion_rate, b.median_time_to_post] for b in counters.bins),
    )
    click.echo(text, nl=False)


@main.command("policy")
@config_option
@log_option
@policy_option
@out_option
@handles_config_errors
def policy_cmd(config, log, policy, out):
    """Score every event and mark the policy's selections (scored_events.csv)."""
    cfg, _, out_dir = _load(config, None, out)
    events = _log_for(cfg, log)
    costs = cfg.cost_model()
    chosen = cfg.run_policy(policy)
    rows = select_events(chosen, score_events(events, cfg.recall_model(), cfg.intervention(), costs), costs)
    path = out_dir / "scored_events.csv"
    _write_csv(path, ["event_id", "day_index", "risk", "delta_r", "weighted_benefit", "selected"],
               ([r.scored.event_id, r.scored.day_index, r.scored.risk, r.scored.delta_r,
                 r.scored.weighted_benefit, r.selected] for r in rows))
    click.echo(f"{chosen}: selected {sum(r.selected for r in rows)} of {len(rows)} events -> {path}")


@main.command()
@config_option
@log_option
@policy_option
@out_option
@handles_config_errors
def sweep(config, log, policy, out):
    """Sensitivity band of the relative reduction over the prior grid (sweep.csv)."""
    cfg, _, out_dir = _load(config, None, out)
    if not cfg.prior_grid:
        raise ConfigError("must list at least one (p_c, p_o, p~_c, p~_o) point", field="prior_grid")
    events = _log_for(cfg, log)
    costs = cfg.cost_model()
    thr = cfg.model.old_threshold_days
    band = sensitivity_sweep(events, cfg.run_policy(policy), cfg.prior_grid, costs, thr)
    _write_csv(out_dir / "sweep.csv", ["p_c", "p_o", "pc_after", "po_after", "relative_reduction"],
               (list(p) + [r] for p, r in zip(band.prior_grid, band.reductions)))
    lines = [f"{band.policy}: relative reduction min {band.reduction_min:.4f} "
             f"mid {band.reduction_mid:.4f} max {band.reduction_max:.4f}"]
    band_rows = [[band.policy, band.reduction_min, band.reduction_mid, band.reduction_max]]
    if cfg.compare_policy:
        other = sensitivity_sweep(events, cfg.run_policy(cfg.compare_policy), cfg.prior_grid, costs, thr)
        band_rows.append([other.policy, other.reduction_min, other.reduction_mid, other.reduction_max])
        lines.append(f"{other.policy}: relative reduction min {other.reduction_min:.4f} "
                     f"mid {other.reduction_mid:.4f} max {other.reduction_max:.4f}")
        lines.append(f"dominance ({band.policy} vs {other.policy}): {dominance_check(band, other).value}")
    _write_csv(out_dir / "bands.csv", ["policy", "reduction_min", "reduction_mid", "reduction_max"], band_rows)
    text = "\n".join(lines) + "\n"
    (out_dir / "sweep.txt").write_text(text, encoding="utf-8")
    click.echo(text, nl=False)


@main.command()
@config_option
@log_option
@out_option
@click.option("--bins", type=click.IntRange(min=1), default=None, help="Number of reliability bins.")
@handles_config_errors
def calibrate(config, log, out, bins):
    """Calibration of per-event risk against observed scope widening.

    Uses events whose outgoing scope and provenance are both known.
    """
    cfg, _, out_dir = _load(config, None, out)
    events = _log_for(cfg, log)
    scores = score_events(events, cfg.recall_model(), cfg.intervention(), cfg.cost_model())
    preds, outcomes = [], []
    for row in scores:
        ev = row.event
        if ev.provenance is None or ev.outgoing is None:
            continue
        preds.append(per_event_risk(row.p_c, row.p_o))
        outcomes.append(detect_scope_widening(ev.provenance, ev.outgoing))
    report = calibration_report(preds, outcomes, bins or cfg.calibration_bins)
    _write_csv(out_dir / "calibration.csv", ["bin_lower", "bin_upper", "mean_predicted", "empirical_rate", "count"],
               ([b.lower, b.upper, b.mean_predicted, b.empirical_rate, b.count] for b in report.reliability_bins))
    thresholds = sorted(set(preds))
    _write_csv(out_dir / "operating_points.csv", ["threshold", "sensitivity", "specificity", "flagged"],
               ([p.threshold, p.sensitivity, p.specificity, p.flagged]
                for p in operating_points(preds, outcomes, thresholds)))
    click.echo(f"n={report.n} brier={report.brier_score:.6f} ece={report.expected_calibration_error:.6f}")


@main.group()
def prov():
    """Provenance sidecars: attach, read, check."""


def _year_month(ctx, param, value):
    if value is None:
        return None
    try:
        y, m = value.split("-")
        return date(int(y), int(m), 1)
    except ValueError:
        raise click.BadParameter("expected YYYY-MM") from None


@prov.command("attach")
@click.option("--store", required=True, type=click.Path(), help="Sidecar file, or a directory for <id>.prov.json.")
@click.option("--entity-id", required=True)
@click.option("--scope", default=None, help="Private | Friends | Public")
@click.option("--foreign-scope", default=None, help="Label from another app's ontology.")
@click.option("--ontology", type=click.Path(dir_okay=False, exists=True), default=None)
@click.option("--created", required=True, callback=_year_month, help="YYYY-MM")
@click.option("--agent", default="unknown")
@click.option("--activity", type=click.Choice([a.value for a in Activity]), default="post")
@click.option("--sensitive", is_flag=True)
@handles_config_errors
def prov_attach(store, entity_id, scope, foreign_scope, ontology, created, agent, activity, sensitive):
    """Write a provenance sidecar."""
    if (scope is None) == (foreign_scope is None):
        raise ConfigError("give exactly one of --scope or --foreign-scope", field="scope")
    if foreign_scope is not None:
        if ontology is None:
            raise ConfigError("--foreign-scope needs --ontology", field="ontology")
        mapped = map_scope(foreign_scope, AudienceOntology.load(ontology))
        if mapped.missing:
            click.echo(f"note: {foreign_scope!r} unknown to ontology; defaulting to Private", err=True)
        elif mapped.ambiguous:
            names = ", ".join(c.label for c in mapped.candidates)
            click.echo(f"note: {foreign_scope!r} is ambiguous ({names}); using {mapped.scope.label}", err=True)
        audience = mapped.scope
    else:
        try:
            audience = AudienceScope.parse(scope)
        except ValueError as exc:
            raise ConfigError(str(exc), field="scope") from None
    record = ProvenanceRecord(entity_id, audience, created, agent, Activity(activity), sensitive)
    path = Path(store)
    if path.is_dir():
        path = sidecar_path(path, entity_id)
    try:
        attach_record(record, path)
    except OSError as exc:
        click.echo(f"error: cannot write {path}: {exc.strerror}", err=True)
        sys.exit(EXIT_CONFIG)
    click.echo(f"{path}: {render_badge(record).text}")


@prov.command("read")
@click.argument("store", type=click.Path(dir_okay=False))
@handles_config_errors
def prov_read(store):
    """Print a sidecar and its badge."""
    record = read_record(store)
    if record is None:
        click.echo("absent")
    else:
        click.echo(serialize_record(record).decode("utf-8"), nl=False)
    click.echo(render_badge(record).text)


@prov.command("check")
@click.argument("store", type=click.Path(dir_okay=False))
@click.option("--outgoing", required=True, help="Scope about to be used.")
@handles_config_errors
def prov_check(store, outgoing):
    """Exit 1 when the outgoing scope is broader than the recorded one."""
    try:
        scope = AudienceScope.parse(outgoing)
    except ValueError as exc:
        raise ConfigError(str(exc), field="outgoing") from None
    record = read_record(store)
    if record is None:
        click.echo("no provenance: cannot assess widening")
        return
    if detect_scope_widening(record, scope):
        click.echo(f"widening: {record.original_audience.label} -> {scope.label}")
        sys.exit(EXIT_WIDENING)
    click.echo(f"ok: {record.original_audience.label} -> {scope.label}")


if __name__ == "__main__":
    main()
