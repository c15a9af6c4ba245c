"""End-to-end experiment: spectrum, numeric and analytic legs, CSV output."""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import ExperimentConfig
from .errors import ConfigError
from .four_level import BareParams, RegimeReport, RenormalizedParams, renormalize, validate_regime
from .propagator import (
    DriveConfig,
    PopulationSeries,
    SeriesComparison,
    analytic_series,
    compare_series,
    propagate,
    propagate_four_level,
)
from .quartic import (
    DEFAULT_LEVEL_MAP,
    QuarticConfig,
    Spectrum,
    extract_four_level,
    optimize_basis_frequency,
    solve_spectrum,
    write_spectrum_csv,
)

log = logging.getLogger(__name__)

MAX_ROWS = 4000
BARE_HEADER = ["t", "P1", "P2", "P3", "P4", "norm"]
RENORM_HEADER = ["t", "P1p", "P2p", "P3p", "P4p", "leakage"]


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    spectrum: Spectrum
    params: BareParams
    renormalized: RenormalizedParams
    regime: RegimeReport
    field: float
    t_end: float
    zero_field: bool
    numeric: PopulationSeries
    numeric4: PopulationSeries
    analytic: PopulationSeries
    analytic_vs_numeric4: SeriesComparison
    analytic_vs_numeric: SeriesComparison
    numeric_vs_numeric4: SeriesComparison
    files: dict[str, Path] = field(default_factory=dict)


def decimate(n: int, max_rows: int = MAX_ROWS) -> np.ndarray:
    stride = max(1, math.ceil(n / max_rows))
    return np.arange(0, n, stride)


def write_series_csv(path, series: PopulationSeries, renormalized: bool, max_rows: int = MAX_ROWS) -> None:
    rows = decimate(len(series), max_rows)
    if renormalized:
        header, pops, last = RENORM_HEADER, series.renorm, series.leakage
    else:
        header, pops, last = BARE_HEADER, series.bare, series.norm
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for k in rows:
            w.writerow([f"{series.times[k]:.12g}"] + [f"{v:.12g}" for v in pops[k]] + [f"{last[k]:.12g}"])


def _split_initial(cfg: ExperimentConfig, level_map) -> tuple[np.ndarray, np.ndarray]:
    full = cfg.initial_amplitudes()
    idx = [k - 1 for k in level_map]
    sub = full[idx]
    outside = 1.0 - float(np.vdot(sub, sub).real)
    if outside > 1e-10:
        raise ConfigError(
            f"initial: {outside:.3g} of the population lies outside model levels "
            f"{level_map}; the analytic model cannot represent it"
        )
    return full, sub / np.linalg.norm(sub)


def run_experiment(cfg: ExperimentConfig, level_map=DEFAULT_LEVEL_MAP, write: bool = True) -> ExperimentResult:
    """Run the numeric and analytic pipelines for one configuration and write
    the artifact set into ``cfg.outputs``."""
    full0, sub0 = _split_initial(cfg, level_map)

    qcfg = QuarticConfig(cfg.D, cfg.basis_size, cfg.basis_frequency or 1.0)
    if cfg.basis_frequency is None:
        w, _ = optimize_basis_frequency(qcfg, n_keep=min(12, cfg.basis_size // 3))
        qcfg = qcfg.with_frequency(w)
        log.info("optimized basis frequency %.6g", w)
    spectrum = solve_spectrum(qcfg, cfg.n_levels)
    extract = extract_four_level(spectrum, cfg.ratio, level_map)
    p = extract.params
    r = renormalize(p)
    regime = validate_regime(p, cfg.threshold)

    zero_field = cfg.ratio == 0 or r.generalized_rabi_14 < 1e-12 * p.omega
    unit = 2.0 * math.pi / p.omega if zero_field else r.rabi_period()
    t_end = cfg.periods * unit
    n_steps = t_end / (2.0 * math.pi / p.omega) * cfg.steps_per_period
    if n_steps > cfg.max_steps:
        raise ConfigError(
            f"max_steps: run needs {n_steps:.3g} steps (limit {cfg.max_steps}); "
            "reduce periods or steps_per_period"
        )

    drive = DriveConfig(extract.field, p.omega, t_end, cfg.steps_per_period, cfg.n_levels, full0)
    numeric = propagate(spectrum, drive, level_map)
    numeric4 = propagate_four_level(p, DriveConfig(extract.field, p.omega, t_end, cfg.steps_per_period, 4, sub0))
    analytic = analytic_series(p, r, sub0, numeric.times)

    result = ExperimentResult(
        config=cfg,
        spectrum=spectrum,
        params=p,
        renormalized=r,
        regime=regime,
        field=extract.field,
        t_end=t_end,
        zero_field=zero_field,
        numeric=numeric,
        numeric4=numeric4,
        analytic=analytic,
        analytic_vs_numeric4=compare_series(analytic, numeric4),
        analytic_vs_numeric=compare_series(analytic, numeric),
        numeric_vs_numeric4=compare_series(numeric, numeric4),
    )
    if write:
        write_outputs(result)
    return result


def write_outputs(result: ExperimentResult) -> dict[str, Path]:
    out = Path(result.config.outputs)
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "spectrum_energies": out / "spectrum_energies.csv",
        "spectrum_dipole": out / "spectrum_dipole.csv",
        "bare_numeric": out / "bare_numeric.csv",
        "bare_analytic": out / "bare_analytic.csv",
        "bare_numeric4": out / "bare_numeric4.csv",
        "renorm_numeric": out / "renorm_numeric.csv",
        "renorm_analytic": out / "renorm_analytic.csv",
        "renorm_numeric4": out / "renorm_numeric4.csv",
        "report": out / "report.txt",
    }
    write_spectrum_csv(result.spectrum, files["spectrum_energies"], files["spectrum_dipole"])
    write_series_csv(files["bare_numeric"], result.numeric, renormalized=False)
    write_series_csv(files["bare_analytic"], result.analytic, renormalized=False)
    write_series_csv(files["bare_numeric4"], result.numeric4, renormalized=False)
    write_series_csv(files["renorm_numeric"], result.numeric, renormalized=True)
    write_series_csv(files["renorm_analytic"], result.analytic, renormalized=True)
    write_series_csv(files["renorm_numeric4"], result.numeric4, renormalized=True)
    files["report"].write_text(format_report(result))
    result.files = files
    return files


def _fmt(v: float) -> str:
    return f"{v:.10g}"


def _comparison_lines(title: str, c: SeriesComparison) -> list[str]:
    return [
        f"{title}",
        "  max |dP| bare    : " + "  ".join(_fmt(v) for v in c.max_bare),
        "  max |dP| dressed : " + "  ".join(_fmt(v) for v in c.max_renorm),
        f"  rms bare / dressed: {_fmt(c.rms_bare)} / {_fmt(c.rms_renorm)}",
    ]


def format_report(res: ExperimentResult) -> str:
    cfg, p, r, reg = res.config, res.params, res.renormalized, res.regime
    lines = ["Driven double well: dressed four-level model vs exact propagation", ""]
    if not reg.within_validity:
        lines += [
            "!" * 72,
            f"WARNING: parameters outside the validity regime (threshold {reg.threshold:g});",
            "the dressed four-level model is not expected to be accurate.",
            "!" * 72,
            "",
        ]
    if res.zero_field:
        lines += ["NOTE: zero field - populations stay constant; run length in drive periods.", ""]
    lines += [
        "[config]",
        f"  D = {_fmt(cfg.D)}",
        f"  ratio = {_fmt(cfg.ratio)}",
        f"  basis_size = {cfg.basis_size}",
        f"  basis_frequency = {_fmt(res.spectrum.basis_frequency)}"
        + ("  (optimized)" if cfg.basis_frequency is None else ""),
        f"  n_levels = {cfg.n_levels}",
        f"  periods = {_fmt(cfg.periods)}",
        f"  steps_per_period = {cfg.steps_per_period}",
        f"  initial = {cfg.initial}",
        "",
        "[spectrum]",
    ]
    for i in range(min(8, res.spectrum.n_levels)):
        lines.append(f"  E{i + 1} = {_fmt(res.spectrum.energies[i])}  parity {int(res.spectrum.parities[i]):+d}")
    lines += [
        "",
        "[four-level parameters]  (model 1,2,3,4 <- levels 1,2,5,6)",
        f"  field = {_fmt(res.field)}",
        f"  omega = E6 - E1 = {_fmt(p.omega)}",
        f"  lower splitting = {_fmt(p.lower_splitting)}",
        f"  upper splitting = {_fmt(p.upper_splitting)}",
        f"  doublet gap = {_fmt(p.doublet_gap)}",
        f"  rabi_12 = {_fmt(p.rabi_12)}",
        f"  rabi_34 = {_fmt(p.rabi_34)}",
        f"  rabi_14 = {_fmt(p.rabi_14)}",
        f"  rabi_23 = {_fmt(p.rabi_23)}",
        "  coupling signs (eigenvector gauge): "
        + " ".join(f"{n}:{'+' if v >= 0 else '-'}" for n, v in (
            ("12", p.rabi_12), ("34", p.rabi_34), ("14", p.rabi_14), ("23", p.rabi_23))),
        "",
        "[renormalized parameters]",
        f"  lower splitting = {_fmt(r.lower_splitting)}",
        f"  upper splitting = {_fmt(r.upper_splitting)}",
        f"  rabi_14 = {_fmt(r.rabi_14)}",
        f"  rabi_23 = {_fmt(r.rabi_23)}",
        f"  detuning_14 = {_fmt(r.detuning_14)}",
        f"  detuning_23 = {_fmt(r.detuning_23)}",
        f"  generalized rabi_14 = {_fmt(r.generalized_rabi_14)}",
        f"  generalized rabi_23 = {_fmt(r.generalized_rabi_23)}",
        "",
        "[regime]",
    ]
    for name, v in reg.ratios().items():
        lines.append(f"  {name} = {_fmt(v)}")
    lines += [
        f"  threshold = {_fmt(reg.threshold)}",
        f"  within_validity = {reg.within_validity}",
        "",
        "[run]",
        f"  t_end = {_fmt(res.t_end)}",
        f"  samples = {len(res.numeric)}",
        f"  norm drift (full / four-level) = {_fmt(res.numeric.norm_drift)} / {_fmt(res.numeric4.norm_drift)}",
        f"  max leakage outside levels 1,2,5,6 = {_fmt(float(res.numeric.leakage.max()))}",
        "",
        "[deviations]",
    ]
    lines += _comparison_lines("analytic vs four-level numeric", res.analytic_vs_numeric4)
    lines += _comparison_lines("analytic vs full numeric", res.analytic_vs_numeric)
    lines += _comparison_lines("full numeric vs four-level numeric", res.numeric_vs_numeric4)
    lines += [
        "",
        "[rabi period 1'<->4']",
        f"  predicted 2*pi/generalized rabi_14 = {_fmt(r.rabi_period())}",
        f"  analytic series  = {_fmt(res.analytic_vs_numeric4.rabi_period_a)}",
        f"  four-level numeric = {_fmt(res.analytic_vs_numeric4.rabi_period_b)}",
        f"  full numeric     = {_fmt(res.analytic_vs_numeric.rabi_period_b)}",
        "",
    ]
    return "\n".join(lines)
