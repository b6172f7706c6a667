"""Batch front end: configuration parsing, simulation runs, boundary
searches, and the measured-data analysis pipeline.

Configuration files are flat ``key = value`` text with optional [section]
headers; keys are globally unique, so the headers are organizational.
Scenario sections ``[scenario:<label>]`` define the correlation models to
simulate.  All defaults equal the reference simulation parameters.
"""

from __future__ import annotations

import argparse
import configparser
import io
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .channel_model import ChannelParams
from .correlation_overlap import (
    CorrelationSpec,
    IntensityProtocol,
    tg_scaled_spec,
    tg_sweep_spec,
    worst_case_spec,
)
from .experiment_ingest import (
    ClickHistogram,
    GroupWeights,
    IngestResult,
    ingest_pipeline,
)
from .keyrate_engine import (
    BoundaryBracketError,
    delta_boundary,
    max_distance,
    scan_distances,
)

__all__ = [
    "ConfigError",
    "DataError",
    "RunConfig",
    "cmd_analyze",
    "cmd_boundary",
    "cmd_simulate",
    "entrypoint",
    "load_click_histograms",
    "main",
    "parse_config",
]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3


class ConfigError(ValueError):
    """Configuration file missing, malformed, or violating an invariant."""


class DataError(ValueError):
    """Measurement data file missing, malformed, or incomplete."""


# key -> (owner, parser); owners group the flat namespace for validation only
_FLOAT_KEYS = {
    "mu": "protocol",
    "nu": "protocol",
    "omega": "protocol",
    "p_mu": "protocol",
    "p_nu": "protocol",
    "p_omega": "protocol",
    "q_z_alice": "protocol",
    "q_z_bob": "protocol",
    "eta_d": "channel",
    "alpha_db_per_km": "channel",
    "y0": "channel",
    "e_d": "channel",
    "f_ec": "channel",
    "start_km": "grid",
    "stop_km": "grid",
    "step_km": "grid",
    "k_sigma": "ingest",
}
_TEXT_KEYS = {
    "predicates": "boundary",
    "models": "boundary",
    "boundary_xi": "boundary",
    "reference_group": "ingest",
    "weights_send": "ingest",
    "weights_det": "ingest",
}
_SCENARIO_KEYS = {
    "model",
    "delta_max",
    "xi",
    "tau_semantics",
    "rel_mean_shift",
    "rel_sigma",
    "rel_lo",
    "rel_hi",
}
_SECTION_NAMES = {"top", "protocol", "channel", "grid", "boundary", "ingest"}

_DEFAULTS = {
    "mu": 0.207,
    "nu": 0.035,
    "omega": 1e-4,
    "p_mu": 1.0 - 2e-6,
    "p_nu": 1e-6,
    "p_omega": 1e-6,
    "q_z_alice": 1.0,
    "q_z_bob": 1.0,
    "eta_d": 0.53,
    "alpha_db_per_km": 0.2,
    "y0": 4e-8,
    "e_d": 0.0108,
    "f_ec": 1.16,
    "start_km": 0.0,
    "stop_km": 150.0,
    "step_km": 1.0,
    "k_sigma": 3.0,
    "predicates": "positive_at_L:1.0,positive_anywhere",
    "models": "worst_case,truncated_gaussian",
    "boundary_xi": "1",
    "reference_group": "SS",
    "weights_send": "VS:0.061,D1S:0.253,D2S:0.083,SS:0.603",
    "weights_det": "VS:1,D1S:1,D2S:1,SS:1",
}

# the reference scenario family simulated when no scenario sections appear
_DEFAULT_SCENARIOS = (
    ("baseline", {"model": "baseline"}),
    ("wc_1e-07_xi1", {"model": "worst_case", "delta_max": "1e-7", "xi": "1"}),
    ("wc_1e-03_xi1", {"model": "worst_case", "delta_max": "1e-3", "xi": "1"}),
    ("tg_1e-07", {"model": "tg_sweep", "delta_max": "1e-7"}),
    ("tg_1e-03", {"model": "tg_sweep", "delta_max": "1e-3"}),
    ("tg_1e-01", {"model": "tg_sweep", "delta_max": "1e-1"}),
)


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration for all subcommands."""

    protocol: IntensityProtocol
    channel: ChannelParams
    grid: tuple[float, float, float]  # start, stop, step (km)
    scenarios: tuple[tuple[str, CorrelationSpec], ...]
    boundary_predicates: tuple[tuple, ...]
    boundary_models: tuple[str, ...]
    boundary_xi: int
    reference_group: str
    k_sigma: float
    weights: dict[str, GroupWeights] = field(default_factory=dict)

    def grid_values(self) -> list[float]:
        start, stop, step = self.grid
        values = []
        k = 0
        while True:
            L = start + k * step
            if L > stop + 1e-9:
                break
            values.append(L)
            k += 1
        return values


def _parse_float(key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"key '{key}': cannot parse '{raw}' as a number") from None


def _parse_weight_map(key: str, raw: str) -> dict[str, float]:
    out: dict[str, float] = {}
    for item in raw.split(","):
        item = item.strip()
        if not item:
            continue
        if ":" not in item:
            raise ConfigError(f"key '{key}': entry '{item}' is not label:value")
        label, value = item.split(":", 1)
        out[label.strip()] = _parse_float(key, value.strip())
    if not out:
        raise ConfigError(f"key '{key}': no entries")
    return out


def _parse_predicates(raw: str) -> tuple[tuple, ...]:
    preds = []
    for item in raw.split(","):
        item = item.strip()
        if not item:
            continue
        if item == "positive_anywhere":
            preds.append(("positive_anywhere",))
        elif item.startswith("positive_at_L:"):
            preds.append(("positive_at_L", _parse_float("predicates", item.split(":", 1)[1])))
        else:
            raise ConfigError(f"unknown boundary predicate '{item}'")
    if not preds:
        raise ConfigError("no boundary predicates configured")
    return tuple(preds)


def _build_scenario(label: str, raw: dict[str, str], protocol: IntensityProtocol) -> CorrelationSpec:
    unknown = sorted(set(raw) - _SCENARIO_KEYS)
    if unknown:
        raise ConfigError(f"scenario '{label}': unknown keys: {', '.join(unknown)}")
    model = raw.get("model", "baseline")
    xi = int(_parse_float("xi", raw.get("xi", "1")))
    semantics = raw.get("tau_semantics", "mixture")
    try:
        if model == "baseline":
            return worst_case_spec(0.0, xi=xi)
        if model == "worst_case":
            return worst_case_spec(_parse_float("delta_max", raw["delta_max"]), xi=xi)
        if model == "tg_sweep":
            return tg_sweep_spec(
                protocol.intensities,
                _parse_float("delta_max", raw["delta_max"]),
                xi=xi,
                tau_semantics=semantics,
            )
        if model == "tg_scaled":
            return tg_scaled_spec(
                protocol.intensities,
                _parse_float("rel_mean_shift", raw["rel_mean_shift"]),
                _parse_float("rel_sigma", raw["rel_sigma"]),
                _parse_float("rel_lo", raw["rel_lo"]),
                _parse_float("rel_hi", raw["rel_hi"]),
                xi=xi,
                tau_semantics=semantics,
            )
    except KeyError as exc:
        raise ConfigError(f"scenario '{label}': missing key {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"scenario '{label}': {exc}") from None
    raise ConfigError(f"scenario '{label}': unknown model '{model}'")


def parse_config(path: str | Path) -> RunConfig:
    """Parse and validate a configuration file; defaults fill gaps."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    text = path.read_text(encoding="utf-8")

    parser = configparser.ConfigParser(
        delimiters=("=",),
        comment_prefixes=("#",),
        inline_comment_prefixes=("#",),
        interpolation=None,
        strict=True,
    )
    parser.optionxform = str  # keep keys verbatim
    try:
        # bare top-level keys are allowed; the injected header costs one line
        parser.read_string("[top]\n" + text, source=str(path))
    except configparser.ParsingError as exc:
        details = "; ".join(f"line {lineno - 1}: {line}" for lineno, line in exc.errors)
        raise ConfigError(f"{path}: malformed config ({details})") from None
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(
            f"{path}: duplicate key '{exc.option}' (line {exc.lineno - 1})"
        ) from None
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(
            f"{path}: duplicate section '{exc.section}' (line {exc.lineno - 1})"
        ) from None

    values = dict(_DEFAULTS)
    seen: set[str] = set()
    scenario_sections: list[tuple[str, dict[str, str]]] = []
    for section in parser.sections():
        if section.startswith("scenario:"):
            label = section.split(":", 1)[1].strip()
            if not label:
                raise ConfigError("scenario section needs a label: [scenario:<label>]")
            scenario_sections.append((label, dict(parser.items(section))))
            continue
        if section not in _SECTION_NAMES:
            raise ConfigError(f"unknown section [{section}]")
        for key, raw in parser.items(section):
            if key not in _FLOAT_KEYS and key not in _TEXT_KEYS:
                raise ConfigError(f"unknown key '{key}'")
            if key in seen:
                raise ConfigError(f"key '{key}' assigned more than once")
            seen.add(key)
            values[key] = _parse_float(key, raw) if key in _FLOAT_KEYS else raw

    try:
        protocol = IntensityProtocol(
            mu=values["mu"],
            nu=values["nu"],
            omega=values["omega"],
            p_mu=values["p_mu"],
            p_nu=values["p_nu"],
            p_omega=values["p_omega"],
            q_z_alice=values["q_z_alice"],
            q_z_bob=values["q_z_bob"],
        )
    except ValueError as exc:
        raise ConfigError(f"protocol: {exc}") from None
    try:
        channel = ChannelParams(
            eta_d=values["eta_d"],
            alpha_db_per_km=values["alpha_db_per_km"],
            L_km=0.0,
            Y0=values["y0"],
            e_d=values["e_d"],
            f_ec=values["f_ec"],
        )
    except ValueError as exc:
        raise ConfigError(f"channel: {exc}") from None

    start, stop, step = values["start_km"], values["stop_km"], values["step_km"]
    if start < 0.0 or stop < start or step <= 0.0:
        raise ConfigError(
            f"grid: need 0 <= start_km <= stop_km and step_km > 0 "
            f"(got {start}, {stop}, {step})"
        )

    if not scenario_sections:
        scenario_sections = [(label, dict(raw)) for label, raw in _DEFAULT_SCENARIOS]
    labels = [label for label, _ in scenario_sections]
    if len(set(labels)) != len(labels):
        raise ConfigError("scenario labels must be unique")
    scenarios = tuple(
        (label, _build_scenario(label, raw, protocol)) for label, raw in scenario_sections
    )

    send = _parse_weight_map("weights_send", str(values["weights_send"]))
    det = _parse_weight_map("weights_det", str(values["weights_det"]))
    if set(det) != set(send):
        raise ConfigError("weights_send and weights_det must cover the same groups")
    weights = {g: GroupWeights(w_send=send[g], w_det=det[g]) for g in send}
    reference_group = str(values["reference_group"])
    if reference_group not in weights:
        raise ConfigError(f"reference_group '{reference_group}' has no weights")

    return RunConfig(
        protocol=protocol,
        channel=channel,
        grid=(start, stop, step),
        scenarios=scenarios,
        boundary_predicates=_parse_predicates(str(values["predicates"])),
        boundary_models=tuple(
            m.strip() for m in str(values["models"]).split(",") if m.strip()
        ),
        boundary_xi=int(_parse_float("boundary_xi", str(values["boundary_xi"]))),
        reference_group=reference_group,
        k_sigma=values["k_sigma"],
        weights=weights,
    )


def _write_curve_rows(fh: io.TextIOBase, rows) -> None:
    fh.write("L_km,total_km,key_rate,scenario\n")
    for L, rate, label in rows:
        fh.write(f"{L!r},{2.0 * L!r},{rate!r},{label}\n")


def cmd_simulate(config: RunConfig, out_dir: str | Path) -> list[Path]:
    """Scan every scenario over the distance grid; one CSV per scenario plus
    a combined CSV.  Deterministic byte-for-byte."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    grid = config.grid_values()
    written = []
    combined_rows = []
    for label, spec in config.scenarios:
        curve = scan_distances(config.protocol, spec, config.channel, grid, label)
        rows = [(p.L_km, p.rate, label) for p in curve.points]
        combined_rows.extend(rows)
        path = out / f"{label}.csv"
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            _write_curve_rows(fh, rows)
        written.append(path)
    combined = out / "combined.csv"
    with open(combined, "w", encoding="utf-8", newline="\n") as fh:
        _write_curve_rows(fh, combined_rows)
    written.append(combined)
    return written


def cmd_boundary(config: RunConfig) -> str:
    """Largest admissible deviation per configured predicate and model."""
    lines = []
    for model_kind in config.boundary_models:
        for predicate in config.boundary_predicates:
            pred_text = (
                f"positive_at_L:{predicate[1]!r}"
                if predicate[0] == "positive_at_L"
                else "positive_anywhere"
            )
            try:
                star = delta_boundary(
                    config.protocol,
                    config.channel,
                    model_kind,
                    predicate,
                    xi=config.boundary_xi,
                )
            except BoundaryBracketError:
                lines.append(
                    f"model={model_kind} predicate={pred_text} "
                    "no boundary: baseline infeasible"
                )
                continue
            lines.append(
                f"model={model_kind} predicate={pred_text} delta_star={star:.6g}"
            )
    return "\n".join(lines) + "\n"


def load_click_histograms(path: str | Path) -> dict[str, ClickHistogram]:
    """Load per-pattern histograms from delimited text with the header
    ``pattern,bin_center,count``; comment lines start with '#'."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"data file not found: {path}")
    groups: dict[str, list[tuple[float, float]]] = {}
    header_seen = False
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if not header_seen:
            if line.replace(" ", "") != "pattern,bin_center,count":
                raise DataError(f"{path}:{lineno}: expected header 'pattern,bin_center,count'")
            header_seen = True
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 3:
            raise DataError(f"{path}:{lineno}: expected 3 fields, got {len(parts)}")
        pattern, center_raw, count_raw = parts
        try:
            center = float(center_raw)
            count = float(count_raw)
        except ValueError:
            raise DataError(f"{path}:{lineno}: cannot parse numeric fields") from None
        groups.setdefault(pattern, []).append((center, count))
    if not header_seen:
        raise DataError(f"{path}: no header line found")
    histograms = {}
    for pattern, rows in groups.items():
        rows.sort(key=lambda r: r[0])
        centers = np.array([r[0] for r in rows])
        counts = np.array([r[1] for r in rows])
        try:
            histograms[pattern] = ClickHistogram(pattern, centers, counts)
        except ValueError as exc:
            raise DataError(f"{path}: {exc}") from None
    if not histograms:
        raise DataError(f"{path}: no histogram rows")
    return histograms


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _analysis_report(
    result: IngestResult,
    distances: dict[str, float],
    reference_group: str,
    nominal: float,
) -> str:
    lines = [
        f"reference group: {reference_group} (nominal intensity {_fmt(nominal)})",
        f"calibration (intensity per click rate): {result.calibration!r}",
        f"fit[{reference_group}]: mean={_fmt(result.reference_fit[0])} sigma={_fmt(result.reference_fit[1])}",
        f"fit[combined]: mean={_fmt(result.combined_fit[0])} sigma={_fmt(result.combined_fit[1])}",
        f"correlation component: mean={_fmt(result.correlation[0])} sigma={_fmt(result.correlation[1])}",
        f"deviation range: [{_fmt(result.deviation_range[0])}, {_fmt(result.deviation_range[1])}]",
        f"delta_max: {_fmt(result.delta_max)}",
    ]
    if result.tg_params is not None:
        tg = result.tg_params
        lines.append(
            f"truncated gaussian: gamma={_fmt(tg.gamma)} sigma={_fmt(tg.sigma)} "
            f"support=[{_fmt(tg.lambda_lo)}, {_fmt(tg.lambda_hi)}]"
        )
    else:
        lines.append("truncated gaussian: degenerate (no spread)")
    for label, md in distances.items():
        lines.append(
            f"max_distance[{label}]: per_arm_km={md:.2f} total_km={2.0 * md:.2f}"
        )
    return "\n".join(lines) + "\n"


def _derived_config_text(config: RunConfig, result: IngestResult) -> str:
    p, c = config.protocol, config.channel
    lines = [
        "# Derived from measured click-rate data; usable directly by `simulate`.",
        "[protocol]",
        f"mu = {p.mu!r}",
        f"nu = {p.nu!r}",
        f"omega = {p.omega!r}",
        f"p_mu = {p.p_mu!r}",
        f"p_nu = {p.p_nu!r}",
        f"p_omega = {p.p_omega!r}",
        f"q_z_alice = {p.q_z_alice!r}",
        f"q_z_bob = {p.q_z_bob!r}",
        "[channel]",
        f"eta_d = {c.eta_d!r}",
        f"alpha_db_per_km = {c.alpha_db_per_km!r}",
        f"y0 = {c.Y0!r}",
        f"e_d = {c.e_d!r}",
        f"f_ec = {c.f_ec!r}",
        "[grid]",
        f"start_km = {config.grid[0]!r}",
        f"stop_km = {config.grid[1]!r}",
        f"step_km = {config.grid[2]!r}",
        "[scenario:applied_worst_case]",
        "model = worst_case",
        f"delta_max = {result.delta_max!r}",
        "xi = 1",
    ]
    if result.tg_params is not None:
        lines += [
            "[scenario:applied_tg]",
            "model = tg_scaled",
            f"rel_mean_shift = {result.rel_mean_shift!r}",
            f"rel_sigma = {result.rel_sigma!r}",
            f"rel_lo = {result.rel_lo!r}",
            f"rel_hi = {result.rel_hi!r}",
            "xi = 1",
        ]
    return "\n".join(lines) + "\n"


def cmd_analyze(
    config: RunConfig, data_path: str | Path, out_dir: str | Path
) -> tuple[str, Path]:
    """Extract correlation parameters from measured histograms, report the
    resulting reach under both models, and write a config for `simulate`."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    histograms = load_click_histograms(data_path)
    try:
        result = ingest_pipeline(
            histograms,
            config.weights,
            config.reference_group,
            nominal=config.protocol.mu,
            k_sigma=config.k_sigma,
        )
    except KeyError as exc:
        raise DataError(str(exc.args[0])) from None
    except ValueError as exc:
        raise DataError(str(exc)) from None

    distances = {}
    wc_spec = worst_case_spec(result.delta_max)
    distances["worst_case"] = max_distance(config.protocol, wc_spec, config.channel)
    if result.tg_params is not None:
        tg_spec = tg_scaled_spec(
            config.protocol.intensities,
            result.rel_mean_shift,
            result.rel_sigma,
            result.rel_lo,
            result.rel_hi,
        )
        distances["truncated_gaussian"] = max_distance(
            config.protocol, tg_spec, config.channel
        )

    report = _analysis_report(result, distances, config.reference_group, config.protocol.mu)
    (out / "analysis_report.txt").write_text(report, encoding="utf-8")
    derived = out / "applied_config.conf"
    derived.write_text(_derived_config_text(config, result), encoding="utf-8")
    return report, derived


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="mdiqkd-corr",
        description="Key-rate bounds for MDI QKD transmitters with intensity correlations",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="scan key-rate curves over distance")
    p_sim.add_argument("--config", required=True)
    p_sim.add_argument("--out", required=True)

    p_bound = sub.add_parser("boundary", help="largest admissible deviation searches")
    p_bound.add_argument("--config", required=True)

    p_ana = sub.add_parser("analyze", help="extract correlation parameters from data")
    p_ana.add_argument("--config", required=True)
    p_ana.add_argument("--data", required=True)
    p_ana.add_argument("--out", required=True)

    args = parser.parse_args(argv)
    try:
        config = parse_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.command == "simulate":
            written = cmd_simulate(config, args.out)
            for path in written:
                print(path)
        elif args.command == "boundary":
            print(cmd_boundary(config), end="")
        elif args.command == "analyze":
            report, derived = cmd_analyze(config, args.data, args.out)
            print(report, end="")
            print(f"derived config: {derived}")
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def entrypoint() -> None:  # console-script shim
    sys.exit(main())
