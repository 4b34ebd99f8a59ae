"""Scenario runner: config parsing, named experiments, provenance manifest.

Configs are flat key-value INI text.  The [run] section names the scenario
and output root, [params] carries the dimensionless run parameters, and an
optional section named after the scenario carries its extra knobs.  An
optional [physical] section derives kick_strength and scaled_planck from
laboratory parameters, overriding the [params] values.

All outputs of one run land in a single directory named by timestamp plus a
digest of the canonical config; a manifest.json listing every output file
with its SHA-256 digest is written last.  Data files contain no timestamps,
so identical config + seed reproduce byte-identical data.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import io
import json
import sys
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .model import (
    ParameterError,
    PhysicalParams,
    SimParams,
    physical_to_scaled,
)
from . import analysis, classical, quantum, wigner

TWO_PI = 2.0 * np.pi

DEFAULT_CONFIG = """\
# Default run configuration (caesium double-pulse experiment values).
[run]
scenario = transport
output_dir = runs

[params]
kick_strength = 270
scaled_planck = 2.6
se_probability = 0.0187
pulse_width = 1/20
pulse_spacing = 1/10
basis_size = 128
n_kicks = 70
n_trajectories = 10000
rng_seed = 20020
init_momentum_sigma = 10.0
kick_spread_rms = 0.0

[transport]
eta_values = 0 0.0187 0.0503
boundary_over_pi = 10

[waterfall]
n_kicks = 50

[poincare]
n_seeds = 60
n_kicks = 300
rho_max_over_pi = 16

[wigner]
eta_values = 0 0.02
checkpoint_kicks = 70

[flux]
boundary_over_pi = 10
n_seeds = 100000
n_replicates = 8
"""

SCENARIOS = {
    "transport": "fraction outside the KAM boundary vs kick number, classical + quantum eta sweep",
    "waterfall": "per-kick quantum momentum distributions",
    "poincare": "stroboscopic phase-space section of the classical map",
    "wigner": "coarse-grained toroidal Wigner snapshots and negativity, per eta",
    "flux": "classical phase-space flux through the KAM boundary",
}


class ConfigError(ValueError):
    """Malformed or invalid run configuration."""


@dataclass
class RunConfig:
    scenario: str
    output_dir: str
    params: SimParams
    extra: dict = field(default_factory=dict)       # scenario-section options
    physical: PhysicalParams | None = None

    def canonical(self) -> str:
        """Normalized key=value text; equal configs give equal text."""
        lines = [f"scenario={self.scenario}", f"output_dir={self.output_dir}"]
        p = self.params
        lines += [
            f"params.kick_strength={p.kick_strength!r}",
            f"params.scaled_planck={p.scaled_planck!r}",
            f"params.se_probability={p.se_probability!r}",
            f"params.pulse_width={p.pulse_width}",
            f"params.pulse_spacing={p.pulse_spacing}",
            f"params.basis_size={p.basis_size}",
            f"params.n_kicks={p.n_kicks}",
            f"params.n_trajectories={p.n_trajectories}",
            f"params.rng_seed={p.rng_seed}",
            f"params.init_momentum_sigma={p.init_momentum_sigma!r}",
            f"params.kick_spread_rms={p.kick_spread_rms!r}",
        ]
        for key in sorted(self.extra):
            lines.append(f"{self.scenario}.{key}={self.extra[key]}")
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()


@dataclass
class RunManifest:
    config_canonical: str
    version: str
    wall_clock_s: float
    files: dict[str, str]            # relative path -> sha256

    def write(self, path: Path) -> None:
        payload = {
            "config": self.config_canonical,
            "version": self.version,
            "wall_clock_s": self.wall_clock_s,
            "files": dict(sorted(self.files.items())),
        }
        path.write_text(json.dumps(payload, indent=2) + "\n")


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"cannot parse fraction {text!r}: {exc}") from None


def parse_config(text: str) -> RunConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config syntax error: {exc}") from None

    if "run" not in cp:
        raise ConfigError("missing [run] section")
    scenario = cp["run"].get("scenario", "").strip()
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}; known: {', '.join(sorted(SCENARIOS))}")
    output_dir = cp["run"].get("output_dir", "runs").strip()

    physical = None
    kick_strength = scaled_planck = None
    if "physical" in cp:
        sec = cp["physical"]
        try:
            physical = PhysicalParams(
                rabi_frequency=sec.getfloat("rabi_frequency"),
                detunings=tuple(float(x) for x in sec.get("detunings").split()),
                wave_number=sec.getfloat("wave_number"),
                atom_mass=sec.getfloat("atom_mass"),
                pulse_period=sec.getfloat("pulse_period"),
            )
        except (TypeError, ValueError, ParameterError) as exc:
            raise ConfigError(f"[physical]: {exc}") from None
        kick_strength, scaled_planck = physical_to_scaled(physical)

    sec = cp["params"] if "params" in cp else {}

    def fget(key, default, cast=float):
        if key in sec:
            try:
                return cast(sec[key])
            except ValueError as exc:
                raise ConfigError(f"[params] {key}: {exc}") from None
        return default

    try:
        params = SimParams(
            kick_strength=kick_strength if kick_strength is not None else fget("kick_strength", 270.0),
            scaled_planck=scaled_planck if scaled_planck is not None else fget("scaled_planck", 2.6),
            se_probability=fget("se_probability", 0.0),
            pulse_width=fget("pulse_width", Fraction(1, 20), _parse_fraction),
            pulse_spacing=fget("pulse_spacing", Fraction(1, 10), _parse_fraction),
            basis_size=fget("basis_size", 128, int),
            n_kicks=fget("n_kicks", 70, int),
            n_trajectories=fget("n_trajectories", 10_000, int),
            rng_seed=fget("rng_seed", 0, int),
            init_momentum_sigma=fget("init_momentum_sigma", 10.0),
            kick_spread_rms=fget("kick_spread_rms", 0.0),
        )
    except ParameterError as exc:
        raise ConfigError(f"[params]: {exc}") from None

    extra = dict(cp[scenario]) if scenario in cp else {}
    return RunConfig(scenario, output_dir, params, extra, physical)


def _eta_list(cfg: RunConfig) -> list[float]:
    raw = cfg.extra.get("eta_values", "")
    if not raw.strip():
        return [cfg.params.se_probability]
    try:
        etas = [float(x) for x in raw.replace(",", " ").split()]
    except ValueError as exc:
        raise ConfigError(f"eta_values: {exc}") from None
    for e in etas:
        if not 0.0 <= e <= 1.0:
            raise ConfigError(f"eta value {e} outside [0, 1]")
    return etas


def _boundary(cfg: RunConfig) -> float:
    return float(cfg.extra.get("boundary_over_pi", 10.0)) * np.pi


def _write_text(outdir: Path, name: str, text: str, files: dict) -> None:
    path = outdir / name
    path.write_text(text)
    files[name] = hashlib.sha256(path.read_bytes()).hexdigest()


def _savetxt(outdir: Path, name: str, data, header: str, files: dict, fmt="%.10g") -> None:
    buf = io.StringIO()
    np.savetxt(buf, np.asarray(data), header=header, comments="# ", fmt=fmt)
    _write_text(outdir, name, buf.getvalue(), files)


def _scenario_transport(cfg: RunConfig, outdir: Path, files: dict) -> None:
    p = cfg.params
    train = p.pulse_train()
    boundary = _boundary(cfg)
    etas = _eta_list(cfg)

    ensemble = classical.thermal_ensemble(p)
    rec = classical.evolve_ensemble(ensemble, p, train, method="elliptic")
    curve = analysis.transport_curve_classical(rec, boundary, {"k": p.kick_strength})
    _savetxt(
        outdir, "classical.dat",
        np.column_stack([curve.kicks, curve.fraction_outside]),
        f"classical fraction outside |rho|={boundary:.6g}, k={p.kick_strength}\nkick fraction_outside",
        files,
    )

    rho0 = quantum.DensityMatrix.thermal(p.basis_size, p.scaled_planck, p.init_momentum_sigma)
    floquet = quantum.build_floquet(p.basis_size, p.kick_strength, p.scaled_planck, train)
    index_lines = ["# eta file", f"classical {Path('classical.dat')}"]
    for eta in etas:
        qrec = quantum.evolve_density(rho0, floquet, eta, p.n_kicks)
        qcurve = analysis.transport_curve_quantum(qrec, p.scaled_planck, boundary, {"eta": eta})
        name = f"quantum_eta_{eta:g}.dat"
        _savetxt(
            outdir, name,
            np.column_stack([qcurve.kicks, qcurve.fraction_outside]),
            f"quantum fraction outside |rho|={boundary:.6g}, k={p.kick_strength}, eta={eta:g}\n"
            "kick fraction_outside",
            files,
        )
        index_lines.append(f"{eta:g} {name}")
    _write_text(outdir, "index.dat", "\n".join(index_lines) + "\n", files)


def _scenario_waterfall(cfg: RunConfig, outdir: Path, files: dict) -> None:
    p = cfg.params
    n_kicks = int(cfg.extra.get("n_kicks", p.n_kicks))
    rho0 = quantum.DensityMatrix.thermal(p.basis_size, p.scaled_planck, p.init_momentum_sigma)
    floquet = quantum.build_floquet(p.basis_size, p.kick_strength, p.scaled_planck, p.pulse_train())
    rec = quantum.evolve_density(rho0, floquet, p.se_probability, n_kicks)
    n = quantum.momentum_ladder(p.basis_size)
    blocks = []
    for i, kick in enumerate(rec.kicks):
        rows = "\n".join(
            f"{kick} {ni * p.scaled_planck / np.pi:.10g} {pi:.10g}"
            for ni, pi in zip(n, rec.populations[i])
        )
        blocks.append(rows)
    text = (
        f"# momentum distributions, k={p.kick_strength}, eta={p.se_probability:g}\n"
        "# kick rho_over_pi population  (blank line between kicks)\n"
        + "\n\n".join(blocks) + "\n"
    )
    _write_text(outdir, "waterfall.dat", text, files)


def _scenario_poincare(cfg: RunConfig, outdir: Path, files: dict) -> None:
    p = cfg.params
    n_seeds = int(cfg.extra.get("n_seeds", 60))
    n_kicks = int(cfg.extra.get("n_kicks", 300))
    rho_max = float(cfg.extra.get("rho_max_over_pi", 16.0)) * np.pi
    rho_seed = np.linspace(-rho_max, rho_max, n_seeds)
    seeds = np.column_stack([np.full(n_seeds, np.pi), rho_seed])
    section = classical.poincare_section(seeds, p.kick_strength, p.pulse_train(), n_kicks)
    _savetxt(
        outdir, "poincare.dat", section.points,
        f"Poincare section, k={p.kick_strength}, {n_seeds} seeds x {n_kicks} kicks\nphi rho",
        files,
    )


def _scenario_wigner(cfg: RunConfig, outdir: Path, files: dict) -> None:
    p = cfg.params
    etas = _eta_list(cfg)
    checkpoints = tuple(
        int(x) for x in str(cfg.extra.get("checkpoint_kicks", p.n_kicks)).replace(",", " ").split()
    )
    rho0 = quantum.DensityMatrix.thermal(p.basis_size, p.scaled_planck, p.init_momentum_sigma)
    floquet = quantum.build_floquet(p.basis_size, p.kick_strength, p.scaled_planck, p.pulse_train())
    summary = ["# eta kick negativity_volume file"]
    for eta in etas:
        rec = quantum.evolve_density(rho0, floquet, eta, max(checkpoints), checkpoints)
        for kick in checkpoints:
            grid = wigner.toroidal_wigner(rec.checkpoints[kick], p.scaled_planck)
            coarse = grid.coarse()
            xc, pc = grid.coarse_axes()
            name = f"wigner_eta_{eta:g}_kick_{kick}.dat"
            xx, pp = np.meshgrid(xc, pc, indexing="ij")
            _savetxt(
                outdir, name,
                np.column_stack([xx.ravel(), pp.ravel(), coarse.T.ravel()]),
                f"coarse toroidal Wigner function, k={p.kick_strength}, eta={eta:g}, kick={kick}\nX P w",
                files,
            )
            summary.append(f"{eta:g} {kick} {wigner.negativity_volume(grid):.10g} {name}")
    _write_text(outdir, "negativity.dat", "\n".join(summary) + "\n", files)


def _scenario_flux(cfg: RunConfig, outdir: Path, files: dict) -> None:
    p = cfg.params
    boundary = _boundary(cfg)
    est = classical.cantorus_flux(
        p.kick_strength,
        p.pulse_train(),
        boundary,
        n_seeds=int(cfg.extra.get("n_seeds", 100_000)),
        n_replicates=int(cfg.extra.get("n_replicates", 8)),
        rng_seed=p.rng_seed,
    )
    text = (
        f"# phase-space flux through |rho|={boundary:.6g} per kick cycle, k={p.kick_strength}\n"
        f"flux {est.flux:.10g}\n"
        f"stderr {est.stderr:.10g}\n"
        f"flux_over_hbar_k {est.flux / p.scaled_planck:.10g}\n"
        f"n_crossings {est.n_crossings}\n"
        "# per-replicate samples (out, in alternating)\n"
        + "\n".join(f"sample {s:.10g}" for s in est.samples) + "\n"
    )
    _write_text(outdir, "flux.dat", text, files)


_SCENARIO_FUNCS = {
    "transport": _scenario_transport,
    "waterfall": _scenario_waterfall,
    "poincare": _scenario_poincare,
    "wigner": _scenario_wigner,
    "flux": _scenario_flux,
}


def run_scenario(cfg: RunConfig, stamp: str | None = None) -> tuple[Path, RunManifest]:
    """Execute a scenario; returns (run directory, manifest)."""
    t0 = time.monotonic()
    stamp = stamp or datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%S")
    outdir = Path(cfg.output_dir) / f"{stamp}-{cfg.digest()[:8]}"
    outdir.mkdir(parents=True, exist_ok=True)
    files: dict[str, str] = {}
    _write_text(outdir, "config.ini", cfg.canonical(), files)
    _SCENARIO_FUNCS[cfg.scenario](cfg, outdir, files)
    manifest = RunManifest(cfg.canonical(), __version__, time.monotonic() - t0, files)
    manifest.write(outdir / "manifest.json")
    return outdir, manifest


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="cantori", description="Driven-rotor cantori transport simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="execute a scenario from a config file")
    p_run.add_argument("config", type=Path)
    p_val = sub.add_parser("validate", help="check a config file without computing")
    p_val.add_argument("config", type=Path)
    sub.add_parser("list-scenarios", help="list known scenarios")
    sub.add_parser("default-config", help="print the default configuration")
    args = parser.parse_args(argv)

    if args.command == "list-scenarios":
        for name, desc in sorted(SCENARIOS.items()):
            print(f"{name:10s} {desc}")
        return 0
    if args.command == "default-config":
        print(DEFAULT_CONFIG, end="")
        return 0

    try:
        text = args.config.read_text()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 4
    try:
        cfg = parse_config(text)
    except (ConfigError, ParameterError) as exc:
        print(f"error: invalid config: {exc}", file=sys.stderr)
        return 2

    if args.command == "validate":
        print(f"ok: scenario={cfg.scenario} digest={cfg.digest()[:12]}")
        return 0

    try:
        outdir, manifest = run_scenario(cfg)
    except (ConfigError, ParameterError) as exc:
        print(f"error: invalid config: {exc}", file=sys.stderr)
        return 2
    except (classical.NumericalDomainError, classical.StatisticsError) as exc:
        print(f"error: compute failed in scenario {cfg.scenario}: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: I/O failure: {exc}", file=sys.stderr)
        return 4
    print(f"wrote {len(manifest.files)} files to {outdir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
