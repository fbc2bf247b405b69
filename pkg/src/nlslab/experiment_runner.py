"""Configuration, persistence, and orchestration of the experiment suite.

Config files are plain sectioned key = value text (decimal or scientific
numbers, booleans true/false); every key is schema-checked and errors carry
the offending line number.  Runs are deterministic for a fixed config and
seed, and every artifact a run produces is listed with its SHA-256 in a
manifest written last.

File formats
------------
state file (binary):   line 1  b"NLS-LAB state v1"
                       line 2  JSON header {n_points, r_max, beta, t, gauge_phase}
                       payload complex128 little-endian, all u samples then all v
time series (CSV):     header  t,mass,energy,kinetic,potential,delta,h1norm,
                               alpha,theta0,theta1,alpha_plus,alpha_minus,verdict_flag
                       floats in shortest round-trip form; columns that a run
                       does not compute hold "nan"
summary (JSON):        {beta, branch, e0?, verdicts{}, fits[{quantity, window,
                        rate, amplitude, residual}]}
"""

import hashlib
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

from . import __version__
from .radial_core import make_grid, pair_from_values, mass, kinetic, energy
from .ground_state import build_ground_state, pohozaev_residuals, sharp_gn_constant, profile_residual
from .evolution import EvolutionConfig, evolve as evolve_pair
from .threshold_diagnostics import (
    fit_exponential_decay,
    make_virial_weight,
    modulation_solve,
    second_virial,
    virial_V,
    virial_Vprime,
)

CSV_HEADER = ("t,mass,energy,kinetic,potential,delta,h1norm,"
              "alpha,theta0,theta1,alpha_plus,alpha_minus,verdict_flag")


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# config
# ---------------------------------------------------------------------------

def _as_bool(s):
    if s.lower() in ("true", "yes", "1", "on"):
        return True
    if s.lower() in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


SCHEMA = {
    "run": {
        "beta": (float, 3.0),
        "branch": (str, "symmetric"),
        "seed": (int, 12345),
        "output_dir": (str, "runs/out"),
    },
    "grid": {
        "n_points": (int, 4096),
        "r_max": (float, 30.0),
    },
    "evolution": {
        "dt": (float, 1e-3),
        "t_start": (float, 0.0),
        "t_end": (float, 5.0),
        "sample_every": (int, 100),
        "blowup_K_factor": (float, 5.0),
        "tail_fraction_tol": (float, 0.1),
        "scatter_P_factor": (float, 0.01),
        "store_states_every": (int, 0),
        "modulation": (_as_bool, False),
        "input_state": (str, ""),
        "spectral_projections": (_as_bool, False),
    },
    "special": {
        "A": (float, -1.0),
        "l": (int, 4),
        "t0_mode": (str, "auto"),
        "t0": (float, 0.5),
        "t0_fraction": (float, 0.05),
        "align_energy": (_as_bool, True),
    },
    "diagnostics": {
        "delta0_factor": (float, 0.1),
        "virial_R": (float, 8.0),
        "virial_mode": (str, "exact_quadratic"),
        "fit_t_lo": (float, float("nan")),
        "fit_t_hi": (float, float("nan")),
    },
}


@dataclass
class ExperimentConfig:
    values: dict                      # section -> key -> value
    source_text: str = ""

    def __getitem__(self, addr):
        sect, key = addr.split(".")
        return self.values[sect][key]

    def section(self, name):
        return self.values[name]

    def snapshot(self):
        lines = []
        for sect in sorted(self.values):
            lines.append(f"[{sect}]")
            for key in sorted(self.values[sect]):
                lines.append(f"{key} = {self.values[sect][key]}")
            lines.append("")
        return "\n".join(lines)


def parse_config(text, overrides=()):
    """Parse sectioned key=value text, validate against the schema.

    `overrides` are "section.key=value" strings applied after the file.
    """
    values = {s: {k: d for k, (_, d) in keys.items()} for s, keys in SCHEMA.items()}
    section = None
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in SCHEMA:
                raise ConfigError(f"line {ln}: unknown section [{section}]")
            continue
        if "=" not in line:
            raise ConfigError(f"line {ln}: expected key = value, got {raw!r}")
        if section is None:
            raise ConfigError(f"line {ln}: key outside any [section]")
        key, _, val = (p.strip() for p in line.partition("="))
        if key not in SCHEMA[section]:
            raise ConfigError(f"line {ln}: unknown key {key!r} in [{section}]")
        typ = SCHEMA[section][key][0]
        try:
            values[section][key] = typ(val)
        except ValueError as exc:
            raise ConfigError(f"line {ln}: cannot parse {key} = {val!r}: {exc}") from None
    for ov in overrides:
        addr, _, val = ov.partition("=")
        if "." not in addr or not val:
            raise ConfigError(f"override must be section.key=value, got {ov!r}")
        sect, key = addr.split(".", 1)
        if sect not in SCHEMA or key not in SCHEMA[sect]:
            raise ConfigError(f"override targets unknown key {addr!r}")
        try:
            values[sect][key] = SCHEMA[sect][key][0](val)
        except ValueError as exc:
            raise ConfigError(f"cannot parse override {ov!r}: {exc}") from None

    cfg = ExperimentConfig(values, source_text=text)
    _validate(cfg)
    return cfg


def _validate(cfg):
    beta = cfg["run.beta"]
    branch = cfg["run.branch"]
    if beta <= 0:
        raise ConfigError("beta must be positive")
    if beta == 1.0:
        raise ConfigError("beta = 1 is the degenerate coupling (a continuum of "
                          "ground states); pick beta < 1 or beta > 1")
    if branch not in ("semi_trivial_first", "semi_trivial_second", "symmetric"):
        raise ConfigError(f"unknown branch {branch!r}")
    if branch == "symmetric" and beta < 1:
        raise ConfigError("branch = symmetric requires beta > 1")
    if branch.startswith("semi_trivial") and beta > 1:
        raise ConfigError("semi-trivial branches require 0 < beta < 1")
    if cfg["grid.n_points"] < 16 or cfg["grid.r_max"] <= 0:
        raise ConfigError("grid must satisfy n_points >= 16, r_max > 0")
    if cfg["evolution.dt"] <= 0:
        raise ConfigError("dt must be positive")
    if cfg["special.t0_mode"] not in ("auto", "fixed"):
        raise ConfigError("t0_mode must be auto or fixed")


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------

STATE_MAGIC = b"NLS-LAB state v1"


def _atomic_write(path, mode, emit):
    # partial files are never left behind: write aside, then rename
    tmp = str(path) + ".tmp"
    try:
        with open(tmp, mode, newline="\n" if "b" not in mode else None) as f:
            emit(f)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_state(path, s, beta, t=0.0, gauge_phase=0.0):
    g = s.grid
    header = {
        "n_points": g.n_points, "r_max": g.r_max, "beta": beta,
        "t": t, "gauge_phase": gauge_phase,
    }

    def emit(f):
        f.write(STATE_MAGIC + b"\n")
        f.write(json.dumps(header, sort_keys=True).encode() + b"\n")
        f.write(np.ascontiguousarray(s.u, dtype="<c16").tobytes())
        f.write(np.ascontiguousarray(s.v, dtype="<c16").tobytes())

    _atomic_write(path, "wb", emit)


def read_state(path):
    with open(path, "rb") as f:
        if f.readline().rstrip() != STATE_MAGIC:
            raise ValueError(f"{path}: not a state file")
        header = json.loads(f.readline())
        n = header["n_points"]
        raw = np.frombuffer(f.read(), dtype="<c16")
    if raw.size != 2 * n:
        raise ValueError(f"{path}: payload holds {raw.size} samples, expected {2*n}")
    grid = make_grid(n, header["r_max"])
    return pair_from_values(grid, raw[:n], raw[n:]), header


def _fmt(x):
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def write_timeseries_csv(path, record):
    cols = record.columns
    names = CSV_HEADER.split(",")

    def emit(f):
        f.write(CSV_HEADER + "\n")
        n = len(cols["t"])
        for i in range(n):
            f.write(",".join(_fmt(cols[k][i]) for k in names) + "\n")

    _atomic_write(path, "w", emit)


def read_timeseries_csv(path):
    with open(path) as f:
        header = f.readline().strip()
        if header != CSV_HEADER:
            raise ValueError(f"{path}: unexpected CSV header")
        rows = [line.strip().split(",") for line in f if line.strip()]
    names = CSV_HEADER.split(",")
    if not rows:
        return {k: np.array([]) for k in names}
    arr = np.array([[float(v) for v in row] for row in rows])
    return {k: arr[:, i] for i, k in enumerate(names)}


def write_summary_json(path, summary):
    def emit(f):
        json.dump(summary, f, sort_keys=True, indent=1)
        f.write("\n")

    _atomic_write(path, "w", emit)


def sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    config_snapshot: str
    code_version: str
    wall_clock: float
    files: list           # [{"path": relative, "sha256": hex}]
    verdicts: dict

    def write(self, outdir):
        path = Path(outdir) / "manifest.json"
        with open(path, "w") as f:
            json.dump(asdict(self), f, sort_keys=True, indent=1)
            f.write("\n")
        return path


def verify_manifest(outdir):
    """Check that every listed artifact exists and hashes match."""
    outdir = Path(outdir)
    with open(outdir / "manifest.json") as f:
        man = json.load(f)
    bad = []
    for entry in man["files"]:
        p = outdir / entry["path"]
        if not p.exists() or sha256_file(p) != entry["sha256"]:
            bad.append(entry["path"])
    return man, bad


# ---------------------------------------------------------------------------
# run drivers
# ---------------------------------------------------------------------------

def _outdir(cfg):
    # the OUTPUT_DIR environment override is resolved once at the CLI layer
    path = Path(cfg["run.output_dir"])
    path.mkdir(parents=True, exist_ok=True)
    return path


def _grid_gs(cfg):
    grid = make_grid(cfg["grid.n_points"], cfg["grid.r_max"])
    gs = build_ground_state(cfg["run.beta"], cfg["run.branch"], grid)
    return grid, gs


def _finish(outdir, cfg, produced, verdicts, t_start):
    files = [{"path": str(Path(p).relative_to(outdir)), "sha256": sha256_file(p)}
             for p in produced]
    # successive subcommands share an output directory: keep earlier
    # artifacts listed so the directory's manifest stays complete
    prior = Path(outdir) / "manifest.json"
    if prior.exists():
        try:
            with open(prior) as f:
                old = json.load(f)
            new_paths = {e["path"] for e in files}
            for entry in old.get("files", []):
                if entry["path"] not in new_paths and (Path(outdir) / entry["path"]).exists():
                    files.append(entry)
            merged = dict(old.get("verdicts", {}))
            merged.update(verdicts)
            verdicts = merged
        except (ValueError, KeyError):
            pass  # corrupt prior manifest: replace it outright
    files.sort(key=lambda e: e["path"])
    man = RunManifest(
        config_snapshot=cfg.snapshot(),
        code_version=__version__,
        wall_clock=time.time() - t_start,
        files=files,
        verdicts=verdicts,
    )
    man.write(outdir)
    return man


def run_ground(cfg):
    t0 = time.time()
    outdir = _outdir(cfg)
    grid, gs = _grid_gs(cfg)
    p1, p2 = pohozaev_residuals(gs)
    report = {
        "beta": gs.beta, "branch": gs.branch,
        "M": gs.M, "K": gs.K, "E": gs.E, "P": gs.P,
        "c_gn": sharp_gn_constant(gs),
        "pohozaev_K3M": p1, "pohozaev_P4M": p2,
        "profile_residual": profile_residual(gs),
    }
    path = outdir / "ground.json"
    write_summary_json(path, report)
    print(json.dumps(report, sort_keys=True))
    return _finish(outdir, cfg, [path], {"ground": "ok"}, t0)


def _spectrum(cfg, gs):
    from .linearized import assemble_sector, compute_spectrum
    op = assemble_sector(gs, 0)
    return compute_spectrum(op)


def run_spectrum(cfg):
    from .linearized import assemble_sector, kernel_basis
    t0 = time.time()
    outdir = _outdir(cfg)
    grid, gs = _grid_gs(cfg)
    sp = _spectrum(cfg, gs)
    k0 = kernel_basis(sp.op)
    k1 = kernel_basis(assemble_sector(gs, 1))
    report = {
        "beta": gs.beta, "branch": gs.branch,
        "e0": sp.e0, "coercivity_c": sp.coercivity_c,
        "kernel_dims": {"l0": len(k0), "l1": len(k1)},
        "residuals": {"eigenpair": sp.eig_residual,
                      "pairing_B": sp.pairing},
    }
    path = outdir / "spectrum.json"
    write_summary_json(path, report)
    print(json.dumps(report, sort_keys=True))
    return _finish(outdir, cfg, [path], {"spectrum": "ok"}, t0)


def run_special(cfg):
    from .special_solutions import (auto_t0, build_Z_sequence, initial_data_UA)
    t0c = time.time()
    outdir = _outdir(cfg)
    grid, gs = _grid_gs(cfg)
    sp = _spectrum(cfg, gs)
    series = build_Z_sequence(gs, sp, cfg["special.A"], cfg["special.l"])
    if cfg["special.t0_mode"] == "auto":
        t0 = auto_t0(series, cfg["special.t0_fraction"])
    else:
        t0 = cfg["special.t0"]
    seed = initial_data_UA(series, t0, align_energy=cfg["special.align_energy"])
    spath = outdir / "seed.state"
    write_state(spath, seed, gs.beta, t=t0)
    report = {
        "beta": gs.beta, "branch": gs.branch, "A": series.A, "l": series.l,
        "e0": sp.e0, "t0": t0,
        "seed": {"mass": mass(seed), "energy": energy(seed, gs.beta),
                 "kinetic": kinetic(seed), "K_minus_KQ": kinetic(seed) - gs.K},
        "solve_residuals": series.solve_residuals,
    }
    jpath = outdir / "special.json"
    write_summary_json(jpath, report)
    print(json.dumps(report, sort_keys=True))
    return _finish(outdir, cfg, [spath, jpath], {"special": "ok"}, t0c)


def run_evolve(cfg):
    t0c = time.time()
    outdir = _outdir(cfg)
    grid, gs = _grid_gs(cfg)
    sp = None
    if cfg["evolution.spectral_projections"]:
        sp = _spectrum(cfg, gs)
    explicit = cfg["evolution.input_state"]
    state_path = explicit or (outdir / "seed.state")
    t_start = cfg["evolution.t_start"]
    if Path(state_path).exists():
        s0, header = read_state(state_path)
        if not np.isclose(header["beta"], gs.beta):
            raise RuntimeError("state-file beta differs from the run config")
        t_start = header["t"]
    elif explicit:
        raise RuntimeError(f"input state {explicit} not found")
    else:
        s0 = gs.Q
    ecfg = EvolutionConfig(
        dt=cfg["evolution.dt"],
        t_span=(t_start, cfg["evolution.t_end"]),
        sample_every=cfg["evolution.sample_every"],
        blowup_K_factor=cfg["evolution.blowup_K_factor"],
        tail_fraction_tol=cfg["evolution.tail_fraction_tol"],
        beta=gs.beta,
        scatter_P_factor=cfg["evolution.scatter_P_factor"],
        store_states_every=cfg["evolution.store_states_every"],
        modulation=cfg["evolution.modulation"],
    )
    rec = evolve_pair(s0, ecfg, gs=gs, spectral=sp)
    produced = []
    cpath = outdir / "timeseries.csv"
    write_timeseries_csv(cpath, rec)
    produced.append(cpath)
    for i, (ts, st) in enumerate(rec.states):
        p = outdir / f"state_{i:05d}.state"
        write_state(p, st, gs.beta, t=ts)
        produced.append(p)
    fits = []
    fl, fh = cfg["diagnostics.fit_t_lo"], cfg["diagnostics.fit_t_hi"]
    if np.isfinite(fl) and np.isfinite(fh):
        try:
            fit = fit_exponential_decay(rec.t, rec.delta, (fl, fh))
            fits.append({"quantity": "delta", "window": list(fit.window),
                         "rate": fit.rate, "amplitude": fit.amplitude,
                         "residual": fit.max_log_residual})
        except ValueError as exc:
            fits.append({"quantity": "delta", "window": [fl, fh],
                         "rate": float("nan"), "amplitude": float("nan"),
                         "residual": float("nan"), "error": str(exc)})
    summary = {
        "beta": gs.beta, "branch": gs.branch,
        "e0": sp.e0 if sp else None,
        "verdicts": {"evolve": rec.verdict,
                     "termination": rec.termination,
                     "energy_drift_flag": rec.energy_drift_flag,
                     "resolution_failure": rec.resolution_failure},
        "fits": fits,
    }
    jpath = outdir / "summary.json"
    write_summary_json(jpath, summary)
    produced.append(jpath)
    man = _finish(outdir, cfg, produced, summary["verdicts"], t0c)
    print(json.dumps(summary["verdicts"], sort_keys=True))
    return man


def _iter_states(outdir):
    for p in sorted(Path(outdir).glob("state_*.state")):
        s, header = read_state(p)
        yield header["t"], s


def run_virial(cfg):
    t0c = time.time()
    outdir = _outdir(cfg)
    grid, gs = _grid_gs(cfg)
    w = make_virial_weight(grid, cfg["diagnostics.virial_R"],
                           cfg["diagnostics.virial_mode"])
    rows = []
    for ts, st in _iter_states(outdir):
        K = kinetic(st)
        regime = "high" if K >= gs.K else "low"
        rows.append((ts, virial_V(st, w), virial_Vprime(st, w),
                     second_virial(st, w, gs, regime), K - gs.K))
    if not rows:
        raise RuntimeError(
            "no state files in the run directory; rerun evolve with "
            "store_states_every > 0"
        )
    path = outdir / "virial.csv"
    with open(path, "w", newline="\n") as f:
        f.write("t,V,Vprime,Vsecond_identity,K_minus_KQ\n")
        for row in rows:
            f.write(",".join(_fmt(x) for x in row) + "\n")
    ts = np.array([r[0] for r in rows])
    V = np.array([r[1] for r in rows])
    ident = np.array([r[3] for r in rows])
    report = {"beta": gs.beta, "branch": gs.branch, "n_samples": len(rows)}
    if len(rows) >= 3:
        dt = np.diff(ts)
        if np.allclose(dt, dt[0]):
            fd = (V[2:] - 2 * V[1:-1] + V[:-2]) / dt[0] ** 2
            err = np.abs(fd - ident[1:-1])
            report["fd_vs_identity_max_rel"] = float(
                np.max(err / np.maximum(np.abs(ident[1:-1]), 1e-12))
            )
    jpath = outdir / "virial_report.json"
    write_summary_json(jpath, report)
    print(json.dumps(report, sort_keys=True))
    return _finish(outdir, cfg, [path, jpath], {"virial": "ok"}, t0c)


def run_modulate(cfg):
    t0c = time.time()
    outdir = _outdir(cfg)
    grid, gs = _grid_gs(cfg)
    delta0 = cfg["diagnostics.delta0_factor"] * gs.K
    rows = []
    for ts, st in _iter_states(outdir):
        try:
            fit = modulation_solve(st, gs, delta0=delta0)
            rows.append((ts, fit.alpha, fit.theta, fit.theta_tilde, fit.delta,
                         int(fit.converged)))
        except ValueError:
            rows.append((ts, float("nan"),) + (float("nan"),) * 3 + (0,))
    if not rows:
        raise RuntimeError("no state files to modulate; rerun evolve with "
                           "store_states_every > 0")
    path = outdir / "modulation.csv"
    with open(path, "w", newline="\n") as f:
        f.write("t,alpha,theta0,theta1,delta,converged\n")
        for row in rows:
            f.write(",".join(_fmt(x) for x in row) + "\n")
    good = [r for r in rows if np.isfinite(r[1]) and r[4] > 0]
    report = {"beta": gs.beta, "branch": gs.branch,
              "n_samples": len(rows), "n_converged": len(good)}
    if good:
        ratios = [abs(r[1]) / r[4] for r in good]
        report["alpha_over_delta"] = {"min": min(ratios), "max": max(ratios)}
    jpath = outdir / "modulation_report.json"
    write_summary_json(jpath, report)
    print(json.dumps(report, sort_keys=True))
    return _finish(outdir, cfg, [path, jpath], {"modulate": "ok"}, t0c)


SUBCOMMANDS = {
    "ground": run_ground,
    "spectrum": run_spectrum,
    "special": run_special,
    "evolve": run_evolve,
    "virial": run_virial,
    "modulate": run_modulate,
}


def run_experiment(cfg, subcommand):
    if subcommand == "sweep":
        raise ValueError("sweep needs run_sweep(cfg, axis, values)")
    try:
        fn = SUBCOMMANDS[subcommand]
    except KeyError:
        raise ValueError(f"unknown subcommand {subcommand!r}") from None
    return fn(cfg)


def run_sweep(cfg, axis, values, subcommand="ground", workers=None):
    """Independent runs along one axis, executed concurrently."""
    addr = {
        "beta": "run.beta", "A": "special.A", "l": "special.l",
        "resolution": "grid.n_points",
    }.get(axis)
    if addr is None:
        raise ValueError(f"sweep axis must be beta|A|l|resolution, got {axis!r}")
    t0c = time.time()
    base_out = _outdir(cfg)
    sect, key = addr.split(".")
    typ = SCHEMA[sect][key][0]

    def one(val):
        try:
            sub = {s: dict(d) for s, d in cfg.values.items()}
            sub[sect][key] = typ(str(val))
            if axis == "beta":
                v = float(val)
                sub["run"]["branch"] = "symmetric" if v > 1 else "semi_trivial_first"
            sub["run"]["output_dir"] = str(base_out / f"{axis}_{val}")
            subcfg = ExperimentConfig(sub)
            _validate(subcfg)
            man = SUBCOMMANDS[subcommand](subcfg)
            return val, "ok", man.verdicts
        except Exception as exc:  # individual failures recorded, sweep continues
            return val, f"error: {exc}", {}

    results = []
    with ThreadPoolExecutor(max_workers=workers or min(4, os.cpu_count() or 1)) as ex:
        for res in ex.map(one, values):
            results.append(res)
    table = [{"value": str(v), "status": s, "verdicts": verd}
             for v, s, verd in results]
    path = base_out / "sweep.json"
    write_summary_json(path, {"axis": axis, "subcommand": subcommand,
                              "results": table})
    man = _finish(base_out, cfg, [path],
                  {"sweep": "ok" if all(r[1] == "ok" for r in results) else "partial"},
                  t0c)
    print(json.dumps({"sweep": table}, sort_keys=True))
    return man
