"""Command-line interface: config parsing, presets, sweeps, CSV output.

Usage:
    kitaevwire spectrum     --config run.cfg [--out DIR] [--dump-matrix]
    kitaevwire profiles     --config run.cfg [--out DIR]
    kitaevwire defect-sweep --config run.cfg [--out DIR]
    kitaevwire conductance  --config run.cfg [--out DIR] [--threads K]
    kitaevwire preset fig4  [--out DIR]
    kitaevwire verify       [--samples N] [--seed S]

Config files are INI-style text with sections [wire], [lead.left],
[lead.right] and [task]; see the shipped presets for examples.  Exit codes:
0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import PoleSum, landauer_oracle, steady_limit
from .errors import ConfigError, KitaevWireError, NumericalError
from .leads import SELF_ENERGY_MODES, LeadConfig, dissipation_matrix
from .model import WireConfig, build_bdg
from .output import fmt, write_bdg_tsv, write_csv, write_metadata
from .spectrum import (
    ModeClass,
    classify_modes,
    diagonalize,
    low_energy_couplings,
    majorana_rep,
    pair_modes,
)
from .transport import conductance_sweep, differential_conductance, propagator

__all__ = ["RunConfig", "parse_config", "render_config", "run_preset", "main"]

TASKS = ("spectrum", "profiles", "defect_sweep", "conductance")
PRESETS = ("fig1a", "fig1b", "fig2", "fig3", "fig4", "fig5a", "fig5b", "fig5c", "fig5d")


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved description of one CLI run."""

    wire: WireConfig
    leads: tuple[LeadConfig, ...]
    task: str
    bias_min: float = -1.0
    bias_max: float = 1.0
    points: int = 201
    mu_p_list: tuple[float, ...] = ()
    self_energy: str = "none"
    quad_rel_tol: float = 1e-8
    quad_abs_tol: float = 1e-10
    threads: int = 1
    dump_matrix: bool = False

    def __post_init__(self):
        if self.task not in TASKS:
            raise ConfigError(f"unknown task {self.task!r}; expected one of {TASKS}")
        if self.self_energy not in SELF_ENERGY_MODES:
            raise ConfigError(f"self_energy must be one of {SELF_ENERGY_MODES}")
        n_leads = len(self.leads)
        if self.task == "conductance":
            if n_leads != 2:
                raise ConfigError(f"task conductance requires 2 leads, got {n_leads}")
            if self.points < 2:
                raise ConfigError("task conductance requires points >= 2")
            if not self.bias_min < self.bias_max:
                raise ConfigError("task conductance requires bias_min < bias_max")
        else:
            if n_leads != 0:
                raise ConfigError(f"task {self.task} requires 0 leads, got {n_leads}")
        if self.task == "defect_sweep":
            if len(self.wire.defects) != 1:
                raise ConfigError("task defect_sweep requires exactly one defect site")
            if not self.mu_p_list:
                raise ConfigError("task defect_sweep requires a non-empty mu_p_list")
        for lead in self.leads:
            lead.check_site(self.wire.n_sites)


_WIRE_KEYS = {
    "n_sites": int,
    "hopping": float,
    "pairing": complex,
    "chem_potential": float,
    "boundary": str,
    "defects": str,
}
_LEAD_KEYS = {
    "site": int,
    "coupling": float,
    "lambda": float,
    "omega_c": float,
    "chem_potential": float,
    "temperature": float,
}
_TASK_KEYS = {
    "type": str,
    "bias_min": float,
    "bias_max": float,
    "points": int,
    "mu_p_list": str,
    "self_energy": str,
    "quad_rel_tol": float,
    "quad_abs_tol": float,
    "threads": int,
}
_SECTIONS = {
    "wire": _WIRE_KEYS,
    "lead.left": _LEAD_KEYS,
    "lead.right": _LEAD_KEYS,
    "task": _TASK_KEYS,
}


def _parse_defects(raw: str, errors: list[str], lineno: int):
    defects = []
    for item in raw.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            site_s, mu_s = item.split(":")
            defects.append((int(site_s), float(mu_s)))
        except ValueError:
            errors.append(f"line {lineno}: bad defect entry {item!r}, expected site:mu_p")
    return tuple(defects)


def parse_config(text: str) -> RunConfig:
    """Parse INI-style configuration text into a validated RunConfig.

    Reports every unknown section/key, malformed value and failed
    validation with its line number.
    """
    section = None
    values: dict[str, dict] = {name: {} for name in _SECTIONS}
    linenos: dict[str, dict] = {name: {} for name in _SECTIONS}
    errors: list[str] = []

    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if section not in _SECTIONS:
                errors.append(f"line {lineno}: unknown section [{section}]")
                section = None
            continue
        if "=" not in line:
            errors.append(f"line {lineno}: expected 'key = value', got {line!r}")
            continue
        if section is None:
            errors.append(f"line {lineno}: key outside of any known section")
            continue
        key, _, raw_value = line.partition("=")
        key = key.strip().lower()
        raw_value = raw_value.strip()
        keys = _SECTIONS[section]
        if key not in keys:
            errors.append(f"line {lineno}: unknown key {key!r} in section [{section}]")
            continue
        caster = keys[key]
        try:
            value = caster(raw_value) if caster is not str else raw_value
        except ValueError:
            errors.append(
                f"line {lineno}: cannot parse {raw_value!r} as {caster.__name__} for {key!r}"
            )
            continue
        values[section][key] = value
        linenos[section][key] = lineno

    if errors:
        raise ConfigError("\n".join(errors))

    wire_vals = values["wire"]
    for req in ("n_sites", "hopping", "pairing", "chem_potential"):
        if req not in wire_vals:
            errors.append(f"missing required key {req!r} in section [wire]")
    if errors:
        raise ConfigError("\n".join(errors))

    defects = ()
    if "defects" in wire_vals:
        defects = _parse_defects(
            wire_vals["defects"], errors, linenos["wire"].get("defects", 0)
        )
        if errors:
            raise ConfigError("\n".join(errors))

    try:
        wire = WireConfig(
            n_sites=wire_vals["n_sites"],
            hopping=wire_vals["hopping"],
            pairing=wire_vals["pairing"],
            chem_potential=wire_vals["chem_potential"],
            boundary=wire_vals.get("boundary", "open"),
            defects=defects,
        )
    except (ConfigError, ValueError) as exc:
        raise ConfigError(f"section [wire]: {exc}") from exc

    leads = []
    for name in ("lead.left", "lead.right"):
        vals = values[name]
        if not vals:
            continue
        if "site" not in vals:
            raise ConfigError(f"missing required key 'site' in section [{name}]")
        coupling = vals.get("coupling", vals.get("lambda"))
        if coupling is None:
            raise ConfigError(f"missing required key 'coupling' in section [{name}]")
        if "omega_c" not in vals:
            raise ConfigError(f"missing required key 'omega_c' in section [{name}]")
        try:
            leads.append(
                LeadConfig(
                    contact_site=vals["site"],
                    coupling=coupling,
                    omega_c=vals["omega_c"],
                    chem_potential=vals.get("chem_potential", 0.0),
                    temperature=vals.get("temperature", 0.0),
                )
            )
        except ConfigError as exc:
            raise ConfigError(f"section [{name}]: {exc}") from exc

    task_vals = values["task"]
    if "type" not in task_vals:
        raise ConfigError("missing required key 'type' in section [task]")
    task = task_vals["type"].strip().lower().replace("-", "_")

    mu_p_list = ()
    if "mu_p_list" in task_vals:
        try:
            mu_p_list = tuple(
                float(x) for x in task_vals["mu_p_list"].split(",") if x.strip()
            )
        except ValueError as exc:
            raise ConfigError(f"bad mu_p_list: {exc}") from exc

    kwargs = dict(
        wire=wire,
        leads=tuple(leads),
        task=task,
        mu_p_list=mu_p_list,
        self_energy=task_vals.get("self_energy", "none"),
        quad_rel_tol=task_vals.get("quad_rel_tol", 1e-8),
        quad_abs_tol=task_vals.get("quad_abs_tol", 1e-10),
        threads=task_vals.get("threads", 1),
    )
    for key in ("bias_min", "bias_max", "points"):
        if key in task_vals:
            kwargs[key] = task_vals[key]
    return RunConfig(**kwargs)


def render_config(rc: RunConfig) -> str:
    """Render a RunConfig back to config text; parsing it reproduces rc."""
    lines = ["[wire]"]
    lines.append(f"n_sites = {rc.wire.n_sites}")
    lines.append(f"hopping = {fmt(rc.wire.hopping)}")
    pairing = rc.wire.pairing
    lines.append(f"pairing = {pairing.real:.17g}{pairing.imag:+.17g}j")
    lines.append(f"chem_potential = {fmt(rc.wire.chem_potential)}")
    lines.append(f"boundary = {rc.wire.boundary.value}")
    if rc.wire.defects:
        lines.append(
            "defects = " + ", ".join(f"{s}:{fmt(m)}" for s, m in rc.wire.defects)
        )
    for name, lead in zip(("lead.left", "lead.right"), rc.leads):
        lines.append(f"\n[{name}]")
        lines.append(f"site = {lead.contact_site}")
        lines.append(f"coupling = {fmt(lead.coupling)}")
        lines.append(f"omega_c = {fmt(lead.omega_c)}")
        lines.append(f"chem_potential = {fmt(lead.chem_potential)}")
        lines.append(f"temperature = {fmt(lead.temperature)}")
    lines.append("\n[task]")
    lines.append(f"type = {rc.task}")
    if rc.task == "conductance":
        lines.append(f"bias_min = {fmt(rc.bias_min)}")
        lines.append(f"bias_max = {fmt(rc.bias_max)}")
        lines.append(f"points = {rc.points}")
    if rc.mu_p_list:
        lines.append("mu_p_list = " + ", ".join(fmt(m) for m in rc.mu_p_list))
    lines.append(f"self_energy = {rc.self_energy}")
    lines.append(f"quad_rel_tol = {fmt(rc.quad_rel_tol)}")
    lines.append(f"quad_abs_tol = {fmt(rc.quad_abs_tol)}")
    lines.append(f"threads = {rc.threads}")
    return "\n".join(lines) + "\n"


def _meta(rc: RunConfig, extra: dict | None = None) -> dict:
    meta = {
        "generator": "kitaevwire",
        "version": __version__,
        "task": rc.task,
        "self_energy": rc.self_energy,
        "quad_rel_tol": rc.quad_rel_tol,
        "quad_abs_tol": rc.quad_abs_tol,
        "wire": {
            "n_sites": rc.wire.n_sites,
            "hopping": rc.wire.hopping,
            "pairing": str(rc.wire.pairing),
            "chem_potential": rc.wire.chem_potential,
            "boundary": rc.wire.boundary.value,
            "defects": list(rc.wire.defects),
        },
        "leads": [
            {
                "contact_site": lead.contact_site,
                "coupling": lead.coupling,
                "omega_c": lead.omega_c,
                "chem_potential": lead.chem_potential,
                "temperature": lead.temperature,
            }
            for lead in rc.leads
        ],
        "config_echo": render_config(rc),
    }
    if extra:
        meta.update(extra)
    return meta


def _csv_stamp(rc: RunConfig) -> dict:
    return {
        "generator": f"kitaevwire {__version__}",
        "self_energy": rc.self_energy,
        "config": render_config(rc).replace("\n", "; "),
    }


def _classified_pairs(rc: RunConfig):
    bdg = build_bdg(rc.wire)
    modes = diagonalize(bdg)
    pairs = classify_modes(pair_modes(modes), rc.wire)
    return bdg, modes, pairs


def _spectrum_rows(pairs) -> tuple[list[float], list[str]]:
    """All 2N (energy, class) rows in ascending energy, from labeled pairs."""
    rows = []
    for pair in pairs:
        rows.append((pair.negative.energy, pair.negative.label.value))
        rows.append((pair.positive.energy, pair.positive.label.value))
    rows.sort(key=lambda t: t[0])
    return [e for e, _ in rows], [lab for _, lab in rows]


def run_spectrum(rc: RunConfig, out_dir: Path) -> list[Path]:
    bdg, _, pairs = _classified_pairs(rc)
    energies, labels = _spectrum_rows(pairs)
    out = []
    path = out_dir / "spectrum.csv"
    write_csv(
        path,
        ["index", "energy", "class"],
        [list(range(len(energies))), energies, labels],
        meta=_csv_stamp(rc),
        formats=[str, fmt, str],
    )
    out.append(path)
    if rc.dump_matrix:
        tsv = out_dir / "bdg_matrix.tsv"
        write_bdg_tsv(tsv, bdg, meta=_csv_stamp(rc))
        out.append(tsv)
    write_metadata(out_dir / "metadata.json", _meta(rc, {"outputs": [p.name for p in out]}))
    return out


def run_profiles(rc: RunConfig, out_dir: Path) -> list[Path]:
    _, modes, pairs = _classified_pairs(rc)
    selected = [(k, p) for k, p in enumerate(pairs) if p.positive.label is ModeClass.IN_GAP]
    if not selected:
        # no in-gap pair: fall back to the lowest-energy pair
        selected = [(0, pairs[0])]
    out = []
    sites = list(range(1, rc.wire.n_sites + 1))
    for k, pair in selected:
        mode = pair.positive
        path = out_dir / f"profile_pair{k}.csv"
        write_csv(
            path,
            ["site", "re_e", "im_e", "re_h", "im_h", "abs2_e", "abs2_h"],
            [
                sites,
                mode.electron_amp.real,
                mode.electron_amp.imag,
                mode.hole_amp.real,
                mode.hole_amp.imag,
                np.abs(mode.electron_amp) ** 2,
                np.abs(mode.hole_amp) ** 2,
            ],
            meta=_csv_stamp(rc),
            formats=[str] + [fmt] * 6,
        )
        out.append(path)
        mj = majorana_rep(mode)
        path = out_dir / f"majorana_pair{k}.csv"
        write_csv(
            path,
            ["site", "abs2_g", "abs2_h"],
            [sites, np.abs(mj.plus_amp) ** 2, np.abs(mj.minus_amp) ** 2],
            meta=_csv_stamp(rc),
            formats=[str, fmt, fmt],
        )
        out.append(path)
    write_metadata(
        out_dir / "metadata.json",
        _meta(
            rc,
            {
                "outputs": [p.name for p in out],
                "pairs": [
                    {"pair": k, "energy": pair.positive.energy} for k, pair in selected
                ],
            },
        ),
    )
    return out


def run_defect_sweep(rc: RunConfig, out_dir: Path) -> list[Path]:
    site = rc.wire.defects[0][0]
    energies = []
    for mu_p in rc.mu_p_list:
        wire = replace(rc.wire, defects=((site, mu_p),))
        pairs = classify_modes(pair_modes(diagonalize(build_bdg(wire))), wire)
        couplings = low_energy_couplings(pairs)
        if not couplings:
            raise NumericalError(
                f"no in-gap mode found for defect potential mu_p={mu_p}"
            )
        energies.append(min(energy for _, energy in couplings))
    path = out_dir / "defect_sweep.csv"
    write_csv(
        path,
        ["mu_p", "energy"],
        [list(rc.mu_p_list), energies],
        meta=_csv_stamp(rc),
    )
    write_metadata(out_dir / "metadata.json", _meta(rc, {"outputs": [path.name]}))
    return [path]


def run_conductance(rc: RunConfig, out_dir: Path) -> list[Path]:
    curve = conductance_sweep(
        rc.wire,
        list(rc.leads),
        rc.bias_min,
        rc.bias_max,
        rc.points,
        self_energy=rc.self_energy,
        threads=rc.threads,
    )
    out = []
    path = out_dir / "conductance.csv"
    write_csv(
        path,
        ["bias", "didv_total", "didv_direct", "didv_crossed", "didv_local_andreev"],
        [curve.bias, curve.total, curve.direct, curve.crossed_andreev, curve.local_andreev],
        meta=_csv_stamp(rc),
    )
    out.append(path)
    path = out_dir / "peaks.csv"
    write_csv(
        path,
        ["location", "height", "fwhm"],
        [
            [p.location for p in curve.peaks],
            [p.height for p in curve.peaks],
            [p.fwhm for p in curve.peaks],
        ],
        meta=_csv_stamp(rc),
    )
    out.append(path)

    modes = diagonalize(build_bdg(rc.wire))
    path = out_dir / "spectrum.csv"
    write_csv(
        path,
        ["index", "energy"],
        [list(range(len(modes))), [m.energy for m in modes]],
        meta=_csv_stamp(rc),
        formats=[str, fmt],
    )
    out.append(path)
    write_metadata(
        out_dir / "metadata.json",
        _meta(
            rc,
            {
                "outputs": [p.name for p in out],
                "skipped_bias_points": [
                    {"bias": b, "reason": msg} for b, msg in curve.skipped
                ],
                "n_peaks": len(curve.peaks),
            },
        ),
    )
    return out


_RUNNERS = {
    "spectrum": run_spectrum,
    "profiles": run_profiles,
    "defect_sweep": run_defect_sweep,
    "conductance": run_conductance,
}


def run_task(rc: RunConfig, out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return _RUNNERS[rc.task](rc, out)


def load_preset(name: str) -> RunConfig:
    """Load one of the shipped scenario presets by name."""
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}")
    text = (resources.files("kitaevwire") / "presets" / f"{name}.cfg").read_text()
    return parse_config(text)


def run_preset(name: str, out_dir: str | Path | None = None, **overrides) -> list[Path]:
    """Run a shipped preset, writing its artifacts to ``out_dir``."""
    rc = load_preset(name)
    if overrides:
        rc = replace(rc, **overrides)
    return run_task(rc, Path(out_dir) if out_dir is not None else Path("runs") / name)


def run_verify(samples: int, seed: int) -> int:
    """Built-in cross-check suite; returns a process exit code."""
    rng = np.random.default_rng(seed)
    failures = 0

    value = steady_limit(PoleSum(((1j, 0.0), (1j, 1.0 - 0.5j))))
    ok = abs(value - 1.0) == 0.0
    failures += not ok
    print(f"steady-limit worked example = {value}: {'ok' if ok else 'FAIL'}")

    worst = 0.0
    for _ in range(samples):
        n = int(rng.integers(2, 12))
        wire = WireConfig(n, float(rng.uniform(-2, 2)), 0.0, float(rng.uniform(-2, 2)))
        leads = [
            LeadConfig(int(rng.integers(1, n + 1)), float(rng.uniform(0.05, 1.5)),
                       float(rng.uniform(1.0, 30.0))),
            LeadConfig(int(rng.integers(1, n + 1)), float(rng.uniform(0.05, 1.5)),
                       float(rng.uniform(1.0, 30.0))),
        ]
        bias = float(rng.uniform(-3, 3))
        ref = landauer_oracle(wire, leads, bias)
        got = differential_conductance(wire, leads, bias).total
        worst = max(worst, abs(ref - got) / max(abs(ref), 1e-300))
    ok = worst <= 1e-10
    failures += not ok
    print(f"electron-block oracle vs conductance, {samples} samples: "
          f"worst rel {worst:.2e}: {'ok' if ok else 'FAIL'}")

    worst = 0.0
    for _ in range(samples):
        n = int(rng.integers(2, 10))
        wire = WireConfig(
            n,
            float(rng.uniform(-2, 2)),
            complex(rng.uniform(-2, 2), rng.uniform(-2, 2)),
            float(rng.uniform(-2, 2)),
        )
        leads = [
            LeadConfig(int(rng.integers(1, n + 1)), float(rng.uniform(0.05, 1.5)),
                       float(rng.uniform(1.0, 30.0))),
        ]
        omega = float(rng.uniform(-5, 5))
        g = propagator(build_bdg(wire), leads, omega).matrix
        gam = dissipation_matrix(omega, leads, n)
        scale = float(np.linalg.norm(g, 2) ** 2)
        res = np.linalg.norm(g + g.conj().T - g @ gam @ g.conj().T, 2) / scale
        worst = max(worst, res)
    ok = worst <= 1e-8
    failures += not ok
    print(f"dissipation identity, {samples} samples: worst residual {worst:.2e}: "
          f"{'ok' if ok else 'FAIL'}")

    return 0 if failures == 0 else 3


def _add_common(parser: argparse.ArgumentParser, with_config: bool = True) -> None:
    if with_config:
        parser.add_argument("--config", required=True, help="path to a run config file")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--self-energy", choices=SELF_ENERGY_MODES, default=None,
                        help="override the damping convention")
    parser.add_argument("--quad-tol", type=float, default=None,
                        help="override the relative quadrature tolerance")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads for bias sweeps")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kitaevwire",
        description="Zero modes and two-lead transport of a 1-D superconducting chain.",
    )
    parser.add_argument("--version", action="version", version=f"kitaevwire {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for task in ("spectrum", "profiles", "defect-sweep", "conductance"):
        p = sub.add_parser(task, help=f"run the {task} task from a config file")
        _add_common(p)
        if task == "spectrum":
            p.add_argument("--dump-matrix", action="store_true",
                           help="also dump the dense matrix as TSV")

    p = sub.add_parser("preset", help="run a shipped scenario preset")
    p.add_argument("name", choices=PRESETS)
    _add_common(p, with_config=False)

    p = sub.add_parser("verify", help="run the built-in cross-check suite")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _apply_overrides(rc: RunConfig, args: argparse.Namespace) -> RunConfig:
    updates = {}
    if getattr(args, "self_energy", None) is not None:
        updates["self_energy"] = args.self_energy
    if getattr(args, "quad_tol", None) is not None:
        updates["quad_rel_tol"] = args.quad_tol
    if getattr(args, "threads", None) is not None:
        updates["threads"] = args.threads
    if getattr(args, "dump_matrix", False):
        updates["dump_matrix"] = True
    return replace(rc, **updates) if updates else rc


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return run_verify(args.samples, args.seed)
        if args.command == "preset":
            rc = _apply_overrides(load_preset(args.name), args)
            out_dir = Path(args.out) if args.out else Path("runs") / args.name
            written = run_task(rc, out_dir)
        else:
            task = args.command.replace("-", "_")
            text = Path(args.config).read_text()
            rc = parse_config(text)
            if rc.task != task:
                rc = replace(rc, task=task)
            rc = _apply_overrides(rc, args)
            out_dir = Path(args.out) if args.out else Path("runs") / task
            written = run_task(rc, out_dir)
        for path in written:
            print(path)
        return 0
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    except KitaevWireError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
