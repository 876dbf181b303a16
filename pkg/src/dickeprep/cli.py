"""Command-line front end.

Subcommands: verify-ms, simulate, protocol, sweep, heating, adiabaticity.
Values are layered as defaults < ``--config`` file < command-line flags.
Exit codes: 0 success, 1 invalid configuration, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from . import morris_shore, protocol
from .errors import DimensionCap, IntegrationFailure, InvalidArgs
from .hamiltonian import build_hamiltonian
from .propagator import IntegratorConfig, evolve_full
from .pulse import LabParams, PulseParams, adiabaticity_margins, minimum_pulse_time, trap_constraint_check
from .subspace import dicke_state, enumerate_sector, product_state

log = logging.getLogger("dickeprep")

COMMANDS = ("verify-ms", "simulate", "protocol", "sweep", "heating", "adiabaticity")
FORMATS = ("csv", "json")


class ConfigError(InvalidArgs):
    pass


@dataclass
class SectorConfig:
    ions: int = 6
    excitations: int = 2


@dataclass
class PulseConfig:
    omega0_T: float = 10.0
    delta0_T: float = 6.0
    window: float = 10.0
    center: float = 0.0
    stage: int = 2


@dataclass
class IntegratorSection:
    method: str = "adaptive"
    rel_tol: float = 1e-12
    abs_tol: float = 1e-14
    max_step: float = 0.01
    trace_samples: int = 1000


@dataclass
class SweepConfig:
    axis: str = "intensity"
    values: list = field(default_factory=list)
    fluctuation: float = 0.1
    samples: int = 100
    seed: int = 0
    jobs: int = 0


@dataclass
class LabConfig:
    trap_freq: float = 4.0e6
    lamb_dicke: float = 0.1
    bare_rabi: float = 0.0
    heating_rate: float = 5.0
    total_time: float = 400e-6
    epsilon: float = 1e-4


@dataclass
class OutputConfig:
    out: str = ""
    format: str = "csv"


@dataclass
class RunConfig:
    command: str = "protocol"
    sector: SectorConfig = field(default_factory=SectorConfig)
    pulse: PulseConfig = field(default_factory=PulseConfig)
    integrator: IntegratorSection = field(default_factory=IntegratorSection)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    lab: LabConfig = field(default_factory=LabConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    SECTIONS = ("sector", "pulse", "integrator", "sweep", "lab", "output")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        cfg = cls()
        for key, value in data.items():
            if key == "command":
                cfg.command = value
            elif key in cls.SECTIONS and isinstance(value, dict):
                section = getattr(cfg, key)
                known = {f.name for f in fields(section)}
                for name, v in value.items():
                    if name not in known:
                        raise ConfigError(f"unknown config field {key}.{name}")
                    setattr(section, name, v)
            else:
                raise ConfigError(f"unknown config field {key}")
        return cfg

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"command must be one of {COMMANDS}")
        s, p, i, w, lab, o = self.sector, self.pulse, self.integrator, self.sweep, self.lab, self.output
        _check(isinstance(s.ions, int) and s.ions >= 1, "ions must be a positive integer")
        _check(isinstance(s.excitations, int) and s.excitations >= 0, "excitations must be a non-negative integer")
        _check(s.excitations <= s.ions, "excitations must not exceed ions")
        if self.command in ("simulate", "protocol", "sweep", "verify-ms"):
            _check(s.excitations >= 1, "excitations must be at least 1")
        _check(p.omega0_T > 0, "omega0T must be positive")
        _check(p.delta0_T >= 0, "delta0T must be non-negative")
        _check(p.window > 0, "window must be positive")
        _check(p.stage in (1, 2), "stage must be 1 or 2")
        _check(i.method in ("adaptive", "unitary"), "method must be adaptive or unitary")
        _check(i.rel_tol > 0, "rel-tol must be positive")
        _check(i.abs_tol > 0, "abs-tol must be positive")
        _check(i.max_step > 0, "max-step must be positive")
        _check(isinstance(i.trace_samples, int) and i.trace_samples >= 2, "trace-samples must be an integer >= 2")
        _check(w.axis in ("intensity",) + protocol.SWEEP_AXES, "axis must be intensity, omega0_T, delta0_T or window")
        _check(0 <= w.fluctuation < 1, "fluctuation must lie in [0, 1)")
        _check(isinstance(w.samples, int) and w.samples >= 1, "samples must be a positive integer")
        _check(isinstance(w.jobs, int) and w.jobs >= 0, "jobs must be a non-negative integer")
        if self.command == "sweep" and w.axis != "intensity":
            _check(len(w.values) > 0, "values must be nonempty for a parameter sweep")
        _check(lab.trap_freq > 0, "trap-freq must be positive")
        _check(lab.lamb_dicke > 0, "lamb-dicke must be positive")
        _check(lab.bare_rabi >= 0, "bare-rabi must be non-negative")
        _check(lab.heating_rate > 0, "heating-rate must be positive")
        _check(lab.total_time >= 0, "total-time must be non-negative")
        _check(0 < lab.epsilon < 1, "epsilon must lie in (0, 1)")
        _check(o.format in FORMATS, "format must be csv or json")

    def pulse_params(self) -> PulseParams:
        p = self.pulse
        return PulseParams(p.omega0_T, p.delta0_T, window_halfwidth=p.window, center=p.center)

    def integrator_config(self) -> IntegratorConfig:
        i = self.integrator
        return IntegratorConfig(i.method, i.rel_tol, i.abs_tol, i.max_step, i.trace_samples)


def _check(ok: bool, message: str) -> None:
    if not ok:
        raise ConfigError(message)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


# flag -> (section, field, type)
FLAGS = {
    "--ions": ("sector", "ions", int),
    "--excitations": ("sector", "excitations", int),
    "--omega0T": ("pulse", "omega0_T", float),
    "--delta0T": ("pulse", "delta0_T", float),
    "--window": ("pulse", "window", float),
    "--center": ("pulse", "center", float),
    "--stage": ("pulse", "stage", int),
    "--method": ("integrator", "method", str),
    "--rel-tol": ("integrator", "rel_tol", float),
    "--abs-tol": ("integrator", "abs_tol", float),
    "--max-step": ("integrator", "max_step", float),
    "--trace-samples": ("integrator", "trace_samples", int),
    "--axis": ("sweep", "axis", str),
    "--values": ("sweep", "values", float),
    "--fluctuation": ("sweep", "fluctuation", float),
    "--samples": ("sweep", "samples", int),
    "--seed": ("sweep", "seed", int),
    "--jobs": ("sweep", "jobs", int),
    "--trap-freq": ("lab", "trap_freq", float),
    "--lamb-dicke": ("lab", "lamb_dicke", float),
    "--bare-rabi": ("lab", "bare_rabi", float),
    "--heating-rate": ("lab", "heating_rate", float),
    "--total-time": ("lab", "total_time", float),
    "--epsilon": ("lab", "epsilon", float),
    "--out": ("output", "out", str),
    "--format": ("output", "format", str),
}

HELP = {
    "--window": "stage half-width in units of T",
    "--center": "pulse centre for single-stage runs, units of T",
    "--stage": "simulate: 1 = Fock creation on m ions, 2 = Dicke creation on N ions",
    "--values": "parameter values for a non-intensity sweep",
    "--trap-freq": "trap frequency in the same units as the Rabi frequency (s^-1)",
    "--total-time": "protocol duration in seconds for the heating budget",
    "--out": "output file; written atomically",
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    for flag, (_, _, typ) in FLAGS.items():
        kwargs = {"type": typ, "default": None, "help": HELP.get(flag)}
        if flag == "--values":
            kwargs["nargs"] = "+"
        common.add_argument(flag, **kwargs)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--dump-config", action="store_true", help="print the resolved config as JSON and exit")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="dickeprep", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def resolve_config(argv) -> tuple[RunConfig, argparse.Namespace]:
    args = build_parser().parse_args(argv)
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"config: cannot read {args.config}: {exc}") from None
        cfg = RunConfig.from_dict(data)
    else:
        cfg = RunConfig()
    cfg.command = args.command
    for flag, (section, name, _) in FLAGS.items():
        value = getattr(args, flag.lstrip("-").replace("-", "_"))
        if value is not None:
            setattr(getattr(cfg, section), name, value)
    cfg.validate()
    return cfg, args


def _atomic_write(path: str, text: str) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _sibling(path: str, suffix: str) -> str:
    p = Path(path)
    return str(p.with_name(p.stem + suffix))


def _summary(cfg: RunConfig, results: dict, residuals=None) -> dict:
    return {"command": cfg.command, "config": cfg.to_dict(), "results": results, "residuals": residuals}


def _cmd_verify_ms(cfg: RunConfig) -> tuple[dict, dict]:
    report = morris_shore.verify_ms_conditions(cfg.sector.ions, cfg.sector.excitations)
    print(report.to_text())
    residuals = [
        {"mu": c.mu, "commutator_norm": c.commutator_norm, "identity_residual": c.identity_residual}
        for c in report.manifolds
    ]
    if not report.passed:
        raise IntegrationFailure("Morris-Shore conditions failed")
    return {"pass": report.passed, "combinatorics_ok": report.combinatorics_ok, "report": report.to_dict()}, residuals


def _cmd_simulate(cfg: RunConfig, files: dict) -> dict:
    N, m = cfg.sector.ions, cfg.sector.excitations
    pulse, icfg = cfg.pulse_params(), cfg.integrator_config()
    if cfg.pulse.stage == 1:
        basis = enumerate_sector(m, m)
        psi0, target = product_state(basis, (1 << m) - 1, 0), product_state(basis, 0, m)
    else:
        basis = enumerate_sector(N, m)
        psi0, target = product_state(basis, 0, m), dicke_state(basis, m)
    trace = evolve_full(build_hamiltonian(basis), pulse, psi0, target, icfg)
    if cfg.output.out:
        files[cfg.output.out] = trace.to_csv() if cfg.output.format == "csv" else trace.to_json()
    return {"stage": cfg.pulse.stage, "dimension": basis.dim, "final_fidelity": trace.final_fidelity,
            "final_norm": trace.final_state.norm}


def _cmd_protocol(cfg: RunConfig, files: dict) -> dict:
    N, m = cfg.sector.ions, cfg.sector.excitations
    result = protocol.run_protocol(N, m, cfg.pulse_params(), cfg.integrator_config())
    if cfg.output.out:
        out = cfg.output.out
        if cfg.output.format == "csv":
            # stage traces already sit on the shared timeline
            files[out] = result.stage2_trace.to_csv()
            files[_sibling(out, ".stage1.csv")] = result.stage1_trace.to_csv()
        else:
            files[out] = json.dumps(result.to_dict())
    return {"dimension": enumerate_sector(N, m).dim, **result.summary()}


def _cmd_sweep(cfg: RunConfig, files: dict) -> dict:
    N, m, w = cfg.sector.ions, cfg.sector.excitations, cfg.sweep
    jobs = w.jobs or os.cpu_count() or 1
    pulse, icfg = cfg.pulse_params(), cfg.integrator_config()
    if w.axis == "intensity":
        res = protocol.sweep_intensity(N, m, pulse, w.fluctuation, w.samples, w.seed, icfg, jobs=jobs)
    else:
        res = protocol.sweep_parameter(N, m, pulse, w.axis, w.values, icfg, jobs=jobs)
    if cfg.output.out:
        if cfg.output.format == "json":
            files[cfg.output.out] = json.dumps(res.to_dict())
        else:
            lines = ["sample,value,fidelity"]
            for k, (v, f) in enumerate(res.samples):
                value = ";".join(repr(float(x)) for x in v) if isinstance(v, tuple) else repr(float(v))
                lines.append(f"{k},{value},{f!r}")
            files[cfg.output.out] = "\n".join(lines) + "\n"
    return {"axis": res.axis, "seed": res.seed if w.axis == "intensity" else None, "summary": res.summary}


def _lab(cfg: RunConfig) -> LabParams:
    lab = cfg.lab
    return LabParams(lab.lamb_dicke, lab.trap_freq, lab.bare_rabi or None, cfg.sector.ions, lab.heating_rate)


def _cmd_heating(cfg: RunConfig) -> dict:
    est = protocol.heating_estimate(_lab(cfg), cfg.lab.total_time)
    print(f"phonons gained: {est.phonons_gained!r}  infidelity estimate: {est.infidelity_estimate:.3%}")
    return est.to_dict()


def _cmd_adiabaticity(cfg: RunConfig) -> dict:
    N, m = cfg.sector.ions, cfg.sector.excitations
    margins = adiabaticity_margins(cfg.pulse_params(), m, N, cfg.lab.epsilon)
    t_min = minimum_pulse_time(cfg.pulse.omega0_T, cfg.lab.trap_freq)
    out = {
        "coupling_ok": margins.coupling_ok,
        "chirp_ok": margins.chirp_ok,
        "coupling_ratio": margins.coupling_ratio,
        "chirp_ratio": margins.chirp_ratio,
        "minimum_T_seconds": t_min,
    }
    if cfg.lab.bare_rabi > 0:
        check = trap_constraint_check(_lab(cfg))
        out.update(trap_ok=check.ok, trap_margin=check.margin, lamb_dicke_ratio=check.lamb_dicke_ratio)
    print(
        f"(pi Omega0 T)^2/(2 ln 1/eps) = {margins.coupling_bound:.4g} >= pi Delta0 T = {margins.chirp_term:.4g}"
        f" : {margins.coupling_ok} (ratio {margins.coupling_ratio:.4g})"
    )
    print(
        f"pi Delta0 T = {margins.chirp_term:.4g} >= m ln(1/eps) = {margins.excitation_bound:.4g}"
        f" : {margins.chirp_ok} (ratio {margins.chirp_ratio:.4g})"
    )
    print(f"minimum T for Omega <= nu/10: {t_min:.4g} s")
    return out


def run(cfg: RunConfig) -> dict:
    files: dict[str, str] = {}
    residuals = None
    t0 = time.perf_counter()
    if cfg.command == "verify-ms":
        results, residuals = _cmd_verify_ms(cfg)
    elif cfg.command == "simulate":
        results = _cmd_simulate(cfg, files)
    elif cfg.command == "protocol":
        results = _cmd_protocol(cfg, files)
    elif cfg.command == "sweep":
        results = _cmd_sweep(cfg, files)
    elif cfg.command == "heating":
        results = _cmd_heating(cfg)
    else:
        results = _cmd_adiabaticity(cfg)
    log.info("%s finished in %.2f s", cfg.command, time.perf_counter() - t0)

    summary = _summary(cfg, results, residuals)
    out = cfg.output.out
    if out:
        if out in files and cfg.output.format == "json":
            payload = json.loads(files[out])
            summary["trace" if cfg.command != "sweep" else "sweep"] = payload
            files[out] = json.dumps(summary, indent=2)
        elif out in files:
            files[_sibling(out, ".json")] = json.dumps(summary, indent=2)
        else:
            files[out] = json.dumps(summary, indent=2)
    for path, text in files.items():
        _atomic_write(path, text)
    return summary


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg, args = resolve_config(argv)
    except InvalidArgs as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if args.dump_config:
        print(json.dumps(cfg.to_dict(), indent=2))
        return 0
    try:
        summary = run(cfg)
    except (InvalidArgs, DimensionCap) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (IntegrationFailure, ArithmeticError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    if cfg.command in ("simulate", "protocol", "sweep"):
        print(json.dumps(summary["results"], indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
