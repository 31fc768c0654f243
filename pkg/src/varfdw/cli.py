"""Command-line entry point.

Subcommands ``convergence``, ``transition``, ``weights-dump`` and
``single-run``. A JSON config file (``--config``) may supply any option;
explicit flags override it.
"""

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .exponent import ConstantExponent
from .fem import assemble
from .harness import PRESETS, SPACE, TIME, StudySpec, run_study, run_transition_demo, table_studies
from .problems import EXAMPLES
from .schemes import ALPHA0, SECOND_ORDER, run
from .weights import build_tables

__all__ = ["RunConfig", "ConfigError", "parse_config", "expand_preset", "main"]

COMMANDS = ("convergence", "transition", "weights-dump", "single-run")
FORMATS = ("csv", "markdown", "json")
_SCHEME_ALIASES = {"alpha0": ALPHA0, "alpha0-order": ALPHA0, "scheme1": ALPHA0, "1": ALPHA0,
                   "second_order": SECOND_ORDER, "second-order": SECOND_ORDER,
                   "scheme2": SECOND_ORDER, "2": SECOND_ORDER}

_SECTIONS = {
    "problem": {"preset", "alpha0", "kappa"},
    "discretization": {"scheme", "J", "N", "N_list", "J_list", "axis", "abar", "n", "tau"},
    "output": {"dir", "formats"},
}
_TOP = {"command", "rel_tol"} | set(_SECTIONS)


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


@dataclass
class RunConfig:
    command: str
    problem: dict = field(default_factory=dict)
    discretization: dict = field(default_factory=dict)
    output: dict = field(default_factory=lambda: {"dir": ".", "formats": ["csv", "markdown"]})
    rel_tol: float = 1e-12


def expand_preset(text):
    """Parse ``"name, key=value, ..."`` into (name, overrides).

    >>> expand_preset("example1, alpha0=1.5")
    ('example1', {'alpha0': 1.5})
    """
    parts = [p.strip() for p in str(text).split(",") if p.strip()]
    if not parts:
        raise ConfigError("problem.preset: empty preset")
    name, extra = parts[0], {}
    for p in parts[1:]:
        if "=" not in p:
            raise ConfigError(f"problem.preset: expected key=value, got {p!r}")
        k, v = (s.strip() for s in p.split("=", 1))
        if k not in _SECTIONS["problem"] - {"preset"}:
            raise ConfigError(f"problem.preset: unknown key {k!r}")
        try:
            extra[k] = float(v)
        except ValueError as exc:
            raise ConfigError(f"problem.preset: {k} must be a number, got {v!r}") from exc
    if name not in EXAMPLES and name not in PRESETS and name != "fig1":
        raise ConfigError(f"problem.preset: unknown preset {name!r}")
    return name, extra


def parse_config(text):
    """Validate a JSON config and fill defaults.

    Raises
    ------
    ConfigError
        On malformed JSON (with line and column) or an unknown/invalid field.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    for key in raw:
        if key not in _TOP:
            raise ConfigError(f"unknown key {key!r}")
    cmd = raw.get("command")
    if cmd not in COMMANDS:
        raise ConfigError(f"command: expected one of {', '.join(COMMANDS)}, got {cmd!r}")
    cfg = RunConfig(command=cmd)
    for sec, allowed in _SECTIONS.items():
        block = raw.get(sec, {})
        if not isinstance(block, dict):
            raise ConfigError(f"{sec}: expected an object")
        for key in block:
            if key not in allowed:
                raise ConfigError(f"unknown key {sec}.{key}")
        getattr(cfg, sec).update(block)
    cfg.rel_tol = float(raw.get("rel_tol", 1e-12))
    _validate(cfg)
    return cfg


def _validate(cfg):
    pb, disc, out = cfg.problem, cfg.discretization, cfg.output
    if "preset" in pb:
        name, extra = expand_preset(pb["preset"])
        pb["preset"] = name
        for k, v in extra.items():
            pb.setdefault(k, v)
    if "alpha0" in pb and not 1.0 < float(pb["alpha0"]) < 2.0:
        raise ConfigError("problem.alpha0: must lie in (1, 2)")
    if "kappa" in pb and not float(pb["kappa"]) > 0:
        raise ConfigError("problem.kappa: must be positive")
    if "scheme" in disc:
        s = str(disc["scheme"]).lower()
        if s not in _SCHEME_ALIASES:
            raise ConfigError(f"discretization.scheme: unknown scheme {disc['scheme']!r}")
        disc["scheme"] = _SCHEME_ALIASES[s]
    for key in ("J", "N", "n"):
        if key in disc and (not isinstance(disc[key], int) or disc[key] < 1):
            raise ConfigError(f"discretization.{key}: must be a positive integer")
    for key in ("N_list", "J_list"):
        if key in disc:
            lv = disc[key]
            if not isinstance(lv, list) or not lv or any(not isinstance(v, int) or v < 1 for v in lv):
                raise ConfigError(f"discretization.{key}: must be a list of positive integers")
            if any(b != 2 * a for a, b in zip(lv, lv[1:])):
                raise ConfigError(f"discretization.{key}: entries must double")
    if "axis" in disc and disc["axis"] not in (TIME, SPACE):
        raise ConfigError(f"discretization.axis: expected {TIME!r} or {SPACE!r}")
    if "abar" in disc and not 0.0 < float(disc["abar"]) < 1.0:
        raise ConfigError("discretization.abar: must lie in (0, 1)")
    fmts = out.get("formats", ["csv", "markdown"])
    if isinstance(fmts, str):
        fmts = [f.strip() for f in fmts.split(",") if f.strip()]
    for f in fmts:
        if f not in FORMATS:
            raise ConfigError(f"output.formats: unknown format {f!r}")
    out["formats"] = list(fmts)
    out.setdefault("dir", ".")
    if not cfg.rel_tol > 0:
        raise ConfigError("rel_tol: must be positive")


# -- argument handling ---------------------------------------------------------

def _build_parser():
    parser = argparse.ArgumentParser(prog="varfdw", description=__doc__.splitlines()[0])
    parser.add_argument("--list-presets", action="store_true", help="list table and figure presets")
    sub = parser.add_subparsers(dest="command")
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--preset", help="table1..table8, fig1 or example1..example4 (example3a/3b)")
        p.add_argument("--alpha0", type=float)
        p.add_argument("--kappa", type=float)
        p.add_argument("--scheme", help="alpha0 | second_order")
        p.add_argument("--J", type=int, dest="J")
        p.add_argument("--N", type=int, dest="N")
        p.add_argument("--N-list", dest="N_list", help="comma-separated doubling sequence of N")
        p.add_argument("--J-list", dest="J_list", help="comma-separated doubling sequence of J")
        p.add_argument("--out-dir", dest="out_dir")
        p.add_argument("--format", dest="formats", help="comma-separated: csv, markdown, json")
        p.add_argument("--threads", type=int, default=1)
        if name == "weights-dump":
            p.add_argument("--abar", type=float)
            p.add_argument("--n", type=int, dest="n")
            p.add_argument("--tau", type=float)
    return parser


def _ints(text, flag):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"{flag}: expected comma-separated integers, got {text!r}") from exc


def _config_from_args(args):
    raw = {"command": args.command}
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
        if raw.get("command", args.command) != args.command:
            raise ConfigError(f"command: config says {raw.get('command')!r}, invocation says {args.command!r}")
        raw["command"] = args.command
    pb = raw.setdefault("problem", {})
    disc = raw.setdefault("discretization", {})
    out = raw.setdefault("output", {})
    for key in ("preset", "alpha0", "kappa"):
        if getattr(args, key) is not None:
            pb[key] = getattr(args, key)
    for key in ("scheme", "J", "N", "abar", "n", "tau"):
        if getattr(args, key, None) is not None:
            disc[key] = getattr(args, key)
    if args.N_list:
        disc["N_list"] = _ints(args.N_list, "--N-list")
    if args.J_list:
        disc["J_list"] = _ints(args.J_list, "--J-list")
    if args.out_dir:
        out["dir"] = args.out_dir
    if args.formats:
        out["formats"] = args.formats
    return parse_config(json.dumps(raw))


class _StageError(RuntimeError):
    def __init__(self, stage, exc):
        super().__init__(f"{stage}: {exc}")
        self.stage = stage


_EXIT = {"config": 2, "weights": 3, "assembly": 4, "solve": 5, "report": 6}


def _stage(name, func, *args, **kwargs):
    try:
        return func(*args, **kwargs)
    except _StageError:
        raise
    except Exception as exc:
        raise _StageError(name, exc) from exc


def _alpha_tag(a0):
    return "a" + f"{a0:g}".replace(".", "")


def _write(out_dir, stem, fmts, csv_text=None, md_text=None, json_obj=None):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if "csv" in fmts and csv_text is not None:
        (out_dir / f"{stem}.csv").write_text(csv_text)
        written.append(out_dir / f"{stem}.csv")
    if "markdown" in fmts and md_text is not None:
        (out_dir / f"{stem}.md").write_text(md_text)
        written.append(out_dir / f"{stem}.md")
    if "json" in fmts and json_obj is not None:
        (out_dir / f"{stem}.json").write_text(json.dumps(json_obj, indent=2) + "\n")
        written.append(out_dir / f"{stem}.json")
    return written


def _problem(cfg, default="example1"):
    name = cfg.problem.get("preset", default)
    if name not in EXAMPLES:
        raise ConfigError(f"problem.preset: {name!r} is not an example problem")
    if "alpha0" not in cfg.problem:
        raise ConfigError("problem.alpha0: required for example problems")
    return EXAMPLES[name](float(cfg.problem["alpha0"]), float(cfg.problem.get("kappa", 1.0)))


def _cmd_convergence(cfg, threads):
    name = cfg.problem.get("preset")
    disc, fmts, out_dir = cfg.discretization, cfg.output["formats"], cfg.output["dir"]
    if name in PRESETS:
        levels = disc.get("N_list") or disc.get("J_list")
        fixed = disc.get("J") or disc.get("N")
        specs = _stage("config", table_studies, name, alpha0=cfg.problem.get("alpha0"),
                       scheme=disc.get("scheme"), fixed=fixed, levels=levels)
        blocks_per_alpha = {}
        for s in specs:
            blocks_per_alpha[s.problem.exponent.alpha0] = blocks_per_alpha.get(s.problem.exponent.alpha0, 0) + 1
        stems = []
        for s in specs:
            stem = f"{name}_{_alpha_tag(s.problem.exponent.alpha0)}"
            if blocks_per_alpha[s.problem.exponent.alpha0] > 1:
                stem += f"_{s.scheme}_{s.axis}"
            stems.append(stem)
    else:
        pb = _stage("config", _problem, cfg)
        axis = disc.get("axis", SPACE if "J_list" in disc else TIME)
        scheme = disc.get("scheme", ALPHA0)
        if axis == TIME:
            fixed, levels = disc.get("J", 16), disc.get("N_list")
        else:
            fixed, levels = disc.get("N", 32), disc.get("J_list")
        if not levels:
            raise _StageError("config", ConfigError("a level list (--N-list or --J-list) is required"))
        specs = [_stage("config", StudySpec, pb, scheme, axis, fixed, tuple(levels),
                        label=f"{pb.name} {scheme} {axis}")]
        stems = [f"{cfg.problem['preset']}_{_alpha_tag(pb.exponent.alpha0)}_{scheme}_{axis}"]
    for spec, stem in zip(specs, stems):
        rep = _stage("solve", run_study, spec, threads=threads)
        for path in _stage("report", _write, out_dir, stem, fmts, rep.to_csv(), rep.to_markdown(), rep.to_dict()):
            print(path)
        print(rep.to_markdown())


def _cmd_transition(cfg, threads):
    disc, fmts = cfg.discretization, cfg.output["formats"]
    res = _stage("solve", run_transition_demo, J=disc.get("J", 128), N=disc.get("N", 512),
                 scheme=disc.get("scheme", ALPHA0), threads=threads)
    md = "| window | to u_19 | to u_14 |\n|---|---:|---:|\n"
    m = res.metrics()
    md += f"| [0, 1] | {m['early_to_19']:.4e} | {m['early_to_14']:.4e} |\n"
    md += f"| [10, 15] | {m['late_to_19']:.4e} | {m['late_to_14']:.4e} |\n"
    paths = _stage("report", _write, cfg.output["dir"], "fig1", fmts, res.to_csv(), md,
                   {"x_probe": res.x_probe, "metrics": m})
    for path in paths:
        print(path)
    print(md)


def _cmd_weights(cfg, threads):
    disc = cfg.discretization
    n = disc.get("n", 16)
    if "abar" in disc:
        abar = float(disc["abar"])
    elif "alpha0" in cfg.problem:
        abar = float(cfg.problem["alpha0"]) - 1.0
    else:
        raise _StageError("config", ConfigError("--abar or --alpha0 is required"))
    if "preset" in cfg.problem and cfg.problem["preset"] in EXAMPLES:
        pb = EXAMPLES[cfg.problem["preset"]](abar + 1.0)
        exponent, T = pb.exponent, pb.T
    else:
        exponent, T = ConstantExponent(abar + 1.0), 1.0
    tau = float(disc.get("tau", T / n))
    tb = _stage("weights", build_tables, exponent, n, tau)
    rows = [["index", "w", "chi", "omega_corr", "pi_off"]]
    for k in range(n):
        rows.append([k, f"{tb.w[k]:.16e}", f"{tb.chi[k]:.16e}", f"{tb.omega_corr[k]:.16e}",
                     "" if k == 0 else f"{tb.pi_off[k]:.16e}"])
    text = "\n".join(",".join(str(c) for c in r) for r in rows) + "\n"
    md = f"pi_diag = {tb.pi_diag:.16e}, tau = {tau:g}, abar = {abar:g}\n\n"
    md += "| k | w | chi | omega_(k+1) | pi_off |\n|---:|---:|---:|---:|---:|\n"
    md += "".join(f"| {' | '.join(str(c) for c in r)} |\n" for r in rows[1:])
    obj = {"tau": tau, "abar": abar, "pi_diag": tb.pi_diag, "w": tb.w.tolist(), "chi": tb.chi.tolist(),
           "omega_corr": tb.omega_corr.tolist(), "pi_off": [None] + tb.pi_off[1:].tolist()}
    stem = f"weights_{_alpha_tag(abar + 1.0)}_n{n}"
    for path in _stage("report", _write, cfg.output["dir"], stem, cfg.output["formats"], text, md, obj):
        print(path)


def _cmd_single(cfg, threads):
    pb = _stage("config", _problem, cfg)
    disc = cfg.discretization
    J, N = disc.get("J", 32), disc.get("N", 64)
    scheme = disc.get("scheme", ALPHA0)
    mesh = _stage("assembly", pb.mesh, J)
    space = _stage("assembly", assemble, mesh)
    hist = _stage("solve", run, pb, mesh, N, scheme, space=space)
    u = hist.final
    if pb.dim == 1:
        cols, header = [space.nodes(), u], ["x", "u"]
    else:
        X, Y = space.nodes()
        cols, header = [X, Y, u], ["x", "y", "u"]
    lines = [",".join(header)] + [",".join(f"{v:.16e}" for v in row) for row in zip(*cols)]
    stem = f"{cfg.problem['preset']}_{_alpha_tag(pb.exponent.alpha0)}_{scheme}_J{J}_N{N}"
    summary = {"problem": pb.name, "scheme": scheme, "J": J, "N": N, "T": pb.T,
               "max_abs": float(np.max(np.abs(u)))}
    md = "| field | value |\n|---|---|\n" + "".join(f"| {k} | {v} |\n" for k, v in summary.items())
    for path in _stage("report", _write, cfg.output["dir"], stem, cfg.output["formats"],
                       "\n".join(lines) + "\n", md, summary):
        print(path)


_HANDLERS = {"convergence": _cmd_convergence, "transition": _cmd_transition,
             "weights-dump": _cmd_weights, "single-run": _cmd_single}


def _list_presets():
    for p in PRESETS.values():
        print(f"{p.name:8s} {p.title}")
    print(f"{'fig1':8s} transition experiment, traces at x=1 (T=15, J=128, N=512)")


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.list_presets:
        _list_presets()
        return 0
    if args.command is None:
        parser.print_usage(sys.stderr)
        print(f"error [config]: a command is required: {', '.join(COMMANDS)}", file=sys.stderr)
        return _EXIT["config"]
    try:
        cfg = _config_from_args(args)
        _HANDLERS[cfg.command](cfg, max(1, args.threads))
    except ConfigError as exc:
        print(f"error [config]: {exc}", file=sys.stderr)
        return _EXIT["config"]
    except _StageError as exc:
        cause = exc.__cause__ if exc.__cause__ is not None else exc
        stage = "config" if isinstance(cause, ConfigError) else exc.stage
        print(f"error [{stage}]: {cause}", file=sys.stderr)
        return _EXIT[stage]
    return 0


if __name__ == "__main__":
    sys.exit(main())
