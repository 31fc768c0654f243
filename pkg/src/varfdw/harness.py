"""Self-convergence studies, table presets and the transition experiment.

Errors compare final-time nodal values of two runs with the lumped norm
(h^d Σ |·|^2)^(1/2): N against 2N steps at fixed J (time) or J against 2J
subdivisions at fixed N (space, coarse node j against fine node 2j).
Rates are log2 ratios of consecutive errors.
"""

import csv
import io
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .fem import assemble, l2_norm
from .problems import EXAMPLES, transition_problems
from .schemes import ALPHA0, SCHEMES, SECOND_ORDER, run

__all__ = [
    "TIME",
    "SPACE",
    "StudySpec",
    "ConvergenceReport",
    "self_error_time",
    "self_error_space",
    "run_study",
    "TablePreset",
    "PRESETS",
    "table_studies",
    "TransitionResult",
    "run_transition_demo",
]

TIME = "time"
SPACE = "space"


def _final(problem, scheme, J, N):
    return run(problem, problem.mesh(J), N, scheme).final


def self_error_time(problem, scheme, J, N, N_fine=None):
    """E(τ, h): final states with N and 2N steps on the same mesh."""
    N_fine = 2 * N if N_fine is None else N_fine
    space = assemble(problem.mesh(J))
    if N_fine == N:
        return 0.0
    return l2_norm(space, _final(problem, scheme, J, N) - _final(problem, scheme, J, N_fine))


def self_error_space(problem, scheme, J, N, J_fine=None):
    """G(τ, h): final states on J and 2J subdivisions with N steps."""
    J_fine = 2 * J if J_fine is None else J_fine
    if J_fine == J:
        return 0.0
    if J_fine != 2 * J:
        raise ValueError("the fine mesh must have 2J subdivisions")
    space = assemble(problem.mesh(J))
    coarse = _final(problem, scheme, J, N)
    fine = _final(problem, scheme, J_fine, N)
    return l2_norm(space, coarse - space.restrict_fine(fine))


@dataclass(frozen=True)
class StudySpec:
    """One convergence study: a problem, a scheme and a doubling sequence."""

    problem: object
    scheme: str
    axis: str
    fixed: int
    levels: tuple
    label: str = ""

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.axis not in (TIME, SPACE):
            raise ValueError(f"axis must be {TIME!r} or {SPACE!r}")
        lv = tuple(int(v) for v in self.levels)
        if not lv or any(b != 2 * a for a, b in zip(lv, lv[1:])):
            raise ValueError(f"levels must double at each step, got {lv}")
        object.__setattr__(self, "levels", lv)


@dataclass
class ConvergenceReport:
    """Errors and rates of one study."""

    label: str
    scheme: str
    axis: str
    alpha0: float
    fixed: int
    levels: tuple
    errors: list
    runtime: float = 0.0
    norms: list = field(default_factory=list)

    @property
    def rates(self):
        """log2(e_{k-1}/e_k); None for the first level or a zero error."""
        out = [None]
        for a, b in zip(self.errors, self.errors[1:]):
            out.append(float(np.log2(a / b)) if a > 0 and b > 0 else None)
        return out

    @property
    def level_name(self):
        return "N" if self.axis == TIME else "J"

    @property
    def error_name(self):
        return "E" if self.axis == TIME else "G"

    def rows(self):
        return list(zip(self.levels, self.errors, self.rates))

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["level_param", "error", "rate"])
        for lv, err, rate in self.rows():
            w.writerow([lv, f"{err:.6e}", "" if rate is None else f"{rate:.4f}"])
        return buf.getvalue()

    def to_markdown(self):
        fixed = "J" if self.axis == TIME else "N"
        head = (f"**{self.label}** ({self.scheme}, alpha0={self.alpha0:g}, "
                f"{fixed}={self.fixed})\n\n")
        lines = [f"| {self.level_name} | {self.error_name} | rate |", "|---:|---:|---:|"]
        for lv, err, rate in self.rows():
            lines.append(f"| {lv} | {err:.4e} | {'*' if rate is None else f'{rate:.2f}'} |")
        return head + "\n".join(lines) + "\n"

    def to_dict(self):
        return {
            "label": self.label, "scheme": self.scheme, "axis": self.axis,
            "alpha0": self.alpha0, "fixed": self.fixed, "levels": list(self.levels),
            "errors": list(self.errors), "rates": self.rates,
        }


def run_study(spec, threads=1):
    """Errors and rates across the refinement levels of ``spec``.

    Each level's finer run is the next level's coarser run, so len(levels)+1
    runs are made. With ``threads > 1`` the runs execute concurrently.
    """
    pb = spec.problem
    start = time.perf_counter()
    params = list(spec.levels) + [2 * spec.levels[-1]]
    if spec.axis == TIME:
        jobs = [(spec.fixed, n) for n in params]
    else:
        jobs = [(j, spec.fixed) for j in params]

    def one(job):
        J, N = job
        try:
            return run(pb, pb.mesh(J), N, spec.scheme).final
        except Exception as exc:
            raise RuntimeError(f"{spec.label or pb.name}: level J={J}, N={N} failed: {exc}") from exc

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            finals = list(pool.map(one, jobs))
    else:
        finals = [one(job) for job in jobs]

    errors, norms = [], []
    for k, (J, _) in enumerate(jobs[:-1]):
        space = assemble(pb.mesh(J))
        fine = finals[k + 1] if spec.axis == TIME else space.restrict_fine(finals[k + 1])
        errors.append(l2_norm(space, finals[k] - fine))
        norms.append(l2_norm(space, finals[k]))
    return ConvergenceReport(label=spec.label, scheme=spec.scheme, axis=spec.axis,
                             alpha0=pb.exponent.alpha0, fixed=spec.fixed, levels=spec.levels,
                             errors=errors, runtime=time.perf_counter() - start, norms=norms)


# -- presets -------------------------------------------------------------------

@dataclass(frozen=True)
class TablePreset:
    """A reproducible table: blocks of (example, alpha0, scheme, axis, fixed, levels)."""

    name: str
    title: str
    blocks: tuple


def _doubling(first, count):
    return tuple(first * 2 ** k for k in range(count))


def _two_scheme_blocks(example, alpha_first):
    out = []
    for a0, first, count in alpha_first:
        for scheme in (ALPHA0, SECOND_ORDER):
            out.append((example, a0, scheme, TIME, 32, _doubling(first, count)))
    return tuple(out)


def _two_axis_blocks(scheme, alpha_first):
    out = []
    for a0, first in alpha_first:
        out.append(("example4", a0, scheme, TIME, 32, _doubling(first, 4)))
        out.append(("example4", a0, scheme, SPACE, 32, _doubling(16, 4)))
    return tuple(out)


PRESETS = {
    "table1": TablePreset("table1", "Example 1, alpha0-order scheme, errors in time (J=16)", tuple(
        ("example1", a0, ALPHA0, TIME, 16, _doubling(first, 5))
        for a0, first in ((1.2, 1024), (1.5, 512), (1.9, 256)))),
    "table2": TablePreset("table2", "Example 1, alpha0-order scheme, errors in space (N=32)", tuple(
        ("example1", a0, ALPHA0, SPACE, 32, _doubling(32, 5)) for a0 in (1.2, 1.5, 1.9))),
    "table3": TablePreset("table3", "Example 2, second-order scheme, errors in time (J=32)", tuple(
        ("example2", a0, SECOND_ORDER, TIME, 32, _doubling(first, 5))
        for a0, first in ((1.2, 64), (1.4, 128), (1.7, 256)))),
    "table4": TablePreset("table4", "Example 2, second-order scheme, errors in space (N=32)", tuple(
        ("example2", a0, SECOND_ORDER, SPACE, 32, _doubling(64, 5)) for a0 in (1.2, 1.4, 1.7))),
    "table5": TablePreset("table5", "Example 3(a), both schemes, errors in time (J=32)",
                          _two_scheme_blocks("example3a", ((1.4, 512, 4), (1.85, 128, 4)))),
    "table6": TablePreset("table6", "Example 3(b), both schemes, errors in time (J=32)",
                          _two_scheme_blocks("example3b", ((1.4, 512, 4), (1.85, 128, 4)))),
    "table7": TablePreset("table7", "Example 4 (2D), alpha0-order scheme",
                          _two_axis_blocks(ALPHA0, ((1.2, 256), (1.9, 64)))),
    "table8": TablePreset("table8", "Example 4 (2D), second-order scheme",
                          _two_axis_blocks(SECOND_ORDER, ((1.4, 256), (1.85, 64)))),
}

# published errors for side-by-side comparison: (table, alpha0) -> {level: error}
REFERENCE_ERRORS = {
    ("table1", 1.2): {1024: 8.7528e-6, 2048: 4.0753e-6, 4096: 1.8287e-6, 8192: 8.3180e-7, 16384: 3.5793e-7},
    ("table1", 1.5): {512: 3.1318e-5, 1024: 1.0789e-5, 2048: 3.7405e-6, 4096: 1.3035e-6, 8192: 4.5598e-7},
    ("table1", 1.9): {256: 7.3897e-5, 512: 1.8645e-5, 1024: 4.7059e-6, 2048: 1.1923e-6, 4096: 3.0514e-7},
    ("table3", 1.2): {64: 4.2949e-7, 128: 1.1333e-7, 256: 3.0359e-8, 512: 8.3286e-9, 1024: 2.1710e-9},
    ("table3", 1.4): {128: 5.0904e-8, 256: 1.3150e-8, 512: 3.3684e-9, 1024: 8.5272e-10, 2048: 2.1176e-10},
    ("table3", 1.7): {256: 3.1184e-7, 512: 7.8173e-8, 1024: 1.9567e-8, 2048: 4.8731e-9, 4096: 1.2098e-9},
}


def table_studies(name, alpha0=None, scheme=None, fixed=None, levels=None):
    """StudySpecs of a preset, optionally filtered by alpha0/scheme and overridden."""
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; known: {', '.join(PRESETS)}")
    out = []
    for example, a0, sch, axis, fx, lv in PRESETS[name].blocks:
        if alpha0 is not None and not np.isclose(a0, alpha0):
            continue
        if scheme is not None and sch != scheme:
            continue
        out.append(StudySpec(problem=EXAMPLES[example](a0), scheme=sch, axis=axis,
                             fixed=fx if fixed is None else fixed,
                             levels=lv if levels is None else tuple(levels),
                             label=f"{name} {example} alpha0={a0:g} {sch} {axis}"))
    if not out:
        raise ValueError(f"preset {name!r} has no block with alpha0={alpha0}, scheme={scheme}")
    return out


# -- transition experiment ----------------------------------------------------

@dataclass
class TransitionResult:
    """Traces u(x_probe, t_n) of the three transition runs."""

    t: np.ndarray
    traces: dict
    x_probe: float
    runtime: float = 0.0

    def window_distance(self, key, ref, t0, t1):
        """Discrete L2(t0, t1) distance of two traces, relative to ``key``'s norm."""
        m = (self.t >= t0) & (self.t <= t1)
        a, b = self.traces[key][m], self.traces[ref][m]
        scale = np.linalg.norm(a)
        return float(np.linalg.norm(a - b) / scale) if scale > 0 else float(np.linalg.norm(a - b))

    def metrics(self, early=(0.0, 1.0), late=(10.0, 15.0)):
        return {
            "early_to_19": self.window_distance("u_var", "u_19", *early),
            "early_to_14": self.window_distance("u_var", "u_14", *early),
            "late_to_19": self.window_distance("u_var", "u_19", *late),
            "late_to_14": self.window_distance("u_var", "u_14", *late),
        }

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        keys = ("u_19", "u_14", "u_var")
        w.writerow(("t",) + keys)
        for n, t in enumerate(self.t):
            w.writerow([f"{t:.10g}"] + [f"{self.traces[k][n]:.10e}" for k in keys])
        return buf.getvalue()

    def to_json(self):
        return json.dumps({"x_probe": self.x_probe, "metrics": self.metrics()}, indent=2)


def run_transition_demo(T=15.0, J=128, N=512, x_probe=1.0, scheme=ALPHA0, threads=1):
    """Solve the three transition problems and record u(x_probe, t_n)."""
    start = time.perf_counter()
    problems = transition_problems(T=T)
    any_pb = next(iter(problems.values()))
    mesh = any_pb.mesh(J)
    space = assemble(mesh)
    nodes = space.nodes()
    idx = int(np.argmin(np.abs(nodes - x_probe)))
    if not np.isclose(nodes[idx], x_probe):
        raise ValueError(f"x={x_probe} is not a mesh node for J={J}")

    def one(pb):
        hist = run(pb, mesh, N, scheme, space=space)
        return hist.states[:, idx] + hist.offset[idx]

    keys = list(problems)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            vals = list(pool.map(one, problems.values()))
    else:
        vals = [one(pb) for pb in problems.values()]
    return TransitionResult(t=T / N * np.arange(N + 1), traces=dict(zip(keys, vals)),
                            x_probe=float(nodes[idx]), runtime=time.perf_counter() - start)
