"""Temporal self-convergence of both schemes on a 1D model problem.

Errors are measured against a run with twice as many steps, so the
observed rate approaches alpha(0) for the alpha0-order scheme and 2 for
the second-order scheme.
"""

from varfdw.harness import TIME, StudySpec, run_study
from varfdw.problems import example3
from varfdw.schemes import ALPHA0, SECOND_ORDER

problem = example3(1.4, "a")
for scheme in (ALPHA0, SECOND_ORDER):
    spec = StudySpec(problem, scheme, TIME, fixed=64, levels=(256, 512, 1024, 2048), label="demo")
    report = run_study(spec)
    print(f"\n{scheme} (alpha0={problem.exponent.alpha0:g}), {report.runtime:.1f}s")
    print(report.to_markdown())
