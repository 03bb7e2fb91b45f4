"""
Command-line front end.

    bayesdopt PROBLEM.json [--a 1] [--epsilon 1e-3] [--max-iter 100000]
              [--start uniform|PATH] [--trace-out PATH] [--report-out PATH]
    bayesdopt --builtin paper-logistic ...

Problem files are JSON objects::

    {"model": "logistic" | "linear" | "explicit",
     "design_points": [[...], ...],                 # n x p
     "prior": {"support": [[...], ...], "probs": [...]},   # not for "linear"
     "atoms": [[[[...]]]]}                          # n x K x m x m, "explicit" only

Exit status is 0 when the run converged, 2 when the iteration limit was hit
and 1 on any error.
"""

import argparse
import csv
import json
import logging
import sys
from dataclasses import asdict, dataclass

import numpy as np

from .design_core import (
    DesignProblem,
    DesignSpace,
    DiscretePrior,
    InformationAtoms,
    as_weights,
    criterion_phi,
    equivalence_gap,
    sensitivities_d,
)
from .errors import DesignError, ParseError, ValidationError
from .mm_solver import SolverConfig, Status, solve
from .models import LogisticSpec, linear_atoms, logistic_atoms, paper_example_problem

EXIT_CONVERGED = 0
EXIT_ERROR = 1
EXIT_ITER_LIMIT = 2

MODELS = ("logistic", "linear", "explicit")
BUILTINS = {"paper-logistic": paper_example_problem}
TRACE_HEADER = ("iter", "phi", "min_d", "max_d", "alpha")


def _array(obj, key, ndim, path=None):
    path = path or key
    if key not in obj:
        raise ValidationError("missing field", path)
    try:
        a = np.array(obj[key], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"not a numeric array ({exc})", path) from None
    if a.ndim != ndim:
        raise ValidationError(f"expected {ndim}-dimensional array, got shape {a.shape}", path)
    return a


def problem_from_dict(obj):
    """Build a :class:`DesignProblem` from a parsed problem file."""
    if not isinstance(obj, dict):
        raise ValidationError("top level must be an object", "$")
    model = obj.get("model")
    if model not in MODELS:
        raise ValidationError(f"must be one of {MODELS}, got {model!r}", "model")
    space = DesignSpace(_array(obj, "design_points", 2))

    if model == "linear":
        if "prior" in obj:
            raise ValidationError("not allowed for the linear model", "prior")
        return DesignProblem(
            space, DiscretePrior.point_mass(np.zeros(space.p)), linear_atoms(space)
        )

    prior_obj = obj.get("prior")
    if not isinstance(prior_obj, dict):
        raise ValidationError("missing or not an object", "prior")
    prior = DiscretePrior(
        _array(prior_obj, "support", 2, "prior.support"),
        _array(prior_obj, "probs", 1, "prior.probs"),
    )
    if model == "logistic":
        if "atoms" in obj:
            raise ValidationError("only allowed for the explicit model", "atoms")
        return DesignProblem(space, prior, logistic_atoms(LogisticSpec(space, prior)))

    atoms = InformationAtoms(_array(obj, "atoms", 4))
    return DesignProblem(space, prior, atoms)


def problem_to_dict(problem, model="explicit"):
    """Inverse of :func:`problem_from_dict`; floats survive the round trip exactly."""
    if model not in MODELS:
        raise ValidationError(f"must be one of {MODELS}", "model")
    out = {"model": model, "design_points": problem.space.points.tolist()}
    if model != "linear":
        out["prior"] = {
            "support": problem.prior.support.tolist(),
            "probs": problem.prior.probs.tolist(),
        }
    if model == "explicit":
        out["atoms"] = problem.atoms.atoms.tolist()
    return out


def read_problem_file(path):
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None
    return problem_from_dict(obj)


def write_problem_file(problem, path, model="explicit"):
    with open(path, "w") as fh:
        json.dump(problem_to_dict(problem, model), fh, indent=1)
        fh.write("\n")


def read_start(spec, n):
    if spec == "uniform":
        return None
    try:
        with open(spec) as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{spec}: {exc}") from None
    if isinstance(obj, dict):
        obj = obj.get("weights")
    return as_weights(obj, n)


def emit_trace(trace, path):
    """Write ``iter,phi,min_d,max_d,alpha`` rows, one per evaluated iterate."""
    if not len(trace):
        raise ValueError("empty trace")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_HEADER)
        for r in trace.records:
            writer.writerow(
                [r.t] + [format(v, ".17g") for v in (r.phi, r.min_d, r.max_d, r.alpha)]
            )


def read_trace(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {key: np.array([float(row[key]) for row in rows]) for key in TRACE_HEADER}


@dataclass
class RunReport:
    labels: list
    weights: list
    iterations: int
    steps: int
    status: str
    phi: float
    gap: float
    config: dict

    def to_json(self):
        return json.dumps(asdict(self), indent=2) + "\n"

    def format(self):
        lines = [
            f"status:      {self.status}",
            f"iterations:  {self.iterations} (multiplicative steps: {self.steps})",
            f"phi:         {self.phi:.10f}",
            f"max d - m:   {self.gap:.3e}",
            "config:      " + ", ".join(f"{k}={v}" for k, v in self.config.items()),
            "",
            f"{'point':<8} {'coordinates':<28} {'weight':>7}",
        ]
        for label, w in zip(self.labels, self.weights):
            name, coords = label
            lines.append(f"{name:<8} {coords:<28} {w:7.3f}")
        lines += ["", "weights (full precision):"]
        lines += [f"{name} {format(w, '.17g')}" for (name, _), w in zip(self.labels, self.weights)]
        return "\n".join(lines) + "\n"


def _labels(space):
    return [
        (f"x{i + 1}", "(" + ", ".join(f"{c:g}" for c in row) + ")")
        for i, row in enumerate(space.points)
    ]


def run(problem, config, w0=None):
    """Solve and summarize.  The gap is recomputed from scratch at the final design."""
    w, trace = solve(problem, w0, config)
    report = RunReport(
        labels=_labels(problem.space),
        weights=w.tolist(),
        iterations=trace.iterations,
        steps=trace.steps,
        status=trace.status.value,
        phi=criterion_phi(problem, w),
        gap=equivalence_gap(sensitivities_d(problem, w), problem.m),
        config={"a": config.a, "epsilon": config.epsilon, "max_iter": config.max_iter},
    )
    return report, trace


class _Parser(argparse.ArgumentParser):
    # usage errors must not collide with the IterLimit exit code
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser():
    p = _Parser(
        prog="bayesdopt",
        description="Compute a Bayesian D-optimal approximate design.",
    )
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("problem", nargs="?", help="problem file (JSON)")
    src.add_argument("--builtin", choices=sorted(BUILTINS), help="use a built-in problem")
    p.add_argument("--a", type=float, default=1.0, help="overrelaxation coefficient in [0, 1]")
    p.add_argument("--epsilon", type=float, default=1e-3, help="stop when max d <= m + epsilon")
    p.add_argument("--max-iter", type=int, default=100_000)
    p.add_argument("--start", default="uniform", help="'uniform' or a JSON file of weights")
    p.add_argument("--trace-out", metavar="PATH", help="write the iteration trace as CSV")
    p.add_argument("--report-out", metavar="PATH", help="write the report as JSON")
    p.add_argument(
        "--write-problem", metavar="PATH",
        help="write the loaded problem as an explicit problem file and exit",
    )
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        if args.builtin:
            problem = BUILTINS[args.builtin]()
        else:
            problem = read_problem_file(args.problem)
        if args.write_problem:
            write_problem_file(problem, args.write_problem)
            return EXIT_CONVERGED
        config = SolverConfig(a=args.a, epsilon=args.epsilon, max_iter=args.max_iter)
        w0 = read_start(args.start, problem.n)
        report, trace = run(problem, config, w0)
        if args.trace_out:
            emit_trace(trace, args.trace_out)
        if args.report_out:
            with open(args.report_out, "w") as fh:
                fh.write(report.to_json())
    except (DesignError, OSError) as exc:
        print(f"bayesdopt: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    sys.stdout.write(report.format())
    return EXIT_CONVERGED if report.status == Status.CONVERGED.value else EXIT_ITER_LIMIT


if __name__ == "__main__":
    sys.exit(main())
