"""JSON instance files describing problems for the command line.

An instance is a JSON object with optional sections; dimensions must agree
across all sections that are present.

  "coefficient":   {"n", "d", "K", "L", "M", "W"}; matrices are flat
                   row-major lists of [re, im] pairs.  Doubles as the
                   driving cocycle coefficient for simulations.
  "flow":          {"n", "d", "h", "l", "W"} with h Hermitian, W unitary.
  "perturbation":  {"F1": <coefficient>, "F2": <coefficient>,
                    "theta": <flow, optional>}.  When "theta" is absent the
                   instance-level "flow" is used, or the trivial flow.
  "stepfunctions": {name: {"breakpoints": [...], "values": [[[re,im],...],...]}}
  "observable":    flat n x n matrix as [re, im] pairs (default: identity).
  "simulation":    {"T": horizon, "N": [ladder of slot counts],
                    "kind": "fk" | "hp" | "isometry" | "multiplier",
                    "scheme": "euler" (default) | "exponential",
                    "split_fraction": for "multiplier", default 0.25}
  "checks":        [{"name": ..., "tol": optional}, ...]
  "seed":          integer (default 0)
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .coefficients import BlockCoefficient, coefficient_from_json, matrix_from_pairs
from .flows import FlowGenerator, flow_from_json, trivial_flow
from .linalg import DimensionMismatchError, as_complex
from .matrix_elements import stepfunction_from_json
from .perturbations import PerturbationSpec

SIMULATION_KINDS = ("fk", "hp", "isometry", "multiplier")
SCHEMES = ("euler", "exponential")


class InstanceError(ValueError):
    """Malformed or internally inconsistent instance file."""


@dataclass(frozen=True)
class InstanceFile:
    path: str
    coefficient: BlockCoefficient | None = None
    flow: FlowGenerator | None = None
    perturbation: PerturbationSpec | None = None
    stepfunctions: dict = field(default_factory=dict)
    observable: object = None  # n x n ndarray or None
    simulation: dict | None = None
    checks: list = field(default_factory=list)
    seed: int = 0

    def shape(self) -> tuple[int, int] | None:
        """The common (n, d) of whatever sections are present."""
        for item in (self.coefficient, self.flow):
            if item is not None:
                return item.n, item.d
        if self.perturbation is not None:
            return self.perturbation.F1.n, self.perturbation.F1.d
        return None


def _load_section(obj: dict, key: str, loader, where: str):
    if key not in obj:
        return None
    try:
        return loader(obj[key])
    except InstanceError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise InstanceError(f"section {where!r}: {exc}") from exc


def _load_perturbation(section: dict, default_flow: FlowGenerator | None) -> PerturbationSpec:
    f1 = coefficient_from_json(section["F1"])
    f2 = coefficient_from_json(section["F2"])
    if "theta" in section:
        theta = flow_from_json(section["theta"])
    elif default_flow is not None:
        theta = default_flow
    else:
        theta = trivial_flow(f1.n, f1.d)
    return PerturbationSpec(theta=theta, F1=f1, F2=f2)


def _validate_simulation(sim: dict) -> dict:
    if not isinstance(sim, dict):
        raise InstanceError("section 'simulation' must be an object")
    out = dict(sim)
    try:
        out["T"] = float(sim["T"])
        ladder = [int(v) for v in sim["N"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise InstanceError(f"section 'simulation': {exc}") from exc
    if out["T"] <= 0:
        raise InstanceError("section 'simulation': T must be positive")
    if not ladder or any(v < 1 for v in ladder):
        raise InstanceError("section 'simulation': N must be a nonempty list of slot counts >= 1")
    if any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise InstanceError("section 'simulation': N ladder must be strictly increasing")
    out["N"] = ladder
    out["kind"] = sim.get("kind", "fk")
    if out["kind"] not in SIMULATION_KINDS:
        raise InstanceError(f"section 'simulation': kind must be one of {SIMULATION_KINDS}")
    out["scheme"] = sim.get("scheme", "euler")
    if out["scheme"] not in SCHEMES:
        raise InstanceError(f"section 'simulation': scheme must be one of {SCHEMES}")
    out["split_fraction"] = float(sim.get("split_fraction", 0.25))
    if not (0 < out["split_fraction"] < 1):
        raise InstanceError("section 'simulation': split_fraction must lie in (0, 1)")
    return out


def load_instance(path: str) -> InstanceFile:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise InstanceError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InstanceError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise InstanceError(f"{path}: top level must be a JSON object")
    return parse_instance(obj, path=path)


def parse_instance(obj: dict, path: str = "<memory>") -> InstanceFile:
    try:
        coefficient = _load_section(obj, "coefficient", coefficient_from_json, "coefficient")
        flow = _load_section(obj, "flow", flow_from_json, "flow")
    except DimensionMismatchError as exc:
        raise InstanceError(str(exc)) from exc

    perturbation = None
    if "perturbation" in obj:
        try:
            perturbation = _load_perturbation(obj["perturbation"], flow)
        except InstanceError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise InstanceError(f"section 'perturbation': {exc}") from exc

    stepfunctions = {}
    for name, sf in obj.get("stepfunctions", {}).items():
        try:
            stepfunctions[name] = stepfunction_from_json(sf)
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise InstanceError(f"step function {name!r}: {exc}") from exc

    shapes = {}
    if coefficient is not None:
        shapes["coefficient"] = (coefficient.n, coefficient.d)
    if flow is not None:
        shapes["flow"] = (flow.n, flow.d)
    if perturbation is not None:
        shapes["perturbation"] = (perturbation.F1.n, perturbation.F1.d)
    if len(set(shapes.values())) > 1:
        raise InstanceError(f"sections disagree on (n, d): {shapes}")
    nd = next(iter(shapes.values()), None)

    if nd is not None:
        for name, sf in stepfunctions.items():
            if sf.d != nd[1]:
                raise InstanceError(
                    f"step function {name!r} has d = {sf.d}, sections have d = {nd[1]}"
                )

    observable = None
    if "observable" in obj:
        if nd is None:
            raise InstanceError("'observable' requires a section fixing the dimension n")
        try:
            observable = matrix_from_pairs(obj["observable"], nd[0], nd[0])
        except (DimensionMismatchError, TypeError, ValueError) as exc:
            raise InstanceError(f"'observable': {exc}") from exc

    simulation = None
    if "simulation" in obj:
        simulation = _validate_simulation(obj["simulation"])

    checks = obj.get("checks", [])
    if not isinstance(checks, list) or any(
        not isinstance(c, dict) or "name" not in c for c in checks
    ):
        raise InstanceError("section 'checks' must be a list of {name, tol?} objects")

    try:
        seed = int(obj.get("seed", 0))
    except (TypeError, ValueError) as exc:
        raise InstanceError(f"'seed' must be an integer: {exc}") from exc

    return InstanceFile(
        path=path,
        coefficient=coefficient,
        flow=flow,
        perturbation=perturbation,
        stepfunctions=stepfunctions,
        observable=observable,
        simulation=simulation,
        checks=checks,
        seed=seed,
    )


def default_observable(inst: InstanceFile):
    """The instance observable, or the identity at the instance dimension."""
    if inst.observable is not None:
        return as_complex(inst.observable)
    nd = inst.shape()
    if nd is None:
        raise InstanceError("instance fixes no dimension; cannot default the observable")
    return np.eye(nd[0], dtype=complex)
