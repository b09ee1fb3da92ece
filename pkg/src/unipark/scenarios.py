"""Scenario files: schema-checked JSON in, trajectory CSV and metrics JSON out.

Scenario documents are strict: the schema is versioned, every object
rejects unknown keys, and all numeric fields are range-checked before a
simulation object is built. Trajectory CSV uses a fixed thirteen-column
header; floats are printed with %.17g so parsing a file recovers the
in-memory values bit for bit.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .adaptive import AdaptiveSpec, AdaptiveState, SlipParams
from .backstepping import Direction, GesControllerSpec
from .clf import ClfGains, ClfKind
from .errors import DomainViolation, ScenarioError
from .inverse_optimal import (ConstantEpsilon, CostFunction, CostKind, Epsilon,
                              IocControllerSpec, IocVariant, RhoEpsilon)
from .model import CartesianPose, PolarState, wrap_angle
from .safety import SafetySpec
from .sim import (Metrics, Scenario, Trajectory, ZeroControl,
                  SETTLE_TOL_DEFAULT, V_DEAD_DEFAULT, validate_initial_state)
from .timed import FxtSpec, PtSpec

SCHEMA_VERSION = 1

CSV_HEADER = ["t", "rho", "delta", "gamma", "x", "y", "theta", "v", "omega",
              "V", "l_running", "eps1_hat", "eps2_hat"]


def _require_keys(obj: Mapping[str, Any], allowed: Sequence[str],
                  required: Sequence[str], where: str) -> None:
    unknown = set(obj) - set(allowed)
    if unknown:
        raise ScenarioError(f"{where}: unknown keys {sorted(unknown)}")
    missing = [key for key in required if key not in obj]
    if missing:
        raise ScenarioError(f"{where}: missing keys {missing}")


def _number(obj: Mapping[str, Any], key: str, where: str, *, positive: bool = False,
            default: Optional[float] = None) -> float:
    if key not in obj:
        if default is None:
            raise ScenarioError(f"{where}: missing number {key!r}")
        return default
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{where}: {key!r} must be a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ScenarioError(f"{where}: {key!r} must be finite")
    if positive and value <= 0.0:
        raise ScenarioError(f"{where}: {key!r} must be positive, got {value!r}")
    return value


def _gains(obj: Any, where: str) -> ClfGains:
    if not isinstance(obj, Mapping):
        raise ScenarioError(f"{where}: gains must be an object")
    _require_keys(obj, ["k1", "k2", "k3", "k4"], ["k1", "k2", "k3"], where)
    try:
        return ClfGains(_number(obj, "k1", where, positive=True),
                        _number(obj, "k2", where, positive=True),
                        _number(obj, "k3", where, positive=True),
                        _number(obj, "k4", where, positive=True, default=1.0))
    except ValueError as exc:
        raise ScenarioError(f"{where}: {exc}") from exc


def _clf(obj: Any, where: str) -> Tuple[ClfKind, ClfGains]:
    if not isinstance(obj, Mapping):
        raise ScenarioError(f"{where}: clf must be an object")
    _require_keys(obj, ["kind", "gains"], ["kind", "gains"], where)
    try:
        kind = ClfKind(obj["kind"])
    except ValueError:
        valid = sorted(k.value for k in ClfKind)
        raise ScenarioError(f"{where}: unknown clf kind {obj['kind']!r}; one of {valid}")
    return kind, _gains(obj["gains"], f"{where}.gains")


def _epsilon(obj: Any, where: str) -> Epsilon:
    if not isinstance(obj, Mapping):
        raise ScenarioError(f"{where}: epsilon must be an object")
    kind = obj.get("type")
    if kind == "constant":
        _require_keys(obj, ["type", "value"], ["type", "value"], where)
        return ConstantEpsilon(_number(obj, "value", where, positive=True))
    if kind == "rho_dependent":
        _require_keys(obj, ["type", "v_bar", "sigma", "style"], ["type", "v_bar", "sigma", "style"], where)
        style = obj["style"]
        if style == "arctan":
            factor = 2.0 / math.pi
        elif style == "relay":
            factor = 1.0
        else:
            raise ScenarioError(f"{where}: style must be 'arctan' or 'relay', got {style!r}")
        return RhoEpsilon(_number(obj, "v_bar", where, positive=True),
                          _number(obj, "sigma", where, positive=True), factor)
    raise ScenarioError(f"{where}: type must be 'constant' or 'rho_dependent', got {kind!r}")


def _cost(name: Any, where: str) -> CostFunction:
    try:
        return CostFunction(CostKind(name))
    except ValueError:
        valid = sorted(k.value for k in CostKind)
        raise ScenarioError(f"{where}: unknown cost {name!r}; one of {valid}")


def _direction(name: Any, where: str) -> Direction:
    try:
        return Direction(name)
    except ValueError:
        raise ScenarioError(f"{where}: base must be 'unidirectional' or 'bidirectional', got {name!r}")


def _controller(doc: Mapping[str, Any]) -> Union[GesControllerSpec, IocControllerSpec,
                                                 AdaptiveSpec, PtSpec, FxtSpec,
                                                 SafetySpec, ZeroControl]:
    obj = doc.get("controller")
    if not isinstance(obj, Mapping):
        raise ScenarioError("controller: must be an object")
    family = obj.get("family")
    where = f"controller[{family}]"
    if family in ("unidirectional", "bidirectional"):
        _require_keys(obj, ["family", "gains"], ["family", "gains"], where)
        return GesControllerSpec(Direction(family), _gains(obj["gains"], f"{where}.gains"))
    if family == "inverse_optimal":
        _require_keys(obj, ["family", "cost1", "cost2", "eps1", "eps2", "variant"],
                      ["family", "cost1", "cost2", "eps1", "eps2"], where)
        if "clf" not in doc:
            raise ScenarioError(f"{where}: needs a top-level clf object")
        kind, gains = _clf(doc["clf"], "clf")
        variant_name = obj.get("variant", "optimal")
        try:
            variant = IocVariant(variant_name)
        except ValueError:
            raise ScenarioError(f"{where}: variant must be 'optimal' or 'continuous'")
        return IocControllerSpec(kind, gains, _cost(obj["cost1"], f"{where}.cost1"),
                                 _cost(obj["cost2"], f"{where}.cost2"),
                                 _epsilon(obj["eps1"], f"{where}.eps1"),
                                 _epsilon(obj["eps2"], f"{where}.eps2"), variant)
    if family == "adaptive":
        _require_keys(obj, ["family", "mu1", "mu2", "n0"], ["family", "mu1", "mu2"], where)
        if "clf" not in doc:
            raise ScenarioError(f"{where}: needs a top-level clf object")
        kind, gains = _clf(doc["clf"], "clf")
        try:
            return AdaptiveSpec(kind, gains, _number(obj, "mu1", where, positive=True),
                                _number(obj, "mu2", where, positive=True),
                                _number(obj, "n0", where, positive=True, default=1.0))
        except ValueError as exc:
            raise ScenarioError(f"{where}: {exc}") from exc
    if family in ("prescribed_time", "fixed_time"):
        keys = ["family", "base", "gains", "T"] + (["t0"] if family == "prescribed_time" else ["p"])
        _require_keys(obj, keys, [k for k in keys if k != "t0"], where)
        base = GesControllerSpec(_direction(obj["base"], where), _gains(obj["gains"], f"{where}.gains"))
        try:
            if family == "prescribed_time":
                return PtSpec(base, _number(obj, "T", where, positive=True),
                              _number(obj, "t0", where, default=0.0))
            return FxtSpec(base, _number(obj, "T", where, positive=True),
                           _number(obj, "p", where, positive=True))
        except ValueError as exc:
            raise ScenarioError(f"{where}: {exc}") from exc
    if family == "nonovershoot":
        _require_keys(obj, ["family", "gains"], ["family", "gains"], where)
        return SafetySpec(_gains(obj["gains"], f"{where}.gains"))
    if family == "zero":
        _require_keys(obj, ["family"], ["family"], where)
        return ZeroControl()
    raise ScenarioError(f"controller: unknown family {family!r}")


@dataclass(frozen=True)
class ScenarioFile:
    """A parsed scenario document plus its optional I/O and assertion blocks."""

    scenario: Scenario
    csv_path: Optional[str]
    metrics_path: Optional[str]
    assertions: Dict[str, Any]
    paper_ref: Optional[str]


_TOP_KEYS = ["schema", "name", "paper_ref", "controller", "clf", "initial", "slip",
             "sim", "outputs", "assertions"]
_ASSERTION_KEYS = ["status", "final_norm_lt", "final_V_lt", "max_v_le", "max_omega_le",
                   "min_y_le", "min_v_ge", "settling_time_le", "j_rel_err_le"]


def parse_scenario(doc: Any, name_hint: str = "") -> ScenarioFile:
    if not isinstance(doc, Mapping):
        raise ScenarioError("scenario document must be a JSON object")
    _require_keys(doc, _TOP_KEYS, ["schema", "controller", "initial", "sim"], "scenario")
    if doc["schema"] != SCHEMA_VERSION:
        raise ScenarioError(f"scenario: schema version {doc['schema']!r} is not {SCHEMA_VERSION}")

    initial_obj = doc["initial"]
    if not isinstance(initial_obj, Mapping):
        raise ScenarioError("initial: must be an object")
    _require_keys(initial_obj, ["rho", "delta", "gamma", "eps1_hat", "eps2_hat",
                                "target_x", "target_y", "target_theta"],
                  ["rho", "delta", "gamma"], "initial")
    initial = PolarState(_number(initial_obj, "rho", "initial", positive=True),
                         wrap_angle(_number(initial_obj, "delta", "initial")),
                         wrap_angle(_number(initial_obj, "gamma", "initial")))
    adaptive_init = AdaptiveState(_number(initial_obj, "eps1_hat", "initial", default=0.0),
                                  _number(initial_obj, "eps2_hat", "initial", default=0.0))
    target = CartesianPose(_number(initial_obj, "target_x", "initial", default=0.0),
                           _number(initial_obj, "target_y", "initial", default=0.0),
                           _number(initial_obj, "target_theta", "initial", default=0.0))

    slip = SlipParams()
    if "slip" in doc:
        slip_obj = doc["slip"]
        if not isinstance(slip_obj, Mapping):
            raise ScenarioError("slip: must be an object")
        _require_keys(slip_obj, ["b1", "b2"], [], "slip")
        slip = SlipParams(_number(slip_obj, "b1", "slip", positive=True, default=1.0),
                          _number(slip_obj, "b2", "slip", positive=True, default=1.0))

    sim_obj = doc["sim"]
    if not isinstance(sim_obj, Mapping):
        raise ScenarioError("sim: must be an object")
    _require_keys(sim_obj, ["dt", "horizon", "settle_tol", "v_dead"], ["dt", "horizon"], "sim")

    csv_path = metrics_path = None
    if "outputs" in doc:
        outputs = doc["outputs"]
        if not isinstance(outputs, Mapping):
            raise ScenarioError("outputs: must be an object")
        _require_keys(outputs, ["csv", "metrics"], [], "outputs")
        csv_path = outputs.get("csv")
        metrics_path = outputs.get("metrics")

    assertions: Dict[str, Any] = {}
    if "assertions" in doc:
        asserts = doc["assertions"]
        if not isinstance(asserts, Mapping):
            raise ScenarioError("assertions: must be an object")
        _require_keys(asserts, _ASSERTION_KEYS, [], "assertions")
        assertions = dict(asserts)

    name = doc.get("name", name_hint)
    scenario = Scenario(
        controller=_controller(doc),
        initial=initial,
        dt=_number(sim_obj, "dt", "sim", positive=True),
        horizon=_number(sim_obj, "horizon", "sim", positive=True),
        slip=slip,
        adaptive_init=adaptive_init,
        target=target,
        name=str(name),
        v_dead=_number(sim_obj, "v_dead", "sim", positive=True, default=V_DEAD_DEFAULT),
        settle_tol=_number(sim_obj, "settle_tol", "sim", positive=True,
                           default=SETTLE_TOL_DEFAULT),
    )
    try:
        validate_initial_state(scenario)
    except DomainViolation as exc:
        raise ScenarioError(f"initial: {exc}") from exc
    return ScenarioFile(scenario, csv_path, metrics_path, assertions, doc.get("paper_ref"))


def load_scenario(path: Union[str, Path]) -> ScenarioFile:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path} is not valid JSON: {exc}") from exc
    return parse_scenario(doc, name_hint=path.stem)


def _fmt(value: float) -> str:
    return "%.17g" % value


def write_trajectory_csv(path: Union[str, Path, io.TextIOBase], trajectory: Trajectory) -> None:
    """Write the fixed-header CSV; unused channels stay as empty cells."""
    close = False
    if isinstance(path, (str, Path)):
        handle = open(path, "w", newline="")
        close = True
    else:
        handle = path
    try:
        writer = csv.writer(handle)
        writer.writerow(CSV_HEADER)
        costs = trajectory.costs
        estimates = trajectory.estimates
        for i in range(len(trajectory.times)):
            v_value = trajectory.v_values[i]
            row = [
                _fmt(trajectory.times[i]),
                _fmt(trajectory.states[i, 0]),
                _fmt(trajectory.states[i, 1]),
                _fmt(trajectory.states[i, 2]),
                _fmt(trajectory.poses[i, 0]),
                _fmt(trajectory.poses[i, 1]),
                _fmt(trajectory.poses[i, 2]),
                _fmt(trajectory.inputs[i, 0]),
                _fmt(trajectory.inputs[i, 1]),
                "" if math.isnan(v_value) else _fmt(v_value),
                "" if costs is None or math.isnan(costs[i]) else _fmt(costs[i]),
                "" if estimates is None else _fmt(estimates[i, 0]),
                "" if estimates is None else _fmt(estimates[i, 1]),
            ]
            writer.writerow(row)
    finally:
        if close:
            handle.close()


def read_trajectory_csv(path: Union[str, Path]) -> Dict[str, np.ndarray]:
    """Parse an emitted CSV back into named channels (empty cells become nan)."""
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        if header != CSV_HEADER:
            raise ScenarioError(f"unexpected CSV header {header!r}")
        columns: List[List[float]] = [[] for _ in CSV_HEADER]
        for row in reader:
            if len(row) != len(CSV_HEADER):
                raise ScenarioError(f"ragged CSV row of length {len(row)}")
            for cell, column in zip(row, columns):
                column.append(float(cell) if cell != "" else math.nan)
    return {name: np.asarray(column) for name, column in zip(CSV_HEADER, columns)}


def write_metrics_json(path: Union[str, Path], metrics: Metrics) -> None:
    Path(path).write_text(json.dumps(metrics.to_dict(), indent=2) + "\n")


def check_assertions(assertions: Mapping[str, Any], trajectory: Trajectory,
                     metrics: Metrics) -> List[Tuple[str, bool, str]]:
    """Evaluate embedded pass/fail conditions against a finished run."""
    results: List[Tuple[str, bool, str]] = []

    def add(name: str, ok: bool, detail: str) -> None:
        results.append((name, bool(ok), detail))

    norms = trajectory.norms
    for name, expected in assertions.items():
        if name == "status":
            add(name, metrics.status == expected, f"{metrics.status} vs {expected}")
        elif name == "final_norm_lt":
            add(name, norms[-1] < expected, f"{norms[-1]:.3e} < {expected:.3e}")
        elif name == "final_V_lt":
            ok = metrics.final_v is not None and metrics.final_v < expected
            add(name, ok, f"{metrics.final_v} < {expected}")
        elif name == "max_v_le":
            add(name, metrics.max_v <= expected, f"{metrics.max_v:.6g} <= {expected}")
        elif name == "max_omega_le":
            add(name, metrics.max_omega <= expected, f"{metrics.max_omega:.6g} <= {expected}")
        elif name == "min_y_le":
            add(name, metrics.min_y <= expected, f"{metrics.min_y:.3e} <= {expected}")
        elif name == "min_v_ge":
            min_v = float(trajectory.inputs[:, 0].min())
            add(name, min_v >= expected, f"{min_v:.3e} >= {expected}")
        elif name == "settling_time_le":
            ok = metrics.settling_time is not None and metrics.settling_time <= expected
            add(name, ok, f"{metrics.settling_time} <= {expected}")
        elif name == "j_rel_err_le":
            v0 = float(trajectory.v_values[0])
            ok = metrics.j_cost is not None and v0 > 0.0 \
                and abs(metrics.j_cost - v0) / v0 <= expected
            detail = f"J={metrics.j_cost}, V0={v0}"
            add(name, ok, detail)
    return results
