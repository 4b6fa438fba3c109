"""JSON run specifications and report documents.

Complex numbers travel as ``[re, im]`` pairs and matrices as row-major
nested lists of such pairs. A bare real number is accepted wherever a
complex entry is expected.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .connection import TransportResult, horizontal_lift
from .errors import SpecError
from .evolution import DEFAULT_STEPS, BUILTINS, UnitaryPath, builtin_path, propagate_constant, resample
from .phases import PhaseReport, phase_report
from .spectral import (
    DensityOperator,
    PurificationFrame,
    Spectrum,
    spectrum_of,
    standard_purification,
)
from .tolerances import DEFAULT, Tolerances

SCHEMA_VERSION = "holophase.report/1"


def complex_to_json(z) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def matrix_to_json(a) -> list:
    return [[complex_to_json(x) for x in row] for row in np.asarray(a)]


def complex_from_json(x) -> complex:
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(x)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in x
    ):
        return complex(x[0], x[1])
    raise SpecError(f"expected a number or an [re, im] pair, got {x!r}", "schema")


def matrix_from_json(rows, what: str = "matrix") -> np.ndarray:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise SpecError(f"{what} must be a nonempty list of rows", "schema")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise SpecError(f"{what} rows have unequal lengths", "schema")
    return np.array([[complex_from_json(x) for x in r] for r in rows], dtype=complex)


@dataclass
class Run:
    """A parsed and validated run specification."""

    raw: dict
    tol: Tolerances
    frame: PurificationFrame
    path_factory: Any
    t_final: float
    steps: int
    report: dict

    def path(self, steps: int | None = None) -> UnitaryPath:
        return self.path_factory(self.steps if steps is None else steps)

    def resolved(self) -> dict:
        out = copy.deepcopy(self.raw)
        out["t_final"] = self.t_final
        out["steps"] = self.steps
        out["tolerances"] = self.tol.as_dict()
        out["report"] = dict(self.report)
        return out


_TOP_KEYS = {"spectrum", "initial_state", "evolution", "t_final", "steps", "tolerances", "report"}


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise SpecError(f"{where}: missing required key {key!r}", "schema")
    return obj[key]


def _number(x, where: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
        raise SpecError(f"{where} must be a finite number", "schema")
    return float(x)


def _evolution_dim(evo: dict) -> int | None:
    kind = evo.get("type")
    if kind == "builtin":
        return 2
    if kind == "constant_hamiltonian":
        return len(evo.get("matrix") or [])
    if kind == "sampled_unitaries":
        us = evo.get("unitaries") or []
        return len(us[0]) if us else None
    return None


def parse_run(doc: dict, steps: int | None = None, tol_overrides: dict | None = None) -> Run:
    """Validate a run specification and prepare its initial frame and path factory.

    Raises a :class:`HolophaseError` naming the failed check.
    """
    if not isinstance(doc, dict):
        raise SpecError("run specification must be a JSON object", "schema")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise SpecError(f"unknown top-level key(s): {sorted(unknown)}", "schema")
    try:
        tol = DEFAULT.updated(doc.get("tolerances"))
        tol = tol.updated(tol_overrides)
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"tolerances: {exc}", "schema") from exc

    evo = _require(doc, "evolution", "run spec")
    if not isinstance(evo, dict) or "type" not in evo:
        raise SpecError("evolution must be an object with a 'type'", "schema")
    t_final = _number(_require(doc, "t_final", "run spec"), "t_final")
    if t_final < 0:
        raise SpecError("t_final must be >= 0", "t_final")
    n_steps = doc.get("steps", DEFAULT_STEPS) if steps is None else steps
    if isinstance(n_steps, bool) or not isinstance(n_steps, int) or n_steps < 1:
        raise SpecError("steps must be a positive integer", "steps")

    N = _evolution_dim(evo)
    frame = _parse_initial(doc, N, tol)
    N = frame.matrix.shape[0]
    factory = _parse_evolution(evo, N, t_final, tol)
    # exercise the factory once at a tiny resolution so validation catches
    # dimension and U(0) compatibility problems without a full transport
    probe = factory(1)
    if probe.dim != N:
        raise SpecError(f"evolution acts on C^{probe.dim} but the state lives in C^{N}", "shape")
    from .evolution import check_initial_compatibility

    check_initial_compatibility(probe, frame.density, tol)

    report = {"per_J": False, "max_order": frame.spectrum.n, "holonomy": False}
    rep = doc.get("report") or {}
    if not isinstance(rep, dict) or set(rep) - set(report):
        raise SpecError("report must be an object with keys per_J, max_order, holonomy", "schema")
    report.update(rep)
    if not isinstance(report["max_order"], int) or isinstance(report["max_order"], bool) or report["max_order"] < 1:
        raise SpecError("report.max_order must be a positive integer", "schema")
    return Run(doc, tol, frame, factory, t_final, n_steps, report)


def _parse_initial(doc: dict, N: int | None, tol: Tolerances) -> PurificationFrame:
    init = doc.get("initial_state", {"type": "diagonal"})
    kind = init.get("type") if isinstance(init, dict) else None
    if kind == "density_matrix":
        rho = matrix_from_json(_require(init, "matrix", "initial_state"), "initial_state.matrix")
        if N is not None and rho.shape[0] != N:
            raise SpecError(f"initial_state is {rho.shape[0]}-dimensional, evolution is {N}-dimensional", "shape")
        spec, V = spectrum_of(DensityOperator(rho, tol), tol)
        if "spectrum" in doc:
            given = Spectrum.from_values(_spectrum_values(doc["spectrum"]), tol)
            if given.n != spec.n or np.abs(np.subtract(given.eigenvalues, spec.eigenvalues)).max() > tol.tol_trace:
                raise SpecError("spectrum disagrees with the eigenvalues of initial_state.matrix", "tol_trace")
        return standard_purification(spec, V, tol)
    if kind == "diagonal":
        if "spectrum" not in doc:
            raise SpecError("a diagonal initial state needs a 'spectrum'", "schema")
        p = _spectrum_values(doc["spectrum"])
        spec = Spectrum.from_values(p, tol)
        N = spec.n if N is None else N
        if spec.n > N:
            raise SpecError(f"spectrum of length {spec.n} does not fit in C^{N}", "shape")
        return standard_purification(spec, np.eye(N, spec.n), tol)
    raise SpecError("initial_state.type must be 'diagonal' or 'density_matrix'", "schema")


def _spectrum_values(values) -> np.ndarray:
    if not isinstance(values, list) or not values:
        raise SpecError("spectrum must be a nonempty list of numbers", "schema")
    p = np.array([_number(v, "spectrum entry") for v in values])
    if np.any(np.diff(p) > 0):
        raise SpecError("spectrum must be nonincreasing", "spectrum")
    return p


def _parse_evolution(evo: dict, N: int, t_final: float, tol: Tolerances):
    kind = evo["type"]
    if kind == "constant_hamiltonian":
        H = matrix_from_json(_require(evo, "matrix", "evolution"), "evolution.matrix")
        propagate_constant(H, t_final, 1, tol)
        return lambda steps: propagate_constant(H, t_final, steps, tol)
    if kind == "sampled_unitaries":
        times = _require(evo, "times", "evolution")
        mats = _require(evo, "unitaries", "evolution")
        if not isinstance(times, list) or not isinstance(mats, list) or len(times) != len(mats):
            raise SpecError("evolution.times and evolution.unitaries must be lists of equal length", "schema")
        t = np.array([_number(x, "evolution.times entry") for x in times])
        U = np.array([matrix_from_json(m, "evolution.unitaries entry") for m in mats])
        if len(t) and abs(t[-1] - t_final) > 1e-12 * max(1.0, abs(t_final)):
            raise SpecError("the last sample time must equal t_final", "times")
        path = resample(t, U, tol)
        # sampled paths carry their own grid; the steps setting does not apply
        return lambda steps: path
    if kind == "builtin":
        name = _require(evo, "name", "evolution")
        if name not in BUILTINS:
            raise SpecError(f"unknown builtin {name!r}; expected one of {sorted(BUILTINS)}", "builtin")
        params = {k: _number(_require(evo, k, f"builtin {name}"), k) for k in BUILTINS[name]}
        builtin_path(name, params, t_final, 1)
        return lambda steps: builtin_path(name, params, t_final, steps)
    raise SpecError(f"unknown evolution type {kind!r}", "schema")


def _neutron_convention(run: Run, zeta: complex) -> str | None:
    from .oracles import closed_form_neutron_I

    evo = run.raw["evolution"]
    if evo.get("type") != "builtin" or evo.get("name") != "neutron_I":
        return None
    spec = run.frame.spectrum
    omega, theta = float(evo["omega"]), float(evo["theta"])
    psi = run.frame.matrix
    if spec.n != 2 or np.abs(psi - np.diag(np.diag(psi))).max() > 1e-12:
        return None
    if abs(abs(omega) * run.t_final - math.pi) > 1e-12:
        return None
    p1, p2 = spec.eigenvalues
    cands = closed_form_neutron_I(p1, p2, theta)
    matched = [k for k in ("paper", "swapped") if abs(cands[k] - zeta) < 1e-6]
    return matched[0] if matched else None


def _gamma(g):
    return None if g is None else float(g)


def report_document(run: Run, transport: TransportResult, rep: PhaseReport) -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "zeta_geo": complex_to_json(rep.zeta_geo),
        "gamma_geo": _gamma(rep.gamma_geo),
        "orders": [{"d": d, "zeta": complex_to_json(z), "gamma": _gamma(g)} for d, z, g in rep.orders],
        "first_defined_order": rep.first_defined_order,
        "newton_s": [complex_to_json(s) for s in rep.s_coeffs],
        "diagnostics": {
            "fiber_drift": transport.diagnostics.fiber_drift,
            "horizontality_residual": transport.diagnostics.horizontality_residual,
            "steps": transport.diagnostics.steps,
            "convention_matched": _neutron_convention(run, rep.zeta_geo),
            "schema_version": SCHEMA_VERSION,
        },
        "resolved_spec": run.resolved(),
    }
    if rep.holonomy is not None:
        doc["holonomy"] = matrix_to_json(rep.holonomy)
    if rep.per_J is not None:
        doc["per_J"] = [{"J": list(J), "zeta": complex_to_json(z)} for J, z in rep.per_J]
    return doc


def execute(run: Run) -> tuple[dict, PhaseReport]:
    path = run.path()
    transport = horizontal_lift(path, run.frame, tol=run.tol)
    rep = phase_report(
        transport,
        max_order=run.report["max_order"],
        per_J=run.report["per_J"],
        holonomy=run.report["holonomy"],
        tol=run.tol,
    )
    return report_document(run, transport, rep), rep


def dumps(doc: dict) -> str:
    # repr-based float output round-trips every double exactly
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"
