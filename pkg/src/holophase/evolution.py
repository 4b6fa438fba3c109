"""Unitary paths ``U(t)`` sampled on a time grid, with ``U^H dU/dt``.

Three sources are supported: a constant Hamiltonian (exact propagator,
``hbar = 1``), a user-supplied grid of unitaries (finite-difference
log-derivatives) and two closed-form spin-1/2 models.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import NonMonotoneTimes, NonUnitarySample, NotHermitian, SpecError
from .spectral import dagger, fro
from .tolerances import DEFAULT, Tolerances

DEFAULT_STEPS = 2000


@dataclass(frozen=True, eq=False)
class UnitaryPath:
    """``U(t_i)`` and ``D(t_i) = U(t_i)^H dU/dt(t_i)`` on a grid.

    ``logderiv_fn``, when present, evaluates ``D`` exactly at arbitrary
    times; integrators use it for midpoint values. Without it the midpoint
    value is the mean of the two neighbouring grid samples.
    """

    times: np.ndarray
    unitaries: np.ndarray
    logderivs: np.ndarray
    logderiv_fn: Optional[Callable[[float], np.ndarray]] = field(default=None, repr=False)
    unitary_fn: Optional[Callable[[float], np.ndarray]] = field(default=None, repr=False)

    @property
    def steps(self) -> int:
        return len(self.times) - 1

    @property
    def dim(self) -> int:
        return self.unitaries.shape[-1]

    @property
    def t_final(self) -> float:
        return float(self.times[-1])

    def midpoint_logderivs(self) -> np.ndarray:
        if self.logderiv_fn is not None:
            mids = 0.5 * (self.times[1:] + self.times[:-1])
            return np.array([self.logderiv_fn(t) for t in mids])
        return 0.5 * (self.logderivs[1:] + self.logderivs[:-1])

    def unitarity_error(self) -> float:
        eye = np.eye(self.dim)
        return max(fro(dagger(U) @ U - eye) for U in self.unitaries)

    def antihermiticity_error(self) -> float:
        return max(fro(D + dagger(D)) for D in self.logderivs)


def _grid(tau: float, steps: int) -> np.ndarray:
    if steps < 1:
        raise SpecError(f"steps must be >= 1, got {steps}", "steps")
    if tau < 0:
        raise SpecError(f"t_final must be >= 0, got {tau}", "t_final")
    return np.linspace(0.0, float(tau), int(steps) + 1)


def _from_functions(times, ufn, dfn) -> UnitaryPath:
    U = np.array([ufn(t) for t in times])
    D = np.array([dfn(t) for t in times])
    return UnitaryPath(times, U, D, logderiv_fn=dfn, unitary_fn=ufn)


def propagate_constant(
    H, tau: float, steps: int = DEFAULT_STEPS, tol: Tolerances = DEFAULT
) -> UnitaryPath:
    """Exact ``U(t) = exp(-iHt)`` on a uniform grid."""
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise NotHermitian("Hamiltonian must be a square matrix", "shape")
    if fro(H - dagger(H)) > tol.tol_herm * max(1.0, fro(H)):
        raise NotHermitian(f"Hamiltonian is not Hermitian (tol_herm={tol.tol_herm:g})")
    H = (H + dagger(H)) / 2
    e, W = np.linalg.eigh(H)
    Wd = dagger(W)

    def ufn(t):
        return (W * np.exp(-1j * e * t)[None, :]) @ Wd

    def dfn(t):
        U = ufn(t)
        D = -1j * dagger(U) @ H @ U
        return (D - dagger(D)) / 2

    return _from_functions(_grid(tau, steps), ufn, dfn)


def _neutron_I_generator(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [s, -c]], dtype=complex)


def builtin_neutron_I(omega: float, theta: float, tau: float, steps: int = DEFAULT_STEPS) -> UnitaryPath:
    """Spin-1/2 precession ``U(t) = cos(wt) 1 + i sin(wt) K(theta)``."""
    if omega == 0:
        raise SpecError("neutron_I requires omega != 0", "omega")
    K = _neutron_I_generator(theta)
    eye = np.eye(2, dtype=complex)
    D = 1j * omega * K

    def ufn(t):
        return np.cos(omega * t) * eye + 1j * np.sin(omega * t) * K

    return _from_functions(_grid(tau, steps), ufn, lambda t: D.copy())


def builtin_neutron_II(omega: float, tau: float, steps: int = DEFAULT_STEPS) -> UnitaryPath:
    """Real reflection family ``[[cos wt, sin wt], [sin wt, -cos wt]]``; ``U(0) != 1``."""
    if omega == 0:
        raise SpecError("neutron_II requires omega != 0", "omega")
    D = omega * np.array([[0, 1], [-1, 0]], dtype=complex)

    def ufn(t):
        c, s = np.cos(omega * t), np.sin(omega * t)
        return np.array([[c, s], [s, -c]], dtype=complex)

    return _from_functions(_grid(tau, steps), ufn, lambda t: D.copy())


BUILTINS = {
    "neutron_I": ("omega", "theta"),
    "neutron_II": ("omega",),
}


def builtin_path(name: str, params: dict, tau: float, steps: int = DEFAULT_STEPS) -> UnitaryPath:
    if name not in BUILTINS:
        raise SpecError(f"unknown builtin model {name!r}", "builtin")
    missing = [k for k in BUILTINS[name] if k not in params]
    if missing:
        raise SpecError(f"builtin {name} requires parameter(s) {missing}", "builtin")
    if name == "neutron_I":
        return builtin_neutron_I(params["omega"], params["theta"], tau, steps)
    return builtin_neutron_II(params["omega"], tau, steps)


def resample(times, unitaries, tol: Tolerances = DEFAULT) -> UnitaryPath:
    """Path from sampled unitaries; log-derivatives by finite differences.

    Central differences in the interior, one-sided at the two ends, then
    projected onto the anti-Hermitian matrices.
    """
    t = np.asarray(times, dtype=float)
    U = np.asarray(unitaries, dtype=complex)
    if t.ndim != 1 or len(t) < 2:
        raise NonMonotoneTimes("need at least two sample times")
    if U.shape[0] != len(t) or U.ndim != 3 or U.shape[1] != U.shape[2]:
        raise SpecError("unitaries must be a list of square matrices, one per time", "shape")
    if t[0] != 0.0 or np.any(np.diff(t) <= 0):
        raise NonMonotoneTimes("sample times must start at 0 and strictly increase")
    eye = np.eye(U.shape[1])
    for i, Ui in enumerate(U):
        err = fro(dagger(Ui) @ Ui - eye)
        if err > tol.tol_unitary:
            raise NonUnitarySample(
                f"sample {i} is not unitary: |U^H U - 1| = {err:.3e} (tol_unitary={tol.tol_unitary:g})"
            )
    dU = np.empty_like(U)
    dU[1:-1] = (U[2:] - U[:-2]) / (t[2:] - t[:-2])[:, None, None]
    dU[0] = (U[1] - U[0]) / (t[1] - t[0])
    dU[-1] = (U[-1] - U[-2]) / (t[-1] - t[-2])
    D = dagger(U) @ dU
    D = (D - dagger(D)) / 2
    return UnitaryPath(t, U, D)


def sample_path(path: UnitaryPath) -> tuple[np.ndarray, np.ndarray]:
    """(times, unitaries) of a path, e.g. to feed :func:`resample`."""
    return path.times.copy(), path.unitaries.copy()


def check_initial_compatibility(path: UnitaryPath, rho0: np.ndarray, tol: Tolerances = DEFAULT) -> float:
    """``|U(0) rho0 U(0)^H - rho0|``; raises when it exceeds ``tol_fiber``-scaled bound."""
    from .errors import IncompatibleInitialState

    U0 = path.unitaries[0]
    err = fro(U0 @ rho0 @ dagger(U0) - rho0)
    if err > max(1e-8, 100 * tol.tol_fiber):
        raise IncompatibleInitialState(
            f"U(0) does not preserve rho(0): |U0 rho0 U0^H - rho0| = {err:.3e}"
        )
    return err
