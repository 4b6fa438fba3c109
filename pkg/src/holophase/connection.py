"""Mechanical connection on the bundle of purifications and horizontal lifts.

For a frame ``Psi`` over a rank-``n`` density operator with spectrum
``sigma`` the connection sends a tangent vector ``X`` to

    A_Psi(X) = sum_k E_k Psi^H X E_k P^-1,

an element of the Lie algebra of block-diagonal anti-Hermitian matrices.
A lift ``Psi(t) = U(t) Psi_0`` is made horizontal by a gauge curve ``G(t)``
solving ``dG/dt = -A_Psi(dPsi/dt) G``, i.e. the time-ordered exponential
with later times acting from the left.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import FiberDrift, NotAntiHermitian
from .evolution import UnitaryPath, check_initial_compatibility
from .spectral import (
    PurificationFrame,
    SpectralMatrices,
    Spectrum,
    block_mask,
    block_projectors,
    dagger,
    fro,
)
from .tolerances import DEFAULT, Tolerances


def _as_array(Psi) -> np.ndarray:
    return Psi.matrix if isinstance(Psi, PurificationFrame) else np.asarray(Psi, dtype=complex)


def connection_form(Psi, X, spec: SpectralMatrices, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Value of the connection on the tangent vector ``X`` at ``Psi``.

    Off-block entries are exactly zero. The result is projected onto the
    anti-Hermitian matrices; a defect above ``tol_herm`` (relative to the
    size of ``Psi^H X``) means ``X`` was not tangent to the fiber bundle
    and raises :class:`NotAntiHermitian`.
    """
    A = dagger(_as_array(Psi)) @ np.asarray(X, dtype=complex)
    xi = sum(E @ A @ E for E in spec.E) @ spec.P_inv
    defect = fro(xi + dagger(xi))
    if defect > tol.tol_herm * max(1.0, fro(A) * np.abs(np.diag(spec.P_inv)).max()):
        raise NotAntiHermitian(
            f"connection value is not anti-Hermitian (defect {defect:.3e}); "
            "X is not tangent to the fiber bundle"
        )
    return (xi - dagger(xi)) / 2


def moment_map(Psi, X, eta) -> float:
    """Pairing ``J_Psi(X) . eta = G(X, Psi eta)`` with ``G(X, Y) = Tr(X^H Y + Y^H X)``."""
    Y = _as_array(Psi) @ eta
    return 2.0 * float(np.real(np.trace(dagger(np.asarray(X)) @ Y)))


def locked_inertia(Psi, xi, eta) -> float:
    """Pairing ``I_Psi(xi) . eta = G(Psi xi, Psi eta)``."""
    return moment_map(Psi, _as_array(Psi) @ xi, eta)


def u_sigma_basis(spectrum: Spectrum) -> list[np.ndarray]:
    """Real basis of the block-diagonal anti-Hermitian matrices."""
    n = spectrum.n
    mask = block_mask(spectrum)
    basis = []
    for i in range(n):
        for j in range(i, n):
            if not mask[i, j]:
                continue
            if i == j:
                b = np.zeros((n, n), dtype=complex)
                b[i, i] = 1j
                basis.append(b)
            else:
                b = np.zeros((n, n), dtype=complex)
                b[i, j], b[j, i] = 1, -1
                basis.append(b)
                b = np.zeros((n, n), dtype=complex)
                b[i, j], b[j, i] = 1j, 1j
                basis.append(b)
    return basis


@dataclass(frozen=True, eq=False)
class TransportDiagnostics:
    fiber_drift: float
    horizontality_residual: float
    steps: int
    compatibility_error: float = 0.0


@dataclass(frozen=True, eq=False)
class TransportResult:
    """Horizontal lift sampled on the path grid.

    ``frames[i]`` is the horizontal frame at ``times[i]`` and ``gauges[i]``
    the gauge-group element with ``frames[i] = U(t_i) U(0)^-1 Psi_0 gauges[i]``.
    """

    times: np.ndarray
    frames: np.ndarray
    gauges: np.ndarray
    initial: PurificationFrame
    diagnostics: TransportDiagnostics = field(repr=False)

    @property
    def endpoint(self) -> PurificationFrame:
        return PurificationFrame(self.frames[-1], self.initial.spectrum)

    @property
    def gauge_curve_end(self) -> np.ndarray:
        return self.gauges[-1]


def polar_project(G: np.ndarray, spectrum: Spectrum) -> np.ndarray:
    """Nearest block-diagonal unitary, block by block."""
    out = np.zeros_like(G)
    for s in spectrum.block_slices():
        blk = G[s, s]
        if blk.shape[0] == 1:
            out[s, s] = blk / abs(blk[0, 0])
        else:
            W, _, Vh = np.linalg.svd(blk)
            out[s, s] = W @ Vh
    return out


def _block_expm_antiherm(xi: np.ndarray, dt: np.ndarray, spectrum: Spectrum) -> np.ndarray:
    """``exp(-xi_i dt_i)`` for a stack of block-diagonal anti-Hermitian ``xi``."""
    steps, n, _ = xi.shape
    out = np.zeros((steps, n, n), dtype=complex)
    for s in spectrum.block_slices():
        h = 1j * xi[:, s, s]  # Hermitian
        w, W = np.linalg.eigh(h)
        phase = np.exp(1j * w * dt[:, None])
        out[:, s, s] = (W * phase[:, None, :]) @ dagger(W)
    return out


def _frame_and_spec(Psi0, spectrum: Spectrum | None):
    if isinstance(Psi0, PurificationFrame):
        return Psi0
    if spectrum is None:
        raise TypeError("a spectrum is required when Psi0 is a bare array")
    return PurificationFrame(np.asarray(Psi0, dtype=complex), spectrum)


def horizontal_lift(
    path: UnitaryPath,
    Psi0,
    spec: SpectralMatrices | None = None,
    tol: Tolerances = DEFAULT,
    spectrum: Spectrum | None = None,
) -> TransportResult:
    """Horizontal lift of ``rho(t) = U(t) rho(0) U(t)^H`` starting at ``Psi0``.

    The reference lift is ``Psi(t) = U(t) U(0)^-1 Psi0`` so that it starts
    exactly at ``Psi0``. The gauge curve is a product of per-step
    exponentials of the connection at the step midpoint, each followed by
    a block-wise polar re-projection onto the gauge group.
    """
    frame = _frame_and_spec(Psi0, spectrum)
    spectrum = frame.spectrum
    if spec is None:
        spec = block_projectors(spectrum)
    Psi0m = frame.matrix
    drift0 = frame.fiber_error()
    if drift0 > 100 * tol.tol_fiber:
        raise FiberDrift(f"initial frame is off the fiber: |Psi^H Psi - P| = {drift0:.3e}")
    rho0 = Psi0m @ dagger(Psi0m)
    compat = check_initial_compatibility(path, rho0, tol)

    B = dagger(path.unitaries[0]) @ Psi0m
    Bd = dagger(B)
    mask = block_mask(spectrum)
    pinv = np.diag(spec.P_inv)

    Dm = path.midpoint_logderivs()
    A = Bd[None] @ Dm @ B[None]
    xi = np.where(mask[None], A, 0) * pinv[None, None, :]
    defect = np.linalg.norm(xi + dagger(xi), axis=(1, 2)).max(initial=0.0)
    scale = max(1.0, np.linalg.norm(A, axis=(1, 2)).max(initial=0.0) * pinv.max())
    if defect > tol.tol_herm * scale:
        raise NotAntiHermitian(f"connection along the path is not anti-Hermitian ({defect:.3e})")
    xi = (xi - dagger(xi)) / 2

    dt = np.diff(path.times)
    steps_exp = _block_expm_antiherm(xi, dt, spectrum)
    n = spectrum.n
    gauges = np.empty((path.steps + 1, n, n), dtype=complex)
    G = np.eye(n, dtype=complex)
    gauges[0] = G
    for i in range(path.steps):
        G = polar_project(steps_exp[i] @ G, spectrum)
        gauges[i + 1] = G

    frames = path.unitaries @ B[None] @ gauges
    P = spec.P
    drift = np.linalg.norm(dagger(frames) @ frames - P[None], axis=(1, 2)).max()
    if drift > 100 * tol.tol_fiber:
        raise FiberDrift(
            f"horizontal lift left the fiber: max |Psi^H Psi - P| = {drift:.3e} "
            f"(limit {100 * tol.tol_fiber:.1e}); refine the time grid"
        )
    partial = TransportResult(
        path.times, frames, gauges, frame, TransportDiagnostics(float(drift), float("nan"), path.steps, compat)
    )
    resid = horizontality_residual(partial, path, spec)
    return TransportResult(
        path.times,
        frames,
        gauges,
        frame,
        TransportDiagnostics(float(drift), resid, path.steps, compat),
    )


def horizontality_residual(
    result: TransportResult, path: UnitaryPath | None = None, spec: SpectralMatrices | None = None
) -> float:
    """Largest ``|A(dPsi_par/dt)|`` over the grid, derivative by finite differences."""
    frames = result.frames
    if len(frames) < 2:
        return 0.0
    if spec is None:
        spec = block_projectors(result.initial.spectrum)
    t = result.times
    if len(frames) >= 3:
        dF = np.gradient(frames, t, axis=0, edge_order=2)
    else:
        dF = np.repeat((frames[1:] - frames[:-1]) / (t[1] - t[0]), 2, axis=0)
    mask = block_mask(result.initial.spectrum)
    A = dagger(frames) @ dF
    xi = np.where(mask[None], A, 0) * np.diag(spec.P_inv)[None, None, :]
    return float(np.linalg.norm(xi, axis=(1, 2)).max())
