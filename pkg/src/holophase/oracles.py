"""Independent reference computations used to cross-check the production path.

Nothing here calls into :mod:`holophase.connection`'s integrator: the brute
transport fixes the gauge from discrete frame overlaps instead of the
connection formula, phase factors are enumerated block by block, and the
built-in models have closed forms.
"""

from __future__ import annotations

import cmath
import itertools
import math
import os
from dataclasses import dataclass

import numpy as np
from scipy import integrate, linalg

from .connection import TransportDiagnostics, TransportResult
from .errors import TooManySequences
from .evolution import UnitaryPath
from .spectral import PurificationFrame, Spectrum, dagger, standard_purification

DEFAULT_SEED = 20100_1009


@dataclass(frozen=True)
class OracleConfig:
    fine_steps: int = 100_000
    seed: int = DEFAULT_SEED
    trial_count: int = 20

    @classmethod
    def from_env(cls, **kw) -> "OracleConfig":
        env = os.environ.get("HOLOPHASE_SEED")
        if env is not None:
            kw.setdefault("seed", int(env))
        return cls(**kw)

    def rng(self, stream: int = 0) -> np.random.Generator:
        return np.random.default_rng([self.seed, stream])


def _fine_unitaries(path: UnitaryPath, fine_steps: int) -> tuple[np.ndarray, np.ndarray]:
    t = np.linspace(0.0, path.t_final, fine_steps + 1)
    if path.unitary_fn is not None:
        return t, np.array([path.unitary_fn(s) for s in t])
    # geodesic interpolation between samples
    idx = np.clip(np.searchsorted(path.times, t, side="right") - 1, 0, path.steps - 1)
    logs = [linalg.logm(dagger(path.unitaries[i]) @ path.unitaries[i + 1]) for i in range(path.steps)]
    U = np.empty((t.size, path.dim, path.dim), dtype=complex)
    for k, (s, i) in enumerate(zip(t, idx)):
        frac = (s - path.times[i]) / (path.times[i + 1] - path.times[i])
        U[k] = path.unitaries[i] @ linalg.expm(frac * logs[i])
    return t, U


def _blockwise_unitary_factor(C: np.ndarray, spectrum: Spectrum) -> np.ndarray:
    """Stack of block-diagonal unitary polar factors of the diagonal blocks of ``C``."""
    out = np.zeros_like(C)
    for s in spectrum.block_slices():
        W, _, Vh = np.linalg.svd(C[:, s, s])
        out[:, s, s] = W @ Vh
    return out


def brute_transport(path: UnitaryPath, Psi0: PurificationFrame, fine_steps: int = 100_000) -> TransportResult:
    """Discrete parallel transport on a fine grid.

    Each step picks the gauge that makes the diagonal blocks of the overlap
    between consecutive frames Hermitian positive, which is the discrete
    form of horizontality.
    """
    spectrum = Psi0.spectrum
    t, U = _fine_unitaries(path, fine_steps)
    ref = U @ (dagger(path.unitaries[0]) @ Psi0.matrix)[None]
    C = dagger(ref[:-1]) @ ref[1:]
    step_gauge = dagger(_blockwise_unitary_factor(C, spectrum))
    n = spectrum.n
    gauges = np.empty((t.size, n, n), dtype=complex)
    G = np.eye(n, dtype=complex)
    gauges[0] = G
    for k in range(fine_steps):
        G = step_gauge[k] @ G
        gauges[k + 1] = G
    frames = ref @ gauges
    P = np.diag(spectrum.eigenvalues)
    drift = float(np.linalg.norm(dagger(frames) @ frames - P, axis=(1, 2)).max())
    return TransportResult(t, frames, gauges, Psi0, TransportDiagnostics(drift, float("nan"), fine_steps))


def closed_form_neutron_I(p1: float, p2: float, theta: float) -> dict[str, complex]:
    """Both pairings of the closed-form phase factor at ``t = pi/omega``."""
    c = math.cos(theta)
    return {
        "paper": p1 * cmath.exp(1j * math.pi * (1 + c)) + p2 * cmath.exp(1j * math.pi * (1 - c)),
        "swapped": p1 * cmath.exp(1j * math.pi * (1 - c)) + p2 * cmath.exp(1j * math.pi * (1 + c)),
    }


def closed_form_neutron_I_overlap(p1: float, p2: float, theta: float) -> np.ndarray:
    """Overlap matrix after one period, from the constant connection value."""
    c = math.cos(theta)
    G = np.diag([cmath.exp(-1j * math.pi * c), cmath.exp(1j * math.pi * c)])
    return -np.diag([p1, p2]) @ G


def closed_form_neutron_II_overlap(p1: float, p2: float) -> np.ndarray:
    """Overlap at ``t = pi/(2 omega)``: the lift is already horizontal."""
    return math.sqrt(p1 * p2) * np.array([[0, -1], [1, 0]], dtype=complex)


def enumerate_zeta_J(M, d: int, spectrum: Spectrum, limit: int = 10_000) -> list[tuple[tuple[int, ...], complex]]:
    l = spectrum.l
    if l ** d > limit:
        raise TooManySequences(f"{l}^{d} sequences exceed the limit of {limit}")
    M = np.asarray(M)
    blocks = spectrum.block_slices()
    table = []
    for J in itertools.product(range(1, l + 1), repeat=d):
        prod = M[blocks[J[0] - 1], blocks[J[1 % d] - 1]]
        for k in range(1, d):
            prod = prod @ M[blocks[J[k] - 1], blocks[J[(k + 1) % d] - 1]]
        table.append((J, complex(np.trace(prod))))
    return table


def eigen_power_sum(M, d: int) -> complex:
    return complex(np.sum(np.linalg.eigvals(np.asarray(M)) ** d))


def charpoly_s(M) -> np.ndarray:
    """``s_k`` read off the characteristic polynomial computed from the eigenvalues."""
    c = np.poly(np.asarray(M))
    return c * (-1.0) ** np.arange(c.size)


def charpoly_direct(M, lam: complex) -> complex:
    M = np.asarray(M)
    return complex(np.linalg.det(lam * np.eye(M.shape[0]) - M))


def pure_state_parallel_phase(path: UnitaryPath, psi0) -> float:
    """Phase of the parallel-transported ket by quadrature of the dynamical phase."""
    psi0 = np.ravel(np.asarray(psi0, dtype=complex))
    b = dagger(path.unitaries[0]) @ psi0

    def rate(t):
        return float(np.imag(np.vdot(b, path.logderiv_fn(t) @ b)))

    acc, _ = integrate.quad(rate, 0.0, path.t_final, epsabs=1e-13, epsrel=1e-13, limit=200)
    z = np.vdot(psi0, path.unitaries[-1] @ b) * cmath.exp(-1j * acc)
    return math.atan2(z.imag, z.real)


# random instances --------------------------------------------------------

def random_unitary(rng: np.random.Generator, N: int) -> np.ndarray:
    Z = (rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))) / math.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))[None, :]


def random_hermitian(rng: np.random.Generator, N: int) -> np.ndarray:
    A = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
    return (A + dagger(A)) / 2


def random_spectrum(rng: np.random.Generator, n: int, degenerate: bool = False) -> Spectrum:
    """Random probabilities; with ``degenerate`` two of them are made exactly equal."""
    while True:
        w = rng.uniform(0.2, 1.0, size=n)
        if degenerate and n >= 2:
            i = rng.integers(0, n - 1)
            w = np.sort(w)[::-1]
            w[i + 1] = w[i]
        w = np.sort(w / w.sum())[::-1]
        if degenerate and n >= 2:
            # restore exact equality lost in the normalization
            _, inv = np.unique(np.round(w, 12), return_inverse=True)
            for g in np.unique(inv):
                w[inv == g] = w[inv == g].mean()
        gaps = -np.diff(w)
        if np.all((gaps == 0) | (gaps > 1e-3)) and (degenerate or np.all(gaps > 1e-3)):
            w /= w.sum()
            return Spectrum.from_values(w)


def random_frame(rng: np.random.Generator, N: int, spectrum: Spectrum) -> PurificationFrame:
    V = random_unitary(rng, N)[:, : spectrum.n]
    return standard_purification(spectrum, V)


def random_cyclic_hamiltonian(rng: np.random.Generator, N: int, max_level: int = 3) -> np.ndarray:
    """Hamiltonian with integer spectrum, so that ``U(2 pi) = 1``."""
    levels = rng.integers(-max_level, max_level + 1, size=N).astype(float)
    V = random_unitary(rng, N)
    return (V * levels[None, :]) @ dagger(V)


def driven_path(H0, H1, tau: float, steps: int) -> UnitaryPath:
    """``U(t) = exp(-i H1 t) exp(-i H0 t)``; its generator is time dependent."""
    e0, W0 = np.linalg.eigh(H0)
    e1, W1 = np.linalg.eigh(H1)

    def expH(e, W, t):
        return (W * np.exp(-1j * e * t)[None, :]) @ dagger(W)

    def ufn(t):
        return expH(e1, W1, t) @ expH(e0, W0, t)

    def dfn(t):
        B = expH(e0, W0, t)
        D = -1j * (dagger(B) @ H1 @ B + H0)
        return (D - dagger(D)) / 2

    times = np.linspace(0.0, tau, steps + 1)
    return UnitaryPath(
        times,
        np.array([ufn(s) for s in times]),
        np.array([dfn(s) for s in times]),
        logderiv_fn=dfn,
        unitary_fn=ufn,
    )
