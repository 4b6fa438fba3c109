"""Density operators, spectra and the standard purification.

A rank-``n`` density operator on ``C^N`` is represented by its nonincreasing
positive spectrum ``sigma`` together with an ``N x n`` eigenframe. The
standard purification is ``Psi = V @ sqrt(P)`` where ``P = diag(sigma)``;
every frame ``Psi`` with ``Psi^H Psi = P`` projects to ``Psi Psi^H``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AmbiguousDegeneracy,
    FrameNotOrthonormal,
    NotADensityOperator,
)
from .tolerances import DEFAULT, Tolerances


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().swapaxes(-1, -2)


def fro(a) -> float:
    return float(np.linalg.norm(a))


@dataclass(frozen=True)
class Spectrum:
    """Nonincreasing positive eigenvalues grouped into degeneracy blocks."""

    eigenvalues: tuple[float, ...]
    multiplicities: tuple[int, ...]

    def __post_init__(self):
        p = np.asarray(self.eigenvalues, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise NotADensityOperator("spectrum must be a nonempty list", "spectrum")
        if np.any(p <= 0):
            raise NotADensityOperator("spectrum entries must be positive", "spectrum")
        if np.any(np.diff(p) > 0):
            raise NotADensityOperator("spectrum must be nonincreasing", "spectrum")
        if sum(self.multiplicities) != p.size or min(self.multiplicities) < 1:
            raise NotADensityOperator("multiplicities must partition the spectrum", "spectrum")

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    @property
    def l(self) -> int:  # noqa: E743
        return len(self.multiplicities)

    @property
    def offsets(self) -> tuple[int, ...]:
        """Start index of every block, plus ``n`` as a sentinel."""
        return tuple(np.concatenate(([0], np.cumsum(self.multiplicities))).astype(int))

    def block_slices(self) -> list[slice]:
        o = self.offsets
        return [slice(o[k], o[k + 1]) for k in range(self.l)]

    def block_of(self) -> np.ndarray:
        """Block label (0-based) of every eigenvalue slot."""
        return np.repeat(np.arange(self.l), self.multiplicities)

    @property
    def is_degenerate(self) -> bool:
        return self.l < self.n

    @classmethod
    def from_values(
        cls,
        values,
        tol: Tolerances = DEFAULT,
        check_trace: bool = True,
    ) -> "Spectrum":
        """Group an already sorted list of positive probabilities into blocks."""
        p = np.asarray(values, dtype=float)
        if check_trace and abs(p.sum() - 1.0) > tol.tol_trace:
            raise NotADensityOperator(
                f"spectrum sums to {p.sum():.12g}, not 1 (tol_trace={tol.tol_trace:g})",
                "tol_trace",
            )
        if np.any(p <= 0):
            raise NotADensityOperator("spectrum entries must be positive", "spectrum")
        if np.any(np.diff(p) > 0):
            raise NotADensityOperator("spectrum must be nonincreasing", "spectrum")
        mult = _group(p, tol.tol_degeneracy)
        # blocks carry a single exact value so that P commutes with U(sigma)
        start = 0
        for m in mult:
            p[start:start + m] = p[start:start + m].mean()
            start += m
        return cls(tuple(float(x) for x in p), tuple(mult))


def _group(p: np.ndarray, tol_deg: float) -> list[int]:
    gaps = -np.diff(p)
    ambiguous = (gaps > tol_deg / 2) & (gaps < 2 * tol_deg)
    if np.any(ambiguous):
        g = gaps[ambiguous][0]
        raise AmbiguousDegeneracy(
            f"eigenvalue gap {g:.3e} is too close to tol_degeneracy={tol_deg:g}"
        )
    mult = [1]
    block_start = 0
    for i, g in enumerate(gaps, start=1):
        if g <= tol_deg / 2:
            mult[-1] += 1
            if p[block_start] - p[i] > tol_deg:
                raise AmbiguousDegeneracy(
                    "eigenvalue cluster wider than tol_degeneracy", "tol_degeneracy"
                )
        else:
            mult.append(1)
            block_start = i
    return mult


@dataclass(frozen=True)
class SpectralMatrices:
    P: np.ndarray
    P_inv: np.ndarray
    E: tuple[np.ndarray, ...]


@dataclass(frozen=True, eq=False)
class DensityOperator:
    matrix: np.ndarray
    tol: Tolerances = field(default=DEFAULT, repr=False)

    def __post_init__(self):
        rho = np.asarray(self.matrix, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise NotADensityOperator("density operator must be square", "shape")
        tol = self.tol
        if fro(rho - dagger(rho)) > tol.tol_herm:
            raise NotADensityOperator("density operator is not Hermitian", "tol_herm")
        tr = np.trace(rho).real
        if abs(tr - 1.0) > tol.tol_trace:
            raise NotADensityOperator(
                f"trace {tr:.12g} differs from 1 (tol_trace={tol.tol_trace:g})", "tol_trace"
            )
        wmin = np.linalg.eigvalsh((rho + dagger(rho)) / 2).min()
        if wmin < -tol.tol_psd:
            raise NotADensityOperator(
                f"negative eigenvalue {wmin:.3e} (tol_psd={tol.tol_psd:g})", "tol_psd"
            )
        object.__setattr__(self, "matrix", rho)

    @property
    def N(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class PurificationFrame:
    """An ``N x n`` frame ``Psi`` with ``Psi^H Psi = P(sigma)``."""

    matrix: np.ndarray
    spectrum: Spectrum

    @property
    def density(self) -> np.ndarray:
        return self.matrix @ dagger(self.matrix)

    def fiber_error(self) -> float:
        P = np.diag(self.spectrum.eigenvalues)
        return fro(dagger(self.matrix) @ self.matrix - P)

    def gauge(self, V: np.ndarray) -> "PurificationFrame":
        """Right action of the gauge group."""
        return PurificationFrame(self.matrix @ V, self.spectrum)


def _canonical_block_basis(vecs: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of span(vecs).

    Gram-Schmidt on the projections of the standard basis vectors, taken in
    order, so the result depends only on the subspace.
    """
    N, m = vecs.shape
    if m == 1:
        return _phase_fix(vecs)
    proj = vecs @ dagger(vecs)
    basis = []
    for j in range(N):
        v = proj[:, j].copy()
        for b in basis:
            v -= b * (b.conj() @ v)
        nv = np.linalg.norm(v)
        if nv > 1e-6:
            basis.append(v / nv)
        if len(basis) == m:
            break
    B = np.column_stack(basis)
    # one reorthonormalization pass against round-off
    B, _ = np.linalg.qr(B)
    B = _phase_fix(B)
    first = np.array([np.abs(c[np.flatnonzero(np.abs(c) > 1e-12)[0]]) for c in B.T])
    lead = np.array([np.flatnonzero(np.abs(c) > 1e-12)[0] for c in B.T])
    order = np.lexsort((-first, lead))
    return B[:, order]


def _phase_fix(B: np.ndarray) -> np.ndarray:
    B = B.copy()
    for j in range(B.shape[1]):
        k = np.flatnonzero(np.abs(B[:, j]) > 1e-12)[0]
        B[:, j] *= np.abs(B[k, j]) / B[k, j]
    return B


def spectrum_of(rho, tol: Tolerances = DEFAULT) -> tuple[Spectrum, np.ndarray]:
    """Spectrum and matching orthonormal eigenframe of a density operator.

    Eigenvalues below ``tol.tol_rank`` are discarded. Within a degeneracy
    block the eigenvectors are replaced by a canonical basis of the block
    eigenspace, so repeated calls give identical frames.
    """
    if not isinstance(rho, DensityOperator):
        rho = DensityOperator(np.asarray(rho, dtype=complex), tol)
    h = rho.matrix
    w, V = np.linalg.eigh((h + dagger(h)) / 2)
    order = np.argsort(-w, kind="stable")
    w, V = w[order], V[:, order]
    keep = w > tol.tol_rank
    w, V = w[keep], V[:, keep]
    if w.size == 0:
        raise NotADensityOperator("density operator has no eigenvalue above tol_rank", "tol_rank")
    spec = Spectrum.from_values(w, tol, check_trace=False)
    frame = np.empty_like(V)
    for s in spec.block_slices():
        frame[:, s] = _canonical_block_basis(V[:, s])
    return spec, frame


def standard_purification(
    spectrum: Spectrum, eigenframe, tol: Tolerances = DEFAULT
) -> PurificationFrame:
    V = np.asarray(eigenframe, dtype=complex)
    if V.ndim == 1:
        V = V[:, None]
    if V.shape[1] != spectrum.n:
        raise FrameNotOrthonormal(
            f"eigenframe has {V.shape[1]} columns but the spectrum has rank {spectrum.n}",
            "shape",
        )
    if fro(dagger(V) @ V - np.eye(spectrum.n)) > max(tol.tol_fiber, 1e-10):
        raise FrameNotOrthonormal("eigenframe columns are not orthonormal")
    sq = np.sqrt(np.asarray(spectrum.eigenvalues))
    return PurificationFrame(V * sq[None, :], spectrum)


def block_projectors(spectrum: Spectrum) -> SpectralMatrices:
    n = spectrum.n
    p = np.asarray(spectrum.eigenvalues)
    E = []
    for s in spectrum.block_slices():
        e = np.zeros((n, n))
        e[s, s] = np.eye(s.stop - s.start)
        E.append(e)
    return SpectralMatrices(P=np.diag(p), P_inv=np.diag(1.0 / p), E=tuple(E))


def block_mask(spectrum: Spectrum) -> np.ndarray:
    """Boolean ``n x n`` mask of the diagonal blocks."""
    b = spectrum.block_of()
    return b[:, None] == b[None, :]


def random_gauge(spectrum: Spectrum, rng: np.random.Generator) -> np.ndarray:
    """Haar-random block-diagonal unitary commuting with ``P(sigma)``."""
    from scipy.stats import unitary_group

    n = spectrum.n
    V = np.zeros((n, n), dtype=complex)
    for s in spectrum.block_slices():
        m = s.stop - s.start
        if m == 1:
            V[s, s] = np.exp(2j * np.pi * rng.random())
        else:
            V[s, s] = unitary_group.rvs(m, random_state=rng)
    return V
