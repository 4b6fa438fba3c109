"""Geometric phase factors from the endpoint overlap of a horizontal lift.

Everything here is a function of the ``n x n`` overlap matrix
``M = Psi_0^H Pi[rho] Psi_0`` (or, for the eigenket-based quantities, of
the lift itself). Block and eigenket indices in the public API are
1-based, as in the usual physics notation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .connection import TransportResult
from .errors import (
    DegenerateSpectrum,
    IndexOutOfRange,
    InternalInconsistency,
    NotCyclic,
)
from .spectral import (
    PurificationFrame,
    SpectralMatrices,
    Spectrum,
    block_mask,
    block_projectors,
    dagger,
    fro,
)
from .tolerances import DEFAULT


def wrap_angle(x: float) -> float:
    """Map an angle to ``(-pi, pi]``."""
    y = math.remainder(float(x), 2 * math.pi)
    return math.pi if y <= -math.pi else y


def arg(z: complex) -> float:
    return wrap_angle(math.atan2(z.imag, z.real))


def angle_distance(a: float, b: float) -> float:
    return abs(math.remainder(a - b, 2 * math.pi))


def overlap_matrix(transport: TransportResult, Psi0: PurificationFrame | None = None) -> np.ndarray:
    psi0 = transport.initial if Psi0 is None else Psi0
    m0 = psi0.matrix if isinstance(psi0, PurificationFrame) else np.asarray(psi0)
    return dagger(m0) @ transport.frames[-1]


def geometric_phase(M, tol_phase: float = DEFAULT.tol_phase) -> tuple[complex, Optional[float]]:
    """``(zeta, gamma)`` with ``zeta = Tr M``; ``gamma`` is None when ``|zeta| <= tol_phase``."""
    zeta = complex(np.trace(M))
    return zeta, (arg(zeta) if abs(zeta) > tol_phase else None)


def closed_curve_holonomy(M, spec: SpectralMatrices, spectrum: Spectrum, tol_block: float = DEFAULT.tol_block) -> np.ndarray:
    """Holonomy ``P^-1 M`` of a closed curve, checked to lie in the gauge group."""
    hol = spec.P_inv @ np.asarray(M)
    off = fro(np.where(block_mask(spectrum), 0, hol))
    if off > tol_block:
        raise NotCyclic(f"holonomy has off-block weight {off:.3e}; the curve is not closed")
    err = fro(dagger(hol) @ hol - np.eye(spectrum.n))
    if err > tol_block:
        raise NotCyclic(f"holonomy is not unitary (|H^H H - 1| = {err:.3e}); the curve is not closed")
    return hol


def holonomy_phase(hol: np.ndarray, spec: SpectralMatrices) -> complex:
    """``Tr(P Hol)``, the spectral-weighted trace of a holonomy."""
    return complex(np.trace(spec.P @ hol))


def _check_blocks(J: Sequence[int], l: int) -> None:
    if len(J) == 0:
        raise IndexOutOfRange("block sequence must be nonempty")
    bad = [j for j in J if not 1 <= j <= l]
    if bad:
        raise IndexOutOfRange(f"block indices {bad} outside 1..{l}")


def phase_factor_J(M, J: Sequence[int], spec: SpectralMatrices) -> complex:
    """Cyclic trace ``Tr prod_k E_{j_k} M E_{j_{k+1}}`` with ``j_{d+1} = j_1``."""
    _check_blocks(J, len(spec.E))
    M = np.asarray(M)
    E = spec.E
    prod = np.eye(M.shape[0], dtype=complex)
    d = len(J)
    for k in range(d):
        prod = prod @ E[J[k] - 1] @ M @ E[J[(k + 1) % d] - 1]
    return complex(np.trace(prod))


def higher_order_phase(M, d: int, tol_phase: float = DEFAULT.tol_phase) -> tuple[complex, Optional[float]]:
    if d < 1:
        raise ValueError("order must be >= 1")
    zeta = complex(np.trace(np.linalg.matrix_power(np.asarray(M), d)))
    return zeta, (arg(zeta) if abs(zeta) > tol_phase else None)


def power_sums(M, upto: int | None = None) -> np.ndarray:
    """``[Tr M, Tr M^2, ..., Tr M^upto]``."""
    M = np.asarray(M, dtype=complex)
    upto = M.shape[0] if upto is None else upto
    out = np.empty(upto, dtype=complex)
    Mk = np.eye(M.shape[0], dtype=complex)
    for k in range(upto):
        Mk = Mk @ M
        out[k] = np.trace(Mk)
    return out


def newton_coefficients(M) -> np.ndarray:
    """``s_0..s_n`` with ``det(lambda - M) = sum_k (-1)^k s_k lambda^(n-k)``.

    Built from the power sums by Newton's recursion.
    """
    n = np.asarray(M).shape[0]
    zeta = power_sums(M, n)
    s = np.zeros(n + 1, dtype=complex)
    s[0] = 1.0
    for k in range(1, n + 1):
        acc = 0j
        for j in range(1, k + 1):
            acc += (-1) ** (j - 1) * s[k - j] * zeta[j - 1]
        s[k] = acc / k
    return s


def first_defined_order(M, tol_phase: float = DEFAULT.tol_phase) -> Optional[int]:
    """Smallest ``d <= n`` with ``|Tr M^d| > tol_phase``, or None.

    None is only returned when ``M`` is numerically nilpotent; otherwise the
    characteristic polynomial guarantees some nonzero power sum.
    """
    M = np.asarray(M)
    n = M.shape[0]
    for d, z in enumerate(power_sums(M, n), start=1):
        if abs(z) > tol_phase:
            return d
    top = np.abs(np.linalg.eigvals(M)).max()
    if top > max(tol_phase, 1e-6):
        raise InternalInconsistency(
            f"overlap has eigenvalue of modulus {top:.3e} but all power sums up to order {n} vanish"
        )
    return None


def _kets(frame: np.ndarray, p: np.ndarray) -> np.ndarray:
    return frame / np.sqrt(p)[None, :]


def off_diagonal_factors(lift: TransportResult, indices: Sequence[int]) -> complex:
    """Cyclic product ``prod_j <k_j(0)|k_{j+1}(tau)>`` of endpoint eigenkets."""
    p = np.asarray(lift.initial.spectrum.eigenvalues)
    n = p.size
    if len(indices) == 0 or any(not 1 <= k <= n for k in indices):
        raise IndexOutOfRange(f"eigenket indices {list(indices)} outside 1..{n}")
    K0 = _kets(lift.frames[0], p)
    K1 = _kets(lift.frames[-1], p)
    overlaps = dagger(K0) @ K1
    d = len(indices)
    out = 1.0 + 0j
    for j in range(d):
        out *= overlaps[indices[j] - 1, indices[(j + 1) % d] - 1]
    return complex(out)


def offdiagonal_expansion(lift: TransportResult, J: Sequence[int]) -> complex:
    """Spectrally weighted sum of off-diagonal factors over the blocks named by ``J``."""
    spectrum = lift.initial.spectrum
    _check_blocks(J, spectrum.l)
    p = spectrum.eigenvalues
    ranges = [range(spectrum.offsets[j - 1] + 1, spectrum.offsets[j] + 1) for j in J]
    total = 0j
    for ks in itertools.product(*ranges):
        w = math.prod(p[k - 1] for k in ks)
        total += w * off_diagonal_factors(lift, ks)
    return total


def sjoqvist_phase(lift: TransportResult, spectrum: Spectrum | None = None) -> float:
    """``arg sum_k p_k <k(0)|k(tau)>`` for a nondegenerate parallel-transported state."""
    spectrum = lift.initial.spectrum if spectrum is None else spectrum
    if spectrum.is_degenerate:
        raise DegenerateSpectrum("eigenket phase needs a nondegenerate spectrum")
    p = np.asarray(spectrum.eigenvalues)
    K0 = _kets(lift.frames[0], p)
    K1 = _kets(lift.frames[-1], p)
    z = np.sum(p * np.einsum("ik,ik->k", K0.conj(), K1))
    return arg(complex(z))


def pancharatnam_phase(psi0: np.ndarray, psi1: np.ndarray) -> float:
    return arg(complex(np.vdot(np.ravel(psi0), np.ravel(psi1))))


@dataclass
class PhaseReport:
    zeta_geo: complex
    gamma_geo: Optional[float]
    orders: list[tuple[int, complex, Optional[float]]]
    s_coeffs: np.ndarray
    first_defined_order: Optional[int]
    per_J: Optional[list[tuple[tuple[int, ...], complex]]] = None
    holonomy: Optional[np.ndarray] = None
    overlap: Optional[np.ndarray] = field(default=None, repr=False)


def enumerate_sequences(l: int, d: int):
    return itertools.product(range(1, l + 1), repeat=d)


def phase_report(
    transport: TransportResult,
    max_order: int | None = None,
    per_J: bool = False,
    holonomy: bool = False,
    tol=DEFAULT,
) -> PhaseReport:
    spectrum = transport.initial.spectrum
    spec = block_projectors(spectrum)
    M = overlap_matrix(transport)
    zeta, gamma = geometric_phase(M, tol.tol_phase)
    n = spectrum.n
    max_order = n if max_order is None else max_order
    orders = []
    for d in range(1, max_order + 1):
        z, g = higher_order_phase(M, d, tol.tol_phase)
        orders.append((d, z, g))
    table = None
    if per_J:
        table = []
        for d in range(1, max_order + 1):
            if spectrum.l ** d > 10_000:
                break
            table.extend((J, phase_factor_J(M, J, spec)) for J in enumerate_sequences(spectrum.l, d))
    hol = closed_curve_holonomy(M, spec, spectrum, tol.tol_block) if holonomy else None
    return PhaseReport(
        zeta_geo=zeta,
        gamma_geo=gamma,
        orders=orders,
        s_coeffs=newton_coefficients(M),
        first_defined_order=first_defined_order(M, tol.tol_phase),
        per_J=table,
        holonomy=hol,
        overlap=M,
    )
