"""Numerical thresholds used across the package.

Every check compares a Frobenius norm (or an absolute scalar) against one of
these values. All of them can be overridden per run.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    tol_rank: float = 1e-12
    tol_degeneracy: float = 1e-9
    tol_trace: float = 1e-9
    tol_herm: float = 1e-10
    tol_psd: float = 1e-10
    tol_fiber: float = 1e-10
    tol_unitary: float = 1e-10
    tol_phase: float = 1e-9
    tol_block: float = 1e-7
    tol_cyclic: float = 1e-8

    def updated(self, overrides: dict | None) -> "Tolerances":
        if not overrides:
            return self
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise KeyError(f"unknown tolerance(s): {', '.join(sorted(unknown))}")
        return replace(self, **{k: float(v) for k, v in overrides.items()})

    def as_dict(self) -> dict:
        return asdict(self)


DEFAULT = Tolerances()
