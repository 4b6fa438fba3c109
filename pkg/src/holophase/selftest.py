"""Oracle cross-checks runnable from the command line (``holophase selftest``)."""

from __future__ import annotations

import math

import numpy as np

from . import oracles
from .connection import horizontal_lift
from .evolution import builtin_neutron_I, builtin_neutron_II
from .phases import (
    angle_distance,
    geometric_phase,
    higher_order_phase,
    newton_coefficients,
    overlap_matrix,
    sjoqvist_phase,
)
from .spectral import Spectrum, standard_purification


def _neutron_checks():
    spec = Spectrum.from_values([0.7, 0.3])
    psi0 = standard_purification(spec, np.eye(2))
    M = overlap_matrix(horizontal_lift(builtin_neutron_I(1.0, math.pi / 3, math.pi), psi0))
    want = oracles.closed_form_neutron_I(0.7, 0.3, math.pi / 3)["swapped"]
    yield "neutron_I closed form", abs(complex(np.trace(M)) - want), 1e-6
    M = overlap_matrix(horizontal_lift(builtin_neutron_II(1.0, math.pi / 2), psi0))
    z2, _ = higher_order_phase(M, 2)
    yield "neutron_II second order", abs(z2 + 2 * 0.21), 1e-6


def _random_checks(cfg: oracles.OracleConfig):
    rng = cfg.rng()
    worst_brute = worst_sjo = worst_newton = 0.0
    for _ in range(cfg.trial_count):
        N = int(rng.integers(2, 6))
        n = int(rng.integers(1, N + 1))
        spec = oracles.random_spectrum(rng, n)
        psi0 = oracles.random_frame(rng, N, spec)
        path = oracles.driven_path(oracles.random_hermitian(rng, N), oracles.random_hermitian(rng, N), 1.0, 2000)
        lift = horizontal_lift(path, psi0)
        ref = oracles.brute_transport(path, psi0, cfg.fine_steps)
        worst_brute = max(worst_brute, float(np.abs(lift.frames[-1] - ref.frames[-1]).max()))
        zeta, gamma = geometric_phase(overlap_matrix(lift))
        if gamma is not None and abs(zeta) > 1e-6:
            worst_sjo = max(worst_sjo, angle_distance(gamma, sjoqvist_phase(ref)))
        M = overlap_matrix(lift)
        worst_newton = max(worst_newton, float(np.abs(newton_coefficients(M) - oracles.charpoly_s(M)).max()))
    yield "brute transport agreement", worst_brute, 1e-5
    yield "sjoqvist reduction", worst_sjo, 1e-6
    yield "newton identities", worst_newton, 1e-8


def run_selftest(trials: int = 5, fine_steps: int = 20_000, out=print) -> bool:
    cfg = oracles.OracleConfig.from_env(trial_count=trials, fine_steps=fine_steps)
    out(f"seed {cfg.seed}, {cfg.trial_count} random trials")
    ok = True
    checks = list(_neutron_checks()) + list(_random_checks(cfg))
    for name, err, limit in checks:
        passed = err < limit
        ok &= passed
        out(f"{'PASS' if passed else 'FAIL'}  {name}: {err:.2e} (limit {limit:.0e})")
    return ok
