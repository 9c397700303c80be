"""Energy functional, its L^2 gradient, and the algebraic identities.

The functional splits as total = quadratic - quartic with

    quadratic = (1/2) int <D psi, psi> - lambda |psi|^2
    quartic   = (1/4) int (G * |psi|^2) |psi|^2

and L^2 gradient D psi - lambda psi - (G * |psi|^2) psi, which vanishes on
critical points.  Degree counting gives the identity

    2 J - <grad J, psi> = 2 * quartic

exactly, so its defect on any field is pure floating-point noise.  Dual
norms of gradients are measured with the multiplier |D - lambda|^(-1/2).
"""

from __future__ import annotations

from dataclasses import dataclass

from .grid import (
    ScalarDensity,
    SpinorField,
    l2_inner,
    l2_norm,
    pointwise_density,
    scalar_inner,
)
from .spectral import GreenMode, dirac_apply, green_convolve, sobolev_seminorm

import numpy as np


@dataclass(frozen=True)
class EnergyBreakdown:
    quadratic: float
    quartic: float

    @property
    def total(self) -> float:
        return self.quadratic - self.quartic


def hartree_potential(psi: SpinorField, mode: GreenMode) -> ScalarDensity:
    """G * |psi|^2, the nonlocal coupling field."""
    return green_convolve(pointwise_density(psi), mode)


def energy(psi: SpinorField, lam: float, mode: GreenMode) -> EnergyBreakdown:
    rho = pointwise_density(psi)
    quad = 0.5 * (l2_inner(dirac_apply(psi), psi) - lam * l2_inner(psi, psi))
    quart = 0.25 * scalar_inner(green_convolve(rho, mode), rho)
    return EnergyBreakdown(quadratic=quad, quartic=quart)


def gradient(psi: SpinorField, lam: float, mode: GreenMode) -> SpinorField:
    """L^2 gradient D psi - lambda psi - (G*|psi|^2) psi."""
    pot = hartree_potential(psi, mode)
    vals = dirac_apply(psi).values - lam * psi.values - pot.values[..., None] * psi.values
    return SpinorField(psi.grid, vals)


def energy_and_gradient(
    psi: SpinorField, lam: float, mode: GreenMode
) -> tuple[EnergyBreakdown, SpinorField]:
    """Both at once, sharing the Dirac apply and Green convolution."""
    rho = pointwise_density(psi)
    dpsi = dirac_apply(psi)
    pot = green_convolve(rho, mode)
    quad = 0.5 * (l2_inner(dpsi, psi) - lam * l2_inner(psi, psi))
    quart = 0.25 * scalar_inner(pot, rho)
    grad = SpinorField(
        psi.grid, dpsi.values - lam * psi.values - pot.values[..., None] * psi.values
    )
    return EnergyBreakdown(quadratic=quad, quartic=quart), grad


def identity_defect(
    psi: SpinorField, lam: float, mode: GreenMode = GreenMode.PERIODIC_MEAN_ZERO
) -> float:
    """|2 J - <grad J, psi> - 2 quartic|; an exact algebraic identity."""
    eb, grad = energy_and_gradient(psi, lam, mode)
    return abs(2.0 * eb.total - l2_inner(grad, psi) - 2.0 * eb.quartic)


def dual_norm(r: SpinorField, lam: float) -> float:
    """Norm of r in the dual of the lambda-adapted H^(1/2) metric."""
    return sobolev_seminorm(r, lam, -0.5)


def equation_residual(
    psi: SpinorField,
    lam: float,
    mode: GreenMode,
    window_radius: float | None = None,
) -> float:
    """Relative L^2 residual of the Euler-Lagrange equation.

    Measured over |x| <= window_radius (default L/8): fields sampled from
    noncompact closed forms carry box-face artifacts that would otherwise
    dominate the norm without saying anything about the equation.
    """
    grid = psi.grid
    if window_radius is None:
        window_radius = grid.L / 8.0
    g = gradient(psi, lam, mode)
    win = grid.radius_sq <= window_radius**2
    num = np.sum(np.abs(g.values[win]) ** 2)
    den = np.sum(np.abs(psi.values[win]) ** 2)
    if den == 0:
        return 0.0
    return float(np.sqrt(num / den))


def eigen_identity_residual(psi: SpinorField, target: SpinorField, window_radius: float | None = None) -> float:
    """Relative windowed L^2 distance between D psi and a target field."""
    grid = psi.grid
    if window_radius is None:
        window_radius = grid.L / 8.0
    d = dirac_apply(psi)
    win = grid.radius_sq <= window_radius**2
    num = np.sum(np.abs(d.values[win] - target.values[win]) ** 2)
    den = np.sum(np.abs(target.values[win]) ** 2)
    if den == 0:
        return float(np.sqrt(num))
    return float(np.sqrt(num / den))
