"""Fourier-multiplier operators: Dirac, fractional Laplacian, Green convolution.

On the periodic box every operator is diagonal per frequency.  The Dirac
operator acts through its Hermitian symbol ``A(xi) = i sum_j xi_j G_j``
whose eigenvalues are ``+-|xi|`` with branch projectors
``Pi_pm(xi) = (I +- A(xi)/|xi|)/2``.  Any function of ``D - lambda`` that is
constant on each branch is applied through the identity

    g_+ Pi_+ + g_- Pi_- = (g_+ + g_-)/2 * I + (g_+ - g_-)/(2|xi|) * A(xi),

so only ``psi_hat`` and ``A psi_hat`` are ever materialized.  The zero
frequency is a genuine N-dimensional kernel of D and is handled as the
eigenvalue 0; Nyquist rows are zeroed by every multiplier (the lattice is
not closed under negation there).

The conformal fractional Laplacian at order ``two_s`` is the multiplier
``|xi|^two_s``.  Its Green convolution comes in two flavours:

* periodic-mean-zero -- inverse multiplier with the zero mode discarded
  (the discarded mean is logged), exactly inverting the multiplier on
  mean-zero fields;
* free-space -- Hockney-style aperiodic convolution on a 2x zero-padded
  box with the sampled kernel ``c / |x|^(n - two_s)``.  The singular cell
  carries the analytic average of the kernel over one cell, and the
  constant ``c`` is calibrated once per grid by requiring the convolution
  to invert the fractional Laplacian on a Gaussian test density.
"""

from __future__ import annotations

import enum
import logging
from functools import lru_cache

import numpy as np

from .clifford import CliffordAlgebra, get_clifford
from .grid import BoxGrid, ScalarDensity, SpinorField

logger = logging.getLogger(__name__)


class GreenMode(enum.Enum):
    PERIODIC_MEAN_ZERO = "periodic"
    FREE_SPACE = "free-space"


class SpectrumError(ValueError):
    """lambda collides with the discrete Dirac spectrum of the grid."""


# ---------------------------------------------------------------------------
# FFT plumbing


def spinor_fft(psi: SpinorField) -> np.ndarray:
    return np.fft.fftn(psi.values, axes=tuple(range(psi.grid.n)))


def spinor_ifft(grid: BoxGrid, hat: np.ndarray) -> SpinorField:
    return SpinorField(grid, np.fft.ifftn(hat, axes=tuple(range(grid.n))))


@lru_cache(maxsize=8)
def _rfft_abs_xi(grid: BoxGrid) -> np.ndarray:
    axes = [grid.axis_freqs] * (grid.n - 1)
    axes.append(2.0 * np.pi * np.fft.rfftfreq(grid.m, d=grid.h))
    s = np.zeros([len(a) for a in axes])
    for ax, f in enumerate(axes):
        shape = [1] * grid.n
        shape[ax] = len(f)
        s = s + f.reshape(shape) ** 2
    return np.sqrt(s)


@lru_cache(maxsize=8)
def _rfft_nyquist_mask(grid: BoxGrid) -> np.ndarray:
    shape = [grid.m] * (grid.n - 1) + [grid.m // 2 + 1]
    mask = np.zeros(shape, dtype=bool)
    nyq = grid.m // 2
    for ax in range(grid.n):
        idx = [slice(None)] * grid.n
        idx[ax] = nyq
        mask[tuple(idx)] = True
    return mask


# ---------------------------------------------------------------------------
# Dirac operator and branch-resolved multipliers


def _symbol_apply_hat(grid: BoxGrid, cliff: CliffordAlgebra, psi_hat: np.ndarray) -> np.ndarray:
    """A(xi) psi_hat with A(xi) = i sum_j xi_j Gamma_j (Nyquist not yet zeroed)."""
    out = np.zeros_like(psi_hat)
    for ax in range(grid.n):
        out += grid.freq_mesh(ax)[..., None] * (psi_hat @ cliff.gammas[ax].T)
    return 1j * out


def dirac_apply(psi: SpinorField) -> SpinorField:
    """Flat Dirac operator D psi as a Fourier multiplier.

    Self-adjoint for the real L^2 pairing; D^2 = -Laplacian; constants are
    mapped to zero.
    """
    grid = psi.grid
    cliff = get_clifford(grid.n)
    hat = spinor_fft(psi)
    out = _symbol_apply_hat(grid, cliff, hat)
    out[grid.nyquist_mask] = 0.0
    return spinor_ifft(grid, out)


def dirac_spectrum(grid: BoxGrid) -> list[tuple[float, int]]:
    """Sorted (eigenvalue, multiplicity) pairs of the discrete Dirac operator.

    Eigenvalues are {+-|xi_k|} over the non-Nyquist frequency lattice plus 0;
    each nonzero value carries multiplicity N/2 per lattice point and branch,
    the kernel at xi = 0 has multiplicity N.  Nyquist rows are excluded since
    all multipliers zero them.
    """
    N = get_clifford(grid.n).N
    vals = grid.abs_xi[~grid.nyquist_mask].ravel()
    vals = np.round(vals, 12)
    uniq, counts = np.unique(vals, return_counts=True)
    out: list[tuple[float, int]] = []
    for v, c in zip(uniq, counts):
        if v == 0.0:
            out.append((0.0, N))
        else:
            out.append((-float(v), int(c) * (N // 2)))
            out.append((float(v), int(c) * (N // 2)))
    out.sort(key=lambda t: t[0])
    return out


def spectrum_distance(grid: BoxGrid, lam: float) -> float:
    """Distance from lambda to the discrete Dirac spectrum {+-|xi|} u {0}."""
    vals = grid.abs_xi[~grid.nyquist_mask].ravel()
    return float(np.min(np.abs(vals - abs(lam))))


def check_off_spectrum(grid: BoxGrid, lam: float, tol: float = 1e-9) -> None:
    d = spectrum_distance(grid, lam)
    if d <= tol:
        raise SpectrumError(
            f"lambda={lam} lies on the grid Dirac spectrum (distance {d:.3e})"
        )


def _branch_apply(
    psi: SpinorField,
    g_plus: np.ndarray,
    g_minus: np.ndarray,
    g_zero: float,
) -> SpinorField:
    """Apply a multiplier taking value g_plus/g_minus on the +-|xi| branches."""
    grid = psi.grid
    cliff = get_clifford(grid.n)
    hat = spinor_fft(psi)
    a_hat = _symbol_apply_hat(grid, cliff, hat)
    absxi = grid.abs_xi
    inv = np.zeros_like(absxi)
    nonzero = absxi > 0
    inv[nonzero] = 1.0 / absxi[nonzero]
    half_sum = 0.5 * (g_plus + g_minus)
    half_diff = 0.5 * (g_plus - g_minus) * inv
    out = half_sum[..., None] * hat + half_diff[..., None] * a_hat
    zero_idx = (0,) * grid.n
    out[zero_idx] = g_zero * hat[zero_idx]
    out[grid.nyquist_mask] = 0.0
    return spinor_ifft(grid, out)


def shifted_dirac_power(psi: SpinorField, lam: float, power: float) -> SpinorField:
    """|D - lambda|^power psi, branch-resolved.

    For power < 0 lambda must avoid the grid spectrum (the multiplier would
    be singular).  power = 0 is the identity.
    """
    if power == 0.0:
        return psi.copy()
    grid = psi.grid
    if power < 0:
        check_off_spectrum(grid, lam)
    absxi = grid.abs_xi
    with np.errstate(divide="ignore"):
        gp = np.abs(absxi - lam) ** power
        gm = np.abs(absxi + lam) ** power
    g0 = abs(lam) ** power if (lam != 0.0 or power > 0) else 0.0
    return _branch_apply(psi, gp, gm, g0)


def sobolev_seminorm(psi: SpinorField, lam: float, power: float) -> float:
    """|| |D - lambda|^power psi ||_{L^2} computed per Fourier mode."""
    from .grid import l2_norm

    return l2_norm(shifted_dirac_power(psi, lam, power))


def spectral_project(psi: SpinorField, lam: float, sign: int) -> SpinorField:
    """Projector onto the lambda-adapted positive/negative subspace.

    A mode on branch b (eigenvalue b|xi|) is kept by sign=+1 iff
    b|xi| - lambda > 0.  Requires lambda off the grid spectrum, else the
    splitting is ambiguous.
    """
    if sign not in (+1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign!r}")
    grid = psi.grid
    check_off_spectrum(grid, lam)
    absxi = grid.abs_xi
    if sign == +1:
        gp = (absxi - lam > 0).astype(float)
        gm = (-absxi - lam > 0).astype(float)
        g0 = 1.0 if -lam > 0 else 0.0
    else:
        gp = (absxi - lam < 0).astype(float)
        gm = (-absxi - lam < 0).astype(float)
        g0 = 1.0 if -lam < 0 else 0.0
    return _branch_apply(psi, gp, gm, g0)


# ---------------------------------------------------------------------------
# Fractional Laplacian and Green convolution


def frac_laplacian_apply(f: ScalarDensity, two_s: float) -> ScalarDensity:
    """(-Laplacian)^(two_s/2 * ... ), i.e. the multiplier |xi|^two_s.

    Annihilates constants, self-adjoint, maps real fields to real fields.
    """
    if two_s <= 0:
        raise ValueError(f"two_s must be positive, got {two_s}")
    grid = f.grid
    hat = np.fft.rfftn(f.values)
    hat *= _rfft_abs_xi(grid) ** two_s
    hat[_rfft_nyquist_mask(grid)] = 0.0
    return ScalarDensity(grid, np.fft.irfftn(hat, s=grid.shape))


def green_convolve(
    f: ScalarDensity,
    mode: GreenMode,
    two_s: float | None = None,
) -> ScalarDensity:
    """Convolution with the Green kernel of the order-two_s fractional Laplacian.

    two_s defaults to the critical order n - 2.  In periodic mode the zero
    mode of the output is set to zero and the discarded mean of f is logged;
    in free-space mode the box is zero-padded 2x per axis and convolved with
    the sampled radial kernel.
    """
    grid = f.grid
    if two_s is None:
        two_s = float(grid.n - 2)
    if two_s <= 0:
        raise ValueError(f"two_s must be positive, got {two_s}")
    if mode == GreenMode.PERIODIC_MEAN_ZERO:
        hat = np.fft.rfftn(f.values)
        mean = hat[(0,) * grid.n].real / grid.npoints
        absxi = _rfft_abs_xi(grid)
        mult = np.zeros_like(absxi)
        nz = absxi > 0
        mult[nz] = absxi[nz] ** (-two_s)
        hat *= mult
        hat[_rfft_nyquist_mask(grid)] = 0.0
        logger.debug("green_convolve periodic: discarded mean %.6e", mean)
        return ScalarDensity(grid, np.fft.irfftn(hat, s=grid.shape))
    if mode == GreenMode.FREE_SPACE:
        kernel_hat, c = _free_kernel(grid, float(two_s))
        raw = _free_convolve_raw(grid, f.values, kernel_hat)
        return ScalarDensity(grid, c * raw)
    raise ValueError(f"invalid Green mode: {mode!r}")


def free_kernel_constant(grid: BoxGrid, two_s: float | None = None) -> float:
    """Calibrated free-space kernel constant (the c in c/|x|^(n-2s))."""
    if two_s is None:
        two_s = float(grid.n - 2)
    return _free_kernel(grid, float(two_s))[1]


def _free_convolve_raw(grid: BoxGrid, values: np.ndarray, symbol: np.ndarray) -> np.ndarray:
    """Aperiodic convolution with the unit kernel via 2x zero padding."""
    pad_shape = tuple(2 * grid.m for _ in range(grid.n))
    padded = np.zeros(pad_shape)
    padded[tuple(slice(0, grid.m) for _ in range(grid.n))] = values
    conv = np.fft.irfftn(np.fft.rfftn(padded) * symbol, s=pad_shape)
    return conv[tuple(slice(0, grid.m) for _ in range(grid.n))].copy()


@lru_cache(maxsize=1)
def _free_kernel(grid: BoxGrid, two_s: float) -> tuple[np.ndarray, float]:
    """Unified Fourier symbol of the padded unit kernel |x|^-2 plus calibrated c.

    Ewald split: |x|^-2 = K_reg + K_sing with K_sing = exp(-r^2/w^2)/r^2.
    K_reg is smooth, so its midpoint lattice sum is superconvergent and it is
    transformed numerically; K_sing carries the singularity but has the
    closed-form transform 4^(n/2-1) pi^(n/2) gamma_lower(n/2-1, (xi w/2)^2)
    / xi^(n-2), applied analytically per padded-lattice frequency.
    """
    from scipy.special import gammainc  # regularized lower incomplete gamma

    n, m, h = grid.n, grid.m, grid.h
    p = n - two_s
    if abs(p - 2.0) > 1e-12:
        raise ValueError(
            f"free-space Green convolution is implemented for the critical order "
            f"two_s = n - 2 (kernel |x|^-2); got two_s={two_s} in dimension {n}"
        )
    w = 2.5 * h
    coords = np.arange(2 * m)
    coords = np.where(coords > m, coords - 2 * m, coords).astype(float) * h
    r2 = np.zeros((2 * m,) * n)
    for ax in range(n):
        shape = [1] * n
        shape[ax] = 2 * m
        r2 = r2 + coords.reshape(shape) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        k_reg = -np.expm1(-r2 / w**2) / r2
    k_reg[(0,) * n] = 1.0 / w**2
    symbol = np.fft.rfftn(k_reg).real * grid.cell_volume
    del k_reg, r2

    full = 2.0 * np.pi * np.fft.fftfreq(2 * m, d=h)
    half = 2.0 * np.pi * np.fft.rfftfreq(2 * m, d=h)
    axes = [full] * (n - 1) + [half]
    xi2 = np.zeros([len(a) for a in axes])
    for ax, fr in enumerate(axes):
        shape = [1] * n
        shape[ax] = len(fr)
        xi2 = xi2 + fr.reshape(shape) ** 2
    a = 0.5 * n - 1.0
    from scipy.special import gamma as gamma_fn

    with np.errstate(divide="ignore", invalid="ignore"):
        sing = (
            4.0**a
            * np.pi ** (0.5 * n)
            * gamma_fn(a)
            * gammainc(a, xi2 * w**2 / 4.0)
            / xi2 ** a
        )
    sing[(0,) * n] = 4.0**a * np.pi ** (0.5 * n) * (w / 2.0) ** (n - 2) / a
    symbol += sing
    del sing, xi2

    c = _calibrate_kernel_constant(grid, two_s, symbol)
    logger.debug(
        "free-space kernel calibrated: n=%d m=%d L=%g two_s=%g c=%.10e", n, m, grid.L, two_s, c
    )
    return symbol, c


def _calibrate_kernel_constant(grid: BoxGrid, two_s: float, symbol: np.ndarray) -> float:
    """Fit the kernel amplitude c by a Gaussian round trip.

    Requires c * K * ((-Lap)^s rho) = rho for a Gaussian test density rho
    that is wide enough to be resolved and narrow enough that box-truncation
    tails of its fractional Laplacian are negligible; c is the least-squares
    fit over the box.
    """
    sigma = max(4.0 * grid.h, grid.L / 20.0)
    rho = np.exp(-grid.radius_sq / (2.0 * sigma**2))
    y = frac_laplacian_apply(ScalarDensity(grid, rho), two_s)
    z = _free_convolve_raw(grid, y.values, symbol)
    num = float(np.sum(z * rho))
    den = float(np.sum(z * z))
    if den <= 0 or not np.isfinite(den):
        raise RuntimeError("free-space kernel calibration failed: degenerate fit")
    c = num / den
    err = float(np.max(np.abs(c * z - rho)))
    if err > 0.05:
        raise RuntimeError(
            f"free-space kernel calibration failed: Gaussian round-trip error {err:.3e}"
        )
    logger.debug("kernel calibration Gaussian round-trip max error %.3e", err)
    return c
