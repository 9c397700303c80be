"""Periodic computational box, spinor/scalar field containers, inner products.

The box is ``[-L/2, L/2)^n`` sampled with ``m`` points per axis (m even),
spacing ``h = L/m``.  Fourier frequencies are ``xi_k = 2 pi k / L`` for
``k in {-m/2, ..., m/2 - 1}``; the lattice is closed under negation except
for the Nyquist row ``k = -m/2``, which every spectral multiplier in this
package zeroes out.

All integrals are plain Riemann sums with weight ``h^n`` (spectrally
accurate for smooth periodic integrands), and all inner products use the
real part of the Hermitian pairing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class BoxGrid:
    """Periodic box [-L/2, L/2)^n with m points per axis."""

    n: int
    L: float
    m: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"dimension must be >= 1, got n={self.n}")
        if self.L <= 0:
            raise ValueError(f"box length must be positive, got L={self.L}")
        if self.m < 8 or self.m % 2 != 0:
            raise ValueError(f"points per axis must be even and >= 8, got m={self.m}")

    @property
    def h(self) -> float:
        return self.L / self.m

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.m,) * self.n

    @property
    def cell_volume(self) -> float:
        return self.h ** self.n

    @property
    def npoints(self) -> int:
        return self.m ** self.n

    @cached_property
    def axis_coords(self) -> np.ndarray:
        """1-D coordinates -L/2 + h*j, j = 0..m-1 (0 lies on the grid)."""
        return -0.5 * self.L + self.h * np.arange(self.m)

    @cached_property
    def axis_freqs(self) -> np.ndarray:
        """1-D frequencies 2 pi k / L in FFT ordering."""
        return 2.0 * np.pi * np.fft.fftfreq(self.m, d=self.h)

    def coord_mesh(self, axis: int) -> np.ndarray:
        """Coordinate along one axis, shaped for broadcasting over the grid."""
        shape = [1] * self.n
        shape[axis] = self.m
        return self.axis_coords.reshape(shape)

    def freq_mesh(self, axis: int) -> np.ndarray:
        shape = [1] * self.n
        shape[axis] = self.m
        return self.axis_freqs.reshape(shape)

    @cached_property
    def radius_sq(self) -> np.ndarray:
        """|x|^2 on the full grid (measured from the box center)."""
        r2 = np.zeros(self.shape)
        for ax in range(self.n):
            r2 = r2 + self.coord_mesh(ax) ** 2
        return r2

    @cached_property
    def abs_xi(self) -> np.ndarray:
        """|xi| on the full frequency lattice."""
        s = np.zeros(self.shape)
        for ax in range(self.n):
            s = s + self.freq_mesh(ax) ** 2
        return np.sqrt(s)

    @cached_property
    def nyquist_mask(self) -> np.ndarray:
        """True where any axis carries the un-negatable Nyquist frequency."""
        mask = np.zeros(self.shape, dtype=bool)
        nyq = self.m // 2  # fftfreq stores it as index m//2 (value -m/2)
        for ax in range(self.n):
            idx = [slice(None)] * self.n
            idx[ax] = nyq
            mask[tuple(idx)] = True
        return mask


@dataclass
class SpinorField:
    """One complex N-vector per grid point, stored as shape grid.shape + (N,)."""

    grid: BoxGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape[: self.grid.n] != self.grid.shape:
            raise ValueError(
                f"spinor values shaped {self.values.shape}, expected leading {self.grid.shape}"
            )
        if self.values.ndim != self.grid.n + 1:
            raise ValueError("spinor values must have one trailing component axis")

    @property
    def N(self) -> int:
        return self.values.shape[-1]

    @classmethod
    def zeros(cls, grid: BoxGrid, N: int) -> "SpinorField":
        return cls(grid, np.zeros(grid.shape + (N,), dtype=complex))

    def copy(self) -> "SpinorField":
        return SpinorField(self.grid, self.values.copy())

    def __add__(self, other: "SpinorField") -> "SpinorField":
        _check_same_grid(self, other)
        return SpinorField(self.grid, self.values + other.values)

    def __sub__(self, other: "SpinorField") -> "SpinorField":
        _check_same_grid(self, other)
        return SpinorField(self.grid, self.values - other.values)

    def __mul__(self, c) -> "SpinorField":
        return SpinorField(self.grid, self.values * c)

    __rmul__ = __mul__

    def __neg__(self) -> "SpinorField":
        return SpinorField(self.grid, -self.values)


@dataclass
class ScalarDensity:
    """One real value per grid point."""

    grid: BoxGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"density values shaped {self.values.shape}, expected {self.grid.shape}"
            )

    @classmethod
    def zeros(cls, grid: BoxGrid) -> "ScalarDensity":
        return cls(grid, np.zeros(grid.shape))

    def copy(self) -> "ScalarDensity":
        return ScalarDensity(self.grid, self.values.copy())


def _check_same_grid(a, b) -> None:
    if a.grid != b.grid:
        raise ValueError(f"grid mismatch: {a.grid} vs {b.grid}")


def pointwise_density(psi: SpinorField) -> ScalarDensity:
    """|psi|^2: squared Hermitian norm of the local spinor, >= 0 everywhere."""
    return ScalarDensity(psi.grid, np.sum(np.abs(psi.values) ** 2, axis=-1))


def l2_inner(a: SpinorField, b: SpinorField) -> float:
    """Re <a, b>_{L^2} with Riemann weight h^n."""
    _check_same_grid(a, b)
    return float(np.real(np.sum(np.conj(a.values) * b.values)) * a.grid.cell_volume)


def l2_norm(a: SpinorField) -> float:
    return float(np.sqrt(max(l2_inner(a, a), 0.0)))


def scalar_integral(f: ScalarDensity) -> float:
    """Integral of a real density over the box."""
    return float(np.sum(f.values) * f.grid.cell_volume)


def scalar_inner(f: ScalarDensity, g: ScalarDensity) -> float:
    _check_same_grid(f, g)
    return float(np.sum(f.values * g.values) * f.grid.cell_volume)
