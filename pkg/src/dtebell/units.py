"""Unit-safe quantities and the physical constants used everywhere else.

All numerics inside the package run on plain SI floats; :class:`Quantity`
exists so that configuration values like ``"216 um"`` or ``"0.01 mu_B"``
cross the boundary exactly once, dimension-checked, and so reports can
attach units on the way out.  Conversion is exact multiplication by a
tabulated factor.

Two domain conventions are baked into the unit table:

* temperatures (``nK``, ``uK``) convert directly to energies via k_B,
  because every temperature in this problem is a trap depth;
* plain frequencies (``Hz``, ``kHz``, ``MHz``) convert to angular
  frequencies (factor 2*pi), because every frequency here is a trap or
  line angular frequency quoted as omega/2pi.

Constants are frozen to CODATA 2018 so golden-value tests stay bit-stable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple, Union

__all__ = [
    "DimensionError", "UnitError", "Quantity", "PhysicalConstants", "CONSTANTS",
    "convert", "parse_quantity", "si_value",
    "DIMENSIONLESS", "MASS", "LENGTH", "TIME", "VELOCITY", "MOMENTUM",
    "ENERGY", "ANGULAR_FREQUENCY", "RATE", "MAGNETIC_FIELD", "MAGNETIC_MOMENT",
    "POWER", "INTENSITY", "VOLUME", "UNIT_TABLE",
]


class DimensionError(TypeError):
    """Arithmetic attempted between quantities of different dimension."""


class UnitError(ValueError):
    """Unknown or malformed unit token in a configuration value."""


# A dimension is the tuple of exponents of the SI base units (kg, m, s, A, K).
Dim = Tuple[int, int, int, int, int]

DIMENSIONLESS: Dim = (0, 0, 0, 0, 0)
MASS: Dim = (1, 0, 0, 0, 0)
LENGTH: Dim = (0, 1, 0, 0, 0)
TIME: Dim = (0, 0, 1, 0, 0)
VELOCITY: Dim = (0, 1, -1, 0, 0)
MOMENTUM: Dim = (1, 1, -1, 0, 0)
ENERGY: Dim = (1, 2, -2, 0, 0)
ANGULAR_FREQUENCY: Dim = (0, 0, -1, 0, 0)
RATE: Dim = ANGULAR_FREQUENCY
MAGNETIC_FIELD: Dim = (1, 0, -2, -1, 0)
MAGNETIC_MOMENT: Dim = (0, 2, 0, 1, 0)  # J/T
POWER: Dim = (1, 2, -3, 0, 0)
INTENSITY: Dim = (1, 0, -3, 0, 0)
VOLUME: Dim = (0, 3, 0, 0, 0)
ACCELERATION: Dim = (0, 1, -2, 0, 0)

_DIM_NAMES = {
    DIMENSIONLESS: "dimensionless",
    MASS: "mass",
    LENGTH: "length",
    TIME: "time",
    VELOCITY: "velocity",
    MOMENTUM: "momentum",
    ENERGY: "energy",
    ANGULAR_FREQUENCY: "1/s",
    MAGNETIC_FIELD: "magnetic field",
    MAGNETIC_MOMENT: "magnetic moment",
    POWER: "power",
    INTENSITY: "intensity",
    VOLUME: "volume",
    ACCELERATION: "acceleration",
}


def _dim_name(dim: Dim) -> str:
    return _DIM_NAMES.get(dim, f"kg^{dim[0]} m^{dim[1]} s^{dim[2]} A^{dim[3]} K^{dim[4]}")


@dataclass(frozen=True)
class Quantity:
    """A float in SI units tagged with its dimension.

    Addition/subtraction/comparison require matching dimensions; products
    and quotients compose dimensions.  Mismatches raise
    :class:`DimensionError` instead of silently coercing.
    """

    value: float
    dim: Dim = DIMENSIONLESS

    def _require_same(self, other: "Quantity", op: str) -> None:
        if self.dim != other.dim:
            raise DimensionError(
                f"cannot {op} {_dim_name(self.dim)} and {_dim_name(other.dim)}")

    def __add__(self, other: "Quantity") -> "Quantity":
        if not isinstance(other, Quantity):
            return NotImplemented
        self._require_same(other, "add")
        return Quantity(self.value + other.value, self.dim)

    def __sub__(self, other: "Quantity") -> "Quantity":
        if not isinstance(other, Quantity):
            return NotImplemented
        self._require_same(other, "subtract")
        return Quantity(self.value - other.value, self.dim)

    def __neg__(self) -> "Quantity":
        return Quantity(-self.value, self.dim)

    def __abs__(self) -> "Quantity":
        return Quantity(abs(self.value), self.dim)

    def __mul__(self, other: Union["Quantity", float, int]) -> "Quantity":
        if isinstance(other, Quantity):
            dim = tuple(a + b for a, b in zip(self.dim, other.dim))
            return Quantity(self.value * other.value, dim)  # type: ignore[arg-type]
        if isinstance(other, (int, float)):
            return Quantity(self.value * other, self.dim)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other: Union["Quantity", float, int]) -> "Quantity":
        if isinstance(other, Quantity):
            dim = tuple(a - b for a, b in zip(self.dim, other.dim))
            return Quantity(self.value / other.value, dim)  # type: ignore[arg-type]
        if isinstance(other, (int, float)):
            return Quantity(self.value / other, self.dim)
        return NotImplemented

    def __lt__(self, other: "Quantity") -> bool:
        self._require_same(other, "compare")
        return self.value < other.value

    def __le__(self, other: "Quantity") -> bool:
        self._require_same(other, "compare")
        return self.value <= other.value

    def __gt__(self, other: "Quantity") -> bool:
        self._require_same(other, "compare")
        return self.value > other.value

    def __ge__(self, other: "Quantity") -> bool:
        self._require_same(other, "compare")
        return self.value >= other.value

    def to(self, unit: str) -> float:
        """Express this quantity in `unit` (the convert() inverse)."""
        factor, dim = _lookup(unit)
        if dim != self.dim:
            raise DimensionError(
                f"cannot express {_dim_name(self.dim)} in '{unit}' ({_dim_name(dim)})")
        return self.value / factor


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA 2018 values, in SI.  6Li mass from the 2020 AME evaluation."""

    hbar: float = 1.054571817e-34          # J s
    planck: float = 6.62607015e-34         # J s
    k_boltzmann: float = 1.380649e-23      # J/K
    mu_bohr: float = 9.2740100783e-24      # J/T
    bohr_radius: float = 5.29177210903e-11  # m
    mass_li6_atom: float = 9.9883464e-27   # kg  (6.0151228874 u)
    gravity: float = 9.80665               # m/s^2
    speed_of_light: float = 299792458.0    # m/s


CONSTANTS = PhysicalConstants()

_PI2 = 2.0 * math.pi

# name -> (SI factor, dimension); conversion is value * factor.
UNIT_TABLE: dict = {
    # magnetic field
    "T": (1.0, MAGNETIC_FIELD),
    "G": (1e-4, MAGNETIC_FIELD),
    "mG": (1e-7, MAGNETIC_FIELD),
    # temperature as energy (trap depths)
    "nK": (CONSTANTS.k_boltzmann * 1e-9, ENERGY),
    "uK": (CONSTANTS.k_boltzmann * 1e-6, ENERGY),
    "μK": (CONSTANTS.k_boltzmann * 1e-6, ENERGY),
    # time
    "s": (1.0, TIME),
    "ms": (1e-3, TIME),
    # length
    "m": (1.0, LENGTH),
    "cm": (1e-2, LENGTH),
    "mm": (1e-3, LENGTH),
    "um": (1e-6, LENGTH),
    "μm": (1e-6, LENGTH),
    "nm": (1e-9, LENGTH),
    # velocity
    "m/s": (1.0, VELOCITY),
    "cm/s": (1e-2, VELOCITY),
    "mm/s": (1e-3, VELOCITY),
    # power
    "W": (1.0, POWER),
    # frequency, quoted as omega/2pi
    "Hz": (_PI2, ANGULAR_FREQUENCY),
    "kHz": (_PI2 * 1e3, ANGULAR_FREQUENCY),
    "MHz": (_PI2 * 1e6, ANGULAR_FREQUENCY),
    # magnetic moment
    "mu_B": (CONSTANTS.mu_bohr, MAGNETIC_MOMENT),
    "μ_B": (CONSTANTS.mu_bohr, MAGNETIC_MOMENT),
    # length in Bohr radii
    "a0": (CONSTANTS.bohr_radius, LENGTH),
    "a₀": (CONSTANTS.bohr_radius, LENGTH),
    # polarizability volume
    "A^3": (1e-30, VOLUME),
    "Å³": (1e-30, VOLUME),
    "angstrom^3": (1e-30, VOLUME),
    # phase
    "rad": (1.0, DIMENSIONLESS),
}


def _lookup(unit: str):
    try:
        return UNIT_TABLE[unit]
    except KeyError:
        raise UnitError(f"unknown unit '{unit}'") from None


def convert(value: float, unit: str) -> Quantity:
    """Convert `value` in `unit` to an SI Quantity."""
    factor, dim = _lookup(unit)
    return Quantity(value * factor, dim)


def parse_quantity(text: Union[str, float, int]) -> Quantity:
    """Parse a config value: either a bare number (dimensionless) or
    ``"<number> <unit>"``."""
    if isinstance(text, (int, float)):
        return Quantity(float(text), DIMENSIONLESS)
    parts = text.strip().split()
    if len(parts) == 1:
        try:
            return Quantity(float(parts[0]), DIMENSIONLESS)
        except ValueError:
            raise UnitError(f"cannot parse quantity '{text}'") from None
    if len(parts) != 2:
        raise UnitError(f"cannot parse quantity '{text}' (expected '<number> <unit>')")
    try:
        value = float(parts[0])
    except ValueError:
        raise UnitError(f"bad numeric value in '{text}'") from None
    return convert(value, parts[1])


def si_value(text: Union[str, float, int], expected_dim: Dim, field: str = "") -> float:
    """Parse a config value and check its dimension; returns the SI float."""
    q = parse_quantity(text)
    if q.dim != expected_dim and q.dim != DIMENSIONLESS:
        where = f" for '{field}'" if field else ""
        raise UnitError(
            f"expected {_dim_name(expected_dim)}{where}, got {_dim_name(q.dim)} in '{text}'")
    if q.dim == DIMENSIONLESS and expected_dim != DIMENSIONLESS:
        where = f" for '{field}'" if field else ""
        raise UnitError(f"missing unit{where}: '{text}'")
    return q.value
