"""Gaussian-beam and optical-dipole-trap relations.

Conventions (they matter, and together they reproduce all the design
anchors simultaneously):

* peak intensity uses the 1/e^2 waist definition, I0 = 2P/(pi w_x w_y);
* trap depth U0 = (2 pi alpha'/c) I0 with alpha' the polarizability
  *volume* (cgs convention, m^3);
* for a diatomic species the per-atom polarizability is taken as half the
  molecular value -- :meth:`Polarizability.atomic`;
* depths and frequencies refer to a single atom of mass m.

The photon-scattering rate is the simplest far-detuned two-level estimate,
Gamma_sc = (Gamma/hbar|Delta|) U0, and is order-of-magnitude only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

__all__ = [
    "GaussianBeam", "Polarizability", "AtomicLine", "DipoleTrap",
    "peak_intensity", "dipole_depth", "transverse_frequency",
    "waist_for_frequency", "rayleigh_length", "scattering_rate",
    "gravity_compensation_margin", "characterize",
]

_C = 299792458.0
_G = 9.80665


@dataclass(frozen=True)
class GaussianBeam:
    power: float       # W
    waist_x: float     # m
    waist_y: float     # m
    wavelength: float  # m

    def __post_init__(self):
        if self.power < 0:
            raise ValueError("beam power must be >= 0")
        if self.waist_x <= 0 or self.waist_y <= 0 or self.wavelength <= 0:
            raise ValueError("waists and wavelength must be > 0")

    @classmethod
    def circular(cls, power: float, waist: float, wavelength: float) -> "GaussianBeam":
        return cls(power, waist, waist, wavelength)

    @property
    def is_circular(self) -> bool:
        return self.waist_x == self.waist_y


@dataclass(frozen=True)
class Polarizability:
    """Polarizability volume alpha' (m^3) of a species."""

    volume: float
    species: str = ""

    def __post_init__(self):
        if self.volume <= 0:
            raise ValueError("polarizability volume must be > 0")

    def atomic(self) -> "Polarizability":
        """Per-atom value for a diatomic species: half the molecular volume."""
        return Polarizability(self.volume / 2.0, self.species + " (atomic)")


@dataclass(frozen=True)
class AtomicLine:
    """Strong transition used for the scattering-rate estimate."""

    wavelength: float  # m
    linewidth: float   # rad/s (angular)


@dataclass(frozen=True)
class DipoleTrap:
    depth: float                               # J
    transverse_frequency: float                # rad/s
    rayleigh_length: float                     # m
    scattering_rate: float                     # 1/s
    longitudinal_frequency: Optional[float] = None  # rad/s

    def __post_init__(self):
        if self.depth < 0 or self.transverse_frequency < 0:
            raise ValueError("trap depth and frequency must be >= 0")
        if self.rayleigh_length <= 0:
            raise ValueError("Rayleigh length must be > 0")


def peak_intensity(beam: GaussianBeam) -> float:
    """I0 = 2P/(pi w_x w_y), W/m^2."""
    return 2.0 * beam.power / (math.pi * beam.waist_x * beam.waist_y)


def dipole_depth(beam: GaussianBeam, pol: Polarizability) -> float:
    """Center trap depth U0 = (2 pi alpha'/c) I0, in J (red-detuned beam)."""
    return (2.0 * math.pi * pol.volume / _C) * peak_intensity(beam)


def transverse_frequency(depth: float, mass: float, waist: float) -> float:
    """Harmonic frequency of the Gaussian profile: omega = sqrt(4 U0/(m w^2))."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    return math.sqrt(4.0 * depth / (mass * waist**2))


def waist_for_frequency(depth: float, mass: float, frequency: float) -> float:
    """Waist giving the requested harmonic frequency at fixed depth."""
    if depth <= 0 or mass <= 0 or frequency <= 0:
        raise ValueError("depth, mass and frequency must be > 0")
    return math.sqrt(4.0 * depth / (mass * frequency**2))


def rayleigh_length(beam: GaussianBeam) -> float:
    """z0 = pi w^2 / lambda, taken along waist_x."""
    return math.pi * beam.waist_x**2 / beam.wavelength


def scattering_rate(beam: GaussianBeam, pol: Polarizability, line: AtomicLine) -> float:
    """Far-detuned two-level photon scattering rate, 1/s (order of magnitude).

    Gamma_sc = (Gamma / hbar |Delta|) U0, Delta the angular detuning from
    `line`.  Requires |Delta| >> Gamma.
    """
    hbar = 1.054571817e-34
    omega_beam = 2.0 * math.pi * _C / beam.wavelength
    omega_line = 2.0 * math.pi * _C / line.wavelength
    detuning = omega_beam - omega_line
    if abs(detuning) <= 10.0 * line.linewidth:
        raise ValueError("far-detuned estimate invalid: |detuning| <~ linewidth")
    return line.linewidth / (hbar * abs(detuning)) * dipole_depth(beam, pol)


def gravity_compensation_margin(beam: GaussianBeam, pol: Polarizability,
                                mass: float) -> float:
    """Max transverse dipole force over m g; > 1 means gravity is held.

    The Gaussian profile's steepest gradient is (2 U0/w) e^{-1/2} at w/2,
    evaluated along the tighter waist.
    """
    depth = dipole_depth(beam, pol)
    w = min(beam.waist_x, beam.waist_y)
    f_max = (2.0 * depth / w) * math.exp(-0.5)
    return f_max / (mass * _G)


def characterize(beam: GaussianBeam, pol: Polarizability, mass: float,
                 line: Optional[AtomicLine] = None) -> DipoleTrap:
    """Assemble the derived trap parameters for a beam."""
    depth = dipole_depth(beam, pol)
    return DipoleTrap(
        depth=depth,
        transverse_frequency=transverse_frequency(depth, mass, min(beam.waist_x, beam.waist_y)),
        rayleigh_length=rayleigh_length(beam),
        scattering_rate=scattering_rate(beam, pol, line) if line is not None else 0.0,
    )
