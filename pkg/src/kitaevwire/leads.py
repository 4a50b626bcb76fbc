"""Analytic description of the normal leads.

Each lead couples to one wire site through a Lorentzian coupling spectrum
``lam * Oc^2 / (w^2 + Oc^2)``.  The lead enters the wire dynamics only
through its frequency-domain damping kernel and its Fermi occupation, so no
lead degrees of freedom are ever represented explicitly.

Two damping conventions are supported.  ``"none"`` drops the principal-value
level shift, so the kernel is the real half-width Gamma(w)/2; ``"exact"``
keeps the closed-form transform of the causal kernel,
``lam*Oc*(Oc + i w) / (2 (Oc^2 + w^2))``, whose imaginary part is the level
shift.  Both give the same dissipation matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import ConfigError

__all__ = [
    "SELF_ENERGY_MODES",
    "LeadConfig",
    "DampingSample",
    "coupling_spectrum",
    "damping",
    "damping_sample",
    "damping_diagonal",
    "dissipation_matrix",
    "fermi",
]

SELF_ENERGY_MODES = ("none", "exact")


def _check_mode(mode: str) -> str:
    if mode not in SELF_ENERGY_MODES:
        raise ConfigError(f"self-energy mode must be one of {SELF_ENERGY_MODES}, got {mode!r}")
    return mode


@dataclass(frozen=True)
class LeadConfig:
    """One normal lead: contact site, coupling spectrum, thermal state.

    Attributes
    ----------
    contact_site : int
        1-based wire site the lead tunnels into.
    coupling : float
        Tunneling strength (the spectrum's peak value), >= 0.
    omega_c : float
        Lorentzian cutoff frequency, > 0.
    chem_potential : float
        Lead chemical potential.
    temperature : float
        Lead temperature, >= 0 (0 selects the sharp-step branch).
    """

    contact_site: int
    coupling: float
    omega_c: float
    chem_potential: float = 0.0
    temperature: float = 0.0

    def __post_init__(self):
        if self.contact_site < 1:
            raise ConfigError(f"contact_site must be >= 1, got {self.contact_site}")
        if self.coupling < 0:
            raise ConfigError(f"coupling must be >= 0, got {self.coupling}")
        if self.omega_c <= 0:
            raise ConfigError(f"omega_c must be > 0, got {self.omega_c}")
        if self.temperature < 0:
            raise ConfigError(f"temperature must be >= 0, got {self.temperature}")

    def check_site(self, n_sites: int) -> None:
        if not 1 <= self.contact_site <= n_sites:
            raise ConfigError(
                f"lead contact site {self.contact_site} out of range 1..{n_sites}"
            )


@dataclass(frozen=True)
class DampingSample:
    """Damping kernel evaluated at one frequency: Re(damping) == gamma/2."""

    omega: float
    gamma: float
    damping: complex


def coupling_spectrum(omega, lead: LeadConfig):
    """Lorentzian coupling spectrum ``lam * Oc^2 / (w^2 + Oc^2)``."""
    oc2 = lead.omega_c**2
    return lead.coupling * oc2 / (omega * omega + oc2)


def damping(omega: float, lead: LeadConfig, self_energy: str = "none") -> complex:
    """Frequency-domain damping kernel of one lead.

    Mode ``"none"``: Gamma(w)/2 with zero imaginary part.  Mode ``"exact"``:
    the closed-form causal transform, adding the level shift
    ``lam*Oc*w / (2 (Oc^2 + w^2))`` as imaginary part.
    """
    _check_mode(self_energy)
    if self_energy == "none":
        return complex(0.5 * coupling_spectrum(omega, lead))
    oc = lead.omega_c
    return lead.coupling * oc * (oc + 1j * omega) / (2.0 * (oc**2 + omega**2))


def damping_sample(omega: float, lead: LeadConfig, self_energy: str = "none") -> DampingSample:
    """Bundle Gamma(w) and the damping kernel at one frequency."""
    return DampingSample(
        omega=omega,
        gamma=float(coupling_spectrum(omega, lead)),
        damping=damping(omega, lead, self_energy),
    )


def damping_diagonal(
    omega: float, leads: list[LeadConfig], n_sites: int, self_energy: str = "none"
) -> np.ndarray:
    """Length-2N complex diagonal of the damping matrix.

    Each lead contributes its kernel at both the electron and the hole
    position of its contact site (the causal transform of the conjugated
    kernel coincides with the kernel itself for an even real spectrum);
    overlapping leads add.
    """
    diag = np.zeros(2 * n_sites, dtype=complex)
    for lead in leads:
        lead.check_site(n_sites)
        d = damping(omega, lead, self_energy)
        idx = lead.contact_site - 1
        diag[idx] += d
        diag[n_sites + idx] += d
    return diag


def dissipation_matrix(
    omega: float, leads: list[LeadConfig], n_sites: int, self_energy: str = "none"
) -> np.ndarray:
    """2N x 2N real diagonal dissipation matrix (damping plus its adjoint).

    Entries are Gamma_lead(w) at the electron and hole positions of each
    contact site, zero elsewhere; identical for both self-energy modes.
    """
    return np.diag(2.0 * damping_diagonal(omega, leads, n_sites, self_energy).real)


def fermi(omega, mu: float, temperature: float):
    """Fermi occupation 1/(exp((w - mu)/T) + 1), overflow-stable.

    At T = 0 this is the sharp step: 1 below mu, 0 above, 1/2 at w = mu.
    Accepts scalar or array ``omega``.
    """
    if temperature < 0:
        raise ConfigError(f"temperature must be >= 0, got {temperature}")
    w = np.asarray(omega, dtype=float)
    if temperature == 0.0:
        out = np.where(w < mu, 1.0, np.where(w > mu, 0.0, 0.5))
    else:
        out = expit(-(w - mu) / temperature)
    if np.ndim(omega) == 0:
        return float(out)
    return out
