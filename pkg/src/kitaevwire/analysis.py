"""Independent cross-check utilities used by the test suite and the CLI.

``steady_limit`` extracts the long-time limit of a causal signal given the
pole decomposition of its Fourier transform.  ``landauer_oracle`` computes
the direct two-lead transmission of a pairing-free chain from the N x N
electron block alone, providing an independent check of the full 2N x 2N
conductance path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, SingularPropagatorError
from .leads import LeadConfig, coupling_spectrum, damping
from .model import WireConfig, build_blocks

__all__ = ["PoleSum", "steady_limit", "landauer_oracle"]


@dataclass(frozen=True)
class PoleSum:
    """Rational frequency signal ``sum_k r_k / (w - p_k)`` with causal poles.

    Every pole must have non-positive imaginary part; a pole exactly at the
    origin represents the steady component of the time signal.
    """

    terms: tuple[tuple[complex, complex], ...]

    def __post_init__(self):
        terms = tuple((complex(r), complex(p)) for r, p in self.terms)
        object.__setattr__(self, "terms", terms)
        for _, pole in terms:
            if pole.imag > 1e-15:
                raise ConfigError(
                    f"pole {pole} lies in the upper half plane; "
                    "the signal would not be causal"
                )


def steady_limit(f: PoleSum, origin_tol: float = 1e-12) -> complex:
    """Long-time limit ``-i * lim_{w->0} w * f(w)`` of the causal signal.

    Equals ``-i`` times the residue at the origin, or 0 when no pole sits
    there.  Two poles within ``origin_tol`` of the origin merge into an
    effectively non-simple pole, for which the limit formula is invalid;
    that raises ``ValueError``.
    """
    at_origin = [r for r, p in f.terms if abs(p) <= origin_tol]
    if len(at_origin) > 1:
        raise ValueError(
            f"{len(at_origin)} poles within {origin_tol} of the origin; "
            "the origin pole must be simple"
        )
    if not at_origin:
        return 0.0 + 0.0j
    return -1j * at_origin[0]


def landauer_oracle(
    config: WireConfig,
    leads: list[LeadConfig],
    bias: float,
    self_energy: str = "none",
) -> float:
    """Direct transmission of a pairing-free chain from the electron block.

    Inverts only ``bias - h + i d(bias)`` (N x N) and returns
    ``Gamma_x * Gamma_y * |G_xy|^2`` in e^2/h, the value the full
    differential conductance must reduce to when the pairing vanishes.
    Rejects configurations with nonzero pairing.
    """
    if config.pairing != 0:
        raise ConfigError(
            f"landauer_oracle requires zero pairing, got {config.pairing}"
        )
    if len(leads) != 2:
        raise ConfigError(f"exactly two leads are required, got {len(leads)}")
    for lead in leads:
        lead.check_site(config.n_sites)

    h, _ = build_blocks(config)
    n = config.n_sites
    m = -h.astype(complex)
    for lead in leads:
        m[lead.contact_site - 1, lead.contact_site - 1] += 1j * damping(
            bias, lead, self_energy
        )
    m[np.diag_indices(n)] += bias

    try:
        inv = np.linalg.inv(m)
    except np.linalg.LinAlgError as exc:
        raise SingularPropagatorError(bias, float("inf")) from exc
    cond = float(np.linalg.norm(m, 1) * np.linalg.norm(inv, 1))
    if cond > 1e14:
        raise SingularPropagatorError(bias, cond)

    x, y = leads[0].contact_site - 1, leads[1].contact_site - 1
    g_xy = 1j * inv[x, y]
    return float(
        coupling_spectrum(bias, leads[0])
        * coupling_spectrum(bias, leads[1])
        * abs(g_xy) ** 2
    )
