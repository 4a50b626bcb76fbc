"""Frequency-domain response and two-lead transport observables.

Everything is computed from the response matrix
``G(w) = i [w - H + i D(w)]^(-1)`` where H is the particle-hole matrix of
the wire and D(w) the diagonal lead damping.  The steady current out of the
probe lead (always ``leads[0]``) is a frequency integral of three
non-negative channel terms: direct electron transmission, crossed
electron-to-hole transmission, and local electron-to-hole reflection at the
probe contact.  At zero temperature the differential conductance is the same
bracket evaluated at the bias energy.

Units: hbar = e = 1, energies in units of the hopping; conductances are
returned in units of e^2/h and currents in units of e * energy / h, so the
bias derivative of the current is directly the conductance.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad_vec

from .errors import ConfigError, QuadratureError, SingularPropagatorError
from .leads import LeadConfig, coupling_spectrum, damping_diagonal, fermi
from .model import BdgMatrix, WireConfig, build_bdg

__all__ = [
    "PropagatorSample",
    "QuadratureSpec",
    "TransportResult",
    "ConductancePoint",
    "Peak",
    "ConductanceCurve",
    "propagator",
    "steady_current",
    "differential_conductance",
    "conductance_sweep",
]

_CONDITION_LIMIT = 1e14


@dataclass(frozen=True)
class PropagatorSample:
    """Full response matrix at one frequency."""

    omega: float
    matrix: np.ndarray


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances for the adaptive frequency integration."""

    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    limit: int = 2000


@dataclass(frozen=True)
class TransportResult:
    """Steady current with its three-channel breakdown.

    ``current`` equals the sum of ``breakdown`` (direct, crossed, local
    reflection); ``quad_error`` is the integrator's error estimate.
    """

    current: float
    breakdown: tuple[float, float, float]
    quad_error: float


@dataclass(frozen=True)
class ConductancePoint:
    """Differential conductance at one bias, total and per channel (e^2/h)."""

    bias: float
    total: float
    direct: float
    crossed_andreev: float
    local_andreev: float


@dataclass(frozen=True)
class Peak:
    """Detected conductance peak: apex location/height and width at half max."""

    location: float
    height: float
    fwhm: float


@dataclass(frozen=True)
class ConductanceCurve:
    """Sampled conductance curve with per-channel breakdown and peak table.

    ``skipped`` lists grid points dropped because the response matrix was
    numerically singular there (an undamped mode sitting exactly at that
    bias), with the corresponding error message.
    """

    bias: np.ndarray
    total: np.ndarray
    direct: np.ndarray
    crossed_andreev: np.ndarray
    local_andreev: np.ndarray
    peaks: list[Peak] = field(default_factory=list)
    skipped: list[tuple[float, str]] = field(default_factory=list)


def _dynamical_matrix(
    bdg: BdgMatrix, leads: list[LeadConfig], omega: float, self_energy: str
) -> np.ndarray:
    """Return M(w) = w - H + i D(w); the response matrix is i M^(-1)."""
    m = -np.asarray(bdg.entries, dtype=complex).copy()
    diag = damping_diagonal(omega, leads, bdg.n_sites, self_energy)
    m[np.diag_indices_from(m)] += omega + 1j * diag
    return m


def propagator(
    bdg: BdgMatrix, leads: list[LeadConfig], omega: float, self_energy: str = "none"
) -> PropagatorSample:
    """Response matrix ``G(w) = i [w - H + i D(w)]^(-1)`` by dense LU solve.

    Raises ``SingularPropagatorError`` when the 1-norm condition estimate of
    the system matrix exceeds 1e14 (e.g. an undamped eigenmode exactly at
    ``w``).
    """
    m = _dynamical_matrix(bdg, leads, omega, self_energy)
    try:
        inv = np.linalg.inv(m)
    except np.linalg.LinAlgError as exc:
        raise SingularPropagatorError(omega, math.inf) from exc
    cond = float(np.linalg.norm(m, 1) * np.linalg.norm(inv, 1))
    if not math.isfinite(cond) or cond > _CONDITION_LIMIT:
        raise SingularPropagatorError(omega, cond)
    g = 1j * inv
    g.setflags(write=False)
    return PropagatorSample(omega=omega, matrix=g)


def _probe_row(
    bdg: BdgMatrix, leads: list[LeadConfig], omega: float, self_energy: str, row: int
) -> np.ndarray:
    """Row ``row`` of G(w) via one LU solve of the transposed system."""
    m = _dynamical_matrix(bdg, leads, omega, self_energy)
    rhs = np.zeros(m.shape[0], dtype=complex)
    rhs[row] = 1.0
    try:
        sol = 1j * np.linalg.solve(m.T, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularPropagatorError(omega, math.inf) from exc
    if not np.all(np.isfinite(sol)):
        raise SingularPropagatorError(omega, math.inf)
    return sol


def _check_two_leads(leads: list[LeadConfig], n_sites: int) -> tuple[int, int]:
    if len(leads) != 2:
        raise ConfigError(f"exactly two leads are required, got {len(leads)}")
    for lead in leads:
        lead.check_site(n_sites)
    return leads[0].contact_site - 1, leads[1].contact_site - 1


def _channel_brackets(
    bdg: BdgMatrix, leads: list[LeadConfig], omega: float, self_energy: str
) -> tuple[float, float, float]:
    """Gamma-weighted squared response elements of the three channels.

    Returns (direct, crossed, local) without the factor 2 on the local term;
    all evaluated at one frequency.
    """
    x, y = _check_two_leads(leads, bdg.n_sites)
    n = bdg.n_sites
    row = _probe_row(bdg, leads, omega, self_energy, x)
    gx = coupling_spectrum(omega, leads[0])
    gy = coupling_spectrum(omega, leads[1])
    direct = gx * gy * abs(row[y]) ** 2
    crossed = gx * gy * abs(row[y + n]) ** 2
    local = gx * gx * abs(row[x + n]) ** 2
    return direct, crossed, local


def _quad_window(
    fun, lo: float, hi: float, energies: np.ndarray, quad: QuadratureSpec, n_out: int
) -> tuple[np.ndarray, float]:
    """Adaptive integral of a vector integrand over a signed window.

    Panel edges are anchored at every eigenenergy inside the window so
    adaptive subdivision can zero in on the resonances.
    """
    if lo == hi:
        return np.zeros(n_out), 0.0
    sign = 1.0
    if hi < lo:
        lo, hi, sign = hi, lo, -1.0
    pts = sorted(float(e) for e in energies if lo < e < hi)
    val, err = quad_vec(
        fun,
        lo,
        hi,
        epsabs=quad.abs_tol,
        epsrel=quad.rel_tol,
        points=pts,
        limit=quad.limit,
    )
    return sign * np.atleast_1d(val), float(err)


def steady_current(
    config: WireConfig,
    leads: list[LeadConfig],
    quad: QuadratureSpec | None = None,
    self_energy: str = "none",
    full_window: bool = False,
) -> TransportResult:
    """Steady current out of the probe lead, in units of e * energy / h.

    At zero temperature the sharp Fermi steps reduce the full frequency
    integral of the three channel terms to integrals over the bias windows
    (the equilibrium remainder vanishes identically), which is the default
    evaluation.  ``full_window=True`` instead integrates all three terms
    with their Fermi factors over the whole window
    ``[-W, W], W = max(4 Oc, 1.2 max|E|, ...)``; that path is mandatory at
    finite temperature (where the reduction does not apply) and is also how
    the equilibrium cancellation can be verified numerically.  Adaptive
    panels are anchored at every eigenenergy, the chemical potentials and
    the cutoff frequencies.  Raises ``QuadratureError`` when the error
    estimate misses the requested tolerance.
    """
    quad = quad or QuadratureSpec()
    bdg = build_bdg(config)
    _check_two_leads(leads, bdg.n_sites)
    lead_x, lead_y = leads
    mu_x, mu_y = lead_x.chem_potential, lead_y.chem_potential

    energies = np.linalg.eigvalsh(np.asarray(bdg.entries))
    finite_t = lead_x.temperature > 0.0 or lead_y.temperature > 0.0

    if finite_t or full_window:
        window = max(
            4.0 * max(lead.omega_c for lead in leads),
            1.2 * float(np.max(np.abs(energies))),
            1.5 * abs(mu_x),
            1.5 * abs(mu_y),
            1.0,
        )
        anchors = set(float(e) for e in energies)
        anchors.update((mu_x, mu_y))
        for lead in leads:
            anchors.update((-lead.omega_c, lead.omega_c))

        def integrand(w: float) -> np.ndarray:
            direct, crossed, local = _channel_brackets(bdg, leads, w, self_energy)
            fx = fermi(w, mu_x, lead_x.temperature)
            fy = fermi(w, mu_y, lead_y.temperature)
            return np.array(
                [
                    direct * (fx - fy),
                    crossed * (fx - (1.0 - fy)),
                    local * (fx - (1.0 - fx)),
                ]
            )

        parts, err = _quad_window(
            integrand, -window, window, np.array(sorted(anchors)), quad, 3
        )
    else:
        # T = 0: the steps leave the direct term on (mu_y, mu_x), the
        # crossed term on (0, mu_x) and (0, mu_y), and twice the local
        # term on (0, mu_x).
        def direct_term(w: float) -> np.ndarray:
            d, _, _ = _channel_brackets(bdg, leads, w, self_energy)
            return np.array([d])

        def andreev_terms(w: float) -> np.ndarray:
            _, c, l = _channel_brackets(bdg, leads, w, self_energy)
            return np.array([c, l])

        def crossed_term(w: float) -> np.ndarray:
            _, c, _ = _channel_brackets(bdg, leads, w, self_energy)
            return np.array([c])

        v1, e1 = _quad_window(direct_term, mu_y, mu_x, energies, quad, 1)
        v2, e2 = _quad_window(andreev_terms, 0.0, mu_x, energies, quad, 2)
        v3, e3 = _quad_window(crossed_term, 0.0, mu_y, energies, quad, 1)
        parts = np.array([v1[0], v2[0] + v3[0], 2.0 * v2[1]])
        err = e1 + e2 + e3

    total = float(np.sum(parts))
    bound = 10.0 * max(quad.abs_tol, quad.rel_tol * abs(total))
    if err > bound:
        raise QuadratureError(
            f"frequency integral error estimate {err:.3e} exceeds bound "
            f"{bound:.3e} (current estimate {total:.6e})"
        )
    return TransportResult(
        current=total,
        breakdown=(float(parts[0]), float(parts[1]), float(parts[2])),
        quad_error=float(err),
    )


def differential_conductance(
    config: WireConfig,
    leads: list[LeadConfig],
    bias: float,
    self_energy: str = "none",
) -> ConductancePoint:
    """Zero-temperature differential conductance at one bias, in e^2/h.

    The bias is the probe lead's chemical potential in energy units; the
    value is the channel bracket at that frequency with the local-reflection
    term counted twice.  Both leads must be at zero temperature; at finite
    temperature differentiate ``steady_current`` numerically instead.
    """
    if any(lead.temperature != 0.0 for lead in leads):
        raise ConfigError(
            "differential_conductance is a zero-temperature formula; "
            "differentiate steady_current for finite temperatures"
        )
    bdg = build_bdg(config)
    return _didv_point(bdg, leads, bias, self_energy)


def _didv_point(
    bdg: BdgMatrix, leads: list[LeadConfig], bias: float, self_energy: str
) -> ConductancePoint:
    direct, crossed, local = _channel_brackets(bdg, leads, bias, self_energy)
    local *= 2.0
    return ConductancePoint(
        bias=bias,
        total=direct + crossed + local,
        direct=direct,
        crossed_andreev=crossed,
        local_andreev=local,
    )


_REFINE_FLOOR = 2e-6


def _refinement_offsets(base_spacing: float) -> np.ndarray:
    """Geometric ladder of offsets used around each mode energy.

    The ladder never samples closer than ``_REFINE_FLOOR`` to a mode energy:
    resonances much narrower than that are invisible at any realistic
    measurement resolution and sampling their apex would fake an observable
    peak, while every resolvable resonance is still well covered.
    """
    top = max(2.0 * base_spacing, 4.0 * _REFINE_FLOOR)
    ratio = math.sqrt(2.0)
    n_steps = int(math.ceil(math.log(top / _REFINE_FLOOR, ratio))) + 1
    return _REFINE_FLOOR * np.power(ratio, np.arange(n_steps))


def _build_grid(
    v_min: float, v_max: float, points: int, mode_energies: np.ndarray
) -> np.ndarray:
    base = np.linspace(v_min, v_max, points)
    extras = [base]
    if v_min < 0.0 < v_max:
        extras.append(np.array([0.0]))
    if mode_energies.size:
        offsets = _refinement_offsets((v_max - v_min) / max(points - 1, 1))
        around = (mode_energies[:, None] + np.concatenate([-offsets, offsets])).ravel()
        extras.append(around[(around >= v_min) & (around <= v_max)])
    grid = np.unique(np.concatenate(extras))
    return grid


def _quadratic_apex(
    xl: float, yl: float, x0: float, y0: float, xr: float, yr: float
) -> tuple[float, float]:
    """Apex of the parabola through three points; falls back to the middle."""
    a = (yl - y0) / ((xl - x0) * (xl - xr)) - (yr - y0) / ((xr - x0) * (xl - xr))
    b = (yr - y0) / (xr - x0) - a * (xr - x0)
    if a >= 0.0 or not math.isfinite(a) or not math.isfinite(b):
        return x0, y0
    xs = x0 - b / (2.0 * a)
    if not (min(xl, xr) <= xs <= max(xl, xr)):
        return x0, y0
    ys = y0 + b * (xs - x0) + a * (xs - x0) ** 2
    return xs, max(ys, y0)


def _half_crossing(
    bias: np.ndarray, vals: np.ndarray, idx: int, half: float, step: int
) -> float:
    """Interpolated bias where the curve first drops to ``half``, walking
    from the peak in direction ``step``; NaN if the curve turns back up
    first (overlapping peaks) or the window ends."""
    k = idx
    while 0 <= k + step < len(vals):
        nxt = vals[k + step]
        if nxt <= half:
            x0, y0 = bias[k], vals[k]
            x1 = bias[k + step]
            if nxt == y0:
                return float(x1)
            return float(x0 + (half - y0) * (x1 - x0) / (nxt - y0))
        if nxt > vals[k]:
            return math.nan
        k += step
    return math.nan


def _detect_peaks(bias: np.ndarray, vals: np.ndarray, min_height: float) -> list[Peak]:
    peaks = []
    for i in range(1, len(vals) - 1):
        if vals[i] < min_height:
            continue
        if not (vals[i] > vals[i - 1] and vals[i] >= vals[i + 1]):
            continue
        loc, height = _quadratic_apex(
            bias[i - 1], vals[i - 1], bias[i], vals[i], bias[i + 1], vals[i + 1]
        )
        half = 0.5 * height
        left = _half_crossing(bias, vals, i, half, -1)
        right = _half_crossing(bias, vals, i, half, +1)
        fwhm = right - left if math.isfinite(left) and math.isfinite(right) else math.nan
        peaks.append(Peak(location=loc, height=height, fwhm=fwhm))
    return peaks


def conductance_sweep(
    config: WireConfig,
    leads: list[LeadConfig],
    v_min: float,
    v_max: float,
    points: int,
    self_energy: str = "none",
    threads: int = 1,
    peak_min_height: float = 0.01,
    refine: bool = True,
) -> ConductanceCurve:
    """Differential conductance over a bias window, with a peak table.

    A uniform grid of ``points`` samples is augmented with geometric
    clusters around every eigenenergy inside the window (resonances are
    narrow), plus the exact zero-bias point.  Grid points where the response
    matrix is numerically singular are recorded in ``skipped`` and excluded
    from the curve.  Peaks are local maxima above ``peak_min_height`` with a
    quadratic apex refinement.
    """
    if points < 2:
        raise ConfigError(f"points must be >= 2, got {points}")
    if v_max <= v_min:
        raise ConfigError(f"need v_max > v_min, got [{v_min}, {v_max}]")
    if any(lead.temperature != 0.0 for lead in leads):
        raise ConfigError("conductance_sweep is a zero-temperature observable")

    bdg = build_bdg(config)
    _check_two_leads(leads, bdg.n_sites)

    if refine:
        energies = np.linalg.eigvalsh(np.asarray(bdg.entries))
        inside = energies[(energies >= v_min) & (energies <= v_max)]
    else:
        inside = np.array([])
    grid = _build_grid(v_min, v_max, points, inside)

    def evaluate(b: float):
        # The full condition check matters here: a bias landing exactly on
        # an undamped mode gives an unstable inversion and must be skipped.
        try:
            sample = propagator(bdg, leads, float(b), self_energy)
        except SingularPropagatorError as exc:
            return (float(b), str(exc))
        n = bdg.n_sites
        x, y = leads[0].contact_site - 1, leads[1].contact_site - 1
        gx = coupling_spectrum(float(b), leads[0])
        gy = coupling_spectrum(float(b), leads[1])
        row = sample.matrix[x]
        direct = gx * gy * abs(row[y]) ** 2
        crossed = gx * gy * abs(row[y + n]) ** 2
        local = 2.0 * gx * gx * abs(row[x + n]) ** 2
        return ConductancePoint(
            bias=float(b),
            total=direct + crossed + local,
            direct=direct,
            crossed_andreev=crossed,
            local_andreev=local,
        )

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(evaluate, grid))
    else:
        results = [evaluate(b) for b in grid]

    kept = [r for r in results if isinstance(r, ConductancePoint)]
    skipped = [r for r in results if not isinstance(r, ConductancePoint)]

    bias = np.array([p.bias for p in kept])
    total = np.array([p.total for p in kept])
    direct = np.array([p.direct for p in kept])
    crossed = np.array([p.crossed_andreev for p in kept])
    local = np.array([p.local_andreev for p in kept])
    peaks = _detect_peaks(bias, total, peak_min_height)
    for arr in (bias, total, direct, crossed, local):
        arr.setflags(write=False)
    return ConductanceCurve(
        bias=bias,
        total=total,
        direct=direct,
        crossed_andreev=crossed,
        local_andreev=local,
        peaks=peaks,
        skipped=skipped,
    )
