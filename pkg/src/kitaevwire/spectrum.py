"""Diagonalization and mode analysis of the particle-hole matrix.

The spectrum of a valid BdG matrix is symmetric about zero: if (v, w) is an
eigenvector at energy E then (w*, v*) is one at -E.  ``diagonalize`` enforces
this structure on the numerical eigenvectors so that downstream pairing and
Majorana decompositions are stable even for (near-)degenerate zero modes,
where a plain dense eigensolver returns arbitrary rotations within the
degenerate subspace.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .errors import EigensolverError, SymmetryViolationError
from .model import BdgMatrix, WireConfig, bulk_gap

__all__ = [
    "ModeClass",
    "EigenMode",
    "ModePair",
    "MajoranaPair",
    "ph_conjugate",
    "diagonalize",
    "pair_modes",
    "classify_modes",
    "majorana_rep",
    "low_energy_couplings",
]


class ModeClass(str, Enum):
    IN_GAP = "in_gap"
    BULK = "bulk"
    DEFECT_BYPRODUCT = "defect_byproduct"


@dataclass(frozen=True)
class EigenMode:
    """One eigenmode: energy plus per-site electron and hole amplitudes.

    ``electron_amp[i]`` multiplies the annihilator on site i+1 and
    ``hole_amp[i]`` the creator; together they form the unit-norm
    eigenvector ``(electron_amp, hole_amp)`` of the 2N x 2N matrix.
    """

    energy: float
    electron_amp: np.ndarray
    hole_amp: np.ndarray
    label: ModeClass | None = None

    def vector(self) -> np.ndarray:
        """Stacked (electron, hole) eigenvector of length 2N."""
        return np.concatenate([self.electron_amp, self.hole_amp])


@dataclass(frozen=True)
class ModePair:
    """A particle-hole pair: the mode at +E and its conjugate partner at -E."""

    positive: EigenMode
    negative: EigenMode


@dataclass(frozen=True)
class MajoranaPair:
    """Site amplitudes of the two self-conjugate combinations of a mode.

    ``plus_amp`` belongs to (mode + conjugate), ``minus_amp`` to
    -i(mode - conjugate); for a zero mode each is localized on one side.
    """

    plus_amp: np.ndarray
    minus_amp: np.ndarray


def ph_conjugate(vector: np.ndarray) -> np.ndarray:
    """Map a stacked eigenvector (v, w) to its partner (w*, v*)."""
    n = vector.shape[0] // 2
    out = np.empty_like(vector)
    out[:n] = vector[n:].conj()
    out[n:] = vector[:n].conj()
    return out


def _fix_phase(column: np.ndarray) -> np.ndarray:
    """Rotate a vector's global phase so its largest entry is real positive."""
    idx = int(np.argmax(np.abs(column)))
    pivot = column[idx]
    mag = abs(pivot)
    if mag == 0.0:
        return column
    return column * (pivot.conjugate() / mag)


def _pivoted_invariant_basis(cands: list[np.ndarray], count: int) -> np.ndarray:
    """Orthonormal basis from conjugation-invariant candidates.

    Inner products between invariant vectors are real, so Gram-Schmidt with
    real coefficients stays within the invariant set; pivoting on the
    largest remaining norm plus a second orthogonalization pass keeps the
    construction well conditioned.
    """
    pool = [c.copy() for c in cands]
    basis: list[np.ndarray] = []
    while len(basis) < count and pool:
        norms = [float(np.linalg.norm(c)) for c in pool]
        k = int(np.argmax(norms))
        cand = pool.pop(k)
        if norms[k] < 1e-6:
            break
        for _ in range(2):
            for b in basis:
                cand = cand - b * np.real(np.vdot(b, cand))
        nrm = float(np.linalg.norm(cand))
        if nrm < 1e-6:
            continue
        basis.append(cand / nrm)
    if len(basis) != count:
        raise EigensolverError(
            f"could not build a conjugation-invariant basis of size {count} "
            f"for the near-zero cluster"
        )
    return np.column_stack(basis)


def _symmetrize_zero_cluster(
    h: np.ndarray, e: np.ndarray, u: np.ndarray, idx: np.ndarray
) -> None:
    """Re-pair the near-zero eigenvector cluster in place.

    In a conjugation-invariant basis of the cluster span the projected
    matrix is exactly i times a real antisymmetric matrix; enforcing that
    structure before solving makes every projected eigenvector y at +b
    satisfy y^T y = 0, so the full vectors Q y and Q conj(y) form an exactly
    orthogonal conjugate pair regardless of how small the splitting is.
    Genuine splittings survive through the projected eigenvalues.
    """
    m2 = len(idx)
    span = u[:, idx]

    cands = []
    for col in span.T:
        cc = ph_conjugate(col)
        cands.append(col + cc)
        cands.append(1j * (col - cc))
    q = _pivoted_invariant_basis(cands, m2)

    proj = q.conj().T @ h @ q
    proj = 0.5 * (proj + proj.conj().T)
    proj = 0.5 * (proj - proj.conj())  # keep only the i * (real antisymmetric) part
    beta, y = np.linalg.eigh(proj)

    beta_tol = 1e-13 * max(1.0, float(np.max(np.abs(e))))
    pos_cols: list[tuple[float, np.ndarray]] = [
        (float(beta[k]), y[:, k]) for k in range(m2) if beta[k] > beta_tol
    ]

    # Unresolved-zero block: a real orthonormal kernel basis of the real
    # antisymmetric part, paired as (z1 + i z2)/sqrt(2) with its conjugate.
    kernel_dim = m2 - 2 * len(pos_cols)
    if kernel_dim < 0 or kernel_dim % 2:
        raise EigensolverError(
            f"near-zero cluster of size {m2} split into {len(pos_cols)} pairs "
            f"plus a kernel of dimension {kernel_dim}"
        )
    if kernel_dim:
        anti = proj.imag
        _, svals, vt = np.linalg.svd(anti)
        kernel = vt[m2 - kernel_dim :].T
        for a, b in zip(kernel.T[0::2], kernel.T[1::2]):
            pos_cols.append((0.0, (a + 1j * b) / np.sqrt(2.0)))

    pos_cols.sort(key=lambda item: item[0])
    half = len(pos_cols)
    for rank, (val, yvec) in enumerate(pos_cols):
        vp = q @ yvec
        e[idx[half + rank]] = val
        e[idx[half - 1 - rank]] = -val
        u[:, idx[half + rank]] = vp
        u[:, idx[half - 1 - rank]] = ph_conjugate(vp)


def diagonalize(bdg: BdgMatrix, cluster_tol_factor: float = 3e-4) -> list[EigenMode]:
    """Full eigendecomposition, ascending in energy, with exact PH pairing.

    Every mode at energy E > 0 gets the conjugate-swapped copy of its
    eigenvector installed at -E, which keeps pairs consistent even inside
    degenerate multiplets.  Modes with |E| below ``cluster_tol_factor`` times
    the spectral radius are re-paired jointly (see
    ``_symmetrize_zero_cluster``).  Raises ``EigensolverError`` on solver
    failure or if the spectrum is not symmetric about zero.
    """
    h = np.asarray(bdg.entries)
    dim = h.shape[0]
    n = dim // 2
    try:
        e, u = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        scale = float(np.linalg.norm(h, np.inf))
        raise EigensolverError(
            f"dense eigensolver failed for a {dim}x{dim} matrix "
            f"(inf-norm {scale:.3e}): {exc}"
        ) from exc

    scale = max(1.0, float(np.max(np.abs(e))) if dim else 1.0)
    sym_err = float(np.max(np.abs(e + e[::-1])))
    if sym_err > 1e-10 * scale:
        raise EigensolverError(
            f"spectrum not symmetric about zero (max |E_k + E_(-k)| = {sym_err:.3e})"
        )

    # Near-zero cluster selection: start from the base threshold and grow
    # the boundary out to a clear gap in |E|, so no mode (and no member of
    # an exactly degenerate multiplet) sits numerically astride it.
    abs_order = np.argsort(np.abs(e), kind="stable")
    abs_sorted = np.abs(e)[abs_order]
    base_tol = cluster_tol_factor * scale
    count = int(np.searchsorted(abs_sorted, base_tol, side="right"))
    if count % 2:
        count += 1
    while 0 < count < dim and abs_sorted[count] - abs_sorted[count - 1] < 0.1 * base_tol:
        count += 2
    count = min(count, dim)
    cluster = np.sort(abs_order[:count])
    if len(cluster):
        _symmetrize_zero_cluster(h, e, u, cluster)
    clustered = set(cluster.tolist())

    for k in range(dim - 1, -1, -1):
        if k in clustered or e[k] <= 0.0:
            continue
        mirror = dim - 1 - k
        e[mirror] = -e[k]
        u[:, mirror] = ph_conjugate(u[:, k])

    order = np.argsort(e, kind="stable")
    e = e[order]
    u = u[:, order]

    modes = []
    for k in range(dim):
        col = _fix_phase(u[:, k])
        ea = col[:n].copy()
        ha = col[n:].copy()
        ea.setflags(write=False)
        ha.setflags(write=False)
        modes.append(EigenMode(energy=float(e[k]), electron_amp=ea, hole_amp=ha))
    return modes


def pair_modes(modes: list[EigenMode], min_overlap: float = 0.99) -> list[ModePair]:
    """Match every positive-energy mode with its conjugate partner at -E.

    The partner is the negative-energy mode maximizing the overlap with the
    conjugate-swapped positive eigenvector; an overlap below ``min_overlap``
    for all remaining candidates raises ``SymmetryViolationError``.
    """
    dim = len(modes)
    n = dim // 2
    if dim % 2:
        raise SymmetryViolationError(f"odd number of modes ({dim}) cannot be paired")

    negatives = modes[:n]
    positives = modes[n:]
    neg_vectors = np.column_stack([m.vector() for m in negatives])
    unmatched = list(range(n))

    pairs = []
    for pos in positives:
        target = ph_conjugate(pos.vector())
        overlaps = np.abs(neg_vectors[:, unmatched].conj().T @ target)
        best = int(np.argmax(overlaps))
        if overlaps[best] < min_overlap:
            raise SymmetryViolationError(
                f"mode at energy {pos.energy:.6e} has no conjugate partner "
                f"(best overlap {overlaps[best]:.6f} < {min_overlap})"
            )
        pairs.append(ModePair(positive=pos, negative=negatives[unmatched[best]]))
        del unmatched[best]
    return pairs


def classify_modes(
    pairs: list[ModePair],
    config: WireConfig,
    gap_fraction: float = 0.9,
    byproduct_window: float = 0.5,
) -> list[ModePair]:
    """Label each pair as in-gap, defect byproduct, or bulk.

    A pair is in-gap when its energy is below ``gap_fraction`` times the bulk
    gap of the background parameters (this takes precedence), a defect
    byproduct when its energy is within ``byproduct_window * |mu_p|`` of some
    defect potential, and bulk otherwise.  Thresholds are heuristics and can
    be overridden.
    """
    gap = bulk_gap(config.hopping, config.pairing, config.chem_potential)
    labeled = []
    for pair in pairs:
        energy = pair.positive.energy
        if energy < gap_fraction * gap:
            label = ModeClass.IN_GAP
        elif any(
            abs(energy - abs(mu_p)) < byproduct_window * abs(mu_p)
            for _, mu_p in config.defects
        ):
            label = ModeClass.DEFECT_BYPRODUCT
        else:
            label = ModeClass.BULK
        labeled.append(
            ModePair(
                positive=replace(pair.positive, label=label),
                negative=replace(pair.negative, label=label),
            )
        )
    return labeled


def majorana_rep(mode: EigenMode) -> MajoranaPair:
    """Decompose a mode into its two self-conjugate (Majorana) components.

    ``plus_amp = electron_amp + conj(hole_amp)`` and
    ``minus_amp = electron_amp - conj(hole_amp)``; the combined weight
    sums to 2 for a normalized mode.
    """
    plus = mode.electron_amp + mode.hole_amp.conj()
    minus = mode.electron_amp - mode.hole_amp.conj()
    plus.setflags(write=False)
    minus.setflags(write=False)
    return MajoranaPair(plus_amp=plus, minus_amp=minus)


def low_energy_couplings(pairs: list[ModePair]) -> list[tuple[int, float]]:
    """Report (pair index, energy) of each in-gap pair.

    The pair energy is the residual coupling between the two self-conjugate
    halves of the mode; it vanishes for a perfectly isolated zero mode.
    Requires classified pairs.
    """
    out = []
    for k, pair in enumerate(pairs):
        if pair.positive.label is None:
            raise ValueError("pairs must be classified before extracting couplings")
        if pair.positive.label is ModeClass.IN_GAP:
            out.append((k, pair.positive.energy))
    return out
