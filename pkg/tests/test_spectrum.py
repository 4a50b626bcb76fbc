"""Diagonalization, particle-hole pairing, classification and Majorana maps."""

import numpy as np
import pytest

from conftest import random_config
from kitaevwire import (
    EigenMode,
    ModeClass,
    SymmetryViolationError,
    WireConfig,
    build_bdg,
    bulk_gap,
    classify_modes,
    diagonalize,
    low_energy_couplings,
    majorana_rep,
    pair_modes,
    ph_conjugate,
)

# Edge-pair energy of the 30-site homogeneous open wire at J=1, Delta=0.5,
# mu=0.1, frozen from a 40-digit eigensolve of the same matrix.
EDGE_SPLITTING_N30 = 2.0260169e-08

FIG1_OPEN = WireConfig(30, 1.0, 0.5, 0.1)
FIG1_CLOSED = WireConfig(30, 1.0, 0.5, 0.1, boundary="closed", defects=((10, 10.0),))


def mode_matrix(modes):
    return np.column_stack([m.vector() for m in modes])


def test_sweet_spot_spectrum():
    modes = diagonalize(build_bdg(WireConfig(2, 1.0, 1.0, 0.0)))
    energies = np.array([m.energy for m in modes])
    assert np.max(np.abs(energies - [-2.0, 0.0, 0.0, 2.0])) < 1e-12


def test_decoupled_spectrum():
    modes = diagonalize(build_bdg(WireConfig(2, 0.0, 0.0, 0.3)))
    energies = np.array([m.energy for m in modes])
    assert np.allclose(energies, [-0.3, -0.3, 0.3, 0.3], atol=1e-14)


def test_fig1_open_edge_modes():
    modes = diagonalize(build_bdg(FIG1_OPEN))
    energies = np.sort(np.abs([m.energy for m in modes]))
    assert np.allclose(energies[:2], EDGE_SPLITTING_N30, rtol=1e-6, atol=0)
    gap = bulk_gap(1.0, 0.5, 0.1)
    assert np.all(energies[2:] >= 0.9 * gap)


def test_spectrum_invariants_random():
    rng = np.random.default_rng(23)
    for _ in range(150):
        cfg = random_config(rng)
        bdg = build_bdg(cfg)
        modes = diagonalize(bdg)
        e = np.array([m.energy for m in modes])
        u = mode_matrix(modes)
        h = np.asarray(bdg.entries)
        scale = max(1.0, float(np.max(np.abs(e))))
        # symmetric spectrum, orthonormal vectors, small eigen-residual
        assert np.max(np.abs(e + e[::-1])) <= 1e-10 * scale
        assert np.max(np.abs(u.conj().T @ u - np.eye(len(e)))) <= 1e-10
        res = h @ u - u * e
        assert np.linalg.norm(res, 2) <= 1e-10 * scale
        norms = np.sum(np.abs(u) ** 2, axis=0)
        assert np.max(np.abs(norms - 1.0)) <= 1e-12


def test_ph_eigenvector_map_random():
    rng = np.random.default_rng(29)
    for _ in range(60):
        cfg = random_config(rng)
        bdg = build_bdg(cfg)
        h = np.asarray(bdg.entries)
        for mode in diagonalize(bdg):
            flipped = ph_conjugate(mode.vector())
            assert np.linalg.norm(h @ flipped + mode.energy * flipped) <= 1e-8


def test_pair_modes_decoupled():
    pairs = pair_modes(diagonalize(build_bdg(WireConfig(2, 0.0, 0.0, 0.3))))
    assert len(pairs) == 2
    for pair in pairs:
        assert pair.positive.energy == pytest.approx(0.3, abs=1e-14)
        assert pair.negative.energy == pytest.approx(-0.3, abs=1e-14)


def test_pair_modes_sweet_spot():
    pairs = pair_modes(diagonalize(build_bdg(WireConfig(2, 1.0, 1.0, 0.0))))
    energies = sorted(p.positive.energy for p in pairs)
    assert abs(energies[0]) < 1e-12
    assert abs(energies[1] - 2.0) < 1e-12


def aligned_residual(pair):
    """Conjugate-pair mismatch after removing the free global phase."""
    target = ph_conjugate(pair.positive.vector())
    actual = pair.negative.vector()
    phase = np.vdot(actual, target)
    phase /= abs(phase)
    return float(np.linalg.norm(target - phase * actual))


def test_pair_conjugation_random():
    rng = np.random.default_rng(31)
    for _ in range(40):
        cfg = random_config(rng, n_max=8)
        pairs = pair_modes(diagonalize(build_bdg(cfg)))
        assert len(pairs) == cfg.n_sites
        for pair in pairs:
            assert aligned_residual(pair) <= 1e-8


def test_pair_conjugation_degenerate_ring():
    # momentum doublets of a homogeneous ring are exactly degenerate
    cfg = WireConfig(12, 1.0, 0.5, 0.1, boundary="closed")
    pairs = pair_modes(diagonalize(build_bdg(cfg)))
    for pair in pairs:
        assert aligned_residual(pair) <= 1e-8


def test_pair_modes_rejects_broken_symmetry():
    modes = diagonalize(build_bdg(WireConfig(4, 1.0, 0.5, 0.2)))
    n_sites = len(modes) // 4 * 2
    # corrupt one negative-energy eigenvector
    vec = np.roll(modes[0].vector(), 1)
    broken = EigenMode(
        energy=modes[0].energy, electron_amp=vec[:n_sites], hole_amp=vec[n_sites:]
    )
    with pytest.raises(SymmetryViolationError):
        pair_modes([broken] + modes[1:])


def test_classify_fig1_closed_defect():
    pairs = classify_modes(pair_modes(diagonalize(build_bdg(FIG1_CLOSED))), FIG1_CLOSED)
    in_gap = [p for p in pairs if p.positive.label is ModeClass.IN_GAP]
    byproduct = [p for p in pairs if p.positive.label is ModeClass.DEFECT_BYPRODUCT]
    bulk = [p for p in pairs if p.positive.label is ModeClass.BULK]
    assert len(in_gap) == 1
    assert len(byproduct) == 1
    assert len(bulk) == len(pairs) - 2
    assert abs(byproduct[0].positive.energy - 10.0) / 10.0 < 0.05
    gap = bulk_gap(1.0, 0.5, 0.1)
    assert 0.0 < in_gap[0].positive.energy < gap


def test_classify_homogeneous_closed_has_no_in_gap():
    cfg = WireConfig(30, 1.0, 0.5, 0.1, boundary="closed")
    pairs = classify_modes(pair_modes(diagonalize(build_bdg(cfg))), cfg)
    assert all(p.positive.label is not ModeClass.IN_GAP for p in pairs)


def test_classify_gapless_all_bulk():
    cfg = WireConfig(12, 1.0, 0.0, 0.3)
    pairs = classify_modes(pair_modes(diagonalize(build_bdg(cfg))), cfg)
    assert all(p.positive.label is ModeClass.BULK for p in pairs)
    assert low_energy_couplings(pairs) == []


def test_majorana_pure_electron_mode():
    e = np.zeros(3, dtype=complex)
    e[0] = 1.0
    mode = EigenMode(energy=0.5, electron_amp=e, hole_amp=np.zeros(3, dtype=complex))
    mj = majorana_rep(mode)
    assert np.array_equal(mj.plus_amp, e)
    assert np.array_equal(mj.minus_amp, e)


def test_majorana_normalization_random():
    rng = np.random.default_rng(37)
    for _ in range(30):
        cfg = random_config(rng, n_max=9)
        for mode in diagonalize(build_bdg(cfg)):
            mj = majorana_rep(mode)
            total = np.sum(np.abs(mj.plus_amp) ** 2) + np.sum(np.abs(mj.minus_amp) ** 2)
            assert abs(total - 2.0) < 1e-12


def test_majorana_sweet_spot_single_site_support():
    pairs = pair_modes(diagonalize(build_bdg(WireConfig(2, 1.0, 1.0, 0.0))))
    zero_pair = min(pairs, key=lambda p: p.positive.energy)
    mj = majorana_rep(zero_pair.positive)
    g2 = np.abs(mj.plus_amp) ** 2
    h2 = np.abs(mj.minus_amp) ** 2
    # each component lives on exactly one site, and on different sites
    assert g2.max() >= 1.0 - 1e-10
    assert h2.max() >= 1.0 - 1e-10
    assert int(np.argmax(g2)) != int(np.argmax(h2))


def test_majorana_defect_mode_sides():
    pairs = classify_modes(pair_modes(diagonalize(build_bdg(FIG1_CLOSED))), FIG1_CLOSED)
    mode = next(p.positive for p in pairs if p.positive.label is ModeClass.IN_GAP)
    mj = majorana_rep(mode)
    g2 = np.abs(mj.plus_amp) ** 2
    h2 = np.abs(mj.minus_amp) ** 2
    n = FIG1_CLOSED.n_sites
    defect = FIG1_CLOSED.defects[0][0]
    forward = [(defect + k - 1) % n for k in range(1, 11)]
    backward = [(defect - 1 - k) % n for k in range(1, 11)]
    g_fwd = g2[forward].sum() / g2.sum()
    h_fwd = h2[forward].sum() / h2.sum()
    g_bwd = g2[backward].sum() / g2.sum()
    h_bwd = h2[backward].sum() / h2.sum()
    # one component on each side of the defect
    assert (g_fwd >= 0.8 and h_bwd >= 0.8) or (g_bwd >= 0.8 and h_fwd >= 0.8)


def test_low_energy_couplings_fig1_open():
    pairs = classify_modes(pair_modes(diagonalize(build_bdg(FIG1_OPEN))), FIG1_OPEN)
    couplings = low_energy_couplings(pairs)
    assert len(couplings) == 1
    assert couplings[0][1] == pytest.approx(EDGE_SPLITTING_N30, rel=1e-6)


def test_low_energy_couplings_requires_labels():
    pairs = pair_modes(diagonalize(build_bdg(FIG1_OPEN)))
    with pytest.raises(ValueError):
        low_energy_couplings(pairs)


def defect_mode_energy(mu_p):
    cfg = WireConfig(30, 1.0, 0.6, 0.1, boundary="closed", defects=((10, mu_p),))
    pairs = classify_modes(pair_modes(diagonalize(build_bdg(cfg))), cfg)
    couplings = low_energy_couplings(pairs)
    assert len(couplings) == 1
    return couplings[0][1]


def test_defect_energy_monotonic():
    energies = [defect_mode_energy(m) for m in (2.0, 5.0, 10.0, 20.0, 50.0, 100.0)]
    assert all(a > b for a, b in zip(energies, energies[1:]))
    assert energies[4] < energies[2]  # eps(50) < eps(10)


def test_defect_splitting_resolvable_unlike_open_edge():
    pairs = classify_modes(pair_modes(diagonalize(build_bdg(FIG1_CLOSED))), FIG1_CLOSED)
    eps = low_energy_couplings(pairs)[0][1]
    gap = bulk_gap(1.0, 0.5, 0.1)
    assert 0.0 < eps < gap
    assert eps > 100 * EDGE_SPLITTING_N30
