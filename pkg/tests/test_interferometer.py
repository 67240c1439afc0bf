"""Interferometer relation, SQL normalization and the injection chain."""

import numpy as np
import pytest
import scipy.constants as scc

from qnamp.filter_cavity import FilterCavityParams
from qnamp.grid import FrequencyGrid
from qnamp.interferometer import (
    IfoParams,
    SqueezerParams,
    caves_toy,
    ideal_injection_rotation,
    ifo_io,
    injection_chain,
    kimble_factor,
    ponderomotive_transfer,
    signal_transfer,
)
from qnamp.twophoton import NoisePath, homodyne

GRID = FrequencyGrid(np.logspace(1, 3, 200))
IFO = IfoParams()
IFC_15DB = FilterCavityParams(500.0, 0.0014, 20e-6, +33.4)


class TestKimbleFactor:
    def test_high_frequency_falloff(self):
        k, _, _ = kimble_factor(IFO, GRID)
        # K falls faster than 1/Omega^2: K * Omega^2 strictly decreasing
        assert np.all(np.diff(k * GRID.omega ** 2) < 0)

    def test_low_frequency_divergence(self):
        k, _, _ = kimble_factor(IFO, FrequencyGrid(np.array([0.01, 100.0])))
        assert np.arctan(k[0]) > np.radians(89.9)

    def test_direct_arithmetic_100hz(self):
        grid = FrequencyGrid(np.array([100.0]))
        k, phi, h_sql = kimble_factor(IFO, grid)
        om = 2 * np.pi * 100
        g = 2 * np.pi * IFO.bandwidth_hz
        w0 = 2 * np.pi * scc.c / IFO.lambda_m
        expect = 8 * IFO.arm_power_w * w0 / (
            IFO.mass_kg * IFO.arm_length_m ** 2 * om ** 2 * (g ** 2 + om ** 2))
        assert k[0] == pytest.approx(expect, rel=1e-14)
        assert phi[0] == pytest.approx(np.arctan(om / g), rel=1e-14)
        assert h_sql[0] == pytest.approx(
            np.sqrt(8 * scc.hbar / (IFO.mass_kg * om ** 2
                                    * IFO.arm_length_m ** 2)), rel=1e-14)


class TestIfoIO:
    def test_zero_coupling_is_pure_phase(self):
        quiet = IfoParams(arm_power_w=0.0, arm_loss=0.0, src_loss=0.0)
        m = ponderomotive_transfer(quiet, GRID).matrices
        assert np.allclose(np.abs(m[:, 0, 0]), 1.0, rtol=1e-12)
        assert np.allclose(m[:, 0, 1], 0.0)

    def test_lossless_unimodular(self):
        m = ponderomotive_transfer(IFO, GRID)
        assert np.allclose(np.abs(m.det()), 1.0, rtol=1e-12)

    def test_signal_in_first_quadrature_only(self):
        s = signal_transfer(IFO, GRID)
        assert np.all(np.abs(s.transfer[:, 0]) > 0)
        assert np.allclose(s.transfer[:, 1], 0.0)

    def test_lossless_vacuum_covariance_determinant(self):
        # the ponderomotive transfer is symplectic, not unitary: vacuum in
        # gives unit determinant of the output covariance
        quiet = IfoParams(arm_loss=0.0, src_loss=0.0)
        m = ponderomotive_transfer(quiet, GRID).matrices
        cov = m @ np.conj(np.swapaxes(m, 1, 2))
        assert np.allclose(np.abs(np.linalg.det(cov)), 1.0, rtol=1e-12)

    def test_lossy_vacuum_total_preserved(self):
        # dark-port loss keeps total vacuum normalization: project each
        # output path set onto a fixed quadrature of the *input* basis
        paths = ifo_io(IfoParams(arm_power_w=0.0), GRID,
                       [NoisePath.vacuum(GRID)])
        assert homodyne(0.0, paths) == pytest.approx(1.0, rel=1e-12)


class TestInjectionChain:
    def test_no_squeeze_no_loss_is_vacuum(self):
        sq = SqueezerParams(db=0.0, injection_loss=0.0, ifc_list=())
        paths = injection_chain(sq, GRID)
        for zeta in (0.0, 0.9):
            assert homodyne(zeta, paths) == pytest.approx(1.0, rel=1e-12)

    def test_ideal_rotation_flat_suppression(self):
        # ratio of squeezed to unsqueezed b1 PSD is 10^(-db/10) at all
        # frequencies once the ideal rotation undoes the ponderomotive tilt
        rot = ideal_injection_rotation(IFO, GRID)

        def b1_psd(db):
            sq = SqueezerParams(db=db, injection_loss=0.0, ifc_list=())
            paths = injection_chain(sq, GRID, ideal_rotation=rot)
            paths = ifo_io(IfoParams(arm_loss=0.0, src_loss=0.0,
                                     arm_power_w=IFO.arm_power_w), GRID, paths)
            return homodyne(0.0, paths)

        ratio = b1_psd(15.0) / b1_psd(0.0)
        assert np.allclose(ratio, 10 ** -1.5, rtol=1e-10)

    def test_physical_ifc_lands_squeeze_in_band(self):
        sq = SqueezerParams(db=15.0, injection_loss=0.0,
                            ifc_list=(IFC_15DB,))
        lossless_ifc = FilterCavityParams(500.0, 0.0014, 0.0, +33.4)
        sq = SqueezerParams(db=15.0, injection_loss=0.0,
                            ifc_list=(lossless_ifc,))
        paths = injection_chain(sq, GRID)
        paths = ifo_io(IfoParams(arm_loss=0.0, src_loss=0.0), GRID, paths)
        psd = homodyne(0.0, paths)
        k, _, _ = kimble_factor(IFO, GRID)
        ideal = (1 + k ** 2) * 10 ** -1.5
        # residual anti-squeeze leakage stays below ~35% of the floor
        assert np.all(psd / ideal < 1.35)
        assert np.all(psd / ideal > 0.999)

    def test_injection_loss_floor(self):
        rot = ideal_injection_rotation(IFO, GRID)
        sq = SqueezerParams(db=15.0, injection_loss=0.01, ifc_list=())
        paths = injection_chain(sq, GRID, ideal_rotation=rot)
        paths = ifo_io(IfoParams(arm_loss=0.0, src_loss=0.0), GRID, paths)
        k, _, _ = kimble_factor(IFO, GRID)
        floors = [homodyne(0.0, [p]) / (1 + k ** 2) for p in paths
                  if p.label == "injection loss"]
        assert len(floors) == 1
        assert np.allclose(floors[0], 0.01, rtol=1e-10)


class TestCavesToy:
    def test_trivials(self):
        assert caves_toy(0.0, 0.0, 5.0) == (1.0, 1.0)
        no_amp, amp = caves_toy(0.5, 0.2, 1.0)
        assert no_amp == amp

    def test_quoted_values(self):
        r = 1.5 * np.log(10) / 2  # e^{-2r} = 10^{-1.5}
        no_amp, amp = caves_toy(r, 0.1, 10.0)
        assert no_amp == pytest.approx(0.131623, abs=5e-5)
        assert amp == pytest.approx(0.032623, abs=5e-5)

    def test_domain(self):
        with pytest.raises(ValueError):
            caves_toy(0.1, 1.0, 2.0)
        with pytest.raises(ValueError):
            caves_toy(0.1, 0.1, 0.0)
