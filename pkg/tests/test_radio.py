"""Tests for the first-order per-bit radio model."""

import math
import random

import pytest

from wsnec.radio import (
    RadioModelParams,
    relay_threshold,
    rx_energy_per_bit,
    tx_energy_per_bit,
    tx_energy_per_bit_power_law,
)


class TestTxEnergy:
    def test_zero_distance_is_electronics_only(self):
        params = RadioModelParams(e_t_elec=50e-9)
        assert tx_energy_per_bit(0.0, params) == 50e-9

    def test_hand_value_free_space(self):
        # 50 nJ + 10 pJ/m^2 * (10 m)^2 = 51 nJ
        params = RadioModelParams(e_t_elec=50e-9, eps_fs=10e-12)
        assert params.d0 > 10.0
        assert tx_energy_per_bit(10.0, params) == pytest.approx(51e-9, rel=1e-12)

    def test_continuous_at_default_crossover(self):
        params = RadioModelParams(eps_fs=10e-12, eps_mp=0.0013e-12)
        d0 = params.d0
        assert d0 == pytest.approx(math.sqrt(10e-12 / 0.0013e-12), rel=1e-12)
        fs = params.e_t_elec + params.eps_fs * d0 * d0
        mp = params.e_t_elec + params.eps_mp * d0 ** 4
        assert fs == pytest.approx(mp, rel=1e-12)
        assert tx_energy_per_bit(d0, params) == pytest.approx(fs, rel=1e-12)

    def test_non_decreasing_with_default_crossover(self):
        params = RadioModelParams()
        distances = [i * 2.5 for i in range(81)]
        energies = [tx_energy_per_bit(d, params) for d in distances]
        assert all(a <= b for a, b in zip(energies, energies[1:]))

    def test_negative_distance_rejected(self):
        with pytest.raises(ValueError):
            tx_energy_per_bit(-1.0, RadioModelParams())


class TestRxEnergy:
    def test_identity(self):
        assert rx_energy_per_bit(RadioModelParams(e_r_elec=50e-9)) == 50e-9

    def test_zero_electronics_rejected_by_type(self):
        with pytest.raises(ValueError):
            RadioModelParams(e_r_elec=0.0)

    def test_independent_of_distance(self):
        params = RadioModelParams()
        assert rx_energy_per_bit(params) == rx_energy_per_bit(params)


class TestRelayThreshold:
    def test_hand_value(self):
        # (1e-7 / (0.5 * 1e-10)) ** 0.5 = sqrt(2000) ~ 44.72 m
        params = RadioModelParams(e_t_elec=50e-9, e_r_elec=50e-9,
                                  eps_amp=100e-12, alpha_pl=2.0)
        assert relay_threshold(params) == pytest.approx(math.sqrt(2000.0), rel=1e-12)

    def test_alpha_at_most_one_rejected(self):
        with pytest.raises(ValueError):
            RadioModelParams(alpha_pl=1.0)
        with pytest.raises(ValueError):
            RadioModelParams(alpha_pl=0.5)

    def test_homogeneity_in_electronics(self):
        base = RadioModelParams(e_t_elec=50e-9, e_r_elec=50e-9, alpha_pl=2.0)
        doubled = RadioModelParams(e_t_elec=100e-9, e_r_elec=100e-9, alpha_pl=2.0)
        assert relay_threshold(doubled) == pytest.approx(
            relay_threshold(base) * 2 ** 0.5, rel=1e-12)


def one_hop_cost(d, params):
    return tx_energy_per_bit_power_law(d, params) + rx_energy_per_bit(params)


def two_hop_cost(d, params):
    return 2 * tx_energy_per_bit_power_law(d / 2, params) + 2 * rx_energy_per_bit(params)


def test_relay_benefit_flips_at_threshold():
    rng = random.Random(61)
    for _ in range(100):
        params = RadioModelParams(
            e_t_elec=rng.uniform(10e-9, 200e-9),
            e_r_elec=rng.uniform(10e-9, 200e-9),
            eps_amp=rng.uniform(10e-12, 500e-12),
            alpha_pl=rng.uniform(1.5, 4.0))
        d_star = relay_threshold(params)
        above, below = d_star * 1.01, d_star * 0.99
        assert two_hop_cost(above, params) < one_hop_cost(above, params)
        assert two_hop_cost(below, params) > one_hop_cost(below, params)
