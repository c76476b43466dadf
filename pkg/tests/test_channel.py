"""Geometry, path-loss, link-budget, and channel-sampling checks.

Path loss is verified against an independent term-by-term evaluation and
frozen regression values; the sampler is verified against the moments and
the analytic product-gamma CDF (KS test at the 99% level).
"""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ehuav.channel import (
    ChannelRealization,
    EnvironmentParams,
    LinkBudget,
    LinkGeometry,
    NetworkConfig,
    a2g_path_loss_db,
    elevation_angle_deg,
    harvested_energy,
    make_link_budget,
    sample_gamma_matrix,
    sample_realization,
    uav_tx_power,
)
from ehuav.errors import ConfigError
from ehuav.outage import gamma_product_cdf

ENV = EnvironmentParams(a=9.61, b=0.16, eta_los=1.0, eta_nlos=20.0)
F_C = 2.4e9
C_LIGHT = 3.0e8
NOISE = 10.0 ** -14.4  # -114 dBm in watts


def default_config(K: int = 6, **overrides) -> NetworkConfig:
    params = dict(
        K=K,
        N_c=4,
        N_r=4,
        N_s=10,
        B=1e6,
        f_c=F_C,
        c_light=C_LIGHT,
        noise_power=NOISE,
        zeta=0.7,
        p_c=(0.1,) * K,
        m_h=(3,) * K,
        m_g=(3,) * K,
        d_hat=100.0,
        A_hat=120.0,
        V_hat=20.0,
        R_a=1.0,
        epsilon=1e-4,
        env=ENV,
    )
    params.update(overrides)
    return NetworkConfig(**params)


def path_loss_by_hand(d: float, A: float) -> float:
    """Independent spreadsheet-style evaluation, term by term."""
    theta = math.atan2(A, d) * 180.0 / math.pi
    sigmoid = 1.0 + ENV.a * math.exp(-ENV.b * (theta - ENV.a))
    excess = (ENV.eta_los - ENV.eta_nlos) / sigmoid
    dist = 10.0 * math.log10((d * d + A * A) ** 0.5)
    freq = 20.0 * math.log10(4.0 * math.pi * F_C / C_LIGHT)
    return excess + dist + freq + ENV.eta_nlos


class TestElevationAngle:
    def test_equal_legs(self):
        assert elevation_angle_deg(100.0, 100.0) == pytest.approx(45.0, abs=1e-12)

    def test_directly_overhead(self):
        assert elevation_angle_deg(0.0, 50.0) == 90.0

    def test_thirty_degrees(self):
        assert elevation_angle_deg(100.0, 100.0 / math.sqrt(3.0)) == pytest.approx(
            30.0, abs=1e-12
        )
        assert elevation_angle_deg(100.0, 57.7350) == pytest.approx(30.0, abs=1e-4)

    def test_invalid_inputs(self):
        with pytest.raises(ConfigError):
            elevation_angle_deg(10.0, 0.0)
        with pytest.raises(ConfigError):
            elevation_angle_deg(-1.0, 50.0)

    @given(
        st.floats(min_value=0.0, max_value=1e4),
        st.floats(min_value=1e-3, max_value=1e4),
    )
    def test_range(self, d, A):
        theta = elevation_angle_deg(d, A)
        assert 0.0 < theta <= 90.0


class TestPathLoss:
    def test_matches_independent_evaluation(self):
        for d, A in [(100.0, 120.0), (50.0, 60.0), (10.0, 300.0), (250.0, 35.0)]:
            assert a2g_path_loss_db(d, A, ENV, F_C, C_LIGHT) == pytest.approx(
                path_loss_by_hand(d, A), abs=1e-9
            )

    def test_frozen_values(self):
        # Regression anchors computed by the term-by-term evaluation above.
        assert a2g_path_loss_db(100.0, 120.0, ENV, F_C, C_LIGHT) == pytest.approx(
            63.255286465084005, abs=1e-9
        )
        assert a2g_path_loss_db(50.0, 60.0, ENV, F_C, C_LIGHT) == pytest.approx(
            60.24498650844419, abs=1e-9
        )

    def test_quadrupled_squared_distance_adds_3db(self):
        # Scaling (d, A) by 2 keeps the elevation angle; the distance term
        # grows by exactly 10*log10(2).
        base = a2g_path_loss_db(100.0, 120.0, ENV, F_C, C_LIGHT)
        scaled = a2g_path_loss_db(200.0, 240.0, ENV, F_C, C_LIGHT)
        assert scaled - base == pytest.approx(10.0 * math.log10(2.0), abs=1e-12)

    def test_overhead_limit_of_sigmoid_term(self):
        # At d=0 the excess-loss term hits its theta=90 limit exactly.
        altitude = 75.0
        rest = (
            10.0 * math.log10(altitude)
            + 20.0 * math.log10(4.0 * math.pi * F_C / C_LIGHT)
            + ENV.eta_nlos
        )
        limit = (ENV.eta_los - ENV.eta_nlos) / (
            1.0 + ENV.a * math.exp(-ENV.b * (90.0 - ENV.a))
        )
        value = a2g_path_loss_db(0.0, altitude, ENV, F_C, C_LIGHT)
        assert value - rest == pytest.approx(limit, abs=1e-12)

    def test_altitude_sweep_has_unique_interior_minimum(self):
        # At fixed ground distance the loss first falls (LoS takes over),
        # then rises (range loss wins): one interior minimum, no plateaus.
        alts = np.arange(10.0, 300.0 + 1e-9, 1.0)
        loss = np.array([a2g_path_loss_db(50.0, a, ENV, F_C, C_LIGHT) for a in alts])
        i = int(np.argmin(loss))
        assert 0 < i < len(alts) - 1
        steps = np.diff(loss)
        assert np.all(steps[:i] < 0.0)
        assert np.all(steps[i:] > 0.0)


class TestLinkBudget:
    def test_lambda_from_60_db(self):
        budget = LinkBudget(
            lam=1e-6, mu=1e-6, rho=1e10, pl_h_db=60.0, pl_g_db=60.0
        )
        assert budget.lam == 10.0 ** (-60.0 / 10.0)

    def test_identity_enforced(self):
        with pytest.raises(ConfigError, match="lam"):
            LinkBudget(lam=1.1e-6, mu=1e-6, rho=1e10, pl_h_db=60.0, pl_g_db=60.0)

    def test_rho_from_defaults(self):
        cfg = default_config()
        budget = make_link_budget(0, cfg, LinkGeometry(d_h=50.0, d_g=50.0, altitude=60.0))
        assert budget.rho == pytest.approx(0.07 / (10.0 * 10.0 ** -14.4), rel=1e-12)

    def test_third_pair_of_six(self):
        # Nodes on the default line layout: pair 3 of 6 sits at the midpoint
        # (50 m from either end, 60 m up).  Values frozen from the
        # term-by-term path-loss oracle.
        cfg = default_config()
        budget = make_link_budget(2, cfg, LinkGeometry(d_h=50.0, d_g=50.0, altitude=60.0))
        assert budget.pl_h_db == pytest.approx(60.24498650844419, abs=1e-9)
        assert budget.pl_g_db == budget.pl_h_db
        assert budget.lam == pytest.approx(9.451513285918016e-07, rel=1e-12)
        assert budget.mu == budget.lam
        assert budget.rho == pytest.approx(1758320502056.7073, rel=1e-12)

    def test_index_bounds(self):
        cfg = default_config()
        geom = LinkGeometry(d_h=50.0, d_g=50.0, altitude=60.0)
        with pytest.raises(ConfigError):
            make_link_budget(6, cfg, geom)
        with pytest.raises(ConfigError):
            make_link_budget(-1, cfg, geom)

    def test_gains_below_unity_on_default_line(self):
        cfg = default_config()
        for k in range(cfg.K):
            frac = (k + 1) / cfg.K
            geom = LinkGeometry(
                d_h=cfg.d_hat * frac,
                d_g=cfg.d_hat - cfg.d_hat * frac,
                altitude=cfg.A_hat * frac,
            )
            budget = make_link_budget(k, cfg, geom)
            assert 0.0 < budget.lam < 1.0
            assert 0.0 < budget.mu < 1.0


class TestConfigValidation:
    def test_zeta_range(self):
        with pytest.raises(ConfigError, match=r"\(0,1\]"):
            default_config(zeta=1.5)
        with pytest.raises(ConfigError):
            default_config(zeta=0.0)

    def test_nakagami_must_be_integer(self):
        with pytest.raises(ConfigError, match="integer"):
            default_config(m_h=(2.5,) * 6)

    def test_vector_lengths(self):
        with pytest.raises(ConfigError):
            default_config(p_c=(0.1,) * 5)

    def test_counts_positive(self):
        with pytest.raises(ConfigError):
            default_config(K=0, p_c=(), m_h=(), m_g=())
        with pytest.raises(ConfigError):
            default_config(N_c=0)

    def test_environment_validation(self):
        with pytest.raises(ConfigError):
            EnvironmentParams(a=-1.0, b=0.16, eta_los=1.0, eta_nlos=20.0)
        with pytest.raises(ConfigError):
            EnvironmentParams(a=9.61, b=0.16, eta_los=21.0, eta_nlos=20.0)

    def test_geometry_validation(self):
        with pytest.raises(ConfigError):
            LinkGeometry(d_h=-1.0, d_g=0.0, altitude=60.0)
        with pytest.raises(ConfigError):
            LinkGeometry(d_h=1.0, d_g=0.0, altitude=0.0)

    def test_realization_validation(self):
        with pytest.raises(ConfigError):
            ChannelRealization(gamma=np.array([1.0, 0.0]))
        with pytest.raises(ConfigError):
            ChannelRealization(gamma=np.array([1.0, math.nan]))


class TestSampling:
    BUDGET = LinkBudget(
        lam=10.0 ** (-60.0 / 10.0),
        mu=10.0 ** (-55.0 / 10.0),
        rho=1e10,
        pl_h_db=60.0,
        pl_g_db=55.0,
    )

    def config(self) -> NetworkConfig:
        return default_config(K=1, p_c=(0.1,), m_h=(3,), m_g=(3,))

    def test_mean_matches_gamma_product(self):
        cfg = self.config()
        rng = np.random.default_rng(42)
        gam = sample_gamma_matrix([self.BUDGET], cfg, rng, 10**6)[:, 0]
        shape_h = cfg.m_h[0] * cfg.N_c
        shape_g = cfg.m_g[0] * cfg.N_r
        expected = self.BUDGET.rho * shape_h * self.BUDGET.lam * shape_g * self.BUDGET.mu
        std_err = gam.std(ddof=1) / math.sqrt(gam.size)
        assert abs(gam.mean() - expected) <= 3.0 * std_err

    def test_empirical_cdf_matches_analytic(self):
        # Kolmogorov-Smirnov at the 99% level, evaluated on 199 evenly
        # spaced quantiles of 10^6 draws.
        cfg = self.config()
        rng = np.random.default_rng(42)
        gam = np.sort(sample_gamma_matrix([self.BUDGET], cfg, rng, 10**6)[:, 0])
        n = gam.size
        idx = np.linspace(0, n - 1, 199).round().astype(int)
        worst = 0.0
        for i in idx:
            analytic = gamma_product_cdf(
                float(gam[i]), self.BUDGET, cfg.m_h[0], cfg.N_c, cfg.m_g[0], cfg.N_r
            )
            empirical = (i + 1) / n
            worst = max(worst, abs(analytic - empirical))
        assert worst <= 1.62762 / math.sqrt(n)

    def test_median_maps_to_half(self):
        cfg = self.config()
        rng = np.random.default_rng(42)
        gam = sample_gamma_matrix([self.BUDGET], cfg, rng, 10**6)[:, 0]
        at_median = gamma_product_cdf(
            float(np.median(gam)), self.BUDGET, cfg.m_h[0], cfg.N_c, cfg.m_g[0], cfg.N_r
        )
        assert abs(at_median - 0.5) <= 3.0 * 0.5 / math.sqrt(gam.size)

    def test_bit_reproducible(self):
        cfg = default_config(K=2, p_c=(0.1, 0.1), m_h=(3, 3), m_g=(3, 3))
        budgets = [self.BUDGET, self.BUDGET]
        a = sample_gamma_matrix(budgets, cfg, np.random.default_rng(123), 1000)
        b = sample_gamma_matrix(budgets, cfg, np.random.default_rng(123), 1000)
        assert np.array_equal(a, b)
        one = sample_realization(budgets, cfg, np.random.default_rng(123))
        two = sample_realization(budgets, cfg, np.random.default_rng(123))
        assert np.array_equal(one.gamma, two.gamma)

    def test_budget_count_checked(self):
        cfg = default_config(K=2, p_c=(0.1, 0.1), m_h=(3, 3), m_g=(3, 3))
        with pytest.raises(ConfigError):
            sample_gamma_matrix([self.BUDGET], cfg, np.random.default_rng(0), 10)


class TestEnergy:
    GEOM = LinkGeometry(d_h=50.0, d_g=50.0, altitude=60.0)

    def test_zero_channel(self):
        cfg = default_config()
        budget = make_link_budget(0, cfg, self.GEOM)
        assert harvested_energy(budget, 0.0, cfg, 1e-3) == 0.0

    def test_linear_in_duration(self):
        cfg = default_config()
        budget = make_link_budget(0, cfg, self.GEOM)
        one = harvested_energy(budget, 1e-6, cfg, 1e-3)
        two = harvested_energy(budget, 1e-6, cfg, 2e-3)
        assert two == pytest.approx(2.0 * one, rel=1e-12)

    def test_default_numbers(self):
        # 0.7 * 0.1 W * 1e-6 * (1e6/10) Hz * 1e-3 s = 7e-6 J.
        cfg = default_config()
        budget = make_link_budget(0, cfg, self.GEOM)
        assert harvested_energy(budget, 1e-6, cfg, 1e-3) == pytest.approx(
            7e-6, rel=1e-12
        )

    def test_tx_power_balanced_split(self):
        # tau = 0.5 makes tau/(1-tau) = 1; with the whole band the average
        # transmit power is zeta*p_c*|h|^2/N_s.
        cfg = default_config()
        budget = make_link_budget(0, cfg, self.GEOM)
        p_i = uav_tx_power(budget, 1e-6, cfg, tau=0.5, beta_k=1.0)
        assert p_i == pytest.approx(0.7 * 0.1 * 1e-6 / 10.0, rel=1e-12)

    def test_tx_power_inverse_in_bandwidth_share(self):
        cfg = default_config()
        budget = make_link_budget(0, cfg, self.GEOM)
        wide = uav_tx_power(budget, 1e-6, cfg, tau=0.4, beta_k=0.5)
        narrow = uav_tx_power(budget, 1e-6, cfg, tau=0.4, beta_k=0.25)
        assert narrow == pytest.approx(2.0 * wide, rel=1e-12)

    def test_energy_balance(self):
        # Transmitting at uav_tx_power over the data phase spends exactly
        # the energy harvested over the power-transfer phase.
        cfg = default_config()
        budget = make_link_budget(0, cfg, self.GEOM)
        tau, beta_k, nu_r, block = 0.37, 0.3, 0.1, 6.25e-3
        h_sq = 2.3e-7
        t_transfer = tau * (1.0 - nu_r) * block
        t_data = (1.0 - tau) * (1.0 - nu_r) * block
        spent = uav_tx_power(budget, h_sq, cfg, tau, beta_k) * beta_k * cfg.B * t_data
        harvested = harvested_energy(budget, h_sq, cfg, t_transfer)
        assert spent == pytest.approx(harvested, rel=1e-12)
