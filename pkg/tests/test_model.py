import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from ghostfree import gaussian_states as gs
from ghostfree.errors import (
    LambdaZero,
    OmegaInconsistent,
    SigmaZero,
    SingularChoice,
    ThetaOutOfRange,
)
from ghostfree.model import (
    SECTORS,
    ChainParams,
    ModelParams,
    SectorLabel,
    build_eta0,
    build_eta2,
    build_h0,
    composed_eta2,
    delta_branches,
    derive_H1,
    derive_H2,
    derive_h3,
    energy_levels,
    eta2_constraints,
    gauss_decompose,
    ground_state,
    hermitising_choices,
    level_energy,
    omega_from_constraint,
    closed_form_H1,
    closed_form_H2,
    closed_form_h3,
    sector_params,
    state_chain,
    theta,
)
from ghostfree.operator_algebra import classify_definiteness, is_hermitian
from ghostfree.su2 import eta_minus_map, eta_plus_map, eta_z_map, s_minus, s_plus, s_z
from ghostfree.operator_algebra import bch_adjoint_oracle

# 40-digit reference values computed with mpmath
SQRT2 = 1.41421356237309504880
DELTA_PLUS_1 = 4.531128874149274826
DELTA_MINUS_1 = -3.531128874149274826
DELTA_PLUS_25 = 3.239315346118467299
DELTA_MINUS_25 = -4.939315346118467299
THETA_1 = 1.185241901603416034
THETA_25 = -0.723443110855268987

FIG = ModelParams(4.0, -2.0, 0.0)
FIG2 = ModelParams(4.0, -2.0, 3.0)


def residual_size(H, psi, E):
    return gs.eigen_residual(H, psi, E).size


class TestFrames:
    def test_ghost_sector(self):
        f = sector_params(FIG, SectorLabel(1, 1))
        assert abs(f.alpha - 4) < 1e-12
        assert abs(f.beta + SQRT2) < 1e-12
        assert f.gamma == 0
        assert f.is_real

    def test_normalisable_sector(self):
        f = sector_params(FIG, SectorLabel(-1, 1))
        assert abs(f.alpha - 4) < 1e-12
        assert abs(f.beta - SQRT2) < 1e-12

    def test_sigma_zero(self):
        # sigma = 0 when g^2 = 4 nu^2 Omega; then nu^2 - Omega = 0 needs nu^2 = Omega = g/2
        with pytest.raises(SigmaZero):
            sector_params(ModelParams(1.0, 1.0, 2.0), SectorLabel(1, 1))

    def test_complex_frame_flagged(self):
        f = sector_params(ModelParams(1.0, 2.0, 0.5), SectorLabel(1, 1))
        assert not f.is_real

    @settings(max_examples=250)
    @given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5))
    def test_branch_exactness(self, nu, omega, g):
        for s in SECTORS:
            try:
                f = sector_params(ModelParams(nu, omega, g), s)
            except SigmaZero:
                continue
            scale = max(1.0, abs(f.Sigma), nu * nu, abs(omega), abs(g), abs(f.sigma))
            assert abs(f.alpha * f.Sigma - (2 * nu * nu + f.sigma)) <= 1e-13 * scale
            assert abs(f.beta * f.Sigma - (2 * omega - f.sigma)) <= 1e-13 * scale
            assert abs(f.gamma * f.Sigma + g) <= 1e-13 * scale

    @settings(max_examples=100)
    @given(st.floats(0.3, 5), st.floats(-5, 5), st.floats(-5, 5))
    def test_ground_state_law(self, nu, omega, g):
        p = ModelParams(nu, omega, g)
        for s in SECTORS:
            try:
                f = sector_params(p, s)
            except SigmaZero:
                continue
            assume(abs(f.Sigma) > 1e-3)
            scale = max(1.0, abs(f.alpha) ** 2, abs(f.beta) ** 2, nu * nu, abs(omega), abs(g))
            assert residual_size(build_h0(p), ground_state(f), f.ground_energy) <= 1e-10 * scale

    def test_normalisability_of_ground_states(self):
        assert gs.norm_squared(ground_state(sector_params(FIG, SectorLabel(1, 1)))) is gs.DIVERGENT
        assert gs.norm_squared(ground_state(sector_params(FIG, SectorLabel(-1, 1)))) > 0


class TestSpectrum:
    def test_ground_level(self):
        f = sector_params(FIG, SectorLabel(1, 1))
        levels = energy_levels(f, 0)
        assert len(levels) == 1
        assert levels[0].E == f.ground_energy

    def test_bounded_below(self):
        f = sector_params(FIG, SectorLabel(1, 1))
        real = [lv.E.real for lv in energy_levels(f, 200) if lv.is_real]
        assert min(real) == pytest.approx(4 + SQRT2, abs=1e-12)

    def test_unbounded_below(self):
        f = sector_params(FIG, SectorLabel(-1, 1))
        real = [lv.E.real for lv in energy_levels(f, 200) if lv.is_real]
        assert min(real) < -500
        assert min(real) == pytest.approx(201 * (4 - SQRT2) - 200 * (4 + SQRT2), rel=1e-12)

    @given(st.integers(0, 40))
    def test_index_reflection(self, N):
        f = sector_params(ModelParams(4.0, -2.0, 1.0), SectorLabel(1, 1))
        for n in range(1, N + 2):
            m = N + 2 - n
            for sign in (1, -1):
                assert level_energy(f, N, n, sign) == pytest.approx(level_energy(f, N, m, -sign))

    def test_no_duplicate_levels(self):
        f = sector_params(FIG, SectorLabel(1, 1))
        levels = energy_levels(f, 30)
        keys = [(lv.N, round(lv.E.real, 9), round(lv.E.imag, 9)) for lv in levels]
        assert len(keys) == len(set(keys))

    def test_negative_nmax(self):
        with pytest.raises(ValueError):
            energy_levels(sector_params(FIG, SectorLabel(1, 1)), -1)


class TestMaps:
    def test_h0_signature(self):
        d = classify_definiteness(build_h0(ModelParams(1, 1, 0)))
        assert d.kinetic_signature == ("+", "-")

    def test_eta0_row(self):
        assert build_eta0(0.3, 0.7).image("px") == {"x": -0.3j, "px": 1}

    def test_eta2_row(self):
        t = 0.45
        S = build_eta2(t, t).S
        assert S[0, 0] == pytest.approx(math.cosh(t), abs=1e-15)
        assert S[0, 3] == pytest.approx(-1j * math.sinh(t), abs=1e-15)

    def test_eta2_identity(self):
        assert np.array_equal(build_eta2(0.0, 0.0).S, np.eye(4))


class TestHermitisingChoices:
    def test_examples(self):
        assert hermitising_choices(4, -2, 0, 1) == (0.0, -1.0)
        kappa, xi = hermitising_choices(2, 3, 1, 1)
        assert kappa == pytest.approx(-1 / 3) and xi == pytest.approx(0.25)

    def test_singular(self):
        with pytest.raises(SingularChoice):
            hermitising_choices(2, 3, 2, 1)
        with pytest.raises(SingularChoice):
            hermitising_choices(2, -1, 0.5, 1)


def assert_forms_close(a, b, tol):
    assert np.abs(a.M - b.M).max() <= tol
    assert abs(a.shift - b.shift) <= tol


class TestDerivations:
    def test_H1_identity(self):
        p = ModelParams(4.0, -2.0, 1.0)
        assert_forms_close(derive_H1(p, 0.0, 0.0), build_h0(p), 0)

    @given(st.floats(-3, 3), st.floats(-3, 3))
    def test_H1_closed_form(self, delta, lam):
        p = ModelParams(4.0, -2.0, 1.0)
        assert_forms_close(derive_H1(p, delta, lam), closed_form_H1(p, delta, lam), 1e-10)

    @given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))
    def test_H2_closed_form(self, delta, lam, g):
        p = ModelParams(4.0, -2.0, g)
        assume(abs(delta**2 - 16) > 0.1 and abs(lam**2 - 2) > 0.1)
        H2 = derive_H2(p, delta, lam)
        scale = max(1.0, np.abs(H2.M).max())
        assert_forms_close(H2, closed_form_H2(p, delta, lam), 1e-10 * scale)
        assert abs(H2.coefficient("x", "px")) < 1e-12 * scale
        assert abs(H2.coefficient("y", "py")) < 1e-12 * scale

    @pytest.mark.parametrize("lam, kind", [(1.0, "difference"), (2.0, "sum"), (-3.0, "sum")])
    def test_H2_oscillators_at_zero_coupling(self, lam, kind):
        H2 = derive_H2(FIG, 0.0, lam)
        assert is_hermitian(H2)[0]
        d = classify_definiteness(H2)
        expected = ("+", "-") if kind == "difference" else ("+", "+")
        assert d.kinetic_signature == expected

    def test_h3_sample(self):
        chain = ChainParams.hermitising(FIG2, DELTA_PLUS_25, 2.5)
        h3 = derive_h3(FIG2, chain)
        flag, residual = is_hermitian(h3)
        assert flag and residual < 1e-10
        assert_forms_close(h3, closed_form_h3(FIG2, DELTA_PLUS_25, 2.5), 1e-10)
        d = classify_definiteness(h3)
        assert d.kinetic_signature == ("+", "+")
        assert d.form == "positive definite"

    @pytest.mark.parametrize("lam", [2.2, 3.0, -2.5, 0.5, -0.9])
    def test_h3_closed_form_on_plus_branch(self, lam):
        delta = delta_branches(lam, 4.0, -2.0)[0]
        h3 = derive_h3(FIG2, ChainParams.hermitising(FIG2, delta, lam))
        assert is_hermitian(h3)[0]
        assert_forms_close(h3, closed_form_h3(FIG2, delta, lam), 1e-10 * max(1.0, np.abs(h3.M).max()))


class TestEigenResiduals:
    @pytest.mark.parametrize("lam", [2.5, -2.5, 0.5, 3.5])
    def test_chain_stages(self, lam):
        delta = delta_branches(lam, 4.0, -2.0)[0]
        chain = ChainParams.hermitising(FIG2, delta, lam)
        H2 = derive_H2(FIG2, delta, lam)
        h3 = derive_h3(FIG2, chain)
        for s in SECTORS:
            f = sector_params(FIG2, s)
            psi = ground_state(f)
            steps = state_chain(chain)
            psi2 = steps[1](steps[0](psi))
            phi3 = steps[2](psi2)
            assert residual_size(H2, psi2, f.ground_energy) < 1e-9
            assert residual_size(h3, phi3, f.ground_energy) < 1e-9


class TestConstraints:
    def test_theta_out_of_range(self):
        assert theta(FIG2, DELTA_PLUS_1, 1.0) == pytest.approx(THETA_1, abs=1e-12)
        with pytest.raises(ThetaOutOfRange):
            eta2_constraints(FIG2, DELTA_PLUS_1, 1.0)

    def test_sample_valid(self):
        con = eta2_constraints(FIG2, DELTA_PLUS_25, 2.5)
        assert con.Theta == pytest.approx(THETA_25, abs=1e-12)
        assert con.omega_consistent
        assert con.mu * con.tau == pytest.approx(math.atanh(con.Theta) ** 2 / 4)

    def test_zero_coupling(self):
        con = eta2_constraints(FIG, DELTA_PLUS_25, 2.5)
        assert con.Theta == 0 and con.mu == 0 and con.tau == 0

    def test_omega_inconsistent(self):
        with pytest.raises(OmegaInconsistent):
            eta2_constraints(FIG2, 1.0, 2.5)


class TestDeltaBranches:
    def test_values(self):
        dp, dm = delta_branches(1.0, 4.0, -2.0)
        assert dp == pytest.approx(DELTA_PLUS_1, abs=1e-12)
        assert dm == pytest.approx(DELTA_MINUS_1, abs=1e-12)
        dp, dm = delta_branches(2.5, 4.0, -2.0)
        assert dp == pytest.approx(DELTA_PLUS_25, abs=1e-12)
        assert dm == pytest.approx(DELTA_MINUS_25, abs=1e-12)

    @given(st.floats(0.05, 5) | st.floats(-5, -0.05), st.floats(0.5, 5), st.floats(-5, 5))
    def test_round_trip(self, lam, nu, omega):
        for d in delta_branches(lam, nu, omega):
            assume(abs(d) > 1e-3)
            assert omega_from_constraint(nu, d, lam) == pytest.approx(omega, abs=1e-10 * max(1.0, nu * nu, lam * lam / abs(d)))

    def test_lambda_zero(self):
        with pytest.raises(LambdaZero):
            delta_branches(0.0, 4.0, -2.0)


class TestGaussDecomposition:
    def test_equal_parameters(self):
        t = 0.8
        f = gauss_decompose(t, t)
        assert f.zeta_plus == pytest.approx(math.tanh(t))
        assert f.zeta_minus == pytest.approx(math.tanh(t))
        assert f.zeta_z == pytest.approx(1 / math.cosh(t) ** 2)

    def test_small_limit(self):
        f = gauss_decompose(1e-5, 2e-5)
        assert f.zeta_plus == pytest.approx(2e-5, rel=1e-9)
        assert f.zeta_minus == pytest.approx(1e-5, rel=1e-9)
        assert f.zeta_z == pytest.approx(1.0, abs=1e-9)

    @settings(max_examples=100)
    @given(st.floats(-1, 1), st.floats(-1, 1))
    def test_composed_equals_direct(self, mu, tau):
        assert np.abs(composed_eta2(mu, tau).S - build_eta2(mu, tau).S).max() <= 1e-12

    @pytest.mark.parametrize("mu, tau", [(0.7, -0.9), (-1.0, 0.4), (1e-5, 1e-5), (3e-9, -2e-1), (0.0, 0.6)])
    def test_composed_edge_cases(self, mu, tau):
        assert np.abs(composed_eta2(mu, tau).S - build_eta2(mu, tau).S).max() <= 1e-12

    @settings(max_examples=100)
    @given(st.floats(-1, 1))
    def test_factor_maps_match_oracle(self, z):
        for closed, gen in (
            (eta_minus_map(z), s_minus(z)),
            (eta_plus_map(z), s_plus(z)),
        ):
            assert np.abs(closed.S - bch_adjoint_oracle(gen, 30).S).max() <= 1e-10
        zeta = math.exp(z)
        assert np.abs(eta_z_map(zeta).S - bch_adjoint_oracle(s_z(z), 30).S).max() <= 1e-10
