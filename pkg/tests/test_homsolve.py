import math

import numpy as np
import pytest

from nhcomp import homsolve as hs
from nhcomp.materials import ModelSpec, cauchy_stress, params_from_mu_nu
from nhcomp.volfun import catalog, evaluate

MU = 2.53
NU = 0.34
LAM_REF = 5.37625
K_REF = 7.062916666666667

rng = np.random.default_rng(77113)


def mixed(vid, mu=MU, nu=NU):
    return ModelSpec.mixed(catalog()[vid], mu, nu)


def voliso(vid, mu=MU, nu=NU):
    return ModelSpec.vol_iso(catalog()[vid], mu, nu)


class TestIncompressibleClosedForms:
    def test_undeformed(self):
        for case in hs.CASES:
            r = hs.solve_incompressible(case, 1.0, mu=MU)
            assert r.lambda_T == 1.0
            assert r.J == 1.0
            assert r.sigma11 == 0.0
            assert r.P11 == 0.0

    def test_uniaxial_at_two(self):
        r = hs.solve_incompressible("ul", 2.0, mu=MU)
        assert r.lambda_T == pytest.approx(2.0**-0.5, rel=1e-15)
        assert r.sigma11 == pytest.approx(3.5 * MU, rel=1e-15)
        assert r.P11 == pytest.approx(1.75 * MU, rel=1e-15)
        assert r.sigma22 == 0.0
        assert r.P22 == 0.0

    def test_equibiaxial_at_two(self):
        r = hs.solve_incompressible("elp", 2.0, mu=MU)
        assert r.lambda_T == pytest.approx(2.0**-2, rel=1e-15)
        assert r.sigma11 == pytest.approx(3.9375 * MU, rel=1e-15)
        assert r.sigma22 == r.sigma11
        assert r.P11 == pytest.approx(1.96875 * MU, rel=1e-15)
        assert r.P22 == r.P11

    def test_plane_strain_at_two(self):
        r = hs.solve_incompressible("ulp", 2.0, mu=MU)
        assert r.lambda_T == 0.5
        assert r.sigma11 == pytest.approx(3.75 * MU, rel=1e-15)
        assert r.sigma22 == pytest.approx(0.75 * MU, rel=1e-15)
        assert r.P11 == pytest.approx(1.875 * MU, rel=1e-15)
        assert r.P22 == pytest.approx(0.75 * MU, rel=1e-15)

    def test_plane_strain_transverse_limit(self):
        # the second (held) direction carries +mu in the extreme
        r = hs.solve_incompressible("ulp", 1e6, mu=MU)
        assert r.sigma22 == pytest.approx(MU, rel=1e-11)
        assert r.P22 == pytest.approx(MU, rel=1e-11)

    def test_matches_full_stress_evaluation(self):
        model = ModelSpec.incompressible(MU)
        for case, lam in (("ul", 1.7), ("elp", 0.6), ("ulp", 2.4)):
            r = hs.solve_incompressible(case, lam, mu=MU)
            F = hs.case_F(case, lam, r.lambda_T)
            # the transverse constraint fixes the pressure
            if case == "ul":
                p = MU * (r.lambda_T**2 - 1.0)
            else:
                p = MU * (r.lambda_T**2 - 1.0)
            s = cauchy_stress(model, F, p=p)
            assert r.sigma11 == pytest.approx(s.cauchy[0, 0], rel=1e-12)
            assert r.P11 == pytest.approx(s.first_pk[0, 0], rel=1e-12)


class TestResidual:
    def test_zero_poisson_keeps_transverse_stretch_one(self):
        for vid in range(1, 9):
            model = mixed(vid, nu=0.0)
            for case in hs.CASES:
                for lam in (0.3, 1.0, 2.5):
                    assert hs.residual(case, model, lam, 1.0) == 0.0

    def test_undeformed_state(self):
        for vid in (2, 7):
            assert hs.residual("ul", voliso(vid), 1.0, 1.0) == 0.0
            assert hs.residual("elp", voliso(vid), 1.0, 1.0) == 0.0

    def test_vanishes_at_incompressible_root_as_nu_rises(self):
        lam = 2.0
        lamT_inc = lam**-0.5
        prev = math.inf
        for nu in (0.45, 0.499, 0.4999):
            model = mixed(2, mu=1.0, nu=nu)
            prm = model.params
            rel = abs(hs.residual("ul", model, lam, lamT_inc)) / (prm.mu + prm.lam + prm.K)
            assert rel < prev
            prev = rel
        assert prev < 1e-4

    def test_incompressible_has_no_residual(self):
        with pytest.raises(ValueError):
            hs.residual("ul", ModelSpec.incompressible(MU), 2.0, 1.0)

    def test_rejects_nonpositive_stretch(self):
        with pytest.raises(ValueError):
            hs.residual("ul", mixed(1), -1.0, 1.0)


class TestQuadraticClosedForm:
    def test_undeformed_root(self):
        prm = params_from_mu_nu(MU, NU)
        for case in hs.CASES:
            assert hs.closed_form_quadratic_mixed(case, 1.0, prm) == pytest.approx(1.0, rel=1e-14)

    def test_zero_poisson_reduces_to_one(self):
        prm = params_from_mu_nu(MU, 0.0)
        for case in hs.CASES:
            assert hs.closed_form_quadratic_mixed(case, 2.0, prm) == pytest.approx(1.0, rel=1e-14)

    def test_uniaxial_radical_frozen(self):
        prm = params_from_mu_nu(1.0, 0.25)  # lame lambda = 1
        assert prm.lam == pytest.approx(1.0, rel=1e-14)
        lamT = hs.closed_form_quadratic_mixed("ul", 2.0, prm)
        assert lamT == pytest.approx(math.sqrt((1.0 + math.sqrt(17.0)) / 8.0), rel=1e-14)
        assert lamT == pytest.approx(0.80024259, abs=5e-8)

    def test_solver_agrees_with_radical(self):
        prm = params_from_mu_nu(1.0, 0.25)
        model = ModelSpec.mixed(catalog()[7], 1.0, 0.25)
        for case in hs.CASES:
            want = hs.closed_form_quadratic_mixed(case, 2.0, prm)
            got = hs.solve(case, model, 2.0).lambda_T
            assert got == pytest.approx(want, rel=1e-10)

    def test_rejects_other_volfun(self):
        with pytest.raises(ValueError):
            hs.closed_form_quadratic_mixed("ul", 2.0, params_from_mu_nu(MU, NU), catalog()[1])


class TestSolve:
    def test_undeformed_every_model(self):
        for vid in range(1, 9):
            for model in (mixed(vid), voliso(vid)):
                r = hs.solve("ul", model, 1.0)
                assert r.converged
                assert r.lambda_T == pytest.approx(1.0, abs=1e-12)
                for v in (r.sigma11, r.sigma22, r.P11, r.P22):
                    assert abs(v) <= 1e-10 * MU

    def test_routes_incompressible(self):
        model = ModelSpec.incompressible(MU)
        r = hs.solve("elp", model, 1.5)
        want = hs.solve_incompressible("elp", 1.5, mu=MU)
        assert r == want

    def test_eliminated_stresses_vanish(self):
        for vid in (1, 4, 6, 8):
            for model in (mixed(vid), voliso(vid)):
                for case, lam in (("ul", 1.9), ("elp", 0.55), ("ulp", 3.1)):
                    r = hs.solve(case, model, lam)
                    assert r.converged
                    sig = cauchy_stress(model, hs.case_F(case, lam, r.lambda_T)).cauchy
                    bound = 1e-10 * (abs(r.sigma11) + MU)
                    assert abs(sig[2, 2]) <= bound
                    if case == "ul":
                        assert abs(sig[1, 1]) <= bound

    def test_first_pk_relations(self):
        model = voliso(3)
        r = hs.solve("ulp", model, 2.2)
        assert r.P11 == pytest.approx(r.lambda_T * r.sigma11, rel=1e-12)
        assert r.P22 == pytest.approx(r.J * r.sigma22, rel=1e-12)
        r = hs.solve("ul", model, 2.2)
        assert r.P11 == pytest.approx(r.lambda_T**2 * r.sigma11, rel=1e-12)

    def test_volumetric_trace_shortcut(self):
        for vid in (2, 5, 8):
            model = voliso(vid, nu=0.3)
            for case, factor in (("ul", 3.0), ("elp", 1.5)):
                r = hs.solve(case, model, 1.8)
                want = factor * model.params.K * evaluate(model.volfun, r.J).hp
                assert r.sigma11 == pytest.approx(want, rel=1e-8)
                direct = cauchy_stress(model, hs.case_F(case, 1.8, r.lambda_T)).cauchy
                assert r.sigma11 == pytest.approx(float(direct[0, 0]), rel=1e-8)

    def test_assembly_matches_tensor_evaluation(self):
        for vid in (1, 6):
            for model in (mixed(vid), voliso(vid)):
                for case, lam in (("ul", 2.3), ("elp", 0.7), ("ulp", 1.6)):
                    r = hs.solve(case, model, lam)
                    s = cauchy_stress(model, hs.case_F(case, lam, r.lambda_T))
                    pairs = [
                        (r.sigma11, s.cauchy[0, 0]),
                        (r.sigma22, s.cauchy[1, 1]),
                        (r.P11, s.first_pk[0, 0]),
                        (r.P22, s.first_pk[1, 1]),
                    ]
                    for got, want in pairs:
                        assert got == pytest.approx(float(want), rel=1e-9, abs=1e-9 * MU)

    def test_quadratic_voliso_strong_compression(self):
        model = voliso(7, mu=1.0, nu=0.3)
        r = hs.solve("ul", model, 1e-6)
        assert r.converged
        assert r.sigma11 == pytest.approx(-3.0 * model.params.K, rel=0.01)

    def test_zero_poisson_mixed_exact(self):
        lam = 1.7
        for vid in (1, 4, 7, 8):
            model = mixed(vid, nu=0.0)
            r = hs.solve("ul", model, lam)
            assert r.lambda_T == pytest.approx(1.0, abs=1e-12)
            want = MU * (lam - 1.0 / lam)
            assert r.sigma11 == pytest.approx(want, rel=1e-12)
            assert r.P11 == pytest.approx(want, rel=1e-12)

            r = hs.solve("elp", model, lam)
            assert r.sigma11 == pytest.approx(MU * (1.0 - lam**-2), rel=1e-12)
            assert r.P11 == pytest.approx(MU * (lam - 1.0 / lam), rel=1e-12)

            r = hs.solve("ulp", model, lam)
            assert abs(r.sigma22) <= 1e-12 * MU
            assert abs(r.P22) <= 1e-12 * MU
            assert r.sigma11 == pytest.approx(MU * (lam - 1.0 / lam), rel=1e-12)

    def test_residual_within_tolerance(self):
        model = mixed(3)
        r = hs.solve("ul", model, 2.0)
        prm = model.params
        assert abs(r.residual) <= 1e-12 * (prm.mu + prm.lam + prm.K)

    def test_near_incompressible_tracks_closed_forms(self):
        # at nu = 0.4999 every catalog model stays within 1% of the
        # incompressible solution over moderate stretches
        for case in hs.CASES:
            for lam in (0.5, 2.0):
                want = hs.solve_incompressible(case, lam, mu=MU)
                for vid in range(1, 9):
                    for model in (mixed(vid, nu=0.4999), voliso(vid, nu=0.4999)):
                        got = hs.solve(case, model, lam)
                        assert got.converged
                        assert got.lambda_T == pytest.approx(want.lambda_T, rel=0.01)
                        assert got.sigma11 == pytest.approx(want.sigma11, rel=0.01)
                        assert got.P11 == pytest.approx(want.P11, rel=0.01)

    def test_no_root_in_restricted_bracket(self):
        cfg = hs.SolveConfig(bracket_lo=1e6, bracket_hi=1e9)
        with pytest.raises(hs.SolveError) as err:
            hs.solve("ul", voliso(2), 1.0, cfg)
        assert err.value.diagnostics["lam"] == 1.0

    def test_log_approx_mode_close_but_distinct(self):
        model = voliso(1, nu=0.3)
        exact = hs.solve("ul", model, 3.0)
        approx = hs.solve("ul", model, 3.0, hs.SolveConfig(log_approx=True))
        assert approx.converged
        assert approx.lambda_T == pytest.approx(exact.lambda_T, rel=1e-2)
        assert approx.lambda_T != exact.lambda_T


class TestSweep:
    def test_grid_specs(self):
        spec = hs.SweepSpec(0.1, 10.0, 5)
        np.testing.assert_allclose(spec.grid(), np.logspace(-1, 1, 5), rtol=1e-14)
        spec = hs.SweepSpec(1.0, 3.0, 3, log=False)
        np.testing.assert_allclose(spec.grid(), [1.0, 2.0, 3.0], rtol=1e-14)
        with pytest.raises(ValueError):
            hs.SweepSpec(-1.0, 2.0, 5)
        with pytest.raises(ValueError):
            hs.SweepSpec(1.0, 2.0, 0)

    def test_continuation_produces_converged_rows(self):
        lams = hs.SweepSpec(0.2, 5.0, 25).grid()
        results = hs.sweep("ul", voliso(4), lams)
        assert len(results) == len(lams)
        assert all(r.converged for r in results)
        lamTs = [r.lambda_T for r in results]
        assert all(np.isfinite(lamTs))

    def test_quadratic_models_flag_non_monotone(self):
        lams = hs.SweepSpec(0.1, 10.0, 81).grid()
        for model in (mixed(7, nu=0.25), voliso(7, nu=0.25)):
            hits = hs.non_monotone_quantities(hs.sweep("ulp", model, lams))
            assert "P22" in hits
        hits = hs.non_monotone_quantities(hs.sweep("ul", voliso(7, nu=0.25), lams))
        assert "P11" in hits

    def test_power_models_monotonicity_map(self):
        # the only direction change for the steep volumetric functions is the
        # held-direction nominal stress in plane strain for the vol-iso kind:
        # P22 = mu J^(-2/3) (1 - lamT^2) rises from 0 but decays back toward 0
        # once volume growth outpaces the shrinking transverse stretch
        lams = hs.SweepSpec(0.1, 10.0, 41).grid()
        for vid in (4, 8):
            for model in (mixed(vid, nu=0.25), voliso(vid, nu=0.25)):
                for case in hs.CASES:
                    hits = hs.non_monotone_quantities(hs.sweep(case, model, lams))
                    if model.kind == "voliso" and case == "ulp":
                        assert hits == ("P22",), (vid, case, hits)
                    else:
                        assert hits == (), (vid, model.kind, case, hits)


class TestLimitClassifier:
    def test_synthetic_triples(self):
        cl = hs._classify
        assert cl((1.0, 1.001, 1.0005)).label == "finite"
        assert cl((1.0, 1.001, 1.0005)).constant == pytest.approx(1.0005)
        assert cl((2.0, 30.0, 400.0)).label == "+inf"
        assert cl((-2.0, -30.0, -400.0)).label == "-inf"
        assert cl((0.4, 0.03, 0.002)).label == "0"
        assert cl((0.0, 0.0, 0.0)).label == "0"
        assert cl((1.0, 1.3, 1.7)).label == "+inf"
        assert cl((1.0, -2.0, 4.0)).label == "unresolved"
        assert cl((math.nan, 1.0, 1.0)).label == "unresolved"
        assert cl((5.0, math.inf, math.inf)).label == "+inf"
        assert cl((5.0, -math.inf, math.inf)).label == "unresolved"

    def test_finite_wins_over_trend(self):
        # slow monotone approach to a constant must not read as growth
        assert hs._classify((3.0, 3.02, 3.021)).label == "finite"

    def test_str_forms(self):
        assert str(hs.LimitClass("+inf")) == "+inf"
        assert str(hs.LimitClass("finite", constant=2.5)) == "finite(2.5)"


class TestLimitProbe:
    def test_mixed_power5_compression(self):
        out = hs.limit_probe("ul", mixed(4), "to_zero")
        assert out["lambda_T"].label == "+inf"
        assert out["sigma11"].label == "-inf"
        assert out["P11"].label == "-inf"

    def test_voliso_log_extension(self):
        out = hs.limit_probe("ul", voliso(1), "to_infinity")
        assert out["lambda_T"].label == "+inf"
        assert out["sigma11"].label == "0"
        assert out["P11"].label == "0"

    def test_mixed_quadratic_compression_transverse_finite(self):
        out = hs.limit_probe("ul", mixed(7), "to_zero")
        assert out["lambda_T"].label == "finite"
        assert out["lambda_T"].constant == pytest.approx(1.0, abs=1e-3)

    def test_ulp_reports_extra_quantities(self):
        out = hs.limit_probe("ulp", mixed(7), "to_infinity")
        assert set(out) == {"lambda_T", "sigma11", "P11", "sigma22", "P22"}
        # held-direction nominal stress tends to +mu for every mixed model
        assert out["P22"].label == "finite"
        assert out["P22"].constant == pytest.approx(MU, rel=0.01)

    def test_rejects_bad_direction(self):
        with pytest.raises(ValueError):
            hs.limit_probe("ul", mixed(1), "sideways")


class TestDilatation:
    def test_undeformed(self):
        assert hs.dilatation_response(mixed(3), 1.0) == 0.0
        assert hs.dilatation_response(voliso(3), 1.0) == 0.0

    def test_voliso_is_volumetric_derivative(self):
        for vid in range(1, 9):
            model = voliso(vid)
            for k in (0.6, 1.3):
                want = model.params.K * evaluate(model.volfun, k**3).hp
                assert hs.dilatation_response(model, k) == want

    def test_mixed_quadratic_frozen(self):
        got = hs.dilatation_response(mixed(7), 2.0)
        assert got == pytest.approx(0.375 * MU + 7.0 * LAM_REF, rel=1e-14)

    def test_matches_mean_stress(self):
        for vid in range(1, 9):
            for model in (mixed(vid), voliso(vid)):
                for k in (0.5, 0.9, 1.1, 2.0):
                    want = cauchy_stress(model, k * np.eye(3)).mean_stress
                    got = hs.dilatation_response(model, k)
                    assert got == pytest.approx(want, rel=1e-12, abs=1e-12 * MU)

    def test_rejects_incompressible(self):
        with pytest.raises(ValueError):
            hs.dilatation_response(ModelSpec.incompressible(MU), 1.1)


class TestScanHelpers:
    def test_sign_brackets(self):
        us = np.array([0.0, 1.0, 2.0, 3.0])
        fs = np.array([1.0, -1.0, -2.0, 3.0])
        br = hs._sign_brackets(us, fs)
        assert [(a, b) for a, b, _ in br] == [(0.0, 1.0), (2.0, 3.0)]
        fs = np.array([2.0, 0.0, -3.0, math.nan])
        br = hs._sign_brackets(us, fs)
        assert br[0][0] == br[0][1] == 1.0
