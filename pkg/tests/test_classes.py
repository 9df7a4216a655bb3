import math

import numpy as np
import pytest

from conftest import (
    circuit_realizations,
    f_s2_over_s1,
    f_s3_over_s1,
    scalar_realization,
    singular_weight_family,
    transfer_gap,
)
from kypcert.classes import (
    FrequencyGrid,
    affine_hb_maps,
    beta_max,
    canonical_check,
    cayley_function,
    disk_params,
    left_conjugate,
    sp_margin,
    sweep_membership,
    t_ray_max,
)
from kypcert.qmi import ClassSpec
from kypcert.realization import Realization, evaluate_grid, function_inverse


def canonical_scalar(c: float) -> Realization:
    # (3s + c/3)/(s + c) = 3 - (8c/3)/(s + c)
    return scalar_realization(-c, 1.0, c / 3.0 - 3.0 * c, 3.0)


def lossless_integrator() -> Realization:
    return scalar_realization(0.0, 1.0, 1.0, 0.0)  # 1/s


class TestFrequencyGrid:
    def test_default_shape(self):
        g = FrequencyGrid.default()
        assert g.omegas.size == 402  # 0 plus 401 log-spaced
        assert g.omegas[0] == 0.0
        assert g.include_infinity

    def test_rejects_negative(self):
        with pytest.raises(ValueError, match="nonnegative"):
            FrequencyGrid(omegas=[-1.0, 0.0])

    def test_sorts(self):
        g = FrequencyGrid(omegas=[3.0, 1.0, 2.0])
        assert list(g.omegas) == [1.0, 2.0, 3.0]


class TestSweepMembership:
    def test_scalar_boundary_weight(self):
        rep = sweep_membership(f_s2_over_s1(), ClassSpec("HP", 0.8))
        assert rep.member
        assert abs(rep.min_slack) < 1e-7
        assert rep.argmin_omega == 0.0

    def test_canonical_slack_vanishes_everywhere(self):
        rep = sweep_membership(canonical_scalar(1.0), ClassSpec("HP", 0.6))
        assert rep.member
        assert abs(rep.min_slack) <= 1e-8

    def test_lossless_integrator_is_odd_positive(self):
        rep = sweep_membership(lossless_integrator(), ClassSpec("PO"))
        assert rep.member
        assert rep.pole_omegas == (0.0,)
        assert rep.points_used >= 3

    def test_lossless_integrator_fails_quantitative(self):
        rep = sweep_membership(lossless_integrator(), ClassSpec("HP", 0.1))
        assert not rep.member
        assert not rep.analyticity_ok

    def test_shifted_function_not_positive(self):
        rep = sweep_membership(scalar_realization(-1.0, 1.0, 1.0, -0.9),
                               ClassSpec("P"))
        assert not rep.member

    def test_rectangular_rejected(self):
        R = Realization(A=[[-1.0]], B=[[1.0]], C=[[1.0], [1.0]], D=[[0.0], [0.0]])
        with pytest.raises(ValueError, match="square"):
            sweep_membership(R, ClassSpec("P"))

    def test_complex_coefficients_mirror_the_grid(self):
        # the response of this system is asymmetric in omega; its least
        # slack sits near omega = -5, which only the mirrored grid visits
        R = Realization(A=[[-1.0 - 5.0j]], B=[[1.0]], C=[[1.0]], D=[[1.0]])
        rep = sweep_membership(R, ClassSpec("HP", 0.9))
        assert not rep.member
        assert rep.argmin_omega < 0.0
        one_sided = sweep_membership(
            Realization(A=[[-1.0 + 5.0j]], B=[[1.0]], C=[[1.0]], D=[[1.0]]),
            ClassSpec("HP", 0.9),
        )
        # conjugate system: same minimum at the opposite frequency sign
        assert abs(one_sided.min_slack - rep.min_slack) < 1e-12
        assert one_sided.argmin_omega == -rep.argmin_omega

    def test_bounded_class_sweep(self):
        g = cayley_function(f_s2_over_s1())
        assert sweep_membership(g, ClassSpec("B")).member
        big = Realization(A=[[-1.0]], B=[[1.0]], C=[[2.0]], D=[[0.0]])  # peak 2
        assert not sweep_membership(big, ClassSpec("B")).member


class TestBetaMax:
    def test_known_scalar(self):
        assert abs(beta_max(f_s2_over_s1()).value - 0.8) < 1e-6

    def test_second_scalar(self):
        assert abs(beta_max(f_s3_over_s1()).value - 0.6) < 1e-6

    def test_truncated_family_value(self):
        gamma = math.sqrt(2.0 / 3.0)
        R = Realization(
            A=np.diag([-1.0, -2.0]),
            B=gamma * np.ones((2, 1)),
            C=gamma * np.ones((1, 2)),
            D=[[1.0]],
        )
        assert abs(beta_max(R).value - 0.8) < 1e-6

    def test_closed_form_cross_check(self, fast_grid):
        # scalar oracle: 1/beta = sup (|f|^2 + 1)/(2 Re f) over the axis
        rng = np.random.default_rng(17)
        for _ in range(10):
            R = scalar_realization(
                -rng.uniform(0.5, 2.0), rng.uniform(0.5, 1.5),
                rng.uniform(0.5, 1.5), rng.uniform(1.0, 3.0),
            )
            om = np.concatenate([[0.0], np.logspace(-6, 6, 4001)])
            f = evaluate_grid(R, 1j * om)[:, 0, 0]
            vals = (np.abs(f) ** 2 + 1.0) / (2.0 * f.real)
            vals = np.append(vals, (abs(R.D[0, 0]) ** 2 + 1) / (2 * R.D[0, 0].real))
            oracle = 1.0 / vals.max()
            assert abs(beta_max(R, grid=fast_grid, tol=1e-9).value - oracle) < 1e-5

    def test_merely_positive_flag(self):
        res = beta_max(lossless_integrator())
        assert res.value == 0.0 and res.empty


class TestTRayMax:
    def test_identity_direction_matches_beta(self, fast_grid):
        R = f_s2_over_s1()
        ray = t_ray_max(R, np.eye(1), grid=fast_grid)
        assert abs(ray.value - beta_max(R, grid=fast_grid).value) < 1e-6

    def test_singular_direction_reaches_half(self):
        ray = t_ray_max(singular_weight_family(1.0), np.diag([1.0, 0.0]))
        assert ray.value >= 0.5 - 1e-6

    def test_isotropic_direction_empty(self):
        ray = t_ray_max(singular_weight_family(1.0), np.eye(2))
        assert ray.value == 0.0 and ray.empty


class TestSpMargin:
    def test_simple_lag(self):
        m = sp_margin(scalar_realization(-1.0, 1.0, 1.0, 0.0))
        assert 0.0 < m < 1.0
        # monotonicity: any smaller shift stays positive
        for eps in (0.25 * m, 0.5 * m, 0.9 * m):
            shifted = scalar_realization(-1.0 + eps, 1.0, 1.0, 0.0)
            assert sweep_membership(shifted, ClassSpec("P")).member

    def test_axis_pole_has_no_margin(self):
        assert sp_margin(lossless_integrator()) == 0.0

    def test_quantitative_implies_strict(self):
        R = f_s2_over_s1()
        assert beta_max(R).value > 0.0
        assert sp_margin(R) > 0.0
        assert (R.D + R.D.conj().T)[0, 0].real > 0.0


class TestCayleyFunction:
    def test_figure_map(self):
        g1 = cayley_function(f_s3_over_s1())
        om = np.logspace(-3, 3, 100)
        got = evaluate_grid(g1, 1j * om)[:, 0, 0]
        assert np.abs(got + 1.0 / (1j * om + 2.0)).max() < 1e-10

    def test_constant_identity_maps_to_zero(self):
        G = cayley_function(Realization.constant(np.eye(2)))
        assert np.abs(G.D).max() < 1e-15

    def test_involution(self):
        R = f_s2_over_s1()
        back = cayley_function(cayley_function(R))
        svals = 1j * np.concatenate([[0.0], np.logspace(-3, 3, 100)])
        assert transfer_gap(back, R, svals) < 1e-9

    def test_rejects_minus_one_feedthrough(self):
        with pytest.raises(ValueError, match="-1"):
            cayley_function(Realization.constant([[-1.0]]))


class TestAffineMaps:
    def test_figure_values(self):
        g2, g3 = affine_hb_maps(f_s3_over_s1(), 0.6)
        om = np.logspace(-3, 3, 100)
        s = 1j * om
        got2 = evaluate_grid(g2, s)[:, 0, 0]
        assert np.abs(got2 - (2.0 - s) / (4.0 * (s + 1.0))).max() < 1e-10
        got3 = evaluate_grid(g3, s)[:, 0, 0]
        assert np.abs(got3 + got2).max() < 1e-14

    def test_membership_transfers(self, fast_grid):
        g2, g3 = affine_hb_maps(f_s3_over_s1(), 0.6)
        for g in (g2, g3):
            assert sweep_membership(g, ClassSpec("HB", 0.6), fast_grid).member

    def test_fixed_point(self):
        Tinv = 1.0 / 0.4
        G2, _ = affine_hb_maps(Realization.constant([[Tinv]]), 0.4)
        assert np.abs(G2.D).max() < 1e-12

    def test_rejects_singular_weight(self):
        with pytest.raises(ValueError, match="nonsingular"):
            affine_hb_maps(f_s3_over_s1(), np.diag([0.0]))


class TestLeftConjugate:
    def test_real_scalar_zero_weight_identity(self):
        R = f_s2_over_s1()
        out = left_conjugate(R, 0.0)
        svals = np.linspace(0.5, 10.0, 25)  # real axis points
        assert transfer_gap(out, R, svals) < 1e-12

    def test_membership_preserved(self, fast_grid):
        R = f_s2_over_s1()
        out = left_conjugate(R, 0.8)
        a = sweep_membership(R, ClassSpec("HP", 0.8), fast_grid).member
        b = sweep_membership(out, ClassSpec("HP", 0.8), fast_grid).member
        assert a and b

    def test_constant_counterexample_equivalence(self):
        # the right-class failure of the constant function transfers
        F = 0.25 * np.array([[1.0, 1.0], [0.0, 3.0]])
        T = 0.2 * np.diag([2.0, 3.0])
        R = Realization.constant(F)
        out = left_conjugate(R, T)
        spec = ClassSpec("HP", T)
        a = sweep_membership(R, spec)
        b = sweep_membership(out, spec)
        assert not a.member and not b.member
        # both slacks frozen from the independent eigensolve
        assert abs(a.min_slack - (-0.016397739)) < 1e-8
        assert abs(b.min_slack - (-0.017036510)) < 1e-8


class TestDiskParams:
    def test_three_fifths(self):
        pair = disk_params(0.6)
        assert abs(pair.center_disk.radius - 0.5) < 1e-15
        assert abs(pair.inv_disk.center - 5.0 / 3.0) < 1e-12
        assert abs(pair.inv_disk.radius - 4.0 / 3.0) < 1e-12

    def test_zero_weight_half_plane(self):
        pair = disk_params(0.0)
        assert pair.half_plane and pair.inv_disk is None
        assert abs(pair.center_disk.radius - 1.0) < 1e-15

    def test_seven_over_twentyfive(self):
        pair = disk_params(7.0 / 25.0)
        assert abs(pair.inv_disk.center - 25.0 / 7.0) < 1e-12
        assert abs(pair.inv_disk.radius - 24.0 / 7.0) < 1e-12

    def test_boundary_map(self):
        for beta in (0.2, 0.6, 0.9):
            pair = disk_params(beta)
            th = np.linspace(0, 2 * np.pi, 128, endpoint=False)
            z = pair.center_disk.radius * np.exp(1j * th)
            w = (1 - z) / (1 + z)
            dev = np.abs(np.abs(w - pair.inv_disk.center) - pair.inv_disk.radius)
            assert dev.max() < 1e-10

    def test_range_check(self):
        with pytest.raises(ValueError):
            disk_params(1.0)


class TestCanonicalCheck:
    def test_canonical_family(self):
        assert canonical_check(canonical_scalar(2.0), 0.6)

    def test_boundary_touching_function_is_not_member(self):
        # 3/5 + 8/(5 (s+1)^2) touches the class boundary at omega = 1 but
        # exits it near omega = 1.22 (dense-grid slack -0.0256), so it is
        # neither a member nor canonical
        f1 = Realization(A=[[-1.0, 1.0], [0.0, -1.0]], B=[[0.0], [1.0]],
                         C=[[1.6, 0.0]], D=[[0.6]])
        assert not canonical_check(f1, 0.6)
        rep = sweep_membership(f1, ClassSpec("HP", 0.6))
        assert not rep.member
        assert abs(rep.min_slack - (-0.0256)) < 1e-3

    def test_constant_member_is_interior(self):
        assert not canonical_check(Realization.constant([[1.0]]), 0.0)


class TestClassStructure:
    def test_order_on_random_scalars(self, fast_grid):
        rng = np.random.default_rng(23)
        done = 0
        while done < 200:
            R = scalar_realization(
                -rng.uniform(0.2, 3.0), rng.normal(), rng.normal(),
                rng.uniform(0.1, 3.0),
            )
            bm = beta_max(R, grid=fast_grid, tol=1e-6)
            if bm.empty:
                continue
            for beta in (0.0, bm.value / 2.0, bm.value):
                assert sweep_membership(R, ClassSpec("HP", beta), fast_grid).member
            done += 1

    def test_cayley_bridge(self, fast_grid):
        rng = np.random.default_rng(29)
        done = 0
        while done < 100:
            n = int(rng.integers(1, 4))
            R = Realization(
                A=rng.standard_normal((n, n)) - 2.5 * np.eye(n),
                B=rng.standard_normal((n, 1)),
                C=rng.standard_normal((1, n)),
                D=[[rng.uniform(0.2, 3.0)]],
            )
            beta = rng.uniform(0.05, 0.9)
            try:
                G = cayley_function(R)
            except ValueError:
                continue
            hp = sweep_membership(R, ClassSpec("HP", beta), fast_grid).member
            hb = sweep_membership(G, ClassSpec("HB", beta), fast_grid).member
            assert hp == hb
            done += 1

    def test_function_inverse_closure(self, fast_grid):
        rng = np.random.default_rng(37)
        done = 0
        while done < 100:
            n = int(rng.integers(1, 4))
            R = Realization(
                A=rng.standard_normal((n, n)) - 3.0 * np.eye(n),
                B=rng.standard_normal((n, 1)),
                C=rng.standard_normal((1, n)),
                D=[[rng.uniform(0.5, 3.0)]],
            )
            bm = beta_max(R, grid=fast_grid, tol=1e-8)
            if bm.empty or bm.value < 0.05:
                continue
            beta = 0.8 * bm.value
            inv = function_inverse(R)
            assert sweep_membership(inv, ClassSpec("HP", beta), fast_grid).member
            # the extremal weights agree
            assert abs(beta_max(inv, grid=fast_grid, tol=1e-8).value - bm.value) < 1e-6
            done += 1

    def test_inclusion_chain_on_stock_corpus(self, fast_grid):
        corpus = list(circuit_realizations()) + [
            f_s2_over_s1(), f_s3_over_s1(), canonical_scalar(1.0),
        ]
        for R in corpus:
            bm = beta_max(R, grid=fast_grid)
            assert not bm.empty and bm.value > 0.0
            assert sp_margin(R, grid=fast_grid) > 0.0
            assert sweep_membership(R, ClassSpec("P"), fast_grid).member
            assert not sweep_membership(R, ClassSpec("PO"), fast_grid).member
