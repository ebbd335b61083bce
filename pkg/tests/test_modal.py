import numpy as np
import pytest

from fgnanoplate import modal
from fgnanoplate.assembly import DofMap, GlobalSystem, NonlocalParams, apply_bcs, assemble
from fgnanoplate.errors import FormulationError, SolverError
from fgnanoplate.material import ISOTROPIC_BENCHMARK, SI3N4_SUS304, FgmProfile, SectionProperties, section_constants
from fgnanoplate.modal import frequency_ratio, nondimensionalize, solve_modes
from fgnanoplate.nurbs import make_patch

UNIT = SectionProperties(np.eye(3), np.zeros((3, 3)), np.eye(3), np.eye(2), 1.0, 0.0, 1.0, 1.0)


def toy(K, M):
    n = K.shape[0]
    return GlobalSystem(np.asarray(K, float), np.asarray(M, float), np.zeros((n, n)), 0.0,
                        DofMap(1, np.array([], dtype=int)), None, UNIT)


def plate(a=10.0, b=10.0, h=1.0, n=0.0, pair=ISOTROPIC_BENCHMARK, bc="SSSS", net=13, p=3):
    section = section_constants(FgmProfile(pair, n, h))
    return apply_bcs(assemble(make_patch(a, b, p, net, net), section), bc)


@pytest.fixture(scope="module")
def iso_ssss():
    return plate()


class TestToyProblems:
    def test_diagonal(self):
        res = solve_modes(toy(np.diag([2.0, 8.0]), np.diag([2.0, 2.0])), 2)
        np.testing.assert_allclose(res.eigenvalues, [1.0, 4.0], rtol=1e-14)
        np.testing.assert_allclose(res.omegas, [1.0, 2.0], rtol=1e-14)

    def test_indefinite_mass(self):
        with pytest.raises(FormulationError):
            solve_modes(toy(np.eye(2), np.diag([1.0, -1.0])), 1)

    def test_too_many_modes(self):
        with pytest.raises(ValueError):
            solve_modes(toy(np.eye(2), np.eye(2)), 3)

    def test_residual_bound_enforced(self, monkeypatch):
        monkeypatch.setattr(modal, "RESIDUAL_TOL", -1.0)
        with pytest.raises(SolverError):
            solve_modes(toy(np.diag([1.0, 3.0]), np.eye(2)), 1)

    def test_zero_eigenvalue_flagged(self):
        with pytest.warns(RuntimeWarning):
            res = solve_modes(toy(np.diag([0.0, 1.0]), np.eye(2)), 2)
        assert res.flagged.tolist() == [0]

    def test_tie_break_by_peak_dof(self):
        # equal eigenvalues: the mode peaking at the lower dof index comes first
        res = solve_modes(toy(np.diag([5.0, 1.0, 1.0]), np.eye(3)), 2)
        assert np.argmax(np.abs(res.modes[:, 0])) == 1
        assert np.argmax(np.abs(res.modes[:, 1])) == 2


class TestPlateModes:
    def test_m_orthonormal_and_residuals(self, iso_ssss):
        res = solve_modes(iso_ssss.with_mu(2.0), 6)
        M = iso_ssss.with_mu(2.0).M
        np.testing.assert_allclose(res.modes.T @ M @ res.modes, np.eye(6), atol=1e-8)
        assert np.all(res.residuals < 1e-8)
        # ascending up to the tie band used to order degenerate pairs
        assert np.all(np.diff(res.eigenvalues) >= -modal.TIE_RTOL * res.eigenvalues.max())
        assert res.flagged.size == 0 and np.all(res.omegas > 0)

    def test_reference_local_fundamental(self, iso_ssss):
        assert solve_modes(iso_ssss, 1).Omegas[0] == pytest.approx(0.0930, rel=0.01)

    def test_reference_nonlocal_fundamental(self, iso_ssss):
        assert solve_modes(iso_ssss.with_mu(5.0), 1).Omegas[0] == pytest.approx(0.0660, rel=0.01)

    def test_reference_graded_fundamental(self):
        res = solve_modes(plate(n=5.0, pair=SI3N4_SUS304), 1)
        assert res.Omegas[0] == pytest.approx(0.0441, rel=0.02)

    def test_degenerate_pair_reported_deterministically(self, iso_ssss):
        a = solve_modes(iso_ssss, 3)
        b = solve_modes(iso_ssss, 3)
        assert a.Omegas[1] == pytest.approx(a.Omegas[2], rel=1e-8)
        np.testing.assert_array_equal(a.modes, b.modes)

    def test_ratio_decreases_with_mu_and_mode(self, iso_ssss):
        local = solve_modes(iso_ssss, 4).Omegas
        prev = np.ones(4)
        for mu in (1.0, 2.0, 3.0, 4.0, 5.0):
            r = frequency_ratio(solve_modes(iso_ssss.with_mu(mu), 4).Omegas, local)
            assert np.all(r < prev)
            assert r[0] > r[1] and r[2] > r[3]
            prev = r

    def test_unit_invariance(self):
        # the same plate in nm (SI moduli) and in metres gives the same Omega
        nano = solve_modes(plate(10.0, 10.0, 1.0, 2.0, SI3N4_SUS304, net=7), 3).Omegas
        si = solve_modes(plate(10e-9, 10e-9, 1e-9, 2.0, SI3N4_SUS304, net=7), 3).Omegas
        np.testing.assert_allclose(si, nano, rtol=1e-12)

    def test_mass_independent_of_stiffness_reassembly(self, iso_ssss):
        direct = apply_bcs(assemble(iso_ssss.patch, iso_ssss.section, NonlocalParams(3.0)), "SSSS")
        np.testing.assert_allclose(solve_modes(direct, 2).Omegas, solve_modes(iso_ssss.with_mu(3.0), 2).Omegas,
                                   rtol=1e-12)


class TestScalars:
    def test_nondimensionalize(self):
        assert nondimensionalize(0.0, 1.0, 2.0, 3.0) == 0.0
        assert nondimensionalize(2.0, 0.5, 4.0, 1.0) == pytest.approx(2.0)
        with pytest.raises(ValueError):
            nondimensionalize(1.0, 0.0, 1.0, 1.0)

    def test_frequency_ratio(self):
        assert frequency_ratio(0.093, 0.093) == 1.0
        assert frequency_ratio(0.0850, 0.0930) == pytest.approx(0.9138, rel=0.005)
        assert frequency_ratio(0.0660, 0.0930) == pytest.approx(0.7094, rel=0.005)
        with pytest.raises(ZeroDivisionError):
            frequency_ratio(0.1, 0.0)
