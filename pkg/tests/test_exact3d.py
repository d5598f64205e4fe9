from base_test_classes import SolverTestBase
from critcharge.assembly import assemble_radial
from critcharge.eigen import solve_banded
from critcharge.errors import InvalidArgumentError
from critcharge.exact3d import ExactResult, Form, exact_solve, separable_energy
from critcharge.mesh_basis import ShapeSet, build_tensor_mesh
from problem_situations import ProblemFactory
from test_helpers import requires_acceptance


class TestExactSolver(SolverTestBase):
    """Two electrons in (r1, r2, cos theta12) on small tensor meshes."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.tensor, cls.c1 = ProblemFactory.tensor_problem("c1", n_radial=8)
        cls.helium = exact_solve(2.0, cls.tensor, cls.c1)

    def test_separable_scaled_limit(self):
        result = exact_solve(0.0, self.tensor, self.c1, Form.SCALED, interaction=False)
        single = solve_banded(assemble_radial(self.tensor.axis_r1, self.c1, lambda r: -1.0 / r))
        self.assert_close(result.energy, 2.0 * single.lowest, 1e-8, "lambda = 0")
        self.assert_close(result.energy, -1.0, 5e-2, "two hydrogen atoms")

    def test_helium_is_bound_below_threshold(self):
        self.assertLess(self.helium.energy, -2.0)
        self.assertGreater(self.helium.energy, -2.9037 - 1e-6)
        self.assertGreater(self.helium.inverse_r12, 0.0)
        self.assertGreater(self.helium.kinetic, 0.0)

    def test_virial_balance(self):
        parts = self.helium.physical_components()
        total = parts["E_kin"] + parts["E_en"] + parts["E_H"]
        self.assert_close(total, self.helium.physical_energy, 1e-8, "components sum")

    def test_direct_and_scaled_forms_agree(self):
        mesh, shapes = ProblemFactory.tensor_problem("c0", n_radial=5, r_cut=10.0)
        direct = exact_solve(2.0, mesh, shapes, Form.DIRECT)
        scaled = exact_solve(0.5, mesh.scaled(2.0), shapes, Form.SCALED)
        self.assert_close(scaled.physical_energy, direct.energy, 1e-8 * abs(direct.energy), "Z^2 E(lambda)")
        self.assert_close(scaled.charge, 2.0, 0.0, "charge")

    def test_coupling_derivative_scaled(self):
        mesh, shapes = ProblemFactory.tensor_problem("c0", n_radial=5, r_cut=20.0)
        step = 1e-3
        centre = exact_solve(0.5, mesh, shapes, Form.SCALED)
        upper = exact_solve(0.5 + step, mesh, shapes, Form.SCALED).energy
        lower = exact_solve(0.5 - step, mesh, shapes, Form.SCALED).energy
        slope = (upper - lower) / (2.0 * step)
        self.assert_close(slope, centre.coupling_derivative, 1e-4, "dE/dlambda")

    def test_coupling_derivative_direct(self):
        self.assert_close(self.helium.coupling_derivative, -self.helium.inverse_r_sum, 0.0, "dE/dZ")
        self.assertLess(self.helium.coupling_derivative, 0.0)

    def test_coupling_derivative_direct_matches_slope(self):
        mesh, shapes = ProblemFactory.tensor_problem("c0", n_radial=5, r_cut=10.0)
        step = 1e-3
        centre = exact_solve(2.0, mesh, shapes, Form.DIRECT)
        upper = exact_solve(2.0 + step, mesh, shapes, Form.DIRECT).energy
        lower = exact_solve(2.0 - step, mesh, shapes, Form.DIRECT).energy
        slope = (upper - lower) / (2.0 * step)
        self.assert_close(slope, centre.coupling_derivative, 1e-4, "dE/dZ")

    def test_nested_refinement_lowers_energy(self):
        # uniform radial meshes of 3, 6 and 12 elements contain one another
        energies = []
        for n_radial in (3, 6, 12):
            mesh, shapes = ProblemFactory.tensor_problem("c0", n_radial=n_radial, r_cut=10.0, growth=1.0)
            energies.append(exact_solve(2.0, mesh, shapes).energy)
        self.assertLess(energies[1], energies[0])
        self.assertLess(energies[2], energies[1])
        self.assertGreater(energies[2], -2.9037 - 1e-6)

    def test_c1_beats_c0(self):
        _, c0 = ProblemFactory.tensor_problem("c0")
        mesh, _ = ProblemFactory.tensor_problem("c1")
        lower = exact_solve(2.0, mesh, ShapeSet("c1")).energy
        upper = exact_solve(2.0, mesh, c0).energy
        self.assertLess(lower, upper)

    def test_separable_reference(self):
        self.assertEqual(separable_energy(2.0, Form.DIRECT), -4.0)
        self.assertEqual(separable_energy(0.7, Form.SCALED), -1.0)

    def test_invalid_couplings(self):
        with self.assertRaises(InvalidArgumentError):
            exact_solve(0.0, self.tensor, self.c1, Form.DIRECT)
        with self.assertRaises(InvalidArgumentError):
            exact_solve(-0.1, self.tensor, self.c1, Form.SCALED)
        with self.assertRaises(InvalidArgumentError):
            exact_solve(2.0, self.tensor, self.c1, "hylleraas")

    def test_payload_keeps_expectations(self):
        restored = ExactResult.from_payload(self.helium.to_payload())
        self.assertIs(restored.form, Form.DIRECT)
        self.assertEqual(restored.energy, self.helium.energy)
        self.assertEqual(restored.mesh["r1"]["n_elements"], 8)
        self.assertEqual(restored.basis, "c1")


class TestExactReference(SolverTestBase):
    """Production mesh energies; slow."""

    @requires_acceptance
    def test_production_mesh_energies(self):
        reference = self.situations.helium_exact_reference()
        mesh = build_tensor_mesh(
            reference["n_radial"], reference["n_angular"], reference["r_cut"], reference["growth"]
        )
        c0 = exact_solve(2.0, mesh, ShapeSet("c0")).energy
        c1 = exact_solve(2.0, mesh, ShapeSet("c1")).energy
        self.assert_close(c0, reference["c0"], 2e-2, "C0 helium")
        self.assert_close(c1, reference["c1"], 5e-3, "C1 helium")
