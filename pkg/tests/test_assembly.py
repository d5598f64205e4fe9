import numpy as np

from base_test_classes import SolverTestBase
from critcharge.assembly import (
    DofMap,
    NodalFunction,
    OperatorPair,
    assemble_exact3d,
    assemble_radial,
    assemble_radial_term,
    expectation,
    hartree_potential,
)
from critcharge.eigen import solve_banded, solve_shift_invert
from critcharge.errors import InvalidArgumentError
from critcharge.mesh_basis import Continuity, ShapeSet, build_uniform_mesh
from problem_situations import ProblemFactory
from test_helpers import TestAssertionHelpers


def hydrogen_density(r):
    return np.exp(-2.0 * r) / np.pi


def hydrogen_hartree(r):
    return 1.0 / r - np.exp(-2.0 * r) * (1.0 + 1.0 / r)


class TestRadialAssembly(SolverTestBase):
    """1D pairs in the r^2 dr measure."""

    def test_pair_is_symmetric_and_s_positive(self):
        for basis in ("c0", "c1"):
            pair = assemble_radial(build_uniform_mesh(30, 10.0), ShapeSet(basis), lambda r: -1.0 / r)
            self.assertTrue(pair.is_symmetric())
            self.assert_symmetric(pair.H, what=f"{basis} H")
            self.assert_positive_definite(pair.S, what=f"{basis} S")

    def test_bandwidth(self):
        mesh = build_uniform_mesh(20, 5.0)
        self.assertEqual(assemble_radial(mesh, ShapeSet(Continuity.C0), None).bandwidth, 1)
        self.assertEqual(assemble_radial(mesh, ShapeSet(Continuity.C1), None).bandwidth, 3)

    def test_overlap_total_mass(self):
        mesh = build_uniform_mesh(25, 10.0)
        pair = assemble_radial(mesh, ShapeSet(Continuity.C0), None, dirichlet=False)
        self.assert_close(pair.S.sum(), 10.0**3 / 3.0, 1e-10, "sum of S")

        c1 = assemble_radial(mesh, ShapeSet(Continuity.C1), None, dirichlet=False)
        values = np.zeros(c1.n_dof)
        values[::2] = 1.0
        self.assert_close(values @ (c1.S @ values), 10.0**3 / 3.0, 1e-10, "C1 mass of 1")

    def test_free_particle_neumann_ground_state(self):
        mesh = build_uniform_mesh(20, 5.0)
        pair = assemble_radial(mesh, ShapeSet(Continuity.C0), None, dirichlet=False)
        solution = solve_banded(pair, 1)
        self.assert_close(solution.lowest, 0.0, 1e-10, "Neumann ground energy")
        vector = solution.ground_vector
        self.assert_all_close(vector / vector[0], np.ones_like(vector), 1e-8, "constant eigenvector")

    def test_dirichlet_removes_one_value_dof(self):
        mesh = build_uniform_mesh(10, 5.0)
        for basis, full in (("c0", 11), ("c1", 22)):
            shapes = ShapeSet(basis)
            dof_map = DofMap(mesh, shapes)
            self.assertEqual(dof_map.n_full, full)
            self.assertEqual(dof_map.free_dofs().size, full - 1)
            self.assertNotIn(dof_map.boundary_value_dof, dof_map.free_dofs())
            self.assertEqual(assemble_radial(mesh, shapes, None).n_dof, full - 1)

    def test_hydrogen_ground_state(self):
        pair = assemble_radial(self.mesh, self.shapes, lambda r: -1.0 / r)
        self.assert_close(solve_banded(pair, 1).lowest, self.hydrogen["energy"], 2e-3, "hydrogen 1s")

    def test_terms_recombine(self):
        pair = assemble_radial(self.mesh, self.shapes, lambda r: -1.0 / r)
        difference = pair.H - pair.terms["kinetic"] + pair.terms["inverse_r"]
        self.assertLess(abs(difference).max(), 1e-12)

    def test_single_term_matches_pair(self):
        term = assemble_radial_term(self.mesh, self.shapes, lambda r: 1.0 / r)
        pair = assemble_radial(self.mesh, self.shapes, None)
        self.assertLess(abs(term - pair.terms["inverse_r"]).max(), 1e-13)

    def test_non_finite_potential_rejected(self):
        with self.assertRaises(InvalidArgumentError):
            assemble_radial(self.mesh, self.shapes, lambda r: np.where(r > 5.0, np.nan, 0.0))

    def test_wrong_mesh_type_rejected(self):
        mesh, shapes = ProblemFactory.tensor_problem()
        with self.assertRaises(InvalidArgumentError):
            assemble_radial(mesh, shapes, None)


class TestHartree(SolverTestBase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.fine = build_uniform_mesh(400, 20.0)

    def test_hydrogen_density(self):
        potential = hartree_potential(hydrogen_density, self.fine, expected_charge=1.0)
        self.assert_close(potential.charge, 1.0, 1e-10, "charge")
        for r in (1.0, 2.0, 5.0):
            self.assert_close(potential(r), hydrogen_hartree(r), 1e-8, f"V_H({r})")

    def test_value_at_origin(self):
        potential = hartree_potential(hydrogen_density, self.fine)
        self.assert_close(potential(1e-6), 1.0, 1e-5, "V_H(0+)")

    def test_coulomb_tail_beyond_cutoff(self):
        potential = hartree_potential(hydrogen_density, self.fine)
        self.assert_close(potential(40.0), potential.charge / 40.0, 1e-14, "outside r_cut")

    def test_zero_density(self):
        potential = hartree_potential(lambda r: np.zeros_like(r), self.fine)
        self.assert_all_close(potential(np.array([0.5, 3.0, 10.0])), np.zeros(3), 0.0, "V_H of 0")

    def test_charge_mismatch_is_logged(self):
        with self.assertLogs("critcharge.assembly", level="WARNING") as logs:
            hartree_potential(lambda r: 2.0 * hydrogen_density(r), self.fine, expected_charge=1.0)
        self.assertIn("integrates to", logs.output[0])

    def test_vectorized_evaluation_keeps_shape(self):
        potential = hartree_potential(hydrogen_density, self.fine)
        r = np.linspace(0.5, 4.0, 6).reshape(2, 3)
        self.assertEqual(potential(r).shape, (2, 3))
        self.assert_all_close(potential(r), hydrogen_hartree(r), 1e-8, "grid values")


class TestExpectationAndInterpolation(SolverTestBase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.pair = assemble_radial(cls.mesh, cls.shapes, lambda r: -1.0 / r)
        cls.solution = solve_banded(cls.pair, 1)

    def test_norm_and_energy(self):
        vector = self.solution.ground_vector
        self.assert_close(expectation(self.pair.S, vector), 1.0, 1e-10, "norm")
        self.assert_close(
            expectation(self.pair.H, vector, self.pair.S), self.solution.lowest, 1e-10, "<H>"
        )

    def test_dimension_mismatch(self):
        with self.assertRaises(InvalidArgumentError):
            expectation(self.pair.H, np.ones(3))

    def test_unnormalized_vector_rejected(self):
        with self.assertRaises(InvalidArgumentError):
            expectation(self.pair.H, 2.0 * self.solution.ground_vector, self.pair.S)

    def test_nodal_function(self):
        full = self.pair.expand(self.solution.ground_vector)
        orbital = NodalFunction(self.mesh, self.shapes, full)
        self.assertEqual(float(orbital(self.mesh.r_cut)), 0.0)
        self.assertEqual(float(orbital(11.0)), 0.0)
        # sqrt(4 pi) R_10 = 2 e^-r
        self.assert_close(orbital(1.0), 2.0 * np.exp(-1.0), 2e-3, "psi(1)")

    def test_nodal_function_length_checked(self):
        with self.assertRaises(InvalidArgumentError):
            NodalFunction(self.mesh, self.shapes, np.ones(5))


class TestTensorAssembly(SolverTestBase):
    """Three-variable pairs on a small graded mesh."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.tensor, cls.c0 = ProblemFactory.tensor_problem("c0")
        cls.pair = assemble_exact3d(cls.tensor, cls.c0, 2.0)

    def test_symmetric_and_positive(self):
        self.assertTrue(self.pair.is_symmetric())
        self.assert_positive_definite(self.pair.S, what="tensor S")
        self.assertTrue(np.all(np.isfinite(self.pair.H.data)))

    def test_exchange_symmetry(self):
        n_r = self.tensor.axis_r1.n_elements  # C0: one free value dof per interior node
        n_u = self.tensor.axis_u.n_nodes
        self.assertEqual(self.pair.n_dof, n_r * n_r * n_u)
        perm = TestAssertionHelpers.exchange_permutation(n_r, n_r, n_u)
        for name, matrix in (("H", self.pair.H), ("S", self.pair.S)):
            dense = matrix.toarray()
            swapped = dense[np.ix_(perm, perm)]
            scale = np.max(np.abs(dense))
            self.assertLessEqual(np.max(np.abs(swapped - dense)), 1e-12 * scale, f"{name} exchange")

    def test_repulsion_positive(self):
        self.assert_positive_definite(self.pair.terms["repulsion"], what="1/r12 matrix")

    def test_separable_limit_is_twice_the_radial_energy(self):
        mesh, shapes = ProblemFactory.tensor_problem("c1", n_radial=8)
        pair = assemble_exact3d(mesh, shapes, 2.0, interaction=False)
        solution = solve_shift_invert(pair, 1, -4.4)

        radial = assemble_radial(mesh.axis_r1, shapes, lambda r: -2.0 / r)
        single = solve_banded(radial, 1)
        self.assert_close(solution.lowest, 2.0 * single.lowest, 1e-8, "E = 2 eps")

        vector = single.ground_vector
        inverse_r = float(vector @ (radial.terms["inverse_r"] @ vector))
        nuclear = expectation(pair.terms["nuclear"], solution.ground_vector, pair.S)
        self.assert_close(nuclear, 2.0 * inverse_r, 1e-7, "<1/r1 + 1/r2>")

    def test_forms(self):
        scaled = assemble_exact3d(self.tensor, self.c0, 2.0, form="scaled")
        expected = self.pair.terms["kinetic"] - self.pair.terms["nuclear"] + 0.5 * self.pair.terms["repulsion"]
        self.assertLess(abs(scaled.H - expected).max(), 1e-12)
        with self.assertRaises(InvalidArgumentError):
            assemble_exact3d(self.tensor, self.c0, 2.0, form="mixed")
        with self.assertRaises(InvalidArgumentError):
            assemble_exact3d(self.tensor, self.c0, 0.0)

    def test_pair_from_dense(self):
        pair = OperatorPair.from_dense(np.diag([3.0, 1.0, 2.0]), np.eye(3))
        self.assertEqual(pair.n_dof, 3)
        self.assertEqual(pair.bandwidth, 0)
        with self.assertRaises(InvalidArgumentError):
            OperatorPair.from_dense(np.eye(3), np.eye(2))
