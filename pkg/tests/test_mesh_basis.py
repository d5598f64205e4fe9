import numpy as np

from base_test_classes import MeshTestBase
from critcharge.errors import InvalidArgumentError
from critcharge.mesh_basis import (
    AxisMesh,
    Continuity,
    Grading,
    RadialMesh,
    ShapeSet,
    TensorMesh3,
    build_angular_mesh,
    build_graded_mesh,
    build_tensor_mesh,
    build_uniform_mesh,
    element_quadrature,
    gauss_rule,
    shape_eval,
)


class TestMeshes(MeshTestBase):
    """Uniform, graded, angular and tensor meshes."""

    def test_uniform_nodes(self):
        mesh = build_uniform_mesh(2, 10.0)
        self.assert_all_close(mesh.nodes, [0.0, 5.0, 10.0], 1e-15, "uniform nodes")
        self.assertEqual(mesh.n_elements, 2)
        self.assertEqual(mesh.r_cut, 10.0)
        self.assertIs(mesh.grading, Grading.UNIFORM)

    def test_graded_widths_follow_growth(self):
        mesh = build_graded_mesh(2, 2.3, 1.3)
        self.assert_all_close(mesh.widths, [1.0, 1.3], 1e-12, "graded widths")
        self.assertEqual(mesh.nodes[-1], 2.3)

    def test_production_grading(self):
        mesh = build_graded_mesh(15, 40.0, 1.3)
        first = 40.0 * 0.3 / (1.3**15 - 1.0)
        self.assert_close(mesh.widths[0], first, 1e-12, "first width")
        self.assert_all_close(mesh.widths[1:] / mesh.widths[:-1], np.full(14, 1.3), 1e-9, "ratios")
        self.assertEqual(mesh.nodes[-1], 40.0)
        self.assertEqual(mesh.nodes[0], 0.0)

    def test_growth_one_is_uniform(self):
        self.assertEqual(build_graded_mesh(4, 8.0, 1.0), build_uniform_mesh(4, 8.0))

    def test_invalid_sizes_rejected(self):
        with self.assertRaises(InvalidArgumentError):
            build_uniform_mesh(0, 10.0)
        with self.assertRaises(InvalidArgumentError):
            build_uniform_mesh(5, -1.0)
        with self.assertRaises(InvalidArgumentError):
            build_graded_mesh(5, 10.0, 0.9)
        with self.assertRaises(InvalidArgumentError):
            build_angular_mesh(0)

    def test_nodes_must_increase(self):
        with self.assertRaises(InvalidArgumentError):
            AxisMesh(np.array([0.0, 2.0, 1.0]))
        with self.assertRaises(InvalidArgumentError):
            RadialMesh(np.array([0.5, 1.0]))

    def test_mesh_is_immutable(self):
        mesh = build_uniform_mesh(3, 3.0)
        with self.assertRaises(ValueError):
            mesh.nodes[1] = 0.5

    def test_equality_and_hash(self):
        a = build_graded_mesh(5, 10.0, 1.2)
        b = build_graded_mesh(5, 10.0, 1.2)
        self.assertEqual(a, b)
        self.assertEqual(hash(a), hash(b))
        self.assertNotEqual(a, build_graded_mesh(5, 10.0, 1.3))

    def test_angular_mesh_spans_unit_interval(self):
        mesh = build_angular_mesh(3)
        self.assert_all_close(mesh.nodes, [-1.0, -1.0 / 3.0, 1.0 / 3.0, 1.0], 1e-15, "u nodes")

    def test_tensor_mesh(self):
        mesh = build_tensor_mesh(15, 3, 40.0, 1.3)
        self.assertEqual(mesh.shape, (15, 15, 3))
        self.assertEqual(mesh.n_elements, 15 * 15 * 3)
        self.assertEqual(mesh.axis_r1, mesh.axis_r2)

    def test_tensor_scaling_leaves_angle(self):
        mesh = build_tensor_mesh(4, 2, 10.0, 1.3)
        scaled = mesh.scaled(2.0)
        self.assert_all_close(scaled.axis_r1.nodes, 2.0 * mesh.axis_r1.nodes, 1e-14, "scaled r1")
        self.assertEqual(scaled.axis_u, mesh.axis_u)
        with self.assertRaises(InvalidArgumentError):
            mesh.scaled(0.0)

    def test_angular_axis_checked(self):
        radial = build_uniform_mesh(2, 4.0)
        with self.assertRaises(InvalidArgumentError):
            TensorMesh3(radial, radial, AxisMesh(np.array([0.0, 1.0])))

    def test_describe(self):
        info = build_graded_mesh(5, 10.0, 1.2).describe()
        self.assertEqual(info["n_elements"], 5)
        self.assertEqual(info["grading"], "geometric")
        self.assertEqual(info["upper"], 10.0)


class TestQuadrature(MeshTestBase):
    @classmethod
    def setUpConfigConstants(cls):
        # These values must match critcharge.config CONSTANTS
        return {"QUADRATURE_POINTS": 10}

    def test_rule_uses_configured_order(self):
        self.check_expected_constants()
        rule = gauss_rule()
        self.assertEqual(rule.abscissae.size, self.constants["QUADRATURE_POINTS"])

    def test_weights_and_symmetry(self):
        rule = gauss_rule()
        self.assert_close(rule.weights.sum(), 2.0, 1e-14, "weight sum")
        self.assert_all_close(rule.abscissae, -rule.abscissae[::-1], 1e-15, "symmetric nodes")
        self.assertTrue(np.all(np.diff(rule.abscissae) > 0.0))

    def test_exact_through_degree_nineteen(self):
        rule = gauss_rule()
        self.assert_close(np.sum(rule.weights * rule.abscissae**18), 2.0 / 19.0, 1e-14, "x^18")
        self.assert_close(np.sum(rule.weights * rule.abscissae**19), 0.0, 1e-14, "x^19")

    def test_reference_rule(self):
        x, w = gauss_rule().reference()
        self.assertTrue(np.all((x > 0.0) & (x < 1.0)))
        self.assert_close(w.sum(), 1.0, 1e-14, "reference weights")
        self.assert_close(np.sum(w * x**5), 1.0 / 6.0, 1e-14, "x^5 on [0, 1]")

    def test_element_quadrature_covers_mesh(self):
        mesh = build_graded_mesh(7, 12.0, 1.25)
        points, weights = element_quadrature(mesh)
        self.assertEqual(points.shape, (7, 10))
        self.assert_close(weights.sum(), 12.0, 1e-12, "length")
        self.assert_close(np.sum(weights * points**2), 12.0**3 / 3.0, 1e-10, "int r^2")


class TestShapeFunctions(MeshTestBase):
    def test_c0_values_at_ends(self):
        values, _ = shape_eval(ShapeSet(Continuity.C0), [0.0, 1.0], 1.0)
        self.assert_all_close(values, [[1.0, 0.0], [0.0, 1.0]], 0.0, "C0 nodal values")

    def test_c0_derivatives(self):
        _, derivatives = shape_eval(ShapeSet(Continuity.C0), 0.5, 2.0)
        self.assert_all_close(derivatives, [-0.5, 0.5], 1e-15, "C0 d/dr")

    def test_c1_nodal_interpolation(self):
        shapes = ShapeSet(Continuity.C1)
        values, derivatives = shape_eval(shapes, [0.0, 1.0], 0.7)
        self.assert_all_close(values, [[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]], 1e-15, "C1 values")
        self.assert_all_close(
            derivatives, [[0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0]], 1e-14, "C1 d/dr"
        )

    def test_partition_of_unity(self):
        x = np.linspace(0.0, 1.0, 11)
        for continuity in Continuity:
            shapes = ShapeSet(continuity)
            values, derivatives = shapes.evaluate(x, 0.3)
            value_dofs = values[:, :: shapes.dofs_per_node]
            self.assert_all_close(value_dofs.sum(axis=1), np.ones_like(x), 1e-14, f"{continuity} sum")
            self.assert_all_close(
                derivatives[:, :: shapes.dofs_per_node].sum(axis=1), np.zeros_like(x), 1e-12, "slope sum"
            )

    def test_c1_reproduces_cubic(self):
        shapes = ShapeSet(Continuity.C1)
        h, left = 0.5, 1.0

        def f(r):
            return r**3 - 2.0 * r

        def df(r):
            return 3.0 * r**2 - 2.0

        local = np.array([f(left), df(left), f(left + h), df(left + h)])
        x = np.linspace(0.0, 1.0, 7)
        values, derivatives = shapes.evaluate(x, h)
        r = left + h * x
        self.assert_all_close(values @ local, f(r), 1e-13, "cubic values")
        self.assert_all_close(derivatives @ local, df(r), 1e-12, "cubic slopes")

    def test_dof_counts(self):
        self.assertEqual(ShapeSet(Continuity.C0).n_local, 2)
        self.assertEqual(ShapeSet(Continuity.C1).n_local, 4)
        self.assertEqual(ShapeSet("c1").dofs_per_node, 2)

    def test_invalid_evaluation(self):
        shapes = ShapeSet()
        with self.assertRaises(InvalidArgumentError):
            shape_eval(shapes, 1.5, 1.0)
        with self.assertRaises(InvalidArgumentError):
            shape_eval(shapes, 0.5, 0.0)
