"""
Common problem situations for critcharge tests.
Named meshes, solver settings and run configurations with their reference numbers.
"""

from critcharge.config import RunConfig, load_run_config
from critcharge.fss import GapOptions, SyntheticGapModel
from critcharge.mesh_basis import (
    Continuity,
    ShapeSet,
    build_graded_mesh,
    build_tensor_mesh,
    build_uniform_mesh,
)
from critcharge.scf import ScfConfig


class ProblemSituations:
    """Collection of reference problems and the numbers they should reproduce."""

    @staticmethod
    def hydrogen_radial():
        """Z = 1 on a uniform C0 mesh; ground state -1/2, 2s confined by the wall at r_cut."""
        return {"n_elements": 200, "r_cut": 10.0, "growth": 1.0, "basis": "c0", "z": 1.0,
                "energy": -0.5, "energy_2s": -0.1128}

    @staticmethod
    def helium_lda_table():
        """Kohn-Sham LDA helium on uniform C0 meshes, r_cut = 10."""
        return {
            "method": "lda",
            "z": 2.0,
            "r_cut": 10.0,
            "rows": {
                100: {"E_tot": -2.813661},
                200: {"E_tot": -2.821852, "E_c": -0.101092, "epsilon": -0.565805},
                1000: {"E_tot": -2.824596, "E_c": -0.101103},
            },
        }

    @staticmethod
    def helium_total_energy_table():
        """HF plus Wigner correlation, N = 200, r_cut = 10."""
        return {
            "method": "hf_wigner",
            "z": 2.0,
            "r_cut": 10.0,
            "n_elements": 200,
            "E_tot": -2.904925,
            "E_H": 1.026754,
            "E_c": -0.049814,
        }

    @staticmethod
    def helium_exact_reference():
        """Production 3D mesh: 15 radial elements to 40 bohr, growth 1.3, 3 angular."""
        return {
            "n_radial": 15,
            "n_angular": 3,
            "r_cut": 40.0,
            "growth": 1.3,
            "c0": -2.7578,
            "c1": -2.8994,
        }

    @staticmethod
    def small_tensor():
        """Cheap tensor mesh for structural checks."""
        return {"n_radial": 6, "n_angular": 2, "r_cut": 20.0, "growth": 1.3}

    @staticmethod
    def synthetic_fixture():
        return {"z_c": 0.91, "alpha": 1.0, "nu": 0.85, "bracket": (0.5, 1.5)}

    @staticmethod
    def critical_references():
        """Extrapolated critical charges the full chains should land near."""
        return {
            "hf": {"z_c": 1.03114, "alpha": 0.99971, "profile": "fss-hf.yml"},
            "lda": {"z_c": 0.92808, "profile": "fss-lda.yml"},
            "hf_wigner": {"z_c": 0.90946, "profile": "fss-total-energy.yml", "nu": (0.80, 0.90)},
            "exact_scaled": {
                "z_c": 0.91857,
                "alpha": 1.00082,
                "profile": "fss-exact-scaled.yml",
                "nu": (0.80, 0.90),
            },
        }


class ProblemFactory:
    """Factory for meshes, shape sets and configurations built from situations."""

    @staticmethod
    def radial_mesh(n_elements=200, r_cut=10.0, growth=1.0):
        if growth == 1.0:
            return build_uniform_mesh(n_elements, r_cut)
        return build_graded_mesh(n_elements, r_cut, growth)

    @staticmethod
    def shapes(basis="c0"):
        return ShapeSet(Continuity(basis))

    @staticmethod
    def hydrogen_problem(**overrides):
        situation = ProblemSituations.hydrogen_radial()
        situation.update(overrides)
        mesh = ProblemFactory.radial_mesh(situation["n_elements"], situation["r_cut"], situation["growth"])
        return mesh, ProblemFactory.shapes(situation["basis"]), situation

    @staticmethod
    def tensor_problem(basis="c0", **overrides):
        situation = ProblemSituations.small_tensor()
        situation.update(overrides)
        mesh = build_tensor_mesh(
            situation["n_radial"], situation["n_angular"], situation["r_cut"], situation["growth"]
        )
        return mesh, ProblemFactory.shapes(basis)

    @staticmethod
    def scf_config(method="hf", **overrides):
        return ScfConfig(method=method, **overrides)

    @staticmethod
    def gap_options(**overrides):
        return GapOptions(**overrides)

    @staticmethod
    def synthetic_model(**overrides):
        situation = ProblemSituations.synthetic_fixture()
        situation.update(overrides)
        return SyntheticGapModel(situation["z_c"], situation["alpha"], situation["nu"])

    @staticmethod
    def run_config(**overrides) -> RunConfig:
        return load_run_config(None, overrides)

    @staticmethod
    def synthetic_run(output_dir, cache_dir, **fss) -> dict:
        """Override mapping for a quick synthetic FSS run."""
        chain = {"n_min": 10, "n_max": 30, "delta_n": 2, "z_min": 0.5, "z_max": 1.5, "z_points": 21}
        chain.update(fss)
        return {
            "method": "synthetic",
            "output_dir": str(output_dir),
            "cache_dir": str(cache_dir),
            "fss": chain,
        }
