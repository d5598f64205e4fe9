"""
Finite-element electronic structure for the two-electron atom, coupled to a
finite-size-scaling engine for the critical nuclear charge.

Modules:
- mesh_basis: radial/tensor meshes, C0/C1 shapes, Gauss-Legendre rule
- assembly: Hamiltonian/overlap pairs, Hartree potential, expectations
- eigen: generalized symmetric eigensolvers
- scf: Hartree-Fock, HF + Wigner and Kohn-Sham LDA
- exact3d: three-variable (r1, r2, cos theta12) formulation
- fss: gaps, Delta/Gamma functions, crossings, extrapolation, collapse
- cache, runner, cli: result cache, worker pool and command line
"""

__version__ = "2026.10.18"

__all__ = ["__version__"]
