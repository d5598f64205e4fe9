"""
critcharge Test Suite

Unit and integration tests for the finite-element two-electron solvers and
the finite-size-scaling engine.

Key components:
- base_test_classes.py: Base test classes with common setup per module area
- problem_situations.py: Named meshes, solver settings and run configurations
- test_helpers.py: Shared assertions, config-constant mixin, acceptance gate
"""

import os
import sys

tests_dir = os.path.dirname(os.path.abspath(__file__))
if tests_dir not in sys.path:
    sys.path.insert(0, tests_dir)

src_dir = os.path.join(os.path.dirname(tests_dir), "src")
if src_dir not in sys.path:
    sys.path.insert(0, src_dir)

# Try to import modules, but don't fail if they can't be imported
# This allows test discovery to work even when some modules have issues
try:
    from base_test_classes import (
        CliTestBase,
        FssTestBase,
        MeshTestBase,
        ScfTestBase,
        SolverTestBase,
    )
    from problem_situations import ProblemFactory, ProblemSituations

    __all__ = [
        "MeshTestBase",
        "SolverTestBase",
        "ScfTestBase",
        "FssTestBase",
        "CliTestBase",
        "ProblemFactory",
        "ProblemSituations",
    ]
except ImportError as e:
    # If imports fail, just provide an empty __all__ list
    # This allows test discovery to continue
    __all__ = []
    import warnings

    warnings.warn(f"Failed to import test modules: {e}", ImportWarning, stacklevel=2)
