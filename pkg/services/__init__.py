"""
Services module for the submodular toolkit.

Contains the oracles, the continuous greedy and rounding algorithms, and the
solve / verify / bench pipelines built on them.
"""

# Expose the pipeline singletons for convenient imports
from .benchmark import benchmark_service  # noqa: F401
from .pipeline import solver_service  # noqa: F401
from .verify import verification_service  # noqa: F401
