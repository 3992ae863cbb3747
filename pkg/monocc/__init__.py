"""
monocc - desk-scale single-view occupancy toolkit.

This package renders density fields, samples training patches with a
semantic-guided non-overlapping Gaussian mixture, aligns pseudo depth in
inverse-depth space, computes the photometric objective and runs the
occupancy and depth evaluation protocol, all on analytic fixtures.
"""

from monocc.config.run import RunConfig
from monocc.errors import MonoccError

__version__ = "0.1.0"
__all__ = ["RunConfig", "MonoccError"]
