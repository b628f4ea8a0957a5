"""stataudit: audit the statistical reliability of reported inferential tests.

Parses APA-style statistics, recomputes p-values, standardizes effects to log
odds ratios, simulates a-priori power against effect thresholds, and runs
publication-bias / winner's-curse / significance-chasing detectors, all
validated against a built-in synthetic-field simulator.
"""

__version__ = "0.1.0"

from . import core

__all__ = ["core", "__version__"]
