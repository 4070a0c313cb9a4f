"""Self-gravitating relativistic perfect fluid evolution in harmonic gauge.

Thin python surface over the C++ core: pointwise fluid algebra, coupled-system
block assembly, harmonic-gauge initial data completion, weighted fractional
Sobolev norms, and scenario runs.
"""

try:
    from ._gravfluid import *  # noqa: F401,F403  (installed package layout)
    from ._gravfluid import __version__  # noqa: F401
except ImportError:  # build-tree layout used by the test harness
    from _gravfluid import *  # noqa: F401,F403
    from _gravfluid import __version__  # noqa: F401
