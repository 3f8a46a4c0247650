"""Simulator and design-verification toolkit for a dissociation-time-
entanglement Bell test with ultracold atoms.

Subpackages follow the pipeline: `units`/`optics` (design parameters),
`feshbach` (pulse sequences and the dissociation spectrum), `spectrum`
(two-particle momentum density), `quadrature` (oscillatory integrals),
`interferometer` (fringes, visibility, CHSH), `scenario` (configs and the
feasibility audit), `cli` (artifact-producing front end).
"""

__version__ = "0.1.0"

from ._kernels import BACKEND as kernel_backend  # noqa: F401
