"""Multi-tiling measures and structured Riesz bases of exponentials.

Submodules
----------
group
    Closed subgroups ``H + Gamma`` of R^d, duals, residues.
measure
    Discretized base measures, translation fields, multi-tiles, difference covers.
determinant
    Translation matrices, determinant profiles and norm bounds.
spectrum
    Separation test, case analysis, the search for ``v`` and structured spectra.
frames
    Finite-section Riesz and frame bound estimates.
scenarios, config, cli
    Builtin examples, the config format and the ``multitile`` command.
"""

from .errors import *  # noqa: F401,F403
from .group import ClosedSubgroup, DualLattice, dual_group, make_subgroup, reduce_mod
from .measure import assemble_multitile, build_base_measure, difference_cover, make_field
from .determinant import det_at, ess_inf_det
from .spectrum import classify_case, construct_v, min_separation, structured_spectrum
from .frames import bound_convergence_scan, gram_matrix
from .scenarios import run_config, scenario

__version__ = "0.1.0"
