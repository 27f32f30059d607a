"""Sampling (Logvinenko-Sereda) and Carleson constants for band-limited
functions and eigenfunctions on the 2-sphere, with the heat-kernel and
multiplier diagnostics that go with them.

Hot loops are numba-compiled when numba is importable; set
``LSLAB_NO_NUMBA=1`` to force the pure-numpy implementations.
"""

from lslab._accel import numba_enabled, use_numba
from lslab.experiments import EXPERIMENTS, ExperimentConfig, SlopeFit, run_experiment, slope_fit
from lslab.extremal import (
    ExtremalResult,
    carleson_constant_2,
    exact_grid,
    gram_matrix,
    ls_constant_2,
    ratio_p,
    search_extremal_p,
)
from lslab.geom import (
    All,
    Band,
    Cap,
    Complement,
    Condition,
    Intersection,
    Measure,
    Tube,
    Union,
    density_report,
    lebesgue,
    make_grid,
    region_indicator,
)
from lslab.lang import parse_measure, parse_region
from lslab.linalg import hermitian_eigs
from lslab.spectrum import (
    SpectralFunction,
    band_basis,
    beam,
    eigenspace_basis,
    evaluate,
    evaluate_at,
    lp_norm,
    parse_basis,
    zonal,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
