"""Monogamy of bipartite entanglement and local (CHSH) contextuality."""

from .contextuality import (
    ChshObservables,
    ChshWitness,
    SpectralSet,
    build_chsh_observables,
    chsh_full_value,
    chsh_oracle_search,
    chsh_oracle_value,
    chsh_spectral_set,
    chsh_value,
    lc_entropy,
    spectral_context_value,
)
from .convex_roof import PureEnsemble, convex_roof_estimate, optimize_convex_roof
from .entanglement import (
    BoundReport,
    PiecewiseLinearFn,
    ccnr_norm,
    co_f,
    convex_hull_1d,
    entanglement_lower_bound,
    f_closed,
    f_oracle,
    monogamy_check,
    negativity,
    pure_monotone,
    threshold_x,
    x_measure,
)
from .qlinalg import (
    BipartitePureState,
    DensityMatrix,
    ValidationError,
    eigenvalues_desc,
    majorizes,
    partial_trace,
    partial_transpose,
    purify,
    realign,
    schmidt_squared,
    trace_norm,
)
from .sampling import (
    haar_unitary,
    majorizing_pair,
    sample_bipartite_mixed,
    sample_mixed,
    sample_pure,
    sample_separable,
)

__version__ = "0.1.0"
