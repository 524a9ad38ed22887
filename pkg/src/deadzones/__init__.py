"""Phase oscillator networks with dead-zone coupling functions.

Core objects: CouplingFunction (piecewise with exact dead zones, or the
analytic modulated Kuramoto-Sakaguchi family), DirectedGraph (edge bitsets),
PhasePoint / StructuralNetwork, effective coupling graphs and their phase
space partition, realization constructions (generic, width-controlled, and
dynamically stable), and a fixed-step RK4 integrator that localizes
effective-graph transition events.
"""

from .coupling import (
    CircleArc,
    CouplingFunction,
    DeadZoneSet,
    coupling_from_dict,
    coupling_to_dict,
    load_coupling,
    make_bump_profile,
    save_coupling,
)
from .dynamics import (
    StabilityProbe,
    Trajectory,
    eval_field,
    field_jacobian_fd,
    graph_itinerary,
    integrate,
    phase_differences,
    test_stable_realization,
)
from .effective import (
    Catalog,
    GridSampler,
    PhasePoint,
    RandomSampler,
    RasterGrid,
    SkewProduct,
    StructuralNetwork,
    catalog_realised,
    effective_graph,
    predict_splay_cycles,
    raster_cir,
    region_membership,
    skew_product_check,
    splay_point,
    sync_point,
)
from .graphs import (
    DirectedGraph,
    Permutation,
    apply_permutation,
    connectivity_class,
    graph_color,
    graph_isotropy,
    graph_number,
    has_spanning_diverging_tree,
    laplacian,
    parse_graph_literal,
    point_isotropy,
    spanning_diverging_tree,
    standard_graph,
    symmetric_group,
    weak_components,
    zero_eigenvalue_multiplicity,
)
from .realize import (
    RealizationCertificate,
    RelativeEquilibrium,
    StableRealization,
    load_certificate,
    realize_all_one_g,
    realize_delta,
    realize_generic,
    realize_stable,
    save_certificate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
