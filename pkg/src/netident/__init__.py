"""Identifiability of networks with additive nonlinear edge dynamics."""

from .analyzer import FunctionClassId, IdentifiabilityReport, Verdict, is_identifiable, required_measurements
from .errors import NetidentError, ParseError, RankDeficient
from .estimator import EstimationProblem, design_excitations, fit_edges, recovery_error
from .forge import (
    Construction,
    ForgedPair,
    forge_arborescence_shift,
    forge_gamma_split,
    forge_linear_superposition,
    verify_indistinguishable,
)
from .formats import dump_network, load_network, parse_network, save_network
from .graph import (
    Condensation,
    Digraph,
    TopologyClass,
    classify_topology,
    count_paths,
    diameter,
    scc,
    sinks,
    sources,
    unique_path_inneighbor,
)
from .network import Network, NetworkClassReport, validate
from .poly import (
    EdgeFunction,
    FunctionClassFlags,
    SeparableDecomposition,
    Univariate,
    classify,
    evaluate,
    precompose_shift,
    separate,
    shift_add,
)
from .simulate import ExcitationPlan, Trace, measured_response, simulate, traces_indistinguishable
from .unfolding import UnfoldedNetwork, check_unfolding_equivalence, unfold

__all__ = [name for name in dir() if not name.startswith("_")]
