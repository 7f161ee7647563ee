"""Spectra, integrated density of states and trace-map dynamics of the Fibonacci Hamiltonian."""
from .approximants import (
    Band,
    BandTree,
    Kind,
    PeriodicSpectrum,
    build_band_tree,
    periodic_hamiltonian_eigs,
    scan_bands,
    thinnest_band,
)
from .dynamics import (
    OrbitResult,
    Period2Point,
    TorusPoint,
    cat_map,
    dt2_jacobian,
    escape_time,
    per2_solve,
    semiconjugacy,
    spectrum_member,
    unstable_multiplier,
)
from .errors import (
    ConvergenceError,
    DomainError,
    FibError,
    ResolutionError,
    ResourceError,
    StructuralError,
    UnsupportedCouplingError,
)
from .ids_engine import GapRecord, IdsSample, gap_plateau, ids, ids_free, psi
from .regularity import (
    HolderBounds,
    HolderEstimate,
    empirical_holder,
    gamma_k,
    gamma_lower,
    gamma_small,
    gamma_tilde_k,
    gamma_upper,
    holder_bounds,
)
from .trace_core import (
    ALPHA,
    MU,
    MU0,
    Point3,
    TraceTriple,
    TransferMatrix,
    fibonacci,
    fricke_vogt,
    half_trace,
    line_point,
    trace_map,
    trace_map_inverse,
    transfer_matrix,
)

__version__ = "0.1.0"
