"""Simulation laboratory for threshold growth on lattice-fiber products
and heterogeneous bootstrap automata on the square lattice."""

from .geometry import Boundary, BoxGeometry, Rect
from .hamming import (CliqueConfig, PlaneConfig, PlaneFlags, plane_fixpoint,
                      plane_fixpoint_sweep, plane_flags, plane_spanned,
                      plane_spanned_sparse, plane_step, sample_clique,
                      sample_plane, sample_plane_cells)
from .hetero import (VOID, ClusterStats, HeteroGrid, Rule, grid_from_text,
                     grid_to_text, hetero_fixpoint, hetero_step,
                     remap_states, restricted_fixpoint, zero_clusters)
from .initializers import (ClassificationGrid, ClassifyMode, CliqueFlavor,
                           LimitParams, LimitVariant, clash_sites,
                           classify_grid, init_clique_comparison,
                           init_limit_grid, nz)
from .patterns import (BlockVariant, BoxLabel, CircuitMode, GoodBoxReport,
                       circuit_or_connection, detect_blocking,
                       good_boxes, green_red_masks, is_protected_rect,
                       window_origin)
from .product import (Fiber, OccupationSummary, ProductConfig, is_inert,
                      neighbor_counts, product_fixpoint, sample_product,
                      summarize)
from .estimators import (DensityMode, EstimateRecord, RateFit,
                         ResourceCapError, SandwichReport, ScanResult,
                         ac_scan, density_clique, density_even, density_for,
                         density_odd, mc_probability, oracle_formula,
                         phi_estimate, rate_fit, sandwich_check, trial_rng,
                         two_scale_density)
from .records import records_to_csv, records_to_json, write_records

__version__ = "0.1.0"
