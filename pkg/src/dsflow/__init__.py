"""Locally constrained inverse curvature flows for spacelike star-shaped
hypersurfaces in de Sitter space, with quermassintegral diagnostics."""

from .errors import ConeError, DomainError, FlowAbort, SpacelikeError
from .flow import (FlowConfig, FlowState, MonitorRecord, RunResult, choose_dt,
                   monitor_slack, predicted_dA, run, speed_field, step)
from .geometry import (PointGeometry, RadialGraph, SurfaceGeometry,
                       identity_residuals, normal_speed, pointwise_geometry,
                       surface_geometry, validate_hypersurface)
from .grids import (AxisymGrid, LatLongGrid, SnapshotError, SphereJet,
                    integrate, read_snapshot, sphere_area, sphere_jet,
                    write_snapshot)
from .quermass import (QuermassReport, SliceModel, curvature_integral,
                       enclosed_volume, hsiung_minkowski_residual,
                       inequality_gap, quermass_all, slice_table, xi)
from .symfunc import (SymDerivatives, b_nk, gamma_cone_test, identity_suite,
                      maclaurin_gap, sigma, sigma_batch, sigma_minor,
                      sym_derivatives)

__version__ = "0.1.0"
