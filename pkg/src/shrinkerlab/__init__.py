"""Numerical laboratory for self-shrinkers and translators of mean
curvature flow: soliton residuals, drift-Laplacian identities, Gaussian
entropy, rescaled flow and curvature-estimate audits."""

from .analytic import CATALOG, make_analytic
from .audit import (
    AuditReport,
    CutoffScan,
    audit_graphical_estimate,
    audit_mean_convex_estimate,
    audit_translator_estimate,
    check_growth_bound,
    scan_phi_f_max,
    translator_sweep,
    verify_cutoff_identity,
)
from .entropy import EntropyResult, EntropySearch, FParams, entropy, f_functional
from .flow import FlowConfig, FlowError, flow_step, monitor_entropy, run_flow
from .generate import gen_mesh
from .geometry import VertexGeometry, vertex_geometry
from .mesh import MeshError, TriangleMesh
from .meshio import read_mesh, write_mesh
from .operators import DriftOperators, assemble_operators
from .soliton import (
    CylinderFit,
    cylinder_fit,
    shrinker_residual,
    tau_field,
    translator_residual,
    verify_identity,
)

__version__ = "0.1.0"

__all__ = [
    "CATALOG", "make_analytic", "AuditReport", "CutoffScan", "audit_graphical_estimate",
    "audit_mean_convex_estimate", "audit_translator_estimate", "check_growth_bound",
    "scan_phi_f_max", "translator_sweep", "verify_cutoff_identity", "EntropyResult",
    "EntropySearch", "FParams", "entropy", "f_functional", "FlowConfig", "FlowError",
    "flow_step", "monitor_entropy", "run_flow", "gen_mesh", "VertexGeometry",
    "vertex_geometry", "MeshError", "TriangleMesh", "read_mesh", "write_mesh",
    "DriftOperators", "assemble_operators", "CylinderFit", "cylinder_fit",
    "shrinker_residual", "tau_field", "translator_residual", "verify_identity",
]
