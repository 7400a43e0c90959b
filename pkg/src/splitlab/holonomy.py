"""Geometric integrability measurements: loop holonomy and candidate surfaces.

Independent of the finite-difference bracket route: frame fields are integrated
as ODEs (adaptive 4th-order with embedded error control) around parallelogram
loops. The loop-closure defect scales like h^2 with a coefficient equal to the
commutator of the frame fields, so the fitted exponent separates integrable
plane fields (floor or superquadratic) from non-integrable ones (exponent 2,
coefficient = bracket norm).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import subspace_angles

from .errors import ConfigError, IntegratorError
from .frobenius import LocalFrame, orthonormal_frame, projection_onto_f
from .models import SplittingField
from .spaces import Space

FLOOR_TOL = 1e-10   # defects at or below this are integrator noise
_IVP_OPTS = dict(method="RK45", rtol=1e-12, atol=1e-13)


def _flow(field, start: np.ndarray, time: float, space: Space | None) -> np.ndarray:
    if time == 0.0:
        return start.copy()
    sol = solve_ivp(lambda t, y: np.asarray(field(y), dtype=float),
                    (0.0, time), start, dense_output=False, **_IVP_OPTS)
    if not sol.success:
        raise IntegratorError(f"flow integration failed: {sol.message}")
    if space is not None and space.kind == "chart_box":
        for col in sol.y.T:
            if not space.contains(col):
                raise IntegratorError(f"flow left the chart at {col}")
    return sol.y[:, -1]


@dataclass(frozen=True)
class HolonomyRecord:
    center: np.ndarray
    h: float
    pair: tuple
    defect_vector: np.ndarray
    defect_norm: float
    normalized: float              # |defect| / h^2
    transverse_normalized: float   # |Pi defect| / h^2 (component off E)
    integrator_steps: int


def holonomy_defect(splitting: SplittingField, x, h: float, pair: tuple = (0, 1),
                    space: Space | None = None,
                    frame: LocalFrame | None = None) -> HolonomyRecord:
    """Closure defect of the 4-edge loop along frame fields (Y_i, Y_j).

    Flows time h along Y_i, then Y_j, then -Y_i, then -Y_j; the defect is the
    endpoint minus the start, carried out on the coordinate lift.
    """
    x = np.asarray(x, dtype=float)
    if h <= 0:
        raise ConfigError("loop side h must be positive")
    if frame is None:
        frame = orthonormal_frame(splitting, x)
    i, j = pair
    yi, yj = frame.fields[i], frame.fields[j]
    steps = 0
    pos = x.copy()
    for field, t in ((yi, h), (yj, h), (yi, -h), (yj, -h)):
        pos = _flow(field, pos, t, space)
        steps += 1
    defect = pos - x
    proj = projection_onto_f(splitting, x)
    nrm = float(np.linalg.norm(defect))
    return HolonomyRecord(
        center=x, h=float(h), pair=(i, j), defect_vector=defect,
        defect_norm=nrm, normalized=nrm / h**2,
        transverse_normalized=float(np.linalg.norm(proj @ defect)) / h**2,
        integrator_steps=steps,
    )


@dataclass(frozen=True)
class ScalingFit:
    h_values: tuple
    defects: tuple              # transverse closure errors |Pi defect|
    exponent: float | None      # p in |Pi defect| ~ C h^p, None on the floor branch
    coefficient: float | None   # C; the quadratic-limit estimate of |Pi [Y_i, Y_j]|
    full_exponent: float | None     # same fit on the full closure error
    full_coefficient: float | None  # (includes the in-leaf commutator component)
    residual: float
    at_floor: bool
    verdict: str                # involutive_at_resolution | involutive | non_involutive


def _loglog_fit(hs, values):
    logs_h = np.log(hs)
    logs_v = np.log(np.maximum(values, 1e-300))
    p, logc = np.polyfit(logs_h, logs_v, 1)
    residual = float(np.max(np.abs(logs_v - (p * logs_h + logc))))
    return float(p), float(np.exp(logc)), residual


def defect_scaling(splitting: SplittingField, x, h_list, pair: tuple = (0, 1),
                   space: Space | None = None, floor: float = FLOOR_TOL) -> ScalingFit:
    """Least-squares fit log|defect| = p log h + log C over a geometric h list.

    The verdict is driven by the transverse (F-)component of the closure
    error: an involutive field still fails to close its loops at order h^2,
    but the defect stays tangent to the leaf, so only the transverse part
    witnesses non-integrability and its quadratic coefficient estimates
    |Pi [Y_i, Y_j]|. The full-defect fit is reported alongside.
    """
    hs = sorted(float(h) for h in h_list)
    if len(hs) < 4:
        raise ConfigError("defect_scaling needs at least 4 loop sizes")
    frame = orthonormal_frame(splitting, np.asarray(x, dtype=float))
    records = [holonomy_defect(splitting, x, h, pair, space, frame) for h in hs]
    trans = np.array([r.transverse_normalized * r.h**2 for r in records])
    full = np.array([r.defect_norm for r in records])
    if np.all(trans <= floor):
        return ScalingFit(tuple(hs), tuple(trans), None, None, None, None, 0.0, True,
                          "involutive_at_resolution")
    p, c, residual = _loglog_fit(hs, trans)
    p_full, c_full, _ = _loglog_fit(hs, full)
    verdict = "involutive" if p >= 2.5 else "non_involutive"
    return ScalingFit(tuple(hs), tuple(trans), p, c, p_full, c_full,
                      residual, False, verdict)


# ---------------------------------------------------------------------------
# Candidate integral surfaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SurfaceMesh:
    center: np.ndarray
    extent: float
    vertices: np.ndarray        # (rows, cols, n)
    quads: tuple                # ((r, c) anchored cells), index into vertices
    tangency_residuals: np.ndarray   # radians, per vertex (nan where undefined)
    truncated: bool


def grow_surface(splitting: SplittingField, x, extent: float, resolution: int,
                 space: Space | None = None) -> SurfaceMesh:
    """Flow a 2-frame over a parameter grid to grow a candidate integral surface.

    Vertex (r, c) is reached by flowing u_r along Y_0 from x, then v_c along
    Y_1. Emits the per-vertex angle between the mesh tangent plane (from grid
    differences) and E(vertex); for involutive analytic fields it stays at
    integrator noise, otherwise it grows with the extent.
    """
    if splitting.dim_e != 2:
        raise ConfigError("grow_surface needs dim(E) = 2")
    if resolution < 2 or extent <= 0:
        raise ConfigError("need resolution >= 2 and extent > 0")
    x = np.asarray(x, dtype=float)
    frame = orthonormal_frame(splitting, x)
    params = np.linspace(-extent, extent, 2 * resolution + 1)
    rows = len(params)
    n = len(x)
    vertices = np.full((rows, rows, n), np.nan)
    truncated = False
    for r, u in enumerate(params):
        try:
            row_base = _flow(frame.fields[0], x, u, space)
        except IntegratorError:
            truncated = True
            continue
        for c, v in enumerate(params):
            try:
                vertices[r, c] = _flow(frame.fields[1], row_base, v, space)
            except IntegratorError:
                truncated = True

    du = np.gradient(vertices, params, axis=0)
    dv = np.gradient(vertices, params, axis=1)
    residuals = np.full((rows, rows), np.nan)
    for r in range(rows):
        for c in range(rows):
            if np.any(np.isnan(vertices[r, c])):
                continue
            tangent = np.column_stack([du[r, c], dv[r, c]])
            if np.linalg.matrix_rank(tangent, tol=1e-12) < 2:
                truncated = True   # mesh folding: degenerate parameterization
                continue
            e_here = splitting.e_basis(vertices[r, c])
            residuals[r, c] = float(np.max(subspace_angles(tangent, e_here)))
    quads = tuple((r, c) for r in range(rows - 1) for c in range(rows - 1)
                  if not np.any(np.isnan(vertices[r:r + 2, c:c + 2])))
    return SurfaceMesh(x, float(extent), vertices, quads, residuals, truncated)


def write_mesh(mesh: SurfaceMesh, path) -> None:
    """Plain-text vertex/face export (OBJ-style `v`/`f` lines, 1-based faces)."""
    rows = mesh.vertices.shape[0]
    index = {}
    lines = []
    for r in range(rows):
        for c in range(rows):
            v = mesh.vertices[r, c]
            if np.any(np.isnan(v)):
                continue
            index[(r, c)] = len(index) + 1
            coords = " ".join(format(float(z), ".17g") for z in v)
            lines.append(f"v {coords}")
    for (r, c) in mesh.quads:
        corners = [(r, c), (r + 1, c), (r + 1, c + 1), (r, c + 1)]
        lines.append("f " + " ".join(str(index[p]) for p in corners))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
