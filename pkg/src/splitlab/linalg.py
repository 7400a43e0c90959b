"""Small dense linear-algebra kernels.

The centerpiece is a graded SVD: the singular value decomposition of
A @ diag(exp(w)) computed entirely with per-column log scales, so products of
Jacobians can be accumulated for thousands of steps even when the spread of
singular values exceeds the floating-point exponent range (cat-map cocycles
reach e^900 within a few hundred steps). One-sided Jacobi orthogonalization
computes every singular value of a column-graded matrix with relative accuracy
on the order of eps * cond(column-normalized A), independent of the grading.
"""

from __future__ import annotations

import numpy as np


def orth_columns(basis: np.ndarray) -> np.ndarray:
    """Orthonormal basis of span(columns), QR with positive diagonal.

    The sign convention makes the frame a continuous function of a
    continuously varying full-rank input, which downstream finite
    differences rely on.
    """
    q, r = np.linalg.qr(np.asarray(basis, dtype=float))
    signs = np.sign(np.diag(r))
    signs[signs == 0.0] = 1.0
    return q * signs


def projector(basis: np.ndarray) -> np.ndarray:
    """Orthogonal projector onto span(columns)."""
    q = orth_columns(basis)
    return q @ q.T


def principal_angle_gap(a: np.ndarray, b: np.ndarray) -> float:
    """Largest principal angle between the two column spans (radians).

    Sine-based, so angles far below sqrt(eps) are still resolved (the arccos
    of an inner product bottoms out near 1e-8).
    """
    qa, qb = orth_columns(a), orth_columns(b)
    s = np.linalg.svd(qb - qa @ (qa.T @ qb), compute_uv=False)
    return float(np.arcsin(np.clip(s.max(initial=0.0), 0.0, 1.0)))


def _rotation_factors(d: float, delta: float):
    """Jacobi rotation data for two columns with unit directions and log scales.

    d = <q_p, q_q> (unit directions), delta = c_q - c_p (log-scale gap).
    Returns (c, s, f_pq, f_qp) such that the rotated unit directions are
        p: c*q_p - f_pq*q_q      with f_pq = s*exp(delta)
        q: f_qp*q_p + c*q_q      with f_qp = s*exp(-delta)
    and [c, s; -s, c] is the exact plane rotation acting on the scaled columns.
    Large |delta| uses the asymptotic (Gram-Schmidt) limit to avoid overflow.
    """
    if abs(delta) <= 37.0:
        zeta = np.sinh(delta) / d
        if abs(zeta) > 1e150:
            t = 1.0 / (2.0 * zeta)
        else:
            t = np.sign(zeta) / (abs(zeta) + np.hypot(1.0, zeta))
        c = 1.0 / np.hypot(1.0, t)
        s = c * t
        return c, s, s * np.exp(delta), s * np.exp(-delta)
    if delta > 0.0:
        # q-column dominates: p gets the O(d) Gram-Schmidt correction
        return 1.0, d * np.exp(-delta), d, d * np.exp(-2.0 * delta)
    return 1.0, -d * np.exp(delta), -d * np.exp(2.0 * delta), -d


def graded_svd(a: np.ndarray, w: np.ndarray, v: np.ndarray | None = None,
               tol: float = 1e-15, max_sweeps: int = 60):
    """SVD of a @ diag(exp(w)) for well-conditioned a and arbitrarily graded w.

    Returns (u, w_out, v_out) with orthonormal u (n, m) and v_out (m, m),
    w_out descending, satisfying a @ diag(exp(w)) = u @ diag(exp(w_out)) @ v_out.T.
    If v is given it is treated as the incoming right factor and the rotations
    are accumulated into it (v_out = v @ R).
    """
    a = np.asarray(a, dtype=float)
    m = a.shape[1]
    q = a.copy()
    c = np.array(w, dtype=float)
    for i in range(m):
        nrm = np.linalg.norm(q[:, i])
        if nrm == 0.0 or not np.isfinite(nrm):
            raise np.linalg.LinAlgError("graded_svd: zero or non-finite column")
        q[:, i] /= nrm
        c[i] += np.log(nrm)
    v = np.eye(m) if v is None else v.copy()

    for _ in range(max_sweeps):
        off = 0.0
        for p in range(m - 1):
            for r in range(p + 1, m):
                d = float(q[:, p] @ q[:, r])
                off = max(off, abs(d))
                if abs(d) <= tol:
                    continue
                cth, sth, f_pq, f_qp = _rotation_factors(d, c[r] - c[p])
                qp = cth * q[:, p] - f_pq * q[:, r]
                qr_ = f_qp * q[:, p] + cth * q[:, r]
                n_p, n_r = np.linalg.norm(qp), np.linalg.norm(qr_)
                q[:, p] = qp / n_p
                c[p] += np.log(n_p)
                q[:, r] = qr_ / n_r
                c[r] += np.log(n_r)
                rot = np.array([[cth, sth], [-sth, cth]])
                v[:, [p, r]] = v[:, [p, r]] @ rot
        if off <= tol:
            break
    order = np.argsort(-c, kind="stable")
    return q[:, order], c[order], v[:, order]


class LogProduct:
    """Running factorization U diag(exp(w)) V^T of a product of step matrices.

    step(M) replaces the product P by M @ P. All singular values stay exact
    in log scale regardless of spread; U holds left singular directions at the
    current endpoint, V right singular directions at the start.
    """

    def __init__(self, dim: int):
        self.dim = dim
        self.u = np.eye(dim)
        self.w = np.zeros(dim)
        self.v = np.eye(dim)
        self.steps = 0

    def step(self, m: np.ndarray) -> None:
        self.u, self.w, self.v = graded_svd(m @ self.u, self.w, self.v)
        self.steps += 1

    @property
    def log_norm(self) -> float:
        return float(self.w[0])

    def unit_scaled_matrix(self) -> np.ndarray:
        """exp(-w_max) * product. Spectral norm 1; entries of deeply graded
        directions underflow here, use w for exact log singular values."""
        return self.u @ np.diag(np.exp(self.w - self.w[0])) @ self.v.T
