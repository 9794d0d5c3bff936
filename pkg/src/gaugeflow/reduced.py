"""Dimensional reductions: Nahm flow on the half-line, Bogomolny residuals,
and commuting-operator residuals on 3-grids.

Nahm's equations read dX1/dy + [X2, X3] = 0 and cyclic permutations.  The
boundary solver removes the 1/y pole analytically: it integrates the regular
remainder R in X_i = t_i / y + R_i and shoots on the remainder's free
parameters at y0 against Coulomb data at y_max.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import (
    AlgebraError,
    LieElement,
    PrincipalTriple,
    algebra_basis,
    coefficients,
    LieAlgebraSpec,
)
from .fields import (
    GridError,
    GridSpec,
    HalfLineSpec,
    LatticeField,
    axis_derivative,
    covariant_derivative,
    curvature,
    field_norm,
    hodge_star,
)


class NahmBlowupError(RuntimeError):
    """Trajectory norm exceeded the configured bound (finite-y pole)."""


class ShootingError(RuntimeError):
    """Boundary-value iteration failed to converge."""


@dataclass(frozen=True)
class NahmState:
    """Triple (X1, X2, X3) at one half-line position y > 0."""

    X1: LieElement
    X2: LieElement
    X3: LieElement
    y: float

    def __post_init__(self):
        if self.y <= 0:
            raise GridError("Nahm states live at y > 0")
        if not (self.X1.n == self.X2.n == self.X3.n):
            raise AlgebraError("triple elements live in different algebras")

    def as_array(self) -> np.ndarray:
        return np.stack([self.X1.matrix, self.X2.matrix, self.X3.matrix])


@dataclass(frozen=True)
class NahmTrajectory:
    """Per-node states on a strictly increasing half-line grid."""

    nodes: np.ndarray
    values: np.ndarray  # shape (len(nodes), 3, N, N)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        values = np.asarray(self.values, dtype=complex)
        if nodes.ndim != 1 or np.any(np.diff(nodes) <= 0) or nodes[0] <= 0:
            raise GridError("trajectory nodes must be positive and increasing")
        if values.shape[:2] != (len(nodes), 3) or values.shape[-1] != values.shape[-2]:
            raise GridError("trajectory values must have shape (nodes, 3, N, N)")
        nodes.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.shape[-1]

    def state(self, index: int) -> NahmState:
        v = self.values[index]
        return NahmState(
            LieElement(v[0]), LieElement(v[1]), LieElement(v[2]), float(self.nodes[index])
        )


@dataclass(frozen=True)
class CoulombData:
    """Commuting torus-algebra triple (c1, c2, c3): the large-y asymptote."""

    c1: LieElement
    c2: LieElement
    c3: LieElement

    def __post_init__(self):
        cs = (self.c1, self.c2, self.c3)
        for i in range(3):
            for j in range(i + 1, 3):
                comm = cs[i].matrix @ cs[j].matrix - cs[j].matrix @ cs[i].matrix
                if np.linalg.norm(comm) > 1e-12 * max(
                    1.0, cs[i].norm() * cs[j].norm()
                ):
                    raise AlgebraError("Coulomb data must commute")
        offdiag = sum(
            np.abs(c.matrix - np.diag(np.diag(c.matrix))).max() for c in cs
        )
        if offdiag > 1e-12:
            raise AlgebraError("Coulomb data must lie in the diagonal torus algebra")


def _nahm_rhs(x: np.ndarray) -> np.ndarray:
    """dX_i/dy = -[X_{i+1}, X_{i+2}] (cyclic) on a (3, N, N) stack."""
    out = np.empty_like(x)
    for i in range(3):
        a, b = x[(i + 1) % 3], x[(i + 2) % 3]
        out[i] = -(a @ b - b @ a)
    return out


def nahm_residual(traj: NahmTrajectory, derivatives: np.ndarray | None = None) -> np.ndarray:
    """Per-node residual norms of the three cyclic equations.

    Derivatives default to second-order finite differences on the graded
    nodes; pass analytic values (same shape as ``traj.values``) to isolate
    the algebraic content.
    """
    if len(traj.nodes) < 4:
        raise GridError("need at least 4 nodes for the residual stencil")
    if derivatives is None:
        derivatives = np.gradient(traj.values, traj.nodes, axis=0, edge_order=2)
    res = derivatives - _nahm_rhs_stack(traj.values)
    return np.linalg.norm(res.reshape(len(traj.nodes), -1), axis=1)


def _nahm_rhs_stack(values: np.ndarray) -> np.ndarray:
    out = np.empty_like(values)
    for i in range(3):
        a, b = values[:, (i + 1) % 3], values[:, (i + 2) % 3]
        out[:, i] = -(a @ b - b @ a)
    return out


def integrate_nahm(
    initial: NahmState,
    grid: HalfLineSpec,
    max_step: float = 1e-3,
    blowup_bound: float = 1e6,
) -> NahmTrajectory:
    """RK4 integration of the full Nahm system along the graded grid.

    The integrator subdivides each node gap into steps of at most
    ``max_step`` and aborts with :class:`NahmBlowupError` past the norm
    bound (Nahm solutions can pole at finite y).
    """
    nodes = grid.coordinates()
    if not math.isclose(initial.y, nodes[0], rel_tol=1e-12, abs_tol=1e-15):
        raise GridError(
            f"initial state at y={initial.y} does not match first node {nodes[0]}"
        )
    x = initial.as_array().astype(complex)
    values = [x.copy()]
    for j in range(len(nodes) - 1):
        gap = nodes[j + 1] - nodes[j]
        nsub = max(1, int(math.ceil(gap / max_step)))
        h = gap / nsub
        for _ in range(nsub):
            k1 = _nahm_rhs(x)
            k2 = _nahm_rhs(x + 0.5 * h * k1)
            k3 = _nahm_rhs(x + 0.5 * h * k2)
            k4 = _nahm_rhs(x + h * k3)
            x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            norm = np.linalg.norm(x.reshape(3, -1), axis=1).max()
            if norm > blowup_bound:
                raise NahmBlowupError(
                    f"norm {norm:.3e} exceeded bound {blowup_bound:.1e} near y={nodes[j]:.4f}"
                )
        values.append(x.copy())
    return NahmTrajectory(nodes, np.array(values))


def lax_invariant(state: NahmState, zeta: complex) -> complex:
    """Tr A(zeta)^2 with A(zeta) = (X1 + iX2) - 2i X3 zeta + (X1 - iX2) zeta^2.

    Conserved along Nahm flow; used as an integration quality check.
    """
    x1, x2, x3 = state.X1.matrix, state.X2.matrix, state.X3.matrix
    a = (x1 + 1j * x2) - 2j * x3 * zeta + (x1 - 1j * x2) * zeta**2
    return complex(np.trace(a @ a))


def lax_drift(traj: NahmTrajectory, zetas=(0.0, 1.0, 1j, -1.0)) -> float:
    """Max relative drift of Tr A(zeta)^2 over the trajectory."""
    worst = 0.0
    for zeta in zetas:
        vals = [lax_invariant(traj.state(i), zeta) for i in range(len(traj.nodes))]
        ref = vals[0]
        drift = max(abs(v - ref) for v in vals) / (1.0 + abs(ref))
        worst = max(worst, drift)
    return worst


def bps_profile(triple: PrincipalTriple, k: float, y: np.ndarray) -> np.ndarray:
    """Closed-form boundary solution: X1 = k coth(ky) t1, X2,3 = k csch(ky) t2,3.

    Interpolates between the pole t_i/y at small y and the Coulomb asymptote
    (k t1, 0, 0) at large y; the k -> 0 limit is the pure pole.
    """
    y = np.asarray(y, dtype=float)
    if k == 0.0:
        f1 = f2 = 1.0 / y
    else:
        f1 = k / np.tanh(k * y)
        f2 = k / np.sinh(k * y)
    t1, t2, t3 = (t.matrix for t in triple.as_tuple())
    out = np.empty((len(y), 3, triple.n, triple.n), dtype=complex)
    out[:, 0] = f1[:, None, None] * t1
    out[:, 1] = f2[:, None, None] * t2
    out[:, 2] = f2[:, None, None] * t3
    return out


def pole_trajectory(triple: PrincipalTriple, y: np.ndarray) -> NahmTrajectory:
    return NahmTrajectory(y, bps_profile(triple, 0.0, y))


# -- pole-to-Coulomb shooting -----------------------------------------------------

def _reduced_rhs(y: float, r: np.ndarray) -> np.ndarray:
    """Remainder equations for the su(2)-symmetric reduction.

    f1 = 1/y + r1 multiplies t1, f2 = f3 = 1/y + r2 multiply t2, t3:
    r1' = -2 r2 / y - r2^2,  r2' = -(r1 + r2)/y - r1 r2.
    """
    r1, r2 = r
    return np.array([-2.0 * r2 / y - r2 * r2, -(r1 + r2) / y - r1 * r2])


def _integrate_remainder(r0: np.ndarray, nodes: np.ndarray, max_step: float) -> np.ndarray:
    r = np.array(r0, dtype=float)
    out = [r.copy()]
    for j in range(len(nodes) - 1):
        gap = nodes[j + 1] - nodes[j]
        nsub = max(1, int(math.ceil(gap / max_step)))
        h = gap / nsub
        y = nodes[j]
        for _ in range(nsub):
            k1 = _reduced_rhs(y, r)
            k2 = _reduced_rhs(y + 0.5 * h, r + 0.5 * h * k1)
            k3 = _reduced_rhs(y + 0.5 * h, r + 0.5 * h * k2)
            k4 = _reduced_rhs(y + h, r + h * k3)
            r = r + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            y += h
            if np.abs(r).max() > 1e8:
                raise NahmBlowupError(f"remainder blew up near y={y:.4f}")
        out.append(r.copy())
    return np.array(out)


def _pole_series_start(a: float, y0: float) -> np.ndarray:
    """Remainder of the pole-asymptotic family at y0, through third order.

    Regular solutions leave the pole along the single admissible power mode:
    r1 = 2a y - (4/5) a^2 y^3 + ...,  r2 = -a y + (7/10) a^2 y^3 + ...
    (coefficients from matching the remainder equations order by order).
    """
    return np.array(
        [2.0 * a * y0 - 0.8 * a * a * y0**3, -a * y0 + 0.7 * a * a * y0**3]
    )


def default_shooting_grid() -> HalfLineSpec:
    """Dense graded half-line on which the independent finite-difference
    residual of shot trajectories stays below 1e-6."""
    return HalfLineSpec(0.1, 15.0, 2600)


def solve_pole_to_coulomb(
    triple: PrincipalTriple,
    k: float,
    grid: HalfLineSpec | None = None,
    tol: float = 1e-8,
    max_iter: int = 200,
    max_step: float = 0.02,
) -> NahmTrajectory:
    """Shoot from the pole asymptote at y0 to Coulomb data (k t1, 0, 0) at y_max.

    SU(2) only.  The rotationally symmetric reduction X_i = f_i(y) t_i with
    f2 = f3 closes exactly and removes the growing transverse mode, so
    forward shooting over long half-lines stays well conditioned.  Solutions
    asymptotic to the pole form a one-parameter family (the quantity
    f1^2 - f2^2 is conserved and equals the squared Coulomb scale), so the
    solver shoots on the single mode amplitude in :func:`_pole_series_start`
    against the mismatch f1(y_max) - k.  For k = 0 the Coulomb asymptote
    degenerates to the algebraic pole tail and the endpoint model is
    1/y_max.

    Damped secant iteration; raises :class:`ShootingError` past max_iter.
    """
    if triple.n != 2:
        raise AlgebraError("pole-to-Coulomb shooting is implemented for SU(2)")
    if k < 0:
        raise ValueError("Coulomb scale k must be nonnegative")
    if grid is None:
        grid = default_shooting_grid()
    nodes = grid.coordinates()
    y0, ymax = nodes[0], nodes[-1]
    target = k if k > 0.0 else 1.0 / ymax

    def mismatch(a: float) -> float:
        r = _integrate_remainder(_pole_series_start(a, y0), nodes, max_step)
        return 1.0 / ymax + r[-1, 0] - target

    a_prev, f_prev = 0.0, mismatch(0.0)
    a_cur = k * k / 6.0 if k > 0 else 1e-4  # leading-order amplitude of the mode
    f_cur = mismatch(a_cur)
    converged = abs(f_prev) <= tol or abs(f_cur) <= tol
    it = 0
    while not converged:
        it += 1
        if it > max_iter:
            raise ShootingError(
                f"no convergence after {max_iter} iterations (|mismatch|={abs(f_cur):.3e})"
            )
        denom = f_cur - f_prev
        if denom == 0.0:
            raise ShootingError("secant stalled: flat mismatch")
        step = -f_cur * (a_cur - a_prev) / denom
        lam = 1.0
        for _ in range(40):
            a_new = a_cur + lam * step
            try:
                f_new = mismatch(a_new)
            except NahmBlowupError:
                lam *= 0.5
                continue
            if abs(f_new) < abs(f_cur):
                break
            lam *= 0.5
        else:
            raise ShootingError("damped secant failed to reduce the mismatch")
        a_prev, f_prev = a_cur, f_cur
        a_cur, f_cur = a_new, f_new
        converged = abs(f_cur) <= tol
    if abs(f_prev) < abs(f_cur):
        a_cur = a_prev
    r = _integrate_remainder(_pole_series_start(a_cur, y0), nodes, max_step)
    f1 = 1.0 / nodes + r[:, 0]
    f2 = 1.0 / nodes + r[:, 1]
    t1, t2, t3 = (t.matrix for t in triple.as_tuple())
    values = np.empty((len(nodes), 3, 2, 2), dtype=complex)
    values[:, 0] = f1[:, None, None] * t1
    values[:, 1] = f2[:, None, None] * t2
    values[:, 2] = f2[:, None, None] * t3
    return NahmTrajectory(nodes, values)


def pole_split_derivatives(traj: NahmTrajectory, triple: PrincipalTriple) -> np.ndarray:
    """Derivative estimate treating the 1/y pole analytically.

    Writes X = t/y + R, differentiates the regular remainder R by the node
    stencils and adds the exact -t/y^2; the resulting residual certifies a
    pole-asymptotic trajectory without the stencil noise of the bare 1/y.
    """
    y = traj.nodes
    pole = np.stack([t.matrix for t in triple.as_tuple()])
    pole_vals = pole[None, :, :, :] / y[:, None, None, None]
    remainder = traj.values - pole_vals
    d_remainder = np.gradient(remainder, y, axis=0, edge_order=2)
    return d_remainder - pole_vals / y[:, None, None, None]


# -- Bogomolny equation -------------------------------------------------------------

def bogomolny_residual(A: LatticeField, phi0: LatticeField, deriv=None) -> LatticeField:
    """F + star d_A phi0 on a 3-grid: the folded form of the flatness equation."""
    if A.grid.dim != 3:
        raise GridError("Bogomolny residual lives on 3-grids")
    if A.grid != phi0.grid:
        raise GridError("fields live on different grids")
    if phi0.degree != 0:
        raise GridError("phi0 must be a 0-form")
    return curvature(A, deriv=deriv) + hodge_star(
        covariant_derivative(A, phi0, deriv=deriv)
    )


def vanishing_proxy(A: LatticeField, phi0: LatticeField) -> dict:
    """Measured constant C = |d_A phi0| / |bogomolny residual| on a fixture.

    On compact 3-grids exact solutions have covariantly constant phi0; the
    proxy bounds how far a near-solution can hide scalar gradient in the
    residual.
    """
    res = field_norm(bogomolny_residual(A, phi0))
    grad = field_norm(covariant_derivative(A, phi0))
    return {
        "bogomolny_norm": res,
        "dphi0_norm": grad,
        "constant": grad / max(res, 1e-300),
    }


# -- commuting-operator residuals ----------------------------------------------------

@dataclass(frozen=True)
class OperatorTriple:
    """Three first-order operators D_i = (optional derivative) + a_i on a 3-grid.

    Coefficients are general complex matrix fields (the complexified
    combinations of a connection and a Higgs field); direction indices of
    derivative-carrying operators must be distinct.
    """

    directions: tuple[int, int, int]
    coefficients: tuple[LatticeField, LatticeField, LatticeField]
    uses_derivative: tuple[bool, bool, bool] = (True, True, True)

    def __post_init__(self):
        grids = {c.grid for c in self.coefficients}
        if len(grids) != 1:
            raise GridError("operator coefficients live on different grids")
        grid = self.coefficients[0].grid
        if grid.dim != 3:
            raise GridError("operator triples live on 3-grids")
        if any(c.degree != 0 for c in self.coefficients):
            raise GridError("operator coefficients must be 0-forms")
        used = [d for d, u in zip(self.directions, self.uses_derivative) if u]
        if len(set(used)) != len(used):
            raise GridError("derivative directions must be distinct")
        if any(not 0 <= d < 3 for d in self.directions):
            raise GridError("direction indices must index the 3-grid axes")

    @property
    def grid(self) -> GridSpec:
        return self.coefficients[0].grid

    @property
    def n(self) -> int:
        return self.coefficients[0].n


def _coeff(op: OperatorTriple, i: int) -> np.ndarray:
    return op.coefficients[i].data[..., 0, :, :]


def commutator_coefficient(op: OperatorTriple, i: int, j: int) -> np.ndarray:
    """[D_i, D_j] as a multiplication operator (curvature-type expression).

    F_ij = del_i a_j - del_j a_i + [a_i, a_j], with the derivative terms
    present only when the operators carry them.
    """
    ai, aj = _coeff(op, i), _coeff(op, j)
    grid = op.grid
    out = ai @ aj - aj @ ai
    if op.uses_derivative[i]:
        out = out + axis_derivative(aj, grid, op.directions[i])
    if op.uses_derivative[j]:
        out = out - axis_derivative(ai, grid, op.directions[j])
    return out


def apply_operator(op: OperatorTriple, i: int, section: np.ndarray) -> np.ndarray:
    """D_i acting on a matrix-valued test section by left multiplication."""
    out = _coeff(op, i) @ section
    if op.uses_derivative[i]:
        out = out + axis_derivative(section, op.grid, op.directions[i])
    return out


def commuting_operator_residual(op: OperatorTriple, probes: int = 3, seed: int = 0) -> dict:
    """Norms of all [D_i, D_j] and of the moment constraint sum [D_i, D_i^dag].

    Commutators are evaluated both as coefficient expressions and directly on
    a probe basis of constant random sections (for which the discrete Leibniz
    rule is exact, so the two evaluations agree to roundoff).  The moment
    residual sum_i (del_i(a_i + a_i^dag) + [a_i, a_i^dag]) is zeroth order:
    the derivative terms cancel in the anticommutator difference.
    """
    grid = op.grid
    n = op.n
    w = grid.site_weights()
    rng = np.random.default_rng(seed)

    comm_norms = {}
    max_probe_defect = 0.0
    for i in range(3):
        for j in range(i + 1, 3):
            fij = commutator_coefficient(op, i, j)
            comm_norms[f"{i}{j}"] = float(
                np.sqrt((w * np.einsum("...ij,...ij->...", fij, fij.conj()).real).sum())
            )
            for _ in range(probes):
                section = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
                direct = apply_operator(op, i, apply_operator(op, j, section)) - apply_operator(
                    op, j, apply_operator(op, i, section)
                )
                max_probe_defect = max(
                    max_probe_defect, float(np.abs(direct - fij @ section).max())
                )

    moment = np.zeros(grid.shape + (n, n), dtype=complex)
    for i in range(3):
        ai = _coeff(op, i)
        adag = np.swapaxes(ai.conj(), -1, -2)
        moment = moment + (ai @ adag - adag @ ai)
        if op.uses_derivative[i]:
            moment = moment + axis_derivative(ai + adag, grid, op.directions[i])
    moment_norm = float(
        np.sqrt((w * np.einsum("...ij,...ij->...", moment, moment.conj()).real).sum())
    )
    return {
        "commutator_norms": comm_norms,
        "moment_norm": moment_norm,
        "probe_defect": max_probe_defect,
    }


def flat_connection_triple(A: LatticeField, phi: LatticeField) -> OperatorTriple:
    """Experimental coupling-one assembly D_i = del_i + (A_i + i phi_i).

    Commutators give the complexified curvature, and the moment constraint
    reduces to 2i times the unitary moment map d_A star phi.  The general
    coupling-dependent construction is not pinned down here; this member is
    the hermitian-metric / flat-complex-connection form.
    """
    if A.grid.dim != 3 or A.degree != 1 or phi.degree != 1:
        raise GridError("flat-connection triple needs 1-forms on a 3-grid")
    coeffs = []
    for i in range(3):
        data = (A.data[..., i, :, :] + 1j * phi.data[..., i, :, :])[..., None, :, :]
        coeffs.append(LatticeField(A.grid, 0, data))
    return OperatorTriple((0, 1, 2), tuple(coeffs))


# -- trajectory CSV -------------------------------------------------------------------

def trajectory_csv_rows(traj: NahmTrajectory, zetas=(0.0, 1.0, 1j, -1.0)) -> tuple[list[str], list[list[float]]]:
    """Header and rows: y, basis coefficients of each X_i, Lax drift columns."""
    spec = LieAlgebraSpec(traj.n)
    basis = algebra_basis(spec)
    header = ["y"]
    for i in range(1, 4):
        header += [f"X{i}_c{b}" for b in range(len(basis))]
    header += [f"lax_drift_zeta{zi}" for zi in range(len(zetas))]
    refs = [lax_invariant(traj.state(0), z) for z in zetas]
    rows = []
    for idx in range(len(traj.nodes)):
        st = traj.state(idx)
        row = [float(traj.nodes[idx])]
        for X in (st.X1, st.X2, st.X3):
            row += coefficients(X, basis)
        for z, ref in zip(zetas, refs):
            row.append(abs(lax_invariant(st, z) - ref) / (1.0 + abs(ref)))
        rows.append(row)
    return header, rows
