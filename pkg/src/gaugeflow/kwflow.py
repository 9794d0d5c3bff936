"""Four-dimensional residual system, gradient-flow stepping, and equivalences.

Conventions (fixed once, used everywhere):

* Orientation is the grid axis order. Grids with a half-line put it first;
  with that choice the pole configuration ``embed_nahm_pole`` lies in the
  zero set of the residual system exactly at coupling t = 1 (the value
  tan(alpha/2) at alpha = pi/2, where the half-line flow of the extended
  Morse function is translation invariant). The pole selects this sign;
  the opposite orientation would select t = -1.
* The coupling t lives on the projective line and is stored as a
  normalized pair (p, q) with t = p/q; the multiplied forms at t = 0 and
  t = infinity are the (p, q) = (0, 1) and (1, 0) members.
* Flow trajectories assemble into four-dimensional configurations with the
  flow parameter as the LAST axis and fourth coordinate x4 = -(lam/2pi) s
  (descending flow time), lam the Morse level normalization.  With the
  default lam = 2pi the real-sector flow satisfies F+ = 0 and the extended
  flow satisfies the residual system at t = tan(alpha/2) exactly in the
  continuum; discretely the residuals vanish at the stencil order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import LieAlgebraSpec, LieElement
from .fields import (
    AxisSpec,
    GridError,
    GridSpec,
    LatticeField,
    covariant_derivative,
    curvature,
    field_norm,
    hodge_star,
    periodic_box,
    sd_asd_project,
    wedge_square,
    zero_field,
)
from .functionals import (
    ComplexConnection,
    FlowState,
    FlowTangent,
    MorseParams,
    extended_h,
    gradient_h,
    moment_map,
)


class KWError(ValueError):
    pass


class FlowStepFault(RuntimeError):
    """The Morse function increased across a step: the step size is too large."""


@dataclass(frozen=True)
class KWParams:
    """Projective coupling t = p/q, stored normalized with q >= 0."""

    p: float
    q: float

    def __post_init__(self):
        norm = math.hypot(self.p, self.q)
        if norm == 0.0:
            raise KWError("projective coupling (0, 0) is not a point of RP^1")
        p, q = self.p / norm, self.q / norm
        if q < 0.0 or (q == 0.0 and p < 0.0):
            p, q = -p, -q
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @staticmethod
    def from_t(t: float) -> "KWParams":
        if math.isinf(t):
            return KWParams(1.0, 0.0)
        return KWParams(float(t), 1.0)

    @property
    def t(self) -> float:
        if self.q == 0.0:
            return math.inf
        return self.p / self.q

    @property
    def is_zero(self) -> bool:
        return self.p == 0.0

    @property
    def is_infinite(self) -> bool:
        return self.q == 0.0

    def as_pair(self) -> list[float]:
        return [self.p, self.q]


def t_from_alpha(alpha: float) -> KWParams:
    """Coupling t = (1 - cos a)/sin a = tan(a/2) as a projective point.

    alpha must lie in (0, 2pi); alpha = pi maps to the point at infinity.
    Right angles are snapped to the exact couplings t = 1 and t = infinity
    so that special values are exact in floating point.
    """
    if not 0.0 < alpha < 2.0 * math.pi:
        raise KWError(f"alpha must lie in (0, 2*pi), got {alpha}")
    if alpha == math.pi / 2:
        return KWParams(1.0, 1.0)
    if alpha == math.pi:
        return KWParams(1.0, 0.0)
    if alpha == 3 * math.pi / 2:
        return KWParams(-1.0, 1.0)
    return KWParams(math.sin(alpha / 2.0), math.cos(alpha / 2.0))


@dataclass(frozen=True)
class FourConfig:
    """Gauge pair (A, phi) of 1-forms on a shared 4-grid.

    ``background_curvature`` optionally declares a constant curvature
    contribution carried by transition functions rather than by the stored
    potential (used for flux fixtures on closed grids and declared boundary
    trivializations on open ones).
    """

    A: LatticeField
    phi: LatticeField
    background_curvature: LatticeField | None = None

    def __post_init__(self):
        if self.A.grid != self.phi.grid:
            raise GridError("A and phi live on different grids")
        if self.A.grid.dim != 4:
            raise GridError("FourConfig needs a 4-dimensional grid")
        if self.A.degree != 1 or self.phi.degree != 1:
            raise GridError("A and phi must be 1-forms")
        if self.background_curvature is not None:
            bg = self.background_curvature
            if bg.grid != self.A.grid or bg.degree != 2:
                raise GridError("background curvature must be a 2-form on the grid")

    @property
    def grid(self) -> GridSpec:
        return self.A.grid

    @property
    def n(self) -> int:
        return self.A.n

    def total_curvature(self, deriv=None) -> LatticeField:
        F = curvature(self.A, deriv=deriv)
        if self.background_curvature is not None:
            F = F + self.background_curvature
        return F


@dataclass(frozen=True)
class KWResidual:
    """Residual triple of the coupled system in the multiplied projective form.

    r_plus  = q (F - phi^phi)+ - p (d_A phi)+
    r_minus = p (F - phi^phi)- + q (d_A phi)-
    r_moment = covariant divergence of phi (0-form)

    with (p, q) the normalized projective coupling; at t = 0 and infinity
    these are exactly the multiplied endpoint forms.
    """

    r_plus: LatticeField
    r_minus: LatticeField
    r_moment: LatticeField
    params: KWParams

    def norms(self) -> dict:
        np_, nm, nmom = (
            field_norm(self.r_plus),
            field_norm(self.r_minus),
            field_norm(self.r_moment),
        )
        return {
            "plus": np_,
            "minus": nm,
            "moment": nmom,
            "total": math.sqrt(np_**2 + nm**2 + nmom**2),
        }


def kw_residual(cfg: FourConfig, params: KWParams, deriv=None) -> KWResidual:
    """Evaluate the residual system on a four-dimensional configuration.

    ``deriv`` optionally replaces the stencil derivative with an analytic
    rule (e.g. :func:`gaugeflow.fields.pole_derivative_rule` for 1/y data).
    """
    F = cfg.total_curvature(deriv=deriv)
    X = F - wedge_square(cfg.phi)
    Y = covariant_derivative(cfg.A, cfg.phi, deriv=deriv)
    Xp, Xm = sd_asd_project(X)
    Yp, Ym = sd_asd_project(Y)
    p, q = params.p, params.q
    r_plus = LatticeField(cfg.grid, 2, q * Xp.data - p * Yp.data)
    r_minus = LatticeField(cfg.grid, 2, p * Xm.data + q * Ym.data)
    r_moment = hodge_star(covariant_derivative(cfg.A, hodge_star(cfg.phi), deriv=deriv))
    return KWResidual(r_plus, r_minus, r_moment, params)


def involution_check(cfg: FourConfig, params: KWParams, deriv=None) -> dict:
    """At t in {0, infinity} the system admits phi -> -phi.

    Returns the residual norms of (A, phi) and (A, -phi) in the multiplied
    form together with the maximum discrepancy between them.
    """
    if not (params.is_zero or params.is_infinite):
        raise KWError("the phi -> -phi involution holds only at t = 0 or infinity")
    res = kw_residual(cfg, params, deriv=deriv).norms()
    flipped = FourConfig(cfg.A, -cfg.phi, cfg.background_curvature)
    res_f = kw_residual(flipped, params, deriv=deriv).norms()
    discrepancy = max(abs(res[k] - res_f[k]) for k in ("plus", "minus", "moment"))
    return {"norms": res, "norms_flipped": res_f, "max_discrepancy": discrepancy}


def nahm_pole_config(triple, grid: GridSpec) -> FourConfig:
    """A = 0 and the half-line pole 1-form as a four-dimensional configuration."""
    from .fields import embed_nahm_pole

    phi = embed_nahm_pole(triple, grid)
    return FourConfig(zero_field(grid, 1, triple.n), phi)


# -- gradient flow stepping ------------------------------------------------------

def suggest_step(state: FlowState, params: MorseParams, safety: float = 0.2) -> float:
    """Conservative step for the explicit integrator.

    Estimates the linearization rate of the flow right-hand side from the
    stencil scale 2*dim/h_min and the field amplitude; the step is
    safety / rate.  Deterministic in the state.
    """
    grid = state.grid
    h_min = grid.min_spacing()
    amp = max(
        float(np.abs(state.conn.A.data).max()),
        float(np.abs(state.conn.phi.data).max()),
        float(np.abs(state.phi0.data).max()),
    )
    lam = params.level_normalization / (2.0 * math.pi)
    rate = (1.0 + lam) * (2.0 * grid.dim / h_min) * (1.0 + 4.0 * amp)
    return safety / rate


def flow_step(state: FlowState, params: MorseParams, ds: float) -> FlowState:
    """One explicit RK4 step of dPhi/ds = -grad h(Phi).

    Raises :class:`FlowStepFault` if the Morse function increases across the
    step (step-size fault); h is non-increasing along accepted steps.
    """
    if ds <= 0:
        raise KWError("step size must be positive")

    def rhs(s: FlowState) -> FlowTangent:
        return gradient_h(s, params) * (-1.0)

    from .functionals import state_shift

    k1 = rhs(state)
    k2 = rhs(state_shift(state, k1, 0.5 * ds))
    k3 = rhs(state_shift(state, k2, 0.5 * ds))
    k4 = rhs(state_shift(state, k3, ds))
    incr = k1 + 2.0 * k2 + 2.0 * k3 + k4
    new_state = state_shift(state, incr, ds / 6.0)
    h_old = extended_h(state, params)
    h_new = extended_h(new_state, params)
    if h_new > h_old + 1e-12:
        raise FlowStepFault(
            f"Morse function increased ({h_old!r} -> {h_new!r}); reduce ds={ds!r}"
        )
    return new_state


def run_flow(
    state: FlowState, params: MorseParams, ds: float, steps: int
) -> tuple[list[FlowState], list[dict]]:
    """Fixed-step flow run; returns states (including initial) and a series of
    per-step records (s, h, moment norm)."""
    states = [state]
    series = [
        {"s": 0.0, "h": extended_h(state, params), "mu_norm": field_norm(
            moment_map(state.conn.A, state.conn.phi))}
    ]
    for k in range(steps):
        state = flow_step(state, params, ds)
        states.append(state)
        series.append(
            {
                "s": (k + 1) * ds,
                "h": extended_h(state, params),
                "mu_norm": field_norm(moment_map(state.conn.A, state.conn.phi)),
            }
        )
    return states, series


# -- real-sector flow (phi = phi0 = 0) -------------------------------------------

def real_cs_gradient(A: LatticeField, level_normalization: float = 2.0 * math.pi) -> LatticeField:
    """Flow direction of the real Chern-Simons descent: -(lam/2pi) star F."""
    starF = hodge_star(curvature(A))
    return starF * (-(level_normalization / (2.0 * math.pi)))


def real_flow_step(A: LatticeField, ds: float, level_normalization: float = 2.0 * math.pi) -> LatticeField:
    k1 = real_cs_gradient(A, level_normalization)
    k2 = real_cs_gradient(A + 0.5 * ds * k1, level_normalization)
    k3 = real_cs_gradient(A + 0.5 * ds * k2, level_normalization)
    k4 = real_cs_gradient(A + ds * k3, level_normalization)
    return A + (ds / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def run_real_flow(
    A: LatticeField, ds: float, steps: int, level_normalization: float = 2.0 * math.pi
) -> list[tuple[float, LatticeField]]:
    out = [(0.0, A)]
    for k in range(steps):
        A = real_flow_step(A, ds, level_normalization)
        out.append(((k + 1) * ds, A))
    return out


# -- trajectory-to-4d assembly ----------------------------------------------------

def _assembled_grid(base: GridSpec, s_values: list[float], lam: float) -> GridSpec:
    if base.dim != 3 or not base.is_closed():
        raise GridError("assembly expects a periodic 3-grid base")
    if len(s_values) < 4:
        raise KWError("trajectory too short: need at least 4 samples")
    scale = lam / (2.0 * math.pi)
    extent = scale * (s_values[-1] - s_values[0])
    if extent <= 0:
        raise KWError("trajectory samples must be increasing in s")
    return GridSpec(base.axes + (AxisSpec(extent, len(s_values), periodic=False),))


def assemble_real_trajectory(
    samples: list[tuple[float, LatticeField]], level_normalization: float = 2.0 * math.pi
) -> FourConfig:
    """Temporal-gauge 4-connection from a real-sector flow trajectory.

    The fourth coordinate is descending flow time x4 = -(lam/2pi) s, so the
    sample order is reversed; A_s = 0; phi = 0.
    """
    s_values = [s for s, _ in samples]
    base = samples[0][1].grid
    grid4 = _assembled_grid(base, s_values, level_normalization)
    n = samples[0][1].n
    data = np.zeros(grid4.shape + (4, n, n), dtype=complex)
    for j, (_, A) in enumerate(reversed(samples)):
        data[..., j, :3, :, :] = A.data
    return FourConfig(
        LatticeField(grid4, 1, data), zero_field(grid4, 1, n)
    )


def assemble_flow_trajectory(
    samples: list[tuple[float, FlowState]], params: MorseParams
) -> FourConfig:
    """Four-dimensional configuration from an extended-flow trajectory.

    phi0 becomes the fourth (flow-direction) component of phi; requires the
    default level normalization 2*pi, the unique value at which the flow is
    the unit-speed four-dimensional system.
    """
    if not math.isclose(params.level_normalization, 2.0 * math.pi, rel_tol=1e-12):
        raise KWError(
            "flow/residual assembly requires level_normalization = 2*pi; "
            f"got {params.level_normalization}"
        )
    s_values = [s for s, _ in samples]
    base = samples[0][1].grid
    grid4 = _assembled_grid(base, s_values, params.level_normalization)
    n = samples[0][1].conn.n
    a_data = np.zeros(grid4.shape + (4, n, n), dtype=complex)
    p_data = np.zeros(grid4.shape + (4, n, n), dtype=complex)
    for j, (_, st) in enumerate(reversed(samples)):
        a_data[..., j, :3, :, :] = st.conn.A.data
        p_data[..., j, :3, :, :] = st.conn.phi.data
        p_data[..., j, 3, :, :] = st.phi0.data[..., 0, :, :]
    return FourConfig(LatticeField(grid4, 1, a_data), LatticeField(grid4, 1, p_data))


def real_flow_instanton_check(
    samples: list[tuple[float, LatticeField]], level_normalization: float = 2.0 * math.pi
) -> dict:
    """Norms of the selfdual curvature part of the assembled trajectory.

    The flow is the descent of the Chern-Simons functional, so the assembled
    4-connection satisfies F+ = 0 up to integrator and stencil error.
    """
    cfg = assemble_real_trajectory(samples, level_normalization)
    F = curvature(cfg.A)
    Fp, Fm = sd_asd_project(F)
    return {
        "f_plus_norm": field_norm(Fp),
        "f_minus_norm": field_norm(Fm),
        "f_norm": field_norm(F),
        "samples": len(samples),
    }


def flow_kw_equivalence_check(
    samples: list[tuple[float, FlowState]], params: MorseParams
) -> dict:
    """Residual norms of the assembled extended-flow trajectory at t(alpha)."""
    cfg = assemble_flow_trajectory(samples, params)
    res = kw_residual(cfg, t_from_alpha(params.alpha))
    norms = res.norms()
    norms["t"] = res.params.as_pair()
    norms["samples"] = len(samples)
    return norms


def _refinement_orders(norms: list[float]) -> list[float]:
    return [
        math.log2(norms[i] / norms[i + 1]) if norms[i + 1] > 0 else math.inf
        for i in range(len(norms) - 1)
    ]


def real_flow_refinement_study(
    seed: int = 7,
    base_n: int = 6,
    base_ds: float = 0.02,
    base_steps: int = 6,
    levels: int = 3,
    amp_const: float = 0.12,
    amp_mode: float = 0.001,
) -> dict:
    """Joint (grid, ds) refinement of the real-flow selfdual residual.

    Initial data is a constant non-commuting connection plus a small smooth
    mode sampled from the same continuum formula at every resolution, so the
    measured decay isolates the order-two flow-direction stencil.
    """
    from .fixtures import constant_mode_connection

    norms, f_minus, spacings = [], [], []
    for lev in range(levels):
        n = base_n * 2**lev
        ds = base_ds / 2**lev
        steps = base_steps * 2**lev
        grid = periodic_box(n)
        A = constant_mode_connection(grid, seed=seed, amp_const=amp_const, amp_mode=amp_mode)
        traj = run_real_flow(A, ds, steps)
        rep = real_flow_instanton_check(traj)
        norms.append(rep["f_plus_norm"])
        f_minus.append(rep["f_minus_norm"])
        spacings.append(grid.min_spacing())
    return {
        "f_plus_norms": norms,
        "f_minus_norms": f_minus,
        "spacings": spacings,
        "orders": _refinement_orders(norms),
        "ratios": [norms[i] / norms[i + 1] for i in range(len(norms) - 1)],
    }


def flow_kw_refinement_study(
    alpha: float,
    seed: int = 21,
    base_n: int = 6,
    base_ds: float = 0.02,
    base_steps: int = 6,
    levels: int = 2,
    amp_const: float = 0.12,
    amp_mode: float = 0.001,
) -> dict:
    """Joint refinement of the assembled extended-flow residual at t(alpha)."""
    from .fixtures import constant_mode_connection, constant_mode_scalar

    from .algebra import LieAlgebraSpec

    params = MorseParams(alpha=alpha)
    totals, spacings = [], []
    details = []
    for lev in range(levels):
        n = base_n * 2**lev
        ds = base_ds / 2**lev
        steps = base_steps * 2**lev
        grid = periodic_box(n)
        A = constant_mode_connection(grid, seed=seed, amp_const=amp_const, amp_mode=amp_mode)
        phi = constant_mode_connection(grid, seed=seed + 1, amp_const=amp_const, amp_mode=amp_mode)
        phi0 = constant_mode_scalar(grid, seed=seed + 2, amp_const=amp_const, amp_mode=amp_mode)
        state = FlowState(ComplexConnection(A, phi), phi0)
        states, _ = run_flow(state, params, ds, steps)
        samples = [(k * ds, s) for k, s in enumerate(states)]
        rep = flow_kw_equivalence_check(samples, params)
        totals.append(rep["total"])
        spacings.append(grid.min_spacing())
        details.append(rep)
    return {
        "totals": totals,
        "spacings": spacings,
        "orders": _refinement_orders(totals),
        "ratios": [totals[i] / totals[i + 1] for i in range(len(totals) - 1)],
        "levels": details,
        "t": t_from_alpha(alpha).as_pair(),
    }


# -- instanton number --------------------------------------------------------------

class BoundaryDataError(ValueError):
    """Open grid without a declared boundary trivialization."""


def instanton_density(F: LatticeField) -> np.ndarray:
    """Tr F wedge F volume density: 2 [Tr(F01 F23) - Tr(F02 F13) + Tr(F03 F12)]."""
    if F.grid.dim != 4 or F.degree != 2:
        raise GridError("instanton density needs a 2-form on a 4-grid")

    def tr(a, b):
        return np.einsum("...ij,...ji->...", a, b)

    c = F.data
    # component order: (01, 02, 03, 12, 13, 23)
    return 2.0 * (
        tr(c[..., 0, :, :], c[..., 5, :, :])
        - tr(c[..., 1, :, :], c[..., 4, :, :])
        + tr(c[..., 2, :, :], c[..., 3, :, :])
    )


def instanton_number(cfg: FourConfig, allow_open: bool = False) -> float:
    """(1/8pi^2) integral of Tr F wedge F by quadrature.

    On open grids the caller must declare the boundary trivialization by
    passing ``allow_open=True`` (fields are then integrated as given);
    otherwise :class:`BoundaryDataError` is raised.
    """
    if not cfg.grid.is_closed() and not allow_open:
        raise BoundaryDataError(
            "open grid: declare a boundary trivialization with allow_open=True"
        )
    F = cfg.total_curvature()
    dens = instanton_density(F)
    w = cfg.grid.site_weights()
    return float((w * dens).real.sum() / (8.0 * math.pi**2))


def constant_flux_config(
    grid: GridSpec, n1: int, n2: int, rank_n: int = 2
) -> FourConfig:
    """Diagonal constant-flux configuration on a closed 4-grid.

    Fluxes n1 on the (01) two-torus and n2 on the (23) two-torus are carried
    by transition functions; the declared background curvature is constant
    with generator i*diag(1, -1, 0, ...).
    """
    if grid.dim != 4 or not grid.is_closed():
        raise GridError("constant flux fixture needs a closed 4-grid")
    gen = np.zeros((rank_n, rank_n), dtype=complex)
    gen[0, 0] = 1j
    gen[1, 1] = -1j
    lengths = [a.extent for a in grid.axes]
    bg = zero_field(grid, 2, rank_n).data.copy()
    # component order (01, 02, 03, 12, 13, 23)
    bg[..., 0, :, :] = 2.0 * math.pi * n1 / (lengths[0] * lengths[1]) * gen
    bg[..., 5, :, :] = 2.0 * math.pi * n2 / (lengths[2] * lengths[3]) * gen
    return FourConfig(
        zero_field(grid, 1, rank_n),
        zero_field(grid, 1, rank_n),
        LatticeField(grid, 2, bg),
    )


# -- categorification identity ------------------------------------------------------

def categorification_identity_check(
    A: LatticeField,
    phi0: LatticeField,
    window_extent: float = 1.0,
    window_points: int = 5,
) -> dict:
    """Lift a 3d pair (A, phi0) to the flow-direction-independent 4-config.

    The scalar becomes the covariant derivative along the new coordinate:
    the lift has A4 = phi0, constant in the new coordinate, so F_{k4}
    reproduces (d_A phi0)_k with the same stencils and the selfdual part of
    the lifted curvature equals the folded-flatness (Bogomolny) residual
    F + star d_A phi0 exactly.  Norms are compared in the common convention:
    a selfdual 2-form counts each independent component pair once, i.e.
    sqrt(2) * |F+| = |bogomolny residual|; the 4d norm is reduced to the
    per-unit-window norm before comparison.
    """
    from .reduced import bogomolny_residual

    if A.grid.dim != 3:
        raise GridError("categorification lift starts from a 3-grid")
    base = A.grid
    n = A.n
    grid4 = GridSpec(base.axes + (AxisSpec(window_extent, window_points, False),))
    a_data = np.zeros(grid4.shape + (4, n, n), dtype=complex)
    for j in range(window_points):
        a_data[..., j, :3, :, :] = A.data
        a_data[..., j, 3, :, :] = phi0.data[..., 0, :, :]
    cfg = FourConfig(LatticeField(grid4, 1, a_data), zero_field(grid4, 1, n))
    F4 = curvature(cfg.A)
    Fp, _ = sd_asd_project(F4)
    window_measure = math.sqrt(sum(grid4.axis_weights(3)))
    lifted = field_norm(Fp) / window_measure
    bog = field_norm(bogomolny_residual(A, phi0))
    return {
        "lifted_f_plus_norm": lifted,
        "bogomolny_norm": bog,
        "identity_defect": abs(math.sqrt(2.0) * lifted - bog),
    }
