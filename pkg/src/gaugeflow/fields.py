"""Structured grids and adjoint-valued lattice forms with exterior calculus.

Fields are point-sampled smooth configurations. Derivatives are central
finite differences: roll-based stencils on periodic axes, second-order
interior/one-sided stencils (``numpy.gradient`` with coordinates) on
non-periodic axes, including the geometrically graded half-line.

Orientation is fixed by axis order everywhere. Grids carrying a half-line
axis place it first (axis 0); with that ordering the half-line pole
configuration of :func:`embed_nahm_pole` sits in the zero set of the
four-dimensional residual system at coupling t = 1 (see ``kwflow``).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field as dc_field

import numpy as np

from .algebra import (
    AlgebraError,
    LieAlgebraSpec,
    PrincipalTriple,
    project_antihermitian,
)


class GridError(ValueError):
    """Raised for malformed grid or field data."""


@dataclass(frozen=True)
class AxisSpec:
    """One grid axis: extent, point count, periodic flag.

    Periodic axes sample [0, extent) uniformly (no duplicated endpoint);
    box axes sample [0, extent] including both endpoints.
    """

    extent: float
    points: int
    periodic: bool = True

    def __post_init__(self):
        if self.points < 4:
            raise GridError(f"need >= 4 points per axis, got {self.points}")
        if self.extent <= 0:
            raise GridError("axis extent must be positive")

    def coordinates(self) -> np.ndarray:
        if self.periodic:
            return np.arange(self.points) * (self.extent / self.points)
        return np.linspace(0.0, self.extent, self.points)


@dataclass(frozen=True)
class HalfLineSpec:
    """Graded half-line axis with nodes y_j = y0 * r^j, r = (y_max/y0)^(1/(n-1)).

    The geometric grading resolves 1/y pole behaviour near y0 without
    large grids.
    """

    y0: float = 0.1
    y_max: float = 4.0
    points: int = 48

    def __post_init__(self):
        if self.y0 <= 0:
            raise GridError("half-line start y0 must be positive")
        if self.y_max <= self.y0:
            raise GridError("half-line needs y0 < y_max")
        if self.points < 4:
            raise GridError("half-line needs >= 4 points")

    @property
    def ratio(self) -> float:
        return (self.y_max / self.y0) ** (1.0 / (self.points - 1))

    def coordinates(self) -> np.ndarray:
        j = np.arange(self.points)
        y = self.y0 * self.ratio**j
        y[-1] = self.y_max
        return y


@dataclass(frozen=True)
class GridSpec:
    """Product grid of box/periodic axes, optionally with a leading half-line.

    When ``half_line`` is present it is axis 0 and the remaining axes follow.
    """

    axes: tuple[AxisSpec, ...]
    half_line: HalfLineSpec | None = None

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(self.axes))
        if self.dim < 1:
            raise GridError("grid needs at least one axis")

    @property
    def dim(self) -> int:
        return len(self.axes) + (1 if self.half_line is not None else 0)

    @property
    def shape(self) -> tuple[int, ...]:
        shape = tuple(a.points for a in self.axes)
        if self.half_line is not None:
            shape = (self.half_line.points,) + shape
        return shape

    @property
    def half_line_axis(self) -> int | None:
        return 0 if self.half_line is not None else None

    def axis_coordinates(self, axis: int) -> np.ndarray:
        if self.half_line is not None:
            if axis == 0:
                return self.half_line.coordinates()
            return self.axes[axis - 1].coordinates()
        return self.axes[axis].coordinates()

    def axis_periodic(self, axis: int) -> bool:
        if self.half_line is not None:
            if axis == 0:
                return False
            return self.axes[axis - 1].periodic
        return self.axes[axis].periodic

    def is_closed(self) -> bool:
        """True when every axis is periodic (no boundary)."""
        return self.half_line is None and all(a.periodic for a in self.axes)

    def min_spacing(self) -> float:
        gaps = []
        for axis in range(self.dim):
            x = self.axis_coordinates(axis)
            if self.axis_periodic(axis):
                gaps.append(x[1] - x[0])
            else:
                gaps.append(np.diff(x).min())
        return float(min(gaps))

    def axis_weights(self, axis: int) -> np.ndarray:
        """Quadrature weights: rectangle rule on periodic axes (spectrally
        accurate for smooth periodic integrands), trapezoid otherwise."""
        x = self.axis_coordinates(axis)
        if self.axis_periodic(axis):
            h = x[1] - x[0]
            return np.full(len(x), h)
        w = np.empty(len(x))
        w[0] = 0.5 * (x[1] - x[0])
        w[-1] = 0.5 * (x[-1] - x[-2])
        w[1:-1] = 0.5 * (x[2:] - x[:-2])
        return w

    def site_weights(self) -> np.ndarray:
        w = self.axis_weights(0)
        for axis in range(1, self.dim):
            w = np.multiply.outer(w, self.axis_weights(axis))
        return w

    def volume(self) -> float:
        return float(self.site_weights().sum())

    def meshgrid(self) -> list[np.ndarray]:
        coords = [self.axis_coordinates(a) for a in range(self.dim)]
        return list(np.meshgrid(*coords, indexing="ij"))

    def to_dict(self) -> dict:
        d = {
            "axes": [
                {"extent": a.extent, "points": a.points, "periodic": a.periodic}
                for a in self.axes
            ]
        }
        if self.half_line is not None:
            d["half_line"] = {
                "y0": self.half_line.y0,
                "y_max": self.half_line.y_max,
                "points": self.half_line.points,
            }
        return d

    @staticmethod
    def from_dict(d: dict) -> "GridSpec":
        axes = tuple(
            AxisSpec(a["extent"], a["points"], a["periodic"]) for a in d["axes"]
        )
        hl = d.get("half_line")
        half = HalfLineSpec(hl["y0"], hl["y_max"], hl["points"]) if hl else None
        return GridSpec(axes, half)


def periodic_box(n: int, dim: int = 3, extent: float = 2 * np.pi) -> GridSpec:
    """T^dim with n points per axis; the workhorse flow grid."""
    return GridSpec(tuple(AxisSpec(extent, n, True) for _ in range(dim)))


def half_space_grid(
    n: int, extent: float = 2 * np.pi, half_line: HalfLineSpec | None = None,
    spatial_dim: int = 3,
) -> GridSpec:
    """Half-line (axis 0) times a periodic spatial box."""
    if half_line is None:
        half_line = HalfLineSpec()
    return GridSpec(
        tuple(AxisSpec(extent, n, True) for _ in range(spatial_dim)), half_line
    )


def form_components(dim: int, degree: int) -> list[tuple[int, ...]]:
    """Ordered component index sets (lexicographic multi-indices)."""
    return list(itertools.combinations(range(dim), degree))


@dataclass(frozen=True)
class LatticeField:
    """Rank-tagged matrix-valued form sampled on a grid.

    ``data`` has shape ``grid.shape + (n_components, N, N)`` with components
    ordered lexicographically by multi-index. Gauge and Higgs fields carry
    anti-hermitian traceless (LieElement) values; generic complex values are
    permitted for the complexified operators of the reduced equations.
    """

    grid: GridSpec
    degree: int
    data: np.ndarray

    def __post_init__(self):
        d = self.grid.dim
        if not 0 <= self.degree <= d:
            raise GridError(f"form degree {self.degree} out of range for dim {d}")
        arr = np.asarray(self.data, dtype=complex)
        ncomp = len(form_components(d, self.degree))
        want = self.grid.shape + (ncomp,)
        if arr.shape[: d + 1] != want or arr.ndim != d + 3:
            raise GridError(
                f"field data shape {arr.shape} incompatible with grid {want}+(N,N)"
            )
        if arr.shape[-1] != arr.shape[-2]:
            raise GridError("matrix slots must be square")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def n(self) -> int:
        return self.data.shape[-1]

    @property
    def n_components(self) -> int:
        return self.data.shape[-3]

    @property
    def components(self) -> list[tuple[int, ...]]:
        return form_components(self.grid.dim, self.degree)

    def component(self, *index: int) -> np.ndarray:
        """Component array for a multi-index, with antisymmetry signs."""
        key = tuple(index)
        srt = tuple(sorted(key))
        sign = _permutation_sign(key, srt)
        if sign == 0:
            return np.zeros(self.grid.shape + self.data.shape[-2:], dtype=complex)
        pos = self.components.index(srt)
        return sign * self.data[..., pos, :, :]

    def antihermiticity_defect(self) -> float:
        return float(np.abs(self.data + np.swapaxes(self.data.conj(), -1, -2)).max())

    def __add__(self, other: "LatticeField") -> "LatticeField":
        _check_compatible(self, other)
        return LatticeField(self.grid, self.degree, self.data + other.data)

    def __sub__(self, other: "LatticeField") -> "LatticeField":
        _check_compatible(self, other)
        return LatticeField(self.grid, self.degree, self.data - other.data)

    def __mul__(self, scalar) -> "LatticeField":
        return LatticeField(self.grid, self.degree, self.data * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "LatticeField":
        return LatticeField(self.grid, self.degree, -self.data)


def _permutation_sign(perm: tuple[int, ...], target: tuple[int, ...]) -> int:
    if len(set(perm)) != len(perm):
        return 0
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        while perm[i] != target[i]:
            j = perm.index(target[i])
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def _check_compatible(a: LatticeField, b: LatticeField) -> None:
    if a.grid != b.grid:
        raise GridError("fields live on different grids")
    if a.degree != b.degree:
        raise GridError(f"form degrees differ: {a.degree} vs {b.degree}")
    if a.n != b.n:
        raise AlgebraError(f"matrix sizes differ: {a.n} vs {b.n}")


def zero_field(grid: GridSpec, degree: int, n: int) -> LatticeField:
    ncomp = len(form_components(grid.dim, degree))
    return LatticeField(
        grid, degree, np.zeros(grid.shape + (ncomp, n, n), dtype=complex)
    )


# -- derivatives -------------------------------------------------------------

def axis_derivative(values: np.ndarray, grid: GridSpec, axis: int) -> np.ndarray:
    """Partial derivative of a site array along one grid axis.

    Periodic axes use the wrap-around central stencil; non-periodic axes
    (box and graded half-line) use second-order non-uniform stencils with
    one-sided second-order boundaries.
    """
    if grid.axis_periodic(axis):
        x = grid.axis_coordinates(axis)
        h = x[1] - x[0]
        return (np.roll(values, -1, axis=axis) - np.roll(values, 1, axis=axis)) / (
            2.0 * h
        )
    coords = grid.axis_coordinates(axis)
    return np.gradient(values, coords, axis=axis, edge_order=2)


def stencil_derivative(fld: LatticeField, axis: int) -> np.ndarray:
    """Default derivative rule: the grid stencils applied to all components."""
    return axis_derivative(fld.data, fld.grid, axis)


DerivativeRule = "callable(LatticeField, axis) -> ndarray like field.data"


def exterior_derivative(fld: LatticeField, deriv=None) -> LatticeField:
    """d on a k-form; ``deriv`` overrides the stencil rule (analytic data)."""
    deriv = deriv or stencil_derivative
    grid, k = fld.grid, fld.degree
    if k >= grid.dim:
        raise GridError("cannot raise top-degree form")
    partials = [deriv(fld, axis) for axis in range(grid.dim)]
    out_comps = form_components(grid.dim, k + 1)
    in_comps = fld.components
    n = fld.n
    out = np.zeros(grid.shape + (len(out_comps), n, n), dtype=complex)
    for oi, oc in enumerate(out_comps):
        for pos, mu in enumerate(oc):
            rest = oc[:pos] + oc[pos + 1 :]
            sign = (-1) ** pos
            ii = in_comps.index(rest)
            out[..., oi, :, :] += sign * partials[mu][..., ii, :, :]
    return LatticeField(grid, k + 1, out)


def _comm(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def covariant_derivative(A: LatticeField, s: LatticeField, deriv=None) -> LatticeField:
    """d_A s = ds + [A, s] with the form degree raised by one.

    ``A`` must be a 1-form; ``s`` may be a 0-, 1- or 2-form on the same grid.
    """
    if A.degree != 1:
        raise GridError("connection must be a 1-form")
    if A.grid != s.grid:
        raise GridError("fields live on different grids")
    ds = exterior_derivative(s, deriv=deriv)
    grid = A.grid
    out = np.array(ds.data)
    out_comps = form_components(grid.dim, s.degree + 1)
    for oi, oc in enumerate(out_comps):
        acc = 0.0
        for pos, mu in enumerate(oc):
            rest = oc[:pos] + oc[pos + 1 :]
            sign = (-1) ** pos
            acc = acc + sign * _comm(A.component(mu), s.component(*rest))
        out[..., oi, :, :] += acc
    return LatticeField(grid, s.degree + 1, out)


def wedge_square(phi: LatticeField) -> LatticeField:
    """phi ^ phi for a matrix-valued 1-form: components [phi_mu, phi_nu]."""
    if phi.degree != 1:
        raise GridError("wedge_square expects a 1-form")
    grid = phi.grid
    comps = form_components(grid.dim, 2)
    n = phi.n
    out = np.zeros(grid.shape + (len(comps), n, n), dtype=complex)
    for ci, (mu, nu) in enumerate(comps):
        out[..., ci, :, :] = _comm(phi.component(mu), phi.component(nu))
    return LatticeField(grid, 2, out)


def curvature(A: LatticeField, deriv=None) -> LatticeField:
    """F = dA + A ^ A, a 2-form; antisymmetric components stored once."""
    if A.degree != 1:
        raise GridError("curvature expects a 1-form connection")
    return exterior_derivative(A, deriv=deriv) + wedge_square(A)


# -- Hodge star and projections ----------------------------------------------

def hodge_star(omega: LatticeField) -> LatticeField:
    """Flat-metric Hodge star with orientation fixed by axis order.

    Pointwise linear with exact integer coefficients; an isometry with
    star(star(w)) = (-1)^(k(d-k)) w.
    """
    grid, k = omega.grid, omega.degree
    d = grid.dim
    in_comps = omega.components
    out_comps = form_components(d, d - k)
    n = omega.n
    out = np.zeros(grid.shape + (len(out_comps), n, n), dtype=complex)
    for ci, c in enumerate(in_comps):
        comp = tuple(sorted(set(range(d)) - set(c)))
        sign = _permutation_sign(c + comp, tuple(range(d)))
        out[..., out_comps.index(comp), :, :] = sign * omega.data[..., ci, :, :]
    return LatticeField(grid, d - k, out)


def sd_asd_project(omega: LatticeField) -> tuple[LatticeField, LatticeField]:
    """Selfdual / anti-selfdual parts of a 2-form on a 4-grid."""
    if omega.grid.dim != 4 or omega.degree != 2:
        raise GridError("selfdual projection needs a 2-form on a 4-grid")
    star = hodge_star(omega)
    plus = LatticeField(omega.grid, 2, 0.5 * (omega.data + star.data))
    minus = LatticeField(omega.grid, 2, 0.5 * (omega.data - star.data))
    return plus, minus


def selfduality_defect(omega: LatticeField, sign: int) -> float:
    star = hodge_star(omega)
    return float(np.abs(star.data - sign * omega.data).max())


# -- norms and inner products --------------------------------------------------

def field_inner(a: LatticeField, b: LatticeField) -> float:
    """L^2 inner product sum_x w(x) sum_c Re Tr(a_c b_c^dagger).

    For anti-hermitian values this is -Re Tr(a b), the trace-form metric.
    """
    _check_compatible(a, b)
    w = a.grid.site_weights()
    prod = np.einsum("...cij,...cij->...", a.data, b.data.conj()).real
    return float((w * prod).sum())


def field_norm(a: LatticeField) -> float:
    return float(np.sqrt(max(field_inner(a, a), 0.0)))


# -- gauge transformations -----------------------------------------------------

@dataclass(frozen=True)
class GaugeTransform:
    """Per-site special-unitary matrix g(x)."""

    grid: GridSpec
    data: np.ndarray
    tol: float = 1e-12

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=complex)
        if arr.shape[: self.grid.dim] != self.grid.shape or arr.ndim != self.grid.dim + 2:
            raise GridError("gauge data shape incompatible with grid")
        n = arr.shape[-1]
        ident = np.eye(n)
        udefect = np.abs(arr @ np.swapaxes(arr.conj(), -1, -2) - ident).max()
        if udefect > self.tol:
            raise GridError(f"gauge transform not unitary ({udefect:.2e})")
        ddefect = np.abs(np.linalg.det(arr) - 1.0).max()
        if ddefect > 1e-10:
            raise GridError(f"gauge transform not special ({ddefect:.2e})")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def n(self) -> int:
        return self.data.shape[-1]

    def inverse_data(self) -> np.ndarray:
        return np.swapaxes(self.data.conj(), -1, -2)

    @staticmethod
    def from_algebra_field(chi: LatticeField) -> "GaugeTransform":
        """exp(chi) sitewise for an anti-hermitian traceless 0-form chi."""
        if chi.degree != 0:
            raise GridError("gauge generator must be a 0-form")
        h = 1j * chi.data[..., 0, :, :]
        evals, evecs = np.linalg.eigh(h)
        phase = np.exp(-1j * evals)
        g = np.einsum("...ik,...k,...jk->...ij", evecs, phase, evecs.conj())
        return GaugeTransform(chi.grid, g)


def conjugate_field(fld: LatticeField, g: GaugeTransform) -> LatticeField:
    ginv = g.inverse_data()
    out = np.einsum("...ij,...cjk,...kl->...cil", g.data, fld.data, ginv)
    return LatticeField(fld.grid, fld.degree, out)


def apply_gauge(
    A: LatticeField, phi: LatticeField | None, g: GaugeTransform
) -> tuple[LatticeField, LatticeField | None]:
    """Gauge action A -> gAg^-1 - (dg)g^-1 (finite-difference dg), phi -> g phi g^-1."""
    if A.degree != 1:
        raise GridError("apply_gauge expects a 1-form connection")
    grid = A.grid
    ginv = g.inverse_data()
    newA = conjugate_field(A, g).data.copy()
    for axis in range(grid.dim):
        dg = axis_derivative(g.data, grid, axis)
        newA[..., axis, :, :] -= dg @ ginv
    A_out = LatticeField(grid, 1, newA)
    phi_out = conjugate_field(phi, g) if phi is not None else None
    return A_out, phi_out


# -- constructors ---------------------------------------------------------------

def embed_nahm_pole(triple: PrincipalTriple, grid: GridSpec) -> LatticeField:
    """Half-line pole 1-form: spatial components t_i / y, zero dy component.

    Values are sampled analytically from the exact 1/y profile.
    """
    if grid.half_line is None:
        raise GridError("nahm pole embedding needs a half-line axis")
    if grid.dim != 4:
        raise GridError("nahm pole embedding expects a 4-dimensional grid")
    n = triple.n
    y = grid.axis_coordinates(0)
    data = np.zeros(grid.shape + (4, n, n), dtype=complex)
    inv_y = (1.0 / y).reshape((-1,) + (1,) * (len(grid.shape) - 1 + 3))
    for i, t in enumerate(triple.as_tuple()):
        data[..., 1 + i, :, :] = t.matrix
    data = data * inv_y
    return LatticeField(grid, 1, data)


def pole_derivative_rule(grid: GridSpec):
    """Analytic derivative rule for pure 1/y profiles on a half-line grid.

    Along the half-line axis the derivative of c/y is -c/y^2 = -(field)/y;
    all other partials of the translation-invariant profile vanish.
    """
    if grid.half_line is None:
        raise GridError("pole derivative rule needs a half-line axis")
    y = grid.axis_coordinates(0)

    def deriv(fld: LatticeField, axis: int) -> np.ndarray:
        if axis == 0:
            shape = (-1,) + (1,) * (fld.data.ndim - 1)
            return -fld.data / y.reshape(shape)
        return np.zeros_like(fld.data)

    return deriv


def random_smooth_field(
    grid: GridSpec,
    degree: int,
    spec: LieAlgebraSpec,
    seed: int,
    amplitude: float = 0.1,
    modes: int = 1,
) -> LatticeField:
    """Seeded smooth anti-hermitian field built from a few low Fourier modes.

    Non-periodic axes get smooth decaying profiles instead of trig modes so
    the same constructor serves half-line grids.
    """
    rng = np.random.default_rng(seed)
    n = spec.rank_n
    mesh = grid.meshgrid()
    ncomp = len(form_components(grid.dim, degree))
    data = np.zeros(grid.shape + (ncomp, n, n), dtype=complex)
    for ci in range(ncomp):
        for _ in range(2):
            profile = np.ones(grid.shape)
            for axis in range(grid.dim):
                x = mesh[axis]
                if grid.axis_periodic(axis):
                    k = rng.integers(1, modes + 1)
                    phase = rng.uniform(0, 2 * np.pi)
                    length = grid.axis_coordinates(axis)[-1] + (
                        grid.axis_coordinates(axis)[1] - grid.axis_coordinates(axis)[0]
                    )
                    profile = profile * np.cos(2 * np.pi * k * x / length + phase)
                else:
                    x0 = grid.axis_coordinates(axis)[0]
                    scale = rng.uniform(0.5, 1.5)
                    profile = profile * np.exp(-scale * (x - x0))
            raw = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            coeff = project_antihermitian(raw)
            data[..., ci, :, :] += amplitude * profile[..., None, None] * coeff
    return LatticeField(grid, degree, data)


# -- fixture I/O -----------------------------------------------------------------

def save_field_fixture(path, fld: LatticeField) -> None:
    """Text field fixture: JSON header line, then one line per site with all
    components as ``re im`` pairs. ``repr`` round-trips doubles bit-exactly."""
    header = {
        "grid": fld.grid.to_dict(),
        "degree": fld.degree,
        "algebra_n": fld.n,
    }
    flat = fld.data.reshape(-1, fld.n_components * fld.n * fld.n)
    with open(path, "w") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for row in flat:
            fh.write(
                " ".join(f"{repr(float(v.real))} {repr(float(v.imag))}" for v in row)
                + "\n"
            )


def load_field_fixture(path) -> LatticeField:
    with open(path) as fh:
        header = json.loads(fh.readline())
        grid = GridSpec.from_dict(header["grid"])
        degree = int(header["degree"])
        n = int(header["algebra_n"])
        ncomp = len(form_components(grid.dim, degree))
        rows = []
        for line in fh:
            vals = [float(t) for t in line.split()]
            rows.append(np.array(vals[0::2]) + 1j * np.array(vals[1::2]))
    data = np.array(rows).reshape(grid.shape + (ncomp, n, n))
    return LatticeField(grid, degree, data)
