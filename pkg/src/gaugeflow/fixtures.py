"""Seeded fixture generators shared by the CLI, tests, and studies."""

from __future__ import annotations

import numpy as np

from .algebra import LieAlgebraSpec, project_antihermitian
from .fields import GridSpec, LatticeField, form_components, random_smooth_field, zero_field
from .functionals import ComplexConnection, FlowState


def constant_antihermitian_field(
    grid: GridSpec, degree: int, n: int, seed: int, amplitude: float
) -> LatticeField:
    """Spatially constant field with seeded non-commuting coefficients."""
    rng = np.random.default_rng(seed)
    ncomp = len(form_components(grid.dim, degree))
    data = np.zeros(grid.shape + (ncomp, n, n), dtype=complex)
    for c in range(ncomp):
        raw = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        data[..., c, :, :] = project_antihermitian(raw) * amplitude
    return LatticeField(grid, degree, data)


def constant_mode_connection(
    grid: GridSpec,
    seed: int,
    amp_const: float = 0.12,
    amp_mode: float = 0.001,
    n: int = 2,
) -> LatticeField:
    """Constant non-commuting 1-form plus a small smooth Fourier mode.

    The constant part is resolved exactly at every resolution, so joint
    refinement studies seeded from this family measure the time-direction
    stencil order without a drifting error constant.
    """
    spec = LieAlgebraSpec(n)
    base = constant_antihermitian_field(grid, 1, n, seed, amp_const)
    mode = random_smooth_field(grid, 1, spec, seed=seed + 1000, amplitude=amp_mode)
    return base + mode


def constant_mode_scalar(
    grid: GridSpec,
    seed: int,
    amp_const: float = 0.12,
    amp_mode: float = 0.001,
    n: int = 2,
) -> LatticeField:
    spec = LieAlgebraSpec(n)
    base = constant_antihermitian_field(grid, 0, n, seed, amp_const)
    mode = random_smooth_field(grid, 0, spec, seed=seed + 1000, amplitude=amp_mode)
    return base + mode


def random_flow_state(
    grid: GridSpec, n: int, seed: int, amplitude: float = 0.3
) -> FlowState:
    """Smooth seeded (A, phi, phi0) triple on a periodic 3-grid."""
    spec = LieAlgebraSpec(n)
    A = random_smooth_field(grid, 1, spec, seed=seed, amplitude=amplitude)
    phi = random_smooth_field(grid, 1, spec, seed=seed + 1, amplitude=amplitude)
    phi0 = random_smooth_field(grid, 0, spec, seed=seed + 2, amplitude=amplitude)
    return FlowState(ComplexConnection(A, phi), phi0)


def zero_flow_state(grid: GridSpec, n: int) -> FlowState:
    return FlowState(
        ComplexConnection(zero_field(grid, 1, n), zero_field(grid, 1, n)),
        zero_field(grid, 0, n),
    )


def contracting_moment_state(grid: GridSpec, n: int = 2, amplitude: float = 0.05) -> FlowState:
    """State with nonzero moment map on the contracting subspace of the
    trivial critical point: the flow drives its moment norm down.

    phi is a longitudinal single mode and phi0 the matched scalar so the
    linearized (phi0, mu) pair lies in the decaying eigendirection.
    """
    spec = LieAlgebraSpec(n)
    coeff = project_antihermitian(
        np.diag(np.arange(1, n + 1).astype(complex) * 1j)
    )
    x = grid.meshgrid()[0]
    length = grid.axes[0].extent
    k = 2.0 * np.pi / length
    phi_data = zero_field(grid, 1, n).data.copy()
    # longitudinal mode: phi_0-component = d/dx of a scalar profile
    phi_data[..., 0, :, :] = (
        amplitude * np.sin(k * x)[..., None, None] * coeff
    )
    phi = LatticeField(grid, 1, phi_data)
    phi0_data = zero_field(grid, 0, n).data.copy()
    # matched scalar: the linearized (phi0, moment) pair decays only along
    # the eigendirection phi0 = -amplitude * cos profile
    phi0_data[..., 0, :, :] = -amplitude * np.cos(k * x)[..., None, None] * coeff
    phi0 = LatticeField(grid, 0, phi0_data)
    return FlowState(ComplexConnection(zero_field(grid, 1, n), phi), phi0)
