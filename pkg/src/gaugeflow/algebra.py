"""Matrix Lie-algebra arithmetic for su(N).

All algebra elements are anti-hermitian traceless N x N complex matrices
(physics factors of i are absorbed into the elements), so the trace form
``Re Tr(xy)`` is negative definite and exponentials are unitary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 1e-12


class AlgebraError(ValueError):
    """Raised for malformed algebra data (dimension mismatch, bad invariants)."""


@dataclass(frozen=True)
class LieAlgebraSpec:
    """su(N) identified by matrix size; only the SU family is supported."""

    rank_n: int
    group_family: str = "SU"

    def __post_init__(self):
        if self.group_family != "SU":
            raise AlgebraError(f"unsupported group family {self.group_family!r}")
        if self.rank_n < 2:
            raise AlgebraError(f"rank_n must be >= 2, got {self.rank_n}")

    @property
    def dim(self) -> int:
        """Real dimension N^2 - 1 of su(N)."""
        return self.rank_n**2 - 1


@dataclass(frozen=True)
class LieElement:
    """Anti-hermitian traceless matrix with coefficient access.

    Construction validates the invariants to ``tol``; use
    :func:`project_antihermitian` first for raw matrices.
    """

    matrix: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise AlgebraError(f"expected a square matrix, got shape {m.shape}")
        if antihermiticity_defect(m) > self.tol:
            raise AlgebraError("matrix is not anti-hermitian within tolerance")
        if abs(np.trace(m)) > self.tol * max(1.0, np.linalg.norm(m)):
            raise AlgebraError("matrix is not traceless within tolerance")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def norm(self) -> float:
        """Frobenius norm, equal to sqrt(-trace_form(x, x))."""
        return float(np.linalg.norm(self.matrix))

    def __add__(self, other: "LieElement") -> "LieElement":
        _check_same_algebra(self, other)
        return LieElement(self.matrix + other.matrix)

    def __sub__(self, other: "LieElement") -> "LieElement":
        _check_same_algebra(self, other)
        return LieElement(self.matrix - other.matrix)

    def __mul__(self, scalar: float) -> "LieElement":
        return LieElement(self.matrix * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "LieElement":
        return LieElement(-self.matrix)


@dataclass(frozen=True)
class PrincipalTriple:
    """Generators t1, t2, t3 with [t1, t2] = t3 and cyclic permutations.

    For su(N) the triple spans the image of the N-dimensional irreducible
    representation of su(2); the Casimir t1^2 + t2^2 + t3^2 equals
    -(N^2 - 1)/4 times the identity (minus sign from the anti-hermitian
    convention).
    """

    t1: LieElement
    t2: LieElement
    t3: LieElement

    def __post_init__(self):
        ts = (self.t1, self.t2, self.t3)
        n = ts[0].n
        if any(t.n != n for t in ts):
            raise AlgebraError("triple elements live in different algebras")
        for i in range(3):
            a, b, c = ts[i], ts[(i + 1) % 3], ts[(i + 2) % 3]
            defect = np.linalg.norm(bracket(a, b).matrix - c.matrix)
            if defect > DEFAULT_TOL * max(1.0, a.norm() * b.norm()):
                raise AlgebraError(f"commutation relation {i+1} violated ({defect:.2e})")

    @property
    def n(self) -> int:
        return self.t1.n

    def as_tuple(self) -> tuple[LieElement, LieElement, LieElement]:
        return (self.t1, self.t2, self.t3)

    def casimir_defect(self) -> float:
        """Deviation of t1^2+t2^2+t3^2 from -(N^2-1)/4 times the identity."""
        n = self.n
        cas = sum(t.matrix @ t.matrix for t in self.as_tuple())
        return float(np.linalg.norm(cas + (n**2 - 1) / 4.0 * np.eye(n)))


def _check_same_algebra(x: LieElement, y: LieElement) -> None:
    if x.n != y.n:
        raise AlgebraError(f"dimension mismatch: {x.n} vs {y.n}")


def antihermiticity_defect(m: np.ndarray) -> float:
    return float(np.linalg.norm(m + m.conj().T))


def project_antihermitian(m: np.ndarray) -> np.ndarray:
    """Anti-hermitian traceless part; acts on the last two axes of a stack."""
    m = np.asarray(m, dtype=complex)
    a = 0.5 * (m - np.swapaxes(m.conj(), -1, -2))
    n = m.shape[-1]
    return a - np.trace(a, axis1=-2, axis2=-1)[..., None, None] / n * np.eye(n)


def bracket(x: LieElement, y: LieElement) -> LieElement:
    """Commutator xy - yx; closed on anti-hermitian traceless matrices."""
    _check_same_algebra(x, y)
    return LieElement(x.matrix @ y.matrix - y.matrix @ x.matrix)


def trace_form(x: LieElement, y: LieElement) -> float:
    """Fundamental-representation trace form Re Tr(xy).

    Negative definite on nonzero anti-hermitian elements.
    """
    _check_same_algebra(x, y)
    return float(np.real(np.trace(x.matrix @ y.matrix)))


def spin_matrices(j2: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Hermitian spin matrices (J1, J2, J3) for doubled spin j2 = 2j."""
    dim = j2 + 1
    j = j2 / 2.0
    m = j - np.arange(dim)
    raise_amp = np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1))
    jp = np.zeros((dim, dim), dtype=complex)
    jp[np.arange(dim - 1), np.arange(1, dim)] = raise_amp
    jm = jp.conj().T
    j1 = 0.5 * (jp + jm)
    j2m = -0.5j * (jp - jm)
    j3 = np.diag(m.astype(complex))
    return j1, j2m, j3


def principal_triple(spec: LieAlgebraSpec) -> PrincipalTriple:
    """Principal su(2) triple inside su(N): anti-hermitized spin-(N-1)/2 matrices."""
    j1, j2, j3 = spin_matrices(spec.rank_n - 1)
    return PrincipalTriple(
        LieElement(-1j * j1), LieElement(-1j * j2), LieElement(-1j * j3)
    )


def algebra_basis(spec: LieAlgebraSpec) -> list[LieElement]:
    """Orthogonal basis of su(N): anti-hermitized generalized Gell-Mann matrices.

    Ordering is deterministic: off-diagonal symmetric pairs, off-diagonal
    antisymmetric pairs, then diagonal (Cartan) elements.
    """
    n = spec.rank_n
    basis = []
    for i in range(n):
        for k in range(i + 1, n):
            m = np.zeros((n, n), dtype=complex)
            m[i, k] = m[k, i] = 1.0
            basis.append(LieElement(-1j * m))
    for i in range(n):
        for k in range(i + 1, n):
            m = np.zeros((n, n), dtype=complex)
            m[i, k] = -1j
            m[k, i] = 1j
            basis.append(LieElement(-1j * m))
    for d in range(1, n):
        m = np.zeros((n, n), dtype=complex)
        m[np.arange(d), np.arange(d)] = 1.0
        m[d, d] = -d
        basis.append(LieElement(-1j * m / np.sqrt(d * (d + 1) / 2.0)))
    return basis


def coefficients(x: LieElement, basis: list[LieElement]) -> list[float]:
    """Expansion coefficients of x in a trace-form-orthogonal basis."""
    return [trace_form(x, b) / trace_form(b, b) for b in basis]


def random_element(spec: LieAlgebraSpec, seed: int, scale: float = 1.0) -> LieElement:
    """Deterministic seeded random element with complex-gaussian entries."""
    rng = np.random.default_rng(seed)
    n = spec.rank_n
    raw = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return LieElement(project_antihermitian(raw) * scale)


def save_matrix_fixture(path, x: LieElement) -> None:
    """Plain-text matrix fixture: header ``lie N=<n>``, row-major complex tokens."""
    tokens = " ".join(repr(v) for v in x.matrix.reshape(-1))
    with open(path, "w") as fh:
        fh.write(f"lie N={x.n}\n{tokens}\n")


def load_matrix_fixture(path) -> LieElement:
    with open(path) as fh:
        header = fh.readline().strip()
        if not header.startswith("lie N="):
            raise AlgebraError(f"bad matrix fixture header: {header!r}")
        n = int(header.split("=", 1)[1])
        tokens = fh.read().split()
    if len(tokens) != n * n:
        raise AlgebraError(f"expected {n*n} entries, got {len(tokens)}")
    m = np.array([complex(t) for t in tokens], dtype=complex).reshape(n, n)
    return LieElement(m)
