"""Commuting Hermitian tuples: construction, joint diagonalization, spectral calculus.

The joint diagonalization strategy: diagonalize one generic random linear
combination of the tuple, split its spectrum into clusters at relative gap
below ``CLUSTER_GAP``, re-diagonalize each cluster recursively against the next
matrix of the tuple, and finish with Jacobi polish sweeps that minimize the
total off-diagonal energy across the whole tuple.  Degenerate joint
eigenvalues are snapped to a common float so that equal rows of the
eigenvalue table compare bitwise equal downstream.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadLawError,
    DimMismatchError,
    NoConvergenceError,
    NonCommutingError,
    NonFiniteError,
)
from .rng import generator

HERMITIAN_TOL = 1e-12
COMMUTATION_TOL = 1e-10
UNITARITY_TOL = 1e-10
DIAG_TOL = 1e-8
RECONSTRUCTION_TOL = 1e-8
CLUSTER_GAP = 1e-8

# Fixed substream for the generic linear combination inside joint_diagonalize.
_COMBO_STREAM = 0x6F704C4A


def as_matrix(x) -> np.ndarray:
    """Coerce a HermitianMatrix or array-like to a complex ndarray."""
    if isinstance(x, HermitianMatrix):
        return x.data
    return np.asarray(x, dtype=complex)


def _frob(x) -> float:
    return float(np.linalg.norm(x, "fro"))


@dataclass
class HermitianMatrix:
    """Dense complex square matrix within the Hermitian gate."""

    data: np.ndarray

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=complex)
        if self.data.ndim != 2 or self.data.shape[0] != self.data.shape[1]:
            raise DimMismatchError(f"expected a square matrix, got {self.data.shape}")
        dev = np.max(np.abs(self.data - self.data.conj().T))
        scale = 1.0 + float(np.max(np.abs(self.data))) if self.data.size else 1.0
        if dev > HERMITIAN_TOL * scale:
            raise ValueError(f"matrix is not Hermitian: deviation {dev:.3e}")

    @property
    def dim(self) -> int:
        return self.data.shape[0]


@dataclass
class CommutingTuple:
    """d Hermitian matrices of equal dimension, pairwise commuting."""

    matrices: list

    def __post_init__(self):
        self.matrices = [
            m if isinstance(m, HermitianMatrix) else HermitianMatrix(m)
            for m in self.matrices
        ]
        if not self.matrices:
            raise ValueError("tuple must contain at least one matrix")
        dims = {m.dim for m in self.matrices}
        if len(dims) != 1:
            raise DimMismatchError(f"matrices have mixed dimensions {sorted(dims)}")
        arrays = [m.data for m in self.matrices]
        norms = [_frob(a) for a in arrays]
        for k in range(len(arrays)):
            for l in range(k + 1, len(arrays)):
                comm = arrays[k] @ arrays[l] - arrays[l] @ arrays[k]
                if _frob(comm) > COMMUTATION_TOL * norms[k] * norms[l]:
                    raise NonCommutingError(
                        f"matrices {k} and {l} do not commute: "
                        f"residual {_frob(comm):.3e}"
                    )

    @property
    def d(self) -> int:
        return len(self.matrices)

    @property
    def dim(self) -> int:
        return self.matrices[0].dim

    def arrays(self):
        return [m.data for m in self.matrices]


@dataclass
class JointSpectrum:
    """Unitary change of basis plus the n x d table of joint eigenvalues."""

    basis: np.ndarray
    eigenvalues: np.ndarray
    provenance: CommutingTuple = field(repr=False)

    def __post_init__(self):
        self.basis = np.asarray(self.basis, dtype=complex)
        self.eigenvalues = np.asarray(self.eigenvalues, dtype=float)
        validate_joint_spectrum(self)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def d(self) -> int:
        return self.eigenvalues.shape[1]


def validate_joint_spectrum(js, tol=RECONSTRUCTION_TOL):
    """Check unitarity, joint diagonality and reconstruction of a JointSpectrum."""
    U = js.basis
    n = U.shape[0]
    if U.shape != (n, n):
        raise DimMismatchError("basis must be square")
    if js.eigenvalues.shape[0] != n:
        raise DimMismatchError("eigenvalue table has wrong row count")
    gram_dev = _frob(U.conj().T @ U - np.eye(n))
    if gram_dev > UNITARITY_TOL * n:
        raise ValueError(f"basis is not unitary: ||U*U - I||_F = {gram_dev:.3e}")
    for k, m in enumerate(js.provenance.matrices):
        rot = U.conj().T @ m.data @ U
        off = rot - np.diag(np.diag(rot))
        if _frob(off) > max(tol, DIAG_TOL) * _frob(m.data):
            raise ValueError(f"matrix {k} is not diagonal in the joint basis")
        recon = (U * js.eigenvalues[:, k]) @ U.conj().T
        if _frob(m.data - recon) > max(tol, RECONSTRUCTION_TOL) * max(_frob(m.data), 1e-300):
            if _frob(m.data) == 0.0 and _frob(recon) == 0.0:
                continue
            raise ValueError(f"matrix {k} fails reconstruction from the spectrum")


def commutator(x, y) -> np.ndarray:
    """XY - YX for equal-dimension square matrices."""
    x = as_matrix(x)
    y = as_matrix(y)
    if x.shape != y.shape:
        raise DimMismatchError(f"shapes {x.shape} and {y.shape} differ")
    return x @ y - y @ x


def _split_clusters(sorted_vals, gap):
    """Index ranges of consecutive values closer than ``gap``."""
    clusters = []
    start = 0
    for i in range(1, sorted_vals.size):
        if sorted_vals[i] - sorted_vals[i - 1] > gap:
            clusters.append(np.arange(start, i))
            start = i
    clusters.append(np.arange(start, sorted_vals.size))
    return clusters


def _jacobi_sweep(rotated, U):
    """One two-sided Jacobi sweep minimizing total off-diagonal energy.

    ``rotated`` holds the tuple expressed in the current basis and is updated
    in place together with the accumulated basis ``U``.
    """
    n = U.shape[0]
    for p in range(n - 1):
        for q in range(p + 1, n):
            m3 = np.zeros((3, 3))
            for a in rotated:
                apq = a[p, q]
                u = np.array(
                    [a[p, p].real - a[q, q].real, 2.0 * apq.real, 2.0 * apq.imag]
                )
                m3 += np.outer(u, u)
            w, vecs = np.linalg.eigh(m3)
            v = vecs[:, np.argmax(w)]
            if v[0] < 0:
                v = -v
            c = np.sqrt(0.5 + v[0] / 2.0)
            if c < 1e-300:
                continue
            s = 0.5 * (v[1] - 1j * v[2]) / c
            if abs(s) < 1e-18:
                continue
            g = np.array([[c, -np.conj(s)], [s, c]])
            for a in rotated:
                a[[p, q], :] = g.conj().T @ a[[p, q], :]
                a[:, [p, q]] = a[:, [p, q]] @ g
            U[:, [p, q]] = U[:, [p, q]] @ g


def _offdiag_ok(rotated, norms, tol):
    for a, nrm in zip(rotated, norms):
        off = a - np.diag(np.diag(a))
        if _frob(off) > max(tol, DIAG_TOL) * nrm and nrm > 0:
            return False
    return True


def _snap_degenerate(column, scale):
    """Snap numerically degenerate entries of one eigenvalue column to a shared float."""
    order = np.argsort(column, kind="stable")
    snapped = column.copy()
    width = 64 * column.size * np.finfo(float).eps * scale
    start = 0
    vals = column[order]
    for i in range(1, vals.size + 1):
        if i == vals.size or vals[i] - vals[i - 1] > width:
            if i - start > 1:
                snapped[order[start:i]] = float(np.mean(vals[start:i]))
            start = i
    return snapped


def joint_diagonalize(tup: CommutingTuple, tol: float = RECONSTRUCTION_TOL,
                      max_polish_sweeps: int = 16) -> JointSpectrum:
    """Simultaneously diagonalize a commuting Hermitian tuple.

    Returns a JointSpectrum whose eigenvalue rows are sorted lexicographically
    (ascending per coordinate) and whose basis columns carry a deterministic
    phase (largest-magnitude entry made real positive).
    """
    arrays = tup.arrays()
    n, d = tup.dim, tup.d
    norms = [_frob(a) for a in arrays]

    rng = generator(_COMBO_STREAM)
    coeffs = rng.standard_normal(d)
    combo = sum(c * a for c, a in zip(coeffs, arrays))
    combo = (combo + combo.conj().T) / 2.0
    vals, U = np.linalg.eigh(combo)
    rotated = [U.conj().T @ a @ U for a in arrays]

    def refine(idx, k):
        if k >= d or idx.size < 2:
            return
        block = rotated[k][np.ix_(idx, idx)]
        block = (block + block.conj().T) / 2.0
        w, q = np.linalg.eigh(block)
        U[:, idx] = U[:, idx] @ q
        for a in rotated:
            a[:, idx] = a[:, idx] @ q
            a[idx, :] = q.conj().T @ a[idx, :]
        gap = CLUSTER_GAP * (1.0 + norms[k])
        for sub in _split_clusters(w, gap):
            if sub.size > 1:
                refine(idx[sub], k + 1)

    combo_gap = CLUSTER_GAP * (1.0 + _frob(combo))
    for cluster in _split_clusters(vals, combo_gap):
        if cluster.size > 1:
            refine(cluster, 0)

    sweeps = 0
    _jacobi_sweep(rotated, U)
    sweeps += 1
    while not _offdiag_ok(rotated, norms, tol):
        if sweeps >= max_polish_sweeps:
            raise NoConvergenceError(
                f"off-diagonal energy above tolerance after {sweeps} polish sweeps"
            )
        _jacobi_sweep(rotated, U)
        sweeps += 1

    table = np.column_stack([np.real(np.diag(a)) for a in rotated])
    for k in range(d):
        table[:, k] = _snap_degenerate(table[:, k], 1.0 + norms[k])

    order = np.lexsort(table.T[::-1])
    table = table[order]
    U = U[:, order]

    # Deterministic column phases: largest-magnitude entry made real positive.
    anchor = np.argmax(np.abs(U), axis=0)
    phases = U[anchor, np.arange(n)]
    phases = phases / np.abs(phases)
    U = U / phases[np.newaxis, :]

    js = JointSpectrum(basis=U, eigenvalues=table, provenance=tup)
    validate_joint_spectrum(js, tol)
    return js


def apply_function(js: JointSpectrum, f) -> HermitianMatrix:
    """Multivariate spectral calculus: U diag(f(lambda_i)) U*."""
    vals = np.array([float(f(row)) for row in js.eigenvalues])
    if not np.all(np.isfinite(vals)):
        bad = js.eigenvalues[~np.isfinite(vals)][0]
        raise NonFiniteError(f"function not finite at eigenvalue row {bad}")
    U = js.basis
    return HermitianMatrix((U * vals) @ U.conj().T)


def haar_unitary(n: int, rng) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix.

    The QR factorization is made unique by forcing the diagonal of R positive.
    """
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def _draw_spectra(n, d, spectrum_law, rng):
    if isinstance(spectrum_law, str):
        if spectrum_law == "uniform":
            return rng.uniform(-1.0, 1.0, size=(n, d))
        if spectrum_law.startswith("integer:"):
            try:
                m = int(spectrum_law.split(":", 1)[1])
            except ValueError:
                raise BadLawError(f"bad integer law {spectrum_law!r}") from None
            if m < 0:
                raise BadLawError("integer law radius must be >= 0")
            return rng.integers(-m, m + 1, size=(n, d)).astype(float)
        raise BadLawError(f"unknown spectrum law {spectrum_law!r}")
    grid = np.asarray(spectrum_law, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise BadLawError("user grid must be a nonempty 1-d sequence")
    return rng.choice(grid, size=(n, d))


def planted_commuting_tuple(n, d, spectrum_law="uniform", seed=0):
    """Random commuting tuple plus the planted basis and eigenvalue table."""
    if n < 1 or d < 1:
        raise ValueError("n and d must be positive")
    rng = generator(seed)
    U = haar_unitary(n, rng)
    lambdas = _draw_spectra(n, d, spectrum_law, rng)
    matrices = []
    for k in range(d):
        a = (U * lambdas[:, k]) @ U.conj().T
        matrices.append(HermitianMatrix((a + a.conj().T) / 2.0))
    return CommutingTuple(matrices), U, lambdas


def random_commuting_tuple(n, d, spectrum_law="uniform", seed=0) -> CommutingTuple:
    """A_k = U diag(lambda^(k)) U* with a single seeded Haar unitary U."""
    tup, _, _ = planted_commuting_tuple(n, d, spectrum_law, seed)
    return tup


def discretize_tuple(js: JointSpectrum, n: int) -> CommutingTuple:
    """Floor the joint spectrum to the 1/n grid: eigenvalue lambda -> floor(n*lambda)."""
    if n < 1:
        raise ValueError("grid refinement n must be positive")
    U = js.basis
    floored = np.floor(n * js.eigenvalues)
    matrices = []
    for k in range(js.d):
        a = (U * floored[:, k]) @ U.conj().T
        matrices.append(HermitianMatrix((a + a.conj().T) / 2.0))
    return CommutingTuple(matrices)
