"""Small dense linear algebra: linear solves, eigenvalues, Lyapunov equations.

Everything here operates on plain ``numpy`` arrays and delegates the heavy
lifting to LAPACK through :mod:`scipy.linalg`. The wrappers add the contracts
the rest of the package relies on: a pivot floor for singular systems, residual
bounds checked after the fact, and typed errors instead of LAPACK warnings.
"""

from __future__ import annotations

import logging
import warnings
from typing import Literal

import numpy as np
import numpy.typing as npt
from scipy import linalg

from magnon_entangle.errors import NoConvergence, SingularMatrix, UnstableDrift

logger = logging.getLogger(__name__)

Mat = npt.NDArray[np.complexfloating] | npt.NDArray[np.floating]
RealMat = npt.NDArray[np.float64]

LyapunovMethod = Literal["bartels-stewart", "kronecker"]

PIVOT_FLOOR = 1e-14
RESIDUAL_TOL = 1e-10
MAX_EIG_DIM = 64


def _as_square(a: npt.ArrayLike, what: str) -> Mat:
    arr = np.asarray(a)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"{what} must be a square matrix, got shape {arr.shape}")
    return arr


def is_real(a: Mat) -> bool:
    """True when *a* carries no imaginary part at all."""
    return not np.iscomplexobj(a) or bool(np.all(a.imag == 0))


def solve_linear(a: npt.ArrayLike, b: npt.ArrayLike) -> Mat:
    """Solve ``a @ x = b`` by LU factorization with partial pivoting.

    Raises:
        SingularMatrix: a pivot falls below ``1e-14 * ||a||`` or the residual
            bound ``||ax - b|| <= 1e-10 (||a|| ||x|| + ||b||)`` cannot be met.
    """
    a = _as_square(a, "A")
    b = np.asarray(b)
    column = b.ndim == 1
    if column:
        b = b.reshape(-1, 1)
    if b.shape[0] != a.shape[0]:
        raise ValueError(f"b has {b.shape[0]} rows but A is {a.shape[0]}x{a.shape[1]}")

    norm_a = float(np.linalg.norm(a, ord=np.inf))
    if norm_a == 0.0:
        raise SingularMatrix("matrix is identically zero")

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", linalg.LinAlgWarning)
        lu, piv = linalg.lu_factor(a, check_finite=True)

    smallest_pivot = float(np.min(np.abs(np.diag(lu))))
    if smallest_pivot < PIVOT_FLOOR * norm_a:
        raise SingularMatrix(
            f"pivot {smallest_pivot:.3e} below floor {PIVOT_FLOOR * norm_a:.3e}"
        )

    x = linalg.lu_solve((lu, piv), b)
    residual = a @ x - b
    # one step of iterative refinement
    x = x - linalg.lu_solve((lu, piv), residual)
    residual = a @ x - b

    bound = RESIDUAL_TOL * (
        norm_a * float(np.linalg.norm(x, ord=np.inf))
        + float(np.linalg.norm(b, ord=np.inf))
    )
    res_norm = float(np.linalg.norm(residual, ord=np.inf))
    if res_norm > bound:
        raise SingularMatrix(f"residual {res_norm:.3e} exceeds bound {bound:.3e}")

    return x.ravel() if column else x


def eig_general(a: npt.ArrayLike) -> npt.NDArray[np.complex128]:
    """Eigenvalues (with multiplicity, unordered) of a general square matrix.

    LAPACK reduces to Hessenberg form and runs shifted QR; its own iteration
    cap (30 sweeps per eigenvalue) is tighter than ``100 n^2``.
    """
    a = _as_square(a, "A")
    if a.shape[0] > MAX_EIG_DIM:
        raise ValueError(f"eig_general supports n <= {MAX_EIG_DIM}, got {a.shape[0]}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    try:
        values = linalg.eigvals(a, check_finite=False)
    except linalg.LinAlgError as exc:
        raise NoConvergence(f"QR iteration failed: {exc}") from exc
    return np.asarray(values, dtype=np.complex128)


def frobenius_residual(a: RealMat, v: RealMat, q: RealMat) -> float:
    """``||A V + V A^T + Q||_F``."""
    return float(np.linalg.norm(a @ v + v @ a.T + q, ord="fro"))


def _lyapunov_kronecker(a: RealMat, q: RealMat) -> RealMat:
    n = a.shape[0]
    eye = np.eye(n)
    # row-major vec: vec(A V) = (A kron I) vec(V), vec(V A^T) = (I kron A) vec(V)
    system = np.kron(a, eye) + np.kron(eye, a)
    vec = solve_linear(system, -q.reshape(-1))
    return np.asarray(vec, dtype=np.float64).reshape(n, n)


def _lyapunov_bartels_stewart(a: RealMat, q: RealMat) -> RealMat:
    return np.asarray(linalg.solve_continuous_lyapunov(a, -q), dtype=np.float64)


def solve_lyapunov(
    a: npt.ArrayLike,
    q: npt.ArrayLike,
    *,
    method: LyapunovMethod = "bartels-stewart",
    assume_stable: bool = False,
) -> RealMat:
    """Solve ``A V + V A^T = -Q`` for the symmetric matrix ``V``.

    ``method="kronecker"`` vectorizes the equation into an ``n^2`` linear
    system; the default Bartels-Stewart route falls back to it when its
    residual misses ``1e-10 ||Q||_F``.

    Raises:
        UnstableDrift: some eigenvalue of ``A`` has real part >= 0.
        SingularMatrix: neither route meets the residual bound.
    """
    a = np.asarray(_as_square(a, "A"))
    q = np.asarray(_as_square(q, "Q"))
    if a.shape != q.shape:
        raise ValueError(f"A {a.shape} and Q {q.shape} differ in shape")
    if not (is_real(a) and is_real(q)):
        raise ValueError("solve_lyapunov expects real matrices")
    a = np.real(a).astype(np.float64)
    q = np.real(q).astype(np.float64)
    if not np.allclose(q, q.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(q).max())):
        raise ValueError("Q must be symmetric")

    if not assume_stable:
        leading = float(np.max(eig_general(a).real))
        if leading >= 0.0:
            raise UnstableDrift(f"drift has eigenvalue with real part {leading:.3e}")

    q_norm = float(np.linalg.norm(q, ord="fro"))
    if q_norm == 0.0:
        return np.zeros_like(q)
    bound = RESIDUAL_TOL * q_norm

    solvers = [_lyapunov_bartels_stewart, _lyapunov_kronecker]
    if method == "kronecker":
        solvers = [_lyapunov_kronecker]

    residual = float("inf")
    for solver in solvers:
        v = solver(a, q)
        v = 0.5 * (v + v.T)
        residual = frobenius_residual(a, v, q)
        if residual <= bound:
            return v
        logger.debug(
            "Lyapunov %s residual %.3e above bound %.3e",
            solver.__name__,
            residual,
            bound,
        )
    raise SingularMatrix(
        f"Lyapunov residual {residual:.3e} exceeds bound {bound:.3e}"
    )
