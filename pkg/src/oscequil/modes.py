"""Normal modes of the subsystem coupled to a finite bath.

The dynamical matrix of the coupled oscillators is an arrowhead matrix

    V = [[Wbar0^2, a_1, ..., a_N],
         [a_1,     W_1^2         ],
         [ ...          ...      ],
         [a_N,             W_N^2 ]]

with ``Wbar0^2 = Omega0^2 + sum a_k^2 / W_k^2``.  Its eigenvalues are the
roots of the secular function ``g^{-1}`` (a rational function of
``x = z^2``) and strictly interlace the bath frequencies.  The default path
solves the secular equation by bisection in ``O(N^2)``; a dense symmetric
eigensolver is kept as an independent oracle.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import kernels
from .bath import DiscretizedBath, bare_frequency_squared
from .errors import DegenerateModeError, PoleError, RootCountError
from .spectral import SystemParams

__all__ = [
    "NormalModes",
    "IdentityReport",
    "g_inverse_discrete",
    "solve_modes",
    "mode_matrix",
    "subsystem_weights",
    "eig_oracle",
    "normal_modes",
    "verify_identities",
    "default_probes",
]

ROOT_RTOL = 1e-13
WEIGHT_CHECK_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class NormalModes:
    """Squared normal-mode frequencies and the orthogonal transformation.

    ``X[i, nu]`` connects oscillator ``i`` (0 is the subsystem) with mode
    ``nu``: ``Q_i = sum_nu X[i, nu] q_nu``.  Columns are ordered by
    increasing ``freqs`` and signed so that ``X[0, nu] >= 0``.
    """

    freqs: np.ndarray
    X: np.ndarray
    weight_check: float = field(default=0.0)

    def __post_init__(self):
        for name in ("freqs", "X"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def omegas(self) -> np.ndarray:
        return np.sqrt(self.freqs)

    @property
    def weights(self) -> np.ndarray:
        """Subsystem weights ``X[0, nu]``."""
        return self.X[0]

    def spectral_sum(self, f) -> float:
        """``sum_nu X[0, nu]**2 f(omega_nu)``."""
        return float(np.sum(self.X[0] ** 2 * f(self.omegas)))

    def to_csv(self, path) -> None:
        """Write columns ``nu, omega_nu, X0nu`` (``nu`` counts from 1)."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["nu", "omega_nu", "X0nu"])
            for nu, (om, x0) in enumerate(zip(self.omegas, self.X[0]), start=1):
                w.writerow([nu, f"{om:.17g}", f"{x0:.17g}"])


def g_inverse_discrete(sys: SystemParams, bath: DiscretizedBath, z2):
    """Secular function ``z^2 - Omega0^2 - sum_k a_k^2 (1/(z^2 - W_k^2) + 1/W_k^2)``.

    ``z2`` may be real or complex, scalar or array.  Raises :class:`PoleError`
    when a real ``z2`` hits a coupled bath frequency.
    """
    z2 = np.asarray(z2)
    d = bath.omegas**2
    w = bath.alphas**2
    coupled = w > 0
    d, w = d[coupled], w[coupled]
    if not np.iscomplexobj(z2):
        z2 = z2.astype(float)
        scale = np.maximum(np.abs(z2)[..., None], d)
        if np.any(np.abs(z2[..., None] - d) <= 4 * np.finfo(float).eps * scale):
            raise PoleError("secular function evaluated on a bath frequency")
    terms = w * (1.0 / (z2[..., None] - d) + 1.0 / d)
    out = z2 - sys.omega0**2 - np.sum(terms, axis=-1)
    return out[()] if out.ndim == 0 else out


def _split(bath: DiscretizedBath):
    d = bath.omegas**2
    w = bath.alphas**2
    coupled = w > 0
    return d, w, coupled


def solve_modes(sys: SystemParams, bath: DiscretizedBath, rtol: float = ROOT_RTOL,
                backend: str | None = None) -> np.ndarray:
    """All ``N + 1`` squared normal-mode frequencies, in increasing order.

    Each root is bracketed between consecutive bath poles (below the lowest
    and above the highest for the two outer roots) and bisected on its
    offset from the nearer pole.  Uncoupled bath oscillators are deflated:
    their frequencies are eigenvalues as they stand.

    Raises
    ------
    RootCountError
        If bath frequencies repeat or a bracket shows no sign change.
    """
    d, w, coupled = _split(bath)
    if np.any(np.diff(d) <= 0):
        raise RootCountError("bath frequencies are not distinct; secular brackets collapse")
    shift = bare_frequency_squared(sys, bath)
    dc, wc = d[coupled], w[coupled]
    if dc.size == 0:
        roots = np.array([sys.omega0**2])
    else:
        # Weyl bound: lambda_max <= max diagonal + ||border||_2
        upper = max(dc[-1], shift) + np.sqrt(np.sum(wc)) + 1.0
        origin, tau, status = kernels.secular_roots(dc, wc, shift, upper, rtol, backend)
        if np.any(status):
            bad = np.flatnonzero(status).tolist()
            raise RootCountError(f"no sign change in secular brackets {bad}")
        roots = dc[origin] + tau
    return np.sort(np.concatenate([roots, d[~coupled]]))


def mode_matrix(sys: SystemParams, bath: DiscretizedBath, freqs) -> NormalModes:
    """Assemble the orthogonal mode matrix from the secular roots.

    ``1/X0nu^2 = 1 + sum_k a_k^2 / (W_k^2 - w_nu^2)^2`` and
    ``X_knu = a_k X0nu / (w_nu^2 - W_k^2)``.  The normalization is
    cross-checked against the derivative ``d g^{-1} / d(z^2)`` obtained by a
    complex step through :func:`g_inverse_discrete`.
    """
    freqs = np.asarray(freqs, dtype=float)
    d, w, coupled = _split(bath)
    n = d.size
    if freqs.size != n + 1:
        raise DegenerateModeError(f"expected {n + 1} frequencies, got {freqs.size}")
    X = np.zeros((n + 1, n + 1))
    free_cols = np.zeros(n + 1, dtype=bool)
    for k in np.flatnonzero(~coupled):
        hits = np.flatnonzero((freqs == d[k]) & ~free_cols)
        if hits.size == 0:
            raise DegenerateModeError(f"uncoupled bath frequency {k} missing from roots")
        free_cols[hits[0]] = True
        X[k + 1, hits[0]] = 1.0
    cols = np.flatnonzero(~free_cols)
    x = freqs[cols]
    diff = x[:, None] - d[coupled][None, :]
    if np.any(diff == 0):
        raise DegenerateModeError("a normal-mode frequency coincides with a bath pole")
    norm2 = 1.0 + np.sum(w[coupled] / diff**2, axis=1)
    x0 = 1.0 / np.sqrt(norm2)
    X[0, cols] = x0
    rows = np.flatnonzero(coupled) + 1
    X[np.ix_(rows, cols)] = (np.sqrt(w[coupled])[:, None] / diff.T) * x0[None, :]

    check = 0.0
    if cols.size:
        h = 1e-30 * np.maximum(1.0, np.abs(x))
        deriv = np.imag(g_inverse_discrete(sys, bath, x + 1j * h)) / h
        check = float(np.max(np.abs(deriv - norm2) / norm2))
        if check > WEIGHT_CHECK_TOL:
            raise DegenerateModeError(
                f"mode weights disagree with d g^-1/dz^2 by {check:.3g} (relative)")
    return NormalModes(freqs=freqs, X=X, weight_check=check)


def subsystem_weights(sys: SystemParams, bath: DiscretizedBath, freqs,
                      chunk: int = 512) -> np.ndarray:
    """``X0nu^2`` for every root without building the full mode matrix.

    Memory stays ``O(chunk * N)``; useful for spectral sums on large baths.
    Deflated (uncoupled) modes get weight 0.
    """
    freqs = np.asarray(freqs, dtype=float)
    d, w, coupled = _split(bath)
    dc, wc = d[coupled], w[coupled]
    out = np.zeros(freqs.size)
    free = np.isin(freqs, d[~coupled])
    idx = np.flatnonzero(~free)
    for lo in range(0, idx.size, chunk):
        sel = idx[lo:lo + chunk]
        diff = freqs[sel, None] - dc[None, :]
        out[sel] = 1.0 / (1.0 + np.sum(wc / diff**2, axis=1))
    return out


def _arrowhead(sys: SystemParams, bath: DiscretizedBath) -> np.ndarray:
    n = bath.n
    V = np.zeros((n + 1, n + 1))
    V[0, 0] = bare_frequency_squared(sys, bath)
    idx = np.arange(1, n + 1)
    V[idx, idx] = bath.omegas**2
    V[0, 1:] = bath.alphas
    V[1:, 0] = bath.alphas
    return V


def eig_oracle(sys: SystemParams, bath: DiscretizedBath) -> NormalModes:
    """Dense diagonalization of the arrowhead dynamical matrix."""
    lam, X = scipy.linalg.eigh(_arrowhead(sys, bath))
    # sign: X[0, nu] > 0, or largest entry positive when X[0, nu] vanishes
    pivot = X[0].copy()
    small = np.abs(pivot) < 1e-300
    if np.any(small):
        big = np.argmax(np.abs(X[:, small]), axis=0)
        pivot[small] = X[big, np.flatnonzero(small)]
    X = X * np.where(pivot < 0, -1.0, 1.0)
    return NormalModes(freqs=lam, X=X)


def normal_modes(sys: SystemParams, bath: DiscretizedBath, method: str = "secular",
                 backend: str | None = None) -> NormalModes:
    """Build :class:`NormalModes` with the secular solver or the dense oracle."""
    if method == "secular":
        return mode_matrix(sys, bath, solve_modes(sys, bath, backend=backend))
    if method == "dense":
        return eig_oracle(sys, bath)
    raise ValueError(f"unknown method {method!r}")


@dataclass
class IdentityReport:
    """Residuals of the algebraic identities obeyed by the normal modes."""

    orthogonality: float
    completeness: float
    row_defects: np.ndarray
    row0_defect: float
    probes: np.ndarray
    determinant_residuals: np.ndarray
    trace_residual: float
    weight_check: float

    def to_dict(self) -> dict:
        return {
            "orthogonality": self.orthogonality,
            "completeness": self.completeness,
            "max_row_defect": float(np.max(self.row_defects)),
            "row0_defect": self.row0_defect,
            "determinant_residual": float(np.max(self.determinant_residuals)),
            "determinant_probes": [[p.real, p.imag] for p in self.probes.tolist()],
            "trace_residual": self.trace_residual,
            "weight_check": self.weight_check,
        }


def default_probes(freqs: np.ndarray, count: int = 10) -> np.ndarray:
    """``count`` probe values of ``z^2`` off the real spectrum.

    The first is ``z^2 = -1`` (imaginary ``z``); the rest sweep the band
    at unit-to-moderate distance above the real axis.
    """
    top = float(np.max(freqs))
    re = np.linspace(0.0, top, count - 1)
    im = 1.0 + np.arange(count - 1)
    return np.concatenate([[-1.0 + 0j], re + 1j * im])


def verify_identities(modes: NormalModes, sys: SystemParams, bath: DiscretizedBath,
                      probes=None) -> IdentityReport:
    """Check orthogonality, completeness, the product form of ``g`` and the trace.

    The product representation ``g = prod_k (x - W_k^2) / prod_nu (x - w_nu^2)``
    is compared against ``1 / g^{-1}(x)`` in log space so that the products
    cannot overflow.
    """
    X = modes.X
    eye = np.eye(X.shape[0])
    xtx = X.T @ X
    xxt = X @ X.T
    row_defects = np.abs(np.sum(X**2, axis=1) - 1.0)

    probes = default_probes(modes.freqs) if probes is None else np.asarray(probes, dtype=complex)
    d = bath.omegas**2
    log_prod = (np.sum(np.log(probes[:, None] - d[None, :]), axis=1)
                - np.sum(np.log(probes[:, None] - modes.freqs[None, :]), axis=1))
    ginv = g_inverse_discrete(sys, bath, probes)
    det_res = np.abs(np.exp(log_prod + np.log(ginv)) - 1.0)

    expected_trace = bare_frequency_squared(sys, bath) + np.sum(d)
    trace_res = abs(np.sum(modes.freqs) - expected_trace) / expected_trace
    return IdentityReport(
        orthogonality=float(np.max(np.abs(xtx - eye))),
        completeness=float(np.max(np.abs(xxt - eye))),
        row_defects=row_defects,
        row0_defect=float(np.max(np.abs(xxt[0] - eye[0]))),
        probes=probes,
        determinant_residuals=det_res,
        trace_residual=float(trace_res),
        weight_check=modes.weight_check,
    )
