"""Finite oscillator baths approximating a continuous spectral density.

A bath of ``n`` oscillators with frequencies ``omegas`` and couplings
``alphas`` reproduces ``J`` in the quadrature sense

    (pi/2) * sum_k alpha_k**2 / Omega_k * f(Omega_k)  ~  int J(w) f(w) dw.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidParam
from .spectral import OhmicSpectrum, SystemParams, j_value

__all__ = [
    "DiscretizedBath",
    "frequency_grid",
    "discretize",
    "bare_frequency_squared",
    "recurrence_estimate",
    "SCHEMES",
]

SCHEMES = ("midpoint", "gauss")


@dataclass(frozen=True, eq=False)
class DiscretizedBath:
    """Star-coupled bath: frequencies ``omegas`` and couplings ``alphas``.

    Couplings are stored as non-negative square roots; only ``alpha**2``
    is physical.  Zero couplings describe an uncoupled bath.
    """

    omegas: np.ndarray
    alphas: np.ndarray

    def __post_init__(self):
        omegas = np.ascontiguousarray(self.omegas, dtype=float)
        alphas = np.ascontiguousarray(self.alphas, dtype=float)
        if omegas.ndim != 1 or omegas.shape != alphas.shape or omegas.size == 0:
            raise InvalidParam("omegas and alphas must be non-empty 1-d arrays of equal length")
        if np.any(omegas <= 0) or not np.all(np.isfinite(omegas)):
            raise InvalidParam("bath frequencies must be positive and finite")
        if np.any(alphas < 0) or not np.all(np.isfinite(alphas)):
            raise InvalidParam("couplings must be non-negative and finite")
        if np.any(np.diff(omegas) < 0):
            raise InvalidParam("bath frequencies must be sorted in increasing order")
        omegas.flags.writeable = False
        alphas.flags.writeable = False
        object.__setattr__(self, "omegas", omegas)
        object.__setattr__(self, "alphas", alphas)

    @property
    def n(self) -> int:
        return self.omegas.size

    def decoupled(self) -> "DiscretizedBath":
        """Same frequencies with every coupling set to zero."""
        return DiscretizedBath(self.omegas, np.zeros_like(self.alphas))

    def to_csv(self, path) -> None:
        """Write columns ``k, omega_k, alpha_k`` (``k`` counts from 1)."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["k", "omega_k", "alpha_k"])
            for k, (om, al) in enumerate(zip(self.omegas, self.alphas), start=1):
                w.writerow([k, f"{om:.17g}", f"{al:.17g}"])

    @classmethod
    def from_csv(cls, path) -> "DiscretizedBath":
        with open(Path(path), newline="") as fh:
            rows = list(csv.DictReader(fh))
        if not rows:
            raise InvalidParam(f"{path}: no bath rows")
        rows.sort(key=lambda r: int(r["k"]))
        return cls(np.array([float(r["omega_k"]) for r in rows]),
                   np.array([float(r["alpha_k"]) for r in rows]))


def frequency_grid(cutoff: float, n: int, scheme: str = "midpoint"):
    """Nodes and weights of an ``n``-point rule on ``(0, cutoff)``."""
    if n < 1:
        raise InvalidParam(f"need at least one bath mode, got n={n}")
    if scheme == "midpoint":
        delta = cutoff / n
        nodes = (np.arange(1, n + 1) - 0.5) * delta
        weights = np.full(n, delta)
    elif scheme == "gauss":
        x, wx = np.polynomial.legendre.leggauss(n)
        nodes = 0.5 * cutoff * (x + 1.0)
        weights = 0.5 * cutoff * wx
    else:
        raise InvalidParam(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    return nodes, weights


def discretize(spec: OhmicSpectrum, n: int, scheme: str = "midpoint") -> DiscretizedBath:
    """Discretize ``J`` on ``n`` nodes with ``alpha_k**2 = (2/pi) J(W_k) W_k w_k``.

    ``midpoint`` uses uniform cells of width ``cutoff/n``; ``gauss`` uses
    Gauss-Legendre nodes mapped to ``(0, cutoff)``.
    """
    nodes, weights = frequency_grid(spec.cutoff, n, scheme)
    alpha2 = 2.0 / np.pi * j_value(spec, nodes) * nodes * weights
    return DiscretizedBath(nodes, np.sqrt(alpha2))


def bare_frequency_squared(sys: SystemParams, bath: DiscretizedBath) -> float:
    """Squared subsystem frequency including the coupling counterterm."""
    return float(sys.omega0**2 + np.sum(bath.alphas**2 / bath.omegas**2))


def recurrence_estimate(bath: DiscretizedBath) -> float:
    """Rephasing time ``2 pi / min_k (Omega_{k+1} - Omega_k)`` of the frequency comb."""
    if bath.n < 2:
        raise InvalidParam("recurrence estimate needs at least two bath modes")
    gap = np.min(np.diff(bath.omegas))
    if gap == 0:
        return float("inf")
    return float(2 * np.pi / gap)
