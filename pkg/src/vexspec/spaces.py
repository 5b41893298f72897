"""Norm calculus for Lebesgue spaces with a cell-wise variable exponent.

All quantities live on a fixed finite family of quadrature cells, so the
underlying measure is a weighted counting measure and every identity below
is exact up to floating point: no quadrature error enters the modular.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ExponentField",
    "NormResult",
    "exponent_field",
    "constant_exponent",
    "product_exponent",
    "modular",
    "luxemburg_norm",
    "conjugate",
    "holder_constant",
]


@dataclass(frozen=True)
class ExponentField:
    """Exponent values sampled once per quadrature cell, all strictly > 1."""

    values: np.ndarray
    lo: float
    hi: float

    @property
    def is_constant(self) -> bool:
        return self.hi - self.lo <= 1e-14 * self.hi


def exponent_field(values) -> ExponentField:
    """Build an ExponentField, rejecting values that are not finite and > 1."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise ValueError("exponent field needs at least one cell")
    if not np.all(np.isfinite(arr)):
        raise ValueError("exponent field contains non-finite values")
    if np.any(arr <= 1.0):
        bad = np.unravel_index(int(np.argmin(arr)), arr.shape)
        raise ValueError(f"exponent must exceed 1 everywhere, offending cell {bad}")
    return ExponentField(arr, float(arr.min()), float(arr.max()))


def constant_exponent(value: float, shape) -> ExponentField:
    return exponent_field(np.full(shape, float(value)))


def product_exponent(a: ExponentField, b: ExponentField) -> ExponentField:
    """Cell-wise product a(x)b(x); exceeds 1 automatically since both factors do."""
    if a.values.shape != b.values.shape:
        raise ValueError("exponent fields have mismatched cell counts")
    return exponent_field(a.values * b.values)


@dataclass(frozen=True)
class NormResult:
    """Luxemburg norm together with the bisection certificate that produced it."""

    norm: float
    iterations: int
    bracket_width: float


def _check_cells(u: np.ndarray, p: ExponentField, cell_volumes) -> np.ndarray:
    if u.shape != p.values.shape:
        raise ValueError(
            f"cell count mismatch: values {u.shape} vs exponent {p.values.shape}"
        )
    vol = np.asarray(cell_volumes, dtype=float)
    if vol.ndim and vol.shape != u.shape:
        raise ValueError(f"cell count mismatch: volumes {vol.shape} vs values {u.shape}")
    return vol


def modular(u, p: ExponentField, cell_volumes) -> float:
    """sum_c |u_c|^{p_c} vol_c, the convex modular of the discrete measure."""
    u = np.asarray(u, dtype=float)
    vol = _check_cells(u, p, cell_volumes)
    return float(np.sum(np.abs(u) ** p.values * vol))


def luxemburg_norm(u, p: ExponentField, cell_volumes, tol: float = 1e-12) -> NormResult:
    """Luxemburg norm inf{s > 0 : modular(u/s) <= 1} by bisection.

    The map s -> modular(u/s) is strictly decreasing for u != 0, so the
    norm is bracketed by doubling an upper endpoint from 1 and bisecting.
    The returned norm is the upper bracket endpoint, hence always satisfies
    modular(u/norm) <= 1; `tol` is relative to the current upper endpoint.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    u = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(u)):
        raise ValueError("luxemburg_norm: input values must be finite")
    vol = _check_cells(u, p, cell_volumes)
    if not np.any(u):
        return NormResult(0.0, 0, 0.0)

    hi = 1.0
    doublings = 0
    while modular(u / hi, p, vol) > 1.0:
        hi *= 2.0
        doublings += 1
        if doublings > 4096:
            raise ValueError("luxemburg_norm: failed to bracket the norm")
    lo = hi / 2.0 if doublings else 0.0

    iterations = doublings
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        if modular(u / mid, p, vol) <= 1.0:
            hi = mid
        else:
            lo = mid
        iterations += 1
        if iterations > 20000:  # unreachable for finite nonzero input
            break
    return NormResult(hi, iterations, hi - lo)


def conjugate(p: ExponentField) -> ExponentField:
    """Cell-wise conjugate p/(p-1); finite since every value exceeds 1."""
    if np.any(p.values <= 1.0):
        raise ValueError("conjugate undefined for exponent values <= 1")
    return exponent_field(p.values / (p.values - 1.0))


def holder_constant(p: ExponentField) -> float:
    """1/inf(p) + 1/inf(p'), the constant in the two-exponent Hoelder bound.

    Lies in [1, 2): equals 1 exactly when p is constant.
    """
    return 1.0 / p.lo + 1.0 / conjugate(p).lo
