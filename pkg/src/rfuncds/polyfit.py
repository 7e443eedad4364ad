"""Multivariate polynomial least squares over an explicit monomial basis."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InsufficientPoints, RankDeficient
from .expr import Const, Expr, Mul, Pow, Var

# residuals below this count as an exact fit when SS_tot degenerates to 0
_EXACT_RESIDUAL = 1e-12
_RANK_RCOND = 1e-10


@dataclass(frozen=True)
class BasisSpec:
    """Monomial basis: one exponent vector per monomial, e.g. (2, 1) = x^2*y."""

    vars: tuple[str, ...]
    monomials: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))
        object.__setattr__(self, "monomials", tuple(tuple(int(e) for e in m)
                                                    for m in self.monomials))
        if not self.monomials:
            raise ValueError("basis needs at least one monomial")
        for m in self.monomials:
            if len(m) != len(self.vars):
                raise ValueError(f"monomial {m} arity != {len(self.vars)} variables")
            if any(e < 0 for e in m):
                raise ValueError(f"negative exponent in monomial {m}")
        if len(set(self.monomials)) != len(self.monomials):
            raise ValueError("duplicate monomials in basis")

    def __len__(self) -> int:
        return len(self.monomials)


@dataclass(frozen=True)
class FitResult:
    basis: BasisSpec
    coefficients: np.ndarray
    r_squared: float
    n_points: int
    residual_max_abs: float

    def predict(self, points) -> np.ndarray:
        return design_matrix(points, self.basis) @ self.coefficients


def design_matrix(points, basis: BasisSpec) -> np.ndarray:
    """Matrix with entry (i, j) = monomial_j evaluated at point_i."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != len(basis.vars):
        raise DimensionMismatch(
            f"points have {pts.shape[1]} coordinates, basis has {len(basis.vars)} variables")
    cols = [np.prod(pts ** np.asarray(m, dtype=float), axis=1) for m in basis.monomials]
    return np.column_stack(cols)


def fit_least_squares(points, values, basis: BasisSpec) -> FitResult:
    """Ordinary least squares via SVD with internal column scaling.

    Columns are scaled to unit max-abs before the solve (the raw reactor
    columns span 1 to ~9e4) and coefficients are unscaled on output.  R^2 is
    reported on the training data; an all-constant target with a tiny
    residual counts as R^2 = 1.
    """
    y = np.asarray(values, dtype=float)
    matrix = design_matrix(points, basis)
    n, m = matrix.shape
    if y.shape != (n,):
        raise DimensionMismatch(f"{n} points but {y.shape} values")
    if n < m:
        raise InsufficientPoints(f"{n} points for {m} monomials")
    col_scale = np.abs(matrix).max(axis=0)
    col_scale[col_scale == 0.0] = 1.0
    scaled = matrix / col_scale
    coeffs, _, rank, sv = np.linalg.lstsq(scaled, y, rcond=_RANK_RCOND)
    if rank < m:
        raise RankDeficient(
            f"design matrix rank {rank} < {m} (singular values {sv.tolist()})")
    coeffs = coeffs / col_scale
    residuals = y - matrix @ coeffs
    ss_res = float(residuals @ residuals)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    if ss_tot == 0.0:
        r2 = 1.0 if np.abs(residuals).max(initial=0.0) <= _EXACT_RESIDUAL else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return FitResult(
        basis=basis,
        coefficients=coeffs,
        r_squared=r2,
        n_points=n,
        residual_max_abs=float(np.abs(residuals).max(initial=0.0)),
    )


def r_squared(fit: FitResult, points, values) -> float:
    """R^2 of an existing fit on held-out data."""
    y = np.asarray(values, dtype=float)
    residuals = y - fit.predict(points)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    if ss_tot == 0.0:
        return 1.0 if np.abs(residuals).max(initial=0.0) <= _EXACT_RESIDUAL else 0.0
    return 1.0 - float(residuals @ residuals) / ss_tot


def fit_report(fit: FitResult) -> str:
    """Human-readable fit summary with full-precision coefficients."""
    lines = [
        f"variables: {', '.join(fit.basis.vars)}",
        f"n_points: {fit.n_points}",
        f"r_squared: {fit.r_squared!r}",
        f"residual_max_abs: {fit.residual_max_abs!r}",
        "coefficients:",
    ]
    for coeff, mono in zip(fit.coefficients, fit.basis.monomials):
        label = " * ".join(
            name if e == 1 else f"{name}^{e}"
            for name, e in zip(fit.basis.vars, mono) if e > 0
        ) or "1"
        lines.append(f"  {label}: {float(coeff)!r}")
    return "\n".join(lines) + "\n"


def to_expr(fit: FitResult) -> Expr:
    """Expression form of the fitted polynomial (exact-zero terms dropped)."""
    terms: list[Expr] = []
    for coeff, mono in zip(fit.coefficients, fit.basis.monomials):
        if coeff == 0.0:
            continue
        term: Expr = Const(float(coeff))
        for name, e in zip(fit.basis.vars, mono):
            if e == 1:
                term = Mul(term, Var(name))
            elif e >= 2:
                term = Mul(term, Pow(Var(name), e))
        terms.append(term)
    if not terms:
        return Const(0.0)
    out = terms[0]
    for t in terms[1:]:
        out = out + t
    return out
