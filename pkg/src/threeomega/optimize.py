"""Small dense Levenberg-Marquardt solver for few-parameter problems."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FitError


@dataclass
class LMResult:
    params: np.ndarray
    residuals: np.ndarray
    jacobian: np.ndarray
    iterations: int
    converged: bool


def levenberg_marquardt(residual, jacobian, p0, xtol=1e-10, max_iter=100, lam0=1e-3):
    """Minimise ``sum(residual(p)**2)``.

    ``jacobian(p)`` returns d residual / d p. Damping uses Marquardt's
    diagonal scaling. Iteration stops once an accepted step is smaller than
    ``xtol * (|p| + xtol)`` in every component, or after ``max_iter`` steps.
    """
    p = np.asarray(p0, dtype=float).copy()
    r = residual(p)
    if not np.all(np.isfinite(r)):
        raise FitError("non-finite residuals at the starting point")
    cost = r @ r
    lam = lam0
    converged = False
    it = 0
    while it < max_iter:
        it += 1
        J = jacobian(p)
        A = J.T @ J
        grad = J.T @ r
        D = np.diag(np.maximum(np.diag(A), 1e-300))
        while True:
            try:
                step = -np.linalg.solve(A + lam * D, grad)
            except np.linalg.LinAlgError:
                step = None
            if step is not None and np.all(np.isfinite(step)):
                trial = p + step
                r_trial = residual(trial)
                if np.all(np.isfinite(r_trial)):
                    cost_trial = r_trial @ r_trial
                    if cost_trial <= cost:
                        break
            lam *= 10.0
            if lam > 1e20:
                # no descent direction left: we are at the minimum to working precision
                return LMResult(p, r, J, it, True)
        p, r, cost = trial, r_trial, cost_trial
        lam = max(lam / 10.0, 1e-15)
        if np.all(np.abs(step) <= xtol * (np.abs(p) + xtol)):
            converged = True
            break
    return LMResult(p, r, jacobian(p), it, converged)
