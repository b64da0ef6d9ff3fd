"""Limited-memory quasi-Newton minimizer.

Small, dependency-free L-BFGS with a backtracking Armijo line search.
It is written for smooth convex objectives: accepted iterates strictly
decrease the objective, termination is on the max-norm of the gradient,
and the whole run is deterministic for fixed inputs.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

FunGrad = Callable[[np.ndarray], tuple[float, np.ndarray]]

_ARMIJO_C1 = 1e-4
_MIN_STEP = 1e-20
_MIN_CURVATURE = 1e-10


@dataclass
class OptimizeResult:
    x: np.ndarray
    fun: float
    grad: np.ndarray
    iterations: int
    converged: bool
    message: str
    trace: list[tuple[int, float, float]] = field(default_factory=list)

    @property
    def grad_max_norm(self) -> float:
        return float(np.abs(self.grad).max()) if self.grad.size else 0.0


def minimize_lbfgs(
    fun_and_grad: FunGrad,
    x0: np.ndarray,
    *,
    gtol: float = 1e-4,
    max_iters: int = 500,
    history: int = 10,
    on_iteration: Callable[[int, float, float], None] | None = None,
) -> OptimizeResult:
    """Minimize f starting from x0 until max|grad| < gtol or max_iters.

    ``fun_and_grad`` returns the objective value and its gradient in one
    call.  The returned trace holds (iteration, value, max|grad|) for the
    starting point and every accepted iterate; ``on_iteration`` receives
    the same triples as they happen.
    """
    x = np.asarray(x0, dtype=np.float64).copy()
    f, g = _evaluate(fun_and_grad, x)
    gnorm = float(np.abs(g).max()) if g.size else 0.0

    s_hist: deque[np.ndarray] = deque(maxlen=history)
    y_hist: deque[np.ndarray] = deque(maxlen=history)
    rho_hist: deque[float] = deque(maxlen=history)

    trace = [(0, f, gnorm)]
    if on_iteration is not None:
        on_iteration(0, f, gnorm)
    iteration = 0
    message = "converged"
    while gnorm >= gtol:
        if iteration >= max_iters:
            message = f"iteration limit {max_iters} reached"
            break
        direction = _search_direction(g, s_hist, y_hist, rho_hist)
        slope = float(direction @ g)
        if slope >= 0.0:
            # Stale curvature information; fall back to steepest descent.
            direction = -g
            slope = float(direction @ g)

        step = 1.0
        while True:
            x_new = x + step * direction
            f_new, g_new = _evaluate(fun_and_grad, x_new)
            if f_new <= f + _ARMIJO_C1 * step * slope:
                break
            step *= 0.5
            if step < _MIN_STEP:
                message = "line search failed to make progress"
                break
        if step < _MIN_STEP:
            break

        s = x_new - x
        y = g_new - g
        sy = float(s @ y)
        if sy > _MIN_CURVATURE * float(np.linalg.norm(s)) * float(np.linalg.norm(y)):
            s_hist.append(s)
            y_hist.append(y)
            rho_hist.append(1.0 / sy)

        x, f, g = x_new, f_new, g_new
        gnorm = float(np.abs(g).max()) if g.size else 0.0
        iteration += 1
        trace.append((iteration, f, gnorm))
        if on_iteration is not None:
            on_iteration(iteration, f, gnorm)

    converged = gnorm < gtol
    return OptimizeResult(
        x=x,
        fun=f,
        grad=g,
        iterations=iteration,
        converged=converged,
        message="converged" if converged else message,
        trace=trace,
    )


def _evaluate(fun_and_grad: FunGrad, x: np.ndarray) -> tuple[float, np.ndarray]:
    f, g = fun_and_grad(x)
    f = float(f)
    g = np.asarray(g, dtype=np.float64)
    if not np.isfinite(f) or not np.isfinite(g).all():
        raise ValueError("objective or gradient is not finite")
    return f, g


def _search_direction(
    g: np.ndarray,
    s_hist: deque[np.ndarray],
    y_hist: deque[np.ndarray],
    rho_hist: deque[float],
) -> np.ndarray:
    """Two-loop recursion for the L-BFGS direction -H @ g."""
    q = g.copy()
    alphas: list[float] = []
    for s, y, rho in zip(reversed(s_hist), reversed(y_hist), reversed(rho_hist)):
        alpha = rho * float(s @ q)
        alphas.append(alpha)
        q -= alpha * y
    if y_hist:
        y_last = y_hist[-1]
        gamma = (1.0 / rho_hist[-1]) / float(y_last @ y_last)
        q *= gamma
    for (s, y, rho), alpha in zip(zip(s_hist, y_hist, rho_hist), reversed(alphas)):
        beta = rho * float(y @ q)
        q += (alpha - beta) * s
    return -q
