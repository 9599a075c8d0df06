from __future__ import annotations

import numpy as np

from .errors import NoConvergence, OrderingViolated


def fd_jacobian(fun, x, rel_step=1e-7, central=True):
    x = np.asarray(x, dtype=float)
    f0 = None if central else np.asarray(fun(x))
    cols = []
    for i in range(x.size):
        h = rel_step * max(1.0, abs(x[i]))
        xp = x.copy()
        xp[i] += h
        if central:
            xm = x.copy()
            xm[i] -= h
            cols.append((np.asarray(fun(xp)) - np.asarray(fun(xm))) / (2 * h))
        else:
            cols.append((np.asarray(fun(xp)) - f0) / h)
    return np.column_stack(cols)


def damped_newton(fun, x0, admissible=None, tol=1e-12, maxiter=50, max_halvings=8, floor=1e-10):
    """Newton iteration with step halving and a central-difference Jacobian.

    Returns ``(x, iterations)``.  ``admissible(x)`` guards the iterates.  A
    residual below ``floor`` that no step can reduce is accepted as the
    round-off limit.
    """
    x = np.asarray(x0, dtype=float).copy()
    r = np.asarray(fun(x))
    for it in range(maxiter + 1):
        if not np.all(np.isfinite(r)):
            raise NoConvergence("non-finite residual")
        if np.max(np.abs(r)) < tol:
            return x, it
        if it == maxiter:
            break
        J = fd_jacobian(fun, x)
        try:
            dx = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError as exc:
            raise NoConvergence("singular Jacobian") from exc
        norm0 = np.linalg.norm(r)
        any_admissible = False
        lam = 1.0
        for _ in range(max_halvings + 1):
            trial = x + lam * dx
            if admissible is None or admissible(trial):
                any_admissible = True
                r_trial = np.asarray(fun(trial))
                if np.all(np.isfinite(r_trial)) and np.linalg.norm(r_trial) < norm0:
                    x, r = trial, r_trial
                    break
            lam *= 0.5
        else:
            if np.max(np.abs(r)) < floor:
                return x, it
            if not any_admissible:
                raise OrderingViolated(f"iterate left the admissible region at step {it}")
            raise NoConvergence(f"no residual decrease at step {it} (|r|={norm0:.3e})")
    raise NoConvergence(f"residual {np.max(np.abs(r)):.3e} after {maxiter} iterations")
