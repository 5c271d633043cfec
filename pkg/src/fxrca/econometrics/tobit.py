"""Two-sided censored-normal (Tobit) maximum likelihood.

The latent outcome is linear with normal errors; observations at or below
the lower limit and at or above the upper limit contribute censored
likelihood terms. The scale is parameterized as log sigma so the search
is unconstrained, and the likelihood and its analytic gradient are
maximized by BFGS with a backtracking (Armijo) line search capped at 200
iterations with gradient tolerance 1e-8. Because the objective only
resolves to about |f| * 1e-16 in double precision, the search also stops
(and counts as converged) once accepted steps stop improving it, or when
no descent direction remains and the gradient is stationary relative to
the objective's scale.

Per-observation log likelihood, with z = (y - x'b) / sigma:
    uncensored:      -log sigma - z^2 / 2 - log(2 pi) / 2
    at lower limit:  log Phi((lower - x'b) / sigma)
    at upper limit:  log Phi((x'b - upper) / sigma)

Gradients use the inverse Mills ratio lambda(a) = phi(a) / Phi(a),
evaluated in log space for stability far in the tails.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import log_ndtr

from fxrca.errors import ComputationError, ConfigError
from fxrca.econometrics.base import RegressionFit, solve_least_squares

__all__ = ["tobit_mle", "tobit_negll_grad"]

_LOG_2PI = math.log(2.0 * math.pi)


def _mills(a: np.ndarray) -> np.ndarray:
    # phi(a) / Phi(a) without underflow: exp(log phi - log Phi).
    log_pdf = -0.5 * a * a - 0.5 * _LOG_2PI
    return np.exp(log_pdf - log_ndtr(a))


def tobit_negll_grad(
    theta: np.ndarray,
    y: np.ndarray,
    X: np.ndarray,
    lower: float,
    upper: float,
) -> tuple[float, np.ndarray]:
    """Negative log likelihood and its gradient in (beta, log sigma)."""
    beta, log_sigma = theta[:-1], theta[-1]
    if not np.isfinite(log_sigma) or log_sigma > 700.0:
        # off the representable scale; report +inf so line searches back off
        return math.inf, np.zeros(theta.size)
    sigma = math.exp(log_sigma)
    xb = X @ beta
    left = y <= lower
    right = y >= upper
    mid = ~(left | right)

    ll = 0.0
    grad_beta = np.zeros(X.shape[1])
    grad_ls = 0.0

    # far-off trial points legitimately produce inf/nan here; callers
    # reject non-finite objectives, so silence the intermediate warnings
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        if mid.any():
            z = (y[mid] - xb[mid]) / sigma
            ll += float(np.sum(-log_sigma - 0.5 * z * z - 0.5 * _LOG_2PI))
            grad_beta += X[mid].T @ z / sigma
            grad_ls += float(np.sum(z * z - 1.0))
        if left.any():
            a = (lower - xb[left]) / sigma
            ll += float(np.sum(log_ndtr(a)))
            lam = _mills(a)
            grad_beta += X[left].T @ (-lam / sigma)
            grad_ls += float(np.sum(-a * lam))
        if right.any():
            b = (xb[right] - upper) / sigma
            ll += float(np.sum(log_ndtr(b)))
            lam = _mills(b)
            grad_beta += X[right].T @ (lam / sigma)
            grad_ls += float(np.sum(-b * lam))

    grad = np.append(grad_beta, grad_ls)
    return -ll, -grad


def _bfgs(fun_grad, x0: np.ndarray, max_iter: int, gtol: float):
    """Quasi-Newton minimizer with Armijo backtracking.

    Returns (x, f, grad, n_iter, converged, f_history) where f_history
    records the objective at every accepted iterate. Convergence means
    one of: gradient inf-norm below gtol; an accepted step improving the
    objective by less than its double-precision resolution; or line-search
    exhaustion at a point whose gradient is stationary relative to the
    objective's scale.
    """
    x = np.asarray(x0, dtype=float).copy()
    k = x.size
    H = np.eye(k)
    f, g = fun_grad(x)
    history = [f]
    converged = bool(np.linalg.norm(g, ord=np.inf) < gtol)
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        if converged:
            n_iter -= 1
            break
        d = -H @ g
        slope = float(d @ g)
        if slope >= 0.0:  # stale curvature; restart from steepest descent
            H = np.eye(k)
            d = -g
            slope = float(d @ g)
        step = 1.0
        f_new, g_new, x_new = f, g, x
        armijo = False
        for _ in range(60):
            x_try = x + step * d
            f_try, g_try = fun_grad(x_try)
            if np.isfinite(f_try) and f_try <= f + 1e-4 * step * slope:
                f_new, g_new, x_new = f_try, g_try, x_try
                armijo = True
                break
            step *= 0.5
        scale = max(1.0, abs(f))
        if not armijo:
            # no descent left at machine precision: stationary if the
            # gradient is negligible against the objective's magnitude
            converged = bool(np.linalg.norm(g, ord=np.inf) <= 1e-5 * scale)
            break
        s = x_new - x
        yk = g_new - g
        sy = float(s @ yk)
        if sy > 1e-12 * float(np.linalg.norm(s) * np.linalg.norm(yk) + 1e-300):
            rho = 1.0 / sy
            I = np.eye(k)
            V = I - rho * np.outer(s, yk)
            H = V @ H @ V.T + rho * np.outer(s, s)
        stalled = (f - f_new) <= 1e-12 * scale
        x, f, g = x_new, f_new, g_new
        history.append(f)
        converged = bool(
            np.linalg.norm(g, ord=np.inf) < gtol
            or (stalled and np.linalg.norm(g, ord=np.inf) <= 1e-5 * scale)
        )
    return x, f, g, n_iter, converged, history


def _fd_hessian(fun_grad, x: np.ndarray) -> np.ndarray:
    # Central differences of the analytic gradient; symmetrized.
    k = x.size
    H = np.empty((k, k))
    for j in range(k):
        h = 1e-5 * max(1.0, abs(x[j]))
        xp, xm = x.copy(), x.copy()
        xp[j] += h
        xm[j] -= h
        _, gp = fun_grad(xp)
        _, gm = fun_grad(xm)
        H[:, j] = (gp - gm) / (2.0 * h)
    return 0.5 * (H + H.T)


def tobit_mle(
    y,
    X,
    names,
    lower: float = 0.0,
    upper: float = 2.0,
    max_iter: int = 200,
    gtol: float = 1e-8,
) -> RegressionFit:
    """Fit the two-sided Tobit model by maximum likelihood.

    Standard errors come from the observed information (finite-difference
    Hessian of the analytic gradient at the optimum); the scale estimate
    is reported as an extra ``sigma`` term with a delta-method standard
    error. With no censored observations the estimates collapse to OLS.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    names = list(names)
    if lower >= upper:
        raise ConfigError(f"lower limit must be below upper limit, got ({lower}, {upper})")
    n, k = X.shape
    if n <= k + 1:
        raise ComputationError(f"not enough observations: n={n}, parameters={k + 1}")
    left = y <= lower
    right = y >= upper
    mid = ~(left | right)
    if not mid.any():
        raise ComputationError("every observation is censored; slopes are not identified")

    start_rows = mid if int(mid.sum()) > k else np.ones(n, dtype=bool)
    beta0, _ = solve_least_squares(X[start_rows], y[start_rows], names)
    resid0 = y[start_rows] - X[start_rows] @ beta0
    sigma0 = max(float(np.std(resid0, ddof=1)) if resid0.size > 1 else 1.0, 1e-3)
    theta0 = np.append(beta0, math.log(sigma0))

    def fun_grad(theta):
        return tobit_negll_grad(theta, y, X, lower, upper)

    theta, neg_ll, grad, n_iter, converged, history = _bfgs(fun_grad, theta0, max_iter, gtol)

    hess = _fd_hessian(fun_grad, theta)
    try:
        cov = np.linalg.inv(hess)
    except np.linalg.LinAlgError:
        cov = np.linalg.pinv(hess)
    se_all = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    sigma = math.exp(theta[-1])

    coefficients = dict(zip(names, map(float, theta[:-1])))
    std_errors = dict(zip(names, map(float, se_all[:-1])))
    coefficients["sigma"] = sigma
    std_errors["sigma"] = float(se_all[-1] * sigma)  # delta method from log sigma

    return RegressionFit(
        estimator="tobit",
        coefficients=coefficients,
        std_errors=std_errors,
        n_obs=n,
        df_resid=n - k - 1,
        r_squared=float("nan"),
        log_likelihood=-neg_ll,
        converged=converged,
        info={
            "n_left_censored": int(left.sum()),
            "n_right_censored": int(right.sum()),
            "n_uncensored": int(mid.sum()),
            "n_iterations": int(n_iter),
            "gradient_norm": float(np.linalg.norm(grad, ord=np.inf)),
            "ll_path": [-v for v in history],
            "lower": float(lower),
            "upper": float(upper),
            "se_type": "observed_information",
        },
    )
