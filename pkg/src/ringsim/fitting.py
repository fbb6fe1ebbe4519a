"""Least-squares fits and analytic reference models.

The memory experiments summarize into per-cycle mean fidelities F(t_k).
The central fit is the two-parameter decay law

    F(t) = 1/2 + 1/2 * (1 - 2*eps)^(t - t0)

with ``eps`` the error rate per microsecond and ``t0`` a free time
offset absorbing constant prefactors (readout-window coherence loss,
preparation transients).  The fit is a damped Gauss-Newton iteration
with the analytic Jacobian, seeded by log-linear regression of 2F - 1.

The reference models are the unencoded single-qubit fidelity averaged
over the six cardinal states, and the probability that at least two of
N qubits fail, whose single free scale ``beta`` maps a relaxation time
onto a per-cycle error probability.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import circuits

CYCLE_US = circuits.CYCLE_NS / 1000.0


class FitError(RuntimeError):
    """Raised when an iterative fit fails to converge; carries residuals."""

    def __init__(self, message: str, residuals: np.ndarray | None = None):
        if residuals is not None:
            message += f" (residual norm {float(np.linalg.norm(residuals)):.3e})"
        super().__init__(message)
        self.residuals = residuals


@dataclass
class FitResult:
    epsilon: float           # error rate, fraction per microsecond
    t0: float                # microseconds
    covariance: np.ndarray   # 2x2, order (epsilon, t0)
    excluded_first_point: bool = False
    residuals: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def epsilon_stderr(self) -> float:
        return float(np.sqrt(max(self.covariance[0, 0], 0.0)))

    @property
    def t0_stderr(self) -> float:
        return float(np.sqrt(max(self.covariance[1, 1], 0.0)))

    def model(self, t) -> np.ndarray:
        return decay_model(np.asarray(t, dtype=float), self.epsilon, self.t0)


def decay_model(t, epsilon: float, t0: float):
    """F(t) = 1/2 + 1/2 (1 - 2 eps)^(t - t0)."""
    q = 1.0 - 2.0 * epsilon
    return 0.5 + 0.5 * np.power(q, np.asarray(t, dtype=float) - t0)


def fit_error_rate(times, fidelities, weights=None,
                   exclude_first: bool = False,
                   max_iter: int = 200, tol: float = 1e-12) -> FitResult:
    """Fit the decay law to per-time mean fidelities.

    ``weights`` are inverse-variance weights (1/stderr^2); when given,
    the covariance is the plain inverse of the weighted normal matrix,
    otherwise it is scaled by the reduced sum of squares.
    ``exclude_first`` drops the first point before fitting, for
    protocols whose opening cycle is a preparation transient rather
    than part of the decay.
    """
    t = np.asarray(times, dtype=float)
    f = np.asarray(fidelities, dtype=float)
    if t.shape != f.shape or t.ndim != 1:
        raise ValueError("times and fidelities must be matching 1-d arrays")
    w = None if weights is None else np.asarray(weights, dtype=float)
    if exclude_first:
        t, f = t[1:], f[1:]
        w = None if w is None else w[1:]
    if t.size < 3:
        raise ValueError("need at least 3 points to fit two parameters")
    if np.any(f < 0.45) or np.any(f > 1.0 + 1e-9):
        raise ValueError("fidelities outside [0.45, 1.0] cannot follow the model")
    if w is None:
        w = np.ones_like(f)

    # log-linear seed: ln(2F - 1) = (t - t0) ln(1 - 2 eps)
    y = np.log(np.clip(2.0 * f - 1.0, 1e-12, None))
    slope, intercept = np.polyfit(t, y, 1)
    if slope > -1e-14:
        # non-decaying data: the pure q = 1 model, where t0 is undetermined
        resid = f - 1.0
        return FitResult(0.0, 0.0, np.zeros((2, 2)), exclude_first, resid)
    eps = float(np.clip(0.5 * (1.0 - np.exp(slope)), 1e-12, 0.4999))
    t0 = float(-intercept / slope)

    lam = 1e-3
    cost = None
    for _ in range(max_iter):
        q = 1.0 - 2.0 * eps
        powq = np.power(q, t - t0)
        r = f - (0.5 + 0.5 * powq)
        new_cost = float(np.sum(w * r * r))
        if cost is not None and abs(cost - new_cost) <= tol * max(cost, 1e-30):
            cost = new_cost
            break
        cost = new_cost
        jac = np.empty((t.size, 2))
        jac[:, 0] = -(t - t0) * np.power(q, t - t0 - 1.0)   # dF/d eps
        jac[:, 1] = -0.5 * np.log(q) * powq                 # dF/d t0
        jtw = jac.T * w
        a = jtw @ jac
        g = jtw @ r
        stepped = False
        for _ in range(40):
            try:
                delta = np.linalg.solve(a + lam * np.diag(np.diag(a)), g)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            eps_n = float(np.clip(eps + delta[0], 1e-12, 0.4999))
            t0_n = float(t0 + delta[1])
            r_n = f - decay_model(t, eps_n, t0_n)
            if float(np.sum(w * r_n * r_n)) <= cost:
                eps, t0 = eps_n, t0_n
                lam = max(lam * 0.1, 1e-12)
                stepped = True
                break
            lam *= 10.0
        if not stepped:
            break
    else:
        raise FitError("error-rate fit did not converge", r)

    q = 1.0 - 2.0 * eps
    powq = np.power(q, t - t0)
    r = f - (0.5 + 0.5 * powq)
    jac = np.empty((t.size, 2))
    jac[:, 0] = -(t - t0) * np.power(q, t - t0 - 1.0)
    jac[:, 1] = -0.5 * np.log(q) * powq
    a = (jac.T * w) @ jac
    try:
        cov = np.linalg.inv(a)
    except np.linalg.LinAlgError:
        raise FitError("singular normal matrix in error-rate fit", r)
    if weights is None and t.size > 2:
        cov = cov * float(np.sum(r * r) / (t.size - 2))
    return FitResult(float(eps), float(t0), cov, exclude_first, r)


# ----------------------------------------------------------------------
# Reference models
# ----------------------------------------------------------------------

def single_qubit_fidelity(t, T1: float, T2: float):
    """Unencoded memory fidelity averaged over the six cardinal states."""
    t = np.asarray(t, dtype=float)
    return (1.0 + np.exp(-t / T1)) / 6.0 + (1.0 + np.exp(-t / T2)) / 3.0


def single_qubit_error_rate(T1: float) -> float:
    """Per-microsecond rate matching the decay law at T1 = T2.

    Equating the encoded and unencoded fidelity laws for T1 = T2 gives
    1 - 2 eps = e^(-1/T1), hence eps = (1 - e^(-1/T1)) / 2.
    """
    return 0.5 * (1.0 - np.exp(-1.0 / T1))


def half_survival_rate(T1: float) -> float:
    """Half the 1 microsecond survival probability, e^(-1/T1) / 2.

    An alternative convention for the physical reference rate; kept
    alongside :func:`single_qubit_error_rate` for comparison.
    """
    return 0.5 * np.exp(-1.0 / T1)


def weight2_probability(p, N: int):
    """Probability that at least two of N qubits fail.

    P = 1 - [(1-p)^N + N p (1-p)^(N-1)]; for small p the quadratic term
    N(N-1)/2 p^2 dominates.
    """
    p = np.asarray(p, dtype=float)
    if np.any(p < 0.0) or np.any(p > 1.0):
        raise ValueError("p must be a probability")
    if N < 1:
        raise ValueError("N must be at least 1")
    keep = np.power(1.0 - p, N)
    one = N * p * np.power(1.0 - p, N - 1)
    out = 1.0 - (keep + one)
    return out if out.ndim else float(out)


# per-cycle error probability as a function of the relaxation time:
# "survival" scales the surviving fraction, "decay" the decayed fraction
_P_FORMS = {
    "survival": lambda T1, beta: beta * np.exp(-CYCLE_US / np.asarray(T1, dtype=float)),
    "decay": lambda T1, beta: beta * (1.0 - np.exp(-CYCLE_US / np.asarray(T1, dtype=float))),
}


def fit_beta(T1_values, epsilon_values, p_form: str = "survival",
             N: int = 10) -> float:
    """One-parameter fit of the weight-2 model to an error-rate sweep.

    Minimizes the squared mismatch between the measured rates and
    P(p(T1; beta), N) over beta, with the per-cycle probability map
    chosen by ``p_form``.  Golden-section search over a bracketing
    interval; deterministic and derivative-free.
    """
    if p_form not in _P_FORMS:
        raise ValueError(f"unknown p_form {p_form!r}")
    T1 = np.asarray(T1_values, dtype=float)
    eps = np.asarray(epsilon_values, dtype=float)
    if T1.shape != eps.shape or T1.size < 3:
        raise ValueError("need matching sweeps of at least 3 points")
    pmap = _P_FORMS[p_form]

    def cost(beta):
        p = np.clip(pmap(T1, beta), 0.0, 1.0)
        return float(np.sum((eps - weight2_probability(p, N)) ** 2))

    grid = np.linspace(0.0, 2.0, 401)
    best = grid[int(np.argmin([cost(b) for b in grid]))]
    lo, hi = max(best - 0.01, 0.0), min(best + 0.01, 2.0)
    phi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - phi * (b - a), a + phi * (b - a)
    fc, fd = cost(c), cost(d)
    for _ in range(200):
        if b - a < 1e-12:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = cost(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = cost(d)
    else:
        raise FitError("beta fit did not converge")
    return float((a + b) / 2.0)
