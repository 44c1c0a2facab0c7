"""
Model: for V = 0 and n = 1 the Hopf-Cole formula is explicit:
       u^eps(x, t) = -eps log int (2 pi eps t)^{-1/2} exp(-phi(y) / eps) dy,
       phi(y) = (x - y)^2 / (2t) + g(y).
Purpose: Ground truth for the eps-solver: adaptive quadrature of the integral after shifting
         phi by its minimum (log-sum-exp), so nothing underflows as eps -> 0.
Dependencies: numpy, scipy.integrate (quad), scipy.optimize (minimize_scalar), core/hopflax.
Ext Hooks: N/A.
"""

import logging
import math
import warnings

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.optimize import minimize_scalar

from core.errors import InvariantViolation, QuadratureFailure
from core.hopflax import LipschitzData

logger = logging.getLogger(__name__)

# integrand below exp(-CUTOFF) relative to its peak is dropped
CUTOFF = 60.0
SCAN_POINTS = 4001


def _minimum(phi, x: float, t: float, L: float):
    reach = t * L + 1.0
    ys = np.linspace(x - reach, x + reach, SCAN_POINTS)
    values = phi(ys)
    i = int(np.argmin(values))
    step = ys[1] - ys[0]
    res = minimize_scalar(lambda y: float(phi(np.array([y]))[0]), bounds=(ys[i] - step, ys[i] + step),
                          method='bounded', options={'xatol': 1e-12})
    if res.success and res.fun < values[i]:
        return float(res.x), float(res.fun)
    return float(ys[i]), float(values[i])


def semianalytic_oracle_v0(g: LipschitzData, epsilon: float, x: float, t: float) -> float:
    """u^eps(x, t) for V = 0, n = 1."""
    if g.dim != 1:
        raise InvariantViolation("The quadrature oracle is one-dimensional")
    if not 0 < epsilon <= 1 or t <= 0:
        raise InvariantViolation(f"Need eps in (0, 1] and t > 0, got eps={epsilon}, t={t}")
    x = float(np.asarray(x, dtype=float).reshape(-1)[0])

    def phi(y):
        y = np.asarray(y, dtype=float)
        return (x - y) ** 2 / (2 * t) + g(y.reshape(-1, 1))

    L = g.lipschitz_bound
    y_star, phi_min = _minimum(phi, x, t, L)
    # phi(y) - phi_min >= |x - y|^2 / 2t - L |x - y| + g(x) - phi_min
    slack = 2 * t * max(CUTOFF * epsilon + phi_min - g.at(np.array([[x]])), 0.0)
    radius = t * L + math.sqrt((t * L) ** 2 + slack) + 1e-6
    lo, hi = x - radius, x + radius

    def integrand(y):
        return math.exp(-(float(phi(np.array([y]))[0]) - phi_min) / epsilon)

    breaks = sorted({min(max(v, lo), hi) for v in (y_star, x, 0.0)} - {lo, hi})
    with warnings.catch_warnings():
        warnings.simplefilter('error', IntegrationWarning)
        try:
            value, abserr = quad(integrand, lo, hi, points=breaks or None, limit=500, epsabs=0.0, epsrel=1e-12)
        except IntegrationWarning as e:
            raise QuadratureFailure(f"Quadrature did not converge at eps={epsilon}: {e}") from e
    if not np.isfinite(value) or value <= 0.0 or abserr > 1e-9 * value:
        raise QuadratureFailure(f"Quadrature unreliable at eps={epsilon}: value {value}, error {abserr}")
    u = phi_min - epsilon * math.log(value) + 0.5 * epsilon * math.log(2 * math.pi * epsilon * t)
    logger.debug("Oracle eps=%g x=%g t=%g: phi_min=%.15g at %.6g, u=%.15g", epsilon, x, t, phi_min, y_star, u)
    return u
