"""
Model: |u^eps(x, t) - u(x, t)| <= eps (C + n/2 log(max{t, eps} / eps)).
Purpose: eps-sweeps: u by Hopf-Lax, u^eps by the Hopf-Cole solver (or the quadrature oracle for
         V = 0, n = 1), errors aggregated over the evaluation set, the rate model fitted by least
         squares, and the envelope checked with a constant fitted on the coarse half of the sweep.
Dependencies: numpy, scipy (via the solvers), harness/scheduler.py, harness/report.py, core/*.
Ext Hooks: N/A.
"""

import logging
import math
from dataclasses import dataclass
from importlib import metadata
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy

from core.cell import load_potential
from core.errors import ConfigError
from core.hopflax import load_data, solve
from core.legendre import HamiltonianModel
from core.viscous import EpsProblem, solve_eps
from harness.config import ExperimentConfig
from harness.oracle import semianalytic_oracle_v0
from harness.report import RateReport, emit_report
from harness.scheduler import Scheduler

logger = logging.getLogger(__name__)

PACKAGE = 'homog-lab'


@dataclass(frozen=True)
class RateFit:
    a: float
    b: float
    residual: float


def fit_rate(epsilons: Sequence[float], errors: Sequence[float]) -> Optional[RateFit]:
    """Least squares for e = eps (a + b log(1/eps)) with weights 1/eps^2, i.e. ordinary least
    squares of e/eps against log(1/eps). The residual is the RMS of e - model."""
    eps = np.asarray(epsilons, dtype=float)
    err = np.asarray(errors, dtype=float)
    if eps.size < 2 or np.unique(eps).size < 2:
        return None
    logs = np.log(1.0 / eps)
    A = np.stack([np.ones_like(logs), logs], axis=1)
    (a, b), *_ = np.linalg.lstsq(A, err / eps, rcond=None)
    model = eps * (a + b * logs)
    residual = float(np.sqrt(np.mean((err - model) ** 2)))
    return RateFit(float(a), float(b), residual)


def versions() -> Dict[str, str]:
    try:
        package = metadata.version(PACKAGE)
    except metadata.PackageNotFoundError:
        package = 'source'
    return {'numpy': np.__version__, 'scipy': scipy.__version__, PACKAGE: package}


def manifest(config: ExperimentConfig) -> dict:
    return {
        'config': config.to_dict(),
        'config_hash': config.config_hash(),
        'versions': versions(),
        'seed': config.seed,
    }


@dataclass
class Measurement:
    """Errors |u^eps - u| indexed [eps, time, point], with whatever failed along the way."""
    errors: np.ndarray
    failures: Dict[Tuple, Exception]

    def complete(self, i: int) -> bool:
        return not np.isnan(self.errors[i]).any()

    def first_failure(self) -> Optional[Exception]:
        return next(iter(self.failures.values()), None)


def _viscous(config: ExperimentConfig, potential, data, epsilon: float, t: float,
             points: np.ndarray) -> np.ndarray:
    if config.reference == 'quadrature':
        return np.array([semianalytic_oracle_v0(data, epsilon, x[0], t) for x in points])
    problem = EpsProblem.auto(potential, data, epsilon, t, points, config.points_per_period)
    return solve_eps(problem, points)


def _measure(config: ExperimentConfig) -> Measurement:
    potential = load_potential(config.potential, config.dim, config.cell_points)
    data = load_data(config.data, config.dim)
    model = HamiltonianModel(potential, config.cell_points)
    points = np.array(config.points, dtype=float)
    shape = (len(config.epsilons), len(config.times), len(points))
    errors = np.full(shape, np.nan)

    scheduler = Scheduler(config.workers)
    for j, t in enumerate(config.times):
        for k, x in enumerate(points):
            scheduler.schedule((j, k), lambda x=x, t=t: solve(data, model, x, t).value)
    limits, failures = scheduler.run()
    if failures:
        return Measurement(errors, failures)

    # one box evolution serves every evaluation point at a given (eps, t)
    for i, eps in enumerate(config.epsilons):
        for j, t in enumerate(config.times):
            scheduler.schedule((i, j), _viscous, config, potential, data, eps, t, points)
    viscous, failures = scheduler.run()
    for (i, j), values in viscous.items():
        u = np.array([limits[(j, k)] for k in range(len(points))])
        errors[i, j] = np.abs(values - u)
        logger.debug("eps=%g t=%g: errors %s", config.epsilons[i], config.times[j], errors[i, j])
    return Measurement(errors, failures)


def _pointwise(config: ExperimentConfig, errors: np.ndarray, rows: int) -> List[dict]:
    series = []
    for j, t in enumerate(config.times):
        for k, x in enumerate(config.points):
            series.append({'point': list(x), 'time': t, 'errors': [float(e) for e in errors[:rows, j, k]]})
    return series


def rate_sweep(config: ExperimentConfig, write: bool = True) -> RateReport:
    """Sweep eps, fit the rate model on the sup errors, and write the report.

    On a solver failure the eps values measured so far still go out as a partial report before the
    failure propagates.
    """
    logger.info("Rate sweep '%s': %d eps values, %s reference, %s mode", config.name, len(config.epsilons),
                config.reference, config.mode)
    measured = _measure(config)
    # the longest fully measured prefix of the eps list
    rows = next((i for i in range(len(config.epsilons)) if not measured.complete(i)), len(config.epsilons))
    epsilons = list(config.epsilons[:rows])
    sup = [float(measured.errors[i].max()) for i in range(rows)]
    fit = fit_rate(epsilons, sup)
    failure = measured.first_failure()
    report = RateReport(
        name=config.name,
        epsilons=epsilons,
        errors=sup,
        a=fit.a if fit else None,
        b=fit.b if fit else None,
        residual=fit.residual if fit else None,
        pointwise=_pointwise(config, measured.errors, rows) if config.mode == 'pointwise' else [],
        mode=config.mode,
        reference=config.reference,
        manifest=manifest(config),
        partial=failure is not None,
        failure=f"{type(failure).__name__}: {failure}" if failure else None,
    )
    if fit:
        logger.info("Rate fit '%s': a=%.6g b=%.6g residual=%.3e", config.name, fit.a, fit.b, fit.residual)
    if write:
        emit_report(report, config.resolved_output_dir())
    if failure is not None:
        raise failure
    return report


@dataclass(frozen=True)
class EnvelopeResult:
    passed: bool
    margin: float
    c_hat: float
    rows: List[dict]


def envelope_bound(c_hat: float, epsilon: float, t: float, dim: int) -> float:
    return epsilon * (c_hat + 0.5 * dim * math.log(max(t, epsilon) / epsilon))


def envelope_check(config: ExperimentConfig) -> EnvelopeResult:
    """e(eps, t) <= eps (C + n/2 log(max{t, eps}/eps)) with C fitted on the coarse half of the eps list
    and tested on the fine half; the margin is the smallest slack over the fine half."""
    k = len(config.epsilons)
    if k < 2:
        raise ConfigError("envelope_check needs at least two eps values")
    measured = _measure(config)
    failure = measured.first_failure()
    if failure is not None:
        raise failure
    sup = measured.errors.max(axis=2)
    half = k // 2
    dim = config.dim
    c_hat = 0.0
    for i in range(half):
        eps = config.epsilons[i]
        for j, t in enumerate(config.times):
            c_hat = max(c_hat, sup[i, j] / eps - 0.5 * dim * math.log(max(t, eps) / eps))

    rows, margin = [], math.inf
    for i, eps in enumerate(config.epsilons):
        for j, t in enumerate(config.times):
            bound = envelope_bound(c_hat, eps, t, dim)
            slack = bound - float(sup[i, j])
            role = 'fit' if i < half else 'test'
            rows.append({'epsilon': eps, 'time': t, 'error': float(sup[i, j]), 'bound': bound,
                         'margin': slack, 'role': role})
            if role == 'test':
                margin = min(margin, slack)
    result = EnvelopeResult(margin >= 0.0, margin, c_hat, rows)
    logger.info("Envelope '%s': C_hat=%.6g margin=%.3e (%s)", config.name, c_hat, margin,
                "pass" if result.passed else "FAIL")
    return result
