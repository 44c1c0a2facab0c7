"""
Model: N/A (entry point).
Purpose: Command line for every module: one subcommand per operation, JSON on stdout (a CSV table
         for lagrangian), field and report files on request. Exit codes: 0 success, 2 solver failure,
         3 invariant violation.
Dependencies: argparse, core/*, harness/*, server (serve), utils/serialization.py.
Ext Hooks: New subcommands register in build_parser() with a handler taking the parsed namespace.
"""

import argparse
import logging
import sys
from typing import List, Optional

import numpy as np

from core.bloch import effective_diffusion, load_drift
from core.cell import load_potential, residuals, solve_cell
from core.config import BLOCH_DEFAULT_POINTS, CELL_DEFAULT_POINTS, LOG_FORMAT, LOG_LEVEL, POINTS_PER_PERIOD
from core.errors import HomogenizationError, InvariantViolation, IoFailure
from core.hopflax import load_data, quad_growth_diag
from core.legendre import HamiltonianModel, legendre
from core.torus import write_field
from core.viscous import (EpsProblem, ballistic_band, doob_kernel, schrodinger_kernel, solve_eps,
                          solve_eps_fd)
from harness.config import load_config, parse_grid
from harness.report import save_table, write_table
from harness.sweep import envelope_check, rate_sweep
from utils.serialization import pretty_json

logger = logging.getLogger(__name__)


def _vector(text: str) -> List[float]:
    """'0.5' or '0.5,-1' to a list of floats."""
    try:
        return [float(v) for v in text.split(',')]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Expected comma-separated numbers, got '{text}'")


def _emit(payload) -> None:
    sys.stdout.write(pretty_json(payload))


def _potential(args):
    return load_potential(args.potential, args.dim, args.n)


def cmd_cell(args) -> None:
    sol = solve_cell(_potential(args), args.p, args.n)
    if args.out:
        write_field(args.out + '_v', sol.v)
        write_field(args.out + '_pi', sol.pi)
    _emit({'p': sol.p, 'hbar': sol.hbar, 'e_p': sol.e_p, 'N': sol.resolution, 'residuals': residuals(sol)})


def _columns(name: str, dim: int) -> List[str]:
    return [name] if dim == 1 else [f"{name}_{j}" for j in range(dim)]


def cmd_lagrangian(args) -> None:
    model = HamiltonianModel(_potential(args), args.n)
    columns = _columns('q', args.dim) + ['lbar'] + _columns('p_of_q', args.dim) + ['dual_gap']
    rows = []
    for q in parse_grid(args.q_grid, args.dim):
        value = legendre(model, q)
        rows.append([*value.q, value.lbar, *value.p_of_q, value.dual_gap])
    if args.out:
        save_table(args.out, columns, rows)
    else:
        write_table(sys.stdout, columns, rows)


def cmd_hopflax(args) -> None:
    model = HamiltonianModel(_potential(args), args.n)
    growth = quad_growth_diag(load_data(args.data, args.dim), model, args.x, args.t)
    _emit({'value': growth.value, 'minimizer': growth.minimizer, 'delta': growth.delta, 'r': growth.r})


def cmd_solve_eps(args) -> None:
    data = load_data(args.data, args.dim)
    point = np.asarray(args.x, dtype=float).reshape(1, args.dim)
    problem = EpsProblem.auto(_potential(args), data, args.eps, args.t, point, args.points_per_period)
    value = solve_eps_fd(problem, point) if args.fd else solve_eps(problem, point)
    _emit({'x': args.x, 't': args.t, 'epsilon': args.eps, 'method': 'fd' if args.fd else 'hopf-cole',
           'value': float(value[0])})


def cmd_kernel(args) -> None:
    V = _potential(args)
    if args.kind == 'doob':
        if args.p is None:
            raise InvariantViolation("--kind doob needs --p")
        kernel = doob_kernel(solve_cell(V, args.p, args.n), args.t, args.x)
    else:
        kernel = schrodinger_kernel(V, args.t, args.x)
    if args.out:
        try:
            np.savetxt(args.out + '.csv', kernel.profile.ravel(), fmt='%.17g')
            with open(args.out + '.json', 'w') as f:
                f.write(pretty_json(kernel.metadata()))
        except OSError as e:
            raise IoFailure(f"Cannot write kernel {args.out}: {e}") from e
    _emit(dict(kernel.metadata(), mass=kernel.mass()))


def cmd_ballistic(args) -> None:
    V = _potential(args)
    band = ballistic_band(V, HamiltonianModel(V, args.n), args.q, args.times, method=args.method)
    _emit({'q': band.q, 'times': band.times, 'series': band.series, 'ratio': band.ratio, 'method': band.method})


def cmd_bloch(args) -> None:
    V = load_potential(args.potential, args.dim, args.n) if args.potential else None
    drift = load_drift(args.drift, args.dim, args.n, V)
    ed = effective_diffusion(drift, args.n)
    if args.out:
        write_field(args.out + '_m', ed.m)
        for j, chi in enumerate(ed.chi):
            write_field(f"{args.out}_chi_{j}", chi)
    _emit(ed.summary())


def cmd_rate(args) -> None:
    report = rate_sweep(load_config(args.config))
    _emit({'name': report.name, 'a': report.a, 'b': report.b, 'residual': report.residual,
           'epsilons': report.epsilons, 'errors': report.errors})


def cmd_envelope(args) -> None:
    result = envelope_check(load_config(args.config))
    _emit({'passed': result.passed, 'margin': result.margin, 'c_hat': result.c_hat, 'rows': result.rows})
    if not result.passed:
        raise InvariantViolation(f"Envelope violated by {-result.margin:.3e}")


def cmd_serve(args) -> None:
    from server.app import create_app
    create_app().run(host=args.host, port=args.port, debug=args.debug)


def _model_options(parser, default_n: int = CELL_DEFAULT_POINTS) -> None:
    parser.add_argument('--potential', default='cosine',
                        help="zero | cosine | constant:c | random-trig:seed | field stem")
    parser.add_argument('--dim', type=int, default=1, choices=(1, 2))
    parser.add_argument('--n', type=int, default=default_n, help="torus points per axis")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='homog', description="Periodic homogenization numerical lab.")
    parser.add_argument('--verbose', '-v', action='store_true', help="debug logging")
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('cell', help="solve the cell problem at p")
    _model_options(p)
    p.add_argument('--p', type=_vector, required=True)
    p.add_argument('--out', help="stem for the v and pi field files")
    p.set_defaults(handler=cmd_cell)

    p = sub.add_parser('lagrangian', help="effective Lagrangian on a grid of q (CSV)")
    _model_options(p)
    p.add_argument('--q-grid', required=True, help="start:stop:count or a,b,c per axis, axes joined by ';'")
    p.add_argument('--out', help="CSV file instead of stdout")
    p.set_defaults(handler=cmd_lagrangian)

    p = sub.add_parser('hopflax', help="homogenized solution u(x, t) and its quadratic growth")
    _model_options(p)
    p.add_argument('--g', '--data', dest='data', default='capped-norm', help="builtin data or a CSV of x,g")
    p.add_argument('--x', type=_vector, required=True)
    p.add_argument('--t', type=float, required=True)
    p.set_defaults(handler=cmd_hopflax)

    p = sub.add_parser('solve-eps', help="viscous solution u^eps(x, t)")
    _model_options(p)
    p.add_argument('--data', default='capped-norm')
    p.add_argument('--eps', type=float, required=True)
    p.add_argument('--x', type=_vector, required=True)
    p.add_argument('--t', type=float, required=True)
    p.add_argument('--points-per-period', type=int, default=POINTS_PER_PERIOD)
    p.add_argument('--fd', action='store_true', help="finite-difference cross-check solver")
    p.set_defaults(handler=cmd_solve_eps)

    p = sub.add_parser('kernel', help="Schrodinger or Doob-transformed kernel from x")
    _model_options(p)
    p.add_argument('--kind', choices=('schrodinger', 'doob'), default='schrodinger')
    p.add_argument('--p', type=_vector, help="momentum of the Doob transform")
    p.add_argument('--x', type=_vector, default=[0.0])
    p.add_argument('--t', type=float, required=True)
    p.add_argument('--out', help="stem for the profile (csv) and its box (json)")
    p.set_defaults(handler=cmd_kernel)

    p = sub.add_parser('ballistic', help="ballistic band along the ray -q t")
    _model_options(p)
    p.add_argument('--q', type=_vector, required=True)
    p.add_argument('--times', type=_vector, default=[5.0, 10.0, 20.0, 40.0])
    p.add_argument('--method', choices=('doob', 'schrodinger'), default='doob')
    p.set_defaults(handler=cmd_ballistic)

    p = sub.add_parser('bloch', help="invariant density, correctors and effective diffusion of a drift")
    p.add_argument('--drift', default='sine', help="zero | constant:c | sine | doob:p | vector field stem")
    p.add_argument('--potential', help="potential behind a doob:p drift")
    p.add_argument('--dim', type=int, default=1, choices=(1, 2))
    p.add_argument('--n', type=int, default=BLOCH_DEFAULT_POINTS)
    p.add_argument('--out', help="stem for the m and chi field files")
    p.set_defaults(handler=cmd_bloch)

    for name, handler, text in (('rate', cmd_rate, "eps-sweep and rate fit"),
                                ('envelope', cmd_envelope, "rate envelope on the fine half of the sweep")):
        p = sub.add_parser(name, help=text)
        p.add_argument('--config', required=True, help="YAML/JSON experiment file or builtin:<name>")
        p.set_defaults(handler=handler)

    p = sub.add_parser('serve', help="JSON API")
    p.add_argument('--host', default='127.0.0.1')
    p.add_argument('--port', type=int, default=5000)
    p.add_argument('--debug', action='store_true')
    p.set_defaults(handler=cmd_serve)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else LOG_LEVEL, format=LOG_FORMAT)
    try:
        args.handler(args)
    except HomogenizationError as e:
        logger.error("%s: %s", type(e).__name__, e)
        return e.exit_code
    except ValueError as e:
        logger.error("Invalid input: %s", e)
        return InvariantViolation.exit_code
    return 0
