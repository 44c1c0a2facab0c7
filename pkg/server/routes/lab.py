"""
Model: N/A (transport).
Purpose: JSON endpoints for the cell problem, the effective Lagrangian, Hopf-Lax values with their
         quadratic-growth diagnostic and effective diffusion of a drift. Bad input (including data
         without quadratic growth) answers 400, a failed solve 422.
Dependencies: flask, server/models.py, core/*, utils/serialization.py.
Ext Hooks: Long-running sweeps stay on the CLI; add routes here only for sub-second solves.
"""
import logging

from flask import Blueprint, jsonify, request

from core.bloch import effective_diffusion, load_drift
from core.cell import load_potential, residuals, solve_cell
from core.errors import SolverFailure
from core.hopflax import load_data, quad_growth_diag
from core.legendre import HamiltonianModel, legendre
from server.models import BlochRequest, CellRequest, HopfLaxRequest, LagrangianRequest
from utils.serialization import to_plain

logger = logging.getLogger(__name__)

bp = Blueprint('lab', __name__)


@bp.errorhandler(ValueError)
def handle_invalid(e):
    # InvariantViolation is a ValueError
    return jsonify({"error": str(e), "kind": type(e).__name__}), 400


@bp.errorhandler(SolverFailure)
def handle_solver_failure(e):
    logger.warning("Solver failure on %s: %s", request.path, e)
    return jsonify({"error": str(e), "kind": type(e).__name__}), 422


def _model(req):
    return HamiltonianModel(load_potential(req.potential, req.dim, req.n), req.n)


@bp.route("/api/cell", methods=["POST"])
def handle_cell():
    req = CellRequest.from_json(request.get_json(silent=True))
    sol = solve_cell(load_potential(req.potential, req.dim, req.n), req.p, req.n)
    return jsonify(to_plain({'p': sol.p, 'hbar': sol.hbar, 'e_p': sol.e_p, 'N': sol.resolution,
                             'residuals': residuals(sol)}))


@bp.route("/api/lagrangian", methods=["POST"])
def handle_lagrangian():
    req = LagrangianRequest.from_json(request.get_json(silent=True))
    value = legendre(_model(req), req.q)
    return jsonify(to_plain({'q': value.q, 'lbar': value.lbar, 'p_of_q': value.p_of_q,
                             'dual_gap': value.dual_gap}))


@bp.route("/api/hopflax", methods=["POST"])
def handle_hopflax():
    req = HopfLaxRequest.from_json(request.get_json(silent=True))
    growth = quad_growth_diag(load_data(req.data, req.dim), _model(req), req.x, req.t)
    return jsonify(to_plain({'value': growth.value, 'minimizer': growth.minimizer, 'delta': growth.delta,
                             'r': growth.r}))


@bp.route("/api/bloch", methods=["POST"])
def handle_bloch():
    req = BlochRequest.from_json(request.get_json(silent=True))
    V = load_potential(req.potential, req.dim, req.n) if req.potential else None
    ed = effective_diffusion(load_drift(req.drift, req.dim, req.n, V), req.n)
    return jsonify(to_plain(ed.summary()))
