"""Collocation assembly and solution for differential problems.

A problem couples a residual expression (the differential operator applied
to ``u``), a right-hand side, and endpoint conditions per dimension.  On a
tensor grid of ``prod (N_i + 1)`` unknown nodal values the assembled system
has exactly that many equations:

- interior rows: operator minus right-hand side at the grid of interior
  collocation nodes (per dimension, the ``v1`` leading and ``v2`` trailing
  nodes are dropped),
- condition rows: endpoint derivative values minus the condition data,
  with every dropped node index backing exactly one condition row.

A grid point whose index is dropped in several dimensions gets its row from
the lowest such dimension, which keeps the count exact; the other
dimensions sample their conditions only over index ranges not already
claimed.  Derivatives are always applied through the operational matrices,
so the system is algebraic in the nodal values.

Row order: all interior rows (C-order), then face-``a`` rows
("initial"), then face-``b`` rows ("boundary"), each condition block
ordered by dimension, then by condition derivative order, then C-order
over the sampled indices.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

import numpy as np

from . import exprlang
from .basis import DlfBasis, NodeSet, generate_nodes, make_psi_family, validate_basis
from .diffmat import dm_matrix
from .errors import (
    AssemblyError,
    InvalidParameterError,
    NewtonError,
    SingularSystemError,
)
from .interp import Interpolant, TensorInterpolant

__all__ = [
    "CollocationProblem",
    "CollocationSystem",
    "SolveOptions",
    "SolveResult",
    "assemble_collocation_1d",
    "assemble_collocation_nd",
    "solve_system",
    "problem_from_config",
    "bases_from_config",
    "load_config",
    "solve_config",
]

_DU_RE = re.compile(r"^d(\d*)u$")

_ENDPOINT_TOL = 1e-12


def _deriv_orders_from_name(name: str, dim: int):
    """Map a residual symbol to its per-dimension derivative orders.

    Returns a tuple of ``dim`` integers, or ``None`` when the symbol is not
    a ``u``-symbol.  One-dimensional problems use ``u, du, d2u, ...``;
    multi-dimensional problems use ``u`` and ``u_k1,...,kp``.
    """
    if name == "u":
        return (0,) * dim
    m = _DU_RE.match(name)
    if m is not None:
        if dim != 1:
            raise InvalidParameterError(
                f"symbol {name!r} is one-dimensional; use u_k1,...,kp for {dim} dimensions"
            )
        return (int(m.group(1) or 1),)
    if name.startswith("u_"):
        try:
            orders = tuple(int(tok) for tok in name[2:].split(","))
        except ValueError:
            return None
        if len(orders) != dim:
            raise InvalidParameterError(
                f"symbol {name!r} has {len(orders)} indices for {dim} dimensions"
            )
        return orders
    return None


def _coord_name(d: int, dim: int) -> str:
    return "x" if dim == 1 else f"x{d + 1}"


@dataclass(eq=False)
class CollocationProblem:
    """Differential problem data: operator, right-hand side, conditions.

    ``conditions`` entries are dicts ``{"face": "a1" | "b1" | ..., "order":
    k, "expr": text}``; the expression gives the condition value and may
    reference the coordinates of the other dimensions (a constant for 1-d
    problems).  ``linear=None`` means the solver decides syntactically.
    """

    dim: int
    domains: list
    orders: list
    splits: list
    residual: str
    rhs: str
    conditions: list
    linear: bool | None = None
    # parsed trees, filled in __post_init__
    _residual_tree: object = field(default=None, init=False, repr=False)
    _rhs_tree: object = field(default=None, init=False, repr=False)
    _condition_specs: list = field(default=None, init=False, repr=False)

    def __post_init__(self):
        p = self.dim
        if p < 1:
            raise InvalidParameterError(f"dimension must be >= 1, got {p}")
        for name, seq in (("domains", self.domains), ("orders", self.orders), ("splits", self.splits)):
            if len(seq) != p:
                raise InvalidParameterError(
                    f"{name} must have {p} entries, got {len(seq)}"
                )
        self.domains = [(float(a), float(b)) for a, b in self.domains]
        self.orders = [int(v) for v in self.orders]
        self.splits = [(int(v1), int(v2)) for v1, v2 in self.splits]
        for d, (v, (v1, v2)) in enumerate(zip(self.orders, self.splits)):
            if v < 0 or v1 < 0 or v2 < 0 or v1 + v2 != v:
                raise InvalidParameterError(
                    f"dimension {d + 1}: split {v1}+{v2} must be nonnegative and sum "
                    f"to the order {v}"
                )
            a, b = self.domains[d]
            if not a < b:
                raise InvalidParameterError(
                    f"dimension {d + 1}: domain [{a}, {b}] is empty"
                )

        self._residual_tree = exprlang.parse_expr(self.residual)
        self._rhs_tree = exprlang.parse_expr(self.rhs)

        coords = {_coord_name(d, p) for d in range(p)}
        for name in exprlang.expr_variables(self._residual_tree):
            orders = _deriv_orders_from_name(name, p)
            if orders is None:
                if name not in coords:
                    raise InvalidParameterError(
                        f"residual references unknown symbol {name!r}"
                    )
                continue
            for d, k in enumerate(orders):
                if not 0 <= k <= self.orders[d]:
                    raise InvalidParameterError(
                        f"residual derivative {name!r} exceeds declared order "
                        f"{self.orders[d]} in dimension {d + 1}"
                    )
        extra = exprlang.expr_variables(self._rhs_tree) - coords
        if extra:
            raise InvalidParameterError(
                f"right-hand side may only reference coordinates, found {sorted(extra)}"
            )

        self._condition_specs = [self._parse_condition(c) for c in self.conditions]
        for d in range(p):
            v1, v2 = self.splits[d]
            for face, want in (("a", v1), ("b", v2)):
                specs = [s for s in self._condition_specs if s[0] == d and s[1] == face]
                ks = [s[2] for s in specs]
                if len(specs) != want:
                    raise InvalidParameterError(
                        f"dimension {d + 1} face {face!r} needs {want} conditions, "
                        f"got {len(specs)}"
                    )
                if len(set(ks)) != len(ks):
                    raise InvalidParameterError(
                        f"dimension {d + 1} face {face!r} repeats a derivative order"
                    )
                for k in ks:
                    if not 0 <= k <= max(self.orders[d] - 1, 0):
                        raise InvalidParameterError(
                            f"condition order {k} invalid for equation order "
                            f"{self.orders[d]} in dimension {d + 1}"
                        )

    def _parse_condition(self, cond: dict):
        face = str(cond["face"])
        m = re.match(r"^([ab])(\d*)$", face)
        if m is None:
            raise InvalidParameterError(f"condition face {face!r} must look like 'a1' or 'b2'")
        side = m.group(1)
        d = int(m.group(2)) - 1 if m.group(2) else 0
        if not 0 <= d < self.dim:
            raise InvalidParameterError(
                f"condition face {face!r} names dimension {d + 1} of {self.dim}"
            )
        order = int(cond.get("order", 0))
        tree = exprlang.parse_expr(str(cond["expr"]))
        allowed = {_coord_name(dd, self.dim) for dd in range(self.dim) if dd != d}
        extra = exprlang.expr_variables(tree) - allowed
        if extra:
            raise InvalidParameterError(
                f"condition on face {face!r} may only reference {sorted(allowed)}, "
                f"found {sorted(extra)}"
            )
        return (d, side, order, tree)


# ---------------------------------------------------------------------------
# syntactic linearity
# ---------------------------------------------------------------------------


def _classify(tree, unknowns) -> str:
    """Classify an expression as 'const', 'linear', or 'nonlinear' in the
    unknown symbols (conservative: anything unclear is nonlinear)."""
    E = exprlang
    if isinstance(tree, (E.Num, E.Const)):
        return "const"
    if isinstance(tree, E.Var):
        return "linear" if tree.name in unknowns else "const"
    if isinstance(tree, E.Neg):
        return _classify(tree.operand, unknowns)
    if isinstance(tree, E.BinOp):
        left = _classify(tree.left, unknowns)
        right = _classify(tree.right, unknowns)
        if left == "nonlinear" or right == "nonlinear":
            return "nonlinear"
        if tree.op in "+-":
            return "linear" if "linear" in (left, right) else "const"
        if tree.op == "*":
            if left == "const":
                return right
            if right == "const":
                return left
            return "nonlinear"
        if tree.op == "/":
            if right == "const":
                return left
            return "nonlinear"
        # power: only constant^constant stays predictable
        return "const" if left == right == "const" else "nonlinear"
    if isinstance(tree, E.Call):
        inner = _classify(tree.arg, unknowns)
        return "const" if inner == "const" else "nonlinear"
    return "nonlinear"


def detect_linear(problem: CollocationProblem) -> bool:
    """True when every unknown symbol enters the residual linearly."""
    unknowns = {
        name
        for name in exprlang.expr_variables(problem._residual_tree)
        if _deriv_orders_from_name(name, problem.dim) is not None
    }
    return _classify(problem._residual_tree, unknowns) != "nonlinear"


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class CollocationSystem:
    """Assembled square system over the flat vector of nodal values."""

    problem: CollocationProblem
    bases: list
    size: int
    row_roles: list
    is_linear: bool
    # internal plumbing
    _shape: tuple = field(default=None, repr=False)
    _derivs: list = field(default=None, repr=False)  # [(symbol, orders, mats)]
    _interior: list = field(default=None, repr=False)  # per-dim slice
    _cond_rows: list = field(default=None, repr=False)
    _int_env: dict = field(default=None, repr=False)
    _int_shape: tuple = field(default=None, repr=False)

    def evaluate_residual(self, u_flat: np.ndarray) -> np.ndarray:
        u_flat = np.asarray(u_flat, dtype=float)
        if u_flat.shape != (self.size,):
            raise InvalidParameterError(
                f"expected a flat vector of {self.size} values, got {u_flat.shape}"
            )
        grid = u_flat.reshape(self._shape)
        p = self.problem.dim

        env = dict(self._int_env)
        for name, orders, mats in self._derivs:
            g = grid
            for axis, mat in enumerate(mats):
                if mat is not None:
                    g = np.moveaxis(np.tensordot(mat, g, axes=(1, axis)), 0, axis)
            env[name] = g[tuple(self._interior)]
        res = exprlang.eval_expr(self.problem._residual_tree, env) - exprlang.eval_expr(
            self.problem._rhs_tree, self._int_env
        )
        pieces = [np.broadcast_to(np.asarray(res, dtype=float), self._int_shape).ravel()]

        for row_vec, axis, sel, data in self._cond_rows:
            sub = np.tensordot(row_vec, grid, axes=(0, axis))
            pieces.append((sub[sel] - data).ravel())
        return np.concatenate(pieces)

    def evaluate_jacobian(self, u_flat: np.ndarray, step: float = 1e-7) -> np.ndarray:
        """Forward-difference Jacobian of the residual at ``u_flat``."""
        u_flat = np.asarray(u_flat, dtype=float)
        base = self.evaluate_residual(u_flat)
        jac = np.empty((self.size, self.size))
        for j in range(self.size):
            h = step * (1.0 + abs(u_flat[j]))
            bumped = u_flat.copy()
            bumped[j] += h
            jac[:, j] = (self.evaluate_residual(bumped) - base) / h
        return jac


def assemble_collocation_nd(problem: CollocationProblem, bases) -> CollocationSystem:
    bases = list(bases)
    p = problem.dim
    if len(bases) != p:
        raise AssemblyError(f"problem has {p} dimensions but {len(bases)} bases given")
    shape = tuple(b.size for b in bases)
    for d, b in enumerate(bases):
        v = problem.orders[d]
        if b.n < v:
            raise AssemblyError(
                f"dimension {d + 1}: N={b.n} is below the equation order {v}"
            )
        a_dom, b_dom = problem.domains[d]
        xs = b.nodes.nodes
        v1, v2 = problem.splits[d]
        has_a = any(s[0] == d and s[1] == "a" for s in problem._condition_specs)
        has_b = any(s[0] == d and s[1] == "b" for s in problem._condition_specs)
        if has_a and abs(xs[0] - a_dom) > _ENDPOINT_TOL * (1 + abs(a_dom)):
            raise AssemblyError(
                f"dimension {d + 1}: conditions at {a_dom} need it to be the first node "
                f"(found {xs[0]})"
            )
        if has_b and abs(xs[-1] - b_dom) > _ENDPOINT_TOL * (1 + abs(b_dom)):
            raise AssemblyError(
                f"dimension {d + 1}: conditions at {b_dom} need it to be the last node "
                f"(found {xs[-1]})"
            )

    # derivative matrices, one bundle per u-symbol in the residual
    dmat_cache = {}

    def dmat(d: int, k: int):
        if k == 0:
            return None
        if (d, k) not in dmat_cache:
            dmat_cache[(d, k)] = dm_matrix(bases[d], k).entries
        return dmat_cache[(d, k)]

    derivs = []
    for name in sorted(exprlang.expr_variables(problem._residual_tree)):
        orders = _deriv_orders_from_name(name, p)
        if orders is not None:
            derivs.append((name, orders, [dmat(d, k) for d, k in enumerate(orders)]))

    interior = [slice(problem.splits[d][0], shape[d] - problem.splits[d][1]) for d in range(p)]
    int_shape = tuple(s.stop - s.start for s in interior)

    # coordinate grids over the interior block
    int_env = {}
    for d in range(p):
        xs = bases[d].nodes.nodes[interior[d]]
        reshape = [1] * p
        reshape[d] = len(xs)
        int_env[_coord_name(d, p)] = np.broadcast_to(xs.reshape(reshape), int_shape)

    # condition rows: dimension d owns rows whose index in d is dropped and
    # whose indices in earlier dimensions are interior
    roles = ["interior"] * int(np.prod(int_shape))
    cond_rows = {"a": [], "b": []}
    for side in ("a", "b"):
        for d in range(p):
            specs = sorted(
                (s for s in problem._condition_specs if s[0] == d and s[1] == side),
                key=lambda s: s[2],
            )
            if not specs:
                continue
            endpoint = 0 if side == "a" else shape[d] - 1
            sel = tuple(
                interior[dd] if dd < d else slice(None)
                for dd in range(p)
                if dd != d
            )
            other_shape = tuple(
                int_shape[dd] if dd < d else shape[dd] for dd in range(p) if dd != d
            )
            env = {}
            for pos, dd in enumerate(dd for dd in range(p) if dd != d):
                xs = bases[dd].nodes.nodes[interior[dd]] if dd < d else bases[dd].nodes.nodes
                reshape = [1] * (p - 1)
                reshape[pos] = len(xs)
                env[_coord_name(dd, p)] = np.broadcast_to(xs.reshape(reshape), other_shape)
            for _, _, order, tree in specs:
                mat = dmat(d, order)
                row_vec = (
                    np.eye(shape[d])[endpoint] if mat is None else mat[endpoint]
                )
                data = np.broadcast_to(
                    np.asarray(exprlang.eval_expr(tree, env), dtype=float), other_shape
                )
                cond_rows[side].append((row_vec, d, sel, data))
                roles.extend(
                    ["initial" if side == "a" else "boundary"] * int(np.prod(other_shape))
                )

    system = CollocationSystem(
        problem=problem,
        bases=bases,
        size=int(np.prod(shape)),
        row_roles=roles,
        is_linear=problem.linear if problem.linear is not None else detect_linear(problem),
        _shape=shape,
        _derivs=derivs,
        _interior=interior,
        _cond_rows=cond_rows["a"] + cond_rows["b"],
        _int_env=int_env,
        _int_shape=int_shape,
    )
    if len(roles) != system.size:
        raise AssemblyError(
            f"row bookkeeping error: {len(roles)} rows for {system.size} unknowns"
        )
    return system


def assemble_collocation_1d(problem: CollocationProblem, basis: DlfBasis) -> CollocationSystem:
    if problem.dim != 1:
        raise AssemblyError(f"expected a one-dimensional problem, got dim={problem.dim}")
    return assemble_collocation_nd(problem, [basis])


# ---------------------------------------------------------------------------
# solving
# ---------------------------------------------------------------------------


@dataclass
class SolveOptions:
    tol: float = 1e-12
    max_iterations: int = 50
    initial_guess: np.ndarray | None = None
    jacobian_step: float = 1e-7
    max_damping: int = 8


@dataclass(eq=False)
class SolveResult:
    """Solved interpolant plus solve diagnostics."""

    interpolant: object
    iterations: int
    residual_norm: float
    linear: bool
    cond_estimate: float | None = None


def _wrap_solution(system: CollocationSystem, u_flat: np.ndarray):
    if system.problem.dim == 1:
        return Interpolant(basis=system.bases[0], coeffs=u_flat)
    return TensorInterpolant(bases=system.bases, coeffs=u_flat)


def solve_system(system: CollocationSystem, options: SolveOptions | None = None) -> SolveResult:
    opts = options or SolveOptions()
    m = system.size
    if opts.initial_guess is not None:
        guess = np.asarray(opts.initial_guess, dtype=float)
        if guess.shape != (m,):
            raise InvalidParameterError(
                f"initial guess must have shape ({m},), got {guess.shape}"
            )
    else:
        guess = np.zeros(m)

    if system.is_linear:
        base = system.evaluate_residual(np.zeros(m))
        mat = np.empty((m, m))
        eye = np.eye(m)
        for j in range(m):
            mat[:, j] = system.evaluate_residual(eye[j]) - base
        cond = float(np.linalg.cond(mat))
        try:
            u = np.linalg.solve(mat, -base)
        except np.linalg.LinAlgError:
            raise SingularSystemError(
                "collocation matrix is singular", cond_estimate=cond
            ) from None
        res_norm = float(np.max(np.abs(system.evaluate_residual(u))))
        return SolveResult(
            interpolant=_wrap_solution(system, u),
            iterations=0,
            residual_norm=res_norm,
            linear=True,
            cond_estimate=cond,
        )

    u = guess
    res = system.evaluate_residual(u)
    norm = float(np.max(np.abs(res)))
    for it in range(1, opts.max_iterations + 1):
        if norm <= opts.tol:
            return SolveResult(
                interpolant=_wrap_solution(system, u),
                iterations=it - 1,
                residual_norm=norm,
                linear=False,
            )
        jac = system.evaluate_jacobian(u, step=opts.jacobian_step)
        try:
            delta = np.linalg.solve(jac, -res)
        except np.linalg.LinAlgError:
            raise SingularSystemError(
                "Newton Jacobian is singular",
                cond_estimate=float(np.linalg.cond(jac)),
            ) from None
        lam = 1.0
        for _ in range(opts.max_damping):
            trial = u + lam * delta
            trial_res = system.evaluate_residual(trial)
            trial_norm = float(np.max(np.abs(trial_res)))
            if trial_norm < norm:
                break
            lam *= 0.5
        else:
            trial = u + lam * delta
            trial_res = system.evaluate_residual(trial)
            trial_norm = float(np.max(np.abs(trial_res)))
        u, res, norm = trial, trial_res, trial_norm
    if norm <= opts.tol:
        return SolveResult(
            interpolant=_wrap_solution(system, u),
            iterations=opts.max_iterations,
            residual_norm=norm,
            linear=False,
        )
    raise NewtonError(
        "damped Newton did not reach the tolerance",
        residual_norm=norm,
        iterations=opts.max_iterations,
    )


# ---------------------------------------------------------------------------
# JSON problem configs
# ---------------------------------------------------------------------------


def load_config(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _per_dim(value, dim: int, name: str) -> list:
    """Broadcast a config entry to one value per dimension."""
    if isinstance(value, list) and value and isinstance(value[0], (list, dict)):
        seq = value
    elif isinstance(value, (dict, int, float, str)):
        seq = [value] * dim
    elif isinstance(value, list) and len(value) == dim and not isinstance(value[0], (list, dict)):
        # a flat list of scalars: one per dimension
        seq = list(value)
    else:
        seq = value
    if len(seq) != dim:
        raise InvalidParameterError(f"config {name!r} must have {dim} entries")
    return seq


def problem_from_config(cfg: dict) -> CollocationProblem:
    dim = int(cfg.get("dim", 1))
    domains = cfg["domains"]
    if dim == 1 and domains and not isinstance(domains[0], list):
        domains = [domains]
    orders = cfg["orders"] if isinstance(cfg["orders"], list) else [cfg["orders"]]
    splits = cfg["splits"]
    if splits and not isinstance(splits[0], list):
        splits = [splits]
    return CollocationProblem(
        dim=dim,
        domains=[tuple(dom) for dom in domains],
        orders=list(orders),
        splits=[tuple(s) for s in splits],
        residual=cfg["residual"],
        rhs=cfg.get("rhs", "0"),
        conditions=cfg.get("conditions", []),
        linear=cfg.get("linear"),
    )


def bases_from_config(cfg: dict, n_override=None) -> list:
    dim = int(cfg.get("dim", 1))
    problem = problem_from_config(cfg)
    fams = _per_dim(cfg.get("family", {"kind": "identity"}), dim, "family")
    nodes = _per_dim(cfg.get("nodes", {"scheme": "cgl"}), dim, "nodes")
    n_val = n_override if n_override is not None else cfg["N"]
    ns = _per_dim(n_val, dim, "N")
    out = []
    for d in range(dim):
        a, b = problem.domains[d]
        node_cfg = nodes[d]
        if "values" in node_cfg:
            node_set = NodeSet(
                nodes=np.asarray(node_cfg["values"], dtype=float),
                domain=(a, b),
                scheme=node_cfg.get("scheme", "custom"),
            )
        else:
            node_set = generate_nodes(node_cfg.get("scheme", "cgl"), int(ns[d]), a, b)
        fam_cfg = fams[d]
        fam = make_psi_family(
            fam_cfg.get("kind", "identity"),
            fam_cfg.get("params") or {},
            size=len(node_set),
        )
        out.append(validate_basis(fam, node_set))
    return out


def solve_config(cfg: dict, n_override=None, options: SolveOptions | None = None) -> SolveResult:
    """Assemble and solve a problem straight from its config dict."""
    problem = problem_from_config(cfg)
    bases = bases_from_config(cfg, n_override=n_override)
    system = assemble_collocation_nd(problem, bases)
    return solve_system(system, options)
