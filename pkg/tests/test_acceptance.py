"""Acceptance gate: one test per advertised capability, at fixed tolerances.

Every test measures its own wall-clock budget.  The family instantiations
are frozen here so reruns are reproducible; random evaluation points come
from seeded generators.

Known red: the partition-of-unity half of the delta/partition check cannot
hold for the ``mixed`` family, whose per-index maps are not affinely
related (constants are outside its span).  The test asserts the advertised
bound anyway and reports the measured defect instead of special-casing it.
"""

import time
from collections import Counter

import numpy as np
import pytest

from dlf.basis import (
    NodeSet,
    dlf_limit,
    generate_nodes,
    lagrange_matrix,
    lagrange_values,
    make_psi_family,
    validate_basis,
)
from dlf.contour import Contour, contour_error, contour_interpolant
from dlf.diffmat import d1_matrix, dm_matrix, dm_oracle_fd, dm_power_classical
from dlf.interp import eval_interpolant, interpolate_1d
from dlf.solver import load_config, solve_config

from conftest import build_basis

# one frozen instantiation per family kind, N = 8 everywhere
FAMILY_CASES = [
    ("identity", {}, -1.0, 1.0),
    ("fractional", {"delta": 2.0}, 0.5, 2.5),
    ("generalized", {"expr": "x^3 + x"}, -1.0, 1.0),
    ("rational", {"L": 1.0}, 0.0, 1.0),
    ("exponential", {"rates": 0.5}, 0.0, 1.0),
    ("fourier-sin", {"freqs": 1.2}, 0.1, 1.2),
    ("mixed", {"split": 4, "rates": 0.3, "freqs": 1.1}, 0.1, 0.9),
]

# the four homogeneous instantiations used for derivative-matrix checks,
# with oracle steps known to sit in the safe window for m = 3
DERIV_CASES = [
    ("identity", {}, -1.0, 1.0, {}),
    ("fractional", {"delta": 2.0}, 0.5, 2.5, {3: 3e-2}),
    ("rational", {"L": 5.0}, 0.0, 1.0, {3: 8e-2}),
    ("exponential", {"rates": 0.5}, 0.0, 1.0, {}),
]


def test_criterion_1_delta_and_partition():
    start = time.perf_counter()
    rng = np.random.default_rng(101)
    failures = []
    for kind, params, a, b in FAMILY_CASES:
        basis = build_basis(kind, params, n=8, a=a, b=b)
        delta_dev = float(
            np.max(np.abs(lagrange_matrix(basis, basis.nodes.nodes) - np.eye(9)))
        )
        xs = rng.uniform(a, b, size=100)
        partition_dev = float(
            np.max(np.abs(lagrange_matrix(basis, xs).sum(axis=0) - 1.0))
        )
        if delta_dev > 1e-12:
            failures.append(f"{kind}: nodal delta deviation {delta_dev:.3e} > 1e-12")
        if partition_dev > 1e-10:
            failures.append(
                f"{kind}: partition-of-unity deviation {partition_dev:.3e} > 1e-10"
            )
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0, f"criterion 1 took {elapsed:.2f}s (budget 1s)"
    assert not failures, "\n" + "\n".join(failures)


def test_criterion_2_first_derivative_matrices():
    start = time.perf_counter()
    for kind, params, a, b, _ in DERIV_CASES:
        basis = build_basis(kind, params, n=8, a=a, b=b)
        oracle = dm_oracle_fd(basis, 1)
        dev = float(np.max(np.abs(d1_matrix(basis).entries - oracle.entries)))
        assert dev <= 1e-8, f"{kind}: first-derivative deviation {dev:.3e}"
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0, f"criterion 2 took {elapsed:.2f}s (budget 5s)"


def test_criterion_3_high_order_recurrence():
    start = time.perf_counter()
    for kind, params, a, b, steps in DERIV_CASES:
        basis = build_basis(kind, params, n=8, a=a, b=b)
        for m in (2, 3):
            oracle = dm_oracle_fd(basis, m, step=steps.get(m))
            dev = float(np.max(np.abs(dm_matrix(basis, m).entries - oracle.entries)))
            assert dev <= 1e-5, f"{kind} m={m}: deviation {dev:.3e}"

    # fixed two-node instance under the square map: the recurrence result
    # is exact and visibly different from squaring the first-derivative matrix
    nodes = NodeSet(np.array([1.0, 2.0]), (1.0, 2.0))
    basis = validate_basis(make_psi_family("fractional", {"delta": 2.0}, size=2), nodes)
    d2 = dm_matrix(basis, 2).entries
    np.testing.assert_allclose(d2, [[-2 / 3, 2 / 3], [-2 / 3, 2 / 3]], atol=1e-12)
    d1 = d1_matrix(basis).entries
    assert float(np.max(np.abs(d2 - d1 @ d1))) >= 0.2
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0, f"criterion 3 took {elapsed:.2f}s (budget 5s)"


def test_criterion_4_identity_matrix_power():
    start = time.perf_counter()
    for n in (8, 16):
        basis = build_basis("identity", n=n)
        for m in (2, 3):
            dev = float(
                np.max(
                    np.abs(
                        dm_matrix(basis, m).entries
                        - dm_power_classical(basis, m).entries
                    )
                )
            )
            assert dev <= 1e-9, f"N={n} m={m}: deviation {dev:.3e}"
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0, f"criterion 4 took {elapsed:.2f}s (budget 1s)"


def test_criterion_5_sine_bvp_convergence():
    start = time.perf_counter()
    cfg = load_config("configs/sine_bvp.json")
    xs = np.linspace(0.0, 1.0, 201)
    errs = []
    for n in (8, 12, 16):
        result = solve_config(cfg, n_override=n)
        errs.append(
            float(
                np.max(np.abs(eval_interpolant(result.interpolant, xs) - np.sin(np.pi * xs)))
            )
        )
    assert errs[0] > errs[1] > errs[2], f"errors not strictly decreasing: {errs}"
    assert errs[2] < 1e-8, f"error at N=16 is {errs[2]:.3e}"
    elapsed = time.perf_counter() - start
    assert elapsed < 2.0, f"criterion 5 took {elapsed:.2f}s (budget 2s)"


def test_criterion_6_poisson_2d():
    start = time.perf_counter()
    cfg = load_config("configs/poisson2d.json")
    result = solve_config(cfg)

    from dlf.solver import assemble_collocation_nd, bases_from_config, problem_from_config

    system = assemble_collocation_nd(problem_from_config(cfg), bases_from_config(cfg))
    counts = Counter(system.row_roles)
    n = 12
    assert counts["interior"] == (n - 1) ** 2
    assert counts["interior"] + counts["initial"] + counts["boundary"] == (n + 1) ** 2
    assert system.size == (n + 1) ** 2

    grid = result.interpolant.grid_values()
    x1 = result.interpolant.bases[0].nodes.nodes
    x2 = result.interpolant.bases[1].nodes.nodes
    exact = np.sin(np.pi * x1)[:, None] * np.sin(np.pi * x2)[None, :]
    nodal = float(np.max(np.abs(grid - exact)))
    assert nodal < 1e-7, f"nodal error {nodal:.3e}"
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0, f"criterion 6 took {elapsed:.2f}s (budget 30s)"


def test_criterion_7_contour_forms():
    start = time.perf_counter()
    basis = build_basis("identity", n=4)
    itp = interpolate_1d(basis, np.exp(basis.nodes.nodes))
    contour = Contour(radius=2.0, panels=256)
    for x in np.linspace(-1.0, 1.0, 20):
        x = float(x)
        direct = eval_interpolant(itp, x)
        ci = contour_interpolant(basis, np.exp, x, contour)
        ce = contour_error(basis, np.exp, x, contour)
        assert abs(ci - direct) <= 1e-10, f"x={x}: interpolant form off by {abs(ci - direct):.3e}"
        assert abs(ce - (direct - np.exp(x))) <= 1e-10, (
            f"x={x}: error form off by {abs(ce - (direct - np.exp(x))):.3e}"
        )
    doubled = Contour(radius=2.0, panels=512)
    x = 0.37
    drift = abs(
        contour_interpolant(basis, np.exp, x, contour)
        - contour_interpolant(basis, np.exp, x, doubled)
    )
    assert drift < 1e-12, f"panel doubling moved the result by {drift:.3e}"
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0, f"criterion 7 took {elapsed:.2f}s (budget 5s)"


def test_criterion_8_far_field_limit():
    start = time.perf_counter()
    # nodes: images of a CGL grid under y -> y/(1-y), so they spread over
    # [0, oo) while staying well separated under the rational map
    y = generate_nodes("cgl", 6, 0.0, 0.97)
    nodes = NodeSet(y.nodes / (1.0 - y.nodes), (0.0, float("inf")))
    basis = validate_basis(make_psi_family("rational", {"L": 1.0}, size=7), nodes)
    vals = lagrange_values(basis, 1.0e6)
    limits = np.array([dlf_limit(basis, j) for j in range(basis.size)])
    dev = float(np.max(np.abs(vals - limits)))
    assert dev <= 1e-4, f"far-field deviation at x=1e6 is {dev:.3e}"
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0, f"criterion 8 took {elapsed:.2f}s (budget 1s)"


def test_criterion_9_riccati_newton():
    start = time.perf_counter()
    cfg = load_config("configs/riccati_ivp.json")
    result = solve_config(cfg)  # zero initial guess by default
    assert result.linear is False
    assert result.iterations <= 20, f"took {result.iterations} Newton iterations"
    xs = np.linspace(0.0, 0.5, 201)
    err = float(
        np.max(np.abs(eval_interpolant(result.interpolant, xs) - 1.0 / (1.0 - xs)))
    )
    assert err < 1e-7, f"solution error {err:.3e}"
    elapsed = time.perf_counter() - start
    assert elapsed < 2.0, f"criterion 9 took {elapsed:.2f}s (budget 2s)"
