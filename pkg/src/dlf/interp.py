"""Interpolants over one basis and tensor products of bases.

Coefficients are nodal values: building an interpolant from samples is
storage, not a linear solve, and evaluation at a node returns the matching
coefficient exactly.  The p-dimensional interpolant evaluates as a dot
product of the coefficient vector with the Kronecker chain of per-dimension
basis values, coefficients ordered with the last dimension fastest
(C-order flattening of the value grid).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .basis import (
    DlfBasis,
    NodeSet,
    lagrange_matrix,
    lagrange_values,
    make_psi_family,
    validate_basis,
)
from .errors import InvalidParameterError

__all__ = [
    "Interpolant",
    "TensorInterpolant",
    "kron_vec",
    "interpolate_1d",
    "eval_interpolant",
    "interpolate_nd",
    "eval_interpolant_nd",
    "interpolant_to_json",
    "interpolant_from_json",
    "save_interpolant",
    "load_interpolant",
]


@dataclass(eq=False)
class Interpolant:
    """Nodal coefficients paired with the basis they live on."""

    basis: DlfBasis
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.coeffs.shape != (self.basis.size,):
            raise InvalidParameterError(
                f"expected {self.basis.size} coefficients, got shape {self.coeffs.shape}"
            )
        if not np.all(np.isfinite(self.coeffs)):
            raise InvalidParameterError("coefficients must be finite")


@dataclass(eq=False)
class TensorInterpolant:
    """Tensor-product interpolant over ``p`` bases.

    ``coeffs`` is flat with the last dimension fastest: entry for grid
    index ``(i_1, ..., i_p)`` sits at position
    ``i_1 * n_2 * ... * n_p + ... + i_p``.
    """

    bases: list
    coeffs: np.ndarray

    def __post_init__(self):
        if len(self.bases) == 0:
            raise InvalidParameterError("tensor interpolant needs at least one basis")
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        want = int(np.prod([b.size for b in self.bases]))
        if self.coeffs.shape != (want,):
            raise InvalidParameterError(
                f"expected {want} coefficients for grid "
                f"{tuple(b.size for b in self.bases)}, got shape {self.coeffs.shape}"
            )
        if not np.all(np.isfinite(self.coeffs)):
            raise InvalidParameterError("coefficients must be finite")

    @property
    def ndim(self) -> int:
        return len(self.bases)

    @property
    def grid_shape(self) -> tuple:
        return tuple(b.size for b in self.bases)

    def grid_values(self) -> np.ndarray:
        """Coefficients reshaped onto the node grid."""
        return self.coeffs.reshape(self.grid_shape)


def kron_vec(a, b) -> np.ndarray:
    """Kronecker product of two vectors: entry ``i*|b| + j`` is ``a_i b_j``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 1 or b.ndim != 1:
        raise InvalidParameterError("kron_vec expects one-dimensional inputs")
    return np.kron(a, b)


def interpolate_1d(basis: DlfBasis, samples) -> Interpolant:
    """Wrap nodal samples as an interpolant (coefficients are the samples)."""
    return Interpolant(basis=basis, coeffs=samples)


def eval_interpolant(itp: Interpolant, x):
    """``sum_j U_j L_j(x)``; scalar in, scalar out; 1-d array in, array out."""
    arr = np.asarray(x)
    if arr.ndim == 0:
        return float(lagrange_values(itp.basis, x) @ itp.coeffs)
    return lagrange_matrix(itp.basis, arr).T @ itp.coeffs


def interpolate_nd(bases, grid_values) -> TensorInterpolant:
    """Wrap a flat grid of nodal samples (last dimension fastest)."""
    return TensorInterpolant(bases=list(bases), coeffs=grid_values)


def eval_interpolant_nd(itp: TensorInterpolant, point) -> float:
    """Dot the coefficients with the Kronecker chain of basis values."""
    point = np.atleast_1d(np.asarray(point, dtype=float))
    if point.shape != (itp.ndim,):
        raise InvalidParameterError(
            f"point must have {itp.ndim} coordinates, got shape {point.shape}"
        )
    chain = lagrange_values(itp.bases[0], point[0])
    for d in range(1, itp.ndim):
        chain = kron_vec(chain, lagrange_values(itp.bases[d], point[d]))
    return float(chain @ itp.coeffs)


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------


def _jsonable_params(params: dict) -> dict:
    out = {}
    for key, val in params.items():
        if isinstance(val, np.ndarray):
            out[key] = val.tolist()
        elif isinstance(val, (np.floating, np.integer)):
            out[key] = val.item()
        else:
            out[key] = val
    return out


def _dim_block(basis: DlfBasis) -> dict:
    return {
        "family": {"kind": basis.psi.kind, "params": _jsonable_params(basis.psi.params)},
        "nodes": {
            "values": basis.nodes.nodes.tolist(),
            "domain": [basis.nodes.domain[0], basis.nodes.domain[1]],
            "scheme": basis.nodes.scheme,
        },
    }


def _dim_basis(block: dict) -> DlfBasis:
    fam = make_psi_family(
        block["family"]["kind"],
        block["family"].get("params") or {},
        size=len(block["nodes"]["values"]),
    )
    ns = NodeSet(
        nodes=np.asarray(block["nodes"]["values"], dtype=float),
        domain=tuple(block["nodes"]["domain"]),
        scheme=block["nodes"].get("scheme", "custom"),
    )
    return validate_basis(fam, ns)


def interpolant_to_json(itp) -> dict:
    """JSON-ready dict for either interpolant kind (coefficients last-fastest)."""
    if isinstance(itp, Interpolant):
        return {
            "kind": "interpolant",
            "dims": [_dim_block(itp.basis)],
            "coeffs": itp.coeffs.tolist(),
            "ordering": "last-fastest",
        }
    if isinstance(itp, TensorInterpolant):
        return {
            "kind": "tensor-interpolant",
            "dims": [_dim_block(b) for b in itp.bases],
            "coeffs": itp.coeffs.tolist(),
            "ordering": "last-fastest",
        }
    raise InvalidParameterError(f"cannot serialize {type(itp).__name__}")


def interpolant_from_json(data: dict):
    """Rebuild an interpolant written by :func:`interpolant_to_json`.

    Bases are revalidated from their family parameters and nodes, so a
    hand-edited file that violates the existence conditions is rejected.
    """
    kind = data.get("kind")
    if data.get("ordering", "last-fastest") != "last-fastest":
        raise InvalidParameterError(
            f"unsupported coefficient ordering {data.get('ordering')!r}"
        )
    bases = [_dim_basis(block) for block in data["dims"]]
    coeffs = np.asarray(data["coeffs"], dtype=float)
    if kind == "interpolant":
        if len(bases) != 1:
            raise InvalidParameterError("1-d interpolant must have exactly one dim block")
        return Interpolant(basis=bases[0], coeffs=coeffs)
    if kind == "tensor-interpolant":
        return TensorInterpolant(bases=bases, coeffs=coeffs)
    raise InvalidParameterError(f"unknown serialized kind {kind!r}")


def save_interpolant(itp, path) -> None:
    with open(path, "w") as fh:
        json.dump(interpolant_to_json(itp), fh, indent=2)
        fh.write("\n")


def load_interpolant(path):
    with open(path) as fh:
        return interpolant_from_json(json.load(fh))
