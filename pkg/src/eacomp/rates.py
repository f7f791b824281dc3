"""Optimal compression rates for pure-state sources with encoder side
information.

With unlimited shared entanglement the cheapest faithful protocol sends

    Q = (S(A) + S(A|CY)) / 2    qubits per signal

and consumes E = (S(A) - S(A|CY)) / 2 = I(A:CY)/2 ebits per signal, where
Y is the irreducible-component index of the source. The blind special
case collapses to Q = S(A) - S(Y)/2, E = S(Y)/2, the visible one to
Q = E = S(A)/2, and trading the quantum channel for a classical one at
the blind corner costs C = 2 S(A) - S(Y) cbits with E = S(A) - S(Y) ebits.

All conditional quantities are computed through the Y-extended ensemble.
S(ACY) is evaluated twice, once from the block structure and once by a
direct eigendecomposition of the assembled joint state; disagreement
beyond 1e-6 raises ConsistencyError since it can only come from a bug.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .decomposition import DEFAULT_OVERLAP_TOL, irreducible_components
from .ensemble import Ensemble, reduced
from .errors import ConsistencyError, EacompError, InfeasibleConversionError
from .states import (
    DensityMatrix,
    SubsystemLayout,
    entropy_from_probs,
    von_neumann_entropy,
)

CONSISTENCY_ATOL = 1e-6
CROSS_CHECK_ATOL = 1e-9
RATE_FLOOR = -1e-9
REPORT_CLAMP = 1e-12


@dataclass(frozen=True)
class EntropyProfile:
    """Entropies of the Y-extended source, in bits."""

    s_a: float
    s_y: float
    s_cy: float
    s_acy: float
    s_acy_direct: float
    s_a_given_cy: float
    i_a_cy: float
    h_x: float
    num_components: int
    component_weights: tuple[float, ...]

    def to_json(self) -> dict:
        return {
            "S_A": _clamp_tiny(self.s_a),
            "S_Y": _clamp_tiny(self.s_y),
            "S_CY": _clamp_tiny(self.s_cy),
            "S_ACY": _clamp_tiny(self.s_acy),
            "S_ACY_direct": _clamp_tiny(self.s_acy_direct),
            "S_A_given_CY": self.s_a_given_cy,
            "I_A_CY": _clamp_tiny(self.i_a_cy),
            "H_X": _clamp_tiny(self.h_x),
            "num_components": self.num_components,
            "component_weights": list(self.component_weights),
        }


def _clamp_tiny(v: float) -> float:
    return 0.0 if abs(v) < REPORT_CLAMP else float(v)


def entropy_profile(e: Ensemble, tol: float = DEFAULT_OVERLAP_TOL) -> EntropyProfile:
    d = irreducible_components(e, tol)
    q = d.weights
    s_y = entropy_from_probs(q)
    h_x = entropy_from_probs(e.probs[list(e.support())])
    s_a = von_neumann_entropy(reduced(e, {"A"}))

    # Block path: S(CY) = H(q) + sum_y q_y S(C|y), same for ACY.
    s_c_blocks = 0.0
    s_ac_blocks = 0.0
    for c in d.components:
        s_c_blocks += c.weight * von_neumann_entropy(reduced(c.sub_ensemble, {"C"}))
        s_ac_blocks += c.weight * von_neumann_entropy(reduced(c.sub_ensemble, {"A", "C"}))
    s_cy = s_y + s_c_blocks
    s_acy = s_y + s_ac_blocks

    # Direct path: assemble the full ACY matrix item by item and take its
    # spectrum whole. Shares nothing with the block path beyond y(x).
    da, dc, ny = e.dim_a, e.dim_c, d.size
    dim = ny * da * dc
    joint = np.zeros((dim, dim), dtype=np.complex128)
    for i in e.support():
        it = e.items[i]
        y = d.y_of(it.label)
        tag = np.zeros(ny, dtype=np.complex128)
        tag[y] = 1.0
        v = np.kron(tag, np.kron(it.psi.amplitudes, it.sigma.amplitudes))
        joint += it.prob * np.outer(v, v.conj())
    layout = SubsystemLayout(("Y", "A", "C"), (ny, da, dc))
    s_acy_direct = von_neumann_entropy(DensityMatrix(layout, joint, check=False))

    if abs(s_acy - s_acy_direct) > CONSISTENCY_ATOL:
        raise ConsistencyError(
            f"S(ACY) disagrees between block ({s_acy!r}) and direct ({s_acy_direct!r}) evaluation"
        )

    return EntropyProfile(
        s_a=s_a,
        s_y=s_y,
        s_cy=s_cy,
        s_acy=s_acy,
        s_acy_direct=s_acy_direct,
        s_a_given_cy=s_acy - s_cy,
        i_a_cy=s_a - (s_acy - s_cy),
        h_x=h_x,
        num_components=d.size,
        component_weights=tuple(float(w) for w in q),
    )


@dataclass(frozen=True)
class RatePoint:
    """Resource rates per source signal. Unused coordinates stay None.

    q: qubits sent, e: ebits consumed (negative means generated),
    c: classical bits sent.
    """

    q: float | None = None
    e: float | None = None
    c: float | None = None
    note: str = ""

    def __post_init__(self):
        for name, v in (("q", self.q), ("c", self.c)):
            if v is not None and v < RATE_FLOOR:
                raise EacompError(f"{name} rate {v!r} is negative")

    def to_json(self) -> dict:
        out = {}
        if self.q is not None:
            out["Q"] = _clamp_tiny(self.q)
        if self.e is not None:
            out["E"] = _clamp_tiny(self.e)
        if self.c is not None:
            out["C"] = _clamp_tiny(self.c)
        if self.note:
            out["note"] = self.note
        return out


def optimal_rates(e: Ensemble, tol: float = DEFAULT_OVERLAP_TOL) -> RatePoint:
    """Cheapest qubit rate under free entanglement, with the ebit rate
    the protocol actually consumes at that corner."""
    p = entropy_profile(e, tol)
    return RatePoint(
        q=0.5 * (p.s_a + p.s_a_given_cy),
        e=0.5 * p.i_a_cy,
        note="entanglement-assisted optimum",
    )


def _require_blind(e: Ensemble, tol: float):
    if not e.is_blind(tol):
        raise EacompError("ensemble has nontrivial side information; blind formulas do not apply")


def _require_visible(e: Ensemble, tol: float):
    if not e.is_visible(tol):
        raise EacompError("side information does not identify the signal; visible formulas do not apply")


def blind_rates(e: Ensemble, tol: float = DEFAULT_OVERLAP_TOL) -> RatePoint:
    """No side information: Q = S(A) - S(Y)/2, E = S(Y)/2.

    Cross-checked against the general formula; disagreement is a bug.
    """
    _require_blind(e, tol)
    p = entropy_profile(e, tol)
    point = RatePoint(q=p.s_a - 0.5 * p.s_y, e=0.5 * p.s_y, note="blind specialization")
    general = optimal_rates(e, tol)
    if abs(point.q - general.q) > CROSS_CHECK_ATOL or abs(point.e - general.e) > CROSS_CHECK_ATOL:
        raise ConsistencyError(
            f"blind specialization (Q={point.q!r}, E={point.e!r}) disagrees with "
            f"general formula (Q={general.q!r}, E={general.e!r})"
        )
    return point


def visible_rates(e: Ensemble, tol: float = DEFAULT_OVERLAP_TOL) -> RatePoint:
    """Side information identifies the signal: Q = E = S(A)/2."""
    _require_visible(e, tol)
    p = entropy_profile(e, tol)
    point = RatePoint(q=0.5 * p.s_a, e=0.5 * p.s_a, note="visible specialization")
    general = optimal_rates(e, tol)
    if abs(point.q - general.q) > CROSS_CHECK_ATOL or abs(point.e - general.e) > CROSS_CHECK_ATOL:
        raise ConsistencyError(
            f"visible specialization (Q={point.q!r}, E={point.e!r}) disagrees with "
            f"general formula (Q={general.q!r}, E={general.e!r})"
        )
    return point


def classical_entanglement_corner(e: Ensemble, tol: float = DEFAULT_OVERLAP_TOL) -> RatePoint:
    """Blind corner after teleporting the whole quantum message:
    C = 2 S(A) - S(Y), E = S(A) - S(Y)."""
    _require_blind(e, tol)
    p = entropy_profile(e, tol)
    return RatePoint(
        c=2.0 * p.s_a - p.s_y,
        e=p.s_a - p.s_y,
        note="classical-channel corner (blind)",
    )


def resource_convert(point: RatePoint, mode: str, amount: float) -> RatePoint:
    """Teleportation / dense-coding bookkeeping on a rate point.

    teleport a:   Q -= a, C += 2a, E += a
    dense_code a: C -= a, Q += a/2, E += a/2

    Missing coordinates count as 0. Driving Q or C negative is refused.
    """
    if amount < 0:
        raise ValueError(f"amount must be nonnegative, got {amount}")
    q = point.q or 0.0
    ee = point.e or 0.0
    c = point.c or 0.0
    if mode == "teleport":
        q, c, ee = q - amount, c + 2.0 * amount, ee + amount
        if q < RATE_FLOOR:
            raise InfeasibleConversionError(f"teleporting {amount} would leave Q = {q!r} < 0")
    elif mode == "dense_code":
        c, q, ee = c - amount, q + 0.5 * amount, ee + 0.5 * amount
        if c < RATE_FLOOR:
            raise InfeasibleConversionError(f"dense coding {amount} would leave C = {c!r} < 0")
    else:
        raise ValueError(f"mode must be 'teleport' or 'dense_code', got {mode!r}")
    snap = lambda v: 0.0 if RATE_FLOOR <= v < 0.0 else v
    return replace(point, q=snap(q), e=ee, c=snap(c))
