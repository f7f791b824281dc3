"""Achievable rate regions and their boundary polylines.

The entanglement-assisted qubit/ebit region is the intersection of two
half-planes: Q >= q_min and Q + E >= sum_min, with q_min the assisted
optimum and sum_min = S(A) the unassisted cost. Its lower boundary is a
single corner where the sum constraint meets the floor.

The classical-channel region (blind sources) is the ray C >= c_min at
E = e_min; points below that ebit rate are not achievable, so the
boundary emitted here is the lower envelope only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .decomposition import DEFAULT_OVERLAP_TOL
from .ensemble import Ensemble
from .errors import EacompError
from .rates import EntropyProfile, classical_entanglement_corner, entropy_profile, optimal_rates

CONTAINS_ATOL = 1e-9


@dataclass(frozen=True)
class RegionSpec:
    """Half-plane description of one achievable region.

    kind "EQ": constraints Q >= q_min and Q + E >= sum_min.
    kind "CE": constraints C >= c_min and E >= e_min.
    """

    kind: str
    q_min: float | None = None
    sum_min: float | None = None
    c_min: float | None = None
    e_min: float | None = None

    def __post_init__(self):
        if self.kind == "EQ":
            if self.q_min is None or self.sum_min is None:
                raise EacompError("EQ region needs q_min and sum_min")
            if self.q_min > self.sum_min + CONTAINS_ATOL:
                raise EacompError(
                    f"q_min {self.q_min!r} exceeds sum_min {self.sum_min!r}; "
                    "the assisted optimum cannot cost more than the unassisted one"
                )
        elif self.kind == "CE":
            if self.c_min is None or self.e_min is None:
                raise EacompError("CE region needs c_min and e_min")
        else:
            raise EacompError(f"kind must be 'EQ' or 'CE', got {self.kind!r}")

    @property
    def corner(self) -> tuple[float, float]:
        """(E, Q) for EQ; (C, E) for CE."""
        if self.kind == "EQ":
            return (self.sum_min - self.q_min, self.q_min)
        return (self.c_min, self.e_min)

    def to_json(self) -> dict:
        out = {"schema_version": 1, "kind": self.kind}
        if self.kind == "EQ":
            out["q_min"] = self.q_min
            out["sum_min"] = self.sum_min
        else:
            out["c_min"] = self.c_min
            out["e_min"] = self.e_min
        return out


def eq_region(src, tol: float = DEFAULT_OVERLAP_TOL) -> RegionSpec:
    """Qubit/ebit region of an ensemble (or a precomputed profile)."""
    if isinstance(src, EntropyProfile):
        profile = src
    else:
        profile = entropy_profile(src, tol)
    q_min = 0.5 * (profile.s_a + profile.s_a_given_cy)
    return RegionSpec(kind="EQ", q_min=q_min, sum_min=profile.s_a)


def ce_region(e: Ensemble, tol: float = DEFAULT_OVERLAP_TOL) -> RegionSpec:
    """Cbit/ebit region at the blind corner."""
    corner = classical_entanglement_corner(e, tol)
    return RegionSpec(kind="CE", c_min=corner.c, e_min=corner.e)


def eq_contains(
    spec: RegionSpec,
    point: tuple[float, float],
    tol: float = CONTAINS_ATOL,
    strict_nonneg_e: bool = True,
) -> bool:
    """Membership of (E, Q) in the EQ region.

    strict_nonneg_e additionally requires E >= 0, i.e. the protocol may
    consume entanglement but the region query refuses points that would
    need to generate it; pass False to query the bare half-planes.
    """
    if spec.kind != "EQ":
        raise EacompError(f"expected an EQ region, got kind {spec.kind!r}")
    ee, q = float(point[0]), float(point[1])
    if strict_nonneg_e and ee < -tol:
        return False
    return q >= spec.q_min - tol and q + ee >= spec.sum_min - tol


def ce_contains(spec: RegionSpec, point: tuple[float, float], tol: float = CONTAINS_ATOL) -> bool:
    """Membership of (C, E) in the CE region."""
    if spec.kind != "CE":
        raise EacompError(f"expected a CE region, got kind {spec.kind!r}")
    c, ee = float(point[0]), float(point[1])
    return c >= spec.c_min - tol and ee >= spec.e_min - tol


def boundary_polyline(
    spec: RegionSpec,
    lo: float | None = None,
    hi: float | None = None,
    samples: int = 64,
) -> list[tuple[float, float]]:
    """Lower boundary of the region as ordered vertices.

    EQ: points (E, Q(E)) with Q(E) = max(q_min, sum_min - E), E running
    from lo (default 0) to hi (default sum_min); the corner vertex is
    always inserted exactly. CE: points (C, e_min) for C from
    max(lo, c_min) to hi. Every emitted vertex lies in the region; the
    same vertex shifted down in the second coordinate by more than the
    containment tolerance does not.
    """
    if samples < 2:
        raise ValueError(f"samples must be >= 2, got {samples}")
    if spec.kind == "EQ":
        lo = 0.0 if lo is None else max(float(lo), 0.0)
        hi = spec.sum_min if hi is None else float(hi)
        if hi < lo:
            return []
        grid = set(np.linspace(lo, hi, samples).tolist())
        corner_e = spec.sum_min - spec.q_min
        if lo <= corner_e <= hi:
            grid.add(corner_e)
        # emit the corner vertex exactly; recomputing it as sum_min - E
        # would reintroduce rounding dust
        return [
            (ee, spec.q_min if ee == corner_e else max(spec.q_min, spec.sum_min - ee))
            for ee in sorted(grid)
        ]

    lo = spec.c_min if lo is None else max(float(lo), spec.c_min)
    if hi is None:
        hi = spec.c_min + max(1.0, abs(spec.e_min))
    if hi < lo:
        return []
    grid = set(np.linspace(lo, hi, samples).tolist())
    return [(c, spec.e_min) for c in sorted(grid)]


def polyline_csv(points, header: tuple[str, str]) -> str:
    """Fixed-point CSV, 6 decimals, one vertex per line."""
    lines = [f"{header[0]},{header[1]}"]
    lines.extend(f"{a:.6f},{b:.6f}" for a, b in points)
    return "\n".join(lines) + "\n"
