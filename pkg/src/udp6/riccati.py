"""The first-order (Riccati-type) subsystem and its exact solvers.

Under the two parameter conditions ``B1+A3 == Q+A1+B3`` and
``B2+A4 == A2+B4`` the system admits a first-order reduction: one relation
links y_m to z_{m+1}, the other links y_{m+1} to z_{m+1}.  Both relations are
parity-filtered identities between maxima, linear in each amplitude, so a
step is an exact one-unknown tropical solve whose result can be a point, an
interval, or a union of intervals (degenerate inputs leave a free constant).

Every solution of this subsystem also solves the full second-order system;
``theorem_check`` verifies that implication table by table.  The subsystem
has no solution at all with both parities -1, so the parity variables are
essential here.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from .evolution import painleve_failures
from .system import ConstraintViolation, ParityPair, Params, residual_yy, residual_zz
from .tables import SolutionTable
from .tropical import BOTTOM, LinTerm, SolutionSet, solve_one_unknown

__all__ = [
    "RiccatiConditions",
    "RiccatiEvolution",
    "RiccatiStepResult",
    "check_riccati_conditions",
    "require_riccati_conditions",
    "residual_riccati1",
    "residual_riccati2",
    "riccati_close_z",
    "riccati_evolve",
    "riccati_failures",
    "riccati_step_back_y",
    "riccati_step_y",
    "riccati_step_z",
    "theorem_check",
]


@dataclass(frozen=True)
class RiccatiConditions:
    """The two linear parameter conditions of the first-order reduction."""

    first: bool  # B1 + A3 == Q + A1 + B3
    second: bool  # B2 + A4 == A2 + B4

    @property
    def both(self) -> bool:
        return self.first and self.second


def riccati_conditions(p: Params) -> RiccatiConditions:
    return RiccatiConditions(
        first=p.b1 + p.a3 == p.q + p.a1 + p.b3,
        second=p.b2 + p.a4 == p.a2 + p.b4,
    )


def check_riccati_conditions(p: Params) -> bool:
    return riccati_conditions(p).both


def require_riccati_conditions(p: Params) -> None:
    if not check_riccati_conditions(p):
        raise ConstraintViolation(
            "parameters must satisfy B1+A3 = Q+A1+B3 and B2+A4 = A2+B4"
        )


# --- term lists --------------------------------------------------------------
#
# Each relation is described once; a variable slot holds either a known
# amplitude or None for the unknown.  Dropped terms (parity factor S(-1))
# simply do not appear.


def _term(out: list, keep: bool, const: Fraction, *vals: Optional[Fraction]) -> None:
    if not keep:
        return
    slope = 0
    intercept = const
    for v in vals:
        if v is None:
            slope += 1
        else:
            intercept += v
    out.append(LinTerm(slope, intercept))


def _sides_r2(
    p: Params, m: int, sy: int, sz: int, y: Optional[Fraction], z: Optional[Fraction]
) -> Tuple[List[LinTerm], List[LinTerm]]:
    """Sides of the y_m -> z_{m+1} relation at index m."""
    lhs: List[LinTerm] = []
    rhs: List[LinTerm] = []
    _term(lhs, True, m * p.q + p.a2 + p.b4)
    _term(lhs, sz == -1, p.a4, z)
    _term(lhs, sy == -1, p.b4, y)
    _term(lhs, sy * sz == 1, Fraction(0), y, z)
    _term(rhs, sz == 1, p.a4, z)
    _term(rhs, sy == 1, p.b4, y)
    _term(rhs, sy * sz == -1, Fraction(0), y, z)
    return lhs, rhs


def _sides_r1(
    p: Params, m: int, sy: int, sz: int, y: Optional[Fraction], z: Optional[Fraction]
) -> Tuple[List[LinTerm], List[LinTerm]]:
    """Sides of the z_{m+1} -> y_{m+1} relation at index m."""
    lhs: List[LinTerm] = []
    rhs: List[LinTerm] = []
    _term(lhs, True, m * p.q + p.a3 + p.b1)
    _term(lhs, sy == -1, p.b3, y)
    _term(lhs, sz == -1, p.a3, z)
    _term(lhs, sy * sz == 1, Fraction(0), y, z)
    _term(rhs, sz == 1, p.a3, z)
    _term(rhs, sy == 1, p.b3, y)
    _term(rhs, sy * sz == -1, Fraction(0), y, z)
    return lhs, rhs


def _residual(sides: Tuple[List[LinTerm], List[LinTerm]]) -> bool:
    lhs_terms, rhs_terms = sides
    lhs = max((t.intercept for t in lhs_terms), default=BOTTOM)
    rhs = max((t.intercept for t in rhs_terms), default=BOTTOM)
    if lhs is BOTTOM or rhs is BOTTOM:
        return lhs is BOTTOM and rhs is BOTTOM
    return lhs == rhs


def residual_riccati2(p: Params, m: int, y_m: ParityPair, z_next: ParityPair) -> bool:
    """Exact check of the y_m -> z_{m+1} relation (parity-filtered maxima).

    Always False when both parities are -1: that sign pair has no solution.
    """
    require_riccati_conditions(p)
    return _residual(_sides_r2(p, m, y_m.sign, z_next.sign, y_m.amp, z_next.amp))


def residual_riccati1(p: Params, m: int, y_next: ParityPair, z_next: ParityPair) -> bool:
    """Exact check of the z_{m+1} -> y_{m+1} relation."""
    require_riccati_conditions(p)
    return _residual(_sides_r1(p, m, y_next.sign, z_next.sign, y_next.amp, z_next.amp))


# --- one-unknown steps --------------------------------------------------------


@dataclass(frozen=True)
class RiccatiStepResult:
    """Admissible (sign, solution set) branches for the next variable.

    Entries with an empty solution set are omitted; the sign pair that admits
    no solution is never attempted, so a double-minus branch cannot appear.
    """

    branches: Tuple[Tuple[int, SolutionSet], ...]

    def samples(self, policy: str = "endpoints") -> List[ParityPair]:
        out = []
        for sign, solset in self.branches:
            out.extend(ParityPair(sign, x) for x in solset.finite_samples(policy))
        return out

    def to_json_obj(self) -> list:
        return [
            {"sign": sign, "intervals": solset.to_json_obj()}
            for sign, solset in self.branches
        ]


def _solve_branches(cases) -> RiccatiStepResult:
    branches = []
    for sign, (lhs, rhs) in cases:
        sol = solve_one_unknown(lhs, rhs)
        if not sol.is_empty:
            branches.append((sign, sol))
    return RiccatiStepResult(tuple(branches))


def riccati_step_z(p: Params, m: int, y_m: ParityPair) -> RiccatiStepResult:
    """Solve the step relation at index m for z_{m+1}, one sign at a time."""
    require_riccati_conditions(p)
    signs = (1,) if y_m.sign == -1 else (1, -1)
    return _solve_branches(
        (sz, _sides_r2(p, m, y_m.sign, sz, y_m.amp, None)) for sz in signs
    )


def riccati_step_y(p: Params, m: int, z_next: ParityPair) -> RiccatiStepResult:
    """Solve the step relation at index m for y_{m+1}, given z_{m+1}."""
    require_riccati_conditions(p)
    signs = (1,) if z_next.sign == -1 else (1, -1)
    return _solve_branches(
        (sy, _sides_r1(p, m, sy, z_next.sign, None, z_next.amp)) for sy in signs
    )


def riccati_close_z(p: Params, m: int, y_m: ParityPair) -> RiccatiStepResult:
    """Solve for z_m given y_m (the y-relation at index m-1, unknown z slot)."""
    require_riccati_conditions(p)
    signs = (1,) if y_m.sign == -1 else (1, -1)
    return _solve_branches(
        (sz, _sides_r1(p, m - 1, y_m.sign, sz, y_m.amp, None)) for sz in signs
    )


def riccati_step_back_y(p: Params, m: int, z_m: ParityPair) -> RiccatiStepResult:
    """Solve for y_{m-1} given z_m (the z-relation at index m-1, unknown y)."""
    require_riccati_conditions(p)
    signs = (1,) if z_m.sign == -1 else (1, -1)
    return _solve_branches(
        (sy, _sides_r2(p, m - 1, sy, z_m.sign, None, z_m.amp)) for sy in signs
    )


# --- window evolution ----------------------------------------------------------


@dataclass(frozen=True)
class RiccatiEvolution:
    tables: Tuple[SolutionTable, ...]
    truncated: bool


def riccati_evolve(
    p: Params,
    m0: int,
    y0: ParityPair,
    window: Tuple[int, int],
    sampling: str = "endpoints",
    max_branches: int = 64,
) -> RiccatiEvolution:
    """Build concrete solution tables of the first-order subsystem.

    Starting from y at index m0, alternate the one-unknown solves forward to
    the window end and backward to its start; interval-valued solution sets
    are made concrete by the sampling policy (default: finite endpoints).
    Every emitted table satisfies both subsystem relations at every checkable
    index.  Branch counts beyond ``max_branches`` are pruned deterministically
    and flagged.
    """
    require_riccati_conditions(p)
    lo, hi = window
    if not (lo <= m0 <= hi):
        raise ValueError("initial index must lie inside the window")

    truncated = False

    def expand(branches, key, step):
        nonlocal truncated
        grown = []
        for br in branches:
            for cand in step(br).samples(sampling):
                nb = dict(br)
                nb[key] = cand
                grown.append(nb)
        if len(grown) > max_branches:
            truncated = True
            grown = grown[:max_branches]
        return grown

    branches = [{("y", m0): y0}]
    branches = expand(branches, ("z", m0), lambda br: riccati_close_z(p, m0, br[("y", m0)]))
    for m in range(m0, hi):
        branches = expand(branches, ("z", m + 1), lambda br, m=m: riccati_step_z(p, m, br[("y", m)]))
        branches = expand(branches, ("y", m + 1), lambda br, m=m: riccati_step_y(p, m, br[("z", m + 1)]))
    for m in range(m0, lo, -1):
        branches = expand(branches, ("y", m - 1), lambda br, m=m: riccati_step_back_y(p, m, br[("z", m)]))
        branches = expand(branches, ("z", m - 1), lambda br, m=m: riccati_close_z(p, m - 1, br[("y", m - 1)]))

    tables = tuple(
        SolutionTable(
            lo,
            tuple(br[("y", m)] for m in range(lo, hi + 1)),
            tuple(br[("z", m)] for m in range(lo, hi + 1)),
        )
        for br in branches
    )
    return RiccatiEvolution(tables=tables, truncated=truncated)


def riccati_failures(p: Params, table: SolutionTable) -> List[Tuple[int, str]]:
    """All (index, relation) pairs where a subsystem relation fails.

    The y->z relation is checkable for m in [lo, hi-1]; the z->y relation for
    m in [lo-1, hi-1] (it touches only indexes m+1).
    """
    bad = []
    for m in range(table.m_lo, table.m_hi):
        if not residual_riccati2(p, m, table.y(m), table.z(m + 1)):
            bad.append((m, "r2"))
    for m in range(table.m_lo - 1, table.m_hi):
        if not residual_riccati1(p, m, table.y(m + 1), table.z(m + 1)):
            bad.append((m, "r1"))
    return bad


def theorem_check(p: Params, table: SolutionTable) -> bool:
    """Verify on one table that solving the subsystem implies solving the
    full system.  False only on a counterexample, which must never happen."""
    require_riccati_conditions(p)
    if riccati_failures(p, table):
        return True  # premise fails; implication is vacuous
    return not painleve_failures(p, table)
