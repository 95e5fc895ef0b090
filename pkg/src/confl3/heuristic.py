"""Primal heuristic: LP-guided probabilistic fixing plus exact neighborhood search.

The construction phase opens facilities technology by technology (fiber,
copper, wireless), sampling each opening from a distribution that blends an
a-priori score (relaxation of the strengthened model with that opening
forced, computed once up front) with an a-posteriori score (relaxation of
the plain model under the current partial fixing).  Completed opening
states are checked by an exact solve with the openings pinned; infeasible
ones go through a repair pass that re-solves inside a hamming ball around
the fixing.  A final improvement pass runs the same neighborhood search
around the best solution with an objective cutoff.

Both relaxation families are solved on shared prepared matrices with only
bound vectors changing per query, and query results are memoized on the
fixing set.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import bnb, simplex
from .confl import ConflModel, Instance, build_3confl, strengthen, validate_instance
from .milp import LE, Assignment, apply_fixings

EPS_TAU = 1e-9

CHECK_STATUS_OK = ("optimal", "feasible")


class NoCompletableFosError(RuntimeError):
    """Construction ran out of admissible openings while still partial.

    Carries the partial opening state built so far: the driver can still
    hand it to the repair search, which accepts incomplete fixings.
    """

    def __init__(self, message: str, partial: "FOS"):
        super().__init__(message)
        self.partial = partial


class UnattainableCoverageError(ValueError):
    def __init__(self, technology: int, needed: float, available: float):
        self.technology = technology
        super().__init__(
            f"coverage threshold for technology {technology} is unattainable: "
            f"needs {needed}, reachable weight {available}"
        )


@dataclass(frozen=True)
class FOS:
    """Facility opening state: a set of (facility, technology) activations
    where no facility appears on two technologies."""

    entries: frozenset = frozenset()

    def __post_init__(self):
        facilities = [f for f, _ in self.entries]
        if len(set(facilities)) != len(facilities):
            raise ValueError("a facility cannot be opened on two technologies")

    def facilities(self) -> set:
        return {f for f, _ in self.entries}

    def with_entry(self, fid: str, tech: int) -> "FOS":
        return FOS(self.entries | {(fid, tech)})

    def sorted_entries(self) -> list[tuple[str, int]]:
        return sorted(self.entries)


@dataclass
class AttractivenessTable:
    tau: dict[tuple[str, int], float]
    tau0: dict[tuple[str, int], float]
    iteration: int = 0


@dataclass
class HeuristicParams:
    alpha: float = 0.5
    sigma_count: int = 5
    vlns_radius: int | None = None        # None: max(2, ceil(0.2 |F|))
    global_time_limit: float = 3600.0
    outer_loop_limit: float = 3000.0
    subproblem_time_limit: float = 60.0
    vlns_time_limit: float = 600.0
    rng_seed: int = 0
    top_k: int = 10                       # candidate pool cap per step; 0 = unlimited
    test_iterations: int | None = None    # outer-loop cap replacing wall clocks

    def validate(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must be in [0, 1]")
        if self.sigma_count < 1:
            raise ValueError("sigma_count must be >= 1")
        for name in ("global_time_limit", "outer_loop_limit",
                     "subproblem_time_limit", "vlns_time_limit"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.vlns_radius is not None and self.vlns_radius < 0:
            raise ValueError("vlns_radius must be >= 0")
        if self.test_iterations is not None and self.test_iterations < 1:
            raise ValueError("test_iterations must be >= 1")

    def radius(self, n_facilities: int) -> int:
        if self.vlns_radius is not None:
            return self.vlns_radius
        return max(2, math.ceil(0.2 * n_facilities))

    def sub_limit(self) -> float:
        return math.inf if self.test_iterations is not None else self.subproblem_time_limit

    def vlns_limit(self) -> float:
        return math.inf if self.test_iterations is not None else self.vlns_time_limit


@dataclass
class SolveOutcome:
    status: str                       # optimal | feasible | infeasible | timeout
    assignment: Assignment | None
    objective: float | None
    repaired: bool = False

    def has_solution(self) -> bool:
        return self.assignment is not None


@dataclass
class RunResult:
    status: str                       # feasible | no_solution
    assignment: Assignment | None
    objective: float | None
    lower_bound: float
    gap: float | None
    trace: list[dict]
    iterations: int


class HeuristicContext:
    """Shared solver state for one instance: both models, their prepared
    relaxations, the strengthened root bound and a memo of fixing LPs."""

    def __init__(self, instance: Instance):
        validate_instance(instance)
        self.instance = instance
        self.plain = build_3confl(instance)
        self.strong = strengthen(self.plain, instance)
        self.plain_prep = simplex.prepare(self.plain.model)
        self.strong_prep = simplex.prepare(self.strong.model)
        self.base_lo = np.array([v.lower for v in self.plain.model.variables])
        self.base_hi = np.array([v.upper for v in self.plain.model.variables])
        root = self._relaxation_value(self.strong_prep, ())
        if root is None:
            raise ValueError("strengthened relaxation is infeasible; instance unsolvable")
        self.root_value = root
        self.weights = {u.id: u.weight for u in instance.users}
        self.potential: dict[tuple[str, int], float] = {}
        for t in instance.technologies:
            reach: dict[str, float] = {}
            for a in instance.assignment_arcs.get(t, []):
                reach[a.facility] = reach.get(a.facility, 0.0) + self.weights[a.user]
            for f in instance.facilities:
                self.potential[f.id, t] = reach.get(f.id, 0.0)
        self._memo: dict[tuple[bool, frozenset], float | None] = {}

    def _relaxation_value(self, prep, ones: tuple) -> float | None:
        lo = self.base_lo.copy()
        for key in ones:
            lo[self.plain.z[key]] = 1.0
        res = simplex.solve_prepared(prep, lo, self.base_hi)
        if res.status != simplex.OPTIMAL:
            return None
        return res.objective

    def relaxation_value(self, strong: bool, ones: frozenset) -> float | None:
        """Optimal value of the (strengthened or plain) relaxation with the
        given (facility, technology) openings forced to 1; None if infeasible."""
        key = (strong, ones)
        if key not in self._memo:
            prep = self.strong_prep if strong else self.plain_prep
            self._memo[key] = self._relaxation_value(prep, tuple(sorted(ones)))
        return self._memo[key]

    def score(self, value: float | None) -> float:
        """Invert a relaxation value into an attractiveness in (0, 1]:
        cheap fixings score high, infeasible ones hit the floor."""
        if value is None:
            return EPS_TAU
        if value < 1e-12:
            return 1.0
        return max(EPS_TAU, self.root_value / value)


def ogap(v: float, lower: float) -> float:
    """Optimality gap (v - L) / v of a feasible value against a lower bound."""
    if not v > 0:
        raise ValueError(f"ogap needs a positive feasible value, got {v}")
    if lower > v:
        raise ValueError(f"bound inconsistency: lower bound {lower} exceeds value {v}")
    return (v - lower) / v


def is_complete(fos: FOS, instance: Instance, tech: int,
                ctx: HeuristicContext | None = None) -> bool:
    """Whether the opening state reaches the coverage threshold of `tech`.

    Users reachable from several opened facilities count once per facility;
    the measure is an optimistic potential, not a service plan.
    """
    if ctx is not None:
        total = sum(ctx.potential[f, t] for f, t in fos.entries if t == tech)
    else:
        total = sum(
            instance.potential_weight(f, t) for f, t in fos.entries if t == tech
        )
    return total >= instance.coverage_thresholds[tech] - 1e-9


def attractiveness_init(instance: Instance,
                        ctx: HeuristicContext | None = None) -> AttractivenessTable:
    """One strengthened-relaxation solve per (facility, technology) opening;
    scores are the root value over the fixed value, floored when infeasible."""
    ctx = ctx or HeuristicContext(instance)
    tau: dict[tuple[str, int], float] = {}
    for f in instance.facilities:
        for t in instance.technologies:
            value = ctx.relaxation_value(True, frozenset([(f.id, t)]))
            tau[f.id, t] = ctx.score(value)
    return AttractivenessTable(tau=dict(tau), tau0=dict(tau))


def posterior_attractiveness(instance: Instance, current_fos: FOS,
                             candidate: tuple[str, int],
                             ctx: HeuristicContext | None = None) -> float:
    """Plain-relaxation score of extending the opening state by `candidate`."""
    fid, tech = candidate
    if fid in current_fos.facilities() and (fid, tech) not in current_fos.entries:
        raise ValueError(f"candidate {candidate} clashes with the opening state")
    ctx = ctx or HeuristicContext(instance)
    value = ctx.relaxation_value(False, current_fos.entries | {candidate})
    return ctx.score(value)


def fixing_probabilities(candidates: list, tau: np.ndarray | list,
                         eta: np.ndarray | list, alpha: float) -> np.ndarray:
    """Convex blend of the a-priori and a-posteriori scores, normalized."""
    if not len(candidates):
        raise ValueError("no candidates to choose from")
    tau = np.asarray(tau, dtype=float)
    eta = np.asarray(eta, dtype=float)
    if tau.shape != (len(candidates),) or eta.shape != (len(candidates),):
        raise ValueError("tau/eta must align with candidates")
    if np.any(tau <= 0) or np.any(eta <= 0):
        raise ValueError("attractiveness scores must be positive")
    scores = alpha * tau + (1.0 - alpha) * eta
    return scores / scores.sum()


def build_fos(instance: Instance, tau: AttractivenessTable, params: HeuristicParams,
              rng: np.random.Generator, ctx: HeuristicContext | None = None) -> FOS:
    """Sample a fully complete opening state, fiber first, wireless last."""
    ctx = ctx or HeuristicContext(instance)
    fos = FOS()
    for tech in instance.technologies:
        while not is_complete(fos, instance, tech, ctx):
            used = fos.facilities()
            # Admissible: not clashing with the state and actually able to
            # move the completeness measure for this technology.
            candidates = [
                (f.id, tech)
                for f in instance.facilities
                if f.id not in used and ctx.potential[f.id, tech] > 0
            ]
            if not candidates:
                raise NoCompletableFosError(
                    f"no admissible opening left for technology {tech}", fos
                )
            if params.top_k and len(candidates) > params.top_k:
                candidates.sort(key=lambda c: (-tau.tau[c], c[0]))
                candidates = candidates[: params.top_k]
            tau_vals = [tau.tau[c] for c in candidates]
            eta_vals = [
                posterior_attractiveness(instance, fos, c, ctx) for c in candidates
            ]
            probs = fixing_probabilities(candidates, tau_vals, eta_vals, params.alpha)
            pick = int(rng.choice(len(candidates), p=probs))
            fos = fos.with_entry(*candidates[pick])
    return fos


def _fos_fixings(confl: ConflModel, fos: FOS) -> dict[int, float]:
    """Pin opened couples to 1 and the other technologies of those
    facilities to 0; facilities outside the state stay free."""
    fixings: dict[int, float] = {}
    for fid, tech in fos.entries:
        for t in confl.technologies:
            fixings[confl.z[fid, t]] = 1.0 if t == tech else 0.0
    return fixings


def _outcome_from_mip(res: bnb.MipResult, repaired: bool) -> SolveOutcome:
    status = {
        bnb.OPTIMAL: "optimal",
        bnb.FEASIBLE: "feasible",
        bnb.INFEASIBLE: "infeasible",
        bnb.TIMEOUT_NO_INCUMBENT: "timeout",
    }[res.status]
    return SolveOutcome(status, res.incumbent, res.objective, repaired)


def check_and_repair(instance: Instance, confl: ConflModel, fos: FOS,
                     params: HeuristicParams) -> SolveOutcome:
    """Solve with the opening state pinned; on proved infeasibility or a
    bound-out with no incumbent, retry inside a hamming ball around it."""
    fixings = _fos_fixings(confl, fos)
    res = bnb.solve_mip(apply_fixings(confl.model, fixings), params.sub_limit())
    if res.has_solution():
        return _outcome_from_mip(res, repaired=False)
    center = {
        (fid, t): 1.0 if (fid, t) in fos.entries else 0.0
        for fid in fos.facilities()
        for t in confl.technologies
    }
    repaired = vlns(instance, confl, center, params, mode="repair")
    return SolveOutcome(repaired.status, repaired.assignment, repaired.objective, True)


def vlns(instance: Instance, confl: ConflModel, center: dict[tuple[str, int], float],
         params: HeuristicParams, mode: str = "improve",
         incumbent_value: float | None = None,
         radius: int | None = None) -> SolveOutcome:
    """Exact very-large-neighborhood search: re-solve the model under a
    hamming-distance cap around `center` on the opening variables.

    `center` maps (facility, technology) to 0/1 over the coordinates it
    pins; other opening variables do not enter the distance.  In improve
    mode an objective cutoff strictly below `incumbent_value` is added, so
    only improving solutions can come back.
    """
    if mode not in ("repair", "improve"):
        raise ValueError(f"unknown vlns mode {mode!r}")
    if mode == "improve" and incumbent_value is None:
        raise ValueError("improve mode needs the incumbent objective")
    n = params.radius(len(instance.facilities)) if radius is None else radius

    model = confl.model.copy()
    terms = []
    ones = 0
    for key, value in sorted(center.items()):
        zid = confl.z[key]
        if value >= 0.5:
            terms.append((zid, -1.0))
            ones += 1
        else:
            terms.append((zid, 1.0))
    if terms:
        model.add_constraint(terms, LE, float(n - ones), "VLNS_HAMMING")
    if mode == "improve":
        # Margin well above the LP feasibility tolerance, or the solver can
        # tolerance-accept points sitting on the cutoff plane.
        cutoff = incumbent_value - 1e-4 * max(1.0, abs(incumbent_value))
        obj_terms = [(vid, cost) for vid, cost in model.objective.items()]
        model.add_constraint(obj_terms, LE, cutoff, "VLNS_CUTOFF")
    res = bnb.solve_mip(model, params.vlns_limit())
    return _outcome_from_mip(res, repaired=(mode == "repair"))


def tau_update(tau: AttractivenessTable, sigma_solutions: list[tuple[FOS, float]],
               v_bar: float, lower: float) -> AttractivenessTable:
    """Reward openings used by better-than-average solutions, penalize the
    rest, always relative to the initial score; floored at EPS_TAU.

    Each solution contributes only to the couples of the opening state it
    was built from.  Degenerate baseline (zero average gap) skips the
    update.
    """
    base_gap = ogap(v_bar, min(lower, v_bar))
    if base_gap <= 1e-15:
        return tau
    new_tau = dict(tau.tau)
    for fos, value in sigma_solutions:
        rel = (base_gap - ogap(value, min(lower, value))) / base_gap
        for key in fos.entries:
            new_tau[key] = max(EPS_TAU, new_tau[key] + tau.tau0[key] * rel)
    return AttractivenessTable(tau=new_tau, tau0=dict(tau.tau0), iteration=tau.iteration + 1)


def check_attainable(instance: Instance) -> None:
    """Raise when some coverage threshold exceeds the total reachable weight
    of its technology (the completeness measure can then never be met)."""
    weights = {u.id: u.weight for u in instance.users}
    for t in instance.technologies:
        available = sum(
            weights[a.user] for a in instance.assignment_arcs.get(t, [])
        )
        needed = instance.coverage_thresholds[t]
        if available < needed - 1e-9:
            raise UnattainableCoverageError(t, needed, available)


def run(instance: Instance, params: HeuristicParams) -> RunResult:
    """Full two-loop driver; see the module docstring for the shape.

    Wall-clock limits govern the outer loop and the final improvement pass
    unless `params.test_iterations` is set, which swaps every clock for
    deterministic iteration caps.
    """
    params.validate()
    check_attainable(instance)
    ctx = HeuristicContext(instance)
    lower = ctx.root_value
    tau = attractiveness_init(instance, ctx)
    rng = np.random.default_rng(params.rng_seed)

    best: SolveOutcome | None = None
    trace: list[dict] = []
    prev_values: list[float] = []
    start = time.monotonic()
    outer = 0

    while True:
        if params.test_iterations is not None:
            if outer >= params.test_iterations:
                break
        else:
            elapsed = time.monotonic() - start
            if elapsed >= min(params.outer_loop_limit, params.global_time_limit):
                break
        outer += 1

        inner_best: SolveOutcome | None = None
        solutions: list[tuple[FOS, float]] = []
        for sigma in range(1, params.sigma_count + 1):
            entry = {"outer": outer, "sigma": sigma, "fos": None, "partial": False,
                     "repaired": False, "objective": None, "best": None}
            try:
                fos = build_fos(instance, tau, params, rng, ctx)
            except NoCompletableFosError as exc:
                # Coverage already satisfiable through better technologies can
                # deadlock the per-technology completeness measure; fall back
                # to repairing the partial fixing built so far.
                fos = exc.partial
                entry["partial"] = True
            entry["fos"] = [list(e) for e in fos.sorted_entries()]
            outcome = check_and_repair(instance, ctx.plain, fos, params)
            entry["repaired"] = outcome.repaired
            if outcome.has_solution():
                solutions.append((fos, outcome.objective))
                entry["objective"] = outcome.objective
                if inner_best is None or outcome.objective < inner_best.objective:
                    inner_best = outcome
            entry["best"] = None if inner_best is None else inner_best.objective
            trace.append(entry)

        if prev_values and solutions:
            v_bar = float(np.mean(prev_values))
            if v_bar > lower > 0:
                tau = tau_update(tau, solutions, v_bar, lower)
        if solutions:
            prev_values = [value for _, value in solutions]
        if inner_best is not None and (
            best is None or inner_best.objective < best.objective
        ):
            best = inner_best

    if best is not None:
        center = {
            key: best.assignment[zid] for key, zid in ctx.plain.z.items()
        }
        improved = vlns(instance, ctx.plain, center, params, mode="improve",
                        incumbent_value=best.objective)
        if improved.has_solution() and improved.objective < best.objective:
            best = improved

    if best is None:
        return RunResult("no_solution", None, None, lower, None, trace, outer)
    objective = best.objective
    gap = 0.0 if objective <= 0 else ogap(objective, min(lower, objective))
    return RunResult("feasible", best.assignment, objective,
                     min(lower, objective), gap, trace, outer)
