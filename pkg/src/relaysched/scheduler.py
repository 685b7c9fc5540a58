"""Scheduling policies for the relay-aided vehicular downlink.

A schedule partitions the fleet into relays (RV), aided vehicles (AV) and
common vehicles (CV), with a one-to-one pairing of relays to aided vehicles.
Relays and common vehicles receive their direct downlink service; each aided
vehicle receives the two-hop service of its relay pair (the weaker of the
relay's downlink amount and the relay-to-vehicle amount).  Four policies are
provided:

* `solve_msrs`            -- service-integral driven: sort by direct service,
                             take the weakest vehicles as aided, pair them
                             against the rest with the assignment solver, and
                             search the aided-vehicle count for the best total.
* `solve_irrs`            -- the identical pipeline driven by instantaneous
                             rates at the period start; the returned schedule
                             is still scored by service integrals.
* `solve_noncooperative`  -- everyone talks to the BS directly.
* `solve_optimal_bruteforce` -- exact maximizer by full enumeration of
                             partitions and pairings; only viable at small
                             fleet sizes, used as the oracle in tests.

The sort-select-pair pipeline costs O(N^3 log N) in the fleet size; the
enumeration's candidate count is sum over n_av of N!/(n_av!*(N-2*n_av)!),
which explodes quickly (hence the hard cap).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .assignment import BenefitMatrix, pad_to_square, solve_max_assignment
from .channel import RadioConfig, rb_share, snr_linear
from .scenario import Scenario
from .service import Period, QuadratureSpec, _affine_motion, unit_service_batch

BRUTE_FORCE_VEHICLE_CAP = 12


class InvalidScheduleError(ValueError):
    """A schedule violates the partition, size or pairing constraints."""


@dataclass(frozen=True)
class Schedule:
    """A vehicle partition plus relay pairing and its evaluated total service."""

    av_set: frozenset[int]
    rv_set: frozenset[int]
    cv_set: frozenset[int]
    pairing: dict[int, int] = field(default_factory=dict)  # aided id -> relay id
    n_av: int = 0
    total_service: float = 0.0


def validate_schedule(schedule: Schedule, n_vehicles: int) -> None:
    """Raise InvalidScheduleError unless the schedule is structurally sound."""
    av, rv, cv = schedule.av_set, schedule.rv_set, schedule.cv_set
    everyone = set(range(n_vehicles))
    if av | rv | cv != everyone or len(av) + len(rv) + len(cv) != n_vehicles:
        raise InvalidScheduleError("AV/RV/CV sets must partition the vehicle ids")
    if len(av) != len(rv) or schedule.n_av != len(av):
        raise InvalidScheduleError(
            f"need as many relays as aided vehicles, got {len(rv)} vs {len(av)}"
        )
    if schedule.n_av > n_vehicles // 2:
        raise InvalidScheduleError(f"n_av={schedule.n_av} exceeds floor(N/2)")
    if set(schedule.pairing) != av or set(schedule.pairing.values()) != rv:
        raise InvalidScheduleError("pairing must be a bijection from AV set onto RV set")
    if len(set(schedule.pairing.values())) != len(schedule.pairing):
        raise InvalidScheduleError("a relay cannot serve two aided vehicles")


@dataclass(frozen=True)
class ServiceTables:
    """Per-vehicle direct amounts and per-pair unit amounts for one scenario.

    `v2i[i]` is vehicle i's direct downlink amount with the RB share for the
    full fleet already applied.  `v2v_unit[i, j]` is the relay link's per-RB
    amount between i and j (symmetric); the aided-count-dependent RB share
    multiplies it on demand, so one table serves every candidate n_av.  The
    same structure holds instantaneous rates when built by
    `build_rate_tables`.
    """

    v2i: np.ndarray
    v2v_unit: np.ndarray
    k_dsrc: int

    def two_hop(self, relay: int, aided: int, n_av: int) -> float:
        """Two-hop amount from the BS to `aided` via `relay` when n_av share the V2V RBs."""
        share = rb_share(self.k_dsrc, n_av)
        return min(share * self.v2v_unit[relay, aided], self.v2i[relay])


def build_service_tables(
    scenario: Scenario,
    cfg: RadioConfig,
    period: Period | None = None,
    quad: QuadratureSpec = QuadratureSpec(),
) -> ServiceTables:
    """Service-integral tables; all links integrated in one vectorized batch."""
    period = period if period is not None else scenario.period
    n = scenario.n
    if n == 0:
        return ServiceTables(np.zeros(0), np.zeros((0, 0)), cfg.k_dsrc)
    motions_bs = np.array([_affine_motion(v, scenario.bs) for v in scenario.vehicles])
    unit_bs, _ = unit_service_batch(
        motions_bs, cfg.v2i_model, cfg.p_bs_per_rb, cfg.noise_v2i_per_rb, period, quad
    )
    v2i = rb_share(cfg.k_lte, n) * unit_bs

    v2v_unit = np.zeros((n, n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    if pairs:
        motions = np.array(
            [_affine_motion(scenario.vehicles[i], scenario.vehicles[j]) for i, j in pairs]
        )
        vals, _ = unit_service_batch(
            motions, cfg.v2v_model, cfg.p_vn_per_rb, cfg.noise_v2v_per_rb, period, quad
        )
        rows = np.fromiter((p[0] for p in pairs), dtype=int)
        cols = np.fromiter((p[1] for p in pairs), dtype=int)
        v2v_unit[rows, cols] = vals
        v2v_unit[cols, rows] = vals
    return ServiceTables(v2i, v2v_unit, cfg.k_dsrc)


def build_rate_tables(scenario: Scenario, cfg: RadioConfig) -> ServiceTables:
    """Instantaneous-rate tables at the period start (dt = 0), same layout."""
    n = scenario.n
    if n == 0:
        return ServiceTables(np.zeros(0), np.zeros((0, 0)), cfg.k_dsrc)
    x = np.array([v.x for v in scenario.vehicles])
    y = np.array([v.y for v in scenario.vehicles])
    d_bs = np.hypot(x - scenario.bs.x, y - scenario.bs.y)
    m = cfg.v2i_model
    loss = m.reference_loss + m.slope * np.log10(np.maximum(d_bs, m.min_distance) / m.distance_divisor)
    v2i = rb_share(cfg.k_lte, n) * np.log2(
        1.0 + snr_linear(cfg.p_bs_per_rb, loss, cfg.noise_v2i_per_rb)
    )

    d = np.hypot(x[:, None] - x[None, :], y[:, None] - y[None, :])
    mv = cfg.v2v_model
    loss_v = mv.reference_loss + mv.slope * np.log10(
        np.maximum(d, mv.min_distance) / mv.distance_divisor
    )
    v2v_unit = np.log2(1.0 + snr_linear(cfg.p_vn_per_rb, loss_v, cfg.noise_v2v_per_rb))
    np.fill_diagonal(v2v_unit, 0.0)
    return ServiceTables(v2i, v2v_unit, cfg.k_dsrc)


def _partition_total(tables: ServiceTables, av_ids, pairing: dict[int, int]) -> float:
    """Objective value of a partition: direct amounts plus paired two-hop amounts.

    Summation order is pinned (ascending ids, direct part then relay part) so
    that every policy and re-evaluation reproduces identical floats.
    """
    n = tables.v2i.shape[0]
    av_set = set(av_ids)
    v2i = tables.v2i
    direct = sum(float(v2i[i]) for i in range(n) if i not in av_set)
    n_av = len(av_set)
    if n_av == 0:
        return direct
    share = rb_share(tables.k_dsrc, n_av)
    unit = tables.v2v_unit
    relay = sum(
        min(share * float(unit[pairing[j], j]), float(v2i[pairing[j]]))
        for j in sorted(av_set)
    )
    return direct + relay


def evaluate_schedule(
    schedule: Schedule,
    scenario: Scenario,
    cfg: RadioConfig,
    period: Period | None = None,
    quad: QuadratureSpec = QuadratureSpec(),
    tables: ServiceTables | None = None,
) -> float:
    """Total service amount of a structurally valid schedule."""
    validate_schedule(schedule, scenario.n)
    if tables is None:
        tables = build_service_tables(scenario, cfg, period, quad)
    return _partition_total(tables, schedule.av_set, schedule.pairing)


def _sorted_by_direct(tables: ServiceTables) -> list[int]:
    # descending direct amount, ties by ascending id
    v2i = tables.v2i
    return sorted(range(v2i.shape[0]), key=lambda i: (-v2i[i], i))


def _pair_candidates(tables: ServiceTables, order: list[int], n_av: int):
    """Pipeline step for one aided-vehicle count: select, pair, and score.

    Takes the `n_av` weakest vehicles (tail of the sorted order) as aided,
    builds the benefit matrix of two-hop amounts against the remaining
    candidates, pads it square and solves the assignment.  Candidate rows
    that win no aided vehicle fall back to common-vehicle service.
    Returns (total, av_ids, pairing).
    """
    n = len(order)
    if n_av == 0:
        return _partition_total(tables, (), {}), (), {}
    avs = order[n - n_av:]
    cands = order[: n - n_av]
    share = rb_share(tables.k_dsrc, n_av)
    w_vals = np.minimum(
        share * tables.v2v_unit[np.ix_(cands, avs)], tables.v2i[cands][:, None]
    )
    solved = solve_max_assignment(pad_to_square(BenefitMatrix(w_vals)))
    pairing = {avs[c]: cands[r] for c, r in solved.match.items()}
    total = _partition_total(tables, avs, pairing)
    return total, tuple(avs), pairing


def _benefit_upper_bound(tables: ServiceTables, order: list[int], n_av: int) -> float:
    """Cheap upper bound on `_pair_candidates` total: column maxima, no matching."""
    n = len(order)
    if n_av == 0:
        return _partition_total(tables, (), {})
    avs = order[n - n_av:]
    cands = order[: n - n_av]
    share = rb_share(tables.k_dsrc, n_av)
    av_set = set(avs)
    direct = sum(float(tables.v2i[i]) for i in range(n) if i not in av_set)
    if share == 0:
        return direct
    w_vals = np.minimum(
        share * tables.v2v_unit[np.ix_(cands, avs)], tables.v2i[cands][:, None]
    )
    return direct + float(w_vals.max(axis=0).sum())


def _schedule_from_parts(n: int, av_ids, pairing: dict[int, int], total: float) -> Schedule:
    av = frozenset(av_ids)
    rv = frozenset(pairing.values())
    cv = frozenset(range(n)) - av - rv
    return Schedule(av, rv, cv, dict(pairing), len(av), float(total))


def _golden_argmax(f, lo: int, hi: int) -> dict[int, float]:
    """Golden-section probe of an integer-argument objective assumed unimodal.

    Returns every evaluated point; the caller picks the argmax.  Endpoints are
    always evaluated.  On non-unimodal objectives this can miss the global
    maximum, which is why it is an opt-in search mode.
    """
    evals: dict[int, float] = {}

    def g(k: int) -> float:
        if k not in evals:
            evals[k] = f(k)
        return evals[k]

    g(lo)
    g(hi)
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    while b - a > 2:
        span = b - a
        c = max(a + 1, b - int(round(inv_phi * span)))
        d = min(b - 1, a + int(round(inv_phi * span)))
        if c >= d:
            break
        if g(c) < g(d):
            a = c
        else:
            b = d
    for k in range(a, b + 1):
        g(k)
    return evals


def _best_partition(tables: ServiceTables, search_mode: str):
    """Search the aided-vehicle count; returns (total, av_ids, pairing)."""
    n = tables.v2i.shape[0]
    order = _sorted_by_direct(tables)
    n_max = n // 2
    if search_mode == "exhaustive":
        best = _pair_candidates(tables, order, 0)
        for n_av in range(1, n_max + 1):
            # the margin keeps the prune sound across summation-order roundoff
            bound = _benefit_upper_bound(tables, order, n_av)
            if bound + 1e-9 * (1.0 + abs(bound)) <= best[0]:
                continue
            cand = _pair_candidates(tables, order, n_av)
            if cand[0] > best[0]:
                best = cand
        return best
    if search_mode == "golden":
        cache: dict[int, tuple] = {}

        def f(n_av: int) -> float:
            cache[n_av] = _pair_candidates(tables, order, n_av)
            return cache[n_av][0]

        evals = _golden_argmax(f, 0, n_max)
        best_n = max(evals, key=lambda k: (evals[k], -k))
        return cache[best_n]
    raise ValueError(f"unknown search_mode {search_mode!r} (use 'exhaustive' or 'golden')")


def solve_msrs(
    scenario: Scenario,
    cfg: RadioConfig,
    period: Period | None = None,
    quad: QuadratureSpec = QuadratureSpec(),
    search_mode: str = "exhaustive",
    tables: ServiceTables | None = None,
) -> Schedule:
    """Service-integral-driven schedule (sort, select, pair, search the AV count)."""
    if tables is None:
        tables = build_service_tables(scenario, cfg, period, quad)
    total, av_ids, pairing = _best_partition(tables, search_mode)
    return _schedule_from_parts(scenario.n, av_ids, pairing, total)


def solve_irrs(
    scenario: Scenario,
    cfg: RadioConfig,
    period: Period | None = None,
    quad: QuadratureSpec = QuadratureSpec(),
    tables: ServiceTables | None = None,
    rate_tables: ServiceTables | None = None,
) -> Schedule:
    """Rate-driven schedule: decisions use period-start rates, scoring uses integrals.

    The pipeline is identical to `solve_msrs` but every decision quantity is
    the instantaneous rate at the period start.  The chosen structure is then
    evaluated with mobile-service integrals so totals are comparable across
    policies.
    """
    if rate_tables is None:
        rate_tables = build_rate_tables(scenario, cfg)
    _, av_ids, pairing = _best_partition(rate_tables, "exhaustive")
    if tables is None:
        tables = build_service_tables(scenario, cfg, period, quad)
    total = _partition_total(tables, av_ids, pairing)
    return _schedule_from_parts(scenario.n, av_ids, pairing, total)


def solve_noncooperative(
    scenario: Scenario,
    cfg: RadioConfig,
    period: Period | None = None,
    quad: QuadratureSpec = QuadratureSpec(),
    tables: ServiceTables | None = None,
) -> Schedule:
    """Everyone direct to the BS; no relaying, no V2V resource use."""
    if tables is None:
        tables = build_service_tables(scenario, cfg, period, quad)
    total = _partition_total(tables, (), {})
    return _schedule_from_parts(scenario.n, (), {}, total)


def solve_optimal_bruteforce(
    scenario: Scenario,
    cfg: RadioConfig,
    period: Period | None = None,
    quad: QuadratureSpec = QuadratureSpec(),
    cap: int = BRUTE_FORCE_VEHICLE_CAP,
    tables: ServiceTables | None = None,
) -> Schedule:
    """Exact optimum by enumerating every partition and pairing.

    The candidate count is sum over n_av of N!/(n_av!*(N-2*n_av)!); the cap
    keeps that tractable (N=12 is ~3.6 million candidates).
    """
    n = scenario.n
    if n > cap:
        counts = sum(
            math.factorial(n) // (math.factorial(k) * math.factorial(n - 2 * k))
            for k in range(n // 2 + 1)
        )
        raise ValueError(
            f"refusing exhaustive search for {n} vehicles ({counts} candidate "
            f"schedules); cap is {cap}"
        )
    if tables is None:
        tables = build_service_tables(scenario, cfg, period, quad)
    v2i_list = tables.v2i.tolist()
    ids = list(range(n))

    best_total = _partition_total(tables, (), {})
    best_av: tuple = ()
    best_pairing: dict[int, int] = {}
    for n_av in range(1, n // 2 + 1):
        share = rb_share(tables.k_dsrc, n_av)
        if share == 0:
            continue  # zero relay benefit can never beat the all-direct baseline
        w = np.minimum(share * tables.v2v_unit, tables.v2i[:, None]).tolist()
        for av in itertools.combinations(ids, n_av):
            av_set = set(av)
            direct = sum(v2i_list[i] for i in ids if i not in av_set)
            rest = [i for i in ids if i not in av_set]
            bound = direct + sum(max(w[r][a] for r in rest) for a in av)
            if bound <= best_total:
                continue
            for rvs in itertools.combinations(rest, n_av):
                for perm in itertools.permutations(rvs):
                    relay = 0.0
                    for r, a in zip(perm, av):
                        relay += w[r][a]
                    total = direct + relay
                    if total > best_total:
                        best_total = total
                        best_av = av
                        best_pairing = {a: r for r, a in zip(perm, av)}
    return _schedule_from_parts(n, best_av, best_pairing, best_total)


def pairs_respect_direct_order(schedule: Schedule, per_vehicle, tol: float = 1e-9) -> bool:
    """True when no aided vehicle has a larger direct amount than its own relay."""
    return all(
        per_vehicle[j] <= per_vehicle[i] + tol * max(1.0, abs(per_vehicle[i]))
        for j, i in schedule.pairing.items()
    )


def aided_are_weakest(schedule: Schedule, per_vehicle, tol: float = 1e-9) -> bool:
    """True when every aided vehicle's direct amount is below everyone else's.

    This is the structural mark of the sort-then-select pipeline: the aided
    set is exactly the tail of the direct-amount ordering (up to ties).
    """
    if not schedule.av_set:
        return True
    others = schedule.rv_set | schedule.cv_set
    if not others:
        return True
    worst_kept = min(per_vehicle[i] for i in others)
    best_aided = max(per_vehicle[j] for j in schedule.av_set)
    return best_aided <= worst_kept + tol * max(1.0, abs(worst_kept))
