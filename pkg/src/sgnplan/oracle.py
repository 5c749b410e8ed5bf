"""Reference solvers: exact branch-and-bound, random search, and a greedy baseline.

PlacementSim re-implements the decoder's placement rules step by step in
plain Python over the instance objects. It exists so the compiled decoder can
be checked against an independent route, and so the exact solver can branch
over every legal placement instead of committing to the first fit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .decoder import associate_feed_windows, get_context
from .model import SATELLITE, AntennaRef, Instance, Placement, Schedule, Task


def _position(intervals, s):
    lo, hi = 0, len(intervals)
    while lo < hi:
        mid = (lo + hi) // 2
        if intervals[mid][0] < s:
            lo = mid + 1
        else:
            hi = mid
    return lo


def _gap_ok(intervals, s, e, gap):
    pos = _position(intervals, s)
    if pos > 0 and s - intervals[pos - 1][1] < gap:
        return False
    if pos < len(intervals) and intervals[pos][0] - e < gap:
        return False
    return True


def _overlap_free(intervals, s, e):
    pos = _position(intervals, s)
    if pos > 0 and intervals[pos - 1][1] > s:
        return False
    if pos < len(intervals) and intervals[pos][0] < e:
        return False
    return True


def _owner(ref: AntennaRef):
    kind = SATELLITE if ref.kind == SATELLITE else "ground"
    return (kind, ref.owner)


@dataclass(frozen=True)
class SimOption:
    """One legal placement for a task in the simulator's current state."""

    window_id: int
    start: int
    end: int
    feed_window_id: Optional[int] = None


class PlacementSim:
    """Mutable mirror of the decoder's placement state over one instance."""

    def __init__(self, instance: Instance):
        self.instance = instance
        self.assoc = associate_feed_windows(instance)
        self.window_pieces = {w.id: [(w.start, w.end)] for w in instance.windows}
        self.feed_pieces = {f.id: [(f.start, f.end)] for f in instance.feed_windows}
        self.antenna_busy: dict[AntennaRef, list] = {}
        self.owner_busy: dict[tuple, list] = {}
        self.placements: list[Placement] = []

    # -- state plumbing ----------------------------------------------------

    def snapshot(self):
        return (
            self.placements[:],
            {k: v[:] for k, v in self.window_pieces.items()},
            {k: v[:] for k, v in self.feed_pieces.items()},
            {k: v[:] for k, v in self.antenna_busy.items()},
            {k: v[:] for k, v in self.owner_busy.items()},
        )

    def restore(self, snap) -> None:
        (self.placements, self.window_pieces, self.feed_pieces,
         self.antenna_busy, self.owner_busy) = (
            snap[0][:],
            {k: v[:] for k, v in snap[1].items()},
            {k: v[:] for k, v in snap[2].items()},
            {k: v[:] for k, v in snap[3].items()},
            {k: v[:] for k, v in snap[4].items()},
        )

    def placement_key(self):
        return frozenset(
            (p.task_id, p.window_id, p.feed_window_id, p.start, p.end)
            for p in self.placements)

    def _busy(self, table, key):
        lst = table.get(key)
        if lst is None:
            lst = []
            table[key] = lst
        return lst

    def _clear_for(self, intervals) -> bool:
        for ref, s, e, gap in intervals:
            if e <= s:
                continue
            ant = self._busy(self.antenna_busy, ref)
            if not _gap_ok(ant, s, e, gap):
                return False
            own = self._busy(self.owner_busy, _owner(ref))
            if not _overlap_free(own, s, e):
                return False
        return True

    def _commit(self, intervals) -> None:
        for ref, s, e, _gap in intervals:
            if e <= s:
                continue
            ant = self._busy(self.antenna_busy, ref)
            ant.insert(_position(ant, s), (s, e))
            own = self._busy(self.owner_busy, _owner(ref))
            own.insert(_position(own, s), (s, e))

    def _intervals(self, w, st, et, feed):
        alpha = self.instance.timing.setup_gap
        gamma = self.instance.timing.switch_gap
        if feed is None:
            return [(w.sat_antenna, st, et, alpha), (w.ground_antenna, st, et, gamma)]
        return [
            (w.sat_antenna, st, et, alpha),
            (w.ground_antenna, st, w.end, gamma),
            (feed.ground_antenna, w.end, et, gamma),
        ]

    # -- placement rules ---------------------------------------------------

    def options(self, task: Task, limit: Optional[int] = None) -> list[SimOption]:
        """Legal placements for the task, in the decoder's scan order."""
        inst = self.instance
        d = task.duration
        scan = []
        for w in inst.windows:
            for ps, pe in self.window_pieces[w.id]:
                scan.append((ps, w.id, pe, w))
        scan.sort(key=lambda item: (item[0], item[1]))

        found: list[SimOption] = []
        for ps, wid, pe, w in scan:
            if ps > task.let - d or pe < task.est:
                continue
            aest = max(task.est, ps)
            alet = min(task.let, pe)
            et = aest + d
            if et <= alet and self._clear_for(self._intervals(w, aest, et, None)):
                found.append(SimOption(wid, aest, et))
            else:
                fid = self.assoc.get(wid)
                if fid is None or pe != w.end or et < pe or et > task.let:
                    continue
                feed = inst.feed_windows_by_id[fid]
                cover = None
                for fs, fe in self.feed_pieces[fid]:
                    if fs > pe:
                        break
                    if fe >= et:
                        cover = (fs, fe)
                        break
                if cover is None:
                    continue
                if self._clear_for(self._intervals(w, aest, et, feed)):
                    found.append(SimOption(wid, aest, et, fid))
            if limit is not None and len(found) >= limit:
                break
        return found

    def apply(self, task: Task, opt: SimOption) -> None:
        inst = self.instance
        w = inst.windows_by_id[opt.window_id]
        pieces = self.window_pieces[opt.window_id]
        idx = next(i for i, (ps, pe) in enumerate(pieces)
                   if ps <= opt.start and (pe >= opt.end if opt.feed_window_id is None
                                           else pe == w.end))
        ps, pe = pieces[idx]
        if opt.feed_window_id is None:
            repl = []
            if opt.start > ps:
                repl.append((ps, opt.start))
            if pe > opt.end:
                repl.append((opt.end, pe))
            pieces[idx:idx + 1] = repl
            self._commit(self._intervals(w, opt.start, opt.end, None))
        else:
            pieces[idx:idx + 1] = [(ps, opt.start)] if opt.start > ps else []
            fpieces = self.feed_pieces[opt.feed_window_id]
            fidx = next(i for i, (fs, fe) in enumerate(fpieces)
                        if fs <= w.end and fe >= opt.end)
            fs, fe = fpieces[fidx]
            # everything before the run's end leaves the pool with the piece
            fpieces[fidx:fidx + 1] = [(opt.end, fe)] if fe > opt.end else []
            feed = inst.feed_windows_by_id[opt.feed_window_id]
            self._commit(self._intervals(w, opt.start, opt.end, feed))
        self.placements.append(Placement(
            task_id=task.id, window_id=opt.window_id,
            start=opt.start, end=opt.end, feed_window_id=opt.feed_window_id))

    def run_first_fit(self, permutation) -> Schedule:
        """Place each task at its first legal option; mirrors decode()."""
        unscheduled = []
        for tid in permutation:
            task = self.instance.tasks_by_id[tid]
            opts = self.options(task, limit=1)
            if opts:
                self.apply(task, opts[0])
            else:
                unscheduled.append(tid)
        return Schedule(tuple(self.placements), tuple(unscheduled))


# --------------------------------------------------------------------------
# solvers

@dataclass(frozen=True)
class OracleResult:
    fitness: int
    schedule: Schedule
    nodes: int


@dataclass(frozen=True)
class SearchResult:
    fitness: int
    schedule: Schedule
    history: np.ndarray


def exact_optimum(instance: Instance, max_tasks: int = 10) -> OracleResult:
    """Maximum achievable profit by depth-first search over all placements.

    Branches over every legal option (and skipping) for each task in
    descending-profit order, with a profit bound and a visited-state table.
    Exponential; refuses instances above max_tasks.
    """
    tasks = sorted(instance.tasks, key=lambda t: (-t.profit, t.id))
    n = len(tasks)
    if n > max_tasks:
        raise ValueError(f"exact solver limited to {max_tasks} tasks, got {n}")

    suffix = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + tasks[i].profit

    sim = PlacementSim(instance)
    best_fitness = 0
    best_placements: tuple = ()
    visited: set = set()
    nodes = 0

    def dfs(i: int, profit: int) -> None:
        nonlocal best_fitness, best_placements, nodes
        nodes += 1
        if profit > best_fitness:
            best_fitness = profit
            best_placements = tuple(sim.placements)
        if i == n or profit + suffix[i] <= best_fitness:
            return
        key = (i, sim.placement_key())
        if key in visited:
            return
        visited.add(key)
        task = tasks[i]
        for opt in sim.options(task):
            snap = sim.snapshot()
            sim.apply(task, opt)
            dfs(i + 1, profit + task.profit)
            sim.restore(snap)
        dfs(i + 1, profit)

    dfs(0, 0)
    placed = {p.task_id for p in best_placements}
    unscheduled = tuple(sorted(t.id for t in instance.tasks if t.id not in placed))
    return OracleResult(best_fitness, Schedule(best_placements, unscheduled), nodes)


def random_search(instance: Instance, budget: int, seed: int) -> SearchResult:
    """Decode uniformly random permutations; keep the best."""
    ctx = get_context(instance)
    n = ctx.n_tasks
    rng = np.random.default_rng(seed)
    history = np.zeros(budget, dtype=np.int64)
    best_fit = -1
    best_perm = np.arange(n, dtype=np.int64)
    for i in range(budget):
        perm = rng.permutation(n).astype(np.int64)
        fit, _ = ctx.decode_fitness(perm)
        if fit > best_fit:
            best_fit = fit
            best_perm = perm
        history[i] = best_fit
    if best_fit < 0:
        return SearchResult(0, Schedule((), tuple(t.id for t in instance.tasks)),
                            history)
    return SearchResult(best_fit, ctx.decode(best_perm), history)


def greedy_profit(instance: Instance) -> SearchResult:
    """Decode tasks in descending-profit order (ties by id); one evaluation."""
    ctx = get_context(instance)
    order = sorted(range(ctx.n_tasks),
                   key=lambda i: (-int(ctx.t_profit[i]), int(ctx.task_ids[i])))
    perm = np.array(order, dtype=np.int64)
    fit, _ = ctx.decode_fitness(perm)
    return SearchResult(fit, ctx.decode(perm), np.array([fit], dtype=np.int64))
