"""Domain model for satellite-ground communication scheduling with feed-switching.

A communication task must run inside a visible time window between one
satellite antenna and one ground antenna. When a task is longer than the
remaining visible window, the satellite may feed-switch: it keeps transmitting
past the window's end onto an overlapping feeding window hosted by a dedicated
feeding station, provided the two windows overlap long enough. This module
holds the value types, the profit objective, and the feasibility checker.

Times are integer seconds on a common axis starting at the horizon origin.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from functools import cached_property
from typing import Iterable, Optional

# Antenna owner kinds.
SATELLITE = "satellite"
STATION = "ground-station"
FEED_STATION = "feeding-ground-station"

_GROUND_KINDS = (STATION, FEED_STATION)


class MalformedScheduleError(ValueError):
    """Schedule references ids that do not exist in the instance."""


class Rule(IntEnum):
    """Stable rule codes used in validation reports.

    Codes 2-13 index the feasibility rules; code 1 names the profit
    objective in reports and is never violated.
    """

    END_BY_DEADLINE = 2        # end == start + duration and end <= let
    START_IN_WINDOW = 3        # start >= window start
    WITHIN_WINDOW = 4          # start <= window end; non-feed runs end inside the window
    START_AFTER_READY = 5      # start >= est
    START_BEFORE_DEADLINE = 6  # start < let
    SAT_ANTENNA_GAP = 7        # same satellite antenna: inter-task gap >= alpha
    GROUND_ANTENNA_GAP = 8     # same ground antenna: inter-task gap >= gamma
    ONE_LINK_PER_SATELLITE = 9
    ONE_LINK_PER_STATION = 10
    FEED_OVERLAP = 11          # window/feeding-window overlap >= beta, same satellite antenna
    FEED_COMPLETION = 12       # window.end <= end <= feeding window.end
    TASK_AT_MOST_ONCE = 13


@dataclass(frozen=True)
class TimingParams:
    """Instance-wide timing gaps, in seconds.

    setup_gap: satellite antenna attitude adjustment time between tasks (alpha).
    min_feed_overlap: minimum window overlap required to feed-switch (beta).
    switch_gap: ground antenna task-switch interval between tasks (gamma).
    """

    setup_gap: int
    min_feed_overlap: int
    switch_gap: int

    def __post_init__(self):
        if self.setup_gap < 0 or self.min_feed_overlap < 0 or self.switch_gap < 0:
            raise ValueError("timing gaps must be non-negative")


@dataclass(frozen=True)
class AntennaRef:
    """One antenna, identified by its owner and a 1-based index."""

    kind: str       # SATELLITE, STATION, or FEED_STATION
    owner: int
    antenna: int

    def __post_init__(self):
        if self.kind not in (SATELLITE, STATION, FEED_STATION):
            raise ValueError(f"unknown antenna owner kind: {self.kind!r}")
        if self.antenna < 1:
            raise ValueError("antenna index is 1-based")


@dataclass(frozen=True)
class Task:
    id: int
    est: int        # earliest allowed start
    let: int        # latest allowed end
    duration: int
    profit: int

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError(f"task {self.id}: duration must be positive")
        if self.profit < 0:
            raise ValueError(f"task {self.id}: profit must be non-negative")
        if self.est < 0:
            raise ValueError(f"task {self.id}: est must be non-negative")
        # est + duration <= let, else the task can never be scheduled
        if self.est + self.duration > self.let:
            raise ValueError(f"task {self.id}: est + duration exceeds let")


@dataclass(frozen=True)
class VisibleWindow:
    id: int
    sat_antenna: AntennaRef
    ground_antenna: AntennaRef
    start: int
    end: int

    def __post_init__(self):
        if self.start >= self.end:
            raise ValueError(f"window {self.id}: start must precede end")
        if self.sat_antenna.kind != SATELLITE:
            raise ValueError(f"window {self.id}: satellite side must be a satellite antenna")
        if self.ground_antenna.kind not in _GROUND_KINDS:
            raise ValueError(f"window {self.id}: ground side must be a ground antenna")


@dataclass(frozen=True)
class FeedingWindow:
    id: int
    sat_antenna: AntennaRef
    ground_antenna: AntennaRef
    start: int
    end: int

    def __post_init__(self):
        if self.start >= self.end:
            raise ValueError(f"feeding window {self.id}: start must precede end")
        if self.sat_antenna.kind != SATELLITE:
            raise ValueError(f"feeding window {self.id}: satellite side must be a satellite antenna")
        if self.ground_antenna.kind != FEED_STATION:
            raise ValueError(f"feeding window {self.id}: ground side must be a feeding antenna")


@dataclass(frozen=True)
class Satellite:
    id: int
    antennas: int

    def __post_init__(self):
        if self.antennas < 1:
            raise ValueError(f"satellite {self.id}: needs at least one antenna")


@dataclass(frozen=True)
class GroundStation:
    id: int
    antennas: int
    feeding: bool = False

    def __post_init__(self):
        if self.antennas < 1:
            raise ValueError(f"station {self.id}: needs at least one antenna")


@dataclass(frozen=True)
class Instance:
    """One scheduling problem: topology, tasks, windows, and timing gaps.

    Immutable after construction; lookup tables are cached lazily.
    """

    horizon: tuple[int, int]
    satellites: tuple[Satellite, ...]
    stations: tuple[GroundStation, ...]
    tasks: tuple[Task, ...]
    windows: tuple[VisibleWindow, ...]
    feed_windows: tuple[FeedingWindow, ...]
    timing: TimingParams
    label: str = ""

    @cached_property
    def tasks_by_id(self) -> dict[int, Task]:
        return {t.id: t for t in self.tasks}

    @cached_property
    def windows_by_id(self) -> dict[int, VisibleWindow]:
        return {w.id: w for w in self.windows}

    @cached_property
    def feed_windows_by_id(self) -> dict[int, FeedingWindow]:
        return {f.id: f for f in self.feed_windows}

    @cached_property
    def stations_by_id(self) -> dict[int, GroundStation]:
        return {g.id: g for g in self.stations}

    @cached_property
    def satellites_by_id(self) -> dict[int, Satellite]:
        return {s.id: s for s in self.satellites}

    @cached_property
    def total_profit(self) -> int:
        return sum(t.profit for t in self.tasks)


@dataclass(frozen=True)
class Placement:
    """One executed task: the chosen window(s) and the run interval.

    feed_window_id is set iff the task feed-switches, in which case the run
    overruns the visible window and finishes inside the feeding window.
    """

    task_id: int
    window_id: int
    start: int
    end: int
    feed_window_id: Optional[int] = None

    def __post_init__(self):
        if self.end <= self.start:
            raise ValueError(f"placement of task {self.task_id}: empty run interval")


@dataclass(frozen=True)
class Schedule:
    placements: tuple[Placement, ...]
    unscheduled: tuple[int, ...] = ()


@dataclass(frozen=True)
class Violation:
    rule: int
    ids: tuple[int, ...]   # offending task ids
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def by_rule(self, rule: int) -> tuple[Violation, ...]:
        return tuple(v for v in self.violations if v.rule == rule)

    def __str__(self) -> str:
        if self.ok:
            return "valid: no violations"
        lines = [f"{len(self.violations)} violation(s):"]
        lines += [f"  rule {v.rule} tasks {list(v.ids)}: {v.detail}" for v in self.violations]
        return "\n".join(lines)


def fitness(instance: Instance, schedule: Schedule) -> int:
    """Total profit of the placed tasks. Raises on unknown task ids."""
    tasks = instance.tasks_by_id
    total = 0
    for p in schedule.placements:
        task = tasks.get(p.task_id)
        if task is None:
            raise MalformedScheduleError(f"placement references unknown task id {p.task_id}")
        total += task.profit
    return total


def _owner_key(ref: AntennaRef) -> tuple[str, int]:
    # Satellites and stations live in separate id spaces.
    kind = SATELLITE if ref.kind == SATELLITE else STATION
    return (kind, ref.owner)


def busy_intervals(
    instance: Instance, p: Placement
) -> list[tuple[AntennaRef, int, int, int]]:
    """Antenna occupancy of one placement as (antenna, start, end, gap) entries.

    gap is the minimum idle time required before and after the interval on
    that antenna. A feed-switching run hands the ground side over exactly at
    the visible window's end: the regular ground antenna is held on
    [start, window.end] and the feeding antenna on [window.end, end].
    Empty intervals are omitted.
    """
    w = instance.windows_by_id[p.window_id]
    alpha = instance.timing.setup_gap
    gamma = instance.timing.switch_gap
    out = [(w.sat_antenna, p.start, p.end, alpha)]
    if p.feed_window_id is None:
        out.append((w.ground_antenna, p.start, p.end, gamma))
    else:
        f = instance.feed_windows_by_id[p.feed_window_id]
        if w.end > p.start:
            out.append((w.ground_antenna, p.start, min(p.end, w.end), gamma))
        if p.end > w.end:
            out.append((f.ground_antenna, max(p.start, w.end), p.end, gamma))
    return [(a, s, e, g) for (a, s, e, g) in out if e > s]


def validate_schedule(instance: Instance, schedule: Schedule) -> ValidationReport:
    """Check a schedule against the feasibility rules.

    Returns a report listing every violated rule with the offending task ids;
    violations never raise. Unknown task/window ids raise
    MalformedScheduleError, since no meaningful check is possible for them.
    """
    tasks = instance.tasks_by_id
    windows = instance.windows_by_id
    feeds = instance.feed_windows_by_id
    beta = instance.timing.min_feed_overlap

    out: list[Violation] = []

    def flag(rule: Rule, ids: Iterable[int], detail: str) -> None:
        out.append(Violation(int(rule), tuple(ids), detail))

    # -- per-placement checks ------------------------------------------------
    for p in schedule.placements:
        t = tasks.get(p.task_id)
        if t is None:
            raise MalformedScheduleError(f"placement references unknown task id {p.task_id}")
        w = windows.get(p.window_id)
        if w is None:
            raise MalformedScheduleError(
                f"placement of task {p.task_id} references unknown window id {p.window_id}"
            )
        f = None
        if p.feed_window_id is not None:
            f = feeds.get(p.feed_window_id)
            if f is None:
                raise MalformedScheduleError(
                    f"placement of task {p.task_id} references unknown feeding window id "
                    f"{p.feed_window_id}"
                )

        if p.end - p.start != t.duration:
            flag(Rule.END_BY_DEADLINE, [t.id],
                 f"run length {p.end - p.start} != duration {t.duration}")
        if p.end > t.let:
            flag(Rule.END_BY_DEADLINE, [t.id], f"ends at {p.end} after let {t.let}")
        if p.start < t.est:
            flag(Rule.START_AFTER_READY, [t.id], f"starts at {p.start} before est {t.est}")
        if p.start >= t.let:
            flag(Rule.START_BEFORE_DEADLINE, [t.id], f"starts at {p.start} not before let {t.let}")
        if p.start < w.start:
            flag(Rule.START_IN_WINDOW, [t.id],
                 f"starts at {p.start} before window {w.id} opens at {w.start}")
        if p.start > w.end:
            flag(Rule.WITHIN_WINDOW, [t.id],
                 f"starts at {p.start} after window {w.id} closes at {w.end}")

        if f is None:
            if p.end > w.end:
                flag(Rule.WITHIN_WINDOW, [t.id],
                     f"ends at {p.end} after window {w.id} closes at {w.end} without feed-switch")
        else:
            if f.sat_antenna != w.sat_antenna:
                flag(Rule.FEED_OVERLAP, [t.id],
                     f"window {w.id} and feeding window {f.id} use different satellite antennas")
            if w.end - f.start < beta:
                flag(Rule.FEED_OVERLAP, [t.id],
                     f"window {w.id}/feeding window {f.id} overlap {w.end - f.start} < {beta}")
            if p.end < w.end or p.end > f.end:
                flag(Rule.FEED_COMPLETION, [t.id],
                     f"feed-switch run must end in [{w.end}, {f.end}], ends at {p.end}")

    # -- cross-placement checks ---------------------------------------------
    per_antenna: dict[AntennaRef, list[tuple[int, int, int, int]]] = {}
    per_owner: dict[tuple[str, int], list[tuple[int, int, int]]] = {}
    for p in schedule.placements:
        for (ant, s, e, g) in busy_intervals(instance, p):
            per_antenna.setdefault(ant, []).append((s, e, g, p.task_id))
            per_owner.setdefault(_owner_key(ant), []).append((s, e, p.task_id))

    for ant, entries in sorted(per_antenna.items(), key=lambda kv: (kv[0].kind, kv[0].owner, kv[0].antenna)):
        entries.sort()
        rule = Rule.SAT_ANTENNA_GAP if ant.kind == SATELLITE else Rule.GROUND_ANTENNA_GAP
        for i in range(len(entries)):
            s_i, e_i, gap, id_i = entries[i]
            for j in range(i + 1, len(entries)):
                s_j, e_j, _, id_j = entries[j]
                if id_i == id_j:
                    continue  # a task occupies an antenna once; same-id pairs are duplicates (rule 13)
                if s_j - e_i < gap:
                    flag(rule, [id_i, id_j],
                         f"gap {s_j - e_i} < {gap} on {ant.kind} {ant.owner} antenna {ant.antenna}")

    for (kind, owner), entries in sorted(per_owner.items()):
        entries.sort()
        rule = Rule.ONE_LINK_PER_SATELLITE if kind == SATELLITE else Rule.ONE_LINK_PER_STATION
        for i in range(len(entries)):
            s_i, e_i, id_i = entries[i]
            for j in range(i + 1, len(entries)):
                s_j, e_j, id_j = entries[j]
                if id_i == id_j:
                    continue
                if s_j >= e_i:
                    break  # sorted by start: nothing later can reach back into [s_i, e_i)
                flag(rule, [id_i, id_j],
                     f"simultaneous links on {kind} {owner} during [{s_j}, {min(e_i, e_j)})")

    # -- coverage and multiplicity (one run per task) -------------------------
    seen: dict[int, int] = {}
    for p in schedule.placements:
        seen[p.task_id] = seen.get(p.task_id, 0) + 1
    for tid in schedule.unscheduled:
        if tid not in tasks:
            raise MalformedScheduleError(f"unscheduled list references unknown task id {tid}")
        seen[tid] = seen.get(tid, 0) + 1
    for tid, count in seen.items():
        if count > 1:
            flag(Rule.TASK_AT_MOST_ONCE, [tid], f"task appears {count} times")
    for t in instance.tasks:
        if t.id not in seen:
            flag(Rule.TASK_AT_MOST_ONCE, [t.id], "task missing from placements and unscheduled")

    return ValidationReport(tuple(out))
