"""Constraint checker and objective on hand-built schedules."""

import dataclasses

import pytest
from conftest import build, feed_ant, gnd_ant, random_permutation, sat_ant, small_instance

from sgnplan.decoder import decode
from sgnplan.model import (
    FeedingWindow,
    MalformedScheduleError,
    Placement,
    Rule,
    Schedule,
    Task,
    VisibleWindow,
    fitness,
    validate_schedule,
)


def plain_window(wid, start, end, station=1):
    return VisibleWindow(id=wid, sat_antenna=sat_ant(),
                         ground_antenna=gnd_ant(station), start=start, end=end)


def three_task_instance():
    tasks = [Task(id=i, est=0, let=100, duration=10, profit=p)
             for i, p in ((1, 5), (2, 2), (3, 9))]
    windows = [plain_window(i, 0, 100, station=i) for i in (1, 2, 3)]
    return build(tasks=tasks, windows=windows, stations=3)


class TestFitness:
    def test_empty_schedule_scores_zero(self):
        inst = three_task_instance()
        assert fitness(inst, Schedule(placements=(), unscheduled=(1, 2, 3))) == 0

    def test_single_placement_scores_its_profit(self, single_window_instance):
        s = Schedule(placements=(Placement(1, 1, 0, 10),))
        assert fitness(single_window_instance, s) == 7

    def test_sums_profits_of_placed_tasks(self):
        inst = three_task_instance()
        s = Schedule(placements=(
            Placement(1, 1, 0, 10),
            Placement(2, 2, 0, 10),
            Placement(3, 3, 0, 10),
        ))
        assert fitness(inst, s) == 5 + 2 + 9 == 16

    def test_subset_counts_only_placed(self):
        inst = three_task_instance()
        s = Schedule(placements=(Placement(3, 3, 0, 10),), unscheduled=(1, 2))
        assert fitness(inst, s) == 9

    def test_unknown_task_id_is_malformed(self):
        inst = three_task_instance()
        with pytest.raises(MalformedScheduleError):
            fitness(inst, Schedule(placements=(Placement(99, 1, 0, 10),)))


class TestValidate:
    def test_empty_schedule_has_no_violations(self):
        inst = small_instance(seed=3, tasks=5)
        ids = tuple(t.id for t in inst.tasks)
        report = validate_schedule(inst, Schedule(placements=(), unscheduled=ids))
        assert report.ok
        assert report.violations == ()

    def test_satellite_antenna_needs_setup_gap(self):
        # back-to-back passes 2s apart on one satellite antenna, 5s required
        tasks = [Task(id=1, est=0, let=100, duration=10, profit=1),
                 Task(id=2, est=0, let=100, duration=8, profit=1)]
        windows = [plain_window(1, 0, 50, station=1),
                   plain_window(2, 0, 50, station=2)]
        inst = build(tasks=tasks, windows=windows, stations=2, alpha=5)
        s = Schedule(placements=(Placement(1, 1, 0, 10), Placement(2, 2, 12, 20)))
        report = validate_schedule(inst, s)
        assert not report.ok
        assert {v.rule for v in report.violations} == {Rule.SAT_ANTENNA_GAP}
        assert int(Rule.SAT_ANTENNA_GAP) == 7

    def test_satellite_antenna_gap_met_is_clean(self):
        tasks = [Task(id=1, est=0, let=100, duration=10, profit=1),
                 Task(id=2, est=0, let=100, duration=8, profit=1)]
        windows = [plain_window(1, 0, 50, station=1),
                   plain_window(2, 0, 50, station=2)]
        inst = build(tasks=tasks, windows=windows, stations=2, alpha=5)
        s = Schedule(placements=(Placement(1, 1, 0, 10), Placement(2, 2, 15, 23)))
        assert validate_schedule(inst, s).ok

    def test_short_feed_overlap_is_flagged(self):
        # feeding window starts only 5s before the visible window closes
        t = Task(id=1, est=0, let=200, duration=60, profit=9)
        w = VisibleWindow(id=1, sat_antenna=sat_ant(),
                          ground_antenna=gnd_ant(), start=0, end=50)
        f = FeedingWindow(id=1, sat_antenna=sat_ant(),
                          ground_antenna=feed_ant(), start=45, end=120)
        inst = build(tasks=[t], windows=[w], feeds=[f], beta=10)
        s = Schedule(placements=(Placement(1, 1, 0, 60, feed_window_id=1),))
        report = validate_schedule(inst, s)
        rules = {v.rule for v in report.violations}
        assert Rule.FEED_OVERLAP in rules
        assert int(Rule.FEED_OVERLAP) == 11

    def test_sufficient_feed_overlap_is_clean(self, feed_instance):
        s = Schedule(placements=(Placement(1, 1, 0, 60, feed_window_id=1),))
        assert validate_schedule(feed_instance, s).ok

    def test_feed_end_past_feed_window_is_flagged(self, feed_instance):
        # duration 60 fits, but start 70 pushes the end past the feed window
        inst = dataclasses.replace(
            feed_instance,
            tasks=(Task(id=1, est=0, let=500, duration=60, profit=9),),
            windows=(VisibleWindow(id=1, sat_antenna=sat_ant(),
                                   ground_antenna=gnd_ant(), start=0, end=90),),
        )
        s = Schedule(placements=(Placement(1, 1, 70, 130, feed_window_id=1),))
        report = validate_schedule(inst, s)
        assert Rule.FEED_COMPLETION in {v.rule for v in report.violations}

    def test_run_length_mismatch_is_flagged(self, single_window_instance):
        s = Schedule(placements=(Placement(1, 1, 0, 11),))
        report = validate_schedule(single_window_instance, s)
        assert Rule.END_BY_DEADLINE in {v.rule for v in report.violations}

    def test_deadline_overrun_is_flagged(self, single_window_instance):
        inst = dataclasses.replace(
            single_window_instance,
            tasks=(Task(id=1, est=0, let=15, duration=10, profit=7),),
        )
        s = Schedule(placements=(Placement(1, 1, 10, 20),))
        report = validate_schedule(inst, s)
        assert Rule.END_BY_DEADLINE in {v.rule for v in report.violations}

    def test_start_before_ready_time_is_flagged(self, single_window_instance):
        inst = dataclasses.replace(
            single_window_instance,
            tasks=(Task(id=1, est=5, let=100, duration=10, profit=7),),
        )
        s = Schedule(placements=(Placement(1, 1, 0, 10),))
        report = validate_schedule(inst, s)
        assert Rule.START_AFTER_READY in {v.rule for v in report.violations}

    def test_start_outside_window_is_flagged(self, single_window_instance):
        inst = dataclasses.replace(
            single_window_instance,
            windows=(VisibleWindow(id=1, sat_antenna=sat_ant(),
                                   ground_antenna=gnd_ant(), start=20, end=100),),
        )
        s = Schedule(placements=(Placement(1, 1, 0, 10),))
        report = validate_schedule(inst, s)
        assert Rule.START_IN_WINDOW in {v.rule for v in report.violations}

    def test_ground_antenna_switch_gap(self):
        # same ground antenna, different satellites, 2s apart with gamma=5
        tasks = [Task(id=1, est=0, let=100, duration=10, profit=1),
                 Task(id=2, est=0, let=100, duration=8, profit=1)]
        w1 = VisibleWindow(id=1, sat_antenna=sat_ant(1), ground_antenna=gnd_ant(),
                           start=0, end=50)
        w2 = VisibleWindow(id=2, sat_antenna=sat_ant(2), ground_antenna=gnd_ant(),
                           start=0, end=50)
        inst = build(tasks=tasks, windows=[w1, w2], satellites=2, gamma=5)
        s = Schedule(placements=(Placement(1, 1, 0, 10), Placement(2, 2, 12, 20)))
        report = validate_schedule(inst, s)
        assert {v.rule for v in report.violations} == {Rule.GROUND_ANTENNA_GAP}

    def test_satellite_single_link_overlap(self):
        # one satellite with two antennas cannot hold two simultaneous links
        tasks = [Task(id=1, est=0, let=100, duration=10, profit=1),
                 Task(id=2, est=0, let=100, duration=10, profit=1)]
        w1 = VisibleWindow(id=1, sat_antenna=sat_ant(1, 1), ground_antenna=gnd_ant(1),
                           start=0, end=50)
        w2 = VisibleWindow(id=2, sat_antenna=sat_ant(1, 2), ground_antenna=gnd_ant(2),
                           start=0, end=50)
        inst = build(tasks=tasks, windows=[w1, w2], sat_antennas=2, stations=2)
        s = Schedule(placements=(Placement(1, 1, 0, 10), Placement(2, 2, 5, 15)))
        report = validate_schedule(inst, s)
        assert Rule.ONE_LINK_PER_SATELLITE in {v.rule for v in report.violations}

    def test_station_single_link_overlap(self):
        tasks = [Task(id=1, est=0, let=100, duration=10, profit=1),
                 Task(id=2, est=0, let=100, duration=10, profit=1)]
        w1 = VisibleWindow(id=1, sat_antenna=sat_ant(1), ground_antenna=gnd_ant(1, 1),
                           start=0, end=50)
        w2 = VisibleWindow(id=2, sat_antenna=sat_ant(2), ground_antenna=gnd_ant(1, 2),
                           start=0, end=50)
        inst = build(tasks=tasks, windows=[w1, w2], satellites=2,
                     station_antennas=2)
        s = Schedule(placements=(Placement(1, 1, 0, 10), Placement(2, 2, 5, 15)))
        report = validate_schedule(inst, s)
        assert Rule.ONE_LINK_PER_STATION in {v.rule for v in report.violations}

    def test_task_placed_twice_is_flagged(self):
        inst = three_task_instance()
        s = Schedule(placements=(Placement(1, 1, 0, 10), Placement(1, 2, 20, 30)))
        report = validate_schedule(inst, s)
        assert Rule.TASK_AT_MOST_ONCE in {v.rule for v in report.violations}

    def test_unknown_ids_are_malformed(self):
        inst = three_task_instance()
        with pytest.raises(MalformedScheduleError):
            validate_schedule(inst, Schedule(placements=(Placement(42, 1, 0, 10),)))
        with pytest.raises(MalformedScheduleError):
            validate_schedule(inst, Schedule(placements=(Placement(1, 77, 0, 10),)))

    def test_validation_is_pure(self):
        inst = small_instance(seed=5, tasks=8)
        sched = decode(inst, random_permutation(inst, 1))
        first = validate_schedule(inst, sched)
        second = validate_schedule(inst, sched)
        assert first.violations == second.violations


class TestDeletionMonotonicity:
    """Removing any placement from a feasible schedule keeps it feasible."""

    @pytest.mark.parametrize("seed", [0, 1, 2, 3])
    def test_any_single_deletion_stays_valid(self, seed):
        inst = small_instance(seed=seed, tasks=10)
        sched = decode(inst, random_permutation(inst, seed + 100))
        assert validate_schedule(inst, sched).ok
        for drop in range(len(sched.placements)):
            kept = tuple(p for i, p in enumerate(sched.placements) if i != drop)
            dropped_id = sched.placements[drop].task_id
            reduced = Schedule(placements=kept,
                               unscheduled=sched.unscheduled + (dropped_id,))
            assert validate_schedule(inst, reduced).ok
