"""Shared builders for hand-crafted and generated test instances."""

import numpy as np
import pytest

from sgnplan.io import GeneratorConfig, generate_instance
from sgnplan.model import (
    FEED_STATION,
    SATELLITE,
    STATION,
    AntennaRef,
    FeedingWindow,
    GroundStation,
    Instance,
    Satellite,
    Task,
    TimingParams,
    VisibleWindow,
)


def sat_ant(sat: int = 1, antenna: int = 1) -> AntennaRef:
    return AntennaRef(SATELLITE, sat, antenna)


def gnd_ant(station: int = 1, antenna: int = 1) -> AntennaRef:
    return AntennaRef(STATION, station, antenna)


def feed_ant(station: int = 2, antenna: int = 1) -> AntennaRef:
    return AntennaRef(FEED_STATION, station, antenna)


def build(tasks=(), windows=(), feeds=(), alpha=0, beta=5, gamma=0,
          horizon=1000, satellites=1, sat_antennas=1, stations=1,
          station_antennas=1, feed_stations=1, label="hand") -> Instance:
    """Assemble a small instance around explicit tasks/windows.

    Ground stations 1..stations are plain; the feeding stations follow,
    so feed_ant() defaults to station id stations+1 when stations == 1.
    """
    sats = tuple(Satellite(i + 1, sat_antennas) for i in range(satellites))
    gnds = [GroundStation(i + 1, station_antennas, False)
            for i in range(stations)]
    gnds += [GroundStation(stations + i + 1, station_antennas, True)
             for i in range(feed_stations)]
    return Instance(
        horizon=(0, horizon),
        satellites=sats,
        stations=tuple(gnds),
        tasks=tuple(tasks),
        windows=tuple(windows),
        feed_windows=tuple(feeds),
        timing=TimingParams(alpha, beta, gamma),
        label=label,
    )


def small_config(seed: int, tasks: int = 6, **overrides) -> GeneratorConfig:
    """Compact topology: short horizon, few antennas, frequent feed overlap."""
    params = dict(
        task_count=tasks,
        satellite_count=2,
        antennas_per_satellite=1,
        station_count=1,
        antennas_per_station=1,
        feeding_station_count=1,
        horizon_length=4000,
        window_length_range=(120, 400),
        window_gap_range=(100, 500),
        feed_overlap_probability=0.6,
        seed=seed,
    )
    params.update(overrides)
    return GeneratorConfig(**params)


def small_instance(seed: int, tasks: int = 6, **overrides) -> Instance:
    return generate_instance(small_config(seed, tasks, **overrides))


def random_permutation(instance: Instance, seed: int) -> list[int]:
    ids = [t.id for t in instance.tasks]
    rng = np.random.default_rng(seed)
    rng.shuffle(ids)
    return ids


@pytest.fixture
def single_window_instance() -> Instance:
    """One task, one plain window [0, 100], duration 10."""
    t = Task(id=1, est=0, let=100, duration=10, profit=7)
    w = VisibleWindow(id=1, sat_antenna=sat_ant(), ground_antenna=gnd_ant(),
                      start=0, end=100)
    return build(tasks=[t], windows=[w])


@pytest.fixture
def feed_instance() -> Instance:
    """Feed hand case: duration outgrows the visible window.

    Task 1 needs 60s but the window closes at 50; the feeding window
    [40, 120] overlaps by 10 >= beta=5, so the pass can run [0, 60].
    """
    t = Task(id=1, est=0, let=200, duration=60, profit=9)
    w = VisibleWindow(id=1, sat_antenna=sat_ant(), ground_antenna=gnd_ant(),
                      start=0, end=50)
    f = FeedingWindow(id=1, sat_antenna=sat_ant(), ground_antenna=feed_ant(),
                      start=40, end=120)
    return build(tasks=[t], windows=[w], feeds=[f], beta=5)
