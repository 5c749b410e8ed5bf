"""Instance files, structural validation, and the seeded instance generator.

File format: one JSON document per instance, format_version 1, all times as
integer seconds ("time_unit": "s"). Canonical key order is the order produced
by save_instance; loading a canonical document and saving it again is
byte-identical. The full schema is documented in the README.

Randomness: a PCG64 generator per entity kind, derived from the config seed
with fixed spawn keys (0 = task attributes, 1 = window layout, 2 = feeding
window spawns), so instances are reproducible across platforms. Draw order is
fixed: durations, profits, est, then let spans for tasks; per antenna pair an
alternating gap/length sequence for windows; per visible window a spawn coin,
feeding antenna choice, start, and extension for feeding windows.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from .model import (
    FEED_STATION,
    SATELLITE,
    STATION,
    AntennaRef,
    FeedingWindow,
    GroundStation,
    Instance,
    Placement,
    Satellite,
    Schedule,
    Task,
    TimingParams,
    VisibleWindow,
)

FORMAT_VERSION = 1

_STREAM_TASKS = 0
_STREAM_WINDOWS = 1
_STREAM_FEEDS = 2


class InstanceFormatError(ValueError):
    """A document failed parsing or structural validation.

    location is a JSON-path-like string ("tasks[3].est") or "<document>" for
    file-level problems.
    """

    def __init__(self, location: str, message: str):
        self.location = location
        self.message = message
        super().__init__(f"{location}: {message}")


class GenerationError(ValueError):
    """The generator config cannot produce a usable instance."""


@dataclass(frozen=True)
class GeneratorConfig:
    """Knobs for the random instance generator. All times in seconds."""

    task_count: int
    satellite_count: int = 5
    antennas_per_satellite: int = 2
    station_count: int = 3
    antennas_per_station: int = 2
    feeding_station_count: int = 1
    horizon_length: int = 86400
    duration_mean: float = 55.0
    duration_std: float = 45.0
    profit_low: int = 1
    profit_high: int = 19
    window_length_range: tuple[int, int] = (300, 900)
    window_gap_range: tuple[int, int] = (1800, 5400)
    feed_overlap_probability: float = 0.3
    setup_gap: int = 30
    min_feed_overlap: int = 30
    switch_gap: int = 60
    seed: int = 0

    def __post_init__(self):
        if self.task_count < 0:
            raise ValueError("task_count must be >= 0")
        for name in ("satellite_count", "antennas_per_satellite", "station_count",
                     "antennas_per_station", "horizon_length"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.feeding_station_count < 0:
            raise ValueError("feeding_station_count must be >= 0")
        if self.profit_low > self.profit_high:
            raise ValueError("profit_low must not exceed profit_high")
        if self.profit_low < 0:
            raise ValueError("profits must be non-negative")
        for name in ("window_length_range", "window_gap_range"):
            lo, hi = getattr(self, name)
            if lo < 1 or lo > hi:
                raise ValueError(f"{name} must satisfy 1 <= lo <= hi")
        if not 0.0 <= self.feed_overlap_probability <= 1.0:
            raise ValueError("feed_overlap_probability must lie in [0, 1]")
        if self.duration_mean <= 0 or self.duration_std < 0:
            raise ValueError("duration law needs positive mean and non-negative std")
        if min(self.setup_gap, self.min_feed_overlap, self.switch_gap) < 0:
            raise ValueError("timing gaps must be non-negative")


def _stream(seed: int, key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(key,))))


def duration_draws(n: int, mean: float, std: float, rng: np.random.Generator) -> np.ndarray:
    """Raw Normal(mean, std) duration samples, before rounding and clipping."""
    return rng.normal(mean, std, size=n)


def generate_instance(config: GeneratorConfig, index: int = 1) -> Instance:
    """Build a random instance. Pure function of (config, index).

    The label is rendered "<task_count>-<index>".
    """
    horizon = config.horizon_length
    len_lo, len_hi = config.window_length_range
    gap_lo, gap_hi = config.window_gap_range
    if gap_lo + len_lo > horizon:
        raise GenerationError(
            f"horizon {horizon} cannot host a single window (min gap {gap_lo} + min length {len_lo})"
        )

    satellites = tuple(Satellite(i + 1, config.antennas_per_satellite)
                       for i in range(config.satellite_count))
    stations = tuple(
        GroundStation(j + 1, config.antennas_per_station,
                      feeding=j >= config.station_count)
        for j in range(config.station_count + config.feeding_station_count)
    )
    regular = [g for g in stations if not g.feeding]
    feeding = [g for g in stations if g.feeding]

    # Visible windows: per (satellite antenna, regular ground antenna) pair,
    # alternating uniform gap and length draws until the horizon runs out.
    wrng = _stream(config.seed, _STREAM_WINDOWS)
    windows: list[VisibleWindow] = []
    for sat in satellites:
        for m in range(1, sat.antennas + 1):
            sref = AntennaRef(SATELLITE, sat.id, m)
            for g in regular:
                for n in range(1, g.antennas + 1):
                    gref = AntennaRef(STATION, g.id, n)
                    t = 0
                    while True:
                        start = t + int(wrng.integers(gap_lo, gap_hi + 1))
                        end = start + int(wrng.integers(len_lo, len_hi + 1))
                        if end > horizon:
                            break
                        windows.append(VisibleWindow(len(windows) + 1, sref, gref, start, end))
                        t = end

    # Feeding windows: each visible window may spawn one, overlapping its
    # final third and stretching past its end.
    feed_windows: list[FeedingWindow] = []
    if feeding and config.feed_overlap_probability > 0:
        frng = _stream(config.seed, _STREAM_FEEDS)
        feed_antennas = [AntennaRef(FEED_STATION, g.id, n)
                         for g in feeding for n in range(1, g.antennas + 1)]
        for w in windows:
            if frng.random() >= config.feed_overlap_probability:
                continue
            fref = feed_antennas[int(frng.integers(0, len(feed_antennas)))]
            third = max(1, (w.end - w.start) // 3)
            fstart = int(frng.integers(w.end - third, w.end))
            fend = min(w.end + int(frng.integers(len_lo, len_hi + 1)), horizon)
            if fend <= w.end:
                continue
            feed_windows.append(FeedingWindow(len(feed_windows) + 1, w.sat_antenna, fref,
                                              fstart, fend))

    # Tasks: durations ~ round(Normal), clipped to >= 1; integer profits;
    # est uniform in [0, horizon - 4d] (floor 0), let = est + uniform[2d, 8d].
    trng = _stream(config.seed, _STREAM_TASKS)
    n = config.task_count
    raw = duration_draws(n, config.duration_mean, config.duration_std, trng)
    durations = np.maximum(1, np.rint(raw).astype(np.int64))
    profits = trng.integers(config.profit_low, config.profit_high + 1, size=n)
    est_hi = np.maximum(0, horizon - 4 * durations)
    ests = trng.integers(0, est_hi + 1)
    spans = trng.integers(2 * durations, 8 * durations + 1)
    tasks = tuple(
        Task(i + 1, int(ests[i]), int(ests[i] + spans[i]), int(durations[i]), int(profits[i]))
        for i in range(n)
    )

    return Instance(
        horizon=(0, horizon),
        satellites=satellites,
        stations=stations,
        tasks=tasks,
        windows=tuple(windows),
        feed_windows=tuple(feed_windows),
        timing=TimingParams(config.setup_gap, config.min_feed_overlap, config.switch_gap),
        label=f"{config.task_count}-{index}",
    )


# --------------------------------------------------------------------------
# serialization

def _window_doc(w) -> dict[str, Any]:
    return {
        "id": w.id,
        "satellite": w.sat_antenna.owner,
        "satellite_antenna": w.sat_antenna.antenna,
        "station": w.ground_antenna.owner,
        "station_antenna": w.ground_antenna.antenna,
        "start": w.start,
        "end": w.end,
    }


def instance_to_doc(instance: Instance) -> dict[str, Any]:
    return {
        "format_version": FORMAT_VERSION,
        "time_unit": "s",
        "label": instance.label,
        "horizon": list(instance.horizon),
        "timing": {
            "setup_gap": instance.timing.setup_gap,
            "min_feed_overlap": instance.timing.min_feed_overlap,
            "switch_gap": instance.timing.switch_gap,
        },
        "satellites": [{"id": s.id, "antennas": s.antennas} for s in instance.satellites],
        "stations": [{"id": g.id, "antennas": g.antennas, "feeding": g.feeding}
                     for g in instance.stations],
        "tasks": [{"id": t.id, "est": t.est, "let": t.let,
                   "duration": t.duration, "profit": t.profit} for t in instance.tasks],
        "windows": [_window_doc(w) for w in instance.windows],
        "feed_windows": [_window_doc(f) for f in instance.feed_windows],
    }


def save_instance(instance: Instance) -> bytes:
    """Serialize to the canonical document form (UTF-8 JSON, 2-space indent)."""
    return (json.dumps(instance_to_doc(instance), indent=2) + "\n").encode()


def _expect(cond: bool, location: str, message: str) -> None:
    if not cond:
        raise InstanceFormatError(location, message)


def _get(obj: dict, key: str, where: str) -> Any:
    _expect(isinstance(obj, dict), where, "expected an object")
    _expect(key in obj, where, f"missing required field '{key}'")
    return obj[key]


def _get_int(obj: dict, key: str, where: str, minimum: Optional[int] = None) -> int:
    v = _get(obj, key, where)
    _expect(isinstance(v, int) and not isinstance(v, bool), f"{where}.{key}",
            "expected an integer")
    if minimum is not None:
        _expect(v >= minimum, f"{where}.{key}", f"must be >= {minimum}")
    return v


def _parse_antenna(doc: dict, where: str, sats: dict[int, Satellite],
                   stations: dict[int, GroundStation]) -> tuple[AntennaRef, AntennaRef]:
    sat_id = _get_int(doc, "satellite", where)
    sat_ant = _get_int(doc, "satellite_antenna", where, 1)
    st_id = _get_int(doc, "station", where)
    st_ant = _get_int(doc, "station_antenna", where, 1)
    _expect(sat_id in sats, f"{where}.satellite", f"unknown satellite id {sat_id}")
    _expect(sat_ant <= sats[sat_id].antennas, f"{where}.satellite_antenna",
            f"satellite {sat_id} has only {sats[sat_id].antennas} antennas")
    _expect(st_id in stations, f"{where}.station", f"unknown station id {st_id}")
    _expect(st_ant <= stations[st_id].antennas, f"{where}.station_antenna",
            f"station {st_id} has only {stations[st_id].antennas} antennas")
    g = stations[st_id]
    gkind = FEED_STATION if g.feeding else STATION
    return (AntennaRef(SATELLITE, sat_id, sat_ant), AntennaRef(gkind, st_id, st_ant))


def load_instance(data: bytes | str) -> Instance:
    """Parse and validate an instance document.

    Raises InstanceFormatError with a located diagnostic on the first
    problem found (parse errors carry line/column; structural errors carry a
    JSON field path).
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"<document> line {exc.lineno} column {exc.colno}",
                                  exc.msg) from exc
    _expect(isinstance(doc, dict), "<document>", "top level must be an object")

    version = _get(doc, "format_version", "<document>")
    _expect(version == FORMAT_VERSION, "format_version",
            f"unsupported version {version!r} (expected {FORMAT_VERSION})")
    unit = _get(doc, "time_unit", "<document>")
    _expect(unit == "s", "time_unit", f"unsupported unit {unit!r} (times are seconds)")
    label = doc.get("label", "")
    _expect(isinstance(label, str), "label", "expected a string")

    hz = _get(doc, "horizon", "<document>")
    _expect(isinstance(hz, list) and len(hz) == 2
            and all(isinstance(v, int) and not isinstance(v, bool) for v in hz),
            "horizon", "expected [start, end] integers")
    _expect(0 <= hz[0] < hz[1], "horizon", "expected 0 <= start < end")

    tdoc = _get(doc, "timing", "<document>")
    timing = TimingParams(
        _get_int(tdoc, "setup_gap", "timing", 0),
        _get_int(tdoc, "min_feed_overlap", "timing", 0),
        _get_int(tdoc, "switch_gap", "timing", 0),
    )

    sats: dict[int, Satellite] = {}
    for i, sdoc in enumerate(_get(doc, "satellites", "<document>")):
        where = f"satellites[{i}]"
        sid = _get_int(sdoc, "id", where)
        _expect(sid not in sats, f"{where}.id", f"duplicate satellite id {sid}")
        sats[sid] = Satellite(sid, _get_int(sdoc, "antennas", where, 1))

    stations: dict[int, GroundStation] = {}
    for i, gdoc in enumerate(_get(doc, "stations", "<document>")):
        where = f"stations[{i}]"
        gid = _get_int(gdoc, "id", where)
        _expect(gid not in stations, f"{where}.id", f"duplicate station id {gid}")
        feeding = _get(gdoc, "feeding", where)
        _expect(isinstance(feeding, bool), f"{where}.feeding", "expected a boolean")
        stations[gid] = GroundStation(gid, _get_int(gdoc, "antennas", where, 1), feeding)

    tasks: dict[int, Task] = {}
    for i, kdoc in enumerate(_get(doc, "tasks", "<document>")):
        where = f"tasks[{i}]"
        tid = _get_int(kdoc, "id", where)
        _expect(tid not in tasks, f"{where}.id", f"duplicate task id {tid}")
        est = _get_int(kdoc, "est", where, 0)
        let = _get_int(kdoc, "let", where, 0)
        dur = _get_int(kdoc, "duration", where, 1)
        profit = _get_int(kdoc, "profit", where, 0)
        _expect(est + dur <= let, where,
                f"task {tid} can never run: est {est} + duration {dur} exceeds let {let}")
        tasks[tid] = Task(tid, est, let, dur, profit)

    windows: dict[int, VisibleWindow] = {}
    for i, wdoc in enumerate(_get(doc, "windows", "<document>")):
        where = f"windows[{i}]"
        wid = _get_int(wdoc, "id", where)
        _expect(wid not in windows, f"{where}.id", f"duplicate window id {wid}")
        start = _get_int(wdoc, "start", where, 0)
        end = _get_int(wdoc, "end", where, 0)
        _expect(start < end, where, f"window {wid} start must precede end")
        _expect(hz[0] <= start and end <= hz[1], where,
                f"window {wid} [{start}, {end}] lies outside horizon {hz}")
        sref, gref = _parse_antenna(wdoc, where, sats, stations)
        windows[wid] = VisibleWindow(wid, sref, gref, start, end)

    feed_windows: dict[int, FeedingWindow] = {}
    for i, fdoc in enumerate(_get(doc, "feed_windows", "<document>")):
        where = f"feed_windows[{i}]"
        fid = _get_int(fdoc, "id", where)
        _expect(fid not in feed_windows, f"{where}.id", f"duplicate feeding window id {fid}")
        start = _get_int(fdoc, "start", where, 0)
        end = _get_int(fdoc, "end", where, 0)
        _expect(start < end, where, f"feeding window {fid} start must precede end")
        _expect(hz[0] <= start and end <= hz[1], where,
                f"feeding window {fid} [{start}, {end}] lies outside horizon {hz}")
        sref, gref = _parse_antenna(fdoc, where, sats, stations)
        _expect(gref.kind == FEED_STATION, f"{where}.station",
                f"feeding window {fid} must sit on a feeding station")
        feed_windows[fid] = FeedingWindow(fid, sref, gref, start, end)

    return Instance(
        horizon=(hz[0], hz[1]),
        satellites=tuple(sats.values()),
        stations=tuple(stations.values()),
        tasks=tuple(tasks.values()),
        windows=tuple(windows.values()),
        feed_windows=tuple(feed_windows.values()),
        timing=timing,
        label=label,
    )


def write_instance(instance: Instance, path) -> None:
    with open(path, "wb") as fh:
        fh.write(save_instance(instance))


def read_instance(path) -> Instance:
    with open(path, "rb") as fh:
        return load_instance(fh.read())


# --------------------------------------------------------------------------
# plan (schedule) files

def save_plan(schedule: Schedule, *, instance_label: str = "", algorithm: str = "",
              seed: Optional[int] = None, fitness_value: Optional[int] = None) -> bytes:
    doc = {
        "format_version": FORMAT_VERSION,
        "instance_label": instance_label,
        "algorithm": algorithm,
        "seed": seed,
        "fitness": fitness_value,
        "placements": [
            {"task": p.task_id, "window": p.window_id, "feed_window": p.feed_window_id,
             "start": p.start, "end": p.end}
            for p in schedule.placements
        ],
        "unscheduled": list(schedule.unscheduled),
    }
    return (json.dumps(doc, indent=2) + "\n").encode()


def load_plan(data: bytes | str) -> tuple[Schedule, dict[str, Any]]:
    """Parse a plan document; returns (schedule, metadata)."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"<document> line {exc.lineno} column {exc.colno}",
                                  exc.msg) from exc
    _expect(isinstance(doc, dict), "<document>", "top level must be an object")
    _expect(doc.get("format_version") == FORMAT_VERSION, "format_version",
            f"unsupported version {doc.get('format_version')!r}")
    placements = []
    for i, pdoc in enumerate(_get(doc, "placements", "<document>")):
        where = f"placements[{i}]"
        feed = pdoc.get("feed_window")
        _expect(feed is None or (isinstance(feed, int) and not isinstance(feed, bool)),
                f"{where}.feed_window", "expected an integer or null")
        placements.append(Placement(
            task_id=_get_int(pdoc, "task", where),
            window_id=_get_int(pdoc, "window", where),
            start=_get_int(pdoc, "start", where, 0),
            end=_get_int(pdoc, "end", where, 0),
            feed_window_id=feed,
        ))
    unsched = _get(doc, "unscheduled", "<document>")
    _expect(isinstance(unsched, list)
            and all(isinstance(v, int) and not isinstance(v, bool) for v in unsched),
            "unscheduled", "expected a list of task ids")
    meta = {k: doc.get(k) for k in ("instance_label", "algorithm", "seed", "fitness")}
    return Schedule(tuple(placements), tuple(unsched)), meta


def read_plan(path) -> tuple[Schedule, dict[str, Any]]:
    with open(path, "rb") as fh:
        return load_plan(fh.read())


def write_plan(schedule: Schedule, path, **meta) -> None:
    with open(path, "wb") as fh:
        fh.write(save_plan(schedule, **meta))
