"""End-to-end acceptance checks.

Each test prints one PASS/FAIL line with its measurements, then asserts.
The heavy fixtures (600- and 1000-task benchmark instances) are pinned by
generator seed so every run exercises identical inputs.
"""

import statistics
import time

import numpy as np

from sgnplan.decoder import decode
from sgnplan.dsga import DsgaConfig, evolve
from sgnplan.io import GeneratorConfig, duration_draws, generate_instance
from sgnplan.model import validate_schedule
from sgnplan.oracle import exact_optimum, random_search
from sgnplan.similarity import generation_threshold, rvw_weights, task_similarity_matrix
from sgnplan.model import Task


def _report(capsys, tag, ok, detail):
    with capsys.disabled():
        print(f"\n[{tag}] {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"{tag}: {detail}"


def test_criterion_1_decode_fuzz_is_always_feasible(capsys):
    """1000 varied instances, 10-200 tasks: every decode validates cleanly."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(20240817)
    instances = 0
    decodes = 0
    bad = 0
    while instances < 1000:
        n = 10 + int(rng.integers(0, 191))
        cfg = GeneratorConfig(
            task_count=n,
            satellite_count=int(rng.integers(1, 5)),
            antennas_per_satellite=int(rng.integers(1, 3)),
            station_count=int(rng.integers(1, 4)),
            antennas_per_station=int(rng.integers(1, 3)),
            feeding_station_count=int(rng.integers(0, 2)),
            horizon_length=int(rng.integers(20000, 60001)),
            window_length_range=(300, 900),
            window_gap_range=(600, 2400),
            feed_overlap_probability=float(rng.uniform(0.0, 0.8)),
            setup_gap=int(rng.integers(0, 61)),
            min_feed_overlap=int(rng.integers(5, 61)),
            switch_gap=int(rng.integers(0, 91)),
            seed=int(rng.integers(0, 10**6)),
        )
        inst = generate_instance(cfg)
        instances += 1
        perm = [t.id for t in inst.tasks]
        for _ in range(3):
            rng.shuffle(perm)
            sched = decode(inst, perm)
            decodes += 1
            if not validate_schedule(inst, sched).ok:
                bad += 1
    elapsed = time.perf_counter() - t0
    ok = bad == 0 and instances >= 1000 and elapsed <= 120.0
    _report(capsys, "decode-fuzz", ok,
            f"{instances} instances, {decodes} decodes, {bad} violating, "
            f"{elapsed:.1f}s (limit 120s)")


def test_criterion_2_engine_matches_the_exact_oracle(capsys):
    """50 small instances: the engine finds the optimum at least 45 times."""
    t0 = time.perf_counter()
    matches = 0
    exceeded = 0
    for i in range(50):
        cfg = GeneratorConfig(
            task_count=4 + i % 5,
            satellite_count=2, antennas_per_satellite=1,
            station_count=1, antennas_per_station=1,
            feeding_station_count=1, horizon_length=4000,
            window_length_range=(120, 400), window_gap_range=(100, 500),
            feed_overlap_probability=0.6, seed=900 + i,
        )
        inst = generate_instance(cfg)
        opt = exact_optimum(inst).fitness
        res = evolve(inst, DsgaConfig(max_evaluations=5000, seed=i))
        if res.fitness > opt:
            exceeded += 1
        if res.fitness == opt:
            matches += 1
    elapsed = time.perf_counter() - t0
    ok = matches >= 45 and exceeded == 0 and elapsed <= 300.0
    _report(capsys, "oracle-match", ok,
            f"{matches}/50 optima matched, {exceeded} above optimum, "
            f"{elapsed:.1f}s (limit 300s)")


def test_criterion_3_traces_are_monotone_and_reproducible(capsys):
    """Best-so-far traces never decrease and reruns are bit-identical."""
    inst = generate_instance(GeneratorConfig(task_count=100, seed=5))
    cfg = DsgaConfig(max_evaluations=1000, seed=77)
    a = evolve(inst, cfg)
    b = evolve(inst, cfg)
    ra = random_search(inst, 1000, seed=77)
    rb = random_search(inst, 1000, seed=77)
    monotone = (all(x <= y for x, y in zip(a.history, a.history[1:]))
                and all(x <= y for x, y in zip(ra.history, ra.history[1:])))
    identical = (np.array_equal(a.history, b.history)
                 and a.schedule == b.schedule
                 and np.array_equal(ra.history, rb.history)
                 and ra.schedule == rb.schedule)
    lengths = len(a.history) == len(ra.history) == 1000
    ok = monotone and identical and lengths
    _report(capsys, "trace-integrity", ok,
            f"monotone={monotone}, rerun-identical={identical}, "
            f"length-exact={lengths} (single-threaded solver)")


def test_criterion_4_similarity_algebra(capsys):
    """Weighting, distance mapping and threshold identities to 1e-12."""
    tol = 1e-12
    checks = []
    # spread column takes all the weight
    w = rvw_weights(np.array([[1.0, 2.0], [3.0, 2.0]]))
    checks.append(abs(w[0] - 1.0) < tol and abs(w[1]) < tol)
    # weighted distance 2 maps to similarity 1/3
    a = Task(id=1, est=0, let=100, duration=10, profit=9)
    b = Task(id=2, est=2, let=102, duration=10, profit=9)
    ts = task_similarity_matrix([a, b], np.array([0.5, 0.5, 0.0, 0.0]))
    checks.append(abs(ts.values[0, 1] - 1.0 / 3.0) < tol)
    # threshold starts at the mean and ends half a deviation lower
    checks.append(abs(generation_threshold(1, 60, 0.8, 0.2) - 0.8) < tol)
    checks.append(abs(generation_threshold(60, 60, 0.8, 0.2) - 0.7) < tol)
    ok = all(checks)
    _report(capsys, "similarity-algebra", ok,
            f"4/4 identities within {tol:g}" if ok else f"failed: {checks}")


def test_criterion_5_adaptive_operators_earn_their_keep(capsys):
    """Mean best fitness with operator adaptation >= without, both sizes."""
    t0 = time.perf_counter()
    fixtures = [
        ("600", GeneratorConfig(task_count=600, station_count=2, seed=31)),
        ("1000", GeneratorConfig(task_count=1000, seed=12)),
    ]
    summary = []
    ok = True
    for label, gcfg in fixtures:
        inst = generate_instance(gcfg)
        means = {}
        for algo_adaptive in (True, False):
            fits = []
            for seed in range(100, 110):
                cfg = DsgaConfig(max_evaluations=5000, seed=seed,
                                 adaptive_operators=algo_adaptive)
                fits.append(evolve(inst, cfg).fitness)
            means[algo_adaptive] = statistics.mean(fits)
        summary.append(f"{label}-task: adaptive {means[True]:.1f} "
                       f"vs fixed {means[False]:.1f}")
        ok = ok and means[True] >= means[False]
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed <= 1200.0
    _report(capsys, "operator-adaptation", ok,
            "; ".join(summary) + f"; 10 runs each, {elapsed:.0f}s (limit 1200s)")


def test_criterion_6_beats_random_search_by_two_percent(capsys):
    """Pooled mean over three 1000-task instances: engine >= 1.02 x random."""
    t0 = time.perf_counter()
    engine_fits = []
    random_fits = []
    for gseed in (22, 23, 25):
        inst = generate_instance(GeneratorConfig(task_count=1000, seed=gseed))
        for seed in range(200, 205):
            cfg = DsgaConfig(max_evaluations=5000, seed=seed)
            engine_fits.append(evolve(inst, cfg).fitness)
            random_fits.append(random_search(inst, 5000, seed=seed).fitness)
    mean_engine = statistics.mean(engine_fits)
    mean_random = statistics.mean(random_fits)
    ratio = mean_engine / mean_random
    elapsed = time.perf_counter() - t0
    ok = ratio >= 1.02 and elapsed <= 1200.0
    _report(capsys, "beats-random", ok,
            f"engine {mean_engine:.1f} vs random {mean_random:.1f}, "
            f"ratio {ratio:.4f} (need 1.02), 15 runs each, "
            f"{elapsed:.0f}s (limit 1200s)")


def test_criterion_7_thousand_task_run_is_fast_enough(capsys):
    """One full engine run (1000 tasks, 5000 evaluations) within 30s."""
    inst = generate_instance(GeneratorConfig(task_count=1000, seed=7))
    t0 = time.perf_counter()
    res = evolve(inst, DsgaConfig(max_evaluations=5000, seed=0))
    elapsed = time.perf_counter() - t0
    valid = validate_schedule(inst, res.schedule).ok
    ok = elapsed <= 30.0 and valid and len(res.history) == 5000
    _report(capsys, "runtime-bound", ok,
            f"fitness {res.fitness}, {elapsed:.1f}s (limit 30s), "
            f"validated={valid}")


def test_criterion_8_duration_distribution(capsys):
    """10000 raw duration draws: mean 55 +/- 2, std 45 +/- 2."""
    rng = np.random.default_rng(0)
    draws = duration_draws(10_000, 55.0, 45.0, rng)
    mean = float(draws.mean())
    std = float(draws.std())
    ok = abs(mean - 55.0) < 2.0 and abs(std - 45.0) < 2.0
    _report(capsys, "duration-moments", ok,
            f"mean {mean:.2f} (55±2), std {std:.2f} (45±2), raw draws "
            f"before clipping")
