"""Permutation decoder: first-fit placement with feed-switching and window trimming.

Tasks are processed in permutation order. Each task scans the free
sub-windows of its candidate visible windows in chronological (start, window
id) order and takes the first placement that fits: a regular run anchored at
aest = max(est, piece.start) when the piece has room before
alet = min(let, piece.end), else a feed-switch run that overruns the window's
end onto its associated feeding window. Consumed window capacity is trimmed
out of a per-decode pool; setup/switch gaps and one-link-at-a-time exclusivity
are enforced against per-antenna and per-owner busy timelines.

The hot loop is compiled with numba over flat int64 arrays; build a
DecodeContext once per instance and reuse it across decodes.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
from numba import njit

from .model import (
    SATELLITE,
    AntennaRef,
    Instance,
    Placement,
    Schedule,
)


def associate_feed_windows(instance: Instance) -> dict[int, int]:
    """Bind each visible window to at most one feeding window.

    Eligible: same satellite antenna, overlap (window.end - feed.start) of at
    least the instance's minimum feed overlap, and feed.end strictly past
    window.end. Largest feed.end wins; ties go to the smallest feed id.
    """
    beta = instance.timing.min_feed_overlap
    by_antenna: dict[AntennaRef, list] = {}
    for f in instance.feed_windows:
        by_antenna.setdefault(f.sat_antenna, []).append(f)
    out: dict[int, int] = {}
    for w in instance.windows:
        best = None
        for f in by_antenna.get(w.sat_antenna, ()):
            if w.end - f.start < beta or f.end <= w.end:
                continue
            if best is None or (f.end, -f.id) > (best.end, -best.id):
                best = f
        if best is not None:
            out[w.id] = best.id
    return out


# --------------------------------------------------------------------------
# compiled core

@njit(cache=True, inline="always")
def _find_pos(starts, cnt, s):
    lo, hi = 0, cnt
    while lo < hi:
        mid = (lo + hi) // 2
        if starts[mid] < s:
            lo = mid + 1
        else:
            hi = mid
    return lo


@njit(cache=True, inline="always")
def _gap_ok(starts, ends, cnt, s, e, gap):
    # neighbors on the same antenna need idle time >= gap around [s, e)
    pos = _find_pos(starts, cnt, s)
    if pos > 0 and s - ends[pos - 1] < gap:
        return False
    if pos < cnt and starts[pos] - e < gap:
        return False
    return True


@njit(cache=True, inline="always")
def _overlap_free(starts, ends, cnt, s, e):
    # one link per owner at any instant; intervals are half-open
    pos = _find_pos(starts, cnt, s)
    if pos > 0 and ends[pos - 1] > s:
        return False
    if pos < cnt and starts[pos] < e:
        return False
    return True


@njit(cache=True, inline="always")
def _insert_interval(starts, ends, cnt, s, e):
    pos = _find_pos(starts, cnt, s)
    for j in range(cnt, pos, -1):
        starts[j] = starts[j - 1]
        ends[j] = ends[j - 1]
    starts[pos] = s
    ends[pos] = e
    return cnt + 1


@njit(cache=True)
def _decode_core(perm, t_est, t_let, t_dur,
                 cand_off, cand_win,
                 w_start, w_end, w_rank, w_sat_ant, w_gnd_ant, w_sat_owner, w_gnd_owner,
                 w_assoc,
                 f_start, f_end, f_gnd_ant, f_gnd_owner,
                 alpha, gamma, n_antennas, n_owners):
    n = perm.shape[0]
    nW = w_start.shape[0]
    nF = f_start.shape[0]

    # Free visible-window pieces: per-window singly-linked chains, start-sorted.
    capW = nW + n + 2
    pc_start = np.empty(capW, np.int64)
    pc_end = np.empty(capW, np.int64)
    pc_next = np.empty(capW, np.int64)
    win_head = np.empty(nW, np.int64)
    for w in range(nW):
        pc_start[w] = w_start[w]
        pc_end[w] = w_end[w]
        pc_next[w] = -1
        win_head[w] = w
    top = nW
    free_stack = np.empty(capW, np.int64)
    nfree = 0

    # Free feeding-window pieces, same structure.
    capF = nF + 2
    fc_start = np.empty(capF, np.int64)
    fc_end = np.empty(capF, np.int64)
    fc_next = np.empty(capF, np.int64)
    feed_head = np.empty(nF, np.int64)
    for f in range(nF):
        fc_start[f] = f_start[f]
        fc_end[f] = f_end[f]
        fc_next[f] = -1
        feed_head[f] = f

    # Busy timelines per antenna (gap rules) and per owner (exclusivity).
    tl_s = np.empty((n_antennas, n + 1), np.int64)
    tl_e = np.empty((n_antennas, n + 1), np.int64)
    tl_n = np.zeros(n_antennas, np.int64)
    ow_s = np.empty((n_owners, 2 * n + 1), np.int64)
    ow_e = np.empty((n_owners, 2 * n + 1), np.int64)
    ow_n = np.zeros(n_owners, np.int64)

    # Scratch for one task's candidate pieces.
    buf_ps = np.empty(capW, np.int64)
    buf_pe = np.empty(capW, np.int64)
    buf_rank = np.empty(capW, np.int64)
    buf_slot = np.empty(capW, np.int64)
    buf_prev = np.empty(capW, np.int64)
    buf_win = np.empty(capW, np.int64)
    order = np.empty(capW, np.int64)

    out_win = np.full(n, -1, np.int64)
    out_feed = np.full(n, -1, np.int64)
    out_start = np.zeros(n, np.int64)
    out_end = np.zeros(n, np.int64)

    for idx in range(n):
        k = perm[idx]
        est = t_est[k]
        let = t_let[k]
        d = t_dur[k]
        limit = let - d
        if limit < est:
            continue

        # Gather free pieces of the task's candidate windows.
        m = 0
        for ci in range(cand_off[k], cand_off[k + 1]):
            w = cand_win[ci]
            if w_start[w] > limit:
                break  # candidates are (start, rank)-sorted; the rest start later
            prev = np.int64(-1)
            s = win_head[w]
            while s != -1:
                ps = pc_start[s]
                if ps > limit:
                    break
                if pc_end[s] >= est:
                    buf_ps[m] = ps
                    buf_pe[m] = pc_end[s]
                    buf_rank[m] = w_rank[w]
                    buf_slot[m] = s
                    buf_prev[m] = prev
                    buf_win[m] = w
                    m += 1
                prev = s
                s = pc_next[s]

        if m == 0:
            continue

        # Insertion sort by (piece start, window rank): first-fit scan order.
        for i in range(m):
            order[i] = i
        for i in range(1, m):
            oi = order[i]
            key_s = buf_ps[oi]
            key_r = buf_rank[oi]
            j = i - 1
            while j >= 0:
                oj = order[j]
                if buf_ps[oj] > key_s or (buf_ps[oj] == key_s and buf_rank[oj] > key_r):
                    order[j + 1] = oj
                    j -= 1
                else:
                    break
            order[j + 1] = oi

        for bi in range(m):
            b = order[bi]
            ps = buf_ps[b]
            pe = buf_pe[b]
            w = buf_win[b]
            slot = buf_slot[b]
            prev = buf_prev[b]
            aest = est if est > ps else ps
            alet = let if let < pe else pe
            et = aest + d
            sa = w_sat_ant[w]
            so = w_sat_owner[w]
            ga = w_gnd_ant[w]
            go = w_gnd_owner[w]

            if et <= alet:
                if (_gap_ok(tl_s[sa], tl_e[sa], tl_n[sa], aest, et, alpha)
                        and _overlap_free(ow_s[so], ow_e[so], ow_n[so], aest, et)
                        and _gap_ok(tl_s[ga], tl_e[ga], tl_n[ga], aest, et, gamma)
                        and _overlap_free(ow_s[go], ow_e[go], ow_n[go], aest, et)):
                    # trim [aest, et] out of the piece
                    left = aest - ps
                    right = pe - et
                    if left > 0 and right > 0:
                        if nfree > 0:
                            nfree -= 1
                            new = free_stack[nfree]
                        else:
                            new = top
                            top += 1
                        pc_start[new] = et
                        pc_end[new] = pe
                        pc_next[new] = pc_next[slot]
                        pc_end[slot] = aest
                        pc_next[slot] = new
                    elif left > 0:
                        pc_end[slot] = aest
                    elif right > 0:
                        pc_start[slot] = et
                    else:
                        if prev == -1:
                            win_head[w] = pc_next[slot]
                        else:
                            pc_next[prev] = pc_next[slot]
                        free_stack[nfree] = slot
                        nfree += 1
                    tl_n[sa] = _insert_interval(tl_s[sa], tl_e[sa], tl_n[sa], aest, et)
                    ow_n[so] = _insert_interval(ow_s[so], ow_e[so], ow_n[so], aest, et)
                    tl_n[ga] = _insert_interval(tl_s[ga], tl_e[ga], tl_n[ga], aest, et)
                    ow_n[go] = _insert_interval(ow_s[go], ow_e[go], ow_n[go], aest, et)
                    out_win[k] = w
                    out_start[k] = aest
                    out_end[k] = et
                    break

            # Feed-switch: only from a piece that still owns the window's end,
            # with the run overrunning into the associated feeding window.
            fI = w_assoc[w]
            if fI >= 0 and pe == w_end[w] and et >= pe and et <= let:
                fslot = feed_head[fI]
                fprev = np.int64(-1)
                found = np.int64(-1)
                found_prev = np.int64(-1)
                while fslot != -1:
                    fs = fc_start[fslot]
                    if fs > pe:
                        break
                    if fc_end[fslot] >= et:  # piece covers [pe, et]
                        found = fslot
                        found_prev = fprev
                        break
                    fprev = fslot
                    fslot = fc_next[fslot]
                if found != -1:
                    fa = f_gnd_ant[fI]
                    fo = f_gnd_owner[fI]
                    ok = (_gap_ok(tl_s[sa], tl_e[sa], tl_n[sa], aest, et, alpha)
                          and _overlap_free(ow_s[so], ow_e[so], ow_n[so], aest, et)
                          and _gap_ok(tl_s[ga], tl_e[ga], tl_n[ga], aest, pe, gamma)
                          and _overlap_free(ow_s[go], ow_e[go], ow_n[go], aest, pe))
                    if ok and et > pe:
                        ok = (_gap_ok(tl_s[fa], tl_e[fa], tl_n[fa], pe, et, gamma)
                              and _overlap_free(ow_s[fo], ow_e[fo], ow_n[fo], pe, et))
                    if ok:
                        # left remainder of the window piece survives
                        if aest > ps:
                            pc_end[slot] = aest
                        else:
                            if prev == -1:
                                win_head[w] = pc_next[slot]
                            else:
                                pc_next[prev] = pc_next[slot]
                            free_stack[nfree] = slot
                            nfree += 1
                        # feeding piece keeps only [et, end]; the stretch before
                        # the handoff is dropped with it
                        if fc_end[found] > et:
                            fc_start[found] = et
                        else:
                            if found_prev == -1:
                                feed_head[fI] = fc_next[found]
                            else:
                                fc_next[found_prev] = fc_next[found]
                        tl_n[sa] = _insert_interval(tl_s[sa], tl_e[sa], tl_n[sa], aest, et)
                        ow_n[so] = _insert_interval(ow_s[so], ow_e[so], ow_n[so], aest, et)
                        tl_n[ga] = _insert_interval(tl_s[ga], tl_e[ga], tl_n[ga], aest, pe)
                        ow_n[go] = _insert_interval(ow_s[go], ow_e[go], ow_n[go], aest, pe)
                        if et > pe:
                            tl_n[fa] = _insert_interval(tl_s[fa], tl_e[fa], tl_n[fa], pe, et)
                            ow_n[fo] = _insert_interval(ow_s[fo], ow_e[fo], ow_n[fo], pe, et)
                        out_win[k] = w
                        out_feed[k] = fI
                        out_start[k] = aest
                        out_end[k] = et
                        break

    return out_win, out_feed, out_start, out_end


# --------------------------------------------------------------------------
# context and wrappers

class DecodeContext:
    """Flat-array view of one instance, shared read-only across decodes."""

    def __init__(self, instance: Instance):
        self.instance = instance
        tasks = instance.tasks
        self.n_tasks = len(tasks)
        self.task_ids = np.array([t.id for t in tasks], dtype=np.int64)
        self.id_to_index = {t.id: i for i, t in enumerate(tasks)}
        self.t_est = np.array([t.est for t in tasks], dtype=np.int64)
        self.t_let = np.array([t.let for t in tasks], dtype=np.int64)
        self.t_dur = np.array([t.duration for t in tasks], dtype=np.int64)
        self.t_profit = np.array([t.profit for t in tasks], dtype=np.int64)

        # Global antenna and owner indices. Satellites and stations are
        # disjoint owner id spaces, merged into one axis each.
        ant_index: dict[AntennaRef, int] = {}
        owner_index: dict[tuple[str, int], int] = {}
        for s in instance.satellites:
            owner_index[(SATELLITE, s.id)] = len(owner_index)
            for a in range(1, s.antennas + 1):
                ant_index[AntennaRef(SATELLITE, s.id, a)] = len(ant_index)
        for g in instance.stations:
            owner_index[("ground", g.id)] = len(owner_index)
            kind = g.feeding
            for a in range(1, g.antennas + 1):
                # kind string must match the refs used by windows
                ref = AntennaRef(
                    "feeding-ground-station" if kind else "ground-station", g.id, a)
                ant_index[ref] = len(ant_index)
        self.n_antennas = max(1, len(ant_index))
        self.n_owners = max(1, len(owner_index))

        def owner_of(ref: AntennaRef) -> int:
            key = (SATELLITE, ref.owner) if ref.kind == SATELLITE else ("ground", ref.owner)
            return owner_index[key]

        windows = instance.windows
        nW = len(windows)
        self.window_ids = np.array([w.id for w in windows], dtype=np.int64)
        self.w_start = np.array([w.start for w in windows], dtype=np.int64)
        self.w_end = np.array([w.end for w in windows], dtype=np.int64)
        # dense rank of external window id: scan tie-break
        self.w_rank = np.argsort(np.argsort(self.window_ids, kind="stable"), kind="stable").astype(np.int64) \
            if nW else np.zeros(0, np.int64)
        self.w_sat_ant = np.array([ant_index[w.sat_antenna] for w in windows], dtype=np.int64)
        self.w_gnd_ant = np.array([ant_index[w.ground_antenna] for w in windows], dtype=np.int64)
        self.w_sat_owner = np.array([owner_of(w.sat_antenna) for w in windows], dtype=np.int64)
        self.w_gnd_owner = np.array([owner_of(w.ground_antenna) for w in windows], dtype=np.int64)

        feeds = instance.feed_windows
        self.feed_ids = np.array([f.id for f in feeds], dtype=np.int64)
        self.f_start = np.array([f.start for f in feeds], dtype=np.int64)
        self.f_end = np.array([f.end for f in feeds], dtype=np.int64)
        self.f_gnd_ant = np.array([ant_index[f.ground_antenna] for f in feeds], dtype=np.int64)
        self.f_gnd_owner = np.array([owner_of(f.ground_antenna) for f in feeds], dtype=np.int64)

        assoc_ids = associate_feed_windows(instance)
        feed_pos = {f.id: i for i, f in enumerate(feeds)}
        self.w_assoc = np.array(
            [feed_pos[assoc_ids[w.id]] if w.id in assoc_ids else -1 for w in windows],
            dtype=np.int64)

        self._build_candidates()
        self.alpha = instance.timing.setup_gap
        self.gamma = instance.timing.switch_gap

    def _build_candidates(self) -> None:
        """Static per-task candidate windows in (start, rank) order (CSR)."""
        n, nW = self.n_tasks, len(self.w_start)
        if n == 0 or nW == 0:
            self.cand_off = np.zeros(n + 1, dtype=np.int64)
            self.cand_win = np.zeros(0, dtype=np.int64)
            return
        est = self.t_est[:, None]
        let = self.t_let[:, None]
        dur = self.t_dur[:, None]
        ws = self.w_start[None, :]
        we = self.w_end[None, :]
        aest_min = np.maximum(ws, est)
        regular = np.minimum(we, let) - aest_min >= dur
        has_feed = self.w_assoc >= 0
        if self.f_end.size:
            fe = np.where(has_feed, self.f_end[np.maximum(self.w_assoc, 0)],
                          np.int64(-1))[None, :]
        else:
            fe = np.full((1, nW), -1, dtype=np.int64)
        feed = has_feed[None, :] & (let >= we) & (aest_min + dur <= np.minimum(fe, let))
        cand = (we >= est) & (regular | feed)

        scan = np.lexsort((self.w_rank, self.w_start))
        cand_sorted = cand[:, scan]
        counts = cand_sorted.sum(axis=1)
        self.cand_off = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=self.cand_off[1:])
        rows, cols = np.nonzero(cand_sorted)
        self.cand_win = scan[cols].astype(np.int64)

    def decode_arrays(self, perm: np.ndarray):
        """Run the compiled decoder on a 0-based task index permutation."""
        return _decode_core(
            np.asarray(perm, dtype=np.int64),
            self.t_est, self.t_let, self.t_dur,
            self.cand_off, self.cand_win,
            self.w_start, self.w_end, self.w_rank, self.w_sat_ant, self.w_gnd_ant,
            self.w_sat_owner, self.w_gnd_owner, self.w_assoc,
            self.f_start, self.f_end, self.f_gnd_ant, self.f_gnd_owner,
            self.alpha, self.gamma, self.n_antennas, self.n_owners,
        )

    def decode_fitness(self, perm: np.ndarray) -> tuple[int, np.ndarray]:
        """Fitness plus the placed-window array (-1 = unscheduled)."""
        out_win, _, _, _ = self.decode_arrays(perm)
        return int(self.t_profit[out_win >= 0].sum()), out_win

    def schedule_from(self, perm: np.ndarray, outs) -> Schedule:
        out_win, out_feed, out_start, out_end = outs
        placements = []
        unscheduled = []
        for k in np.asarray(perm, dtype=np.int64):
            if out_win[k] < 0:
                unscheduled.append(int(self.task_ids[k]))
                continue
            feed = int(out_feed[k])
            placements.append(Placement(
                task_id=int(self.task_ids[k]),
                window_id=int(self.window_ids[out_win[k]]),
                start=int(out_start[k]),
                end=int(out_end[k]),
                feed_window_id=int(self.feed_ids[feed]) if feed >= 0 else None,
            ))
        return Schedule(tuple(placements), tuple(unscheduled))

    def decode(self, perm: np.ndarray) -> Schedule:
        return self.schedule_from(perm, self.decode_arrays(perm))


def get_context(instance: Instance) -> DecodeContext:
    """Context for an instance, built once and cached on the instance."""
    ctx = instance.__dict__.get("_decode_context")
    if ctx is None:
        ctx = DecodeContext(instance)
        instance.__dict__["_decode_context"] = ctx
    return ctx


def decode(instance: Instance, permutation: Sequence[int]) -> Schedule:
    """Decode a permutation of task ids into a feasible schedule.

    Raises ValueError unless the input is exactly a permutation of the
    instance's task ids.
    """
    ctx = get_context(instance)
    ids = list(permutation)
    if sorted(ids) != sorted(ctx.id_to_index):
        raise ValueError("input is not a permutation of the instance's task ids")
    perm = np.array([ctx.id_to_index[i] for i in ids], dtype=np.int64)
    return ctx.decode(perm)
