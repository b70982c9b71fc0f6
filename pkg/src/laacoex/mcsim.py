"""Slot-level Monte-Carlo simulator of the coexisting MAC protocols.

The simulator deliberately lives in the same slotted abstraction as the
analytical model so the two can be compared number for number: every channel
event is one backoff step for every station (counters freeze during others'
transmissions and the whole busy period collapses into a single event), a
station transmits when its counter hits zero, and the six event classes carry
the same durations the analytical expected-event-time uses. One seeded PCG64
stream drives all draws, so a given configuration is bit-reproducible.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .core import Scenario, derived_durations
from .throughput import event_durations

_BATCHES = 100          # batch-means groups for standard-error estimates
_POOL_CHUNK = 1 << 16   # uint64 draws fetched from the generator at a time


class _RandomPool:
    """Buffered uint64 draws from PCG64 with unbiased bounded sampling."""

    def __init__(self, seed: int):
        self._gen = np.random.Generator(np.random.PCG64(seed))
        self._buf: list[int] = []
        self._next = 0

    def _u64(self) -> int:
        if self._next >= len(self._buf):
            self._buf = self._gen.integers(0, 1 << 64, size=_POOL_CHUNK,
                                           dtype=np.uint64).tolist()
            self._next = 0
        value = self._buf[self._next]
        self._next += 1
        return value

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) via mask-and-reject (no modulo bias)."""
        if n & (n - 1) == 0:
            return self._u64() & (n - 1)
        mask = (1 << (n - 1).bit_length()) - 1
        while True:
            value = self._u64() & mask
            if value < n:
                return value

    def coin(self, p: float) -> bool:
        """True with probability p."""
        return self._u64() < p * 18446744073709551616.0  # p * 2**64


@dataclass(frozen=True)
class SimConfig:
    """One simulation run: scenario, length, seed, warmup."""

    scenario: Scenario
    horizon_events: int = 2_000_000   # channel events simulated in total
    seed: int = 1                     # PCG64 seed
    warmup_events: int = 10_000       # leading events excluded from statistics
    trace_path: str | None = None     # per-event CSV dump (debugging; slow)

    def __post_init__(self) -> None:
        if not self.horizon_events > self.warmup_events >= 0:
            raise ValueError("horizon_events must exceed warmup_events >= 0")


@dataclass(frozen=True)
class SimReport:
    """Measured counterparts of the analytical quantities."""

    tput_wifi_mbps: float
    tput_laa_mbps: float
    measured_tau_w: float
    measured_tau_l: float
    measured_p_w: float
    measured_p_l: float
    event_counts: dict[str, int]
    stderr: dict[str, float]


EVENT_CLASSES = ("idle", "wifi-success", "laa-success",
                 "wifi-collision", "laa-collision", "cross-collision")


def simulate(cfg: SimConfig) -> SimReport:
    """Run the protocol with perfect cross-network sensing.

    Detection probabilities in the scenario are ignored; any overlap between
    transmissions is a collision for every participant.
    """
    return _run(cfg, honor_detection=False)


def simulate_with_detection(cfg: SimConfig) -> SimReport:
    """Run the protocol with imperfect cross-network energy detection.

    When exactly one station of a network overlaps only with the other
    network's transmissions, its own backoff chain registers a collision
    with the scenario's detection probability and a success otherwise,
    mirroring how the analytical collision probabilities weight the
    cross-network term. Event class, duration and delivered payload are
    unaffected (a cross event carries no payload either way), so analytic
    and simulated throughput stay comparable. With both detection
    probabilities at 1 the run is bit-identical to :func:`simulate`.
    """
    return _run(cfg, honor_detection=True)


def _run(cfg: SimConfig, honor_detection: bool) -> SimReport:
    s = cfg.scenario.effective()
    n_w, n_l = s.n_wifi, s.n_laa
    p_dw = s.p_dw if honor_detection else 1.0
    p_dl = s.p_dl if honor_detection else 1.0

    durations = event_durations(s.wifi, s.laa)
    t_sw, t_cw = durations.t_sw, durations.t_cw
    t_sl, t_cl, t_cc = durations.t_sl, durations.t_cl, durations.t_cc
    slot = s.wifi.slot_us
    psize, _, _ = derived_durations(s.wifi)
    wifi_bits = psize * s.wifi.data_rate_mbps
    laa_bits = s.laa.pdcch_fraction * s.laa.txop_us * s.laa.data_rate_mbps

    # Stage ceilings: the chain resets after its last stay at the top window.
    # Comparison mode drops the Wi-Fi chain's extra stay, like the testbed MAC.
    max_stage_w = s.wifi.m + (0 if s.comparison_mode else 1)
    max_stage_l = s.laa.m + s.laa.retry_limit
    win_w = [2 ** min(j, s.wifi.m) * s.wifi.w0 for j in range(max_stage_w + 1)]
    win_l = [2 ** min(j, s.laa.m) * s.laa.w0 for j in range(max_stage_l + 1)]

    pool = _RandomPool(cfg.seed)
    stage_w = [0] * n_w
    stage_l = [0] * n_l
    cnt_w = [pool.randbelow(win_w[0]) for _ in range(n_w)]
    cnt_l = [pool.randbelow(win_l[0]) for _ in range(n_l)]

    horizon, warmup = cfg.horizon_events, cfg.warmup_events
    counted_total = horizon - warmup
    n_batches = min(_BATCHES, counted_total)
    batch_size = counted_total // n_batches

    def batch_of(idx: int) -> int:
        return min((idx - warmup) // batch_size, n_batches - 1)

    b_time = [0.0] * n_batches
    b_events = [0] * n_batches
    b_bits_w = [0.0] * n_batches
    b_bits_l = [0.0] * n_batches
    b_att_w = [0] * n_batches
    b_att_l = [0] * n_batches
    b_col_w = [0] * n_batches
    b_col_l = [0] * n_batches
    counts = dict.fromkeys(EVENT_CLASSES, 0)

    trace = _TraceWriter(cfg.trace_path, n_w, n_l) if cfg.trace_path else None
    big = 1 << 62

    idx = 0
    while idx < horizon:
        gap = min(min(cnt_w, default=big), min(cnt_l, default=big))
        if gap > 0:
            run = min(gap, horizon - idx)
            if trace:
                run = 1
                trace.row(idx, "idle", slot, stage_w, cnt_w, stage_l, cnt_l)
            lo, hi = max(idx, warmup), idx + run
            if hi > lo:
                counts["idle"] += hi - lo
                for at in range(lo, hi):  # idle runs may straddle batches
                    b = batch_of(at)
                    b_time[b] += slot
                    b_events[b] += 1
            for i in range(n_w):
                cnt_w[i] -= run
            for i in range(n_l):
                cnt_l[i] -= run
            idx += run
            continue

        n_wt = cnt_w.count(0)
        n_lt = cnt_l.count(0)
        if n_lt == 0:
            cls, dur = ("wifi-success", t_sw) if n_wt == 1 else ("wifi-collision", t_cw)
        elif n_wt == 0:
            cls, dur = ("laa-success", t_sl) if n_lt == 1 else ("laa-collision", t_cl)
        else:
            cls, dur = "cross-collision", t_cc
        if trace:
            trace.row(idx, cls, dur, stage_w, cnt_w, stage_l, cnt_l)

        counted = idx >= warmup
        if counted:
            b = batch_of(idx)
            counts[cls] += 1
            b_time[b] += dur
            b_events[b] += 1
            b_att_w[b] += n_wt
            b_att_l[b] += n_lt
            if cls == "wifi-success":
                b_bits_w[b] += wifi_bits
            elif cls == "laa-success":
                b_bits_l[b] += laa_bits

        for i in range(n_w):
            if cnt_w[i] == 0:
                if n_wt == 1 and (n_lt == 0 or not _detects(pool, p_dw)):
                    stage_w[i] = 0
                else:
                    if counted:
                        b_col_w[b] += 1
                    stage_w[i] = 0 if stage_w[i] == max_stage_w else stage_w[i] + 1
                cnt_w[i] = pool.randbelow(win_w[stage_w[i]])
            else:
                cnt_w[i] -= 1
        for i in range(n_l):
            if cnt_l[i] == 0:
                if n_lt == 1 and (n_wt == 0 or not _detects(pool, p_dl)):
                    stage_l[i] = 0
                else:
                    if counted:
                        b_col_l[b] += 1
                    stage_l[i] = 0 if stage_l[i] == max_stage_l else stage_l[i] + 1
                cnt_l[i] = pool.randbelow(win_l[stage_l[i]])
            else:
                cnt_l[i] -= 1
        idx += 1

    if trace:
        trace.close()

    return _report(n_w, n_l, counts, b_time, b_events, b_bits_w, b_bits_l,
                   b_att_w, b_att_l, b_col_w, b_col_l)


def _detects(pool: _RandomPool, p_d: float) -> bool:
    # Draw only when the outcome is uncertain, so perfect-detection runs
    # consume the exact same random stream as the plain protocol.
    if p_d >= 1.0:
        return True
    if p_d <= 0.0:
        return False
    return pool.coin(p_d)


def _report(n_w, n_l, counts, b_time, b_events, b_bits_w, b_bits_l,
            b_att_w, b_att_l, b_col_w, b_col_l) -> SimReport:
    total_time = math.fsum(b_time)
    events = sum(b_events)
    att_w, att_l = sum(b_att_w), sum(b_att_l)
    col_w, col_l = sum(b_col_w), sum(b_col_l)

    def per_batch(num, den, scale=1.0):
        return [n / (d * scale) if d else 0.0 for n, d in zip(num, den)]

    batch_metrics = {
        "tput_wifi_mbps": per_batch(b_bits_w, b_time),
        "tput_laa_mbps": per_batch(b_bits_l, b_time),
        "tau_w": per_batch(b_att_w, b_events, n_w) if n_w else [0.0],
        "tau_l": per_batch(b_att_l, b_events, n_l) if n_l else [0.0],
        "p_w": per_batch(b_col_w, b_att_w),
        "p_l": per_batch(b_col_l, b_att_l),
    }
    stderr = {}
    for name, values in batch_metrics.items():
        if len(values) > 1:
            stderr[name] = float(np.std(values, ddof=1) / math.sqrt(len(values)))
        else:
            stderr[name] = 0.0

    return SimReport(
        tput_wifi_mbps=math.fsum(b_bits_w) / total_time,
        tput_laa_mbps=math.fsum(b_bits_l) / total_time,
        measured_tau_w=att_w / (n_w * events) if n_w else 0.0,
        measured_tau_l=att_l / (n_l * events) if n_l else 0.0,
        measured_p_w=col_w / att_w if att_w else 0.0,
        measured_p_l=col_l / att_l if att_l else 0.0,
        event_counts=counts,
        stderr=stderr)


class _TraceWriter:
    """Per-event CSV dump: index, class, duration, per-node chain state."""

    def __init__(self, path: str, n_w: int, n_l: int):
        self._fh = open(path, "w", newline="", encoding="utf-8")
        self._writer = csv.writer(self._fh, lineterminator="\n")
        header = ["event_index", "event_class", "duration_us"]
        for i in range(n_w):
            header += [f"w{i}_stage", f"w{i}_counter"]
        for i in range(n_l):
            header += [f"l{i}_stage", f"l{i}_counter"]
        self._writer.writerow(header)

    def row(self, idx, cls, dur, stage_w, cnt_w, stage_l, cnt_l) -> None:
        cells = [idx, cls, dur]
        for st, ct in zip(stage_w, cnt_w):
            cells += [st, ct]
        for st, ct in zip(stage_l, cnt_l):
            cells += [st, ct]
        self._writer.writerow(cells)

    def close(self) -> None:
        self._fh.close()
