"""Frame-loop timing harness.

Replays a trace at max speed through a fresh session and reports per-frame
processing statistics. Dispatch stays active during the run, so a delivery
backend that leaks into the frame loop shows up in the numbers.

Single-run timings at microsecond scale are dominated by scheduler noise, so
the headline statistics are per-frame floors: each frame index's minimum
across ``repeats`` runs (the engine is deterministic per index). A systematic
stall, like a blocking dispatch call, recurs at the same index every run and
survives the floor; stray preemptions do not. Raw per-run stats are kept in
the report as well. GC is paused during timed runs, and the first
``warmup_frames`` of each run are excluded from the statistics (a fresh
session's first frames pay one-off setup cost, and no selection can fire
before the dwell threshold anyway).
"""

from __future__ import annotations

import gc
import statistics
from dataclasses import dataclass, field

from .dispatch import Dispatcher
from .model import SessionConfig, SkeletonFrame
from .session import SessionEngine
from .traceio import Pace, replay


@dataclass(frozen=True)
class RunStats:
    frames: int
    min_ms: float
    median_ms: float
    mean_ms: float
    max_ms: float

    @property
    def max_median_ratio(self) -> float:
        return self.max_ms / self.median_ms if self.median_ms > 0 else float("inf")

    @property
    def effective_fps(self) -> float:
        return 1000.0 / self.mean_ms if self.mean_ms > 0 else float("inf")


def _stats(times_ms: list[float]) -> RunStats:
    return RunStats(
        frames=len(times_ms),
        min_ms=min(times_ms),
        median_ms=statistics.median(times_ms),
        mean_ms=statistics.fmean(times_ms),
        max_ms=max(times_ms),
    )


@dataclass
class BenchReport:
    floor: RunStats  # per-frame-index minima across runs
    runs: list[RunStats] = field(default_factory=list)
    selections: int = 0

    def lines(self) -> list[str]:
        f = self.floor
        return [
            f"frames:            {f.frames}",
            f"selections:        {self.selections}",
            f"min frame time:    {f.min_ms:.4f} ms",
            f"median frame time: {f.median_ms:.4f} ms",
            f"mean frame time:   {f.mean_ms:.4f} ms",
            f"max frame time:    {f.max_ms:.4f} ms",
            f"max/median ratio:  {f.max_median_ratio:.2f}",
            f"effective fps:     {f.effective_fps:.1f}",
            f"runs:              {len(self.runs)}",
        ]


def _run_once(
    records: list[SkeletonFrame],
    config: SessionConfig,
    dispatcher: Dispatcher | None,
) -> tuple[list[float], int]:
    engine = SessionEngine(config, dispatcher)
    gc_was_enabled = gc.isenabled()
    gc.disable()
    try:
        replay(records, engine.process_frame, pace=Pace.MAX_SPEED)
    finally:
        if gc_was_enabled:
            gc.enable()
    times_ms = [t * 1000 for t in engine.counters.frame_times_s]
    return times_ms, engine.counters.selections


def bench(
    records: list[SkeletonFrame],
    config: SessionConfig,
    dispatcher: Dispatcher | None = None,
    repeats: int = 3,
    warmup_frames: int = 2,
) -> BenchReport:
    if not records:
        raise ValueError("bench needs a non-empty trace")
    skip = warmup_frames if len(records) > warmup_frames else 0
    all_times: list[list[float]] = []
    runs: list[RunStats] = []
    selections = 0
    for _ in range(max(1, repeats)):
        times_ms, selections = _run_once(records, config, dispatcher)
        all_times.append(times_ms[skip:])
        runs.append(_stats(times_ms[skip:]))
    floor = _stats([min(per_index) for per_index in zip(*all_times)])
    return BenchReport(floor=floor, runs=runs, selections=selections)
