# app/simengine/event_loop.py
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterator, List

import numpy as np
import simpy

from app.errors import StructuralError
from app.simengine.sim_models import (
    CLASS_RANK,
    EVENT_HEARTBEAT,
    EVENT_LINK_FAILURE,
    EVENT_PACKET_IN,
    AppModel,
    SimScenario,
)
from app.tooling.seeding import rng_for

log = logging.getLogger(__name__)

STREAM_ARRIVALS = 0
STREAM_SERVICE = 1

_ARRIVAL_CHUNK = 1024
_EPS = 1e-9


@dataclass
class Segment:
    server: int
    service_ms: float
    rank: int
    quantum: bool = False


@dataclass
class Job:
    event_class: str
    created: float
    segments: List[Segment]
    index: int = 0
    remaining_ms: float = 0.0
    station_arrival: float = 0.0
    seq: int = 0
    ident: int = -1

    @property
    def segment(self) -> Segment:
        return self.segments[self.index]


@dataclass
class StationCounters:
    arrivals: int = 0
    departures: int = 0
    sojourn_total: float = 0.0
    in_system: int = 0
    area: float = 0.0
    last_change: float = 0.0
    busy: float = 0.0
    inversions: int = 0


class Station:
    """One controller server: a priority store drained by a single non-preemptive server process."""

    def __init__(self, loop: "EventLoop", server: int) -> None:
        self.loop = loop
        self.env = loop.env
        self.server = server
        self.store = simpy.PriorityStore(self.env)
        self.waiting = [0] * len(CLASS_RANK)
        self.counters = StationCounters()
        self.env.process(self._serve())

    def _track(self, delta: int) -> None:
        now = self.env.now
        start = max(self.counters.last_change, self.loop.window_start)
        if now > start:
            self.counters.area += self.counters.in_system * (now - start)
        self.counters.last_change = now
        self.counters.in_system += delta

    def arrive(self, job: Job) -> None:
        job.station_arrival = self.env.now
        job.remaining_ms = job.segment.service_ms
        job.seq = next(self.loop.sequence)
        if self.env.now >= self.loop.window_start:
            self.counters.arrivals += 1
        self._track(+1)
        self._enqueue(job)

    def _enqueue(self, job: Job) -> None:
        key = job.segment.rank if self.loop.prioritized else 0
        self.waiting[job.segment.rank] += 1
        self.store.put(simpy.PriorityItem((key, job.seq), job))

    def _serve(self) -> Iterator[simpy.Event]:
        while True:
            item = yield self.store.get()
            job: Job = item.item
            seg = job.segment
            self.waiting[seg.rank] -= 1
            if self.env.now >= self.loop.window_start and any(self.waiting[r] > 0 for r in range(seg.rank)):
                self.counters.inversions += 1

            burst = min(self.loop.quantum_ms, job.remaining_ms) if seg.quantum else job.remaining_ms
            started = self.env.now
            yield self.env.timeout(burst)
            overlap = self.env.now - max(started, self.loop.window_start)
            if overlap > 0:
                self.counters.busy += overlap

            job.remaining_ms -= burst
            if job.remaining_ms > _EPS:
                # keeps its original sequence number, so it resumes ahead of later arrivals of its class
                self._enqueue(job)
                continue

            if job.station_arrival >= self.loop.window_start:
                self.counters.departures += 1
                self.counters.sojourn_total += self.env.now - job.station_arrival
            self._track(-1)
            self.loop.advance(job)

    def finish(self, end: float) -> None:
        start = max(self.counters.last_change, self.loop.window_start)
        if end > start:
            self.counters.area += self.counters.in_system * (end - start)
        self.counters.last_change = end


@dataclass
class Recorder:
    latencies: Dict[str, List[float]] = field(default_factory=dict)
    generated_packet_ins: int = 0
    completed_packet_ins: int = 0
    heartbeats: int = 0
    missed: int = 0
    open_heartbeats: Dict[int, float] = field(default_factory=dict)

    def sample(self, event_class: str, latency: float) -> None:
        self.latencies.setdefault(event_class, []).append(latency)


class EventLoop:
    """
    Drives one scenario on a simpy environment measured in milliseconds.

    Packet-ins follow the configured app path through the placement, heart-beats
    are periodic per simulated partition and link failures activate the
    compute-intensive apps. Consecutive path stages on one server run as one
    dispatch; a change of server costs the cross-server hop.
    """

    def __init__(self, scenario: SimScenario) -> None:
        self.scenario = scenario
        self.env = simpy.Environment()
        self.duration_ms = scenario.duration_s * 1000.0
        self.window_start = scenario.warmup_fraction * self.duration_ms
        self.prioritized = scenario.prioritization
        self.quantum_ms = scenario.dj_quantum_ms
        self.sequence = itertools.count()
        self.recorder = Recorder()
        self.stations = [Station(self, s) for s in range(scenario.servers.count)]
        self._heartbeat_ids = itertools.count()

    # ---------- wiring ----------

    def _app(self, app_id: str) -> AppModel:
        app = self.scenario.app(app_id)
        if app is None:
            raise StructuralError(f"Scenario has no model for app [app={app_id}]")
        return app

    def _server_of(self, app_id: str, partition: int) -> int:
        idx = self.scenario.graph.index_of(app_id, partition)
        return self.scenario.placement.assignment[idx]

    def _service(self, app: AppModel, rng: np.random.Generator) -> float:
        if app.service_dist == "exponential":
            return float(rng.exponential(app.service_time_ms))
        return app.service_time_ms

    def _packet_segments(self, partition: int, rng: np.random.Generator) -> List[Segment]:
        segments: List[Segment] = []
        for app_id in self.scenario.packet_in_path:
            app = self._app(app_id)
            server = self._server_of(app_id, partition)
            service = self._service(app, rng)
            if segments and segments[-1].server == server:
                segments[-1].service_ms += service
                segments[-1].rank = min(segments[-1].rank, app.rank)
            else:
                segments.append(Segment(server=server, service_ms=service, rank=app.rank))
        return segments

    # ---------- job flow ----------

    def advance(self, job: Job) -> None:
        job.index += 1
        if job.index >= len(job.segments):
            self._complete(job)
            return
        self.env.process(self._hop(job))

    def _hop(self, job: Job) -> Iterator[simpy.Event]:
        hop = self.scenario.cross_server_hop_ms
        if hop > 0:
            yield self.env.timeout(hop)
        self.stations[job.segment.server].arrive(job)

    def _complete(self, job: Job) -> None:
        latency = self.env.now - job.created
        if job.created < self.window_start:
            return
        rec = self.recorder
        rec.sample(job.event_class, latency)
        if job.event_class == EVENT_PACKET_IN:
            rec.completed_packet_ins += 1
        elif job.event_class == EVENT_HEARTBEAT:
            rec.heartbeats += 1
            if latency > self.scenario.heartbeat_deadline_ms:
                rec.missed += 1
            rec.open_heartbeats.pop(job.ident, None)

    def _submit(self, job: Job) -> None:
        self.stations[job.segment.server].arrive(job)

    # ---------- sources ----------

    def _packet_source(self, partition: int) -> Iterator[simpy.Event]:
        arrivals = rng_for(self.scenario.seed, partition, STREAM_ARRIVALS)
        service = rng_for(self.scenario.seed, partition, STREAM_SERVICE)
        mean_gap = 1000.0 / self.scenario.packet_in_rate
        while True:
            for gap in arrivals.exponential(mean_gap, size=_ARRIVAL_CHUNK).tolist():
                yield self.env.timeout(gap)
                if self.env.now >= self.window_start:
                    self.recorder.generated_packet_ins += 1
                self._submit(Job(EVENT_PACKET_IN, self.env.now, self._packet_segments(partition, service)))

    def _heartbeat_source(self, partition: int, app: AppModel) -> Iterator[simpy.Event]:
        period = 1000.0 / self.scenario.heartbeat_rate
        server = self._server_of(app.app_id, partition)
        yield self.env.timeout(0.5 * period)
        while True:
            job = Job(EVENT_HEARTBEAT, self.env.now, [Segment(server, app.service_time_ms, app.rank)])
            job.ident = next(self._heartbeat_ids)
            if self.env.now >= self.window_start:
                self.recorder.open_heartbeats[job.ident] = self.env.now
            self._submit(job)
            yield self.env.timeout(period)

    def _failure_source(self, partition: int, apps: List[AppModel]) -> Iterator[simpy.Event]:
        interval = self.scenario.link_failure_interval_s * 1000.0
        service = rng_for(self.scenario.seed, partition, STREAM_SERVICE + 1)
        yield self.env.timeout(0.5 * interval)
        while True:
            for app in apps:
                seg = Segment(self._server_of(app.app_id, partition), self._service(app, service), app.rank, quantum=True)
                self._submit(Job(EVENT_LINK_FAILURE, self.env.now, [seg]))
            yield self.env.timeout(interval)

    def _check_path(self, partition: int) -> None:
        for app_id in self.scenario.packet_in_path:
            self._app(app_id)
            self._server_of(app_id, partition)

    def start(self) -> None:
        scenario = self.scenario
        heartbeat_apps = scenario.apps_of_class("real_time")
        failure_apps = scenario.apps_of_class("compute_intensive")
        for partition in scenario.simulated_partitions:
            if scenario.packet_in_rate > 0 and scenario.packet_in_path:
                self._check_path(partition)
                self.env.process(self._packet_source(partition))
            if scenario.heartbeat_rate > 0:
                for app in heartbeat_apps:
                    self.env.process(self._heartbeat_source(partition, app))
            if scenario.link_failure_interval_s is not None and failure_apps:
                self.env.process(self._failure_source(partition, failure_apps))

    def run(self) -> None:
        self.start()
        self.env.run(until=self.duration_ms)
        for station in self.stations:
            station.finish(self.duration_ms)
        rec = self.recorder
        for created in rec.open_heartbeats.values():
            if self.duration_ms - created > self.scenario.heartbeat_deadline_ms:
                rec.heartbeats += 1
                rec.missed += 1
        log.debug(
            "Simulation finished [duration_ms=%.1f, packet_ins=%s/%s, heartbeats=%s, missed=%s]",
            self.duration_ms, rec.completed_packet_ins, rec.generated_packet_ins, rec.heartbeats, rec.missed,
        )
