"""Deterministic discrete-event simulation of one road segment.

One RSU and one CA serve a road on which vehicles join, beacon, report and
leave. Every transmission is encoded to wire bytes (that is what the channel
accounting counts), decoded once, and delivered after a fixed delay to each
recipient. Events run in strict ``(time, sequence)`` order, so a given
configuration always produces the same event log.

Two modes share the same traffic: ``AdversaryList`` runs the full revocation
protocol; ``CrlBaseline`` replaces it with a periodically rebroadcast CRL.
"""

from __future__ import annotations

import csv
import dataclasses
import enum
import hashlib
import heapq
import io
import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

from .crypto import default_provider
from .errors import ConfigError, IncomparableRuns
from .messages import (
    CATEGORIES,
    CrlAdd,
    CrlResponse,
    DataMessage,
    Sealed,
    SealedKind,
    WarningMessage,
    decode_wire,
    encode_wire,
)
from .protocol import Decision, ProtocolConfig
from .world import World

SYNTHETIC_REVOKED_BASE = 2_000_000
BEACON_CATEGORY = 2
CRL_HEADER_SIZE = 6  # version, tag, u32 entry count

REVOCATION_CLASSES = (
    "warning", "accusation", "accusation_forward", "ca_order", "rsu_order", "add_broadcast", "crl_broadcast",
)
MESSAGE_CLASSES = ("data",) + REVOCATION_CLASSES


class Mode(str, enum.Enum):
    ADVERSARY_LIST = "AdversaryList"
    CRL_BASELINE = "CrlBaseline"


@dataclass(frozen=True)
class AdversarySpec:
    id: int
    compliant: bool = True


@dataclass(frozen=True)
class SimConfig:
    seed: int = 0
    duration: float = 300.0
    vehicle_count: int = 10
    adversaries: tuple[AdversarySpec, ...] = ()
    beacon_period: float = 1.0
    report_period: float = 1.0
    report_category: int = 1
    true_claim: int = 100
    false_claim: int = 55
    al_capacity: int = 10
    presence_window: int = 30
    freshness_window: int = 5
    observation_window: int = 10
    mode: Mode = Mode.ADVERSARY_LIST
    crl_broadcast_period: float = 10.0
    crl_seed_size: int = 0
    loss_probability: float = 0.0
    delivery_delay_ms: int = 10
    join_times: dict[int, float] = field(default_factory=dict)
    leave_times: dict[int, float] = field(default_factory=dict)
    churn_vehicles: int = 0

    def __post_init__(self):
        object.__setattr__(self, "adversaries", tuple(
            a if isinstance(a, AdversarySpec) else AdversarySpec(**a) if isinstance(a, dict) else AdversarySpec(int(a))
            for a in self.adversaries
        ))
        try:
            object.__setattr__(self, "mode", Mode(self.mode))
        except ValueError:
            raise ConfigError("mode", f"unknown mode {self.mode!r}") from None
        object.__setattr__(self, "join_times", {int(k): v for k, v in self.join_times.items()})
        object.__setattr__(self, "leave_times", {int(k): v for k, v in self.leave_times.items()})

    @property
    def vehicle_ids(self) -> list[int]:
        return list(range(1, self.vehicle_count + self.churn_vehicles + 1))

    @property
    def adversary_ids(self) -> list[int]:
        return [a.id for a in self.adversaries]

    def validate(self) -> "SimConfig":
        def need(ok: bool, name: str, why: str) -> None:
            if not ok:
                raise ConfigError(name, why)

        for name in ("seed", "vehicle_count", "al_capacity", "presence_window", "freshness_window",
                     "observation_window", "crl_seed_size", "delivery_delay_ms", "churn_vehicles",
                     "report_category", "true_claim", "false_claim"):
            need(isinstance(getattr(self, name), int) and not isinstance(getattr(self, name), bool),
                 name, "must be an integer")
        for name in ("duration", "beacon_period", "report_period", "crl_broadcast_period", "loss_probability"):
            value = getattr(self, name)
            need(isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value),
                 name, "must be a finite number")
        need(0 <= self.seed < 2**64, "seed", "must fit in 64 bits")
        need(self.duration > 0, "duration", "must be > 0")
        for name in ("beacon_period", "report_period", "crl_broadcast_period", "presence_window",
                     "freshness_window", "observation_window"):
            need(getattr(self, name) > 0, name, "must be > 0")
        need(self.vehicle_count >= 1, "vehicle_count", "must be >= 1")
        need(self.churn_vehicles >= 0, "churn_vehicles", "must be >= 0")
        need(self.al_capacity >= 1, "al_capacity", "must be >= 1")
        need(self.crl_seed_size >= 0, "crl_seed_size", "must be >= 0")
        need(self.delivery_delay_ms >= 0, "delivery_delay_ms", "must be >= 0")
        need(0.0 <= self.loss_probability < 1.0, "loss_probability", "must be in [0, 1)")
        need(self.report_category in CATEGORIES, "report_category", "unknown message category")
        ids = self.adversary_ids
        need(len(set(ids)) == len(ids), "adversaries", "duplicate adversary id")
        need(all(1 <= i <= self.vehicle_count for i in ids), "adversaries",
             f"ids must be vehicle ids 1..{self.vehicle_count}")
        known = set(self.vehicle_ids)
        for name in ("join_times", "leave_times"):
            times = getattr(self, name)
            need(all(k in known for k in times), name, "unknown vehicle id")
            need(all(isinstance(t, (int, float)) and 0 <= t <= self.duration for t in times.values()),
                 name, "times must lie within [0, duration]")
        for vid, t in self.leave_times.items():
            need(t >= self.join_times.get(vid, 0), "leave_times", f"vehicle {vid} leaves before it joins")
        return self

    def to_dict(self) -> dict[str, Any]:
        out = dataclasses.asdict(self)
        out["mode"] = self.mode.value
        out["adversaries"] = [dataclasses.asdict(a) for a in self.adversaries]
        out["join_times"] = {str(k): v for k, v in sorted(self.join_times.items())}
        out["leave_times"] = {str(k): v for k, v in sorted(self.leave_times.items())}
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SimConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        for key in data:
            if key not in names:
                raise ConfigError(key, "unknown configuration field")
        try:
            config = cls(**data)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError("adversaries", str(exc)) from None
        return config.validate()

    @classmethod
    def load(cls, path: str | Path) -> "SimConfig":
        try:
            data = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"invalid JSON at line {exc.lineno}: {exc.msg}") from None
        if not isinstance(data, dict):
            raise ConfigError("config", "top level must be a JSON object")
        return cls.from_dict(data)

    def scenario_key(self) -> dict[str, Any]:
        """Traffic-defining fields; runs are comparable iff these match."""
        d = self.to_dict()
        for name in ("mode", "crl_broadcast_period", "crl_seed_size"):
            d.pop(name)
        return d


def canonical_config(**overrides) -> SimConfig:
    """Ten vehicles on a 300 s road; vehicle 9 reports contradictory category-001 claims."""
    base = dict(vehicle_count=10, duration=300.0, adversaries=(AdversarySpec(9, compliant=True),),
                crl_broadcast_period=10.0, crl_seed_size=100)
    base.update(overrides)
    return SimConfig(**base).validate()


class EventLog:
    """Ordered simulation trace; renders as JSON lines."""

    def __init__(self):
        self.records: list[dict[str, Any]] = []

    def append(self, record: dict[str, Any]) -> None:
        self.records.append(record)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r, sort_keys=True, separators=(",", ":")) + "\n" for r in self.records)

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_jsonl())

    def where(self, **match) -> list[dict[str, Any]]:
        return [r for r in self.records if all(r.get(k) == v for k, v in match.items())]


@dataclass
class Metrics:
    mode: str
    scenario: dict[str, Any]
    channel_bytes: dict[str, int] = field(default_factory=lambda: dict.fromkeys(MESSAGE_CLASSES, 0))
    channel_bytes_total: int = 0
    messages_sent: dict[str, int] = field(default_factory=lambda: dict.fromkeys(MESSAGE_CLASSES, 0))
    decrypt_count: dict[int, int] = field(default_factory=dict)
    al_lookup_count: int = 0
    time_to_isolation: float | None = None
    acceptance_of_adversary_count: int = 0
    accepted_after_isolation: int = 0
    revocations: int = 0
    crl_entries: int = 0
    dropped_deliveries: int = 0

    @property
    def revocation_bytes(self) -> int:
        return sum(self.channel_bytes[c] for c in REVOCATION_CLASSES)

    @property
    def total_decrypts(self) -> int:
        return sum(self.decrypt_count.values())

    def rows(self) -> list[tuple[str, Any, str]]:
        rows: list[tuple[str, Any, str]] = [("mode", self.mode, "")]
        rows += [(f"channel_bytes.{c}", self.channel_bytes[c], "bytes") for c in MESSAGE_CLASSES]
        rows += [
            ("channel_bytes.total", self.channel_bytes_total, "bytes"),
            ("revocation_bytes", self.revocation_bytes, "bytes"),
        ]
        rows += [(f"messages_sent.{c}", self.messages_sent[c], "messages") for c in MESSAGE_CLASSES]
        rows += [
            ("decrypt_count.total", self.total_decrypts, "decryptions"),
            *((f"decrypt_count.v{vid}", n, "decryptions") for vid, n in sorted(self.decrypt_count.items())),
            ("al_lookup_count", self.al_lookup_count, "lookups"),
            ("time_to_isolation", "inf" if self.time_to_isolation is None else self.time_to_isolation, "s"),
            ("acceptance_of_adversary_count", self.acceptance_of_adversary_count, "messages"),
            ("accepted_after_isolation", self.accepted_after_isolation, "messages"),
            ("revocations", self.revocations, "vehicles"),
            ("crl_entries", self.crl_entries, "entries"),
            ("dropped_deliveries", self.dropped_deliveries, "messages"),
        ]
        return rows

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("name", "value", "unit"))
        writer.writerows(self.rows())
        return buf.getvalue()

    def write_csv(self, path: str | Path) -> None:
        Path(path).write_text(self.to_csv())


def _ms(seconds: float) -> int:
    return int(round(seconds * 1000))


class Simulation:
    """One run of one configuration. Agents stay inspectable after :meth:`run`."""

    def __init__(self, config: SimConfig):
        self.config = config.validate()
        cfg = self.config
        self.provider = default_provider()
        self.rng = random.Random(cfg.seed)
        self.loss_rng = random.Random(cfg.seed ^ 0x5EED)
        self.protocol_config = ProtocolConfig(
            presence_window=cfg.presence_window,
            freshness_window=cfg.freshness_window,
            observation_window=cfg.observation_window,
            al_capacity=cfg.al_capacity,
        )
        self.mode = cfg.mode
        self.end_ms = _ms(cfg.duration)
        self.delay_ms = cfg.delivery_delay_ms

        compliance = {a.id: a.compliant for a in cfg.adversaries}
        self.world = World(config=self.protocol_config, horizon=int(math.ceil(cfg.duration)),
                           use_adversary_list=self.mode is Mode.ADVERSARY_LIST, provider=self.provider)
        self.ca, self.rsu, self.trust = self.world.ca, self.world.rsu, self.world.trust
        for vid in cfg.vehicle_ids:
            self.world.add_vehicle(vid, compliant=compliance.get(vid, True))
        self.vehicles = self.world.vehicles
        self.adversaries = set(compliance)

        if self.mode is Mode.CRL_BASELINE:
            revoked = sorted(self.adversaries)[: cfg.crl_seed_size]
            revoked += [SYNTHETIC_REVOKED_BASE + i for i in range(cfg.crl_seed_size - len(revoked))]
            self.ca.crl = [CrlAdd(vid, 0, 1) for vid in revoked]
            self.rsu.crl = list(self.ca.crl)

        self.join_ms, self.leave_ms = self._schedule_presence()
        self.beacon_offset = {vid: self.rng.randrange(_ms(cfg.beacon_period)) for vid in cfg.vehicle_ids}
        self.report_offset = {vid: self.rng.randrange(_ms(cfg.report_period)) for vid in cfg.vehicle_ids}

        self.active: set[int] = set()
        self.queue: list[tuple[int, int, str, tuple]] = []
        self._seq = 0
        self.now_ms = 0
        self.log = EventLog()
        self.metrics = Metrics(cfg.mode.value, cfg.scenario_key())
        self.first_contradiction_ms: int | None = None
        self.isolated_ms: dict[int, int] = {}
        self.broadcast_ms: dict[int, int] = {}
        self._ran = False

    # scheduling

    def _schedule_presence(self) -> tuple[dict[int, int], dict[int, int]]:
        cfg = self.config
        join = {vid: _ms(cfg.join_times.get(vid, 0.0)) for vid in range(1, cfg.vehicle_count + 1)}
        leave = {vid: _ms(t) for vid, t in cfg.leave_times.items()}
        for vid in range(cfg.vehicle_count + 1, cfg.vehicle_count + cfg.churn_vehicles + 1):
            start = self.rng.uniform(0.0, cfg.duration * 0.8)
            stay = self.rng.uniform(cfg.duration * 0.1, cfg.duration * 0.5)
            join[vid] = _ms(cfg.join_times.get(vid, start))
            if vid in cfg.leave_times:
                leave[vid] = _ms(cfg.leave_times[vid])
            else:
                leave[vid] = min(join[vid] + _ms(stay), self.end_ms)
        return join, leave

    def _push(self, at_ms: int, kind: str, *payload) -> None:
        if at_ms < self.end_ms:
            heapq.heappush(self.queue, (at_ms, self._seq, kind, payload))
            self._seq += 1

    @property
    def now(self) -> int:
        return self.now_ms // 1000

    # logging

    def _counters(self, vid: int) -> dict[str, int]:
        v = self.vehicles[vid]
        return {"decrypts": v.decrypt_count, "al_lookups": v.al_lookup_count, "al_size": len(v.al)}

    def _record(self, agent: str, event: str, decision: str | None = None, **extra) -> None:
        record = {"time": self.now_ms / 1000, "agent": agent, "event": event, "decision": decision}
        if agent.startswith("v"):
            record["counters"] = self._counters(int(agent[1:]))
        record.update(extra)
        self.log.append(record)

    # channel

    def _send(self, sender: str, message, cls: str, recipients: Iterable[str | int]) -> None:
        wire = encode_wire(message)
        delivered = decode_wire(wire)
        digest = hashlib.blake2b(wire, digest_size=8).hexdigest()
        self.metrics.channel_bytes[cls] += len(wire)
        self.metrics.channel_bytes_total += len(wire)
        self.metrics.messages_sent[cls] += 1
        self._record(sender, "send", None, cls=cls, bytes=len(wire), digest=digest,
                     msg=type(message).__name__)
        for recipient in recipients:
            if self.config.loss_probability and self.loss_rng.random() < self.config.loss_probability:
                self.metrics.dropped_deliveries += 1
                continue
            self._push(self.now_ms + self.delay_ms, "deliver", recipient, delivered, cls, digest, self.now_ms)

    def _road(self, exclude: int | None = None) -> list[int]:
        return sorted(v for v in self.active if v != exclude)

    # run loop

    def run(self) -> tuple[EventLog, Metrics]:
        if self._ran:
            raise RuntimeError("a Simulation can only run once")
        self._ran = True
        for vid in self.config.vehicle_ids:
            self._push(self.join_ms[vid], "join", vid)
            if vid in self.leave_ms:
                self._push(self.leave_ms[vid], "leave", vid)
        if self.mode is Mode.CRL_BASELINE:
            self._push(0, "crl_broadcast")

        while self.queue:
            self.now_ms, _, kind, payload = heapq.heappop(self.queue)
            getattr(self, f"_on_{kind}")(*payload)
        self.now_ms = self.end_ms
        self._finish()
        return self.log, self.metrics

    def _finish(self) -> None:
        m = self.metrics
        m.decrypt_count = {vid: v.decrypt_count for vid, v in sorted(self.vehicles.items())}
        m.al_lookup_count = sum(v.al_lookup_count for v in self.vehicles.values())
        m.crl_entries = len(self.ca.crl)
        if self.mode is Mode.ADVERSARY_LIST:
            m.revocations = len(self.ca.crl)
            if self.adversaries and self.first_contradiction_ms is not None and \
                    all(a in self.isolated_ms for a in self.adversaries):
                last = max(self.isolated_ms.values())
                m.time_to_isolation = (last - self.first_contradiction_ms) / 1000

    # event handlers

    def _on_join(self, vid: int) -> None:
        self.active.add(vid)
        self._record(f"v{vid}", "join")
        cfg = self.config
        self._push(self.now_ms + self.beacon_offset[vid], "beacon", vid)
        self._push(self.now_ms + self.report_offset[vid], "report", vid)
        if self.mode is Mode.ADVERSARY_LIST:
            self._push(self.now_ms + cfg.observation_window * 1000, "window", vid)

    def _on_leave(self, vid: int) -> None:
        self.active.discard(vid)
        self._record(f"v{vid}", "leave")
        for other in self._road():
            self.vehicles[other].purge_departed([vid])
        self._check_isolation()

    def _transmit_data(self, vid: int, category: int, claim: int) -> None:
        v = self.vehicles[vid]
        if v.status_cert is None:
            self._record(f"v{vid}", "silent")
            return
        message = v.compose(category, claim, self.now)
        self._send(f"v{vid}", message, "data", [*self._road(exclude=vid), "rsu"])

    def _on_beacon(self, vid: int) -> None:
        if vid not in self.active:
            return
        self._transmit_data(vid, BEACON_CATEGORY, 0)
        self._push(self.now_ms + _ms(self.config.beacon_period), "beacon", vid)

    def _on_report(self, vid: int) -> None:
        if vid not in self.active:
            return
        cfg = self.config
        claim = cfg.false_claim if vid in self.adversaries else cfg.true_claim
        self._transmit_data(vid, cfg.report_category, claim)
        self._push(self.now_ms + _ms(cfg.report_period), "report", vid)

    def _on_window(self, vid: int) -> None:
        if vid not in self.active:
            return
        verdict, accusations = self.vehicles[vid].close_window(self.now, self.rsu.keypair.public_key)
        if verdict.contradictors and self.first_contradiction_ms is None:
            self.first_contradiction_ms = self.now_ms
        if verdict.contradictors:
            self._record(f"v{vid}", "suspicion", None, contradictors=list(verdict.contradictors),
                         accused=list(verdict.accused))
        for accusation in accusations:
            self._send(f"v{vid}", accusation, "accusation", ["rsu"])
        self._push(self.now_ms + self.config.observation_window * 1000, "window", vid)

    def _on_crl_broadcast(self) -> None:
        if self.rsu.crl:
            self._send("rsu", CrlResponse(tuple(self.rsu.crl)), "crl_broadcast", self._road())
        self._push(self.now_ms + _ms(self.config.crl_broadcast_period), "crl_broadcast")

    def _on_deliver(self, recipient, message, cls: str, digest: str, sent_ms: int) -> None:
        if recipient == "rsu":
            self._deliver_rsu(message, digest)
        elif recipient == "ca":
            self._deliver_ca(message, digest)
        elif recipient in self.active:
            self._deliver_vehicle(recipient, message, digest, sent_ms)

    def _deliver_vehicle(self, vid: int, message, digest: str, sent_ms: int) -> None:
        v = self.vehicles[vid]
        agent = f"v{vid}"
        sent_at = sent_ms / 1000
        if isinstance(message, DataMessage):
            decision = v.receive(message, self.now)
            self._record(agent, "receive", decision.label, sender=message.sender_id, digest=digest, sent_at=sent_at)
            if decision.kind is Decision.ACCEPT and self._is_revoked(message.sender_id):
                self.metrics.acceptance_of_adversary_count += 1
                if message.sender_id in self.isolated_ms:
                    self.metrics.accepted_after_isolation += 1
            if decision.warning is not None:
                self._send(agent, decision.warning, "warning", self._road(exclude=vid))
            if decision.kind is Decision.NEW_ADVERSARY_DETECTED:
                self._check_isolation()
        elif isinstance(message, WarningMessage):
            ok = v.process_warning(message, self.now)
            self._record(agent, "warning", "recorded" if ok else "dropped", adversary=message.adversary_id,
                         digest=digest, sent_at=sent_at)
            if ok:
                self._check_isolation()
        elif isinstance(message, CrlResponse):
            v.crl_view = {e.accused_id for e in message.entries}
            self._record(agent, "crl", None, entries=len(message.entries), digest=digest, sent_at=sent_at)
        elif isinstance(message, Sealed) and message.kind is SealedKind.ADD_BROADCAST:
            ok = v.process_add_broadcast(message, self.now)
            self._record(agent, "add_broadcast", "recorded" if ok else "dropped",
                         al_top=v.al.ids()[0] if len(v.al) else None, digest=digest, sent_at=sent_at)
            if ok:
                self._check_isolation()
        elif isinstance(message, Sealed):
            ok = v.apply_order(message, self.now)
            self._record(agent, "order", "applied" if ok else "ignored", order=message.kind.name,
                         digest=digest, sent_at=sent_at)

    def _deliver_rsu(self, message, digest: str) -> None:
        if isinstance(message, DataMessage):
            self.rsu.observe_presence(message.sender_id, self.now)
            return
        if not isinstance(message, Sealed):
            return
        if message.kind is SealedKind.ACCUSATION:
            forward = self.rsu.collect(message, self.now)
            self._record("rsu", "accusation", "forward" if forward else "hold", digest=digest,
                         present=self.rsu.present_count(self.now))
            if forward is not None:
                self._send("rsu", forward, "accusation_forward", ["ca"])
        elif message.kind is SealedKind.ERASE_FROM_CA:
            orders = self.rsu.execute(message, self.now)
            self._record("rsu", "ca_order", "executed" if orders else "dropped", digest=digest)
            if orders is None:
                return
            self.broadcast_ms[orders.accused_id] = self.now_ms
            if orders.accused_id in self.active:
                self._send("rsu", orders.erase, "rsu_order", [orders.accused_id])
                self._send("rsu", orders.insert, "rsu_order", [orders.accused_id])
            self._send("rsu", orders.broadcast, "add_broadcast", self._road())

    def _deliver_ca(self, message, digest: str) -> None:
        if not isinstance(message, Sealed):
            return
        order = self.ca.process_accusation(message, self.now)
        self._record("ca", "accusation", "revoke" if order else "dropped", digest=digest,
                     crl=[[e.accused_id, e.timestamp, e.reason_code] for e in self.ca.crl])
        if order is not None:
            self._send("ca", order, "ca_order", ["rsu"])

    def _is_revoked(self, vid: int) -> bool:
        return self.ca.is_revoked(vid)

    def _check_isolation(self) -> None:
        if self.mode is not Mode.ADVERSARY_LIST:
            return
        for adv in sorted(self.adversaries - set(self.isolated_ms)):
            road = self._road(exclude=adv)
            if road and all(adv in self.vehicles[v].al for v in road):
                self.isolated_ms[adv] = self.now_ms
                self._record("road", "isolated", None, adversary=adv)


def run(config: SimConfig) -> tuple[EventLog, Metrics]:
    return Simulation(config).run()


def run_baseline(config: SimConfig) -> tuple[EventLog, Metrics]:
    if config.mode is not Mode.CRL_BASELINE:
        raise ConfigError("mode", "baseline run requires mode CrlBaseline")
    return Simulation(config).run()


def crl_broadcast_bytes(entries: int, period: float, duration: float) -> int:
    """Closed-form CRL channel bytes for a static CRL of ``entries`` records."""
    if entries == 0:
        return 0
    broadcasts = math.ceil(_ms(duration) / _ms(period))
    return broadcasts * (CRL_HEADER_SIZE + 17 * entries)


@dataclass(frozen=True)
class Comparison:
    al_revocation_bytes: int
    crl_revocation_bytes: int
    al_total_bytes: int
    crl_total_bytes: int
    al_decrypts: int
    crl_decrypts: int
    al_time_to_isolation: float | None
    al_acceptance: int
    crl_acceptance: int
    crl_entries: int

    @property
    def ratio(self) -> float | None:
        """CRL-mode revocation bytes per AL-mode revocation byte."""
        if self.al_revocation_bytes == 0:
            return None if self.crl_revocation_bytes == 0 else math.inf
        return self.crl_revocation_bytes / self.al_revocation_bytes

    @property
    def al_wins(self) -> bool:
        return self.al_revocation_bytes < self.crl_revocation_bytes

    @property
    def degenerate(self) -> bool:
        return self.crl_entries == 0

    def rows(self) -> list[tuple[str, Any, str]]:
        ratio = self.ratio
        return [
            ("al_revocation_bytes", self.al_revocation_bytes, "bytes"),
            ("crl_revocation_bytes", self.crl_revocation_bytes, "bytes"),
            ("ratio", "n/a" if ratio is None else ratio, "crl/al"),
            ("al_total_bytes", self.al_total_bytes, "bytes"),
            ("crl_total_bytes", self.crl_total_bytes, "bytes"),
            ("al_decrypts", self.al_decrypts, "decryptions"),
            ("crl_decrypts", self.crl_decrypts, "decryptions"),
            ("al_time_to_isolation", "inf" if self.al_time_to_isolation is None else self.al_time_to_isolation, "s"),
            ("al_acceptance_of_adversary", self.al_acceptance, "messages"),
            ("crl_acceptance_of_adversary", self.crl_acceptance, "messages"),
            ("crl_entries", self.crl_entries, "entries"),
        ]

    def report(self) -> str:
        lines = [f"{name}: {value} {unit}".rstrip() for name, value, unit in self.rows()]
        if self.degenerate:
            lines.append("note: degenerate baseline (empty CRL, nothing broadcast)")
        elif self.al_wins:
            lines.append("adversary-list mode uses fewer revocation bytes than CRL broadcasting")
        else:
            lines.append("CRL broadcasting used no more revocation bytes than adversary-list mode")
        return "\n".join(lines)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("name", "value", "unit"))
        writer.writerows(self.rows())
        return buf.getvalue()


def compare(al: Metrics, crl: Metrics) -> Comparison:
    if al.mode != Mode.ADVERSARY_LIST.value or crl.mode != Mode.CRL_BASELINE.value:
        raise IncomparableRuns("expected one AdversaryList run and one CrlBaseline run")
    if al.scenario != crl.scenario:
        differing = sorted(k for k in al.scenario if al.scenario.get(k) != crl.scenario.get(k))
        raise IncomparableRuns(f"runs differ in scenario fields: {', '.join(differing)}")
    return Comparison(
        al.revocation_bytes, crl.revocation_bytes, al.channel_bytes_total, crl.channel_bytes_total,
        al.total_decrypts, crl.total_decrypts, al.time_to_isolation,
        al.acceptance_of_adversary_count, crl.acceptance_of_adversary_count, crl.crl_entries,
    )


def run_comparison(config: SimConfig, crl_size: int | None = None) -> tuple[Comparison, Metrics, Metrics]:
    """Run the same traffic in both modes and compare them."""
    size = config.crl_seed_size if crl_size is None else crl_size
    _, al = run(dataclasses.replace(config, mode=Mode.ADVERSARY_LIST))
    _, crl = run_baseline(dataclasses.replace(config, mode=Mode.CRL_BASELINE, crl_seed_size=size))
    return compare(al, crl), al, crl


__all__ = [
    "AdversarySpec", "Comparison", "EventLog", "Metrics", "Mode", "SimConfig", "Simulation",
    "canonical_config", "compare", "crl_broadcast_bytes", "run", "run_baseline", "run_comparison",
]
