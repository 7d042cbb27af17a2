"""Deterministic, seeded, slice-stepped sensor-network simulator.

Nodes are placed uniformly in the area, connect to every node in
transmission range, and route sensed data toward the sink through the
in-range neighbor with the most last-known residual energy among those
strictly closer to the sink (so relay chains always make progress).

The run advances through phases: an initialization phase (boot warm-up
readings, neighbor handshakes, route setup), then collection slices
(area events sensed and relayed hop by hop, next-hop monitoring probes,
periodic full neighbor refreshes), with maintenance slices interleaved
whenever a next-hop death is detected by a probe timeout or the periodic
repair interval elapses. Maintenance performs the collection work plus a
network-wide (or hop-limited) topology probe and routing announcement
flood, which is what makes those slices expensive.

Every packet handling is charged against the node's battery through the
per-resource price profile and logged in a ledger; per-slice flow totals
per constituent plus the slice energy form the trace. Identical
configurations (same seed) produce identical traces, byte for byte once
serialized. Alongside the profile-based charges the run accumulates a
per-bit radio-model audit of the same tx/rx events as an independent
cross-check on radio energy accounting.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field
from enum import Enum

from .config import ScenarioConfig
from .energy_core import (
    CONSTITUENT_ORDER,
    Constituent,
    ConstituentFlowVector,
    ResourceUsageVector,
    constituent_alpha,
    task_energy,
)
from .radio import rx_energy_per_bit, tx_energy_per_bit

#: Pseudo node id of the sink group (a mains-powered destination, never charged).
SINK_ID = -1


class Phase(Enum):
    INITIALIZATION = "initialization"
    COLLECTION = "collection"
    MAINTENANCE = "maintenance"


class PacketKind(Enum):
    SENSED = "sensed"
    NEIGHBOR_INFO = "neighbor_info"
    SCHEDULING = "scheduling"
    TOPOLOGY_INFO = "topology_info"
    ROUTING_INFO = "routing_info"
    RELAYED_DATA = "relayed_data"

    @property
    def constituent(self) -> Constituent:
        return KIND_CONSTITUENT[self]


KIND_CONSTITUENT: dict[PacketKind, Constituent] = {
    PacketKind.SENSED: Constituent.INDIVIDUAL,
    PacketKind.NEIGHBOR_INFO: Constituent.LOCAL,
    PacketKind.SCHEDULING: Constituent.LOCAL,
    PacketKind.TOPOLOGY_INFO: Constituent.GLOBAL,
    PacketKind.ROUTING_INFO: Constituent.GLOBAL,
    PacketKind.RELAYED_DATA: Constituent.GLOBAL,
}


def classify_packet(kind: PacketKind) -> Constituent:
    """Constituent a packet of this kind is accounted under (total mapping)."""
    return KIND_CONSTITUENT[kind]


# Per-handling resource usage: every handling costs a cpu unit; radio legs add
# tx/rx; a packet that waits in the node's queue adds a mem unit; sensed
# packets add a sensor reading. A relay forwards immediately when it is the
# node's first of the slice and queues behind earlier traffic otherwise.
USAGE_WARMUP = ResourceUsageVector(b_cpu=1, b_sens=1)
USAGE_SENSE_SEND = ResourceUsageVector(b_cpu=1, b_sens=1, b_tx=1)
USAGE_SENSE_ONLY = ResourceUsageVector(b_cpu=1, b_sens=1)
USAGE_SEND = ResourceUsageVector(b_cpu=1, b_tx=1)
USAGE_RECV = ResourceUsageVector(b_cpu=1, b_rx=1)
USAGE_RELAY_DIRECT = ResourceUsageVector(b_cpu=1, b_rx=1, b_tx=1)
USAGE_RELAY_QUEUED = ResourceUsageVector(b_cpu=1, b_mem=1, b_rx=1, b_tx=1)
USAGE_RECV_QUEUE = ResourceUsageVector(b_cpu=1, b_mem=1, b_rx=1)


@dataclass
class Neighbor:
    node_id: int
    distance: float
    last_residual: float
    known_alive: bool = True


@dataclass
class NodeState:
    node_id: int
    x: float
    y: float
    battery: float
    dist_to_sink: float
    alive: bool = True
    neighbors: list[Neighbor] = field(default_factory=list)   # sorted by node_id
    next_hop: int | None = None                               # SINK_ID = direct delivery
    drops: int = 0
    slice_usage: list[int] = field(default_factory=lambda: [0] * 5)
    slice_flows: list[int] = field(default_factory=lambda: [0] * 5)

    def reset_slice(self) -> None:
        self.slice_usage = [0] * 5
        self.slice_flows = [0] * 5

    def neighbor_entry(self, node_id: int) -> Neighbor | None:
        for nbr in self.neighbors:
            if nbr.node_id == node_id:
                return nbr
        return None


@dataclass(frozen=True)
class ChargeEntry:
    slice_index: int
    node_id: int
    kind: PacketKind
    constituent: Constituent
    energy: float


@dataclass(frozen=True)
class SliceRecord:
    index: int
    delta_t: float
    phase: Phase
    flows: ConstituentFlowVector
    energy_j: float
    alive_nodes: int


@dataclass
class RadioAudit:
    """Independent per-bit radio-model accounting of the run's tx/rx events."""

    model_tx_j: float = 0.0
    model_rx_j: float = 0.0
    charged_tx_j: float = 0.0
    charged_rx_j: float = 0.0
    tx_events: int = 0
    rx_events: int = 0


@dataclass
class RunResult:
    config: ScenarioConfig
    records: list[SliceRecord]
    nodes: list[NodeState]
    ledger: list[ChargeEntry]
    delivered: int
    dropped: int
    initial_battery_total: float
    radio: RadioAudit

    @property
    def final_battery_total(self) -> float:
        return math.fsum(n.battery for n in self.nodes)

    @property
    def ledger_total(self) -> float:
        return math.fsum(e.energy for e in self.ledger)


def charge(node: NodeState, kind: PacketKind, usage: ResourceUsageVector,
           profile, *, cost: float | None = None, slice_index: int = 0) -> ChargeEntry | None:
    """Charge one packet handling against the node's battery.

    Dead nodes handle nothing; a node that cannot afford the cost ignores
    the task. Both cases count as a drop and return ``None``. A node whose
    battery lands exactly on zero dies with the charge.
    """
    if not node.alive:
        node.drops += 1
        return None
    if cost is None:
        cost = task_energy(usage, profile)
    if node.battery < cost:
        node.drops += 1
        return None
    node.battery -= cost
    if node.battery <= 0.0:
        node.battery = 0.0
        node.alive = False
    constituent = KIND_CONSTITUENT[kind]
    k = CONSTITUENT_ORDER.index(constituent)
    node.slice_flows[k] += 1
    for r, used in enumerate(usage.as_tuple()):
        node.slice_usage[r] += used
    return ChargeEntry(slice_index, node.node_id, kind, constituent, cost)


def _poisson(rng: random.Random, lam: float) -> int:
    if lam <= 0:
        return 0
    limit = math.exp(-lam)
    k, p = 0, 1.0
    while True:
        p *= rng.random()
        if p <= limit:
            return k
        k += 1


def _place_nodes(cfg: ScenarioConfig, rng: random.Random) -> list[NodeState]:
    nodes = []
    for node_id in range(cfg.nodes):
        x = rng.uniform(0.0, cfg.area_width)
        y = rng.uniform(0.0, cfg.area_height)
        dist_sink = math.hypot(x - cfg.sink_x, y - cfg.sink_y)
        nodes.append(NodeState(node_id, x, y, cfg.initial_battery, dist_sink))
    for a in nodes:
        for b in nodes:
            if b.node_id <= a.node_id:
                continue
            d = math.hypot(a.x - b.x, a.y - b.y)
            if 0.0 < d <= cfg.r_tx:
                a.neighbors.append(Neighbor(b.node_id, d, b.battery))
                b.neighbors.append(Neighbor(a.node_id, d, a.battery))
    for node in nodes:
        node.neighbors.sort(key=lambda nbr: nbr.node_id)
    return nodes


def select_next_hop(node: NodeState, nodes: list[NodeState], r_tx: float) -> int | None:
    """Next hop toward the sink: direct if in range, else the known-alive
    neighbor with maximum last-known residual energy among those strictly
    closer to the sink (ties: lowest node id)."""
    if node.dist_to_sink <= r_tx:
        return SINK_ID
    best: Neighbor | None = None
    for nbr in node.neighbors:   # ordered by id, so ties keep the lowest id
        if not nbr.known_alive:
            continue
        if nodes[nbr.node_id].dist_to_sink >= node.dist_to_sink:
            continue
        if best is None or nbr.last_residual > best.last_residual:
            best = nbr
    return best.node_id if best is not None else None


def recompute_next_hops(nodes: list[NodeState], r_tx: float,
                        participants: list[NodeState] | None = None) -> None:
    for node in (participants if participants is not None else nodes):
        node.next_hop = select_next_hop(node, nodes, r_tx) if node.alive else None


def build_topology(cfg: ScenarioConfig) -> list[NodeState]:
    """Seeded node placement, range-based adjacency and initial next hops.

    Invalid node counts or an out-of-area sink are rejected when the
    configuration itself is constructed.
    """
    nodes = _place_nodes(cfg, random.Random(cfg.seed))
    recompute_next_hops(nodes, cfg.r_tx)
    return nodes


class Simulation:
    """One deterministic run over a scenario; single-threaded by contract."""

    def __init__(self, cfg: ScenarioConfig):
        self.cfg = cfg
        self.rng = random.Random(cfg.seed)
        self.nodes = _place_nodes(cfg, self.rng)
        recompute_next_hops(self.nodes, cfg.r_tx)
        self.ledger: list[ChargeEntry] = []
        self.records: list[SliceRecord] = []
        self.radio = RadioAudit()
        self.delivered = 0
        self.dropped = 0
        self.slice_index = 0
        self.slice_energy = 0.0
        self._repair_triggers: list[int] = []
        self._maintenance_left = 0
        self._slices_since_repair = 0
        self._sensed_this_slice: dict[int, int] = {}
        self._relayed_this_slice: dict[int, int] = {}
        if cfg.mix_charging:
            self._mix_cost = {c: constituent_alpha(cfg.mix.row(c), cfg.profile)
                              for c in CONSTITUENT_ORDER}
        else:
            self._mix_cost = None

    # -- charging ----------------------------------------------------------

    def _charge(self, node: NodeState, kind: PacketKind, usage: ResourceUsageVector,
                tx_distance: float | None = None) -> ChargeEntry | None:
        cost = None if self._mix_cost is None else self._mix_cost[KIND_CONSTITUENT[kind]]
        entry = charge(node, kind, usage, self.cfg.profile,
                       cost=cost, slice_index=self.slice_index)
        if entry is None:
            self.dropped += 1
            return None
        self.ledger.append(entry)
        self.slice_energy += entry.energy
        if usage.b_tx:
            d = tx_distance if tx_distance is not None else 0.0
            self.radio.model_tx_j += usage.b_tx * self.cfg.bits_per_packet * \
                tx_energy_per_bit(d, self.cfg.radio)
            self.radio.charged_tx_j += usage.b_tx * self.cfg.profile.p_tx
            self.radio.tx_events += usage.b_tx
        if usage.b_rx:
            self.radio.model_rx_j += usage.b_rx * self.cfg.bits_per_packet * \
                rx_energy_per_bit(self.cfg.radio)
            self.radio.charged_rx_j += usage.b_rx * self.cfg.profile.p_rx
            self.radio.rx_events += usage.b_rx
        return entry

    # -- neighbor interaction ----------------------------------------------

    def _hop_distance(self, node: NodeState) -> float:
        if node.next_hop == SINK_ID:
            return node.dist_to_sink
        if node.next_hop is None:
            return 0.0
        entry = node.neighbor_entry(node.next_hop)
        return entry.distance if entry is not None else 0.0

    def _probe(self, prober: NodeState, nbr: Neighbor, kind: PacketKind) -> None:
        """Request/response exchange with one neighbor; a silent neighbor is
        marked not known-alive, and a silent next hop schedules a repair."""
        sent = self._charge(prober, kind, USAGE_SEND, tx_distance=nbr.distance)
        if sent is None:
            return
        target = self.nodes[nbr.node_id]
        answered = self._charge(target, kind, USAGE_RECV)
        if answered is not None:
            nbr.last_residual = target.battery
            nbr.known_alive = True
        else:
            nbr.known_alive = False
            if prober.next_hop == nbr.node_id:
                self._repair_triggers.append(prober.node_id)

    def _monitoring(self, full_refresh: bool) -> None:
        for node in self.nodes:
            if not node.alive:
                continue
            if full_refresh:
                for nbr in node.neighbors:
                    self._probe(node, nbr, PacketKind.NEIGHBOR_INFO)
            elif node.next_hop is not None and node.next_hop != SINK_ID:
                entry = node.neighbor_entry(node.next_hop)
                if entry is not None:
                    self._probe(node, entry, PacketKind.NEIGHBOR_INFO)

    # -- sensing and relaying ------------------------------------------------

    def _sense_capacity(self) -> int | None:
        if self.cfg.g_sense <= 0:
            return None
        return int(self.cfg.delta_t // self.cfg.g_sense)

    def _handle_event(self, node: NodeState) -> None:
        cap = self._sense_capacity()
        seen = self._sensed_this_slice.get(node.node_id, 0)
        if cap is not None and seen >= cap:
            return
        has_route = node.next_hop is not None
        usage = USAGE_SENSE_SEND if has_route else USAGE_SENSE_ONLY
        entry = self._charge(node, PacketKind.SENSED, usage,
                             tx_distance=self._hop_distance(node) if has_route else None)
        if entry is None:
            return
        self._sensed_this_slice[node.node_id] = seen + 1
        if not has_route:
            self.dropped += 1
            return
        if self.cfg.scheduling:
            self._charge(node, PacketKind.SCHEDULING, USAGE_SEND,
                         tx_distance=self._hop_distance(node))
        self._relay(node)

    def _relay(self, origin: NodeState) -> None:
        current = origin
        while True:
            hop = current.next_hop
            if hop is None:
                self.dropped += 1
                return
            if hop == SINK_ID:
                self.delivered += 1
                return
            target = self.nodes[hop]
            if not target.alive:
                self.dropped += 1
                target.drops += 1
                entry = current.neighbor_entry(hop)
                if entry is not None:
                    entry.known_alive = False
                self._repair_triggers.append(current.node_id)
                return
            if target.next_hop is None:
                # Stranded relay: receives and queues, cannot forward.
                self._charge(target, PacketKind.RELAYED_DATA, USAGE_RECV_QUEUE)
                self.dropped += 1
                return
            depth = self._relayed_this_slice.get(target.node_id, 0)
            # First relay of the slice forwards straight through; later ones
            # queue, paying one mem unit per buffer slot they sit behind.
            usage = USAGE_RELAY_DIRECT if depth == 0 else \
                ResourceUsageVector(b_cpu=1, b_mem=depth, b_rx=1, b_tx=1)
            entry = self._charge(target, PacketKind.RELAYED_DATA, usage,
                                 tx_distance=self._hop_distance(target))
            if entry is None:
                self.dropped += 1
                return
            self._relayed_this_slice[target.node_id] = \
                self._relayed_this_slice.get(target.node_id, 0) + 1
            current = target

    def _collection_work(self, full_refresh: bool) -> None:
        if self.cfg.monitoring:
            self._monitoring(full_refresh)
        events = _poisson(self.rng, self.cfg.event_rate)
        for _ in range(events):
            ex = self.rng.uniform(0.0, self.cfg.area_width)
            ey = self.rng.uniform(0.0, self.cfg.area_height)
            for node in self.nodes:
                if node.alive and math.hypot(node.x - ex, node.y - ey) <= self.cfg.r_sense:
                    self._handle_event(node)

    # -- maintenance ----------------------------------------------------------

    def _repair_participants(self) -> list[NodeState]:
        alive = [n for n in self.nodes if n.alive]
        radius = self.cfg.repair_radius_hops
        if radius <= 0 or not self._repair_triggers:
            return alive
        start = sorted(set(t for t in self._repair_triggers if self.nodes[t].alive))
        seen = set(start)
        frontier = deque((node_id, 0) for node_id in start)
        while frontier:
            node_id, depth = frontier.popleft()
            if depth == radius:
                continue
            for nbr in self.nodes[node_id].neighbors:
                if nbr.node_id not in seen and self.nodes[nbr.node_id].alive:
                    seen.add(nbr.node_id)
                    frontier.append((nbr.node_id, depth + 1))
        return [self.nodes[i] for i in sorted(seen)]

    def _maintenance_work(self) -> None:
        participants = self._repair_participants()
        for node in participants:
            if not node.alive:
                continue
            for nbr in node.neighbors:
                self._probe(node, nbr, PacketKind.TOPOLOGY_INFO)
        recompute_next_hops(self.nodes, self.cfg.r_tx, participants)
        for node in participants:
            if not node.alive:
                continue
            for nbr in node.neighbors:
                target = self.nodes[nbr.node_id]
                if self._charge(node, PacketKind.ROUTING_INFO, USAGE_SEND,
                                tx_distance=nbr.distance) is None:
                    continue
                self._charge(target, PacketKind.ROUTING_INFO, USAGE_RECV)
        self._repair_triggers.clear()

    # -- initialization --------------------------------------------------------

    def _init_work(self, idx: int) -> None:
        """Startup staging: warm-up readings first, neighbor handshakes in the
        middle slices, topology probing and route setup in the last one.
        Short initializations fold the stages together."""
        n = self.cfg.init_slices
        first, last = idx == 0, idx == n - 1
        do_warmup = first
        do_handshake = (n == 1) or (n == 2 and first) or (n >= 3 and not first and not last)
        if do_warmup:
            for node in self.nodes:
                if not node.alive:
                    continue
                for _ in range(self.cfg.warmup_packets):
                    self._charge(node, PacketKind.SENSED, USAGE_WARMUP)
        if do_handshake:
            for node in self.nodes:
                if not node.alive:
                    continue
                for nbr in node.neighbors:
                    self._probe(node, nbr, PacketKind.NEIGHBOR_INFO)
        if last:
            for node in self.nodes:
                if not node.alive:
                    continue
                for nbr in node.neighbors:
                    self._probe(node, nbr, PacketKind.TOPOLOGY_INFO)
            recompute_next_hops(self.nodes, self.cfg.r_tx)
            for node in self.nodes:
                if not node.alive:
                    continue
                for nbr in node.neighbors:
                    target = self.nodes[nbr.node_id]
                    if self._charge(node, PacketKind.ROUTING_INFO, USAGE_SEND,
                                    tx_distance=nbr.distance) is None:
                        continue
                    self._charge(target, PacketKind.ROUTING_INFO, USAGE_RECV)

    # -- main loop ----------------------------------------------------------------

    def run(self) -> RunResult:
        cfg = self.cfg
        initial_total = math.fsum(n.battery for n in self.nodes)
        for epoch in range(cfg.epochs):
            self._slices_since_repair = 0
            self._maintenance_left = 0
            self._repair_triggers.clear()
            for slice_in_epoch in range(cfg.total_slices):
                if not any(n.alive for n in self.nodes):
                    break
                in_init = slice_in_epoch < cfg.init_slices
                if in_init:
                    phase = Phase.INITIALIZATION
                elif self._maintenance_left > 0:
                    phase = Phase.MAINTENANCE
                else:
                    phase = Phase.COLLECTION

                for node in self.nodes:
                    node.reset_slice()
                self.slice_energy = 0.0
                self._sensed_this_slice = {}
                self._relayed_this_slice = {}

                if phase is Phase.INITIALIZATION:
                    self._init_work(slice_in_epoch)
                else:
                    collection_slices = slice_in_epoch - cfg.init_slices
                    full_refresh = (cfg.monitor_period > 0
                                    and collection_slices % cfg.monitor_period == 0)
                    self._collection_work(full_refresh)
                    if phase is Phase.MAINTENANCE:
                        self._maintenance_work()
                        self._maintenance_left -= 1
                        self._slices_since_repair = 0
                    else:
                        self._slices_since_repair += 1

                # Schedule maintenance for the next slice: a detected next-hop
                # failure, or the periodic repair interval elapsing.
                if not in_init and self._maintenance_left == 0:
                    periodic = (cfg.maintenance_period > 0
                                and self._slices_since_repair >= cfg.maintenance_period)
                    if self._repair_triggers or periodic:
                        self._maintenance_left = cfg.maintenance_slices

                flows = [0.0] * 5
                for node in self.nodes:
                    for k in range(5):
                        flows[k] += node.slice_flows[k]
                self.records.append(SliceRecord(
                    index=self.slice_index,
                    delta_t=cfg.delta_t,
                    phase=phase,
                    flows=ConstituentFlowVector(*flows),
                    energy_j=self.slice_energy,
                    alive_nodes=sum(1 for n in self.nodes if n.alive),
                ))
                self.slice_index += 1
        return RunResult(
            config=cfg,
            records=self.records,
            nodes=self.nodes,
            ledger=self.ledger,
            delivered=self.delivered,
            dropped=self.dropped,
            initial_battery_total=initial_total,
            radio=self.radio,
        )


def run(cfg: ScenarioConfig) -> RunResult:
    """Execute one deterministic run of the scenario."""
    return Simulation(cfg).run()
