"""Round-based flooding network emulation.

A round starts with the manager flooding the schedule, followed by up to K
data slots.  Every flood reaches each listening node independently with
probability p_rx.  A node that misses the schedule keeps its radio off for
the rest of the round: it neither transmits in a slot allocated to it nor
receives any data flood.  Free slots consume no radio time at all.

Random draws use ``rng.random()`` in a fixed order so tests can script
outcomes: first the schedule flood (ascending node id, manager excluded),
then, for each executed data slot in schedule order, one draw per node in
ascending id order (sender excluded).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


CONTROL = "control"
OTHER = "other"
FREE = "free"


@dataclass(frozen=True)
class ProtocolConfig:
    """Static round/protocol parameters.

    Node ids are 0..num_nodes-1; the first ids belong to the agents, the
    manager has its own id, and ``other_nodes`` holds the ids eligible for
    low-priority traffic.
    """

    period: float = 0.05          # round period T, seconds
    data_slots: int = 5           # K
    slot_len: float = 0.008
    p_rx: float = 0.999
    num_nodes: int = 15
    manager: int = 5
    other_nodes: tuple[int, ...] = tuple(range(6, 15))

    def __post_init__(self):
        if self.data_slots < 1:
            raise ValueError("need at least one data slot")
        if (self.data_slots + 1) * self.slot_len > self.period + 1e-12:
            raise ValueError("schedule slot plus K data slots must fit in the round period")
        if not 0.0 < self.p_rx <= 1.0:
            raise ValueError(f"p_rx must be in (0, 1], got {self.p_rx}")
        if not 0 <= self.manager < self.num_nodes:
            raise ValueError("manager id out of range")
        for node in self.other_nodes:
            if not 0 <= node < self.num_nodes:
                raise ValueError(f"other node id {node} out of range")
            if node == self.manager:
                raise ValueError("manager cannot appear in other_nodes")
        if len(set(self.other_nodes)) != len(self.other_nodes):
            raise ValueError("duplicate ids in other_nodes")
        object.__setattr__(self, "other_nodes", tuple(self.other_nodes))


@dataclass(frozen=True)
class Slot:
    kind: str
    node: int | None = None

    def __post_init__(self):
        if self.kind not in (CONTROL, OTHER, FREE):
            raise ValueError(f"unknown slot kind {self.kind!r}")
        if self.kind == FREE and self.node is not None:
            raise ValueError("free slots carry no sender")
        if self.kind != FREE and self.node is None:
            raise ValueError(f"{self.kind} slot needs a sender id")


def control_slot(agent: int) -> Slot:
    return Slot(CONTROL, agent)


def other_slot(node: int) -> Slot:
    return Slot(OTHER, node)


def free_slot() -> Slot:
    return Slot(FREE)


@dataclass(frozen=True)
class RoundSchedule:
    round_index: int
    allocations: tuple[Slot, ...]

    def __post_init__(self):
        senders = [s.node for s in self.allocations if s.kind != FREE]
        if len(senders) != len(set(senders)):
            raise ValueError("at most one slot per sender per round")
        object.__setattr__(self, "allocations", tuple(self.allocations))


@dataclass(frozen=True)
class MessagePayload:
    """Control message: stacked outgoing input components plus the demand.

    ``demand`` is rounds-until-next-send (M - 1), always at least 1.  One
    input component per receiving agent keeps the per-agent byte budget of
    the real protocol satisfied by construction.
    """

    sender: int
    inputs: np.ndarray
    demand: int

    def __post_init__(self):
        if self.demand < 1:
            raise ValueError("demand must be at least one round")
        object.__setattr__(self, "inputs", np.asarray(self.inputs, dtype=float))


@dataclass(frozen=True)
class OtherTraffic:
    """Placeholder payload for low-priority (non-control) messages."""

    sender: int


@dataclass(frozen=True)
class DeliveryOutcome:
    """Everything observable after one round executes."""

    schedule: RoundSchedule
    schedule_received: tuple[bool, ...]      # indexed by node id
    executed: tuple[bool, ...]               # per data slot
    delivered: tuple[dict[int, bool], ...]   # per data slot: receiver -> got it
    manager_received: tuple[bool, ...]       # per data slot
    radio_on: np.ndarray                     # seconds, indexed by node id


def flood(sender: int, payload, rng, cfg: ProtocolConfig) -> dict[int, bool]:
    """One Glossy-style flood: every other node receives independently w.p. p_rx."""
    del payload  # loss is independent of content
    return {node: rng.random() < cfg.p_rx
            for node in range(cfg.num_nodes) if node != sender}


def run_round(schedule: RoundSchedule, payloads, rng, cfg: ProtocolConfig) -> DeliveryOutcome:
    """Execute one communication round and account radio-on time.

    ``payloads`` maps each non-free sender id to its message; a missing
    entry is a scheduler/agent contract violation.
    """
    if len(schedule.allocations) > cfg.data_slots:
        raise ValueError("schedule exceeds the data-slot budget")
    for slot in schedule.allocations:
        if slot.kind != FREE and slot.node not in payloads:
            raise RuntimeError(f"no payload supplied for allocated sender {slot.node}")

    schedule_received = [False] * cfg.num_nodes
    schedule_received[cfg.manager] = True
    for node in range(cfg.num_nodes):
        if node != cfg.manager:
            schedule_received[node] = rng.random() < cfg.p_rx

    executed: list[bool] = []
    delivered: list[dict[int, bool]] = []
    manager_received: list[bool] = []
    for slot in schedule.allocations:
        if slot.kind == FREE or not schedule_received[slot.node]:
            executed.append(False)
            delivered.append({})
            manager_received.append(False)
            continue
        air = flood(slot.node, payloads[slot.node], rng, cfg)
        # a node that sat out the round has its radio off and hears nothing
        delivered.append({node: got and schedule_received[node]
                          for node, got in air.items()})
        manager_received.append(bool(air.get(cfg.manager, False)))
        executed.append(True)

    n_executed = sum(executed)
    radio_on = np.array([
        cfg.slot_len * (1 + n_executed) if schedule_received[node] else cfg.slot_len
        for node in range(cfg.num_nodes)
    ])
    return DeliveryOutcome(
        schedule=schedule,
        schedule_received=tuple(schedule_received),
        executed=tuple(executed),
        delivered=tuple(delivered),
        manager_received=tuple(manager_received),
        radio_on=radio_on,
    )


def extract_demands(outcome: DeliveryOutcome, payloads) -> list[tuple[int, int]]:
    """Manager-side demand extraction with the loss fallback.

    For every scheduled control slot: a received message books the agent
    payload.demand rounds ahead; a missing one books it for the very next
    round.
    """
    current = outcome.schedule.round_index
    demands = []
    for idx, slot in enumerate(outcome.schedule.allocations):
        if slot.kind != CONTROL:
            continue
        if outcome.manager_received[idx]:
            demands.append((slot.node, current + payloads[slot.node].demand))
        else:
            demands.append((slot.node, current + 1))
    return demands
