"""Network-manager demand bookkeeping and slot-allocation policies.

Control traffic always wins: a policy may hand slots to other traffic only
after every currently due agent has been served.  The default policy grants
at most one other-traffic slot per round, rotating through the other nodes;
``control-only`` leaves spare slots free, ``greedy-other`` fills all of them.
"""

from __future__ import annotations

from dataclasses import dataclass

from .net import ProtocolConfig, RoundSchedule, Slot, control_slot, free_slot, other_slot


@dataclass
class DemandTable:
    """Manager view of when each agent must transmit next."""

    next_due: dict[int, int]
    rr_pointer: int = 0


def initial_demands(n_agents: int) -> DemandTable:
    # every agent is due in round 0 so held inputs initialize from real data
    return DemandTable(next_due={agent: 0 for agent in range(n_agents)})


def _due_control_slots(demands: DemandTable, target_round: int,
                       cfg: ProtocolConfig) -> list[Slot]:
    due = sorted(agent for agent, due_round in demands.next_due.items()
                 if due_round <= target_round)
    # overflow beyond K stays due and carries into the following round
    return [control_slot(agent) for agent in due[:cfg.data_slots]]


def _pad(slots: list[Slot], cfg: ProtocolConfig) -> list[Slot]:
    return slots + [free_slot()] * (cfg.data_slots - len(slots))


def default_policy(demands: DemandTable, round_index: int,
                   cfg: ProtocolConfig) -> RoundSchedule:
    """Balanced policy: all due control traffic, then one round-robin other slot."""
    target = round_index + 1
    slots = _due_control_slots(demands, target, cfg)
    if len(slots) < cfg.data_slots and cfg.other_nodes:
        slots.append(other_slot(cfg.other_nodes[demands.rr_pointer]))
        demands.rr_pointer = (demands.rr_pointer + 1) % len(cfg.other_nodes)
    return RoundSchedule(round_index=target, allocations=tuple(_pad(slots, cfg)))


def control_only_policy(demands: DemandTable, round_index: int,
                        cfg: ProtocolConfig) -> RoundSchedule:
    """Serve due control demands and leave every spare slot free."""
    target = round_index + 1
    slots = _due_control_slots(demands, target, cfg)
    return RoundSchedule(round_index=target, allocations=tuple(_pad(slots, cfg)))


def greedy_other_policy(demands: DemandTable, round_index: int,
                        cfg: ProtocolConfig) -> RoundSchedule:
    """Serve due control demands, then fill every spare slot with other traffic."""
    target = round_index + 1
    slots = _due_control_slots(demands, target, cfg)
    granted = 0
    while len(slots) < cfg.data_slots and granted < len(cfg.other_nodes):
        slots.append(other_slot(cfg.other_nodes[demands.rr_pointer]))
        demands.rr_pointer = (demands.rr_pointer + 1) % len(cfg.other_nodes)
        granted += 1
    return RoundSchedule(round_index=target, allocations=tuple(_pad(slots, cfg)))


POLICIES = {
    "default": default_policy,
    "control-only": control_only_policy,
    "greedy-other": greedy_other_policy,
}


def update_demands(demands: DemandTable,
                   extracted: list[tuple[int, int]]) -> DemandTable:
    """Fold the manager's per-round demand extraction into a fresh table."""
    next_due = dict(demands.next_due)
    for agent, due_round in extracted:
        next_due[agent] = due_round
    return DemandTable(next_due=next_due, rr_pointer=demands.rr_pointer)
