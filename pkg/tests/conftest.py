"""Shared builders for compact hand-checkable instances."""

from __future__ import annotations

import pytest

from vcsched.model import (
    ChannelParams,
    Component,
    GraphTask,
    SchedulingConfig,
    ServiceProvider,
    TaskEdge,
    Uav,
    VcEdge,
    VcGraph,
)
from vcsched.scenario import Scenario


def make_channel(**overrides) -> ChannelParams:
    base = dict(
        d0=1.0, pl0=47.86, eta1=2.0, eta2=4.0, sigma=3.0,
        ht=1.5, hr=1.5, wavelength=0.0508, g1=1.0, eta3=2.0,
        bandwidth=1.0e7, noise_power=4.5e-3,
    )
    base.update(overrides)
    return ChannelParams(**base)


def make_sp(sp_id="s1", x=0.0, y=0.0, vms=1, exec_time=0.15) -> ServiceProvider:
    return ServiceProvider(id=sp_id, position=(x, y, 0.0), vm_count=vms, exec_time=exec_time)


def two_sp_scenario(
    *,
    distance=100.0,
    vms=(2, 2),
    edge_weight=0.055,
    task_edges=(("c1", "c2", 0.2),),
    components=("c1", "c2"),
    data_size=5.5e5,
    budget=1.8,
    channel=None,
    config=None,
) -> Scenario:
    """One UAV over two providers, fully connected, both covered."""
    vc = VcGraph(
        sps=(
            make_sp("s1", 0.0, 0.0, vms[0]),
            make_sp("s2", distance, 0.0, vms[1]),
        ),
        edges=(VcEdge(a="s1", b="s2", weight=edge_weight),),
    )
    uav = Uav(
        id="u1", position=(distance / 2, 0.0, 90.0),
        power_budget=budget, coverage=frozenset({"s1", "s2"}),
    )
    task = GraphTask(
        owner="u1",
        components=tuple(Component(id=c, data_size=data_size) for c in components),
        edges=tuple(TaskEdge(a=a, b=b, weight=w) for a, b, w in task_edges),
    )
    return Scenario(
        vc=vc, uavs=(uav,), tasks=(task,),
        channel=channel or make_channel(),
        config=config or SchedulingConfig(),
        seed=0,
    )


@pytest.fixture
def channel() -> ChannelParams:
    return make_channel()


@pytest.fixture
def config() -> SchedulingConfig:
    return SchedulingConfig()
