import pytest

from conftest import make_instance
from oltsp_lab import (
    CLOSED,
    OPEN,
    Instance,
    MoveTo,
    Outcome,
    SimulationError,
    Trajectory,
    WaitUntil,
    position_at,
    simulate,
    verify_outcome,
)
from oltsp_lab.algorithms import Alg1General, Greedy, make_policy
from oltsp_lab.engine import Finish, Policy, Waypoint
from oltsp_lab.metric import Line, Ring, SemiLine


def test_reference_run_alg1(example1):
    pol = Alg1General()
    out = simulate(example1, pol)
    assert out.completion == pytest.approx(15.0, abs=1e-9)
    assert out.services[2] == pytest.approx(8.0, abs=1e-9)
    assert out.services[1] == pytest.approx(11.0, abs=1e-9)
    assert out.services[3] == pytest.approx(12.0, abs=1e-9)
    assert verify_outcome(example1, out) == []


@pytest.mark.parametrize("policy", ["alg1", "wait-all", "greedy", "alg5-semiline"])
def test_empty_instance_completes_at_zero(policy):
    inst = Instance(space=SemiLine(), variant=CLOSED, requests=())
    out = simulate(inst, make_policy(policy))
    assert out.completion == 0.0
    assert verify_outcome(inst, out) == []


def test_single_request_alg5():
    inst = make_instance(SemiLine(), CLOSED, [(1.0, 5.0)])
    out = simulate(inst, make_policy("alg5-semiline"))
    assert out.completion == pytest.approx(6.0)


def test_position_at_move_and_wait():
    space = SemiLine()
    traj = Trajectory(space, (
        Waypoint(0.0, 0.0, "start"),
        Waypoint(1.0, 1.0, "move"),
        Waypoint(3.0, 1.0, "wait"),
    ))
    assert position_at(traj, 0.5) == pytest.approx(0.5)
    assert position_at(traj, 2.2) == pytest.approx(1.0)
    with pytest.raises(SimulationError):
        position_at(traj, 5.0)


def test_position_at_ring_counterclockwise():
    space = Ring(1.0)
    traj = Trajectory(space, (Waypoint(0.0, 0.0, "start"), Waypoint(0.1, 0.9, "move")))
    assert position_at(traj, 0.05) == pytest.approx(0.95)


def test_verify_catches_premature_service():
    inst = make_instance(SemiLine(), OPEN, [(1.0, 5.0)])
    traj = Trajectory(inst.space, (
        Waypoint(0.0, 0.0, "start"),
        Waypoint(1.0, 1.0, "serve", 1),
    ))
    bad = Outcome(1.0, {1: 1.0}, traj, inst.requests, OPEN)
    assert any("premature" in v for v in verify_outcome(inst, bad))


def test_verify_catches_open_ending_off_origin_closed():
    inst = make_instance(SemiLine(), CLOSED, [(1.0, 0.0)])
    traj = Trajectory(inst.space, (
        Waypoint(0.0, 0.0, "start"),
        Waypoint(1.0, 1.0, "serve", 1),
    ))
    bad = Outcome(1.0, {1: 1.0}, traj, inst.requests, CLOSED)
    assert any("origin" in v for v in verify_outcome(inst, bad))


def test_verify_catches_superluminal_motion():
    inst = make_instance(SemiLine(), OPEN, [(4.0, 0.0)])
    traj = Trajectory(inst.space, (
        Waypoint(0.0, 0.0, "start"),
        Waypoint(1.0, 4.0, "serve", 1),
    ))
    bad = Outcome(1.0, {1: 1.0}, traj, inst.requests, OPEN)
    assert any("unit speed" in v or "superluminal" in v for v in verify_outcome(inst, bad))


def test_replay_determinism(example1):
    a = simulate(example1, Alg1General())
    b = simulate(example1, Alg1General())
    assert a.trajectory.waypoints == b.trajectory.waypoints
    assert a.services == b.services


def test_mid_move_retarget_serves_closer_late_release():
    inst = make_instance(Line(), OPEN, [(1.0, 0.0), (0.05, 0.02)])
    out = simulate(inst, Greedy())
    assert out.services[2] == pytest.approx(0.05)
    assert out.services[1] == pytest.approx(1.0)
    assert verify_outcome(inst, out) == []


def test_pass_over_service_is_instantaneous():
    # moving toward the far request crosses a released one mid-leg
    inst = make_instance(SemiLine(), OPEN, [(0.25, 0.0), (1.0, 0.0)])
    out = simulate(inst, make_policy("alg4-semiline"))
    assert out.services[1] == pytest.approx(0.25)
    assert out.services[2] == pytest.approx(1.0)


class _Spinner(Policy):
    name = "spinner"

    def decide(self, obs):
        return WaitUntil(obs.now)


def test_step_budget_exceeded():
    inst = make_instance(SemiLine(), OPEN, [(1.0, 0.0)])
    with pytest.raises(SimulationError, match="step budget"):
        simulate(inst, _Spinner(), step_budget=50)


class _Escapist(Policy):
    name = "escapist"

    def decide(self, obs):
        return MoveTo(-5.0)


def test_invalid_move_target_rejected():
    inst = make_instance(SemiLine(), OPEN, [(1.0, 0.0)])
    with pytest.raises(SimulationError, match="outside"):
        simulate(inst, _Escapist())


class _Quitter(Policy):
    name = "quitter"

    def decide(self, obs):
        return Finish()


def test_premature_finish_rejected():
    inst = make_instance(SemiLine(), OPEN, [(1.0, 0.0)])
    with pytest.raises(SimulationError, match="served"):
        simulate(inst, _Quitter())


def test_knowledge_pairing_rejected():
    inst = make_instance(SemiLine(), CLOSED, [(1.0, 0.0)], knowledge="count")
    with pytest.raises(SimulationError, match="locations"):
        simulate(inst, Alg1General())


def test_count_policy_runs_under_count_knowledge():
    inst = make_instance(SemiLine(), CLOSED, [(1.0, 0.0)], knowledge="count")
    out = simulate(inst, make_policy("wait-all"))
    assert out.completion == pytest.approx(2.0)


def test_engine_outcomes_verify_across_policies(example1):
    for name in ["alg1", "wait-all", "greedy"]:
        out = simulate(example1, make_policy(name))
        assert verify_outcome(example1, out) == [], name
