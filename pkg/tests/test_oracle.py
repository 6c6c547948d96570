import pytest

from conftest import make_instance
from oltsp_lab import (
    CLOSED,
    OPEN,
    GenParams,
    Instance,
    Request,
    generate_random,
    opt_bruteforce,
    opt_makespan,
)
from oltsp_lab.metric import General, Ring, SemiLine

KINDS = [
    ("semiline", {}),
    ("line", {}),
    ("ring", {}),
    ("star", {"ray_count": 4}),
    ("general", {}),
    ("general", {"asymmetric": True}),
]


def test_reference_instance_brute_then_dp(example1):
    brute = opt_bruteforce(example1)
    assert brute.makespan == pytest.approx(12.0, abs=1e-12)
    assert brute.order == (1, 2, 3)
    assert brute.per_step_times == (3.0, 6.0, 9.0)
    dp = opt_makespan(example1)
    assert dp.makespan == brute.makespan
    assert dp.order == (1, 2, 3)


def test_single_request_closed_forced_structure():
    for p, r in [(0.4, 0.0), (0.4, 3.0), (2.0, 1.0)]:
        inst = make_instance(SemiLine(), CLOSED, [(p, r)])
        assert opt_makespan(inst).makespan == pytest.approx(max(p, r) + p)


def test_ring_open_two_request_realization():
    inst = make_instance(Ring(1.0), OPEN, [(1 / 3, 1 / 3), (2 / 3, 2 / 3)])
    assert opt_makespan(inst).makespan == pytest.approx(2 / 3, abs=1e-12)


def test_empty_instance():
    inst = Instance(space=SemiLine(), variant=OPEN, requests=())
    assert opt_makespan(inst).makespan == 0.0
    assert opt_bruteforce(inst).makespan == 0.0


def test_zero_releases_reduce_to_pure_tour(example1):
    zero = Instance(
        space=example1.space,
        variant=CLOSED,
        requests=tuple(Request(r.id, r.point, 0.0) for r in example1.requests),
    )
    assert opt_makespan(zero).makespan == pytest.approx(9.0)  # shortest closed tour
    open_zero = Instance(space=zero.space, variant=OPEN, requests=zero.requests)
    assert opt_makespan(open_zero).makespan == pytest.approx(6.0)  # q2,q1,q3 path


@pytest.mark.parametrize("kind,sp", KINDS)
def test_dp_equals_bruteforce(kind, sp):
    for seed in range(80):
        n = seed % 9
        inst = generate_random(
            GenParams(n=n, seed=7000 + seed, release_horizon=1.5, space_params=sp),
            kind,
            variant=CLOSED if seed % 2 else OPEN,
        )
        assert opt_makespan(inst).makespan == opt_bruteforce(inst).makespan, (kind, seed)


def test_release_monotonicity():
    for seed in range(40):
        inst = generate_random(
            GenParams(n=5, seed=8100 + seed, release_horizon=1.0), "line", variant=CLOSED
        )
        base = opt_makespan(inst).makespan
        reqs = list(inst.requests)
        k = seed % 5
        reqs[k] = Request(reqs[k].id, reqs[k].point, reqs[k].release + 0.7)
        bumped = Instance(space=inst.space, variant=CLOSED, requests=tuple(reqs))
        assert opt_makespan(bumped).makespan >= base - 1e-9


def test_closed_at_least_open():
    for seed in range(40):
        inst = generate_random(
            GenParams(n=6, seed=8200 + seed, release_horizon=2.0), "star",
            variant=CLOSED,
        )
        closed = opt_makespan(inst).makespan
        open_ = opt_makespan(Instance(inst.space, OPEN, inst.requests)).makespan
        assert closed >= open_ - 1e-9


def test_elementary_lower_bounds():
    for seed in range(40):
        inst = generate_random(
            GenParams(n=6, seed=8300 + seed, release_horizon=2.0), "ring",
            variant=CLOSED,
        )
        space = inst.space
        o = space.origin()
        opt = opt_makespan(inst).makespan
        reach = max(space.distance(o, r.point) for r in inst.requests)
        assert opt >= 2 * reach - 1e-9
        assert opt >= max(
            max(r.release, space.distance(o, r.point)) for r in inst.requests
        ) - 1e-9
        open_opt = opt_makespan(Instance(space, OPEN, inst.requests)).makespan
        assert open_opt >= max(
            max(r.release, space.distance(o, r.point)) for r in inst.requests
        ) - 1e-9


def test_asymmetric_directed_fold():
    # one-way distances: going out is cheap, coming back is dear
    g = General.from_rows([[0, 1, 4], [3, 0, 4], [4, 4, 0]], symmetric=False)
    inst = Instance(
        space=g, variant=CLOSED,
        requests=(Request(1, 1, 0.0), Request(2, 2, 0.0)),
    )
    res = opt_makespan(inst)
    assert res.makespan == opt_bruteforce(inst).makespan
    # best closed order is q1 then q2: 1 + 4 + 4 = 9 (vs 4 + 4 + 3 = 11)
    assert res.makespan == pytest.approx(9.0)
    assert res.order == (1, 2)


def test_caps_enforced():
    big = generate_random(GenParams(n=12, seed=3), "semiline")
    with pytest.raises(ValueError):
        opt_bruteforce(big)
    too_big = Instance(
        space=SemiLine(), variant=OPEN,
        requests=tuple(Request(i + 1, 0.1 * i, 0.0) for i in range(19)),
    )
    with pytest.raises(ValueError):
        opt_makespan(too_big)


def test_reconstructed_times_obey_the_fold():
    for seed in range(20):
        inst = generate_random(
            GenParams(n=6, seed=8400 + seed, release_horizon=1.0), "general",
            variant=CLOSED,
        )
        res = opt_makespan(inst)
        space = inst.space
        t = 0.0
        prev = space.origin()
        for rid, expect in zip(res.order, res.per_step_times):
            req = inst.request(rid)
            t = max(t + space.distance(prev, req.point), req.release)
            assert t == pytest.approx(expect, abs=1e-12)
            prev = req.point
        t += space.distance(prev, space.origin())
        assert t == pytest.approx(res.makespan, abs=1e-12)
