import pytest

from oltsp_lab import CLOSED, Instance, Request
from oltsp_lab.metric import General


# Reference three-request instance on a symmetric four-node matrix
# (origin, q1, q2, q3) used across the suite.  Distances: the four outer
# legs are 3, the origin-to-q2 chord is 2, the q1-to-q3 chord is 1;
# releases are 2, 6 and 8.
EX1_MATRIX = [
    [0, 3, 2, 3],
    [3, 0, 3, 1],
    [2, 3, 0, 3],
    [3, 1, 3, 0],
]


def make_instance(space, variant, pts_rel, knowledge="locations"):
    reqs = tuple(Request(i + 1, p, float(r)) for i, (p, r) in enumerate(pts_rel))
    return Instance(space=space, variant=variant, requests=reqs, knowledge=knowledge)


@pytest.fixture
def example1() -> Instance:
    return Instance(
        space=General.from_rows(EX1_MATRIX),
        variant=CLOSED,
        requests=(Request(1, 1, 2.0), Request(2, 2, 6.0), Request(3, 3, 8.0)),
    )
