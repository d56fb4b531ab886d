import math

from hypothesis import given, settings, strategies as st

from hsisim.metrics import compute_metrics
from hsisim.rng import RandomStream
from hsisim.swarm import ACTIVE, DEACTIVATED, RobotState
from hsisim.world import GridWorld


def world(target=(0.0, 0.0)):
    return GridWorld(40, 40, 1.0, frozenset(), target)


def robot(rid, pos, status=ACTIVE):
    return RobotState(rid, pos, (0, 0), pos, 0.0, status)


def brute_force(robots, target, naq_mode="prefix_mean"):
    """Independent recomputation: sort + prefix means + centroid."""
    pts = [r.pos for r in robots if r.status == ACTIVE]
    if not pts:
        return None
    ds = sorted(math.dist(p, target) for p in pts)
    cx = sum(p[0] for p in pts) / len(pts)
    cy = sum(p[1] for p in pts) / len(pts)
    k1 = math.ceil(len(pts) / 4)
    k2 = math.ceil(len(pts) / 2)
    if naq_mode == "prefix_mean":
        naq1 = sum(ds[:k1]) / k1
        naq2 = sum(ds[:k2]) / k2
    else:
        naq1, naq2 = ds[k1 - 1], ds[k2 - 1]
    return {"ca": math.dist((cx, cy), target), "na": ds[0],
            "naq1": naq1, "naq2": naq2, "mean": sum(ds) / len(ds),
            "max": ds[-1]}


class TestExamples:
    def test_four_collinear_robots(self):
        robots = [robot(i, (float(i + 1), 0.0)) for i in range(4)]
        m = compute_metrics(robots, world(), 0)
        # distances {1,2,3,4}: ceil(4/4)=1 -> mean {1}; ceil(4/2)=2 -> mean {1,2}
        assert m.ca == 2.5
        assert m.na == 1.0
        assert m.naq1 == 1.0
        assert m.naq2 == 1.5

    def test_symmetric_pair_centroid_on_target(self):
        robots = [robot(0, (0.0, 0.0)), robot(1, (2.0, 0.0))]
        m = compute_metrics(robots, world(target=(1.0, 0.0)), 0)
        assert m.ca == 0.0
        assert m.na == 1.0

    def test_single_robot_three_four_five(self):
        m = compute_metrics([robot(0, (3.0, 4.0))], world(), 0)
        assert m.ca == m.na == m.naq1 == m.naq2 == 5.0

    def test_zero_active_flagged(self):
        robots = [robot(0, (3.0, 4.0), DEACTIVATED)]
        m = compute_metrics(robots, world(), 7)
        assert m.all_deactivated
        assert m.ca is None and m.na is None
        assert m.active_count == 0 and m.deactivated_count == 1

    def test_boundary_mode(self):
        robots = [robot(i, (float(i + 1), 0.0)) for i in range(4)]
        m = compute_metrics(robots, world(), 0, naq_mode="boundary")
        assert m.naq1 == 1.0 and m.naq2 == 2.0


def random_swarm(stream, n_active, n_deactivated):
    robots = []
    for i in range(n_active):
        robots.append(robot(i, (stream.uniform(0, 40), stream.uniform(0, 40))))
    for i in range(n_deactivated):
        robots.append(robot(n_active + i,
                            (stream.uniform(0, 40), stream.uniform(0, 40)),
                            DEACTIVATED))
    return robots


class TestOracle:
    def test_matches_brute_force_on_random_configurations(self):
        stream = RandomStream.from_seed(77, "metrics")
        target = (20.0, 20.0)
        for trial in range(300):
            n_active = 1 + stream.randrange(30)
            robots = random_swarm(stream, n_active, stream.randrange(5))
            for mode in ("prefix_mean", "boundary"):
                m = compute_metrics(robots, world(target), 0, naq_mode=mode)
                expect = brute_force(robots, target, mode)
                assert abs(m.ca - expect["ca"]) < 1e-9
                assert abs(m.na - expect["na"]) < 1e-9
                assert abs(m.naq1 - expect["naq1"]) < 1e-9
                assert abs(m.naq2 - expect["naq2"]) < 1e-9

    def test_ordering_chain(self):
        stream = RandomStream.from_seed(78, "metrics")
        target = (20.0, 20.0)
        for trial in range(300):
            robots = random_swarm(stream, 1 + stream.randrange(30), 0)
            m = compute_metrics(robots, world(target), 0)
            expect = brute_force(robots, target)
            assert m.na <= m.naq1 + 1e-12
            assert m.naq1 <= m.naq2 + 1e-12
            assert m.naq2 <= expect["mean"] + 1e-12
            assert m.ca <= expect["max"] + 1e-12   # centroid in convex hull


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.floats(0, 40, allow_nan=False),
                          st.floats(0, 40, allow_nan=False)),
                min_size=1, max_size=25),
       st.randoms())
def test_permutation_invariance(points, rnd):
    robots = [robot(i, p) for i, p in enumerate(points)]
    shuffled = list(robots)
    rnd.shuffle(shuffled)
    shuffled = [robot(i, r.pos) for i, r in enumerate(shuffled)]
    w = world((20.0, 20.0))
    a = compute_metrics(robots, w, 0)
    b = compute_metrics(shuffled, w, 0)
    assert math.isclose(a.ca, b.ca, abs_tol=1e-12)
    assert a.na == b.na
    assert math.isclose(a.naq1, b.naq1, abs_tol=1e-12)
    assert math.isclose(a.naq2, b.naq2, abs_tol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.floats(0, 40, allow_nan=False),
                          st.floats(0, 40, allow_nan=False)),
                min_size=1, max_size=25))
def test_adding_deactivated_robot_changes_only_count(points):
    robots = [robot(i, p) for i, p in enumerate(points)]
    extended = robots + [robot(len(points), (1.0, 1.0), DEACTIVATED)]
    w = world((20.0, 20.0))
    a = compute_metrics(robots, w, 0)
    b = compute_metrics(extended, w, 0)
    assert (a.ca, a.na, a.naq1, a.naq2) == (b.ca, b.na, b.naq1, b.naq2)
    assert b.deactivated_count == a.deactivated_count + 1
