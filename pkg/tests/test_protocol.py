import pytest

from femtohandover.cac import Decision
from femtohandover.entities import FemtoAccessPoint, MobileStation
from femtohandover.errors import ContractViolation
from femtohandover.geometry import Point2D, Trajectory
from femtohandover.protocol import (
    FEMTO_TO_MACRO,
    MACRO_TO_FEMTO,
    Direction,
    Entity,
    FailureReason,
    NetworkTopology,
    Phase,
    TopologyKind,
    build_neighbor_list,
    check_access,
    run_femto_to_macro,
    run_macro_to_femto,
    sequence_latency,
)
from femtohandover.radio import Measurement

CONC = NetworkTopology.uniform(TopologyKind.CONCENTRATOR, 0.010)
DIRECT = NetworkTopology.uniform(TopologyKind.DIRECT_RNC, 0.010)
ADMIT_AT = Measurement(100.0, -25.0, 20.0)


def ms(id=1, at=(0.0, 0.0), serving=None):
    return MobileStation(id, Trajectory(Point2D(*at), 0.0, 0.25), 90.0, serving=serving)


def fap(id=7, csg=(1,), at=(0.0, 0.0), **kw):
    return FemtoAccessPoint(id, Point2D(*at), csg=frozenset(csg), **kw)


def test_sequence_counts():
    assert len(MACRO_TO_FEMTO[TopologyKind.CONCENTRATOR]) == 12
    assert len(FEMTO_TO_MACRO[TopologyKind.CONCENTRATOR]) == 8
    assert len(MACRO_TO_FEMTO[TopologyKind.DIRECT_RNC]) == 10
    assert len(FEMTO_TO_MACRO[TopologyKind.DIRECT_RNC]) == 6


def test_direct_rnc_tables_never_touch_fgw():
    for table in (MACRO_TO_FEMTO, FEMTO_TO_MACRO):
        assert all(Entity.FGW not in (m.sender, m.receiver) for m in table[TopologyKind.DIRECT_RNC])


def test_femto_to_macro_has_no_authorization_or_interference_report():
    for kind in TopologyKind:
        names = [m.name for m in FEMTO_TO_MACRO[kind]]
        assert "HandoverRequest" not in names
        # the only report comes from the MS to its serving FAP
        assert [m.receiver for m in FEMTO_TO_MACRO[kind] if m.name == "MeasurementReport"] == [Entity.FAP]


def test_macro_to_femto_steps_in_order():
    for kind in TopologyKind:
        steps = [m.step for m in MACRO_TO_FEMTO[kind]]
        assert steps == sorted(steps, key=lambda s: ("PE".index(s[0]), s[1:]))
        assert {"P1", "P2", "P3", "E1", "E2", "E3", "E4"} == set(steps)


def test_authorized_concentrator_completes():
    a = run_macro_to_femto(ms(), fap(), ADMIT_AT, Decision.ADMIT, CONC)
    assert a.phase is Phase.COMPLETE
    assert a.message_count == 12
    assert a.completion_time == pytest.approx(100.0 + 12 * 0.010)
    assert a.trigger_time <= a.admission_time <= a.completion_time


def test_unauthorized_fails_in_preparation():
    a = run_macro_to_femto(ms(id=2), fap(), ADMIT_AT, Decision.ADMIT, CONC)
    assert a.phase is Phase.FAILED and a.failure is FailureReason.UNAUTHORIZED
    assert not a.reached_execution
    assert a.message_count == 3
    assert a.completion_time is None


def test_no_resources():
    a = run_macro_to_femto(ms(), fap(), ADMIT_AT, Decision.ADMIT, CONC, capacity_available=False)
    assert a.failure is FailureReason.NO_RESOURCES and not a.reached_execution


def test_direct_rnc_fewer_hops():
    c = run_macro_to_femto(ms(), fap(), ADMIT_AT, Decision.ADMIT, CONC)
    d = run_macro_to_femto(ms(), fap(), ADMIT_AT, Decision.ADMIT, DIRECT)
    assert d.complete and d.message_count == 10 < c.message_count
    assert d.latency < c.latency


def test_macro_to_femto_requires_admit():
    for decision in (Decision.PENDING, Decision.REJECT_INTERFERENCE):
        with pytest.raises(ContractViolation):
            run_macro_to_femto(ms(), fap(), ADMIT_AT, decision, CONC)


def test_femto_to_macro_shorter_on_both_topologies():
    for topo in (CONC, DIRECT):
        m2f = run_macro_to_femto(ms(), fap(), ADMIT_AT, Decision.ADMIT, topo)
        f2m = run_femto_to_macro(ms(serving=7), fap(), topo, 200.0)
        assert f2m.complete and f2m.direction is Direction.FEMTO_TO_MACRO
        assert f2m.message_count < m2f.message_count
        assert f2m.latency < m2f.latency
    assert run_femto_to_macro(ms(serving=7), fap(), CONC, 0.0).message_count == 8


def test_femto_to_macro_requires_serving_fap():
    with pytest.raises(ContractViolation):
        run_femto_to_macro(ms(serving=None), fap(), CONC, 1.0)


def test_call_end_mid_execution():
    # preparation takes 4 hops (40 ms); the call drops 55 ms in
    a = run_femto_to_macro(ms(serving=7), fap(), CONC, 10.0, call_end=10.055)
    assert a.phase is Phase.FAILED and a.failure is FailureReason.CALL_ENDED
    assert a.reached_execution and a.completion_time is None
    assert a.message_count == 5


def test_latency_sums_per_hop_table():
    lat = dict(CONC.latencies)
    lat[frozenset((Entity.RNC, Entity.SGSN))] = 0.050
    topo = NetworkTopology(TopologyKind.CONCENTRATOR, lat)
    a = run_macro_to_femto(ms(), fap(), ADMIT_AT, Decision.ADMIT, topo)
    assert a.latency == pytest.approx(sequence_latency(MACRO_TO_FEMTO[TopologyKind.CONCENTRATOR], topo))
    assert a.latency == pytest.approx(10 * 0.010 + 2 * 0.050)


def test_topology_validation():
    assert CONC.fgw_present and not DIRECT.fgw_present
    with pytest.raises(ValueError):
        NetworkTopology(TopologyKind.CONCENTRATOR, {frozenset((Entity.MS, Entity.NODE_B)): 0.01})
    with pytest.raises(ValueError):
        NetworkTopology.uniform(TopologyKind.DIRECT_RNC, 0.0)


def test_check_access():
    assert check_access(ms(1), fap(csg=(1,)))
    assert not check_access(ms(2), fap(csg=(1,)))
    assert check_access(ms(2), fap(csg=(), open_access=True))


def test_neighbor_list_registered_subset_nearest_first():
    faps = [
        fap(0, csg=(9,), at=(5, 0)),
        fap(1, csg=(1,), at=(40, 0)),
        fap(2, csg=(9,), at=(10, 0)),
        fap(3, csg=(1, 9), at=(20, 0)),
        fap(4, csg=(9,), at=(30, 0)),
    ]
    assert build_neighbor_list(ms(1), faps, CONC) == [3, 1]
    assert build_neighbor_list(ms(1), faps, DIRECT) == [3, 1]
    assert build_neighbor_list(ms(5), faps, CONC) == []


def test_neighbor_list_scan_radius_and_ties():
    faps = [fap(4, at=(0, 10)), fap(2, at=(10, 0)), fap(3, at=(150, 0))]
    assert build_neighbor_list(ms(1), faps, CONC) == [2, 4]
    assert build_neighbor_list(ms(1), faps, CONC, scan_radius_m=200) == [2, 4, 3]
