from collections import Counter

import pytest

from gossipsim.exceptions import SimulationInvariantError
from gossipsim.Services.Protocol.MeshParams import MeshParams, ProtocolFeatures
from gossipsim.Services.Protocol.NodeState import JobState
from gossipsim.Services.Protocol.actions import ArmTimer, Gossip, SendControl, StartTransfer, TimerKind
from gossipsim.Services.Protocol.messages import ControlKind

KIB = 1024


def _starts(actions):
    return [a for a in actions if isinstance(a, StartTransfer)]


def _controls(actions):
    return [a for a in actions if isinstance(a, SendControl)]


def _timers(actions):
    return [a for a in actions if isinstance(a, ArmTimer)]


def _staggered(harness, k=1):
    return harness(params=MeshParams(stagger_group_size=k), features=ProtocolFeatures(idontwant=True, stagger=True))


class TestPublish:
    def test_whole_message_goes_to_every_mesh_peer(self, harness):
        h = harness()
        node = h.node(19, range(8))
        starts = _starts(h.router.publish(node, 200 * KIB, 0.0))
        assert sorted(a.job.target for a in starts) == list(range(8))
        assert {a.job.message.size for a in starts} == {200 * KIB}
        record = next(iter(h.ledger.messages.values()))
        assert record.completions == {19: 0.0}
        assert record.fragment_count == 1

    def test_large_message_is_fragmented(self, harness):
        h = harness(params=MeshParams(fragment_count=4), features=ProtocolFeatures(fragmentation=True))
        node = h.node(19, range(8))
        starts = _starts(h.router.publish(node, 1024 * KIB, 0.0))
        assert len(starts) == 32
        assert {a.job.message.size for a in starts} == {262144}
        assert len({a.job.message.id for a in starts}) == 4
        assert len(h.ledger.messages) == 1

    def test_small_message_is_not_fragmented(self, harness):
        h = harness(params=MeshParams(fragment_count=4), features=ProtocolFeatures(fragmentation=True))
        units = h.publish(1)
        assert len(units) == 1 and units[0].fragment is None

    def test_small_message_never_triggers_idontwant(self, harness):
        h = harness(features=ProtocolFeatures(idontwant=True))
        msg = h.publish(1)[0]
        node = h.node(5, (2, 4, 9))
        assert _controls(h.router.handle_message_received(node, msg, 2, 100.0)) == []


class TestReception:
    def test_first_copy_announces_and_forwards(self, harness):
        h = harness(features=ProtocolFeatures(idontwant=True))
        msg = h.publish(200 * KIB)[0]
        node = h.node(5, (2, 4, 9))
        actions = h.router.handle_message_received(node, msg, 2, 300.0)

        controls = _controls(actions)
        assert sorted(a.dst for a in controls) == [4, 9]
        assert all(a.rpc.kind is ControlKind.IDONTWANT and a.rpc.ids == (msg.id,) for a in controls)
        assert sorted(a.job.target for a in _starts(actions)) == [4, 9]
        assert h.ledger.messages[msg.id].completions[5] == 300.0

    def test_known_dontwant_peer_is_skipped(self, harness):
        h = harness(features=ProtocolFeatures(idontwant=True))
        msg = h.publish(200 * KIB)[0]
        node = h.node(5, (2, 4, 9))
        h.router.handle_idontwant(node, msg.id, 9, 250.0)
        actions = h.router.handle_message_received(node, msg, 2, 300.0)
        assert [a.dst for a in _controls(actions)] == [4]
        assert [a.job.target for a in _starts(actions)] == [4]
        assert h.ledger.messages[msg.id].suppressed == 1

    def test_duplicate_is_counted_not_redelivered(self, harness):
        h = harness(features=ProtocolFeatures(idontwant=True))
        msg = h.publish(200 * KIB)[0]
        node = h.node(5, (2, 4, 9))
        h.router.handle_message_received(node, msg, 2, 300.0)
        assert h.router.handle_message_received(node, msg, 4, 300.0) == []
        record = h.ledger.messages[msg.id]
        assert record.duplicates == 1
        assert h.ledger.duplicates_by_node[(msg.id, 5)] == 1
        assert record.completions[5] == 300.0

    def test_iwant_served_copies_are_kept_out_of_mesh_duplicates(self, harness):
        h = harness()
        msg = h.publish(200 * KIB)[0]
        node = h.node(5, (2, 4, 9))
        h.router.handle_message_received(node, msg, 2, 300.0)
        h.router.handle_message_received(node, msg, 4, 310.0, via_iwant=True)
        h.router.handle_message_received(node, msg, 9, 320.0)
        assert h.ledger.duplicates_by_node[(msg.id, 5)] == 2
        assert h.ledger.mesh_duplicates_by_node[(msg.id, 5)] == 1

    @pytest.mark.parametrize('sender', [5, 99])
    def test_reception_from_outside_the_network_is_fatal(self, harness, sender):
        h = harness()
        msg = h.publish(200 * KIB)[0]
        node = h.node(5, (2, 4, 9))
        with pytest.raises(SimulationInvariantError):
            h.router.handle_message_received(node, msg, sender, 1.0)

    def test_reassembly_completes_on_last_fragment(self, harness):
        h = harness(params=MeshParams(fragment_count=4), features=ProtocolFeatures(fragmentation=True))
        units = h.publish(1024 * KIB)
        node = h.node(5, (19, 1, 2))
        parent = units[0].parent_id
        for index, at in ((3, 10.0), (0, 20.0), (2, 30.0)):
            h.router.handle_message_received(node, units[index], 19, at)
            assert 5 not in h.ledger.messages[parent].completions
        h.router.handle_message_received(node, units[1], 19, 40.0)
        assert h.ledger.messages[parent].completions[5] == 40.0
        assert parent not in node.reassembly

    def test_processing_delay_defers_forwarding(self, harness):
        h = harness(features=ProtocolFeatures(idontwant=True), processing_delay=10.0)
        msg = h.publish(200 * KIB)[0]
        node = h.node(5, (2, 4, 9))
        actions = h.router.handle_message_received(node, msg, 2, 100.0)
        assert _starts(actions) == []
        [timer] = _timers(actions)
        assert timer.kind is TimerKind.FORWARD and timer.at == 110.0

        h.router.handle_message_received(node, msg, 4, 105.0)
        starts = _starts(h.router.on_forward_timer(node, msg, 110.0))
        assert [a.job.target for a in starts] == [9]


class TestStaggering:
    def test_sequential_groups_follow_completion_or_timeout(self, harness):
        h = _staggered(harness, k=1)
        msg = h.publish(200 * KIB)[0]
        node = h.node(10, range(8))

        actions = h.router.handle_message_received(node, msg, 0, 0.0)
        first = _starts(actions)
        assert len(first) == 1
        [timer] = _timers(actions)
        assert timer.kind is TimerKind.STAGGER_TIMEOUT and timer.at == 200.0 and timer.token == 1
        assert Counter(j.group_index for j in node.outbound_queue.values()) == Counter(range(7))

        actions = h.router.on_transfer_complete(node, first[0].job, 150.0)
        second = _starts(actions)
        assert len(second) == 1 and _timers(actions)[0].at == 350.0

        assert h.router.on_stagger_timeout(node, 1, 200.0) == []
        third = _starts(h.router.on_stagger_timeout(node, 2, 350.0))
        assert len(third) == 1
        assert second[0].job.state is JobState.IN_FLIGHT

        starts = [first[0].job.start_time, second[0].job.start_time, third[0].job.start_time]
        assert starts == sorted(starts) and len(set(starts)) == 3
        assert [s.job.group_index for s in (first[0], second[0], third[0])] == [0, 1, 2]

    def test_groups_of_three(self, harness):
        h = _staggered(harness, k=3)
        msg = h.publish(200 * KIB)[0]
        node = h.node(10, range(8))
        actions = h.router.handle_message_received(node, msg, 0, 0.0)
        assert len(_starts(actions)) == 3
        assert Counter(j.group_index for j in node.outbound_queue.values()) == Counter({0: 3, 1: 3, 2: 1})

    def test_group_larger_than_successors_sends_at_once(self, harness):
        h = _staggered(harness, k=8)
        msg = h.publish(200 * KIB)[0]
        node = h.node(10, range(8))
        starts = _starts(h.router.handle_message_received(node, msg, 0, 0.0))
        assert sorted(a.job.target for a in starts) == list(range(1, 8))
        assert {a.job.start_time for a in starts} == {0.0}

    def test_small_messages_are_not_staggered(self, harness):
        h = _staggered(harness, k=1)
        msg = h.publish(KIB)[0]
        node = h.node(10, range(8))
        actions = h.router.handle_message_received(node, msg, 0, 0.0)
        assert len(_starts(actions)) == 7
        assert _timers(actions) == []

    def test_groups_rotate_between_messages(self, harness):
        h = _staggered(harness, k=1)
        m1 = h.publish(200 * KIB, publisher=19)[0]
        m2 = h.publish(200 * KIB, publisher=18)[0]
        node = h.node(10, range(8))

        released = [_starts(h.router.handle_message_received(node, m1, 0, 0.0))[0].job.message.id]
        assert _starts(h.router.handle_message_received(node, m2, 0, 10.0)) == []
        now = 100.0
        for _ in range(5):
            now += 100.0
            starts = _starts(h.router.on_transfer_complete(node, node.active_group[0], now))
            released.append(starts[0].job.message.id)

        assert set(released) == {m1.id, m2.id}
        tail = released[1:]
        assert all(a != b for a, b in zip(tail, tail[1:]))


class TestIdontwant:
    def test_queued_job_is_canceled_in_flight_is_not(self, harness):
        h = _staggered(harness, k=1)
        msg = h.publish(200 * KIB)[0]
        node = h.node(10, range(8))
        h.router.handle_message_received(node, msg, 0, 0.0)

        in_flight = node.active_group[0]
        queued = next(j for j in node.outbound_queue.values() if j.state is JobState.QUEUED)

        assert h.router.handle_idontwant(node, msg.id, in_flight.target, 50.0) == []
        assert in_flight.state is JobState.IN_FLIGHT
        assert h.router.handle_idontwant(node, msg.id, queued.target, 50.0) == [queued]
        assert queued.state is JobState.CANCELED
        assert h.ledger.messages[msg.id].canceled == 1

        started = {in_flight.target}
        now = 50.0
        while node.active_group:
            now += 100.0
            for action in _starts(h.router.on_transfer_complete(node, node.active_group[0], now)):
                started.add(action.job.target)
        assert queued.target not in started
        assert len(started) == 6

    def test_unknown_message_is_recorded(self, harness):
        h = harness()
        node = h.node(10, range(8))
        unknown = b'\x01' * 32
        assert h.router.handle_idontwant(node, unknown, 3, 0.0) == []
        assert node.dontwant_received[unknown] == {3}

    def test_duplicate_from_queued_target_cancels_its_job(self, harness):
        h = _staggered(harness, k=1)
        msg = h.publish(200 * KIB)[0]
        node = h.node(10, range(8))
        h.router.handle_message_received(node, msg, 0, 0.0)
        queued = next(j for j in node.outbound_queue.values() if j.state is JobState.QUEUED)
        h.router.handle_message_received(node, msg, queued.target, 20.0)
        assert queued.state is JobState.CANCELED


class TestGossip:
    def test_ihave_target_count_scales_with_known_peers(self, harness):
        h = harness(n_nodes=1000)
        node = h.node(0, range(1, 9))
        h.router.publish(node, KIB, 0.0)
        [gossip] = h.router.heartbeat(node, 1000.0)
        assert isinstance(gossip, Gossip)
        assert len(gossip.targets) == 50
        assert len(set(gossip.targets)) == 50
        assert not set(gossip.targets) & set(range(0, 9))
        assert gossip.rpc.kind is ControlKind.IHAVE

    def test_d_lazy_is_the_floor(self, harness):
        h = harness(n_nodes=19)
        node = h.node(0, range(1, 9))
        h.router.publish(node, KIB, 0.0)
        [gossip] = h.router.heartbeat(node, 1000.0)
        assert len(gossip.targets) == 6

    def test_empty_cache_sends_nothing(self, harness):
        h = harness(n_nodes=1000)
        node = h.node(0, range(1, 9))
        assert h.router.heartbeat(node, 1000.0) == []

    def test_cache_windows(self, harness):
        h = harness(n_nodes=100)
        node = h.node(0, range(1, 9))
        h.router.publish(node, KIB, 0.0)
        msg_id = node.mcache.window()[0]
        for beat in range(3):
            assert h.router.heartbeat(node, 1000.0 * (beat + 1)) != []
        assert h.router.heartbeat(node, 4000.0) == []
        assert node.mcache.get(msg_id) is not None
        h.router.heartbeat(node, 5000.0)
        assert node.mcache.get(msg_id) is None

    def test_ihave_requests_unseen_ids_once_per_window(self, harness):
        h = harness()
        msg_id = h.publish(200 * KIB)[0].id
        node = h.node(3, range(8))

        [request] = h.router.handle_ihave(node, (msg_id,), 12, 0.0)
        assert request.dst == 12 and request.rpc.kind is ControlKind.IWANT and request.rpc.ids == (msg_id,)
        assert h.ledger.iwant_requests == 1
        assert h.router.handle_ihave(node, (msg_id,), 13, 500.0) == []
        assert len(h.router.handle_ihave(node, (msg_id,), 13, 1000.0)) == 1
        assert h.ledger.iwant_requests == 2

    def test_ihave_for_seen_id_is_ignored(self, harness):
        h = harness()
        msg = h.publish(200 * KIB)[0]
        node = h.node(3, range(8))
        h.router.handle_message_received(node, msg, 0, 10.0)
        assert h.router.handle_ihave(node, (msg.id,), 12, 20.0) == []
        assert h.ledger.iwant_requests == 0

    def test_iwant_served_from_cache(self, harness):
        h = harness()
        msg = h.publish(200 * KIB)[0]
        node = h.node(3, range(8))
        h.router.handle_message_received(node, msg, 0, 10.0)

        [start] = h.router.handle_iwant(node, (msg.id,), 15, 20.0)
        assert start.job.target == 15 and start.job.via_iwant
        assert h.router.handle_iwant(node, (msg.id,), 15, 30.0) == []
        assert h.router.handle_iwant(node, (b'\x00' * 32,), 15, 30.0) == []

    def test_iwant_promotes_a_queued_job(self, harness):
        h = _staggered(harness, k=1)
        msg = h.publish(200 * KIB)[0]
        node = h.node(10, range(8))
        h.router.handle_message_received(node, msg, 0, 0.0)
        queued = next(j for j in node.outbound_queue.values() if j.state is JobState.QUEUED)

        [start] = h.router.handle_iwant(node, (msg.id,), queued.target, 30.0)
        assert start.job is queued
        assert queued.state is JobState.IN_FLIGHT and queued.start_time == 30.0
