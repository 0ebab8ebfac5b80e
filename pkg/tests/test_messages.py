import pytest

from gossipsim.exceptions import ConfigError, FragmentationError, SimulationInvariantError
from gossipsim.Services.Protocol.MeshParams import MeshParams
from gossipsim.Services.Protocol.messages import (
    ControlKind,
    ControlRpc,
    Message,
    fragment_message,
    make_message_id,
)


def _message(size, seqno=0):
    return Message(id=make_message_id(1, 0, seqno), topic='t', size=size, publisher=0, publish_time=0.0)


def test_even_split_of_one_mib():
    parts = fragment_message(_message(1048576), 4)
    assert [p.size for p in parts] == [262144] * 4


def test_ceil_split_puts_remainder_last():
    parts = fragment_message(_message(10), 4)
    assert [p.size for p in parts] == [3, 3, 3, 1]
    assert sum(p.size for p in parts) == 10


def test_fragments_carry_parentage():
    msg = _message(100)
    parts = fragment_message(msg, 4)
    assert [p.fragment.index for p in parts] == [0, 1, 2, 3]
    assert all(p.fragment.total == 4 and p.parent_id == msg.id for p in parts)
    assert len({p.id for p in parts}) == 4
    assert msg.id not in {p.id for p in parts}


def test_fragment_ids_are_deterministic():
    first = [p.id for p in fragment_message(_message(100), 4)]
    second = [p.id for p in fragment_message(_message(100), 4)]
    assert first == second


def test_single_fragment_is_identity():
    msg = _message(5)
    assert fragment_message(msg, 1) == [msg]
    assert msg.fragment is None


@pytest.mark.parametrize('size,n', [(3, 4), (10, 6), (10, 0)])
def test_rejects_splits_with_empty_fragments(size, n):
    with pytest.raises(FragmentationError):
        fragment_message(_message(size), n)


def test_rejects_fragmenting_a_fragment():
    part = fragment_message(_message(100), 2)[0]
    with pytest.raises(FragmentationError):
        fragment_message(part, 2)


def test_control_wire_size():
    rpc = ControlRpc(ControlKind.IHAVE, (b'a' * 32, b'b' * 32, b'c' * 32))
    assert rpc.wire_size == 64 + 3 * 32
    assert ControlRpc(ControlKind.IWANT, (b'a' * 32,), framing_overhead=0).wire_size == 32


def test_control_needs_ids():
    with pytest.raises(SimulationInvariantError):
        ControlRpc(ControlKind.IDONTWANT, ())


def test_mesh_defaults():
    params = MeshParams()
    assert (params.d, params.d_low, params.d_high, params.d_lazy, params.d_out) == (8, 6, 12, 6, 3)
    assert params.gossip_factor == 0.05
    assert params.heartbeat_interval == 1000
    assert params.stagger_interval == 200
    assert params.flood_publish is False
    assert params.iwant_window == params.heartbeat_interval


@pytest.mark.parametrize('kwargs,field', [
    ({'d': 5}, 'd'),
    ({'d_out': 7}, 'd_out'),
    ({'stagger_group_size': 0}, 'stagger_group_size'),
    ({'fragment_count': 0}, 'fragment_count'),
    ({'gossip_factor': 1.5}, 'gossip_factor'),
    ({'flood_publish': True}, 'flood_publish'),
])
def test_mesh_params_validation(kwargs, field):
    with pytest.raises(ConfigError) as e:
        MeshParams(**kwargs)
    assert e.value.field == field
