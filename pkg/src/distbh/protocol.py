"""Three-step distributed BH over a star network.

1. every node estimates its null proportion and sends ``(m_i, r0_hat_i)`` up;
2. the center pools them into ``r0_star`` and broadcasts the slope
   ``beta_star = (1/alpha - r0_star) / (1 - r0_star)``;
3. every node runs BH locally at ``1 / ((1 - r0_hat_i) beta_star + r0_hat_i)``.

Messages cross the in-process :class:`StarTransport` as encoded frames so the
communication cost of a round can be counted in bytes.
"""

import math
import struct
from dataclasses import dataclass, field

import numpy as np

from .core import BhResult, bh_procedure
from .estimators import StoreyConfig

MAGIC = b"\xfd\x52"
VERSION = 1
MSG_REPORT = 1
MSG_BROADCAST = 2

_HEADER = struct.Struct("<2sBB")
_REPORT_HEAD = struct.Struct("<I")  # node_id; then m_i as u40, then r0_hat f64
_M_BYTES = 5
_F64 = struct.Struct("<d")
_BROADCAST_BODY = struct.Struct("<Id")
REPORT_SIZE = _HEADER.size + _REPORT_HEAD.size + _M_BYTES + _F64.size
BROADCAST_SIZE = _HEADER.size + _BROADCAST_BODY.size
MAX_M = (1 << (8 * _M_BYTES)) - 1


class ProtocolError(RuntimeError):
    pass


class ProtocolTimeout(ProtocolError):
    """Not every node's report reached the center."""


class DecodeError(ProtocolError):
    def __init__(self, fieldname, msg):
        super().__init__(f"{fieldname}: {msg}")
        self.field = fieldname


@dataclass(frozen=True)
class NodeReport:
    node_id: int
    m_i: int
    r0_hat_i: float


@dataclass(frozen=True)
class CenterBroadcast:
    beta_star: float
    round_id: int = 1

    @property
    def all_null(self):
        return math.isinf(self.beta_star)


# -- codec -------------------------------------------------------------------

def _check_report(r):
    if not (1 <= r.node_id <= 0xFFFFFFFF):
        raise ProtocolError("node_id out of range")
    if not (0 <= r.m_i <= MAX_M):
        raise ProtocolError("m_i out of range")
    if not (0.0 <= r.r0_hat_i <= 1.0):
        raise ProtocolError("r0_hat out of range")


def _check_broadcast(b):
    if not (0 <= b.round_id <= 0xFFFFFFFF):
        raise ProtocolError("round_id out of range")
    if not (b.beta_star >= 1.0):  # also rejects NaN
        raise ProtocolError("beta_star out of range")


def encode_report(r):
    _check_report(r)
    return b"".join((
        _HEADER.pack(MAGIC, VERSION, MSG_REPORT),
        _REPORT_HEAD.pack(r.node_id),
        r.m_i.to_bytes(_M_BYTES, "little"),
        _F64.pack(r.r0_hat_i),
    ))


def encode_broadcast(b):
    _check_broadcast(b)
    return _HEADER.pack(MAGIC, VERSION, MSG_BROADCAST) + _BROADCAST_BODY.pack(b.round_id, b.beta_star)


def _decode_header(buf, msg_type, size):
    buf = bytes(buf)
    if len(buf) < _HEADER.size:
        raise DecodeError("frame", f"truncated: {len(buf)} bytes")
    magic, version, kind = _HEADER.unpack_from(buf)
    if magic != MAGIC:
        raise DecodeError("magic", f"bad magic {magic.hex()}")
    if version != VERSION:
        raise DecodeError("version", f"unsupported version {version}")
    if kind != msg_type:
        raise DecodeError("msg_type", f"expected {msg_type}, got {kind}")
    if len(buf) != size:
        raise DecodeError("frame", f"expected {size} bytes, got {len(buf)}")
    return buf


def decode_report(buf):
    buf = _decode_header(buf, MSG_REPORT, REPORT_SIZE)
    off = _HEADER.size
    (node_id,) = _REPORT_HEAD.unpack_from(buf, off)
    off += _REPORT_HEAD.size
    m_i = int.from_bytes(buf[off:off + _M_BYTES], "little")
    (r0,) = _F64.unpack_from(buf, off + _M_BYTES)
    if node_id < 1:
        raise DecodeError("node_id", "node_id out of range")
    if not (0.0 <= r0 <= 1.0):
        raise DecodeError("r0_hat", "r0_hat out of range")
    return NodeReport(node_id, m_i, r0)


def decode_broadcast(buf):
    buf = _decode_header(buf, MSG_BROADCAST, BROADCAST_SIZE)
    round_id, beta_star = _BROADCAST_BODY.unpack_from(buf, _HEADER.size)
    if not (beta_star >= 1.0):
        raise DecodeError("beta_star", "beta_star out of range")
    return CenterBroadcast(beta_star, round_id)


# -- node and center logic ----------------------------------------------------

@dataclass
class NodeState:
    node_id: int
    batch: object  # PValueBatch
    estimator: object = field(default_factory=StoreyConfig)
    alpha_i: float = None
    result: BhResult = None
    _sorted: np.ndarray = field(default=None, init=False, repr=False)

    def sorted_pvalues(self):
        if self._sorted is None:
            self._sorted = np.sort(self.batch.pvalues)
        return self._sorted


@dataclass
class CenterState:
    expected_nodes: int
    alpha: float
    received: dict = field(default_factory=dict)

    def receive(self, report):
        if report.node_id in self.received:
            raise ProtocolError(f"duplicate report from node {report.node_id}")
        self.received[report.node_id] = report

    @property
    def ready(self):
        return len(self.received) == self.expected_nodes


def make_report(state):
    """Step 1: local count and null-proportion estimate (1.0 for an empty node)."""
    m = state.batch.m
    if m == 0:
        return NodeReport(state.node_id, 0, 1.0)
    r0 = state.estimator.estimate(state.batch.pvalues, sorted_pvalues=state.sorted_pvalues())
    return NodeReport(state.node_id, m, float(r0))


def aggregate(reports, alpha, round_id=1):
    """Step 2: pooled r0_star and the broadcast slope.

    r0_star = 1 yields ``beta_star = inf``: every non-empty node reported
    1, so the network is homogeneous and each node falls back to alpha.
    """
    reports = list(reports)
    ids = [r.node_id for r in reports]
    if len(set(ids)) != len(ids):
        raise ProtocolError("duplicate node_id among reports")
    # sorted so the float sum does not depend on arrival order
    reports.sort(key=lambda r: r.node_id)
    m = sum(r.m_i for r in reports)
    if m == 0:
        raise ProtocolError("no p-values in the network")
    # offset from the first estimate so equal estimates average to themselves exactly
    ref = reports[0].r0_hat_i
    r0_star = ref + math.fsum((r.r0_hat_i - ref) * r.m_i for r in reports) / m
    if r0_star >= 1.0:
        return CenterBroadcast(math.inf, round_id)
    beta_star = ((1.0 / alpha) - r0_star) / (1.0 - r0_star)
    if beta_star <= 1.0:
        return CenterBroadcast(1.0, round_id)
    return CenterBroadcast(_snap_beta(beta_star, alpha, r0_star), round_id)


def _snap_beta(beta_star, alpha, r0_star, width=64):
    # nearest float to beta_star whose calibration at r0_star gives back alpha bit for bit
    if _alpha_at(beta_star, r0_star) == alpha:
        return beta_star
    up = down = beta_star
    for _ in range(width):
        up = math.nextafter(up, math.inf)
        if _alpha_at(up, r0_star) == alpha:
            return up
        down = math.nextafter(down, 1.0)
        if down >= 1.0 and _alpha_at(down, r0_star) == alpha:
            return down
    return beta_star


def _alpha_at(beta_star, r):
    return 1.0 / (beta_star - r * (beta_star - 1.0))


def calibrate(broadcast, r0_hat_i, alpha=0.0):
    """Step 3: local test size with beta(alpha_i; r0_hat_i) = beta_star.

    ``alpha`` is the network level, only read for the infinite broadcast,
    where it is the limit of the homogeneous case. Left at 0 the node
    rejects nothing there.
    """
    if not (0.0 <= r0_hat_i <= 1.0):
        raise ValueError(f"r0_hat_i must lie in [0, 1], got {r0_hat_i!r}")
    beta_star = broadcast.beta_star if isinstance(broadcast, CenterBroadcast) else broadcast
    if math.isinf(beta_star):
        return alpha
    return min(_alpha_at(beta_star, r0_hat_i), 1.0)


def local_bh(state, alpha_i):
    if alpha_i <= 0.0:
        return BhResult.empty()
    return bh_procedure(state.batch.pvalues, alpha_i, sorted_pvalues=state.sorted_pvalues())


# -- transport -----------------------------------------------------------------

class StarTransport:
    """Reliable in-process star links with message and byte counters.

    Uplink frames are delivered to the center in an order fixed by ``seed``
    (node-id order when ``seed`` is None).  ``drop`` lists node ids whose
    uplink frames are silently lost; it exists for error-path tests.
    """

    def __init__(self, seed=None, drop=()):
        self.seed = seed
        self.drop = frozenset(drop)
        self.reset()

    def reset(self):
        self._up = []
        self._down = {}
        self.messages = 0
        self.bytes = 0
        self.up_messages = 0
        self.down_messages = 0

    def _count(self, frame):
        self.messages += 1
        self.bytes += len(frame)

    def send_up(self, node_id, frame):
        self._count(frame)
        self.up_messages += 1
        if node_id not in self.drop:
            self._up.append((node_id, frame))

    def drain_up(self):
        frames = sorted(self._up, key=lambda x: x[0])
        if self.seed is not None:
            order = np.random.default_rng(self.seed).permutation(len(frames))
            frames = [frames[k] for k in order]
        self._up = []
        return [f for _, f in frames]

    def send_down(self, node_id, frame):
        self._count(frame)
        self.down_messages += 1
        self._down.setdefault(node_id, []).append(frame)

    def recv_down(self, node_id):
        box = self._down.get(node_id)
        if not box:
            raise ProtocolTimeout(f"node {node_id} received no broadcast")
        return box.pop(0)


def run_round(nodes, alpha, transport=None, round_id=1):
    """Execute one protocol round; returns {node_id: BhResult}.

    Sets ``alpha_i`` and ``result`` on every node as a side effect.
    """
    if not (0.0 < alpha <= 1.0):
        raise ValueError(f"alpha must lie in (0, 1], got {alpha!r}")
    transport = StarTransport() if transport is None else transport
    nodes = list(nodes)
    center = CenterState(expected_nodes=len(nodes), alpha=alpha)

    for node in nodes:
        transport.send_up(node.node_id, encode_report(make_report(node)))
    for frame in transport.drain_up():
        center.receive(decode_report(frame))
    if not center.ready:
        missing = sorted({n.node_id for n in nodes} - set(center.received))
        raise ProtocolTimeout(f"missing reports from nodes {missing}")

    frame = encode_broadcast(aggregate(center.received.values(), center.alpha, round_id))
    for node in nodes:
        transport.send_down(node.node_id, frame)

    out = {}
    for node in nodes:
        b = decode_broadcast(transport.recv_down(node.node_id))
        node.alpha_i = calibrate(b, center.received[node.node_id].r0_hat_i, alpha)
        node.result = local_bh(node, node.alpha_i)
        out[node.node_id] = node.result
    return out
