"""
Distributed execution: one NodeServer per logical node.

Every node loads the whole net but only runs the engines placed on it.
A spark towards an engine on the same node is a local jump; one towards
another node becomes a frame on a TCP link. Heaps never leave their
engine, and pointer names stay unique because each node mints under its
own tag.
"""
import json
import logging
import queue
import socket
import socketserver
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.combinators.gamnet import GamNet
from src.config import MAX_WORKERS, RUN_TIMEOUT, SOCKET_TIMEOUT
from src.errors import ConfigError, ConnectionLost, InterfaceError, ProtocolError, RoutingError
from src.hram.code import Message, regs as pad_registers
from src.hram.engine import Fault, Thread, execute
from src.hramnet.net import Net
from src.hramnet.trace import Move
from src.nominal import NameMinter, Polarity
from src.runtime.frames import (
    AUDIT_DONE, AUDIT_REPLY, AUDIT_REQUEST, FAULT_REPORT, SHUTDOWN,
    control, encode_frame, is_control, read_frame,
)
from src.runtime.scheduler import HeapAudit, RunResult, answers_question, root_question


def _unique_keys(pairs):
    out = {}
    for key, value in pairs:
        if key in out:
            raise ConfigError(f"duplicate key {key!r} in node config")
        out[key] = value
    return out


@dataclass(frozen=True)
class NodeConfig:
    nodes: Dict[str, Tuple[str, int]]
    root: str

    def __post_init__(self):
        if not self.nodes:
            raise ConfigError("node config lists no nodes")
        if self.root not in self.nodes:
            raise ConfigError(f"root {self.root!r} is not a configured node")

    def node_tag(self, name) -> int:
        """Nodes mint under tags 1..n in config order."""
        try:
            return list(self.nodes).index(name) + 1
        except ValueError:
            raise ConfigError(f"unknown node {name!r}") from None

    def address(self, name) -> Tuple[str, int]:
        try:
            return self.nodes[name]
        except KeyError:
            raise ConfigError(f"unknown node {name!r}") from None

    @classmethod
    def from_json(cls, doc):
        try:
            nodes = {}
            for name, where in doc["nodes"].items():
                host, _, port = where.rpartition(":")
                nodes[name] = (host or "127.0.0.1", int(port))
            return cls(nodes, doc.get("root", next(iter(nodes), None)))
        except (KeyError, AttributeError, TypeError, ValueError) as e:
            raise ConfigError(f"malformed node config: {e}") from None

    @classmethod
    def load(cls, path):
        try:
            with open(path, encoding="utf-8") as fh:
                return cls.from_json(json.load(fh, object_pairs_hook=_unique_keys))
        except OSError as e:
            raise ConfigError(f"cannot read node config {path}: {e}") from None
        except json.JSONDecodeError as e:
            raise ConfigError(f"node config {path} is not JSON: {e}") from None

    def to_json(self):
        return {"nodes": {name: f"{host}:{port}" for name, (host, port) in self.nodes.items()},
                "root": self.root}

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=2)

    @classmethod
    def localhost(cls, names: Sequence[str], root: Optional[str] = None):
        """A config on free localhost ports."""
        nodes = {}
        for name in names:
            with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as s:
                s.bind(("127.0.0.1", 0))
                nodes[name] = ("127.0.0.1", s.getsockname()[1])
        return cls(nodes, root or names[0])


def resolve_placements(net: Net, cfg: NodeConfig) -> List[str]:
    """Node of every engine; unplaced engines go to the root."""
    placement = [e.placement if e.placement is not None else cfg.root for e in net.engines]
    missing = sorted(set(placement) - set(cfg.nodes))
    if missing:
        raise ConfigError(f"engines placed on unconfigured nodes {missing}")
    return placement


def scatter(f: GamNet, names: Sequence[str], seed=0) -> GamNet:
    """Place every engine on a node drawn at random from `names`."""
    rng = np.random.default_rng(seed)
    engines = tuple(e.placed(str(rng.choice(list(names)))) for e in f.net.engines)
    return replace(f, net=replace(f.net, engines=engines))


class _FrameServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, address, node):
        self.node = node
        super().__init__(address, _FrameHandler)


class _FrameHandler(socketserver.BaseRequestHandler):
    def handle(self):
        node = self.server.node
        while True:
            try:
                m = read_frame(self.request, node.name)
            except (ProtocolError, ConnectionLost, OSError) as e:
                node.logger.error(f"[{node.name}] dropping link: {e}")
                return
            if m is None:
                return
            # counted as work from arrival until handled
            node._begin()
            try:
                node._guard(node.on_frame, m)
            finally:
                node._end()


class NodeServer:
    def __init__(self, name: str, f: GamNet, cfg: NodeConfig, shuffle_seed=None,
                 max_workers=MAX_WORKERS):
        self.logger = logging.getLogger("NodeServer")
        self.name = name
        self.cfg = cfg
        self.gamnet = f
        self.net = f.net
        self.placement = resolve_placements(self.net, cfg)
        self.local = {i for i, node in enumerate(self.placement) if node == name}
        self.heaps = {i: {} for i in self.local}
        self.locks = {i: threading.Lock() for i in self.local}
        self.minter = NameMinter(cfg.node_tag(name))
        self.pool = ThreadPoolExecutor(max_workers=max_workers, thread_name_prefix=f"node-{name}")

        self._active = 0
        self._idle = threading.Condition()
        self._counter_lock = threading.Lock()
        self.sent = 0
        self.received = 0
        self.faults: List[Tuple[int, Fault]] = []
        self.faulted = threading.Event()
        self.errors: List[Exception] = []

        self._links: Dict[str, socket.socket] = {}
        self._link_lock = threading.Lock()
        self._rng = np.random.default_rng(shuffle_seed) if shuffle_seed is not None else None
        self._rng_lock = threading.Lock()

        self.stopped = threading.Event()
        self.inbox = queue.Queue()      # control replies, root only
        self.outputs = queue.Queue()    # external outputs of the net, root only
        self._server = None
        self._closed = False

    # lifecycle

    def start(self) -> "NodeServer":
        try:
            self._server = _FrameServer(self.cfg.address(self.name), self)
        except OSError as e:
            raise ConfigError(f"node {self.name} cannot bind {self.cfg.address(self.name)}: {e}") from None
        threading.Thread(target=self._server.serve_forever, daemon=True,
                         name=f"serve-{self.name}").start()
        self.logger.info(f"[{self.name}] serving {len(self.local)} engines on {self.cfg.address(self.name)}")
        return self

    def serve_until_shutdown(self):
        self.start()
        try:
            self.stopped.wait()
        finally:
            self.close()

    def close(self):
        if self._closed:
            return
        self._closed = True
        if self._server is not None:
            self._server.shutdown()
            self._server.server_close()
        with self._link_lock:
            for sock in self._links.values():
                try:
                    sock.close()
                except OSError:
                    pass
            self._links.clear()
        self.pool.shutdown(wait=False)
        self.logger.info(f"[{self.name}] stopped (sent {self.sent}, received {self.received})")

    # transport

    def send(self, node: str, m: Message):
        with self._link_lock:
            sock = self._links.get(node)
            try:
                if sock is None:
                    sock = socket.create_connection(self.cfg.address(node), timeout=SOCKET_TIMEOUT)
                    self._links[node] = sock
                sock.sendall(encode_frame(m))
            except OSError as e:
                self._links.pop(node, None)
                raise ConnectionLost(node, str(e)) from None
        if not is_control(m):
            with self._counter_lock:
                self.sent += 1

    def to_root(self, m: Message):
        if self.name == self.cfg.root:
            self.inbox.put(m)
        else:
            self.send(self.cfg.root, m)

    def on_frame(self, m: Message):
        if is_control(m):
            self._on_control(m)
            return
        with self._counter_lock:
            self.received += 1
        if self._rng is None:
            self.route(m)
            return
        with self._rng_lock:
            delay = float(self._rng.uniform(0.0, 0.005))
        self._begin()
        self.pool.submit(self._delayed, m, delay)

    def _delayed(self, m, delay):
        try:
            time.sleep(delay)
            self._guard(self.route, m)
        finally:
            self._end()

    def _on_control(self, m: Message):
        if m.port == SHUTDOWN:
            self.logger.info(f"[{self.name}] shutdown requested")
            self.stopped.set()
        elif m.port == AUDIT_REQUEST:
            self.pool.submit(self._guard, self.report_audit)
        else:
            if m.port == FAULT_REPORT:
                self.faulted.set()
            self.inbox.put(m)

    # execution

    def route(self, m: Message):
        """Hand a message to the engine owning its port, wherever it is."""
        index = self.net.owner.get(m.port)
        if index is None:
            if m.port not in self.net.external:
                raise RoutingError(f"message to unknown port {m.port:#x}")
            if self.name == self.cfg.root:
                self.outputs.put(m)
            else:
                self.send(self.cfg.root, m)
        elif index in self.local:
            engine = self.net.engines[index]
            self._spawn(index, Thread(engine.port_map[m.port], pad_registers(m.payload)))
        else:
            self.send(self.placement[index], m)

    def _begin(self):
        with self._idle:
            self._active += 1

    def _end(self):
        with self._idle:
            self._active -= 1
            self._idle.notify_all()

    def _spawn(self, index, thread: Thread):
        self._begin()
        self.pool.submit(self._run, index, thread)

    def _guard(self, fn, *args):
        try:
            fn(*args)
        except Exception as e:
            self.errors.append(e)
            self.logger.error(f"[{self.name}] {type(e).__name__}: {e}")

    def _run(self, index, thread: Optional[Thread]):
        engine = self.net.engines[index]
        try:
            while thread is not None:
                with self.locks[index]:
                    outcome = execute(thread, self.heaps[index], engine, self.net.chi, self.minter)
                for spawned in outcome.spawned:
                    self._spawn(index, spawned)
                if outcome.output is not None:
                    self.route(outcome.output)
                if outcome.fault is not None:
                    self._fault(index, outcome.fault)
                thread = outcome.thread
        except Exception as e:
            self.errors.append(e)
            self.logger.error(f"[{self.name}] engine {engine.label}#{index}: {type(e).__name__}: {e}")
        finally:
            self._end()

    def _fault(self, index, fault: Fault):
        self.logger.warning(f"[{self.name}] {fault.kind} in engine {index}: {fault.detail}")
        self.faults.append((index, fault))
        self.faulted.set()
        self.to_root(control(FAULT_REPORT, index))

    def idle(self):
        with self._idle:
            return self._active == 0

    def wait_idle(self, timeout=SOCKET_TIMEOUT):
        with self._idle:
            return self._idle.wait_for(lambda: self._active == 0, timeout=timeout)

    def report_audit(self):
        self.wait_idle()
        for index in sorted(self.local):
            self.to_root(control(AUDIT_REPLY, index, len(self.heaps[index]), 0))
        with self._counter_lock:
            sent, received = self.sent, self.received
        self.to_root(control(AUDIT_DONE, self.cfg.node_tag(self.name), sent, received))

    # root side

    def gather_audit(self, timeout=SOCKET_TIMEOUT):
        """Heap cells of every engine on every node, plus frame totals and remote faults."""
        for node in self.cfg.nodes:
            if node != self.name:
                self.send(node, control(AUDIT_REQUEST))
        self.pool.submit(self._guard, self.report_audit)
        cells = {}
        done = set()
        remote_faults = []
        sent = received = 0
        deadline = time.monotonic() + timeout
        while len(done) < len(self.cfg.nodes):
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                self.logger.warning(f"audit incomplete: {len(done)}/{len(self.cfg.nodes)} nodes replied")
                break
            try:
                m = self.inbox.get(timeout=remaining)
            except queue.Empty:
                continue
            values = [d.value if d is not None else None for d in m.payload]
            if m.port == AUDIT_REPLY:
                cells[values[0]] = values[1]
            elif m.port == AUDIT_DONE:
                done.add(values[0])
                sent += values[1]
                received += values[2]
            elif m.port == FAULT_REPORT and self.placement[values[0]] != self.name:
                remote_faults.append(values[0])
        rows = [(i, e.label, self.placement[i], cells.get(i, 0))
                for i, e in enumerate(self.net.engines)]
        return HeapAudit(rows), remote_faults, sent, received


@dataclass
class DistributedResult(RunResult):
    frames_sent: int = 0
    frames_received: int = 0
    nodes: Dict[str, int] = field(default_factory=dict)


def _stalled_by_fault(servers) -> bool:
    """A node faulted and every node is idle with no frame in flight."""
    servers = list(servers)
    if not any(s.faulted.is_set() for s in servers):
        return False
    if not all(s.idle() for s in servers):
        return False
    return sum(s.sent for s in servers) == sum(s.received for s in servers)


def run_distributed(f: GamNet, cfg: NodeConfig, timeout=RUN_TIMEOUT, spawn_local=True,
                    shuffle_seed=None) -> DistributedResult:
    """
    Run a closed GAM net across the nodes of `cfg`.

    With `spawn_local` every node is served from this process; otherwise
    only the root is, and the other nodes must already be serving. A fault
    that leaves every in-process node idle ends a local run early; remote
    nodes cannot be observed, so such runs wait for the timeout.
    """
    if len(f.source):
        raise InterfaceError("only closed nets can be run; supply the context first")
    placement = resolve_placements(f.net, cfg)
    initials = [p for p in f.target.ports() if p in f.target.initials]
    question = root_question(initials[0])

    names = list(cfg.nodes) if spawn_local else [cfg.root]
    servers = {}
    try:
        for name in names:
            servers[name] = NodeServer(name, f, cfg, shuffle_seed=shuffle_seed).start()
        root = servers[cfg.root]
        logging.info(f"running {len(f.net.engines)} engines on {len(cfg.nodes)} nodes")
        trace = [Move(Polarity.O, question)]
        root.route(Message(f.net.chi[question.port], question.payload))
        answer = None
        deadline = time.monotonic() + timeout
        while answer is None and not root.errors:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                logging.warning(f"no answer within {timeout}s")
                break
            if spawn_local and _stalled_by_fault(servers.values()) and root.outputs.empty():
                logging.warning("run stopped by a fault before any answer")
                break
            try:
                m = root.outputs.get(timeout=min(remaining, 0.5))
            except queue.Empty:
                continue
            trace.append(Move(Polarity.P, m))
            if answers_question(question, m):
                answer = m
        for error in root.errors:
            if isinstance(error, ConnectionLost):
                raise error
        audit, remote_faults, sent, received = root.gather_audit()
        faults = [fault for server in servers.values() for _, fault in server.faults]
        if not spawn_local:
            faults.extend(Fault("Remote", f"engine {i}", None) for i in remote_faults)
        per_node = {node: placement.count(node) for node in cfg.nodes}
        return DistributedResult(answer, tuple(trace), audit, faults, answer is None, 0,
                                 frozenset({answer}) if answer else frozenset(),
                                 frames_sent=sent, frames_received=received, nodes=per_node)
    finally:
        root = servers.get(cfg.root)
        if root is not None:
            for node in cfg.nodes:
                if node != cfg.root:
                    try:
                        root.send(node, control(SHUTDOWN))
                    except ConnectionLost as e:
                        logging.debug(f"shutdown not delivered: {e}")
        for server in servers.values():
            server.close()


def serve_node(name: str, f: GamNet, cfg: NodeConfig, shuffle_seed=None):
    """Host the engines placed on `name` until the root says stop."""
    NodeServer(name, f, cfg, shuffle_seed=shuffle_seed).serve_until_shutdown()
