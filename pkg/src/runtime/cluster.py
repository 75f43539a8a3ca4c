import os
import sys
import time
import socket
import logging
import subprocess
import atexit

from tqdm import tqdm

from src.config import BASE_DIR, STARTUP_TIMEOUT
from src.errors import ConfigError
from src.runtime.node import NodeConfig


class ClusterManager:
    """
    Manages the lifecycle of local worker processes (`main.py serve`), one
    per non-root node of a config.
    """
    def __init__(self, config_path, ir_path, shuffle_seed=None):
        self.config_path = config_path
        self.ir_path = ir_path
        self.shuffle_seed = shuffle_seed
        self.cfg = NodeConfig.load(config_path)
        self.processes = {}
        self.logger = logging.getLogger("ClusterManager")
        self.entry_point = os.path.join(BASE_DIR, "main.py")

        # Register cleanup
        atexit.register(self.stop)

    def workers(self):
        return [name for name in self.cfg.nodes if name != self.cfg.root]

    def _is_port_open(self, name):
        """Check if the node's port is listening."""
        host, port = self.cfg.address(name)
        with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as s:
            return s.connect_ex((host, port)) == 0

    def start(self):
        """Start one worker per non-root node and wait until all listen."""
        for name in self.workers():
            if self._is_port_open(name):
                self.logger.error(f"Port of node {name} is occupied by an unknown service.")
                raise ConfigError(f"port of node {name} already in use")

        for name in self.workers():
            command = [sys.executable, self.entry_point, "serve", "--node", name,
                       "--config", self.config_path, "--ir", self.ir_path]
            if self.shuffle_seed is not None:
                command += ["--shuffle-seed", str(self.shuffle_seed)]
            self.logger.info(f"Starting worker {name}...")
            self.processes[name] = subprocess.Popen(
                command,
                cwd=BASE_DIR,
                stdout=subprocess.DEVNULL,
                stderr=subprocess.DEVNULL,
            )

        # Wait for startup
        pending = set(self.workers())
        start_time = time.time()
        with tqdm(total=len(pending), desc="Starting workers", disable=len(pending) < 2) as bar:
            while pending and time.time() - start_time < STARTUP_TIMEOUT:
                for name in sorted(pending):
                    if self.processes[name].poll() is not None:
                        self.stop()
                        raise ConfigError(f"worker {name} exited during start-up")
                    if self._is_port_open(name):
                        pending.discard(name)
                        bar.update(1)
                time.sleep(0.1)

        if pending:
            self.stop()
            self.logger.error(f"Timed out waiting for workers {sorted(pending)}.")
            raise ConfigError(f"workers {sorted(pending)} did not start")
        self.logger.info(f"{len(self.processes)} workers started.")
        return True

    def stop(self):
        """Stop every worker we started."""
        for name, process in list(self.processes.items()):
            try:
                process.terminate()
                process.wait(timeout=5)
            except subprocess.TimeoutExpired:
                process.kill()
            except Exception as e:
                self.logger.error(f"Error stopping worker {name}: {e}")
        self.processes.clear()

    def __enter__(self):
        self.start()
        return self

    def __exit__(self, *exc):
        self.stop()
