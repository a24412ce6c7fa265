"""Name and context embeddings behind pluggable providers.

The default provider is a deterministic signed feature hasher over
subtokens: no model weights, no external processes, stable across runs and
platforms. Transformer-quality vectors come from an external bridge process
speaking line-delimited JSON (see BridgeProvider).
"""

from __future__ import annotations

import enum
import hashlib
import json
import re
import shlex
import socket
import subprocess
import threading
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, ProviderUnavailable

Vector = np.ndarray

DEFAULT_DIM = 384
DEFAULT_PROVIDER_ID = "hash-384"

_SUBTOKEN_RE = re.compile(r"[A-Z]+(?=[A-Z][a-z])|[A-Z]?[a-z]+|[A-Z]+|[0-9]+")


class Role(enum.Enum):
    NAME = "name"
    CONTEXT = "context"


@dataclass(frozen=True)
class ProviderDescriptor:
    id: str
    dim: int
    deterministic: bool
    transport: str  # "in-process" | "external-bridge"


def subtokenize(text: str) -> list[str]:
    """Split camelCase/underscored/digit-separated text into lowercase pieces.

    "dbPassword" -> ["db", "password"]; "API_KEY_2" -> ["api", "key", "2"].
    """
    return [m.group(0).lower() for m in _SUBTOKEN_RE.finditer(text)]


def _hash64(token: str, key: bytes) -> int:
    digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8, key=key).digest()
    return int.from_bytes(digest, "big")


_ROLE_KEYS = {
    Role.NAME: (b"exposcan-name-bucket", b"exposcan-name-sign"),
    Role.CONTEXT: (b"exposcan-ctx-bucket", b"exposcan-ctx-sign"),
}


class HashingProvider:
    """Signed bag-of-subtokens hashing into a fixed-dimension vector.

    Pure function of (text, role): safe to share across threads. Name and
    context roles hash with distinct keys so the same text maps to different
    vectors per role while keeping comparable norms.
    """

    def __init__(self, dim: int = DEFAULT_DIM, provider_id: str = DEFAULT_PROVIDER_ID):
        if dim <= 0:
            raise ValueError("dim must be positive")
        self.descriptor = ProviderDescriptor(provider_id, dim, True, "in-process")

    @property
    def dim(self) -> int:
        return self.descriptor.dim

    def embed(self, text: str, role: Role) -> Vector:
        bucket_key, sign_key = _ROLE_KEYS[role]
        vec = np.zeros(self.dim, dtype=np.float64)
        for token in subtokenize(text):
            bucket = _hash64(token, bucket_key) % self.dim
            sign = 1.0 if _hash64(token, sign_key) & 1 else -1.0
            vec[bucket] += sign
        norm = np.linalg.norm(vec)
        if norm > 0:
            vec /= norm
        return vec

    def close(self) -> None:
        pass


class BridgeProvider:
    """Client for an external embedding process.

    Protocol (line-delimited JSON): the server first emits a handshake
    {"provider": id, "dim": n}; each request {"id", "role", "text"} is
    answered by {"id", "vector"} or {"id", "error"}. Access is serialized
    per connection.
    """

    def __init__(self, command: str | None = None, address: str | None = None,
                 timeout: float = 60.0):
        self._lock = threading.Lock()
        self._counter = 0
        self._proc: subprocess.Popen | None = None
        self._sock: socket.socket | None = None
        try:
            if command:
                self._proc = subprocess.Popen(
                    shlex.split(command),
                    stdin=subprocess.PIPE,
                    stdout=subprocess.PIPE,
                    text=True,
                    bufsize=1,
                )
                self._reader = self._proc.stdout
                self._writer = self._proc.stdin
            elif address:
                host, _, port = address.rpartition(":")
                self._sock = socket.create_connection((host or "127.0.0.1", int(port)),
                                                      timeout=timeout)
                handle = self._sock.makefile("rw", encoding="utf-8", newline="\n")
                self._reader = handle
                self._writer = handle
            else:
                raise ProviderUnavailable("bridge needs a command or a TCP address")
        except (OSError, ValueError) as exc:
            raise ProviderUnavailable(f"cannot start bridge: {exc}") from None
        handshake = self._read_line()
        try:
            self.descriptor = ProviderDescriptor(
                str(handshake["provider"]), int(handshake["dim"]), False, "external-bridge"
            )
        except (KeyError, TypeError, ValueError):
            raise ProviderUnavailable(f"bad handshake: {handshake!r}") from None

    @property
    def dim(self) -> int:
        return self.descriptor.dim

    def _read_line(self) -> dict:
        line = self._reader.readline()
        if not line:
            raise ProviderUnavailable("bridge closed the connection")
        try:
            return json.loads(line)
        except json.JSONDecodeError as exc:
            raise ProviderUnavailable(f"bridge sent malformed JSON: {exc}") from None

    def embed(self, text: str, role: Role) -> Vector:
        with self._lock:
            self._counter += 1
            request_id = f"r{self._counter}"
            payload = json.dumps({"id": request_id, "role": role.value, "text": text})
            try:
                self._writer.write(payload + "\n")
                self._writer.flush()
            except (OSError, ValueError) as exc:
                raise ProviderUnavailable(f"bridge write failed: {exc}") from None
            response = self._read_line()
        if response.get("id") != request_id:
            raise ProviderUnavailable(
                f"bridge answered id {response.get('id')!r} for request {request_id!r}")
        if "error" in response:
            raise ProviderUnavailable(f"bridge error: {response['error']}")
        vec = np.asarray(response.get("vector", ()), dtype=np.float64)
        if vec.shape != (self.dim,):
            raise DimensionMismatch(
                f"bridge returned dim {vec.shape} but declared {self.dim}")
        if not np.all(np.isfinite(vec)):
            raise ProviderUnavailable("bridge returned non-finite values")
        return vec

    def close(self) -> None:
        if self._proc is not None:
            try:
                self._proc.stdin.close()
            except OSError:
                pass
            self._proc.terminate()
            try:
                self._proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._proc.kill()
            self._proc = None
        if self._sock is not None:
            self._sock.close()
            self._sock = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def combine(name_vec: Vector, ctx_vec: Vector) -> Vector:
    """Concatenate name and context embeddings (name first)."""
    name_vec = np.asarray(name_vec, dtype=np.float64)
    ctx_vec = np.asarray(ctx_vec, dtype=np.float64)
    if name_vec.ndim != 1 or ctx_vec.ndim != 1:
        raise DimensionMismatch("combine expects two 1-d vectors")
    return np.concatenate([name_vec, ctx_vec])


def get_provider(provider_id: str = DEFAULT_PROVIDER_ID, *,
                 bridge_command: str | None = None,
                 bridge_address: str | None = None):
    """Resolve a provider id to a live provider instance."""
    if provider_id in (DEFAULT_PROVIDER_ID, "default", "hash"):
        return HashingProvider()
    if provider_id == "bridge" or bridge_command or bridge_address:
        return BridgeProvider(command=bridge_command, address=bridge_address)
    raise ProviderUnavailable(f"unknown provider {provider_id!r}")
