import sys
import textwrap

import numpy as np
import pytest

from exposcan.embeddings import BridgeProvider, Role
from exposcan.errors import DimensionMismatch, ProviderUnavailable

STUB = textwrap.dedent("""
    import json, sys
    dim = int(sys.argv[1]) if len(sys.argv) > 1 else 8
    answer_dim = int(sys.argv[2]) if len(sys.argv) > 2 else dim
    mode = sys.argv[3] if len(sys.argv) > 3 else "ok"
    print(json.dumps({"provider": "stub", "dim": dim}), flush=True)
    for line in sys.stdin:
        req = json.loads(line)
        if mode == "error":
            print(json.dumps({"id": req["id"], "error": "nope"}), flush=True)
            continue
        if mode == "wrong-id":
            print(json.dumps({"id": "bogus", "vector": [0.0] * answer_dim}),
                  flush=True)
            continue
        seedv = float(sum(ord(c) for c in req["text"]) % 97) / 97.0
        vec = [round(seedv + i * 0.001, 6) for i in range(answer_dim)]
        print(json.dumps({"id": req["id"], "vector": vec}), flush=True)
""")


def _stub_command(*args) -> str:
    quoted = STUB.replace('"', '\\"')
    extra = " ".join(str(a) for a in args)
    return f'{sys.executable} -c "{quoted}" {extra}'.strip()


def test_bridge_handshake_and_embedding():
    with BridgeProvider(command=_stub_command(8)) as bridge:
        assert bridge.descriptor.id == "stub"
        assert bridge.descriptor.dim == 8
        assert bridge.descriptor.transport == "external-bridge"
        a = bridge.embed("password", Role.NAME)
        b = bridge.embed("password", Role.NAME)
        assert a.shape == (8,)
        assert np.array_equal(a, b)
        assert np.all(np.isfinite(a))


def test_bridge_dimension_mismatch():
    with BridgeProvider(command=_stub_command(8, 3)) as bridge:
        with pytest.raises(DimensionMismatch):
            bridge.embed("x", Role.NAME)


def test_bridge_error_response():
    with BridgeProvider(command=_stub_command(8, 8, "error")) as bridge:
        with pytest.raises(ProviderUnavailable):
            bridge.embed("x", Role.CONTEXT)


def test_bridge_id_mismatch():
    with BridgeProvider(command=_stub_command(8, 8, "wrong-id")) as bridge:
        with pytest.raises(ProviderUnavailable):
            bridge.embed("x", Role.NAME)


def test_bridge_spawn_failure():
    with pytest.raises(ProviderUnavailable):
        BridgeProvider(command="/no/such/binary --flag")
