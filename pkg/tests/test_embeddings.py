import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exposcan.embeddings import (
    DEFAULT_DIM,
    HashingProvider,
    Role,
    combine,
    get_provider,
    subtokenize,
)
from exposcan.errors import DimensionMismatch, ProviderUnavailable


def test_subtokenize_camel_case():
    assert subtokenize("dbPassword") == ["db", "password"]


def test_subtokenize_empty():
    assert subtokenize("") == []


def test_subtokenize_underscores_and_digits():
    assert subtokenize("API_KEY_2") == ["api", "key", "2"]


def test_subtokenize_acronym_boundary():
    assert subtokenize("HTMLParser") == ["html", "parser"]
    assert subtokenize("parseHTML") == ["parse", "html"]


def test_embed_empty_is_zero_vector():
    provider = HashingProvider()
    vec = provider.embed("", Role.NAME)
    assert vec.shape == (DEFAULT_DIM,)
    assert not vec.any()


def test_embed_deterministic():
    provider = HashingProvider()
    a = provider.embed("password", Role.NAME)
    b = provider.embed("password", Role.NAME)
    assert np.array_equal(a, b)


def test_roles_use_distinct_seeds():
    provider = HashingProvider()
    name = provider.embed("password", Role.NAME)
    ctx = provider.embed("password", Role.CONTEXT)
    assert not np.array_equal(name, ctx)
    assert abs(np.linalg.norm(name) - np.linalg.norm(ctx)) < 1e-9


@given(st.text(alphabet=st.characters(categories=("Ll", "Lu", "Nd")), min_size=1,
               max_size=40))
@settings(max_examples=80, deadline=None)
def test_nonzero_inputs_are_unit_norm(text):
    provider = HashingProvider()
    vec = provider.embed(text, Role.NAME)
    if subtokenize(text):
        assert abs(np.linalg.norm(vec) - 1.0) < 1e-6


def test_combine_concatenates():
    provider = HashingProvider()
    a = provider.embed("token", Role.NAME)
    b = provider.embed("ctx words", Role.CONTEXT)
    both = combine(a, b)
    assert both.shape == (2 * DEFAULT_DIM,)
    assert np.array_equal(both[:DEFAULT_DIM], a)
    assert np.array_equal(both[DEFAULT_DIM:], b)


def test_combine_with_zero_half():
    provider = HashingProvider()
    a = provider.embed("token", Role.NAME)
    zero = np.zeros(DEFAULT_DIM)
    both = combine(a, zero)
    assert np.array_equal(both[:DEFAULT_DIM], a)
    assert not both[DEFAULT_DIM:].any()


def test_combine_order_matters():
    provider = HashingProvider()
    a = provider.embed("alpha", Role.NAME)
    b = provider.embed("beta", Role.NAME)
    assert not np.array_equal(combine(a, b), combine(b, a))


def test_combine_rejects_matrices():
    with pytest.raises(DimensionMismatch):
        combine(np.zeros((2, 2)), np.zeros(4))


def test_hash_distribution_sanity():
    provider = HashingProvider()
    rng = np.random.default_rng(0)
    syllables = ["ac", "bel", "cor", "dun", "el", "fi", "gor", "hu", "in",
                 "jo", "kal", "lum", "mer", "nor", "ost", "pra"]
    mass = np.zeros(DEFAULT_DIM)
    total = 0
    for _ in range(10_000):
        name = "".join(rng.choice(syllables, size=3)) + str(rng.integers(100))
        for token in subtokenize(name):
            from exposcan.embeddings import _ROLE_KEYS, _hash64

            bucket = _hash64(token, _ROLE_KEYS[Role.NAME][0]) % DEFAULT_DIM
            mass[bucket] += 1
            total += 1
    assert mass.max() / total <= 0.05


def test_provider_registry():
    provider = get_provider("hash-384")
    assert provider.descriptor.deterministic
    assert provider.descriptor.dim == 384
    assert provider.descriptor.transport == "in-process"
    with pytest.raises(ProviderUnavailable):
        get_provider("no-such-provider")


def test_bridge_requires_endpoint():
    with pytest.raises(ProviderUnavailable):
        get_provider("bridge")
