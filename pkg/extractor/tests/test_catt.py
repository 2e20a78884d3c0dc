"""Encoder validation plus format conformance against the consumer codec.

The conformance tests import the downstream package purely as the
format's reference implementation: its parser is the validator the
dumps must satisfy, and its writer defines the canonical bytes.
"""

import json
import math
import struct
import warnings

import numpy as np
import pytest

from cattbridge import BridgeValidationError, encode_dump

carve_attention = pytest.importorskip(
    "carve.attention", reason="consumer package needed as the format validator"
)

_PRE = struct.Struct("<4sIQ")


def tiny_dump(**overrides):
    grid = np.full((2, 2), 0.25)
    kwargs = dict(
        model_id="stub-uniform-448",
        prompt_kind="question",
        prompt_text="What is shown?",
        grid_h=2,
        grid_w=2,
        layers=[20, 21],
        steps=[0, 1],
        generated_tokens=["a", "b"],
        maps={(l, t): grid for l in (20, 21) for t in (0, 1)},
    )
    kwargs.update(overrides)
    return encode_dump(**kwargs)


class TestEncodeValidation:
    def test_layers_must_increase(self):
        with pytest.raises(BridgeValidationError, match="increasing"):
            tiny_dump(layers=[21, 20], maps={(l, t): np.full((2, 2), 0.25)
                                             for l in (20, 21) for t in (0, 1)})

    def test_steps_must_be_contiguous(self):
        with pytest.raises(BridgeValidationError, match="contiguous"):
            tiny_dump(steps=[0, 2], maps={(l, t): np.full((2, 2), 0.25)
                                          for l in (20, 21) for t in (0, 2)})

    def test_one_token_per_step(self):
        with pytest.raises(BridgeValidationError, match="one string per step"):
            tiny_dump(generated_tokens=["a"])

    def test_missing_map_rejected(self):
        maps = {(l, t): np.full((2, 2), 0.25) for l in (20, 21) for t in (0, 1)}
        del maps[(21, 1)]
        with pytest.raises(BridgeValidationError, match="missing attention map"):
            tiny_dump(maps=maps)

    def test_wrong_shape_rejected(self):
        maps = {(l, t): np.full((2, 2), 0.25) for l in (20, 21) for t in (0, 1)}
        maps[(20, 0)] = np.full((3, 2), 1.0 / 6)
        with pytest.raises(BridgeValidationError, match="shape"):
            tiny_dump(maps=maps)

    @pytest.mark.parametrize(
        "bad,msg",
        [
            (np.array([[np.nan, 0.5], [0.25, 0.25]]), "non-finite"),
            (np.array([[-0.1, 0.6], [0.25, 0.25]]), "negative"),
            (np.zeros((2, 2)), "all zero"),
        ],
    )
    def test_bad_weights_rejected(self, bad, msg):
        maps = {(l, t): np.full((2, 2), 0.25) for l in (20, 21) for t in (0, 1)}
        maps[(20, 0)] = bad
        with pytest.raises(BridgeValidationError, match=msg):
            tiny_dump(maps=maps)

    def test_bad_prompt_kind_rejected(self):
        with pytest.raises(BridgeValidationError, match="prompt_kind"):
            tiny_dump(prompt_kind="caption")


class TestFormatConformance:
    def test_parses_with_zero_warnings(self):
        data = tiny_dump()
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            stack = carve_attention.read_dump(data)
        assert caught == []
        assert stack.layers == (20, 21)
        assert stack.generated_tokens == ("a", "b")

    def test_unnormalized_maps_written_renormalized(self):
        # encoder renormalizes, so even a x5 map parses silently
        maps = {(l, t): np.full((2, 2), 1.25) for l in (20, 21) for t in (0, 1)}
        data = tiny_dump(maps=maps)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            stack = carve_attention.read_dump(data)
        assert caught == []
        np.testing.assert_array_equal(
            stack.map(20, 0).weights, np.full(4, 0.25, np.float32)
        )

    def test_bytes_match_consumer_writer_modulo_extra_key(self):
        """Dropping only the documented extra header key must reproduce
        the consumer writer's bytes exactly."""
        data = tiny_dump()
        magic, version, hlen = _PRE.unpack_from(data)
        header = json.loads(data[_PRE.size:_PRE.size + hlen])
        assert header.pop("head_aggregation") == "mean"
        head = json.dumps(header, sort_keys=True, separators=(",", ":")).encode()
        stripped = _PRE.pack(magic, version, len(head)) + head + data[_PRE.size + hlen:]
        assert stripped == carve_attention.write_dump(carve_attention.read_dump(data))

    def test_float32_payload_survives_roundtrip(self):
        grid = np.array([[0.7, 0.1], [0.1, 0.1]])
        maps = {(l, t): grid for l in (20, 21) for t in (0, 1)}
        data = tiny_dump(maps=maps)
        stack = carve_attention.read_dump(data)
        want = (grid / grid.sum()).astype(np.float32).ravel()
        np.testing.assert_array_equal(stack.map(21, 1).weights, want)

    def test_entropy_of_uniform_dump(self):
        data = tiny_dump()
        stack = carve_attention.read_dump(data)
        h = carve_attention.overall_entropy(stack, (20, 21))
        assert h == pytest.approx(math.log(4.0), abs=1e-6)
