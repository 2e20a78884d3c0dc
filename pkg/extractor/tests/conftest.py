"""Shared fixtures: a stub bridge, an on-disk image, and dump files."""

import numpy as np
import pytest
from PIL import Image

from cattbridge import StubVlm, extract_dump, write_dump_file


@pytest.fixture(scope="session")
def stub():
    return StubVlm()


@pytest.fixture(scope="session")
def image_pixels():
    rng = np.random.default_rng(20260816)
    return rng.integers(0, 256, (448, 448, 3), dtype=np.uint8)


@pytest.fixture(scope="session")
def corpus(tmp_path_factory, stub, image_pixels):
    """image.png plus a question/general dump pair, written once."""
    root = tmp_path_factory.mktemp("corpus")
    Image.fromarray(image_pixels).save(root / "image.png")
    write_dump_file(
        root / "q.catt",
        extract_dump(stub, image_pixels, "question", prompt="What is shown?"),
    )
    write_dump_file(root / "g.catt", extract_dump(stub, image_pixels, "general"))
    return root
