from __future__ import annotations

import pytest

from synthetic import make_transfer_fixture, write_fixture_tree


@pytest.fixture(scope="session")
def toy_fixture():
    """Small 3-class corpus for CLI and persistence tests."""
    return make_transfer_fixture(
        seed=11,
        dim=8,
        classes=("bug", "comment", "complaint"),
        n_anchor=20,
        n_content=8,
        n_neutral=12,
        n_train_a=12,
        n_train_b=6,
        n_dev=2,
        n_test_b=8,
    )


@pytest.fixture(scope="session")
def toy_tree(toy_fixture, tmp_path_factory):
    """On-disk embeddings/datasets/config for the toy corpus."""
    root = tmp_path_factory.mktemp("toy_tree")
    config = write_fixture_tree(toy_fixture, root)
    return root, config
