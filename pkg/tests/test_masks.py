import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from challenge_ranking import InputError, LabelMask, read_mask, write_mask
from challenge_ranking.masks import decode_mask, encode_mask


def test_two_dimensional_grid_is_promoted():
    m = LabelMask(np.ones((3, 4), dtype=bool))
    assert m.dims == (3, 4, 1)
    assert m.count == 12


def test_from_points_and_points_roundtrip():
    pts = [(0, 0, 0), (2, 1, 3)]
    m = LabelMask.from_points((3, 2, 4), pts, spacing=(1.0, 0.5, 2.0))
    assert sorted(map(tuple, m.points().tolist())) == pts
    assert m.spacing == (1.0, 0.5, 2.0)


@pytest.mark.parametrize("spacing", [(0, 1, 1), (1, -1, 1), (1, 1), (1, float("nan"), 1)])
def test_bad_spacing_rejected(spacing):
    with pytest.raises(InputError):
        LabelMask(np.zeros((2, 2, 2), dtype=bool), spacing)


def test_x_index_varies_fastest_on_disk():
    vox = np.zeros((3, 2, 1), dtype=bool)
    vox[1, 0, 0] = True
    body = encode_mask(LabelMask(vox)).split(b"\n", 1)[1]
    assert body == bytes([0, 1, 0, 0, 0, 0])


@given(
    arrays(bool, st.tuples(st.integers(1, 5), st.integers(1, 5), st.integers(1, 5))),
    st.tuples(*[st.sampled_from([0.5, 1.0, 1.25, 3.0])] * 3),
)
def test_container_roundtrip(vox, spacing):
    m = LabelMask(vox, spacing)
    assert decode_mask(encode_mask(m)) == m


def test_file_roundtrip_and_sibling_data(tmp_path):
    rng = np.random.default_rng(3)
    m = LabelMask(rng.random((4, 3, 2)) < 0.5, (0.7, 0.7, 2.5))
    write_mask(tmp_path / "a.mask", m)
    assert read_mask(tmp_path / "a.mask") == m

    body = encode_mask(m).split(b"\n", 1)[1]
    (tmp_path / "payload.bin").write_bytes(body)
    header = {"dims": [4, 3, 2], "spacing": [0.7, 0.7, 2.5], "encoding": "raw8", "data": "payload.bin"}
    (tmp_path / "b.mask").write_text(json.dumps(header) + "\n")
    assert read_mask(tmp_path / "b.mask") == m


@pytest.mark.parametrize(
    "blob",
    [
        b"not json\n",
        b'{"dims": [2, 2, 2], "spacing": [1, 1, 1], "encoding": "zip"}\n' + bytes(8),
        b'{"dims": [2, 2], "spacing": [1, 1, 1], "encoding": "raw8"}\n' + bytes(4),
        b'{"dims": [2, 2, 2], "spacing": [1, 1, 1], "encoding": "raw8"}\n' + bytes(7),
        b'{"dims": [2, 2, 2], "spacing": [1, 1, 1], "encoding": "raw8", "data": "x.bin"}\n',
    ],
)
def test_malformed_containers(blob):
    with pytest.raises(InputError):
        decode_mask(blob)
