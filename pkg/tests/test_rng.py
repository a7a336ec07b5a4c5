import numpy as np
import pytest

from jumpform.rng import philox4x32, seed_key, uniforms


@pytest.mark.parametrize(
    "ctr, key, expected",
    [
        ([0, 0, 0, 0], [0, 0], [0x6627E8D5, 0xE169C58D, 0xBC57AC4C, 0x9B00DBD8]),
        ([0xFFFFFFFF] * 4, [0xFFFFFFFF] * 2, [0x408F276D, 0x41C83B0E, 0xA20BC7C6, 0x6D5451FD]),
        (
            [0x243F6A88, 0x85A308D3, 0x13198A2E, 0x03707344],
            [0xA4093822, 0x299F31D0],
            [0xD16CFE09, 0x94FDCCEB, 0x5001E420, 0x24126EA1],
        ),
    ],
)
def test_known_answers(ctr, key, expected):
    np.testing.assert_array_equal(philox4x32(ctr, key), np.array(expected, dtype=np.uint32))


def test_vectorised_matches_scalar():
    ctr = np.array([[1, 2, 3, 4], [5, 6, 7, 8], [0, 0, 9, 0]], dtype=np.uint32)
    key = np.array([11, 12], dtype=np.uint32)
    batch = philox4x32(ctr, key)
    for i in range(3):
        np.testing.assert_array_equal(batch[i], philox4x32(ctr[i], key))


def test_seed_key_split():
    np.testing.assert_array_equal(seed_key(0x0123456789ABCDEF), [0x89ABCDEF, 0x01234567])
    np.testing.assert_array_equal(seed_key(2**64 - 1), [0xFFFFFFFF, 0xFFFFFFFF])


def test_uniform_properties():
    u = uniforms(5, np.arange(200_000), 3)
    assert u.shape == (200_000, 2)
    assert u.min() > 0 and u.max() < 1
    assert abs(u.mean() - 0.5) < 3 * np.sqrt(1 / 12 / u.size)
    assert abs(np.corrcoef(u[:, 0], u[:, 1])[0, 1]) < 0.01


def test_streams_are_independent_of_batching():
    a = uniforms(9, np.arange(10), 4)
    b = uniforms(9, np.array([7, 3]), 4)
    np.testing.assert_array_equal(a[[7, 3]], b)
    assert not np.array_equal(uniforms(9, 3, 4), uniforms(10, 3, 4))
    assert not np.array_equal(uniforms(9, 3, 4), uniforms(9, 3, 5))
    assert not np.array_equal(uniforms(9, 3, 4), uniforms(9, 3, 4, lane=1))
