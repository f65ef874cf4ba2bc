import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from brightlink.core import (
    MAX_SAFE_DEPTH,
    Color,
    ModulationParams,
    SymbolSeries,
    as_bits,
    bits_to_symbols,
    level_table,
    quantize_unit,
    symbol_to_level,
    symbols_to_bits,
    to_unit,
    validate_frame,
    validate_frames,
)


def test_color_parse():
    assert Color.parse("red") is Color.RED
    assert Color.parse(" Blue ") is Color.BLUE
    assert Color.GREEN == 1
    with pytest.raises(ValueError, match="unknown color"):
        Color.parse("cyan")


class TestModulationParams:
    def test_defaults_give_paper_demo_rates(self):
        params = ModulationParams()
        assert params.bits_per_symbol == 1
        assert params.symbol_rate == 5.0
        assert params.bit_rate == 5.0

    def test_bit_rate_scales_with_alphabet(self):
        assert ModulationParams(m=4).bit_rate == 10.0
        assert ModulationParams(m=8).bit_rate == 15.0
        assert ModulationParams(m=2, symbol_duration_frames=3).bit_rate == 10.0

    @pytest.mark.parametrize("m", [0, 1, 3, 5, 6, 7, 12])
    def test_rejects_non_power_of_two_alphabet(self, m):
        with pytest.raises(ValueError, match="power of two"):
            ModulationParams(m=m)

    def test_rejects_visible_depth_without_override(self):
        with pytest.raises(ValueError, match="imperceptibility"):
            ModulationParams(depth=MAX_SAFE_DEPTH + 0.01)
        params = ModulationParams(depth=0.2, allow_visible_depth=True)
        assert params.depth == 0.2

    @pytest.mark.parametrize("kwargs", [
        dict(depth=0.0),
        dict(depth=-0.01),
        dict(depth=float("nan")),
        dict(symbol_duration_frames=0),
        dict(frame_rate=0.0),
        dict(frame_rate=float("inf")),
    ])
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValueError):
            ModulationParams(**kwargs)


def test_as_bits_accepts_strings_lists_arrays():
    expected = np.array([1, 0, 1, 1], dtype=np.uint8)
    assert np.array_equal(as_bits("1011"), expected)
    assert np.array_equal(as_bits([1, 0, 1, 1]), expected)
    assert np.array_equal(as_bits(expected), expected)
    assert as_bits("").size == 0


@pytest.mark.parametrize("bad", ["102", "abc", [0, 2], [[1, 0]], [-1]])
def test_as_bits_rejects_non_bits(bad):
    with pytest.raises(ValueError):
        as_bits(bad)


def test_bits_to_symbols_groups_msb_first():
    m4 = ModulationParams(m=4)
    assert np.array_equal(bits_to_symbols("1011", m4), [2, 3])
    m16 = ModulationParams(m=16)
    assert np.array_equal(bits_to_symbols("1011", m16), [11])


def test_bits_to_symbols_pads_tail_with_zeros():
    m4 = ModulationParams(m=4)
    # 5 bits at 2 bits per symbol: the last symbol reads 1 then a pad 0.
    assert np.array_equal(bits_to_symbols("10111", m4), [2, 3, 2])
    assert bits_to_symbols("", m4).size == 0


def test_symbols_to_bits_rejects_out_of_range():
    params = ModulationParams(m=4)
    with pytest.raises(ValueError, match="symbol indices"):
        symbols_to_bits([0, 4], params)
    with pytest.raises(ValueError, match="symbol indices"):
        symbols_to_bits([-1], params)


def _all_bitstreams(max_len):
    for n in range(max_len + 1):
        for value in range(1 << n):
            yield np.array([(value >> (n - 1 - i)) & 1 for i in range(n)],
                           dtype=np.uint8)


@pytest.mark.parametrize("m", [2, 4, 8])
def test_bit_symbol_round_trip_exhaustive(m):
    # Every bitstream up to 12 bits survives the round trip (modulo tail padding).
    params = ModulationParams(m=m)
    k = params.bits_per_symbol
    for bits in _all_bitstreams(12):
        back = symbols_to_bits(bits_to_symbols(bits, params), params)
        pad = (-bits.size) % k
        padded = np.concatenate([bits, np.zeros(pad, dtype=np.uint8)])
        assert np.array_equal(back, padded)


@given(bits=st.lists(st.integers(0, 1), max_size=300),
       m_exp=st.integers(1, 5))
def test_bit_symbol_round_trip_property(bits, m_exp):
    params = ModulationParams(m=2**m_exp)
    arr = np.array(bits, dtype=np.uint8)
    symbols = bits_to_symbols(arr, params)
    back = symbols_to_bits(symbols, params)
    assert back.size % params.bits_per_symbol == 0
    assert np.array_equal(back[:arr.size], arr)
    assert not back[arr.size:].any()


def test_symbol_levels_are_evenly_spaced_within_depth():
    m4 = ModulationParams(m=4, depth=0.03)
    levels = [symbol_to_level(i, m4) for i in range(4)]
    assert levels == [1.0, 1.01, 1.02, 1.03]
    assert np.allclose(level_table(m4), levels)
    ook = ModulationParams(m=2, depth=0.03)
    assert symbol_to_level(0, ook) == 1.0
    assert symbol_to_level(1, ook) == 1.03


def test_symbol_to_level_rejects_out_of_range():
    params = ModulationParams(m=2)
    with pytest.raises(ValueError, match="out of range"):
        symbol_to_level(2, params)
    with pytest.raises(ValueError, match="out of range"):
        symbol_to_level(-1, params)


class TestFrameValidation:
    def test_accepts_uint8_and_unit_floats(self):
        u8 = np.zeros((4, 6, 3), dtype=np.uint8)
        assert validate_frame(u8) is not None
        unit = np.full((4, 6, 3), 0.25)
        assert validate_frame(unit) is not None
        assert validate_frames(np.stack([u8, u8])) is not None

    @pytest.mark.parametrize("bad", [
        np.zeros((4, 6), dtype=np.uint8),
        np.zeros((4, 6, 4), dtype=np.uint8),
        np.zeros((0, 6, 3), dtype=np.uint8),
        np.zeros((4, 6, 3), dtype=np.int32),
        np.full((4, 6, 3), 1.5),
        np.full((4, 6, 3), -0.1),
        np.full((4, 6, 3), float("nan")),
    ])
    def test_rejects_bad_frames(self, bad):
        with pytest.raises(ValueError):
            validate_frame(bad)

    def test_rejects_bad_sequences(self):
        with pytest.raises(ValueError):
            validate_frames(np.zeros((4, 6, 3), dtype=np.uint8))
        with pytest.raises(ValueError):
            validate_frames(np.zeros((0, 4, 6, 3), dtype=np.uint8))


def test_to_unit_scales_uint8():
    frame = np.array([[[0, 128, 255]]], dtype=np.uint8)
    unit = to_unit(frame)
    assert np.allclose(unit, [[[0.0, 128 / 255, 1.0]]])
    passthrough = np.full((1, 1, 3), 0.5)
    assert to_unit(passthrough).dtype == np.float64


class TestQuantizeUnit:
    def test_rounds_half_up_at_8_bits(self):
        values = np.array([[[0.0, 127.5 / 255, 1.0]]])
        out = quantize_unit(values, 8)
        assert out.dtype == np.uint8
        assert out.tolist() == [[[0, 128, 255]]]

    def test_sixteen_bit_grid_is_float(self):
        out = quantize_unit(np.full((1, 1, 3), 1 / 3), 16)
        assert out.dtype == np.float32
        assert np.allclose(out * 65535, np.round(out * 65535), atol=1e-3)

    def test_one_bit_snaps_to_extremes(self):
        out = quantize_unit(np.array([0.2, 0.5, 0.9]), 1)
        assert out.tolist() == [0.0, 1.0, 1.0]

    def test_rejects_bad_bit_depths(self):
        for bits in (0, 31, -1):
            with pytest.raises(ValueError, match="quantizer bits"):
                quantize_unit(np.zeros(1), bits)


def test_symbol_series_validation():
    series = SymbolSeries(np.array([0.1, 0.2]), sample_rate=30.0)
    assert len(series) == 2
    with pytest.raises(ValueError, match="finite"):
        SymbolSeries(np.array([0.1, float("nan")]), sample_rate=30.0)
    with pytest.raises(ValueError, match="sample_rate"):
        SymbolSeries(np.array([0.1]), sample_rate=0.0)
    with pytest.raises(ValueError, match="one-dimensional"):
        SymbolSeries(np.zeros((2, 2)), sample_rate=1.0)
