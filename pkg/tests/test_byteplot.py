"""Byte-plot layout, width policy, resize formulas, PNG IO, entropy."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from packscope.byteplot import (
    BILINEAR,
    MAX_INPUT_BYTES,
    NEAREST,
    WidthPolicy,
    bytes_to_image,
    export_png,
    import_png,
    resize_image,
    shannon_entropy,
)
from packscope.errors import (
    EmptyInputError,
    FormatError,
    InputTooLargeError,
    InvalidParamsError,
)


class TestWidthPolicy:
    @pytest.mark.parametrize(
        "size,width",
        [
            (1, 32),
            (10 * 1024 - 1, 32),
            (10 * 1024, 64),
            (30 * 1024 - 1, 64),
            (30 * 1024, 128),
            (50_000, 128),
            (60 * 1024, 256),
            (100 * 1024, 384),
            (200 * 1024, 512),
            (500 * 1024, 768),
            (1024 * 1024 - 1, 768),
            (1024 * 1024, 1024),
            (50 * 1024 * 1024, 1024),
        ],
    )
    def test_adaptive_table(self, size, width):
        assert WidthPolicy.adaptive().width_for(size) == width

    def test_fixed(self):
        assert WidthPolicy.fixed(77).width_for(123456) == 77

    def test_parse(self):
        assert WidthPolicy.parse("adaptive").mode == "adaptive"
        p = WidthPolicy.parse("fixed:256")
        assert (p.mode, p.width) == ("fixed", 256)
        with pytest.raises(InvalidParamsError):
            WidthPolicy.parse("fixed:nope")
        with pytest.raises(InvalidParamsError):
            WidthPolicy.parse("auto")
        with pytest.raises(InvalidParamsError):
            WidthPolicy.fixed(0)


class TestBytesToImage:
    def test_row_major_layout_and_padding(self):
        img = bytes_to_image(bytes(range(10)), WidthPolicy.fixed(4))
        assert (img.width, img.height, img.source_len) == (4, 3, 10)
        assert img.pixels.tolist() == [[0, 1, 2, 3], [4, 5, 6, 7], [8, 9, 0, 0]]

    def test_exact_fit_no_padding(self):
        img = bytes_to_image(bytes(range(8)), WidthPolicy.fixed(4))
        assert img.height == 2
        assert img.tobytes() == bytes(range(8))

    def test_source_bytes_strips_padding(self):
        data = b"hello world"
        img = bytes_to_image(data, WidthPolicy.fixed(4))
        assert img.source_bytes() == data

    def test_empty_raises(self):
        with pytest.raises(EmptyInputError):
            bytes_to_image(b"", WidthPolicy.adaptive())

    def test_oversize_raises(self):
        class FakeLen(bytes):
            def __len__(self):
                return MAX_INPUT_BYTES + 1

        with pytest.raises(InputTooLargeError):
            bytes_to_image(FakeLen(b"x"), WidthPolicy.adaptive())

    def test_pixels_read_only(self):
        img = bytes_to_image(b"abcd", WidthPolicy.fixed(2))
        with pytest.raises(ValueError):
            img.pixels[0, 0] = 1

    @given(data=st.binary(min_size=1, max_size=4096), width=st.integers(1, 64))
    @settings(max_examples=50, deadline=None)
    def test_roundtrip_property(self, data, width):
        img = bytes_to_image(data, WidthPolicy.fixed(width))
        assert img.source_bytes() == data
        assert img.width * img.height - len(data) < width


class TestResize:
    def test_bilinear_golden_ramp(self):
        # 4x4 ramp of (r*4+c)*17; sample coords 0.5/2.5 blend 4 neighbors
        data = bytes(bytearray((r * 4 + c) * 17 for r in range(4) for c in range(4)))
        img = bytes_to_image(data, WidthPolicy.fixed(4))
        out = resize_image(img, 2, 2, BILINEAR)
        assert out.pixels.tolist() == [[43, 77], [179, 213]]

    def test_nearest_exact_half_rounds_down(self):
        # 2x2 -> 1x1: source coordinate 0.5 resolves to index 0
        img = bytes_to_image(bytes([0, 0, 255, 255]), WidthPolicy.fixed(2))
        assert resize_image(img, 1, 1, NEAREST).pixels.tolist() == [[0]]

    def test_identity_resize_is_noop(self):
        img = bytes_to_image(bytes(range(16)), WidthPolicy.fixed(4))
        for method in (NEAREST, BILINEAR):
            out = resize_image(img, 4, 4, method)
            assert np.array_equal(out.pixels, img.pixels)

    def test_upscale_constant_stays_constant(self):
        img = bytes_to_image(bytes([9] * 16), WidthPolicy.fixed(4))
        for method in (NEAREST, BILINEAR):
            out = resize_image(img, 64, 64, method)
            assert (np.asarray(out.pixels) == 9).all()

    def test_bad_params(self):
        img = bytes_to_image(b"abcd", WidthPolicy.fixed(2))
        with pytest.raises(InvalidParamsError):
            resize_image(img, 0, 4)
        with pytest.raises(InvalidParamsError):
            resize_image(img, 4, 4, "bicubic")

    @given(
        data=st.binary(min_size=4, max_size=256),
        tw=st.integers(1, 32),
        th=st.integers(1, 32),
    )
    @settings(max_examples=50, deadline=None)
    def test_nearest_output_values_come_from_source(self, data, tw, th):
        img = bytes_to_image(data, WidthPolicy.fixed(4))
        out = resize_image(img, tw, th, NEAREST)
        assert set(np.asarray(out.pixels).flatten().tolist()) <= set(
            np.asarray(img.pixels).flatten().tolist()
        )


class TestPng:
    def test_roundtrip_bit_exact(self, tmp_path):
        img = bytes_to_image(bytes(range(256)) * 4, WidthPolicy.fixed(32))
        path = tmp_path / "plot.png"
        export_png(img, path)
        back = import_png(path)
        assert back.width == img.width and back.height == img.height
        assert np.array_equal(back.pixels, img.pixels)

    def test_import_rejects_non_png(self, tmp_path):
        path = tmp_path / "fake.png"
        path.write_bytes(b"not a png at all")
        with pytest.raises((FormatError, OSError)):
            import_png(path)

    def test_import_rejects_rgb(self, tmp_path):
        from PIL import Image

        path = tmp_path / "rgb.png"
        Image.new("RGB", (4, 4), (10, 20, 30)).save(path)
        with pytest.raises(FormatError):
            import_png(path)


class TestEntropy:
    def test_uniform_is_8_bits(self):
        assert shannon_entropy(bytes(range(256)) * 16) == pytest.approx(8.0)

    def test_constant_is_zero(self):
        assert shannon_entropy(b"\x00" * 1000) == 0.0

    def test_two_symbol_is_one_bit(self):
        assert shannon_entropy(b"ab" * 500) == pytest.approx(1.0)

    def test_empty_raises(self):
        with pytest.raises(EmptyInputError):
            shannon_entropy(b"")
