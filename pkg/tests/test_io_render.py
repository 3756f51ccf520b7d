import numpy as np
import pytest

from scattersample.core import SampleIndexSet
from scattersample.io_render import (
    BOYNTON_PALETTE,
    MONOCHROME_GREY,
    RenderOptions,
    load_csv,
    load_indices,
    render_svg,
    save_csv,
    save_indices,
)

from conftest import make_dataset, mixture


class TestLoadCsv:
    def test_round_trip(self, tmp_path):
        ds = mixture(classes=3, n=200, seed=15)
        path = tmp_path / "data.csv"
        save_csv(path, ds)
        loaded = load_csv(path)
        assert np.allclose(loaded.points.xs, ds.points.xs, atol=1e-12)
        assert np.allclose(loaded.points.ys, ds.points.ys, atol=1e-12)
        assert np.array_equal(loaded.labels, ds.labels)

    def test_label_remap_first_appearance(self, tmp_path):
        path = tmp_path / "pets.csv"
        path.write_text("x,y,label\n0,0,cat\n1,0,dog\n0.5,1,cat\n")
        ds = load_csv(path)
        assert list(ds.labels) == [0, 1, 0]
        assert ds.n_classes == 2

    def test_missing_value_names_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("x,y,label\n0,0,a\n1,,a\n")
        with pytest.raises(ValueError, match=":3"):
            load_csv(path)

    def test_missing_column(self, tmp_path):
        path = tmp_path / "cols.csv"
        path.write_text("x,z,label\n0,0,a\n")
        with pytest.raises(ValueError, match="header"):
            load_csv(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(ValueError):
            load_csv(path)

    def test_header_only(self, tmp_path):
        path = tmp_path / "hdr.csv"
        path.write_text("x,y,label\n")
        with pytest.raises(ValueError, match="no data rows"):
            load_csv(path)

    def test_coordinates_are_normalized(self, tmp_path):
        path = tmp_path / "wide.csv"
        path.write_text("x,y,label\n-10,100,a\n30,300,b\n10,200,a\n")
        ds = load_csv(path)
        assert ds.points.xs.min() == 0.0 and ds.points.xs.max() == 1.0


class TestIndicesIO:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "idx.txt"
        s = SampleIndexSet.from_any_order([7, 1, 4])
        save_indices(path, s)
        assert path.read_text() == "1\n4\n7\n"
        loaded = load_indices(path, n=10)
        assert np.array_equal(loaded.indices, s.indices)


class TestRenderSvg:
    def test_empty_sample_valid_svg(self):
        ds = mixture(classes=3, n=50, seed=16)
        svg = render_svg(ds, SampleIndexSet(np.zeros(0, dtype=np.int64)))
        assert svg.startswith("<?xml")
        assert "<circle" not in svg
        assert "</svg>" in svg

    def test_default_radius_three(self):
        ds = mixture(classes=3, n=40, seed=16)
        svg = render_svg(ds)
        assert svg.count('r="3"') == 40

    def test_deterministic_per_seed(self):
        ds = mixture(classes=3, n=60, seed=17)
        opts = RenderOptions(draw_order_seed=5)
        assert render_svg(ds, None, opts) == render_svg(ds, None, opts)
        other = RenderOptions(draw_order_seed=6)
        assert render_svg(ds, None, opts) != render_svg(ds, None, other)

    def test_pixel_formula_and_inset(self):
        ds = make_dataset([0.0, 1.0, 0.5], [0.0, 1.0, 0.5], [0, 0, 0])
        svg = render_svg(ds, None, RenderOptions(canvas_px=300))
        # coordinate * (canvas - 2r) + r: 0 -> 3, 1 -> 297, 0.5 -> 150
        assert 'cx="3.000" cy="3.000"' in svg
        assert 'cx="297.000" cy="297.000"' in svg
        assert 'cx="150.000" cy="150.000"' in svg

    def test_monochrome_ignores_labels(self):
        ds = mixture(classes=3, n=30, seed=18)
        svg = render_svg(ds, None, RenderOptions(monochrome=True))
        assert svg.count(MONOCHROME_GREY) == 30
        for color in BOYNTON_PALETTE:
            assert color not in svg

    def test_palette_overflow_rejected(self):
        rng = np.random.default_rng(19)
        n = 40
        labels = np.arange(n) % 10  # 10 classes > 9 palette colors
        ds = make_dataset(rng.random(n), rng.random(n), labels)
        with pytest.raises(ValueError, match="palette"):
            render_svg(ds)
        render_svg(ds, None, RenderOptions(monochrome=True))  # mono is fine

    def test_canvas_must_fit_glyphs(self):
        with pytest.raises(ValueError):
            RenderOptions(canvas_px=4, point_radius_px=3)
