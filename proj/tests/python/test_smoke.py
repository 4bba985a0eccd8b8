"""Smoke tests for the docrebench python bindings."""

import html.parser
import random
import unicodedata

import pytest

import docrebench as dr


def test_version():
    assert dr.__version__


def test_geometry():
    square = [0, 0, 1, 0, 1, 1, 0, 1]
    assert dr.polygon_area(square) == pytest.approx(1.0)
    assert dr.polygon_iou(square, square) == 1.0
    shifted = [0.5, 0, 1.5, 0, 1.5, 1, 0.5, 1]
    assert dr.polygon_iou(square, shifted) == pytest.approx(1 / 3)
    assert dr.bbox_of([0, 0, 2, 0, 0, 2]) == (0.0, 0.0, 2.0, 2.0)
    with pytest.raises(dr.DocrebenchError):
        dr.polygon_area([0, 0, 1, 1])  # two points


def test_text_metrics():
    assert dr.edit_distance("kitten", "sitting") == 3
    assert dr.cer("ab", "abcd") == pytest.approx(1.0)
    assert dr.wer("a b c", "a x c") == pytest.approx(1 / 3)
    assert dr.wer("a", "a b c") == pytest.approx(2.0)
    assert dr.f_measure(1, 1) == 1.0


def test_nfc_against_unicodedata():
    rng = random.Random(2024)
    pools = [
        (0x20, 0x7E),
        (0x00C0, 0x024F),
        (0x0300, 0x036F),
        (0x0980, 0x09FF),
        (0xAC00, 0xD7A3),
    ]
    for _ in range(300):
        chars = []
        for _ in range(rng.randint(0, 20)):
            lo, hi = rng.choice(pools)
            chars.append(chr(rng.randint(lo, hi)))
        s = "".join(chars)
        assert dr.nfc(s) == unicodedata.normalize("NFC", s)


def test_synth_evaluate_cycle(tmp_path):
    spec = dr.SynthSpec()
    spec.seed = 5
    spec.regions = 3
    gt = dr.generate_document(spec)
    assert gt.n_words > 0
    assert dr.validate_document(gt) == []

    p = dr.PerturbationSpec()
    p.p_drop = 0.2
    p.p_spurious = 1.0
    p.seed = 11
    pred, expected = dr.perturb(gt, p)
    assert dr.oracle_check(gt, pred, expected) == []

    score = dr.evaluate_pair(gt, pred)
    assert score.word_level.tp == expected.tp
    assert score.word_level.recall == pytest.approx(expected.recall)
    assert score.text_level.cer == pytest.approx(expected.cer)

    gt_path = tmp_path / "gt.json"
    pred_path = tmp_path / "pred.json"
    dr.save_document(gt, gt_path)
    dr.save_document(pred, pred_path)
    again = dr.evaluate_files(gt_path, pred_path)
    assert again.word_level.tp == expected.tp

    loaded = dr.load_document(gt_path)
    assert loaded.image_id == gt.image_id
    assert loaded.to_json() == gt.to_json()


class _TextGrabber(html.parser.HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self._stack = []
        self.texts = []
        self.classes = []

    def handle_starttag(self, tag, attrs):
        cls = dict(attrs).get("class", "")
        self.classes.append(cls)
        if tag == "div" and cls == "tx":
            self._stack.append([])
        elif self._stack:
            self._stack.append(None)

    def handle_endtag(self, tag):
        if self._stack:
            top = self._stack.pop()
            if top is not None:
                self.texts.append("".join(top))

    def handle_data(self, data):
        if self._stack and self._stack[-1] is not None:
            self._stack[-1].append(data)


def test_reconstruct_html_roundtrip(tmp_path):
    spec = dr.SynthSpec()
    spec.seed = 9
    spec.regions = 4
    spec.table_regions = 1
    gt = dr.generate_document(spec)
    index = dr.reconstruct_html(gt, tmp_path)
    content = index.read_text(encoding="utf-8")

    parser = _TextGrabber()
    parser.feed(content)
    parser.close()
    assert "table" not in parser.classes
    expected = []
    for i in range(gt.n_regions):
        rid = f"r{i:02d}"
        try:
            text = gt.region_text(rid)
        except dr.DocrebenchError:
            continue  # image/table region
        expected.append((rid, text))
    # DOM order is reading order; compare as multisets of texts plus count
    assert sorted(parser.texts) == sorted(t for _, t in expected)
    assert (tmp_path / "intermediate.json").exists()


def test_fit_font_size():
    assert dr.fit_font_size("", 100, 50) == 16
    assert dr.fit_font_size("hi", 5000, 5000) == 72


def test_batch_sizes():
    assert dr.batch_sizes(320, 160) == [160, 160]
    assert dr.batch_sizes(5, 160) == [5]
    assert dr.batch_sizes(0, 160) == []
    assert dr.batch_sizes(409, 160) == [160, 160, 89]
