import pytest

from coattention.labels import (
    LabelRecord,
    agreement_summary,
    load_label_file,
    save_label_file,
)


def _pair(topic_id, cat1, cat2):
    return [
        LabelRecord(topic_id, "coder-a", f"label {topic_id}", cat1),
        LabelRecord(topic_id, "coder-b", f"label {topic_id}", cat2),
    ]


class TestAgreementSummary:
    def test_all_unanimous_strong(self):
        records = [r for t in range(5) for r in _pair(t, "strong", "strong")]
        summary = agreement_summary(records)
        assert summary.percentages["unanimous_strong"] == 100.0
        assert summary.percentages["strong_partial"] == 0.0
        assert summary.percentages["unanimous_partial"] == 0.0
        assert summary.percentages["weak_none"] == 0.0

    def test_thirteen_topic_hand_mix(self):
        records = []
        for t in range(9):
            records += _pair(t, "strong", "strong")
        records += _pair(9, "strong", "partial")
        records += _pair(10, "partial", "partial")
        records += _pair(11, "partial", "partial")
        records += _pair(12, "weak_none", "strong")
        summary = agreement_summary(records)
        assert summary.topics_included == 13
        assert summary.counts == {
            "unanimous_strong": 9,
            "strong_partial": 1,
            "unanimous_partial": 2,
            "weak_none": 1,
        }
        assert summary.percentages["unanimous_strong"] == pytest.approx(900 / 13)
        assert sum(summary.percentages.values()) == pytest.approx(100.0)

    def test_bucket_order_insensitive(self):
        a = agreement_summary(_pair(0, "partial", "strong"))
        b = agreement_summary(_pair(0, "strong", "partial"))
        assert a.counts == b.counts

    def test_odd_coder_counts_excluded_and_reported(self):
        records = _pair(0, "strong", "strong")
        records.append(LabelRecord(1, "coder-a", "only one", "strong"))
        records += _pair(2, "strong", "strong")
        records.append(LabelRecord(2, "coder-c", "third opinion", "strong"))
        summary = agreement_summary(records)
        assert summary.topics_included == 1
        assert [t for t, _ in summary.excluded] == [1, 2]

    def test_missing_judgment_excluded(self):
        records = [
            LabelRecord(0, "coder-a", "x", "strong"),
            LabelRecord(0, "coder-b", "y", None),
        ]
        summary = agreement_summary(records)
        assert summary.topics_included == 0
        assert summary.excluded[0][1] == "missing agreement judgment"

    def test_invalid_category_rejected(self):
        with pytest.raises(ValueError):
            LabelRecord(0, "coder-a", "x", "sorta")


class TestLabelFiles:
    def test_round_trip(self, tmp_path):
        records = [
            LabelRecord(3, "coder-a", "wildfires", "strong"),
            LabelRecord(1, "coder-a", "royals", None),
        ]
        path = tmp_path / "labels-a.json"
        save_label_file(path, "coder-a", records)
        back = load_label_file(path)
        assert [r.topic_id for r in back] == [1, 3]  # sorted on save
        assert back[1].label == "wildfires"
        assert back[0].agreement is None

    def test_save_is_byte_stable(self, tmp_path):
        records = [LabelRecord(1, "c", "x", "partial")]
        p1 = tmp_path / "one.json"
        p2 = tmp_path / "two.json"
        save_label_file(p1, "c", records)
        save_label_file(p2, "c", list(records))
        assert p1.read_bytes() == p2.read_bytes()

    def test_merged_files_feed_summary(self, tmp_path):
        pa = tmp_path / "a.json"
        pb = tmp_path / "b.json"
        save_label_file(pa, "coder-a", [LabelRecord(0, "coder-a", "x", "strong")])
        save_label_file(pb, "coder-b", [LabelRecord(0, "coder-b", "x!", "partial")])
        records = load_label_file(pa) + load_label_file(pb)
        summary = agreement_summary(records)
        assert summary.counts["strong_partial"] == 1
