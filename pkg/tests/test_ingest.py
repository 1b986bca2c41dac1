import datetime as dt

import numpy as np
import pytest

from coattention.clickstream import ClickIndex, parse_clickstream, write_month_tsv, load_month_tsv
from coattention.pageviews import (
    DailySeriesStore,
    aggregate_daily,
    parse_dump_filename,
)
from coattention.portal import extract_links, parse_event_records, strip_markup
from coattention.records import ParseStats
from coattention.redirects import RedirectError, RedirectMap
from coattention.titles import normalize_title

DAY = dt.date(2018, 11, 30)

REDIRECTS = RedirectMap(
    {
        "Magnitude": "Moment magnitude scale",
        "Anchorage": "Anchorage, Alaska",
        "USA": "United States",
        "U.S.": "United States",
    }
)


class TestTitles:
    def test_underscores_and_case(self):
        assert normalize_title("anchorage,_Alaska") == "Anchorage, Alaska"

    def test_whitespace_collapse(self):
        assert normalize_title("  south   Korea ") == "South Korea"


class TestRedirects:
    def test_resolve_alias_and_canonical(self):
        assert REDIRECTS.resolve("USA") == "United States"
        assert REDIRECTS.resolve("United States") == "United States"

    def test_idempotent_for_every_title(self):
        for alias, canonical in REDIRECTS.items():
            assert REDIRECTS.resolve(REDIRECTS.resolve(alias)) == REDIRECTS.resolve(alias)
            assert REDIRECTS.resolve(canonical) == canonical

    def test_chain_rejected(self):
        with pytest.raises(RedirectError):
            RedirectMap({"A": "B", "B": "C"})

    def test_group_contains_aliases(self):
        assert REDIRECTS.group("United States") == {"USA", "U.S.", "United States"}

    def test_tsv_round_trip(self, tmp_path):
        path = tmp_path / "redirects.tsv"
        REDIRECTS.to_tsv(path)
        back = RedirectMap.from_tsv(path)
        assert sorted(back.items()) == sorted(REDIRECTS.items())


class TestPortalParsing:
    def test_anchorage_example(self):
        text = (
            "'''Disasters and accidents'''\n"
            "* [[2018 Anchorage earthquake]]: A [[magnitude]] 7.0 earthquake hits "
            "[[Alaska]], with the epicenter in [[Anchorage]]. Severe damage is reported.\n"
        )
        records = parse_event_records(text, DAY, REDIRECTS)
        assert len(records) == 1
        assert records[0].core_articles == frozenset(
            {
                "2018 Anchorage earthquake",
                "Moment magnitude scale",
                "Anchorage, Alaska",
                "Alaska",
            }
        )
        assert records[0].category == "Disasters and accidents"
        assert records[0].event_id == "2018-11-30-01"

    def test_pipe_display_text(self):
        text = (
            "'''Disasters and accidents'''\n"
            "* Authorities cannot contact the [[South Korea|South Korean]] cargo "
            "freighter [[Stellar Daisy]]. It is believed that the ship sunk off the "
            "coast of [[Uruguay]].\n"
        )
        records = parse_event_records(text, DAY, REDIRECTS)
        assert records[0].core_articles == frozenset({"South Korea", "Stellar Daisy", "Uruguay"})
        assert "South Korean" in records[0].description
        assert "[[" not in records[0].description

    def test_item_without_links_dropped_with_warning(self, caplog):
        text = "'''Sports'''\n* A result with no links at all.\n* [[Tennis]] final played.\n"
        stats = ParseStats()
        with caplog.at_level("WARNING"):
            records = parse_event_records(text, DAY, stats=stats)
        assert len(records) == 1
        assert stats.dropped["no_links"] == 1
        assert any("no article links" in m for m in caplog.messages)

    def test_malformed_item_skipped_not_whole_file(self):
        text = (
            "'''Sports'''\n"
            "* [[Broken\n"
            "* [[Tennis]] final played.\n"
        )
        records = parse_event_records(text, DAY)
        assert len(records) == 1
        assert records[0].core_articles == frozenset({"Tennis"})

    def test_unknown_category_items_skipped(self):
        text = "'''Weather'''\n* [[Storm]] hits.\n"
        stats = ParseStats()
        records = parse_event_records(text, DAY, stats=stats)
        assert records == []
        assert stats.dropped["no_category"] == 1

    def test_namespace_links_ignored(self):
        assert extract_links("[[File:x.jpg]] and [[Category:Y]] but [[Star Trek: Picard]]") == [
            "Star Trek: Picard"
        ]

    def test_section_anchor_stripped(self):
        assert extract_links("[[Alaska#Geography|the region]]") == ["Alaska"]

    def test_strip_markup(self):
        assert strip_markup("'''Bold''' [[A|b]] and [[C]]") == "Bold b and C"


CLICK_ROWS = [
    "Anchorage,_Alaska\t2018_Anchorage_earthquake\tlink\t5000",
    "other-search\tAnchorage,_Alaska\texternal\t99999",
    "other-search\tAnchorage,_Alaska\tlink\t99999",
    "Main_Page\tFoo\tlink\t500",
    "USA\tAlaska\tlink\t300",
    "A\tB\tlink\tnot_a_number",
    "A\tB\tlink",
    "A\tB\tlink\t4",
]


class TestClickstream:
    def test_filtering_rules(self):
        stats = ParseStats()
        records = list(parse_clickstream(CLICK_ROWS, "2018-11", REDIRECTS, stats))
        kept = {(r.source, r.target, r.count) for r in records}
        assert ("Anchorage, Alaska", "2018 Anchorage earthquake", 5000) in kept
        # redirect applied to the source title
        assert ("United States", "Alaska", 300) in kept
        assert len(records) == 2
        assert stats.dropped["type"] == 1
        assert stats.dropped["pseudo_referrer"] == 1
        assert stats.dropped["main_page"] == 1
        assert stats.dropped["malformed"] == 2
        assert stats.dropped["low_count"] == 1

    def test_index_neighbors_and_counts(self):
        records = parse_clickstream(CLICK_ROWS, "2018-11", REDIRECTS)
        index = ClickIndex.from_records(records, "2018-11")
        assert index.count("Anchorage, Alaska", "2018 Anchorage earthquake") == 5000
        assert "Alaska" in index.neighbors("United States")
        assert index.neighbors("2018 Anchorage earthquake") == {"Anchorage, Alaska"}

    def test_pairs_among_restricted(self):
        records = parse_clickstream(CLICK_ROWS, "2018-11", REDIRECTS)
        index = ClickIndex.from_records(records, "2018-11")
        pairs = list(index.pairs_among({"United States", "Alaska"}))
        assert pairs == [("United States", "Alaska", 300)]

    def test_month_tsv_round_trip(self, tmp_path):
        records = list(parse_clickstream(CLICK_ROWS, "2018-11", REDIRECTS))
        path = tmp_path / "clickstream-2018-11.tsv"
        write_month_tsv(path, records)
        back = load_month_tsv(path, "2018-11")
        assert back.count("Anchorage, Alaska", "2018 Anchorage earthquake") == 5000
        assert back.count("United States", "Alaska") == 300


def _hourly(day: str, hour: int, lines: list[str]):
    stamp = dt.datetime.strptime(day, "%Y-%m-%d").replace(hour=hour)
    return stamp, lines


class TestPageviews:
    def test_dump_filename(self):
        stamp = parse_dump_filename("pageviews-20181130-060000.gz")
        assert stamp == dt.datetime(2018, 11, 30, 6)
        with pytest.raises(ValueError):
            parse_dump_filename("whatever.txt")

    def test_alias_counts_merge_across_hours(self):
        period = (dt.date(2018, 11, 30), dt.date(2018, 11, 30))
        sources = [
            _hourly("2018-11-30", h, ["en.z USA 10 0", "en.m United_States 5 0"])
            for h in range(24)
        ]
        series = aggregate_daily(sources, period, redirects=REDIRECTS)
        assert series["United States"][0] == 360  # 24*10 + 24*5

    def test_prefix_filter_and_malformed(self):
        period = (dt.date(2018, 11, 30), dt.date(2018, 11, 30))
        stats = ParseStats()
        sources = [
            _hourly(
                "2018-11-30",
                0,
                ["de.z Berlin 999 0", "en.z Alaska 7 0", "en.z Broken 7", "en.z X y 0"],
            )
        ]
        series = aggregate_daily(sources, period, stats=stats)
        assert "Berlin" not in series
        assert series["Alaska"][0] == 7
        assert stats.dropped["prefix"] == 1
        assert stats.dropped["malformed"] == 2

    def test_out_of_period_hours_skipped(self):
        period = (dt.date(2018, 11, 30), dt.date(2018, 11, 30))
        sources = [_hourly("2018-12-01", 0, ["en.z Alaska 7 0"])]
        series = aggregate_daily(sources, period)
        assert series == {}


class TestDailySeriesStore:
    def _build(self, tmp_path, n_days=3):
        period = (dt.date(2018, 1, 1), dt.date(2018, 1, n_days))
        series = {
            "Alpha": np.array([1, 2, 3][:n_days], dtype=np.int64),
            "Beta": np.array([0, 5, 0][:n_days], dtype=np.int64),
        }
        return DailySeriesStore.build(tmp_path / "store", series, period), period

    def test_round_trip_and_missing_reads_zero(self, tmp_path):
        store, period = self._build(tmp_path)
        reopened = DailySeriesStore.open(tmp_path / "store")
        assert reopened.get("Alpha", dt.date(2018, 1, 2)) == 2
        assert reopened.get("Beta", dt.date(2018, 1, 1)) == 0
        assert reopened.get("Missing", dt.date(2018, 1, 1)) == 0
        assert reopened.get("Alpha", dt.date(2019, 1, 1)) == 0

    def test_series_window_zero_padded(self, tmp_path):
        store, _ = self._build(tmp_path)
        window = store.series("Alpha", dt.date(2017, 12, 31), 5)
        assert window.tolist() == [0, 1, 2, 3, 0]

    def test_build_is_deterministic(self, tmp_path):
        store_a, _ = self._build(tmp_path / "a")
        store_b, _ = self._build(tmp_path / "b")
        files_a = sorted(p.relative_to(tmp_path / "a") for p in (tmp_path / "a").rglob("*") if p.is_file())
        files_b = sorted(p.relative_to(tmp_path / "b") for p in (tmp_path / "b").rglob("*") if p.is_file())
        assert files_a == files_b
        for rel in files_a:
            assert (tmp_path / "a" / rel).read_bytes() == (tmp_path / "b" / rel).read_bytes()

    def test_export_tsv(self, tmp_path):
        store, _ = self._build(tmp_path)
        out = tmp_path / "export.tsv"
        store.export_tsv(out)
        lines = out.read_text().splitlines()
        assert "Alpha\t2018-01-01\t1" in lines
        assert "Beta\t2018-01-02\t5" in lines
        assert not any(line.endswith("\t0") for line in lines)

    def test_conservation_over_alias_group(self, tmp_path):
        # total canonical views equal the sum over the alias group, exactly
        period = (dt.date(2018, 11, 30), dt.date(2018, 11, 30))
        raw = {"USA": 123, "U.S.": 45, "United_States": 1000}
        sources = [_hourly("2018-11-30", 0, [f"en.z {t} {v} 0" for t, v in raw.items()])]
        series = aggregate_daily(sources, period, redirects=REDIRECTS)
        assert series["United States"][0] == sum(raw.values())
