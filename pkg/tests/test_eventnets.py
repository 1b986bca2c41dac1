import datetime as dt

import numpy as np
import pytest

from coattention.clickstream import ClickIndex
from coattention.eventnets import (
    DegenerateEventError,
    attach_series,
    build_event_network,
    load_event_network,
    save_event_network,
    window_month_weights,
)
from coattention.pageviews import DailySeriesStore
from coattention.records import ClickRecord, EventRecord


def _event(date=dt.date(2018, 6, 15), cores=("Hub",)):
    return EventRecord(
        event_id=f"{date.isoformat()}-01",
        date=date,
        category="Sports",
        description="test event",
        core_articles=frozenset(cores),
    )


def _index(month, rows):
    return ClickIndex.from_records(
        [ClickRecord(source=s, target=t, month=month, count=c) for s, t, c in rows], month
    )


def _stationary_clicks(date, rows):
    """The same monthly counts for every month of the 61-day window, so the
    final edge weight equals the raw count."""
    return {month: _index(month, rows) for month, _ in window_month_weights(date)}


class TestWindowMonthWeights:
    def test_fully_inside_one_month(self):
        weights = window_month_weights(dt.date(2018, 6, 15), 21)
        assert weights == [("2018-06", 1.0)]

    def test_january_16_case(self):
        # window 2017-12-17 .. 2018-02-15
        weights = dict(window_month_weights(dt.date(2018, 1, 16)))
        assert weights["2017-12"] == pytest.approx(15 / 61)
        assert weights["2018-01"] == pytest.approx(31 / 61)
        assert weights["2018-02"] == pytest.approx(15 / 61)

    def test_fractions_sum_to_one(self):
        day = dt.date(2018, 1, 1)
        for offset in range(0, 400, 17):
            weights = window_month_weights(day + dt.timedelta(days=offset))
            assert sum(f for _, f in weights) == pytest.approx(1.0, abs=1e-12)
            assert len(weights) <= 3


class TestBuildEventNetwork:
    def test_single_month_simple_edge(self):
        event = _event()
        net = build_event_network(event, _stationary_clicks(event.date, [("Hub", "Leaf", 500)]))
        assert net.graph.weight("Hub", "Leaf") == pytest.approx(500.0)
        assert set(net.graph.nodes()) == {"Hub", "Leaf"}
        assert net.window_start == dt.date(2018, 5, 16)

    def test_two_month_weighted_average_drops_edge(self):
        # 122 * 30/61 + 61 * 31/61 = 91 <= 100 -> dropped, graph degenerate
        event = _event(date=dt.date(2018, 1, 16), cores=("A",))
        clicks = {
            "2017-12": _index("2017-12", [("A", "B", 200)]),
            "2018-01": _index("2018-01", [("A", "B", 122)]),
            "2018-02": _index("2018-02", [("A", "B", 61)]),
        }
        # A->B weight: 200*15/61 + 122*31/61 + 61*15/61 = 126.2 > 100 survives
        net = build_event_network(event, clicks)
        assert net.graph.weight("A", "B") == pytest.approx(
            200 * 15 / 61 + 122 * 31 / 61 + 61 * 15 / 61
        )

    def test_hand_arithmetic_91_dropped(self):
        # pin a 30/61 + 31/61 split: use a 61-day window over two months
        event = _event(date=dt.date(2018, 3, 31), cores=("A",))
        # window 2018-03-01 .. 2018-04-30: 31 days March, 30 days April
        clicks = {
            "2018-03": _index("2018-03", [("A", "B", 61)]),
            "2018-04": _index("2018-04", [("A", "B", 122)]),
        }
        # weight = 61*31/61 + 122*30/61 = 31 + 60 = 91 -> dropped
        with pytest.raises(DegenerateEventError):
            build_event_network(event, clicks)

    def test_neighbor_of_neighbor_excluded_links_between_included(self):
        event = _event(cores=("Core",))
        rows = [
            ("Core", "N1", 500),
            ("N2", "Core", 400),
            ("N1", "N2", 300),  # link between neighbors: included
            ("N1", "Far", 900),  # Far is not a neighbor of Core: excluded
            ("Far", "Stranger", 900),
        ]
        net = build_event_network(event, _stationary_clicks(event.date, rows))
        assert set(net.graph.nodes()) == {"Core", "N1", "N2"}
        assert net.graph.weight("N1", "N2") == pytest.approx(300.0)

    def test_isolate_removed_after_threshold(self):
        event = _event(cores=("Core",))
        rows = [("Core", "N1", 500), ("Core", "N2", 90)]  # N2 edge below threshold
        net = build_event_network(event, _stationary_clicks(event.date, rows))
        assert "N2" not in net.graph
        assert set(net.graph.nodes()) == {"Core", "N1"}

    def test_core_article_may_be_dropped(self):
        event = _event(cores=("Weak", "Core"))
        rows = [("Core", "N1", 500), ("Weak", "N1", 50)]
        net = build_event_network(event, _stationary_clicks(event.date, rows))
        assert "Weak" not in net.graph
        assert net.core_present() == {"Core"}

    def test_every_surviving_edge_strictly_above_threshold(self):
        event = _event(cores=("Core",))
        rows = [("Core", "A", 100), ("Core", "B", 101), ("B", "Core", 150)]
        net = build_event_network(event, _stationary_clicks(event.date, rows))
        assert all(w > 100.0 for _, _, w in net.graph.edges())
        assert not net.graph.has_edge("Core", "A")

    def test_missing_month_is_an_error(self):
        event = _event(date=dt.date(2018, 1, 16))
        with pytest.raises(KeyError):
            build_event_network(event, {"2018-01": _index("2018-01", [])})


class TestAttachSeries:
    def _store(self, tmp_path, articles, period, value=100):
        n_days = (period[1] - period[0]).days + 1
        series = {a: np.full(n_days, value, dtype=np.int64) for a in articles}
        return DailySeriesStore.build(tmp_path / "store", series, period)

    def test_constant_series_attached(self, tmp_path):
        event = _event()
        net = build_event_network(
            event, _stationary_clicks(event.date, [("Hub", "Leaf", 500)])
        )
        period = (net.window_start, net.window_days()[-1])
        store = self._store(tmp_path, ["Hub", "Leaf"], period)
        attach_series(net, store)
        assert net.series["Hub"].tolist() == [100] * 61

    def test_absent_article_zero_vector_with_warning(self, tmp_path, caplog):
        event = _event()
        net = build_event_network(
            event, _stationary_clicks(event.date, [("Hub", "Leaf", 500)])
        )
        period = (net.window_start, net.window_days()[-1])
        store = self._store(tmp_path, ["Hub"], period)
        with caplog.at_level("WARNING"):
            attach_series(net, store)
        assert net.series["Leaf"].tolist() == [0] * 61
        assert any("no stored page views" in m for m in caplog.messages)

    def test_round_trip_serialization_bit_identical(self, tmp_path):
        event = _event()
        net = build_event_network(
            event, _stationary_clicks(event.date, [("Hub", "Leaf", 500), ("Leaf", "Hub", 250)])
        )
        period = (net.window_start, net.window_days()[-1])
        store = self._store(tmp_path, ["Hub", "Leaf"], period)
        attach_series(net, store)

        dir_a = tmp_path / "a"
        dir_b = tmp_path / "b"
        save_event_network(net, dir_a)
        reloaded = load_event_network(dir_a)
        save_event_network(reloaded, dir_b)
        for name in ("edges.tsv", "series.tsv", "event.json"):
            assert (dir_a / name).read_bytes() == (dir_b / name).read_bytes()
        assert reloaded.event == net.event
        assert sorted(reloaded.graph.edges()) == sorted(net.graph.edges())
        np.testing.assert_array_equal(reloaded.series["Hub"], net.series["Hub"])
