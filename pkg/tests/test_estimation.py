"""Inverse-distance estimation tests."""

import datetime as dt
import math

import numpy as np
import pytest

from txrisk import estimation, features as ft
from txrisk.clustering import ClusterProfile
from txrisk.errors import (
    FarFromAllClustersError,
    FarQueryWarning,
    MissingFeatureWarning,
    ZeroServicesError,
)
from txrisk.estimation import (
    avg_load_from_energy,
    cluster_max_top_oil,
    estimate,
    estimate_day_temperature,
    read_query_csv,
    write_estimates_csv,
)

from conftest import make_day, make_model


class TestEstimate:
    def test_query_on_centroid_returns_exact_value(self):
        model = make_model([{"x": 0.2}, {"x": 0.8}])
        result = estimate(make_day(x=0.2), model, {1: 100.0, 2: 200.0})
        assert result.estimate == 100.0
        assert result.weights == {1: 1.0, 2: 0.0}
        assert not result.far_flag

    def test_equidistant_two_clusters(self):
        model = make_model([{"x": 0.2}, {"x": 0.8}])
        result = estimate(make_day(x=0.5), model, {1: 100.0, 2: 120.0})
        assert result.estimate == pytest.approx(110.0)
        assert result.weights[1] == pytest.approx(0.5)
        assert result.weights[2] == pytest.approx(0.5)

    def test_hand_weighted_three_clusters(self):
        # Feature weight 25 turns the in-[0,1] geometry into dissimilarities
        # of exactly {1, 2, 2}: weights {1/2, 1/4, 1/4} by hand.
        schema = ft.FeatureSchema(features=(
            ft.FeatureDef("x", ft.KIND_NUMERIC, weight=25.0),))
        off = math.sqrt(0.08)
        model = make_model([{"x": 0.5}, {"x": 0.7 - off}, {"x": 0.7 + off}],
                           values_schema=schema)
        result = estimate(make_day(x=0.7), model,
                          {1: 100.0, 2: 110.0, 3: 120.0})
        assert result.per_cluster_distances[1] == pytest.approx(1.0)
        assert result.per_cluster_distances[2] == pytest.approx(2.0)
        assert result.per_cluster_distances[3] == pytest.approx(2.0)
        assert result.estimate == pytest.approx(107.5)

    def test_weights_sum_to_one_and_estimate_bounded(self):
        rng = np.random.default_rng(77)
        for _ in range(100):
            k = int(rng.integers(2, 7))
            model = make_model([{"x": float(rng.uniform(0, 1)),
                                 "y": float(rng.uniform(0, 1))}
                                for _ in range(k)])
            values = {i + 1: float(rng.uniform(50, 150)) for i in range(k)}
            query = make_day(x=float(rng.uniform(0, 1)),
                             y=float(rng.uniform(0, 1)))
            result = estimate(query, model, values)
            assert sum(result.weights.values()) == pytest.approx(1.0, abs=1e-9)
            assert min(values.values()) - 1e-9 <= result.estimate \
                <= max(values.values()) + 1e-9

    def test_missing_cluster_value_raises(self):
        model = make_model([{"x": 0.2}, {"x": 0.8}])
        with pytest.raises(KeyError):
            estimate(make_day(x=0.5), model, {1: 100.0})

    def test_near_zero_distance_takes_shortcut(self):
        model = make_model([{"x": 0.2}, {"x": 0.8}])
        result = estimate(make_day(x=0.2 + 1e-6), model, {1: 100.0, 2: 200.0})
        # (1e-6)^2 = 1e-12 < the shortcut epsilon: exact cluster-1 value.
        assert result.estimate == 100.0
        assert result.weights == {1: 1.0, 2: 0.0}

    def test_coincident_centroids_pick_lowest_id(self):
        model = make_model([{"x": 0.5}, {"x": 0.5}])
        result = estimate(make_day(x=0.5), model, {1: 100.0, 2: 200.0})
        assert result.estimate == 100.0

    def test_missing_query_feature_warns_and_uses_subset(self):
        model = make_model([{"x": 0.2, "y": 0.9}, {"x": 0.8, "y": 0.9}])
        with pytest.warns(MissingFeatureWarning):
            result = estimate(make_day(x=0.2), model, {1: 100.0, 2: 200.0})
        # Distance falls back to the x axis alone: exact hit on cluster 1.
        assert result.estimate == 100.0


class TestFarGuard:
    def test_far_query_flagged_lenient(self):
        model = make_model([{"x": 0.1}, {"x": 0.2}], far_threshold=0.01)
        with pytest.warns(FarQueryWarning):
            result = estimate(make_day(x=0.9), model, {1: 10.0, 2: 20.0})
        assert result.far_flag

    def test_far_query_strict_raises(self):
        model = make_model([{"x": 0.1}, {"x": 0.2}], far_threshold=0.01)
        with pytest.raises(FarFromAllClustersError):
            estimate(make_day(x=0.9), model, {1: 10.0, 2: 20.0}, strict=True)

    def test_near_query_not_flagged(self):
        model = make_model([{"x": 0.1}, {"x": 0.2}], far_threshold=0.01)
        result = estimate(make_day(x=0.15), model, {1: 10.0, 2: 20.0})
        assert not result.far_flag

    def test_zero_threshold_disables_guard(self):
        model = make_model([{"x": 0.1}, {"x": 0.2}], far_threshold=0.0)
        result = estimate(make_day(x=0.9), model, {1: 10.0, 2: 20.0})
        assert not result.far_flag


class TestAvgLoadFromEnergy:
    def test_single_service_day(self):
        assert avg_load_from_energy([24.0], 1) == pytest.approx(1.0)

    def test_ten_services(self):
        assert avg_load_from_energy([24.0] * 10, 10) == pytest.approx(1.0)

    def test_all_zero(self):
        assert avg_load_from_energy([0.0, 0.0], 2) == 0.0

    def test_linear_in_total_energy(self):
        base = avg_load_from_energy([12.0, 36.0], 2)
        assert avg_load_from_energy([24.0, 72.0], 2) == pytest.approx(2 * base)

    def test_zero_services(self):
        with pytest.raises(ZeroServicesError):
            avg_load_from_energy([], 0)

    def test_reading_count_mismatch(self):
        with pytest.raises(ValueError):
            avg_load_from_energy([24.0, 12.0], 3)

    def test_negative_energy_rejected(self):
        with pytest.raises(ValueError):
            avg_load_from_energy([24.0, -1.0], 2)


def seasonal_model(default_spec):
    """Two clusters whose higher-load profile yields higher temperatures."""
    from dataclasses import replace

    schema = ft.FeatureSchema(features=(
        ft.FeatureDef("l_avg_kva", ft.KIND_NUMERIC),))
    model = make_model([{"l_avg_kva": 0.2}, {"l_avg_kva": 0.8}],
                       values_schema=schema)
    profiles = {
        1: ClusterProfile(load_kva=(0.8,) * 24, ambient_c=(10.0,) * 24),
        2: ClusterProfile(load_kva=(2.4,) * 24, ambient_c=(10.0,) * 24),
    }
    return replace(model, profiles=profiles)


class TestDayTemperature:
    def test_centroid_day_returns_cluster_temperature(self, default_spec):
        model = seasonal_model(default_spec)
        temps = cluster_max_top_oil(model, default_spec, 10)
        result = estimate_day_temperature(
            make_day(l_avg_kva=0.2), model, 10, default_spec, temps)
        assert result.estimate == pytest.approx(temps[1])

    def test_higher_load_cluster_is_hotter(self, default_spec):
        model = seasonal_model(default_spec)
        temps = cluster_max_top_oil(model, default_spec, 10)
        assert temps[2] > temps[1]

    def test_raising_l_avg_never_cools_estimate(self, default_spec):
        # Inverse-distance weights are monotone along the load axis between
        # the extreme centroids (outside that span they pull back toward
        # the nearest centroid's exact value), so the sweep stays inside.
        model = seasonal_model(default_spec)
        temps = cluster_max_top_oil(model, default_spec, 10)
        estimates = [
            estimate_day_temperature(make_day(l_avg_kva=v), model, 10,
                                     default_spec, temps).estimate
            for v in np.linspace(0.2, 0.8, 21)
        ]
        assert all(b >= a - 1e-9 for a, b in zip(estimates, estimates[1:]))

    def test_precomputed_table_matches_default_path(self, default_spec):
        model = seasonal_model(default_spec)
        a = estimate_day_temperature(make_day(l_avg_kva=0.4), model, 10,
                                     default_spec)
        temps = cluster_max_top_oil(model, default_spec, 10)
        b = estimate_day_temperature(make_day(l_avg_kva=0.4), model, 10,
                                     default_spec, temps)
        assert a.estimate == b.estimate


class TestQueryFiles:
    CSV = ("date,t_max_c,t_min_c,t_avg_c,l_avg_kva,weekday\n"
           "2016-06-06,21.53,8.12,14.20,0.97,Y\n"
           "2016-06-07,22.73,12.62,14.62,0.98,N\n")

    def test_read_query(self, tmp_path):
        path = tmp_path / "query.csv"
        path.write_text(self.CSV)
        queries = read_query_csv(path)
        assert len(queries) == 2
        assert queries[0].date == dt.date(2016, 6, 6)
        assert queries[0].numeric["t_max_c"] == pytest.approx(21.53)
        assert queries[1].nominal["weekday"] == "N"

    def test_bad_header(self, tmp_path):
        path = tmp_path / "query.csv"
        path.write_text("date,tmax\n2016-06-06,1\n")
        from txrisk.errors import ParseError
        with pytest.raises(ParseError):
            read_query_csv(path)

    def test_bad_weekday_flag(self, tmp_path):
        path = tmp_path / "query.csv"
        path.write_text(self.CSV.replace(",N\n", ",weekend\n"))
        from txrisk.errors import ParseError
        with pytest.raises(ParseError):
            read_query_csv(path)

    def test_write_estimates_shape(self, tmp_path):
        path = tmp_path / "query.csv"
        path.write_text(self.CSV)
        queries = read_query_csv(path)
        results = [
            estimation.EstimationResult(87.4, {1: 0.1}, {1: 1.0}, False),
            estimation.EstimationResult(88.4, {1: 0.2}, {1: 1.0}, True),
        ]
        out = tmp_path / "estimates.csv"
        write_estimates_csv(queries, results, out)
        lines = out.read_text().splitlines()
        assert lines[0] == ("date,t_max_c,t_min_c,t_avg_c,l_avg_kva,weekday,"
                            "estimated_max_top_oil_c,far_flag")
        assert lines[1].endswith("87.4,N")
        assert lines[2].endswith("88.4,Y")
