import pytest

from deprag.cost import CostModel, CostModelError, as_days, as_hours, estimate, format_table


def gpt4o_model(workers=1):
    return CostModel(
        calls=800_000,
        latency_per_call=7.0,
        parse_insert_per_call=0.1,
        workers=workers,
        post_processing_seconds=300.0,
    )


class TestEstimate:
    def test_api_seconds_single_worker(self):
        est = estimate(gpt4o_model())
        assert est["api_seconds"] == 5_600_000
        assert as_days(est["api_wall_seconds"]) == 64.8

    def test_two_workers_halve_wall_time(self):
        est = estimate(gpt4o_model(workers=2))
        assert est["api_seconds"] == 5_600_000
        assert as_days(est["api_wall_seconds"]) == 32.4

    def test_parse_stage(self):
        est = estimate(gpt4o_model())
        assert est["parse_seconds"] == 80_000
        assert as_hours(est["parse_wall_seconds"]) == 22.2

    def test_total_single_worker(self):
        est = estimate(gpt4o_model())
        assert as_days(est["total_wall_seconds"]) == 65.7

    def test_linearity_in_calls(self):
        base = estimate(gpt4o_model())
        double = estimate(
            CostModel(
                calls=1_600_000,
                latency_per_call=7.0,
                parse_insert_per_call=0.1,
                avg_input_tokens=100,
                price_per_1k_input_tokens=0.005,
            )
        )
        single = estimate(
            CostModel(
                calls=800_000,
                latency_per_call=7.0,
                parse_insert_per_call=0.1,
                avg_input_tokens=100,
                price_per_1k_input_tokens=0.005,
            )
        )
        assert double["api_seconds"] == 2 * base["api_seconds"]
        assert double["dollars"] == 2 * single["dollars"]

    def test_worker_scaling(self):
        for w in (1, 2, 5, 16):
            est = estimate(gpt4o_model(workers=w))
            assert est["api_wall_seconds"] == pytest.approx(5_600_000 / w)

    def test_dollars(self):
        model = CostModel(
            calls=1000,
            latency_per_call=1.0,
            avg_input_tokens=500,
            avg_output_tokens=100,
            price_per_1k_input_tokens=0.0025,
            price_per_1k_output_tokens=0.01,
        )
        # 1000 * (0.5 * 0.0025 + 0.1 * 0.01) = 1.25 + 1.0
        assert estimate(model)["dollars"] == pytest.approx(2.25)

    def test_invalid_workers(self):
        with pytest.raises(CostModelError):
            CostModel(calls=1, latency_per_call=1.0, workers=0)

    def test_negative_rejected(self):
        with pytest.raises(CostModelError):
            CostModel(calls=-1, latency_per_call=1.0)


class TestRendering:
    def test_table_mentions_day_figures(self):
        table = format_table(gpt4o_model(workers=2))
        assert "~64.8 days" in table
        assert "~32.4 days" in table
        assert "~22.2 hours" in table
        assert "~65.7 days" in table

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "cost.json"
        path.write_text(
            '{"calls": 800000, "latency_per_call": 7.0, "parse_insert_per_call": 0.1}',
            encoding="utf-8",
        )
        model = CostModel.load(str(path))
        assert estimate(model)["api_seconds"] == 5_600_000

    def test_bad_file(self, tmp_path):
        path = tmp_path / "cost.json"
        path.write_text("{bad", encoding="utf-8")
        with pytest.raises(CostModelError):
            CostModel.load(str(path))
