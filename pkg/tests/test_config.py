"""Tests for the run configuration, strategy table and messages."""

import math

import numpy as np
import pytest

from monocc.config import (
    RunConfig,
    SamplerConfig,
    SamplingStrategy,
    SamplingStrategyTable,
    get_messages,
    get_run_config,
    list_categories,
    substream,
    update_run_config,
)
from monocc.errors import ConfigError, InvalidArgumentError


class TestRunConfig:
    """Loading and validating run configurations."""

    def test_defaults(self):
        config = RunConfig()
        assert config.sampler.num_patches == 64
        assert config.sampler.patch_size == 8
        assert config.sampler.gamma == 0.3
        assert config.eval.resolution == (64, 16, 128)
        assert config.render.far == 80.0

    def test_partial_sections(self):
        config = RunConfig.from_dict({"seed": 7, "sampler": {"gamma": 0.5}})
        assert config.seed == 7
        assert config.sampler.gamma == 0.5
        assert config.sampler.num_patches == 64

    def test_unknown_top_level_key(self):
        with pytest.raises(ConfigError) as info:
            RunConfig.from_dict({"sampling": {}})
        assert info.value.context["field"] == "sampling"

    def test_unknown_section_key(self):
        with pytest.raises(ConfigError) as info:
            RunConfig.from_dict({"sampler": {"gama": 0.5}})
        assert info.value.context["field"] == "sampler.gama"

    def test_out_of_range_value(self):
        with pytest.raises(ConfigError) as info:
            RunConfig.from_dict({"sampler": {"gamma": 1.5}})
        assert info.value.context["field"] == "sampler.gamma"

    def test_config_error_is_invalid_argument(self):
        with pytest.raises(InvalidArgumentError):
            SamplerConfig(patch_size=0)

    def test_infinite_band_round_trip(self):
        config = RunConfig.from_dict({"eval": {"band": "inf"}})
        assert math.isinf(config.eval.band)
        data = config.to_dict()
        assert data["eval"]["band"] == "inf"
        assert RunConfig.from_dict(data).eval.band == math.inf

    def test_to_dict_round_trip(self):
        config = RunConfig.from_dict({"seed": 3, "render": {"mode": "stratified", "workers": 2}})
        assert RunConfig.from_dict(config.to_dict()).to_dict() == config.to_dict()

    def test_json_syntax_error(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{\n  "seed": 1,\n}\n', encoding="utf-8")
        with pytest.raises(ConfigError) as info:
            RunConfig.from_json(path)
        assert info.value.context["line"] == 3

    def test_wrong_types_are_config_errors(self):
        with pytest.raises(ConfigError) as info:
            RunConfig.from_dict({"seed": "x"})
        assert info.value.context["field"] == "seed"
        with pytest.raises(ConfigError) as info:
            RunConfig.from_dict({"seed": True})
        assert info.value.context["field"] == "seed"
        with pytest.raises(ConfigError) as info:
            RunConfig.from_dict({"eval": {"resolution": ["a", 4, 4]}})
        assert info.value.context["field"] == "eval"
        with pytest.raises(ConfigError) as info:
            RunConfig.from_dict({"sampler": {"gamma": "half"}})
        assert info.value.context["field"] == "sampler"

    def test_global_instance(self):
        original = get_run_config()
        try:
            update_run_config(RunConfig(seed=11))
            assert get_run_config().seed == 11
        finally:
            update_run_config(original)


class TestSubstream:
    """Named random streams."""

    def test_reproducible(self):
        a = substream(5, "sampler").random(4)
        b = substream(5, "sampler").random(4)
        np.testing.assert_array_equal(a, b)

    def test_names_and_seeds_differ(self):
        base = substream(5, "sampler").random(4)
        assert not np.array_equal(base, substream(5, "coverage").random(4))
        assert not np.array_equal(base, substream(6, "sampler").random(4))


class TestStrategyTable:
    """Category lookup."""

    def test_aliases_resolve(self):
        table = SamplingStrategyTable()
        assert table.canonical(" Truck ") == "car"
        assert table.is_gaussian("person")
        assert not table.is_gaussian("road")

    def test_unknown_category(self):
        with pytest.raises(InvalidArgumentError):
            SamplingStrategyTable().strategy_for("spaceship")

    def test_from_dict_adds_unlabeled(self):
        table = SamplingStrategyTable.from_dict({"Car": "gaussian"})
        assert table.strategy_for("car") is SamplingStrategy.GAUSSIAN
        assert table.strategy_for("unlabeled") is SamplingStrategy.UNIFORM

    def test_from_dict_rejects_unknown_strategy(self):
        with pytest.raises(InvalidArgumentError):
            SamplingStrategyTable.from_dict({"car": "poisson"})

    def test_list_categories(self):
        categories = list_categories()
        assert "car" in categories and "truck" in categories


class TestMessages:
    """Console messages."""

    def test_languages(self):
        assert get_messages("en")["written"] == "Written"
        assert get_messages("cn")["written"] == "已写入"

    def test_unknown_language_falls_back_to_english(self):
        assert get_messages("fr") is get_messages("en")

    def test_tables_share_keys(self):
        assert get_messages("cn").keys() == get_messages("en").keys()
