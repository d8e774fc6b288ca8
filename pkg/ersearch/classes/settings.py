import logging
import os
from contextlib import contextmanager
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Iterator, Mapping, Optional, Tuple, Union

from environs import Env, EnvError
from marshmallow import ValidationError
from marshmallow.validate import Length, OneOf, Range

from ersearch import const
from ersearch.classes.features import FeatureScorer
from ersearch.const import Metric, ModelName, ScorerFamily
from ersearch.exceptions import general as exc
from ersearch.types import TrainConfig

logger = logging.getLogger(__name__)

POSITIVE = Range(min=0, min_inclusive=False)

VALIDATORS = {
    "scorer": OneOf([family.value for family in ScorerFamily]),
    "model": OneOf([model.value for model in ModelName]),
    "metric": OneOf([Metric.MAP.value, Metric.NDCG20.value]),
    "k": Range(min=1),
    "top_n": Range(min=1),
    "rerank_depth": Range(min=1),
    "mu_entity": POSITIVE,
    "mu_relationship": POSITIVE,
    "mu_document": POSITIVE,
    "alpha": Range(min=0, max=1),
    "k1": Range(min=0),
    "b": Range(min=0, max=1),
    "window": Range(min=2),
    "extraction_cap": Range(min=1),
    "seed": Range(min=0),
    "restarts": Range(min=1),
    "max_sweeps": Range(min=1),
    "epsilon": POSITIVE,
    "folds": Range(min=1),
    "probes": Range(min=2),
    "sdm_weights": Length(equal=3),
    "workers": Range(min=1),
}


@contextmanager
def config_env(path: Union[str, Path, None] = None) -> Iterator[Env]:
    """
    Env reading the process environment plus an optional KEY=value file.

    Keys the file adds to os.environ are removed again on exit.
    """
    env = Env()
    before = set(os.environ)
    try:
        if path is not None:
            env.read_env(str(path), recurse=False)
        yield env
    finally:
        for key in set(os.environ) - before:
            del os.environ[key]


@dataclass(frozen=True)
class Settings:
    """
    Engine configuration.

    Values come from defaults, then a KEY=value file and the environment
    (ERSEARCH_ prefix), then explicit overrides such as command-line flags.
    """
    index_dir: Optional[str] = None
    scorer: ScorerFamily = ScorerFamily.LM
    model: ModelName = ModelName.EF
    k: int = const.DEFAULT_K
    top_n: int = const.DEFAULT_TOP_N
    rerank_depth: Optional[int] = None
    mu_entity: Optional[float] = None
    mu_relationship: Optional[float] = None
    mu_document: Optional[float] = None
    alpha: float = const.DEFAULT_ALPHA
    k1: float = const.DEFAULT_K1
    b: float = const.DEFAULT_B
    window: int = const.DEFAULT_WINDOW
    extraction_cap: Optional[int] = None
    weights_file: Optional[str] = None
    seed: int = const.DEFAULT_SEED
    restarts: int = const.DEFAULT_RESTARTS
    max_sweeps: int = const.DEFAULT_MAX_SWEEPS
    epsilon: float = const.DEFAULT_EPSILON
    folds: int = const.DEFAULT_FOLDS
    metric: Metric = Metric.MAP
    probes: int = const.DEFAULT_PROBES
    sdm_weights: Tuple[float, float, float] = const.DEFAULT_SDM_WEIGHTS
    workers: int = 1
    run_tag: str = const.DEFAULT_RUN_TAG

    @classmethod
    def load(cls, path: Union[str, Path, None] = None,
             overrides: Optional[Mapping] = None) -> "Settings":
        """
        Build settings from a config file, the environment and overrides.

        :param path: Optional KEY=value file; keys carry the ERSEARCH_
            prefix.
        :param overrides: Field values that win over everything else;
            None values are ignored.
        :return: Validated Settings.
        """
        if path is not None and not Path(path).is_file():
            raise exc.ConfigError(data=f"config file {path} not found")

        defaults = cls()
        try:
            with config_env(path) as env, env.prefixed(const.ENV_PREFIX):
                values = {
                    "index_dir": env.str("INDEX_DIR", defaults.index_dir),
                    "scorer": env.str(
                        "SCORER", defaults.scorer.value,
                        validate=VALIDATORS["scorer"]),
                    "model": env.str(
                        "MODEL", defaults.model.value,
                        validate=VALIDATORS["model"]),
                    "weights_file": env.str(
                        "WEIGHTS_FILE", defaults.weights_file),
                    "metric": env.str(
                        "METRIC", defaults.metric.value,
                        validate=VALIDATORS["metric"]),
                    "sdm_weights": tuple(env.list(
                        "SDM_WEIGHTS", list(defaults.sdm_weights),
                        subcast=float, validate=VALIDATORS["sdm_weights"])),
                    "run_tag": env.str("RUN_TAG", defaults.run_tag),
                }
                for name in ("k", "top_n", "rerank_depth", "window",
                             "extraction_cap", "seed", "restarts",
                             "max_sweeps", "folds", "probes", "workers"):
                    values[name] = env.int(
                        name.upper(), getattr(defaults, name),
                        validate=VALIDATORS[name])
                for name in ("mu_entity", "mu_relationship", "mu_document",
                             "alpha", "k1", "b", "epsilon"):
                    values[name] = env.float(
                        name.upper(), getattr(defaults, name),
                        validate=VALIDATORS[name])
        except EnvError as error:
            raise exc.ConfigError(data=str(error))

        values.update({
            key: value for key, value in (overrides or {}).items()
            if value is not None
        })
        return cls.from_values(values)

    @classmethod
    def from_values(cls, values: Mapping) -> "Settings":
        names = {field.name for field in fields(cls)}
        unknown = set(values) - names
        if unknown:
            raise exc.ConfigError(data=f"unknown settings {sorted(unknown)}")

        checked = {}
        for name, value in values.items():
            if isinstance(value, (ScorerFamily, ModelName, Metric)):
                value = value.value
            validator = VALIDATORS.get(name)
            if validator is not None and value is not None:
                try:
                    validator(value)
                except ValidationError as error:
                    raise exc.ConfigError(
                        data=f"{name}={value!r}: {' '.join(error.messages)}"
                    )
            checked[name] = value

        for name, enum in (("scorer", ScorerFamily), ("model", ModelName),
                           ("metric", Metric)):
            if name in checked:
                checked[name] = enum(checked[name])
        if "sdm_weights" in checked:
            checked["sdm_weights"] = tuple(
                float(w) for w in checked["sdm_weights"]
            )

        settings = cls(**checked)
        logger.debug(f"Settings: {settings}")
        return settings

    def with_overrides(self, **overrides) -> "Settings":
        current = {field.name: getattr(self, field.name)
                   for field in fields(self)}
        current.update({k: v for k, v in overrides.items() if v is not None})
        return self.from_values(current)

    def feature_scorer(self) -> FeatureScorer:
        return FeatureScorer(self.scorer, k1=self.k1, b=self.b,
                             window=self.window)

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            metric=self.metric,
            restarts=self.restarts,
            max_sweeps=self.max_sweeps,
            epsilon=self.epsilon,
            fold_count=self.folds,
            seed=self.seed,
            probes=self.probes,
        )


