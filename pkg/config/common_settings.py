import logging
from pydantic_settings import BaseSettings, SettingsConfigDict
from pydantic import field_validator, Field, model_validator
class Settings(BaseSettings):
    #enumeration guards
    MAX_PATHS: int = Field(default=1_000_000, ge=1)
    MAX_CYCLE_SPACE_DIMENSION: int = Field(default=20, ge=1, le=26)

    #corpus generation
    CORPUS_MAX_N: int = Field(default=6, ge=3, le=7)
    ALLOW_N7: bool = False
    TIGHTNESS_MAX_N: int = Field(default=7, ge=3)

    #randomness: every random choice in the suite derives from this seed
    SEED: int = Field(default=20240917, ge=0)

    #theorem suite sizes
    MERGE_SAMPLES: int = Field(default=1000, ge=0)
    RANDOM_INSTANCES: int = Field(default=200, ge=1)
    CLOSURE_SCAN_ORDERS: int = Field(default=10, ge=1)

    #suite concurrency (Chain.batch max_concurrency)
    MAX_WORKERS: int = Field(default=4, ge=1, le=64)

    #directories and logging
    OUTPUT_DIR: str = "reports"
    LOG_LEVEL: str = "INFO"

    # load env variables from .env file
    model_config = SettingsConfigDict(env_file=".env", extra="ignore")

    @field_validator("OUTPUT_DIR", "LOG_LEVEL")
    @classmethod
    def validate_not_blank(cls, v, info):
        if not v.strip():
            raise ValueError(f"{info.field_name} cannot be empty")
        return v

    @field_validator("LOG_LEVEL")
    @classmethod
    def validate_log_level(cls, v):
        level = v.strip().upper()
        if not isinstance(logging.getLevelName(level), int):
            raise ValueError(f"LOG_LEVEL must be a logging level name (got {v!r})")
        return level

    @model_validator(mode="after")
    def validate_corpus_bounds(self):
        # n = 7 corpora hold 468 graphs; they are opt-in
        if self.CORPUS_MAX_N == 7 and not self.ALLOW_N7:
            raise ValueError(
                "CORPUS_MAX_N=7 requires ALLOW_N7=true "
                f"(got CORPUS_MAX_N={self.CORPUS_MAX_N})."
            )

        if self.TIGHTNESS_MAX_N > 8:
            raise ValueError(
                f"TIGHTNESS_MAX_N is capped at 8 (got {self.TIGHTNESS_MAX_N})."
            )

        return self

settings = Settings()
