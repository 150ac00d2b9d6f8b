from pathlib import Path
from typing import List
from pydantic_settings import BaseSettings, SettingsConfigDict
from pydantic import Field


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="DDSD_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Logging
    LOG_DIR: str = Field(default="logs")
    LOG_LEVEL: str = Field(default="INFO")
    HISTORY_LOG_FILE: str = Field(default="history.log")

    # Randomness
    DEFAULT_SEED: int = Field(default=13)

    # Features
    EMBEDDING_DIM: int = Field(default=50)  # 300 for fastText wiki-news vectors
    VECTOR_LIMIT: int = Field(default=0)    # 0 = no cap

    # Models
    HIDDEN_SIZE: int = Field(default=150)
    LSTM_LAYERS: int = Field(default=3)

    # Training
    BATCH_SIZE: int = Field(default=32)
    EPOCHS: int = Field(default=10)
    CLIP_NORM: float = Field(default=5.0)
    LR_MAX: float = Field(default=0.5)
    LR_MIN: float = Field(default=0.005)

    # Partitions (train, dev, test) - 10:1:1 shape
    PARTITION_FRACTIONS: str = Field(default="0.8333333333,0.0833333333,0.0833333333")

    # Self-teaching
    SSL_DD_QUANTILE: float = Field(default=0.01)
    SSL_NDD_QUANTILE: float = Field(default=0.002)
    SSL_MAX_PASSES: int = Field(default=20)
    SSL_PATIENCE: int = Field(default=3)

    # Ablation driver
    ABLATION_WORKERS: int = Field(default=1)

    @property
    def partition_fractions(self) -> List[float]:
        return [float(x.strip()) for x in self.PARTITION_FRACTIONS.split(",") if x.strip()]

    @property
    def log_dir(self) -> Path:
        return Path(self.LOG_DIR)


settings = Settings()
