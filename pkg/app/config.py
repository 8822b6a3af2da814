from pydantic_settings import BaseSettings
from functools import lru_cache


class Settings(BaseSettings):
    log_level: str = "INFO"
    api_v1_prefix: str = "/api/v1"
    host: str = "0.0.0.0"
    port: int = 8000

    # Where the HTTP service keeps built .map files
    map_dir: str = "maps"
    # devNumber=N in a stream config resolves to <frames_root>/video<N>
    frames_root: str = "frames"

    # Morphing defaults, overridable per command
    block_radius: int = 4
    max_displacement: int = 32
    smoothing_weight: float = 15.0
    iterations: int = 64

    class Config:
        env_file = ".env"
        env_prefix = "HOLOQUILT_"
        case_sensitive = False


@lru_cache
def get_settings() -> Settings:
    return Settings()
