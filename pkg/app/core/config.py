from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Configuración centralizada del laboratorio"""

    # Application
    APP_NAME: str = "gdnls-lab"
    APP_VERSION: str = "1.0.0"
    LOG_LEVEL: str = "INFO"

    # Output
    OUT: str = "runs"  # raíz de los directorios de corrida (GDNLS_LAB_OUT)
    MANIFEST_SCHEMA: int = 1

    # Sweeps
    DEFAULT_JOBS: int = 1
    MAX_JOBS: int = 8

    # Numerical guards
    BLOWUP_FACTOR: float = 1e3
    BOUNDARY_WARN: float = 1e-8
    SOLITON_BOUNDARY_MAX: float = 1e-10

    model_config = SettingsConfigDict(
        env_prefix="GDNLS_LAB_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore",
    )


# Instancia global de settings
settings = Settings()
