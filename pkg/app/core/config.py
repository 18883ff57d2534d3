from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_file=".env", case_sensitive=True)

    # App Settings
    PROJECT_NAME: str = "Sphere-Plate Casimir"
    VERSION: str = "1.0.0"
    LOG_LEVEL: str = "INFO"

    # Default run-config file used when the CLI gets no --config
    CASIMIR_CONFIG: str = ""

    # Sweep worker pool (0 = machine parallelism)
    DEFAULT_JOBS: int = 0

    # Asymptotic engine quadrature
    PHI_NODES: int = 64
    T_NODES: int = 48
    S_MAX: int = 2000
    REL_TOL_LEADING: float = 1e-7
    REL_TOL_NTLO: float = 1e-6

    # Graded rules used when a Drude medium is present
    GRADED_PANELS: int = 12
    PANEL_NODES: int = 16

    # PFA Lifshitz route
    PFA_U_NODES: int = 64
    PFA_W_NODES: int = 64
    PFA_V_NODES: int = 48
    PFA_MAX_DEPTH: int = 6

    # Exact oracle
    ORACLE_XI_NODES: int = 48
    ORACLE_THETA_NODES: int = 40
    ORACLE_L_MAX_CAP: int = 120
    ORACLE_TOLERANCE: float = 1e-4

    # Output
    FLOAT_DIGITS: int = 17


settings = Settings()


def get_settings():
    """Compatibility helper for code that imports `get_settings`.
    """
    return settings
