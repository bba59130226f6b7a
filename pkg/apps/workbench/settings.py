"""Settings loader using Pydantic BaseSettings."""
import sys
from typing import Literal

from pydantic_settings import BaseSettings, SettingsConfigDict

from errors import DomainError


class Settings(BaseSettings):
    """Workbench configuration loaded from environment variables."""

    model_config = SettingsConfigDict(env_file=".env", case_sensitive=True, extra="ignore")

    LOG_LEVEL: str = "INFO"

    # Greedy behaviour
    TIE_BREAK_POLICY: Literal["highest_site_index", "lowest_site_index"] = "highest_site_index"

    # Numerics
    FLOAT_TOLERANCE: float = 1e-9
    BRUTE_FORCE_MAX_REQUESTS: int = 8
    FULL_CHECK_MAX_REQUESTS: int = 12000

    # Campaigns
    CAMPAIGN_WORKERS: int = 4
    CAMPAIGN_INSTANCES: int = 500
    CAMPAIGN_MAX_SITES: int = 50
    CAMPAIGN_MAX_REQUESTS: int = 200
    CAMPAIGN_CAPACITY_MAX: int = 5
    MASTER_SEED: int = 0

    # Lower-bound family
    LOWER_BOUND_EPSILON: str = "0"

    def validate_required_fields(self) -> None:
        """Collect every configuration problem and raise them together."""
        errors = []

        if self.LOG_LEVEL.upper() not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            errors.append(f"LOG_LEVEL must be a logging level name (got {self.LOG_LEVEL!r})")
        if not 0 < self.FLOAT_TOLERANCE < 1e-3:
            errors.append("FLOAT_TOLERANCE must lie in (0, 1e-3)")
        if self.BRUTE_FORCE_MAX_REQUESTS < 1:
            errors.append("BRUTE_FORCE_MAX_REQUESTS must be positive")
        if self.FULL_CHECK_MAX_REQUESTS < 1:
            errors.append("FULL_CHECK_MAX_REQUESTS must be positive")
        if self.CAMPAIGN_WORKERS < 1:
            errors.append("CAMPAIGN_WORKERS must be positive")
        if self.CAMPAIGN_MAX_SITES < 1 or self.CAMPAIGN_MAX_REQUESTS < 0:
            errors.append("CAMPAIGN_MAX_SITES must be positive and CAMPAIGN_MAX_REQUESTS non-negative")
        if self.CAMPAIGN_CAPACITY_MAX < 1:
            errors.append("CAMPAIGN_CAPACITY_MAX must be positive")

        if errors:
            raise DomainError("invalid configuration: " + "; ".join(errors), context={"errors": errors})

    def print_summary(self, stream=sys.stderr) -> None:
        """Print the effective configuration."""
        print("=" * 70, file=stream)
        print("ONLINE TRANSPORTATION WORKBENCH", file=stream)
        print("=" * 70, file=stream)
        print(f"  Tie-break policy: {self.TIE_BREAK_POLICY}", file=stream)
        print(f"  Float tolerance: {self.FLOAT_TOLERANCE:g} (relative)", file=stream)
        print(f"  Brute-force limit: {self.BRUTE_FORCE_MAX_REQUESTS} requests", file=stream)
        print(f"  Full-check limit: {self.FULL_CHECK_MAX_REQUESTS} requests", file=stream)
        print(f"\n  CAMPAIGNS:", file=stream)
        print(f"    - Workers: {self.CAMPAIGN_WORKERS}", file=stream)
        print(f"    - Instances per k: {self.CAMPAIGN_INSTANCES}", file=stream)
        print(f"    - Max sites / requests: {self.CAMPAIGN_MAX_SITES} / {self.CAMPAIGN_MAX_REQUESTS}", file=stream)
        print(f"    - Capacity max: {self.CAMPAIGN_CAPACITY_MAX}", file=stream)
        print(f"    - Master seed: {self.MASTER_SEED}", file=stream)
        print(f"\n  LOWER BOUND:", file=stream)
        print(f"    - Epsilon: {self.LOWER_BOUND_EPSILON}", file=stream)
        print("=" * 70, file=stream)
