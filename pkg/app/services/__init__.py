"""Service factory functions configured from the global settings."""
from app.core.config import settings
from app.services.enumeration_service import EnumerationService
from app.services.oracle_service import OracleService


def get_enumeration_service(parallel: bool = None, workers: int = None) -> EnumerationService:
    """Get an enumeration service, with optional per-call overrides."""
    return EnumerationService(
        parallel=settings.enumeration_parallel if parallel is None else parallel,
        workers=settings.enumeration_workers if workers is None else workers,
        default_mode=settings.default_mode,
    )


def get_oracle_service(max_candidates: int = None) -> OracleService:
    """Get an oracle service bounded by the configured search-space limit."""
    return OracleService(
        settings.oracle_max_candidates if max_candidates is None else max_candidates
    )
