"""
SLEP constants pipeline.

Coordinates the reduced profile, the slow spectral basis and the fast
spectra that produce a SlepConstants, with a content-addressed cache in front.
"""
from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass
from pathlib import Path
from time import perf_counter
from typing import Literal, Sequence

from sqlalchemy.exc import SQLAlchemyError

from app import __version__
from app.config import settings
from app.db.repository import SqlAlchemyCacheRepository
from app.db.session import init_db, session_scope
from app.models import SlepConstants
from app.schemas import ModelParams
from app.services.reduced_profile import solve_reduced
from app.services.spectral import build_slep_constants, eig_slow
from app.utils.file_operations import canonical_json, cleanup_temp_file, load_arrays, save_arrays

logger = logging.getLogger(__name__)

CONSTANTS_KIND = "slep_constants"


@dataclass(slots=True)
class PipelineStats:
    hits: int = 0
    misses: int = 0
    computations: int = 0

    def to_dict(self) -> dict:
        return {"hits": self.hits, "misses": self.misses, "computations": self.computations}


class ConstantsPipeline:
    """Computes SlepConstants for (a, sigma, d, ell) and caches them by key hash."""

    def __init__(
        self,
        *,
        cache_dir: Path | None = None,
        cache_enabled: bool | None = None,
        kappa_method: Literal["extrapolated", "inner"] = "extrapolated",
        profile_nodes: int | None = None,
        slow_nodes: int | None = None,
        slow_modes: int | None = None,
        eps_samples: Sequence[float] | None = None,
        tail_factor: int | None = None,
    ) -> None:
        self.cache_dir = Path(cache_dir or settings.cache_dir)
        self.cache_enabled = settings.cache_enabled if cache_enabled is None else cache_enabled
        self.kappa_method = kappa_method
        self.profile_nodes = profile_nodes or settings.profile_nodes
        self.slow_nodes = slow_nodes or settings.slow_nodes
        self.slow_modes = slow_modes or settings.slow_modes
        self.eps_samples = tuple(eps_samples or settings.eps_sample_values)
        self.tail_factor = tail_factor or settings.tail_factor
        self.stats = PipelineStats()

    def key_payload(self, params: ModelParams) -> dict:
        return {
            "kind": CONSTANTS_KIND,
            "a": params.a,
            "sigma": params.sigma,
            "d": params.d,
            "ell": params.ell,
            "profile_nodes": self.profile_nodes,
            "slow_nodes": self.slow_nodes,
            "slow_modes": self.slow_modes,
            "eps_samples": list(self.eps_samples) if self.kappa_method == "extrapolated" else [],
            "tail_factor": self.tail_factor,
            "kappa_method": self.kappa_method,
            "version": __version__,
        }

    def cache_key(self, params: ModelParams) -> tuple[str, str]:
        payload = canonical_json(self.key_payload(params))
        return hashlib.sha256(payload.encode("utf-8")).hexdigest(), payload

    def run(self, params: ModelParams) -> SlepConstants:
        key, payload = self.cache_key(params)
        if self.cache_enabled:
            cached = self._load(key)
            if cached is not None:
                self.stats.hits += 1
                logger.info("SLEP constants cache hit %s", key[:12])
                return cached
            self.stats.misses += 1

        constants = self._compute(params)
        if self.cache_enabled:
            self._store(key, payload, constants)
        return constants

    def _compute(self, params: ModelParams) -> SlepConstants:
        started = perf_counter()
        profile = solve_reduced(params, nodes=self.profile_nodes)
        basis = eig_slow(profile, N_target=self.slow_modes, nodes=self.slow_nodes)
        constants = build_slep_constants(
            params,
            kappa_method=self.kappa_method,
            profile=profile,
            basis=basis,
            eps_samples=self.eps_samples,
            tail_factor=self.tail_factor,
        )
        self.stats.computations += 1
        logger.info("Computed SLEP constants for d=%.6g ell=%.6g in %.2fs", params.d, params.ell, perf_counter() - started)
        return constants

    def _blob_path(self, key: str) -> Path:
        return self.cache_dir / "blobs" / f"{key}.npz"

    def _load(self, key: str) -> SlepConstants | None:
        try:
            init_db(self.cache_dir)
            with session_scope() as session:
                repository = SqlAlchemyCacheRepository(session)
                record = repository.get(key)
                if record is None:
                    return None
                blob = Path(record.blob_path)
                if not blob.exists():
                    logger.warning("Cache row %s has no blob at %s; recomputing", key[:12], blob)
                    return None
                constants = SlepConstants.from_arrays(load_arrays(blob))
                repository.record_hit(key)
                return constants
        except (SQLAlchemyError, OSError, KeyError, ValueError) as exc:
            logger.warning("Cache lookup failed for %s: %s", key[:12], exc)
            return None

    def _store(self, key: str, payload: str, constants: SlepConstants) -> None:
        blob = self._blob_path(key)
        try:
            save_arrays(blob, constants.to_arrays())
            init_db(self.cache_dir)
            with session_scope() as session:
                SqlAlchemyCacheRepository(session).upsert(
                    key=key,
                    kind=CONSTANTS_KIND,
                    params_json=payload,
                    blob_path=str(blob.resolve()),
                )
            logger.debug("Cached SLEP constants %s at %s", key[:12], blob)
        except (SQLAlchemyError, OSError) as exc:
            logger.warning("Failed to cache SLEP constants %s: %s", key[:12], exc)
            cleanup_temp_file(blob)


def cache_entries(cache_dir: Path | None = None) -> list[dict]:
    """Index rows of the cache, oldest first."""
    init_db(cache_dir)
    with session_scope() as session:
        return [
            {"key": record.key, "kind": record.kind, "hits": record.hits, "blob_path": record.blob_path}
            for record in SqlAlchemyCacheRepository(session).entries()
        ]


__all__ = ["CONSTANTS_KIND", "PipelineStats", "ConstantsPipeline", "cache_entries"]
