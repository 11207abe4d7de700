"""Persistent, content-validated cache of generated graphs and embeddings.

Layout under the cache root:

    <cache_dir>/scgp/v1/<n>/graph.json
    <cache_dir>/scgp/v1/<n>/<config_hash>.emb
    <cache_dir>/scgp/v1/manifest.json

Every artifact is written to a temporary name and atomically renamed, so a
reader never sees a partial file. Validity is content-addressed: the
manifest stores a SHA-256 per file and anything that fails the check is
reported and rebuilt, never trusted. Concurrent writers race benignly --
builds are deterministic, so whichever rename wins leaves identical bytes.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from datetime import datetime, timezone
from pathlib import Path

from .coset_enum import SchreierGraph, enumerate_cosets
from .embedder import EmbeddingMatrix, PropagationConfig, gcn_propagate

logger = logging.getLogger("scgp.cache")

CACHE_ENV_VAR = "SCGP_CACHE"
_MANIFEST_FORMAT = "scgp-cache-manifest"
_KEY_FORMAT_VERSION = 1


def default_cache_dir() -> Path:
    """SCGP_CACHE if set, else the XDG cache home (layout adds scgp/v1)."""
    env = os.environ.get(CACHE_ENV_VAR)
    if env:
        return Path(env)
    xdg = os.environ.get("XDG_CACHE_HOME")
    return Path(xdg) if xdg else Path.home() / ".cache"


def config_hash(config: PropagationConfig) -> str:
    """Stable digest of the logical embedding key, format-version tagged."""
    payload = json.dumps(
        {
            "format_version": _KEY_FORMAT_VERSION,
            "layers": config.layers,
            "hidden_dim": config.hidden_dim,
            "embed_dim": config.embed_dim,
            "seed": config.seed,
            "activation": config.activation,
        },
        sort_keys=True,
        separators=(",", ":"),
    ).encode("ascii")
    return hashlib.sha256(payload).hexdigest()


def _atomic_write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".tmp")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise


class CacheStore:
    """get-or-build access to Schreier graphs and embedding matrices.

    build counters (graph_builds / embedding_builds) exist so callers and
    tests can distinguish hits from rebuilds. read_only stores never write;
    misses are computed and returned without persisting.
    """

    def __init__(self, cache_dir: str | Path | None = None, read_only: bool = False):
        self.root = Path(cache_dir) if cache_dir is not None else default_cache_dir()
        self.base = self.root / "scgp" / "v1"
        self.manifest_path = self.base / "manifest.json"
        self.read_only = read_only
        self.graph_builds = 0
        self.embedding_builds = 0

    # -- manifest ---------------------------------------------------------

    def _load_manifest(self) -> list[dict]:
        try:
            payload = json.loads(self.manifest_path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError):
            return []
        if payload.get("format") != _MANIFEST_FORMAT or payload.get("version") != 1:
            return []
        entries = payload.get("entries")
        return entries if isinstance(entries, list) else []

    def _find_entry(self, n: int, cfg_hash: str | None) -> dict | None:
        for entry in self._load_manifest():
            key = entry.get("key", {})
            if key.get("n") == n and key.get("config_hash") == cfg_hash:
                return entry
        return None

    def _put_entry(self, entry: dict) -> None:
        key = entry["key"]
        entries = [
            e
            for e in self._load_manifest()
            if e.get("key", {}).get("n") != key["n"]
            or e.get("key", {}).get("config_hash") != key["config_hash"]
        ]
        entries.append(entry)
        payload = {"format": _MANIFEST_FORMAT, "version": 1, "entries": entries}
        _atomic_write(self.manifest_path, json.dumps(payload, indent=2).encode("utf-8"))

    def manifest_entry(self, n: int, config: PropagationConfig | None = None) -> dict | None:
        """The manifest record for a graph (config=None) or embedding key."""
        return self._find_entry(n, config_hash(config) if config is not None else None)

    # -- artifacts --------------------------------------------------------

    def _graph_path(self, n: int) -> Path:
        return self.base / str(n) / "graph.json"

    def _embedding_path(self, n: int, cfg_hash: str) -> Path:
        return self.base / str(n) / f"{cfg_hash}.emb"

    def _validated_bytes(self, entry: dict | None, path: Path) -> bytes | None:
        if entry is None:
            return None
        if not path.is_file():
            return None
        data = path.read_bytes()
        if hashlib.sha256(data).hexdigest() != entry.get("content_hash"):
            logger.warning("cache entry %s failed its content hash; rebuilding", path)
            return None
        return data

    def get_or_build_graph(self, n: int) -> SchreierGraph:
        """Cached Schreier graph for n; built, stored and indexed on miss."""
        from . import io_cli  # deferred: io_cli imports this module's types

        path = self._graph_path(n)
        data = self._validated_bytes(self._find_entry(n, None), path)
        if data is not None:
            try:
                graph = io_cli.graph_from_json_bytes(data)
                if isinstance(graph, SchreierGraph) and graph.n == n:
                    return graph
                logger.warning("cache entry %s holds the wrong graph; rebuilding", path)
            except ValueError as exc:
                logger.warning("cache entry %s is invalid (%s); rebuilding", path, exc)

        graph = enumerate_cosets(n)
        self.graph_builds += 1
        if not self.read_only:
            payload = io_cli.graph_to_json_bytes(graph)
            _atomic_write(path, payload)
            self._put_entry(
                {
                    "key": {"n": n, "config_hash": None},
                    "graph_file": str(path.relative_to(self.base)),
                    "embedding_file": None,
                    "created_at": datetime.now(timezone.utc).isoformat(),
                    "content_hash": hashlib.sha256(payload).hexdigest(),
                }
            )
        return graph

    def get_or_build_embeddings(self, n: int, config: PropagationConfig) -> EmbeddingMatrix:
        """Cached embedding matrix for (n, config).

        Values are float32 on disk; the miss path quantizes before returning
        so hits and misses are observably identical.
        """
        from . import io_cli

        cfg_hash = config_hash(config)
        path = self._embedding_path(n, cfg_hash)
        data = self._validated_bytes(self._find_entry(n, cfg_hash), path)
        if data is not None:
            try:
                z = io_cli.embedding_from_bytes(data, hidden_dim=config.hidden_dim)
                if z.meta.n == n and z.meta.seed == config.seed:
                    return z
                logger.warning("cache entry %s header mismatch; rebuilding", path)
            except ValueError as exc:
                logger.warning("cache entry %s is invalid (%s); rebuilding", path, exc)

        graph = self.get_or_build_graph(n)
        computed = gcn_propagate(graph, config)
        self.embedding_builds += 1
        payload = io_cli.embedding_to_bytes(computed)
        if not self.read_only:
            _atomic_write(path, payload)
            self._put_entry(
                {
                    "key": {"n": n, "config_hash": cfg_hash},
                    "graph_file": str(self._graph_path(n).relative_to(self.base)),
                    "embedding_file": str(path.relative_to(self.base)),
                    "created_at": datetime.now(timezone.utc).isoformat(),
                    "content_hash": hashlib.sha256(payload).hexdigest(),
                }
            )
        return io_cli.embedding_from_bytes(payload, hidden_dim=config.hidden_dim)

    def config_hash(self, config: PropagationConfig) -> str:
        return config_hash(config)


def get_or_build_graph(n: int, cache_dir: str | Path | None = None) -> SchreierGraph:
    return CacheStore(cache_dir).get_or_build_graph(n)


def get_or_build_embeddings(
    n: int, config: PropagationConfig, cache_dir: str | Path | None = None
) -> EmbeddingMatrix:
    return CacheStore(cache_dir).get_or_build_embeddings(n, config)
