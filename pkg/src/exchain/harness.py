"""Replica running with reproducible parallelism.

Every replica owns an RNG stream derived from (master seed, replica
index) alone, so the sample set is a pure function of the seed and the
replica count.  Workers only partition the index range; results are
merged in index order, never re-associated, which makes output files
bit-identical across worker counts.

Tasks must be module-level callables task(rng, params) returning a flat
tuple of floats of fixed arity (process pools pickle tasks by reference).
"""

from __future__ import annotations

import hashlib
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy

from . import __version__

__all__ = [
    "SeedSpec",
    "ReplicaError",
    "ReplicaRun",
    "run_replicas",
    "build_manifest",
    "replay",
    "ReplayMismatch",
]

DEFAULT_CHUNK = 4096
# chunk digests are truncated sha256; plenty for corruption checks
CHUNK_DIGEST_HEX = 16


@dataclass(frozen=True)
class SeedSpec:
    """Master seed plus the per-replica stream derivation."""

    master_seed: int

    def __post_init__(self):
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must fit in 64 bits")

    def stream(self, index: int) -> np.random.Generator:
        """Independent generator for one replica.

        SeedSequence feeds (master_seed, index) through its 128-bit mixer,
        so streams are a pure function of the pair and adjacent indices are
        uncorrelated.
        """
        if index < 0:
            raise ValueError("replica index must be nonnegative")
        seq = np.random.SeedSequence(entropy=self.master_seed, spawn_key=(index,))
        return np.random.Generator(np.random.PCG64(seq))


class ReplicaError(RuntimeError):
    """A replica task raised; carries the failing index for replay."""

    def __init__(self, index: int, master_seed: int, cause: str):
        super().__init__(
            "replica %d (master seed %d) failed: %s" % (index, master_seed, cause)
        )
        self.index = index
        self.master_seed = master_seed
        self.cause = cause


def _run_chunk(task, params, master_seed: int, start: int, stop: int) -> np.ndarray:
    seeds = SeedSpec(master_seed)
    rows = []
    for i in range(start, stop):
        try:
            rows.append(task(seeds.stream(i), params))
        except Exception as exc:  # noqa: BLE001 - re-raised with replica context
            raise ReplicaError(i, master_seed, repr(exc)) from exc
    out = np.asarray(rows, dtype=float)
    if out.ndim == 1:
        out = out.reshape(len(rows), 1)
    return out


def _chunk_digest(arr: np.ndarray) -> str:
    return hashlib.sha256(arr.tobytes()).hexdigest()[:CHUNK_DIGEST_HEX]


@dataclass
class ReplicaRun:
    samples: np.ndarray
    chunk_size: int
    chunk_digests: list[str]
    sample_digest: str
    elapsed_s: float


def run_replicas(task, count: int, seeds: SeedSpec, workers: int = 1,
                 params=None, chunk_size: int = DEFAULT_CHUNK,
                 progress=None) -> ReplicaRun:
    """Run count replicas of task and merge their rows in index order.

    The chunk layout depends only on count and chunk_size, so chunk
    digests (and therefore manifests) are worker-count invariant too.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if chunk_size < 1:
        raise ValueError("chunk_size must be >= 1")
    t0 = time.perf_counter()
    bounds = [(s, min(s + chunk_size, count)) for s in range(0, count, chunk_size)]
    chunks: list[np.ndarray | None] = [None] * len(bounds)
    if workers <= 1:
        for k, (start, stop) in enumerate(bounds):
            chunks[k] = _run_chunk(task, params, seeds.master_seed, start, stop)
            if progress is not None:
                progress(stop, count)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {
                pool.submit(_run_chunk, task, params, seeds.master_seed, start, stop): k
                for k, (start, stop) in enumerate(bounds)
            }
            done = 0
            for fut, k in futures.items():
                chunks[k] = fut.result()
                done += bounds[k][1] - bounds[k][0]
                if progress is not None:
                    progress(done, count)
    digests = [_chunk_digest(c) for c in chunks]
    samples = np.concatenate(chunks, axis=0)
    total = hashlib.sha256(samples.tobytes()).hexdigest()
    return ReplicaRun(samples, chunk_size, digests, total,
                      time.perf_counter() - t0)


def _versions() -> dict:
    return {
        "python": sys.version.split()[0],
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "exchain": __version__,
    }


def build_manifest(run: ReplicaRun, seeds: SeedSpec, task_name: str,
                   columns: list[str], config_digest: str,
                   results: dict | None = None) -> dict:
    if run.samples.shape[1] != len(columns):
        raise ValueError("column names do not match sample width")
    return {
        "format": 1,
        "task": task_name,
        "columns": list(columns),
        "count": int(run.samples.shape[0]),
        "chunk_size": run.chunk_size,
        "master_seed": seeds.master_seed,
        "config_digest": config_digest,
        "sample_digest": run.sample_digest,
        "chunk_digests": run.chunk_digests,
        "elapsed_s": round(run.elapsed_s, 3),
        "versions": _versions(),
        "results": {} if results is None else results,
    }


class ReplayMismatch(RuntimeError):
    pass


def replay(manifest: dict, index: int, task, params=None,
           config_digest: str | None = None, force: bool = False) -> np.ndarray:
    """Recompute one replica of a finished run and verify it.

    The chunk containing the index is recomputed and checked against the
    recorded chunk digest; the replica's row is returned.  Version or
    config drift aborts unless force is set.
    """
    if not 0 <= index < manifest["count"]:
        raise ValueError("index outside the recorded run")
    if not force:
        drift = {k: (v, _versions().get(k)) for k, v in manifest["versions"].items()
                 if _versions().get(k) != v}
        if drift:
            raise ReplayMismatch("version drift: %r" % (drift,))
        if config_digest is not None and config_digest != manifest["config_digest"]:
            raise ReplayMismatch("config digest mismatch")
    size = manifest["chunk_size"]
    k = index // size
    start = k * size
    stop = min(start + size, manifest["count"])
    chunk = _run_chunk(task, params, manifest["master_seed"], start, stop)
    got = _chunk_digest(chunk)
    if got != manifest["chunk_digests"][k]:
        raise ReplayMismatch(
            "chunk %d digest %s does not match recorded %s"
            % (k, got, manifest["chunk_digests"][k])
        )
    return chunk[index - start]
