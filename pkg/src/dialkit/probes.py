"""Embedding-space diagnostics over exact-state clusters.

Given an embedding dump ({"id", "vector"} JSONL) and the manifest that
labels each id with its dial state, these probes quantify whether the space
is organized by state: same-state retrieval (Recall@1), silhouette over
state clusters, intra-state compactness versus nearest-state margin, and a
deterministic PCA projection for plotting.

States are compared by their exact serialized form; a coarse mode groups
clock states into 5-minute bins for small dumps where exact states would
all be singletons.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .datasets import read_manifest
from .errors import (
    DimensionMismatchError,
    DomainError,
    ManifestError,
    SingleClusterError,
    UnknownIdError,
)
from .states import ClockState, state_distance_normalized, state_to_json

COARSE_CLOCK_BIN_MINUTES = 5


def read_embeddings(path) -> tuple[list[str], np.ndarray]:
    """Load an embeddings.jsonl dump; returns (ids, (n, D) float array)."""
    path = Path(path)
    ids, vectors = [], []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                ids.append(obj["id"])
                vectors.append(obj["vector"])
            except Exception as exc:
                raise ManifestError(f"{path}:{lineno}: bad embedding row: {exc}") from exc
    if not ids:
        raise ManifestError(f"{path}: empty embedding dump")
    lengths = {len(v) for v in vectors}
    if len(lengths) != 1:
        raise DimensionMismatchError(f"{path}: inconsistent vector dimensions {sorted(lengths)}")
    matrix = np.asarray(vectors, dtype=np.float64)
    if not np.all(np.isfinite(matrix)):
        raise DomainError(f"{path}: embeddings contain non-finite entries")
    if len(set(ids)) != len(ids):
        raise ManifestError(f"{path}: duplicate embedding ids")
    return ids, matrix


def state_key(state, coarse: bool = False) -> str:
    """Cluster label for a state: its exact serialization, or a 5-minute bin."""
    if coarse and isinstance(state, ClockState):
        binned = (state.minutes_of_cycle // COARSE_CLOCK_BIN_MINUTES)
        return f"clock-bin-{binned:03d}"
    obj = state_to_json(state)
    return json.dumps(obj, sort_keys=True)


def _labels_for(ids, manifest, coarse: bool) -> list[str]:
    if isinstance(manifest, (str, Path)):
        _, records = read_manifest(manifest)
    else:
        _, records = manifest
    by_id = {rec.id: rec for rec in records}
    labels = []
    for i in ids:
        if i not in by_id:
            raise UnknownIdError(f"embedding id {i!r} not in manifest")
        labels.append(state_key(by_id[i].state, coarse))
    return labels


def _distance_matrix(vectors: np.ndarray, metric: str) -> np.ndarray:
    if metric == "euclidean":
        # Direct differences in row blocks: the Gram-matrix expansion loses
        # digits to cancellation, which the oracle comparisons would see.
        n, dim = vectors.shape
        out = np.empty((n, n))
        step = max(1, 4_000_000 // max(1, n * dim))
        for i0 in range(0, n, step):
            diff = vectors[i0:i0 + step, None, :] - vectors[None, :, :]
            out[i0:i0 + step] = np.sqrt(np.sum(diff * diff, axis=-1))
        return out
    if metric == "cosine":
        norms = np.linalg.norm(vectors, axis=1)
        norms = np.where(norms == 0.0, 1.0, norms)
        unit = vectors / norms[:, None]
        sim = np.clip(unit @ unit.T, -1.0, 1.0)
        return 1.0 - sim
    raise DomainError(f"metric must be euclidean or cosine, got {metric!r}")


def recall_at_1(embeddings, manifest, metric: str = "cosine",
                coarse: bool = False) -> dict:
    """Same-state retrieval: is each embedding's nearest neighbor same-state?

    Queries with no same-state partner in the dump are skipped and counted.
    Returns {"recall_at_1_pct", "n_queries", "n_skipped"}.
    """
    ids, vectors = _load_embeddings_arg(embeddings)
    if len(ids) < 2:
        raise DomainError("recall@1 needs at least two embeddings")
    labels = _labels_for(ids, manifest, coarse)
    dist = _distance_matrix(vectors, metric)
    np.fill_diagonal(dist, np.inf)
    label_arr = np.asarray(labels)

    counts: dict[str, int] = {}
    for lab in labels:
        counts[lab] = counts.get(lab, 0) + 1

    hits = queries = skipped = 0
    # Ties on distance resolve to the lowest index, matching the argmin scan.
    nearest = np.argmin(dist, axis=1)
    for i, lab in enumerate(labels):
        if counts[lab] < 2:
            skipped += 1
            continue
        queries += 1
        if label_arr[nearest[i]] == lab:
            hits += 1
    pct = 100.0 * hits / queries if queries else 0.0
    return {"recall_at_1_pct": pct, "n_queries": queries, "n_skipped": skipped}


def silhouette(embeddings, manifest, metric: str = "euclidean",
               coarse: bool = False, singleton: str = "a_zero") -> float:
    """Mean silhouette with clusters given by exact states.

    Per point: a = mean distance to its own cluster (0 for singletons under
    the default `a_zero` convention; the `zero` convention scores singleton
    points 0), b = min over other clusters of the mean distance, and the
    silhouette is (b - a) / max(a, b).
    """
    if singleton not in ("a_zero", "zero"):
        raise DomainError(f"singleton must be a_zero or zero, got {singleton!r}")
    ids, vectors = _load_embeddings_arg(embeddings)
    labels = _labels_for(ids, manifest, coarse)
    unique = sorted(set(labels))
    if len(unique) < 2:
        raise SingleClusterError("silhouette needs at least two distinct states")
    dist = _distance_matrix(vectors, metric)
    index_of = {lab: k for k, lab in enumerate(unique)}
    membership = np.asarray([index_of[lab] for lab in labels])

    # Mean distance from every point to every cluster, via group sums.
    n, k = len(labels), len(unique)
    sums = np.zeros((n, k))
    for c in range(k):
        sums[:, c] = dist[:, membership == c].sum(axis=1)
    sizes = np.bincount(membership, minlength=k).astype(np.float64)

    scores = np.empty(n)
    for i in range(n):
        c = membership[i]
        own = sizes[c] - 1.0
        if own > 0:
            a = sums[i, c] / own
        elif singleton == "a_zero":
            a = 0.0
        else:
            scores[i] = 0.0
            continue
        other = [sums[i, d] / sizes[d] for d in range(k) if d != c]
        b = min(other)
        denom = max(a, b)
        scores[i] = 0.0 if denom == 0.0 else (b - a) / denom
    return float(scores.mean())


def compactness_separability(embeddings, manifest, metric: str = "euclidean",
                             coarse: bool = False) -> dict:
    """Intra-state spread and the margin to each state's nearest other state.

    intra_state_mean_dist pools all same-state pairs.  neighbor_state_margin
    averages, over states, the mean embedding distance to the nearest other
    state group (nearest by state distance; ties averaged) minus the pooled
    intra-state mean.
    """
    ids, vectors = _load_embeddings_arg(embeddings)
    if isinstance(manifest, (str, Path)):
        _, records = read_manifest(manifest)
    else:
        _, records = manifest
    by_id = {rec.id: rec for rec in records}
    for i in ids:
        if i not in by_id:
            raise UnknownIdError(f"embedding id {i!r} not in manifest")
    labels = [state_key(by_id[i].state, coarse) for i in ids]
    states_by_label = {lab: by_id[i].state for i, lab in zip(ids, labels)}
    unique = sorted(set(labels))
    if len(unique) < 2:
        raise SingleClusterError("need at least two distinct states")
    dist = _distance_matrix(vectors, metric)
    membership = np.asarray([unique.index(lab) for lab in labels])

    intra_total, intra_pairs = 0.0, 0
    for c in range(len(unique)):
        idx = np.flatnonzero(membership == c)
        if len(idx) > 1:
            block = dist[np.ix_(idx, idx)]
            upper = block[np.triu_indices(len(idx), k=1)]
            intra_total += float(upper.sum())
            intra_pairs += upper.size
    intra_mean = intra_total / intra_pairs if intra_pairs else 0.0

    margins = []
    for c, lab in enumerate(unique):
        own_idx = np.flatnonzero(membership == c)
        gaps = []
        for d, other_lab in enumerate(unique):
            if d == c:
                continue
            gap = state_distance_normalized(states_by_label[lab],
                                            states_by_label[other_lab])
            gaps.append((gap, d))
        min_gap = min(g for g, _ in gaps)
        nearest = [d for g, d in gaps if g == min_gap]
        dists = []
        for d in nearest:
            other_idx = np.flatnonzero(membership == d)
            dists.append(float(dist[np.ix_(own_idx, other_idx)].mean()))
        margins.append(sum(dists) / len(dists))
    neighbor_margin = sum(margins) / len(margins) - intra_mean

    return {
        "intra_state_mean_dist": intra_mean,
        "neighbor_state_margin": neighbor_margin,
        "n": len(ids),
        "n_states": len(unique),
    }


def pca_project(embeddings, out_dim: int = 2) -> tuple[list[str], np.ndarray, bool]:
    """Deterministic mean-centered PCA projection.

    Returns (ids, coordinates, degenerate_flag).  Records are sorted by id
    before any arithmetic, so the projection is independent of input order.
    Component signs are fixed by making each component's largest-magnitude
    loading positive.  Zero-variance input yields all-zero coordinates and
    the degenerate flag.
    """
    ids, vectors = _load_embeddings_arg(embeddings)
    if len(ids) < out_dim:
        raise DomainError(f"need at least {out_dim} records for a {out_dim}-d projection")
    order = sorted(range(len(ids)), key=lambda i: ids[i])
    ids = [ids[i] for i in order]
    vectors = vectors[order]

    centered = vectors - vectors.mean(axis=0)
    if not np.any(centered):
        return ids, np.zeros((len(ids), out_dim)), True
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    components = vt[:out_dim]
    # Sign convention: the largest-magnitude loading of each component is
    # positive (ties broken by the first such index).
    for k in range(components.shape[0]):
        pivot = int(np.argmax(np.abs(components[k])))
        if components[k, pivot] < 0:
            components[k] = -components[k]
    coords = centered @ components.T
    if components.shape[0] < out_dim:
        pad = np.zeros((len(ids), out_dim - components.shape[0]))
        coords = np.hstack([coords, pad])
    return ids, coords, False


def _load_embeddings_arg(embeddings) -> tuple[list[str], np.ndarray]:
    if isinstance(embeddings, (str, Path)):
        return read_embeddings(embeddings)
    ids, vectors = embeddings
    return list(ids), np.asarray(vectors, dtype=np.float64)


def probe_report(embeddings, manifest, retrieval_metric: str = "cosine",
                 silhouette_metric: str = "euclidean", coarse: bool = False) -> dict:
    """Full diagnostic report over one embedding dump."""
    ids, vectors = _load_embeddings_arg(embeddings)
    retrieval = recall_at_1((ids, vectors), manifest, retrieval_metric, coarse)
    sil = silhouette((ids, vectors), manifest, silhouette_metric, coarse)
    compact = compactness_separability((ids, vectors), manifest,
                                       silhouette_metric, coarse)
    return {
        "n": len(ids),
        "dim": int(vectors.shape[1]),
        "recall_at_1_pct": retrieval["recall_at_1_pct"],
        "recall_queries": retrieval["n_queries"],
        "recall_skipped": retrieval["n_skipped"],
        "silhouette": sil,
        "intra_state_mean_dist": compact["intra_state_mean_dist"],
        "neighbor_state_margin": compact["neighbor_state_margin"],
        "n_states": compact["n_states"],
        "retrieval_metric": retrieval_metric,
        "silhouette_metric": silhouette_metric,
        "coarse_states": coarse,
    }
