"""PCA and single-linkage clustering for separating circuit-template families."""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import numkit
from .mlpipe import PAD_SENTINEL, Dataset, gen_raw, RAW_MOVES

DEFAULT_THRESHOLD = math.pi / 2


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray = field(repr=False)
    components: np.ndarray = field(repr=False)  # features x k, orthonormal columns
    explained: np.ndarray

    @property
    def k(self) -> int:
        return self.components.shape[1]


def pca_fit(X, k: int) -> PcaModel:
    """Top-``k`` eigenvectors of the covariance ``(1/N) Xc^T Xc``."""
    X = numkit._as_matrix(np.asarray(X, dtype=np.float64), "X")
    N, d = X.shape
    if N < 2:
        raise ValueError("PCA needs at least two samples")
    if not 1 <= k <= d:
        raise ValueError(f"k must lie in 1..{d}, got {k}")
    mean = X.mean(axis=0)
    Xc = X - mean
    cov = Xc.T @ Xc / N
    vals, vecs = numkit.eig_sym(0.5 * (cov + cov.T))
    return PcaModel(mean, vecs[:, :k], np.clip(vals, 0.0, None))


def pca_project(model: PcaModel, X) -> np.ndarray:
    return (np.asarray(X, dtype=np.float64) - model.mean) @ model.components


@dataclass(frozen=True)
class Clustering:
    assignments: np.ndarray
    sizes: np.ndarray
    linkage_threshold: float

    @property
    def count(self) -> int:
        return self.sizes.size

    def members(self, cid: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == cid)


def _mst(X: np.ndarray):
    """Prim's algorithm on the complete Euclidean graph in O(N^2) time, O(N) memory.

    Returns edges as (parent, child, length) in insertion order.
    """
    N = X.shape[0]
    best = np.full(N, np.inf)
    parent = np.zeros(N, dtype=np.int64)
    in_tree = np.zeros(N, dtype=bool)
    edges = []
    cur = 0
    in_tree[0] = True
    for _ in range(N - 1):
        d = np.sqrt(np.sum((X - X[cur]) ** 2, axis=1))
        closer = (d < best) & ~in_tree
        best[closer] = d[closer]
        parent[closer] = cur
        cand = np.where(in_tree, np.inf, best)
        nxt = int(np.argmin(cand))  # first index wins ties
        edges.append((int(parent[nxt]), nxt, float(best[nxt])))
        in_tree[nxt] = True
        cur = nxt
    return edges


def _find(root: np.ndarray, i: int) -> int:
    while root[i] != i:
        root[i] = root[root[i]]
        i = root[i]
    return i


def hcluster(X, threshold: float = DEFAULT_THRESHOLD) -> Clustering:
    """Single-linkage agglomerative clustering cut at ``threshold``.

    Two samples share a cluster iff a chain of neighbours at Euclidean
    distance <= threshold links them. Cluster ids are numbered by their
    lowest sample index.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    N = X.shape[0]
    if N < 1:
        raise ValueError("need at least one sample")
    root = np.arange(N)
    for a, b, length in _mst(X):
        if length <= threshold:
            ra, rb = _find(root, a), _find(root, b)
            root[max(ra, rb)] = min(ra, rb)
    labels = np.array([_find(root, i) for i in range(N)])
    # roots are the minimum index of each component, so sorted roots give the id order
    _, dense = np.unique(labels, return_inverse=True)
    return Clustering(dense.astype(np.int64), np.bincount(dense), float(threshold))


def filter_dominant(ds: Dataset, clustering: Clustering, drop_constant: bool = False) -> Dataset:
    """Rows of the largest cluster, without columns that are padding in all of them.

    ``drop_constant`` also removes every column that does not vary inside
    the kept cluster.
    """
    if clustering.assignments.size != len(ds):
        raise ValueError("clustering does not match the dataset")
    largest = clustering.sizes.max()
    top = np.flatnonzero(clustering.sizes == largest)
    if top.size > 1:
        warnings.warn(f"clusters {top.tolist()} tie for largest; keeping cluster {int(top[0])}",
                      stacklevel=2)
    rows = clustering.members(int(top[0]))
    kept = ds.subset(rows)
    sentinel = ds.meta.get("sentinel", PAD_SENTINEL)
    X = kept.X
    keep_cols = ~np.all(X == sentinel, axis=0)
    if drop_constant:
        keep_cols &= ~np.all(X == X[0], axis=0)
    meta = dict(kept.meta)
    meta["kept_rows"] = rows.tolist()
    meta["kept_columns"] = np.flatnonzero(keep_cols).tolist()
    return Dataset(X[:, keep_cols], kept.Y, meta)


@dataclass(frozen=True)
class ShareRow:
    n: int
    samples: int
    clusters: int
    largest: int

    @property
    def share(self) -> float:
        return self.largest / self.samples


def cluster_share_report(n_range=(2, 3), samples: int = 200, seed: int = 0,
                         mutation_prob: float = 0.25, moves=RAW_MOVES,
                         threshold: float = DEFAULT_THRESHOLD) -> list[ShareRow]:
    """Largest-cluster fraction of raw data for each qubit count."""
    out = []
    for n in n_range:
        ds = gen_raw(n, samples, seed=seed, mutation_prob=mutation_prob, moves=moves)
        c = hcluster(ds.X, threshold)
        out.append(ShareRow(n, samples, c.count, int(c.sizes.max())))
    return out


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def share_csv(rows: list[ShareRow]) -> str:
    return _csv(["n", "samples", "clusters", "largest", "share"],
                [[r.n, r.samples, r.clusters, r.largest, format(r.share, ".17g")] for r in rows])


def assignments_csv(clustering: Clustering, projected: np.ndarray) -> str:
    p = np.asarray(projected, dtype=np.float64)
    if p.ndim != 2 or p.shape[0] != clustering.assignments.size:
        raise ValueError("projection does not match the clustering")
    cols = [f"pc{i + 1}" for i in range(p.shape[1])]
    return _csv(["cluster_id"] + cols,
                [[int(c)] + [format(v, ".17g") for v in row] for c, row in zip(clustering.assignments, p)])


def sizes_csv(clustering: Clustering) -> str:
    return _csv(["cluster_id", "size"], [[i, int(s)] for i, s in enumerate(clustering.sizes)])
