"""Datasets, linear regression by plateau-schedule gradient descent, metrics
and weight-lattice analysis.

The regression direction is circuit parameters -> diagonal phases. On
pretty data that map is exactly the ansatz phase map, so a converged model's
weights land on the +-1/2 lattice.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field
from itertools import count
from pathlib import Path

import numpy as np

from . import diagonal, numkit
from ._runtime import parallel_map, rng_for
from .circuit import Circuit, diag_phases, rz, x as x_gate
from .sequences import SequenceKind

PAD_SENTINEL = 1000.0
DEFAULT_EPSILON = 0.025
MAX_PRETTY_EPSILON = 0.1

# raw-stage generator constants
RAW_PHASE_HALF_WIDTH = 0.25
RAW_SPLIT_HALF_WIDTH = 0.1
RAW_FIXED_ANGLE = math.pi / 8
RAW_MOVES = ("pi_shift", "x_conj")

_STREAM_PRETTY = 1
_STREAM_RAW = 2
_STREAM_INIT = 3
_STREAM_SHUFFLE = 4
_STREAM_SPLIT = 5


class ScheduleError(ValueError):
    pass


class ScheduleWarning(UserWarning):
    pass


class TrainingDiverged(ArithmeticError):
    def __init__(self, epoch: int, loss: float):
        super().__init__(f"training diverged at epoch {epoch} (loss {loss})")
        self.epoch = epoch
        self.loss = loss


# ---------------------------------------------------------------- data


@dataclass(frozen=True)
class Dataset:
    X: np.ndarray = field(repr=False)
    Y: np.ndarray = field(repr=False)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        X = np.array(self.X, dtype=np.float64, ndmin=2)
        Y = np.array(self.Y, dtype=np.float64, ndmin=2)
        if X.ndim != 2 or Y.ndim != 2:
            raise ValueError("X and Y must be 2-D sample-major arrays")
        if X.shape[0] != Y.shape[0]:
            raise ValueError(f"X has {X.shape[0]} rows but Y has {Y.shape[0]}")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
            raise ValueError("dataset values must be finite")
        X.setflags(write=False)
        Y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)
        object.__setattr__(self, "meta", dict(self.meta))

    def __len__(self) -> int:
        return self.X.shape[0]

    def subset(self, rows) -> "Dataset":
        rows = np.asarray(rows, dtype=np.int64)
        meta = dict(self.meta)
        for key in ("templates", "lengths"):
            if key in meta:
                meta[key] = [meta[key][i] for i in rows]
        return Dataset(self.X[rows], self.Y[rows], meta)

    def split(self, test_fraction: float = 0.2, seed: int = 0) -> tuple["Dataset", "Dataset"]:
        if not 0.0 < test_fraction < 1.0:
            raise ValueError("test_fraction must lie in (0, 1)")
        order = rng_for(seed, _STREAM_SPLIT).permutation(len(self))
        cut = len(self) - max(1, int(round(test_fraction * len(self))))
        return self.subset(np.sort(order[:cut])), self.subset(np.sort(order[cut:]))


def pad(vectors, length: int | None = None, sentinel: float = PAD_SENTINEL) -> np.ndarray:
    """Stack variable-length vectors, filling the tail of short ones with ``sentinel``."""
    rows = [np.asarray(v, dtype=np.float64).reshape(-1) for v in vectors]
    longest = max((r.size for r in rows), default=0)
    length = longest if length is None else length
    if longest > length:
        raise ValueError(f"vector of length {longest} does not fit in {length}")
    out = np.full((len(rows), length), float(sentinel))
    for i, r in enumerate(rows):
        out[i, :r.size] = r
    return out


def gen_pretty(n: int, samples: int, epsilon: float = DEFAULT_EPSILON, seed: int = 0,
               kind: SequenceKind | str = SequenceKind.BINARY_TREE) -> Dataset:
    """Angles uniform in ``[-epsilon, epsilon]``, phases from the simulated ansatz."""
    if not 0.0 <= epsilon <= MAX_PRETTY_EPSILON:
        raise ValueError(f"epsilon must lie in [0, {MAX_PRETTY_EPSILON}], got {epsilon}")
    if samples < 1:
        raise ValueError("samples must be positive")
    kind = SequenceKind.parse(kind)
    k = diagonal.angle_count(n)

    def one(i: int):
        theta = rng_for(seed, _STREAM_PRETTY, i).uniform(-epsilon, epsilon, size=k)
        return theta, diag_phases(diagonal.build_ansatz(n, theta, kind)).phases

    rows = parallel_map(one, range(samples))
    meta = {"n": n, "sequence_kind": kind.value, "epsilon": epsilon, "seed": seed,
            "stage": "pretty", "samples": samples}
    return Dataset(np.stack([r[0] for r in rows]), np.stack([r[1] for r in rows]), meta)


def _fixed_block(n: int) -> np.ndarray:
    return np.full(diagonal.angle_count(n), RAW_FIXED_ANGLE)


def raw_template_map(n: int, kind: SequenceKind | str = SequenceKind.BINARY_TREE):
    """``(W, b)`` of the unmutated raw template: ``y = [M M] x + M phi0``."""
    m = diagonal.build_phase_map(n, kind).matrix
    return np.hstack([m, m]), diagonal.compose_phases(n, _fixed_block(n), kind)


def raw_circuit(n: int, params, template: str,
                kind: SequenceKind | str = SequenceKind.BINARY_TREE) -> Circuit:
    """Rebuild the circuit behind one unpadded raw parameter vector.

    The layout is ``ansatz(a) . ansatz(phi0) . ansatz(b)`` with ``phi0`` a
    fixed block. ``x_conj`` wraps the last RZ of ``b`` in X gates, which
    flips the sign of its stored angle and appends the two X gates as
    rotation angles ``pi``.
    """
    k = diagonal.angle_count(n)
    p = np.asarray(params, dtype=np.float64)
    moves = set() if template == "base" else set(template.split("+"))
    if not moves <= set(RAW_MOVES):
        raise ValueError(f"unknown template {template!r}")
    expected = 2 * k + (2 if "x_conj" in moves else 0)
    if p.size != expected:
        raise ValueError(f"template {template!r} needs {expected} parameters, got {p.size}")
    gates = list(diagonal.build_ansatz(n, p[:k], kind).gates)
    gates += diagonal.build_ansatz(n, _fixed_block(n), kind).gates
    tail = list(diagonal.build_ansatz(n, p[k:2 * k], kind).gates)
    if "x_conj" in moves:
        j = max(i for i, g in enumerate(tail) if g.kind.value == "RZ")
        q = tail[j].qubit
        tail[j:j + 1] = [x_gate(q), rz(tail[j].angle, q), x_gate(q)]
    return Circuit(n, tuple(gates + tail))


def gen_raw(n: int, samples: int, seed: int = 0, mutation_prob: float = 0.25,
            moves=RAW_MOVES, kind: SequenceKind | str = SequenceKind.BINARY_TREE,
            sentinel: float = PAD_SENTINEL) -> Dataset:
    """Heterogeneous circuit parameters for random small SU diagonals.

    Every sample uses the split template of :func:`raw_circuit`; each move
    in ``moves`` is then applied independently with probability
    ``mutation_prob``:

    * ``pi_shift`` adds pi to the first angle of ``a`` and subtracts it from
      the first angle of ``b`` (same operator, a max-norm jump of pi);
    * ``x_conj`` conjugates the last RZ of ``b`` by X, negating its stored
      angle and lengthening the vector by two.

    Vectors are padded to a common length with ``sentinel``.
    """
    if n not in (2, 3):
        raise ValueError("raw data is generated for n in {2, 3}")
    if not 0.0 <= mutation_prob <= 1.0:
        raise ValueError("mutation_prob must lie in [0, 1]")
    moves = tuple(moves)
    if not set(moves) <= set(RAW_MOVES):
        raise ValueError(f"moves must be drawn from {RAW_MOVES}")
    kind = SequenceKind.parse(kind)
    k = diagonal.angle_count(n)
    phi0 = _fixed_block(n)

    def one(i: int):
        rng = rng_for(seed, _STREAM_RAW, i)
        y = rng.uniform(-RAW_PHASE_HALF_WIDTH, RAW_PHASE_HALF_WIDTH, size=1 << n)
        y -= y.mean()
        a = rng.uniform(-RAW_SPLIT_HALF_WIDTH, RAW_SPLIT_HALF_WIDTH, size=k)
        draws = rng.uniform(size=len(RAW_MOVES))
        theta, _, _ = diagonal.decompose_angles(y, kind)
        b = theta - phi0 - a
        applied = [m for m, u in zip(RAW_MOVES, draws) if m in moves and u < mutation_prob]
        extra: list[float] = []
        if "pi_shift" in applied:
            a[0] += math.pi
            b[0] -= math.pi
        if "x_conj" in applied:
            b[-1] = -b[-1]
            extra = [math.pi, math.pi]
        return np.concatenate([a, b, extra]), y, "+".join(applied) or "base"

    rows = parallel_map(one, range(samples))
    meta = {"n": n, "sequence_kind": kind.value, "epsilon": None, "seed": seed,
            "stage": "raw", "samples": samples, "mutation_prob": mutation_prob,
            "moves": list(moves), "sentinel": sentinel,
            "templates": [r[2] for r in rows], "lengths": [int(r[0].size) for r in rows]}
    return Dataset(pad([r[0] for r in rows], sentinel=sentinel), np.stack([r[1] for r in rows]), meta)


# ---------------------------------------------------------------- schedule


def _ceil_pow(m: int, beta: float) -> int:
    v = m ** beta
    r = round(v)
    return int(r) if abs(v - r) < 1e-9 else math.ceil(v)


@dataclass(frozen=True)
class StepSchedule:
    """Plateau m lasts ``ceil(m^beta) * step_size`` steps at ``init_lr / m^alpha``.

    Construction enforces that the step sum diverges (``alpha - beta <= 1``)
    and the square sum converges (``2 alpha - beta > 1``); the boundary
    ``2 alpha - beta == 1`` is accepted with a ScheduleWarning.
    """

    alpha: float = 1.0
    beta: float = 0.5
    init_lr: float = 0.1
    step_size: int = 1

    def __post_init__(self):
        if not self.alpha > 0:
            raise ScheduleError("alpha must be positive")
        if not self.beta >= 0:
            raise ScheduleError("beta must be non-negative")
        if not self.init_lr > 0:
            raise ScheduleError("init_lr must be positive")
        if int(self.step_size) != self.step_size or self.step_size < 1:
            raise ScheduleError("step_size must be a positive integer")
        object.__setattr__(self, "step_size", int(self.step_size))
        if self.alpha - self.beta > 1:
            raise ScheduleError(
                f"alpha - beta = {self.alpha - self.beta:g} > 1: the step sum converges")
        gap = 2 * self.alpha - self.beta
        if gap < 1:
            raise ScheduleError(f"2 alpha - beta = {gap:g} < 1: the squared step sum diverges")
        if gap == 1:
            warnings.warn(f"(alpha, beta) = ({self.alpha:g}, {self.beta:g}) sits on the boundary "
                          "where the squared step sum diverges logarithmically",
                          ScheduleWarning, stacklevel=2)

    def plateau_length(self, m: int) -> int:
        return _ceil_pow(m, self.beta) * self.step_size

    def plateau_rate(self, m: int) -> float:
        return self.init_lr / m ** self.alpha

    def rates(self):
        """Infinite iterator of per-step learning rates."""
        for m in count(1):
            rate = self.plateau_rate(m)
            for _ in range(self.plateau_length(m)):
                yield rate

    def take(self, k: int) -> np.ndarray:
        lengths, values, total = [], [], 0
        m = 1
        while total < k:
            lengths.append(self.plateau_length(m))
            values.append(self.plateau_rate(m))
            total += lengths[-1]
            m += 1
        return np.repeat(np.array(values), lengths)[:k]

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "init_lr": self.init_lr,
                "step_size": self.step_size}


# Settings that reach the 1e-9 loss range on pretty data within ~50k epochs:
# the bias direction has curvature 2, so init_lr stays below 1, while the
# weight directions have curvature ~2 eps^2 / 3 and need a long first plateau.
PRETTY_SCHEDULE = dict(alpha=1.0, beta=0.5, init_lr=0.9, step_size=10000)


@dataclass(frozen=True)
class RobbinsMonroReport:
    terms: int
    checkpoints: tuple[int, ...]
    partial_sums: tuple[float, ...]
    square_sum: float
    complete_plateaus: int
    square_tail_bound: float
    sum_diverges: bool
    square_sum_converges: bool

    @property
    def monotone(self) -> bool:
        return all(b > a for a, b in zip(self.partial_sums, self.partial_sums[1:]))


def robbins_monro_report(schedule: StepSchedule, terms: int = 10 ** 6) -> RobbinsMonroReport:
    """Partial sums of the first ``terms`` steps and an analytic bound on the
    remaining squared-step tail.

    With ``M`` complete plateaus, ``ceil(m^beta) <= 2 m^beta`` gives
    ``sum_{m>M} ceil(m^beta) s c^2 / m^(2 alpha) <= 2 s c^2 M^(beta-2alpha+1) / (2alpha-beta-1)``.
    """
    g = schedule.take(terms)
    csum = np.cumsum(g)
    checkpoints = tuple(10 ** e for e in range(1, int(math.log10(terms)) + 1) if 10 ** e <= terms)
    if not checkpoints or checkpoints[-1] != terms:
        checkpoints += (terms,)
    covered, m = 0, 0
    while covered + schedule.plateau_length(m + 1) <= terms:
        m += 1
        covered += schedule.plateau_length(m)
    a, b = schedule.alpha, schedule.beta
    gap = 2 * a - b - 1
    if gap > 0 and m > 0:
        tail = 2 * schedule.step_size * schedule.init_lr ** 2 * m ** (b - 2 * a + 1) / gap
    else:
        tail = math.inf
    return RobbinsMonroReport(
        terms=terms,
        checkpoints=checkpoints,
        partial_sums=tuple(float(csum[c - 1]) for c in checkpoints),
        square_sum=float(np.sum(g * g)),
        complete_plateaus=m,
        square_tail_bound=tail,
        sum_diverges=a - b <= 1,
        square_sum_converges=gap > 0,
    )


# ---------------------------------------------------------------- model


@dataclass(frozen=True)
class LinearModel:
    W: np.ndarray = field(repr=False)
    b: np.ndarray = field(repr=False)
    trained_epochs: int = 0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        W = np.array(self.W, dtype=np.float64, ndmin=2)
        b = np.array(self.b, dtype=np.float64).reshape(-1)
        if W.ndim != 2 or b.size != W.shape[0]:
            raise ValueError(f"bias of length {b.size} does not match W of shape {W.shape}")
        if not (np.all(np.isfinite(W)) and np.all(np.isfinite(b))):
            raise ValueError("model weights must be finite")
        W.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "b", b)

    def predict(self, X) -> np.ndarray:
        return np.asarray(X, dtype=np.float64) @ self.W.T + self.b

    def to_dict(self) -> dict:
        return {"W": self.W.tolist(), "b": self.b.tolist(),
                "meta": {**self.meta, "trained_epochs": self.trained_epochs}}

    @classmethod
    def from_dict(cls, d: dict) -> "LinearModel":
        meta = dict(d.get("meta", {}))
        epochs = int(meta.pop("trained_epochs", 0))
        return cls(np.array(d["W"], dtype=np.float64), np.array(d["b"], dtype=np.float64), epochs, meta)


def mse(model: LinearModel, ds: Dataset) -> float:
    """Mean over samples of the squared Euclidean residual norm."""
    r = model.predict(ds.X) - ds.Y
    return float(np.mean(np.sum(r * r, axis=1)))


def stable_rate(ds: Dataset, bias: bool = True) -> float:
    """Largest full-batch step that keeps gradient descent stable, ``1 / lambda_max(Z^T Z / N)``."""
    Z = np.hstack([ds.X, np.ones((len(ds), 1))]) if bias else ds.X
    top = float(numkit.eig_sym(Z.T @ Z / len(ds))[0][0])
    if not top > 0:
        raise ValueError("design matrix is zero")
    return 1.0 / top


def train(ds: Dataset, schedule: StepSchedule | None = None, epochs: int = 10000, seed: int = 0,
          tol: float = 1e-6, bias: bool = True, per_sample: bool = False):
    """Gradient descent on ``(1/N) sum_i |y_i - W x_i - b|^2``.

    One learning rate per epoch, taken from ``schedule``. Weights start
    uniform in [-1, 1], bias at zero. Stops once the loss drops below
    ``tol``. Returns ``(model, losses)`` where ``losses[k]`` is the loss
    after ``k`` epochs and the last entry belongs to the returned model.

    Full-batch mode runs on the sufficient statistics ``Z^T Z / N`` and
    ``Y^T Z / N`` (``Z = [X 1]``), which is the same iteration as on the
    raw samples at a cost independent of ``N``. ``per_sample=True`` sweeps
    the samples in a seeded random order instead, one update per sample.
    """
    if len(ds) == 0:
        raise ValueError("cannot train on an empty dataset")
    if epochs < 0:
        raise ValueError("epochs must be non-negative")
    schedule = schedule if schedule is not None else StepSchedule()
    X, Y = ds.X, ds.Y
    N, d_in = X.shape
    d_out = Y.shape[1]
    Z = np.hstack([X, np.ones((N, 1))]) if bias else X
    theta = np.zeros((d_out, Z.shape[1]))
    theta[:, :d_in] = rng_for(seed, _STREAM_INIT).uniform(-1.0, 1.0, size=(d_out, d_in))

    G = Z.T @ Z / N
    C = Y.T @ Z / N
    s = float(np.sum(Y * Y)) / N

    def loss_of(t: np.ndarray) -> float:
        if per_sample:
            r = Z @ t.T - Y
            return float(np.mean(np.sum(r * r, axis=1)))
        return max(float(np.sum((t @ G) * t) - 2.0 * np.sum(t * C) + s), 0.0)

    shuffle = rng_for(seed, _STREAM_SHUFFLE)
    # overflow is caught below as a non-finite loss, so numpy need not warn about it
    with np.errstate(over="ignore", invalid="ignore"):
        losses, done = _descend(theta, loss_of, schedule, epochs, tol, per_sample, Z, Y, G, C, shuffle)
    W = theta[:, :d_in]
    b = theta[:, d_in] if bias else np.zeros(d_out)
    meta = {"schedule": schedule.to_dict(), "seed": seed, "tol": tol, "bias": bias,
            "per_sample": per_sample, "final_loss": losses[-1], "dataset": {
                k: v for k, v in ds.meta.items() if k not in ("templates", "lengths")}}
    return LinearModel(W.copy(), b.copy(), done, meta), np.array(losses)


def _descend(theta, loss_of, schedule, epochs, tol, per_sample, Z, Y, G, C, shuffle):
    """Update ``theta`` in place; returns the loss trace and the number of updates."""
    losses: list[float] = []
    rates = schedule.rates()
    done = 0
    for epoch in range(epochs + 1):
        loss = loss_of(theta)
        losses.append(loss)
        if not math.isfinite(loss) or not np.all(np.isfinite(theta)):
            raise TrainingDiverged(epoch, loss)
        if loss < tol or epoch == epochs:
            break
        lr = next(rates)
        if per_sample:
            for i in shuffle.permutation(Z.shape[0]):
                r = theta @ Z[i] - Y[i]
                theta -= lr * 2.0 * np.outer(r, Z[i])
        else:
            theta -= lr * 2.0 * (theta @ G - C)
        done += 1
    return losses, done


# ---------------------------------------------------------------- metrics


@dataclass(frozen=True)
class Metrics:
    mae: float
    rmse: float
    r2: float
    r2_defined: bool

    def as_dict(self) -> dict:
        return {"MAE": self.mae, "RMSE": self.rmse, "R2": self.r2, "R2_defined": self.r2_defined}


def metrics(model: LinearModel, ds: Dataset) -> Metrics:
    """MAE and RMSE over per-sample Euclidean residual norms; R^2 computed
    per output and averaged. Any constant output makes R^2 NaN."""
    if len(ds) == 0:
        raise ValueError("metrics need a nonempty dataset")
    r = ds.Y - model.predict(ds.X)
    norms = np.sqrt(np.sum(r * r, axis=1))
    ss_res = np.sum(r * r, axis=0)
    ss_tot = np.sum((ds.Y - ds.Y.mean(axis=0)) ** 2, axis=0)
    defined = bool(np.all(ss_tot > 0))
    r2 = float(np.mean(1.0 - ss_res / ss_tot)) if defined else float("nan")
    return Metrics(float(np.mean(norms)), float(np.sqrt(np.mean(norms ** 2))), r2, defined)


# ---------------------------------------------------------------- weight lattice


@dataclass(frozen=True)
class SnapReport:
    snapped: np.ndarray = field(repr=False)
    max_deviation: float
    lattice_structured: bool
    matches_reference: bool | None
    matches_reference_rows_permuted: bool | None
    duplicate_blocks: tuple[int, int] | None

    def as_dict(self) -> dict:
        return {"max_deviation": self.max_deviation, "lattice_structured": self.lattice_structured,
                "matches_reference": self.matches_reference,
                "matches_reference_rows_permuted": self.matches_reference_rows_permuted,
                "duplicate_blocks": list(self.duplicate_blocks) if self.duplicate_blocks else None}


def duplicate_blocks(w: np.ndarray, min_repeats: int = 2) -> tuple[int, int] | None:
    """Widest ``(width, repeats)`` with ``w == [B B ... B]``, or None."""
    cols = w.shape[1]
    for width in range(cols // min_repeats, 0, -1):
        if cols % width:
            continue
        first = w[:, :width]
        if np.any(first) and all(np.array_equal(first, w[:, j:j + width])
                                 for j in range(width, cols, width)):
            return width, cols // width
    return None


def snap_weights(model: LinearModel, lattice_step: float = 0.5, reference=None,
                 structured_tol: float = 0.1) -> SnapReport:
    """Round weights to the nearest multiple of ``lattice_step`` and compare.

    ``reference`` (e.g. a phase map) is checked both exactly and up to a
    row permutation. Deviation above ``structured_tol`` marks the model as
    not lattice-structured; that is a result, not an error.
    """
    if not lattice_step > 0:
        raise ValueError("lattice_step must be positive")
    W = model.W
    snapped = np.round(W / lattice_step) * lattice_step
    dev = float(np.max(np.abs(W - snapped))) if W.size else 0.0
    exact = perm = None
    if reference is not None:
        ref = np.asarray(reference, dtype=np.float64)
        exact = ref.shape == snapped.shape and bool(np.array_equal(snapped, ref))
        if ref.shape == snapped.shape:
            key = lambda m: sorted(map(tuple, m.tolist()))  # noqa: E731
            perm = key(snapped) == key(ref)
        else:
            perm = False
    return SnapReport(snapped, dev, dev <= structured_tol, exact, perm, duplicate_blocks(snapped))


# ---------------------------------------------------------------- persistence


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def dataset_to_csv(ds: Dataset) -> str:
    buf = io.StringIO()
    buf.write("# config: " + json.dumps(ds.meta, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"x{i}" for i in range(ds.X.shape[1])] + [f"y{i}" for i in range(ds.Y.shape[1])])
    for xr, yr in zip(ds.X, ds.Y):
        w.writerow([_fmt(v) for v in xr] + [_fmt(v) for v in yr])
    return buf.getvalue()


def dataset_from_csv(text: str) -> Dataset:
    lines = text.splitlines()
    meta = {}
    if lines and lines[0].startswith("#"):
        head = lines.pop(0).lstrip("#").strip()
        if head.startswith("config:"):
            meta = json.loads(head[len("config:"):])
    rows = list(csv.reader(lines))
    if not rows:
        raise ValueError("CSV has no header")
    header = rows[0]
    xi = [i for i, h in enumerate(header) if h.startswith("x")]
    yi = [i for i, h in enumerate(header) if h.startswith("y")]
    if not xi or not yi:
        raise ValueError("CSV header must name x* and y* columns")
    data = np.array([[float(v) for v in r] for r in rows[1:]], dtype=np.float64).reshape(-1, len(header))
    return Dataset(data[:, xi], data[:, yi], meta)


def save_dataset(ds: Dataset, path) -> None:
    path = Path(path)
    if path.suffix == ".csv":
        path.write_text(dataset_to_csv(ds))
    else:
        path.write_text(json.dumps({"X": ds.X.tolist(), "Y": ds.Y.tolist(), "meta": ds.meta}))


def load_dataset(path) -> Dataset:
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".csv":
        return dataset_from_csv(text)
    d = json.loads(text)
    return Dataset(np.array(d["X"], dtype=np.float64), np.array(d["Y"], dtype=np.float64), d.get("meta", {}))


def save_model(model: LinearModel, path) -> None:
    Path(path).write_text(json.dumps(model.to_dict()))


def load_model(path) -> LinearModel:
    return LinearModel.from_dict(json.loads(Path(path).read_text()))
