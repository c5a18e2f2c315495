"""Command-line entry point: ``diagsynth <command> ...``.

Exit codes: 0 success, 2 bad input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import cluster, diagonal, mlpipe
from ._runtime import rng_for
from .circuit import diag_phases, export_text, gate_counts, wrap
from .sequences import SequenceKind, gate_totals, strange_fractal_half, tail_sequence

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3

# published gate totals of the optimized diagonal decomposition, n = 2..9
REFERENCE_TOTALS = {2: 5, 3: 13, 4: 29, 5: 61, 6: 125, 7: 253, 8: 509, 9: 1021}


class InputError(Exception):
    pass


class NumericalFailure(Exception):
    pass


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def _with_config_comment(text: str, config: dict, marker: str = "#") -> str:
    return f"{marker} config: {json.dumps(config, sort_keys=True)}\n{text}"


# ---------------------------------------------------------------- decompose


def read_phases(path: str) -> np.ndarray:
    """JSON ``{"n": int, "lambda": [...]}`` or text with one phase per line."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e}") from None
    if p.suffix.lower() == ".json" or text.lstrip().startswith("{"):
        try:
            doc = json.loads(text)
            n = int(doc["n"])
            lam = np.array(doc["lambda"], dtype=np.float64)
        except (ValueError, KeyError, TypeError) as e:
            raise InputError(f"malformed phase JSON in {path}: {e}") from None
        if lam.ndim != 1 or n < 1 or lam.size != 1 << n:
            raise InputError(f"expected {1 << max(n, 0)} phases for n={n}, got {lam.size}")
    else:
        vals = []
        for ln, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip().rstrip(",")
            if not line:
                continue
            try:
                vals.append(float(line))
            except ValueError:
                raise InputError(f"{path}:{ln}: not a number: {line!r}") from None
        lam = np.array(vals, dtype=np.float64)
        size = lam.size
        if size < 2 or size & (size - 1):
            raise InputError(f"phase count must be a power of two >= 2, got {size}")
    if not np.all(np.isfinite(lam)):
        raise InputError("phases must be finite")
    return lam


def cmd_decompose(args) -> int:
    lam = read_phases(args.input)
    d = diagonal.DiagonalUnitary.from_phases(lam)
    try:
        circ, residual = diagonal.decompose(d, args.seq, tol=args.tol)
    except diagonal.UnreachablePhasesError as e:
        raise NumericalFailure(str(e)) from None
    recomposed = diag_phases(circ).phases
    roundtrip = float(np.max(np.abs(wrap(recomposed - lam))))
    angles = [g.angle for g in circ.gates if g.kind.value == "RZ"]
    result = {"angles": angles, "global_phase": circ.global_phase, "residual": residual,
              "roundtrip_error": roundtrip, "n": d.n, "gate_counts": gate_counts(circ),
              "config": _config(args)}
    qasm = export_text(circ).replace(
        "qreg", f"// config: {json.dumps(_config(args), sort_keys=True)}\nqreg", 1)
    if args.out:
        Path(args.out + ".qasm").write_text(qasm)
        Path(args.out + ".json").write_text(_json(result))
    else:
        result["qasm"] = qasm
        sys.stdout.write(_json(result))
    if residual >= args.tol or roundtrip >= args.tol:
        raise NumericalFailure(f"residual {residual:.3e} / round trip {roundtrip:.3e} above {args.tol:.1e}")
    return EXIT_OK


# ---------------------------------------------------------------- bench / sequence


def cmd_bench(args) -> int:
    if args.n_min < 1 or args.n_max < args.n_min or args.n_max > diagonal.MAX_DECOMPOSE_QUBITS:
        raise InputError(f"need 1 <= n-min <= n-max <= {diagonal.MAX_DECOMPOSE_QUBITS}")
    rows = ["n,rz,cnot,total,expected,match"]
    ok = True
    for n in range(args.n_min, args.n_max + 1):
        rng = rng_for(args.seed, n)
        counts = set()
        for _ in range(max(1, args.samples)):
            lam = rng.uniform(-math.pi, math.pi, size=1 << n)
            circ, _ = diagonal.decompose(diagonal.DiagonalUnitary.from_phases(lam), args.seq)
            c = gate_counts(circ)
            counts.add((c.get("RZ", 0), c.get("CNOT", 0)))
        if len(counts) != 1:
            raise NumericalFailure(f"gate counts vary across samples at n={n}: {sorted(counts)}")
        (nrz, ncx), = counts
        total = nrz + ncx
        expected = REFERENCE_TOTALS.get(n)
        match = (total == expected) if expected is not None else (total == (1 << (n + 1)) - 3)
        ok &= match and (nrz, ncx) == gate_totals(n)
        rows.append(f"{n},{nrz},{ncx},{total},{'' if expected is None else expected},{str(match).lower()}")
    _emit(_with_config_comment("\n".join(rows) + "\n", _config(args)), args.out)
    if not ok:
        raise NumericalFailure("gate totals do not match the expected counts")
    return EXIT_OK


def cmd_sequence(args) -> int:
    try:
        seq = strange_fractal_half(args.n) if args.half else tail_sequence(args.n, args.kind)
    except ValueError as e:
        raise InputError(str(e)) from None
    sys.stdout.write(f"{seq}\n")
    return EXIT_OK


# ---------------------------------------------------------------- ML commands


def cmd_dataset(args) -> int:
    try:
        if args.stage == "pretty":
            ds = mlpipe.gen_pretty(args.n, args.samples, args.epsilon, args.seed, args.seq)
        else:
            ds = mlpipe.gen_raw(args.n, args.samples, args.seed, args.mutation_prob,
                                tuple(args.moves.split(",")) if args.moves else (), args.seq)
    except ValueError as e:
        raise InputError(str(e)) from None
    ds = mlpipe.Dataset(ds.X, ds.Y, {**ds.meta, "config": _config(args)})
    if args.out:
        mlpipe.save_dataset(ds, args.out)
    else:
        sys.stdout.write(mlpipe.dataset_to_csv(ds))
    return EXIT_OK


def _load_dataset(path: str) -> mlpipe.Dataset:
    try:
        return mlpipe.load_dataset(path)
    except (OSError, ValueError, KeyError) as e:
        raise InputError(f"cannot load dataset {path}: {e}") from None


def _reference_for(meta: dict, width: int):
    """Phase map the weights should snap to, if the dataset says which one."""
    n = meta.get("n")
    kind = meta.get("sequence_kind", SequenceKind.BINARY_TREE.value)
    if not isinstance(n, int) or n > diagonal.MAX_PHASE_MAP_QUBITS:
        return None
    m = diagonal.build_phase_map(n, kind).matrix
    if width == m.shape[1]:
        return m
    if width == 2 * m.shape[1]:
        return np.hstack([m, m])
    return None


def cmd_train(args) -> int:
    ds = _load_dataset(args.data)
    train_ds, test_ds = ds.split(args.test_fraction, args.seed) if args.test_fraction > 0 else (ds, ds)
    init_lr = args.init_lr
    if init_lr is None:
        init_lr = 0.9 * mlpipe.stable_rate(train_ds, bias=not args.no_bias)
    try:
        schedule = mlpipe.StepSchedule(args.alpha, args.beta, init_lr, args.step_size)
    except mlpipe.ScheduleError as e:
        raise InputError(str(e)) from None
    try:
        model, losses = mlpipe.train(train_ds, schedule, args.epochs, args.seed, args.tol,
                                     bias=not args.no_bias, per_sample=args.per_sample)
    except mlpipe.TrainingDiverged as e:
        raise NumericalFailure(str(e)) from None
    model = mlpipe.LinearModel(model.W, model.b, model.trained_epochs,
                               {**model.meta, "config": _config(args)})
    if args.out:
        mlpipe.save_model(model, args.out)
    report = {"epochs": model.trained_epochs, "final_loss": float(losses[-1]),
              "train": mlpipe.metrics(model, train_ds).as_dict(),
              "test": mlpipe.metrics(model, test_ds).as_dict(), "config": _config(args)}
    if args.loss_trace:
        Path(args.loss_trace).write_text("epoch,loss\n" + "".join(
            f"{i},{format(v, '.17g')}\n" for i, v in enumerate(losses)))
    sys.stdout.write(_json(report))
    return EXIT_OK


def cmd_analyze(args) -> int:
    try:
        model = mlpipe.load_model(args.model)
    except (OSError, ValueError, KeyError) as e:
        raise InputError(f"cannot load model {args.model}: {e}") from None
    ds_meta = model.meta.get("dataset", {})
    ref = _reference_for(ds_meta, model.W.shape[1])
    rep = mlpipe.snap_weights(model, args.lattice, ref)
    out = {"snap": rep.as_dict(), "reference": None if ref is None else ds_meta.get("stage"),
           "config": _config(args)}
    if args.data:
        out["metrics"] = mlpipe.metrics(model, _load_dataset(args.data)).as_dict()
    sys.stdout.write(_json(out))
    return EXIT_OK


def cmd_cluster(args) -> int:
    ds = _load_dataset(args.data)
    c = cluster.hcluster(ds.X, args.threshold)
    k = min(2, ds.X.shape[1])
    proj = cluster.pca_project(cluster.pca_fit(ds.X, k), ds.X) if len(ds) >= 2 else np.zeros((len(ds), k))
    conf = _config(args)
    if args.out_prefix:
        Path(args.out_prefix + "_assignments.csv").write_text(
            _with_config_comment(cluster.assignments_csv(c, proj), conf))
        Path(args.out_prefix + "_sizes.csv").write_text(_with_config_comment(cluster.sizes_csv(c), conf))
    if args.filtered:
        mlpipe.save_dataset(cluster.filter_dominant(ds, c, args.drop_constant), args.filtered)
    sys.stdout.write(_json({"clusters": c.count, "sizes": c.sizes.tolist(),
                            "largest_share": float(c.sizes.max() / len(ds)), "config": conf}))
    return EXIT_OK


def cmd_share(args) -> int:
    try:
        rows = cluster.cluster_share_report(args.n, args.samples, args.seed, args.mutation_prob,
                                            threshold=args.threshold)
    except ValueError as e:
        raise InputError(str(e)) from None
    _emit(_with_config_comment(cluster.share_csv(rows), _config(args)), args.out)
    return EXIT_OK


# ---------------------------------------------------------------- verify


def _suite_rn(args):
    for n in range(2, args.n_max + 1):
        r = diagonal.rn_matrix(n)
        e = r.entries
        yield f"r_{n} r_{n}^T = {1 << (n - 1)} I", np.array_equal(e @ e.T, (1 << (n - 1)) * np.eye(e.shape[0], dtype=np.int64))
        yield f"r_{n} ~ r_2^(x){n - 1}", diagonal.find_permutation(e, diagonal.tensor_power_r2(n - 1)) is not None
        yield f"r_{n} first row +1, other rows balanced", bool(np.all(e[0] == 1) and np.all(e[1:].sum(axis=1) == 0))
    for row in diagonal.det_relation_check(min(args.n_max, 10)):
        yield f"ln|det r_{row.n}| = {row.n - 1} * 2^{row.n - 2} ln 2", row.passed()


def _suite_weyl(args):
    grid = np.linspace(-math.pi, math.pi, 50)
    reports = [diagonal.weyl_tail_check(phi) for phi in grid]
    yield "ZZ tail matches exp(-i phi/2 ZZ) on 50 points", max(r.max_deviation for r in reports) < 1e-12
    yield "Weyl coefficients are (g_z, 0, 0)", all(r.passed() for r in reports)


def _suite_roundtrip(args):
    for kind in SequenceKind:
        for n in range(1, args.n_max + 1):
            lam = rng_for(args.seed, n).uniform(-math.pi, math.pi, size=(args.samples, 1 << n))
            angles, gphase, _ = diagonal.decompose_angles(lam, kind)
            err = 0.0
            for a, g, target in zip(angles, gphase, lam):
                got = diag_phases(diagonal.build_ansatz(n, a, kind, float(g))).phases
                err = max(err, float(np.max(np.abs(wrap(got - target)))))
            yield f"round trip {kind.value} n={n} (max error {err:.2e})", err < 1e-9


SUITES = {"rn": _suite_rn, "weyl": _suite_weyl, "roundtrip": _suite_roundtrip}


def cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    failed = 0
    for name in names:
        for label, ok in SUITES[name](args):
            print(f"{'PASS' if ok else 'FAIL'} [{name}] {label}")
            failed += not ok
    print(f"{'ok' if not failed else f'{failed} failure(s)'}")
    if failed:
        raise NumericalFailure(f"{failed} verification check(s) failed")
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="diagsynth", description="Diagonal unitary synthesis toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    def seq_opt(sp):
        sp.add_argument("--seq", choices=["tree", "fractal"], default="tree",
                        help="control-sequence construction (default: tree)")

    sp = sub.add_parser("decompose", help="synthesize a circuit for a diagonal unitary")
    sp.add_argument("input", help="phase file: JSON {n, lambda} or one phase per line")
    seq_opt(sp)
    sp.add_argument("--out", help="output prefix; writes PREFIX.qasm and PREFIX.json")
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.set_defaults(func=cmd_decompose)

    sp = sub.add_parser("bench", help="gate totals per qubit count as CSV")
    sp.add_argument("--n-min", type=int, default=2)
    sp.add_argument("--n-max", type=int, default=9)
    sp.add_argument("--samples", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    seq_opt(sp)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("sequence", help="print a control sequence")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--kind", choices=["tree", "fractal"], default="tree")
    sp.add_argument("--half", action="store_true", help="print the fractal half sequence a_n")
    sp.set_defaults(func=cmd_sequence)

    sp = sub.add_parser("dataset", help="generate a raw or pretty dataset")
    sp.add_argument("--stage", choices=["raw", "pretty"], default="pretty")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--samples", type=int, default=2000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--epsilon", type=float, default=mlpipe.DEFAULT_EPSILON)
    sp.add_argument("--mutation-prob", type=float, default=0.25)
    sp.add_argument("--moves", default=",".join(mlpipe.RAW_MOVES))
    seq_opt(sp)
    sp.add_argument("--out", help=".csv or .json (default: CSV on stdout)")
    sp.set_defaults(func=cmd_dataset)

    sp = sub.add_parser("train", help="fit the linear model")
    sp.add_argument("--data", required=True)
    sp.add_argument("--epochs", type=int, default=60000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--alpha", type=float, default=mlpipe.PRETTY_SCHEDULE["alpha"])
    sp.add_argument("--beta", type=float, default=mlpipe.PRETTY_SCHEDULE["beta"])
    sp.add_argument("--init-lr", type=float, default=None,
                    help="first-plateau rate (default: 0.9 x the stability limit of the data)")
    sp.add_argument("--step-size", type=int, default=mlpipe.PRETTY_SCHEDULE["step_size"])
    sp.add_argument("--tol", type=float, default=1e-6)
    sp.add_argument("--test-fraction", type=float, default=0.2)
    sp.add_argument("--no-bias", action="store_true")
    sp.add_argument("--per-sample", action="store_true")
    sp.add_argument("--out", help="model JSON path")
    sp.add_argument("--loss-trace", help="write the per-epoch loss as CSV")
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("analyze", help="snap model weights to the lattice and compare")
    sp.add_argument("--model", required=True)
    sp.add_argument("--data")
    sp.add_argument("--lattice", type=float, default=0.5)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("cluster", help="single-linkage clustering of a dataset")
    sp.add_argument("--data", required=True)
    sp.add_argument("--threshold", type=float, default=cluster.DEFAULT_THRESHOLD)
    sp.add_argument("--out-prefix")
    sp.add_argument("--filtered", help="write the dominant cluster as a dataset")
    sp.add_argument("--drop-constant", action="store_true")
    sp.set_defaults(func=cmd_cluster)

    sp = sub.add_parser("share", help="largest-cluster share of raw data per n")
    sp.add_argument("--n", type=int, nargs="+", default=[2, 3])
    sp.add_argument("--samples", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--mutation-prob", type=float, default=0.25)
    sp.add_argument("--threshold", type=float, default=cluster.DEFAULT_THRESHOLD)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_share)

    sp = sub.add_parser("verify", help="run an invariant battery")
    sp.add_argument("--suite", choices=[*SUITES, "all"], default="all")
    sp.add_argument("--n-max", type=int, default=8)
    sp.add_argument("--samples", type=int, default=50)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as e:
        print(f"diagsynth: error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalFailure as e:
        print(f"diagsynth: numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
