"""Command-line front end.

Workflows: gen -> solve -> cluster -> eval for subspace clustering, and
extract -> transform / detect for feature extraction, plus closed-form
factorizations and a sweep runner that emits accuracy curves as CSV and PNG.

Every writing command takes --out DIR and records a manifest.json with the
resolved parameters; re-running with the same parameters reproduces the
output files byte for byte.  Exit codes: 0 success, 1 bad usage or invalid
values, 2 I/O or file-format trouble, 3 solver non-convergence under
--strict.
"""

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__
from . import closed_form, features, matrix_io, plots, spectral, synth
from .errors import FormatError
from .solver import SolverConfig, solve_frr, solve_tfrr

__all__ = ["dispatch", "main"]


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on usage errors; the contract here is 1
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _write_manifest(out_dir, command, params, outputs, started):
    manifest = {
        "command": command,
        "parameters": params,
        "seed": params.get("seed"),
        "outputs": sorted(outputs),
        "version": __version__,
        "duration_s": round(time.monotonic() - started, 6),
    }
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _matrix_name(stem, fmt):
    return f"{stem}.{fmt}"


def _add_solver_flags(p):
    p.add_argument("--m", type=int, required=True, help="target rank of L R")
    p.add_argument("--mu", type=float, default=0.5)
    p.add_argument("--beta0", type=float, default=None, help="initial penalty (default: 0.1 / sigma1^2)")
    p.add_argument("--beta-max", type=float, default=None, help="penalty cap (default: 1e10 / sigma1^2)")
    p.add_argument("--rho", type=float, default=1.9)
    p.add_argument("--eps1", type=float, default=1e-6)
    p.add_argument("--eps2", type=float, default=1e-6)
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("--no-normalize", action="store_true", help="drop the column-sum constraint")


def _config_from(args):
    return SolverConfig(
        m=args.m,
        mu=args.mu,
        beta0=args.beta0,
        beta_max=args.beta_max,
        rho=args.rho,
        eps1=args.eps1,
        eps2=args.eps2,
        max_iter=args.max_iter,
        seed=args.seed,
        normalize_columns=not args.no_normalize,
    )


def _build_parser():
    parser = _Parser(prog="fixedrank", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate synthetic subspace data")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--dh", type=int, required=True)
    p.add_argument("--dl", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--outliers", type=int, default=0, help="columns of uniform noise to append")
    p.add_argument("--magnitude", type=float, default=None, help="upper bound of outlier entries")
    p.add_argument("--shuffle", action="store_true", help="permute columns, recording the permutation")
    p.add_argument("--format", choices=("frrm", "csv"), default="frrm")
    p.add_argument("--out", required=True)

    p = sub.add_parser("solve", help="run the alternating-direction solver")
    p.add_argument("--input", required=True)
    p.add_argument("--mode", choices=("frr", "tfrr"), default="frr")
    _add_solver_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trace", action="store_true", help="write per-iteration trace.csv")
    p.add_argument("--strict", action="store_true", help="exit 3 when not converged")
    p.add_argument("--format", choices=("frrm", "csv"), default="frrm")
    p.add_argument("--out", required=True)

    p = sub.add_parser("cluster", help="affinity + spectral clustering")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="data matrix; the noiseless closed form is used")
    src.add_argument("--solution", help="directory from a solve run to reuse")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--m", type=int, default=None, help="factor rank (default: k)")
    p.add_argument("--affinity", choices=("z", "lr"), default="lr")
    p.add_argument("--robust", action="store_true", help="solve with the robust method instead of the closed form")
    p.add_argument("--mu", type=float, default=0.5)
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("--no-normalize", action="store_true")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("eval", help="score predicted labels against ground truth")
    p.add_argument("--pred", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--out", default=None, help="optional directory for eval.json")

    p = sub.add_parser("extract", help="fit a feature extractor")
    p.add_argument("--train", required=True)
    p.add_argument("--strategy", choices=("tfrr1", "tfrr2"), required=True)
    _add_solver_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--center", action="store_true")
    p.add_argument("--out", required=True)

    p = sub.add_parser("transform", help="map samples through an extractor")
    p.add_argument("--extractor", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=("frrm", "csv"), default="frrm")
    p.add_argument("--out", required=True)

    p = sub.add_parser("detect", help="flag outlier columns by corruption energy")
    p.add_argument("--extractor", required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("closed-form", help="noiseless factorizations from the SVD")
    p.add_argument("--input", required=True)
    p.add_argument("--mode", choices=("frr", "tfrr", "sim", "pca"), required=True)
    p.add_argument("--m", type=int, default=None, help="rank (required except for sim)")
    p.add_argument("--format", choices=("frrm", "csv"), default="frrm")
    p.add_argument("--out", required=True)

    p = sub.add_parser("sweep", help="accuracy-vs-p batch from a JSON spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--no-plot", action="store_true")
    p.add_argument("--out", required=True)

    return parser


def _cmd_gen(args):
    started = time.monotonic()
    spec = synth.SyntheticSpec(k=args.k, p=args.p, d_h=args.dh, d_l=args.dl, seed=args.seed)
    data = synth.generate(spec)
    X, truth = data.X, data.truth
    os.makedirs(args.out, exist_ok=True)
    outputs = []
    mask = None
    if args.outliers:
        if args.magnitude is None:
            raise ValueError("--magnitude is required when --outliers > 0")
        X, mask = synth.inject_outliers(X, args.outliers, args.magnitude, args.seed + 1)
        truth = np.concatenate([truth, np.full(args.outliers, truth.max() + 1)])
    if args.shuffle:
        rng = np.random.default_rng(args.seed + 2)
        perm = rng.permutation(X.shape[1])
        X = X[:, perm]
        truth = truth[perm]
        if mask is not None:
            mask = mask[perm]
        perm_path = os.path.join(args.out, "permutation.labels")
        matrix_io.write_labels(perm, perm_path)
        outputs.append(perm_path)

    x_path = os.path.join(args.out, _matrix_name("X", args.format))
    matrix_io.write_matrix(X, x_path)
    truth_path = os.path.join(args.out, "truth.labels")
    matrix_io.write_labels(truth, truth_path)
    outputs += [x_path, truth_path]
    if mask is not None:
        mask_path = os.path.join(args.out, "mask.labels")
        matrix_io.write_labels(mask.astype(int), mask_path)
        outputs.append(mask_path)
    _write_manifest(args.out, "gen", _params(args), outputs, started)
    print(f"wrote {x_path} ({X.shape[0]}x{X.shape[1]})")
    return 0


def _params(args):
    params = {k: v for k, v in vars(args).items() if k != "command"}
    return params


def _cmd_solve(args):
    started = time.monotonic()
    X = matrix_io.read_matrix(args.input)
    config = _config_from(args)
    os.makedirs(args.out, exist_ok=True)
    trace_path = os.path.join(args.out, "trace.csv") if args.trace else None
    solve = solve_frr if args.mode == "frr" else solve_tfrr
    sol = solve(X, config, trace_path=trace_path)
    outputs = []
    for name, mat in (("Z", sol.Z), ("L", sol.L), ("R", sol.R), ("E", sol.E)):
        path = os.path.join(args.out, _matrix_name(name, args.format))
        matrix_io.write_matrix(mat, path)
        outputs.append(path)
    if trace_path:
        outputs.append(trace_path)
    params = _params(args)
    params["converged"] = sol.converged
    params["iterations"] = sol.iterations
    _write_manifest(args.out, "solve", params, outputs, started)
    print(
        f"converged={sol.converged} iterations={sol.iterations} "
        f"objective={sol.objective:.6g} primal_residual={sol.primal_residual:.3g}"
    )
    if not sol.converged:
        print("warning: solver did not converge within max_iter", file=sys.stderr)
        if args.strict:
            return 3
    return 0


def _affinity_from_solution(Z, L, R, which):
    M = Z if which == "z" else L @ R
    return spectral.build_affinity(M)


def _cmd_cluster(args):
    started = time.monotonic()
    m = args.m if args.m is not None else args.k
    os.makedirs(args.out, exist_ok=True)
    converged = True
    if args.solution:
        Z = matrix_io.read_matrix(os.path.join(args.solution, "Z.frrm"))
        L = matrix_io.read_matrix(os.path.join(args.solution, "L.frrm"))
        R = matrix_io.read_matrix(os.path.join(args.solution, "R.frrm"))
        A = _affinity_from_solution(Z, L, R, args.affinity)
    else:
        X = matrix_io.read_matrix(args.input)
        if args.robust:
            config = SolverConfig(
                m=m,
                mu=args.mu,
                max_iter=args.max_iter,
                seed=args.seed,
                normalize_columns=not args.no_normalize,
            )
            sol = solve_frr(X, config)
            converged = sol.converged
            A = _affinity_from_solution(sol.Z, sol.L, sol.R, args.affinity)
        elif args.affinity == "z":
            A = spectral.build_affinity(closed_form.sim_solution(X))
        else:
            cf = closed_form.frr_closed_form(X, m)
            A = spectral.build_affinity(cf.L @ cf.R)
    labels = spectral.ncut(A, args.k, args.seed)
    labels_path = os.path.join(args.out, "labels.labels")
    matrix_io.write_labels(labels, labels_path)
    params = _params(args)
    params["m"] = m
    params["converged"] = converged
    _write_manifest(args.out, "cluster", params, [labels_path], started)
    print(f"wrote {labels_path}")
    if not converged:
        print("warning: solver did not converge within max_iter", file=sys.stderr)
        if args.strict:
            return 3
    return 0


def _cmd_eval(args):
    started = time.monotonic()
    pred = matrix_io.read_labels(args.pred)
    truth = matrix_io.read_labels(args.truth)
    acc = spectral.clustering_accuracy(pred, truth)
    err = 1.0 - acc
    print(f"clustering accuracy {acc:.6f}, segmentation error {err:.6f}")
    print(f"accuracy={acc!r}")
    print(f"error={err!r}")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "eval.json")
        with open(path, "w") as fh:
            json.dump({"accuracy": acc, "error": err}, fh, indent=2, sort_keys=True)
            fh.write("\n")
        _write_manifest(args.out, "eval", _params(args), [path], started)
    return 0


def _cmd_extract(args):
    started = time.monotonic()
    X = matrix_io.read_matrix(args.train)
    config = _config_from(args)
    ex = features.fit(X, config, args.strategy, center=args.center)
    features.save_extractor(ex, args.out)
    outputs = [os.path.join(args.out, name) for name in ("P.frrm", "E.frrm", "extractor.json")]
    _write_manifest(args.out, "extract", _params(args), outputs, started)
    print(f"wrote extractor to {args.out} (P is {ex.P.shape[0]}x{ex.P.shape[1]})")
    return 0


def _cmd_transform(args):
    started = time.monotonic()
    ex = features.load_extractor(args.extractor)
    X = matrix_io.read_matrix(args.input)
    Y = features.transform(ex, X)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, _matrix_name("features", args.format))
    matrix_io.write_matrix(Y, path)
    _write_manifest(args.out, "transform", _params(args), [path], started)
    print(f"wrote {path} ({Y.shape[0]}x{Y.shape[1]})")
    return 0


def _cmd_detect(args):
    started = time.monotonic()
    ex = features.load_extractor(args.extractor)
    energies = np.linalg.norm(ex.E, axis=0)
    mask = features.detect_outliers(ex.E, args.gamma)
    os.makedirs(args.out, exist_ok=True)
    mask_path = os.path.join(args.out, "mask.labels")
    matrix_io.write_labels(mask.astype(int), mask_path)
    energies_path = os.path.join(args.out, "energies.csv")
    matrix_io.write_matrix(energies[None, :], energies_path)
    plot_path = plots.plot_energies(energies, args.gamma, os.path.join(args.out, "energies.png"))
    _write_manifest(args.out, "detect", _params(args), [mask_path, energies_path, plot_path], started)
    print(f"flagged {int(mask.sum())} of {mask.size} columns at gamma={args.gamma}")
    return 0


def _cmd_closed_form(args):
    started = time.monotonic()
    X = matrix_io.read_matrix(args.input)
    os.makedirs(args.out, exist_ok=True)
    outputs = []
    params = _params(args)
    if args.mode == "sim":
        Z = closed_form.sim_solution(X)
        path = os.path.join(args.out, _matrix_name("Z", args.format))
        matrix_io.write_matrix(Z, path)
        outputs.append(path)
    elif args.mode == "pca":
        if args.m is None:
            raise ValueError("--m is required for mode pca")
        P = closed_form.pca_basis(X, args.m)
        path = os.path.join(args.out, _matrix_name("P", args.format))
        matrix_io.write_matrix(P, path)
        outputs.append(path)
    else:
        if args.m is None:
            raise ValueError(f"--m is required for mode {args.mode}")
        fn = closed_form.frr_closed_form if args.mode == "frr" else closed_form.tfrr_closed_form
        cf = fn(X, args.m)
        for name, mat in (("Z", cf.Z), ("L", cf.L), ("R", cf.R)):
            path = os.path.join(args.out, _matrix_name(name, args.format))
            matrix_io.write_matrix(mat, path)
            outputs.append(path)
        params["objective"] = cf.objective
        params["rank_x"] = cf.rank_x
        print(f"objective={cf.objective:.6g} rank_x={cf.rank_x}")
    _write_manifest(args.out, "closed-form", params, outputs, started)
    return 0


def _cmd_sweep(args):
    started = time.monotonic()
    with open(args.spec) as fh:
        spec = json.load(fh)
    k = int(spec["k"])
    d_h = int(spec["d_h"])
    d_l = int(spec["d_l"])
    p_values = sorted(int(p) for p in spec["p_values"])
    seeds = spec.get("seeds", 5)
    seeds = list(range(int(seeds))) if isinstance(seeds, int) else [int(s) for s in seeds]
    m = int(spec.get("m", k))

    rows = []
    acc_z_by_p, acc_lr_by_p = [], []
    for p in p_values:
        az, alr = [], []
        for seed in sorted(seeds):
            data = synth.generate(synth.SyntheticSpec(k=k, p=p, d_h=d_h, d_l=d_l, seed=seed))
            cf = closed_form.frr_closed_form(data.X, m)
            for which, acc_list in (("z", az), ("lr", alr)):
                A = _affinity_from_solution(cf.Z, cf.L, cf.R, which)
                labels = spectral.ncut(A, k, seed)
                acc_list.append(spectral.clustering_accuracy(labels, data.truth))
            rows.append((p, seed, az[-1], alr[-1]))
        acc_z_by_p.append(az)
        acc_lr_by_p.append(alr)

    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, "sweep.csv")
    with open(csv_path, "w") as fh:
        fh.write("p,seed,accuracy_z,accuracy_lr\n")
        for p, seed, az_v, alr_v in rows:
            fh.write(f"{p},{seed},{az_v!r},{alr_v!r}\n")
    outputs = [csv_path]
    if not args.no_plot:
        outputs.append(plots.plot_sweep(p_values, acc_z_by_p, acc_lr_by_p, os.path.join(args.out, "sweep.png")))
    params = _params(args)
    params["resolved_spec"] = {"k": k, "d_h": d_h, "d_l": d_l, "p_values": p_values, "seeds": seeds, "m": m}
    _write_manifest(args.out, "sweep", params, outputs, started)
    print(f"wrote {csv_path} ({len(rows)} cells)")
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "solve": _cmd_solve,
    "cluster": _cmd_cluster,
    "eval": _cmd_eval,
    "extract": _cmd_extract,
    "transform": _cmd_transform,
    "detect": _cmd_detect,
    "closed-form": _cmd_closed_form,
    "sweep": _cmd_sweep,
}


def dispatch(argv):
    """Parse argv and run the selected command; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (FormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
