"""Command-line surface: seeded, reproducible runs of every module.

Commands
--------
mask gen          draw a mask file (GFB1) and print a density summary
features extract  extract ghost features from an image and a mask file
verify jl         Monte Carlo coverage of the distance bands vs the bound
reconstruct       simulate features and reconstruct the object image
bounds eval       bound constants and a delta(eps) table for a difference
kernel gap        image-kernel vs feature-kernel gap across mask counts
classify demo     disk-vs-ring accuracy with both kernels

Exit codes: 0 success, 1 I/O failure, 2 invalid arguments, 3 a bound
violation was observed.  Every stochastic command takes --seed and
reproduces its outputs byte-for-byte.  GHOSTPROJ_THREADS caps internal
workers (0 = all cores; unset = serial).
"""

import argparse
import json
import sys

import numpy as np

from . import io, rng
from .bounds import DegeneratePairError, bound_report
from .core import Mode, frobenius_norm_sq
from .experiments import (
    ExperimentConfig,
    classify_demo,
    kernel_gap_experiment,
    verify_jl_gc,
    verify_jl_gi,
)
from .features import gc_features, gi_features
from .masks import MaskSet, generate_gc_mask, generate_gi_masks
from .reconstruct import reconstruct_image, rescale_reconstruction

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_VIOLATION = 3

# substream indices for objects the CLI generates itself; negative so they
# never collide with trial indices, which count up from 0
OBJECT_X_STREAM = -1
OBJECT_Y_STREAM = -2


def _print_json(payload: dict) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def _write_report(path, payload: dict) -> None:
    if path:
        io.atomic_write_bytes(
            path, (json.dumps(payload, indent=2, sort_keys=True) + "\n").encode("ascii")
        )


def _cmd_mask_gen(args) -> int:
    if args.mode == "gi":
        if args.width is None or args.count is None:
            raise ValueError("gi masks need --width and --count")
        mask = generate_gi_masks(args.height, args.width, args.count, args.q, args.seed)
        summary = {
            "mode": "gi", "n_masks": mask.n_masks, "height": mask.height,
            "width": mask.width, "q": mask.q, "seed": mask.seed,
            "one_density": mask.one_density(), "out": args.out,
        }
    else:
        if args.mask_width is None:
            raise ValueError("gc masks need --mask-width")
        mask = generate_gc_mask(args.height, args.mask_width, args.q, args.seed)
        summary = {
            "mode": "gc", "mask_width": mask.mask_width, "height": mask.height,
            "q": mask.q, "seed": mask.seed,
            "one_density": mask.one_density(), "out": args.out,
        }
    io.write_mask(args.out, mask)
    _print_json(summary)
    return EXIT_OK


def _cmd_features_extract(args) -> int:
    image = io.load_image(args.image)
    mask = io.read_mask(args.mask)
    if isinstance(mask, MaskSet):
        fv = gi_features(image, mask)
    else:
        fv = gc_features(image, mask)
    values = fv.centered if args.centered else fv.raw
    if args.out.endswith(".csv"):
        io.write_features_csv(args.out, values)
    else:
        io.write_features(args.out, values, fv.mode)
    _print_json({
        "mode": fv.mode.value, "length": len(fv), "mean": fv.mean,
        "centered": bool(args.centered), "out": args.out,
    })
    return EXIT_OK


def _verify_objects(args) -> tuple[np.ndarray, np.ndarray]:
    if args.image_x and args.image_y:
        return io.load_image(args.image_x), io.load_image(args.image_y)
    if args.image_x or args.image_y:
        raise ValueError("provide both --image-x and --image-y or neither")
    x = rng.uniform_image(args.height, args.width, rng.derive_seed(args.seed, OBJECT_X_STREAM))
    y = rng.uniform_image(args.height, args.width, rng.derive_seed(args.seed, OBJECT_Y_STREAM))
    return x, y


def _cmd_verify_jl(args) -> int:
    config = ExperimentConfig(
        mode=Mode(args.mode), height=args.height, width=args.width,
        n_masks=args.m, q=args.q, eps_grid=tuple(args.eps or (0.1, 0.2)),
        trials=args.trials, base_seed=args.seed,
    )
    x, y = _verify_objects(args)
    if x.shape != (config.height, config.width):
        raise ValueError(
            f"objects of shape {x.shape} do not match --height/--width "
            f"({config.height}, {config.width})"
        )
    verify = verify_jl_gi if config.mode is Mode.GI else verify_jl_gc
    report = verify(x, y, config)
    payload = report.to_dict()
    _write_report(args.report, payload)
    if args.csv:
        io.write_csv_series(
            args.csv, ["eps", "delta", "violation_rate", "vacuous"],
            [(row.eps, row.delta, row.violation_rate, int(row.vacuous))
             for row in report.eps_rows],
        )
    _print_json(payload)
    return EXIT_OK if report.all_bounds_hold else EXIT_VIOLATION


def _cmd_reconstruct(args) -> int:
    image = io.load_image(args.image)
    if args.mask:
        masks = io.read_mask(args.mask)
        if not isinstance(masks, MaskSet):
            raise ValueError("reconstruction needs a ghost-imaging (gi) mask file")
    else:
        if args.count is None:
            raise ValueError("provide --mask or --count/--q/--seed")
        masks = generate_gi_masks(image.shape[0], image.shape[1],
                                  args.count, args.q, args.seed)
    fv = gi_features(image, masks)
    recon = reconstruct_image(fv, masks)
    if not args.no_rescale:
        recon = rescale_reconstruction(recon, masks.q, masks.n_masks)
    io.write_matrix(args.out, recon)
    flat_truth, flat_recon = image.ravel(), recon.ravel()
    corr = float(np.corrcoef(flat_truth, flat_recon)[0, 1]) \
        if np.ptp(flat_truth) > 0 and np.ptp(flat_recon) > 0 else 0.0
    _print_json({
        "n_masks": masks.n_masks, "q": masks.q, "seed": masks.seed,
        "rescaled": not args.no_rescale, "pearson_r": corr, "out": args.out,
    })
    return EXIT_OK


def _cmd_bounds_eval(args) -> int:
    diff = io.load_image(args.image)
    if frobenius_norm_sq(diff) == 0.0:
        raise DegeneratePairError("difference image is identically zero")
    report = bound_report(diff, args.q, args.m, args.eps or (0.1, 0.2, 0.3),
                          Mode(args.mode))
    payload = report.to_dict()
    _write_report(args.report, payload)
    _print_json(payload)
    return EXIT_OK


def _cmd_kernel_gap(args) -> int:
    config = ExperimentConfig(
        mode=Mode(args.mode), height=args.height, width=args.width,
        n_masks=max(args.m), q=args.q, trials=args.mask_seeds,
        base_seed=args.seed, gamma=args.gamma,
    )
    objects = [
        rng.uniform_image(args.height, args.width, rng.derive_seed(args.seed, -(i + 1)))
        for i in range(2 * args.pairs)
    ]
    report = kernel_gap_experiment(objects, config, sorted(args.m))
    payload = report.to_dict()
    _write_report(args.report, payload)
    if args.csv:
        io.write_csv_series(
            args.csv, ["n_masks", "median_gap"],
            [(row["n_masks"], row["median_gap"]) for row in report.gap_rows],
        )
    _print_json(payload)
    return EXIT_OK


def _cmd_classify_demo(args) -> int:
    report = classify_demo(
        height=args.height, width=args.width, n_masks=args.m, q=args.q,
        n_train=args.train, n_test=args.test, seed=args.seed,
        gamma=args.gamma, k=args.k,
    )
    payload = report.to_dict()
    _write_report(args.report, payload)
    _print_json(payload)
    return EXIT_OK


def _add_seed(parser, default=0):
    parser.add_argument("--seed", type=int, default=default,
                        help="base seed; equal flags reproduce outputs exactly")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ghostproj",
        description="Ghost imaging and ghost cytometry as seeded random projections.",
    )
    top = parser.add_subparsers(dest="command", required=True)

    mask = top.add_parser("mask", help="mask generation").add_subparsers(
        dest="subcommand", required=True)
    gen = mask.add_parser("gen", help="generate a mask file")
    gen.add_argument("--mode", choices=["gi", "gc"], required=True)
    gen.add_argument("--height", type=int, required=True)
    gen.add_argument("--width", type=int, help="mask width in pixels (gi)")
    gen.add_argument("--count", type=int, help="number of masks (gi)")
    gen.add_argument("--mask-width", type=int, help="strip width in columns (gc)")
    gen.add_argument("--q", type=float, required=True)
    _add_seed(gen)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=_cmd_mask_gen)

    feats = top.add_parser("features", help="feature extraction").add_subparsers(
        dest="subcommand", required=True)
    extract = feats.add_parser("extract", help="extract features from image + mask")
    extract.add_argument("--image", required=True)
    extract.add_argument("--mask", required=True)
    extract.add_argument("--out", required=True,
                         help="output path; .csv extension selects CSV, else GFV1")
    extract.add_argument("--centered", action="store_true",
                         help="emit centered features g instead of raw G")
    extract.set_defaults(func=_cmd_features_extract)

    verify = top.add_parser("verify", help="bound verification").add_subparsers(
        dest="subcommand", required=True)
    jl = verify.add_parser("jl", help="Monte Carlo distance-band coverage")
    jl.add_argument("--mode", choices=["gi", "gc"], default="gi")
    jl.add_argument("--height", type=int, default=8)
    jl.add_argument("--width", type=int, default=8)
    jl.add_argument("--m", type=int, default=512,
                    help="mask count (gi) or mask width (gc)")
    jl.add_argument("--q", type=float, default=0.1)
    jl.add_argument("--eps", type=float, action="append",
                    help="band half-width; repeatable (default 0.1 0.2)")
    jl.add_argument("--trials", type=int, default=2000)
    _add_seed(jl)
    jl.add_argument("--image-x", help="optional stored object (GFM1/CSV)")
    jl.add_argument("--image-y", help="optional stored object (GFM1/CSV)")
    jl.add_argument("--report", help="write the JSON report here")
    jl.add_argument("--csv", help="write the eps/rate series here")
    jl.set_defaults(func=_cmd_verify_jl)

    recon = top.add_parser("reconstruct",
                           help="simulate features and reconstruct the image")
    recon.add_argument("--image", required=True)
    recon.add_argument("--mask", help="existing gi mask file")
    recon.add_argument("--count", type=int, help="mask count when generating")
    recon.add_argument("--q", type=float, default=0.5)
    _add_seed(recon)
    recon.add_argument("--out", required=True)
    recon.add_argument("--no-rescale", action="store_true",
                       help="keep the raw correlation output")
    recon.set_defaults(func=_cmd_reconstruct)

    bounds = top.add_parser("bounds", help="bound evaluation").add_subparsers(
        dest="subcommand", required=True)
    beval = bounds.add_parser("eval", help="bound constants for a difference image")
    beval.add_argument("--image", required=True, help="difference image X - Y")
    beval.add_argument("--mode", choices=["gi", "gc"], default="gi")
    beval.add_argument("--q", type=float, required=True)
    beval.add_argument("--m", type=int, required=True)
    beval.add_argument("--eps", type=float, action="append")
    beval.add_argument("--report")
    beval.set_defaults(func=_cmd_bounds_eval)

    kernel = top.add_parser("kernel", help="kernel experiments").add_subparsers(
        dest="subcommand", required=True)
    gap = kernel.add_parser("gap", help="image-kernel vs feature-kernel gap")
    gap.add_argument("--mode", choices=["gi", "gc"], default="gi")
    gap.add_argument("--height", type=int, default=8)
    gap.add_argument("--width", type=int, default=8)
    gap.add_argument("--m", type=int, action="append", required=True,
                     help="mask count; repeatable")
    gap.add_argument("--q", type=float, default=0.1)
    gap.add_argument("--gamma", type=float, help="image kernel scale (default 1/(H*W))")
    gap.add_argument("--pairs", type=int, default=50)
    gap.add_argument("--mask-seeds", type=int, default=20)
    _add_seed(gap)
    gap.add_argument("--report")
    gap.add_argument("--csv")
    gap.set_defaults(func=_cmd_kernel_gap)

    classify = top.add_parser("classify", help="classification demos").add_subparsers(
        dest="subcommand", required=True)
    demo = classify.add_parser("demo", help="disk-vs-ring parity of both kernels")
    demo.add_argument("--height", type=int, default=16)
    demo.add_argument("--width", type=int, default=16)
    demo.add_argument("--m", type=int, default=1024)
    demo.add_argument("--q", type=float, default=0.1)
    demo.add_argument("--gamma", type=float)
    demo.add_argument("--train", type=int, default=200)
    demo.add_argument("--test", type=int, default=200)
    demo.add_argument("--k", type=int, default=1)
    _add_seed(demo)
    demo.add_argument("--report")
    demo.set_defaults(func=_cmd_classify_demo)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (io.FormatError, OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, TypeError) as exc:  # includes DegeneratePairError
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
