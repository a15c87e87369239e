"""Command-line interface: scene synthesis, gradients, segmentation,
truth masks and verification reports.

Exit codes are stable: 0 success, 2 I/O or format problems, 3 algorithmic
preconditions (constant gradient field, no surviving markers), 64 usage.
Every subcommand is a pure function of its input files and flags, so
repeated invocations write byte-identical outputs.
"""

import argparse
import csv
import dataclasses
import json
import sys

from .ccs import CcsConfig, ccs_cloud_mask, ccs_segment
from .formats import (
    FormatError,
    read_cloud_mask,
    read_raster_file,
    read_volume_file,
    write_raster_file,
    write_volume_file,
)
from .markers import ConstantFieldError, NoSeedRegionsError, generate_markers, otsu_threshold
from .morphology import GradientConfig, multispectral_gradient
from .raster import MultiChannelImage, Raster2D, Units
from .synth import PRESETS, generate_scene, make_preset, read_scene_spec
from .verification import contingency, derive_truth_mask, verify
from .watershed import EmptyMarkerMapError, classify_regions, merge_small_regions, watershed_from_markers

EXIT_OK = 0
EXIT_DATA = 2
EXIT_ALGORITHM = 3
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    """argparse variant whose usage failures exit with code 64."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {value}")
    return value


def _nonneg_float(text: str) -> float:
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative number, got {value}")
    return value


def _level_list(text: str) -> tuple:
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad level list {text!r}, expected e.g. 220,235,253")


def _channel_list(text: str) -> tuple:
    return tuple(part.strip() for part in text.split(",") if part.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cloudseg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", help="generate a synthetic scene and its hydrometeor volume")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--preset", choices=sorted(PRESETS), help="shipped scene preset")
    source.add_argument("--spec", help="scene spec file (key = value lines)")
    p.add_argument("--seed", type=_nonneg_int, default=None, help="override the rng seed")
    p.add_argument("--noise-sigma", type=_nonneg_float, default=None, help="override the noise level (K)")
    p.add_argument("--scene-output", required=True, help="GMS1 path for the channels")
    p.add_argument("--volume-output", required=True, help="GMSV path for the hydrometeors")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("gradient", help="write the multi-spectral gradient of a scene")
    p.add_argument("--input", required=True, help="GMS1 scene")
    p.add_argument("--output", required=True, help="GMS1 path for the 1-channel gradient")
    p.add_argument("--scales", type=_positive_int, default=5)
    p.add_argument("--channels", type=_channel_list, default=None, help="comma-separated subset, default all")
    p.add_argument("--normalize-channels", action="store_true")
    p.set_defaults(func=_cmd_gradient)

    p = sub.add_parser("segment", help="gradient, markers, watershed and cloud classification")
    p.add_argument("--input", required=True, help="GMS1 scene")
    p.add_argument("--scales", type=_positive_int, default=5)
    p.add_argument("--channels", type=_channel_list, default=None)
    p.add_argument("--normalize-channels", action="store_true")
    p.add_argument("--bins", type=_positive_int, default=256, help="Otsu histogram bins")
    p.add_argument("--min-seed-area", type=_positive_int, default=8)
    p.add_argument("--min-area", type=_nonneg_int, default=0, help="post-merge region size, 0 disables")
    p.add_argument("--clear-sky-cutoff", type=float, default=280.0, help="mean-BT cloud cutoff (K)")
    p.add_argument("--bt-channel", default=None, help="channel classified against, default first selected")
    p.add_argument("--segments-output", required=True, help="GMS1 path for the label map")
    p.add_argument("--mask-output", required=True, help="GMS1 path for the cloud mask")
    p.add_argument("--stats-output", required=True, help="CSV path for per-region stats")
    p.set_defaults(func=_cmd_segment)

    p = sub.add_parser("ccs", help="incremental-threshold region growing baseline")
    p.add_argument("--input", required=True, help="GMS1 scene")
    p.add_argument("--levels", type=_level_list, default=(220.0, 235.0, 253.0),
                   help="ascending threshold levels, e.g. 220,235,253")
    p.add_argument("--min-area", type=_positive_int, default=50)
    p.add_argument("--bt-channel", default=None)
    p.add_argument("--segments-output", required=True)
    p.add_argument("--mask-output", required=True)
    p.set_defaults(func=_cmd_ccs)

    p = sub.add_parser("truth-mask", help="derive the cloud truth mask from a hydrometeor volume")
    p.add_argument("--input", required=True, help="GMSV volume")
    p.add_argument("--threshold", type=float, default=1e-6, help="mixing-ratio threshold (kg/kg)")
    p.add_argument("--output", required=True, help="GMS1 path for the mask")
    p.set_defaults(func=_cmd_truth_mask)

    p = sub.add_parser("evaluate", help="contingency table and scores for two masks")
    p.add_argument("--prediction", required=True, help="GMS1 mask being scored")
    p.add_argument("--truth", required=True, help="GMS1 reference mask")
    p.add_argument("--output", required=True, help="JSON report path")
    p.set_defaults(func=_cmd_evaluate)

    return parser


def _select_channels(img: MultiChannelImage, wanted) -> MultiChannelImage:
    if not wanted:
        return img
    return MultiChannelImage(tuple((cid, img.raster(cid)) for cid in wanted))


def _cmd_synth(args) -> int:
    if args.preset is not None:
        spec = make_preset(args.preset, noise_sigma=args.noise_sigma,
                           rng_seed=0 if args.seed is None else args.seed)
    else:
        spec = read_scene_spec(args.spec)
        if args.seed is not None:
            spec = dataclasses.replace(spec, rng_seed=args.seed)
        if args.noise_sigma is not None:
            spec = dataclasses.replace(spec, noise_sigma=args.noise_sigma)
    image, volume = generate_scene(spec)
    write_raster_file(image, args.scene_output)
    write_volume_file(volume, args.volume_output)
    return EXIT_OK


def _fused_gradient(args):
    image = read_raster_file(args.input)
    selected = _select_channels(image, args.channels)
    cfg = GradientConfig(n_scales=args.scales, normalize_channels=args.normalize_channels)
    return selected, multispectral_gradient(selected, cfg)


def _cmd_gradient(args) -> int:
    _, field = _fused_gradient(args)
    out = MultiChannelImage((("gradient", Raster2D(field.values, Units.DIMENSIONLESS)),))
    write_raster_file(out, args.output)
    return EXIT_OK


def _cmd_segment(args) -> int:
    selected, field = _fused_gradient(args)
    otsu = otsu_threshold(field, bins=args.bins)
    marker_map = generate_markers(field, otsu, min_seed_area=args.min_seed_area)
    seg = watershed_from_markers(field, marker_map)
    if args.min_area > 0:
        seg = merge_small_regions(seg, field, min_area=args.min_area)
    bt = selected.raster(args.bt_channel or selected.channel_ids[0])
    mask, stats = classify_regions(seg, bt, clear_sky_cutoff=args.clear_sky_cutoff, gradient=field)
    write_raster_file(seg, args.segments_output)
    write_raster_file(mask, args.mask_output)
    with open(args.stats_output, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["label", "area", "mean_bt", "min_bt", "mean_gradient", "is_cloud"])
        for s in stats:
            writer.writerow([s.label, s.area, f"{s.mean_bt:.6f}", f"{s.min_bt:.6f}",
                             f"{s.mean_gradient:.6f}", "true" if s.is_cloud else "false"])
    return EXIT_OK


def _cmd_ccs(args) -> int:
    image = read_raster_file(args.input)
    bt = image.raster(args.bt_channel or image.channel_ids[0])
    cfg = CcsConfig(threshold_levels=args.levels, min_area=args.min_area)
    seg = ccs_segment(bt, cfg)
    write_raster_file(seg, args.segments_output)
    write_raster_file(ccs_cloud_mask(seg), args.mask_output)
    return EXIT_OK


def _cmd_truth_mask(args) -> int:
    volume = read_volume_file(args.input)
    write_raster_file(derive_truth_mask(volume, threshold=args.threshold), args.output)
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    prediction = read_cloud_mask(args.prediction)
    truth = read_cloud_mask(args.truth)
    report = verify(contingency(prediction, truth))
    with open(args.output, "w") as fh:
        json.dump(report.to_json_dict(), fh, indent=2)
        fh.write("\n")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConstantFieldError, NoSeedRegionsError, EmptyMarkerMapError) as exc:
        print(f"cloudseg: {exc}", file=sys.stderr)
        return EXIT_ALGORITHM
    except (FormatError, OSError, ValueError, KeyError) as exc:
        print(f"cloudseg: {exc}", file=sys.stderr)
        return EXIT_DATA


def run() -> None:
    sys.exit(main())
