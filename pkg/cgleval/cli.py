"""
Command line interface.

.. code:: text

    cgleval eval --pred-dir P --gt-dir G --metrics miou,dar --out r.json
    cgleval dar-debug --pred p.png --gt g.png --dump-dir D
    cgleval kernel-dump --sigma 3.0

Metrics are computed at the resolution the two masks share. Predictions made
at a lower resolution (such as H/4 x W/4 model outputs) must be upsampled to
the ground truth resolution beforehand.

Exit codes: ``0`` success, ``1`` usage or config error, ``2`` at least one
image failed (the report is still written).
"""
import sys
import logging
import argparse
import numpy as np
from cgleval import __version__
from cgleval.enums import EAggregationMode, EBorderMode, EEmptyGtPolicy, EReportFormat
from cgleval.exceptions import CglEvalError, ConfigError
from cgleval.config import SETTING_KEYS, EvalConfig, load_config_file
from cgleval.dar import DarParams, dar_debug_dump, dar_score, vanish_cutoff
from cgleval.evaluator import Evaluator
from cgleval.masks import binarize, binary_remap, load_label_map, load_remap
from cgleval.report import write_report

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IMAGE_FAILURE = 2

LOG_FORMAT = '[%(asctime)s] %(levelname)s %(name)s: %(message)s'


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, "%s: error: %s\n" % (self.prog, message))


def _choices(enum):
    return [member.value for member in enum]


def _add_dar_flags(parser):
    group = parser.add_argument_group('DaR')
    group.add_argument('--sigma', type=float, help="Gaussian standard deviation in pixels (default: 3.0)")
    group.add_argument('--th', type=float, help="threshold on the blurred field (default: 0.999)")
    group.add_argument('--kernel-radius', type=int, help="kernel half width (default: ceil(3 * sigma))")
    group.add_argument('--border', choices=_choices(EBorderMode), help="border handling (default: zero)")
    group.add_argument('--clamp-dar', action='store_const', const=True,
                       help="clamp negative DaR scores to 0")
    group.add_argument('--empty-gt', choices=_choices(EEmptyGtPolicy),
                       help="empty ground truth: skip the image, or score 1/0 (default: skip)")


def _add_mask_flags(parser):
    parser.add_argument('--positive-class', type=int, help="CGL class id (default: 1)")
    parser.add_argument('--num-classes', type=int, help="classes per label map (default: 2)")
    parser.add_argument('--remap', help="remap file with value=class lines")


def build_parser():
    parser = _ArgumentParser(prog='cgleval',
                             description="Segmentation evaluation with IoU and Dimension-agnostic Recall")
    parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    parser.add_argument('-v', '--verbose', action='store_true', help="debug logging")

    commands = parser.add_subparsers(dest='command', parser_class=_ArgumentParser)

    cmd = commands.add_parser('eval', help="evaluate a directory of predictions",
                              description="Evaluate prediction masks against ground truth masks. "
                                          "Masks are paired by filename stem and compared at their "
                                          "shared resolution; upsample low resolution predictions "
                                          "to the ground truth size first.")
    cmd.add_argument('--config', help="flat key=value settings file; flags take precedence")
    cmd.add_argument('--pred-dir', help="directory with predicted masks")
    cmd.add_argument('--gt-dir', help="directory with ground truth masks")
    cmd.add_argument('--metrics', help="comma separated subset of miou,class-iou,dar (default: all)")
    _add_mask_flags(cmd)
    _add_dar_flags(cmd)
    cmd.add_argument('--iou-agg', choices=_choices(EAggregationMode),
                     help="IoU aggregation over images (default: per-image)")
    cmd.add_argument('--workers', type=int, help="worker threads (default: 1)")
    cmd.add_argument('--out', help="report path (default: stdout)")
    cmd.add_argument('--format', choices=_choices(EReportFormat), help="report format (default: json)")
    cmd.add_argument('--dump-dir', help="write DaR intermediates per image below this directory")
    cmd.set_defaults(handler=cmd_eval, command_parser=cmd)

    cmd = commands.add_parser('dar-debug', help="write the DaR intermediates of one pair")
    cmd.add_argument('--pred', required=True, help="predicted mask")
    cmd.add_argument('--gt', required=True, help="ground truth mask")
    cmd.add_argument('--dump-dir', required=True, help="output directory")
    _add_mask_flags(cmd)
    _add_dar_flags(cmd)
    cmd.set_defaults(handler=cmd_dar_debug, command_parser=cmd)

    cmd = commands.add_parser('kernel-dump', help="print the Gaussian kernel in use")
    cmd.add_argument('--sigma', type=float, default=3.0)
    cmd.add_argument('--th', type=float, default=0.999)
    cmd.add_argument('--kernel-radius', type=int)
    cmd.set_defaults(handler=cmd_kernel_dump, command_parser=cmd)

    return parser


def _flag_settings(args, keys):
    settings = {}
    for key in keys:
        value = getattr(args, key.replace('-', '_'), None)
        if value is not None:
            settings[key] = value
    return settings


def _dar_params(args):
    settings = _flag_settings(args, ('sigma', 'th', 'kernel-radius', 'border', 'empty-gt', 'clamp-dar'))
    try:
        return DarParams(sigma=settings.get('sigma', 3.0),
                         th=settings.get('th', 0.999),
                         kernel_radius=settings.get('kernel-radius'),
                         border_mode=settings.get('border', EBorderMode.Zero),
                         empty_gt_policy=settings.get('empty-gt', EEmptyGtPolicy.Skip),
                         clamp_negative=settings.get('clamp-dar', False),
                         )
    except (CglEvalError, ValueError) as exp:
        raise ConfigError(str(exp))


def cmd_eval(args, parser):
    settings = {}
    if args.config:
        settings.update(load_config_file(args.config))

    settings.update(_flag_settings(args, SETTING_KEYS))

    if not settings.get('pred-dir') or not settings.get('gt-dir'):
        parser.print_help(sys.stderr)
        return EXIT_CONFIG

    config = EvalConfig.from_mapping(settings)
    if not config.output and config.output_format != EReportFormat.Json:
        raise ConfigError("CSV reports need --out")

    report = Evaluator(config).run()

    if config.output:
        write_report(report, config.output, config.output_format)
    else:
        sys.stdout.write(report.to_json())

    return EXIT_IMAGE_FAILURE if report.failed else EXIT_OK


def cmd_dar_debug(args, parser):
    params = _dar_params(args)
    num_classes = args.num_classes or 2
    positive_class = 1 if args.positive_class is None else args.positive_class

    if args.remap:
        try:
            remap = load_remap(args.remap)
        except (CglEvalError, OSError) as exp:
            raise ConfigError("bad remap file %r: %s" % (args.remap, exp))
    else:
        remap = binary_remap() if num_classes == 2 else None

    try:
        pred = load_label_map(args.pred, num_classes, remap)
        gt = load_label_map(args.gt, num_classes, remap)
        result = dar_score(binarize(pred, positive_class),
                           binarize(gt, positive_class),
                           params,
                           keep_intermediates=True)
    except (CglEvalError, OSError) as exp:
        print("error: %s" % exp, file=sys.stderr)
        return EXIT_IMAGE_FAILURE

    try:
        paths = dar_debug_dump(result, args.dump_dir)
    except OSError as exp:
        print("error: unable to write %s: %s" % (args.dump_dir, exp), file=sys.stderr)
        return EXIT_IMAGE_FAILURE

    print("dar: %s" % ('skipped (empty ground truth)' if result.skipped else repr(result.score)))
    print("surviving_fp: %d" % result.surviving_fp)
    print("surviving_fn: %d" % result.surviving_fn)
    print("gt_ones: %d" % result.gt_ones)
    for path in paths:
        print(path)

    return EXIT_OK


def cmd_kernel_dump(args, parser):
    params = _dar_params(args)
    kernel = params.kernel

    print("sigma: %r" % kernel.sigma)
    print("radius: %d (%dx%d)" % (kernel.radius, kernel.size, kernel.size))
    print("center_weight: %r" % kernel.center_weight)
    print("weight_sum: %r" % float(kernel.weights.sum()))
    print("vanish_cutoff: %d (th=%r)" % (vanish_cutoff(kernel, params.th), params.th))
    print(np.array2string(kernel.weights, precision=6, max_line_width=200, threshold=10 ** 6))

    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.verbose:
        logging.basicConfig(format=LOG_FORMAT, level=logging.DEBUG)
    else:
        logging.basicConfig(format=LOG_FORMAT, level=logging.WARNING)

    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_CONFIG

    try:
        return args.handler(args, args.command_parser)
    except ConfigError as exp:
        print("error: %s" % exp, file=sys.stderr)
        return EXIT_CONFIG


if __name__ == '__main__':
    sys.exit(main())
