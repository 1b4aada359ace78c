"""Command-line interface over the alignment toolkit.

Scalar results are printed as JSON on stdout; matrices are written to
files (NPY by default).  Exit codes: 0 success, 1 usage error, 2 data or
shape error, 3 numeric error (no valid path, unsupported path).

Defaults the underlying method leaves open (omega, bin-weight, MCD
coefficient count, renormalization) are toolkit conventions, surfaced as
flags.

Subcommands taking a single input also accept ``--list manifest`` to
process many inputs in one invocation, emitting one JSON line per item;
per-item computation is independent, so batches are safe to parallelize
externally as well.
"""

import argparse
import json
import os
import sys
import warnings
from dataclasses import dataclass

import numpy as np

from . import align_dp, binarize, matio, metrics, prior, soft_align
from .errors import (
    DataError,
    DomainError,
    IncompleteCoverage,
    NumericError,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


@dataclass
class RunConfig:
    omega: float = 1.0           # toolkit convention, not a published value
    bin_weight: float = 1.0
    mcd_coeffs: int = 13
    renormalize: bool = True
    output_format: str = "npy"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit(obj):
    print(json.dumps(obj))


def _read(path):
    return matio.read_matrix(path)


def _manifest_lines(path):
    with open(path, "r", encoding="utf-8") as f:
        return [ln.strip() for ln in f if ln.strip()]


def _loss_result(soft, bin_weight):
    total, forward, bin_val, path = soft_align.align_loss_parallel(
        soft, bin_weight
    )
    return {
        "forward_sum": forward,
        "bin": bin_val,
        "total": total,
        "path": path.tolist(),
    }


def _cmd_loss(args):
    if args.list:
        for line in _manifest_lines(args.list):
            _emit(_loss_result(_read(line), args.bin_weight))
    else:
        _emit(_loss_result(_read(args.soft), args.bin_weight))
    return EXIT_OK


def _cmd_grad(args):
    def one(in_path, out_path):
        lp = _read(in_path)
        loss = align_dp.forward_sum_loss(lp)
        grad = align_dp.forward_sum_grad(lp)
        result = {"forward_sum": loss}
        if out_path:
            matio.write_matrix(grad, out_path, args.format)
            result["out"] = out_path
        _emit(result)

    if args.list:
        for idx, line in enumerate(_manifest_lines(args.list)):
            out = None
            if args.out_dir:
                out = os.path.join(args.out_dir, f"grad_{idx:04d}.{args.format}")
            one(line, out)
    else:
        one(args.logprobs, args.output)
    return EXIT_OK


def _cmd_viterbi(args):
    def one(in_path):
        path, score = align_dp.viterbi(_read(in_path))
        result = {"path": path.tolist(), "score": score}
        if args.output:
            matio.write_matrix(
                path.astype(np.float64), args.output, args.format
            )
        _emit(result)

    if args.list:
        for line in _manifest_lines(args.list):
            one(line)
    else:
        one(args.logprobs)
    return EXIT_OK


def _cmd_prior(args):
    def one(n_tokens, n_frames, omega, out_path):
        p = prior.build_prior(prior.PriorConfig(n_tokens, n_frames, omega))
        matio.write_matrix(p, out_path, args.format)
        _emit({"out": out_path, "tokens": n_tokens, "frames": n_frames,
               "omega": omega})

    if args.list:
        if not args.out_dir:
            raise UsageError("--list requires --out-dir")
        for idx, line in enumerate(_manifest_lines(args.list)):
            fields = line.split()
            if len(fields) != 3:
                raise DomainError(
                    f"manifest line {idx + 1}: expected 'tokens frames omega'"
                )
            one(int(fields[0]), int(fields[1]), float(fields[2]),
                os.path.join(args.out_dir, f"prior_{idx:04d}.{args.format}"))
    else:
        if args.tokens is None or args.frames is None or not args.output:
            raise UsageError("prior requires --tokens, --frames and -o")
        one(args.tokens, args.frames, args.omega, args.output)
    return EXIT_OK


def _cmd_posterior(args):
    lp = _read(args.logprobs)
    if args.prior:
        pr = _read(args.prior)
    else:
        pr = prior.build_prior(
            prior.PriorConfig(lp.shape[1], lp.shape[0], args.omega)
        )
    out = prior.apply_prior(lp, pr, renormalize=args.renormalize)
    matio.write_matrix(out, args.output, args.format)
    _emit({"out": args.output})
    return EXIT_OK


def _cmd_binarize(args):
    attn = _read(args.attn)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        path = binarize.monotonic_argmax(attn)
    incomplete = any(
        issubclass(w.category, IncompleteCoverage) for w in caught
    )
    if args.output:
        matio.write_matrix(path.astype(np.float64), args.output, args.format)
    _emit({"path": path.tolist(), "incomplete_coverage": incomplete})
    return EXIT_OK


def _cmd_durations(args):
    if args.path:
        p = matio.read_matrix(args.path).ravel()
        if args.tokens is None:
            raise UsageError("--path requires --tokens")
        n = args.tokens
        path = p.astype(np.int64)
    else:
        attn = _read(args.attn)
        n = attn.shape[1]
        if args.method == "viterbi":
            with np.errstate(divide="ignore"):
                path, _ = align_dp.viterbi(np.log(attn))
        else:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", IncompleteCoverage)
                path = binarize.monotonic_argmax(attn)
    durs = binarize.durations_from_hard(path, n)
    _emit({"durations": durs.tolist()})
    return EXIT_OK


def _cmd_mcd(args):
    ref = _read(args.ref)
    hyp = _read(args.hyp)
    if args.from_mel:
        ref = metrics.mel_to_cepstrum(ref, args.coeffs)
        hyp = metrics.mel_to_cepstrum(hyp, args.coeffs)
    _emit({"mcd": metrics.mcd(ref, hyp)})
    return EXIT_OK


def _cmd_durdist(args):
    pred = matio.read_matrix(args.pred).ravel()
    truth = matio.read_matrix(args.truth).ravel()
    _emit({"duration_l1": metrics.duration_l1(pred, truth)})
    return EXIT_OK


def _cmd_heatmap(args):
    matio.heatmap(_read(args.input), args.output)
    _emit({"out": args.output})
    return EXIT_OK


def build_parser():
    cfg = RunConfig()
    parser = _Parser(prog="monoalign")
    sub = parser.add_subparsers(dest="command", required=True)

    def fmt_flag(p):
        p.add_argument("--format", choices=["npy", "tsv"],
                       default=cfg.output_format)

    p = sub.add_parser("loss", help="forward-sum + binarization loss")
    p.add_argument("--soft")
    p.add_argument("--list")
    p.add_argument("--bin-weight", type=float, default=cfg.bin_weight)
    p.set_defaults(func=_cmd_loss)

    p = sub.add_parser("grad", help="forward-sum loss and gradient")
    p.add_argument("--logprobs")
    p.add_argument("--list")
    p.add_argument("--out-dir")
    p.add_argument("-o", "--output")
    fmt_flag(p)
    p.set_defaults(func=_cmd_grad)

    p = sub.add_parser("viterbi", help="most likely monotonic path")
    p.add_argument("--logprobs")
    p.add_argument("--list")
    p.add_argument("-o", "--output")
    fmt_flag(p)
    p.set_defaults(func=_cmd_viterbi)

    p = sub.add_parser("prior", help="beta-binomial prior matrix")
    p.add_argument("--tokens", type=int)
    p.add_argument("--frames", type=int)
    p.add_argument("--omega", type=float, default=cfg.omega)
    p.add_argument("--list")
    p.add_argument("--out-dir")
    p.add_argument("-o", "--output")
    fmt_flag(p)
    p.set_defaults(func=_cmd_prior)

    p = sub.add_parser("posterior", help="apply prior to log-probs")
    p.add_argument("--logprobs", required=True)
    p.add_argument("--prior")
    p.add_argument("--omega", type=float, default=cfg.omega)
    p.add_argument("--renormalize", action=argparse.BooleanOptionalAction,
                   default=cfg.renormalize)
    p.add_argument("-o", "--output", required=True)
    fmt_flag(p)
    p.set_defaults(func=_cmd_posterior)

    p = sub.add_parser("binarize", help="monotonic argmax binarization")
    p.add_argument("--attn", required=True)
    p.add_argument("-o", "--output")
    fmt_flag(p)
    p.set_defaults(func=_cmd_binarize)

    p = sub.add_parser("durations", help="per-token frame counts")
    p.add_argument("--path")
    p.add_argument("--tokens", type=int)
    p.add_argument("--attn")
    p.add_argument("--method", choices=["viterbi", "argmax"],
                   default="viterbi")
    p.set_defaults(func=_cmd_durations)

    p = sub.add_parser("mcd", help="DTW-aligned mel-cepstral distance")
    p.add_argument("--ref", required=True)
    p.add_argument("--hyp", required=True)
    p.add_argument("--from-mel", action="store_true")
    p.add_argument("--coeffs", type=int, default=cfg.mcd_coeffs)
    p.set_defaults(func=_cmd_mcd)

    p = sub.add_parser("durdist", help="duration L1 distance")
    p.add_argument("--pred", required=True)
    p.add_argument("--truth", required=True)
    p.set_defaults(func=_cmd_durdist)

    p = sub.add_parser("heatmap", help="PGM heatmap of a matrix")
    p.add_argument("--input", required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_heatmap)

    return parser


def cli_dispatch(argv):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"monoalign: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"monoalign: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericError as exc:
        print(f"monoalign: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DataError, OSError, ValueError) as exc:
        print(f"monoalign: {exc}", file=sys.stderr)
        return EXIT_DATA


def main(argv=None):
    return cli_dispatch(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
