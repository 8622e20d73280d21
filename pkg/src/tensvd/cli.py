"""Command line entry point: ``tensvd compress|decompress|info|score|bench``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from math import prod
from pathlib import Path

from threadpoolctl import threadpool_limits

from . import codec
from .bench import DESK_SCENARIOS, format_table, run_benchmark
from .compression import CompressedTensor, CompressionTarget, compress, decompress
from .hosvd import TuckerFactors, ranks_for_budget, reconstruct, t_hosvd
from .media_io import MediaError, load_frames, load_image, save_frames, save_image
from .metrics import quality_report, timed


def _load_media(path, pattern):
    path = Path(path)
    if path.is_dir():
        return load_frames(path, pattern)
    return load_image(path)


def _save_media(t, path):
    if t.order == 4:
        save_frames(t, path)
    else:
        save_image(t, path)


def _emit(args, fields: dict, report=None):
    if args.json:
        out = dict(fields)
        if report is not None:
            out["report"] = json.loads(report.to_json())
        print(json.dumps(out))
        return
    for k, v in fields.items():
        print(f"{k}={v}")
    if report is not None:
        print(report.to_text())


def _parse_ranks(text: str):
    try:
        return tuple(int(r) for r in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad rank list {text!r}") from None


def _check_compress_args(args) -> None:
    if args.algorithm == "tensvd":
        if args.ranks is not None:
            args.usage_error("--ranks only applies to --algorithm thosvd")
        if args.eps is None and args.cr is None:
            args.usage_error("one of --eps or --cr is required")
    else:
        if args.eps is not None:
            args.usage_error("thosvd takes --ranks or --cr, not --eps")
        if args.ranks is None and args.cr is None:
            args.usage_error("thosvd needs --ranks or --cr")


def cmd_compress(args) -> int:
    _check_compress_args(args)
    x = _load_media(args.input, args.pattern)
    fields = {"input": args.input, "dims": list(x.dims), "algorithm": args.algorithm}
    if args.algorithm == "tensvd":
        target = (
            CompressionTarget.accuracy(args.eps)
            if args.eps is not None
            else CompressionTarget.fraction(args.cr)
        )
        c, elapsed = timed(lambda: compress(x, target, order_hint=args.order))
        nbytes = codec.save(c, args.output)
        xhat = decompress(c)
        stored = c.stored_count
        fields.update(
            reshaped_dims=list(c.plan.reshaped_dims),
            kept_entries=len(c.sparse_core),
            predicted_err=c.predicted_error,
        )
    else:
        ranks = args.ranks if args.ranks is not None else ranks_for_budget(x.dims, args.cr)
        method = "svd" if args.direct_svd else "gram"
        f, elapsed = timed(lambda: t_hosvd(x, ranks, method=method))
        nbytes = codec.save(f, args.output)
        xhat = reconstruct(f)
        stored = f.stored_count
        fields["ranks"] = list(ranks)
    fields.update(stored_count=stored, file_bytes=nbytes)
    report = quality_report(x, xhat, stored, elapsed, psnr_as_printed=args.psnr_as_printed)
    _emit(args, fields, report)
    return 0


def _stored_and_rebuild(obj):
    if isinstance(obj, TuckerFactors):
        return obj.stored_count, reconstruct(obj)
    return obj.stored_count, decompress(obj)


def cmd_decompress(args) -> int:
    obj = codec.load(args.input)
    stored, xhat = _stored_and_rebuild(obj)
    _save_media(xhat, args.output)
    fields = {"output": args.output, "dims": list(xhat.dims), "stored_count": stored}
    report = None
    if args.ref:
        x = _load_media(args.ref, args.pattern)
        report = quality_report(x, xhat, stored, psnr_as_printed=args.psnr_as_printed)
    _emit(args, fields, report)
    return 0


def cmd_info(args) -> int:
    data = Path(args.input).read_bytes()
    obj = codec.decode_any(data)
    if isinstance(obj, CompressedTensor):
        fields = {
            "format": "tsvd",
            "version": codec.VERSION,
            "original_dims": list(obj.plan.original_dims),
            "reshaped_dims": list(obj.plan.reshaped_dims),
            "kept_entries": len(obj.sparse_core),
            "total_energy": obj.total_energy,
        }
    else:
        fields = {
            "format": "thosvd",
            "version": codec.VERSION,
            "original_dims": list(obj.dims),
            "ranks": list(obj.ranks),
        }
    size = prod(fields["original_dims"])
    fields.update(
        stored_count=obj.stored_count,
        stored_fraction=obj.stored_count / size,
        file_bytes=len(data),
    )
    _emit(args, fields)
    return 0


def cmd_score(args) -> int:
    x = _load_media(args.reference, args.pattern)
    xhat = _load_media(args.candidate, args.pattern)
    report = quality_report(x, xhat, x.size, psnr_as_printed=args.psnr_as_printed)
    _emit(args, {}, report)
    return 0


def cmd_bench(args) -> int:
    scenarios = args.scenario or list(DESK_SCENARIOS)
    method = "svd" if args.direct_svd else "gram"
    results = [
        run_benchmark(s, reps=args.reps, seed=args.seed, stored_fraction=args.cr,
                      method=method, order_hint=args.order)
        for s in scenarios
    ]
    if args.json:
        print(json.dumps([r.to_dict() for r in results]))
    else:
        print(format_table(results))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tensvd", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--json", action="store_true", help="print one JSON object")
        p.add_argument("--pattern", default="*.png", help="frame glob for directories")
        p.add_argument("--psnr-as-printed", action="store_true",
                       help="PSNR with sqrt(MSE) in the denominator")

    p = sub.add_parser("compress", help="compress an image or frame directory")
    p.add_argument("input")
    p.add_argument("output")
    target = p.add_mutually_exclusive_group()
    target.add_argument("--eps", type=float, help="relative error budget")
    target.add_argument("--cr", type=float, help="stored-fraction budget")
    p.add_argument("--order", type=int, help="order of the reshaped tensor")
    p.add_argument("--algorithm", choices=("tensvd", "thosvd"), default="tensvd")
    p.add_argument("--ranks", type=_parse_ranks, help="thosvd ranks, e.g. 200,200,3")
    p.add_argument("--direct-svd", action="store_true",
                   help="thosvd factors from an SVD of each unfolding")
    common(p)
    p.set_defaults(func=cmd_compress, usage_error=p.error)

    p = sub.add_parser("decompress", help="rebuild media from a compressed file")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--ref", help="original media, for a quality report")
    common(p)
    p.set_defaults(func=cmd_decompress)

    p = sub.add_parser("info", help="describe a compressed file")
    p.add_argument("input")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("score", help="quality metrics between two media")
    p.add_argument("reference")
    p.add_argument("candidate")
    common(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("bench", help="timing comparison on random tensors")
    p.add_argument("--scenario", action="append",
                   help="hd, fullhd, twok, qhd, qkuhd, fk, sk, ek or HxWxC (repeatable)")
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cr", type=float, default=0.166, help="stored-fraction budget")
    p.add_argument("--order", type=int)
    p.add_argument("--direct-svd", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    threads = int(os.environ.get("TENSVD_THREADS", "1"))
    try:
        with threadpool_limits(limits=threads):
            return args.func(args)
    except (codec.CodecError, MediaError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
