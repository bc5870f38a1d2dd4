"""Command-line front end: structure analysis, TS enumeration, prediction, simulation.

Every subcommand reads one code (exponent-matrix or alist text), writes CSV
(optionally JSON) prefixed by a run-metadata header, and is byte-reproducible
for a fixed seed regardless of worker count.  Exit codes: 0 success, 1 usage,
2 input error, 3 budget exhausted (partial result emitted).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys

from . import __version__
from .code_model import (
    ExponentMatrix,
    ParseError,
    expand,
    parse_alist,
    parse_exponent_matrix,
    write_alist,
)
from .decoder import DecoderConfig, QuantizationSpec
from .error_floor import predict_floors
from .graph_analysis import cycle_density_per_node, emd_spectrum, girth
from .sim import simulate
from .ts_enum import TsEnumConfig, brute_force_ts_oracle, enumerate_ts


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _config_hash(params: dict) -> str:
    # execution knobs (threads, memory) must not affect output bytes
    skip = {"threads", "mem_limit", "output"}
    items = sorted((k, repr(v)) for k, v in params.items() if k not in skip)
    return hashlib.sha256(repr(items).encode()).hexdigest()[:12]


def _header(seed, params: dict) -> list:
    return [
        f"# qcldpc {__version__}",
        f"# seed={seed}",
        f"# config={_config_hash(params)}",
    ]


def _load_code(path: str, fmt: str | None):
    if not os.path.exists(path):
        raise FileNotFoundError(f"file not found: {path}")
    text = open(path).read()
    if fmt is None:
        fmt = "alist" if path.endswith((".alist", ".txt")) else "exponent"
    if fmt == "exponent":
        return parse_exponent_matrix(text)
    if fmt == "alist":
        return parse_alist(text)
    raise _UsageError(f"unknown format {fmt!r}")


def _emit(lines, output: str | None):
    text = "\n".join(lines) + "\n"
    if output:
        with open(output, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _add_common(p):
    p.add_argument("input", help="code file (exponent matrix or alist)")
    p.add_argument("--format", choices=["exponent", "alist"], default=None)
    p.add_argument("-o", "--output", default=None, help="output path (default stdout)")
    p.add_argument("--seed", type=int, default=12345)
    p.add_argument("--threads", type=int,
                   default=int(os.environ.get("QCLDPC_THREADS", "1")))


def _need_exponent(code):
    if not isinstance(code, ExponentMatrix):
        raise _UsageError("this subcommand needs an exponent-matrix input")
    return code


def build_parser() -> _Parser:
    ap = _Parser(prog="qcldpc", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("expand", help="expand a QC code and print its alist")
    _add_common(p)

    p = sub.add_parser("girth", help="shortest cycle length of the Tanner graph")
    _add_common(p)

    p = sub.add_parser("emd-spectrum", help="cycle length/EMD histogram (CSV)")
    _add_common(p)
    p.add_argument("--max-len", type=int, default=10)

    p = sub.add_parser("cycle-density", help="per-block-row/column cycle averages")
    _add_common(p)
    p.add_argument("--lengths", default="4,6")

    p = sub.add_parser("ts-enum", help="impulse-driven trapping-set enumeration")
    _add_common(p)
    p.add_argument("--amax", type=int, default=8)
    p.add_argument("--bmax", type=int, default=None)
    p.add_argument("--eps", default="0.5,1.0,1.5,2.0")
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--snr", type=float, default=4.0)
    p.add_argument("--iters", type=int, default=20)
    p.add_argument("--alpha", type=float, default=0.75)
    p.add_argument("--qbits", default="4,4,6", help="llr,c2v,v2c widths")
    p.add_argument("--budget", type=int, default=700, help="impulse sets per root")
    p.add_argument("--max-decodes", type=int, default=None)
    p.add_argument("--mem-limit", type=int, default=None, help="MiB ceiling hint")
    p.add_argument("--json", dest="json_out", default=None,
                   help="also write canonical VN sets as JSON")

    p = sub.add_parser("ts-oracle", help="exhaustive trapping-set census (small a)")
    _add_common(p)
    p.add_argument("--amax", type=int, default=4)
    p.add_argument("--bmax", type=int, default=None)

    p = sub.add_parser("weight", help="importance-sampled failure weight per class")
    _add_common(p)
    p.add_argument("--spectrum", required=True, help="ts-enum JSON output")
    p.add_argument("--snr", default="4.0,4.5,5.0")
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--rate", type=float, default=None)

    p = sub.add_parser("predict", help="error-floor FER/BER prediction")
    _add_common(p)
    p.add_argument("--spectrum", required=True, help="ts-enum JSON output")
    p.add_argument("--snr", default="4.0,4.5,5.0")
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--rate", type=float, default=None)
    p.add_argument("--max-classes", type=int, default=None)

    p = sub.add_parser("simulate", help="direct Monte-Carlo BER/FER")
    _add_common(p)
    p.add_argument("--snr", default="3.0,3.5,4.0")
    p.add_argument("--target-errors", type=int, default=200)
    p.add_argument("--max-frames", type=int, default=20000)
    p.add_argument("--iters", type=int, default=20)
    p.add_argument("--alpha", type=float, default=0.75)
    p.add_argument("--qbits", default="4,4,6")
    return ap


def _parse_floats(text: str):
    return [float(t) for t in text.replace(" ", "").split(",") if t]


def _spectrum_from_json(path: str):
    from .ts_enum import TrappingSet, TsSpectrum

    with open(path) as f:
        doc = json.load(f)
    spec = TsSpectrum(a_max=doc["a_max"], b_max=doc["b_max"],
                      complete=doc.get("complete", True))
    for row in doc["sets"]:
        spec.insert(TrappingSet(tuple(row["vns"]), tuple(row["odd_checks"]),
                                row["orbit_size"]))
    return spec


def _run(args) -> int:
    params = {k: v for k, v in vars(args).items() if k != "cmd"}
    header = _header(getattr(args, "seed", 0), params)
    cmd = args.cmd

    if cmd == "expand":
        code = _load_code(args.input, args.format)
        Hm = expand(_need_exponent(code))
        _emit([write_alist(Hm).rstrip("\n")], args.output)
        return 0

    if cmd == "girth":
        code = _load_code(args.input, args.format)
        g = girth(code)
        _emit(header + [str(int(g)) if math.isfinite(g) else "inf"], args.output)
        return 0

    if cmd == "emd-spectrum":
        code = _need_exponent(_load_code(args.input, args.format))
        spec = emd_spectrum(code, max_len=args.max_len)
        lines = header + ["length,emd,orbit_count,raw_count"]
        for (ln, e) in sorted(set(spec.counts) | set(spec.raw_counts)):
            lines.append(f"{ln},{e},{spec.counts.get((ln, e), 0)},"
                         f"{spec.raw_counts.get((ln, e), 0)}")
        _emit(lines, args.output)
        return 0

    if cmd == "cycle-density":
        code = _need_exponent(_load_code(args.input, args.format))
        lengths = tuple(int(x) for x in _parse_floats(args.lengths))
        dens = cycle_density_per_node(code, lengths=lengths)
        lines = header + ["kind,index," + ",".join(
            f"avg{ln},raw{ln}" for ln in lengths)]
        for i in range(code.m):
            cells = [f"{dens.row_avg[ln][i]:.6g},{dens.row_raw[ln][i]}" for ln in lengths]
            lines.append(f"row,{i}," + ",".join(cells))
        for j in range(code.n):
            cells = [f"{dens.col_avg[ln][j]:.6g},{dens.col_raw[ln][j]}" for ln in lengths]
            lines.append(f"col,{j}," + ",".join(cells))
        _emit(lines, args.output)
        return 0

    if cmd == "ts-enum":
        code = _load_code(args.input, args.format)
        cfg = TsEnumConfig(
            a_max=args.amax, b_max=args.bmax, eps_grid=tuple(_parse_floats(args.eps)),
            depth=args.depth, snr_db=args.snr, max_iters=args.iters,
            alpha=args.alpha, qbits=tuple(int(x) for x in _parse_floats(args.qbits)),
            impulse_budget_per_root=args.budget,
            threads=args.threads, seed=args.seed, max_decodes=args.max_decodes,
            mem_limit_mb=args.mem_limit)
        spec = enumerate_ts(code, cfg)
        counts = spec.counts()
        lines = header + ["a,b,count"]
        for (a, b) in sorted(counts):
            lines.append(f"{a},{b},{counts[(a, b)]}")
        _emit(lines, args.output)
        if args.json_out:
            doc = {
                "a_max": spec.a_max, "b_max": spec.b_max, "complete": spec.complete,
                "sets": [
                    {"vns": list(ts.vns), "odd_checks": list(ts.odd_checks),
                     "orbit_size": ts.orbit_size}
                    for ts in spec.ordered()
                ],
            }
            with open(args.json_out, "w") as f:
                json.dump(doc, f, indent=1)
        return 0 if spec.complete else 3

    if cmd == "ts-oracle":
        code = _load_code(args.input, args.format)
        spec = brute_force_ts_oracle(code, a_max=args.amax, b_max=args.bmax)
        counts = spec.counts()
        lines = header + ["a,b,count"]
        for (a, b) in sorted(counts):
            lines.append(f"{a},{b},{counts[(a, b)]}")
        _emit(lines, args.output)
        return 0

    if cmd in ("weight", "predict"):
        code = _load_code(args.input, args.format)
        Hm = expand(code) if isinstance(code, ExponentMatrix) else code
        spec = _spectrum_from_json(args.spectrum)
        snrs = _parse_floats(args.snr)
        rate = args.rate if args.rate is not None else max(
            1e-3, (Hm.cols - Hm.rows) / Hm.cols)
        pred = predict_floors(Hm, spec, snrs, rate, n_samples=args.samples,
                              seed=args.seed,
                              max_classes=getattr(args, "max_classes", None))
        if cmd == "weight":
            lines = header + ["a,b,snr_db,contribution"]
            for (a, b), arr in sorted(pred.contributions.items()):
                for snr, val in zip(snrs, arr):
                    lines.append(f"{a},{b},{snr:g},{val:.6e}")
        else:
            lines = header + ["snr_db,fer_floor,ber_floor"]
            for i, snr in enumerate(snrs):
                lines.append(f"{snr:g},{pred.fer_floor[i]:.6e},{pred.ber_floor[i]:.6e}")
            for (a, b), arr in sorted(pred.contributions.items()):
                lines.append(f"# class {a},{b}: " +
                             ",".join(f"{v:.3e}" for v in arr))
            if pred.excluded:
                lines.append("# excluded classes: " +
                             ";".join(f"{a},{b}" for a, b in pred.excluded))
        _emit(lines, args.output)
        return 0

    if cmd == "simulate":
        code = _load_code(args.input, args.format)
        Hm = expand(code) if isinstance(code, ExponentMatrix) else code
        bits = [int(x) for x in _parse_floats(args.qbits)]
        q = QuantizationSpec(llr_bits=bits[0], c2v_bits=bits[1], v2c_bits=bits[2])
        dc = DecoderConfig(max_iters=args.iters, alpha=args.alpha)
        res = simulate(Hm, _parse_floats(args.snr), dc, q,
                       target_frame_errors=args.target_errors,
                       max_frames=args.max_frames, seed=args.seed,
                       threads=args.threads)
        lines = header + ["snr_db,frames,frame_errors,bit_errors,fer,ber,ci_lo,ci_hi"]
        exhausted = False
        for pt in res.points:
            lines.append(
                f"{pt.snr_db:g},{pt.frames},{pt.frame_errors},{pt.bit_errors},"
                f"{pt.fer:.6e},{pt.ber:.6e},{pt.ci_lo:.6e},{pt.ci_hi:.6e}")
            exhausted |= not pt.stopped_early and pt.frame_errors < args.target_errors
        _emit(lines, args.output)
        return 3 if exhausted else 0

    raise _UsageError(f"unknown subcommand {cmd!r}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return _run(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (FileNotFoundError, ParseError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
