"""Command-line surface: predict, store, recall, and experiment subcommands.

All symbol and fanal indices on this surface and in corpus files are 1-based;
the conversion to the library's 0-based addressing happens here and in the
corpus readers. Exit codes: 0 success, 1 infeasible configuration or invalid
data, 2 I/O error.
"""
from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import analytic
from .clique import store_clique, store_ring
from .core import ClusterLayout, ConnectionMatrix, DecoderSpec, InfeasibleConfigError
from .corpus import load_sequences, load_vectorial
from .analytic import pattern_bits
from .duallayer import efficiency_double, efficiency_single, memory_bits_double
from .experiments import (
    PRESETS,
    parse_config_file,
    preset_config,
    rows_to_csv,
    run_experiment,
    write_csv,
)
from .tournament import decode_sequence, sber, sequence_exact, sqer, store_sequences
from .vectorial import decode_vectorial, pattern_error_rate, store_vectorial

KINDS = ("sequence", "vectorial", "clique", "ring")


def _add_network_flags(p, need_all=True):
    p.add_argument("--chi", type=int, required=need_all, help="number of clusters")
    p.add_argument("--l", type=int, required=need_all, help="fanals per cluster")
    p.add_argument("--r", type=int, default=1, help="anticipation / ring degree")


def _decoder_flags(p):
    p.add_argument("--decoder", choices=("wta", "ts", "gwta", "gwsta", "glsko"),
                   default="gwsta")
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--alpha", type=int, default=None)
    p.add_argument("--gamma", type=float, default=1000.0)
    p.add_argument("--iterations", type=int, default=4)


def _decoder_spec(args) -> DecoderSpec:
    return DecoderSpec(args.decoder, theta=args.theta, alpha=args.alpha,
                       gamma=args.gamma if args.decoder in ("gwsta", "glsko") else 0.0,
                       iterations=args.iterations)


def _cmd_predict(args) -> int:
    chi, l, r, L, S = args.chi, args.l, args.r, args.L, args.S
    d = analytic.density_seq(chi, l, S, L)
    lines = [
        ("density (exact)", d),
        ("density (low-load approx)", analytic.density_seq_approx(chi, l, S, L)),
        ("structural symbol error rate", analytic.structural_sber(d, r, l)),
        ("sequence error rate", analytic.sqer_seq(chi, l, r, L, S)),
        ("optimal cluster count", analytic.chi_opt(chi * l, S, L)),
        ("capacity (bits)", analytic.capacity_seq(S, L, l)),
        ("memory (bits)", analytic.memory_bits_seq(r, chi, l)),
        ("efficiency", analytic.efficiency_seq(chi, l, r, L, S)),
    ]
    if args.c is not None:
        c = args.c
        n = chi * l
        lines += [
            ("restricted density", analytic.density_restricted(n, r, c, S, L)),
            ("restricted sequence error rate",
             analytic.sqer_restricted(chi, l, r, c, S, L)),
            ("pattern information (bits)", pattern_bits(chi, l, c)),
            ("efficiency (single layer)", efficiency_single(chi, l, c, S, L)),
            ("efficiency (double layer)", efficiency_double(chi, l, c, S, L)),
            ("double-layer memory (bits)", memory_bits_double(chi, l)),
        ]
    width = max(len(name) for name, _ in lines)
    print(f"chi={chi} l={l} r={r} L={L} S={S}" + (f" c={args.c}" if args.c is not None else ""))
    for name, value in lines:
        print(f"  {name:<{width}}  {value:.6g}")
    return 0


def _store_corpus(args, matrix: ConnectionMatrix):
    layout = matrix.layout
    if args.kind == "sequence":
        seqs = load_sequences(args.corpus, l=layout.l)
        store_sequences(matrix, seqs, args.r, wrap=args.wrap)
        return seqs.shape[0]
    if args.kind == "vectorial":
        seqs = load_vectorial(args.corpus, layout)
        for seq in seqs:
            store_vectorial(matrix, seq, args.r, restrict=args.restrict)
        return len(seqs)
    # clique / ring corpora reuse the sequence file format: line k addresses
    # clusters 1..c in order
    seqs = load_sequences(args.corpus, l=layout.l)
    if seqs.shape[1] > layout.chi:
        raise InfeasibleConfigError("message order exceeds the cluster count")
    base = np.arange(seqs.shape[1], dtype=np.int64) * layout.l
    for row in seqs:
        if args.kind == "clique":
            store_clique(matrix, base + row)
        else:
            store_ring(matrix, base + row, args.r)
    return seqs.shape[0]


def _cmd_store(args) -> int:
    layout = ClusterLayout(args.chi, args.l)
    directed = args.kind in ("sequence", "vectorial")
    matrix = ConnectionMatrix(layout, directed=directed)
    count = _store_corpus(args, matrix)
    print(f"stored {count} {args.kind} items: "
          f"{matrix.count_connections()} connections, "
          f"density {matrix.measured_density():.6g}")
    if args.save:
        matrix.save(args.save)
        print(f"snapshot written to {args.save}")
    return 0


def _cmd_recall(args) -> int:
    matrix = ConnectionMatrix.load(args.load)
    layout = matrix.layout
    if args.kind == "sequence":
        seqs = load_sequences(args.corpus, l=layout.l)
        cue = args.cue if args.cue is not None else args.r
        sbers, fails = [], []
        for ref in seqs:
            dec = decode_sequence(matrix, ref[:cue], args.r, seqs.shape[1])
            sbers.append(sber(ref, dec))
            fails.append(not sequence_exact(ref, dec))
        print(f"recalled {len(sbers)} sequences: "
              f"sber {float(np.mean(sbers)):.6g}, sqer {sqer(fails):.6g}")
        return 0
    if args.kind == "vectorial":
        seqs = load_vectorial(args.corpus, layout)
        spec = _decoder_spec(args)
        cue = args.cue if args.cue is not None else args.r
        pers = []
        for ref in seqs:
            res = decode_vectorial(matrix, ref[:cue], args.r, spec, len(ref),
                                   restrict=args.restrict)
            pers.append(pattern_error_rate(ref, res))
        print(f"recalled {len(pers)} vectorial sequences: per {float(np.mean(pers)):.6g}")
        return 0
    raise InfeasibleConfigError("recall supports sequence and vectorial corpora")


def _cmd_experiment(args) -> int:
    if args.config:
        cfg = parse_config_file(args.config)
    else:
        if not args.preset:
            raise InfeasibleConfigError("give a preset name or --config FILE")
        cfg = preset_config(args.preset, trials=args.trials, seed=args.seed,
                            s_values=tuple(args.S) if args.S else None)
    rows = run_experiment(cfg)
    out = args.out or f"{cfg.preset}.csv"
    directory = os.path.dirname(out)
    if directory:
        os.makedirs(directory, exist_ok=True)
    write_csv(rows, out)
    print(f"wrote {len(rows)} result rows to {out}")
    if not args.no_plot:
        from .plots import render_rows

        png = os.path.splitext(out)[0] + ".png"
        render_rows(rows, png)
        print(f"rendered figure to {png}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cliquemem",
        description="Sparse binary associative memory for messages and sequences.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("predict", help="print the closed-form model outputs")
    _add_network_flags(p)
    p.add_argument("--L", type=int, required=True, help="sequence length")
    p.add_argument("--S", type=float, required=True, help="stored sequences")
    p.add_argument("--c", type=int, default=None, help="pattern order (vectorial)")
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("store", help="store a corpus and optionally save a snapshot")
    _add_network_flags(p)
    p.add_argument("--kind", choices=KINDS, default="sequence")
    p.add_argument("--corpus", required=True, help="corpus file")
    p.add_argument("--save", default=None, help="snapshot output path")
    p.add_argument("--restrict", action="store_true",
                   help="enforce cluster-activity restriction")
    p.add_argument("--wrap", action="store_true",
                   help="close sequence pairing over the sequence end")
    p.set_defaults(func=_cmd_store)

    p = sub.add_parser("recall", help="decode a corpus against a stored snapshot")
    p.add_argument("--load", required=True, help="snapshot input path")
    p.add_argument("--corpus", required=True)
    p.add_argument("--kind", choices=("sequence", "vectorial"), default="sequence")
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--cue", type=int, default=None, help="cue length (default r)")
    p.add_argument("--restrict", action="store_true")
    _decoder_flags(p)
    p.set_defaults(func=_cmd_recall)

    p = sub.add_parser("experiment", help="run a preset or config-file experiment")
    p.add_argument("preset", nargs="?", default=None,
                   help=f"one of {sorted(PRESETS)}")
    p.add_argument("--config", default=None, help="key = value config file")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--S", type=int, nargs="+", default=None, help="sweep S values")
    p.add_argument("--out", default=None, help="CSV output path")
    p.add_argument("--no-plot", action="store_true", help="skip figure rendering")
    p.set_defaults(func=_cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleConfigError as exc:
        print(f"infeasible configuration: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
