"""Command-line front end: file-based signature computation.

Subcommands: sig | logsig | windows | gradcheck | bench | words | backward.
Input paths come either as CSV (one row per sample, columns = channels,
paths separated by blank lines or selected by a leading path-id column)
or as raw little-endian float64 binary with a 16-byte header
(magic "SIGK", then uint32 B, M+1, d).  All numeric output is printed
with 17 significant digits so float64 values round-trip exactly; output
is byte-stable across runs for fixed inputs and thread counts.

Exit codes: 0 success, 1 verification failure, 2 parse/usage error,
3 shape/capacity/window error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import bench as bench_mod
from .backward import signature_backward
from .errors import DomainError, InvalidLetterError, SigkitError
from .logsig import logsignature_forward
from .sigcore import (
    PathBatch,
    WindowSpec,
    chen_concat,
    signature_forward,
    signature_windows,
)
from .testkit import finite_difference_grad
from .transforms import lead_lag
from .wordsets import wordset_from_descriptor

BINARY_MAGIC = b"SIGK"

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_PARSE = 2
EXIT_COMPUTE = 3

GRADCHECK_TOL = 1e-6
VERIFY_TOL = 1e-12


class CliParseError(Exception):
    """Input or configuration could not be parsed (exit 2)."""


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _is_number(cell: str) -> bool:
    try:
        float(cell)
        return True
    except ValueError:
        return False


# -- input handling -------------------------------------------------------------


def read_paths(path: str, fmt: str = "auto", path_id_col: bool = False) -> np.ndarray:
    """Load a (B, M+1, d) float64 array from CSV or binary."""
    try:
        with open(path, "rb") as fh:
            head = fh.read(4)
    except OSError as exc:
        raise CliParseError(f"cannot read input file {path}: {exc}") from exc
    if fmt == "bin" or (fmt == "auto" and head == BINARY_MAGIC):
        return _read_binary(path)
    return _read_csv(path, path_id_col)


def _read_binary(path: str) -> np.ndarray:
    with open(path, "rb") as fh:
        header = fh.read(16)
        if len(header) != 16 or header[:4] != BINARY_MAGIC:
            raise CliParseError(f"{path}: bad binary header (expected magic 'SIGK')")
        B, n_samples, d = np.frombuffer(header[4:], dtype="<u4")
        data = np.frombuffer(fh.read(), dtype="<f8")
    expected = int(B) * int(n_samples) * int(d)
    if data.size != expected:
        raise CliParseError(
            f"{path}: expected {expected} float64 values for shape "
            f"({B}, {n_samples}, {d}), found {data.size}"
        )
    return data.reshape(int(B), int(n_samples), int(d)).copy()


def write_binary(path: str, samples: np.ndarray) -> None:
    samples = np.ascontiguousarray(samples, dtype="<f8")
    B, n_samples, d = samples.shape
    with open(path, "wb") as fh:
        fh.write(BINARY_MAGIC)
        fh.write(np.array([B, n_samples, d], dtype="<u4").tobytes())
        fh.write(samples.tobytes())


def _parse_csv_block(lines: list[tuple[int, str]], path: str) -> np.ndarray:
    rows = []
    for lineno, line in lines:
        try:
            rows.append([float(cell) for cell in line.split(",")])
        except ValueError as exc:
            raise CliParseError(f"{path}:{lineno}: not a numeric row: {line!r}") from exc
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise CliParseError(f"{path}: rows have inconsistent column counts {widths}")
    return np.asarray(rows, dtype=np.float64)


def _read_csv(path: str, path_id_col: bool) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [(i + 1, ln.strip()) for i, ln in enumerate(fh)]
    if path_id_col:
        body = [(n, ln) for n, ln in lines if ln]
        table = _parse_csv_block(body, path)
        if table.shape[1] < 2:
            raise CliParseError(f"{path}: need a path-id column plus channels")
        ids = table[:, 0]
        blocks = []
        seen = []
        for pid in ids:
            if not seen or seen[-1] != pid:
                seen.append(pid)
        for pid in seen:
            blocks.append(table[ids == pid, 1:])
    else:
        blocks = []
        current: list[tuple[int, str]] = []
        for n, ln in lines + [(len(lines) + 1, "")]:
            if ln:
                current.append((n, ln))
            elif current:
                blocks.append(_parse_csv_block(current, path))
                current = []
    if not blocks:
        raise CliParseError(f"{path}: no data rows found")
    shapes = {b.shape for b in blocks}
    if len(shapes) != 1:
        raise SigkitError(
            f"{path}: paths have inconsistent shapes {sorted(shapes)}; "
            "all paths must share the same sample count and channels"
        )
    return np.stack(blocks)


def read_windows(path: str) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [(i + 1, ln.strip()) for i, ln in enumerate(fh) if ln.strip()]
    pairs = []
    for lineno, ln in lines:
        cells = ln.split(",")
        if len(cells) != 2:
            raise CliParseError(f"{path}:{lineno}: expected 'l,r', got {ln!r}")
        try:
            pairs.append((int(cells[0]), int(cells[1])))
        except ValueError as exc:
            raise CliParseError(f"{path}:{lineno}: non-integer window bounds") from exc
    if not pairs:
        raise CliParseError(f"{path}: no windows found")
    return np.asarray(pairs, dtype=np.int64)


def _load_descriptor(args, default_d: int):
    if args.wordset:
        text = args.wordset
        if not text.lstrip().startswith("{"):
            try:
                with open(text, "r", encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise CliParseError(f"cannot read word-set file {args.wordset}: {exc}")
        try:
            desc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CliParseError(f"word-set descriptor is not valid JSON: {exc}")
    else:
        if not args.type:
            raise CliParseError("need --wordset JSON or --type plus its parameters")
        desc = {"type": args.type}
        if args.d is not None:
            desc["d"] = args.d
        if args.depth is not None:
            desc["depth"] = args.depth
        if args.gamma is not None:
            desc["gamma"] = [float(x) for x in args.gamma.split(",")]
        if args.r is not None:
            desc["r"] = args.r
        if args.edges is not None:
            try:
                desc["edges"] = [
                    [int(a) for a in pair.split("-")] for pair in args.edges.split(",")
                ]
            except ValueError as exc:
                raise CliParseError(
                    f"cannot parse --edges {args.edges!r}; use 'i-j,i-j'"
                ) from exc
        if args.words is not None:
            desc["words"] = args.words.split(",")
    if args.include_empty:
        desc["include_empty"] = True
    try:
        return wordset_from_descriptor(desc, default_d=default_d)
    except (DomainError, InvalidLetterError) as exc:
        # malformed descriptors are parse errors; capacity errors stay
        # compute errors (exit 3) and propagate as SigkitError
        raise CliParseError(f"invalid word-set descriptor: {exc}") from exc


def _open_output(path: str | None):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline="\n"), True


def _write_table(out_path, header: list[str], rows) -> None:
    fh, close = _open_output(out_path)
    try:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(
                ",".join(c if isinstance(c, str) else _fmt(c) for c in row) + "\n"
            )
    finally:
        if close:
            fh.close()


def _prepare_paths(args) -> PathBatch:
    samples = read_paths(args.input, args.format, args.path_id_col)
    batch = PathBatch(samples, dtype=np.float32 if args.float32 else np.float64)
    if args.leadlag:
        batch = lead_lag(batch)
    return batch


# -- subcommands ------------------------------------------------------------------


def cmd_sig(args) -> int:
    paths = _prepare_paths(args)
    ws = _load_descriptor(args, default_d=paths.d)
    coeffs = signature_forward(paths, ws, threads=args.threads)
    _write_table(args.output, coeffs.column_names(), coeffs.values)
    return EXIT_OK


def cmd_logsig(args) -> int:
    paths = _prepare_paths(args)
    out = logsignature_forward(paths, paths.d, args.depth, threads=args.threads)
    header = out.wordset.word_strings()
    values = out.values
    if args.include_empty:
        # the log of the signature has no constant term
        header = ["e"] + header
        values = np.concatenate([np.zeros((values.shape[0], 1), values.dtype), values], axis=1)
    _write_table(args.output, header, values)
    return EXIT_OK


def cmd_windows(args) -> int:
    paths = _prepare_paths(args)
    ws = _load_descriptor(args, default_d=paths.d)
    spec = WindowSpec(read_windows(args.windows))
    outs = signature_windows(paths, ws, spec, threads=args.threads)
    header = ["path", "window"] + outs[0].column_names()
    rows = []
    for b in range(paths.B):
        for k in range(spec.K):
            rows.append([str(b), str(k)] + [_fmt(v) for v in outs[k].values[b]])
    _write_table(args.output, header, rows)
    if args.verify:
        return _verify_windows(paths, ws, spec, outs, args.threads)
    return EXIT_OK


def _verify_windows(paths, ws, spec, outs, threads) -> int:
    """Chen recombination check over adjacent window pairs."""
    pairs = [
        (i, i + 1)
        for i in range(spec.K - 1)
        if spec.pairs[i, 1] == spec.pairs[i + 1, 0]
    ]
    if not pairs:
        print("verify: no adjacent windows to recombine", file=sys.stderr)
        return EXIT_OK
    worst = 0.0
    for i, j in pairs:
        combined = chen_concat(outs[i], outs[j])
        merged = WindowSpec(np.array([[spec.pairs[i, 0], spec.pairs[j, 1]]]))
        direct = signature_windows(paths, ws, merged, threads=threads)[0]
        scale = max(1.0, float(np.max(np.abs(direct.values))))
        worst = max(worst, float(np.max(np.abs(combined.values - direct.values))) / scale)
    print(f"verify: {len(pairs)} adjacent pair(s), max relative error {worst:.3e}",
          file=sys.stderr)
    return EXIT_OK if worst <= VERIFY_TOL else EXIT_VERIFY


def cmd_gradcheck(args) -> int:
    paths = _prepare_paths(args)
    ws = _load_descriptor(args, default_d=paths.d)
    rng = np.random.default_rng(args.seed)
    upstream = rng.normal(size=(paths.B, len(ws)))
    analytic = signature_backward(paths, ws, upstream, threads=args.threads).path_grads
    fd = finite_difference_grad(paths, ws, upstream, h=args.step)
    scale = np.maximum(1.0, np.maximum(np.abs(analytic), np.abs(fd)))
    err = float(np.max(np.abs(analytic - fd) / scale))
    print(f"gradcheck: max relative error {err:.3e} (tolerance {GRADCHECK_TOL:.0e})")
    return EXIT_OK if err <= GRADCHECK_TOL else EXIT_VERIFY


def cmd_backward(args) -> int:
    paths = _prepare_paths(args)
    ws = _load_descriptor(args, default_d=paths.d)
    with open(args.upstream, "r", encoding="utf-8") as fh:
        lines = [(i + 1, ln.strip()) for i, ln in enumerate(fh) if ln.strip()]
    if lines and not _is_number(lines[0][1].split(",")[0]):
        lines = lines[1:]  # tolerate a header row of word names
    upstream = _parse_csv_block(lines, args.upstream)
    grads = signature_backward(paths, ws, upstream, threads=args.threads).path_grads
    header = ["path", "sample"] + [str(i + 1) for i in range(paths.d)]
    rows = []
    for b in range(paths.B):
        for j in range(paths.M + 1):
            rows.append([str(b), str(j)] + [_fmt(v) for v in grads[b, j]])
    _write_table(args.output, header, rows)
    return EXIT_OK


def cmd_words(args) -> int:
    ws = _load_descriptor(args, default_d=args.d)
    rows = [
        [str(i), name, str(int(n))]
        for i, (name, n) in enumerate(zip(ws.word_strings(), ws.lengths))
    ]
    _write_table(args.output, ["index", "word", "length"], rows)
    return EXIT_OK


def cmd_bench(args) -> int:
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            config = json.load(fh)
    except OSError as exc:
        raise CliParseError(f"cannot read bench config {args.config}: {exc}")
    except json.JSONDecodeError as exc:
        raise CliParseError(f"bench config is not valid JSON: {exc}")
    runs = config.get("runs", config) if isinstance(config, dict) else config
    if not isinstance(runs, list) or not runs:
        raise CliParseError("bench config must contain a non-empty 'runs' list")
    header = [
        "op", "B", "M", "d", "width", "threads", "warmup", "reps",
        "median_s", "mean_s", "peak_alloc_bytes", "extra_alloc_bytes",
    ]
    rows = []
    for entry in runs:
        rows.append(_bench_one(entry))
    _write_table(args.output, header, rows)
    return EXIT_OK


def _bench_one(entry: dict) -> list[str]:
    op = entry.get("op", "sig")
    B = int(entry.get("B", 1))
    M = int(entry.get("M", 100))
    d = int(entry.get("d", 2))
    threads = entry.get("threads")
    warmup = int(entry.get("warmup", 3))
    reps = int(entry.get("reps", 10))
    rng = np.random.default_rng(int(entry.get("seed", 0)))
    samples = rng.random((B, M + 1, d)) * 2.0 - 1.0
    desc = entry.get("wordset", {"type": "truncated", "depth": entry.get("depth", 3)})
    ws = wordset_from_descriptor(desc, default_d=d)
    extra = ""
    if op == "sig":
        paths = PathBatch(samples)
        fn = lambda: signature_forward(paths, ws, threads=threads)
    elif op == "logsig":
        paths = PathBatch(samples)
        depth = int(desc.get("depth", 3))
        fn = lambda: logsignature_forward(paths, d, depth, threads=threads)
    elif op == "windows":
        paths = PathBatch(samples)
        k = int(entry.get("n_windows", 8))
        length = max(1, M // k)
        pairs = np.array([[i * length, min(M, (i + 1) * length)] for i in range(k)])
        spec = WindowSpec(pairs)
        fn = lambda: signature_windows(paths, ws, spec, threads=threads)
    elif op == "backward":
        paths = PathBatch(samples)
        upstream = rng.normal(size=(B, len(ws)))
        fn = lambda: signature_backward(paths, ws, upstream, threads=threads)
        extra_bytes = bench_mod.backward_extra_allocation(samples, ws, upstream)
        extra = str(extra_bytes)
    else:
        raise CliParseError(f"unknown bench op {op!r}")
    stats = bench_mod.time_call(fn, warmup=warmup, reps=reps)
    _, peak = bench_mod.measure_peak_allocation(fn)
    return [
        op, str(B), str(M), str(d), str(len(ws)),
        str(threads if threads is not None else _kernel_threads()),
        str(warmup), str(reps),
        _fmt(stats["median_s"]), _fmt(stats["mean_s"]), str(peak), extra,
    ]


def _kernel_threads() -> int:
    from numba import get_num_threads

    return get_num_threads()


# -- argument parsing ---------------------------------------------------------------


def _add_io_flags(p: argparse.ArgumentParser, needs_input: bool = True) -> None:
    if needs_input:
        p.add_argument("--input", "-i", required=True, help="paths file (CSV or binary)")
        p.add_argument(
            "--format", choices=("auto", "csv", "bin"), default="auto",
            help="input format; auto sniffs the binary magic",
        )
        p.add_argument(
            "--path-id-col", action="store_true",
            help="first CSV column is a path id instead of blank-line separation",
        )
        p.add_argument("--float32", action="store_true", help="compute in single precision")
        p.add_argument("--leadlag", action="store_true",
                       help="apply the lead-lag transform before computing")
    p.add_argument("--output", "-o", default=None, help="output file (default stdout)")
    p.add_argument("--threads", type=int, default=_default_threads(),
                   help="worker thread cap (default: env SIGKIT_THREADS)")


def _default_threads() -> int | None:
    value = os.environ.get("SIGKIT_THREADS")
    return int(value) if value else None


def _add_wordset_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--wordset", "-w", default=None,
                   help="word-set descriptor: JSON file path or inline JSON")
    p.add_argument("--type", choices=(
        "truncated", "anisotropic", "graph", "lyndon", "leadlag_sparse", "custom"),
        default=None, help="word-set type (alternative to --wordset)")
    p.add_argument("--d", type=int, default=None,
                   help="channel count (default: inferred from the input)")
    p.add_argument("--depth", "-N", type=int, default=None, help="truncation depth")
    p.add_argument("--gamma", default=None, help="anisotropic weights, e.g. '1,2'")
    p.add_argument("--r", type=float, default=None, help="anisotropic cutoff")
    p.add_argument("--edges", default=None, help="graph edges, 1-based, e.g. '1-2,2-2'")
    p.add_argument("--words", default=None, help="custom words, e.g. '1.2,2'")
    p.add_argument("--include-empty", action="store_true",
                   help="emit the empty-word column first")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sigkit",
        description="Path signatures, log-signatures and path gradients "
                    "in the word basis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sig", help="signature coefficients over a word set")
    _add_io_flags(p)
    _add_wordset_flags(p)
    p.set_defaults(fn=cmd_sig)

    p = sub.add_parser("logsig", help="log-signature in the Lyndon basis")
    _add_io_flags(p)
    p.add_argument("--depth", "-N", type=int, required=True, help="truncation depth")
    p.add_argument("--include-empty", action="store_true",
                   help="emit a leading zero column for the empty word")
    p.set_defaults(fn=cmd_logsig)

    p = sub.add_parser("windows", help="signatures over sample-index windows")
    _add_io_flags(p)
    _add_wordset_flags(p)
    p.add_argument("--windows", required=True, help="CSV file of 'l,r' pairs")
    p.add_argument("--verify", action="store_true",
                   help="check Chen recombination of adjacent windows")
    p.set_defaults(fn=cmd_windows)

    p = sub.add_parser("gradcheck", help="analytic vs finite-difference gradients")
    _add_io_flags(p)
    _add_wordset_flags(p)
    p.add_argument("--seed", type=int, default=0, help="seed for the upstream weights")
    p.add_argument("--step", type=float, default=1e-5, help="finite-difference step")
    p.set_defaults(fn=cmd_gradcheck)

    p = sub.add_parser("backward", help="path gradients for given upstream weights")
    _add_io_flags(p)
    _add_wordset_flags(p)
    p.add_argument("--upstream", required=True,
                   help="CSV of upstream gradients, one row per path")
    p.set_defaults(fn=cmd_backward)

    p = sub.add_parser("words", help="print a word-set listing with indices")
    _add_io_flags(p, needs_input=False)
    _add_wordset_flags(p)
    p.set_defaults(fn=cmd_words)

    p = sub.add_parser("bench", help="micro-benchmarks from a JSON config")
    _add_io_flags(p, needs_input=False)
    p.add_argument("--config", required=True, help="JSON bench configuration")
    p.set_defaults(fn=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except CliParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SigkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
