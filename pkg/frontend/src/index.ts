/**
 * Typed array-in/array-out bindings for the sigkit CLI.
 *
 * Every call shells out to the `sigkit` executable (override with the
 * SIGKIT_BIN environment variable or the `bin` option), moving inputs
 * through the exact binary path format and reading back CSV printed with
 * 17 significant digits, so float64 values survive the round trip
 * bit-for-bit. No math happens on this side.
 */

import { execFileSync } from "child_process";
import * as fs from "fs";
import * as os from "os";
import * as path from "path";

export interface WordSetDescriptor {
  type: "truncated" | "anisotropic" | "graph" | "lyndon" | "leadlag_sparse" | "custom";
  /** Channel count; defaults to the input's channel count. */
  d?: number;
  depth?: number;
  gamma?: number[];
  r?: number;
  /** 1-based letter pairs, e.g. [[1, 2], [2, 2]]. */
  edges?: [number, number][];
  /** 1-based dotted word strings, e.g. ["1.2", "2"]. */
  words?: string[];
  include_empty?: boolean;
}

/** B paths of M+1 samples in d channels, row-major (path, sample, channel). */
export interface PathBatch {
  data: Float64Array;
  paths: number;
  samples: number;
  channels: number;
}

/** Row-major coefficient matrix with one named column per word. */
export interface CoefficientMatrix {
  data: Float64Array;
  rows: number;
  cols: number;
  columns: string[];
}

/** Windowed coefficients: rows ordered path-major, then window. */
export interface WindowedCoefficients extends CoefficientMatrix {
  windowCount: number;
}

export interface WordInfo {
  index: number;
  word: string;
  length: number;
}

export interface CallOptions {
  /** Worker thread cap passed to the CLI. */
  threads?: number;
  /** Apply the lead-lag transform before computing. */
  leadLag?: boolean;
  /** CLI executable; defaults to $SIGKIT_BIN, then "sigkit". */
  bin?: string;
}

const BINARY_MAGIC = "SIGK";

export function pathBatch(
  data: Float64Array | number[],
  paths: number,
  samples: number,
  channels: number
): PathBatch {
  const arr = data instanceof Float64Array ? data : Float64Array.from(data);
  if (arr.length !== paths * samples * channels) {
    throw new Error(
      `data has ${arr.length} values, expected ${paths}*${samples}*${channels}`
    );
  }
  return { data: arr, paths, samples, channels };
}

function cliBin(opts: CallOptions): string {
  return opts.bin ?? process.env.SIGKIT_BIN ?? "sigkit";
}

function writeBinaryPaths(file: string, batch: PathBatch): void {
  const header = Buffer.alloc(16);
  header.write(BINARY_MAGIC, 0, "ascii");
  header.writeUInt32LE(batch.paths, 4);
  header.writeUInt32LE(batch.samples, 8);
  header.writeUInt32LE(batch.channels, 12);
  const body = Buffer.alloc(batch.data.length * 8);
  for (let i = 0; i < batch.data.length; i++) {
    body.writeDoubleLE(batch.data[i], i * 8);
  }
  fs.writeFileSync(file, Buffer.concat([header, body]));
}

/** 17 significant digits uniquely identify a float64. */
function fmt(x: number): string {
  return x.toPrecision(17);
}

function runCli(args: string[], opts: CallOptions): void {
  try {
    execFileSync(cliBin(opts), args, { stdio: ["ignore", "pipe", "pipe"] });
  } catch (err: any) {
    const stderr = err.stderr ? err.stderr.toString().trim() : "";
    const status = typeof err.status === "number" ? err.status : "?";
    throw new Error(`sigkit exited with code ${status}: ${stderr || err.message}`);
  }
}

function parseCsv(file: string): { columns: string[]; rows: number[][] } {
  const text = fs.readFileSync(file, "utf-8");
  const lines = text.split("\n").filter((ln) => ln.length > 0);
  const columns = lines[0].split(",");
  const rows = lines.slice(1).map((ln) => ln.split(",").map(Number));
  return { columns, rows };
}

function toMatrix(columns: string[], rows: number[][], drop = 0): CoefficientMatrix {
  const cols = columns.length - drop;
  const data = new Float64Array(rows.length * cols);
  for (let i = 0; i < rows.length; i++) {
    for (let j = 0; j < cols; j++) {
      data[i * cols + j] = rows[i][j + drop];
    }
  }
  return { data, rows: rows.length, cols, columns: columns.slice(drop) };
}

function withTempDir<T>(fn: (dir: string) => T): T {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), "sigkit-"));
  try {
    return fn(dir);
  } finally {
    fs.rmSync(dir, { recursive: true, force: true });
  }
}

function commonArgs(dir: string, batch: PathBatch, opts: CallOptions): string[] {
  const input = path.join(dir, "paths.bin");
  writeBinaryPaths(input, batch);
  const args = ["-i", input, "-o", path.join(dir, "out.csv")];
  if (opts.threads !== undefined) args.push("--threads", String(opts.threads));
  if (opts.leadLag) args.push("--leadlag");
  return args;
}

/** Signature coefficients: one row per path, one column per word. */
export function sig(
  batch: PathBatch,
  wordset: WordSetDescriptor,
  opts: CallOptions = {}
): CoefficientMatrix {
  return withTempDir((dir) => {
    const args = ["sig", ...commonArgs(dir, batch, opts), "-w", JSON.stringify(wordset)];
    runCli(args, opts);
    const { columns, rows } = parseCsv(path.join(dir, "out.csv"));
    return toMatrix(columns, rows);
  });
}

/** Log-signature coefficients at Lyndon words up to `depth`. */
export function logsig(
  batch: PathBatch,
  depth: number,
  opts: CallOptions = {}
): CoefficientMatrix {
  return withTempDir((dir) => {
    const args = ["logsig", ...commonArgs(dir, batch, opts), "--depth", String(depth)];
    runCli(args, opts);
    const { columns, rows } = parseCsv(path.join(dir, "out.csv"));
    return toMatrix(columns, rows);
  });
}

/** Signatures over sample-index windows; rows ordered (path, window). */
export function sigWindows(
  batch: PathBatch,
  wordset: WordSetDescriptor,
  windows: [number, number][],
  opts: CallOptions = {}
): WindowedCoefficients {
  return withTempDir((dir) => {
    const windowsFile = path.join(dir, "windows.csv");
    fs.writeFileSync(windowsFile, windows.map(([l, r]) => `${l},${r}`).join("\n") + "\n");
    const args = [
      "windows",
      ...commonArgs(dir, batch, opts),
      "-w",
      JSON.stringify(wordset),
      "--windows",
      windowsFile,
    ];
    runCli(args, opts);
    const { columns, rows } = parseCsv(path.join(dir, "out.csv"));
    // drop the leading path and window id columns
    return { ...toMatrix(columns, rows, 2), windowCount: windows.length };
  });
}

/**
 * Path gradients of sum_w upstream[w] * S(w) w.r.t. every sample value.
 * `upstream` must have one row per path and one column per word in the
 * set's canonical order. Returns a batch shaped like the input paths.
 */
export function sigBackward(
  batch: PathBatch,
  wordset: WordSetDescriptor,
  upstream: { data: Float64Array; rows: number; cols: number },
  opts: CallOptions = {}
): PathBatch {
  if (upstream.rows !== batch.paths) {
    throw new Error(
      `upstream has ${upstream.rows} rows but the batch has ${batch.paths} paths`
    );
  }
  return withTempDir((dir) => {
    const upstreamFile = path.join(dir, "upstream.csv");
    const lines: string[] = [];
    for (let b = 0; b < upstream.rows; b++) {
      const row: string[] = [];
      for (let j = 0; j < upstream.cols; j++) {
        row.push(fmt(upstream.data[b * upstream.cols + j]));
      }
      lines.push(row.join(","));
    }
    fs.writeFileSync(upstreamFile, lines.join("\n") + "\n");
    const args = [
      "backward",
      ...commonArgs(dir, batch, opts),
      "-w",
      JSON.stringify(wordset),
      "--upstream",
      upstreamFile,
    ];
    runCli(args, opts);
    const { rows } = parseCsv(path.join(dir, "out.csv"));
    const channels = opts.leadLag ? 2 * batch.channels : batch.channels;
    const samples = opts.leadLag ? 2 * (batch.samples - 1) + 1 : batch.samples;
    const data = new Float64Array(batch.paths * samples * channels);
    for (const row of rows) {
      const [b, j, ...grads] = row;
      for (let i = 0; i < channels; i++) {
        data[(b * samples + j) * channels + i] = grads[i];
      }
    }
    return { data, paths: batch.paths, samples, channels };
  });
}

/** Word listing of a descriptor: canonical index, dotted string, length. */
export function wordsetInfo(
  wordset: WordSetDescriptor,
  opts: CallOptions = {}
): WordInfo[] {
  return withTempDir((dir) => {
    const out = path.join(dir, "words.csv");
    const args = ["words", "-w", JSON.stringify(wordset), "-o", out];
    runCli(args, opts);
    const text = fs.readFileSync(out, "utf-8");
    return text
      .split("\n")
      .filter((ln) => ln.length > 0)
      .slice(1)
      .map((ln) => {
        const [index, word, length] = ln.split(",");
        return { index: Number(index), word, length: Number(length) };
      });
  });
}
