/**
 * Node bindings for the fractalkit toolkit.
 *
 * The primary implementation stays in its own process; data crosses the
 * boundary as flat arrays plus shape integers, serialised through the
 * toolkit's documented wire formats (canonical graph JSON, CSV tables,
 * loss-report JSON).  Every call spawns the pinned CLI, so results are
 * identical to driving the toolkit by hand with the same seeds.
 */

import { mkdtempSync, readFileSync, rmSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';

import { PINNED_PRIMARY_VERSION, primaryInterpreter, runCli } from './runner.js';

export { PINNED_PRIMARY_VERSION } from './runner.js';

export interface DimensionResult {
  dimension: number;
  rSquared: number;
  sigmaSq: number;
  diam: number;
  gated: boolean;
}

export interface AugmentResult {
  /** Flat edge list [u0, v0, u1, v1, ...] of the union graph. */
  edgeList: Int32Array;
  n: number;
  /** assignment[v] = supervertex of original vertex v. */
  assignment: Int32Array;
}

export interface GraphMetaRow {
  graphId: number;
  diam: number;
  dimension: number;
  rSquared: number;
  gated: boolean;
}

export interface LossOptions {
  alpha?: number;
  tau?: number;
  sigma?: number;
  r2Threshold?: number;
  seed?: number;
  epoch?: number;
}

export interface LossResult {
  perSample: Float64Array;
  mean: number;
}

/** Probe the CLI (pinning its version) and report the bound version. */
export function version(): string {
  primaryInterpreter();
  return PINNED_PRIMARY_VERSION;
}

function withScratch<T>(fn: (dir: string) => T): T {
  const dir = mkdtempSync(join(tmpdir(), 'fractalkit-'));
  try {
    return fn(dir);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}

function edgePairs(edgeList: ArrayLike<number>, n: number): number[][] {
  if (!Number.isInteger(n) || n < 0) throw new Error(`invalid vertex count ${n}`);
  if (edgeList.length % 2 !== 0) {
    throw new Error(`flat edge list must have even length, got ${edgeList.length}`);
  }
  const pairs: number[][] = [];
  for (let i = 0; i < edgeList.length; i += 2) {
    pairs.push([edgeList[i], edgeList[i + 1]]);
  }
  return pairs;
}

function writeGraphJson(dir: string, edgeList: ArrayLike<number>, n: number): string {
  const path = join(dir, 'graph.json');
  writeFileSync(path, JSON.stringify({ n, edges: edgePairs(edgeList, n) }) + '\n');
  return path;
}

function splitCsv(path: string): string[][] {
  return readFileSync(path, 'utf8')
    .trim()
    .split('\n')
    .map((line) => line.split(','));
}

/** Box dimension, fractality R**2, residual variance, diameter and gate
 * flag of one graph, given as a flat edge list plus vertex count. */
export function estimateDimension(edgeList: ArrayLike<number>, n: number): DimensionResult {
  return withScratch((dir) => {
    const graph = writeGraphJson(dir, edgeList, n);
    const out = join(dir, 'out');
    runCli(['dim', '--graph', graph, '--out', out, '--threads', '1']);
    const rows = splitCsv(join(out, 'dim.csv'));
    const r = rows[1];
    return {
      diam: Number(r[2]),
      dimension: Number(r[3]),
      rSquared: Number(r[4]),
      sigmaSq: Number(r[5]),
      gated: r[6] === '1',
    };
  });
}

/** Disjoint union of a graph with its random-centre renormalisation,
 * plus the vertex -> supervertex assignment (same seed, same result as
 * the CLI). */
export function augment(
  edgeList: ArrayLike<number>,
  n: number,
  radius: number,
  seed: number,
): AugmentResult {
  return withScratch((dir) => {
    const graph = writeGraphJson(dir, edgeList, n);
    const out = join(dir, 'out');
    runCli([
      'augment',
      '--graph', graph,
      '--radius', String(radius),
      '--seed', String(seed),
      '--out', out,
    ]);
    const union = JSON.parse(readFileSync(join(out, 'augment.json'), 'utf8')) as {
      n: number;
      edges: number[][];
    };
    const flat = new Int32Array(union.edges.length * 2);
    union.edges.forEach(([u, v], i) => {
      flat[2 * i] = u;
      flat[2 * i + 1] = v;
    });
    const rows = splitCsv(join(out, 'assignment.csv')).slice(1);
    const assignment = new Int32Array(rows.length);
    for (const [vertex, supervertex] of rows) {
      assignment[Number(vertex)] = Number(supervertex);
    }
    return { edgeList: flat, n: union.n, assignment };
  });
}

function writeMatrixCsv(path: string, data: ArrayLike<number>, rows: number, cols: number): void {
  const lines: string[] = [];
  for (let i = 0; i < rows; i++) {
    const row: string[] = [];
    for (let j = 0; j < cols; j++) {
      row.push(Number(data[i * cols + j]).toExponential(17));
    }
    lines.push(row.join(','));
  }
  writeFileSync(path, lines.join('\n') + '\n');
}

/** Surrogate fractal loss on flat row-major embedding matrices (nGraphs x
 * dim) with per-graph metadata; identical seeds reproduce the CLI. */
export function surrogateLoss(
  z: ArrayLike<number>,
  zR: ArrayLike<number>,
  nGraphs: number,
  dim: number,
  meta: GraphMetaRow[],
  options: LossOptions = {},
): LossResult {
  const expect = nGraphs * dim;
  if (z.length !== expect || zR.length !== expect) {
    throw new Error(
      `embedding shape mismatch: want ${nGraphs}x${dim} (${expect} values), ` +
        `got z=${z.length}, zR=${zR.length}`,
    );
  }
  if (meta.length !== nGraphs) {
    throw new Error(`metadata shape mismatch: ${meta.length} rows for ${nGraphs} graphs`);
  }
  return withScratch((dir) => {
    const zPath = join(dir, 'z.csv');
    const zrPath = join(dir, 'zr.csv');
    writeMatrixCsv(zPath, z, nGraphs, dim);
    writeMatrixCsv(zrPath, zR, nGraphs, dim);
    const metaPath = join(dir, 'meta.csv');
    const metaLines = ['graph_id,diam,dimension,r_squared,gated'];
    for (const row of meta) {
      metaLines.push(
        `${row.graphId},${row.diam},${row.dimension},${row.rSquared},${row.gated ? 1 : 0}`,
      );
    }
    writeFileSync(metaPath, metaLines.join('\n') + '\n');
    const out = join(dir, 'out');
    const args = [
      'loss',
      '--z', zPath,
      '--zr', zrPath,
      '--meta', metaPath,
      '--alpha', String(options.alpha ?? 0.1),
      '--tau', String(options.tau ?? 0.4),
      '--sigma', String(options.sigma ?? 0.1),
      '--r2-threshold', String(options.r2Threshold ?? 0.9),
      '--epoch', String(options.epoch ?? 0),
      '--seed', String(options.seed ?? 0),
      '--out', out,
    ];
    runCli(args);
    const report = JSON.parse(readFileSync(join(out, 'loss_report.json'), 'utf8')) as {
      per_sample_loss: number[];
      mean_loss: number;
    };
    return {
      perSample: Float64Array.from(report.per_sample_loss),
      mean: report.mean_loss,
    };
  });
}
