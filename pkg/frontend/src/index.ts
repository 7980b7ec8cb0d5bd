// Thin wrapper around the `causalorder` command-line tool. Everything goes
// through the documented external interfaces: CLI flags, numeric CSV, and
// the plain-text graph format. No shared memory, no private APIs.

import { execFileSync } from 'child_process'
import * as fs from 'fs'
import * as os from 'os'
import * as path from 'path'

export interface FitOptions {
    restarts?: number
    timeLimit?: number
    penalty?: number
    seed?: number
    init?: 'greedy' | 'random'
}

export interface SimulateOptions {
    n?: number
    noise?: string // "gaussian:a,b" | "uniform:a,b"
    seed?: number
    raw?: boolean
}

export type Edge = [string, string]

export interface Graph {
    labels: string[]
    directed: Edge[]
    undirected: Edge[]
}

export interface FitResult extends Graph {
    bic: number
    wallTimeS: number
    restartsExecuted: number
}

export interface Instance {
    labels: string[]
    data: number[][]
    truth: Graph
    truthCpdag: Graph
}

export class CliError extends Error {
    constructor(message: string, readonly exitCode: number) {
        super(message)
        this.name = 'CliError'
    }
}

export const EXIT_PARSE = 2
export const EXIT_NUMERIC = 3
export const EXIT_CAPACITY = 4

const BIN = process.env.CAUSALORDER_BIN ?? 'causalorder'

export function runCli(args: string[]): string {
    try {
        return execFileSync(BIN, args, { encoding: 'utf-8' })
    } catch (err: any) {
        if (typeof err.status === 'number' && err.stderr) {
            throw new CliError(String(err.stderr).trim(), err.status)
        }
        throw err
    }
}

// CSV / graph text codecs

export function formatCsv(labels: string[], data: number[][]): string {
    const lines = [labels.join(',')]
    for (const row of data) {
        if (row.length !== labels.length)
            throw new Error(`row width ${row.length} != ${labels.length} labels`)
        lines.push(row.map(x => x.toPrecision(17)).join(','))
    }
    return lines.join('\n') + '\n'
}

export function parseCsv(text: string): { labels: string[]; data: number[][] } {
    const lines = text.split('\n').filter(l => l.trim().length > 0)
    if (lines.length < 2) throw new Error('CSV needs a header and data rows')
    const labels = lines[0].split(',').map(s => s.trim())
    const data = lines.slice(1).map(line => line.split(',').map(Number))
    return { labels, data }
}

export function parseGraph(text: string): Graph {
    let labels: string[] | null = null
    const directed: Edge[] = []
    const undirected: Edge[] = []
    for (const raw of text.split('\n')) {
        const line = raw.split('#', 1)[0].trim()
        if (!line) continue
        if (labels === null) {
            if (!line.startsWith('nodes:'))
                throw new Error(`expected 'nodes:' header, got ${JSON.stringify(line)}`)
            labels = line.slice('nodes:'.length).split(',').map(s => s.trim()).filter(Boolean)
            continue
        }
        if (line.includes('->')) {
            const [a, b] = line.split('->')
            directed.push([a.trim(), b.trim()])
        } else if (line.includes('--')) {
            const [a, b] = line.split('--')
            undirected.push([a.trim(), b.trim()])
        } else {
            throw new Error(`unrecognized edge line ${JSON.stringify(line)}`)
        }
    }
    if (labels === null) throw new Error("missing 'nodes:' header")
    return { labels, directed, undirected }
}

export function formatGraph(g: Graph): string {
    const lines = ['nodes: ' + g.labels.join(',')]
    for (const [a, b] of g.directed) lines.push(`${a} -> ${b}`)
    for (const [a, b] of g.undirected) lines.push(`${a} -- ${b}`)
    return lines.join('\n') + '\n'
}

function withTempDir<T>(body: (dir: string) => T): T {
    const dir = fs.mkdtempSync(path.join(os.tmpdir(), 'causalorder-'))
    try {
        return body(dir)
    } finally {
        fs.rmSync(dir, { recursive: true, force: true })
    }
}

function grab(out: string, key: string): string {
    const m = out.match(new RegExp(`^${key}: (.*)$`, 'm'))
    if (!m) throw new Error(`missing '${key}:' in CLI output`)
    return m[1]
}

function fitArgs(opts: FitOptions): string[] {
    const args: string[] = []
    if (opts.timeLimit !== undefined) args.push('--time-limit', String(opts.timeLimit))
    else args.push('--restarts', String(opts.restarts ?? 0))
    if (opts.penalty !== undefined) args.push('--penalty', String(opts.penalty))
    args.push('--seed', String(opts.seed ?? 0))
    if (opts.init) args.push('--init', opts.init)
    return args
}

// Operations

export function fit(data: number[][], labels?: string[], opts: FitOptions = {}): FitResult {
    const names = labels ?? data[0].map((_, i) => `x${i}`)
    return withTempDir(dir => {
        const dataPath = path.join(dir, 'data.csv')
        const outPath = path.join(dir, 'learned.graph')
        fs.writeFileSync(dataPath, formatCsv(names, data))
        const out = runCli(['fit', '--data', dataPath, '--out', outPath, ...fitArgs(opts)])
        const graph = parseGraph(fs.readFileSync(outPath, 'utf-8'))
        return {
            ...graph,
            bic: Number(grab(out, 'bic')),
            wallTimeS: Number(grab(out, 'wall_time_s')),
            restartsExecuted: Number(grab(out, 'restarts_executed')),
        }
    })
}

export function simulate(graphSpec: string, opts: SimulateOptions = {}): Instance {
    return withTempDir(dir => {
        const prefix = path.join(dir, 'inst')
        const args = ['simulate', '--graph', graphSpec, '--out-prefix', prefix,
                      '--seed', String(opts.seed ?? 0)]
        if (opts.n !== undefined) args.push('--n', String(opts.n))
        if (opts.noise) args.push('--noise', opts.noise)
        if (opts.raw) args.push('--raw')
        runCli(args)
        const { labels, data } = parseCsv(fs.readFileSync(prefix + '.data.csv', 'utf-8'))
        return {
            labels,
            data,
            truth: parseGraph(fs.readFileSync(prefix + '.truth.graph', 'utf-8')),
            truthCpdag: parseGraph(fs.readFileSync(prefix + '.truth-cpdag.graph', 'utf-8')),
        }
    })
}

export function shd(learned: Graph, truth: Graph): number {
    return withTempDir(dir => {
        const a = path.join(dir, 'learned.graph')
        const b = path.join(dir, 'truth.graph')
        fs.writeFileSync(a, formatGraph(learned))
        fs.writeFileSync(b, formatGraph(truth))
        const out = runCli(['eval', '--learned', a, '--truth', b])
        return Number(grab(out, 'shd'))
    })
}

export function exact(
    data: number[][],
    labels?: string[],
    opts: { penalty?: number; maxIndegree?: number } = {},
): Graph & { bic: number } {
    const names = labels ?? data[0].map((_, i) => `x${i}`)
    return withTempDir(dir => {
        const dataPath = path.join(dir, 'data.csv')
        const outPath = path.join(dir, 'exact.graph')
        fs.writeFileSync(dataPath, formatCsv(names, data))
        const args = ['exact', '--data', dataPath, '--out', outPath]
        if (opts.penalty !== undefined) args.push('--penalty', String(opts.penalty))
        if (opts.maxIndegree !== undefined) args.push('--max-indegree', String(opts.maxIndegree))
        const out = runCli(args)
        return { ...parseGraph(fs.readFileSync(outPath, 'utf-8')), bic: Number(grab(out, 'bic')) }
    })
}
