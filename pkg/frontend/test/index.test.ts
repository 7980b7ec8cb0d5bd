import { execFileSync } from 'child_process'
import * as fs from 'fs'
import * as os from 'os'
import * as path from 'path'
import { describe, expect, it } from 'vitest'

import {
    CliError,
    EXIT_CAPACITY,
    EXIT_PARSE,
    exact,
    fit,
    formatCsv,
    formatGraph,
    parseCsv,
    parseGraph,
    shd,
    simulate,
} from '../src/index'

const BIN = process.env.CAUSALORDER_BIN ?? 'causalorder'

function edgeKey(g: { directed: [string, string][]; undirected: [string, string][] }) {
    return JSON.stringify({
        d: [...g.directed].sort(),
        u: [...g.undirected].sort(),
    })
}

describe('codecs', () => {
    it('CSV round trip', () => {
        const labels = ['a', 'b']
        const data = [
            [1.5, -2.25],
            [0.125, 3.0],
        ]
        const back = parseCsv(formatCsv(labels, data))
        expect(back.labels).toEqual(labels)
        expect(back.data).toEqual(data)
    })

    it('graph round trip', () => {
        const g = {
            labels: ['a', 'b', 'c'],
            directed: [['a', 'c']] as [string, string][],
            undirected: [['b', 'c']] as [string, string][],
        }
        expect(parseGraph(formatGraph(g))).toEqual(g)
    })

    it('graph parser rejects junk', () => {
        expect(() => parseGraph('a -> b\n')).toThrow(/nodes/)
        expect(() => parseGraph('nodes: a,b\na => b\n')).toThrow(/unrecognized/)
    })
})

describe('operations', () => {
    it('simulate returns a consistent instance', () => {
        const inst = simulate('er:6,2', { n: 500, seed: 3 })
        expect(inst.labels).toHaveLength(6)
        expect(inst.data).toHaveLength(500)
        expect(inst.truth.undirected).toHaveLength(0)
        const total =
            inst.truthCpdag.directed.length + inst.truthCpdag.undirected.length
        expect(total).toBe(inst.truth.directed.length)
    })

    it('fit recovers a strong collider', () => {
        const n = 4000
        const data: number[][] = []
        let s = 123456789
        const rand = () => {
            // deterministic uniform; Box-Muller below turns pairs gaussian
            s = (1103515245 * s + 12345) % 2147483648
            return s / 2147483648
        }
        const gauss = () =>
            Math.sqrt(-2 * Math.log(rand() + 1e-12)) * Math.cos(2 * Math.PI * rand())
        for (let i = 0; i < n; i++) {
            const x = gauss()
            const y = gauss()
            const z = 0.8 * x - 0.7 * y + 0.3 * gauss()
            data.push([x, y, z])
        }
        const result = fit(data, ['x', 'y', 'z'], { restarts: 2, seed: 0 })
        expect(edgeKey(result)).toBe(
            edgeKey({ directed: [['x', 'z'], ['y', 'z']], undirected: [] }),
        )
        expect(result.restartsExecuted).toBe(2)
        expect(Number.isFinite(result.bic)).toBe(true)
    })

    it('shd of a graph with itself is zero', () => {
        const inst = simulate('path:6', { seed: 1 })
        expect(shd(inst.truthCpdag, inst.truthCpdag)).toBe(0)
    })

    it('exact solver agrees with search on a small instance', () => {
        const inst = simulate('er:5,2', { n: 5000, seed: 2 })
        const searched = fit(inst.data, inst.labels, { restarts: 10, seed: 0 })
        const optimum = exact(inst.data, inst.labels)
        expect(optimum.bic).toBeLessThanOrEqual(searched.bic + 1e-6)
    })

    it('maps CLI exit codes to errors', () => {
        expect(() => simulate('ring:5')).toThrowError(CliError)
        try {
            simulate('ring:5')
        } catch (err) {
            expect((err as CliError).exitCode).toBe(EXIT_PARSE)
        }
        const wide = [Array.from({ length: 21 }, (_, i) => i + Math.random())]
        for (let i = 0; i < 30; i++)
            wide.push(wide[0].map(x => x + Math.random()))
        try {
            exact(wide)
            expect.unreachable()
        } catch (err) {
            expect((err as CliError).exitCode).toBe(EXIT_CAPACITY)
        }
    })
})

describe('binding parity', () => {
    it('wrapper fit matches direct CLI fit on 20 golden instances', () => {
        for (let seed = 0; seed < 20; seed++) {
            const inst = simulate('er:8,3', { n: 1000, seed })

            const viaWrapper = fit(inst.data, inst.labels, { restarts: 1, seed })

            // same data, same flags, but driving the CLI by hand
            const dir = fs.mkdtempSync(path.join(os.tmpdir(), 'parity-'))
            try {
                const dataPath = path.join(dir, 'data.csv')
                const outPath = path.join(dir, 'learned.graph')
                fs.writeFileSync(dataPath, formatCsv(inst.labels, inst.data))
                const out = execFileSync(
                    BIN,
                    ['fit', '--data', dataPath, '--out', outPath,
                     '--restarts', '1', '--seed', String(seed)],
                    { encoding: 'utf-8' },
                )
                const direct = parseGraph(fs.readFileSync(outPath, 'utf-8'))
                const directBic = Number(out.match(/^bic: (.*)$/m)![1])

                expect(edgeKey(viaWrapper)).toBe(edgeKey(direct))
                expect(Math.abs(viaWrapper.bic - directBic)).toBeLessThanOrEqual(
                    1e-8 * Math.abs(directBic),
                )
            } finally {
                fs.rmSync(dir, { recursive: true, force: true })
            }
        }
    }, 120000)
})
