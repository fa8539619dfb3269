/* tslint:disable */
/* eslint-disable */

/**
 * Classical and HHL node potentials for a preset.
 */
export function potentialProfile(structure: string, n_clock: number, t: number): string;

/**
 * Fidelity and error against `t`, one curve per clock width.
 */
export function sweepCurves(structure: string, n_clock: Uint32Array, t_min: number, t_max: number, steps: number): string;

/**
 * (ancilla, input) distribution of an explicit structure-(a) circuit,
 * with optional sampled counts.
 */
export function variantHistogram(variant: string, shots: number, seed: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly potentialProfile: (a: number, b: number, c: number, d: number) => [number, number];
    readonly sweepCurves: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number];
    readonly variantHistogram: (a: number, b: number, c: number, d: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
