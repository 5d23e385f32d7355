/* tslint:disable */
/* eslint-disable */

/**
 * Draws `samples` values from IG(mu, lambda), refits them, and returns both
 * densities with a histogram over `[0, x_max]`.
 */
export function invgauss_fit(mu: number, lambda: number, samples: number, seed: bigint, x_max: number, bins: number): string;

/**
 * Value function and threshold for normal answer-value steps.
 */
export function threshold_solve(discount: number, step_mean: number, step_sd: number, lo: number, hi: number, points: number): string;

/**
 * `u(n)` for `n = 0..=n_max`, one curve per utility intercept.
 */
export function utility_curves(alpha_us: Float64Array, beta1: number, n_max: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly invgauss_fit: (a: number, b: number, c: number, d: bigint, e: number, f: number) => [number, number, number, number];
    readonly threshold_solve: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly utility_curves: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
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
