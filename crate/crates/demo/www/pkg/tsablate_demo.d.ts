/* tslint:disable */
/* eslint-disable */

export class Backtest {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    forecast: Float64Array;
    mae: number;
    mse_lower: number;
    mse_upper: number;
    mse: number;
    windows: number;
}

export class Decomposed {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    residual: Float64Array;
    seasonal: Float64Array;
    trend: Float64Array;
}

export function backtest(values: Float64Array, lookback: number, horizon: number, method: string, period: number, seed: number): Backtest;

export function decompose(values: Float64Array, k_trend: number, k_seasonal: number): Decomposed;

export function perturb(values: Float64Array, kind: string, seed: number): Float64Array;

export function synthetic_series(len: number, period: number, noise: number, seed: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_backtest_free: (a: number, b: number) => void;
    readonly __wbg_decomposed_free: (a: number, b: number) => void;
    readonly __wbg_get_backtest_forecast: (a: number) => [number, number];
    readonly __wbg_get_backtest_mae: (a: number) => number;
    readonly __wbg_get_backtest_mse: (a: number) => number;
    readonly __wbg_get_backtest_mse_lower: (a: number) => number;
    readonly __wbg_get_backtest_mse_upper: (a: number) => number;
    readonly __wbg_get_backtest_windows: (a: number) => number;
    readonly __wbg_get_decomposed_residual: (a: number) => [number, number];
    readonly __wbg_get_decomposed_seasonal: (a: number) => [number, number];
    readonly __wbg_get_decomposed_trend: (a: number) => [number, number];
    readonly __wbg_set_backtest_forecast: (a: number, b: number, c: number) => void;
    readonly __wbg_set_backtest_mae: (a: number, b: number) => void;
    readonly __wbg_set_backtest_mse: (a: number, b: number) => void;
    readonly __wbg_set_backtest_mse_lower: (a: number, b: number) => void;
    readonly __wbg_set_backtest_mse_upper: (a: number, b: number) => void;
    readonly __wbg_set_backtest_windows: (a: number, b: number) => void;
    readonly __wbg_set_decomposed_residual: (a: number, b: number, c: number) => void;
    readonly __wbg_set_decomposed_seasonal: (a: number, b: number, c: number) => void;
    readonly __wbg_set_decomposed_trend: (a: number, b: number, c: number) => void;
    readonly backtest: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number];
    readonly decompose: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly perturb: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly synthetic_series: (a: number, b: number, c: number, d: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
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
