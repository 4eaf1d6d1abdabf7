/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_backtest_free: (a: number, b: number) => void;
export const __wbg_decomposed_free: (a: number, b: number) => void;
export const __wbg_get_backtest_forecast: (a: number) => [number, number];
export const __wbg_get_backtest_mae: (a: number) => number;
export const __wbg_get_backtest_mse: (a: number) => number;
export const __wbg_get_backtest_mse_lower: (a: number) => number;
export const __wbg_get_backtest_mse_upper: (a: number) => number;
export const __wbg_get_backtest_windows: (a: number) => number;
export const __wbg_get_decomposed_residual: (a: number) => [number, number];
export const __wbg_get_decomposed_seasonal: (a: number) => [number, number];
export const __wbg_get_decomposed_trend: (a: number) => [number, number];
export const __wbg_set_backtest_forecast: (a: number, b: number, c: number) => void;
export const __wbg_set_backtest_mae: (a: number, b: number) => void;
export const __wbg_set_backtest_mse: (a: number, b: number) => void;
export const __wbg_set_backtest_mse_lower: (a: number, b: number) => void;
export const __wbg_set_backtest_mse_upper: (a: number, b: number) => void;
export const __wbg_set_backtest_windows: (a: number, b: number) => void;
export const __wbg_set_decomposed_residual: (a: number, b: number, c: number) => void;
export const __wbg_set_decomposed_seasonal: (a: number, b: number, c: number) => void;
export const __wbg_set_decomposed_trend: (a: number, b: number, c: number) => void;
export const backtest: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number];
export const decompose: (a: number, b: number, c: number, d: number) => [number, number, number];
export const perturb: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const synthetic_series: (a: number, b: number, c: number, d: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
