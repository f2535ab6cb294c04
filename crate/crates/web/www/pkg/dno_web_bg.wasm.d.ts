/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_squareview_free: (a: number, b: number) => void;
export const bell_curve: (a: number, b: number, c: number, d: number) => [number, number];
export const partition_sum: (a: number, b: number, c: number, d: number) => [number, number];
export const radial_operator: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const radial_target: (a: number, b: number, c: number) => [number, number, number, number];
export const square_view: (a: number, b: number) => [number, number, number];
export const squareview_max_error: (a: number) => number;
export const squareview_max_weight: (a: number) => number;
export const squareview_values: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;
