/* tslint:disable */
/* eslint-disable */

export class SquareView {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly max_error: number;
    readonly max_weight: number;
    /**
     * Net output on the sampled grid of `[-1, 1]`.
     */
    readonly values: Float64Array;
}

/**
 * `phi(t - shift)` on `samples` points of `[lo, hi]`.
 */
export function bell_curve(lo: number, hi: number, samples: number, shift: number): Float64Array;

/**
 * `sum_{|i| <= terms} phi(t - i)`; equals one up to rounding once `terms`
 * covers the plotted range.
 */
export function partition_sum(lo: number, hi: number, samples: number, terms: number): Float64Array;

/**
 * Operator built from `f(x) = g(|x|^2)` in the plane, evaluated along the
 * same ray.
 */
export function radial_operator(name: string, n: number, eps: number, samples: number): Float64Array;

/**
 * Target `g(r^2)` along the ray `x = (r, 0)`, `r` in `[0, 1]`.
 */
export function radial_target(name: string, samples: number): Float64Array;

/**
 * Builds the three-neuron square net for `eps` and samples it on `[-1, 1]`.
 */
export function square_view(eps: number, samples: number): SquareView;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_squareview_free: (a: number, b: number) => void;
    readonly bell_curve: (a: number, b: number, c: number, d: number) => [number, number];
    readonly partition_sum: (a: number, b: number, c: number, d: number) => [number, number];
    readonly radial_operator: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly radial_target: (a: number, b: number, c: number) => [number, number, number, number];
    readonly square_view: (a: number, b: number) => [number, number, number];
    readonly squareview_max_error: (a: number) => number;
    readonly squareview_max_weight: (a: number) => number;
    readonly squareview_values: (a: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
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
