"""Command-line front end: config-driven, deterministic, atomic outputs.

Subcommands: analyze, check-hyp, symbol, apply, probe, whitney.  Exit codes:
0 success, 2 invalid configuration, 3 I/O failure, 4 a verification check
failed (the report is still written).
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import __version__, curves, engine, intervals, reporting, symbols, whitney
from .config import ConfigError, RunConfig

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_CHECK = 4

GROWTH_THRESHOLD = 1.5  # artifact default for probe growth alarms


def _envelope(cfg: RunConfig, payload: dict) -> dict:
    return {"artifact_version": __version__, "config_sha256": cfg.config_sha256, **payload}


def _build_sequence(cfg: RunConfig, J=None):
    return curves.build_dyadic_slope_sequence(cfg.curve(), J if J is not None else cfg.J)


def cmd_analyze(cfg: RunConfig) -> int:
    seq = _build_sequence(cfg)
    cls = curves.classify_sequence(seq)
    curve = cfg.curve()
    bands = []
    for j in range(seq.first_index(), seq.last_index()):
        inf_s, sup_s, ok = curves.slope_band_check(curve, seq.a_at(j + 1), seq.a_at(j))
        bands.append({"j": j, "inf_slope": inf_s, "sup_slope": sup_s, "band_ok": ok})
    with np.errstate(divide="ignore", invalid="ignore"):
        b_over_a = [float(v) for v in seq.b / seq.a]
    report = _envelope(
        cfg,
        {
            "family": cfg.family,
            "c": cfg.c,
            "J": cfg.J,
            "first_index": seq.first_index(),
            "a": [float(v) for v in seq.a],
            "b": [float(v) for v in seq.b],
            "b_over_a": b_over_a,
            "direction": seq.direction,
            "a_inf": seq.a_inf if seq.a_inf is None or math.isfinite(seq.a_inf) else "-inf",
            "b_inf": seq.b_inf,
            "classification": {
                "labels": cls.labels,
                "lacunary_q": cls.lacunary_q,
                "min_diff_ratio": cls.min_diff_ratio,
                "max_diff_ratio": cls.max_diff_ratio,
                "convex_failures": cls.convex_failures,
                "concave_failures": cls.concave_failures,
            },
            "slope_bands": bands,
        },
    )
    reporting.write_json(os.path.join(cfg.out_dir, "analyze.json"), report)
    return EXIT_OK


def cmd_check_hyp(cfg: RunConfig) -> int:
    seq = _build_sequence(cfg, J=2 * cfg.J)
    rep = intervals.check_hypothesis(seq, cfg.hypothesis, cfg.J)
    payload = _envelope(cfg, rep.as_dict())
    reporting.write_json(os.path.join(cfg.out_dir, "hypothesis.json"), payload)
    return EXIT_OK if rep.stable else EXIT_CHECK


def _config_symbol(cfg: RunConfig):
    if cfg.symbol_kind == "constant":
        return symbols.constant_symbol(1.0)
    if cfg.symbol_kind == "exponential_paraproduct":
        m1, m2, m3 = symbols.exponential_paraproduct_symbols(cfg.J)
        ev = lambda xi, eta: m1(xi, eta) + m2(xi, eta) + m3(xi, eta)
        return symbols.SymbolSpec(evaluator=ev, bbox=None, label="exp_paraproduct_sum")
    seq = _build_sequence(cfg)
    if cfg.symbol_kind == "staircase":
        return symbols.staircase_symbol(seq)
    if cfg.symbol_kind == "epigraph":
        return symbols.epigraph_symbol(cfg.curve(), (float(seq.a[-1]), float(seq.a[0])))
    if cfg.symbol_kind == "polygonal":
        return symbols.polygonal_epigraph_symbol(np.column_stack([seq.a, seq.b]))
    raise ConfigError(f"unknown symbol kind: {cfg.symbol_kind}")


def _symbol_window(cfg: RunConfig, sym) -> tuple[float, float, float, float]:
    if cfg.window is not None:
        return cfg.window
    if sym.bbox is not None:
        return sym.bbox
    raise ConfigError("symbol has unbounded support; set [symbol] window")


def cmd_symbol(cfg: RunConfig) -> int:
    sym = _config_symbol(cfg)
    window = _symbol_window(cfg, sym)
    grid = symbols.FrequencyGrid(window=window, nx=cfg.bitmap_nx, ny=cfg.bitmap_ny)
    bitmap = symbols.sample_symbol(sym, grid)
    base = os.path.join(cfg.out_dir, f"symbol_{cfg.symbol_kind}")
    reporting.write_pgm(base + ".pgm", symbols.bitmap_to_pgm(bitmap))
    reporting.write_csv(
        base + ".csv",
        ["xi", "eta", "amplitude"],
        (
            (x, e, bitmap[i, k])
            for i, x in enumerate(grid.xi_values())
            for k, e in enumerate(grid.eta_values())
        ),
    )
    reporting.write_json(
        base + ".json",
        _envelope(
            cfg,
            {
                "kind": sym.kind,
                "label": sym.label,
                "window": list(window),
                "nx": cfg.bitmap_nx,
                "ny": cfg.bitmap_ny,
                "ones_fraction": float(np.mean(bitmap)),
            },
        ),
    )
    return EXIT_OK


def _read_function_csv(path: str, L: float) -> engine.SampledFunction:
    rows = []
    with open(path, "r") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("re"):
                continue
            re_s, im_s = line.split(",")
            rows.append(complex(float(re_s), float(im_s)))
    return engine.SampledFunction(np.array(rows, dtype=complex), L)


def _write_function_csv(path: str, f: engine.SampledFunction):
    reporting.write_csv(path, ["re", "im"], ((v.real, v.imag) for v in f.samples))


def cmd_apply(cfg: RunConfig, f_file: str, g_file: str) -> int:
    f = _read_function_csv(f_file, cfg.L)
    g = _read_function_csv(g_file, cfg.L)
    sym = _config_symbol(cfg)
    out = engine.apply_bilinear(sym, f, g)
    _write_function_csv(os.path.join(cfg.out_dir, "applied.csv"), out)
    return EXIT_OK


def cmd_probe(cfg: RunConfig) -> int:
    rows = []
    summaries = []
    worst = 0.0
    sym = _config_symbol(cfg)
    for t in cfg.triples:
        e = engine.ExponentTriple(*t)
        rep = engine.norm_probe(
            sym, e, trials=cfg.trials, resolutions=cfg.resolutions, seed=cfg.seed, L=cfg.L
        )
        rows.extend(rep.csv_rows())
        summaries.append(rep.as_dict())
        worst = max(worst, rep.growth_factor)
        if rep.growth_factor >= GROWTH_THRESHOLD:
            _emit_witness(cfg, sym, rep)
    reporting.write_csv(
        os.path.join(cfg.out_dir, "probe.csv"),
        ["p1", "p2", "p3", "N", "trial_family", "max_ratio"],
        rows,
    )
    reporting.write_json(
        os.path.join(cfg.out_dir, "probe.json"),
        _envelope(cfg, {"symbol": sym.label, "reports": summaries, "worst_growth": worst}),
    )
    return EXIT_OK if worst < GROWTH_THRESHOLD else EXIT_CHECK


def _emit_witness(cfg: RunConfig, sym, rep):
    N = rep.resolutions[-1]
    best = max((r for r in rep.rows if r["N"] == N), key=lambda r: r["max_ratio"])
    ri = rep.resolutions.index(N)
    fi = ["wave_packets", "sparse_spectrum", "random_sign"].index(best["family"])
    f, g = engine.make_trial_pair(best["family"], (rep.seed, ri, fi, best["argmax_trial"]), N, rep.L)
    tag = f"witness_{best['family']}_{N}"
    _write_function_csv(os.path.join(cfg.out_dir, tag + "_f.csv"), f)
    _write_function_csv(os.path.join(cfg.out_dir, tag + "_g.csv"), g)


def cmd_whitney(cfg: RunConfig) -> int:
    seq = _build_sequence(cfg, J=cfg.J + 4)  # vertex margin beyond tested triangles
    poly = whitney.PolygonalGeometry.from_sequence(seq)
    segs = list(poly.segment_indices())[: cfg.whitney_segments]
    covers = []
    all_ok = True
    rect_rows = []
    overlap_rows = []
    for j in segs:
        rep = whitney.build_cover(
            poly, j, alpha=cfg.alpha, C0=cfg.C0, samples=cfg.whitney_samples
        )
        covers.append(rep.as_dict())
        all_ok = all_ok and rep.cover_ok and rep.containment_ok
        ov = whitney.edge_interval_collections(rep.rects, cfg.alpha)["max_overlap"]
        overlap_rows.append({"j": j, "overlap": {str(k): v for k, v in ov.items()}})
        for r in rep.rects:
            rect_rows.append(
                (r.j, r.square.k, r.square.cx, r.square.cy,
                 r.xi_range[0], r.xi_range[1], r.eta_range[0], r.eta_range[1])
            )
        if j == segs[0]:
            svg = reporting.rects_to_svg(rep.rects, curve_points=poly.vertices)
            reporting.atomic_write_text(os.path.join(cfg.out_dir, "whitney_cover.svg"), svg)
    reporting.write_csv(
        os.path.join(cfg.out_dir, "whitney_rects.csv"),
        ["j", "scale_k", "cx", "cy", "xi_lo", "xi_hi", "eta_lo", "eta_hi"],
        rect_rows,
    )

    partition = [
        {"j0": j0, "B": cfg.exponent_base,
         "deviation": whitney.partition_check(
             j0, cfg.exponent_base, (0.0, 8.0 * float(cfg.exponent_base) ** (-j0)))}
        for j0 in (-3, -2, -1)
    ]
    part_ok = all(p["deviation"] <= 1e-6 for p in partition)

    model = _demo_model_sum(cfg)
    model_ok = model["deviation"] <= 1e-6

    reporting.write_json(
        os.path.join(cfg.out_dir, "whitney.json"),
        _envelope(
            cfg,
            {
                "covers": covers,
                "edge_overlaps": overlap_rows,
                "partition": partition,
                "model_sum": model,
            },
        ),
    )
    ok = all_ok and part_ok and model_ok
    return EXIT_OK if ok else EXIT_CHECK


def _demo_model_sum(cfg: RunConfig) -> dict:
    """Model-form identity on the built-in dyadic polygon (lattice-aligned
    anchors are required for exact modulation, so the config curve's
    irrational vertices cannot be used here)."""
    js = np.arange(1, 8)
    seq = curves.SequencePair(
        a=-js.astype(float), b=2.0 ** (1 - js), direction="decreasing",
        j0=1, a_inf=-math.inf, b_inf=0.0,
    )
    poly = whitney.PolygonalGeometry.from_sequence(seq)
    sq = whitney.WhitneySquare(cx=0.75, cy=0.25, k=-3)
    rect = whitney.TileRect(j=1, square=sq, anchor=poly.anchor(1), s_j=poly.slope(1))
    tiles = whitney.enumerate_multitiles(
        C0=2.0, exponent_base=2, j=1, rects=[rect], space_len=64.0, variant=cfg.diag_variant
    )
    rng = np.random.default_rng(np.random.SeedSequence((cfg.seed, 97)))
    N, L = 512, 64.0
    mk = lambda: engine.SampledFunction(rng.normal(size=N) + 1j * rng.normal(size=N), L)
    res = whitney.model_sum_eval(mk(), mk(), mk(), tiles, [rect], seq, alpha=cfg.alpha,
                                 exponent_base=2)
    res["model_value"] = {"re": res["model_value"].real, "im": res["model_value"].imag}
    res["adjoint_value"] = {"re": res["adjoint_value"].real, "im": res["adjoint_value"].imag}
    return res


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="bmlab", description="bilinear multiplier laboratory"
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, extra=()):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to the run config file")
        p.add_argument("--out", help="output directory override")
        p.add_argument("--seed", type=int, help="seed override")
        for arg, kw in extra:
            p.add_argument(arg, **kw)
        return p

    add("analyze", "curve report: sequences, classification, slope bands")
    add("check-hyp", "interval-splitting report for the configured hypothesis")
    add("symbol", "render the configured symbol as PGM/CSV/JSON")
    add(
        "apply",
        "apply the configured symbol to two function files",
        extra=(
            ("f_file", {"help": "CSV of (re,im) samples for the first input"}),
            ("g_file", {"help": "CSV of (re,im) samples for the second input"}),
        ),
    )
    add("probe", "randomized operator-ratio probe across resolutions")
    add("whitney", "tile geometry, covers, partition and model-form reports")

    args = parser.parse_args(argv)
    try:
        cfg = RunConfig.from_file(args.config)
        if args.out:
            cfg.out_dir = args.out
        if args.seed is not None:
            cfg.seed = args.seed
        cfg.validate()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO

    try:
        if args.command == "analyze":
            return cmd_analyze(cfg)
        if args.command == "check-hyp":
            return cmd_check_hyp(cfg)
        if args.command == "symbol":
            return cmd_symbol(cfg)
        if args.command == "apply":
            return cmd_apply(cfg, args.f_file, args.g_file)
        if args.command == "probe":
            return cmd_probe(cfg)
        if args.command == "whitney":
            return cmd_whitney(cfg)
        raise AssertionError(f"unhandled command {args.command}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, curves.TruncationError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
