"""Run configuration: flat key = value sections, one file per run.

The format is INI as read by :mod:`configparser`.  Everything that affects a
run lives in the file (the seed included; there are no wall-clock defaults),
so identical config bytes reproduce identical outputs.  The only override
hooks are the output directory and the seed, both exposed as CLI flags.
"""

from __future__ import annotations

import configparser
import hashlib
from dataclasses import dataclass, field
from typing import Optional

from . import curves

__all__ = ["RunConfig", "ConfigError", "CURVE_FAMILIES"]


class ConfigError(ValueError):
    pass


CURVE_FAMILIES = {
    "power_law": lambda c: curves.power_law(_require_c(c, "power_law")),
    "hyperboloid": lambda c: curves.hyperboloid(),
    "exponential": lambda c: curves.exponential(),
    "monomial": lambda c: curves.monomial(_require_c(c, "monomial")),
    "circle_arc": lambda c: curves.circle_arc(),
    "rational": lambda c: curves.rational(_require_c(c, "rational")),
    "arctan": lambda c: curves.arctan_curve(),
}


def _require_c(c, family):
    if c is None:
        raise ConfigError(f"curve family {family} needs the parameter c")
    return c


@dataclass
class RunConfig:
    family: str = "hyperboloid"
    c: Optional[float] = None
    renormalize: Optional[str] = None
    J: int = 8
    N: int = 256
    L: float = 32.0
    triples: list[tuple[float, float, float]] = field(default_factory=lambda: [(3.0, 3.0, 3.0)])
    trials: int = 50
    seed: Optional[int] = None
    resolutions: list[int] = field(default_factory=lambda: [128, 256])
    hypothesis: str = "hyp2"
    symbol_kind: str = "staircase"
    bitmap_nx: int = 256
    bitmap_ny: int = 256
    window: Optional[tuple[float, float, float, float]] = None
    C0: float = 16.0
    alpha: float = 0.9
    exponent_base: int = 8
    whitney_segments: int = 4
    whitney_samples: int = 10_000
    diag_variant: str = "line"
    out_dir: str = "out"
    config_sha256: str = ""

    def validate(self):
        if self.family not in CURVE_FAMILIES:
            raise ConfigError(f"unknown curve family: {self.family}")
        if self.J < 3:
            raise ConfigError("J >= 3 required")
        if self.N < 2 or self.N & (self.N - 1):
            raise ConfigError("N must be a power of two")
        if self.L <= 0:
            raise ConfigError("L must be positive")
        if self.seed is None:
            raise ConfigError("seed is required (no wall-clock defaults)")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        for N in self.resolutions:
            if N < 2 or N & (N - 1):
                raise ConfigError("every probe resolution must be a power of two")
        for t in self.triples:
            if abs(1.0 / t[0] + 1.0 / t[1] + 1.0 / t[2] - 1.0) > 1e-12:
                raise ConfigError(f"exponent triple {t} violates the scaling relation")
        if self.hypothesis not in ("hyp1", "hyp2"):
            raise ConfigError("hypothesis must be hyp1 or hyp2")
        if self.symbol_kind not in (
            "staircase",
            "epigraph",
            "polygonal",
            "exponential_paraproduct",
            "constant",
        ):
            raise ConfigError(f"unknown symbol kind: {self.symbol_kind}")
        if not 0.8 <= self.alpha < 0.999:
            raise ConfigError("alpha must lie in [0.8, 0.999)")
        if self.diag_variant not in ("line", "plane"):
            raise ConfigError("diag_variant must be line or plane")
        if self.renormalize not in (None, "unit_slope_origin", "vanishing_limits"):
            raise ConfigError("renormalize must be unit_slope_origin or vanishing_limits")
        return self

    def curve(self) -> curves.CurveSpec:
        cur = CURVE_FAMILIES[self.family](self.c)
        if self.renormalize:
            cur = curves.renormalize(cur, self.renormalize)
        return cur

    @classmethod
    def from_file(cls, path: str) -> "RunConfig":
        with open(path, "rb") as fh:
            raw = fh.read()
        parser = configparser.ConfigParser()
        try:
            parser.read_string(raw.decode("utf-8"))
        except (configparser.Error, UnicodeDecodeError) as exc:
            raise ConfigError(f"cannot parse config: {exc}") from exc
        cfg = cls()
        cfg.config_sha256 = hashlib.sha256(raw).hexdigest()

        def get(section, key, cast, default):
            if parser.has_option(section, key):
                try:
                    return cast(parser.get(section, key))
                except ValueError as exc:
                    raise ConfigError(f"bad value for [{section}] {key}: {exc}") from exc
            return default

        cfg.family = get("curve", "family", str, cfg.family)
        cfg.c = get("curve", "c", float, cfg.c)
        cfg.renormalize = get("curve", "renormalize", str, cfg.renormalize)
        cfg.J = get("sequence", "J", int, cfg.J)
        cfg.hypothesis = get("sequence", "hypothesis", str, cfg.hypothesis)
        cfg.N = get("grid", "N", int, cfg.N)
        cfg.L = get("grid", "L", float, cfg.L)
        cfg.trials = get("probe", "trials", int, cfg.trials)
        cfg.seed = get("probe", "seed", int, cfg.seed)
        cfg.resolutions = get(
            "probe", "resolutions", lambda s: [int(v) for v in s.split()], cfg.resolutions
        )
        cfg.triples = get("probe", "triples", _parse_triples, cfg.triples)
        cfg.symbol_kind = get("symbol", "kind", str, cfg.symbol_kind)
        cfg.bitmap_nx = get("symbol", "nx", int, cfg.bitmap_nx)
        cfg.bitmap_ny = get("symbol", "ny", int, cfg.bitmap_ny)
        cfg.window = get(
            "symbol", "window", lambda s: tuple(float(v) for v in s.split()), cfg.window
        )
        if cfg.window is not None and len(cfg.window) != 4:
            raise ConfigError("window needs four numbers: xi_lo xi_hi eta_lo eta_hi")
        cfg.C0 = get("whitney", "C0", float, cfg.C0)
        cfg.alpha = get("whitney", "alpha", float, cfg.alpha)
        cfg.exponent_base = get("whitney", "B", int, cfg.exponent_base)
        cfg.whitney_segments = get("whitney", "segments", int, cfg.whitney_segments)
        cfg.whitney_samples = get("whitney", "samples", int, cfg.whitney_samples)
        cfg.diag_variant = get("whitney", "diag_variant", str, cfg.diag_variant)
        cfg.out_dir = get("output", "dir", str, cfg.out_dir)
        return cfg


def _parse_triples(text: str) -> list[tuple[float, float, float]]:
    out = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = [float(v) for v in chunk.replace(",", " ").split()]
        if len(parts) != 3:
            raise ValueError(f"triple needs three exponents: {chunk!r}")
        out.append(tuple(parts))
    return out
