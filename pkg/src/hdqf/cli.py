"""Command-line entry point.

Subcommands map one-to-one onto the experiment runners, plus gen-codebook
for writing codebook files. Option precedence is CLI flag > config file >
built-in default; config files are flat ``key = value`` text (UTF-8,
``#`` comments).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .experiments import (
    ImageDecodeConfig,
    NoiseConfig,
    NonUniqueConfig,
    ProbVsIterConfig,
    ScalingConfig,
    Table1Config,
    exp_image_decode,
    exp_noise,
    exp_non_unique,
    exp_prob_vs_iter,
    exp_scaling,
    exp_table1,
)
from .hdc import gen_codebooks, save_codebooks

__all__ = ["main", "parse_config_file"]


def parse_config_file(path) -> dict[str, str]:
    """Flat key=value config text; later keys override earlier ones."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def _coerce(value: str, like) -> object:
    if isinstance(like, bool):
        return value.lower() in ("1", "true", "yes", "on")
    if isinstance(like, int):
        return int(value)
    if isinstance(like, float):
        return float(value)
    if isinstance(like, tuple):
        parts = [p for p in value.replace(",", " ").split() if p]
        elem = like[0] if like else 0
        return tuple(type(elem)(p) if not isinstance(elem, float) else float(p)
                     for p in parts)
    return value


def _resolve(cfg_cls, cli_args: argparse.Namespace, file_cfg: dict[str, str]):
    """Merge CLI > file > dataclass defaults into a config instance."""
    defaults = cfg_cls()
    values = {}
    for name in defaults.__dataclass_fields__:
        default = getattr(defaults, name)
        value = default
        if name in file_cfg and default is not None:
            value = _coerce(file_cfg[name], default)
        elif name in file_cfg:
            value = file_cfg[name]
        cli_value = getattr(cli_args, name, None)
        if cli_value is not None:
            value = cli_value if not isinstance(default, tuple) or isinstance(cli_value, tuple) \
                else _coerce(cli_value, default)
        values[name] = value
    return cfg_cls(**values)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="master RNG seed")
    p.add_argument("--out-dir", dest="out_dir", default=None, help="output directory")
    p.add_argument("--mode", choices=("circuit", "implicit"), default=None,
                   help="simulation mode where applicable")
    p.add_argument("--shots", type=int, default=None, help="measurement samples")
    p.add_argument("--runs", type=int, default=None,
                   help="independent measured repetitions")
    p.add_argument("--config", default=None, help="flat key=value config file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hdqf",
        description="Hypervector factorization benchmarks: quantum search "
                    "simulation vs classical baselines.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prob-vs-iter", help="success probability vs iteration grid")
    _add_common(p)
    p.add_argument("--F-list", dest="F_list", default=None)
    p.add_argument("--N-list", dest="N_list", default=None)
    p.add_argument("--D", type=int, dest="D", default=None)

    p = sub.add_parser("scaling", help="quantum vs classical cost scaling in N")
    _add_common(p)
    p.add_argument("--F-list", dest="F_list", default=None)
    p.add_argument("--N-list", dest="N_list", default=None)
    p.add_argument("--D", type=int, dest="D", default=None)

    p = sub.add_parser("noise", help="thermal-relaxation error study")
    _add_common(p)
    p.add_argument("--trials", type=int, default=None, help="trajectories per point")
    p.add_argument("--t1-grid", dest="t1_grid", default=None,
                   help="comma-separated T1 values in seconds")
    p.add_argument("--iterations", default=None, help="comma-separated iteration marks")

    p = sub.add_parser("image-decode", help="image-location decoding case study")
    _add_common(p)
    p.add_argument("--image-dir", dest="image_dir", default=None,
                   help="directory of P1 PBM images (default: built-in glyphs)")
    p.add_argument("--section-dim", dest="section_dim", type=int, default=None)
    p.add_argument("--locations", type=int, default=None)
    p.add_argument("--high-dim", dest="high_dim", type=int, default=None)

    p = sub.add_parser("non-unique", help="t=1 vs t=2 factorization behavior")
    _add_common(p)
    p.add_argument("--trace-iterations", dest="trace_iterations", type=int, default=None)

    p = sub.add_parser("table1", help="resonator vs quantum comparison table")
    _add_common(p)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--max-iters", dest="max_iters", type=int, default=None)

    p = sub.add_parser("gen-codebook", help="generate and save a codebook file")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--F", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--D", type=int, required=True)
    p.add_argument("--out", required=True, help="output file path")

    return parser


_RUNNERS = {
    "prob-vs-iter": (ProbVsIterConfig, exp_prob_vs_iter),
    "scaling": (ScalingConfig, exp_scaling),
    "noise": (NoiseConfig, exp_noise),
    "image-decode": (ImageDecodeConfig, exp_image_decode),
    "non-unique": (NonUniqueConfig, exp_non_unique),
    "table1": (Table1Config, exp_table1),
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "gen-codebook":
        books = gen_codebooks(args.seed, args.F, args.N, args.D)
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        save_codebooks(books, out)
        print(f"wrote codebook (F={args.F}, N={args.N}, D={args.D}, "
              f"seed={args.seed}) to {out}")
        return 0

    cfg_cls, runner = _RUNNERS[args.command]
    file_cfg = parse_config_file(args.config) if args.config else {}
    cfg = _resolve(cfg_cls, args, file_cfg)
    written = runner(cfg)
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
