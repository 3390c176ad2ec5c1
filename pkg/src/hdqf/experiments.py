"""Experiment runners reproducing the probability, scaling, noise, image,
non-uniqueness, and comparison-table studies at desk scale.

Every experiment is deterministic given (config, seed): CSV outputs are
byte-identical across re-runs, each output directory gets a run manifest
recording parameters, seeds, and library versions, and plots are written
as SVG with stable metadata.
"""

from __future__ import annotations

import csv
import math
import platform
from collections import Counter
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from . import __version__
from .grover import (
    HDQFConfig,
    _ImplicitEngine,
    closed_form_success,
    optimal_iterations,
    run_hdqf,
)
from .hdc import (
    CodebookSet,
    bind_all,
    bipolar_to_bits,
    brute_force_factorize,
    gen_codebooks,
    pack_bits,
    save_codebooks,
)
from .images import (
    build_task,
    decode_quantum,
    decode_resonator,
    load_pbm,
    make_glyphs,
    save_pbm,
)
from .noise import NoiseParams, run_noisy_sweep, success_error, tv_distance
from .resonator import resonator_stats
from .rng import stream
from .statevector import RegisterLayout

__all__ = [
    "ImageDecodeConfig",
    "NoiseConfig",
    "NonUniqueConfig",
    "ProbVsIterConfig",
    "ScalingConfig",
    "Table1Config",
    "exp_image_decode",
    "exp_noise",
    "exp_non_unique",
    "exp_prob_vs_iter",
    "exp_scaling",
    "exp_table1",
    "find_distinct_row_seed",
    "find_unique_product_seed",
    "load_images",
]


# ------------------------------------------------------------- plumbing

def _write_csv(path: Path, params: dict, header: list[str], rows: list[list]) -> None:
    """RFC-4180 CSV with a leading comment record naming parameters and seed."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["# " + " ".join(f"{k}={v}" for k, v in sorted(params.items()))])
        w.writerow(header)
        for row in rows:
            w.writerow(row)


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _write_manifest(out_dir: Path, name: str, params: dict, notes: list[str] = ()) -> Path:
    import matplotlib
    import scipy

    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{name}-manifest.txt"
    lines = [f"experiment: {name}"]
    lines += [f"{k}: {v}" for k, v in sorted(params.items())]
    lines += [
        f"hdqf_version: {__version__}",
        f"python: {platform.python_version()}",
        f"numpy: {np.__version__}",
        f"scipy: {scipy.__version__}",
        f"matplotlib: {matplotlib.__version__}",
    ]
    lines += [f"note: {n}" for n in notes]
    path.write_text("\n".join(lines) + "\n")
    return path


def _new_figure():
    import matplotlib

    matplotlib.use("Agg")
    matplotlib.rcParams["svg.hashsalt"] = "hdqf"
    import matplotlib.pyplot as plt

    return plt


def _save_svg(fig, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})


# --------------------------------------------------- instance generation

def find_distinct_row_seed(F: int, N: int, D: int, start_seed: int,
                           max_tries: int = 100_000) -> int:
    """First seed >= start_seed whose codebooks are duplicate-free."""
    for s in range(start_seed, start_seed + max_tries):
        if gen_codebooks(s, F, N, D).has_distinct_rows():
            return s
    raise RuntimeError(f"no distinct-row codebook found in {max_tries} seeds")


def _product_counts(books: CodebookSet) -> Counter:
    packed = books.packed_rows().tolist()
    counts: Counter[int] = Counter()

    def walk(f: int, fold: int):
        if f == books.num_factors:
            counts[fold] += 1
            return
        for r in packed[f]:
            walk(f + 1, fold ^ r)

    walk(0, 0)
    return counts


def find_unique_product_seed(F: int, N: int, D: int, start_seed: int,
                             max_tries: int = 100_000) -> int:
    """Seed whose codebook has distinct rows and all N**F products distinct.

    Every planted target then has exactly one factorization, which is what
    the scaling study assumes.
    """
    for s in range(start_seed, start_seed + max_tries):
        books = gen_codebooks(s, F, N, D)
        if not books.has_distinct_rows():
            continue
        counts = _product_counts(books)
        if all(c == 1 for c in counts.values()):
            return s
    raise RuntimeError(f"no unique-product codebook found in {max_tries} seeds")


def find_target_with_solutions(books: CodebookSet, t: int) -> np.ndarray | None:
    """Deterministically pick a target hypervector with exactly t factorizations."""
    counts = _product_counts(books)
    candidates = sorted(v for v, c in counts.items() if c == t)
    if not candidates:
        return None
    bits = ((candidates[0] >> np.arange(books.dim)) & 1).astype(np.int8)
    return (1 - 2 * bits).astype(np.int8)


# -------------------------------------------------------- prob-vs-iter

@dataclass(frozen=True)
class ProbVsIterConfig:
    F_list: tuple[int, ...] = (2, 4)
    N_list: tuple[int, ...] = (2, 4, 8)
    D: int = 5
    mode: str = "implicit"
    trace_multiplier: int = 3
    seed: int = 0
    out_dir: str = "results/prob-vs-iter"
    qubit_cap: int = 26


def exp_prob_vs_iter(cfg: ProbVsIterConfig) -> list[Path]:
    """Exact success probability vs Grover iteration, one CSV+SVG per (F, N)."""
    out_dir = Path(cfg.out_dir)
    written: list[Path] = []
    notes: list[str] = []
    plt = _new_figure()
    for F in cfg.F_list:
        for N in cfg.N_list:
            seed = find_distinct_row_seed(F, N, cfg.D, cfg.seed + 1000 * F + N)
            books = gen_codebooks(seed, F, N, cfg.D)
            rng = stream(cfg.seed, 8, F, N)
            planted = tuple(int(i) for i in rng.integers(0, N, size=F))
            target = bind_all(planted, books)
            t = len(brute_force_factorize(target, books)[0])
            mode = cfg.mode
            n_qubits = RegisterLayout(F, cfg.D).n_qubits
            if mode == "circuit" and n_qubits > cfg.qubit_cap:
                notes.append(f"F={F} N={N}: circuit mode needs {n_qubits} qubits "
                             f"(cap {cfg.qubit_cap}); fell back to implicit mode")
                mode = "implicit"
            k_max = cfg.trace_multiplier * optimal_iterations(N, F, t)
            trace = run_hdqf(target, books, HDQFConfig(
                mode=mode, iterations=max(k_max, 2), seed=cfg.seed,
                qubit_cap=cfg.qubit_cap))
            S = N**F
            params = {"experiment": "prob-vs-iter", "F": F, "N": N, "D": cfg.D,
                      "mode": mode, "codebook_seed": seed, "seed": cfg.seed,
                      "planted": "/".join(map(str, planted)), "t": t}
            rows = []
            for r in trace.rows:
                cf = closed_form_success(r.iteration, S, t)
                for aid, a in enumerate(trace.assignments):
                    rows.append([r.iteration, aid, _fmt(r.probabilities[a]),
                                 _fmt(r.total_success), _fmt(cf)])
            csv_path = out_dir / f"prob_vs_iter_F{F}_N{N}.csv"
            _write_csv(csv_path, params,
                       ["iteration", "assignment_id", "probability",
                        "total_success_probability", "closed_form"], rows)
            written.append(csv_path)

            ks = [r.iteration for r in trace.rows]
            fig, ax = plt.subplots(figsize=(5, 3.2))
            ax.plot(ks, trace.totals, "o-", ms=3, label="simulated")
            ax.plot(ks, [closed_form_success(k, S, t) for k in ks], "--",
                    label="closed form")
            ax.set_xlabel("iteration")
            ax.set_ylabel("success probability")
            ax.set_title(f"F={F}, N={N}, D={cfg.D}, t={t} ({mode})")
            ax.set_ylim(-0.02, 1.02)
            ax.legend(loc="best", fontsize=8)
            fig.tight_layout()
            svg_path = out_dir / f"prob_vs_iter_F{F}_N{N}.svg"
            _save_svg(fig, svg_path)
            plt.close(fig)
            written.append(svg_path)
    written.append(_write_manifest(out_dir, "prob-vs-iter", asdict(cfg), notes))
    return written


# ------------------------------------------------------------- scaling

@dataclass(frozen=True)
class ScalingConfig:
    F_list: tuple[int, ...] = (2, 3)
    N_list: tuple[int, ...] = (2, 3, 4, 5, 6, 7, 8)
    D: int = 32
    seed: int = 0
    out_dir: str = "results/scaling"


def _loglog_slope(xs, ys) -> float:
    coeffs = np.polyfit(np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float)), 1)
    return float(coeffs[0])


def exp_scaling(cfg: ScalingConfig) -> list[Path]:
    """Quantum first-peak iterations and classical search cost vs N.

    The quantum fit regresses log(peak + 1/2) on log N, removing the known
    half-iteration offset of the amplitude-amplification peak; the
    classical cost is the exact mean of search-mode comparisons over all
    planted assignments.
    """
    out_dir = Path(cfg.out_dir)
    rows = []
    fit_rows = []
    per_f: dict[int, dict[str, list]] = {}
    for F in cfg.F_list:
        data = {"N": [], "peak": [], "classical": []}
        for N in cfg.N_list:
            seed = find_unique_product_seed(F, N, cfg.D, cfg.seed + 10_000 * F + 100 * N)
            books = gen_codebooks(seed, F, N, cfg.D)
            rng = stream(cfg.seed, 9, F, N)
            planted = tuple(int(i) for i in rng.integers(0, N, size=F))
            target = bind_all(planted, books)
            trace = run_hdqf(target, books, HDQFConfig(
                mode="implicit", iterations=2 * optimal_iterations(N, F, 1) + 2,
                seed=cfg.seed))
            peak = trace.peak_iteration
            opt = optimal_iterations(N, F, 1)

            comparisons = []
            import itertools
            for assignment in itertools.product(range(N), repeat=F):
                tgt = bind_all(assignment, books)
                _, comps = brute_force_factorize(tgt, books, first_hit_only=True)
                comparisons.append(comps)
            mean_comp = float(np.mean(comparisons))
            rows.append([F, N, peak, opt, _fmt(mean_comp), len(comparisons), seed])
            data["N"].append(N)
            data["peak"].append(peak)
            data["classical"].append(mean_comp)
        q_slope = _loglog_slope(data["N"], [p + 0.5 for p in data["peak"]])
        c_slope = _loglog_slope(data["N"], data["classical"])
        fit_rows.append([F, _fmt(q_slope), _fmt(F / 2), _fmt(c_slope), _fmt(float(F))])
        per_f[F] = data

    params = {"experiment": "scaling", "D": cfg.D, "seed": cfg.seed,
              "F_list": "/".join(map(str, cfg.F_list)),
              "N_list": "/".join(map(str, cfg.N_list))}
    csv_path = Path(cfg.out_dir) / "scaling.csv"
    _write_csv(csv_path, params,
               ["F", "N", "peak_iteration", "optimal_iterations",
                "mean_comparisons", "placements", "codebook_seed"], rows)
    fits_path = Path(cfg.out_dir) / "scaling_fits.csv"
    _write_csv(fits_path, params,
               ["F", "quantum_slope", "quantum_expected", "classical_slope",
                "classical_expected"], fit_rows)

    plt = _new_figure()
    fig, axes = plt.subplots(1, 2, figsize=(8, 3.2))
    for F, data in per_f.items():
        axes[0].loglog(data["N"], [p + 0.5 for p in data["peak"]], "o-", label=f"F={F}")
        axes[1].loglog(data["N"], data["classical"], "s-", label=f"F={F}")
    axes[0].set_title("quantum iterations to first peak")
    axes[1].set_title("classical comparisons (mean)")
    for ax in axes:
        ax.set_xlabel("N")
        ax.legend(fontsize=8)
    axes[0].set_ylabel("iterations + 1/2")
    axes[1].set_ylabel("comparisons")
    fig.tight_layout()
    svg_path = Path(cfg.out_dir) / "scaling.svg"
    _save_svg(fig, svg_path)
    plt.close(fig)
    manifest = _write_manifest(out_dir, "scaling", asdict(cfg))
    return [csv_path, fits_path, svg_path, manifest]


# --------------------------------------------------------------- noise

@dataclass(frozen=True)
class NoiseConfig:
    F: int = 2
    D: int = 4
    N_list: tuple[int, ...] = (4, 5)
    t1_grid: tuple[float, ...] = tuple(float(x) for x in np.logspace(-5, -2, 8))
    iterations: tuple[int, ...] = (1, 2, 3, 4, 5, 6)
    trials: int = 64
    shots: int = 8
    seed: int = 0
    out_dir: str = "results/noise"


def exp_noise(cfg: NoiseConfig) -> list[Path]:
    """Distribution error (TV) and success error across the (T1, k) grid."""
    from scipy.stats import spearmanr

    out_dir = Path(cfg.out_dir)
    written: list[Path] = []
    plt = _new_figure()
    for N in cfg.N_list:
        seed = find_distinct_row_seed(cfg.F, N, cfg.D, cfg.seed + 31 * N)
        books = gen_codebooks(seed, cfg.F, N, cfg.D)
        rng = stream(cfg.seed, 12, N)
        planted = tuple(int(i) for i in rng.integers(0, N, size=cfg.F))
        target = bind_all(planted, books)
        assignments, _ = brute_force_factorize(target, books)
        packed = books.packed_rows()
        valid_patterns = set()
        for a in assignments:
            concat = 0
            for f, i in enumerate(a):
                concat |= int(packed[f, i]) << (f * cfg.D)
            valid_patterns.add(concat)

        rows = []
        tv_by_cell: dict[tuple[float, int], float] = {}
        for t1 in cfg.t1_grid:
            params = NoiseParams.with_t2_ratio(t1)
            sweep = run_noisy_sweep(books, target, cfg.iterations, params,
                                    trials=cfg.trials, seed=cfg.seed + int(t1 * 1e9))
            for k in cfg.iterations:
                noisy, ideal = sweep[k]
                tv = tv_distance(noisy, ideal)
                serr = success_error(noisy, ideal, valid_patterns)
                rows.append([_fmt(t1), _fmt(2 * t1), k, _fmt(tv), _fmt(serr),
                             cfg.trials, cfg.shots, cfg.seed])
                tv_by_cell[(t1, k)] = tv

        t1s = [t1 for (t1, k) in tv_by_cell]
        ks = [k for (t1, k) in tv_by_cell]
        tvs = [tv_by_cell[c] for c in tv_by_cell]
        rho_t1, p_t1 = spearmanr(t1s, tvs)
        rho_k, p_k = spearmanr(ks, tvs)

        params_hdr = {"experiment": "noise", "F": cfg.F, "N": N, "D": cfg.D,
                      "codebook_seed": seed, "seed": cfg.seed,
                      "trials": cfg.trials, "shots": cfg.shots,
                      "error_metric": "total_variation_distance"}
        csv_path = out_dir / f"noise_N{N}.csv"
        _write_csv(csv_path, params_hdr,
                   ["T1_seconds", "T2_seconds", "iterations", "tv_error",
                    "success_error", "trials", "shots", "seed"], rows)
        stats_path = out_dir / f"noise_N{N}_stats.csv"
        _write_csv(stats_path, params_hdr,
                   ["spearman_tv_vs_t1", "p_tv_vs_t1", "spearman_tv_vs_iterations",
                    "p_tv_vs_iterations"],
                   [[_fmt(float(rho_t1)), _fmt(float(p_t1)), _fmt(float(rho_k)),
                     _fmt(float(p_k))]])
        written += [csv_path, stats_path]

        fig, axes = plt.subplots(1, 2, figsize=(8, 3.2))
        for k in cfg.iterations:
            xs = list(cfg.t1_grid)
            ys = [tv_by_cell[(t1, k)] for t1 in xs]
            axes[0].semilogx(xs, ys, "o-", ms=3, label=f"k={k}")
        axes[0].set_xlabel("T1 (s)")
        axes[0].set_ylabel("TV error")
        axes[0].legend(fontsize=7)
        for t1 in cfg.t1_grid[::2]:
            ys = [tv_by_cell[(t1, k)] for k in cfg.iterations]
            axes[1].plot(list(cfg.iterations), ys, "s-", ms=3, label=f"T1={t1:.1e}")
        axes[1].set_xlabel("iterations")
        axes[1].set_ylabel("TV error")
        axes[1].legend(fontsize=7)
        fig.suptitle(f"thermal relaxation, N={N} "
                     f"(rho_T1={rho_t1:.2f}, rho_k={rho_k:.2f})", fontsize=9)
        fig.tight_layout()
        svg_path = out_dir / f"noise_N{N}.svg"
        _save_svg(fig, svg_path)
        plt.close(fig)
        written.append(svg_path)
    written.append(_write_manifest(out_dir, "noise", asdict(cfg)))
    return written


# --------------------------------------------------------- image decode

@dataclass(frozen=True)
class ImageDecodeConfig:
    image_dir: str | None = None  # PBM files; None = built-in glyphs
    num_images: int = 4
    locations: int = 4
    section_dim: int = 6
    high_dim: int = 256
    runs: int = 25
    mode: str = "circuit"
    resonator_max_iters: int = 200
    seed: int = 0
    out_dir: str = "results/image-decode"
    qubit_cap: int = 26


def load_images(path) -> list[np.ndarray]:
    """All PBM (P1) files under a directory, sorted by name."""
    files = sorted(Path(path).glob("*.pbm"))
    if not files:
        raise ValueError(f"no .pbm files under {path}")
    return [load_pbm(f) for f in files]


def exp_image_decode(cfg: ImageDecodeConfig) -> list[Path]:
    """Quantum vs resonator image recovery; writes PBMs, accuracy CSV, SVG."""
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    images = (load_images(cfg.image_dir) if cfg.image_dir
              else make_glyphs(cfg.num_images))
    task = build_task(images, cfg.locations, cfg.section_dim, cfg.seed)

    mode = cfg.mode
    notes = []
    n_qubits = RegisterLayout(2, cfg.section_dim).n_qubits
    if mode == "circuit" and n_qubits > cfg.qubit_cap:
        notes.append(f"circuit mode needs {n_qubits} qubits (cap {cfg.qubit_cap}); "
                     "fell back to implicit mode")
        mode = "implicit"

    outcomes = [
        decode_quantum(task, runs=cfg.runs, seed=cfg.seed, mode=mode),
        decode_resonator(task, setting="low", max_iters=cfg.resonator_max_iters,
                         seed=cfg.seed),
        decode_resonator(task, setting="high", high_dim=cfg.high_dim,
                         max_iters=cfg.resonator_max_iters, seed=cfg.seed),
    ]

    params = {"experiment": "image-decode", "images": len(images),
              "locations": cfg.locations, "section_dim": cfg.section_dim,
              "high_dim": cfg.high_dim, "runs": cfg.runs, "mode": mode,
              "seed": cfg.seed, "assignment": "/".join(map(str, task.assignment))}
    rows = []
    for oc in outcomes:
        for j, acc in enumerate(oc.per_slot_pixel_accuracy):
            rows.append([oc.method, j, _fmt(acc), _fmt(oc.pixel_accuracy),
                         _fmt(oc.section_index_accuracy)])
    csv_path = out_dir / "image_decode_accuracy.csv"
    _write_csv(csv_path, params,
               ["method", "location", "slot_pixel_accuracy", "pixel_accuracy",
                "section_index_accuracy"], rows)
    written = [csv_path]

    for oc in outcomes:
        for j, img in enumerate(oc.recovered):
            p = out_dir / f"recovered_{oc.method}_slot{j}.pbm"
            save_pbm(img, p)
            written.append(p)

    plt = _new_figure()
    n_loc = cfg.locations
    fig, axes = plt.subplots(len(outcomes) + 1, n_loc,
                             figsize=(1.6 * n_loc, 1.6 * (len(outcomes) + 1)))
    for j in range(n_loc):
        axes[0][j].imshow(task.images[task.assignment[j]], cmap="gray_r")
        axes[0][j].set_title(f"slot {j}", fontsize=8)
    for r, oc in enumerate(outcomes, start=1):
        for j in range(n_loc):
            axes[r][j].imshow(oc.recovered[j], cmap="gray_r")
        axes[r][0].set_ylabel(oc.method, fontsize=7)
    for row_axes in axes:
        for ax in row_axes:
            ax.set_xticks([])
            ax.set_yticks([])
    fig.tight_layout()
    svg_path = out_dir / "image_decode.svg"
    _save_svg(fig, svg_path)
    plt.close(fig)
    written.append(svg_path)
    written.append(_write_manifest(out_dir, "image-decode", asdict(cfg), notes))
    return written


# ----------------------------------------------------------- non-unique

@dataclass(frozen=True)
class NonUniqueConfig:
    D: int = 10
    F: int = 4
    N: int = 7
    runs: int = 500
    trace_iterations: int = 45
    seed: int = 0
    retry_budget: int = 200
    out_dir: str = "results/non-unique"


def _decode_trace(target: np.ndarray, books: CodebookSet, k_max: int, runs: int,
                  seed: int) -> tuple[list[dict], list[tuple[int, ...]]]:
    """Per-iteration modal decode of `runs` measurements (implicit engine)."""
    assignments, _ = brute_force_factorize(target, books)
    valid = set(assignments)
    packed = books.packed_rows()
    lookup = []
    for f in range(books.num_factors):
        d = {}
        for i, r in enumerate(packed[f].tolist()):
            d.setdefault(int(r), i)
        lookup.append(d)
    engine = _ImplicitEngine(books, target)
    rng = stream(seed, 13)
    out = []
    D = books.dim
    mask = (1 << D) - 1
    for k in range(k_max + 1):
        if k > 0:
            engine.iterate()
        samples = engine.sample(runs, rng)
        votes: Counter[tuple[int, ...]] = Counter()
        for pattern, c in samples.items():
            a = []
            ok = True
            for f in range(books.num_factors):
                chunk = (pattern >> (f * D)) & mask
                i = lookup[f].get(chunk)
                if i is None:
                    ok = False
                    break
                a.append(i)
            if ok:
                votes[tuple(a)] += c
        if votes:
            modal, _ = max(votes.items(), key=lambda kv: (kv[1], tuple(-i for i in kv[0])))
        else:
            modal = None
        out.append({
            "iteration": k,
            "modal": modal,
            "modal_valid": modal in valid,
            "total_success": engine.total_marked_probability(),
        })
    return out, assignments


def exp_non_unique(cfg: NonUniqueConfig) -> list[Path]:
    """Decode traces for targets with one and with two valid factorizations."""
    out_dir = Path(cfg.out_dir)
    books = None
    t1_target = t2_target = None
    used_seed = None
    for s in range(cfg.seed, cfg.seed + cfg.retry_budget):
        cand = gen_codebooks(s, cfg.F, cfg.N, cfg.D)
        if not cand.has_distinct_rows():
            continue
        t1_target = find_target_with_solutions(cand, 1)
        t2_target = find_target_with_solutions(cand, 2)
        if t1_target is not None and t2_target is not None:
            books = cand
            used_seed = s
            break
    if books is None:
        raise RuntimeError(f"no codebook with t=1 and t=2 targets in "
                           f"{cfg.retry_budget} seeds from {cfg.seed}")

    written = []
    summary_rows = []
    plt = _new_figure()
    fig, axes = plt.subplots(2, 1, figsize=(6.5, 5), sharex=True)
    for idx, (t, target) in enumerate([(1, t1_target), (2, t2_target)]):
        trace, assignments = _decode_trace(target, books, cfg.trace_iterations,
                                           cfg.runs, cfg.seed + t)
        solution_ids = {a: i for i, a in enumerate(assignments)}
        params = {"experiment": "non-unique", "D": cfg.D, "F": cfg.F, "N": cfg.N,
                  "t": t, "codebook_seed": used_seed, "seed": cfg.seed,
                  "runs": cfg.runs,
                  "target_bits": "".join(map(str, bipolar_to_bits(target)))}
        rows = []
        first_correct = None
        modal_solutions_seen = set()
        for rec in trace:
            modal_id = (solution_ids.get(rec["modal"], -1)
                        if rec["modal"] is not None else -1)
            if rec["modal_valid"]:
                modal_solutions_seen.add(modal_id)
                if first_correct is None:
                    first_correct = rec["iteration"]
            rows.append([rec["iteration"],
                         "/".join(map(str, rec["modal"])) if rec["modal"] else "",
                         int(rec["modal_valid"]), modal_id,
                         _fmt(rec["total_success"])])
        csv_path = out_dir / f"non_unique_t{t}.csv"
        _write_csv(csv_path, params,
                   ["iteration", "modal_assignment", "modal_is_valid",
                    "solution_id", "total_success_probability"], rows)
        written.append(csv_path)
        peak = optimal_iterations(cfg.N, cfg.F, t)
        correct_span = [r["iteration"] for r in trace if r["modal_valid"]]
        summary_rows.append([
            t, first_correct if first_correct is not None else -1, peak,
            min(correct_span) if correct_span else -1,
            max(correct_span) if correct_span else -1,
            len(modal_solutions_seen),
            len(assignments),
        ])

        ax = axes[idx]
        ks = [r["iteration"] for r in trace]
        ax.plot(ks, [r["total_success"] for r in trace], "-", lw=1,
                label="exact success prob")
        ax.plot(ks, [1.0 if r["modal_valid"] else 0.0 for r in trace], "o",
                ms=3, label="modal decode correct")
        ax.axvline(peak, color="gray", ls=":", lw=1)
        ax.set_ylabel(f"t={t}")
        ax.legend(fontsize=7, loc="center right")
    axes[1].set_xlabel("iteration")
    fig.tight_layout()
    svg_path = out_dir / "non_unique.svg"
    _save_svg(fig, svg_path)
    plt.close(fig)
    written.append(svg_path)

    summary_path = out_dir / "non_unique_summary.csv"
    _write_csv(summary_path,
               {"experiment": "non-unique", "codebook_seed": used_seed,
                "seed": cfg.seed, "runs": cfg.runs},
               ["t", "first_correct_iteration", "peak_iteration",
                "stable_from", "stable_to", "distinct_modal_solutions",
                "solution_count"], summary_rows)
    written.append(summary_path)
    written.append(_write_manifest(out_dir, "non-unique", asdict(cfg)))
    return written


# --------------------------------------------------------------- table1

@dataclass(frozen=True)
class Table1Config:
    rows: tuple[tuple[int, int, int], ...] = ((100, 3, 10), (100, 4, 10),
                                              (25, 3, 5), (25, 4, 5))
    trials: int = 500
    max_iters: int = 5000
    seed: int = 0
    out_dir: str = "results/table1"


def exp_table1(cfg: Table1Config) -> list[Path]:
    """Resonator statistics per (D, F, N) row next to the quantum step count."""
    out_dir = Path(cfg.out_dir)
    rows = []
    for D, F, N in cfg.rows:
        st = resonator_stats(D=D, F=F, N=N, trials=cfg.trials,
                             max_iters=cfg.max_iters, seed=cfg.seed)
        q = optimal_iterations(N, F, 1)
        rows.append([
            D, F, N, cfg.trials,
            _fmt(st.p_success),
            _fmt(st.mean_iterations) if st.mean_iterations is not None else "",
            _fmt(st.p_nonconverged),
            _fmt(st.effective_steps) if st.effective_steps is not None else "divergent",
            _fmt(st.p_wrong),
            cfg.seed,
            q,
        ])
    params = {"experiment": "table1", "trials": cfg.trials,
              "max_iters": cfg.max_iters, "seed": cfg.seed}
    csv_path = out_dir / "table1.csv"
    _write_csv(csv_path, params,
               ["D", "F", "N", "trials", "P_s", "N_I", "P_f", "N_S", "P_wrong",
                "seed", "quantum_N_S"], rows)
    manifest = _write_manifest(out_dir, "table1", asdict(cfg))
    return [csv_path, manifest]
