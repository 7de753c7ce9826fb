"""Connectivity presets and batch VQE benchmarks.

A benchmark compares the plain layered ansatz with the swap-augmented one
over random spin-glass instances (or one Hamiltonian file) and writes one
CSV row per (instance, seed, ansatz variant, resource point), plus a JSON
summary with medians and interquartile ranges.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

from .ansatz import build_cry_hea, build_excitation_ansatz, embed_swap_network
from .circuit import Circuit, metrics
from .graph import ConnectivityGraph, grid_graph, line_graph, load_graph, parse_graph, ring_graph
from .hamiltonian import PauliSum, exact_ground_energy, gen_spin_glass, parse_pauli_file
from .router import AnnealConfig, optimize_network
from .vqe import VqeConfig, run_vqe, summarize

WORKERS_ENV = "SWAPNET_WORKERS"

CSV_COLUMNS = (
    "instance", "seed", "ansatz", "layers", "repetitions",
    "cnot_count", "depth", "n_params",
    "exact_energy", "best_energy", "energy_error", "evaluations", "status",
)

_FILE_PRESETS = {
    "heavyhex-7": "heavyhex-7.graph",
    "square-7": "square-7.graph",
    "fig4-qubits": "fig4-qubits.graph",
    "fig4-orbitals": "fig4-orbitals.graph",
}


class BenchmarkError(ValueError):
    pass


def preset_names() -> list[str]:
    return sorted(_FILE_PRESETS) + ["linear-N", "ring-N", "grid-RxC"]


def preset_text(name: str) -> str:
    return resources.files("swapnet.presets").joinpath(name).read_text(encoding="utf-8")


def fig4_pairs() -> list[tuple[int, int]]:
    """0-based spin-orbital pairs of the 12-qubit coarsening example."""
    pairs = []
    for line in preset_text("fig4-qubits.pairs").splitlines():
        line = line.split("#", 1)[0].split()
        if line:
            pairs.append((int(line[0]) - 1, int(line[1]) - 1))
    return pairs


def resolve_graph(name: str) -> ConnectivityGraph:
    """A graph file path, a shipped preset, or ``linear-N``/``ring-N``/``grid-RxC``."""
    if name in _FILE_PRESETS:
        return parse_graph(preset_text(_FILE_PRESETS[name]))
    if m := re.fullmatch(r"(linear|line|ring)-(\d+)", name):
        n = int(m.group(2))
        return line_graph(n) if m.group(1) != "ring" else ring_graph(n)
    if m := re.fullmatch(r"grid-(\d+)x(\d+)", name):
        return grid_graph(int(m.group(1)), int(m.group(2)))
    path = Path(name)
    if path.is_file():
        return load_graph(path)
    raise BenchmarkError(f"{name!r} is neither a graph file nor a preset ({', '.join(preset_names())})")


@dataclass(frozen=True)
class BenchmarkSpec:
    graph: str
    layers: list[int]
    seeds: list[int]
    output: str
    k: int = 2
    flavor: str = "qubit"
    ansatze: list[str] = field(default_factory=lambda: ["plain", "swapped"])
    repetitions: list[int] = field(default_factory=lambda: [1])
    layers_per_slot: int = 1
    instances: int = 1
    instance_seed: int = 0
    anneal_seed: int = 0
    hamiltonian: str | None = None
    reference: list[int] = field(default_factory=list)
    optimizer: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("layers", "seeds", "ansatze", "repetitions"):
            if not getattr(self, name):
                raise BenchmarkError(f"{name} must be a non-empty list")
        if any(x < 0 for x in self.layers) or any(x < 0 for x in self.repetitions):
            raise BenchmarkError("layers and repetitions must be >= 0")
        if bad := set(self.ansatze) - {"plain", "swapped"}:
            raise BenchmarkError(f"unknown ansatz variants {sorted(bad)}")
        if self.flavor not in ("qubit", "fermionic"):
            raise BenchmarkError(f"unknown flavor {self.flavor!r}")
        if self.instances < 1:
            raise BenchmarkError("instances must be >= 1")
        if self.hamiltonian is not None:
            if not Path(self.hamiltonian).is_file():
                raise BenchmarkError(f"Hamiltonian file {self.hamiltonian!r} not found")
            if self.instances != 1:
                raise BenchmarkError("a Hamiltonian file defines exactly one instance")
        elif self.flavor == "fermionic":
            raise BenchmarkError("fermionic flavor needs a Hamiltonian file")
        resolve_graph(self.graph)
        self.vqe_config(0)

    def vqe_config(self, seed: int) -> VqeConfig:
        try:
            return VqeConfig(seed=seed, **self.optimizer)
        except TypeError as exc:
            raise BenchmarkError(f"bad optimizer settings: {exc}") from None

    @classmethod
    def from_dict(cls, d: dict) -> "BenchmarkSpec":
        try:
            return cls(**d)
        except TypeError as exc:
            raise BenchmarkError(str(exc)) from None

    @classmethod
    def from_file(cls, path: str | Path) -> "BenchmarkSpec":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2) + "\n"


@dataclass(frozen=True)
class Variant:
    ansatz: str
    layers: int  # total entangling layers
    repetitions: int
    circuit: Circuit


def build_variants(spec: BenchmarkSpec, g: ConnectivityGraph) -> list[Variant]:
    fermionic = spec.flavor == "fermionic"
    out = []
    if "plain" in spec.ansatze:
        for L in sorted(set(spec.layers)):
            c = build_excitation_ansatz(g, L, spec.reference) if fermionic else build_cry_hea(g, L)
            out.append(Variant("plain", L, 0, c))
    if "swapped" in spec.ansatze:
        protocol = optimize_network(g, AnnealConfig(k=spec.k, seed=spec.anneal_seed))
        slots = len(protocol.blocks) + 1
        for r in sorted(set(spec.repetitions)):
            c = embed_swap_network(g, protocol, spec.layers_per_slot, r, spec.flavor, spec.reference)
            out.append(Variant("swapped", r * slots * spec.layers_per_slot, r, c))
    return out


def _instances(spec: BenchmarkSpec, n_qubits: int) -> list[PauliSum]:
    if spec.hamiltonian is not None:
        hm = parse_pauli_file(spec.hamiltonian)
        if hm.n_qubits != n_qubits:
            raise BenchmarkError(f"Hamiltonian has {hm.n_qubits} qubits, ansatz {n_qubits}")
        return [hm]
    return [gen_spin_glass(n_qubits, spec.instance_seed + i)[1] for i in range(spec.instances)]


def _job(args) -> dict:
    inst, seed, v, hm, e0, cfg = args
    m = metrics(v.circuit)
    row = {
        "instance": inst, "seed": seed, "ansatz": v.ansatz, "layers": v.layers,
        "repetitions": v.repetitions, "cnot_count": m.cnot_count, "depth": m.depth,
        "n_params": m.n_params, "exact_energy": e0,
    }
    try:
        res = run_vqe(v.circuit, hm, cfg)
        row.update(best_energy=res.best_energy, energy_error=res.best_energy - e0,
                   evaluations=res.iterations_used, status="ok")
    except Exception as exc:  # recorded per row; the batch carries on
        row.update(best_energy=math.nan, energy_error=math.nan, evaluations=0,
                   status=f"error: {type(exc).__name__}: {exc}")
    return row


def _workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise BenchmarkError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None


def run_benchmark(spec: BenchmarkSpec, workers: int | None = None) -> list[dict]:
    g = resolve_graph(spec.graph)
    variants = build_variants(spec, g)
    n_qubits = variants[0].circuit.n_qubits
    hams = _instances(spec, n_qubits)
    exact = [exact_ground_energy(hm) for hm in hams]
    jobs = [
        (i, s, v, hm, exact[i], spec.vqe_config(s))
        for i, hm in enumerate(hams)
        for s in spec.seeds
        for v in variants
    ]
    workers = _workers() if workers is None else workers
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_job, jobs))
    else:
        rows = [_job(j) for j in jobs]
    order = {"plain": 0, "swapped": 1}
    rows.sort(key=lambda r: (r["instance"], r["seed"], order[r["ansatz"]], r["layers"], r["repetitions"]))
    return rows


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def summarize_rows(rows: list[dict]) -> dict:
    """Per-variant error statistics and the matched-CNOT comparison.

    Each swapped variant is paired with the plain variant whose CNOT count
    is the largest one not exceeding it.
    """
    groups: dict[tuple, dict] = {}
    for r in rows:
        key = (r["ansatz"], r["layers"], r["repetitions"])
        grp = groups.setdefault(key, {
            "ansatz": r["ansatz"], "layers": r["layers"], "repetitions": r["repetitions"],
            "cnot_count": r["cnot_count"], "depth": r["depth"], "n_params": r["n_params"],
            "errors": [], "failed": 0,
        })
        if r["status"] == "ok":
            grp["errors"].append(r["energy_error"])
        else:
            grp["failed"] += 1
    variants = []
    for key in sorted(groups, key=lambda k: (k[0], k[1], k[2])):
        grp = groups[key]
        errors = grp.pop("errors")
        variants.append({**grp, **summarize(errors)})

    plain = [v for v in variants if v["ansatz"] == "plain"]
    comparisons = []
    for v in variants:
        if v["ansatz"] != "swapped":
            continue
        fits = [p for p in plain if p["cnot_count"] <= v["cnot_count"]]
        if not fits:
            continue
        p = max(fits, key=lambda p: (p["cnot_count"], p["layers"]))
        comparisons.append({
            "repetitions": v["repetitions"], "swapped_cnot": v["cnot_count"],
            "plain_layers": p["layers"], "plain_cnot": p["cnot_count"],
            "swapped_median": v["median"], "plain_median": p["median"],
            "swapped_better": bool(v["median"] < p["median"]),
        })
    return {"variants": variants, "comparisons": comparisons}


def summary_path(output: str | Path) -> Path:
    output = Path(output)
    return output.with_name(output.stem + ".summary.json")


def cmd_benchmark(spec: BenchmarkSpec, workers: int | None = None) -> tuple[list[dict], dict]:
    """Run ``spec``, write the CSV and its JSON summary, return both."""
    rows = run_benchmark(spec, workers)
    summary = summarize_rows(rows)
    out = Path(spec.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(rows_to_csv(rows), encoding="utf-8")
    summary_path(out).write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return rows, summary
