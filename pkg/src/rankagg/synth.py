"""Synthetic ranking tasks graded by difficulty.

Mimics the layout of perception experiments in which people order small sets
of items with a known correct order: several difficulty levels, many item
sets per level, a handful of rankings per set.  Each set gets latent means
spaced along the true order and rankings are sampled from a random utility
model whose noise grows with the level.

``"puzzle"`` style spaces the means with gaps that shrink along the true
order, so later comparisons are harder.  ``"dots"`` style uses equal gaps.

Alternatives are identified by their true position, so each level pools
into one :class:`~rankagg.core.Dataset` whose ground-truth ordering is the
identity.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .core import Dataset
from .errors import ValidationError
from .io import parse_soc, write_soc
from .normal_rum import NormalRUMParams, sample_normal_rum
from .plackett_luce import PLParams, sample_pl

DEFAULT_NOISE = (0.5, 1.0, 2.0, 4.0)


@dataclass(frozen=True)
class SynthConfig:
    domain_style: str = "puzzle"
    levels: int = 4
    sets_per_level: int = 40
    rankings_per_set: int = 20
    m: int = 4
    generator: str = "normal"
    noise_scales: tuple[float, ...] = DEFAULT_NOISE
    base_gap: float = 1.0
    shrink: float = 0.75
    gap_jitter: float = 0.05
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "noise_scales", tuple(float(s) for s in self.noise_scales))
        if min(self.levels, self.sets_per_level, self.rankings_per_set) < 1 or self.m < 2:
            raise ValidationError("counts must be >= 1 and m >= 2")
        if self.domain_style not in ("puzzle", "dots"):
            raise ValidationError(f"unknown domain style {self.domain_style!r}")
        if self.generator not in ("normal", "pl"):
            raise ValidationError(f"unknown generator {self.generator!r}")
        if len(self.noise_scales) != self.levels:
            raise ValidationError(f"{len(self.noise_scales)} noise scales for {self.levels} levels")
        if min(self.noise_scales) <= 0 or self.base_gap <= 0 or not 0 < self.shrink <= 1:
            raise ValidationError("noise scales and gaps must be positive, 0 < shrink <= 1")
        if self.gap_jitter < 0:
            raise ValidationError("gap_jitter must be >= 0")

    def gaps(self) -> np.ndarray:
        t = np.arange(self.m - 1, dtype=float)
        if self.domain_style == "puzzle":
            return self.base_gap * self.shrink ** t
        return np.full(self.m - 1, self.base_gap)


@dataclass(frozen=True, eq=False)
class SynthLevel:
    label: str
    noise: float
    data: Dataset
    truth: tuple[int, ...]
    set_means: np.ndarray = field(repr=False)


def synth_generate(cfg: SynthConfig) -> list[SynthLevel]:
    """Generate one pooled dataset per difficulty level (easiest first)."""
    rng = np.random.default_rng(cfg.seed)
    labels = tuple(f"rank{t + 1}" for t in range(cfg.m))
    base = cfg.gaps()
    out = []
    for level, noise in enumerate(cfg.noise_scales):
        blocks, all_means = [], []
        for _ in range(cfg.sets_per_level):
            gaps = base * np.exp(cfg.gap_jitter * rng.standard_normal(cfg.m - 1))
            means = -np.concatenate([[0.0], np.cumsum(gaps)])
            set_seed = int(rng.integers(2**63))
            if cfg.generator == "normal":
                params = NormalRUMParams(means / noise, np.ones(cfg.m))
                orders = sample_normal_rum(params, cfg.rankings_per_set, set_seed)
            else:
                orders = sample_pl(PLParams.from_means(means / noise),
                                   cfg.rankings_per_set, set_seed)
            blocks.append(orders)
            all_means.append(means)
        out.append(SynthLevel(f"level{level + 1}", noise, Dataset(np.vstack(blocks), labels),
                              tuple(range(cfg.m)), np.array(all_means)))
    return out


def write_synth(levels: list[SynthLevel], outdir, cfg: SynthConfig | None = None) -> Path:
    """Write one SOC file per level plus ``manifest.json``."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    entries = []
    for k, lvl in enumerate(levels):
        name = f"{k + 1:02d}_{lvl.label}.soc"
        write_soc(lvl.data, outdir / name, title=f"synthetic {lvl.label}")
        entries.append({"label": lvl.label, "file": name, "noise": lvl.noise,
                        "truth": [lvl.data.labels[j] for j in lvl.truth]})
    manifest = {"levels": entries, "config": asdict(cfg) if cfg else None}
    with open(outdir / "manifest.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return outdir


def read_level_dir(path):
    """Load level-grouped files from a directory.

    Uses ``manifest.json`` when present (label, file, ground truth);
    otherwise every ``*.soc`` / ``*.csv`` file in name order is a level with
    no ground truth.  Returns ``[(label, Dataset, truth_or_None), ...]``.
    """
    from .io import load_dataset
    path = Path(path)
    manifest = path / "manifest.json"
    groups = []
    if manifest.exists():
        doc = json.loads(manifest.read_text(encoding="utf-8"))
        for entry in doc["levels"]:
            data = parse_soc(path / entry["file"]) if entry["file"].endswith(".soc") \
                else load_dataset(path / entry["file"])
            truth = entry.get("truth")
            truth = tuple(data.index_of(lab) for lab in truth) if truth else None
            groups.append((entry["label"], data, truth))
        return groups
    for f in sorted(list(path.glob("*.soc")) + list(path.glob("*.csv"))):
        groups.append((f.stem, load_dataset(f), None))
    return groups
