"""Datasets, parcellations, synthetic generation, and report files.

File conventions:
  - dataset manifest: JSON {"features": path, "labels": path, "n": int,
    "d": int}; relative paths resolve against the manifest's directory.
  - features: header-free CSV, one sample per row, d columns.
  - labels: one +1 or -1 per line.
  - parcellation: CSV with header feature_index,roi_id,roi_name, one row
    per feature, covering 0..D-1 exactly once.
  - reports: JSON ({"config": ..., "regions": [...]}) or CSV with a fixed
    column order and a leading "# config: ..." comment line.

All writers emit deterministic bytes: rewriting the same object produces
an identical file.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError, ParameterError, ShapeError
from .inference import RoiAnalysis, SamReport

REPORT_COLUMNS = (
    "roi_id",
    "roi_name",
    "n",
    "k",
    "empirical_accuracy",
    "delta_n",
    "worst_case_accuracy",
    "z",
    "p_value",
    "significant",
)

_ATLAS_HEADER = ("feature_index", "roi_id", "roi_name")


@dataclass(frozen=True)
class LabeledDataset:
    """Feature matrix (n x D) with labels in {-1, +1}.

    Constructing the carrier is cheap and unchecked; everything that flows
    in through loaders, generators, or the pipeline entry is validated.
    """

    features: np.ndarray
    labels: np.ndarray
    subject_ids: tuple[str, ...] | None = None

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def validate(self) -> "LabeledDataset":
        if self.features.ndim != 2:
            raise ShapeError("features must be a 2-D array")
        n = self.features.shape[0]
        if n < 2:
            raise DataError(f"need at least 2 samples, got {n}")
        if self.labels.shape != (n,):
            raise ShapeError(
                f"labels must have shape ({n},), got {self.labels.shape}"
            )
        if not np.all(np.isfinite(self.features)):
            raise DataError("features contain non-finite values")
        if not np.all(np.isin(self.labels, (-1, 1))):
            raise DataError("labels must be -1 or +1")
        if np.unique(self.labels).size < 2:
            raise DataError("both classes must be present")
        if self.subject_ids is not None and len(self.subject_ids) != n:
            raise ShapeError("subject_ids length must match the sample count")
        return self


@dataclass(frozen=True)
class Parcellation:
    """Partition of feature indices into named regions."""

    roi_of_feature: np.ndarray
    roi_names: dict[int, str]

    def __post_init__(self) -> None:
        ids = set(int(r) for r in np.unique(self.roi_of_feature))
        if not ids:
            raise DataError("parcellation must cover at least one feature")
        missing = ids - set(self.roi_names)
        if missing:
            raise DataError(f"regions without names: {sorted(missing)}")

    @property
    def d(self) -> int:
        return self.roi_of_feature.shape[0]

    @property
    def l(self) -> int:
        return int(np.unique(self.roi_of_feature).size)

    @property
    def roi_ids(self) -> tuple[int, ...]:
        return tuple(int(r) for r in np.unique(self.roi_of_feature))

    def feature_indices(self, roi_id: int) -> np.ndarray:
        return np.flatnonzero(self.roi_of_feature == roi_id)


@dataclass(frozen=True)
class SynthConfig:
    """Recipe for a balanced two-class Gaussian dataset with planted effects.

    Features are iid N(0, noise_sd^2); features inside effect regions get a
    +effect_size * noise_sd mean shift for the positive class. One 64-bit
    seed determines everything.
    """

    n: int
    rois: int
    voxels_per_roi: int
    effect_rois: tuple[int, ...] = field(default_factory=tuple)
    effect_size: float = 0.0
    noise_sd: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n < 2 or self.n % 2 != 0:
            raise ParameterError(
                f"n must be even and >= 2 for balanced classes, got {self.n}"
            )
        if self.rois < 1:
            raise ParameterError(f"rois must be >= 1, got {self.rois}")
        if self.voxels_per_roi < 1:
            raise ParameterError(
                f"voxels_per_roi must be >= 1, got {self.voxels_per_roi}"
            )
        bad = [r for r in self.effect_rois if not 0 <= r < self.rois]
        if bad:
            raise ParameterError(f"effect_rois outside [0, {self.rois}): {bad}")
        if self.effect_size < 0.0:
            raise ParameterError(f"effect_size must be >= 0, got {self.effect_size}")
        if self.noise_sd <= 0.0:
            raise ParameterError(f"noise_sd must be > 0, got {self.noise_sd}")


def synth_generate(
    config: SynthConfig,
) -> tuple[LabeledDataset, Parcellation, frozenset[int]]:
    """Draw the dataset a SynthConfig describes; pure function of the seed."""
    n, rois, vpr = config.n, config.rois, config.voxels_per_roi
    d = rois * vpr
    rng = np.random.default_rng(np.random.SeedSequence(entropy=config.seed))

    labels = np.concatenate([np.ones(n // 2, dtype=np.int64), -np.ones(n // 2, dtype=np.int64)])
    features = rng.normal(0.0, config.noise_sd, size=(n, d))
    shift = config.effect_size * config.noise_sd
    roi_of_feature = np.repeat(np.arange(rois), vpr)
    for roi in config.effect_rois:
        cols = np.flatnonzero(roi_of_feature == roi)
        features[np.ix_(np.arange(n // 2), cols)] += shift

    parcellation = Parcellation(
        roi_of_feature, {r: f"roi_{r:03d}" for r in range(rois)}
    )
    dataset = LabeledDataset(features, labels).validate()
    return dataset, parcellation, frozenset(config.effect_rois)


def _read_manifest(manifest_path: Path) -> dict:
    try:
        text = manifest_path.read_text()
    except FileNotFoundError:
        raise DataError(f"manifest not found: {manifest_path}") from None
    try:
        manifest = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataError(f"manifest is not valid JSON: {exc}") from None
    for key in ("features", "labels", "n", "d"):
        if key not in manifest:
            raise DataError(f"manifest missing key {key!r}")
    return manifest


def _parse_features(path: Path, n: int, d: int) -> np.ndarray:
    try:
        handle = path.open(newline="")
    except FileNotFoundError:
        raise DataError(f"features file not found: {path}") from None
    out = np.empty((n, d))
    with handle:
        row_count = 0
        for row_idx, row in enumerate(csv.reader(handle), start=1):
            if not row:
                continue
            if row_count >= n:
                row_count += 1
                continue
            if len(row) != d:
                raise DataError(
                    f"features row {row_idx}: expected {d} columns, found {len(row)}"
                )
            for col_idx, token in enumerate(row, start=1):
                try:
                    value = float(token)
                except ValueError:
                    raise DataError(
                        f"features row {row_idx}, column {col_idx}: "
                        f"could not parse {token!r} as a number"
                    ) from None
                if not math.isfinite(value):
                    raise DataError(
                        f"features row {row_idx}, column {col_idx}: non-finite value"
                    )
                out[row_count, col_idx - 1] = value
            row_count += 1
    if row_count != n:
        raise DataError(f"features: expected {n} rows, found {row_count}")
    return out


def _parse_labels(path: Path, n: int) -> np.ndarray:
    try:
        lines = path.read_text().splitlines()
    except FileNotFoundError:
        raise DataError(f"labels file not found: {path}") from None
    values = []
    for line_idx, line in enumerate(lines, start=1):
        token = line.strip()
        if not token:
            continue
        try:
            value = int(token)
        except ValueError:
            raise DataError(
                f"labels line {line_idx}: expected +1 or -1, found {token!r}"
            ) from None
        if value not in (-1, 1):
            raise DataError(
                f"labels line {line_idx}: expected +1 or -1, found {token!r}"
            )
        values.append(value)
    if len(values) != n:
        raise DataError(f"labels: expected {n} rows, found {len(values)}")
    return np.array(values, dtype=np.int64)


def load_dataset(manifest_path: str | Path) -> LabeledDataset:
    """Load a dataset from a manifest; every error names its coordinates."""
    manifest_path = Path(manifest_path)
    manifest = _read_manifest(manifest_path)
    n, d = manifest["n"], manifest["d"]
    if not (isinstance(n, int) and isinstance(d, int) and n >= 2 and d >= 1):
        raise DataError("manifest n and d must be integers with n >= 2, d >= 1")
    base = manifest_path.parent
    features = _parse_features(base / manifest["features"], n, d)
    labels = _parse_labels(base / manifest["labels"], n)
    return LabeledDataset(features, labels).validate()


def load_parcellation(path: str | Path) -> Parcellation:
    """Load a feature-to-region map, checking it partitions 0..D-1."""
    path = Path(path)
    try:
        handle = path.open(newline="")
    except FileNotFoundError:
        raise DataError(f"parcellation file not found: {path}") from None
    with handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError("parcellation file is empty") from None
        if tuple(h.strip() for h in header) != _ATLAS_HEADER:
            raise DataError(
                f"parcellation header must be {','.join(_ATLAS_HEADER)}, "
                f"got {','.join(header)}"
            )
        seen: dict[int, int] = {}
        names: dict[int, str] = {}
        for row_idx, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise DataError(
                    f"parcellation row {row_idx}: expected 3 columns, found {len(row)}"
                )
            try:
                feature = int(row[0])
                roi = int(row[1])
            except ValueError:
                raise DataError(
                    f"parcellation row {row_idx}: indices must be integers"
                ) from None
            if feature in seen:
                raise DataError(
                    f"parcellation row {row_idx}: duplicate feature index {feature}"
                )
            name = row[2].strip()
            if roi in names and names[roi] != name:
                raise DataError(
                    f"parcellation row {row_idx}: region {roi} renamed "
                    f"{names[roi]!r} -> {name!r}"
                )
            seen[feature] = roi
            names[roi] = name
    d = len(seen)
    missing = [i for i in range(d) if i not in seen]
    if missing:
        raise DataError(f"parcellation missing feature indices: {missing[:10]}")
    roi_of_feature = np.array([seen[i] for i in range(d)], dtype=np.int64)
    return Parcellation(roi_of_feature, names)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def write_dataset(
    dataset: LabeledDataset, parcellation: Parcellation, out_dir: str | Path
) -> Path:
    """Write features.csv, labels.csv, atlas.csv and manifest.json.

    Returns the manifest path; load_dataset(manifest) round-trips the
    dataset exactly (floats rendered with 17 significant digits).
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if dataset.d != parcellation.d:
        raise ShapeError(
            f"dataset has {dataset.d} features, parcellation covers {parcellation.d}"
        )

    rows = "\n".join(
        ",".join(_fmt(v) for v in row) for row in dataset.features
    )
    (out / "features.csv").write_text(rows + "\n")
    (out / "labels.csv").write_text(
        "\n".join("+1" if v == 1 else "-1" for v in dataset.labels) + "\n"
    )
    atlas_rows = [",".join(_ATLAS_HEADER)]
    for i, roi in enumerate(parcellation.roi_of_feature):
        atlas_rows.append(f"{i},{int(roi)},{parcellation.roi_names[int(roi)]}")
    (out / "atlas.csv").write_text("\n".join(atlas_rows) + "\n")

    manifest = {
        "features": "features.csv",
        "labels": "labels.csv",
        "n": dataset.n,
        "d": dataset.d,
    }
    manifest_path = out / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    return manifest_path


def write_report(report: SamReport, path: str | Path, format: str = "json") -> Path:
    """Serialize a report to JSON or CSV with deterministic bytes."""
    path = Path(path)
    if format == "json":
        path.write_text(json.dumps(report.as_dict(), sort_keys=True, indent=2) + "\n")
        return path
    if format != "csv":
        raise ParameterError(f"format must be json or csv, got {format!r}")

    lines = ["# config: " + json.dumps(report.config, sort_keys=True)]
    lines.append(",".join(REPORT_COLUMNS))
    for roi in report.regions:
        record = roi.as_dict()
        lines.append(",".join(_fmt(record[col]) for col in REPORT_COLUMNS))
    path.write_text("\n".join(lines) + "\n")
    return path


def load_report(path: str | Path) -> SamReport:
    """Read back a JSON report written by write_report."""
    payload = json.loads(Path(path).read_text())
    regions = tuple(RoiAnalysis(**record) for record in payload["regions"])
    return SamReport(regions, payload["config"])
