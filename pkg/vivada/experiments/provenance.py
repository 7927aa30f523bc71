from pathlib import Path
from typing import Any, Mapping

from vivada.corpus.dataset import DOCUMENTS_FILE, EDGES_FILE, SEEDS_FILE, SPLITS_FILE
from vivada.experiments.spec import ExperimentSpec
from vivada.util import artifact_version, fingerprint_file

DATASET_FILES = (DOCUMENTS_FILE, EDGES_FILE, SEEDS_FILE, SPLITS_FILE)


def fingerprints(datasets: Mapping[str, str]) -> dict[str, str]:
    """SHA-256 of every input file, keyed `role` or `role/filename` for dataset directories."""
    out = {}
    for role, path in sorted(datasets.items()):
        path = Path(path)
        if path.is_dir():
            for name in DATASET_FILES:
                if (path / name).exists():
                    out[f"{role}/{name}"] = fingerprint_file(path / name)
        else:
            out[role] = fingerprint_file(path)
    return out


def provenance(spec: ExperimentSpec, threshold_modes: Mapping[str, str]) -> dict[str, Any]:
    return {
        "artifact_version": artifact_version(),
        "seed": spec.seed,
        "config_hash": spec.config_hash(),
        "datasets": fingerprints(spec.datasets),
        "bootstrap_workers": spec.bootstrap_config().workers,
        "parallel_models": spec.parallel_models,
        "threshold_mode": dict(sorted(threshold_modes.items())),
    }
