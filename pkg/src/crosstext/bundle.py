"""On-disk persistence for trained models and alignment artifacts.

A model bundle is a directory holding a UTF-8 key-value manifest plus raw
little-endian float32 array files, each listed in the manifest with a
sha256 checksum (and shape, for arrays). The format is deliberately plain:
every file can be inspected with a text editor or ``np.fromfile``.

Fitted parameters are snapped to the float32 grid before they enter a
bundle (:func:`to_f32_grid`), which makes save -> load an exact round trip
and repeated saves byte-identical. Alignment maps are stored as float64 so
their orthogonality survives persistence.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import CANONICAL_LABELS
from .embeddings import AlignmentMap, EmbeddingTable
from .errors import BundleError
from .features import MinMaxScaler, NgramVocabulary
from .svm import LinearModel

FORMAT_VERSION = "1"

MANIFEST_NAME = "manifest.txt"


def to_f32_grid(a: np.ndarray) -> np.ndarray:
    """Round to the nearest float32 value, kept as float64."""
    return np.asarray(a, dtype=np.float64).astype("<f4").astype(np.float64)


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def write_manifest(path: Path, entries: dict[str, str]) -> None:
    lines = [f"{key} = {entries[key]}\n" for key in sorted(entries)]
    path.write_text("".join(lines), encoding="utf-8")


def read_manifest(path: Path) -> dict[str, str]:
    if not path.is_file():
        raise BundleError(f"missing manifest: {path}")
    entries: dict[str, str] = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise BundleError(f"malformed manifest line: {line!r}")
        entries[key.strip()] = value.strip()
    return entries


class _DirWriter:
    """Collects files for one artifact directory and tracks checksums."""

    def __init__(self, root: Path):
        self.root = root
        self.file_entries: dict[str, str] = {}
        root.mkdir(parents=True, exist_ok=True)

    def put_bytes(self, name: str, data: bytes) -> None:
        (self.root / name).write_bytes(data)
        self.file_entries[f"file.{name}.sha256"] = _sha256(data)

    def put_text(self, name: str, text: str) -> None:
        self.put_bytes(name, text.encode("utf-8"))

    def put_array(self, name: str, arr: np.ndarray, dtype: str = "<f4") -> None:
        arr = np.ascontiguousarray(arr)
        self.put_bytes(name, arr.astype(dtype).tobytes())
        self.file_entries[f"file.{name}.shape"] = ",".join(str(s) for s in arr.shape)
        self.file_entries[f"file.{name}.dtype"] = dtype

    def finish(self, entries: dict[str, str]) -> None:
        write_manifest(self.root / MANIFEST_NAME, {**entries, **self.file_entries})


class _DirReader:
    """Verifies checksums while reading an artifact directory."""

    def __init__(self, root: Path, kind: str):
        self.root = Path(root)
        self.manifest = read_manifest(self.root / MANIFEST_NAME)
        version = self.manifest.get("format_version")
        if version != FORMAT_VERSION:
            raise BundleError(
                f"unsupported format_version {version!r} (supported: {FORMAT_VERSION})"
            )
        if self.manifest.get("kind") != kind:
            raise BundleError(
                f"{self.root} holds a {self.manifest.get('kind')!r} artifact, expected {kind!r}"
            )

    def get_bytes(self, name: str) -> bytes:
        path = self.root / name
        if not path.is_file():
            raise BundleError(f"missing artifact file: {path}")
        data = path.read_bytes()
        expected = self.manifest.get(f"file.{name}.sha256")
        if expected is None:
            raise BundleError(f"file {name} is not listed in the manifest")
        if _sha256(data) != expected:
            raise BundleError(f"checksum mismatch for {name}")
        return data

    def get_text(self, name: str) -> str:
        return self.get_bytes(name).decode("utf-8")

    def get_array(self, name: str) -> np.ndarray:
        data = self.get_bytes(name)
        shape = tuple(
            int(s) for s in self.manifest[f"file.{name}.shape"].split(",") if s
        )
        dtype = self.manifest.get(f"file.{name}.dtype", "<f4")
        return np.frombuffer(data, dtype=dtype).astype(np.float64).reshape(shape)

    def logical_manifest(self) -> dict[str, str]:
        return {
            k: v for k, v in self.manifest.items() if not k.startswith("file.")
        }


@dataclass
class ModelBundle:
    """Everything needed to classify documents in the bundled languages."""

    manifest: dict[str, str]
    vocab: NgramVocabulary
    scaler: MinMaxScaler
    tables: dict[str, EmbeddingTable]
    model: LinearModel


def build_bundle(
    vocab: NgramVocabulary,
    scaler: MinMaxScaler,
    tables: dict[str, EmbeddingTable],
    model: LinearModel,
    meta: dict[str, str],
) -> ModelBundle:
    """Assemble an in-memory bundle, snapping all arrays to the f32 grid."""
    dim = len(scaler.mins_)
    if model.n_features != vocab.size + dim:
        raise BundleError(
            f"feature width mismatch: model expects {model.n_features}, "
            f"vocabulary + embeddings give {vocab.size + dim}"
        )
    scaler_q = MinMaxScaler()
    scaler_q.mins_ = to_f32_grid(scaler.mins_)
    scaler_q.maxs_ = to_f32_grid(scaler.maxs_)
    tables_q = {
        lang: EmbeddingTable(
            language=t.language,
            dim=t.dim,
            vocab=t.vocab,
            matrix=to_f32_grid(t.matrix),
        )
        for lang, t in tables.items()
    }
    model_q = LinearModel(
        classes=model.classes,
        weights=to_f32_grid(model.weights),
        n_features=model.n_features,
        bias_scale=model.bias_scale,
        present=model.present,
    )
    manifest = {
        "format_version": FORMAT_VERSION,
        "kind": "model",
        "creator": "crosstext 0.1.0",
        "classes": ",".join(model.classes),
        "present": ",".join("1" if p else "0" for p in model.present),
        "bias_scale": repr(model.bias_scale),
        "n_sparse": str(vocab.size),
        "dim": str(dim),
        "n_features": str(model.n_features),
        "n_docs": str(vocab.n_docs),
        "n_min": str(vocab.n_min),
        "n_max": str(vocab.n_max),
        "languages": ",".join(sorted(tables)),
        **meta,
    }
    return ModelBundle(
        manifest=manifest,
        vocab=vocab,
        scaler=scaler_q,
        tables=tables_q,
        model=model_q,
    )


def save_model(bundle: ModelBundle, path: str | Path) -> None:
    """Write the bundle directory; identical bundles produce identical bytes."""
    writer = _DirWriter(Path(path))
    writer.put_text(
        "ngrams.tsv",
        "".join(f"{gram}\t{df}\n" for gram, df in bundle.vocab.ordered_entries()),
    )
    writer.put_array("weights.f32", bundle.model.weights)
    writer.put_array("scaler_mins.f32", bundle.scaler.mins_)
    writer.put_array("scaler_maxs.f32", bundle.scaler.maxs_)
    for lang in sorted(bundle.tables):
        table = bundle.tables[lang]
        writer.put_text(f"vocab_{lang}.txt", "".join(w + "\n" for w in table.vocab))
        writer.put_array(f"vectors_{lang}.f32", table.matrix)
    writer.finish(bundle.manifest)


def load_model(path: str | Path) -> ModelBundle:
    """Load and checksum-verify a bundle directory."""
    reader = _DirReader(Path(path), kind="model")
    manifest = reader.logical_manifest()

    entries: dict[str, tuple[int, int]] = {}
    for column, line in enumerate(reader.get_text("ngrams.tsv").splitlines()):
        gram, sep, df = line.partition("\t")
        if not sep:
            raise BundleError(f"malformed ngrams.tsv line {column + 1}")
        entries[gram] = (column, int(df))
    vocab = NgramVocabulary(
        n_min=int(manifest["n_min"]),
        n_max=int(manifest["n_max"]),
        entries=entries,
        n_docs=int(manifest["n_docs"]),
    )

    scaler = MinMaxScaler()
    scaler.mins_ = reader.get_array("scaler_mins.f32")
    scaler.maxs_ = reader.get_array("scaler_maxs.f32")

    tables: dict[str, EmbeddingTable] = {}
    dim = int(manifest["dim"])
    for lang in manifest["languages"].split(","):
        words = tuple(reader.get_text(f"vocab_{lang}.txt").splitlines())
        matrix = reader.get_array(f"vectors_{lang}.f32")
        if matrix.shape != (len(words), dim):
            raise BundleError(
                f"vectors_{lang}.f32 has shape {matrix.shape}, "
                f"expected ({len(words)}, {dim})"
            )
        tables[lang] = EmbeddingTable(
            language=lang, dim=dim, vocab=words, matrix=matrix
        )

    classes = tuple(manifest["classes"].split(","))
    if classes != CANONICAL_LABELS:
        raise BundleError(f"unexpected class list {classes!r}")
    n_features = int(manifest["n_features"])
    if n_features != vocab.size + dim:
        raise BundleError("manifest feature width does not match vocabulary + dim")
    model = LinearModel(
        classes=classes,
        weights=reader.get_array("weights.f32"),
        n_features=n_features,
        bias_scale=float(manifest["bias_scale"]),
        present=tuple(p == "1" for p in manifest["present"].split(",")),
    )
    return ModelBundle(
        manifest=manifest, vocab=vocab, scaler=scaler, tables=tables, model=model
    )


def save_alignment(
    tables: dict[str, EmbeddingTable],
    maps: dict[str, AlignmentMap],
    pivot: str,
    path: str | Path,
) -> None:
    """Write aligned tables (float32) and alignment maps (float64)."""
    writer = _DirWriter(Path(path))
    dims = {t.dim for t in tables.values()}
    for lang in sorted(tables):
        table = tables[lang]
        writer.put_text(f"vocab_{lang}.txt", "".join(w + "\n" for w in table.vocab))
        writer.put_array(f"vectors_{lang}.f32", table.matrix)
        writer.put_array(f"map_{lang}.f64", maps[lang].W, dtype="<f8")
    entries = {
        "format_version": FORMAT_VERSION,
        "kind": "alignment",
        "creator": "crosstext 0.1.0",
        "pivot": pivot,
        "languages": ",".join(sorted(tables)),
        "dim": str(dims.pop()) if len(dims) == 1 else "mixed",
    }
    for lang in sorted(maps):
        entries[f"pairs.{lang}"] = str(maps[lang].n_pairs)
    writer.finish(entries)


def load_alignment(
    path: str | Path,
) -> tuple[dict[str, EmbeddingTable], dict[str, AlignmentMap]]:
    reader = _DirReader(Path(path), kind="alignment")
    manifest = reader.manifest
    pivot = manifest["pivot"]
    dim = int(manifest["dim"])
    tables: dict[str, EmbeddingTable] = {}
    maps: dict[str, AlignmentMap] = {}
    for lang in manifest["languages"].split(","):
        words = tuple(reader.get_text(f"vocab_{lang}.txt").splitlines())
        matrix = reader.get_array(f"vectors_{lang}.f32")
        tables[lang] = EmbeddingTable(
            language=lang, dim=dim, vocab=words, matrix=matrix
        )
        maps[lang] = AlignmentMap(
            source_language=lang,
            pivot_language=pivot,
            W=reader.get_array(f"map_{lang}.f64"),
            n_pairs=int(manifest.get(f"pairs.{lang}", "0")),
        )
    return tables, maps
