"""Command-line front end: align, train, predict, evaluate, matrix, inspect.

Exit codes: 0 success, 1 usage error, 2 data/format error, 3 numeric error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .bundle import (
    ModelBundle,
    build_bundle,
    load_alignment,
    load_model,
    save_alignment,
    save_model,
    to_f32_grid,
)
from .config import PipelineConfig, load_config, parse_override_args
from .corpus import (
    CANONICAL_LABELS,
    LabeledDoc,
    normalize_label,
    parse_dataset,
)
from .embeddings import (
    EmbeddingTable,
    align_all,
    build_pseudo_dictionary,
    load_embeddings,
    normalize_rows,
)
from .errors import (
    EXIT_DATA,
    EXIT_NUMERIC,
    EXIT_OK,
    EXIT_USAGE,
    DataError,
    NumericError,
    UsageError,
)
from .features import featurize
from .metrics import (
    MetricsReport,
    PredictionSet,
    compute_report,
    format_report,
    macro_average,
    report_to_dict,
)
from .pipeline import MultilingualClassifier
from .svm import predict as predict_label

VERSION = "crosstext 0.1.0"


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # exit 1 instead of argparse's default 2
        raise UsageError(message)


def _quantize_table(table: EmbeddingTable) -> EmbeddingTable:
    return EmbeddingTable(
        language=table.language,
        dim=table.dim,
        vocab=table.vocab,
        matrix=to_f32_grid(table.matrix),
        dropped_duplicates=table.dropped_duplicates,
    )


def _monolingual_table(cfg: PipelineConfig, language: str) -> EmbeddingTable:
    return _quantize_table(
        normalize_rows(load_embeddings(cfg.embeddings[language], language))
    )


def _load_training_docs(
    cfg: PipelineConfig, languages: list[str], with_dev: bool
) -> list[LabeledDoc]:
    docs: list[LabeledDoc] = []
    for lang in languages:
        docs.extend(parse_dataset(cfg.dataset_path(lang, "train"), lang).docs)
        if with_dev:
            dev = cfg.dataset_path(lang, "dev")
            if dev is None:
                raise DataError(f"--with-dev requested but data.{lang}.dev is not set")
            docs.extend(parse_dataset(dev, lang).docs)
    return docs


def _fit_classifier(
    cfg: PipelineConfig,
    docs: list[LabeledDoc],
    tables: dict[str, EmbeddingTable],
) -> MultilingualClassifier:
    clf = MultilingualClassifier(
        n_min=cfg.n_min,
        n_max=cfg.n_max,
        min_df=cfg.min_df,
        C=cfg.C,
        tol=cfg.tol,
        max_epochs=cfg.max_epochs,
        seed=cfg.seed,
        bias_scale=cfg.bias_scale,
    )
    return clf.fit(docs, tables=tables)


def _bundle_from(
    cfg: PipelineConfig,
    clf: MultilingualClassifier,
    tables: dict[str, EmbeddingTable],
    mode: str,
    train_languages: list[str],
    with_dev: bool,
) -> ModelBundle:
    meta = {
        "mode": mode,
        "train_languages": ",".join(train_languages),
        "with_dev": "1" if with_dev else "0",
        "pivot": cfg.pivot,
        "min_df": str(cfg.min_df),
        "C": repr(cfg.C),
        "tol": repr(cfg.tol),
        "max_epochs": str(cfg.max_epochs),
        "seed": str(cfg.seed),
    }
    return build_bundle(
        clf.vectorizer_.vocabulary_, clf.scaler_, tables, clf.svm_.model_, meta
    )


def _predict_split(bundle: ModelBundle, docs: list[LabeledDoc], language: str):
    """Predict every doc; returns (id, label) pairs and OOV counters."""
    if language not in bundle.tables:
        raise UsageError(
            f"bundle has no embedding table for {language!r} "
            f"(have: {', '.join(sorted(bundle.tables))})"
        )
    table = bundle.tables[language]
    pairs = []
    oov = tokens = 0
    for doc in docs:
        fv = featurize(doc, bundle.vocab, table, bundle.scaler)
        pairs.append((doc.id, predict_label(bundle.model, fv)))
        oov += fv.oov_count
        tokens += len(doc.tokens)
    return pairs, oov, tokens


# --- commands ---------------------------------------------------------------


def cmd_align(args, overrides) -> int:
    cfg = load_config(args.config, overrides)
    raw = {
        lang: normalize_rows(load_embeddings(cfg.embeddings[lang], lang))
        for lang in cfg.languages
    }
    aligned, maps = align_all(raw, cfg.pivot, cap=cfg.dictionary_cap)
    aligned = {lang: _quantize_table(t) for lang, t in aligned.items()}
    save_alignment(aligned, maps, cfg.pivot, args.out)
    for lang in cfg.languages:
        if lang == cfg.pivot:
            print(f"{lang}: pivot (identity map), {len(aligned[lang])} words")
            continue
        pairs = build_pseudo_dictionary(
            raw[lang], raw[cfg.pivot], cap=cfg.dictionary_cap
        ).pairs
        src = aligned[lang].matrix
        piv = aligned[cfg.pivot].matrix
        cosines = [
            float(
                src[i]
                @ piv[j]
                / max(np.linalg.norm(src[i]) * np.linalg.norm(piv[j]), 1e-30)
            )
            for i, j in pairs
        ]
        print(
            f"{lang}: {len(pairs)} pseudo-dictionary pairs, "
            f"mean cosine to pivot {sum(cosines) / len(cosines):.4f}"
        )
    print(f"wrote alignment artifacts to {args.out}")
    return EXIT_OK


def cmd_train(args, overrides) -> int:
    cfg = load_config(args.config, overrides)
    if args.train_languages:
        train_langs = [v for v in args.train_languages.split(",") if v]
    else:
        train_langs = list(cfg.languages)
    for lang in train_langs:
        if lang not in cfg.languages:
            raise UsageError(f"train language {lang!r} is not in the config")

    if args.mode == "monolingual":
        if len(train_langs) != 1:
            raise UsageError("monolingual mode takes exactly one train language")
        lang = train_langs[0]
        tables = {lang: _monolingual_table(cfg, lang)}
    else:
        alignment_dir = Path(args.alignment)
        if not (alignment_dir / "manifest.txt").is_file():
            raise DataError(
                f"alignment artifacts not found in {alignment_dir}; "
                "run 'crosstext align' first"
            )
        art_tables, _ = load_alignment(alignment_dir)
        missing = [lang for lang in train_langs if lang not in art_tables]
        if missing:
            raise DataError(
                f"alignment artifacts lack languages: {', '.join(missing)}; "
                "re-run 'crosstext align' with them configured"
            )
        tables = {lang: art_tables[lang] for lang in train_langs}

    docs = _load_training_docs(cfg, train_langs, args.with_dev)
    clf = _fit_classifier(cfg, docs, tables)
    bundle = _bundle_from(cfg, clf, tables, args.mode, train_langs, args.with_dev)
    save_model(bundle, args.out)
    present = [c for c, p in zip(bundle.model.classes, bundle.model.present) if p]
    print(
        f"trained {args.mode} model on {len(docs)} documents "
        f"({', '.join(train_langs)}); vocabulary {bundle.vocab.size} n-grams, "
        f"feature width {bundle.model.n_features}, classes: {', '.join(present)}"
    )
    print(f"wrote model bundle to {args.out}")
    return EXIT_OK


def cmd_predict(args, overrides) -> int:
    bundle = load_model(args.bundle)
    split = parse_dataset(args.input, args.language)
    pairs, oov, tokens = _predict_split(bundle, split.docs, args.language)
    out = Path(args.out)
    out.write_text("".join(f"{i}\t{label}\n" for i, label in pairs), encoding="utf-8")
    rate = oov / tokens if tokens else 0.0
    print(
        f"wrote {len(pairs)} predictions to {out}; "
        f"OOV rate {100.0 * rate:.2f}% ({oov}/{tokens} tokens)"
    )
    return EXIT_OK


def _read_gold(path: Path) -> list[tuple[str, str]]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise DataError(
                    f"{path.name} line {lineno}: gold records need id, text and label"
                )
            records.append((fields[0], normalize_label(fields[2].split(","))))
    return records


def _read_predictions(path: Path) -> list[tuple[str, str]]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise DataError(
                    f"{path.name} line {lineno}: expected 'id<TAB>label'"
                )
            if fields[1] not in CANONICAL_LABELS:
                raise DataError(
                    f"{path.name} line {lineno}: unknown label {fields[1]!r}"
                )
            records.append((fields[0], fields[1]))
    return records


def cmd_evaluate(args, overrides) -> int:
    gold = _read_gold(Path(args.gold))
    preds = _read_predictions(Path(args.pred))
    if len(gold) != len(preds):
        raise DataError(
            f"count mismatch: {len(gold)} gold records vs {len(preds)} predictions"
        )
    for i, ((gid, _), (pid, _)) in enumerate(zip(gold, preds), start=1):
        if gid != pid:
            raise DataError(
                f"id mismatch at record {i}: gold {gid!r} vs prediction {pid!r}"
            )
    pairs = [(g, p) for (_, g), (_, p) in zip(gold, preds)]
    report = compute_report(PredictionSet(pairs=pairs, language=args.language or ""))
    print(format_report(report))
    if args.json_out:
        Path(args.json_out).write_text(
            json.dumps(report_to_dict(report), indent=2, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )
        print(f"wrote metrics to {args.json_out}")
    return EXIT_OK


def _evaluate_docs(
    bundle: ModelBundle, docs: list[LabeledDoc], language: str
) -> MetricsReport:
    for doc in docs:
        if doc.label is None:
            raise DataError(f"document {doc.id!r} in {language} test data is unlabeled")
    pairs, _, _ = _predict_split(bundle, docs, language)
    gold_pred = [(doc.label, label) for doc, (_, label) in zip(docs, pairs)]
    return compute_report(PredictionSet(pairs=gold_pred, language=language))


def cmd_matrix(args, overrides) -> int:
    cfg = load_config(args.config, overrides)
    raw = {
        lang: normalize_rows(load_embeddings(cfg.embeddings[lang], lang))
        for lang in cfg.languages
    }
    aligned, _ = align_all(raw, cfg.pivot, cap=cfg.dictionary_cap)
    aligned = {lang: _quantize_table(t) for lang, t in aligned.items()}

    tests: dict[str, list[LabeledDoc]] = {}
    for lang in cfg.languages:
        path = cfg.dataset_path(lang, "test")
        if path is None:
            raise DataError(f"data.{lang}.test is required for the experiment matrix")
        tests[lang] = parse_dataset(path, lang).docs

    grid: dict[str, dict[str, MetricsReport]] = {}

    mono_bundles: dict[str, ModelBundle] = {}
    row: dict[str, MetricsReport] = {}
    for lang in cfg.languages:
        tables = {lang: _monolingual_table(cfg, lang)}
        docs = _load_training_docs(cfg, [lang], args.with_dev)
        clf = _fit_classifier(cfg, docs, tables)
        mono_bundles[lang] = _bundle_from(
            cfg, clf, tables, "monolingual", [lang], args.with_dev
        )
        row[lang] = _evaluate_docs(mono_bundles[lang], tests[lang], lang)
    grid["monolingual"] = row

    docs = _load_training_docs(cfg, cfg.languages, args.with_dev)
    clf = _fit_classifier(cfg, docs, aligned)
    multi_bundle = _bundle_from(
        cfg, clf, aligned, "multilingual", cfg.languages, args.with_dev
    )
    grid["multilingual"] = {
        lang: _evaluate_docs(multi_bundle, tests[lang], lang)
        for lang in cfg.languages
    }

    if cfg.translations:
        pivot_bundle = mono_bundles[cfg.pivot]
        row = {}
        for lang, path in cfg.translations.items():
            if not Path(path).is_file():
                print(f"warning: skipping missing translation file {path}", file=sys.stderr)
                continue
            docs = parse_dataset(path, cfg.pivot).docs
            row[lang] = _evaluate_docs(pivot_bundle, docs, cfg.pivot)
        if row:
            grid["translated"] = row

    _print_grid(grid, cfg.languages)
    if args.json_out:
        payload = {
            "metric": "weighted_f1",
            "languages": cfg.languages,
            "rows": {
                name: {lang: report.weighted_f1 for lang, report in row.items()}
                for name, row in grid.items()
            },
        }
        Path(args.json_out).write_text(
            json.dumps(payload, indent=2) + "\n", encoding="utf-8"
        )
        print(f"wrote matrix to {args.json_out}")
    return EXIT_OK


def _print_grid(grid: dict[str, dict[str, MetricsReport]], languages: list[str]) -> None:
    header = f"{'model':<14}" + "".join(f"{lang:>8}" for lang in languages) + f"{'avg':>8}"
    print(header)
    for name, row in grid.items():
        cells = []
        for lang in languages:
            if lang in row:
                cells.append(f"{100.0 * row[lang].weighted_f1:8.2f}")
            else:
                cells.append(f"{'--':>8}")
        if all(lang in row for lang in languages):
            avg = macro_average([row[lang] for lang in languages])
            cells.append(f"{100.0 * avg.weighted_f1:8.2f}")
        else:
            cells.append(f"{'--':>8}")
        print(f"{name:<14}" + "".join(cells))


def cmd_inspect(args, overrides) -> int:
    bundle = load_model(args.bundle)
    print(f"model bundle at {args.bundle}")
    for key in sorted(bundle.manifest):
        print(f"  {key} = {bundle.manifest[key]}")
    for lang in sorted(bundle.tables):
        table = bundle.tables[lang]
        print(f"  table.{lang}: {len(table)} words, dim {table.dim}")
    return EXIT_OK


# --- entry point -------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="crosstext", description=__doc__)
    parser.add_argument("--version", action="version", version=VERSION)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("align", help="align embedding spaces onto the pivot")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default="alignment")
    p.set_defaults(func=cmd_align, allow_overrides=True)

    p = sub.add_parser("train", help="train a model bundle")
    p.add_argument("--config", required=True)
    p.add_argument("--mode", choices=["monolingual", "multilingual"], required=True)
    p.add_argument("--train-languages", default="")
    p.add_argument("--with-dev", action="store_true")
    p.add_argument("--alignment", default="alignment")
    p.add_argument("--out", default="model")
    p.set_defaults(func=cmd_train, allow_overrides=True)

    p = sub.add_parser("predict", help="classify a dataset file")
    p.add_argument("--bundle", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--language", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict, allow_overrides=False)

    p = sub.add_parser("evaluate", help="score predictions against gold labels")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--language", default="")
    p.add_argument("--json-out", default="")
    p.set_defaults(func=cmd_evaluate, allow_overrides=False)

    p = sub.add_parser("matrix", help="run the full experiment grid")
    p.add_argument("--config", required=True)
    p.add_argument("--with-dev", action="store_true")
    p.add_argument("--json-out", default="")
    p.set_defaults(func=cmd_matrix, allow_overrides=True)

    p = sub.add_parser("inspect", help="print a bundle's manifest")
    p.add_argument("--bundle", required=True)
    p.set_defaults(func=cmd_inspect, allow_overrides=False)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args, extras = parser.parse_known_args(argv)
        if extras and not args.allow_overrides:
            raise UsageError(f"unrecognized arguments: {' '.join(extras)}")
        overrides = parse_override_args(extras) if extras else {}
        return args.func(args, overrides)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
