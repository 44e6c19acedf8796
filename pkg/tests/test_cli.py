from __future__ import annotations

import json
import re

import pytest

from crosstext.cli import main

from synthetic import write_dataset_file


@pytest.fixture(scope="module")
def workdir(toy_tree, tmp_path_factory):
    """Toy data tree plus an output scratch area with alignment + bundles."""
    root, config = toy_tree
    out = tmp_path_factory.mktemp("cli_out")
    assert main(["align", "--config", str(config), "--out", str(out / "alignment")]) == 0
    assert (
        main(
            [
                "train",
                "--config",
                str(config),
                "--mode",
                "multilingual",
                "--alignment",
                str(out / "alignment"),
                "--out",
                str(out / "multi"),
            ]
        )
        == 0
    )
    assert (
        main(
            [
                "train",
                "--config",
                str(config),
                "--mode",
                "monolingual",
                "--train-languages",
                "en",
                "--out",
                str(out / "mono_en"),
            ]
        )
        == 0
    )
    return root, config, out


class TestAlign:
    def test_reports_dictionary_and_cosine(self, toy_tree, tmp_path, capsys):
        _, config = toy_tree
        assert main(["align", "--config", str(config), "--out", str(tmp_path / "a")]) == 0
        out = capsys.readouterr().out
        assert "pivot (identity map)" in out
        match = re.search(r"es: (\d+) pseudo-dictionary pairs, mean cosine to pivot ([0-9.]+)", out)
        assert match, out
        assert int(match.group(1)) >= 20  # the shared anchors
        assert float(match.group(2)) > 0.999

    def test_single_language_config(self, toy_tree, tmp_path, capsys):
        root, _ = toy_tree
        config = tmp_path / "solo.conf"
        config.write_text(
            "languages = en\npivot = en\n"
            f"embeddings.en = {root / 'emb_en.txt'}\n"
            f"data.en.train = {root / 'en.train.tsv'}\n",
            encoding="utf-8",
        )
        assert main(["align", "--config", str(config), "--out", str(tmp_path / "a")]) == 0
        out = capsys.readouterr().out
        assert "pivot (identity map)" in out
        assert "pseudo-dictionary" not in out

    def test_insufficient_dictionary_names_language(self, toy_tree, tmp_path, capsys):
        root, _ = toy_tree
        # an es table sharing no word types with en
        bad = tmp_path / "emb_es_disjoint.txt"
        bad.write_text(
            "".join(f"zz{i:03d} " + " ".join(["0.1"] * 8) + "\n" for i in range(20)),
            encoding="utf-8",
        )
        config = tmp_path / "bad.conf"
        config.write_text(
            "languages = en,es\npivot = en\n"
            f"embeddings.en = {root / 'emb_en.txt'}\n"
            f"embeddings.es = {bad}\n"
            f"data.en.train = {root / 'en.train.tsv'}\n"
            f"data.es.train = {root / 'es.train.tsv'}\n",
            encoding="utf-8",
        )
        assert main(["align", "--config", str(config), "--out", str(tmp_path / "a")]) == 2
        assert "es" in capsys.readouterr().err


class TestTrain:
    def test_multilingual_requires_alignment(self, toy_tree, tmp_path, capsys):
        _, config = toy_tree
        code = main(
            [
                "train",
                "--config",
                str(config),
                "--mode",
                "multilingual",
                "--alignment",
                str(tmp_path / "missing"),
                "--out",
                str(tmp_path / "m"),
            ]
        )
        assert code == 2
        assert "align" in capsys.readouterr().err

    def test_monolingual_needs_exactly_one_language(self, toy_tree, tmp_path):
        _, config = toy_tree
        code = main(
            [
                "train",
                "--config",
                str(config),
                "--mode",
                "monolingual",
                "--out",
                str(tmp_path / "m"),
            ]
        )
        assert code == 1

    def test_config_override_flag(self, workdir, tmp_path, capsys):
        _, config, out = workdir
        code = main(
            [
                "train",
                "--config",
                str(config),
                "--mode",
                "monolingual",
                "--train-languages",
                "en",
                "--out",
                str(tmp_path / "m"),
                "--C",
                "1.0",
                "--seed",
                "9",
            ]
        )
        assert code == 0
        assert main(["inspect", "--bundle", str(tmp_path / "m")]) == 0
        text = capsys.readouterr().out
        assert "C = 1.0" in text
        assert "seed = 9" in text

    def test_with_dev_concatenates_dev_split(self, toy_tree, tmp_path, capsys):
        _, config = toy_tree
        code = main(
            [
                "train",
                "--config",
                str(config),
                "--mode",
                "monolingual",
                "--train-languages",
                "en",
                "--with-dev",
                "--out",
                str(tmp_path / "m"),
            ]
        )
        assert code == 0
        # 3 classes x (12 train + 2 dev) documents
        assert "42 documents" in capsys.readouterr().out

    def test_unknown_config_key_is_usage_error(self, toy_tree, tmp_path, capsys):
        _, config = toy_tree
        code = main(
            [
                "train",
                "--config",
                str(config),
                "--mode",
                "monolingual",
                "--train-languages",
                "en",
                "--out",
                str(tmp_path / "m"),
                "--no-such-key",
                "1",
            ]
        )
        assert code == 1
        assert "no-such-key" in capsys.readouterr().err


class TestPredictEvaluate:
    def test_predict_then_evaluate(self, workdir, tmp_path, capsys):
        root, _, out = workdir
        preds = tmp_path / "preds.tsv"
        assert (
            main(
                [
                    "predict",
                    "--bundle",
                    str(out / "multi"),
                    "--input",
                    str(root / "es.test.tsv"),
                    "--language",
                    "es",
                    "--out",
                    str(preds),
                ]
            )
            == 0
        )
        stdout = capsys.readouterr().out
        assert "OOV rate" in stdout
        lines = preds.read_text(encoding="utf-8").splitlines()
        test_lines = (root / "es.test.tsv").read_text(encoding="utf-8").splitlines()
        assert len(lines) == len(test_lines)
        assert all(len(line.split("\t")) == 2 for line in lines)
        # ids preserved in order
        assert [l.split("\t")[0] for l in lines] == [
            l.split("\t")[0] for l in test_lines
        ]

        json_out = tmp_path / "metrics.json"
        code = main(
            [
                "evaluate",
                "--gold",
                str(root / "es.test.tsv"),
                "--pred",
                str(preds),
                "--language",
                "es",
                "--json-out",
                str(json_out),
            ]
        )
        assert code == 0
        payload = json.loads(json_out.read_text(encoding="utf-8"))
        assert payload["language"] == "es"
        assert 0.0 <= payload["weighted_f1"] <= 1.0

    def test_training_file_of_separable_toy_reproduced(self, workdir, tmp_path):
        root, _, out = workdir
        preds = tmp_path / "train_preds.tsv"
        assert (
            main(
                [
                    "predict",
                    "--bundle",
                    str(out / "multi"),
                    "--input",
                    str(root / "en.train.tsv"),
                    "--language",
                    "en",
                    "--out",
                    str(preds),
                ]
            )
            == 0
        )
        gold_lines = (root / "en.train.tsv").read_text(encoding="utf-8").splitlines()
        pred_lines = preds.read_text(encoding="utf-8").splitlines()
        gold = [line.split("\t")[2] for line in gold_lines]
        predicted = [line.split("\t")[1] for line in pred_lines]
        assert predicted == gold

    def test_predictions_deterministic(self, workdir, tmp_path):
        root, _, out = workdir
        args = [
            "predict",
            "--bundle",
            str(out / "multi"),
            "--input",
            str(root / "en.test.tsv"),
            "--language",
            "en",
        ]
        assert main(args + ["--out", str(tmp_path / "p1.tsv")]) == 0
        assert main(args + ["--out", str(tmp_path / "p2.tsv")]) == 0
        assert (tmp_path / "p1.tsv").read_bytes() == (tmp_path / "p2.tsv").read_bytes()

    def test_empty_input(self, workdir, tmp_path):
        _, _, out = workdir
        empty = tmp_path / "empty.tsv"
        empty.write_text("", encoding="utf-8")
        code = main(
            [
                "predict",
                "--bundle",
                str(out / "multi"),
                "--input",
                str(empty),
                "--language",
                "en",
                "--out",
                str(tmp_path / "p.tsv"),
            ]
        )
        assert code == 0
        assert (tmp_path / "p.tsv").read_text(encoding="utf-8") == ""

    def test_language_not_in_bundle(self, workdir, tmp_path, capsys):
        root, _, out = workdir
        code = main(
            [
                "predict",
                "--bundle",
                str(out / "mono_en"),
                "--input",
                str(root / "es.test.tsv"),
                "--language",
                "es",
                "--out",
                str(tmp_path / "p.tsv"),
            ]
        )
        assert code == 1
        assert "es" in capsys.readouterr().err

    def test_malformed_input_is_data_error(self, workdir, tmp_path):
        _, _, out = workdir
        bad = tmp_path / "bad.tsv"
        bad.write_text("onlyonefield\n", encoding="utf-8")
        code = main(
            [
                "predict",
                "--bundle",
                str(out / "multi"),
                "--input",
                str(bad),
                "--language",
                "en",
                "--out",
                str(tmp_path / "p.tsv"),
            ]
        )
        assert code == 2

    def test_evaluate_worked_example(self, tmp_path, capsys):
        gold = tmp_path / "gold.tsv"
        gold.write_text(
            "1\tx\tcomment\n2\tx\tcomment\n3\tx\tcomplaint\n4\tx\tcomplaint\n",
            encoding="utf-8",
        )
        pred = tmp_path / "pred.tsv"
        pred.write_text(
            "1\tcomment\n2\tcomplaint\n3\tcomplaint\n4\tcomplaint\n", encoding="utf-8"
        )
        assert main(["evaluate", "--gold", str(gold), "--pred", str(pred)]) == 0
        out = capsys.readouterr().out
        assert "73.33" in out  # weighted F1 of the worked 4-pair example

    def test_evaluate_perfect(self, tmp_path, capsys):
        gold = tmp_path / "gold.tsv"
        gold.write_text("1\tx\tbug\n2\tx\tcomment\n", encoding="utf-8")
        pred = tmp_path / "pred.tsv"
        pred.write_text("1\tbug\n2\tcomment\n", encoding="utf-8")
        assert main(["evaluate", "--gold", str(gold), "--pred", str(pred)]) == 0
        out = capsys.readouterr().out
        assert "100.00" in out

    def test_evaluate_count_mismatch(self, tmp_path, capsys):
        gold = tmp_path / "gold.tsv"
        gold.write_text("1\tx\tbug\n2\tx\tbug\n", encoding="utf-8")
        pred = tmp_path / "pred.tsv"
        pred.write_text("1\tbug\n", encoding="utf-8")
        assert main(["evaluate", "--gold", str(gold), "--pred", str(pred)]) == 2
        assert "count mismatch" in capsys.readouterr().err

    def test_evaluate_id_mismatch_names_divergence(self, tmp_path, capsys):
        gold = tmp_path / "gold.tsv"
        gold.write_text("1\tx\tbug\n2\tx\tbug\n", encoding="utf-8")
        pred = tmp_path / "pred.tsv"
        pred.write_text("1\tbug\n3\tbug\n", encoding="utf-8")
        assert main(["evaluate", "--gold", str(gold), "--pred", str(pred)]) == 2
        err = capsys.readouterr().err
        assert "record 2" in err and "'3'" in err


class TestMatrix:
    def test_two_rows_without_translations(self, toy_tree, capsys):
        _, config = toy_tree
        assert main(["matrix", "--config", str(config)]) == 0
        out = capsys.readouterr().out
        assert "monolingual" in out
        assert "multilingual" in out
        assert "translated" not in out

    def test_three_rows_with_translations(self, toy_fixture, toy_tree, tmp_path, capsys):
        root, config = toy_tree
        # a stand-in "translated to pivot" file: pivot-language text with gold labels
        write_dataset_file(toy_fixture.test["en"], tmp_path / "es_translated.tsv")
        json_out = tmp_path / "grid.json"
        code = main(
            [
                "matrix",
                "--config",
                str(config),
                "--json-out",
                str(json_out),
                "--translations.es",
                str(tmp_path / "es_translated.tsv"),
            ]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "translated" in out
        translated_line = [l for l in out.splitlines() if l.startswith("translated")][0]
        assert "--" in translated_line  # en cell and avg are absent
        payload = json.loads(json_out.read_text(encoding="utf-8"))
        assert set(payload["rows"]) == {"monolingual", "multilingual", "translated"}
        assert set(payload["rows"]["translated"]) == {"es"}
        assert "en" in payload["rows"]["monolingual"]


def test_inspect_prints_manifest(workdir, capsys):
    _, _, out = workdir
    assert main(["inspect", "--bundle", str(out / "multi")]) == 0
    text = capsys.readouterr().out
    assert "mode = multilingual" in text
    assert "classes = bug,comment,complaint,meaningless,request" in text
    assert "table.es" in text


def test_unknown_flag_on_predict_is_usage_error(workdir, tmp_path, capsys):
    root, _, out = workdir
    code = main(
        [
            "predict",
            "--bundle",
            str(out / "multi"),
            "--input",
            str(root / "en.test.tsv"),
            "--language",
            "en",
            "--out",
            str(tmp_path / "p.tsv"),
            "--bogus",
            "1",
        ]
    )
    assert code == 1
    assert "bogus" in capsys.readouterr().err


def test_missing_config_file(tmp_path, capsys):
    assert main(["align", "--config", str(tmp_path / "none.conf"), "--out", str(tmp_path)]) == 1
