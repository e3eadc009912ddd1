from pathlib import Path

import pytest

from core.errors import DataError, MissingLabelError, ResourceFormatError
from models.triple import PredictionRecord, Triple
from utils.file_utils import load_predictions, load_triples, read_commented_csv
from utils.filename_utils import (
    evaluation_report_path, prediction_output_path, report_output_path, split_name
)
from utils.logger import LogLevel, logger
from utils.performance_monitor import PerformanceMonitor, UsageSnapshot


class TestTriple:

    def test_validation(self):
        with pytest.raises(ValueError):
            Triple("frog", " ", "legs")
        with pytest.raises(ValueError):
            Triple("frog", "snail", "legs", 2)

    def test_swapped_drops_label(self):
        assert Triple("frog", "snail", "legs", 1).swapped() == Triple("snail", "frog", "legs")

    def test_prediction_record_consistency(self):
        triple = Triple("frog", "snail", "legs")
        assert PredictionRecord(triple, 1, 0.3).as_row() == ["frog", "snail", "legs", "1"]
        assert PredictionRecord(triple, 0, 0.0).predicted == 0
        with pytest.raises(ValueError):
            PredictionRecord(triple, 1, -0.3)


class TestLoadTriples:

    def test_labeled_and_unlabeled_rows(self, tmp_path):
        path = tmp_path / "split.csv"
        path.write_text("frog, snail ,legs,1\n\ncar,horse,wheels\n", encoding="utf-8")
        triples = load_triples(path)
        assert triples == [Triple("frog", "snail", "legs", 1), Triple("car", "horse", "wheels")]

    @pytest.mark.parametrize("text, line", [
        ("frog,snail\n", 1),
        ("frog,snail,legs,1\nfrog,,legs,0\n", 2),
        ("frog,snail,legs,yes\n", 1),
        ("frog,snail,legs,1,extra\n", 1),
    ])
    def test_malformed_rows(self, tmp_path, text, line):
        path = tmp_path / "split.csv"
        path.write_text(text, encoding="utf-8")
        with pytest.raises(ResourceFormatError) as info:
            load_triples(path)
        assert info.value.line == line
        assert f"split.csv:{line}" in str(info.value)

    def test_require_labels(self, tmp_path):
        path = tmp_path / "split.csv"
        path.write_text("frog,snail,legs,1\ncar,horse,wheels\n", encoding="utf-8")
        with pytest.raises(MissingLabelError) as info:
            load_triples(path, require_labels=True)
        assert info.value.line == 2

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError):
            load_triples(tmp_path / "absent.csv")


class TestCommentedCsv:

    def test_comments_only_before_rows(self, tmp_path):
        path = tmp_path / "out.csv"
        path.write_text("# seed=42\n#second\na,b\n# not a comment\n", encoding="utf-8")
        comments, rows = read_commented_csv(path)
        assert comments == ["seed=42", "second"]
        assert rows == [(3, ["a", "b"]), (4, ["# not a comment"])]

    def test_predictions_need_header(self, tmp_path):
        path = tmp_path / "predictions.csv"
        path.write_text("frog,snail,legs,1\n", encoding="utf-8")
        with pytest.raises(ResourceFormatError):
            load_predictions(path)

    def test_predictions_need_four_fields(self, tmp_path):
        path = tmp_path / "predictions.csv"
        path.write_text("# x\nterm1,term2,attribute,predicted\nfrog,snail,legs\n", encoding="utf-8")
        with pytest.raises(ResourceFormatError) as info:
            load_predictions(path)
        assert info.value.line == 3


class TestFilenames:

    @pytest.mark.parametrize("path, expected", [
        ("data/mini/validation.csv", "validation"),
        ("dev set (v2).csv", "dev_set_v2"),
        ("...csv", "split"),
    ])
    def test_split_name(self, path, expected):
        assert split_name(Path(path)) == expected

    def test_output_paths(self, tmp_path):
        out = tmp_path / "nested" / "out"
        assert prediction_output_path(out, Path("x/test.csv")) == out / "predictions_test.csv"
        assert report_output_path(out, "test") == out / "report_test.json"
        assert evaluation_report_path(out, "test") == out / "report_eval_test.json"
        assert out.is_dir()


class TestLogger:

    def test_callbacks_receive_messages(self):
        received = []
        logger.add_callback(received.append)
        try:
            logger.warning("weights clipped", source="Classifier")
        finally:
            logger.remove_callback(received.append)
        logger.info("after removal")

        assert [m.message for m in received] == ["weights clipped"]
        assert received[0].level is LogLevel.WARNING
        assert "[WARNING] [Classifier] weights clipped" in str(received[0])

    def test_broken_callback_is_ignored(self):
        def broken(_msg):
            raise RuntimeError("sink down")

        received = []
        logger.add_callback(broken)
        logger.add_callback(received.append)
        try:
            logger.info("still logged", source="Test")
        finally:
            logger.remove_callback(broken)
            logger.remove_callback(received.append)
        assert [m.message for m in received] == ["still logged"]

    def test_attach_file(self, tmp_path):
        path = logger.attach_file(tmp_path / "logs")
        try:
            logger.success("written to file", source="Test")
        finally:
            logger.detach_file()
        text = path.read_text(encoding="utf-8")
        assert path.name.startswith("discrim_")
        assert "[SUCCESS] [Test] written to file" in text
        assert "Log ended" in text

    def test_level_ranks(self):
        assert LogLevel.DEBUG.rank < LogLevel.INFO.rank == LogLevel.SUCCESS.rank < LogLevel.WARNING.rank < LogLevel.ERROR.rank


class TestPerformanceMonitor:

    def test_snapshot(self):
        monitor = PerformanceMonitor()
        sum(i * i for i in range(10000))
        usage = monitor.snapshot()
        assert usage.wall_seconds >= 0
        if monitor.is_available():
            assert usage.memory_mb > 0
            assert 0.0 <= usage.cpu_percent <= 100.0

    @pytest.mark.parametrize("mb, text", [(234.7, "234 MB"), (1024, "1.0 GB"), (1536, "1.5 GB")])
    def test_format_memory(self, mb, text):
        assert PerformanceMonitor.format_memory(mb) == text

    def test_describe_skips_missing_values(self):
        assert UsageSnapshot(1.5, None, None, None).describe() == "1.50 s wall"
        assert UsageSnapshot(1.5, 0.5, 12.0, 2048).describe() == "1.50 s wall, 0.50 s CPU, 12.0% of system, RSS 2.0 GB"
