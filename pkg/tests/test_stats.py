import os

import pytest

from conftest import SRC
from evaluation import REFERENCE_LENGTHS, dataset_stats, flag_deviations, render_stats_table
from evaluation.stats import gold_rationale_quality
from utils.dataset import Sample, load_split


def hand_samples():
    return [
        Sample(id="a", image="1.jpg", sentence="Messi lifts the cup", target="Messi", label="positive",
               sr="one two three four", ac="a b", od="x y z", od_kind="FD"),
        Sample(id="b", image="1.jpg", sentence="Messi lifts the cup", target="cup", label="neutral",
               sr="one two", ac="a b c d", od="x", od_kind="AO"),
        Sample(id="c", image="2.jpg", sentence="Rain again", target="Rain", label="negative"),
    ]


def test_dataset_stats():
    stats = dataset_stats(hand_samples())
    assert (stats["positive"], stats["neutral"], stats["negative"], stats["total"]) == (1, 1, 1, 3)
    assert stats["sentences"] == 2
    assert stats["avg_length"] == pytest.approx(3.0)
    assert stats["avg_aspect"] == pytest.approx(1.5)
    assert stats["avg_sr"] == pytest.approx(3.0)
    assert stats["avg_ac"] == pytest.approx(3.0)
    assert stats["avg_fd"] == pytest.approx(3.0)
    assert stats["avg_ao"] == pytest.approx(1.0)
    assert stats["avg_ir"] is None


def test_flag_deviations():
    flags = flag_deviations({"avg_sr": 3.0, "avg_ir": 50.0, "avg_ac": None, "avg_ao": 100.0})
    assert len(flags) == 2
    assert flags[0].startswith("Avg. Length of SR")
    assert flags[1].startswith("Avg. Length of AO")


def test_table_marks_missing_values():
    table = render_stats_table({"train": dataset_stats(hand_samples())}).get_string()
    assert "#Sentence" in table and "Avg. Length of IR" in table
    assert " - " in table


def test_gold_rationale_quality():
    samples = hand_samples()
    samples[0].sr, samples[1].sr = "a happy win", "nothing here"
    quality = gold_rationale_quality(samples)
    assert list(quality) == ["SR"]
    assert quality["SR"]["n"] == 2 and quality["SR"]["acc"] == 1.0


TWITTER2015 = os.path.join(SRC, "data", "twitter2015")


def test_twitter2015_rationale_lengths():
    if not os.path.exists(os.path.join(TWITTER2015, "train.jsonl")):
        pytest.skip("Twitter-2015 is not under src/data/twitter2015")
    stats = dataset_stats(load_split(TWITTER2015, "train"))
    if stats["avg_sr"] is None:
        pytest.skip("no rationales attached to Twitter-2015 train")
    assert REFERENCE_LENGTHS["sr"] / 2 <= stats["avg_sr"] <= REFERENCE_LENGTHS["sr"] * 2
