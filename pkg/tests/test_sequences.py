import random

import pytest

from learning import ParsedOutput, build_input, format_target, parse_output, task_sequences
from learning.sequences import MARKERS, UNDISCERNED
from translation import ObjectAnnotation
from utils.config import ABLATIONS, RunConfig
from utils.dataset import LABELS, Sample
from utils.errors import LabelError, SequenceError


def make_sample(with_object=False, ac="a warm golden stadium"):
    obj = ObjectAnnotation(object_id="1", bbox=(0, 0, 5, 5), linked_target="Messi") if with_object else None
    return Sample(id="x", image="x.jpg", sentence="Messi lifts the cup", target="Messi", label="positive",
                  object=obj, ac=ac, ac_generic="a stadium", od="a joyful face" if with_object else None,
                  od_kind="FD" if with_object else None, sr="he lifts the cup", ir="the light feels warm")


class TestBuildInput:
    def test_caption_layout_without_object(self):
        assert build_input("SC", make_sample()) == \
            "<sc> <sep> a warm golden stadium <sep> Messi lifts the cup <sep> Messi"

    def test_object_layout(self):
        assert build_input("IRG", make_sample(with_object=True)) == \
            "<irg> <sep> Messi lifts the cup <sep> a joyful face <sep> Messi"

    def test_tasks_share_the_tail(self):
        sample = make_sample(with_object=True)
        tails = {build_input(task, sample).split(" ", 1)[1] for task in ("SC", "SRG", "IRG")}
        assert len(tails) == 1

    def test_missing_caption_rejected(self):
        with pytest.raises(SequenceError):
            build_input("SC", make_sample(ac=None))

    def test_without_captions(self):
        assert build_input("SC", make_sample(ac=None), enable_aes_cap=False) == \
            "<sc> <sep> Messi lifts the cup <sep> Messi"

    def test_object_descriptions_disabled(self):
        text = build_input("SRG", make_sample(with_object=True), enable_od=False)
        assert text == "<srg> <sep> a warm golden stadium <sep> Messi lifts the cup <sep> Messi"

    def test_generic_caption(self):
        assert build_input("SC", make_sample(), caption="generic").startswith("<sc> <sep> a stadium <sep>")

    def test_markers_in_text_are_escaped(self):
        sample = make_sample()
        sample.sentence = "a <sen> trick & more"
        assert "&lt;sen> trick &amp; more" in build_input("SC", sample)

    def test_unknown_task(self):
        with pytest.raises(SequenceError):
            build_input("XX", make_sample())


class TestFormat:
    def test_sc(self):
        assert format_target("SC", "positive") == "<sen> positive </sen>"

    def test_srg(self):
        assert format_target("SRG", "neutral", "because it is plain") == \
            "<sr> because it is plain </sr> <sen> neutral </sen>"

    def test_irg(self):
        assert format_target("IRG", "negative", "grim") == "<ir> grim </ir> <sen> negative </sen>"

    def test_rationale_rules(self):
        with pytest.raises(SequenceError):
            format_target("SC", "positive", "no")
        with pytest.raises(SequenceError):
            format_target("SRG", "positive")
        with pytest.raises(LabelError):
            format_target("SC", "great")


ALPHABET = list("abcxyz ABC.,;!?&<>/é\n") + MARKERS + ["&lt;", "&amp;"]


def random_text(rng, max_len=12):
    return "".join(rng.choice(ALPHABET) for _ in range(rng.randint(0, max_len)))


class TestParse:
    def test_round_trip(self):
        rng = random.Random(0)
        for _ in range(1000):
            task = rng.choice(["SC", "SRG", "IRG"])
            label = rng.choice(LABELS)
            rationale = None if task == "SC" else random_text(rng)
            parsed = parse_output(task, format_target(task, label, rationale))
            assert parsed == ParsedOutput(sentiment=label, rationale=rationale)

    def test_garbage_is_undiscerned(self):
        assert parse_output("SC", "the answer is positive") == ParsedOutput(sentiment=UNDISCERNED)
        assert parse_output("SC", "<sen> great </sen>").sentiment == UNDISCERNED
        assert not parse_output("SC", "").discerned

    def test_first_well_formed_span_wins(self):
        assert parse_output("SC", "<sen> neutral </sen> <sen> positive </sen>").sentiment == "neutral"

    def test_rationale_without_sentiment(self):
        parsed = parse_output("SRG", "<sr> half done </sr>")
        assert parsed == ParsedOutput(sentiment=UNDISCERNED, rationale="half done")

    def test_never_raises(self):
        rng = random.Random(1)
        for _ in range(10000):
            task = rng.choice(["SC", "SRG", "IRG"])
            value = rng.choice([
                random_text(rng, 30),
                bytes(rng.randrange(256) for _ in range(rng.randint(0, 20))),
                None,
                rng.randint(-5, 5),
            ])
            parsed = parse_output(task, value)
            assert parsed.sentiment in LABELS + (UNDISCERNED,)


class TestTaskSequences:
    def test_all_tasks(self):
        sequences = task_sequences(make_sample(), RunConfig())
        assert [s.task for s in sequences] == ["SC", "SRG", "IRG"]
        assert sequences[1].target_text == "<sr> he lifts the cup </sr> <sen> positive </sen>"

    def test_switches_drop_tasks(self):
        config = RunConfig(enable_srg=False, enable_irg=False)
        assert [s.task for s in task_sequences(make_sample(), config)] == ["SC"]

    def test_missing_rationale(self):
        sample = make_sample()
        sample.ir = None
        with pytest.raises(SequenceError):
            task_sequences(sample, RunConfig())
        assert len(task_sequences(sample, RunConfig(), with_targets=False)) == 3

    @pytest.mark.parametrize("row,with_object,tasks,sc_input", [
        ("full", True, ["SC", "SRG", "IRG"], "<sc> <sep> Messi lifts the cup <sep> a joyful face <sep> Messi"),
        ("wo_od", True, ["SC", "SRG", "IRG"], "<sc> <sep> a warm golden stadium <sep> Messi lifts the cup <sep> Messi"),
        ("wo_aes_cap", False, ["SC", "SRG", "IRG"], "<sc> <sep> Messi lifts the cup <sep> Messi"),
        ("wo_irg_ac", False, ["SC", "SRG"], "<sc> <sep> a stadium <sep> Messi lifts the cup <sep> Messi"),
    ])
    def test_ablation_rows_change_the_inputs(self, row, with_object, tasks, sc_input):
        config = RunConfig().with_overrides(**ABLATIONS[row])
        sequences = task_sequences(make_sample(with_object=with_object), config)
        assert [s.task for s in sequences] == tasks
        assert sequences[0].input_text == sc_input

    def test_without_object_descriptions_an_object_sample_keeps_its_caption(self):
        config = RunConfig().with_overrides(**ABLATIONS["wo_od"])
        inputs = [s.input_text for s in task_sequences(make_sample(with_object=True), config)]
        assert all("a joyful face" not in text and "a warm golden stadium" in text for text in inputs)
