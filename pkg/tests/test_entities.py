from __future__ import annotations

import json

from crimekit.entities import (
    Entity,
    Gazetteers,
    Label,
    Tag,
    default_gazetteers,
    entities_json,
    entities_of,
    extract_entities,
    lex,
    load_gazetteers,
    tag_tokens,
)

GAZ = Gazetteers(
    gpe=frozenset({"chicago", "new york", "illinois"}),
    org=frozenset({"fbi", "justice department"}),
    person_titles=frozenset({"president", "officer", "mr", "senator"}),
)


# --- lexing and tagging -------------------------------------------------------


def test_lex_splits_words_and_punctuation():
    assert lex("Trump visited Chicago.") == ["Trump", "visited", "Chicago", "."]
    assert lex("a $5 fine, paid") == ["a", "$", "5", "fine", ",", "paid"]
    assert lex("don’t") == ["don't"]


def test_tag_tokens_five_way():
    tags = [t.tag for t in tag_tokens(lex("He met Trump on Monday 5 ."))]
    assert tags == [
        Tag.WORD,           # sentence-initial capitalized word
        Tag.WORD,
        Tag.PROPER_CANDIDATE,
        Tag.WORD,
        Tag.DATE_WORD,
        Tag.NUMBER,
        Tag.PUNCT,
    ]


def test_tag_tokens_sentence_boundary_resets():
    tagged = tag_tokens(lex("It rained. Chicago flooded."))
    by_word = {t.word: t.tag for t in tagged}
    # "Chicago" is sentence-initial, so capitalization proves nothing
    assert by_word["Chicago"] == Tag.WORD
    tagged2 = tag_tokens(lex("It rained in Chicago."))
    assert {t.word: t.tag for t in tagged2}["Chicago"] == Tag.PROPER_CANDIDATE


def test_tag_tokens_date_words_win_over_position():
    tagged = tag_tokens(lex("Monday was quiet."))
    assert tagged[0].tag == Tag.DATE_WORD
    # lowercase month names stay plain words
    assert tag_tokens(["in", "march"])[1].tag == Tag.WORD


def test_tag_tokens_comma_does_not_reset():
    tagged = tag_tokens(lex("Yes, Trump spoke."))
    assert {t.word: t.tag for t in tagged}["Trump"] == Tag.PROPER_CANDIDATE


# --- extraction ---------------------------------------------------------------


def test_extract_person_gpe_date():
    ents = entities_of("President Trump visited Chicago on Monday .", GAZ)
    assert ents == [
        Entity("Trump", Label.PERSON, 1, 2),
        Entity("Chicago", Label.GPE, 3, 4),
        Entity("Monday", Label.DATE, 5, 6),
    ]


def test_multiword_gpe_full_match():
    ents = entities_of("Crime fell in New York this year.", GAZ)
    assert ents == [Entity("New York", Label.GPE, 3, 5)]


def test_org_lookup():
    ents = entities_of("Agents from the FBI arrived.", GAZ)
    assert ents == [Entity("FBI", Label.ORG, 3, 4)]


def test_preceding_title_cue_marks_person():
    ents = entities_of("The agency sent Officer Daniel Reyes home.", GAZ)
    # the title itself is capitalized mid-sentence, so the run starts at
    # "Officer"; the leading cue is stripped from the span
    assert ents == [Entity("Daniel Reyes", Label.PERSON, 4, 6)]


def test_unknown_capitalized_run_is_other():
    ents = entities_of("They toured the Grand Bazaar today.", GAZ)
    assert ents == [Entity("Grand Bazaar", Label.OTHER, 3, 5)]


def test_date_runs_merge_numbers():
    ents = entities_of("It happened on March 5 2017 downtown.", GAZ)
    assert ents == [Entity("March 5 2017", Label.DATE, 3, 6)]


def test_bare_numbers_are_not_dates():
    assert entities_of("There were 44 arrests in 2017.", GAZ) == []


def test_sentence_initial_requires_admission():
    # "Chicago" is in the gazetteer, so it is admitted at sentence start
    assert entities_of("Chicago saw less crime.", GAZ) == [
        Entity("Chicago", Label.GPE, 0, 1)
    ]
    # an arbitrary capitalized sentence opener is not
    assert entities_of("Crime fell sharply.", GAZ) == []


def test_sentence_initial_title_cue_strips_to_person():
    ents = entities_of("President Trump spoke.", GAZ)
    assert ents == [Entity("Trump", Label.PERSON, 1, 2)]


def test_all_cue_span_yields_nothing():
    # "President" alone at sentence start has nothing left once stripped
    assert entities_of("President spoke briefly.", GAZ) == []


def test_gpe_beats_org_beats_title_cue():
    gaz = Gazetteers(
        gpe=frozenset({"washington"}),
        org=frozenset({"washington"}),
        person_titles=frozenset({"president"}),
    )
    # the span text matches both gazetteers; GPE outranks ORG
    ents = entities_of("He saw Washington yesterday.", gaz)
    assert ents == [Entity("Washington", Label.GPE, 2, 3)]

    # with only an ORG entry, the full-span lookup outranks the
    # preceding lowercase title cue
    org_only = Gazetteers(
        gpe=frozenset(),
        org=frozenset({"washington"}),
        person_titles=frozenset({"president"}),
    )
    ents = entities_of("the president Washington spoke.", org_only)
    assert ents == [Entity("Washington", Label.ORG, 2, 3)]


def test_capitalized_title_joins_span_and_strips():
    gaz = Gazetteers(
        gpe=frozenset(),
        org=frozenset(),
        person_titles=frozenset({"president"}),
    )
    # a capitalized mid-sentence title is part of the capitalized run,
    # then stripped as a cue, leaving the name
    ents = entities_of("He met President Washington today.", gaz)
    assert ents == [Entity("Washington", Label.PERSON, 3, 4)]


def test_entities_json_compact():
    ents = [Entity("Trump", Label.PERSON, 1, 2)]
    assert entities_json(ents) == '[{"text":"Trump","label":"PERSON","start":1,"end":2}]'
    assert json.loads(entities_json([])) == []


# --- gazetteers ----------------------------------------------------------------


def test_load_gazetteers(tmp_path):
    (tmp_path / "gpe.txt").write_text("# places\nSpringfield\n", encoding="utf-8")
    (tmp_path / "org.txt").write_text("acme corp\n", encoding="utf-8")
    (tmp_path / "person_titles.txt").write_text("dr\n", encoding="utf-8")
    gaz = load_gazetteers(tmp_path)
    assert gaz.gpe == frozenset({"springfield"})
    assert gaz.org == frozenset({"acme corp"})
    assert gaz.person_titles == frozenset({"dr"})


def test_admission_words_split_multiword_entries():
    words = GAZ.admission_words()
    assert {"new", "york", "chicago", "justice", "president"} <= words


def test_default_gazetteers_nonempty():
    gaz = default_gazetteers()
    assert "chicago" in gaz.gpe
    assert "fbi" in gaz.org
    assert "president" in gaz.person_titles
    assert all(e == e.lower() for e in gaz.gpe | gaz.org | gaz.person_titles)


def test_extract_on_fixture_style_sentence():
    text = "Mayor Johnson met the FBI team in Chicago on March 5 ."
    ents = entities_of(text, default_gazetteers())
    labels = {e.text: e.label for e in ents}
    assert labels["Johnson"] == Label.PERSON
    assert labels["FBI"] == Label.ORG
    assert labels["Chicago"] == Label.GPE
    assert labels["March 5"] == Label.DATE


def test_spans_are_non_overlapping_and_ordered():
    text = "President Trump met Officer Daniel Reyes in New York on Monday May 1 2017 ."
    ents = entities_of(text, default_gazetteers())
    spans = [(e.start, e.end) for e in ents]
    assert spans == sorted(spans)
    for (s1, e1), (s2, e2) in zip(spans, spans[1:]):
        assert e1 <= s2
    for e in ents:
        assert e.start < e.end
