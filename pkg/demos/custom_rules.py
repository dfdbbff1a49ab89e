"""
Writing your own schema and rules
=================================

The rule engine is driven entirely by data.  This script declares a four
question survey and two contradiction rules in code, then scores a handful
of hand-written responses.
"""
from integrity_kit import Condition, ContradictionRule, RawResponse, RuleSet, logic_score
from integrity_kit.ingest import preprocess
from integrity_kit.schema import QuestionKind, QuestionSpec, SurveySchema, validate_response
from integrity_kit.textscore import score_texts

schema = SurveySchema((
    QuestionSpec("owns_car", "Do you own a car?", QuestionKind.SINGLE_CHOICE, ("Yes", "No")),
    QuestionSpec("car_brand", "Which brand?", QuestionKind.SINGLE_CHOICE, ("Toyota", "Ford", "Other")),
    QuestionSpec("commute_rating", "Rate your commute", QuestionKind.LIKERT, likert=(1, 5)),
    QuestionSpec("commute_notes", "Anything else about your commute?", QuestionKind.FREE_TEXT),
))

rules = RuleSet((
    ContradictionRule("no_car_but_brand", Condition.equals("owns_car", "No"), Condition.not_blank("car_brand"),
                      "claims no car but names a brand"),
    ContradictionRule("car_but_no_brand", Condition.equals("owns_car", "Yes"), Condition.is_blank("car_brand"),
                      "owns a car but skipped the brand"),
))
rules.check_against(schema)

# %%
# Answers are matched after normalization, so "no." and " NO " both count as "No".
responses = [
    RawResponse("careful", {"owns_car": "Yes", "car_brand": "Ford", "commute_rating": 4,
                            "commute_notes": "Traffic on the ring road is the main delay most mornings."}),
    RawResponse("contradicts", {"owns_car": "no.", "car_brand": "toyota", "commute_rating": 2,
                                "commute_notes": "ok"}),
    RawResponse("skipped", {"owns_car": " YES "}),
]
for raw in responses:
    assert validate_response(schema, raw) == []

# %%
# The logic score starts at 1 and loses 0.4 per fired rule, 0.3 when more
# than half the fields are blank and 0.1 per generic free-text answer.
for raw, clean in zip(responses, preprocess(responses, schema)):
    report = logic_score(clean, schema, rules)
    text = score_texts(clean, schema, rules.generic_stoplist)
    print(f"{raw.respondent_id:12} logic={report.logic_score:.1f} suspicious={report.suspicious!s:5} "
          f"reasons={report.reasons} text={text.combined:.2f}")
