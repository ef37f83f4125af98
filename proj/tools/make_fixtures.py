#!/usr/bin/env python3
"""Regenerates the committed fixtures under data/fixtures.

The dialogue text is written by hand below. Mock replies are derived from a
keyword table so that every fixture utterance has a graded soft label.
Run from the repository root: python3 tools/make_fixtures.py
"""
import json
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent
OUT = ROOT / "data" / "fixtures"

LABELS = ["joy", "anger", "fear", "surprise", "compassion", "sadness", "neutral"]

# (id, outcome, first speaker, turns, reports)
# reports: role -> (frustration, [outcome_feeling, process, relationship, self_feeling]) or None
DIALOGUES = [
    ("d01", "resolved", "buyer", [
        "Hi, the lamp I ordered arrived with a cracked base.",
        "Oh no, I'm sorry to hear that. Can you send a photo?",
        "Sure, I just uploaded it. It's pretty obvious.",
        "I see it. That must have happened in shipping.",
        "Either way I paid for a working lamp.",
        "I understand. Would a partial refund of half work for you?",
        "Half seems low, but I could live with it if you also remove the review request.",
        "That's fair. I'll refund half and skip the review request.",
        "Great, thanks for being reasonable.",
        "Thank you for your patience. Submit Deal",
    ], {"buyer": (2.0, [5.5, 5.0, 5.5, 5.0]), "seller": (1.5, [5.0, 5.5, 6.0, 5.5])}),
    ("d02", "impasse", "buyer", [
        "This jacket is not what was shown in the listing at all!",
        "Really? The listing photos are accurate. What exactly is wrong?",
        "The color is completely different and the zipper broke on day one!",
        "Zippers break when people force them. That's not on me.",
        "Are you seriously blaming me? This is ridiculous.",
        "I'm not refunding for damage you caused.",
        "I want a full refund or I'm leaving a bad review.",
        "Threatening me won't work. No refund.",
        "This is unacceptable. I'm reporting you.",
        "I Walk Away",
    ], {"buyer": (6.5, [1.5, 1.5, 1.0, 2.5]), "seller": (6.0, [2.0, 1.5, 1.0, 3.0])}),
    ("d03", "resolved", "seller", [
        "Hello, I saw your message about the late delivery.",
        "Yes, the package came a week after the promised date.",
        "I apologize, the courier had a backlog. Did the item arrive intact?",
        "It did, and it works fine. I just needed it for a trip.",
        "I understand how frustrating that is. Can I offer a small refund?",
        "That would be nice. Maybe ten dollars?",
        "Ten dollars is fine with me.",
        "Great, deal then.",
        "Submit Deal",
    ], {"buyer": (3.0, [5.0, 5.0, 5.5, 5.0]), "seller": (2.0, [5.5, 5.5, 6.0, 5.5])}),
    ("d04", "impasse", "seller", [
        "You opened a dispute about the headphones. What is the problem?",
        "The left side doesn't work. I want my money back.",
        "Did you try a different cable? Most of the time that's the issue.",
        "Yes, I tried three cables. It is broken.",
        "I tested them before shipping. They worked perfectly.",
        "Well they don't work now. Are you calling me a liar?",
        "I'm saying I can't refund without proof.",
        "I sent a video already. This is a scam.",
        "I'm worried that video could be anything.",
        "Unbelievable. I'm done with this.",
        "I Walk Away",
    ], {"buyer": (6.0, [1.5, 2.0, 1.5, 2.5]), "seller": (5.5, [2.0, 2.0, 1.5, 3.0])}),
    ("d05", "resolved", "buyer", [
        "Hi there, the book I got has water damage on the cover.",
        "Really? I'm surprised, it was sealed in plastic.",
        "The plastic was torn. Maybe it got wet in transit.",
        "That's unfortunate. I feel bad about that.",
        "It's still readable, I'm just a bit disappointed.",
        "Would you like a replacement or a refund?",
        "A replacement would be perfect if you have one.",
        "I have one more copy. I'll ship it tomorrow.",
        "Wonderful, thank you so much.",
        "Happy to help. Submit Deal",
    ], {"buyer": (1.5, [6.0, 6.0, 6.5, 5.5]), "seller": (1.5, [6.0, 6.0, 6.5, 6.0])}),
    ("d06", "impasse", "buyer", [
        "I never received the phone case I ordered.",
        "Tracking shows it was delivered to your address.",
        "It wasn't. I checked with my neighbors too.",
        "I can't control what happens after delivery.",
        "So I'm just supposed to lose my money?",
        "You could file a claim with the carrier.",
        "I'm worried that will take forever and go nowhere.",
        "That's the process. It's disappointing for me too.",
        "This is really disappointing. I expected better.",
        "I'm sorry, but I won't refund a delivered item.",
        "I Walk Away",
    ], {"buyer": (5.5, [2.0, 2.5, 2.0, 3.0]), "seller": (4.0, [3.0, 3.0, 2.5, 3.5])}),
    ("d07", "resolved", "seller", [
        "Hi, I noticed you asked about returning the blender.",
        "Yes, it is much louder than I expected.",
        "Loudness is normal for that model, but I understand.",
        "I'd like to return it for a refund if possible.",
        "You can return it, but there is a restocking fee.",
        "How much is the fee?",
        "Unfortunately it is fifteen percent of the price.",
        "That's a lot. Could you do ten percent?",
        "Okay, ten percent works.",
        "Thanks, I appreciate it.",
        "Submit Deal",
    ], {"buyer": (2.5, [4.5, 4.0, 4.5, 4.5]), "seller": (4.5, [5.0, 4.5, 5.0, 5.0])}),
    ("d08", "impasse", "seller", [
        "Your dispute says the shoes are the wrong size.",
        "I ordered a nine and got a seven!",
        "My records show you ordered a seven.",
        "That's absolutely not true. Check again!",
        "I checked. I'm sorry, the order says seven.",
        "This is outrageous. Your site must have a bug.",
        "There is no bug. Please stop shouting at me.",
        "I'm not shouting, I'm angry because you're wrong.",
        "I Walk Away",
    ], {"buyer": (6.5, [1.0, 1.5, 1.0, 2.0]), "seller": (5.0, [2.0, 2.0, 1.5, 3.0])}),
    ("d09", "resolved", "buyer", [
        "Hello, the chair I bought is missing two screws.",
        "Oh, sorry about that! I can mail you the screws.",
        "That would be great. How long will it take?",
        "About three days, sorry.",
        "Okay. Could you also include a spare in case?",
        "Sure, I'll add two spares.",
        "Perfect, thank you.",
        "You're welcome. Submit Deal",
    ], {"buyer": (1.0, [6.5, 6.0, 6.5, 6.0]), "seller": (1.0, [6.0, 6.5, 6.5, 6.0])}),
    ("d10", "resolved", "seller", [
        "Hi, I see a complaint about the watch strap.",
        "The strap snapped after two days. I'm pretty annoyed.",
        "Wow, that shouldn't happen. I'm sorry.",
        "I just want it fixed, no drama.",
        "I can send a new strap or refund twenty dollars.",
        "Wow, I didn't expect such a quick offer.",
        "I want you to be happy with it.",
        "A new strap is fine. Thanks.",
        "Submit Deal",
    ], {"buyer": (2.5, [5.5, 5.5, 5.0, 5.5]), "seller": None}),
]

# Keyword cues to graded weights. Matches accumulate; leftovers go to neutral.
CUES = [
    ("ridiculous", "anger", 0.5), ("unacceptable", "anger", 0.5), ("scam", "anger", 0.6),
    ("outrageous", "anger", 0.6), ("seriously", "anger", 0.3), ("angry", "anger", 0.5),
    ("!", "anger", 0.2), ("liar", "anger", 0.4), ("unbelievable", "anger", 0.4),
    ("threatening", "anger", 0.3), ("shouting", "anger", 0.3), ("annoyed", "anger", 0.4),
    ("not true", "anger", 0.3), ("done with", "anger", 0.3), ("reporting", "anger", 0.3),
    ("walk away", "anger", 0.4),
    ("thank", "joy", 0.5), ("great", "joy", 0.4), ("wonderful", "joy", 0.6), ("perfect", "joy", 0.5),
    ("happy", "joy", 0.4), ("nice", "joy", 0.3), ("appreciate", "joy", 0.4), ("deal", "joy", 0.2),
    ("sorry", "compassion", 0.4), ("understand", "compassion", 0.3), ("apologize", "compassion", 0.4),
    ("feel bad", "compassion", 0.4), ("patience", "compassion", 0.3),
    ("disappoint", "sadness", 0.4), ("unfortunate", "sadness", 0.3), ("lose my money", "sadness", 0.4),
    ("worried", "fear", 0.4), ("afraid", "fear", 0.3), ("forever", "fear", 0.2),
    ("really?", "surprise", 0.4), ("surprised", "surprise", 0.4), ("wow", "surprise", 0.5),
    ("didn't expect", "surprise", 0.3),
]


def soft_label(text):
    lower = text.lower()
    w = dict.fromkeys(LABELS, 0.0)
    for cue, label, amount in CUES:
        if cue in lower:
            w[label] += amount
    total = sum(w.values())
    if total > 0.9:
        w = {k: v * 0.9 / total for k, v in w.items()}
    w["neutral"] += 1.0 - sum(w.values())
    return {k: round(v, 4) for k, v in w.items()}


def fix_rounding(w):
    drift = round(1.0 - sum(w.values()), 4)
    w["neutral"] = round(w["neutral"] + drift, 4)
    return w


def build_corpus():
    dialogues = []
    for did, outcome, first, texts, reports in DIALOGUES:
        other = "seller" if first == "buyer" else "buyer"
        turns = [{"turn_index": i + 1, "speaker": first if i % 2 == 0 else other, "text": t}
                 for i, t in enumerate(texts)]
        reps = {}
        for role, value in reports.items():
            if value is None:
                continue
            frustration, svi = value
            reps[role] = {"frustration": frustration,
                          "svi": dict(zip(["outcome_feeling", "process", "relationship", "self_feeling"], svi))}
        dialogues.append({"id": did, "outcome": outcome, "turns": turns, "reports": reps})
    return {"schema_version": "1.0", "dialogues": dialogues}


def dump(name, obj):
    (OUT / name).write_text(json.dumps(obj, indent=2) + "\n")


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    corpus = build_corpus()
    dump("corpus_fixture.json", corpus)

    dump("fixture_manifest.json", {
        "dialogues": len(corpus["dialogues"]),
        "utterances": sum(len(d["turns"]) for d in corpus["dialogues"]),
        "turn_counts": {d["id"]: len(d["turns"]) for d in corpus["dialogues"]},
        "impasse": sorted(d["id"] for d in corpus["dialogues"] if d["outcome"] == "impasse"),
        "missing_reports": {"d10": ["seller"]},
    })

    responses = {}
    for d in corpus["dialogues"]:
        for t in d["turns"]:
            w = fix_rounding(soft_label(t["text"]))
            responses[t["text"]] = [json.dumps(w, separators=(",", ":"))]
    # Replies that need a retry before a usable answer arrives.
    flaky = {
        "Sure, I just uploaded it. It's pretty obvious.": ["I think this is mostly neutral.",
                                                           '{"neutral": 0.5, "joy": 0.2}'],
        "Tracking shows it was delivered to your address.": ['{"neutral": 0.9, "anger": -0.1, "fear": 0.2}'],
        "Okay, ten percent works.": ['{"neutral": "high"}'],
    }
    for text, bad in flaky.items():
        responses[text] = bad + responses[text]
    dump("mock_script.json", {"mode": "by_target", "responses": responses})

    # Hard labels for the one-hot classifier baseline (six-label schema).
    hard = []
    for d in corpus["dialogues"]:
        for t in d["turns"]:
            w = soft_label(t["text"])
            w.pop("neutral")
            mapped = {"compassion": "love"}
            best = max(w, key=lambda k: (w[k], -LABELS.index(k)))
            label = mapped.get(best, best) if w[best] > 0 else "joy"
            hard.append({"dialogue_id": d["id"], "turn_index": t["turn_index"], "label": label})
    dump("hard_labels.json", {"labels": hard})

    # Three human annotators over the first four dialogues; no surprise label.
    human_labels = ["joy", "anger", "fear", "compassion", "sadness", "neutral"]
    anns = []
    for n, d in enumerate(corpus["dialogues"][:4]):
        for t in d["turns"]:
            base = soft_label(t["text"])
            base["neutral"] += base.pop("surprise")
            for a, tilt in enumerate([0.0, 0.05, -0.05]):
                w = dict(base)
                shift = min(w["neutral"], max(0.0, tilt)) if tilt > 0 else max(-w["anger"], tilt)
                w["anger"] += shift
                w["neutral"] -= shift
                anns.append({"annotator": "h%d" % (a + 1), "dialogue_id": d["id"],
                             "turn_index": t["turn_index"],
                             "weights": {k: round(v, 4) for k, v in w.items()}})
    dump("human_annotations.json", {"labels": human_labels, "annotations": anns})

    dump("run_fixture.json", {
        "config_version": "1",
        "corpus": "corpus_fixture.json",
        "scale": {"min": 1, "max": 7},
        "cache_dir": "../../build/fixture_run/cache",
        "output_dir": "../../build/fixture_run/out",
        "parallelism": 4,
        "seed": 42,
        "failure_threshold": 0.05,
        "annotators": [
            {"label": "mock-llm", "type": "llm",
             "provider": {"base_url": "mock:", "model": "mock-soft-v1", "mock_script": "mock_script.json"},
             "prompt": {"history_turns": "unlimited", "icl_examples": "../icl_examples.json"},
             "max_attempts": 3},
            {"label": "one-hot", "type": "one_hot", "model": "keyword-classifier",
             "labels_file": "hard_labels.json"},
        ],
        "analysis": {"frustration": True, "frustration_scope": "both", "svi": True, "ablation": True,
                     "predictor_scheme": "own_side", "trajectory_emotions": ["anger", "compassion"],
                     "max_turn": 12},
        "benchmark": {"human_annotations": "human_annotations.json", "sample_size": 30,
                      "svi_comparison": True},
    })


if __name__ == "__main__":
    main()
