#!/usr/bin/env python3
"""Generate the 60-document toy corpus used by the pipeline tests.

Usage: make_toy_corpus.py [--seed N] [--docs N] > tests/data/toy_corpus.jsonl
"""

import argparse
import json
import random

TOPICS = {
    "weather": {
        "nouns": ["storm", "rain", "river", "flood", "wind", "forecast", "valley", "snow", "coast", "temperature"],
        "verbs": ["hit", "flooded", "crossed", "cooled", "warned", "reached", "covered", "damaged"],
        "names": ["the weather service", "local farmers", "the mountain villages", "the harbour office"],
    },
    "economy": {
        "nouns": ["market", "inflation", "bank", "export", "price", "wage", "budget", "factory", "tax", "loan"],
        "verbs": ["raised", "lowered", "reported", "expected", "cut", "doubled", "approved", "reviewed"],
        "names": ["the central bank", "the finance ministry", "small businesses", "the trade union"],
    },
    "sport": {
        "nouns": ["match", "league", "coach", "goal", "season", "stadium", "player", "title", "final", "team"],
        "verbs": ["won", "lost", "scored", "signed", "trained", "defended", "celebrated", "announced"],
        "names": ["the home club", "the national team", "young supporters", "the veteran striker"],
    },
    "science": {
        "nouns": ["telescope", "cell", "experiment", "planet", "sample", "laboratory", "vaccine", "signal", "orbit", "gene"],
        "verbs": ["measured", "observed", "published", "confirmed", "tested", "detected", "funded", "mapped"],
        "names": ["the research institute", "a team of students", "the university", "independent reviewers"],
    },
}

# A few non-English sentences so tokenization and UTF-8 handling are exercised.
FOREIGN = [
    "Vreme bo jutri še vedno deževno, opozarjajo meteorologi.",
    "Gospodarska rast je bila v zadnjem četrtletju nižja od pričakovanj.",
    "Ekipa je po podaljšku osvojila naslov državnega prvaka.",
    "Raziskovalci so v vzorcih odkrili nov encim.",
]

FILLER = ["also", "again", "on monday", "this week", "after a long debate", "according to officials"]


def sentence(rng, topic, focus):
    t = TOPICS[topic]
    subj = rng.choice(t["names"])
    verb = rng.choice(t["verbs"])
    objs = [focus] + rng.sample(t["nouns"], 2)
    tail = rng.choice(FILLER)
    return f"{subj.capitalize()} {verb} the {objs[0]} and the {objs[1]} near the {objs[2]} {tail}."


def document(rng, index, long_doc):
    topic = rng.choice(sorted(TOPICS))
    focus = rng.choice(TOPICS[topic]["nouns"])
    n = rng.randint(48, 60) if long_doc else rng.randint(6, 22)
    sentences = [sentence(rng, topic, focus) for _ in range(n)]
    if rng.random() < 0.25:
        sentences.insert(rng.randrange(len(sentences) + 1), rng.choice(FOREIGN))
    paragraphs, i = [], 0
    while i < len(sentences):
        k = rng.randint(3, 6)
        paragraphs.append(" ".join(sentences[i : i + k]))
        i += k
    picks = sorted(rng.sample(range(len(sentences)), 2))
    summary = " ".join(sentences[p] for p in picks)
    summary = summary.replace(" the ", " a ", 1)
    return {"id": f"toy-{index:03d}", "text": "\n\n".join(paragraphs), "summary": summary}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--docs", type=int, default=60)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    long_ids = set(rng.sample(range(args.docs), args.docs // 6))
    for i in range(args.docs):
        print(json.dumps(document(rng, i, i in long_ids), ensure_ascii=False))


if __name__ == "__main__":
    main()
